// The four pages: welcome, catalog, customization form, download/result.
// Every form is generated from the component's manifest; nothing here
// knows any particular component.

import { Api, ApiError, ComponentDetail, ValueCell } from "./api.js";
import { FormModel } from "./form.js";
import { buildPreview } from "./preview.js";
import { colLetters, parseCell } from "./cells.js";

export interface PageContext {
  api: Api;
  root: HTMLElement;
  navigate: (hash: string) => void;
  // instantiation context carried from the form to the result page
  session: Map<string, { id: string; bindings: Record<string, string>; downloadUrl: string }>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

function crumbs(root: HTMLElement, ...parts: [string, string | null][]): void {
  const nav = el("nav", { class: "crumbs" });
  parts.forEach(([label, hash], i) => {
    if (i > 0) nav.append(" › ");
    nav.append(hash ? el("a", { href: hash }, label) : el("span", {}, label));
  });
  root.append(nav);
}

// -- welcome -----------------------------------------------------------------

export function renderWelcome(ctx: PageContext): void {
  const { root } = ctx;
  root.replaceChildren();
  root.append(el("h1", {}, "Spreadsheet parts repository"));
  root.append(
    el(
      "p",
      {},
      "A library of ready-made, tested pieces of spreadsheet. Pick a part, " +
        "tell us which cells of your spreadsheet it should read from and " +
        "write to, and we reshape it to fit before you download it.",
    ),
  );
  const p = el("p", {});
  p.append("Browse the ");
  p.append(el("a", { href: "#/catalog", id: "contents-link" }, "contents list"));
  p.append(" to find the part you need.");
  root.append(p);
}

// -- catalog -------------------------------------------------------------------

export async function renderCatalog(ctx: PageContext): Promise<void> {
  const { api, root } = ctx;
  root.replaceChildren();
  crumbs(root, ["Welcome", "#/"], ["Contents", null]);
  root.append(el("h1", {}, "Contents"));
  const list = el("ul", { class: "catalog" });
  root.append(list);
  const entries = await api.catalog();
  if (entries.length === 0) {
    root.append(el("p", { class: "muted" }, "The repository is empty."));
    return;
  }
  for (const entry of entries) {
    const item = el("li", { "data-id": entry.id });
    item.append(el("strong", {}, `${entry.title}: ${entry.summary}`));
    const links = el("div", { class: "links" });
    links.append(el("a", { href: `#/customize/${entry.id}`, class: "customize" }, "customise and download"));
    links.append(el("a", { href: `/api/components/${entry.id}/docs`, target: "_blank" }, "source and commentary"));
    item.append(links);
    list.append(item);
  }
}

// -- customization form ----------------------------------------------------

export async function renderCustomize(ctx: PageContext, id: string): Promise<void> {
  const { api, root, navigate, session } = ctx;
  root.replaceChildren();
  crumbs(root, ["Welcome", "#/"], ["Contents", "#/catalog"], ["Customise", null]);

  let detail: ComponentDetail;
  try {
    detail = await api.component(id);
  } catch (error) {
    root.append(el("p", { class: "form-error" }, `Cannot load component: ${String(error)}`));
    return;
  }

  root.append(el("h1", {}, detail.title));
  root.append(el("p", {}, detail.summary));
  root.append(
    el(
      "p",
      { class: "muted" },
      "Fill in the fields below and press Submit to get a copy of the part " +
        "customised to your own spreadsheet.",
    ),
  );

  const model = new FormModel(detail.params);
  const form = el("form", { class: "params", novalidate: "" });
  const formError = el("p", { class: "form-error", hidden: "" });
  const submit = el("button", { class: "submit", type: "submit" }, "Submit") as HTMLButtonElement;

  const fieldErrors = new Map<string, HTMLParagraphElement>();

  for (const field of model.fields) {
    const box = el("fieldset", { class: "param", "data-param": field.spec.name });
    box.append(el("legend", {}, field.spec.label));
    if (field.spec.kind === "cell-range") {
      const row = el("div", { class: "cells" });
      row.append(cellInput(field.spec.name, "sheet", "Sheet", (v) => (field.sheet = v)));
      row.append(cellInput(field.spec.name, "first", "First cell (top left)", (v) => (field.first = v)));
      row.append(cellInput(field.spec.name, "last", "Final cell (bottom right)", (v) => (field.last = v)));
      box.append(row);
    } else {
      const input = el("input", {
        type: "text",
        name: field.spec.name,
        autocomplete: "off",
      }) as HTMLInputElement;
      input.addEventListener("input", () => {
        field.value = input.value;
        refresh(false);
      });
      box.append(input);
    }
    const message = el("p", { class: "field-error" }, "");
    message.hidden = true;
    fieldErrors.set(field.spec.name, message);
    box.append(message);
    form.append(box);
  }

  form.append(formError);
  form.append(submit);
  root.append(form);

  function cellInput(param: string, part: string, label: string, sink: (v: string) => void) {
    const wrap = el("label", {}, label);
    const input = el("input", {
      type: "text",
      name: `${param}-${part}`,
      autocomplete: "off",
    }) as HTMLInputElement;
    input.addEventListener("input", () => {
      sink(input.value);
      refresh(false);
    });
    wrap.append(input);
    return wrap;
  }

  function refresh(showAll: boolean): void {
    // submit stays disabled until every field is present and well-formed
    submit.disabled = !model.valid;
    for (const field of model.fields) {
      const message = fieldErrors.get(field.spec.name)!;
      if (showAll) field.error = null;
      const error = showAll ? (model.validate(), field.error) : field.error;
      if (error && (showAll || touched.has(field.spec.name))) {
        message.textContent = error;
        message.hidden = false;
      } else {
        message.hidden = true;
      }
    }
  }

  const touched = new Set<string>();
  form.addEventListener("input", (event) => {
    const target = event.target as HTMLInputElement;
    const box = target.closest("fieldset[data-param]");
    if (box) touched.add(box.getAttribute("data-param")!);
    model.validate();
    refresh(false);
  });

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    formError.hidden = true;
    if (!model.validate()) {
      refresh(true);
      return; // inline errors shown; no navigation
    }
    submit.disabled = true;
    const bindings = model.bindings();
    try {
      const result = await api.instantiate(id, bindings, "tsv");
      session.set(result.token, { id, bindings, downloadUrl: result.download_url });
      navigate(`#/result/${result.token}`);
    } catch (error) {
      if (error instanceof ApiError && error.status === 422) {
        model.applyServerErrors(error.details as { param: string; code: string; message: string }[]);
        refresh(true);
        for (const field of model.fields) {
          const message = fieldErrors.get(field.spec.name)!;
          if (field.error) {
            message.textContent = field.error;
            message.hidden = false;
          }
        }
      } else {
        formError.textContent = `The request failed: ${String(error)}`;
        formError.hidden = false;
      }
      submit.disabled = !model.valid;
    }
  });

  refresh(false);
  submit.disabled = !model.valid;
}

// -- result ------------------------------------------------------------------

export async function renderResult(ctx: PageContext, token: string): Promise<void> {
  const { api, root, session } = ctx;
  root.replaceChildren();
  crumbs(root, ["Welcome", "#/"], ["Contents", "#/catalog"], ["Download", null]);
  root.append(el("h1", {}, "Your component is ready"));

  const context = session.get(token);
  const downloadUrl = context?.downloadUrl ?? `/api/downloads/${token}`;
  const link = el("a", { class: "download", href: `${api.base}${downloadUrl}`, download: "" }, "Download it from here");
  root.append(link);
  root.append(
    el(
      "p",
      { class: "muted" },
      "The file lists one cell per line: sheet, cell, kind and content, " +
        "ready to be read into your spreadsheet.",
    ),
  );

  if (!context) return;

  const heading = el("h2", {}, "Preview with example inputs");
  root.append(heading);
  const holder = el("div", { id: "preview" });
  holder.append(el("p", { class: "muted" }, "Evaluating…"));
  root.append(holder);
  try {
    const values = await buildPreview(api, context.id, context.bindings);
    holder.replaceChildren();
    for (const sheet of values.sheets) {
      if (values.sheets.length > 1) holder.append(el("h3", {}, sheet.name));
      holder.append(previewTable(sheet.cells));
    }
  } catch (error) {
    holder.replaceChildren(el("p", { class: "form-error" }, `Preview failed: ${String(error)}`));
  }
}

function previewTable(cells: ValueCell[]): HTMLTableElement {
  const values = new Map<string, string>();
  let maxRow = 0;
  let maxCol = 0;
  for (const cell of cells) {
    const parsed = parseCell(cell.ref);
    if (!parsed) continue;
    maxRow = Math.max(maxRow, parsed.row);
    maxCol = Math.max(maxCol, parsed.col);
    values.set(`${parsed.row},${parsed.col}`, cell.s ?? cell.e ?? String(cell.n ?? ""));
  }
  maxRow = Math.min(maxRow, 40);
  maxCol = Math.min(maxCol, 12);
  const table = el("table", { class: "preview" });
  const head = el("tr", {});
  head.append(el("th", {}, ""));
  for (let col = 1; col <= maxCol; col++) {
    head.append(el("th", {}, colLetters(col)));
  }
  table.append(head);
  for (let row = 1; row <= maxRow; row++) {
    const tr = el("tr", {});
    tr.append(el("th", {}, String(row)));
    for (let col = 1; col <= maxCol; col++) {
      tr.append(el("td", {}, values.get(`${row},${col}`) ?? ""));
    }
    table.append(tr);
  }
  return table;
}
