// UI smoke walk against the real HTTP service: welcome, catalog, the
// filter form, submit, download. The downloaded bytes must equal what the
// CLI produces for the same bindings, and an empty-pattern submit must
// show an inline error without navigating.

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { createApp, type App } from "../src/app.js";

const PORT = 8733;
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = join(dirname(fileURLToPath(import.meta.url)), "..", "..");
const FILTER_DIR = join(REPO_ROOT, "src", "sheetgen", "templates", "filter-remove-non-matches");

const BINDINGS = {
  pattern: "X*",
  input: { sheet: "Sheet1", first: "A3", last: "A15" },
  working: { sheet: "Sheet1", first: "B3", last: "B15" },
  output: { sheet: "Sheet1", first: "C3", last: "C15" },
};

let service: ChildProcess;
let app: App;
let root: HTMLElement;

async function waitFor<T>(probe: () => T | null | undefined | false, what: string, ms = 20000): Promise<T> {
  const deadline = Date.now() + ms;
  for (;;) {
    const result = probe();
    if (result) return result;
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${what}`);
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

async function serviceUp(): Promise<void> {
  const deadline = Date.now() + 30000;
  for (;;) {
    try {
      const response = await fetch(`${BASE}/api/components`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("service did not come up");
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
}

function setInput(name: string, value: string): void {
  const input = root.querySelector<HTMLInputElement>(`input[name="${name}"]`);
  expect(input, `input ${name}`).toBeTruthy();
  input!.value = value;
  input!.dispatchEvent(new Event("input", { bubbles: true }));
}

function fillRanges(): void {
  for (const name of ["input", "working", "output"] as const) {
    const range = BINDINGS[name];
    setInput(`${name}-sheet`, range.sheet);
    setInput(`${name}-first`, range.first);
    setInput(`${name}-last`, range.last);
  }
}

async function goto(hash: string): Promise<void> {
  window.location.hash = hash;
  await app.route();
}

beforeAll(async () => {
  service = spawn("sheetgen", ["serve", "--port", String(PORT)], { stdio: "ignore" });
  await serviceUp();
  document.body.innerHTML = '<main id="app"></main>';
  root = document.getElementById("app")!;
  // The window's origin is the service (see vitest.config.ts), exactly as
  // when the service serves the built UI at /.
  app = createApp(root, "", window);
});

afterAll(() => {
  service?.kill();
});

describe("repository walk", () => {
  it("welcome links to the contents list", async () => {
    await goto("#/");
    const link = root.querySelector<HTMLAnchorElement>("#contents-link");
    expect(link).toBeTruthy();
    expect(link!.getAttribute("href")).toBe("#/catalog");
  });

  it("catalog lists the filter component", async () => {
    await goto("#/catalog");
    await waitFor(() => root.querySelector("ul.catalog li"), "catalog entries");
    const entry = root.querySelector('li[data-id="filter-remove-non-matches"]');
    expect(entry).toBeTruthy();
    expect(entry!.textContent).toContain("Filter: removes all strings not matching a pattern");
  });

  it("the manifest-driven form submits and the download matches the CLI bytes", async () => {
    await goto("#/customize/filter-remove-non-matches");
    await waitFor(() => root.querySelector("form.params"), "the customization form");
    expect(root.textContent).toContain("Pattern to match");

    const submit = root.querySelector<HTMLButtonElement>("button.submit")!;
    expect(submit.disabled).toBe(true);

    setInput("pattern", BINDINGS.pattern);
    fillRanges();
    await waitFor(() => !submit.disabled, "submit to enable");

    const form = root.querySelector<HTMLFormElement>("form.params")!;
    form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    await waitFor(() => window.location.hash.startsWith("#/result/"), "the result page");

    const link = await waitFor(
      () => root.querySelector<HTMLAnchorElement>("a.download"),
      "the download link",
    );
    const href = link.getAttribute("href")!;
    expect(href).toContain("/api/downloads/");

    const response = await fetch(href.startsWith("http") ? href : `${BASE}${href}`);
    expect(response.status).toBe(200);
    const downloaded = Buffer.from(await response.arrayBuffer());

    const expected = execFileSync(
      "sheetgen",
      [
        "instantiate", FILTER_DIR,
        "--param", "pattern=X*",
        "--param", "input=Sheet1!A3:A15",
        "--param", "working=Sheet1!B3:B15",
        "--param", "output=Sheet1!C3:C15",
      ],
    );
    expect(downloaded.equals(expected)).toBe(true);

    const preview = await waitFor(
      () => root.querySelector("#preview table.preview"),
      "the evaluated preview",
    );
    // the example inputs produce the worked matching column
    expect(preview!.textContent).toContain("X2");
    expect(preview!.textContent).toContain("X4");
  });

  it("an empty pattern shows an inline error and stays on the form", async () => {
    await goto("#/customize/filter-remove-non-matches");
    await waitFor(() => root.querySelector("form.params"), "the customization form");
    fillRanges();

    const before = window.location.hash;
    const form = root.querySelector<HTMLFormElement>("form.params")!;
    form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));

    const message = await waitFor(
      () =>
        root.querySelector<HTMLParagraphElement>(
          'fieldset[data-param="pattern"] p.field-error:not([hidden])',
        ),
      "the inline pattern error",
    );
    expect(message.textContent).toMatch(/required/);
    expect(window.location.hash).toBe(before);
    expect(root.querySelector("form.params")).toBeTruthy();
  });
});
