// Hash router wiring the four pages together. Exported as a function so
// tests can boot the app against any window and API base.

import { Api } from "./api.js";
import { PageContext, renderCatalog, renderCustomize, renderResult, renderWelcome } from "./pages.js";

export interface App {
  ctx: PageContext;
  /** Render the page the current location.hash names. */
  route: () => Promise<void>;
}

export function createApp(root: HTMLElement, apiBase = "", win: Window = window): App {
  const ctx: PageContext = {
    api: new Api(apiBase),
    root,
    navigate: (hash) => {
      win.location.hash = hash;
      void route();
    },
    session: new Map(),
  };

  let rendered: string | null = null;

  async function route(): Promise<void> {
    const hash = win.location.hash || "#/";
    rendered = hash;
    const [, page, arg] = hash.match(/^#\/([^/]*)\/?(.*)$/) ?? [];
    if (page === "" || page === undefined) {
      renderWelcome(ctx);
    } else if (page === "catalog") {
      await renderCatalog(ctx);
    } else if (page === "customize" && arg) {
      await renderCustomize(ctx, decodeURIComponent(arg));
    } else if (page === "result" && arg) {
      await renderResult(ctx, arg);
    } else {
      renderWelcome(ctx);
    }
  }

  win.addEventListener("hashchange", () => {
    // navigate() already rendered; this catches back/forward and links
    if (win.location.hash !== rendered) void route();
  });
  return { ctx, route };
}
