// Typed client for the repository's JSON API. A base URL is only needed
// outside the browser (tests); served from the service itself, "" is right.

export interface CatalogEntry {
  id: string;
  title: string;
  summary: string;
}

export interface ParamSpec {
  name: string;
  kind: "constant-text" | "constant-number" | "cell-range" | "sheet-name";
  label: string;
}

export interface ComponentDetail extends CatalogEntry {
  docs_url: string;
  params: ParamSpec[];
  example_bindings: Record<string, string>;
  example_inputs: Record<string, string | number>;
}

export interface InstantiateOk {
  token: string;
  download_url: string;
  expires_in: number;
  size_bytes: number;
}

export interface ParamProblem {
  param: string;
  code: string;
  message: string;
}

export interface GridCell {
  ref: string;
  kind: string;
  payload: string;
  type?: string;
  validation?: string[];
}

export interface GridSheet {
  name: string;
  cells: GridCell[];
  regions?: string[];
}

export interface GridObj {
  version?: number;
  sheets: GridSheet[];
}

export type ValueCell = { ref: string; n?: number; s?: string; e?: string };

export interface ValueGridObj {
  sheets: { name: string; cells: ValueCell[] }[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly details: unknown[] = [],
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  const body = await response.json();
  if (!response.ok) {
    const message = typeof body?.error === "string" ? body.error : response.statusText;
    throw new ApiError(response.status, message, body?.details ?? []);
  }
  return body as T;
}

export class Api {
  constructor(readonly base: string = "") {}

  catalog(): Promise<CatalogEntry[]> {
    return request(`${this.base}/api/components`);
  }

  component(id: string): Promise<ComponentDetail> {
    return request(`${this.base}/api/components/${encodeURIComponent(id)}`);
  }

  instantiate(id: string, bindings: Record<string, string>, format = "tsv"): Promise<InstantiateOk> {
    return request(`${this.base}/api/components/${encodeURIComponent(id)}/instantiate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ bindings, format }),
    });
  }

  apply(id: string, bindings: Record<string, string>, grid: GridObj): Promise<GridObj> {
    return request(`${this.base}/api/components/${encodeURIComponent(id)}/apply`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ bindings, grid }),
    });
  }

  evaluate(
    grid: GridObj,
    seed: number,
    overrides: { ref: string; value: string | number }[],
  ): Promise<ValueGridObj> {
    return request(`${this.base}/api/eval`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ grid, seed, overrides }),
    });
  }
}
