// Form model generated from a component's parameter manifest. Constants
// and sheet names are one text field; cell ranges are a sheet plus
// first/last cell triple. The model owns validation: the page renders
// whatever state it reports.

import type { ParamSpec } from "./api.js";
import { parseCell, SHEET_RE } from "./cells.js";

export type FieldValues = Record<string, string>;

export interface FieldState {
  spec: ParamSpec;
  // free-form value for constants/sheet names; sheet/first/last for ranges
  value: string;
  sheet: string;
  first: string;
  last: string;
  error: string | null;
}

export class FormModel {
  fields: FieldState[];

  constructor(params: ParamSpec[]) {
    this.fields = params.map((spec) => ({
      spec,
      value: "",
      sheet: "",
      first: "",
      last: "",
      error: null,
    }));
  }

  field(name: string): FieldState {
    const found = this.fields.find((f) => f.spec.name === name);
    if (!found) throw new Error(`no field ${name}`);
    return found;
  }

  /** Re-validate every field; true when the form is submittable. */
  validate(): boolean {
    let ok = true;
    for (const field of this.fields) {
      field.error = validateField(field);
      ok = ok && field.error === null;
    }
    return ok;
  }

  get valid(): boolean {
    return this.fields.every((f) => validateField(f) === null);
  }

  /** Server-reported problems land on their fields. */
  applyServerErrors(details: { param: string; message: string; code: string }[]): void {
    for (const detail of details) {
      const field = this.fields.find((f) => f.spec.name === detail.param);
      if (field) field.error = detail.message;
    }
  }

  /** The name=value bindings the instantiate endpoint expects. */
  bindings(): FieldValues {
    const out: FieldValues = {};
    for (const field of this.fields) {
      if (field.spec.kind === "cell-range") {
        out[field.spec.name] =
          `${field.sheet.trim()}!${field.first.trim().toUpperCase()}:${field.last.trim().toUpperCase()}`;
      } else {
        out[field.spec.name] = field.value;
      }
    }
    return out;
  }
}

function validateField(field: FieldState): string | null {
  const kind = field.spec.kind;
  if (kind === "cell-range") {
    if (!field.sheet.trim() && !field.first.trim() && !field.last.trim()) {
      return "a value is required";
    }
    if (!SHEET_RE.test(field.sheet.trim())) {
      return "sheet names use letters, digits and underscores";
    }
    const first = parseCell(field.first);
    const last = parseCell(field.last);
    if (!first || !last) {
      return "cells look like A3";
    }
    if (first.col !== last.col && first.row !== last.row) {
      return "the range must be a single row or a single column";
    }
    if (last.row < first.row || last.col < first.col) {
      return "the first cell comes before the last";
    }
    return null;
  }
  if (!field.value.trim()) {
    return "a value is required";
  }
  if (kind === "constant-number" && Number.isNaN(Number(field.value))) {
    return "a number is required";
  }
  if (kind === "sheet-name" && !SHEET_RE.test(field.value.trim())) {
    return "sheet names use letters, digits and underscores";
  }
  return null;
}
