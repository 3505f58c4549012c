// Result-page preview: evaluate the instantiated cells with the
// component's example input values, remapped from the example bindings'
// ranges onto the ranges the user actually chose.

import type { Api, ComponentDetail, ValueGridObj } from "./api.js";
import { cellAtIndex, cellName, indexInRange, parseCell, parseRangeText } from "./cells.js";

export interface Override {
  ref: string;
  value: string | number;
}

export function remapExampleInputs(
  detail: ComponentDetail,
  userBindings: Record<string, string>,
): Override[] {
  const out: Override[] = [];
  for (const [ref, value] of Object.entries(detail.example_inputs)) {
    const bang = ref.indexOf("!");
    const cell = bang >= 0 ? parseCell(ref.slice(bang + 1)) : null;
    const sheet = bang >= 0 ? ref.slice(0, bang) : "";
    if (!cell) continue;
    let mapped = ref;
    for (const param of detail.params) {
      if (param.kind !== "cell-range") continue;
      const exampleRange = parseRangeText(detail.example_bindings[param.name] ?? "");
      const userRange = parseRangeText(userBindings[param.name] ?? "");
      if (!exampleRange || !userRange || exampleRange.sheet !== sheet) continue;
      const index = indexInRange(exampleRange, cell);
      if (index < 0) continue;
      mapped = `${userRange.sheet}!${cellName(cellAtIndex(userRange, index))}`;
      break;
    }
    out.push({ ref: mapped, value });
  }
  return out;
}

export async function buildPreview(
  api: Api,
  id: string,
  bindings: Record<string, string>,
): Promise<ValueGridObj> {
  const detail = await api.component(id);
  const grid = await api.apply(id, bindings, { sheets: [] });
  const overrides = remapExampleInputs(detail, bindings);
  return api.evaluate(grid, 0, overrides);
}
