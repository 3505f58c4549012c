// A1-notation helpers shared by the form model and the result preview.

const CELL_RE = /^([A-Za-z]{1,3})([0-9]+)$/;

export interface Cell {
  col: number;
  row: number;
}

export function parseCell(text: string): Cell | null {
  const m = CELL_RE.exec(text.trim());
  if (!m) return null;
  let col = 0;
  for (const ch of m[1].toUpperCase()) {
    col = col * 26 + (ch.charCodeAt(0) - 64);
  }
  const row = parseInt(m[2], 10);
  return row >= 1 ? { col, row } : null;
}

export function colLetters(col: number): string {
  let letters = "";
  while (col > 0) {
    const rem = (col - 1) % 26;
    letters = String.fromCharCode(65 + rem) + letters;
    col = Math.floor((col - 1) / 26);
  }
  return letters;
}

export function cellName(cell: Cell): string {
  return `${colLetters(cell.col)}${cell.row}`;
}

export const SHEET_RE = /^[A-Za-z0-9_]+$/;

export interface ParsedRange {
  sheet: string;
  first: Cell;
  last: Cell;
}

// "Sheet1!A3:A15" or "Sheet1!A3"; null when malformed.
export function parseRangeText(text: string): ParsedRange | null {
  const bang = text.indexOf("!");
  if (bang < 0) return null;
  const sheet = text.slice(0, bang);
  if (!SHEET_RE.test(sheet)) return null;
  const cells = text.slice(bang + 1);
  const [firstText, lastText] = cells.includes(":") ? cells.split(":", 2) : [cells, cells];
  const first = parseCell(firstText);
  const last = parseCell(lastText);
  if (!first || !last) return null;
  return { sheet, first, last };
}

// Where a cell sits inside a linear range, or -1 when outside it.
export function indexInRange(range: ParsedRange, cell: Cell): number {
  if (range.first.col === range.last.col && cell.col === range.first.col) {
    const i = cell.row - range.first.row;
    return i >= 0 && i <= range.last.row - range.first.row ? i : -1;
  }
  if (range.first.row === range.last.row && cell.row === range.first.row) {
    const i = cell.col - range.first.col;
    return i >= 0 && i <= range.last.col - range.first.col ? i : -1;
  }
  return -1;
}

export function cellAtIndex(range: ParsedRange, index: number): Cell {
  if (range.first.col === range.last.col) {
    return { col: range.first.col, row: range.first.row + index };
  }
  return { col: range.first.col + index, row: range.first.row };
}
