// Presentational constants: the hopscotch court rows (bottom to top,
// alternating single and double cells, pad 1 at the bottom) and the
// number-row key mapping used for desk testing.

import { PAD_COUNT } from "./protocol.js";

// Each row is rendered top-first; within a double row the lower pad
// number sits on the left.
export const COURT_ROWS: readonly (readonly number[])[] = [
  [12],
  [10, 11],
  [9],
  [7, 8],
  [6],
  [4, 5],
  [3],
  [1, 2],
];

// Keys 1-9, 0, -, = map to pads 1..12.
const KEY_ORDER = ["1", "2", "3", "4", "5", "6", "7", "8", "9", "0", "-", "="];

export function padForKey(key: string): number | null {
  const idx = KEY_ORDER.indexOf(key);
  return idx >= 0 ? idx + 1 : null;
}

export function allPadsInCourt(): boolean {
  const seen = COURT_ROWS.flat().slice().sort((a, b) => a - b);
  return (
    seen.length === PAD_COUNT && seen.every((pad, i) => pad === i + 1)
  );
}
