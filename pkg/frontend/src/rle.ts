import type { Cell, RleRuns } from "./types.js";

/** Expand run-length rows into a flat 0/1 mask of the given size. */
export function decodeRle(runs: RleRuns, size: number): Uint8Array {
  const out = new Uint8Array(size);
  let pos = 0;
  for (const [count, value] of runs) {
    if (count < 0 || pos + count > size) {
      throw new Error(`RLE overruns ${size} cells`);
    }
    out.fill(value ? 1 : 0, pos, pos + count);
    pos += count;
  }
  if (pos !== size) {
    throw new Error(`RLE covers ${pos} cells, expected ${size}`);
  }
  return out;
}

/** Cell (i, j) in a row-major m*m mask, i outer. */
export function maskAt(mask: Uint8Array, m: number, cell: Cell): boolean {
  return mask[cell[0] * m + cell[1]] === 1;
}
