import type { SessionView } from "../src/types.js";

/**
 * A hand-checkable 4x4 board: obstacles at (1,1) and (1,2), shadow behind
 * them at (3,0) and (3,1), evader at (3,3) with three legal moves.
 */
export function makeView(overrides: Partial<SessionView> = {}): SessionView {
  return {
    id: "1",
    m: 4,
    h: 0.25,
    status: "active",
    turn: 0,
    k_max: 10,
    pursuers: [[0, 0]],
    evaders: [[3, 3]],
    obstacles: { rle: [[5, 0], [2, 1], [9, 0]] },
    shadow: { rle: [[12, 0], [2, 1], [2, 0]] },
    policy: { rle: [[16, 0]] },
    valid_moves: [[3, 3], [3, 2], [2, 3]],
    ...overrides,
  };
}
