/** JSON shapes the session server publishes, plus the client's view model. */

export type Cell = [number, number];

/** Row-major run-length rows: [count, 0|1], i is the outer index. */
export type RleRuns = [number, number][];

export interface OverlayJson {
  rle: RleRuns;
}

export type Status = "active" | "evader-won" | "pursuer-won";

export interface SessionView {
  id: string;
  m: number;
  h: number;
  status: Status;
  turn: number;
  k_max: number;
  pursuers: Cell[];
  evaders: Cell[];
  obstacles: OverlayJson;
  shadow: OverlayJson;
  policy: OverlayJson;
  valid_moves: Cell[];
}

export interface MoveLog {
  moves: {
    turn: number;
    evader_move: number[];
    pursuer_action: number[][];
  }[];
}

export type OverlayKind = "shadow" | "policy";

/** Everything the renderer needs; derived from the last SessionView only. */
export interface ViewModel {
  m: number;
  status: Status;
  turn: number;
  kMax: number;
  obstacles: Uint8Array;
  overlay: Uint8Array;
  overlayKind: OverlayKind;
  pursuers: Cell[];
  evaders: Cell[];
  highlights: Cell[];
}
