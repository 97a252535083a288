import { decodeRle } from "./rle.js";
import type { OverlayKind, SessionView, ViewModel } from "./types.js";

/**
 * Map a server view to the renderer's model.  Pure; the highlight set is
 * the server's valid-move list verbatim, never recomputed locally.
 */
export function toViewModel(view: SessionView, overlayKind: OverlayKind): ViewModel {
  const cells = view.m * view.m;
  const source = overlayKind === "shadow" ? view.shadow : view.policy;
  return {
    m: view.m,
    status: view.status,
    turn: view.turn,
    kMax: view.k_max,
    obstacles: decodeRle(view.obstacles.rle, cells),
    overlay: decodeRle(source.rle, cells),
    overlayKind,
    pursuers: view.pursuers.map((c) => [c[0], c[1]]),
    evaders: view.evaders.map((c) => [c[0], c[1]]),
    highlights: view.valid_moves.map((c) => [c[0], c[1]]),
  };
}
