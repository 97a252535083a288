import { toViewModel } from "./viewmodel.js";
import type { Cell, OverlayKind, SessionView, ViewModel } from "./types.js";

export interface MoveTransport {
  submit(cell: Cell): Promise<SessionView>;
}

export type RenderFn = (vm: ViewModel) => void;
export type FeedbackFn = (cell: Cell) => void;

function sameCell(a: Cell, b: Cell): boolean {
  return a[0] === b[0] && a[1] === b[1];
}

/**
 * Holds the last server view and gates every outgoing move.
 *
 * A click turns into a request only when the session is active, the cell
 * is in the server-published valid set, and no other move is in flight;
 * anything else is a local no-op signalled through the feedback hook.
 */
export class Board {
  private lastView: SessionView | null = null;
  private vm: ViewModel | null = null;
  private inFlight = false;
  private overlay: OverlayKind = "shadow";

  constructor(
    private transport: MoveTransport,
    private onRender: RenderFn,
    private feedback: FeedbackFn = () => {},
  ) {}

  get viewModel(): ViewModel | null {
    return this.vm;
  }

  get overlayKind(): OverlayKind {
    return this.overlay;
  }

  get moveInFlight(): boolean {
    return this.inFlight;
  }

  /** Accept a view from the stream or a move response and re-render. */
  receive(view: SessionView): void {
    this.lastView = view;
    this.vm = toViewModel(view, this.overlay);
    this.onRender(this.vm);
  }

  /** Re-render the last view with the other server overlay; no network. */
  toggleOverlay(kind: OverlayKind): void {
    this.overlay = kind;
    if (this.lastView) {
      this.receive(this.lastView);
    }
  }

  /** Submit the move iff the cell is highlighted; resolves true on success. */
  async clickToMove(cell: Cell): Promise<boolean> {
    const view = this.lastView;
    const legal =
      view !== null &&
      view.status === "active" &&
      view.valid_moves.some((c) => sameCell(c, cell));
    if (!legal || this.inFlight) {
      this.feedback(cell);
      return false;
    }
    this.inFlight = true;
    try {
      this.receive(await this.transport.submit(cell));
      return true;
    } catch {
      this.feedback(cell);
      return false;
    } finally {
      this.inFlight = false;
    }
  }
}
