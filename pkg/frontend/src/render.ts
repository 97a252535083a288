import type { Cell, ViewModel } from "./types.js";

/** The slice of CanvasRenderingContext2D the renderer touches. */
export interface Paintbox {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
}

export const COLORS = {
  background: "#f4f1e8",
  gridline: "#d8d4c8",
  obstacle: "#24242c",
  shadow: "rgba(110,110,110,0.55)",
  policy: "rgba(31,119,180,0.30)",
  highlightFill: "rgba(240,200,60,0.40)",
  highlightEdge: "#b08900",
  pursuers: ["#1f77b4", "#2ca02c"],
  evader: "#d62728",
} as const;

/** Largest integer cell size that fits the viewport, at least 4 px. */
export function fitCellSize(width: number, height: number, m: number): number {
  return Math.max(4, Math.floor(Math.min(width, height) / m));
}

/** Canvas position of a cell's top-left corner; j runs upward. */
function corner(cell: Cell, m: number, px: number): [number, number] {
  return [cell[0] * px, (m - 1 - cell[1]) * px];
}

/** Canvas coordinates back to a cell, or null outside the board. */
export function cellAt(x: number, y: number, m: number, px: number): Cell | null {
  const i = Math.floor(x / px);
  const j = m - 1 - Math.floor(y / px);
  if (i < 0 || i >= m || j < 0 || j >= m) {
    return null;
  }
  return [i, j];
}

function disc(ctx: Paintbox, cell: Cell, m: number, px: number, color: string): void {
  const [x, y] = corner(cell, m, px);
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(x + px / 2, y + px / 2, px * 0.36, 0, 2 * Math.PI);
  ctx.fill();
}

/**
 * Draw the full board.  A pure function of the view model and cell size:
 * the same inputs always produce the same drawing commands.
 */
export function render(ctx: Paintbox, vm: ViewModel, px: number): void {
  const { m } = vm;
  const side = m * px;
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, side, side);

  const overlayColor = vm.overlayKind === "shadow" ? COLORS.shadow : COLORS.policy;
  for (let i = 0; i < m; i++) {
    for (let j = 0; j < m; j++) {
      const flat = i * m + j;
      const [x, y] = corner([i, j], m, px);
      if (vm.obstacles[flat]) {
        ctx.fillStyle = COLORS.obstacle;
        ctx.fillRect(x, y, px, px);
      } else if (vm.overlay[flat]) {
        ctx.fillStyle = overlayColor;
        ctx.fillRect(x, y, px, px);
      }
    }
  }

  if (vm.status === "active") {
    for (const cell of vm.highlights) {
      const [x, y] = corner(cell, m, px);
      ctx.fillStyle = COLORS.highlightFill;
      ctx.fillRect(x, y, px, px);
      ctx.strokeStyle = COLORS.highlightEdge;
      ctx.lineWidth = 1;
      ctx.strokeRect(x + 0.5, y + 0.5, px - 1, px - 1);
    }
  }

  vm.pursuers.forEach((cell, k) => {
    disc(ctx, cell, m, px, COLORS.pursuers[k % COLORS.pursuers.length]);
  });
  for (const cell of vm.evaders) {
    disc(ctx, cell, m, px, COLORS.evader);
  }

  ctx.strokeStyle = COLORS.gridline;
  ctx.lineWidth = 1;
  ctx.strokeRect(0.5, 0.5, side - 1, side - 1);
}

/** One-line status banner for the header. */
export function bannerText(vm: ViewModel): string {
  if (vm.status === "evader-won") {
    return `Evader won: hidden after ${vm.turn} turns`;
  }
  if (vm.status === "pursuer-won") {
    return `Pursuer won: watched for all ${vm.kMax} turns`;
  }
  return `Turn ${vm.turn} of ${vm.kMax} - click a highlighted cell`;
}
