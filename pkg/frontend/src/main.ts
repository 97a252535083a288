import { Board } from "./board.js";
import { createSession, openStream, submitMove } from "./client.js";
import type { Stream } from "./client.js";
import { bannerText, cellAt, fitCellSize, render } from "./render.js";
import type { Cell, ViewModel } from "./types.js";

const DEMO_SCENE = {
  shapes: [{ kind: "circle", center: [0.5, 0.5], radius: 0.15 }],
  f_p: 2.0,
  f_e: 1.0,
};

const base = window.location.origin;
const canvas = document.getElementById("board") as HTMLCanvasElement;
const banner = document.getElementById("banner") as HTMLElement;
const startButton = document.getElementById("start") as HTMLButtonElement;
const controllerSelect = document.getElementById("controller") as HTMLSelectElement;

let cellPx = 24;
let stream: Stream | null = null;

function paint(vm: ViewModel): void {
  cellPx = fitCellSize(canvas.parentElement?.clientWidth ?? 480, 560, vm.m);
  canvas.width = vm.m * cellPx;
  canvas.height = vm.m * cellPx;
  const ctx = canvas.getContext("2d");
  if (ctx) {
    render(ctx, vm, cellPx);
  }
  banner.textContent = bannerText(vm);
  banner.dataset.status = vm.status;
}

function shake(): void {
  canvas.classList.remove("shake");
  // restart the CSS animation on the next frame
  requestAnimationFrame(() => canvas.classList.add("shake"));
}

const board = new Board(
  { submit: (cell: Cell) => submitMove(base, sessionId(), cell) },
  paint,
  shake,
);

let currentSession = "";
function sessionId(): string {
  return currentSession;
}

async function start(): Promise<void> {
  stream?.close();
  try {
    const view = await createSession(base, {
      scene: DEMO_SCENE,
      m: 16,
      controller: controllerSelect.value,
      start: { pursuers: [[4, 8]], evaders: [[3, 13]] },
      k_max: 100,
    });
    currentSession = view.id;
    board.receive(view);
    stream = openStream(base, view.id, (pushed) => board.receive(pushed));
  } catch (err) {
    banner.textContent = `Could not start: ${(err as Error).message}`;
  }
}

canvas.addEventListener("click", (event: MouseEvent) => {
  const vm = board.viewModel;
  if (!vm) {
    return;
  }
  const rect = canvas.getBoundingClientRect();
  const cell = cellAt(event.clientX - rect.left, event.clientY - rect.top, vm.m, cellPx);
  if (cell) {
    void board.clickToMove(cell);
  }
});

for (const kind of ["shadow", "policy"] as const) {
  const input = document.getElementById(`overlay-${kind}`) as HTMLInputElement;
  input.addEventListener("change", () => board.toggleOverlay(kind));
}

window.addEventListener("resize", () => {
  const vm = board.viewModel;
  if (vm) {
    paint(vm);
  }
});

startButton.addEventListener("click", () => void start());
