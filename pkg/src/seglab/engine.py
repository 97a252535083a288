"""Game runner and the batch experiment harness."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .grid import Cell, Grid2D, ScalarField
from .mcts import SurveillanceDynamics, make_evaluator, mcts_search
from .scene import SceneDescription
from .strategies import POLICY_KINDS, GameContext, GameState, JointAction, Policy


# ---------------------------------------------------------------------------
# controllers
# ---------------------------------------------------------------------------

class Controller:
    """Chooses a joint pursuer move; returns the move and the weights it used."""

    spec: dict

    def select(self, ctx: GameContext, state: GameState,
               rng: np.random.Generator) -> tuple[JointAction, Policy]:
        raise NotImplementedError


class PolicyController(Controller):
    def __init__(self, kind: str):
        if kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {kind!r}")
        self.kind = kind
        self.spec = {"kind": kind}

    def select(self, ctx, state, rng):
        policy = POLICY_KINDS[self.kind](ctx, state)
        return policy.argmax(), policy


class StationaryController(Controller):
    """Never moves; handy as a baseline and in tests."""

    def __init__(self):
        self.spec = {"kind": "stationary"}

    def select(self, ctx, state, rng):
        action = tuple(state.pursuers)
        candidates = ctx.joint_pursuer_actions(state.pursuers)
        weights = np.array([1.0 if a == action else 0.0 for a in candidates])
        return action, Policy(candidates, weights)


class MCTSController(Controller):
    def __init__(self, evaluator: str = "blend", iterations: int = 1000,
                 epsilon: float = 0.25, alpha: float = 0.3, tau: float = 1.0,
                 k_max: int = 100):
        self.spec = {"kind": "mcts", "evaluator": evaluator, "iterations": iterations,
                     "epsilon": epsilon, "alpha": alpha, "tau": tau, "k_max": k_max}

    def select(self, ctx, state, rng):
        s = self.spec
        dynamics = SurveillanceDynamics(ctx, s["k_max"])
        evaluator = make_evaluator(s["evaluator"], ctx, rng=rng, alpha=s["alpha"])
        policy = mcts_search(dynamics, state, evaluator, s["iterations"],
                             epsilon=s["epsilon"], alpha=s["alpha"], tau=s["tau"],
                             rng=rng)
        return policy.argmax(), policy


def make_controller(spec: dict | str) -> Controller:
    """Build a controller from a spec dict or a shorthand string.

    Shorthands: "distance" | "shadow" | "blend" | "stationary" |
    "mcts:<evaluator>:<iterations>".
    """
    if isinstance(spec, str):
        if spec.startswith("mcts"):
            parts = spec.split(":")
            kwargs = {}
            if len(parts) > 1 and parts[1]:
                kwargs["evaluator"] = parts[1]
            if len(parts) > 2:
                kwargs["iterations"] = int(parts[2])
            return MCTSController(**kwargs)
        spec = {"kind": spec}
    kind = spec.get("kind")
    if kind == "stationary":
        return StationaryController()
    if kind == "mcts":
        kwargs = {k: v for k, v in spec.items() if k != "kind"}
        return MCTSController(**kwargs)
    return PolicyController(kind)


# ---------------------------------------------------------------------------
# single games
# ---------------------------------------------------------------------------

@dataclass
class GameRecord:
    initial: GameState
    moves: list  # one {"pursuer_action", "pursuers", "evaders", "turn"} per turn
    outcome: str
    length: int
    dt: float
    seed: int
    controller: dict

    def game_time(self) -> float:
        return self.length * self.dt

    def to_json(self) -> dict:
        def cells(cc):
            return [list(c) for c in cc]
        return {
            "initial": {"pursuers": cells(self.initial.pursuers),
                        "evaders": cells(self.initial.evaders), "turn": self.initial.turn},
            "moves": self.moves,
            "outcome": self.outcome,
            "length": self.length,
            "dt": self.dt,
            "game_time": self.game_time(),
            "seed": self.seed,
            "controller": self.controller,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def run_game(ctx: GameContext, start: GameState, controller: Controller,
             k_max: int, seed: int = 0) -> GameRecord:
    """Play one game to occlusion or the turn horizon.

    The pursuers survive (win) iff the horizon is reached with every evader
    still in view at the end of every turn.  An already-hidden start yields
    a zero-length evader win.
    """
    ctx.validate_state(start)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    record_moves: list[dict] = []
    if ctx.is_end_game(start):
        return GameRecord(start, [], "evader-win", 0, ctx.dt, seed, controller.spec)

    state = start
    outcome = "pursuer-win"
    for _ in range(k_max):
        action, _policy = controller.select(ctx, state, rng)
        state = ctx.transition(state, action)
        record_moves.append({
            "turn": state.turn,
            "pursuer_action": [list(c) for c in action],
            "pursuers": [list(c) for c in state.pursuers],
            "evaders": [list(c) for c in state.evaders],
        })
        if ctx.is_end_game(state):
            outcome = "evader-win"
            break
    return GameRecord(start, record_moves, outcome, len(record_moves), ctx.dt,
                      seed, controller.spec)


# ---------------------------------------------------------------------------
# sweeps over evader starts
# ---------------------------------------------------------------------------

@dataclass
class SweepResult:
    scene: SceneDescription
    m: int
    controller: dict
    pursuers: tuple[Cell, ...]
    k_max: int
    dt: float
    rows: list  # (cell, outcome, turns)
    skipped_terminal: int

    @property
    def n_games(self) -> int:
        return len(self.rows)

    def win_percent(self) -> float:
        wins = sum(1 for _, outcome, _ in self.rows if outcome == "pursuer-win")
        return 100.0 * wins / max(self.n_games, 1)

    def mean_turns(self) -> float:
        return float(np.mean([turns for _, _, turns in self.rows])) if self.rows else 0.0

    def mean_time(self) -> float:
        return self.mean_turns() * self.dt

    def length_field(self) -> ScalarField:
        """Game time per evader start; zero where the start was already hidden."""
        vals = np.zeros((self.m, self.m))
        for cell, _, turns in self.rows:
            vals[cell] = turns * self.dt
        return ScalarField(Grid2D(self.m), vals)

    def summary(self) -> dict:
        return {
            "controller": self.controller,
            "n_games": self.n_games,
            "skipped_terminal": self.skipped_terminal,
            "win_pct": self.win_percent(),
            "mean_turns": self.mean_turns(),
            "mean_time": self.mean_time(),
            "k_max": self.k_max,
            "dt": self.dt,
        }

    def write_csv(self, path: str | Path) -> None:
        lines = ["cell_i,cell_j,outcome,turns,time"]
        for (i, j), outcome, turns in self.rows:
            lines.append(f"{i},{j},{outcome},{turns},{turns * self.dt}")
        Path(path).write_text("\n".join(lines) + "\n")


def game_seed(master_seed: int, cell: Cell) -> int:
    """Stable per-start seed derived from the master seed and the cell index."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(cell[0], cell[1]))
    return int(ss.generate_state(1)[0])


_WORKER: dict = {}


def _sweep_worker_init(scene_json: str, m: int, controller_spec: dict,
                       dt: float | None, aux_mode: str):
    scene = SceneDescription.from_json(json.loads(scene_json))
    ctx = GameContext(scene, Grid2D(m), dt=dt, aux_mode=aux_mode)
    _WORKER["ctx"] = ctx
    _WORKER["controller"] = make_controller(controller_spec)


def _sweep_worker_run(args):
    pursuers, fixed_evaders, cells, k_max, master_seed = args
    ctx: GameContext = _WORKER["ctx"]
    controller: Controller = _WORKER["controller"]
    out = []
    for cell in cells:
        start = GameState(tuple(pursuers), (tuple(cell),) + tuple(fixed_evaders))
        rec = run_game(ctx, start, controller, k_max, seed=game_seed(master_seed, cell))
        out.append((tuple(cell), rec.outcome, rec.length))
    return out


def run_match_statistics(scene: SceneDescription, m: int, controller_spec: dict | str,
                         pursuers, k_max: int = 100, master_seed: int = 0,
                         fixed_evaders=(), dt: float | None = None,
                         workers: int = 1, aux_mode: str = "visibility") -> SweepResult:
    """Play one game per free evader start and aggregate the outcomes.

    Starts that are already hidden from the pursuers are skipped (counted
    separately).  Per-game seeds derive from the master seed and the start
    cell, so results are independent of worker count and chunking.  Zero or
    negative workers means one per available core.
    """
    if workers <= 0:
        workers = os.cpu_count() or 1
    grid = Grid2D(m)
    ctx = GameContext(scene, grid, dt=dt, aux_mode=aux_mode)
    controller = make_controller(controller_spec)
    pursuers = tuple(tuple(c) for c in pursuers)
    fixed_evaders = tuple(tuple(c) for c in fixed_evaders)
    for cell in pursuers + fixed_evaders:
        if not ctx.free[cell]:
            raise ValueError(f"fixed start {cell} is inside an obstacle")

    starts: list[Cell] = []
    skipped = 0
    occupied = set(fixed_evaders)
    for i, j in np.argwhere(ctx.free):
        cell = (int(i), int(j))
        if cell in occupied:
            continue
        state = GameState(pursuers, (cell,) + fixed_evaders)
        if ctx.is_end_game(state):
            skipped += 1
        else:
            starts.append(cell)

    rows: list = []
    if workers <= 1:
        for cell in starts:
            start = GameState(pursuers, (cell,) + fixed_evaders)
            rec = run_game(ctx, start, controller, k_max,
                           seed=game_seed(master_seed, cell))
            rows.append((cell, rec.outcome, rec.length))
    else:
        chunks = [starts[i::workers] for i in range(workers)]
        jobs = [(pursuers, fixed_evaders, chunk, k_max, master_seed)
                for chunk in chunks if chunk]
        with ProcessPoolExecutor(
                max_workers=workers, initializer=_sweep_worker_init,
                initargs=(scene.dumps(), m, controller.spec, dt, aux_mode)) as pool:
            for part in pool.map(_sweep_worker_run, jobs):
                rows.extend(part)
        rows.sort(key=lambda r: r[0])

    return SweepResult(scene=scene, m=m, controller=controller.spec,
                       pursuers=pursuers, k_max=k_max, dt=ctx.dt, rows=rows,
                       skipped_terminal=skipped)


# ---------------------------------------------------------------------------
# search diagnostics
# ---------------------------------------------------------------------------

def leaf_depth_histogram(trace, dt: float, block: int = 100) -> dict:
    """Bin search-leaf depths (in game time) per block of iterations.

    Takes the trace records mcts_search emits; returns counts[block][depth]
    plus enough metadata to plot a stacked histogram.
    """
    records = list(trace)
    if not records:
        raise ValueError("empty trace")
    max_depth = max(r["depth"] for r in records)
    n_blocks = (max(r["iteration"] for r in records) + block - 1) // block
    counts = np.zeros((n_blocks, max_depth + 1), dtype=int)
    for r in records:
        counts[(r["iteration"] - 1) // block, r["depth"]] += 1
    return {
        "block_size": block,
        "dt": dt,
        "depths_time": [d * dt for d in range(max_depth + 1)],
        "counts": counts.tolist(),
        "total": int(counts.sum()),
    }
