"""Turn-based game state and the local pursuit policies.

A turn lasts dt game-time units.  Each piece may move to any free cell it
can reach within dt (8-connected local arrival under its regularized
speed).  Pursuer teams score candidate joint moves either by a symmetric
distance cost, by how long the evaders would need to reach a joint shadow
afterwards, or by the product of both; scores turn into move weights
through a stabilized softmax.  Evaders follow one fixed greedy rule: run
for the nearest shadow.
"""

from __future__ import annotations

import heapq
import itertools
from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .config import ACTION_DT_FACTOR, LARGE, SOFTMAX_CLAMP
from .eikonal import solve_eikonal, speed_field
from .grid import Cell, Grid2D, ScalarField
from .scene import SceneDescription, free_mask, signed_distance
from .visibility import VisibilityCache, is_end_game

JointAction = tuple[Cell, ...]

_LRU_CAP = 4096


@dataclass(frozen=True)
class GameState:
    pursuers: tuple[Cell, ...]
    evaders: tuple[Cell, ...]
    turn: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pursuers", tuple(tuple(c) for c in self.pursuers))
        object.__setattr__(self, "evaders", tuple(tuple(c) for c in self.evaders))
        if not self.pursuers or not self.evaders:
            raise ValueError("need at least one pursuer and one evader")


@dataclass
class Policy:
    """Weights over joint pursuer moves, in canonical move order."""

    support: list[JointAction]
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if len(self.support) != self.weights.size:
            raise ValueError("support and weights disagree in length")
        total = self.weights.sum()
        if not np.isfinite(total) or total <= 0 or (self.weights < 0).any():
            raise ValueError("weights must be nonnegative with positive sum")
        self.weights = self.weights / total

    def argmax(self) -> JointAction:
        return self.support[int(np.argmax(self.weights))]

    def sample(self, rng: np.random.Generator) -> JointAction:
        return self.support[int(rng.choice(len(self.support), p=self.weights))]

    def to_json(self) -> list[dict]:
        return [
            {"action": [list(c) for c in act], "weight": float(w)}
            for act, w in zip(self.support, self.weights)
        ]


def softmax(scores: np.ndarray) -> np.ndarray:
    """exp(scores) normalized, shifted by the max first so it cannot overflow."""
    s = np.asarray(scores, dtype=np.float64)
    w = np.exp(s - s.max())
    return w / w.sum()


def _displacement2(a: Cell, b: Cell) -> int:
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


_STEPS = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0)]


def valid_actions(speed: ScalarField, phi: ScalarField, cell: Cell, dt: float) -> list[Cell]:
    """Free cells reachable within dt, including staying put.

    Local 8-connected arrival: an edge costs its Euclidean length over the
    harmonic mean of the endpoint speeds, diagonal steps may not cut an
    obstacle corner.  The result is sorted by displacement then cell order,
    which is the tie-break every downstream argmax/argmin relies on.
    """
    grid = speed.grid
    cell = tuple(cell)
    if not grid.contains_cell(cell):
        raise ValueError(f"position {cell} outside grid")
    if phi.values[cell] <= 0:
        raise ValueError(f"position {cell} is inside an obstacle")
    h = grid.h
    free = phi.values > 0
    vals = speed.values
    radius = int(np.ceil(dt * float(vals.max()) / h)) + 1

    dist: dict[Cell, float] = {cell: 0.0}
    heap: list[tuple[float, Cell]] = [(0.0, cell)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, np.inf) or d > dt:
            continue
        for di, dj in _STEPS:
            v = (u[0] + di, u[1] + dj)
            if abs(v[0] - cell[0]) > radius or abs(v[1] - cell[1]) > radius:
                continue
            if not grid.contains_cell(v) or not free[v]:
                continue
            if di != 0 and dj != 0:
                # no slipping between two diagonally touching obstacle cells
                if not free[u[0] + di, u[1]] or not free[u[0], u[1] + dj]:
                    continue
            step = h * np.hypot(di, dj)
            cost = step * 0.5 * (1.0 / vals[u] + 1.0 / vals[v])
            nd = d + cost
            if nd <= dt + 1e-12 and nd < dist.get(v, np.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    cells = [c for c, d in dist.items() if d <= dt + 1e-12]
    cells.sort(key=lambda c: (_displacement2(c, cell), c))
    return cells


class GameContext:
    """Everything per (scene, grid) that game play keeps reusing."""

    def __init__(self, scene: SceneDescription, grid: Grid2D,
                 dt: float | None = None, aux_mode: str = "visibility"):
        self.scene = scene
        self.grid = grid
        self.phi = signed_distance(scene, grid)
        self.free = free_mask(self.phi)
        if not self.free.any():
            raise ValueError("scene leaves no free space")
        if scene.f_p <= 0:
            raise ValueError("discrete game needs a positive pursuer speed")
        self.pursuer_speed = speed_field(scene.f_p, self.phi)
        self.evader_speed = speed_field(scene.f_e, self.phi)
        self.dt = dt if dt is not None else ACTION_DT_FACTOR * grid.h / scene.f_e
        self.cache = VisibilityCache(self.phi, aux_mode)
        self._action_sets: dict[tuple[Cell, str], list[Cell]] = {}
        self._joint_actions: dict[tuple[Cell, ...], list[JointAction]] = {}
        self._arrivals: OrderedDict[tuple[Cell, str], np.ndarray] = OrderedDict()
        self._occlusion: OrderedDict[tuple, np.ndarray] = OrderedDict()

    # -- state hygiene ----------------------------------------------------

    def validate_state(self, state: GameState) -> None:
        if len(state.pursuers) != self.scene.k_p or len(state.evaders) != self.scene.k_e:
            raise ValueError("state team sizes do not match the scene")
        for cell in state.pursuers + state.evaders:
            if not self.grid.contains_cell(cell):
                raise ValueError(f"position {cell} outside grid")
            if not self.free[cell]:
                raise ValueError(f"position {cell} is inside an obstacle")

    def is_end_game(self, state: GameState) -> bool:
        return is_end_game(self.cache, state.pursuers, state.evaders)

    # -- movement ----------------------------------------------------------

    def action_set(self, cell: Cell, role: str) -> list[Cell]:
        key = (tuple(cell), role)
        cached = self._action_sets.get(key)
        if cached is None:
            speed = self.pursuer_speed if role == "pursuer" else self.evader_speed
            cached = valid_actions(speed, self.phi, cell, self.dt)
            self._action_sets[key] = cached
        return cached

    def joint_pursuer_actions(self, pursuers: tuple[Cell, ...]) -> list[JointAction]:
        key = tuple(pursuers)
        cached = self._joint_actions.get(key)
        if cached is None:
            per_piece = [self.action_set(c, "pursuer") for c in pursuers]
            cached = list(itertools.product(*per_piece))
            cached.sort(key=lambda act: (
                sum(_displacement2(c, p) for c, p in zip(act, pursuers)), act))
            self._joint_actions[key] = cached
        return cached

    # -- cached field solves ------------------------------------------------

    def _lru_get(self, store: OrderedDict, key):
        val = store.get(key)
        if val is not None:
            store.move_to_end(key)
        return val

    def _lru_put(self, store: OrderedDict, key, val):
        store[key] = val
        if len(store) > _LRU_CAP:
            store.popitem(last=False)

    def arrival_from(self, cell: Cell, role: str) -> np.ndarray:
        """Travel-time field from one cell under a team's regularized speed."""
        key = (tuple(cell), role)
        cached = self._lru_get(self._arrivals, key)
        if cached is None:
            speed = self.pursuer_speed if role == "pursuer" else self.evader_speed
            cached = solve_eikonal(speed, [tuple(cell)]).values
            self._lru_put(self._arrivals, key, cached)
        return cached

    def shadow_mask(self, pursuers: Iterable[Cell]) -> np.ndarray:
        return self.cache.joint_shadow_mask(pursuers)

    def occlusion_time_field(self, pursuers: Iterable[Cell]) -> np.ndarray:
        """Evader travel time to the joint shadow of these vantages.

        All-LARGE when they leave no shadow at all.
        """
        key = tuple(sorted(tuple(c) for c in pursuers))
        cached = self._lru_get(self._occlusion, key)
        if cached is None:
            mask = self.shadow_mask(key)
            if mask.any():
                cached = solve_eikonal(self.evader_speed, mask).values
            else:
                cached = np.full((self.grid.m, self.grid.m), LARGE)
            self._lru_put(self._occlusion, key, cached)
        return cached

    # -- dynamics ------------------------------------------------------------

    def evader_rule(self, state: GameState) -> tuple[Cell, ...]:
        """Each evader independently races for the quickest reachable shadow.

        Action sets are already sorted by displacement then cell order, so
        the first argmin realizes the documented tie-break.
        """
        field = self.occlusion_time_field(state.pursuers)
        out = []
        for e in state.evaders:
            options = self.action_set(e, "evader")
            times = np.array([field[c] for c in options])
            out.append(options[int(np.argmin(times))])
        return tuple(out)

    def transition(self, state: GameState, action: JointAction) -> GameState:
        if len(action) != len(state.pursuers):
            raise ValueError("joint action length does not match the pursuer team")
        for cell, start in zip(action, state.pursuers):
            if tuple(cell) not in self.action_set(start, "pursuer"):
                raise ValueError(f"pursuer move {start} -> {tuple(cell)} not reachable in dt")
        moved = GameState(tuple(tuple(c) for c in action), state.evaders, state.turn)
        evaders = self.evader_rule(moved)
        return GameState(moved.pursuers, evaders, state.turn + 1)


def time_to_occlusion(ctx: GameContext, pursuers: Iterable[Cell], evader: Cell) -> float:
    """How long this evader needs to vanish from all these vantages."""
    return float(ctx.occlusion_time_field(pursuers)[tuple(evader)])


def distance_cost(ctx: GameContext, pursuers: Iterable[Cell],
                  evaders: Iterable[Cell]) -> float:
    """Symmetric travel-time cost between the teams.

    Root-sum-square of each pursuer's time to its nearest evader plus the
    same with the roles flipped, halved; for one-on-one it reduces to the
    plain pursuer travel time.
    """
    pursuers = [tuple(c) for c in pursuers]
    evaders = [tuple(c) for c in evaders]
    d = np.array([[ctx.arrival_from(e, "pursuer")[p] for e in evaders] for p in pursuers])
    to_nearest_e = (d.min(axis=1) ** 2).sum()
    to_nearest_p = (d.min(axis=0) ** 2).sum()
    return 0.5 * float(np.sqrt(to_nearest_e)) + 0.5 * float(np.sqrt(to_nearest_p))


def distance_policy(ctx: GameContext, state: GameState) -> Policy:
    """Prefer joint moves that shrink the symmetric distance cost."""
    candidates = ctx.joint_pursuer_actions(state.pursuers)
    fields = [ctx.arrival_from(e, "pursuer") for e in state.evaders]
    costs = np.empty(len(candidates))
    for n, act in enumerate(candidates):
        d = np.array([[f[c] for f in fields] for c in act])
        costs[n] = 0.5 * np.sqrt((d.min(axis=1) ** 2).sum()) \
            + 0.5 * np.sqrt((d.min(axis=0) ** 2).sum())
    return Policy(candidates, softmax(-costs))


def occlusion_scores(ctx: GameContext, state: GameState) -> np.ndarray:
    """Per-candidate worst-case time until some evader escapes view.

    For each candidate joint pursuer move the evaders get their whole
    dt-reachable sets; the score is the smallest occlusion time any of
    them can realize.  Clamped before use as a softmax exponent.
    """
    candidates = ctx.joint_pursuer_actions(state.pursuers)
    evader_options = [ctx.action_set(e, "evader") for e in state.evaders]
    scores = np.empty(len(candidates))
    for n, act in enumerate(candidates):
        field = ctx.occlusion_time_field(act)
        best = LARGE
        for options in evader_options:
            for y in options:
                t = field[y]
                if t < best:
                    best = t
        scores[n] = best
    return np.minimum(scores, SOFTMAX_CLAMP)


def shadow_policy(ctx: GameContext, state: GameState) -> Policy:
    """Prefer joint moves after which every evader stays exposed the longest."""
    candidates = ctx.joint_pursuer_actions(state.pursuers)
    return Policy(candidates, softmax(occlusion_scores(ctx, state)))


def blend_policy(ctx: GameContext, state: GameState) -> Policy:
    """Product of the shadow and distance weights, renormalized."""
    dist = distance_policy(ctx, state)
    shad = shadow_policy(ctx, state)
    prod = dist.weights * shad.weights
    total = prod.sum()
    if total <= 0.0:
        # both factors underflowed everywhere; fall back to indifference
        prod = np.ones_like(prod)
    return Policy(dist.support, prod)


POLICY_KINDS = {
    "distance": distance_policy,
    "shadow": shadow_policy,
    "blend": blend_policy,
}
