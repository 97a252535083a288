"""Game value function for one pursuer and one evader on the unit square.

The value V(x_P, x_E) is the time the pursuer can keep the evader in view
under optimal play by both sides.  It solves an isotropic Hamilton-Jacobi-
Isaacs equation discretized on the joint 4-D lattice with Godunov upwind
differences: the pursuer term picks ascent directions, the evader term
descent directions.  Occlusion states are pinned at zero every step and
obstacles are handled by smoothly slowed speeds, with obstacle indices set
to the LARGE sentinel only in the reported array (pinning the sentinel into
the working buffer would poison the neighboring differences).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .config import (CFL_DENOM, GRAD_EPS, LARGE, MAX_VALUE_GRID,
                     STATIONARY_DT_DENOM, STOP_TOL)
from .eikonal import speed_field
from .grid import Cell, Grid2D, ScalarField
from .scene import SceneDescription, free_mask, signed_distance
from .visibility import VisibilityCache


def sgnmax(a, b):
    """Godunov selector: a+ = max(a, 0), b- = -min(b, 0); the larger wins.

    Returns a+ when max(a+, b-) == a+ (ties go to a+), else -b-.  Applied to
    (forward, backward) differences it keeps the steepest ascent direction;
    with the arguments swapped it keeps the steepest descent direction.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ap = np.maximum(a, 0.0)
    bm = -np.minimum(b, 0.0)
    out = np.where(ap >= bm, ap, -bm)
    return float(out) if out.ndim == 0 else out


def _shifted_diffs(V: np.ndarray, axis: int, h: float):
    """One-sided differences along an axis; zero where the neighbor is missing.

    The zero stands in for a copied ghost value at the domain wall, which is
    what keeps players from gaining speed off the boundary.
    """
    dp = np.zeros_like(V)
    dm = np.zeros_like(V)
    d = np.diff(V, axis=axis) / h
    head = [slice(None)] * V.ndim
    head[axis] = slice(0, -1)
    tail = [slice(None)] * V.ndim
    tail[axis] = slice(1, None)
    dp[tuple(head)] = d
    dm[tuple(tail)] = d
    return dp, dm


def _ascent_partial(V, axis, h):
    dp, dm = _shifted_diffs(V, axis, h)
    return sgnmax(dp, dm)


def _descent_partial(V, axis, h):
    dp, dm = _shifted_diffs(V, axis, h)
    return sgnmax(dm, dp)


def gradient_norms_4d(V: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Upwind gradient magnitudes over pursuer axes (0,1) and evader axes (2,3)."""
    p0 = _ascent_partial(V, 0, h)
    p1 = _ascent_partial(V, 1, h)
    e2 = _descent_partial(V, 2, h)
    e3 = _descent_partial(V, 3, h)
    return np.sqrt(p0 * p0 + p1 * p1), np.sqrt(e2 * e2 + e3 * e3)


def upwind_gradient_norms(V: np.ndarray, index: tuple[int, int, int, int],
                          h: float) -> tuple[float, float]:
    """Both player gradient magnitudes at one joint index."""
    pn, en = gradient_norms_4d(np.asarray(V, dtype=np.float64), h)
    return float(pn[index]), float(en[index])


def _check_cfl(dt: float, h: float, max_speed: float) -> None:
    limit = h / (CFL_DENOM * max(max_speed, 1e-300))
    if dt > limit * (1 + 1e-12):
        raise ValueError(f"dt={dt} violates the step bound {limit} for speed {max_speed}")


def step_value_4d(V: np.ndarray, fp: np.ndarray, fe: np.ndarray, dt: float,
                  terminal: np.ndarray, h: float) -> np.ndarray:
    """One explicit update of the joint value; occlusion indices re-pinned to 0."""
    _check_cfl(dt, h, max(float(fp.max()), float(fe.max())))
    pn, en = gradient_norms_4d(V, h)
    out = V + dt * (1.0 + fp[:, :, None, None] * pn - fe[None, None, :, :] * en)
    out[terminal] = 0.0
    return out


def step_value_2d(W: np.ndarray, fe: np.ndarray, dt: float, terminal: np.ndarray,
                  h: float) -> np.ndarray:
    """Stationary-pursuer reduction: the same update on the evader plane only."""
    _check_cfl(dt, h, float(fe.max()))
    e0 = _descent_partial(W, 0, h)
    e1 = _descent_partial(W, 1, h)
    en = np.sqrt(e0 * e0 + e1 * e1)
    out = W + dt * (1.0 - fe * en)
    out[terminal] = 0.0
    return out


def build_terminal_mask(cache: VisibilityCache) -> np.ndarray:
    """Joint occlusion indicator: mask[i,j,k,l] = evader (k,l) hidden from (i,j)."""
    m = cache.phi.grid.m
    mask = np.zeros((m, m, m, m), dtype=bool)
    free = cache.phi.values > 0
    for i, j in np.argwhere(free):
        mask[i, j] = cache.shadow_values((int(i), int(j))) <= 0.0
    return mask


@dataclass
class ValueFunction4D:
    """Solved joint value plus everything needed to play it back."""

    grid: Grid2D
    values: np.ndarray          # reported: LARGE at obstacle indices
    raw_values: np.ndarray      # working buffer, finite everywhere
    horizon: float
    elapsed: float
    dt: float
    iterations: int
    f_p: float
    f_e: float
    fp_field: ScalarField
    fe_field: ScalarField
    terminal_mask: np.ndarray
    free: np.ndarray            # (m, m) free-space mask
    scene_hash: str
    l1_log: list = dc_field(default_factory=list)
    _partials: tuple | None = None

    def partials(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Upwind partials of the working buffer, cached after first use."""
        if self._partials is None:
            h = self.grid.h
            V = self.raw_values
            self._partials = (
                _ascent_partial(V, 0, h),
                _ascent_partial(V, 1, h),
                _descent_partial(V, 2, h),
                _descent_partial(V, 3, h),
            )
        return self._partials


def solve_value_function(scene: SceneDescription, grid: Grid2D, horizon: float,
                         dt: float | None = None, stop_tol: float = STOP_TOL,
                         allow_large: bool = False, aux_mode: str = "visibility",
                         cache: VisibilityCache | None = None) -> ValueFunction4D:
    """March the joint value from zero until the horizon or a steady state.

    Resolutions above MAX_VALUE_GRID need allow_large=True: memory and time
    grow with the fourth power of m.
    """
    if grid.m > MAX_VALUE_GRID and not allow_large:
        raise ValueError(
            f"m={grid.m} exceeds the 4-D solver default cap {MAX_VALUE_GRID}; "
            "pass allow_large=True to override")
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")

    phi = signed_distance(scene, grid)
    if cache is None:
        cache = VisibilityCache(phi, aux_mode)
    fp_field = speed_field(scene.f_p, phi)
    fe_field = speed_field(scene.f_e, phi)
    max_speed = max(scene.f_p, scene.f_e)
    if dt is None:
        dt = grid.h / (CFL_DENOM * max_speed)

    terminal = build_terminal_mask(cache)
    free = free_mask(phi)
    h = grid.h
    cell_measure = h ** 4

    V = np.zeros((grid.m,) * 4)
    V[terminal] = 0.0
    l1_log: list[float] = []
    steps = int(np.ceil(horizon / dt))
    n = 0
    for n in range(1, steps + 1):
        Vn = step_value_4d(V, fp_field.values, fe_field.values, dt, terminal, h)
        delta = cell_measure * float(np.abs(Vn - V).sum())
        l1_log.append(delta)
        V = Vn
        if delta < stop_tol:
            break

    reported = V.copy()
    obstacle = ~free
    reported[obstacle, :, :] = LARGE
    reported[:, :, obstacle] = LARGE

    return ValueFunction4D(
        grid=grid, values=reported, raw_values=V, horizon=horizon,
        elapsed=n * dt, dt=dt, iterations=n, f_p=scene.f_p, f_e=scene.f_e,
        fp_field=fp_field, fe_field=fe_field, terminal_mask=terminal,
        free=free, scene_hash=scene.scene_hash(), l1_log=l1_log)


@dataclass
class StationaryValue:
    """Evader-plane value for a pursuer that cannot move."""

    grid: Grid2D
    pursuer: Cell
    field: ScalarField
    dt: float
    iterations: int
    terminal_mask: np.ndarray
    free: np.ndarray
    l1_log: list


def solve_stationary(scene: SceneDescription, grid: Grid2D, pursuer: Cell,
                     dt: float | None = None, stop_tol: float = STOP_TOL,
                     max_time: float | None = None, aux_mode: str = "visibility",
                     cache: VisibilityCache | None = None) -> StationaryValue:
    """2-D reduction used for convergence studies and the occlusion-time field."""
    phi = signed_distance(scene, grid)
    if cache is None:
        cache = VisibilityCache(phi, aux_mode)
    fe_field = speed_field(scene.f_e, phi)
    h = grid.h
    if dt is None:
        dt = min(h / STATIONARY_DT_DENOM, h / (CFL_DENOM * scene.f_e))

    terminal = cache.shadow_values(tuple(pursuer)) <= 0.0
    W = np.zeros((grid.m, grid.m))
    l1_log: list[float] = []
    max_iter = 2_000_000
    n = 0
    while n < max_iter:
        n += 1
        Wn = step_value_2d(W, fe_field.values, dt, terminal, h)
        delta = h * h * float(np.abs(Wn - W).sum())
        l1_log.append(delta)
        W = Wn
        if delta < stop_tol:
            break
        if max_time is not None and n * dt >= max_time:
            break
    else:
        raise RuntimeError("stationary solve failed to settle within the step budget")

    return StationaryValue(grid=grid, pursuer=tuple(pursuer),
                           field=ScalarField(grid, W), dt=dt, iterations=n,
                           terminal_mask=terminal, free=free_mask(phi),
                           l1_log=l1_log)


def optimal_controls(vf: ValueFunction4D, pursuer: Cell, evader: Cell):
    """Unit control directions at a joint cell index.

    The pursuer follows its gradient up, the evader follows its gradient
    down.  A vanishing gradient (flat value, for instance a cornered evader)
    yields the zero vector: no direction helps.
    """
    i, j = pursuer
    k, l = evader
    if not vf.free[i, j] or not vf.free[k, l]:
        raise ValueError("both positions must be in free space")
    p0, p1, e2, e3 = vf.partials()
    gp = np.array([p0[i, j, k, l], p1[i, j, k, l]])
    ge = np.array([e2[i, j, k, l], e3[i, j, k, l]])
    np_norm = float(np.hypot(*gp))
    ne_norm = float(np.hypot(*ge))
    sigma_p = gp / np_norm if np_norm > GRAD_EPS else np.zeros(2)
    sigma_e = -ge / ne_norm if ne_norm > GRAD_EPS else np.zeros(2)
    return sigma_p, sigma_e


def winning_regions(vf: ValueFunction4D, threshold_factor: float = 0.9):
    """Split free-free joint indices by whether the pursuer holds out long enough."""
    free2 = vf.free[:, :, None, None] & vf.free[None, None, :, :]
    cutoff = threshold_factor * vf.horizon
    pursuer_win = free2 & (vf.values > cutoff)
    evader_win = free2 & (vf.values <= cutoff)
    return pursuer_win, evader_win


def _multilinear4(values: np.ndarray, grid: Grid2D, point4) -> float:
    m, h = grid.m, grid.h
    coords = np.clip(np.asarray(point4, dtype=np.float64) / h - 0.5, 0.0, m - 1.0)
    base = np.clip(np.floor(coords).astype(int), 0, m - 2)
    frac = coords - base
    total = 0.0
    for corner in range(16):
        idx = []
        w = 1.0
        for ax in range(4):
            bit = (corner >> ax) & 1
            idx.append(base[ax] + bit)
            w *= frac[ax] if bit else (1.0 - frac[ax])
        total += w * values[tuple(idx)]
    return total


@dataclass
class TrajectoryRecord:
    times: list
    pursuer: list
    evader: list
    outcome: str


def play_hji_trajectory(vf: ValueFunction4D, start_p, start_e,
                        dt: float | None = None,
                        max_steps: int | None = None) -> TrajectoryRecord:
    """Euler playback of both optimal feedback controls from continuous starts.

    Controls come from the same upwind partials as optimal_controls, sampled
    by multilinear interpolation over the joint lattice.  Ends when the
    evader reaches occlusion (evader-win) or the horizon runs out.
    """
    grid = vf.grid
    if dt is None:
        dt = vf.dt
    if max_steps is None:
        max_steps = int(np.ceil(vf.horizon / dt)) + 1

    def _free_at(xy):
        return vf.free[grid.cell_of(*xy)]

    pos_p = np.asarray(start_p, dtype=np.float64)
    pos_e = np.asarray(start_e, dtype=np.float64)
    if not _free_at(pos_p) or not _free_at(pos_e):
        raise ValueError("trajectory starts must be in free space")

    partials = vf.partials()
    lo, hi = 0.5 * grid.h, 1.0 - 0.5 * grid.h

    def _terminal(pp, pe) -> bool:
        return bool(vf.terminal_mask[grid.cell_of(*pp) + grid.cell_of(*pe)])

    times = [0.0]
    path_p = [tuple(pos_p)]
    path_e = [tuple(pos_e)]
    outcome = "pursuer-win"
    if _terminal(pos_p, pos_e):
        return TrajectoryRecord(times, path_p, path_e, "evader-win")

    for n in range(1, max_steps + 1):
        point = (pos_p[0], pos_p[1], pos_e[0], pos_e[1])
        grads = [_multilinear4(p, grid, point) for p in partials]
        gp = np.array(grads[:2])
        ge = np.array(grads[2:])
        npn, nen = float(np.hypot(*gp)), float(np.hypot(*ge))
        sp = gp / npn if npn > GRAD_EPS else np.zeros(2)
        se = -ge / nen if nen > GRAD_EPS else np.zeros(2)

        speed_p = vf.fp_field.sample(*pos_p)
        speed_e = vf.fe_field.sample(*pos_e)
        cand_p = np.clip(pos_p + dt * speed_p * sp, lo, hi)
        cand_e = np.clip(pos_e + dt * speed_e * se, lo, hi)
        # a substep that lands inside an obstacle is dropped, not projected
        if _free_at(cand_p):
            pos_p = cand_p
        if _free_at(cand_e):
            pos_e = cand_e

        times.append(n * dt)
        path_p.append(tuple(pos_p))
        path_e.append(tuple(pos_e))
        if _terminal(pos_p, pos_e):
            outcome = "evader-win"
            break
        if n * dt >= vf.horizon:
            break
    return TrajectoryRecord(times, path_p, path_e, outcome)


# ---------------------------------------------------------------------------
# value dumps: 4-D row-major raw doubles + sidecar
# ---------------------------------------------------------------------------

def dump_value(vf: ValueFunction4D, base: str | Path) -> None:
    """Write the working lattice (finite everywhere) plus a JSON sidecar.

    The dump stores raw_values rather than the LARGE-masked report so that a
    restored object can still interpolate sane gradients next to obstacles.
    """
    base = Path(base)
    meta = {
        "m": vf.grid.m, "h": vf.grid.h, "f_p": vf.f_p, "f_e": vf.f_e,
        "T": vf.horizon, "dt": vf.dt, "iterations": vf.iterations,
        "scene_hash": vf.scene_hash,
    }
    base.with_suffix(".json").write_text(json.dumps(meta, sort_keys=True) + "\n")
    vf.raw_values.astype("<f8").tofile(base.with_suffix(".f64"))


def load_value(base: str | Path) -> tuple[np.ndarray, dict]:
    """Read a dump back as (lattice, sidecar dict); obstacle entries are unmasked."""
    base = Path(base)
    meta = json.loads(base.with_suffix(".json").read_text())
    m = int(meta["m"])
    raw = np.fromfile(base.with_suffix(".f64"), dtype="<f8")
    if raw.size != m ** 4:
        raise ValueError(f"dump holds {raw.size} doubles, expected {m ** 4}")
    return raw.reshape((m, m, m, m)), meta


def restore_value(scene: SceneDescription, base: str | Path,
                  aux_mode: str = "visibility") -> ValueFunction4D:
    """Rebuild a playable value object from a scene plus a dump on disk.

    The scene must be the one the dump was solved on (checked by hash); the
    speed fields and occlusion mask are recomputed, the lattice is loaded.
    """
    raw, meta = load_value(base)
    if meta["scene_hash"] != scene.scene_hash():
        raise ValueError("value dump was solved on a different scene "
                         f"({meta['scene_hash']} != {scene.scene_hash()})")
    grid = Grid2D(int(meta["m"]))
    phi = signed_distance(scene, grid)
    cache = VisibilityCache(phi, aux_mode)
    f_p, f_e = float(meta["f_p"]), float(meta["f_e"])
    fp_field = speed_field(f_p, phi)
    fe_field = speed_field(f_e, phi)
    free = free_mask(phi)
    reported = raw.copy()
    obstacle = ~free
    reported[obstacle, :, :] = LARGE
    reported[:, :, obstacle] = LARGE
    iterations = int(meta["iterations"])
    dt = float(meta["dt"])
    return ValueFunction4D(
        grid=grid, values=reported, raw_values=raw, horizon=float(meta["T"]),
        elapsed=iterations * dt, dt=dt, iterations=iterations, f_p=f_p, f_e=f_e,
        fp_field=fp_field, fe_field=fe_field,
        terminal_mask=build_terminal_mask(cache), free=free,
        scene_hash=scene.scene_hash())
