"""First-arrival time solver (fast sweeping) and velocity regularization."""

from __future__ import annotations

import numpy as np
from numba import njit

from .config import EPS_CELLS, LARGE, SWEEP_MAX, SWEEP_TOL, V_MIN
from .grid import Grid2D, ScalarField, constant_field

# Number of solve_eikonal calls since import; complexity tests snapshot this.
SOLVE_COUNT = 0


@njit(cache=True)
def _sweep_pass(T, cost, frozen, xdir, ydir):
    """One Gauss-Seidel pass in a fixed ordering; returns the largest update."""
    m, n = T.shape
    maxd = 0.0
    i = 0 if xdir > 0 else m - 1
    iend = m if xdir > 0 else -1
    while i != iend:
        j = 0 if ydir > 0 else n - 1
        jend = n if ydir > 0 else -1
        while j != jend:
            if not frozen[i, j]:
                a = T[i - 1, j] if i > 0 else LARGE
                if i + 1 < m and T[i + 1, j] < a:
                    a = T[i + 1, j]
                b = T[i, j - 1] if j > 0 else LARGE
                if j + 1 < n and T[i, j + 1] < b:
                    b = T[i, j + 1]
                f = cost[i, j]
                if abs(a - b) >= f:
                    t = (a if a < b else b) + f
                else:
                    t = 0.5 * (a + b + np.sqrt(2.0 * f * f - (a - b) * (a - b)))
                if t < T[i, j]:
                    d = T[i, j] - t
                    if d > maxd:
                        maxd = d
                    T[i, j] = t
            j += ydir
        i += xdir
    return maxd


_ORDERINGS = ((1, 1), (-1, 1), (-1, -1), (1, -1))


def solve_eikonal(speed: ScalarField, sources, tol: float = SWEEP_TOL,
                  max_sweeps: int = SWEEP_MAX) -> ScalarField:
    """Arrival time from a source set under a positive speed field.

    sources may be a list of (i, j) cells or a boolean mask.  Sweeps the four
    orderings until the largest update in a full cycle drops below tol or the
    sweep budget is spent.  Unreached cells keep the LARGE sentinel.
    """
    global SOLVE_COUNT
    SOLVE_COUNT += 1

    grid = speed.grid
    vals = speed.values
    if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
        raise ValueError("speed field must be positive and finite everywhere")

    frozen = np.zeros((grid.m, grid.m), dtype=np.bool_)
    if isinstance(sources, np.ndarray) and sources.dtype == np.bool_:
        frozen |= sources
    else:
        for cell in sources:
            i, j = cell
            if not grid.contains_cell((i, j)):
                raise ValueError(f"source cell {cell} outside grid")
            frozen[i, j] = True
    if not frozen.any():
        raise ValueError("at least one source cell is required")

    T = np.full((grid.m, grid.m), LARGE)
    T[frozen] = 0.0
    cost = grid.h / vals

    sweeps = 0
    while sweeps < max_sweeps:
        maxd = 0.0
        for xdir, ydir in _ORDERINGS:
            maxd = max(maxd, _sweep_pass(T, cost, frozen, xdir, ydir))
            sweeps += 1
            if sweeps >= max_sweeps:
                break
        if maxd < tol:
            break
    return ScalarField(grid, T)


def regularize_speed(raw_speed: float, phi: ScalarField, eps: float | None = None,
                     v_min: float = V_MIN) -> ScalarField:
    """Smoothly slow a uniform speed to v_min inside obstacles.

    Full speed where phi > 0; a half-cosine blend down to v_min across
    phi in [-2*eps, 0]; v_min deeper inside.  eps defaults to 16 cells.
    """
    if raw_speed <= 0 or not np.isfinite(raw_speed):
        raise ValueError("raw speed must be positive and finite")
    if eps is None:
        eps = EPS_CELLS * phi.grid.h
    if eps <= 0:
        raise ValueError("blend width eps must be positive")
    if not (0 < v_min <= raw_speed):
        raise ValueError("v_min must satisfy 0 < v_min <= raw speed")

    p = phi.values
    blend = v_min + 0.5 * (raw_speed - v_min) * (np.cos(p * np.pi / (2.0 * eps)) + 1.0)
    out = np.where(p > 0.0, raw_speed, np.where(p < -2.0 * eps, v_min, blend))
    return ScalarField(phi.grid, out)


def speed_field(raw: float, phi: ScalarField) -> ScalarField:
    """Regularized speed field; a zero raw speed short-circuits to zero."""
    if raw == 0.0:
        return constant_field(phi.grid, 0.0)
    return regularize_speed(raw, phi)
