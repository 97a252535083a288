"""Level-set visibility from a vantage point.

Everything here reduces to taking minima of interpolated fields along the
sight segment between a query cell and the vantage cell.  The visibility
field carries the sign of the occluder along the segment; the shadow field
flips hidden free-space cells negative while keeping obstacle interiors
positive, so its sign alone answers "is this spot hidden from the vantage".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Cell, Grid2D, ScalarField, bilinear

# Segments are sampled at steps of at most half a cell.
_SAMPLE_STEP_CELLS = 0.5


def _segment_min(values: np.ndarray, grid: Grid2D, vantage_xy) -> np.ndarray:
    """For every cell center x, min of the field over the segment [x, vantage].

    One shared sample count (from the longest segment) keeps the evaluation
    a single vectorized pass; shorter segments just get sampled finer.
    """
    x0, y0 = vantage_xy
    X, Y = grid.meshgrid()
    step = _SAMPLE_STEP_CELLS * grid.h
    max_len = float(np.hypot(X - x0, Y - y0).max())
    n = max(int(np.ceil(max_len / step)) + 1, 2)
    r = np.linspace(0.0, 1.0, n)[:, None, None]
    px = x0 + r * (X - x0)
    py = y0 + r * (Y - y0)
    return bilinear(values, grid, px, py).min(axis=0)


def _require_free_vantage(phi: ScalarField, vantage: Cell) -> tuple[float, float]:
    if not phi.grid.contains_cell(vantage):
        raise ValueError(f"vantage {vantage} outside grid")
    if phi.values[vantage] <= 0:
        raise ValueError(f"vantage {vantage} is inside an obstacle")
    return phi.grid.center_of(vantage)


def visibility_field(phi: ScalarField, vantage: Cell) -> ScalarField:
    """Min of the occluder along each sight segment; negative means blocked."""
    xy = _require_free_vantage(phi, vantage)
    return ScalarField(phi.grid, _segment_min(phi.values, phi.grid, xy))


def grazing_field(phi: ScalarField, vantage: Cell) -> ScalarField:
    """Alignment of the sight direction with the occluder gradient.

    Central differences, one-sided at grid edges.  Positive where the ray
    from the cell to the vantage climbs out of an obstacle.
    """
    xy = _require_free_vantage(phi, vantage)
    gx, gy = np.gradient(phi.values, phi.grid.h)
    X, Y = phi.grid.meshgrid()
    vals = (xy[0] - X) * gx + (xy[1] - Y) * gy
    return ScalarField(phi.grid, vals)


@dataclass
class VantageFields:
    """All per-vantage fields, computed in one pass."""

    vantage: Cell
    visibility: ScalarField
    grazing: ScalarField
    auxiliary: ScalarField
    auxiliary_visibility: ScalarField
    shadow: ScalarField


def vantage_fields(phi: ScalarField, vantage: Cell, aux_mode: str = "visibility") -> VantageFields:
    """Compute visibility, grazing, auxiliary and shadow fields for one vantage.

    aux_mode picks what the grazing term is maximized against: "visibility"
    (the default) or "occluder" for the plain occluder variant.
    """
    xy = _require_free_vantage(phi, vantage)
    grid = phi.grid
    vis = ScalarField(grid, _segment_min(phi.values, grid, xy))
    graze = grazing_field(phi, vantage)
    if aux_mode == "visibility":
        aux = np.maximum(vis.values, graze.values)
    elif aux_mode == "occluder":
        aux = np.maximum(phi.values, graze.values)
    else:
        raise ValueError(f"unknown aux_mode {aux_mode!r}")
    # min along the same segments again: cleans the grazing sign up so the
    # zero level hugs the true shadow boundary
    aux_vis = _segment_min(aux, grid, xy)
    shadow = np.maximum(aux_vis, -phi.values)
    return VantageFields(
        vantage=vantage,
        visibility=vis,
        grazing=graze,
        auxiliary=ScalarField(grid, aux),
        auxiliary_visibility=ScalarField(grid, aux_vis),
        shadow=ScalarField(grid, shadow),
    )


def shadow_field(phi: ScalarField, vantage: Cell, aux_mode: str = "visibility") -> ScalarField:
    """Shadow function for one vantage: <= 0 exactly on hidden free space."""
    return vantage_fields(phi, vantage, aux_mode).shadow


class VisibilityCache:
    """Per-vantage shadow fields, memoized by vantage cell.

    Games evaluate the same vantages over and over; the cache keeps one
    m*m array per distinct vantage.  Mutation happens only under the GIL
    (plain dict ops), which is all the engine's thread usage needs.
    """

    def __init__(self, phi: ScalarField, aux_mode: str = "visibility"):
        self.phi = phi
        self.aux_mode = aux_mode
        self._shadows: dict[Cell, np.ndarray] = {}

    def shadow_values(self, vantage: Cell) -> np.ndarray:
        cached = self._shadows.get(vantage)
        if cached is None:
            cached = shadow_field(self.phi, vantage, self.aux_mode).values
            self._shadows[vantage] = cached
        return cached

    def joint_shadow_mask(self, pursuers) -> np.ndarray:
        """Free cells hidden from every listed vantage at once."""
        mask = np.ones_like(self.phi.values, dtype=bool)
        for cell in pursuers:
            mask &= self.shadow_values(tuple(cell)) <= 0.0
        return mask

    def precompute(self, cells=None) -> None:
        if cells is None:
            free = np.argwhere(self.phi.values > 0)
            cells = [tuple(c) for c in free]
        for cell in cells:
            self.shadow_values(tuple(cell))


def is_end_game(cache: VisibilityCache, pursuers, evaders) -> bool:
    """True when some evader is hidden from every pursuer simultaneously."""
    phi = cache.phi.values
    for cell in list(pursuers) + list(evaders):
        if not cache.phi.grid.contains_cell(tuple(cell)):
            raise ValueError(f"position {cell} outside grid")
        if phi[tuple(cell)] <= 0:
            raise ValueError(f"position {cell} is inside an obstacle")
    for e in evaders:
        if all(cache.shadow_values(tuple(p))[tuple(e)] <= 0.0 for p in pursuers):
            return True
    return False
