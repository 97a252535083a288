"""Cell-centered grids on the unit square, scalar fields, and field I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import LARGE, UNREACHABLE  # noqa: F401  (re-exported)

Cell = tuple[int, int]


@dataclass(frozen=True)
class Grid2D:
    """m-by-m cells covering [0,1)^2; cell (i,j) is centered at ((i+.5)h, (j+.5)h)."""

    m: int

    def __post_init__(self) -> None:
        if not isinstance(self.m, (int, np.integer)) or self.m < 8:
            raise ValueError(f"grid resolution must be an integer >= 8, got {self.m}")

    @property
    def h(self) -> float:
        return 1.0 / self.m

    def centers(self) -> np.ndarray:
        return (np.arange(self.m) + 0.5) * self.h

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-center coordinate arrays X, Y indexed [i, j]."""
        c = self.centers()
        return np.meshgrid(c, c, indexing="ij")

    def center_of(self, cell: Cell) -> tuple[float, float]:
        i, j = cell
        if not (0 <= i < self.m and 0 <= j < self.m):
            raise ValueError(f"cell {cell} outside {self.m}x{self.m} grid")
        return ((i + 0.5) * self.h, (j + 0.5) * self.h)

    def cell_of(self, x: float, y: float) -> Cell:
        """Cell containing (x, y); coordinates are clipped into the square."""
        i = int(np.clip(np.floor(x * self.m), 0, self.m - 1))
        j = int(np.clip(np.floor(y * self.m), 0, self.m - 1))
        return (i, j)

    def contains_cell(self, cell: Cell) -> bool:
        i, j = cell
        return 0 <= i < self.m and 0 <= j < self.m


@dataclass
class ScalarField:
    """An m*m array of doubles attached to its grid; values[i, j], i along x."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        m = self.grid.m
        if self.values.shape != (m, m):
            raise ValueError(f"field shape {self.values.shape} != ({m}, {m})")
        if np.isnan(self.values).any():
            raise ValueError("field contains NaN")

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    def sample(self, x, y):
        """Bilinear interpolation at (x, y); constant beyond outer cell centers."""
        return bilinear(self.values, self.grid, x, y)


def constant_field(grid: Grid2D, value: float) -> ScalarField:
    return ScalarField(grid, np.full((grid.m, grid.m), float(value)))


def bilinear(values: np.ndarray, grid: Grid2D, x, y):
    """Bilinear sample of a cell-centered array at arbitrary points.

    Outside the hull of cell centers the nearest value extends (clamped).
    Accepts scalars or arrays; broadcasts like numpy.
    """
    m, h = grid.m, grid.h
    u = np.clip(np.asarray(x, dtype=np.float64) / h - 0.5, 0.0, m - 1.0)
    v = np.clip(np.asarray(y, dtype=np.float64) / h - 0.5, 0.0, m - 1.0)
    i0 = np.clip(np.floor(u).astype(np.int64), 0, m - 2)
    j0 = np.clip(np.floor(v).astype(np.int64), 0, m - 2)
    fu = u - i0
    fv = v - j0
    v00 = values[i0, j0]
    v10 = values[i0 + 1, j0]
    v01 = values[i0, j0 + 1]
    v11 = values[i0 + 1, j0 + 1]
    out = (
        v00 * (1 - fu) * (1 - fv)
        + v10 * fu * (1 - fv)
        + v01 * (1 - fu) * fv
        + v11 * fu * fv
    )
    return float(out) if np.isscalar(x) and np.isscalar(y) else out


# ---------------------------------------------------------------------------
# field dumps: <base>.json sidecar + <base>.f64 raw little-endian doubles
# ---------------------------------------------------------------------------

def dump_field(field: ScalarField, base: str | Path, name: str, extra: dict | None = None) -> None:
    """Write a field as raw row-major (i outer, j inner) LE float64 + JSON sidecar."""
    base = Path(base)
    meta = {"m": field.grid.m, "h": field.grid.h, "name": name}
    if extra:
        meta.update(extra)
    base.with_suffix(".json").write_text(json.dumps(meta, sort_keys=True) + "\n")
    field.values.astype("<f8").tofile(base.with_suffix(".f64"))


def load_field(base: str | Path) -> tuple[ScalarField, dict]:
    base = Path(base)
    meta = json.loads(base.with_suffix(".json").read_text())
    m = int(meta["m"])
    raw = np.fromfile(base.with_suffix(".f64"), dtype="<f8")
    if raw.size != m * m:
        raise ValueError(f"dump holds {raw.size} doubles, expected {m * m}")
    return ScalarField(Grid2D(m), raw.reshape(m, m)), meta


def write_pgm(values: np.ndarray, path: str | Path, mode: str = "sign") -> None:
    """Render an array as 8-bit binary PGM.

    mode "sign": diverging gray around 128 (negative dark, positive light),
    scaled by the largest magnitude.  mode "linear": min..max to 0..255.
    Rows run from j = m-1 down to 0 so the image matches an xy plot.
    """
    vals = np.asarray(values, dtype=np.float64)
    if mode == "sign":
        scale = max(float(np.abs(vals).max()), 1e-300)
        pix = np.clip(128 + np.round(127 * vals / scale), 0, 255)
    elif mode == "linear":
        lo, hi = float(vals.min()), float(vals.max())
        span = max(hi - lo, 1e-300)
        pix = np.round(255 * (vals - lo) / span)
    else:
        raise ValueError(f"unknown PGM mode {mode!r}")
    img = pix.astype(np.uint8).T[::-1, :]  # rows = y descending, cols = x
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode()
    Path(path).write_bytes(header + img.tobytes())
