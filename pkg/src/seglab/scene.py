"""Obstacle scenes on the unit square and their signed-distance fields.

A scene is a list of convex primitives plus the two player speeds and team
sizes.  The occluder field is negative inside obstacles, positive outside,
and is assembled as the min over per-shape signed distances.  Closed forms
are used where they exist (circle, axis-aligned rectangle); every other
primitive falls back to distance-to-sampled-boundary with an analytic
inside test for the sign.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .config import BOUNDARY_SAMPLES, LARGE
from .grid import Grid2D, ScalarField

_ANGLE_TOL = 1e-12


def _rotate_into(px: np.ndarray, py: np.ndarray, center, angle: float):
    """Map world points into a shape frame (translate then rotate by -angle)."""
    cx, cy = center
    dx, dy = px - cx, py - cy
    if abs(angle) < _ANGLE_TOL:
        return dx, dy
    c, s = math.cos(angle), math.sin(angle)
    return c * dx + s * dy, -s * dx + c * dy


def _rotate_out(ux: np.ndarray, uy: np.ndarray, center, angle: float):
    cx, cy = center
    c, s = math.cos(angle), math.sin(angle)
    return cx + c * ux - s * uy, cy + s * ux + c * uy


@dataclass(frozen=True)
class Shape:
    kind: str = dc_field(init=False, default="")

    def inside(self, px, py):
        raise NotImplementedError

    def boundary_points(self, n: int):
        raise NotImplementedError

    def max_reach(self) -> float:
        """Radius of a disk around the center guaranteed to contain the shape."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Circle(Shape):
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "kind", "circle")
        if self.radius <= 0:
            raise ValueError("circle radius must be positive")

    def signed_distance(self, px, py):
        return np.hypot(px - self.center[0], py - self.center[1]) - self.radius

    def inside(self, px, py):
        return self.signed_distance(px, py) < 0

    def boundary_points(self, n: int):
        t = np.linspace(0, 2 * np.pi, n, endpoint=False)
        return (self.center[0] + self.radius * np.cos(t),
                self.center[1] + self.radius * np.sin(t))

    def max_reach(self) -> float:
        return self.radius

    def to_json(self) -> dict:
        return {"kind": "circle", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Rectangle(Shape):
    center: tuple[float, float]
    half_extents: tuple[float, float]
    angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", "rectangle")
        if min(self.half_extents) <= 0:
            raise ValueError("rectangle half extents must be positive")

    def signed_distance_axis_aligned(self, px, py):
        # classic box distance: outside part plus inside (negative) part
        a, b = self.half_extents
        qx = np.abs(px - self.center[0]) - a
        qy = np.abs(py - self.center[1]) - b
        outside = np.hypot(np.maximum(qx, 0.0), np.maximum(qy, 0.0))
        inside = np.minimum(np.maximum(qx, qy), 0.0)
        return outside + inside

    def inside(self, px, py):
        ux, uy = _rotate_into(np.asarray(px, float), np.asarray(py, float),
                              self.center, self.angle)
        a, b = self.half_extents
        return (np.abs(ux) < a) & (np.abs(uy) < b)

    def boundary_points(self, n: int):
        a, b = self.half_extents
        per = 4 * (a + b)
        s = np.linspace(0, per, n, endpoint=False)
        ux = np.empty(n)
        uy = np.empty(n)
        for k, t in enumerate(s):
            if t < 2 * a:
                ux[k], uy[k] = t - a, -b
            elif t < 2 * a + 2 * b:
                ux[k], uy[k] = a, (t - 2 * a) - b
            elif t < 4 * a + 2 * b:
                ux[k], uy[k] = a - (t - 2 * a - 2 * b), b
            else:
                ux[k], uy[k] = -a, b - (t - 4 * a - 2 * b)
        return _rotate_out(ux, uy, self.center, self.angle)

    def max_reach(self) -> float:
        return math.hypot(*self.half_extents)

    def to_json(self) -> dict:
        return {"kind": "rectangle", "center": list(self.center),
                "half_extents": list(self.half_extents), "angle": self.angle}


@dataclass(frozen=True)
class Ellipse(Shape):
    center: tuple[float, float]
    semi_axes: tuple[float, float]
    angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", "ellipse")
        if min(self.semi_axes) <= 0:
            raise ValueError("ellipse semi axes must be positive")

    def inside(self, px, py):
        ux, uy = _rotate_into(np.asarray(px, float), np.asarray(py, float),
                              self.center, self.angle)
        a, b = self.semi_axes
        return (ux / a) ** 2 + (uy / b) ** 2 < 1.0

    def boundary_points(self, n: int):
        t = np.linspace(0, 2 * np.pi, n, endpoint=False)
        a, b = self.semi_axes
        return _rotate_out(a * np.cos(t), b * np.sin(t), self.center, self.angle)

    def max_reach(self) -> float:
        return max(self.semi_axes)

    def to_json(self) -> dict:
        return {"kind": "ellipse", "center": list(self.center),
                "semi_axes": list(self.semi_axes), "angle": self.angle}


@dataclass(frozen=True)
class Diamond(Shape):
    center: tuple[float, float]
    half_extents: tuple[float, float]
    angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", "diamond")
        if min(self.half_extents) <= 0:
            raise ValueError("diamond half extents must be positive")

    def inside(self, px, py):
        ux, uy = _rotate_into(np.asarray(px, float), np.asarray(py, float),
                              self.center, self.angle)
        a, b = self.half_extents
        return np.abs(ux) / a + np.abs(uy) / b < 1.0

    def boundary_points(self, n: int):
        a, b = self.half_extents
        corners = np.array([(a, 0.0), (0.0, b), (-a, 0.0), (0.0, -b), (a, 0.0)])
        per_edge = n // 4
        us, vs = [], []
        for k in range(4):
            t = np.linspace(0, 1, per_edge, endpoint=False)
            us.append(corners[k, 0] + t * (corners[k + 1, 0] - corners[k, 0]))
            vs.append(corners[k, 1] + t * (corners[k + 1, 1] - corners[k, 1]))
        return _rotate_out(np.concatenate(us), np.concatenate(vs),
                           self.center, self.angle)

    def max_reach(self) -> float:
        return max(self.half_extents)

    def to_json(self) -> dict:
        return {"kind": "diamond", "center": list(self.center),
                "half_extents": list(self.half_extents), "angle": self.angle}


def shape_from_json(obj: dict) -> Shape:
    kind = obj.get("kind")
    if kind == "circle":
        return Circle(tuple(obj["center"]), float(obj["radius"]))
    if kind == "rectangle":
        return Rectangle(tuple(obj["center"]), tuple(obj["half_extents"]),
                         float(obj.get("angle", 0.0)))
    if kind == "ellipse":
        return Ellipse(tuple(obj["center"]), tuple(obj["semi_axes"]),
                       float(obj.get("angle", 0.0)))
    if kind == "diamond":
        return Diamond(tuple(obj["center"]), tuple(obj["half_extents"]),
                       float(obj.get("angle", 0.0)))
    raise ValueError(f"unknown shape kind {kind!r}")


@dataclass(frozen=True)
class SceneDescription:
    shapes: tuple[Shape, ...] = ()
    f_p: float = 2.0
    f_e: float = 1.0
    k_p: int = 1
    k_e: int = 1

    def __post_init__(self):
        if not (self.f_p >= 0 and math.isfinite(self.f_p)):
            raise ValueError("pursuer speed must be finite and >= 0")
        if not (self.f_e > 0 and math.isfinite(self.f_e)):
            raise ValueError("evader speed must be finite and positive")
        if self.k_p < 1 or self.k_e < 1:
            raise ValueError("team sizes must be at least 1")
        for shape in self.shapes:
            cx, cy = shape.center
            r = shape.max_reach()
            if cx - r < -1e-9 or cx + r > 1 + 1e-9 or cy - r < -1e-9 or cy + r > 1 + 1e-9:
                raise ValueError(f"shape {shape.kind} at {shape.center} leaves the unit square")

    def to_json(self) -> dict:
        return {
            "shapes": [s.to_json() for s in self.shapes],
            "f_p": self.f_p,
            "f_e": self.f_e,
            "k_p": self.k_p,
            "k_e": self.k_e,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def scene_hash(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()[:16]

    @classmethod
    def from_json(cls, obj: dict) -> "SceneDescription":
        shapes = tuple(shape_from_json(s) for s in obj.get("shapes", []))
        return cls(
            shapes=shapes,
            f_p=float(obj.get("f_p", 2.0)),
            f_e=float(obj.get("f_e", 1.0)),
            k_p=int(obj.get("k_p", 1)),
            k_e=int(obj.get("k_e", 1)),
        )

    @classmethod
    def load(cls, path: str | Path) -> "SceneDescription":
        return cls.from_json(json.loads(Path(path).read_text()))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps() + "\n")


def _shape_signed_distance(shape: Shape, px: np.ndarray, py: np.ndarray) -> np.ndarray:
    if isinstance(shape, Circle):
        return shape.signed_distance(px, py)
    if isinstance(shape, Rectangle) and abs(shape.angle) < _ANGLE_TOL:
        return shape.signed_distance_axis_aligned(px, py)
    # no closed form used: unsigned distance to a dense boundary sample,
    # signed by the analytic inside test
    bx, by = shape.boundary_points(BOUNDARY_SAMPLES)
    tree = cKDTree(np.column_stack([bx, by]))
    dist, _ = tree.query(np.column_stack([px.ravel(), py.ravel()]))
    dist = dist.reshape(px.shape)
    sign = np.where(shape.inside(px, py), -1.0, 1.0)
    return sign * dist


def signed_distance(scene: SceneDescription, grid: Grid2D) -> ScalarField:
    """Occluder field at cell centers: min over shapes, LARGE when empty."""
    X, Y = grid.meshgrid()
    if not scene.shapes:
        return ScalarField(grid, np.full((grid.m, grid.m), LARGE))
    vals = np.full((grid.m, grid.m), np.inf)
    for shape in scene.shapes:
        vals = np.minimum(vals, _shape_signed_distance(shape, X, Y))
    return ScalarField(grid, vals)


def free_mask(phi: ScalarField) -> np.ndarray:
    """Cells the players may occupy (strictly outside every obstacle)."""
    return phi.values > 0.0
