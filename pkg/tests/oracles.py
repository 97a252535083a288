"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written by a different route than the
library: exact segment-primitive intersection instead of sampled field
minima, heap-based Dijkstra instead of sweeping, dense boundary sampling
instead of closed forms.  Slow and simple beats fast and shared-bugs.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from seglab.scene import Circle, Diamond, Ellipse, Rectangle, SceneDescription


# ---------------------------------------------------------------------------
# exact segment-vs-primitive intersection (open interiors)
# ---------------------------------------------------------------------------

def _segment_hits_circle(p0, p1, center, radius) -> bool:
    """True iff the open segment passes through the open disk."""
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    c = np.asarray(center, float)
    d = p1 - p0
    dd = float(d @ d)
    if dd == 0.0:
        return float((p0 - c) @ (p0 - c)) < radius * radius
    t = float(np.clip(((c - p0) @ d) / dd, 0.0, 1.0))
    closest = p0 + t * d
    return float((closest - c) @ (closest - c)) < radius * radius - 1e-15


def _convex_polygon_halfplanes(vertices):
    """Outward normals and offsets for a counterclockwise convex polygon."""
    verts = np.asarray(vertices, float)
    planes = []
    n = len(verts)
    for k in range(n):
        a, b = verts[k], verts[(k + 1) % n]
        edge = b - a
        normal = np.array([edge[1], -edge[0]])  # outward for ccw order
        planes.append((normal, float(normal @ a)))
    return planes


def _segment_hits_convex(p0, p1, planes) -> bool:
    """Clip the segment against each half-plane; a leftover interval means
    the segment spends positive length inside the polygon."""
    t0, t1 = 0.0, 1.0
    p0 = np.asarray(p0, float)
    d = np.asarray(p1, float) - p0
    for normal, offset in planes:
        num = offset - float(normal @ p0)
        den = float(normal @ d)
        if abs(den) < 1e-15:
            if num < 0.0:
                return False  # parallel and fully outside this half-plane
            continue
        t = num / den
        if den > 0:
            t1 = min(t1, t)
        else:
            t0 = max(t0, t)
        if t0 >= t1:
            return False
    return (t1 - t0) > 1e-12


def _rect_vertices(rect: Rectangle):
    cx, cy = rect.center
    hx, hy = rect.half_extents
    corners = [(-hx, -hy), (hx, -hy), (hx, hy), (-hx, hy)]
    cos_a, sin_a = math.cos(rect.angle), math.sin(rect.angle)
    return [(cx + x * cos_a - y * sin_a, cy + x * sin_a + y * cos_a)
            for x, y in corners]


def _diamond_vertices(dia: Diamond):
    cx, cy = dia.center
    hx, hy = dia.half_extents
    corners = [(hx, 0.0), (0.0, hy), (-hx, 0.0), (0.0, -hy)]
    cos_a, sin_a = math.cos(dia.angle), math.sin(dia.angle)
    return [(cx + x * cos_a - y * sin_a, cy + x * sin_a + y * cos_a)
            for x, y in corners]


def _segment_hits_shape(p0, p1, shape) -> bool:
    if isinstance(shape, Circle):
        return _segment_hits_circle(p0, p1, shape.center, shape.radius)
    if isinstance(shape, Ellipse):
        # rotate into the ellipse frame, scale to a unit circle
        cx, cy = shape.center
        a, b = shape.semi_axes
        cos_a, sin_a = math.cos(shape.angle), math.sin(shape.angle)

        def into(p):
            dx, dy = p[0] - cx, p[1] - cy
            return ((dx * cos_a + dy * sin_a) / a,
                    (-dx * sin_a + dy * cos_a) / b)

        return _segment_hits_circle(into(p0), into(p1), (0.0, 0.0), 1.0)
    if isinstance(shape, Rectangle):
        return _segment_hits_convex(p0, p1,
                                    _convex_polygon_halfplanes(_rect_vertices(shape)))
    if isinstance(shape, Diamond):
        return _segment_hits_convex(p0, p1,
                                    _convex_polygon_halfplanes(_diamond_vertices(shape)))
    raise TypeError(f"no ray oracle for {type(shape).__name__}")


def point_visible(scene: SceneDescription, vantage_xy, point_xy) -> bool:
    """Exact line-of-sight test: no shape interior between the two points."""
    return not any(_segment_hits_shape(vantage_xy, point_xy, s)
                   for s in scene.shapes)


def shadow_sign_map(scene: SceneDescription, m: int, vantage_cell) -> np.ndarray:
    """+1 visible / -1 hidden per cell center, 0 on non-free cells."""
    h = 1.0 / m
    centers = (np.arange(m) + 0.5) * h
    vantage_xy = (centers[vantage_cell[0]], centers[vantage_cell[1]])
    out = np.zeros((m, m), dtype=int)
    free = brute_free_mask(scene, m)
    for i in range(m):
        for j in range(m):
            if not free[i, j]:
                continue
            visible = point_visible(scene, vantage_xy, (centers[i], centers[j]))
            out[i, j] = 1 if visible else -1
    return out


# ---------------------------------------------------------------------------
# brute-force signed distance / free mask
# ---------------------------------------------------------------------------

def _shape_inside(shape, x, y) -> bool:
    return bool(shape.inside(np.asarray([x]), np.asarray([y]))[0])


def brute_signed_distance(scene: SceneDescription, x: float, y: float,
                          samples: int = 20000) -> float:
    """min over dense boundary samples, sign from the inside tests."""
    best = math.inf
    inside_any = False
    for shape in scene.shapes:
        bx, by = shape.boundary_points(samples)
        best = min(best, float(np.min(np.hypot(bx - x, by - y))))
        inside_any = inside_any or _shape_inside(shape, x, y)
    if not scene.shapes:
        return math.inf
    return -best if inside_any else best


def brute_free_mask(scene: SceneDescription, m: int) -> np.ndarray:
    h = 1.0 / m
    centers = (np.arange(m) + 0.5) * h
    X, Y = np.meshgrid(centers, centers, indexing="ij")
    inside = np.zeros((m, m), dtype=bool)
    for shape in scene.shapes:
        inside |= shape.inside(X.ravel(), Y.ravel()).reshape(m, m)
    return ~inside


# ---------------------------------------------------------------------------
# heap Dijkstra on the 8-connected grid (harmonic-mean edge costs)
# ---------------------------------------------------------------------------

def dijkstra_arrival(speed: np.ndarray, h: float, sources,
                     blocked: np.ndarray | None = None) -> np.ndarray:
    """Arrival times from the source set; the same metric the action sets use.

    Diagonal steps are forbidden when either orthogonal neighbor is blocked
    (no corner cutting).  `blocked` defaults to nothing blocked: callers
    pass the obstacle mask when walls should be impassable rather than slow.
    """
    m, n = speed.shape
    if blocked is None:
        blocked = np.zeros_like(speed, dtype=bool)
    dist = np.full((m, n), np.inf)
    heap = []
    for cell in sources:
        cell = tuple(int(v) for v in cell)
        if not blocked[cell]:
            dist[cell] = 0.0
            heapq.heappush(heap, (0.0, cell))
    steps = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
    while heap:
        d, (i, j) = heapq.heappop(heap)
        if d > dist[i, j]:
            continue
        for di, dj in steps:
            ni, nj = i + di, j + dj
            if not (0 <= ni < m and 0 <= nj < n) or blocked[ni, nj]:
                continue
            if di != 0 and dj != 0:
                if blocked[i, nj] or blocked[ni, j]:
                    continue
                step = h * math.sqrt(2.0)
            else:
                step = h
            cost = step * 0.5 * (1.0 / speed[i, j] + 1.0 / speed[ni, nj])
            nd = d + cost
            if nd < dist[ni, nj] - 1e-15:
                dist[ni, nj] = nd
                heapq.heappush(heap, (nd, (ni, nj)))
    return dist


# ---------------------------------------------------------------------------
# seeded random scenes that keep some free space
# ---------------------------------------------------------------------------

def random_scene(rng: np.random.Generator, n_min: int = 2, n_max: int = 6,
                 f_p: float = 2.0, f_e: float = 1.0) -> SceneDescription:
    """2..6 primitives of mixed kinds, all inside the unit square."""
    shapes = []
    n = int(rng.integers(n_min, n_max + 1))
    while len(shapes) < n:
        kind = rng.integers(4)
        cx, cy = rng.uniform(0.2, 0.8, size=2)
        if kind == 0:
            shape = Circle((cx, cy), float(rng.uniform(0.05, 0.13)))
        elif kind == 1:
            shape = Rectangle((cx, cy), tuple(rng.uniform(0.04, 0.11, size=2)),
                              float(rng.uniform(0.0, math.pi)))
        elif kind == 2:
            shape = Ellipse((cx, cy), tuple(rng.uniform(0.05, 0.12, size=2)),
                            float(rng.uniform(0.0, math.pi)))
        else:
            shape = Diamond((cx, cy), tuple(rng.uniform(0.05, 0.13, size=2)),
                            float(rng.uniform(0.0, math.pi)))
        shapes.append(shape)
    return SceneDescription(shapes=tuple(shapes), f_p=f_p, f_e=f_e)


def free_vantage(scene: SceneDescription, m: int, rng: np.random.Generator,
                 margin: float = 0.0):
    """A uniformly chosen free cell, optionally at least `margin` outside walls."""
    from seglab.grid import Grid2D
    from seglab.scene import signed_distance

    phi = signed_distance(scene, Grid2D(m))
    eligible = np.argwhere(phi.values > margin)
    if eligible.size == 0:
        raise ValueError("scene has no free cell at the requested margin")
    pick = eligible[rng.integers(len(eligible))]
    return (int(pick[0]), int(pick[1]))
