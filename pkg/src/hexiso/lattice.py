"""Triangular-lattice geometry in axial coordinates.

A vertex ``(x, y)`` sits at ``x + y * exp(i*pi/3)`` in the plane.  Direction
``k`` has angle ``k*pi/3``; all combinatorics run on the integer axial pairs and
the float embedding is only used for boxes, snapping and plots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

SQRT3 = math.sqrt(3.0)
HALF_SQRT3 = SQRT3 / 2.0

# counterclockwise, direction k at angle k*pi/3
OFFSETS: tuple[tuple[int, int], ...] = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))
_DIR_OF = {off: k for k, off in enumerate(OFFSETS)}

Axial = tuple[int, int]


def embed(v) -> tuple[float, float]:
    x, y = v
    return (x + 0.5 * y, HALF_SQRT3 * y)


def embed_many(xs, ys):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    return xs + 0.5 * ys, HALF_SQRT3 * ys


def to_axial(px: float, py: float) -> tuple[float, float]:
    """Inverse of :func:`embed` (real-valued axial coordinates)."""
    y = py / HALF_SQRT3
    return px - 0.5 * y, y


def opposite(k: int) -> int:
    return (k + 3) % 6


def step(v, k: int) -> Axial:
    dx, dy = OFFSETS[k % 6]
    return (v[0] + dx, v[1] + dy)


def neighbors(v) -> list[Axial]:
    x, y = v
    return [(x + dx, y + dy) for dx, dy in OFFSETS]


def direction(u, v) -> int:
    """Direction index of the edge u -> v; raises if not adjacent."""
    try:
        return _DIR_OF[(v[0] - u[0], v[1] - u[1])]
    except KeyError:
        raise ValueError(f"{u} and {v} are not adjacent") from None


def adjacent(u, v) -> bool:
    return (v[0] - u[0], v[1] - u[1]) in _DIR_OF


def graph_distance(u, v) -> int:
    dx, dy = v[0] - u[0], v[1] - u[1]
    if dx * dy >= 0:
        return abs(dx) + abs(dy)
    return max(abs(dx), abs(dy))


def right_boundary_dirs(d_in: int, d_out: int, reversal: bool = False) -> tuple[int, ...]:
    """Directions strictly between ``d_in`` and ``d_out``, counterclockwise.

    ``d_in`` points back to the previous vertex and ``d_out`` to the next one.
    An immediate reversal (``d_in == d_out``) is rejected unless ``reversal``
    is set, in which case the fan runs all the way round (five directions).
    """
    d_in %= 6
    d_out %= 6
    if d_in == d_out:
        if not reversal:
            raise ValueError("d_in == d_out: the path turns straight back")
        return tuple((d_in + j) % 6 for j in range(1, 6))
    count = (d_out - d_in - 1) % 6
    return tuple((d_in + j) % 6 for j in range(1, count + 1))


class OrientedEdge(NamedTuple):
    tail: Axial
    dir: int

    @property
    def head(self) -> Axial:
        return step(self.tail, self.dir)

    def reversed(self) -> "OrientedEdge":
        return OrientedEdge(self.head, opposite(self.dir))


def corner_key(v, k: int) -> tuple[Axial, Axial, Axial]:
    """Hexagon corner between directions k and k+1 of ``v``.

    A corner is shared by three hexagons; the key is their sorted centers, so
    the same corner seen from any of the three hexagons gets the same key.
    """
    return tuple(sorted((tuple(v), step(v, k), step(v, k + 1))))


def corner_point(v, k: int) -> tuple[float, float]:
    cx, cy = embed(v)
    ang = k * math.pi / 3 + math.pi / 6
    r = 1.0 / SQRT3
    return (cx + r * math.cos(ang), cy + r * math.sin(ang))


class DualEdge(NamedTuple):
    """Hexagonal edge crossing ``primal``, oriented with the head hexagon on its right."""

    primal: OrientedEdge

    @property
    def tail_corner(self):
        return corner_key(self.primal.tail, self.primal.dir - 1)

    @property
    def head_corner(self):
        return corner_key(self.primal.tail, self.primal.dir)

    @property
    def left(self) -> Axial:
        return self.primal.tail

    @property
    def right(self) -> Axial:
        return self.primal.head

    def endpoints(self) -> tuple[tuple[float, float], tuple[float, float]]:
        u, k = self.primal
        return corner_point(u, k - 1), corner_point(u, k)


@dataclass(frozen=True)
class TiltedBox:
    """``anchor + e^{i angle} * ([0, width] x [-half_height, half_height])``, closed."""

    anchor: tuple[float, float]
    width: float
    half_height: float
    angle: float = 0.0

    def __post_init__(self):
        if self.width < 0 or self.half_height < 0:
            raise ValueError("box dimensions must be non-negative")

    def local(self, px, py):
        """Planar points -> box frame (u along the box, v across)."""
        c, s = math.cos(self.angle), math.sin(self.angle)
        dx = np.asarray(px, dtype=float) - self.anchor[0]
        dy = np.asarray(py, dtype=float) - self.anchor[1]
        return c * dx + s * dy, -s * dx + c * dy

    def contains(self, px, py, tol: float = 1e-9):
        u, v = self.local(px, py)
        return (u >= -tol) & (u <= self.width + tol) & (np.abs(v) <= self.half_height + tol)

    def corners(self) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        loc = [(0, -self.half_height), (self.width, -self.half_height),
               (self.width, self.half_height), (0, self.half_height)]
        return np.array([(self.anchor[0] + c * u - s * v, self.anchor[1] + s * u + c * v)
                         for u, v in loc])

    def planar_bounds(self) -> tuple[float, float, float, float]:
        cs = self.corners()
        return cs[:, 0].min(), cs[:, 0].max(), cs[:, 1].min(), cs[:, 1].max()


def axis_box(x0: float, x1: float, y0: float, y1: float) -> TiltedBox:
    """The axis-aligned closed box ``[x0, x1] x [y0, y1]``."""
    return TiltedBox((x0, (y0 + y1) / 2.0), x1 - x0, (y1 - y0) / 2.0, 0.0)


def square(r: float) -> TiltedBox:
    """``[-r, r]^2``; its vertex set is B_r."""
    return axis_box(-r, r, -r, r)


def axial_range(xmin: float, xmax: float, ymin: float, ymax: float, pad: int = 0):
    """Axial index bounds (x0, y0, nx, ny) of a parallelogram covering a planar rectangle."""
    y0 = math.floor(ymin / HALF_SQRT3) - pad
    y1 = math.ceil(ymax / HALF_SQRT3) + pad
    # x ranges over [xmin - y/2, xmax - y/2] for y in [y0, y1]
    x0 = math.floor(xmin - 0.5 * y1) - pad
    x1 = math.ceil(xmax - 0.5 * y0) + pad
    return x0, y0, x1 - x0 + 1, y1 - y0 + 1


def box_vertices(box: TiltedBox) -> set[Axial]:
    """Lattice vertices whose embedding lies in the closed box."""
    xmin, xmax, ymin, ymax = box.planar_bounds()
    x0, y0, nx, ny = axial_range(xmin, xmax, ymin, ymax, pad=1)
    ys, xs = np.mgrid[y0:y0 + ny, x0:x0 + nx]
    px, py = embed_many(xs, ys)
    inside = box.contains(px, py)
    return {(int(a), int(b)) for a, b in zip(xs[inside], ys[inside])}


def snap(px: float, py: float) -> Axial:
    """Closest lattice vertex; ties go to the lexicographically smallest axial pair."""
    ax, ay = to_axial(px, py)
    best = None
    for y in range(math.floor(ay) - 1, math.floor(ay) + 3):
        for x in range(math.floor(ax) - 2, math.floor(ax) + 3):
            qx, qy = embed((x, y))
            d = round((qx - px) ** 2 + (qy - py) ** 2, 12)
            key = (d, x, y)
            if best is None or key < best:
                best = key
    return (best[1], best[2])


def segments_cross_side(px, py, qx, qy, box: TiltedBox, side: str, tol: float = 1e-9):
    """Vectorized: does the closed segment p-q meet the given closed side of the box?

    ``side`` is one of ``left``, ``right`` (u = 0, u = width) or ``bottom``,
    ``top`` (v = -h, v = +h).
    """
    pu, pv = box.local(px, py)
    qu, qv = box.local(qx, qy)
    if side in ("left", "right"):
        level = 0.0 if side == "left" else box.width
        a, b, ca, cb, lo, hi = pu, qu, pv, qv, -box.half_height, box.half_height
    elif side in ("bottom", "top"):
        level = -box.half_height if side == "bottom" else box.half_height
        a, b, ca, cb, lo, hi = pv, qv, pu, qu, 0.0, box.width
    else:
        raise ValueError(f"unknown side {side!r}")
    a = a - level
    b = b - level
    straddle = (np.minimum(a, b) <= tol) & (np.maximum(a, b) >= -tol)
    denom = b - a
    flat = np.abs(denom) <= tol
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(flat, 0.0, -a / np.where(flat, 1.0, denom))
    t = np.clip(t, 0.0, 1.0)
    c = ca + t * (cb - ca)
    hit = straddle & (c >= lo - tol) & (c <= hi + tol)
    # collinear with the side line: intervals overlap
    cmin, cmax = np.minimum(ca, cb), np.maximum(ca, cb)
    coll = flat & (np.abs(a) <= tol) & (cmax >= lo - tol) & (cmin <= hi + tol)
    return hit | coll
