"""Norm geometry: rho-lengths, Wulff crystals, l-infinity Hausdorff distance, roundness."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

TWO_PI = 2.0 * math.pi


class UnboundedBody(ValueError):
    """The sampled half-planes do not cut out a bounded set."""


# -- convex bodies ------------------------------------------------------------------

def _clean(verts: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Counterclockwise order, duplicates and collinear runs removed."""
    v = np.asarray(verts, dtype=float)
    if len(v) >= 3:
        x, y = v[:, 0], v[:, 1]
        if 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) < 0:
            v = v[::-1]
    scale = max(1.0, float(np.abs(v).max())) if len(v) else 1.0
    out = []
    for p in v:
        if not out or np.abs(p - out[-1]).max() > 100 * tol * scale:
            out.append(p)
    while len(out) > 1 and np.abs(out[0] - out[-1]).max() <= 100 * tol * scale:
        out.pop()
    changed = True
    while changed and len(out) > 3:
        changed = False
        i = 0
        while i < len(out) and len(out) > 3:
            a = out[i] - out[i - 1]
            b = out[(i + 1) % len(out)] - out[i]
            if abs(a[0] * b[1] - a[1] * b[0]) <= tol * math.hypot(*a) * math.hypot(*b):
                del out[i]
                changed = True
            else:
                i += 1
    v = np.array(out)
    return v


@dataclass(frozen=True)
class ConvexBody:
    """Convex polygon with counterclockwise vertices."""

    vertices: np.ndarray

    def __post_init__(self):
        v = _clean(self.vertices)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        if len(v) < 3 or self.area <= 0:
            raise ValueError("degenerate convex body")

    @property
    def area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    @property
    def centroid(self) -> np.ndarray:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        x1, y1 = np.roll(x, -1), np.roll(y, -1)
        c = x * y1 - x1 * y
        a = 0.5 * c.sum()
        return np.array([((x + x1) * c).sum(), ((y + y1) * c).sum()]) / (6.0 * a)

    def support(self, theta) -> np.ndarray:
        """h(theta) = max over the body of u(theta) . x."""
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        u = np.stack([np.cos(th), np.sin(th)], axis=1)
        return (u @ self.vertices.T).max(axis=1)

    def scaled(self, c: float) -> "ConvexBody":
        return ConvexBody(self.vertices * c)

    def translated(self, shift) -> "ConvexBody":
        return ConvexBody(self.vertices + np.asarray(shift, dtype=float))

    def normalized(self) -> "ConvexBody":
        """The homothetic copy of unit area."""
        return self.scaled(1.0 / math.sqrt(self.area))

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        v, w = self.vertices, np.roll(self.vertices, -1, axis=0)
        e = w - v
        # cross(e_i, p - v_i) = p . (-e_y, e_x) + (e_y v_x - e_x v_y), one matmul per chunk
        a = np.stack([-e[:, 1], e[:, 0]])
        c = e[:, 1] * v[:, 0] - e[:, 0] * v[:, 1]
        out = np.empty(len(pts), dtype=bool)
        for i in range(0, len(pts), 8192):
            out[i:i + 8192] = (pts[i:i + 8192] @ a + c >= -tol).all(axis=1)
        return out

    def perimeter(self) -> float:
        d = np.roll(self.vertices, -1, axis=0) - self.vertices
        return float(np.hypot(d[:, 0], d[:, 1]).sum())

    def loop(self) -> np.ndarray:
        return np.vstack([self.vertices, self.vertices[:1]])

    def record(self) -> dict:
        return {"vertices": self.vertices.tolist(), "area": self.area}

    def to_json(self) -> str:
        return json.dumps(self.record())


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float

    @property
    def area(self) -> float:
        return math.pi * self.radius ** 2

    def support(self, theta) -> np.ndarray:
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        return self.center[0] * np.cos(th) + self.center[1] * np.sin(th) + self.radius


Body = Union[ConvexBody, Disk]


def regular_polygon(k: int, radius: float = 1.0, phase: float = 0.0) -> ConvexBody:
    t = phase + TWO_PI * np.arange(k) / k
    return ConvexBody(np.stack([radius * np.cos(t), radius * np.sin(t)], axis=1))


# -- directional norms --------------------------------------------------------------

class DirectionalNorm:
    """A norm sampled on the uniform grid theta_k = 2 pi k / K.

    Between grid directions the norm is the support function of the corner
    where the two neighbouring half-planes u_k . x <= beta_k meet, so values at
    grid points are returned exactly and no values are invented in between.
    """

    def __init__(self, values):
        vals = np.asarray(values, dtype=float).copy()
        if vals.ndim != 1 or len(vals) < 3:
            raise ValueError("need at least three directions")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError("norm values must be positive")
        vals.setflags(write=False)
        self.values = vals
        self.K = len(vals)
        self.thetas = TWO_PI * np.arange(self.K) / self.K
        step = TWO_PI / self.K
        b0, b1 = vals, np.roll(vals, -1)
        t0 = self.thetas
        # corner q_k of the half-planes k and k+1
        det = math.sin(step)
        self._corners = np.stack([
            (b0 * np.sin(t0 + step) - b1 * np.sin(t0)) / det,
            (-b0 * np.cos(t0 + step) + b1 * np.cos(t0)) / det,
        ], axis=1)

    @classmethod
    def from_function(cls, f: Callable, K: int = 720) -> "DirectionalNorm":
        th = TWO_PI * np.arange(K) / K
        return cls(np.array([f(t) for t in th], dtype=float))

    @classmethod
    def constant(cls, nu: float = 1.0, K: int = 720) -> "DirectionalNorm":
        return cls(np.full(K, float(nu)))

    @classmethod
    def euclidean(cls, K: int = 720) -> "DirectionalNorm":
        return cls.constant(1.0, K)

    @classmethod
    def hexagonal(cls, K: int = 720) -> "DirectionalNorm":
        """Graph-distance norm of the unit triangular lattice (the p = 1 passage norm)."""
        return cls.from_function(hex_norm, K)

    @classmethod
    def from_sector(cls, values) -> "DirectionalNorm":
        """Extend samples at theta_j = j pi / (6m), j = 0..m, by the 12 lattice symmetries."""
        vals = np.asarray(values, dtype=float)
        m = len(vals) - 1
        if m < 1:
            raise ValueError("need at least two sector samples")
        K = 12 * m
        idx = np.arange(K) % (2 * m)
        idx = np.where(idx <= m, idx, 2 * m - idx)
        return cls(vals[idx])

    def __call__(self, theta) -> np.ndarray:
        th = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        pos = th / (TWO_PI / self.K)
        k = np.floor(pos).astype(int) % self.K
        on_grid = np.abs(pos - np.round(pos)) <= 1e-9
        out = np.cos(th) * self._corners[k, 0] + np.sin(th) * self._corners[k, 1]
        return np.where(on_grid, self.values[np.round(pos).astype(int) % self.K], out)

    def length(self, vectors) -> np.ndarray:
        """rho(v) for planar vectors (rows)."""
        v = np.atleast_2d(np.asarray(vectors, dtype=float))
        r = np.hypot(v[:, 0], v[:, 1])
        out = np.zeros(len(v))
        nz = r > 0
        out[nz] = r[nz] * self(np.arctan2(v[nz, 1], v[nz, 0]))
        return out

    def scaled(self, c: float) -> "DirectionalNorm":
        return DirectionalNorm(self.values * c)

    def symmetrized(self, rotations: int = 6, reflect: bool = True) -> "DirectionalNorm":
        """Average over the lattice rotations (and the reflection theta -> -theta)."""
        if self.K % rotations:
            raise ValueError("grid size must be divisible by the rotation order")
        shift = self.K // rotations
        vals = np.mean([np.roll(self.values, j * shift) for j in range(rotations)], axis=0)
        if reflect:
            vals = 0.5 * (vals + np.roll(vals[::-1], 1))
        return DirectionalNorm(vals)

    def to_csv(self) -> str:
        rows = ["theta,beta"] + [f"{float(t)!r},{float(b)!r}" for t, b in zip(self.thetas, self.values)]
        return "\n".join(rows) + "\n"


def hex_norm(theta: float) -> float:
    """Unit-step graph norm on the triangular lattice in direction theta."""
    t = math.fmod(theta, math.pi / 3.0)
    if t < 0:
        t += math.pi / 3.0
    return math.cos(t) + math.sin(t) / math.sqrt(3.0)


def analytic_hexagon_wulff() -> ConvexBody:
    """Wulff crystal of :func:`hex_norm`: regular hexagon of circumradius 2/sqrt(3)."""
    return regular_polygon(6, 2.0 / math.sqrt(3.0), math.pi / 6.0)


def rho_length(polyline, norm: DirectionalNorm, closed: bool = False) -> float:
    """Sum of rho over the segments of a polyline; zero-length segments are skipped."""
    pts = np.asarray(polyline, dtype=float)
    if len(pts) < 2:
        raise ValueError("polyline needs at least two points")
    if closed:
        pts = np.vstack([pts, pts[:1]])
    return float(norm.length(np.diff(pts, axis=0)).sum())


# -- Wulff construction ----------------------------------------------------------------

def _clip(poly: np.ndarray, u: np.ndarray, c: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon to u . x <= c."""
    s = poly @ u - c
    inside = s <= 0
    if inside.all():
        return poly
    if not inside.any():
        return poly[:0]
    nxt = np.roll(np.arange(len(poly)), -1)
    out = []
    for i in range(len(poly)):
        j = nxt[i]
        if inside[i]:
            out.append(poly[i])
        if inside[i] != inside[j]:
            t = s[i] / (s[i] - s[j])
            out.append(poly[i] + t * (poly[j] - poly[i]))
    return np.array(out)


def wulff_construct(norm: DirectionalNorm):
    """(W, W-hat): intersection of the sampled half-planes and its unit-area copy."""
    if norm.K < 8:
        raise ValueError("need at least 8 directions")
    big = 1e6 * float(norm.values.max())
    poly = np.array([[-big, -big], [big, -big], [big, big], [-big, big]])
    for t, b in zip(norm.thetas, norm.values):
        poly = _clip(poly, np.array([math.cos(t), math.sin(t)]), b)
        if len(poly) == 0:
            raise ValueError("empty intersection")
    if np.abs(poly).max() >= 0.5 * big:
        raise UnboundedBody("half-planes do not bound a region")
    w = ConvexBody(poly)
    return w, w.normalized()


def quarter_turn(norm: DirectionalNorm) -> DirectionalNorm:
    """theta -> beta(theta + pi/2) on the same grid."""
    if norm.K % 4 == 0:
        return DirectionalNorm(np.roll(norm.values, -(norm.K // 4)))
    return DirectionalNorm(norm(norm.thetas + math.pi / 2))


def minimizer_body(norm: DirectionalNorm) -> ConvexBody:
    """Unit-area body whose boundary minimizes the rho-length.

    The rho-length charges tangent directions while W is cut out by normals,
    so the minimizer is the Wulff shape of the quarter-turned norm (that is,
    W-hat turned by a right angle).  It coincides with W-hat whenever the norm
    is invariant under quarter turns.
    """
    return wulff_construct(quarter_turn(norm))[1]


def phi_from_norm(norm: DirectionalNorm) -> float:
    """Minimal rho-length enclosing unit area, evaluated on :func:`minimizer_body`."""
    return rho_length(minimizer_body(norm).loop(), norm)


# -- Hausdorff distance ------------------------------------------------------------------

def _seg_dist_linf(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """l-inf distance from point p to each segment [a_i, b_i]; exact."""
    d = b - a
    r = p[None, :] - a
    cands = [np.zeros(len(a)), np.ones(len(a))]
    with np.errstate(divide="ignore", invalid="ignore"):
        for num, den in ((r[:, 0], d[:, 0]), (r[:, 1], d[:, 1]),
                         (r[:, 0] - r[:, 1], d[:, 0] - d[:, 1]),
                         (r[:, 0] + r[:, 1], d[:, 0] + d[:, 1])):
            t = np.where(np.abs(den) > 1e-300, num / den, 0.0)
            cands.append(np.clip(t, 0.0, 1.0))
    best = np.full(len(a), np.inf)
    for t in cands:
        q = a + t[:, None] * d
        best = np.minimum(best, np.abs(p[None, :] - q).max(axis=1))
    return best


def _seg_dist_l2(p, a, b):
    d = b - a
    dd = (d * d).sum(axis=1)
    t = np.clip(np.where(dd > 0, ((p[None, :] - a) * d).sum(axis=1) / np.where(dd > 0, dd, 1), 0), 0, 1)
    q = a + t[:, None] * d
    return np.hypot(*(p[None, :] - q).T)


def _disk_dist(p: np.ndarray, disk: Disk, metric: str) -> float:
    dx, dy = abs(p[0] - disk.center[0]), abs(p[1] - disk.center[1])
    r = disk.radius
    if metric == "l2":
        return max(0.0, math.hypot(dx, dy) - r)
    if math.hypot(dx, dy) <= r:
        return 0.0
    hi, lo = max(dx, dy), min(dx, dy)
    if hi - r >= lo:
        return hi - r
    # both coordinates shrink: (hi - s)^2 + (lo - s)^2 = r^2
    s_ = hi + lo
    disc = s_ * s_ - 2.0 * (hi * hi + lo * lo - r * r)
    return 0.5 * (s_ - math.sqrt(max(disc, 0.0)))


def point_distance(p, body: Body, metric: str = "linf") -> float:
    p = np.asarray(p, dtype=float)
    if isinstance(body, Disk):
        return _disk_dist(p, body, metric)
    if body.contains(p[None, :])[0]:
        return 0.0
    a = body.vertices
    b = np.roll(a, -1, axis=0)
    f = _seg_dist_linf if metric == "linf" else _seg_dist_l2
    return float(f(p, a, b).min())


def _directed(a: Body, b: Body, metric: str, tol: float) -> float:
    """sup over a of the distance to b; a convex function, so extreme points suffice."""
    if isinstance(a, ConvexBody):
        return max(point_distance(v, b, metric) for v in a.vertices)
    cx, cy = a.center

    def at(t):
        return point_distance((cx + a.radius * math.cos(t), cy + a.radius * math.sin(t)), b, metric)

    m = 256
    prev = -1.0
    while True:
        ts = TWO_PI * np.arange(m) / m
        vals = np.array([at(t) for t in ts])
        i = int(vals.argmax())
        lo, hi = ts[i] - TWO_PI / m, ts[i] + TWO_PI / m
        g = (math.sqrt(5) - 1) / 2
        for _ in range(60):
            x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
            if at(x1) >= at(x2):
                hi = x2
            else:
                lo = x1
        best = max(float(vals.max()), at(0.5 * (lo + hi)))
        if abs(best - prev) <= tol or m >= 1 << 16:
            return best
        prev = best
        m *= 2


def hausdorff(a: Body, b: Body, metric: str = "linf", tol: float = 1e-6) -> float:
    """Symmetric Hausdorff distance between convex bodies (polygons or disks); l-inf by default."""
    if metric not in ("linf", "l2"):
        raise ValueError("metric must be 'linf' or 'l2'")
    return max(_directed(a, b, metric, tol), _directed(b, a, metric, tol))


def unit_disk() -> Disk:
    """The disk of unit area centred at the origin."""
    return Disk((0.0, 0.0), 1.0 / math.sqrt(math.pi))


def roundness(body: ConvexBody) -> dict:
    """Max/min support radius about the centroid and d_H to the equal-area disk there."""
    c = body.centroid
    v = body.vertices - c
    w = np.roll(v, -1, axis=0)
    e = w - v
    apothem = np.abs(v[:, 0] * e[:, 1] - v[:, 1] * e[:, 0]) / np.hypot(e[:, 0], e[:, 1])
    ratio = float(np.hypot(v[:, 0], v[:, 1]).max() / apothem.min())
    disk = Disk((float(c[0]), float(c[1])), math.sqrt(body.area / math.pi))
    return {"ratio": ratio, "dH_disk": hausdorff(body, disk)}


def wulff_svg(body: ConvexBody, size: int = 400, disk: Disk | None = None) -> str:
    """SVG of a body (solid) over the unit-area disk (dashed)."""
    disk = unit_disk() if disk is None else disk
    ext = 1.15 * max(float(np.abs(body.vertices).max()), disk.radius)
    s = size / (2 * ext)

    def tx(x, y):
        return f"{(x + ext) * s:.3f},{(ext - y) * s:.3f}"

    pts = " ".join(tx(x, y) for x, y in body.vertices)
    cx, cy = tx(*disk.center).split(",")
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">'
            f'<circle cx="{cx}" cy="{cy}" r="{disk.radius * s:.3f}" fill="none" '
            f'stroke="#888" stroke-dasharray="4 3"/>'
            f'<polygon points="{pts}" fill="none" stroke="#c33" stroke-width="1.5"/></svg>\n')
