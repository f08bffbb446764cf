"""Modified Cheeger constant and anchored isoperimetric profile of the open cluster."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from . import lattice, percolation
from ._kernels import anchored_scan, anneal_kernel, polish_kernel, subset_scan
from .lattice import neighbors
from .percolation import Configuration, Proxy

EXACT_LIMIT = 20
ANCHORED_LIMIT = 12


class SizeLimitExceeded(ValueError):
    """Too many vertices for exhaustive search; use :func:`cheeger_anneal`."""


class ConditioningFailed(RuntimeError):
    """The origin is not in the cluster proxy; resample."""


@dataclass
class CheegerResult:
    value: Fraction
    minimizers: list
    method: str
    stats: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)

    def record(self) -> dict:
        return {"value": float(self.value), "num": self.value.numerator,
                "den": self.value.denominator, "method": self.method,
                "minimizers": [sorted(map(list, h)) for h in self.minimizers[:1]], **self.stats}


def vertex_boundary(a, ambient) -> set:
    """Vertices of ``ambient`` outside ``a`` adjacent to ``a``."""
    a = set(map(tuple, a))
    for v in a:
        if v not in ambient:
            raise ValueError(f"{v} is not in the ambient cluster")
    return {w for v in a for w in neighbors(v) if w not in a and w in ambient}


def ratio(a, ambient) -> Fraction:
    return Fraction(len(vertex_boundary(a, ambient)), len(a))


def cheeger_window(n: int, pad_factor: float = 4.0):
    half = (1.0 + pad_factor) * n
    return percolation.window_for(-half, half, -half, half, pad=1)


def box_cluster(config: Configuration, n: int, proxy: Proxy | None = None, pad_factor: float = 4.0):
    """(proxy, C_p^n): the proxy and its largest component inside B_n."""
    if proxy is None:
        proxy = percolation.infinite_cluster_proxy(config, lattice.square(n), pad_factor)
    return proxy, sorted(proxy.inner)


def _local_graph(ground, ambient, rows_for=None):
    """Neighbour table on ground + adjacent ambient vertices (ground indices first)."""
    index = {v: i for i, v in enumerate(ground)}
    order = list(ground)
    for v in ground:
        for w in neighbors(v):
            if w in ambient and w not in index:
                index[w] = len(order)
                order.append(w)
    rows_for = len(ground) if rows_for is None else rows_for
    nbr = np.full((len(order), 6), -1, dtype=np.int64)
    for i in range(rows_for):
        for k, w in enumerate(neighbors(order[i])):
            j = index.get(w)
            if j is not None:
                nbr[i, k] = j
    return nbr, order


def cheeger_exact(config: Configuration, n: int, proxy: Proxy | None = None,
                  limit: int = EXACT_LIMIT, max_keep: int = 1000) -> CheegerResult:
    """All minimizers of |boundary H| / |H| over H in C_p^n with 0 < |H| <= |C_p^n| / 2.

    The boundary is taken in the whole proxy cluster and H need not be connected.
    """
    proxy, ground = box_cluster(config, n, proxy)
    g = len(ground)
    if g > limit:
        raise SizeLimitExceeded(f"|C_p^n| = {g} exceeds the exact limit {limit}; use cheeger_anneal")
    if g == 0:
        raise ValueError("C_p^n is empty")
    if g == 1:
        # the cardinality bound admits nothing; the lone vertex is reported by convention
        v = ground[0]
        return CheegerResult(Fraction(len(vertex_boundary([v], proxy))), [frozenset([v])], "exact",
                             {"ground": 1, "n_minimizers": 1})
    nbr, order = _local_graph(ground, proxy)
    num, den, masks, count = subset_scan(nbr, g, g // 2, len(order), max_keep)
    sets = [frozenset(ground[i] for i in range(g) if (int(m) >> i) & 1) for m in masks]
    return CheegerResult(Fraction(int(num), int(den)), sets, "exact",
                         {"ground": g, "n_minimizers": int(count)})


def anchored_exact(config: Configuration, n: int, proxy: Proxy | None = None,
                   origin=(0, 0), limit: int = ANCHORED_LIMIT, max_keep: int = 1000) -> CheegerResult:
    """Minimum over connected H with origin in H, within the cluster, and |H| <= n."""
    if n > limit:
        raise SizeLimitExceeded(f"n = {n} exceeds the anchored limit {limit}")
    if n < 1:
        raise ValueError("n must be positive")
    if proxy is None:
        proxy = percolation.infinite_cluster_proxy(config, lattice.square(max(n, 2)))
    origin = tuple(origin)
    if origin not in proxy:
        raise ConditioningFailed("origin is not in the cluster proxy")
    # cluster vertices within graph distance n - 1 carry rows; the next layer is boundary only
    dist = {origin: 0}
    queue = deque([origin])
    while queue:
        v = queue.popleft()
        if dist[v] >= n - 1:
            continue
        for w in neighbors(v):
            if w in proxy and w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    ground = sorted(dist, key=lambda v: (dist[v], v))
    nbr, order = _local_graph(ground, proxy)
    num, den, rows, count, visited = anchored_scan(nbr, 0, n, max_keep)
    sets = [frozenset(order[i] for i in row if i >= 0) for row in rows]
    return CheegerResult(Fraction(int(num), int(den)), sets, "exact",
                         {"visited": int(visited), "n_minimizers": int(count)})


def _components(members: set) -> list:
    out, seen = [], set()
    for v in members:
        if v in seen:
            continue
        comp, stack = [], [v]
        seen.add(v)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in neighbors(u):
                if w in members and w not in seen:
                    seen.add(w)
                    stack.append(w)
        out.append(comp)
    return out


def _initial_sets(ground, max_size, restarts, seed):
    pts = np.array([lattice.embed(v) for v in ground])
    centre = pts.mean(axis=0)
    spread = pts.std(axis=0).max() + 1.0
    inits = []
    for r in range(restarts):
        rng = percolation.make_rng(seed, r)
        if r == 0:
            c, frac = centre, 1.0
        else:
            c = centre + rng.normal(0.0, 0.25 * spread, 2)
            frac = rng.uniform(0.3, 1.0)
        d = np.hypot(*(pts - c).T)
        k = max(1, int(round(frac * max_size)))
        init = np.zeros(len(ground), dtype=np.bool_)
        init[np.lexsort((np.arange(len(ground)), d))[:k]] = True
        inits.append(init)
    return inits


def cheeger_anneal(config: Configuration, n: int, proxy: Proxy | None = None, seed: int = 0,
                   restarts: int = 8, moves: int | None = None, t0: float | None = None,
                   t1: float = 0.01, rounds: int = 12) -> CheegerResult:
    """Simulated annealing for the modified Cheeger constant of C_p^n.

    Moves flip vertices on the edge of H under the size constraint; each run
    is followed by component repair and greedy polishing.  After the restarts,
    ``rounds`` further runs reheat the incumbent to half the start temperature.
    Deterministic for a given seed.
    """
    proxy, ground = box_cluster(config, n, proxy)
    g = len(ground)
    if g == 0:
        raise ValueError("C_p^n is empty")
    if g == 1:
        # the cardinality bound admits nothing; the lone vertex is reported by convention
        v = ground[0]
        return CheegerResult(Fraction(len(vertex_boundary([v], proxy))), [frozenset([v])], "exact",
                             {"ground": 1, "n_minimizers": 1})
    max_size = g // 2
    nbr, order = _local_graph(ground, proxy)
    moves = max(n * n, 400 * g if g <= 64 else 100 * g) if moves is None else moves
    if t0 is None:
        t0 = 2.0 if g <= 64 else 1.0
    best, best_val, runs = None, None, []
    for r, init in enumerate(_initial_sets(ground, max_size, restarts, seed)):
        mask, _, _ = anneal_kernel(nbr, g, max_size, init, moves, t0, t1,
                                   int(percolation.make_rng(seed, 1000 + r).integers(2 ** 31)))
        cands = [mask]
        members = {ground[i] for i in np.flatnonzero(mask)}
        comps = _components(members)
        if len(comps) > 1:
            pos = {v: i for i, v in enumerate(ground)}
            for comp in comps:
                m2 = np.zeros(g, dtype=np.bool_)
                m2[[pos[v] for v in comp]] = True
                cands.append(m2)
        for cand in cands:
            pol, b, size = polish_kernel(nbr, g, max_size, cand)
            val = Fraction(int(b), int(size))
            runs.append(float(val))
            if best_val is None or val < best_val:
                best_val, best = val, pol
    # small sets hiding in bays of the cluster are out of reach of the flips; seed
    # from the vertices of lowest degree as well
    deg = (nbr[:g] >= 0).sum(axis=1)
    for i in np.lexsort((np.arange(g), deg))[:16]:
        init = np.zeros(g, dtype=np.bool_)
        init[i] = True
        pol, b, size = polish_kernel(nbr, g, max_size, init)
        val = Fraction(int(b), int(size))
        if val < best_val:
            best_val, best = val, pol
    for k in range(rounds):
        mask, _, _ = anneal_kernel(nbr, g, max_size, best.copy(), moves, t0 / 2, t1,
                                   int(percolation.make_rng(seed, 2000 + k).integers(2 ** 31)))
        pol, b, size = polish_kernel(nbr, g, max_size, mask)
        val = Fraction(int(b), int(size))
        runs.append(float(val))
        if val < best_val:
            best_val, best = val, pol
    h = frozenset(ground[i] for i in np.flatnonzero(best))
    check = ratio(h, proxy)
    if check != best_val:
        raise RuntimeError(f"recomputed ratio {check} differs from search value {best_val}")
    return CheegerResult(best_val, [h], "heuristic",
                         {"ground": g, "restarts": restarts, "rounds": rounds, "moves": moves,
                          "run_values": runs, "size": len(h)})


# -- shape of minimizers ---------------------------------------------------------------------

def predicted_scaled_value(theta: float, phi: float) -> float:
    """Large-n value of n times the modified Cheeger constant: phi / (sqrt 2 theta)."""
    return phi / (math.sqrt(2.0) * theta)


def box_count(n: int) -> int:
    """Lattice vertices in [-n, n]^2."""
    x0, y0, nx, ny = lattice.axial_range(-n, n, -n, n, pad=1)
    xs, ys = np.meshgrid(np.arange(x0, x0 + nx), np.arange(y0, y0 + ny))
    px, py = lattice.embed_many(xs, ys)
    eps = 1e-9
    return int(((np.abs(px) <= n + eps) & (np.abs(py) <= n + eps)).sum())


def _boundary_samples(body, h):
    v = body.vertices
    w = np.roll(v, -1, axis=0)
    out = []
    for a, b in zip(v, w):
        k = max(1, int(math.ceil(np.hypot(*(b - a)) / h)))
        t = np.arange(k)[:, None] / k
        out.append(a + t * (b - a))
    return np.vstack(out)


def _interior_samples(body, h):
    lo, hi = body.vertices.min(axis=0), body.vertices.max(axis=0)
    xs = np.arange(lo[0], hi[0] + h, h)
    ys = np.arange(lo[1], hi[1] + h, h)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    pts = pts[body.contains(pts)]
    return np.vstack([pts, _boundary_samples(body, h)])


def _shape_distance(pts, tree, body, bnd_tree, inner, shift):
    p = pts - shift
    outside = ~body.contains(p)
    d1 = bnd_tree.query(p[outside], p=np.inf)[0].max() if outside.any() else 0.0
    d2 = tree.query(inner + shift, p=np.inf)[0].max()
    return max(float(d1), float(d2))


def minimizer_shape(h, n: float, w_hat, scale: float, target_size: float,
                    resolution: float | None = None) -> dict:
    """min over shifts x of d_H(embed(H) / n, x + scale * W-hat) (l-inf), and |H| / target_size."""
    pts = np.array([lattice.embed(v) for v in h], dtype=float) / n
    body = w_hat.scaled(scale)
    res = 0.25 / n if resolution is None else resolution
    tree = cKDTree(pts)

    def objective(h_res):
        bnd = _boundary_samples(body, h_res)
        inner = _interior_samples(body, h_res)
        btree = cKDTree(bnd)
        return lambda s: _shape_distance(pts, tree, body, btree, inner, np.asarray(s))

    coarse = objective(max(res, 2.0 / n))
    start = pts.mean(axis=0) - body.centroid
    best_s, best_v = start, coarse(start)
    for dx in np.arange(-0.1, 0.1001, 0.02):
        for dy in np.arange(-0.1, 0.1001, 0.02):
            s = start + np.array([dx, dy])
            v = coarse(s)
            if v < best_v:
                best_s, best_v = s, v
    # descend on a mid-resolution sampling, then evaluate once at full resolution
    mid = objective(max(res, 1.0 / n))
    best_v = mid(best_s)
    step = 0.02
    while step > 1e-4:
        moved = False
        for d in ((step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)):
            s = best_s + np.array(d)
            v = mid(s)
            if v < best_v:
                best_s, best_v, moved = s, v, True
        if not moved:
            step *= 0.5
    best_v = objective(res)(best_s)
    return {"dH": float(best_v), "shift": best_s.tolist(), "size_ratio": len(h) / target_size}


def cheeger_svg(h, n: float, w_hat=None, scale: float = math.sqrt(2.0), size: int = 400) -> str:
    """Minimizer vertices (dots) over a shifted, scaled Wulff shape (outline)."""
    pts = np.array([lattice.embed(v) for v in h], dtype=float) / n
    ext = 1.1 * max(1.0, float(np.abs(pts).max()))
    s = size / (2 * ext)
    dots = "".join(f'<circle cx="{(x + ext) * s:.2f}" cy="{(ext - y) * s:.2f}" r="1"/>' for x, y in pts)
    shape = ""
    if w_hat is not None:
        body = w_hat.scaled(scale).translated(pts.mean(axis=0))
        poly = " ".join(f"{(x + ext) * s:.2f},{(ext - y) * s:.2f}" for x, y in body.vertices)
        shape = f'<polygon points="{poly}" fill="none" stroke="#c33"/>'
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">'
            f'<g fill="#333">{dots}</g>{shape}</svg>\n')
