"""Slow, definition-level reference computations used as oracles by the tests.

Nothing here calls into the package's algorithms; only plain data (bit arrays,
vertex sets, callables) crosses the boundary.
"""
from __future__ import annotations

import itertools
import math
from collections import deque

import numpy as np

# unit steps of the triangular lattice, counterclockwise from east
DIRS = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]


def planar(v):
    return v[0] + v[1] / 2.0, v[1] * math.sqrt(3.0) / 2.0


def nbrs(v):
    return [(v[0] + dx, v[1] + dy) for dx, dy in DIRS]


def open_sites(bits, x0, y0):
    ny, nx = bits.shape
    return {(x0 + c, y0 + r) for r in range(ny) for c in range(nx) if bits[r, c]}


def all_sites(bits, x0, y0):
    ny, nx = bits.shape
    return {(x0 + c, y0 + r) for r in range(ny) for c in range(nx)}


# -- clusters ------------------------------------------------------------------------

def bfs_clusters(sites):
    """Connected components of a vertex set by breadth-first search."""
    sites = set(sites)
    seen, comps = set(), []
    for s in sorted(sites):
        if s in seen:
            continue
        comp, queue = {s}, deque([s])
        seen.add(s)
        while queue:
            v = queue.popleft()
            for w in nbrs(v):
                if w in sites and w not in seen:
                    seen.add(w)
                    comp.add(w)
                    queue.append(w)
        comps.append(frozenset(comp))
    return comps


def naive_crossing(bits, x0, y0, w, h, closed=True):
    """Left-right crossing of [0, w] x [0, h] by BFS over the planar embedding.

    A crossing is a path of same-coloured vertices inside the box whose first and
    last edges reach a same-coloured neighbour across the left and right sides;
    a single edge meeting both sides also counts.
    """
    ny, nx = bits.shape
    eps = 1e-9

    def col(v):
        c, r = v[0] - x0, v[1] - y0
        return 0 <= c < nx and 0 <= r < ny and bool(bits[r, c]) != closed

    def inside(v):
        px, py = planar(v)
        return -eps <= px <= w + eps and -eps <= py <= h + eps

    def meets(v, u, level):
        (ax, ay), (bx, by) = planar(v), planar(u)
        if not min(ax, bx) - eps <= level <= max(ax, bx) + eps:
            return False
        if abs(bx - ax) < eps:
            return min(ay, by) <= h + eps and max(ay, by) >= -eps
        yy = ay + (by - ay) * (level - ax) / (bx - ax)
        return -eps <= yy <= h + eps

    def eligible(v, level):
        return any(col(u) and meets(v, u, level) for u in nbrs(v))

    verts = [(x0 + c, y0 + r) for r in range(ny) for c in range(nx)]
    for v in verts:
        if col(v) and any(col(u) and meets(v, u, 0.0) and meets(v, u, float(w)) for u in nbrs(v)):
            return True
    good = {v for v in verts if col(v) and inside(v)}
    start = [v for v in good if eligible(v, 0.0)]
    seen, queue = set(start), deque(start)
    while queue:
        v = queue.popleft()
        if eligible(v, float(w)):
            return True
        for u in nbrs(v):
            if u in good and u not in seen:
                seen.add(u)
                queue.append(u)
    return False


# -- passage times ------------------------------------------------------------------

def passage_relax(bits, x0, y0, src, dst, exterior_closed=False):
    """T(src, dst) by label-correcting sweeps until nothing changes.

    Paths stay in the window; with ``exterior_closed`` a closed collar of width
    one is added around it.
    """
    sites = all_sites(bits, x0, y0)
    omega = {v: int(bits[v[1] - y0, v[0] - x0]) for v in sites}
    if exterior_closed:
        for v in list(sites):
            for w in nbrs(v):
                if w not in omega:
                    omega[w] = 0
    inf = 10 ** 9
    dist = {v: inf for v in omega}
    dist[src] = omega[src]
    changed = True
    while changed:
        changed = False
        for v in omega:
            for w in nbrs(v):
                if w in omega and dist[v] + omega[w] < dist[w]:
                    dist[w] = dist[v] + omega[w]
                    changed = True
    return dist[dst]


def passage_paths(bits, x0, y0, src, dst):
    """T(src, dst) as a minimum over every self-avoiding path (tiny windows only)."""
    sites = all_sites(bits, x0, y0)
    omega = {v: int(bits[v[1] - y0, v[0] - x0]) for v in sites}
    best = [math.inf]
    on = {src}

    def go(v, t):
        if v == dst:
            best[0] = min(best[0], t)
            return
        for w in nbrs(v):
            if w in sites and w not in on:
                on.add(w)
                go(w, t + omega[w])
                on.discard(w)

    go(src, omega[src])
    return best[0]


# -- right-most paths ------------------------------------------------------------------

def _angle(d):
    px, py = planar(d)
    return math.atan2(py, px) % (2 * math.pi)


def right_fan(prev, v, nxt):
    """Neighbours of v met when sweeping counterclockwise from the edge back to prev to the edge to nxt."""
    back = _angle((prev[0] - v[0], prev[1] - v[1]))
    out = _angle((nxt[0] - v[0], nxt[1] - v[1]))
    span = (out - back) % (2 * math.pi)
    if span < 1e-9:
        span = 2 * math.pi
    fan = []
    for w in nbrs(v):
        a = (_angle((w[0] - v[0], w[1] - v[1])) - back) % (2 * math.pi)
        if 1e-9 < a < span - 1e-9:
            fan.append(w)
    return fan


def right_boundary(path):
    out = set()
    for i in range(1, len(path) - 1):
        out.update(right_fan(path[i - 1], path[i], path[i + 1]))
    return out


def is_rightmost(path):
    """Definition check: edge-simple, each interior vertex has a right neighbour, boundary avoids the path."""
    edges = list(zip(path, path[1:]))
    if len(set(edges)) != len(edges):
        return False
    if any(w not in nbrs(v) for v, w in edges):
        return False
    for i in range(1, len(path) - 1):
        if not right_fan(path[i - 1], path[i], path[i + 1]):
            return False
    return not (right_boundary(path) & set(path))


def b_bruteforce(bits, x0, y0, x, y, max_nodes=2_000_000):
    """min over open right-most paths x -> y of the open right-boundary count.

    Sites outside the window count as closed, so paths stay inside it while
    their right boundaries may leave it.  Validity of a prefix is necessary for
    every extension, so pruning on it is exhaustive.
    """
    op = open_sites(bits, x0, y0)
    if x == y:
        return 0
    best = [math.inf]
    nodes = [0]
    path = [x]
    used = set()

    def go():
        nodes[0] += 1
        if nodes[0] > max_nodes:
            raise RuntimeError("oracle budget exceeded")
        v = path[-1]
        for w in nbrs(v):
            if w not in op or (v, w) in used:
                continue
            cand = path + [w]
            if len(cand) >= 3:
                fan = right_fan(cand[-3], cand[-2], cand[-1])
                if not fan:
                    continue
            rb = right_boundary(cand)
            if rb & set(cand):
                continue
            if w == y:
                best[0] = min(best[0], len(rb & op))
            used.add((v, w))
            path.append(w)
            go()
            path.pop()
            used.discard((v, w))

    go()
    return best[0]


# -- boundary sets ----------------------------------------------------------------------

def outer_boundary(g):
    """Neighbours of g reachable from infinity without crossing g."""
    g = set(g)
    ring = {w for v in g for w in nbrs(v)} - g
    xs = [v[0] for v in g]
    ys = [v[1] for v in g]
    lo_x, hi_x, lo_y, hi_y = min(xs) - 2, max(xs) + 2, min(ys) - 2, max(ys) + 2
    start = (lo_x, lo_y)
    seen, queue = {start}, deque([start])
    while queue:
        v = queue.popleft()
        for w in nbrs(v):
            if lo_x <= w[0] <= hi_x and lo_y <= w[1] <= hi_y and w not in g and w not in seen:
                seen.add(w)
                queue.append(w)
    return ring & seen


def inner_boundary(g):
    g = set(g)
    out = outer_boundary(g)
    return {v for v in g if any(w in out for w in nbrs(v))}


# -- Cheeger -----------------------------------------------------------------------------

def cheeger_subsets(ground, ambient):
    """min |boundary H| / |H| over all nonempty H in ground with |H| <= |ground| / 2."""
    from fractions import Fraction
    ground = sorted(ground)
    ambient = set(ambient)
    best, arg = None, []
    for k in range(1, len(ground) // 2 + 1):
        for h in itertools.combinations(ground, k):
            hs = set(h)
            bd = {w for v in hs for w in nbrs(v) if w in ambient and w not in hs}
            r = Fraction(len(bd), k)
            if best is None or r < best:
                best, arg = r, [frozenset(hs)]
            elif r == best:
                arg.append(frozenset(hs))
    return best, arg


def cheeger_anchored(ambient, origin, n):
    """min over connected H containing origin with |H| <= n, by growing every connected set."""
    from fractions import Fraction
    ambient = set(ambient)
    best = [None]
    seen = set()
    frontier = [frozenset([origin])]
    while frontier:
        nxt = []
        for h in frontier:
            bd = {w for v in h for w in nbrs(v) if w in ambient and w not in h}
            r = Fraction(len(bd), len(h))
            if best[0] is None or r < best[0]:
                best[0] = r
            if len(h) < n:
                for w in bd:
                    g = h | {w}
                    if g not in seen:
                        seen.add(g)
                        nxt.append(g)
        frontier = nxt
    return best[0]


# -- convex geometry ---------------------------------------------------------------------

def wulff_radial(beta, phis, thetas):
    """Radial function of {x : x . u(theta) <= beta(theta) for all theta} by dense sampling."""
    phis = np.asarray(phis)[:, None]
    thetas = np.asarray(thetas)[None, :]
    c = np.cos(thetas - phis)
    b = np.array([beta(t) for t in thetas.ravel()])[None, :]
    r = np.where(c > 1e-12, b / np.where(c > 1e-12, c, 1.0), np.inf)
    return r.min(axis=1)


def polygon_radial(verts, phis):
    """Radial function of a star-shaped polygon around the origin by ray casting."""
    verts = np.asarray(verts, dtype=float)
    out = []
    for phi in phis:
        d = np.array([math.cos(phi), math.sin(phi)])
        best = math.inf
        for i in range(len(verts)):
            a, b = verts[i], verts[(i + 1) % len(verts)]
            e = b - a
            den = d[0] * (-e[1]) - d[1] * (-e[0])
            if abs(den) < 1e-15:
                continue
            t = (a[0] * (-e[1]) - a[1] * (-e[0])) / den
            s = (d[0] * a[1] - d[1] * a[0]) / den
            if t > 0 and -1e-12 <= s <= 1 + 1e-12:
                best = min(best, t)
        out.append(best)
    return np.array(out)


def shoelace(verts):
    v = np.asarray(verts, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def hexagon_wulff_vertices():
    """Wulff crystal of the unit-step lattice norm, derived by hand.

    The norm is 1 along the six lattice directions and the unit ball of the
    dual norm is the hexagon with vertices at the lattice directions' duals:
    supporting lines x . u_k = 1 for the six unit lattice vectors u_k meet at
    angles pi/6 + k pi/3 and distance 1 / cos(pi/6) = 2 / sqrt(3).
    """
    r = 2.0 / math.sqrt(3.0)
    return [(r * math.cos(math.pi / 6 + k * math.pi / 3), r * math.sin(math.pi / 6 + k * math.pi / 3))
            for k in range(6)]


def hausdorff_sampled(pa, pb):
    """Sup-norm Hausdorff distance between two dense point samples."""
    pa = np.asarray(pa)
    pb = np.asarray(pb)
    d = np.abs(pa[:, None, :] - pb[None, :, :]).max(axis=2)
    return max(d.min(axis=1).max(), d.min(axis=0).max())


def sample_polygon_boundary(verts, per_edge=200):
    v = np.asarray(verts, dtype=float)
    pts = []
    for i in range(len(v)):
        a, b = v[i], v[(i + 1) % len(v)]
        t = np.linspace(0, 1, per_edge, endpoint=False)[:, None]
        pts.append(a + t * (b - a))
    return np.concatenate(pts)


# -- box crossings --------------------------------------------------------------------------

def box_crossing_relax(bits, x0, y0, length, h, theta):
    """Least passage time of a left-right crossing of the tilted box from the origin.

    The box is {0 <= u <= length, |v| <= h} in coordinates rotated by theta.  A
    crossing is v0, v1..v_{k-1}, v_k with the middle vertices inside and the
    first and last edges meeting the left and right sides; every vertex counts.
    """
    eps = 1e-9
    c, s = math.cos(theta), math.sin(theta)
    omega = {v: int(bits[v[1] - y0, v[0] - x0]) for v in all_sites(bits, x0, y0)}

    def loc(v):
        px, py = planar(v)
        return px * c + py * s, -px * s + py * c

    def inside(v):
        u, w = loc(v)
        return -eps <= u <= length + eps and abs(w) <= h + eps

    def meets(a, b, level):
        (ua, va), (ub, vb) = loc(a), loc(b)
        if not min(ua, ub) - eps <= level <= max(ua, ub) + eps:
            return False
        if abs(ub - ua) < eps:
            return min(va, vb) <= h + eps and max(va, vb) >= -h - eps
        t = (level - ua) / (ub - ua)
        return abs(va + t * (vb - va)) <= h + eps

    best = math.inf
    ins = [v for v in omega if inside(v)]
    dist = {v: math.inf for v in ins}
    for v in omega:
        for w in nbrs(v):
            if w not in omega:
                continue
            if meets(v, w, 0.0) and meets(v, w, length):
                best = min(best, omega[v] + omega[w])
            if w in dist and meets(w, v, 0.0):
                dist[w] = min(dist[w], omega[v] + omega[w])
    changed = True
    while changed:
        changed = False
        for v in ins:
            for w in nbrs(v):
                if w in dist and dist[v] + omega[w] < dist[w]:
                    dist[w] = dist[v] + omega[w]
                    changed = True
    for v in ins:
        for w in nbrs(v):
            if w in omega and meets(v, w, length):
                best = min(best, dist[v] + omega[w])
    return best
