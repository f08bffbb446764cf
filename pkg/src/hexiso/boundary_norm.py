"""Right-boundary distance b(x, y): exact search, upper constructions, beta estimates."""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from . import fpp, lattice, percolation, rightmost
from ._kernels import bounded_bfs_all
from .lattice import OrientedEdge, TiltedBox, direction, right_boundary_dirs, step
from .percolation import HEX_STRUCTURE, Configuration, ProxyUndefined
from .rightmost import Interface, RightMostPath


class BudgetExceeded(RuntimeError):
    def __init__(self, bracket):
        super().__init__(f"search budget exhausted; best bracket {bracket.lower}..{bracket.upper}")
        self.bracket = bracket


class EventFailure(RuntimeError):
    """A good event needed by the bypass construction failed; resample."""

    def __init__(self, event: str, detail: str = ""):
        super().__init__(f"event {event} failed" + (f": {detail}" if detail else ""))
        self.event = event


@dataclass
class BoundaryBracket:
    lower: int
    upper: Optional[int]
    exact: Optional[int] = None
    witness: Optional[RightMostPath] = None
    nodes: int = 0

    @property
    def width(self):
        return None if self.upper is None else self.upper - self.lower

    @property
    def midpoint(self):
        if self.exact is not None:
            return float(self.exact)
        return None if self.upper is None else 0.5 * (self.lower + self.upper)


def closed_extension(config: Configuration) -> Configuration:
    """The window surrounded by one row of closed sites (everything outside counts as closed)."""
    return config.with_collar(False)


def _require_open_pair(config: Configuration, x, y):
    x = fpp.resolve(config, x)
    y = fpp.resolve(config, y)
    if not (config.is_open(x) and config.is_open(y)):
        raise ValueError("both endpoints must be open")
    if percolation.chemical_distance(config, x, y) == math.inf:
        raise ValueError(f"{x} and {y} are not connected by an open path")
    return x, y


def witness_ok(path: RightMostPath, config: Configuration, x, y) -> bool:
    """Open, right-most, from x to y, inside the window."""
    verts = path.vertices
    if verts[0] != tuple(x) or verts[-1] != tuple(y):
        return False
    if not rightmost.is_rightmost(verts, False, allow_reversal=True):
        return False
    return all(v in config and config.is_open(v) for v in verts)


def b_value(path: RightMostPath, config: Configuration) -> int:
    """Open right-boundary vertices, sites outside the window counting as closed."""
    return sum(config.omega(w) for w in rightmost.boundary_set(path) if w in config)


# -- exact search -----------------------------------------------------------------

def b_exact(config: Configuration, x, y, budget: int = 200_000, vertex_simple: bool = False,
            allow_reversal: bool = True, upper_hint: bool = True) -> BoundaryBracket:
    """min b(gamma) over open right-most paths x -> y inside the window.

    Sites outside the window count as closed.  Depth-first branch and bound:
    a partial path ending at w can only be completed to a path with
    b >= T(w, y) - 2, because the right boundary of the remainder together with
    w and y links w to y; b also never decreases as the path grows.  Raises :class:`BudgetExceeded` (carrying the best bracket) when
    more than ``budget`` extensions are tried.
    """
    x, y = _require_open_pair(config, x, y)
    config = closed_extension(config)
    t_to_y = fpp.passage_field(config, y)
    t_xy = int(t_to_y[x[1] - config.y0, x[0] - config.x0])
    lower = max(0, t_xy - 2)
    best = [math.inf, None]
    if upper_hint:
        hug = _hug(config, x, y)
        if hug is not None:
            best = [rightmost.b_count(hug, config), hug.vertices]
            if best[0] <= lower:
                return BoundaryBracket(lower, best[0], best[0], hug, 0)
    if x == y:
        return BoundaryBracket(0, 0, 0, RightMostPath([x], False), 0)

    bits = config.bits
    x0, y0, nx, ny = config.window

    def inwin(v):
        return 0 <= v[0] - x0 < nx and 0 <= v[1] - y0 < ny

    def is_open(v):
        return bits[v[1] - y0, v[0] - x0]

    def tval(v):
        return int(t_to_y[v[1] - y0, v[0] - x0])

    path = [x]
    on_path = {x: 1}
    used = set()
    bmult: dict = {}
    state = {"open": 0, "nodes": 0}

    def moves(v, prev):
        out = []
        for k in range(6):
            w = step(v, k)
            if not inwin(w) or not is_open(w) or (v, w) in used or w in bmult:
                continue
            if vertex_simple and w in on_path:
                continue
            fan = ()
            if prev is not None:
                d_in = direction(v, prev)
                if k == d_in and not allow_reversal:
                    continue
                fan = tuple(step(v, j) for j in right_boundary_dirs(d_in, k, reversal=True))
                if not fan:
                    continue
                if any((not inwin(f)) or f in on_path or f == w for f in fan):
                    continue
            out.append((tval(w), k, w, fan))
        out.sort()
        return out

    limit = max(sys.getrecursionlimit(), 4 * nx * ny * 6 + 100)
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(limit)

    def dfs(v, prev):
        for tw, _, w, fan in moves(v, prev):
            state["nodes"] += 1
            if state["nodes"] > budget:
                raise _Stop()
            added_open = 0
            for f in fan:
                c = bmult.get(f, 0)
                if c == 0 and is_open(f):
                    added_open += 1
                bmult[f] = c + 1
            state["open"] += added_open
            used.add((v, w))
            on_path[w] = on_path.get(w, 0) + 1
            path.append(w)
            lb = max(state["open"], tw - 2, lower)
            if lb < best[0]:
                if w == y:
                    best[0] = state["open"]
                    best[1] = tuple(path)
                if best[0] > lower and (w != y or not vertex_simple):
                    dfs(w, v)
            path.pop()
            on_path[w] -= 1
            if on_path[w] == 0:
                del on_path[w]
            used.discard((v, w))
            state["open"] -= added_open
            for f in fan:
                bmult[f] -= 1
                if bmult[f] == 0:
                    del bmult[f]
            if best[0] <= lower:
                return

    try:
        dfs(x, None)
    except _Stop:
        wit = None if best[1] is None else RightMostPath(best[1], False, allow_reversal=True)
        up = None if best[1] is None else int(best[0])
        raise BudgetExceeded(BoundaryBracket(lower, up, None, wit, state["nodes"])) from None
    finally:
        sys.setrecursionlimit(old_limit)
    if best[1] is None:
        raise ValueError("no open right-most path between the endpoints")
    wit = RightMostPath(best[1], False, allow_reversal=True)
    return BoundaryBracket(lower, int(best[0]), int(best[0]), wit, state["nodes"])


class _Stop(Exception):
    pass


# -- interface tracing --------------------------------------------------------------

def _trace_arc(member, start: OrientedEdge, target, max_steps: int):
    """Walk the boundary of the set ``member`` (kept on the left) from ``start``.

    Returns the edges strictly after the last run with left hexagon
    ``start.tail`` and strictly before the first run with left hexagon
    ``target``; None if the walk closes up without meeting ``target``.
    """
    src = start.tail
    arc = []
    e = start
    for _ in range(max_steps):
        u, k = e
        w = step(u, k + 1)
        e = OrientedEdge(u, (k + 1) % 6) if not member(w) else OrientedEdge(w, (k - 1) % 6)
        if e == start:
            return None
        if e.tail == target:
            return arc
        if e.tail == src:
            arc = []
        else:
            arc.append(e)
    return None


def _arc_to_path(arc, x, y) -> Optional[RightMostPath]:
    if not arc:
        return RightMostPath([x, y], False) if lattice.adjacent(x, y) else None
    try:
        p = rightmost.path_of_interface(Interface(tuple(arc), False))
    except rightmost.InvalidInterface:
        return None
    if p.start != tuple(x) or p.end != tuple(y):
        return None
    return p


def b_upper_hug(config: Configuration, x, y) -> Optional[RightMostPath]:
    """Open right-most path x -> y with b <= T(x, y) - 2, or None.

    The interior of a geodesic is declared closed; the right-most path hugging
    the open cluster of x along that closed chain has only geodesic vertices as
    open right-boundary vertices.  Sites outside the window count as closed.
    """
    x = fpp.resolve(config, x)
    y = fpp.resolve(config, y)
    return _hug(closed_extension(config), x, y)


def _hug(config: Configuration, x, y) -> Optional[RightMostPath]:
    if x == y or not (config.is_open(x) and config.is_open(y)):
        return None
    if lattice.adjacent(x, y):
        return RightMostPath([x, y], False)
    geo = fpp.first_passage(config, x, y).geodesic
    bits = config.bits.copy()
    for v in geo[1:-1]:
        bits[v[1] - config.y0, v[0] - config.x0] = False
    labels, _ = ndimage.label(bits, structure=HEX_STRUCTURE)
    lab = labels[x[1] - config.y0, x[0] - config.x0]
    if labels[y[1] - config.y0, y[0] - config.x0] != lab:
        return None
    x0, y0, nx, ny = config.window

    def member(v):
        c, r = v[0] - x0, v[1] - y0
        return 0 <= c < nx and 0 <= r < ny and labels[r, c] == lab

    start = OrientedEdge(x, direction(x, geo[1]))
    arc = _trace_arc(member, start, y, 12 * nx * ny)
    if arc is None:
        return None
    return _arc_to_path(arc, x, y)


def b_bracket(config: Configuration, x, y, budget: int = 0) -> BoundaryBracket:
    """lower = max(0, T - 2); upper from the hugging path; exact when the budget allows."""
    x, y = _require_open_pair(config, x, y)
    ext = closed_extension(config)
    t = fpp.first_passage(ext, x, y).time
    lower = max(0, t - 2)
    hug = _hug(ext, x, y)
    up = None if hug is None else rightmost.b_count(hug, ext)
    br = BoundaryBracket(lower, up, None, hug)
    if up is not None and up == lower:
        br.exact = up
        return br
    if budget > 0:
        try:
            ex = b_exact(config, x, y, budget=budget)
            br.exact, br.witness, br.nodes = ex.exact, ex.witness, ex.nodes
            br.upper = ex.exact if br.upper is None else min(br.upper, ex.exact)
        except BudgetExceeded as exc:
            if exc.bracket.upper is not None and (br.upper is None or exc.bracket.upper < br.upper):
                br.upper, br.witness = exc.bracket.upper, exc.bracket.witness
    return br


# -- bypass construction ------------------------------------------------------------

def _rot(theta: float, u: float, v: float):
    c, s = math.cos(theta), math.sin(theta)
    return (u * c - v * s, u * s + v * c)


def frame_box(theta: float, a: float, b: float, c: float, d: float) -> TiltedBox:
    """The rectangle [a, b] x [c, d] of the frame rotated by ``theta``."""
    return TiltedBox(_rot(theta, a, 0.5 * (c + d)), b - a, 0.5 * (d - c), theta)


@dataclass
class BypassResult:
    path: RightMostPath
    b: int
    bound: int            # T(gamma'') - 2 + 5 D_L + 5 D_R + 16
    t_geodesic: int       # T(gamma''), the passage time of the geodesic piece
    d_left: int
    d_right: int
    anchors: tuple        # (a1, a4)
    diameter: int         # largest chemical distance seen in the F check


def _first_index(seq, members, lo=0, hi=None):
    hi = len(seq) if hi is None else hi
    for i in range(lo, hi):
        if seq[i] in members:
            return i
    return None


def _last_index(seq, members, lo=0, hi=None):
    hi = len(seq) if hi is None else hi
    for i in range(hi - 1, lo - 1, -1):
        if seq[i] in members:
            return i
    return None


def _check_diameter(config: Configuration, proxy, centre, s: float, limit: float) -> int:
    """Largest chemical distance between proxy vertices of the square of radius s at centre."""
    box = lattice.axis_box(centre[0] - s, centre[0] + s, centre[1] - s, centre[1] + s)
    px, py = config.coords()
    targets = proxy.mask & box.contains(px, py)
    if not targets.any():
        raise EventFailure("F", f"no cluster vertex near {centre}")
    sources = np.flatnonzero(targets.ravel()).astype(np.int64)
    worst = bounded_bfs_all(config.bits.ravel(), sources, targets.ravel(),
                            config.nx, config.ny, int(math.floor(limit)))
    if worst < 0:
        raise EventFailure("F", f"chemical distance above {limit:.1f} near {centre}")
    return int(worst)


def b_upper_bypass(config: Configuration, n: int, theta: float = 0.0, proxy=None,
                   C: float = 3.0) -> BypassResult:
    """Open right-most path between the cluster points near 0 and n e^{i theta}.

    Three open crossings (up the left end, along a strip above the segment,
    down the right end) bypass a box geodesic from above; the path hugging
    the open cluster of the bypass with the geodesic interior closed has
    b <= T(geodesic piece) - 2 + 5 D_L + 5 D_R + 16.  Raises
    :class:`EventFailure` when a needed good event fails.
    """
    s = math.sqrt(n)
    if proxy is None:
        proxy = percolation.infinite_cluster_proxy(config, lattice.square(n))
    g1 = frame_box(theta, 0, s, -s, 3 * s)
    g2 = frame_box(theta, 0, n, 2 * s, 3 * s)
    g3 = frame_box(theta, n - s, n, -s, 3 * s)
    for box, orient in ((g1, "bt"), (g2, "lr"), (g3, "tb")):
        labs = percolation.crossing_clusters(config, box, proxy.labels, True, orient)
        if not labs or labs != {proxy.label}:
            raise EventFailure("A", f"crossing of {orient} box not carried by the cluster")
    end = _rot(theta, n, 0.0)
    _check = dict(limit=2 * C * s)
    diam = max(_check_diameter(config, proxy, (0.0, 0.0), s, **_check),
               _check_diameter(config, proxy, end, s, **_check))

    gam1 = percolation.find_crossing(config, g1, True, "bt")
    gam2 = percolation.find_crossing(config, g2, True, "lr")
    gam3 = percolation.find_crossing(config, g3, True, "tb")
    geo = fpp.box_crossing_time(config, end, s).geodesic
    on_geo = {v: i for i, v in enumerate(geo)}
    on2 = {v: i for i, v in enumerate(gam2)}

    i2 = _first_index(gam1, on2)
    i1 = None if i2 is None else _last_index(gam1, on_geo, 0, i2)
    j3 = _last_index(gam3, on2)
    j4 = None if j3 is None else _first_index(gam3, on_geo, j3 + 1)
    if i1 is None or j4 is None:
        raise EventFailure("A", "crossings do not meet the geodesic in order")
    a1, a2, a3, a4 = gam1[i1], gam1[i2], gam3[j3], gam3[j4]
    k2, k3 = on2[a2], on2[a3]
    g1i, g4i = on_geo[a1], on_geo[a4]
    if k2 > k3 or g1i >= g4i:
        raise EventFailure("A", "crossings meet in the wrong order")
    upper = list(gam1[i1:i2 + 1]) + list(gam2[k2 + 1:k3 + 1]) + list(gam3[j3 + 1:j4 + 1])
    lower_piece = geo[g1i:g4i + 1]
    if len(set(upper)) != len(upper) or set(upper) & set(lower_piece) != {a1, a4}:
        raise EventFailure("A", "bypass and geodesic overlap")

    # region enclosed by the circuit, on a sub-block around it
    circ = upper + lower_piece[-2:0:-1]
    xs = [v[0] for v in circ]
    ys = [v[1] for v in circ]
    bx0, by0 = min(xs) - 2, min(ys) - 2
    bnx, bny = max(xs) - bx0 + 3, max(ys) - by0 + 3
    ring = np.zeros((bny, bnx), dtype=bool)
    for v in circ:
        ring[v[1] - by0, v[0] - bx0] = True
    region = fpp._fill(ring)
    sub = np.zeros((bny, bnx), dtype=bool)
    r0, c0 = by0 - config.y0, bx0 - config.x0
    if r0 < 0 or c0 < 0 or r0 + bny > config.ny or c0 + bnx > config.nx:
        raise ValueError("construction leaves the window")
    sub[:] = config.bits[r0:r0 + bny, c0:c0 + bnx]
    for v in lower_piece[1:-1]:
        sub[v[1] - by0, v[0] - bx0] = False
    labels, _ = ndimage.label(sub & region, structure=HEX_STRUCTURE)
    lab = labels[a1[1] - by0, a1[0] - bx0]
    if lab == 0 or labels[a4[1] - by0, a4[0] - bx0] != lab:
        raise RuntimeError("bypass does not link the anchors")

    def member(v):
        c, r = v[0] - bx0, v[1] - by0
        return 0 <= c < bnx and 0 <= r < bny and labels[r, c] == lab

    if lattice.adjacent(a1, a4):
        hat = RightMostPath([a1, a4], False)
    else:
        arc = _trace_arc(member, OrientedEdge(a1, direction(a1, lower_piece[1])), a4,
                         12 * bnx * bny)
        hat = None if arc is None else _arc_to_path(arc, a1, a4)
    if hat is None:
        raise RuntimeError("hugging arc could not be traced")

    x_t = percolation.nearest_in_cluster(config, proxy, (0.0, 0.0))
    y_t = percolation.nearest_in_cluster(config, proxy, end)
    left = percolation.shortest_open_path(config, x_t, a1)
    right = percolation.shortest_open_path(config, a4, y_t)
    if left is None or right is None:
        raise EventFailure("A", "anchors not linked to the cluster points")
    path = hat
    if len(left) > 1:
        path = rightmost.star_concat(RightMostPath(left, False, allow_reversal=True), path,
                                     allow_reversal=True)
    if len(right) > 1:
        path = rightmost.star_concat(path, RightMostPath(right, False, allow_reversal=True),
                                     allow_reversal=True)
    t_geo = fpp.passage_time(lower_piece, config)
    b = b_value(path, config)
    bound = t_geo - 2 + 5 * (len(left) - 1) + 5 * (len(right) - 1) + 16
    if b > bound:
        raise RuntimeError(f"bypass path exceeds its bound: {b} > {bound}")
    return BypassResult(path, b, bound, t_geo, len(left) - 1, len(right) - 1, (a1, a4), diam)


# -- Monte Carlo ----------------------------------------------------------------

def beta_window(n: int, pad_factor: float = 4.0):
    half = (1.0 + pad_factor) * n
    return percolation.window_for(-half, half, -half, half, pad=1)


def _one_replica(cfg: Configuration, n: int, theta: float, pad_factor: float, use_bypass: bool):
    """(bracket, T(0, n e^{i theta}), method) on one configuration."""
    proxy = percolation.infinite_cluster_proxy(cfg, lattice.square(n), pad_factor)
    end = _rot(theta, n, 0.0)
    x = percolation.nearest_in_cluster(cfg, proxy, (0.0, 0.0))
    y = percolation.nearest_in_cluster(cfg, proxy, end)
    ext = closed_extension(cfg)
    t_xy = fpp.first_passage(ext, x, y).time
    br = BoundaryBracket(max(0, t_xy - 2), None)
    method = "hug"
    hug = _hug(ext, x, y) if x != y else RightMostPath([x], False)
    if hug is not None:
        br.upper, br.witness = b_value(hug, cfg), hug
    if br.upper is None and use_bypass:
        res = b_upper_bypass(cfg, n, theta, proxy)
        br.upper, br.witness, method = res.b, res.path, "bypass"
    if br.upper is None:
        raise EventFailure("upper", "no upper construction succeeded")
    if br.upper == br.lower:
        br.exact = br.upper
    t0n = fpp.first_passage(cfg, (0, 0), fpp.resolve(cfg, end)).time
    return br, t0n, method


def beta_estimate(p: float, theta: float, n: int, reps: int, seed: int, pad_factor: float = 4.0,
                  use_bypass: bool = True, max_failures: int | None = None, paired: bool = False):
    """Mean of b(0~, n~) / n, with 0~ and n~ the nearest cluster points.

    b is bracketed between T - 2 and the hugging path; the midpoint is used.
    Replicas with an undefined proxy or a failed construction are replaced by
    fresh ones and counted.  With ``paired`` a matching sample of
    T(0, n e^{i theta}) / n from the same configurations is returned too.
    """
    if not 0.5 < p <= 1.0:
        raise ValueError("p must lie in (1/2, 1]")
    if n < 16:
        raise ValueError("n must be at least 16")
    max_failures = 4 * reps if max_failures is None else max_failures
    window = beta_window(n, pad_factor)
    mids, lows, highs, mus, methods = [], [], [], [], []
    failures = {}
    replica = 0
    while len(mids) < reps:
        if sum(failures.values()) > max_failures:
            raise RuntimeError(f"too many failed replicas: {failures}")
        cfg = percolation.sample(window, p, seed, replica)
        replica += 1
        try:
            br, t0n, method = _one_replica(cfg, n, theta, pad_factor, use_bypass)
        except ProxyUndefined:
            failures["proxy"] = failures.get("proxy", 0) + 1
            continue
        except EventFailure as exc:
            failures[exc.event] = failures.get(exc.event, 0) + 1
            continue
        mids.append(br.midpoint / n)
        lows.append(br.lower / n)
        highs.append(br.upper / n)
        mus.append(t0n / n)
        methods.append(method)
    m, se = fpp.mean_stderr(mids)
    extra = {"lower_mean": float(np.mean(lows)), "upper_mean": float(np.mean(highs)),
             "width_mean": float(np.mean(highs) - np.mean(lows)), "failures": failures,
             "replicas_drawn": replica, "bypass_used": methods.count("bypass"),
             "pad_factor": pad_factor, "_lower_values": lows, "_upper_values": highs}
    beta = fpp.NormSample("beta", p, theta, n, reps, m, se, seed, mids, extra)
    if not paired:
        return beta
    mm, mse = fpp.mean_stderr(mus)
    return beta, fpp.NormSample("mu", p, theta, n, reps, mm, mse, seed, mus, {"paired": True})


def norm_compare(p: float, theta: float, n: int, reps: int, seed: int, pad_factor: float = 4.0) -> dict:
    """Paired mu and beta estimates with the difference and its standard error."""
    beta, mu = beta_estimate(p, theta, n, reps, seed, pad_factor, paired=True)
    diff = np.asarray(beta.values) - np.asarray(mu.values)
    d, dse = fpp.mean_stderr(diff)
    combined = math.hypot(beta.stderr, mu.stderr)
    return {"mu": mu, "beta": beta, "diff": d, "diff_stderr": dse, "combined_stderr": combined,
            "agree_3se": bool(abs(d) <= 3 * combined)}
