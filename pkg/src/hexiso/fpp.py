"""Bernoulli first-passage times, growth balls, box crossings, tau and N."""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import networkx as nx
import numpy as np
from scipy import ndimage

from . import lattice, percolation
from ._kernels import INF, trace_back, zero_one_search
from .lattice import OFFSETS, TiltedBox
from .percolation import HEX_STRUCTURE, Configuration


class PassageResult(NamedTuple):
    time: int
    geodesic: list
    explored: int


def resolve(config: Configuration, x):
    """Window vertex for an axial pair or the nearest vertex to a planar point."""
    if all(isinstance(c, (int, np.integer)) for c in x):
        v = (int(x[0]), int(x[1]))
    else:
        v = lattice.snap(float(x[0]), float(x[1]))
    if v not in config:
        raise KeyError(f"vertex {v} outside window {config.window}")
    return v


def passage_time(path, config: Configuration, multiset: bool = False) -> int:
    """Open vertices on the path; repeated vertices count once unless ``multiset``."""
    verts = [tuple(v) for v in path]
    if not multiset:
        verts = list(dict.fromkeys(verts))
    return sum(config.omega(v) for v in verts)


def _search(config: Configuration, sources, target=None):
    n = config.nx * config.ny
    cost = config.flat_open()
    init = np.full(n, INF, dtype=np.int64)
    for s in sources:
        i = config.index(s)
        init[i] = min(init[i], cost[i])
    allowed = np.ones(n, dtype=np.bool_)
    t = -1 if target is None else config.index(target)
    return zero_one_search(cost, allowed, init, config.nx, config.ny, t)


def first_passage(config: Configuration, x, y, exterior: bool | None = None) -> PassageResult:
    """Exact T(x, y) with a geodesic.

    By default paths stay inside the window.  ``exterior=False`` (``True``)
    extends the configuration by closed (open) sites everywhere outside it.
    """
    x = resolve(config, x)
    y = resolve(config, y)
    if exterior is not None:
        config = config.with_collar(bool(exterior))
    dist, parent, explored = _search(config, [x], y)
    t = config.index(y)
    geo = [config.vertex(i) for i in trace_back(parent, t)]
    return PassageResult(int(dist[t]), geo, int(explored))


def passage_field(config: Configuration, origin) -> np.ndarray:
    """T(origin, .) over the whole window, shaped like ``config.bits``."""
    dist, _, _ = _search(config, [resolve(config, origin)])
    return dist.reshape(config.ny, config.nx)


class Ball(NamedTuple):
    vertices: frozenset
    truncated: bool


def fpp_ball(config: Configuration, t: int, origin=(0, 0)) -> Ball:
    """Vertices within passage time ``t``; truncated if the ball reaches the window frame."""
    field_ = passage_field(config, origin)
    inside = field_ <= t
    rows, cols = np.nonzero(inside)
    verts = frozenset(zip((cols + config.x0).tolist(), (rows + config.y0).tolist()))
    return Ball(verts, bool((inside & config.frame_mask()).any()))


def crossing_box(x, h: float, origin=(0.0, 0.0)) -> TiltedBox:
    """The box of length |x| and half-height h pointing from ``origin`` along x."""
    return TiltedBox(tuple(map(float, origin)), math.hypot(x[0], x[1]), float(h),
                     math.atan2(x[1], x[0]) % (2 * math.pi))


def box_crossing_time(config: Configuration, x, h: float, origin=(0.0, 0.0)) -> PassageResult:
    """Least passage time over left-right crossings of the tilted box toward planar x."""
    box = crossing_box(x, h, origin)
    if not config.contains_box(box, margin=1.0):
        raise ValueError(f"box {box} not contained in window {config.window}")
    frame = percolation.box_frame(config, box, "lr")
    cost = frame.bits.astype(np.int64)
    total, path = percolation._box_search(config, frame, cost, np.ones(frame.shape, dtype=bool))
    if total is None:
        raise ValueError("box admits no crossing")
    return PassageResult(int(total), path, len(path))


def _crossing_network(config: Configuration, box: TiltedBox):
    """Unit vertex-capacity network whose S-T flows are disjoint open top-bottom crossings."""
    frame = percolation.box_frame(config, box, "tb")
    ny, nx_ = frame.shape
    openb = frame.bits
    inside = frame.inside & openb
    g = nx.DiGraph()
    src, snk = "S", "T"
    s_nodes, t_nodes = set(), set()
    for r, c in zip(*np.nonzero(openb)):
        g.add_edge(("i", int(r), int(c)), ("o", int(r), int(c)), capacity=1)
    for r, c in zip(*np.nonzero(inside)):
        r, c = int(r), int(c)
        for k, (dx, dy) in enumerate(OFFSETS):
            rr, cc = r + dy, c + dx
            if not (0 <= rr < ny and 0 <= cc < nx_) or not openb[rr, cc]:
                continue
            if inside[rr, cc]:
                g.add_edge(("o", r, c), ("i", rr, cc), capacity=1)
                continue
            # an outer neighbour is the first (last) vertex when the segment meets the top (bottom)
            if frame.start[k, r, c]:
                g.add_edge(("o", rr, cc), ("i", r, c), capacity=1)
                s_nodes.add((rr, cc))
            if frame.end[k, r, c]:
                g.add_edge(("o", r, c), ("i", rr, cc), capacity=1)
                t_nodes.add((rr, cc))
    # inside vertices lying on the top (bottom) side start (end) a crossing themselves
    px, py = config.coords()
    sub = (slice(frame.by0, frame.by0 + ny), slice(frame.bx0, frame.bx0 + nx_))
    _, v = box.local(px[sub], py[sub])
    on_top = inside & (np.abs(v - box.half_height) <= 1e-9)
    on_bot = inside & (np.abs(v + box.half_height) <= 1e-9)
    s_nodes.update(zip(*map(lambda a: a.tolist(), np.nonzero(on_top))))
    t_nodes.update(zip(*map(lambda a: a.tolist(), np.nonzero(on_bot))))
    if s_nodes & t_nodes:
        raise ValueError("box too thin: a vertex can both start and end a crossing")
    for r, c in s_nodes:
        g.add_edge(src, ("i", r, c), capacity=1)
    for r, c in t_nodes:
        g.add_edge(("o", r, c), snk, capacity=1)
    return g, src, snk


def disjoint_crossings(config: Configuration, box: TiltedBox) -> int:
    """Maximum number of vertex-disjoint open top-bottom crossings (max flow)."""
    if 2 * box.half_height <= 1.0 + 1e-9:
        raise ValueError("box height must exceed one lattice spacing")
    g, s, t = _crossing_network(config, box)
    if s not in g or t not in g:
        return 0
    return int(nx.maximum_flow_value(g, s, t))


def separating_circuits(config: Configuration, u, v) -> int:
    """N(u, v): disjoint open circuits separating u from v inside the window.

    Every site outside the window counts as closed, so circuits live inside
    the window.  With both endpoints forced closed, N equals the passage time.
    """
    u = resolve(config, u)
    v = resolve(config, v)
    if u == v:
        raise ValueError("u and v must differ")
    cfg = config.with_states({u: False, v: False})
    return first_passage(cfg, u, v, exterior=False).time


def _closed_cluster(bits: np.ndarray, r: int, c: int) -> np.ndarray:
    labels, _ = ndimage.label(~bits, structure=HEX_STRUCTURE)
    return labels == labels[r, c]


def _fill(mask: np.ndarray) -> np.ndarray:
    """The set together with every region it cuts off from the array frame."""
    outside, _ = ndimage.label(~mask, structure=HEX_STRUCTURE)
    frame_labels = set(np.unique(np.concatenate([outside[0], outside[-1], outside[:, 0], outside[:, -1]]))) - {0}
    escaped = np.isin(outside, list(frame_labels))
    return ~escaped


def separating_circuits_peel(config: Configuration, u, v) -> int:
    """N(u, v) by repeatedly closing the innermost open ring around one endpoint."""
    u = resolve(config, u)
    v = resolve(config, v)
    cfg = config.with_states({u: False, v: False}).with_collar(False)
    bits = cfg.bits.copy()
    a = (u[1] - cfg.y0, u[0] - cfg.x0)
    b = (v[1] - cfg.y0, v[0] - cfg.x0)
    count = 0
    swapped = False
    while True:
        c = _closed_cluster(bits, *a)
        if c[b]:
            return count
        filled = _fill(c)
        if filled[b]:
            if swapped:
                raise RuntimeError("each endpoint's closed cluster encloses the other")
            a, b = b, a
            swapped = True
            continue
        swapped = False
        ring = ndimage.binary_dilation(filled, structure=HEX_STRUCTURE) & ~filled
        if not bits[ring].all():
            raise RuntimeError("ring around a closed cluster must be open")
        bits[ring] = False
        count += 1


# -- Monte Carlo ----------------------------------------------------------------

@dataclass
class NormSample:
    kind: str
    p: float
    theta: float
    n: int
    reps: int
    mean: float
    stderr: float
    seed: int
    values: list = field(default_factory=list, repr=False)
    extra: dict = field(default_factory=dict)

    def record(self) -> dict:
        rec = {"kind": self.kind, "p": self.p, "theta": self.theta, "n": self.n,
               "reps": self.reps, "mean": self.mean, "stderr": self.stderr, "seed": self.seed}
        rec.update({k: v for k, v in self.extra.items() if not k.startswith("_")})
        return rec

    def to_json(self) -> str:
        return json.dumps(self.record(), sort_keys=True)


def mean_stderr(values):
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return float("nan"), float("nan")
    se = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return float(arr.mean()), se


def segment_window(n: int, theta: float, pad: float):
    """Axial window around the segment from 0 to n e^{i theta}, padded by ``pad``."""
    ex, ey = n * math.cos(theta), n * math.sin(theta)
    return percolation.window_for(min(0.0, ex) - pad, max(0.0, ex) + pad,
                                  min(0.0, ey) - pad, max(0.0, ey) + pad, pad=1)


def mu_estimate(p: float, theta: float, n: int, reps: int, seed: int,
                pad: float | None = None) -> NormSample:
    """Mean of T(0, n e^{i theta}) / n over independent windows."""
    if not 0.5 <= p <= 1.0:
        raise ValueError("p must lie in [0.5, 1]")
    if n < 16:
        raise ValueError("n must be at least 16")
    pad = float(n) if pad is None else pad
    window = segment_window(n, theta, pad)
    target = (n * math.cos(theta), n * math.sin(theta))
    vals = []
    for r in range(reps):
        cfg = percolation.sample(window, p, seed, r)
        vals.append(first_passage(cfg, (0, 0), resolve(cfg, target)).time / n)
    m, se = mean_stderr(vals)
    return NormSample("mu", p, theta, n, reps, m, se, seed, vals)
