"""Seeded Bernoulli site configurations on axial windows, clusters and crossings."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from . import lattice
from ._kernels import INF, trace_back, zero_one_search
from .lattice import OFFSETS, TiltedBox

GENERATOR_ID = "philox-ss1"

# 6-neighbour adjacency as an ndimage structure indexed [dy + 1, dx + 1]
HEX_STRUCTURE = np.array([[0, 1, 1],
                          [1, 1, 1],
                          [1, 1, 0]], dtype=bool)


class ProxyUndefined(RuntimeError):
    """No unique window-spanning open cluster; resample or enlarge the window."""


class DumpFormatError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def make_rng(seed: int, replica: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(replica)])))


def window_for(xmin: float, xmax: float, ymin: float, ymax: float, pad: int = 1):
    """Axial window (x0, y0, nx, ny) covering a planar rectangle plus ``pad`` rows."""
    return lattice.axial_range(xmin, xmax, ymin, ymax, pad=pad)


@dataclass(frozen=True, eq=False)
class Configuration:
    """Open/closed states on the axial window ``[x0, x0+nx) x [y0, y0+ny)``.

    ``bits[row, col]`` is the state of vertex ``(x0 + col, y0 + row)``.
    """

    x0: int
    y0: int
    bits: np.ndarray
    p: float = float("nan")
    seed: int = 0
    generator: str = GENERATOR_ID
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=bool)
        if bits.ndim != 2 or bits.size == 0:
            raise ValueError("configuration window must be a non-empty 2-d array")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def ny(self) -> int:
        return self.bits.shape[0]

    @property
    def nx(self) -> int:
        return self.bits.shape[1]

    @property
    def window(self):
        return (self.x0, self.y0, self.nx, self.ny)

    def __contains__(self, v) -> bool:
        return 0 <= v[0] - self.x0 < self.nx and 0 <= v[1] - self.y0 < self.ny

    def index(self, v) -> int:
        if v not in self:
            raise KeyError(f"vertex {tuple(v)} outside window {self.window}")
        return (v[1] - self.y0) * self.nx + (v[0] - self.x0)

    def vertex(self, idx: int):
        row, col = divmod(int(idx), self.nx)
        return (self.x0 + col, self.y0 + row)

    def is_open(self, v) -> bool:
        if v not in self:
            raise KeyError(f"vertex {tuple(v)} outside window {self.window}")
        return bool(self.bits[v[1] - self.y0, v[0] - self.x0])

    def omega(self, v) -> int:
        return int(self.is_open(v))

    def coords(self):
        """Planar coordinates of every window vertex, each shaped like ``bits``."""
        if "coords" not in self._cache:
            ys, xs = np.mgrid[self.y0:self.y0 + self.ny, self.x0:self.x0 + self.nx]
            self._cache["coords"] = lattice.embed_many(xs, ys)
        return self._cache["coords"]

    def flat_open(self) -> np.ndarray:
        if "flat" not in self._cache:
            self._cache["flat"] = self.bits.ravel().astype(np.int64)
        return self._cache["flat"]

    def with_states(self, states: dict) -> "Configuration":
        bits = self.bits.copy()
        for v, s in states.items():
            if v not in self:
                raise KeyError(f"vertex {tuple(v)} outside window {self.window}")
            bits[v[1] - self.y0, v[0] - self.x0] = bool(s)
        return Configuration(self.x0, self.y0, bits, self.p, self.seed, self.generator)

    def with_collar(self, state: bool = False, width: int = 1) -> "Configuration":
        """The same configuration surrounded by ``width`` rows of constant state."""
        bits = np.pad(self.bits, width, constant_values=state)
        return Configuration(self.x0 - width, self.y0 - width, bits, self.p, self.seed, self.generator)

    def frame_mask(self) -> np.ndarray:
        m = np.zeros(self.bits.shape, dtype=bool)
        m[0, :] = m[-1, :] = m[:, 0] = m[:, -1] = True
        return m

    def contains_planar(self, px: float, py: float, margin: float = 0.0) -> bool:
        ax, ay = lattice.to_axial(px, py)
        return (self.x0 + margin <= ax <= self.x0 + self.nx - 1 - margin
                and self.y0 + margin <= ay <= self.y0 + self.ny - 1 - margin)

    def contains_box(self, box: TiltedBox, margin: float = 0.0) -> bool:
        return all(self.contains_planar(cx, cy, margin) for cx, cy in box.corners())

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return (self.window == other.window and np.array_equal(self.bits, other.bits)
                and (self.p == other.p or (math.isnan(self.p) and math.isnan(other.p)))
                and self.seed == other.seed and self.generator == other.generator)

    __hash__ = None


def from_vertices(open_vertices, window, p: float = float("nan"), seed: int = 0) -> Configuration:
    """Hand-built configuration: the listed vertices open, everything else closed."""
    x0, y0, nx, ny = window
    bits = np.zeros((ny, nx), dtype=bool)
    for x, y in open_vertices:
        bits[y - y0, x - x0] = True
    return Configuration(x0, y0, bits, p, seed, "manual")


def sample(window, p: float, seed: int, replica: int = 0) -> Configuration:
    """I.i.d. Bernoulli(p) open marks on ``window``.

    ``window`` is an axial tuple ``(x0, y0, nx, ny)`` or a :class:`TiltedBox`
    (covered with a one-row margin).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if isinstance(window, TiltedBox):
        window = window_for(*window.planar_bounds(), pad=1)
    x0, y0, nx, ny = (int(w) for w in window)
    if nx <= 0 or ny <= 0:
        raise ValueError("empty window")
    bits = make_rng(seed, replica).random((ny, nx)) < p
    return Configuration(x0, y0, bits, float(p), int(seed), GENERATOR_ID)


# -- clusters ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClusterLabels:
    """Component labels of one colour; label 0 marks vertices of the other colour."""

    labels: np.ndarray
    sizes: np.ndarray          # sizes[label], sizes[0] == 0
    extents: np.ndarray        # per label: (col_min, col_max, row_min, row_max)
    spanning: np.ndarray       # per label: touches all four window sides

    @property
    def count(self) -> int:
        return len(self.sizes) - 1

    def mask(self, label: int) -> np.ndarray:
        return self.labels == label


def label_clusters(config: Configuration, color: bool = True) -> ClusterLabels:
    mask = config.bits if color else ~config.bits
    labels, count = ndimage.label(mask, structure=HEX_STRUCTURE)
    sizes = np.bincount(labels.ravel(), minlength=count + 1)
    sizes[0] = 0
    extents = np.zeros((count + 1, 4), dtype=np.int64)
    spanning = np.zeros(count + 1, dtype=bool)
    if count:
        for lab, sl in enumerate(ndimage.find_objects(labels), start=1):
            rows, cols = sl
            extents[lab] = (cols.start, cols.stop - 1, rows.start, rows.stop - 1)
        spanning[1:] = ((extents[1:, 0] == 0) & (extents[1:, 1] == config.nx - 1)
                        & (extents[1:, 2] == 0) & (extents[1:, 3] == config.ny - 1))
    return ClusterLabels(labels, sizes, extents, spanning)


@dataclass(frozen=True, eq=False)
class Proxy:
    """Stand-in for the infinite open cluster inside a finite window."""

    config: Configuration
    label: int
    mask: np.ndarray           # proxy cluster, window-shaped
    labels: np.ndarray         # open-cluster labels of the whole window
    inner: frozenset           # largest component of proxy cluster within the inner box
    inner_box: TiltedBox
    inner_count: int           # lattice vertices of the inner box

    def __contains__(self, v) -> bool:
        return v in self.config and bool(self.mask[v[1] - self.config.y0, v[0] - self.config.x0])


def infinite_cluster_proxy(config: Configuration, inner_box: TiltedBox,
                           pad_factor: float = 4.0) -> Proxy:
    """The unique open cluster spanning the window in both axial directions.

    The window has to contain ``inner_box`` enlarged by ``pad_factor`` times the
    box half-extent on every side.
    """
    xmin, xmax, ymin, ymax = inner_box.planar_bounds()
    half = max(xmax - xmin, ymax - ymin) / 2.0
    pad = pad_factor * half
    padded = lattice.axis_box(xmin - pad, xmax + pad, ymin - pad, ymax + pad)
    if not config.contains_box(padded):
        raise ValueError(f"window {config.window} lacks the required padding {pad:g} around the inner box")
    cl = label_clusters(config, True)
    span = np.nonzero(cl.spanning)[0]
    if len(span) != 1:
        raise ProxyUndefined(f"{len(span)} spanning open clusters")
    lab = int(span[0])
    mask = cl.labels == lab
    px, py = config.coords()
    in_box = inner_box.contains(px, py)
    sub, count = ndimage.label(mask & in_box, structure=HEX_STRUCTURE)
    inner: frozenset = frozenset()
    if count:
        sizes = np.bincount(sub.ravel())
        sizes[0] = 0
        rows, cols = np.nonzero(sub == int(np.argmax(sizes)))
        inner = frozenset(zip((cols + config.x0).tolist(), (rows + config.y0).tolist()))
    return Proxy(config, lab, mask, cl.labels, inner, inner_box, int(in_box.sum()))


def nearest_in_cluster(config: Configuration, cluster, point) -> tuple[int, int]:
    """Vertex of ``cluster`` nearest to ``point`` in the sup-norm.

    ``cluster`` is a window-shaped mask, a :class:`Proxy`, or an iterable of
    vertices.  Ties go to the lexicographically smallest difference vector.
    """
    if isinstance(cluster, Proxy):
        cluster = cluster.mask
    if isinstance(cluster, np.ndarray):
        if not cluster.any():
            raise ValueError("empty cluster")
        return _nearest_in_mask(config, cluster, point)
    else:
        pts = list(cluster)
        if not pts:
            raise ValueError("empty cluster")
        xs = np.array([v[0] for v in pts])
        ys = np.array([v[1] for v in pts])
    if len(xs) == 0:
        raise ValueError("empty cluster")
    px, py = lattice.embed_many(xs, ys)
    dx = np.round(px - point[0], 12)
    dy = np.round(py - point[1], 12)
    dist = np.maximum(np.abs(dx), np.abs(dy))
    best = np.lexsort((dy, dx, dist))[0]
    return (int(xs[best]), int(ys[best]))


def _nearest_in_mask(config: Configuration, mask: np.ndarray, point):
    """Expanding-block search; exact once the best distance is covered by the block."""
    radius = 2.0
    while True:
        x0, y0, nx, ny = lattice.axial_range(point[0] - radius, point[0] + radius,
                                             point[1] - radius, point[1] + radius, pad=1)
        c0, r0 = max(x0 - config.x0, 0), max(y0 - config.y0, 0)
        c1, r1 = min(x0 + nx - config.x0, config.nx), min(y0 + ny - config.y0, config.ny)
        covers_all = c0 == 0 and r0 == 0 and c1 == config.nx and r1 == config.ny
        if c1 > c0 and r1 > r0:
            rows, cols = np.nonzero(mask[r0:r1, c0:c1])
            if len(rows):
                xs = cols + c0 + config.x0
                ys = rows + r0 + config.y0
                px, py = lattice.embed_many(xs, ys)
                dx = np.round(px - point[0], 12)
                dy = np.round(py - point[1], 12)
                dist = np.maximum(np.abs(dx), np.abs(dy))
                best = np.lexsort((dy, dx, dist))[0]
                if dist[best] <= radius or covers_all:
                    return (int(xs[best]), int(ys[best]))
        if covers_all:
            raise ValueError("empty cluster")
        radius *= 2.0


# -- crossings ----------------------------------------------------------------

_SIDES = {"lr": ("left", "right"), "rl": ("right", "left"),
          "tb": ("top", "bottom"), "bt": ("bottom", "top")}


@dataclass
class BoxFrame:
    """Sub-block of a window around a box with crossing-eligibility data."""

    bx0: int                   # column offset of the block inside the window
    by0: int
    bits: np.ndarray           # block states
    inside: np.ndarray         # block vertices in the closed box
    start: np.ndarray          # (6, ny, nx): segment v -> v+d_k meets the start side
    end: np.ndarray            # (6, ny, nx): segment v -> v+d_k meets the end side
    nbr_ok: np.ndarray         # (6, ny, nx): v+d_k lies in the block

    @property
    def shape(self):
        return self.bits.shape

    def shifted(self, arr, k):
        """Value of ``arr`` at v + d_k for every block vertex v (False outside)."""
        dx, dy = OFFSETS[k]
        out = np.zeros_like(arr)
        ny, nx = arr.shape
        src = arr[max(dy, 0):ny + min(dy, 0), max(dx, 0):nx + min(dx, 0)]
        out[max(-dy, 0):ny + min(-dy, 0), max(-dx, 0):nx + min(-dx, 0)] = src
        return out


def box_frame(config: Configuration, box: TiltedBox, orientation: str = "lr") -> BoxFrame:
    if orientation not in _SIDES:
        raise ValueError(f"orientation must be one of {sorted(_SIDES)}")
    if not config.contains_box(box, margin=1.0):
        raise ValueError(f"box {box} needs a one-vertex margin inside window {config.window}")
    s_side, e_side = _SIDES[orientation]
    x0, y0, nx, ny = lattice.axial_range(*box.planar_bounds(), pad=2)
    cx0 = max(x0, config.x0)
    cy0 = max(y0, config.y0)
    cx1 = min(x0 + nx, config.x0 + config.nx)
    cy1 = min(y0 + ny, config.y0 + config.ny)
    bx0, by0 = cx0 - config.x0, cy0 - config.y0
    bits = config.bits[by0:by0 + cy1 - cy0, bx0:bx0 + cx1 - cx0]
    ys, xs = np.mgrid[cy0:cy1, cx0:cx1]
    px, py = lattice.embed_many(xs, ys)
    inside = box.contains(px, py)
    shp = bits.shape
    start = np.zeros((6,) + shp, dtype=bool)
    end = np.zeros((6,) + shp, dtype=bool)
    nbr_ok = np.zeros((6,) + shp, dtype=bool)
    for k, (dx, dy) in enumerate(OFFSETS):
        qx, qy = lattice.embed_many(xs + dx, ys + dy)
        start[k] = lattice.segments_cross_side(px, py, qx, qy, box, s_side)
        end[k] = lattice.segments_cross_side(px, py, qx, qy, box, e_side)
        ok = np.ones(shp, dtype=bool)
        if dx > 0:
            ok[:, -dx:] = False
        elif dx < 0:
            ok[:, :-dx] = False
        if dy > 0:
            ok[-dy:, :] = False
        elif dy < 0:
            ok[:-dy, :] = False
        nbr_ok[k] = ok
    return BoxFrame(bx0, by0, bits, inside, start, end, nbr_ok)


def _eligible(frame: BoxFrame, colored: np.ndarray, which: str) -> np.ndarray:
    """Inside coloured vertices with a coloured neighbour across the start/end side."""
    cross = frame.start if which == "start" else frame.end
    out = np.zeros(frame.shape, dtype=bool)
    for k in range(6):
        out |= cross[k] & frame.nbr_ok[k] & frame.shifted(colored, k)
    return out & frame.inside & colored


def _single_edge_crossing(frame: BoxFrame, colored: np.ndarray) -> bool:
    for k in range(6):
        both = frame.start[k] & frame.end[k] & frame.nbr_ok[k] & colored & frame.shifted(colored, k)
        if both.any():
            return True
    return False


def crossing_exists(config: Configuration, box: TiltedBox, color: bool = True,
                    orientation: str = "lr") -> bool:
    """Is there a self-avoiding path of the given colour crossing the box?"""
    frame = box_frame(config, box, orientation)
    colored = frame.bits if color else ~frame.bits
    if _single_edge_crossing(frame, colored):
        return True
    labels, count = ndimage.label(colored & frame.inside, structure=HEX_STRUCTURE)
    if not count:
        return False
    s = np.unique(labels[_eligible(frame, colored, "start")])
    e = np.unique(labels[_eligible(frame, colored, "end")])
    return bool(np.intersect1d(s[s > 0], e[e > 0]).size)


def crossing_clusters(config: Configuration, box: TiltedBox, labels: np.ndarray,
                      color: bool = True, orientation: str = "lr") -> set[int]:
    """Window-level cluster labels of every cluster carrying a crossing of the box."""
    frame = box_frame(config, box, orientation)
    colored = frame.bits if color else ~frame.bits
    sub = labels[frame.by0:frame.by0 + frame.shape[0], frame.bx0:frame.bx0 + frame.shape[1]]
    local, count = ndimage.label(colored & frame.inside, structure=HEX_STRUCTURE)
    s = set(np.unique(local[_eligible(frame, colored, "start")]).tolist()) - {0}
    e = set(np.unique(local[_eligible(frame, colored, "end")]).tolist()) - {0}
    out = set()
    for lab in s & e:
        out.update(np.unique(sub[local == lab]).tolist())
    return out - {0}


def _box_search(config: Configuration, frame: BoxFrame, cost: np.ndarray, allowed: np.ndarray):
    """Cheapest walk v0, v1..v_{k-1} (inside), v_k using per-vertex ``cost``.

    Returns (total, path) with path in window coordinates, or (None, None).
    """
    ny, nx = frame.shape
    big = INF
    init = np.full(ny * nx, big, dtype=np.int64)
    first = np.full(ny * nx, -1, dtype=np.int64)
    cflat = cost.ravel().astype(np.int64)
    for k in range(6):
        dx, dy = OFFSETS[k]
        ok = frame.start[k] & frame.nbr_ok[k] & frame.inside & allowed & frame.shifted(allowed, k)
        rows, cols = np.nonzero(ok)
        for r, c in zip(rows.tolist(), cols.tolist()):
            v = r * nx + c
            w = (r + dy) * nx + (c + dx)
            val = cflat[v] + cflat[w]
            if val < init[v] or (val == init[v] and w < first[v]):
                init[v] = val
                first[v] = w
    amask = (allowed & frame.inside).ravel()
    dist, parent, _ = zero_one_search(cflat, amask, init, nx, ny, -1)
    best = None
    for k in range(6):
        dx, dy = OFFSETS[k]
        ok = frame.end[k] & frame.nbr_ok[k] & frame.inside & allowed & frame.shifted(allowed, k)
        rows, cols = np.nonzero(ok)
        for r, c in zip(rows.tolist(), cols.tolist()):
            v = r * nx + c
            if dist[v] >= big:
                continue
            w = (r + dy) * nx + (c + dx)
            cand = (int(dist[v] + cflat[w]), v, w)
            if best is None or cand < best:
                best = cand
    single = None
    for k in range(6):
        dx, dy = OFFSETS[k]
        ok = frame.start[k] & frame.end[k] & frame.nbr_ok[k] & allowed & frame.shifted(allowed, k)
        rows, cols = np.nonzero(ok)
        for r, c in zip(rows.tolist(), cols.tolist()):
            v = r * nx + c
            w = (r + dy) * nx + (c + dx)
            cand = (int(cflat[v] + cflat[w]), v, w)
            if single is None or cand < single:
                single = cand
    if best is None and single is None:
        return None, None
    if single is not None and (best is None or single[0] < best[0]):
        idx = [single[1], single[2]]
        total = single[0]
    else:
        total, v, w = best
        chain = trace_back(parent, v)
        idx = [int(first[chain[0]])] + chain + [w]
    path = []
    for i in idx:
        r, c = divmod(int(i), nx)
        path.append((config.x0 + frame.bx0 + c, config.y0 + frame.by0 + r))
    return total, _loop_erase(path)


def _loop_erase(path):
    out = []
    pos = {}
    for v in path:
        if v in pos:
            cut = pos[v]
            for u in out[cut + 1:]:
                del pos[u]
            out = out[:cut + 1]
        else:
            pos[v] = len(out)
            out.append(v)
    return out


def find_crossing(config: Configuration, box: TiltedBox, color: bool = True,
                  orientation: str = "lr"):
    """A shortest crossing of the given colour (vertex list) or None."""
    frame = box_frame(config, box, orientation)
    colored = frame.bits if color else ~frame.bits
    _, path = _box_search(config, frame, np.ones(frame.shape, dtype=np.int64), colored)
    return path


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    reps: int
    samples: tuple = ()


def crossing_probability(p: float, n: int, reps: int, color: bool = False, seed: int = 0) -> Estimate:
    """Monte Carlo frequency of a left-right crossing of ``[0, n]^2``."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    box = lattice.axis_box(0, n, 0, n)
    window = window_for(0, n, 0, n, pad=2)
    hits = [crossing_exists(sample(window, p, seed, r), box, color, "lr") for r in range(reps)]
    m = sum(hits) / reps
    return Estimate(m, math.sqrt(m * (1 - m) / reps), reps, tuple(int(h) for h in hits))


def theta_estimate(p: float, n: int, reps: int, seed: int = 0, pad_factor: float = 4.0) -> Estimate:
    """Fraction of B_n covered by the spanning-cluster proxy, averaged over replicas."""
    inner = lattice.square(n)
    r_out = n * (1 + pad_factor) + 1
    window = window_for(-r_out, r_out, -r_out, r_out, pad=1)
    vals = []
    for r in range(reps):
        cfg = sample(window, p, seed, r)
        proxy = infinite_cluster_proxy(cfg, inner, pad_factor)
        px, py = cfg.coords()
        in_box = inner.contains(px, py)
        vals.append(float((proxy.mask & in_box).sum()) / proxy.inner_count)
    vals = np.array(vals)
    se = float(vals.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    return Estimate(float(vals.mean()), se, reps, tuple(vals.tolist()))


def chemical_distance(config: Configuration, u, v):
    """Graph distance inside the open subgraph; ``math.inf`` when not connected."""
    if not (config.is_open(u) and config.is_open(v)):
        return math.inf
    if tuple(u) == tuple(v):
        return 0
    cost = np.ones(config.nx * config.ny, dtype=np.int64)
    init = np.full(config.nx * config.ny, INF, dtype=np.int64)
    init[config.index(u)] = 0
    t = config.index(v)
    dist, _, _ = zero_one_search(cost, config.bits.ravel(), init, config.nx, config.ny, t)
    return int(dist[t]) if dist[t] < INF else math.inf


def shortest_open_path(config: Configuration, u, v):
    """A lattice-shortest open path from u to v, or None."""
    if not (config.is_open(u) and config.is_open(v)):
        return None
    cost = np.ones(config.nx * config.ny, dtype=np.int64)
    init = np.full(config.nx * config.ny, INF, dtype=np.int64)
    init[config.index(u)] = 0
    t = config.index(v)
    dist, parent, _ = zero_one_search(cost, config.bits.ravel(), init, config.nx, config.ny, t)
    if dist[t] >= INF:
        return None
    return [config.vertex(i) for i in trace_back(parent, t)]


# -- dump format -----------------------------------------------------------------

def dumps_config(config: Configuration) -> str:
    head = (f"TRIPERC1 {config.x0} {config.y0} {config.nx} {config.ny} "
            f"p={config.p!r} seed={config.seed} gen={config.generator}")
    rows = ["".join("1" if b else "0" for b in row) for row in config.bits]
    return "\n".join([head] + rows) + "\n"


def loads_config(text: str) -> Configuration:
    if not text.endswith("\n"):
        raise DumpFormatError(text.count("\n") + 1, "missing trailing newline")
    lines = text[:-1].split("\n")
    parts = lines[0].split(" ")
    if len(parts) != 8 or parts[0] != "TRIPERC1":
        raise DumpFormatError(1, "malformed header")
    try:
        x0, y0, nx, ny = (int(t) for t in parts[1:5])
        keyed = dict(t.split("=", 1) for t in parts[5:])
        p = float(keyed["p"])
        seed = int(keyed["seed"])
        gen = keyed["gen"]
    except (ValueError, KeyError) as exc:
        raise DumpFormatError(1, f"malformed header: {exc}") from None
    if nx <= 0 or ny <= 0:
        raise DumpFormatError(1, "empty window")
    bits = np.zeros((ny, nx), dtype=bool)
    for r in range(ny):
        lineno = r + 2
        if r + 1 >= len(lines):
            raise DumpFormatError(lineno, f"expected {ny} rows, file ends after {len(lines) - 1}")
        row = lines[r + 1]
        if len(row) != nx or set(row) - {"0", "1"}:
            raise DumpFormatError(lineno, f"row must be {nx} characters of 0/1")
        bits[r] = np.frombuffer(row.encode(), dtype=np.uint8) == ord("1")
    if len(lines) > ny + 1:
        raise DumpFormatError(ny + 2, "unexpected trailing content")
    return Configuration(x0, y0, bits, p, seed, gen)


def save_config(config: Configuration, path) -> None:
    Path(path).write_text(dumps_config(config), encoding="ascii")


def load_config(path) -> Configuration:
    return loads_config(Path(path).read_text(encoding="ascii"))
