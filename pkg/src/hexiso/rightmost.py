"""Right-most paths, right boundaries, hexagonal interfaces and *-concatenation."""
from __future__ import annotations

import json
from collections import deque
from typing import NamedTuple, Optional

import numpy as np

from . import lattice
from .lattice import DualEdge, OrientedEdge, direction, right_boundary_dirs, step


class Violation(NamedTuple):
    index: int
    reason: str


class InvalidPath(ValueError):
    pass


class InvalidInterface(ValueError):
    pass


class RightMostPath:
    """Vertex sequence v_0..v_n; a circuit repeats v_0 as its last vertex."""

    __slots__ = ("vertices", "is_circuit")

    def __init__(self, vertices, is_circuit: Optional[bool] = None, check: bool = True,
                 vertex_simple: bool = False, allow_reversal: bool = False):
        verts = tuple((int(v[0]), int(v[1])) for v in vertices)
        if is_circuit is None:
            is_circuit = len(verts) > 2 and verts[0] == verts[-1]
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "is_circuit", bool(is_circuit))
        if check:
            bad = validate_rightmost(verts, self.is_circuit, vertex_simple, allow_reversal)
            if bad is not None:
                raise InvalidPath(f"vertex {bad.index}: {bad.reason}")

    def __setattr__(self, name, value):
        raise AttributeError("RightMostPath is immutable")

    def __len__(self) -> int:
        """Number of edges |gamma|."""
        return len(self.vertices) - 1

    def __iter__(self):
        return iter(self.vertices)

    def __eq__(self, other):
        return (isinstance(other, RightMostPath) and self.vertices == other.vertices
                and self.is_circuit == other.is_circuit)

    def __hash__(self):
        return hash((self.vertices, self.is_circuit))

    def __repr__(self):
        kind = "circuit" if self.is_circuit else "path"
        return f"RightMostPath({kind}, {list(self.vertices)})"

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    def reversed(self) -> list:
        return list(reversed(self.vertices))


class Interface(NamedTuple):
    """Oriented chain of hexagon edges, stored by their primal oriented edges."""

    edges: tuple
    is_cycle: bool

    @property
    def dual_edges(self) -> tuple:
        return tuple(DualEdge(e) for e in self.edges)

    def left_hexagons(self) -> set:
        return {e.tail for e in self.edges}

    def right_hexagons(self) -> set:
        return {e.head for e in self.edges}

    def signed_area(self) -> float:
        pts = [DualEdge(e).endpoints()[0] for e in self.edges]
        pts.append(DualEdge(self.edges[-1]).endpoints()[1])
        a = 0.0
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            a += x0 * y1 - x1 * y0
        return 0.5 * a


def _interior(verts, circuit: bool):
    """Yield (index, prev, vertex, next) for the vertices with both neighbours."""
    n = len(verts) - 1
    if circuit:
        for i in range(1, n + 1):
            nxt = verts[1] if i == n else verts[i + 1]
            yield i, verts[i - 1], verts[i], nxt
    else:
        for i in range(1, n):
            yield i, verts[i - 1], verts[i], verts[i + 1]


def local_boundary(prev, v, nxt) -> tuple:
    """Right-boundary vertices of v for the step prev -> v -> nxt.

    A straight reversal (prev == nxt) contributes the other five neighbours.
    """
    dirs = right_boundary_dirs(direction(v, prev), direction(v, nxt), reversal=True)
    return tuple(step(v, k) for k in dirs)


def validate_rightmost(vertices, is_circuit: bool = False, vertex_simple: bool = False,
                       allow_reversal: bool = False) -> Optional[Violation]:
    """First violated right-most condition, or None when the path is right-most.

    Straight reversals u -> v -> u are rejected unless ``allow_reversal``; the
    boundary circuits of sets with dangling vertices need them.
    """
    if isinstance(vertices, RightMostPath):
        is_circuit = vertices.is_circuit
        vertices = vertices.vertices
    verts = [tuple(v) for v in vertices]
    if len(verts) == 0:
        return Violation(0, "empty path")
    if is_circuit and (len(verts) < 3 or verts[0] != verts[-1]):
        return Violation(len(verts) - 1, "circuit must close on its first vertex with at least 2 edges")
    for i in range(len(verts) - 1):
        if not lattice.adjacent(verts[i], verts[i + 1]):
            return Violation(i + 1, f"{verts[i]} and {verts[i + 1]} are not adjacent")
    seen_edges = set()
    for i in range(len(verts) - 1):
        e = (verts[i], verts[i + 1])
        if e in seen_edges:
            return Violation(i, f"oriented edge {e} used twice")
        seen_edges.add(e)
    if vertex_simple:
        body = verts[:-1] if is_circuit else verts
        seen = {}
        for i, v in enumerate(body):
            if v in seen:
                return Violation(i, f"vertex {v} repeated")
            seen[v] = i
    on_path = set(verts)
    for i, prev, v, nxt in _interior(verts, is_circuit):
        if prev == nxt and not allow_reversal:
            return Violation(i, "immediate reversal: incoming and outgoing directions coincide")
        bnd = local_boundary(prev, v, nxt)
        if not bnd:
            return Violation(i, "no right-boundary vertex")
        for w in bnd:
            if w in on_path:
                return Violation(i, f"right-boundary vertex {w} lies on the path")
    return None


def is_rightmost(vertices, is_circuit: bool = False, vertex_simple: bool = False,
                 allow_reversal: bool = False) -> bool:
    return validate_rightmost(vertices, is_circuit, vertex_simple, allow_reversal) is None


def _as_path(path) -> RightMostPath:
    if isinstance(path, RightMostPath):
        return path
    return RightMostPath(path)


def boundary_set(path) -> set:
    """The right boundary: union of the local right-boundary vertices."""
    path = _as_path(path)
    out = set()
    for _, prev, v, nxt in _interior(path.vertices, path.is_circuit):
        out.update(local_boundary(prev, v, nxt))
    return out


def b_count(path, config) -> int:
    """Number of open vertices in the right boundary."""
    bnd = boundary_set(path)
    missing = [w for w in bnd if w not in config]
    if missing:
        raise KeyError(f"right boundary leaves the window at {sorted(missing)[0]}")
    return sum(config.omega(w) for w in bnd)


def interface_of(path) -> Interface:
    """Right-boundary hexagon edges, vertex by vertex, in counterclockwise fan order."""
    path = _as_path(path)
    if len(path) < 2:
        raise InvalidPath("interface needs a path with at least two edges")
    edges = []
    for _, prev, v, nxt in _interior(path.vertices, path.is_circuit):
        for k in right_boundary_dirs(direction(v, prev), direction(v, nxt), reversal=True):
            edges.append(OrientedEdge(v, k))
    return Interface(tuple(edges), path.is_circuit)


def check_interface(iface: Interface) -> Optional[str]:
    """Reason the chain is not an interface, or None."""
    edges = iface.edges
    if not edges:
        return "empty interface"
    if len(set(edges)) != len(edges):
        return "repeated hexagon edge"
    for a, b in zip(edges, edges[1:]):
        if DualEdge(a).head_corner != DualEdge(b).tail_corner:
            return f"edges {a} and {b} do not chain"
    if iface.is_cycle and DualEdge(edges[-1]).head_corner != DualEdge(edges[0]).tail_corner:
        return "cycle does not close"
    both = iface.left_hexagons() & iface.right_hexagons()
    if both:
        return f"hexagon {sorted(both)[0]} is on both sides"
    return None


def interface_boundary(iface: Interface) -> set:
    """Hexagons on the right of the interface."""
    return iface.right_hexagons()


def _groups(edges):
    groups = []
    for e in edges:
        if groups and groups[-1][0] == e.tail:
            groups[-1][1].append(e)
        else:
            groups.append((e.tail, [e]))
    return groups


def path_of_interface(iface: Interface) -> RightMostPath:
    """The right-most path (or circuit, for a cycle) whose interface is ``iface``."""
    reason = check_interface(iface)
    if reason:
        raise InvalidInterface(reason)
    edges = list(iface.edges)
    if iface.is_cycle:
        # start at a change of left hexagon so no hexagon is split across the seam
        start = next((i for i in range(len(edges)) if edges[i].tail != edges[i - 1].tail), None)
        if start is None:
            raise InvalidInterface(f"cycle surrounds the single hexagon {edges[0].tail}")
        edges = edges[start:] + edges[:start]
        hexes = [h for h, _ in _groups(edges)]
        verts = [hexes[-1]] + hexes
        path = RightMostPath(verts, True, check=False)
    else:
        first, last = edges[0], edges[-1]
        h0 = step(first.tail, first.dir - 1)
        h_end = step(last.tail, last.dir + 1)
        hexes = [h for h, _ in _groups(edges)]
        path = RightMostPath([h0] + hexes + [h_end], False, check=False)
    bad = validate_rightmost(path.vertices, path.is_circuit, allow_reversal=True)
    if bad is not None:
        raise InvalidInterface(f"hexagon {path.vertices[bad.index]}: {bad.reason}")
    if interface_of(path).edges != tuple(edges):
        raise InvalidInterface(f"hexagon {path.vertices[1]}: interface is not realised by a right-most path")
    return path


# -- subgraphs ------------------------------------------------------------------

def is_connected(vertices) -> bool:
    vs = set(map(tuple, vertices))
    if not vs:
        return False
    start = next(iter(vs))
    seen = {start}
    todo = [start]
    while todo:
        v = todo.pop()
        for w in lattice.neighbors(v):
            if w in vs and w not in seen:
                seen.add(w)
                todo.append(w)
    return len(seen) == len(vs)


def vertex_boundaries(vertices):
    """(outer, inner, full) vertex boundaries of a finite vertex set.

    The outer boundary holds the neighbours that reach infinity without touching
    the set itself; the inner boundary holds the set vertices adjacent to it.
    """
    vs = set(map(tuple, vertices))
    if not vs:
        raise ValueError("empty subgraph")
    full = {w for v in vs for w in lattice.neighbors(v)} - vs
    xs = [v[0] for v in vs]
    ys = [v[1] for v in vs]
    x0, x1, y0, y1 = min(xs) - 2, max(xs) + 2, min(ys) - 2, max(ys) + 2
    # flood the complement from the frame of a box two rows larger than the set
    seen = set()
    todo = deque()
    for x in range(x0, x1 + 1):
        for y in (y0, y1):
            seen.add((x, y))
            todo.append((x, y))
    for y in range(y0, y1 + 1):
        for x in (x0, x1):
            if (x, y) not in seen:
                seen.add((x, y))
                todo.append((x, y))
    while todo:
        v = todo.popleft()
        for w in lattice.neighbors(v):
            if x0 <= w[0] <= x1 and y0 <= w[1] <= y1 and w not in vs and w not in seen:
                seen.add(w)
                todo.append(w)
    outer = full & seen
    inner = {v for v in vs if any(w in outer for w in lattice.neighbors(v))}
    return outer, inner, full


def outer_interface(vertices, orientation: str = "ccw") -> Interface:
    """Outer boundary cycle of the hexagon union of a connected vertex set.

    ``ccw`` keeps the set on the left and starts at an internal vertex;
    ``cw`` keeps it on the right and starts at an external vertex.
    """
    vs = set(map(tuple, vertices))
    if len(vs) < 2:
        raise ValueError("outer interface needs at least two vertices")
    if not is_connected(vs):
        raise ValueError("subgraph is not connected")
    outer, _, _ = vertex_boundaries(vs)
    if orientation == "ccw":
        gray, white = vs, outer
    elif orientation == "cw":
        gray, white = outer, vs
    else:
        raise ValueError("orientation must be 'ccw' or 'cw'")
    cand = set()
    for u in gray:
        for k in range(6):
            if step(u, k) in white:
                cand.add(OrientedEdge(u, k))

    def succ(e):
        u, k = e
        w = step(u, k + 1)
        if w in white:
            return OrientedEdge(u, (k + 1) % 6)
        return OrientedEdge(w, (k - 1) % 6)

    pred = {succ(e): e for e in cand}
    starts = sorted(e for e in cand if pred[e].tail != e.tail)
    e0 = starts[0]
    chain = [e0]
    e = succ(e0)
    while e != e0:
        chain.append(e)
        e = succ(e)
    if len(chain) != len(cand):
        raise RuntimeError("outer boundary is not a single cycle")
    return Interface(tuple(chain), True)


def boundary_circuit(vertices, orientation: str = "ccw") -> RightMostPath:
    return path_of_interface(outer_interface(vertices, orientation))


# -- *-concatenation ------------------------------------------------------------

def star_concat(gamma, gamma2, allow_reversal: bool = False, repair: bool = True) -> RightMostPath:
    """Right-most path from the start of ``gamma`` to the end of ``gamma2``.

    The junction u_k -> v_l is the first vertex of ``gamma`` next to ``gamma2``
    and the last vertex of ``gamma2`` next to it.  When v_l is the start of
    ``gamma2`` nothing stops ``gamma2`` from coming back into the right fan of
    v_l; with ``repair`` the path then jumps from v_l straight to the last such
    vertex, which keeps the fan at v_l nonempty and off the path.
    """
    g1 = gamma.vertices if isinstance(gamma, RightMostPath) else _as_path(gamma).vertices
    g2 = gamma2.vertices if isinstance(gamma2, RightMostPath) else _as_path(gamma2).vertices
    if g1[-1] != g2[0]:
        raise ValueError("first path must end where the second starts")
    u0 = g1[0]
    if u0 in g2:
        l = max(i for i, v in enumerate(g2) if v == u0)
        return RightMostPath(g2[l:], False, allow_reversal=allow_reversal)
    on2 = set(g2)
    k = next(i for i, u in enumerate(g1) if any(w in on2 for w in lattice.neighbors(u)))
    uk = g1[k]
    l = max(i for i, v in enumerate(g2) if lattice.adjacent(uk, v))
    tail = g2[l:]
    if repair and len(tail) > 2:
        vl = tail[0]
        fan = {step(vl, j) for j in right_boundary_dirs(direction(vl, uk), direction(vl, tail[1]))}
        later = [i for i in range(2, len(tail)) if tail[i] in fan]
        if later:
            tail = (vl,) + tail[max(later):]
    return RightMostPath(g1[:k + 1] + tail, False, allow_reversal=allow_reversal)


def split_concat(gamma, gamma2):
    """(gamma_L, gamma_M, gamma_R) pieces of the concatenation, or None in the suffix case."""
    g1 = _as_path(gamma).vertices
    g2 = _as_path(gamma2).vertices
    if g1[0] in g2:
        return None
    on2 = set(g2)
    k = next(i for i, u in enumerate(g1) if any(w in on2 for w in lattice.neighbors(u)))
    l = max(i for i, v in enumerate(g2) if lattice.adjacent(g1[k], v))
    mid = list(g1[max(k - 1, 0):k + 1]) + list(g2[l:l + 2])
    return g1[:k + 1], tuple(mid), g2[l:]


# -- random generation -----------------------------------------------------------

def random_rightmost(rng: np.random.Generator, length: int, start=(0, 0),
                     vertex_simple: bool = True, max_tries: int = 50) -> RightMostPath:
    """Random right-most path grown step by step, of at most ``length`` edges.

    Each step draws uniformly among the moves that keep the path right-most;
    growth stops early when no move is admissible.  The longest of
    ``max_tries`` attempts is returned.
    """
    best = None
    for _ in range(max_tries):
        verts = [tuple(start), step(start, int(rng.integers(6)))]
        used_edges = {(verts[0], verts[1])}
        bnd: set = set()
        on_path = set(verts)
        while len(verts) - 1 < length:
            prev, v = verts[-2], verts[-1]
            d_in = direction(v, prev)
            opts = []
            for k in range(6):
                if k == d_in or k == (d_in + 1) % 6:
                    continue
                w = step(v, k)
                if w in bnd or (v, w) in used_edges:
                    continue
                if vertex_simple and w in on_path:
                    continue
                new = [step(v, j) for j in right_boundary_dirs(d_in, k)]
                if any(x in on_path or x == w for x in new):
                    continue
                opts.append((w, new))
            if not opts:
                break
            w, new = opts[int(rng.integers(len(opts)))]
            bnd.update(new)
            used_edges.add((v, w))
            on_path.add(w)
            verts.append(w)
        if best is None or len(verts) > len(best):
            best = verts
        if len(best) - 1 >= length:
            break
    return RightMostPath(best, False)


def random_connected_set(rng: np.random.Generator, size: int, start=(0, 0)) -> set:
    """Eden-style growth of a connected vertex set."""
    vs = {tuple(start)}
    frontier = sorted(set(lattice.neighbors(start)))
    while len(vs) < size:
        w = frontier[int(rng.integers(len(frontier)))]
        vs.add(w)
        frontier = sorted({x for v in vs for x in lattice.neighbors(v)} - vs)
    return vs


def random_composable_pair(rng: np.random.Generator, max_len: int = 30):
    """Two random right-most paths, the second starting where the first ends."""
    a = random_rightmost(rng, int(rng.integers(1, max_len + 1)))
    b = random_rightmost(rng, int(rng.integers(1, max_len + 1)), start=a.end)
    return a, b


# -- serialisation -------------------------------------------------------------

def path_record(path) -> str:
    path = _as_path(path)
    return json.dumps({"kind": "path", "pts": [list(v) for v in path.vertices],
                       "circuit": path.is_circuit}, separators=(",", ":"))


def interface_record(iface: Interface) -> str:
    return json.dumps({"kind": "interface", "pts": [[e.tail[0], e.tail[1], e.dir] for e in iface.edges],
                       "circuit": iface.is_cycle}, separators=(",", ":"))


def load_record(line: str):
    rec = json.loads(line)
    if rec.get("kind") == "path":
        return RightMostPath(rec["pts"], bool(rec["circuit"]))
    if rec.get("kind") == "interface":
        edges = tuple(OrientedEdge((int(x), int(y)), int(k)) for x, y, k in rec["pts"])
        return Interface(edges, bool(rec["circuit"]))
    raise ValueError(f"unknown record kind {rec.get('kind')!r}")
