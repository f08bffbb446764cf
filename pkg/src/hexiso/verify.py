"""Invariant suites run by ``hexiso verify``; each returns case and violation counts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from . import boundary_norm, cheeger, fpp, percolation, rightmost, wulff


@dataclass
class SuiteResult:
    suite: str
    cases: int
    violations: int
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def record(self) -> dict:
        return {"suite": self.suite, "cases": self.cases, "violations": self.violations,
                "details": self.details[:10]}


def _note(res: SuiteResult, msg: str):
    res.violations += 1
    res.details.append(msg)


def suite_rightmost(cases: int, seed: int) -> SuiteResult:
    """Boundary-size bounds, interface round trips and concatenation on random paths."""
    res = SuiteResult("rightmost", 0, 0)
    rng = percolation.make_rng(seed, 0)
    for i in range(cases):
        path = rightmost.random_rightmost(rng, int(rng.integers(1, 41)), vertex_simple=bool(i % 2))
        res.cases += 1
        nb = len(rightmost.boundary_set(path))
        if not (len(path) - 1) / 6 <= nb <= 5 * len(path):
            _note(res, f"boundary size {nb} for length {len(path)}")
        if len(path) >= 2:
            iface = rightmost.interface_of(path)
            back = rightmost.path_of_interface(iface)
            if back.vertices != path.vertices or rightmost.interface_boundary(iface) != rightmost.boundary_set(path):
                _note(res, f"round trip failed for {path.vertices}")
        a, b = rightmost.random_composable_pair(rng)
        c = rightmost.star_concat(a, b)
        extra = rightmost.boundary_set(c) - rightmost.boundary_set(a) - rightmost.boundary_set(b)
        if c.start != a.start or c.end != b.end or len(extra) > 8:
            _note(res, f"concatenation produced {len(extra)} extra boundary vertices")
    return res


def suite_circuits(cases: int, seed: int) -> SuiteResult:
    """Boundary circuits of random connected sets: outer boundary and inner boundary identities."""
    res = SuiteResult("circuits", 0, 0)
    rng = percolation.make_rng(seed, 1)
    for _ in range(cases):
        g = rightmost.random_connected_set(rng, int(rng.integers(2, 41)))
        outer, inner, _ = rightmost.vertex_boundaries(g)
        # counterclockwise the circuit runs through the inner boundary with the outer
        # boundary on its right; clockwise the two roles swap
        for orient, right, on in (("ccw", outer, inner), ("cw", inner, outer)):
            circ = rightmost.boundary_circuit(g, orient)
            res.cases += 1
            if rightmost.boundary_set(circ) != right or set(circ.vertices) != on:
                _note(res, f"circuit identity failed ({orient}) for a set of size {len(g)}")
    return res


def suite_fpp(cases: int, seed: int) -> SuiteResult:
    """N(u, v) against peeling and against passage times on small windows."""
    res = SuiteResult("fpp", 0, 0)
    for r in range(cases):
        rng = percolation.make_rng(seed, 10_000 + r)
        p = float(rng.uniform(0.3, 0.9))
        cfg = percolation.sample((0, 0, 8, 8), p, seed, r)
        u = (int(rng.integers(8)), int(rng.integers(8)))
        v = (int(rng.integers(8)), int(rng.integers(8)))
        if u == v:
            continue
        res.cases += 1
        n = fpp.separating_circuits(cfg, u, v)
        t = fpp.first_passage(cfg, u, v, exterior=False).time
        if n != fpp.separating_circuits_peel(cfg, u, v) or not t - 2 <= n <= t:
            _note(res, f"N={n} T={t} at replica {r}")
    return res


def suite_boundary(cases: int, seed: int) -> SuiteResult:
    """b >= N >= T - 2 on 7x7 windows with the exact search."""
    res = SuiteResult("boundary", 0, 0)
    for r in range(cases):
        rng = percolation.make_rng(seed, 20_000 + r)
        cfg = percolation.sample((0, 0, 7, 7), float(rng.uniform(0.55, 0.85)), seed, 50_000 + r)
        opens = [tuple(map(int, v)) for v in zip(*np.nonzero(cfg.bits.T))]
        if len(opens) < 2:
            continue
        i, j = rng.choice(len(opens), 2, replace=False)
        x, y = opens[i], opens[j]
        if percolation.chemical_distance(cfg, x, y) == math.inf:
            continue
        res.cases += 1
        try:
            b = boundary_norm.b_exact(cfg, x, y).exact
        except boundary_norm.BudgetExceeded as exc:
            b = exc.bracket.upper
        n = fpp.separating_circuits(cfg, x, y)
        t = fpp.first_passage(cfg, x, y, exterior=False).time
        if b is None or not b >= n >= t - 2:
            _note(res, f"b={b} N={n} T={t} at replica {r}")
    return res


def suite_wulff(cases: int, seed: int) -> SuiteResult:
    """Disk and hexagon identities, and the isoperimetric inequality on random polygons."""
    res = SuiteResult("wulff", 0, 0)
    eu = wulff.DirectionalNorm.euclidean(720)
    _, w_hat = wulff.wulff_construct(eu)
    res.cases += 2
    if wulff.hausdorff(w_hat, wulff.unit_disk()) > 1e-4:
        _note(res, "euclidean Wulff shape is not the unit-area disk")
    if abs(wulff.phi_from_norm(eu) - 2 * math.sqrt(math.pi)) > 1e-4:
        _note(res, "euclidean phi differs from 2 sqrt(pi)")
    hexn = wulff.DirectionalNorm.hexagonal(720)
    w, _ = wulff.wulff_construct(hexn)
    res.cases += 1
    if wulff.hausdorff(w, wulff.analytic_hexagon_wulff()) > 1e-4:
        _note(res, "hexagonal Wulff shape differs from the analytic hexagon")
    phi = wulff.phi_from_norm(hexn)
    rng = percolation.make_rng(seed, 2)
    for _ in range(cases):
        k = int(rng.integers(3, 13))
        ang = np.sort(rng.uniform(0, 2 * math.pi, k))
        rad = rng.uniform(0.5, 1.5, k)
        pts = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
        try:
            body = wulff.ConvexBody(pts[ConvexHull(pts).vertices]).normalized()
        except ValueError:
            continue
        res.cases += 1
        if wulff.rho_length(body.loop(), hexn) < phi - 1e-9:
            _note(res, "a unit-area polygon beat the Wulff shape")
    return res


def suite_cheeger(cases: int, seed: int) -> SuiteResult:
    """Annealing against exhaustive search on small clusters."""
    res = SuiteResult("cheeger", 0, 0)
    r = 0
    while res.cases < cases and r < 50 * cases:
        p = (0.6, 0.7, 0.8)[r % 3]
        cfg = percolation.sample(cheeger.cheeger_window(2), p, seed, r)
        r += 1
        try:
            proxy, ground = cheeger.box_cluster(cfg, 2)
        except percolation.ProxyUndefined:
            continue
        if not 2 <= len(ground) <= 18:
            continue
        res.cases += 1
        ex = cheeger.cheeger_exact(cfg, 2, proxy)
        an = cheeger.cheeger_anneal(cfg, 2, proxy, seed=seed)
        if ex.value != an.value:
            _note(res, f"exact {ex.value} vs heuristic {an.value} at replica {r - 1}")
    return res


def suite_io(cases: int, seed: int) -> SuiteResult:
    """Configuration dumps round trip bit-exactly."""
    res = SuiteResult("io", 0, 0)
    for r in range(cases):
        rng = percolation.make_rng(seed, 30_000 + r)
        w = (int(rng.integers(-20, 20)), int(rng.integers(-20, 20)),
             int(rng.integers(1, 40)), int(rng.integers(1, 40)))
        cfg = percolation.sample(w, float(rng.uniform()), seed, r)
        res.cases += 1
        if percolation.loads_config(percolation.dumps_config(cfg)) != cfg:
            _note(res, f"round trip failed for window {w}")
    return res


SUITES = {
    "rightmost": suite_rightmost,
    "circuits": suite_circuits,
    "fpp": suite_fpp,
    "boundary": suite_boundary,
    "wulff": suite_wulff,
    "cheeger": suite_cheeger,
    "io": suite_io,
}

DEFAULT_CASES = {"rightmost": 1000, "circuits": 200, "fpp": 300, "boundary": 60,
                 "wulff": 100, "cheeger": 30, "io": 100}


def run_suites(names, cases: int | None, seed: int) -> list:
    out = []
    for name in names:
        out.append(SUITES[name](DEFAULT_CASES[name] if cases is None else cases, seed))
    return out
