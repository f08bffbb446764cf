"""Correlation length and the near-critical roundness program."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fpp, percolation, wulff
from .wulff import DirectionalNorm

EPS0 = 0.25
P_FLOOR = 0.52


class OutOfRange(ValueError):
    """The requested scale exceeds the largest allowed window."""


@dataclass
class CorrLength:
    p: float
    eps: float
    value: int
    interval: tuple | None            # (lo, hi) when the boundary estimate is within 2 stderr of eps
    table: dict = field(default_factory=dict)   # n -> (estimate, stderr)

    @property
    def lo(self) -> int:
        return self.value if self.interval is None else self.interval[0]

    @property
    def hi(self) -> int:
        return self.value if self.interval is None else self.interval[1]

    def record(self) -> dict:
        return {"p": self.p, "eps": self.eps, "L": self.value, "interval": self.interval,
                "table": {str(k): v for k, v in sorted(self.table.items())}}


def correlation_length(p: float, eps: float = EPS0, reps: int = 200, seed: int = 0,
                       n_max: int = 1024) -> CorrLength:
    """Smallest n whose estimated closed left-right crossing probability of [0, n]^2 is <= eps.

    Doubling then bisection; every scale uses the same replica seeds. The probability is not
    monotone at the smallest boxes (a 1x1 box is nearly a single-site event), so doubling stops
    only once the estimate is <= eps at both n and 2n, and bisection starts above the largest
    scale seen above eps.
    """
    if not 0.5 < p < 1.0:
        raise ValueError("p must lie in (1/2, 1)")
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    table = {}

    def est(n):
        if n not in table:
            e = percolation.crossing_probability(p, n, reps, color=False, seed=seed)
            table[n] = (e.mean, e.stderr)
        return table[n][0]

    hi = 1
    while not (est(hi) <= eps and (2 * hi > n_max or est(2 * hi) <= eps)):
        if 2 * hi > n_max:
            raise OutOfRange(f"correlation length at p={p} exceeds n_max={n_max}")
        hi *= 2
    lo = max((n for n, (m, _) in table.items() if n < hi and m > eps), default=0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if est(mid) > eps:
            lo = mid
        else:
            hi = mid
    value = hi
    # CI-aware: scales whose estimate is not significantly away from eps stay undecided
    above = [n for n, (m, se) in table.items() if m - 2 * se > eps]
    below = [n for n, (m, se) in table.items() if m + 2 * se < eps]
    lo_n = max(above) + 1 if above else 1
    hi_n = min(below) if below else value
    interval = None if lo_n >= hi_n else (min(lo_n, value), max(hi_n, value))
    return CorrLength(p, eps, value, interval, table)


def log_slope(corr: list) -> float:
    """Least-squares slope of log L against log(p - 1/2)."""
    x = np.log([c.p - 0.5 for c in corr])
    y = np.log([c.value for c in corr])
    return float(np.polyfit(x, y, 1)[0])


def trend_flags(values, stderrs, decreasing: bool = True) -> list:
    """Per consecutive pair: 'pass' if the trend holds, 'warn' if violated within 2 combined
    stderr, 'fail' otherwise."""
    out = []
    for (a, sa), (b, sb) in zip(zip(values, stderrs), zip(values[1:], stderrs[1:])):
        diff = (a - b) if decreasing else (b - a)
        if diff > 0:
            out.append("pass")
        elif -diff <= 2 * math.hypot(sa, sb):
            out.append("warn")
        else:
            out.append("fail")
    return out


def sector_grid(m: int = 3) -> list:
    """theta_j = j pi / (6m), j = 0..m: one fundamental sector of the lattice symmetries."""
    return [j * math.pi / (6 * m) for j in range(m + 1)]


@dataclass
class NuEstimate:
    p_grid: list
    theta_grid: list
    corr: dict                      # p -> CorrLength
    n_used: dict                    # p -> n
    table: dict                     # p -> array of L * mu over theta_grid
    stderr: dict                    # p -> array of stderrs
    samples: dict                   # p -> (reps x thetas) array of L * T / n
    nu: float
    nu_stderr: float
    spread: dict                    # p -> (max - min) / mean
    spread_stderr: dict
    symmetry: dict                  # p -> (|mu(0) - mu(pi/3)|, combined stderr)
    flags: list

    def record(self) -> dict:
        return {"p_grid": self.p_grid, "theta_grid": self.theta_grid,
                "L": {str(p): self.corr[p].value for p in self.p_grid},
                "n": {str(p): self.n_used[p] for p in self.p_grid},
                "table": {str(p): self.table[p].tolist() for p in self.p_grid},
                "stderr": {str(p): self.stderr[p].tolist() for p in self.p_grid},
                "nu": self.nu, "nu_stderr": self.nu_stderr,
                "spread": {str(p): self.spread[p] for p in self.p_grid},
                "spread_stderr": {str(p): self.spread_stderr[p] for p in self.p_grid},
                "flags": self.flags}

    def to_csv(self) -> str:
        head = "p," + ",".join(f"{float(t)!r}" for t in self.theta_grid)
        rows = [f"{p}," + ",".join(f"{float(v)!r}" for v in self.table[p]) for p in self.p_grid]
        return "\n".join([head] + rows) + "\n"


def _spread(row):
    return float((row.max() - row.min()) / row.mean())


def _bootstrap(samples, fn, draws, seed):
    rng = percolation.make_rng(seed, 99)
    reps = samples.shape[0]
    vals = [fn(samples[rng.integers(0, reps, reps)].mean(axis=0)) for _ in range(draws)]
    return float(np.std(vals, ddof=1))


def nu_trend(p_grid, theta_grid=None, n_per_p=None, reps: int = 40, seed: int = 0,
             eps: float = EPS0, corr_reps: int = 200, boot: int = 200, corr=None) -> NuEstimate:
    """Table of L(p) mu_p(e^{i theta}) over p and sector directions.

    ``p_grid`` is ordered toward p_c.  ``n_per_p`` maps p to the segment
    length (default max(16, 4 L(p))).  The direction pi/3 is also measured as
    a symmetry check on theta = 0.
    """
    p_grid = list(p_grid)
    for p in p_grid:
        if not 0.5 < p <= 0.7:
            raise ValueError(f"p={p} outside (1/2, 0.7]: the scaling regime is absent")
    theta_grid = sector_grid() if theta_grid is None else list(theta_grid)
    corr = {} if corr is None else dict(corr)
    n_used, table, stderr, samples, spread, spread_se, sym = {}, {}, {}, {}, {}, {}, {}
    for i, p in enumerate(p_grid):
        if p not in corr:
            corr[p] = correlation_length(p, eps, corr_reps, seed)
        L = corr[p].value
        if n_per_p is None:
            n = max(16, 4 * L)
        else:
            n = int(n_per_p[p]) if isinstance(n_per_p, dict) else int(n_per_p(p)) if callable(n_per_p) else int(n_per_p)
        if n < 4 * L:
            raise ValueError(f"n={n} below 4 L(p)={4 * L} at p={p}")
        n_used[p] = n
        cols = []
        for j, th in enumerate(list(theta_grid) + [math.pi / 3]):
            ns = fpp.mu_estimate(p, th, n, reps, seed + 7919 * (i + 1) + 104729 * j)
            cols.append(np.asarray(ns.values) * L)
        arr = np.stack(cols, axis=1)
        main, check = arr[:, :-1], arr[:, -1]
        samples[p] = main
        table[p] = main.mean(axis=0)
        stderr[p] = main.std(axis=0, ddof=1) / math.sqrt(reps)
        spread[p] = _spread(table[p])
        spread_se[p] = _bootstrap(main, _spread, boot, seed + i)
        sym[p] = (abs(float(table[p][0] - check.mean())),
                  math.hypot(float(stderr[p][0]), float(check.std(ddof=1) / math.sqrt(reps))))
    last = p_grid[-1]
    nu = float(table[last].mean())
    nu_se = float(samples[last].mean(axis=1).std(ddof=1) / math.sqrt(reps))
    flags = trend_flags([spread[p] for p in p_grid], [spread_se[p] for p in p_grid])
    return NuEstimate(p_grid, theta_grid, corr, n_used, table, stderr, samples, nu, nu_se,
                      spread, spread_se, sym, flags)


# -- roundness -----------------------------------------------------------------------------

def norm_from_row(values) -> DirectionalNorm:
    return DirectionalNorm.from_sector(values)


def _row_metrics(values, L, nu):
    norm = norm_from_row(values)
    _, w_hat = wulff.wulff_construct(norm)
    dh = wulff.hausdorff(w_hat, wulff.unit_disk())
    phi = wulff.phi_from_norm(norm)
    return dh, L * phi, L * phi / (2 * math.sqrt(math.pi) * nu)


def roundness_report(tables: dict, nu: float | None = None, samples: dict | None = None,
                     boot: int = 200, seed: int = 0) -> dict:
    """Per p: d_H(W-hat_p, unit-area disk), L phi_p and L phi_p / (2 sqrt(pi) nu).

    ``tables`` maps p (ordered toward p_c) to ``(L, sector values of mu_p)``;
    ``samples`` optionally maps p to replica rows of L * T / n for bootstrap
    errors.  nu defaults to the mean L mu of the last row.
    """
    ps = list(tables)
    if nu is None:
        L, vals = tables[ps[-1]]
        nu = float(L * np.mean(vals))
    rows = {}
    for i, p in enumerate(ps):
        L, vals = tables[p]
        vals = np.asarray(vals, dtype=float)
        dh, lphi, ratio = _row_metrics(vals, L, nu)
        w, _ = wulff.wulff_construct(norm_from_row(vals))
        lw = w.scaled(L)
        row = {"L": L, "dH": dh, "L_phi": lphi, "ratio": ratio,
               "inner_radius": float(lw.support(np.linspace(0, 2 * math.pi, 2881)).min()),
               "outer_radius": float(np.hypot(*lw.vertices.T).max())}
        if samples is not None and p in samples:
            rng = percolation.make_rng(seed, i)
            s = np.asarray(samples[p]) / L
            reps = s.shape[0]
            draws = []
            for _ in range(boot):
                m = s[rng.integers(0, reps, reps)].mean(axis=0)
                draws.append(_row_metrics(m, L, nu))
            draws = np.array(draws)
            row["dH_stderr"] = float(draws[:, 0].std(ddof=1))
            row["ratio_stderr"] = float(draws[:, 2].std(ddof=1))
            row["mu_stderr_rel"] = float((s.std(axis=0, ddof=1) / math.sqrt(reps) / s.mean(axis=0)).max())
        rows[p] = row
    dh_se = [rows[p].get("dH_stderr", 0.0) for p in ps]
    r_se = [rows[p].get("ratio_stderr", 0.0) for p in ps]
    return {"nu": nu, "rows": rows,
            "dH_flags": trend_flags([rows[p]["dH"] for p in ps], dh_se),
            "ratio_flags": trend_flags([abs(rows[p]["ratio"] - 1) for p in ps], r_se)}


def sandwich_check(L: float, values, nu: float, spread: float, stderr: float) -> bool:
    """Disk of radius nu - s inside L W_p inside disk of radius nu + s, s = spread nu + 3 stderr."""
    w, _ = wulff.wulff_construct(norm_from_row(values))
    body = w.scaled(L)
    s = spread * nu + 3 * stderr
    inner = float(body.support(np.linspace(0, 2 * math.pi, 2881)).min())
    outer = float(np.hypot(*body.vertices.T).max())
    return inner >= nu - s - 1e-12 and outer <= nu + s + 1e-12


def curve_check(L: float, values, nu: float, spread: float, stderr: float, curve) -> bool:
    """|L rho_length(curve, beta_p) - nu |curve|| <= (spread + 3 stderr) |curve|."""
    norm = norm_from_row(values)
    eu = wulff.DirectionalNorm.euclidean(norm.K)
    lhs = abs(L * wulff.rho_length(curve, norm) - nu * wulff.rho_length(curve, eu))
    return lhs <= (spread + 3 * stderr) * wulff.rho_length(curve, eu) + 1e-12


def roundness_svg(tables: dict, size: int = 400) -> str:
    """W-hat_p for each p overlaid on the unit-area disk."""
    disk = wulff.unit_disk()
    ext = 1.2 * disk.radius * 1.3
    s = size / (2 * ext)
    parts = [f'<circle cx="{size / 2}" cy="{size / 2}" r="{disk.radius * s:.3f}" fill="none" '
             f'stroke="#888" stroke-dasharray="4 3"/>']
    for i, (p, (L, vals)) in enumerate(tables.items()):
        _, w_hat = wulff.wulff_construct(norm_from_row(vals))
        pts = " ".join(f"{(x + ext) * s:.2f},{(ext - y) * s:.2f}" for x, y in w_hat.vertices)
        shade = int(200 * i / max(1, len(tables) - 1))
        parts.append(f'<polygon points="{pts}" fill="none" stroke="rgb({shade},40,{200 - shade})">'
                     f'<title>p={p}</title></polygon>')
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">'
            + "".join(parts) + "</svg>\n")
