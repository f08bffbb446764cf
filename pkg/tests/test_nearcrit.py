import math

import numpy as np
import pytest

import oracles
from hexiso import nearcrit, wulff


def test_corr_length_far_supercritical():
    c = nearcrit.correlation_length(0.99, reps=200, seed=0)
    assert c.value in (1, 2)
    assert c.lo <= c.value <= c.hi


def test_corr_length_preconditions():
    with pytest.raises(ValueError):
        nearcrit.correlation_length(1.0)
    with pytest.raises(ValueError):
        nearcrit.correlation_length(0.5)
    with pytest.raises(ValueError):
        nearcrit.correlation_length(0.7, eps=0.5)
    with pytest.raises(nearcrit.OutOfRange):
        nearcrit.correlation_length(0.55, reps=50, n_max=2)


def test_corr_length_nonincreasing_in_p():
    cs = [nearcrit.correlation_length(p, reps=100, seed=3) for p in (0.55, 0.6, 0.7)]
    for a, b in zip(cs, cs[1:]):
        # within overlapping intervals a crossing of the trend is tolerated
        assert b.lo <= a.hi
    assert cs[-1].value <= cs[0].value


def test_corr_length_table_brackets_eps():
    c = nearcrit.correlation_length(0.7, reps=100, seed=1)
    m, _ = c.table[c.value]
    assert m <= nearcrit.EPS0
    if c.value > 1 and c.value - 1 in c.table:
        assert c.table[c.value - 1][0] > nearcrit.EPS0


def test_corr_length_ignores_small_box_dip():
    # at this seed P(1) dips just below eps while P(2) is above it
    c = nearcrit.correlation_length(0.61, reps=400, seed=0)
    assert c.table[1][0] <= nearcrit.EPS0 < c.table[2][0]
    assert c.value > 2
    assert all(m <= nearcrit.EPS0 for n, (m, _) in c.table.items() if n >= c.value)


def test_trend_flags():
    assert nearcrit.trend_flags([3.0, 2.0, 1.0], [0.1, 0.1, 0.1]) == ["pass", "pass"]
    assert nearcrit.trend_flags([1.0, 1.1], [0.1, 0.1]) == ["warn"]
    assert nearcrit.trend_flags([1.0, 2.0], [0.1, 0.1]) == ["fail"]
    assert nearcrit.trend_flags([1.0, 2.0], [0.1, 0.1], decreasing=False) == ["pass"]


def test_log_slope_recovers_power_law():
    cs = [nearcrit.CorrLength(p, 0.25, round(1000 * (p - 0.5) ** -1.5), None) for p in (0.52, 0.56, 0.6, 0.7)]
    assert nearcrit.log_slope(cs) == pytest.approx(-1.5, abs=0.01)


def test_sector_grid():
    g = nearcrit.sector_grid(3)
    assert g[0] == 0.0 and g[-1] == pytest.approx(math.pi / 6) and len(g) == 4


def test_nu_trend_rejects_full_density():
    with pytest.raises(ValueError):
        nearcrit.nu_trend([1.0])
    with pytest.raises(ValueError):
        nearcrit.nu_trend([0.9])


def test_nu_trend_small_run():
    corr = {0.7: nearcrit.CorrLength(0.7, 0.25, 3, None)}
    est = nearcrit.nu_trend([0.7], reps=20, seed=2, corr=corr, boot=50)
    assert est.n_used[0.7] == 16
    row = est.table[0.7]
    assert len(row) == 4 and np.all(row > 0)
    assert est.spread[0.7] >= 0
    diff, se = est.symmetry[0.7]
    assert diff <= 3 * se
    assert est.nu == pytest.approx(float(row.mean()))
    with pytest.raises(ValueError):
        nearcrit.nu_trend([0.7], reps=4, corr=corr, n_per_p=8)


def test_roundness_constant_norm_identity():
    tables = {0.6: (5, np.full(31, 0.2)), 0.55: (10, np.full(31, 0.1))}
    rep = nearcrit.roundness_report(tables)
    for row in rep["rows"].values():
        assert row["dH"] <= 1e-3
        assert row["ratio"] == pytest.approx(1.0, abs=1e-3)


def _hexagon_vs_disk_oracle():
    side = math.sqrt(2.0 / (3.0 * math.sqrt(3.0)))
    hexv = [(side * math.cos(math.pi / 6 + k * math.pi / 3), side * math.sin(math.pi / 6 + k * math.pi / 3))
            for k in range(6)]
    hb = oracles.sample_polygon_boundary(hexv, 4000)
    t = np.linspace(0, 2 * math.pi, 24_000, endpoint=False)
    r = 1 / math.sqrt(math.pi)
    db = r * np.stack([np.cos(t), np.sin(t)], axis=1)
    # a point outside a filled convex body is nearest to it on its boundary
    out_h = hb[np.hypot(hb[:, 0], hb[:, 1]) > r]
    out_d = db[wulff.ConvexBody(np.array(hexv)).contains(db) == 0]
    a = max(np.abs(p - db).max(axis=1).min() for p in out_h)
    b = max(np.abs(p - hb).max(axis=1).min() for p in out_d)
    return max(a, b)


def test_roundness_hexagonal_norm():
    vals = [wulff.hex_norm(t) for t in nearcrit.sector_grid(3)]
    rep = nearcrit.roundness_report({0.6: (1, vals)}, nu=1.0)
    assert rep["rows"][0.6]["dH"] == pytest.approx(_hexagon_vs_disk_oracle(), abs=1e-4)


def test_roundness_flags_and_bootstrap():
    rng = np.random.default_rng(0)
    base = np.array([1.0, 0.96, 0.93, 0.92])
    tables, samples = {}, {}
    for p, amp, L in ((0.6, 0.2, 4), (0.55, 0.1, 8), (0.52, 0.02, 16)):
        vals = 0.25 * (1 + amp * (base - base.mean()) / base.mean())
        rows = vals[None, :] * (1 + 0.001 * rng.normal(size=(30, 4)))
        tables[p] = (L, rows.mean(axis=0))
        samples[p] = L * rows
    rep = nearcrit.roundness_report(tables, samples=samples, boot=50)
    assert rep["dH_flags"] == ["pass", "pass"]
    assert all("dH_stderr" in r for r in rep["rows"].values())


def test_sandwich_and_curve_checks():
    vals = np.full(31, 0.25)
    L, nu = 4, 1.0
    assert nearcrit.sandwich_check(L, vals, nu, 0.0, 0.01)
    assert not nearcrit.sandwich_check(L, 1.2 * vals, nu, 0.0, 0.01)
    square = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], dtype=float)
    assert nearcrit.curve_check(L, vals, nu, 0.0, 0.0, square)
    assert not nearcrit.curve_check(L, 1.2 * vals, nu, 0.05, 0.0, square)


def test_roundness_svg():
    svg = nearcrit.roundness_svg({0.6: (1, [1.0, 1.0, 1.0, 1.0])})
    assert svg.startswith("<svg") and "p=0.6" in svg
