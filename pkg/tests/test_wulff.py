import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import ConvexHull

import oracles
from hexiso import wulff
from hexiso.wulff import ConvexBody, DirectionalNorm

SQRT_PI = math.sqrt(math.pi)
UNIT_SQUARE = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)


def _random_body(rng, k=8, lo=0.5, hi=1.5):
    # one angle per sector keeps the origin inside once k >= 5
    ang = 2 * math.pi * (np.arange(k) + rng.uniform(size=k)) / k
    rad = rng.uniform(lo, hi, k)
    pts = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
    return ConvexBody(pts[ConvexHull(pts).vertices])


def _support_norm(body, K):
    th = 2 * math.pi * np.arange(K) / K
    u = np.stack([np.cos(th), np.sin(th)], axis=1)
    return DirectionalNorm((body.vertices @ u.T).max(axis=0))


# -- norms and rho-length -----------------------------------------------------------

def test_norm_exact_on_grid():
    vals = np.linspace(1.0, 2.0, 12)
    nm = DirectionalNorm(vals)
    assert np.array_equal(nm(nm.thetas), vals)
    assert np.allclose(nm(nm.thetas + 2 * math.pi), vals)


def test_norm_rejects_bad_values():
    with pytest.raises(ValueError):
        DirectionalNorm([1.0, 0.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        DirectionalNorm([1.0, 1.0])


def test_rho_length_unit_square():
    assert wulff.rho_length(UNIT_SQUARE, DirectionalNorm.euclidean(), closed=True) == pytest.approx(4.0, abs=1e-12)


def test_rho_length_fine_polygon():
    r = 1.7
    poly = wulff.regular_polygon(4096, r)
    got = wulff.rho_length(poly.loop(), DirectionalNorm.euclidean())
    assert abs(got - 2 * math.pi * r) <= 1e-5 * 2 * math.pi * r


def test_rho_length_homogeneity():
    rng = np.random.default_rng(0)
    nm = DirectionalNorm(rng.uniform(0.5, 2.0, 36))
    pts = rng.normal(size=(20, 2))
    assert wulff.rho_length(pts, nm.scaled(3.0)) == pytest.approx(3.0 * wulff.rho_length(pts, nm), rel=1e-12)


def test_rho_length_skips_repeated_points():
    nm = DirectionalNorm.euclidean(36)
    assert wulff.rho_length([[0, 0], [0, 0], [1, 0]], nm) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        wulff.rho_length([[0, 0]], nm)


def test_from_sector_symmetry():
    nm = DirectionalNorm.from_sector([1.0, 1.1, 1.2, 1.3])
    th = nm.thetas
    assert np.allclose(nm(th + math.pi / 3), nm(th))
    assert np.allclose(nm(-th), nm(th))


# -- Wulff construction --------------------------------------------------------------

@pytest.mark.parametrize("nu", [1.0, 0.37])
def test_constant_norm_gives_disk(nu):
    w, w_hat = wulff.wulff_construct(DirectionalNorm.constant(nu, 720))
    assert wulff.hausdorff(w, wulff.Disk((0.0, 0.0), nu)) <= 1e-4
    assert wulff.hausdorff(w_hat, wulff.unit_disk()) <= 1e-4
    assert w_hat.area == pytest.approx(1.0, abs=1e-9)


def test_euclidean_area_tends_to_pi():
    areas = [wulff.wulff_construct(DirectionalNorm.euclidean(K))[0].area for K in (16, 64, 256, 1024)]
    errs = [a - math.pi for a in areas]
    assert all(e > 0 for e in errs) and errs == sorted(errs, reverse=True)
    assert errs[-1] < 1e-4


def test_hexagonal_wulff_matches_dense_oracle():
    w, w_hat = wulff.wulff_construct(DirectionalNorm.hexagonal(4096))
    phis = np.linspace(0, 2 * math.pi, 721)[:-1]
    dense = oracles.wulff_radial(wulff.hex_norm, phis, np.linspace(0, 2 * math.pi, 4096, endpoint=False))
    got = oracles.polygon_radial(w.vertices, phis)
    assert np.max(np.abs(got - dense)) <= 1e-6
    # 4096 is not a multiple of 6, so facet normals fall between grid directions
    # and the sampled half-planes circumscribe the hexagon by O(2 pi / K)
    hexv = oracles.hexagon_wulff_vertices()
    exact = oracles.polygon_radial(hexv, phis)
    assert np.all(got >= exact - 1e-9)
    assert np.max(got - exact) <= 2 * math.pi / 4096
    assert w_hat.area == pytest.approx(1.0, abs=1e-9)
    # with every facet normal on the grid the construction is exact
    w720, w720_hat = wulff.wulff_construct(DirectionalNorm.hexagonal(720))
    assert len(w720_hat.vertices) == 6
    assert np.allclose(oracles.polygon_radial(w720.vertices, phis), exact, atol=1e-9)
    assert oracles.shoelace(w720_hat.vertices) == pytest.approx(1.0, abs=1e-9)


def test_unbounded_rejected():
    vals = np.ones(16)
    with pytest.raises(ValueError):
        wulff.wulff_construct(DirectionalNorm(vals[:4]))


@settings(max_examples=30)
@given(st.integers(0, 10_000))
def test_wulff_is_dual_ball(seed):
    body = _random_body(np.random.default_rng(seed))
    nm = _support_norm(body, 360)
    w, _ = wulff.wulff_construct(nm)
    u = np.stack([np.cos(nm.thetas), np.sin(nm.thetas)], axis=1)
    sup = (w.vertices @ u.T).max(axis=0)
    assert np.all(sup <= nm.values + 1e-9)
    assert np.allclose(sup, nm.values, atol=1e-9)


def test_sixfold_norm_gives_sixfold_shape():
    rng = np.random.default_rng(3)
    nm = DirectionalNorm(1.0 + 0.02 * rng.uniform(size=720)).symmetrized(6)
    _, w_hat = wulff.wulff_construct(nm)
    c, s = math.cos(math.pi / 3), math.sin(math.pi / 3)
    turned = ConvexBody(w_hat.vertices @ np.array([[c, s], [-s, c]]))
    assert wulff.hausdorff(w_hat, turned) <= 1e-6


# -- Hausdorff distance --------------------------------------------------------------

def test_hausdorff_identical():
    sq = ConvexBody(UNIT_SQUARE)
    assert wulff.hausdorff(sq, sq) == 0.0


def test_hausdorff_nested_squares():
    assert wulff.hausdorff(ConvexBody(UNIT_SQUARE), ConvexBody(2 * UNIT_SQUARE)) == pytest.approx(1.0, abs=1e-9)


def test_hausdorff_concentric_disks_against_sampling():
    t = np.linspace(0, 2 * math.pi, 20_000, endpoint=False)
    inner = np.stack([np.cos(t), np.sin(t)], axis=1)
    outer_t = np.linspace(0, 2 * math.pi, 2_000, endpoint=False)
    outer = 2 * np.stack([np.cos(outer_t), np.sin(outer_t)], axis=1)
    # the inner disk lies inside the outer one; points of the outer circle are
    # nearest to the filled inner disk on its boundary
    frozen = max(np.abs(p - inner).max(axis=1).min() for p in outer)
    assert frozen == pytest.approx(1.0, abs=1e-6)
    got = wulff.hausdorff(wulff.Disk((0, 0), 1.0), wulff.Disk((0, 0), 2.0))
    assert got == pytest.approx(frozen, abs=1e-6)


def test_hausdorff_polygons_against_sampling():
    rng = np.random.default_rng(8)
    for _ in range(5):
        a, b = _random_body(rng), _random_body(rng)
        # the farthest point of a convex body from another lies on a vertex or edge
        ref = oracles.hausdorff_sampled(oracles.sample_polygon_boundary(a.vertices, 400),
                                        oracles.sample_polygon_boundary(b.vertices, 400))
        if all(b.contains(a.vertices)) or all(a.contains(b.vertices)):
            continue
        got = wulff.hausdorff(a, b)
        assert got <= ref + 1e-9
        assert got >= ref - 0.01


def test_hausdorff_metric_option():
    with pytest.raises(ValueError):
        wulff.hausdorff(wulff.unit_disk(), wulff.unit_disk(), metric="l1")
    d = wulff.hausdorff(wulff.Disk((0, 0), 1.0), wulff.Disk((0, 0), 2.0), metric="l2")
    assert d == pytest.approx(1.0, abs=1e-6)


# -- phi -------------------------------------------------------------------------------

def test_phi_euclidean():
    assert wulff.phi_from_norm(DirectionalNorm.euclidean()) == pytest.approx(2 * SQRT_PI, abs=1e-4)


@pytest.mark.parametrize("nu", [0.5, 2.3])
def test_phi_constant(nu):
    assert wulff.phi_from_norm(DirectionalNorm.constant(nu)) == pytest.approx(2 * SQRT_PI * nu, abs=1e-4)


def test_phi_hexagonal_against_analytic_hexagon():
    # the minimizing loop is the unit-area regular hexagon whose sides run along
    # lattice directions, where the graph norm is one per unit length
    side = math.sqrt(2.0 / (3.0 * math.sqrt(3.0)))
    ref = 6 * side
    verts = [(side * math.cos(k * math.pi / 3), side * math.sin(k * math.pi / 3)) for k in range(6)]
    assert oracles.shoelace(verts) == pytest.approx(1.0, abs=1e-12)
    nm = DirectionalNorm.hexagonal(720)
    assert wulff.rho_length(np.array(verts), nm, closed=True) == pytest.approx(ref, abs=1e-9)
    assert wulff.phi_from_norm(nm) == pytest.approx(ref, abs=1e-6)
    # the crystal itself has sides across the lattice directions and is longer
    _, w_hat = wulff.wulff_construct(nm)
    assert wulff.rho_length(w_hat.loop(), nm) > ref + 0.5


@settings(max_examples=40)
@given(st.integers(0, 10_000))
def test_isoperimetric_optimality(seed):
    rng = np.random.default_rng(seed)
    nm = _support_norm(_random_body(rng, lo=0.8, hi=1.2), 720)
    # a norm is even: average the support function with its antipodal copy
    sym = DirectionalNorm(0.5 * (nm.values + np.roll(nm.values, -360)))
    phi = wulff.phi_from_norm(sym)
    body = _random_body(rng, k=int(rng.integers(5, 13))).normalized()
    assert wulff.rho_length(body.loop(), sym) >= phi - 1e-6


def test_phi_grid_refinement_converges():
    f = lambda t: 1.0 + 0.02 * math.cos(6 * t)  # noqa: E731
    ph = [wulff.phi_from_norm(DirectionalNorm.from_function(f, K)) for K in (180, 720, 2880)]
    assert abs(ph[2] - ph[1]) < abs(ph[1] - ph[0])


# -- roundness ---------------------------------------------------------------------------

def test_roundness_square():
    r = wulff.roundness(ConvexBody(UNIT_SQUARE))
    assert r["ratio"] == pytest.approx(math.sqrt(2), abs=1e-6)


def test_roundness_hexagon():
    r = wulff.roundness(wulff.analytic_hexagon_wulff())
    assert r["ratio"] == pytest.approx(2 / math.sqrt(3), abs=1e-6)


def test_roundness_disk():
    r = wulff.roundness(wulff.regular_polygon(20_000, 1.0 / SQRT_PI))
    assert r["ratio"] == pytest.approx(1.0, abs=1e-6)
    assert r["dH_disk"] == pytest.approx(0.0, abs=1e-6)


def test_body_json_roundtrip_and_svg():
    body = wulff.analytic_hexagon_wulff()
    assert '"vertices"' in body.to_json()
    svg = wulff.wulff_svg(body.normalized(), disk=wulff.unit_disk())
    assert svg.startswith("<svg") and "<polygon" in svg
