import math
import random

import pytest

from thetacurv.curves import ParametricCurve, detect_vertices, inflections
from thetacurv.errors import AxisContact, OutOfDomain, OutOfRange
from thetacurv.expr import parse
from thetacurv.surface import (ELLIPTIC, HYPERBOLIC, PARABOLIC, build_mesh, corollary_residual,
                               equal_theta_rings, feature_circles, gaussian_curvature, principal_curvatures,
                               region_classification, revolve)

from conftest import sphere_profile, torus_profile
from oracles import torus_curvatures


@pytest.fixture(scope="module")
def torus():
    return revolve(torus_profile())


@pytest.fixture(scope="module")
def sphere():
    return revolve(sphere_profile())


def _positive(surface):
    return next(s for s in surface.segments if s.sign > 0)


# -- construction --------------------------------------------------------------------

def test_axis_contact():
    with pytest.raises(AxisContact):
        revolve(ParametricCurve(parse("cos(t)", "t"), parse("sin(t)", "t"), (0.0, 3.0)))


def test_point_on_surface(surfaces):
    surf = surfaces["euler"]
    x, z = surf.profile.position_at_s(1.0)
    p = surf.point(1.0, math.pi / 3)
    assert p == pytest.approx((x * 0.5, x * math.sqrt(3) / 2, z), abs=1e-14)


# -- curvature -----------------------------------------------------------------------

def test_sphere_umbilic(sphere):
    k1, k2 = principal_curvatures(sphere, 0.0)
    assert k1 == pytest.approx(1.0, abs=1e-12) and k2 == pytest.approx(1.0, abs=1e-12)
    for s in (-1.2, -0.4, 0.9):
        assert gaussian_curvature(sphere, s) == pytest.approx(1.0, abs=1e-10)
        assert region_classification(sphere, s) == ELLIPTIC


def test_torus_closed_forms(torus):
    lo, hi = torus.s_domain
    for i in range(20):
        v = lo + (hi - lo) * (i + 0.5) / 20
        k1, k2, K = torus_curvatures(3.0, 1.0, v)
        got1, got2 = principal_curvatures(torus, v)
        assert got1 == pytest.approx(k1, abs=1e-8)
        assert got2 == pytest.approx(k2, abs=1e-8)
        assert gaussian_curvature(torus, v) == pytest.approx(K, abs=1e-8)


def test_torus_outermost_and_innermost(torus):
    k1, k2 = principal_curvatures(torus, 0.0)
    assert (k1, k2) == pytest.approx((1.0, 0.25), abs=1e-12)
    assert gaussian_curvature(torus, 0.0) == pytest.approx(0.25, abs=1e-12)
    inner = torus.s_domain[1] - 1e-3
    assert gaussian_curvature(torus, inner) < 0
    assert region_classification(torus, 2.5) == HYPERBOLIC


def test_flat_parallel_has_zero_kappa2(torus):
    assert principal_curvatures(torus, math.pi / 2)[1] == pytest.approx(0.0, abs=1e-12)


def test_flip_normal(torus):
    flipped = revolve(torus.profile, flip_normal=True)
    k1, k2 = principal_curvatures(flipped, 0.3)
    a1, a2 = principal_curvatures(torus, 0.3)
    assert (k1, k2) == (-a1, -a2)
    assert gaussian_curvature(flipped, 0.3) == gaussian_curvature(torus, 0.3)


def test_sample_fields(torus):
    p = torus.sample(0.4, 1.1)
    assert p.K == pytest.approx(p.kappa1 * p.kappa2, abs=1e-12)
    assert math.sqrt(sum(c * c for c in p.normal)) == pytest.approx(1.0, abs=1e-14)
    # the normal is orthogonal to both coordinate directions
    h = 1e-6
    a, b = torus.point(0.4 + h, 1.1), torus.point(0.4 - h, 1.1)
    fs = [(x - y) / (2 * h) for x, y in zip(a, b)]
    assert abs(sum(f * n for f, n in zip(fs, p.normal))) <= 1e-8
    fu = (-math.sin(1.1), math.cos(1.1), 0.0)
    assert abs(sum(f * n for f, n in zip(fu, p.normal))) <= 1e-14


def test_out_of_domain(torus):
    with pytest.raises(OutOfDomain):
        principal_curvatures(torus, 10.0)
    with pytest.raises(OutOfDomain):
        gaussian_curvature(torus, -10.0)


def test_euler_parabolic_at_inflection(surfaces):
    assert gaussian_curvature(surfaces["euler"], 0.0) == 0.0


def test_elastica_gaussian_closed_form(surfaces):
    # γ₁ = x + 2 and d²x/ds² = -2x³ along the elastica, so K = -γ₁''/γ₁ = 2x³/(x + 2)
    surf = surfaces["elastica"]
    for x in [-0.95 + 0.095 * i for i in range(21)]:
        s = surf.profile.s_of_t(x)
        assert gaussian_curvature(surf, s) == pytest.approx(2 * x ** 3 / (x + 2), abs=1e-10)


@pytest.mark.parametrize("name", ["euler", "vertex"])
def test_gaussian_curvature_identity(surfaces, name):
    surf = surfaces[name]
    lo, hi = surf.s_domain
    rng = random.Random(1)
    h = 1e-4
    for _ in range(100):
        s = rng.uniform(lo + 0.02 * (hi - lo), hi - 0.02 * (hi - lo))
        x = [surf.profile.position_at_s(s + d)[0] for d in (-h, 0.0, h)]
        x2 = (x[0] - 2 * x[1] + x[2]) / (h * h)
        assert abs(gaussian_curvature(surf, s) + x2 / x[1]) <= 1e-6


# -- features ------------------------------------------------------------------------

def test_euler_features(surfaces):
    fc = feature_circles(surfaces["euler"])
    assert len(fc.parabolic) == 1
    f = fc.parabolic[0]
    assert abs(f.s) <= 1e-9 and f.cause == "profile_inflection"
    assert fc.ridge == []
    assert region_classification(surfaces["euler"], -0.3) != region_classification(surfaces["euler"], 0.3)


def test_vertex_features(surfaces):
    fc = feature_circles(surfaces["vertex"])
    assert len(fc.ridge) == 1 and abs(fc.ridge[0].s) <= 1e-9
    assert fc.ridge[0].cause == "profile_vertex"
    assert all(f.cause == "parallel_flat" for f in fc.parabolic)


def test_torus_features(torus):
    fc = feature_circles(torus)
    assert fc.parabolic_s == pytest.approx([-math.pi / 2, math.pi / 2], abs=1e-9)
    assert {f.cause for f in fc.parabolic} == {"parallel_flat"}
    assert fc.degenerate_ridges


@pytest.mark.parametrize("name", ["euler", "vertex", "elastica"])
def test_fact_stations_found(surfaces, name):
    surf = surfaces[name]
    fc = feature_circles(surf)
    tol = surf.cfg.root_tol
    for r in inflections(surf.profile):
        assert any(abs(r - p) <= tol for p in fc.parabolic_s)
    for seg in surf.segments:
        for v in detect_vertices(seg):
            assert any(abs(v.s - r) <= tol for r in fc.ridge_s)
    assert fc.parabolic_s == sorted(fc.parabolic_s)
    lo, hi = surf.s_domain
    assert all(lo <= s <= hi for s in fc.parabolic_s + fc.ridge_s)


# -- rings and the corollary ---------------------------------------------------------

def test_euler_rings(surfaces):
    rings = equal_theta_rings(surfaces["euler"], 0.5)
    positive = [r for r in rings if r[0] > 0]
    assert [r[0] for r in positive] == pytest.approx([math.sqrt(k) for k in range(1, len(positive) + 1)], abs=1e-12)
    assert [r[1] for r in positive] == pytest.approx([0.5 * k for k in range(1, len(positive) + 1)], abs=1e-15)
    assert [r[0] for r in rings] == sorted(r[0] for r in rings)


def test_sphere_rings_equally_spaced(sphere):
    rings = equal_theta_rings(sphere, math.pi / 12)
    gaps = [b[0] - a[0] for a, b in zip(rings, rings[1:])]
    assert gaps == pytest.approx([math.pi / 12] * len(gaps), abs=1e-12)


@pytest.mark.parametrize("name", ["euler", "vertex", "elastica"])
def test_ring_spacing_law(surfaces, name):
    surf = surfaces[name]
    dtheta = 0.05
    rings = equal_theta_rings(surf, dtheta)
    for a, b in zip(rings, rings[1:]):
        if a[2] != b[2]:
            continue
        k1 = principal_curvatures(surf, 0.5 * (a[0] + b[0]))[0]
        assert abs((b[0] - a[0]) * abs(k1) - dtheta) <= 0.05 * dtheta


def test_ring_spacing_widest_at_ridge(surfaces):
    # κ1 = 1 + s² is smallest on the ridge, so the parallels are furthest apart there
    rings = equal_theta_rings(surfaces["vertex"], 0.25)
    gaps = [(b[0] - a[0], a[0], b[0]) for a, b in zip(rings, rings[1:])]
    widest = max(gaps)
    assert widest[1] <= 0.0 <= widest[2]


def test_corollary_examples(surfaces, sphere):
    r = corollary_residual(surfaces["euler"], 0.5, _positive(surfaces["euler"]).index)
    assert r.lhs == pytest.approx(-2.0, abs=1e-4) and r.rhs == pytest.approx(-2.0, abs=1e-4)
    r = corollary_residual(sphere, 0.3, 0)
    assert abs(r.lhs) <= 1e-9 and abs(r.rhs) <= 1e-12
    r = corollary_residual(surfaces["vertex"], 0.0, 0)
    assert r.rhs == 0.0 and abs(r.lhs) <= 1e-6


def test_corollary_independent_of_u(surfaces):
    seg = _positive(surfaces["euler"]).index
    a = corollary_residual(surfaces["euler"], 1.0, seg, u=0.0)
    b = corollary_residual(surfaces["euler"], 1.0, seg, u=2.1)
    assert a.lhs == pytest.approx(b.lhs, abs=1e-9)


def test_corollary_out_of_range(surfaces):
    with pytest.raises(OutOfRange):
        corollary_residual(surfaces["euler"], 100.0, 1)


@pytest.mark.parametrize("name", ["euler", "vertex", "elastica"])
def test_corollary_identity(surfaces, name):
    surf = surfaces[name]
    rng = random.Random(42)
    for seg in surf.segments:
        lo, hi = seg.theta_interval
        for _ in range(50):
            th = rng.uniform(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo))
            r = corollary_residual(surf, th, seg.index)
            assert r.residual <= 1e-6 * (1 + abs(r.rhs))


# -- meshes --------------------------------------------------------------------------

def test_sphere_mesh_structure(sphere):
    lo, hi = sphere.s_domain
    stations = [lo + (hi - lo) * (i + 0.5) / 12 for i in range(12)]
    mesh = build_mesh(sphere, stations, u_count=24, include_faces=True)
    assert len(mesh.vertices) == 288
    assert len(mesh.rings) == 12 and all(len(r) == 24 for r in mesh.rings)
    assert len(mesh.meridians) == 24 and all(len(m) == 12 for m in mesh.meridians)
    assert len(mesh.faces) == 11 * 24
    assert set(mesh.vertex_regions) == {ELLIPTIC}
    assert mesh.feature_rings == []


@pytest.mark.parametrize("name", ["euler", "vertex", "elastica"])
def test_rings_planar_and_circular(surfaces, name):
    surf = surfaces[name]
    mesh = build_mesh(surf, equal_theta_rings(surf, 0.25), u_count=32)
    for loop, info in zip(mesh.rings, mesh.ring_info):
        pts = [mesh.vertices[i] for i in loop]
        zbar = sum(p[2] for p in pts) / len(pts)
        gamma1 = surf.profile.position_at_s(info.s)[0]
        assert max(abs(p[2] - zbar) for p in pts) <= 1e-9
        assert max(abs(math.hypot(p[0], p[1]) - gamma1) for p in pts) <= 1e-9


def test_euler_mesh_regions_flip_once(surfaces):
    surf = surfaces["euler"]
    mesh = build_mesh(surf, equal_theta_rings(surf, 0.25), u_count=16)
    regions = [r.region for r in mesh.ring_info]
    features = mesh.feature_rings
    assert len(features) == 1 and features[0][1] == PARABOLIC
    k = features[0][0]
    assert regions[k] == PARABOLIC
    assert set(regions[:k]) == {HYPERBOLIC} and set(regions[k + 1:]) == {ELLIPTIC}


def test_vertex_mesh_single_ridge(surfaces):
    surf = surfaces["vertex"]
    mesh = build_mesh(surf, equal_theta_rings(surf, 0.25), u_count=16)
    ridges = [k for k, tag in mesh.feature_rings if tag == "ridge"]
    assert len(ridges) == 1
    assert abs(mesh.ring_info[ridges[0]].s) <= 1e-9


def test_feature_merges_with_existing_ring(sphere):
    surf = revolve(torus_profile())
    stations = [-1.0, math.pi / 2 + 5e-10, 1.8]
    mesh = build_mesh(surf, stations, u_count=8)
    assert len(mesh.rings) == 4  # -π/2 inserted, +π/2 merged
    assert [tag for _, tag in mesh.feature_rings] == [PARABOLIC, PARABOLIC]


def test_mesh_rejects_bad_input(sphere):
    with pytest.raises(ValueError):
        build_mesh(sphere, [0.0, 0.1], u_count=2)
    with pytest.raises(ValueError):
        build_mesh(sphere, [0.0], u_count=8)
