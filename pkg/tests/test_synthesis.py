import math
import random

import pytest

from thetacurv.curves import frame_at, stratify
from thetacurv.errors import UnknownBuiltin, VanishingCurvature
from thetacurv.expr import evaluate, parse
from thetacurv.synthesis import (ELASTICA_LIMIT, builtin_curve, curve_from_curvature_arclength,
                                 curve_from_curvature_theta, vertex_closed_form, vertex_radial_factor)

from conftest import positive_segment
from oracles import curvature_from_positions, procrustes_rms, s_of_theta_cubic, translation_rms

# κ(θ) of the κ = 1 + s² curve, with s(θ) the real root of s + s³/3 = θ written via asinh
VERTEX_KAPPA_THETA = "1 + (2*sinh(log(1.5*theta + sqrt(2.25*theta^2 + 1))/3))^2"

PRESCRIBED = ["1", "s", "1+s^2", "2+sin(s)"]


@pytest.mark.parametrize("kappa", PRESCRIBED)
def test_reconstruction_round_trip(kappa):
    curve = curve_from_curvature_arclength(kappa, (-2.0, 2.0), (0.3, -0.2), 0.4)
    expr = parse(kappa, "s")
    rng = random.Random(5)
    for _ in range(50):
        s = rng.uniform(-1.9, 1.9)
        want = evaluate(expr, s)
        got = curvature_from_positions(curve.position_at_s, s)
        assert abs(got - want) <= 1e-6 * (1 + abs(want))


def test_unit_circle_from_constant_curvature():
    curve = curve_from_curvature_arclength("1", (-math.pi, math.pi), (0.0, -1.0), 0.0)
    for s in (-3.0, -1.0, 0.0, 0.5, 2.0):
        x, y = curve.position_at_s(s)
        assert x == pytest.approx(math.sin(s), abs=1e-12)
        assert y == pytest.approx(-math.cos(s), abs=1e-12)


def test_euler_spiral_from_linear_curvature(curves):
    built = curve_from_curvature_arclength("s", (-2.5, 2.5))
    ref = curves["euler_spiral"]
    for s in (-2.4, -1.0, 0.3, 1.7, 2.4):
        assert built.position_at_s(s) == pytest.approx(ref.position_at_s(s), abs=1e-10)


def test_rigid_motion_covariance():
    a = curve_from_curvature_arclength("2+sin(s)", (-2.0, 2.0))
    phi, (tx, ty) = 0.9, (1.5, -2.0)
    b = curve_from_curvature_arclength("2+sin(s)", (-2.0, 2.0), (tx, ty), phi)
    c, s_ = math.cos(phi), math.sin(phi)
    for s in [-2.0 + 0.1 * i for i in range(41)]:
        x, y = a.position_at_s(s)
        bx, by = b.position_at_s(s)
        assert abs(bx - (c * x - s_ * y + tx)) <= 1e-12
        assert abs(by - (s_ * x + c * y + ty)) <= 1e-12


# -- θ form --------------------------------------------------------------------------

def test_theta_form_unit_circle():
    curve = curve_from_curvature_theta("1", (0.0, 2 * math.pi))
    for th in (0.5, 2.0, 4.0):
        f = frame_at(curve, th)
        assert f.kappa == pytest.approx(1.0, abs=1e-12)
        x, y = curve.position(th)
        # centre sits at (0, 1) since γ(0) = 0 with tangent (1, 0)
        assert math.hypot(x, y - 1.0) == pytest.approx(1.0, abs=1e-10)


def test_theta_form_tangent_angle_is_parameter():
    curve = curve_from_curvature_theta("2+cos(theta)", (-1.0, 1.0))
    for th in (-0.8, 0.0, 0.6):
        e = frame_at(curve, th).tangent
        assert math.atan2(e[1], e[0]) == pytest.approx(th, abs=1e-14)


def test_theta_form_recomputed_curvature():
    expr = parse("2+cos(theta)", "theta")
    curve = curve_from_curvature_theta(expr, (-1.0, 1.0))
    for th in [-0.9 + 0.1 * i for i in range(19)]:
        assert frame_at(curve, th).kappa == pytest.approx(evaluate(expr, th), abs=1e-9)


def test_theta_form_negative_curvature():
    curve = curve_from_curvature_theta("-2", (0.0, 1.0))
    f = frame_at(curve, curve.domain[0] + 0.3)
    assert f.kappa == pytest.approx(-2.0, abs=1e-12)


def test_theta_form_sqrt_matches_euler_spiral():
    # κ(θ) = √(2θ) belongs to κ(s) = s with θ = s²/2
    curve = curve_from_curvature_theta("sqrt(2*theta)", (0.1, 4.0), base_c=0.1)
    thetas = [0.1 + 3.9 * (i + 0.5) / 50 for i in range(50)]
    a = [curve.position(th) for th in thetas]
    ref = builtin_curve("euler_spiral", {"domain": (-3, 3)})
    b = [ref.position_at_s(math.sqrt(2 * th)) for th in thetas]
    assert procrustes_rms(a, b) <= 1e-6


def test_vanishing_curvature():
    with pytest.raises(VanishingCurvature):
        curve_from_curvature_theta("theta", (-1.0, 1.0))
    with pytest.raises(VanishingCurvature):
        curve_from_curvature_theta("sin(theta)", (0.5, 5.0))


def test_theta_form_congruent_with_arclength_form():
    theta_curve = curve_from_curvature_theta(VERTEX_KAPPA_THETA, (-2.0, 2.0))
    s_curve = curve_from_curvature_arclength("1+s^2", (-1.5, 1.5))
    thetas = [-2.0 + 4.0 * (i + 0.5) / 60 for i in range(60)]
    a = [theta_curve.position(th) for th in thetas]
    b = [s_curve.position_at_s(s_of_theta_cubic(th)) for th in thetas]
    assert procrustes_rms(a, b) <= 1e-6
    # both place the base point at the origin with a horizontal tangent, so no rotation is needed
    assert translation_rms(a, b) <= 1e-6


# -- closed form of the κ = 1 + s² curve ---------------------------------------------

def test_radial_factor_zero_at_origin():
    assert vertex_radial_factor(0.0) == 0.0


def test_radial_factor_equals_inverse_of_theta():
    for th in [-2.0 + 0.05 * i for i in range(81)]:
        assert vertex_radial_factor(th) == pytest.approx(s_of_theta_cubic(th), abs=1e-12)


def test_closed_form_is_polar_curve():
    x, y = vertex_closed_form(1.0)
    r = vertex_radial_factor(1.0)
    assert (x, y) == pytest.approx((r * math.cos(1.0), r * math.sin(1.0)), abs=1e-15)
    assert vertex_closed_form(1.0, offset=2.0)[0] == pytest.approx(r * (math.cos(1.0) + 2), abs=1e-15)


# -- builtins ------------------------------------------------------------------------

def test_builtin_euler_curvature_is_arclength(curves):
    c = curves["euler_spiral"]
    for s in (-2.0, -0.5, 0.7, 2.2):
        assert frame_at(c, c.t_of_s(s)).kappa == pytest.approx(s, abs=1e-12)


def test_builtin_elastica_chart(segments, curves):
    seg = positive_segment(segments["elastica"])
    x = 1 / math.sqrt(2)
    s = curves["elastica"].s_of_t(x)
    assert seg.theta_of_s(s) == pytest.approx(math.pi / 6, abs=1e-10)
    assert curves["elastica"].domain == (-ELASTICA_LIMIT, ELASTICA_LIMIT)


def test_builtin_elastica_split_at_zero(segments):
    segs = segments["elastica"]
    assert len(segs) == 2
    assert abs(segs[0].s_range[1]) <= 1e-12


def test_builtin_circle_radius():
    c = builtin_curve("circle", {"radius": 2.0})
    assert frame_at(c, 0.4).kappa == pytest.approx(0.5, abs=1e-14)


def test_builtin_offset():
    a = builtin_curve("kappa_1_plus_s2")
    b = builtin_curve("kappa_1_plus_s2", {"offset": (2, 0)})
    for s in (-1.0, 0.5):
        ax, ay = a.position_at_s(s)
        assert b.position_at_s(s) == pytest.approx((ax + 2, ay), abs=1e-15)


def test_unknown_builtin():
    with pytest.raises(UnknownBuiltin):
        builtin_curve("trefoil")
