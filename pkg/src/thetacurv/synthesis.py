"""Curves built from prescribed curvature, and the built-in example gallery."""

from __future__ import annotations

import math

from .curves import ArcLengthCurve, IntegratedCurve, ParametricCurve, PlaneCurve
from .errors import UnknownBuiltin, VanishingCurvature
from .expr import BinOp, Call, Const, Expression, Neg, Var, compile_scalar, parse, substitute
from .numerics import ToleranceConfig

ELASTICA_LIMIT = 1.0 - 1e-6

BUILTINS = ("circle", "elastica", "euler_spiral", "kappa_1_plus_s2")


def curve_from_curvature_arclength(kappa: Expression | str, domain, start_point=(0.0, 0.0),
                                   start_angle: float = 0.0, cfg: ToleranceConfig | None = None,
                                   **kw) -> ArcLengthCurve:
    """Integrate κ(s) twice: once for the tangent angle, once for position.

    The start point and angle are attached at s = 0 (or the lower end of the
    domain when it does not contain 0).
    """
    if isinstance(kappa, str):
        kappa = parse(kappa, "s")
    return ArcLengthCurve(kappa, domain, start_point=start_point, start_angle=start_angle,
                          cfg=cfg, **kw)


def curve_from_curvature_theta(kappa_of_theta: Expression | str, theta_domain, base_c: float = 0.0,
                               cfg: ToleranceConfig | None = None, **kw) -> IntegratedCurve:
    """Curve parametrized by its tangential angle from κ(θ).

    ``γ(θ) = ∫_{base_c}^θ (cos θ, sin θ) / κ(θ) dθ``, placed so that
    ``γ(base_c)`` is the origin.  For negative κ the parameter runs over
    ``-θ`` so that the traversal follows arc length and the signed
    curvature comes out as κ rather than |κ|.
    """
    if isinstance(kappa_of_theta, str):
        kappa_of_theta = parse(kappa_of_theta, "theta")
    lo, hi = float(theta_domain[0]), float(theta_domain[1])
    k = compile_scalar(kappa_of_theta)
    n = (cfg.grid_n if cfg else 512)
    samples = [k(lo + (hi - lo) * i / n) for i in range(n + 1)]
    if min(abs(v) for v in samples) < 1e-9:
        raise VanishingCurvature("κ(θ) vanishes on the θ domain; 1/κ is singular")
    if (min(samples) < 0.0) != (max(samples) < 0.0):
        raise VanishingCurvature("κ(θ) changes sign on the θ domain")
    name = kappa_of_theta.variable or "theta"
    v = Var(name)
    root = kappa_of_theta.root
    if samples[0] > 0:
        dx = BinOp("/", Call("cos", v), root)
        dy = BinOp("/", Call("sin", v), root)
        domain, origin = (lo, hi), base_c
    else:
        flipped = substitute(root, Neg(v))
        dx = Neg(BinOp("/", Call("cos", Neg(v)), flipped))
        dy = Neg(BinOp("/", Call("sin", Neg(v)), flipped))
        domain, origin = (-hi, -lo), -base_c
    kw.setdefault("name", "theta_form")
    return IntegratedCurve(Expression(dx, name), Expression(dy, name), domain,
                           t_origin=origin, cfg=cfg, **kw)


def _offset(parameters) -> tuple[float, float]:
    off = parameters.get("offset", (0.0, 0.0))
    return float(off[0]), float(off[1])


def builtin_curve(name: str, parameters: dict | None = None,
                  cfg: ToleranceConfig | None = None) -> PlaneCurve:
    """One of the worked-example curves.

    ``circle`` (radius), ``elastica``, ``euler_spiral`` and ``kappa_1_plus_s2``;
    all accept ``offset`` (translation) and ``domain`` overrides.
    """
    p = dict(parameters or {})
    ox, oy = _offset(p)
    common = dict(cfg=cfg, name=name, parameters=p, base_s=0.0)
    if name == "circle":
        r = float(p.get("radius", 1.0))
        domain = p.get("domain", (-math.pi / 12, 23 * math.pi / 12))
        t = Var("t")
        x = BinOp("+", Const(ox), BinOp("*", Const(r), Call("cos", t)))
        y = BinOp("+", Const(oy), BinOp("*", Const(r), Call("sin", t)))
        return ParametricCurve(Expression(x, "t"), Expression(y, "t"), domain, t_origin=0.0, **common)
    if name == "euler_spiral":
        domain = p.get("domain", (-2.5, 2.5))
        return IntegratedCurve(parse("cos(t^2/2)", "t"), parse("sin(t^2/2)", "t"), domain,
                               start_point=(ox, oy), t_origin=0.0, **common)
    if name == "elastica":
        domain = p.get("domain", (-ELASTICA_LIMIT, ELASTICA_LIMIT))
        lo, hi = max(float(domain[0]), -ELASTICA_LIMIT), min(float(domain[1]), ELASTICA_LIMIT)
        return IntegratedCurve(parse("1", "t"), parse("t^2/sqrt(1-t^4)", "t"), (lo, hi),
                               start_point=(ox, oy), t_origin=0.0 if lo < 0 < hi else lo, **common)
    if name == "kappa_1_plus_s2":
        domain = p.get("domain", (-2.0, 2.0))
        return ArcLengthCurve(parse("1+s^2", "s"), domain, start_point=(ox, oy), start_angle=0.0,
                              **common)
    raise UnknownBuiltin(f"unknown builtin curve {name!r}; choose one of {', '.join(BUILTINS)}")


def vertex_radial_factor(theta: float) -> float:
    """Scalar factor R(θ) of the closed form ``R(θ) (cos θ, sin θ)`` for κ(s) = 1 + s².

    ``R = -(∛2 w^{2/3} - 2) / (2^{2/3} ∛w)`` with ``w = √(9θ² + 4) - 3θ > 0``.
    The product ∛2 w^{2/3} is evaluated as ∛(2w²) so that θ = 0 (w = 2)
    cancels exactly.
    """
    w = math.sqrt(9.0 * theta * theta + 4.0) - 3.0 * theta
    return (2.0 - (2.0 * w * w) ** (1.0 / 3.0)) / (2.0 ** (2.0 / 3.0) * w ** (1.0 / 3.0))


def vertex_closed_form(theta: float, offset: float = 0.0) -> tuple[float, float]:
    """``R(θ) (cos θ + offset, sin θ)``; offset 2 gives the revolved profile."""
    r = vertex_radial_factor(theta)
    return r * (math.cos(theta) + offset), r * math.sin(theta)
