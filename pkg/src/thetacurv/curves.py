"""Plane curves, tangential-angle charts, markers and vertex detection.

Every curve keeps an eagerly built arc-length table (native parameter ``t``
against arc length ``s``).  Segment charts integrate curvature against arc
length; for curves not already in arc length this is done as
``∫ κ |γ'(t)| dt`` over the native parameter, which is the same integral.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (DegenerateAllVertices, EverywhereFlat, OutOfDomain, OutOfRange,
                     OutOfSegment, SingularPoint, StepTooLarge)
from .expr import Expression, compile_jet, compile_scalar
from .numerics import (DEFAULT_TOLERANCES, ToleranceConfig, find_roots, integrate_adaptive, invert_monotone,
                       invert_monotone_newton)

TABLE_N = 2048
THETA_MARGIN = 1e-6
FLAT_KAPPA = 1e-12


def _nodes(lo: float, hi: float, n: int, extra: Sequence[float] = ()) -> list[float]:
    nodes = np.linspace(lo, hi, n + 1).tolist()
    nodes[0], nodes[-1] = lo, hi
    for x in extra:
        i = bisect_right(nodes, x)
        if nodes[i - 1] != x:
            nodes.insert(i, x)
    return nodes


def _interval(nodes: Sequence[float], x: float) -> int:
    i = bisect_right(nodes, x) - 1
    return min(max(i, 0), len(nodes) - 2)


class PlaneCurve:
    """A smooth plane curve on a closed parameter interval.

    Subclasses provide ``velocity``, ``derivatives`` and ``position``.  Arc
    length is measured from ``t_origin`` (0 when the domain contains 0,
    otherwise the lower end).
    """

    kind = "abstract"

    def __init__(self, domain, t_origin=None, base_s=None, cfg: ToleranceConfig | None = None,
                 name=None, parameters=None):
        lo, hi = float(domain[0]), float(domain[1])
        if not lo < hi:
            raise ValueError(f"empty domain ({lo}, {hi})")
        self.domain = (lo, hi)
        if t_origin is None:
            t_origin = 0.0 if lo < 0.0 < hi else lo
        self.t_origin = float(t_origin)
        self.base_s = base_s
        self.cfg = cfg or DEFAULT_TOLERANCES
        self.name = name
        self.parameters = dict(parameters or {})

    # -- local differential data -------------------------------------------------

    def velocity(self, t: float) -> tuple[float, float]:
        raise NotImplementedError

    def derivatives(self, t: float) -> tuple[float, float, float, float, float, float]:
        """(x', y', x'', y'', x''', y''') with respect to the native parameter."""
        raise NotImplementedError

    def position(self, t: float) -> tuple[float, float]:
        raise NotImplementedError

    def speed(self, t: float) -> float:
        x1, y1 = self.velocity(t)
        return math.hypot(x1, y1)

    def turning(self, t: float) -> float:
        """dθ/dt = κ |γ'|; integrating it over t gives ∫ κ ds."""
        x1, y1, x2, y2, _, _ = self.derivatives(t)
        return (x1 * y2 - y1 * x2) / (x1 * x1 + y1 * y1)

    def kappa(self, t: float) -> float:
        x1, y1, x2, y2, _, _ = self.derivatives(t)
        d = x1 * x1 + y1 * y1
        return (x1 * y2 - y1 * x2) / (d * math.sqrt(d))

    def kappa_and_slope(self, t: float) -> tuple[float, float]:
        """Curvature and its arc-length derivative dκ/ds."""
        x1, y1, x2, y2, x3, y3 = self.derivatives(t)
        d = x1 * x1 + y1 * y1
        rd = math.sqrt(d)
        n = x1 * y2 - y1 * x2
        dn = x1 * y3 - y1 * x3
        dd = 2.0 * (x1 * x2 + y1 * y2)
        k = n / (d * rd)
        dk_dt = dn / (d * rd) - 1.5 * n * dd / (d * d * rd)
        return k, dk_dt / rd

    def dkappa_ds(self, t: float) -> float:
        return self.kappa_and_slope(t)[1]

    # -- arc length ----------------------------------------------------------------

    def _build_arc_table(self):
        lo, hi = self.domain
        n = TABLE_N
        for _ in range(2):
            t_nodes = _nodes(lo, hi, n, [self.t_origin])
            speeds = [self.speed(t) for t in t_nodes]
            bad = [t for t, v in zip(t_nodes, speeds) if not v > 1e-12]
            if bad:
                raise SingularPoint(f"|dγ/dt| vanishes near t={bad[0]!r}")
            s = [0.0]
            for a, b in zip(t_nodes, t_nodes[1:]):
                s.append(s[-1] + integrate_adaptive(self.speed, a, b, self.cfg))
            if all(b > a for a, b in zip(s, s[1:])):
                break
            n *= 4
        else:
            raise SingularPoint("arc-length table is not strictly increasing")
        shift = s[t_nodes.index(self.t_origin)]
        self._node_speeds = speeds
        self.t_nodes = t_nodes
        self.s_nodes = [v - shift for v in s]
        self.s_domain = (self.s_nodes[0], self.s_nodes[-1])

    def _check_t(self, t: float) -> float:
        lo, hi = self.domain
        slack = 1e-12 * (1.0 + abs(lo) + abs(hi))
        if not lo - slack <= t <= hi + slack:
            raise OutOfDomain(f"t={t!r} outside the curve domain", self.domain)
        return min(max(t, lo), hi)

    def s_of_t(self, t: float) -> float:
        t = self._check_t(t)
        i = _interval(self.t_nodes, t)
        return self.s_nodes[i] + integrate_adaptive(self.speed, self.t_nodes[i], t, self.cfg)

    def t_of_s(self, s: float) -> float:
        lo, hi = self.s_domain
        slack = 1e-12 * (1.0 + abs(lo) + abs(hi))
        if not lo - slack <= s <= hi + slack:
            raise OutOfDomain(f"s={s!r} outside the curve's arc-length range", self.s_domain)
        s = min(max(s, lo), hi)
        i = _interval(self.s_nodes, s)
        t0, s0 = self.t_nodes[i], self.s_nodes[i]

        def F(t):
            return s0 + integrate_adaptive(self.speed, t0, t, self.cfg)

        return invert_monotone_newton(F, self.speed, s, t0, self.t_nodes[i + 1], s0, self.s_nodes[i + 1],
                                      self._node_speeds[i], self._node_speeds[i + 1], self.cfg)

    def position_at_s(self, s: float) -> tuple[float, float]:
        return self.position(self.t_of_s(s))

    def __repr__(self):
        label = self.name or self.kind
        return f"<{type(self).__name__} {label} on {self.domain}>"


class ParametricCurve(PlaneCurve):
    """Curve given by component expressions x(t), y(t)."""

    kind = "parametric"

    def __init__(self, x: Expression, y: Expression, domain, **kw):
        super().__init__(domain, **kw)
        self.x_expr, self.y_expr = x, y
        self._x, self._y = compile_scalar(x), compile_scalar(y)
        self._xj1, self._yj1 = compile_jet(x, 1), compile_jet(y, 1)
        self._xj3, self._yj3 = compile_jet(x, 3), compile_jet(y, 3)
        self._build_arc_table()

    def velocity(self, t):
        return self._xj1(t)[1], self._yj1(t)[1]

    def derivatives(self, t):
        _, x1, x2, x3 = self._xj3(t)
        _, y1, y2, y3 = self._yj3(t)
        return x1, y1, x2, y2, x3, y3

    def position(self, t):
        return self._x(t), self._y(t)


class IntegratedCurve(PlaneCurve):
    """Curve given by its velocity components; positions come from quadrature.

    ``γ(t) = start + ∫_{t_origin}^t (dx(τ), dy(τ)) dτ``.  Used for the Fresnel,
    elastica and tangential-angle constructions, whose positions have no
    elementary closed form.
    """

    kind = "integrated"

    def __init__(self, dx: Expression, dy: Expression, domain, start_point=(0.0, 0.0), **kw):
        super().__init__(domain, **kw)
        self.dx_expr, self.dy_expr = dx, dy
        self.start_point = (float(start_point[0]), float(start_point[1]))
        self._dx, self._dy = compile_scalar(dx), compile_scalar(dy)
        self._dxj, self._dyj = compile_jet(dx, 2), compile_jet(dy, 2)
        self._build_arc_table()
        self._build_position_table()

    def velocity(self, t):
        return self._dx(t), self._dy(t)

    def speed(self, t):
        return math.hypot(self._dx(t), self._dy(t))

    def derivatives(self, t):
        x1, x2, x3, _ = self._dxj(t)
        y1, y2, y3, _ = self._dyj(t)
        return x1, y1, x2, y2, x3, y3

    def _build_position_table(self):
        px, py = [0.0], [0.0]
        nodes = self.t_nodes
        for a, b in zip(nodes, nodes[1:]):
            px.append(px[-1] + integrate_adaptive(self._dx, a, b, self.cfg))
            py.append(py[-1] + integrate_adaptive(self._dy, a, b, self.cfg))
        k = nodes.index(self.t_origin)
        x0, y0 = self.start_point
        self._px = [x0 + v - px[k] for v in px]
        self._py = [y0 + v - py[k] for v in py]

    def position(self, t):
        t = self._check_t(t)
        i = _interval(self.t_nodes, t)
        a = self.t_nodes[i]
        return (self._px[i] + integrate_adaptive(self._dx, a, t, self.cfg),
                self._py[i] + integrate_adaptive(self._dy, a, t, self.cfg))


class ArcLengthCurve(PlaneCurve):
    """Curve reconstructed from curvature κ(s), already parametrized by arc length.

    The tangent angle ``start_angle + ∫κ`` is tabulated at the nodes and
    interpolated by cubic Hermite splines (slopes are κ itself); positions are
    the quadrature of the unit tangent, computed once in a canonical frame and
    then moved rigidly to ``start_point``/``start_angle``.
    """

    kind = "curvature_s"

    def __init__(self, kappa: Expression, domain, start_point=(0.0, 0.0), start_angle=0.0, **kw):
        super().__init__(domain, **kw)
        self.kappa_expr = kappa
        self.start_point = (float(start_point[0]), float(start_point[1]))
        self.start_angle = float(start_angle)
        self._k = compile_scalar(kappa)
        self._kj = compile_jet(kappa, 1)
        self._ca, self._sa = math.cos(self.start_angle), math.sin(self.start_angle)
        self._build_tables()

    def _build_tables(self):
        lo, hi = self.domain
        nodes = _nodes(lo, hi, TABLE_N, [self.t_origin])
        self.t_nodes = nodes
        self.s_nodes = nodes
        self.s_domain = self.domain
        k0 = nodes.index(self.t_origin)
        phi = [0.0]
        for a, b in zip(nodes, nodes[1:]):
            phi.append(phi[-1] + integrate_adaptive(self._k, a, b, self.cfg))
        self._phi = [v - phi[k0] for v in phi]
        self._slope = [self._k(s) for s in nodes]
        cx, cy = [0.0], [0.0]
        cos_phi = lambda s: math.cos(self._canonical_angle(s))
        sin_phi = lambda s: math.sin(self._canonical_angle(s))
        for a, b in zip(nodes, nodes[1:]):
            cx.append(cx[-1] + integrate_adaptive(cos_phi, a, b, self.cfg))
            cy.append(cy[-1] + integrate_adaptive(sin_phi, a, b, self.cfg))
        self._cx = [v - cx[k0] for v in cx]
        self._cy = [v - cy[k0] for v in cy]

    def _canonical_angle(self, s: float) -> float:
        nodes = self.t_nodes
        i = _interval(nodes, s)
        a, b = nodes[i], nodes[i + 1]
        h = b - a
        u = (s - a) / h
        u2, u3 = u * u, u * u * u
        return ((2 * u3 - 3 * u2 + 1) * self._phi[i] + (u3 - 2 * u2 + u) * h * self._slope[i]
                + (-2 * u3 + 3 * u2) * self._phi[i + 1] + (u3 - u2) * h * self._slope[i + 1])

    def tangent_angle(self, s: float) -> float:
        return self.start_angle + self._canonical_angle(self._check_t(s))

    def s_of_t(self, t):
        return self._check_t(t)

    def t_of_s(self, s):
        return self._check_t(s)

    def speed(self, t):
        return 1.0

    def velocity(self, t):
        phi = self.tangent_angle(t)
        return math.cos(phi), math.sin(phi)

    def derivatives(self, t):
        phi = self.tangent_angle(t)
        c, s = math.cos(phi), math.sin(phi)
        k, dk = self._kj(t)[:2]
        return c, s, -k * s, k * c, -dk * s - k * k * c, dk * c - k * k * s

    def kappa(self, t):
        return self._k(t)

    def kappa_and_slope(self, t):
        k, dk = self._kj(t)[:2]
        return k, dk

    def turning(self, t):
        return self._k(t)

    def position(self, t):
        t = self._check_t(t)
        nodes = self.t_nodes
        i = _interval(nodes, t)
        a = nodes[i]
        px = self._cx[i] + integrate_adaptive(lambda s: math.cos(self._canonical_angle(s)), a, t, self.cfg)
        py = self._cy[i] + integrate_adaptive(lambda s: math.sin(self._canonical_angle(s)), a, t, self.cfg)
        x0, y0 = self.start_point
        return (x0 + self._ca * px - self._sa * py, y0 + self._sa * px + self._ca * py)


# -- frames ----------------------------------------------------------------------

@dataclass(frozen=True)
class FrameSample:
    s: float
    t: float
    position: tuple[float, float]
    tangent: tuple[float, float]
    normal: tuple[float, float]
    kappa: float
    dkappa_ds: float
    theta: float | None = None


def frame_at(curve: PlaneCurve, t: float, segment: "CurveSegment | None" = None,
             theta: float | None = None) -> FrameSample:
    """Position, Frenet frame, κ and dκ/ds at native parameter *t*.

    The normal is the tangent rotated by +90°, so ``de/ds = κ ν``.  When a
    *segment* is given the tangential angle is filled in (or *theta*, if the
    caller already knows it).
    """
    t = curve._check_t(t)
    x1, y1 = curve.velocity(t)
    v = math.hypot(x1, y1)
    if v < 1e-12:
        raise SingularPoint(f"|dγ/dt| = {v!r} at t={t!r}")
    e = (x1 / v, y1 / v)
    k, dk = curve.kappa_and_slope(t)
    if segment is not None and theta is None:
        theta = segment.theta_at_t(t)
    return FrameSample(s=curve.s_of_t(t), t=t, position=curve.position(t), tangent=e,
                       normal=(-e[1], e[0]), kappa=k, dkappa_ds=dk, theta=theta)


def frame_at_s(curve: PlaneCurve, s: float, segment: "CurveSegment | None" = None) -> FrameSample:
    return frame_at(curve, curve.t_of_s(s), segment)


def arc_length(curve: PlaneCurve, t0: float, t1: float) -> float:
    """Signed length of the curve between native parameters *t0* and *t1*."""
    if t0 == t1:
        return 0.0
    return curve.s_of_t(t1) - curve.s_of_t(t0)


# -- segments ----------------------------------------------------------------------

class CurveSegment:
    """An inflection-free stretch of a curve together with its tangential-angle chart.

    ``θ(s) = ∫_c^s κ`` with ``θ(c) = 0``; θ is strictly monotone with the
    sign of κ.  A cumulative θ table at the parent's arc-table nodes makes
    each evaluation a single short quadrature.
    """

    def __init__(self, parent: PlaneCurve, s_range, base_s: float, sign: int, index: int = 0):
        self.parent = parent
        self.s_range = (float(s_range[0]), float(s_range[1]))
        self.base_s = float(base_s)
        self.sign = sign
        self.index = index
        self.cfg = parent.cfg
        self.t_range = (parent.t_of_s(self.s_range[0]), parent.t_of_s(self.s_range[1]))
        self.base_t = parent.t_of_s(self.base_s)
        self._build_theta_table()

    def _build_theta_table(self):
        t_lo, t_hi = self.t_range
        inner = [t for t in self.parent.t_nodes if t_lo < t < t_hi]
        nodes = sorted(set([t_lo, t_hi, self.base_t] + inner))
        cum = [0.0]
        f = self.parent.turning
        self._slopes = [f(t) for t in nodes]
        for a, b in zip(nodes, nodes[1:]):
            cum.append(cum[-1] + integrate_adaptive(f, a, b, self.cfg))
        shift = cum[nodes.index(self.base_t)]
        self._t = nodes
        self._theta = [v - shift for v in cum]
        self._key = [self.sign * v for v in self._theta]
        self.theta_range = (self._theta[0], self._theta[-1])

    @property
    def theta_interval(self) -> tuple[float, float]:
        """theta_range sorted ascending."""
        a, b = self.theta_range
        return (a, b) if a <= b else (b, a)

    def theta_at_t(self, t: float) -> float:
        i = _interval(self._t, t)
        return self._theta[i] + integrate_adaptive(self.parent.turning, self._t[i], t, self.cfg)

    def theta_of_s(self, s: float) -> float:
        lo, hi = self.s_range
        slack = 1e-12 * (1.0 + abs(lo) + abs(hi))
        if not lo - slack <= s <= hi + slack:
            raise OutOfSegment(f"s={s!r} outside segment", self.s_range)
        return self.theta_at_t(self.parent.t_of_s(min(max(s, lo), hi)))

    def t_of_theta(self, theta: float) -> float:
        lo, hi = self.theta_interval
        slack = 1e-12 * (1.0 + abs(lo) + abs(hi))
        if not lo - slack <= theta <= hi + slack:
            raise OutOfRange(f"theta={theta!r} not attained on segment {self.index}", (lo, hi))
        i = _interval(self._key, self.sign * theta)
        t0, th0 = self._t[i], self._theta[i]
        f = self.parent.turning

        def F(t):
            return th0 + integrate_adaptive(f, t0, t, self.cfg)

        return invert_monotone_newton(F, f, theta, t0, self._t[i + 1], th0, self._theta[i + 1],
                                      self._slopes[i], self._slopes[i + 1], self.cfg)

    def s_of_theta(self, theta: float) -> float:
        return self.parent.s_of_t(self.t_of_theta(theta))

    def __repr__(self):
        return (f"<CurveSegment {self.index} s={self.s_range} sign={self.sign:+d} "
                f"theta={self.theta_range}>")


def _kappa_of_s(curve: PlaneCurve):
    if isinstance(curve, ArcLengthCurve):
        return curve.kappa
    return lambda s: curve.kappa(curve.t_of_s(s))


def _grid(lo: float, hi: float, n: int) -> list[float]:
    xs = [lo + (hi - lo) * i / n for i in range(n + 1)]
    xs[-1] = hi
    return xs


def inflections(curve: PlaneCurve, cfg: ToleranceConfig | None = None) -> list[float]:
    """Arc-length stations where κ = 0 (interior of the domain only)."""
    cfg = cfg or curve.cfg
    lo, hi = curve.s_domain
    f = _kappa_of_s(curve)
    values = [f(s) for s in _grid(lo, hi, cfg.grid_n)]
    if all(abs(v) < FLAT_KAPPA for v in values):
        raise EverywhereFlat("curvature vanishes on the whole domain; no tangential-angle chart exists")
    edge = 100.0 * cfg.root_tol
    return [r for r in find_roots(f, lo, hi, cfg, values=values) if lo + edge < r < hi - edge]


def stratify(curve: PlaneCurve, cfg: ToleranceConfig | None = None,
             base_c: float | None = None) -> list[CurveSegment]:
    """Split the curve at its inflections into segments carrying θ-charts.

    The base point of each segment is *base_c* (or the curve's preferred base)
    when it lies in the segment's closed range, otherwise the midpoint.
    """
    cfg = cfg or curve.cfg
    lo, hi = curve.s_domain
    cuts = [lo] + inflections(curve, cfg) + [hi]
    f = _kappa_of_s(curve)
    preferred = base_c if base_c is not None else curve.base_s
    segments = []
    for a, b in zip(cuts, cuts[1:]):
        if b - a <= 100.0 * cfg.root_tol:
            continue
        mid = 0.5 * (a + b)
        k_mid = f(mid)
        if k_mid == 0.0:
            continue
        base = mid
        if preferred is not None and a - 10 * cfg.root_tol <= preferred <= b + 10 * cfg.root_tol:
            base = min(max(preferred, a), b)
        segments.append(CurveSegment(curve, (a, b), base, 1 if k_mid > 0 else -1, len(segments)))
    return segments


def theta_of_s(segment: CurveSegment, s: float) -> float:
    return segment.theta_of_s(s)


def s_of_theta(segment: CurveSegment, theta: float) -> float:
    return segment.s_of_theta(theta)


# -- markers -------------------------------------------------------------------------

@dataclass
class MarkerSet:
    segment: CurveSegment
    delta_theta: float
    markers: list[FrameSample] = field(default_factory=list)
    ks: list[int] = field(default_factory=list)

    def __len__(self):
        return len(self.markers)

    def __iter__(self):
        return iter(self.markers)


def theta_lattice(segment: CurveSegment, delta_theta: float) -> list[int]:
    """Integers k with k·Δθ strictly inside the (slightly shrunk) θ-range."""
    if not delta_theta > 0:
        raise ValueError("delta_theta must be positive")
    lo, hi = segment.theta_interval
    lo, hi = lo + THETA_MARGIN, hi - THETA_MARGIN
    ks = list(range(math.ceil(lo / delta_theta), math.floor(hi / delta_theta) + 1))
    ks = [k for k in ks if lo <= k * delta_theta <= hi]
    if not ks:
        raise StepTooLarge(
            f"no multiple of delta_theta={delta_theta!r} inside theta range {segment.theta_range}")
    return ks


def equal_theta_markers(segment: CurveSegment, delta_theta: float) -> MarkerSet:
    """Frames at every θ = kΔθ inside the segment's chart, ordered by arc length."""
    ks = theta_lattice(segment, delta_theta)
    if segment.sign < 0:
        ks.reverse()
    frames = []
    for k in ks:
        theta = k * delta_theta
        frames.append(frame_at(segment.parent, segment.t_of_theta(theta), segment, theta=theta))
    return MarkerSet(segment, delta_theta, frames, ks)


# -- vertices and the θ-speed identity ---------------------------------------------

def detect_vertices(segment: CurveSegment, cfg: ToleranceConfig | None = None) -> list[FrameSample]:
    """Stations with dκ/ds = 0 on the segment.

    Raises:
        DegenerateAllVertices: if dκ/ds vanishes at every grid point (e.g. circles).
    """
    cfg = cfg or segment.cfg
    curve = segment.parent
    lo, hi = segment.s_range
    if isinstance(curve, ArcLengthCurve):
        f = curve.dkappa_ds
    else:
        f = lambda s: curve.dkappa_ds(curve.t_of_s(s))
    values = [f(s) for s in _grid(lo, hi, cfg.grid_n)]
    if all(abs(v) < 1e-14 for v in values):
        raise DegenerateAllVertices(f"dκ/ds vanishes identically on segment {segment.index}")
    roots = find_roots(f, lo, hi, cfg, values=values)
    return [frame_at(curve, curve.t_of_s(r), segment) for r in roots]


def speed_squared_wrt_theta(segment: CurveSegment, theta: float) -> float:
    """|dγ/dθ|² = 1/κ² at the point with tangential angle *theta*."""
    k = segment.parent.kappa(segment.t_of_theta(theta))
    return 1.0 / (k * k)


class Residual(NamedTuple):
    lhs: float
    rhs: float
    residual: float


def theorem_residual(segment: CurveSegment, theta: float, h: float = 1e-4) -> Residual:
    """Compare d/dθ |dγ/dθ|² (centered difference) with -2 κ'/κ⁴ at *theta*."""
    lo, hi = segment.theta_interval
    if not (lo < theta - h and theta + h < hi):
        raise OutOfRange(f"[theta-h, theta+h] around {theta!r} leaves the chart", (lo, hi))
    lhs = (speed_squared_wrt_theta(segment, theta + h)
           - speed_squared_wrt_theta(segment, theta - h)) / (2.0 * h)
    k, dk = segment.parent.kappa_and_slope(segment.t_of_theta(theta))
    rhs = -2.0 / k ** 4 * dk
    return Residual(lhs, rhs, abs(lhs - rhs))
