"""Surfaces of revolution about the z-axis, their curvature and curvature-line meshes.

The profile ``(γ₁(s), γ₂(s))`` lives in the xz-plane and
``f(s, u) = (γ₁ cos u, γ₁ sin u, γ₂)``.  Meridians and parallels are
curvature lines; the parallels are placed at equal steps of the profile's
tangential angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .curves import (ArcLengthCurve, CurveSegment, PlaneCurve, Residual, stratify,
                     theta_lattice)
from .errors import AxisContact, OutOfDomain, OutOfRange
from .numerics import ToleranceConfig, find_roots

R_MIN = 1e-6
PARABOLIC_K = 1e-9

ELLIPTIC, HYPERBOLIC, PARABOLIC = "elliptic", "hyperbolic", "parabolic"


@dataclass(frozen=True)
class SurfacePointSample:
    s: float
    u: float
    position: tuple[float, float, float]
    normal: tuple[float, float, float]
    kappa1: float
    kappa2: float
    K: float
    region: str


@dataclass(frozen=True)
class FeatureStation:
    s: float
    kind: str  # "parabolic" | "ridge"
    cause: str  # profile_inflection | parallel_flat | profile_vertex


@dataclass
class FeatureCircles:
    parabolic: list[FeatureStation] = field(default_factory=list)
    ridge: list[FeatureStation] = field(default_factory=list)
    degenerate_ridges: bool = False

    @property
    def parabolic_s(self) -> list[float]:
        return [f.s for f in self.parabolic]

    @property
    def ridge_s(self) -> list[float]:
        return [f.s for f in self.ridge]


class SurfaceOfRevolution:
    """Profile curve revolved about the z-axis.

    ``flip_normal`` reverses the unit normal and with it the sign of both
    principal curvatures (K is unchanged).
    """

    def __init__(self, profile: PlaneCurve, cfg: ToleranceConfig | None = None,
                 flip_normal: bool = False, base_c: float | None = None):
        self.profile = profile
        self.cfg = cfg or profile.cfg
        self.orientation = -1.0 if flip_normal else 1.0
        xs = [profile.position(t)[0] for t in profile.t_nodes]
        i = min(range(len(xs)), key=xs.__getitem__)
        if xs[i] <= R_MIN:
            raise AxisContact(
                f"profile reaches the axis (gamma_1 = {xs[i]!r} at t = {profile.t_nodes[i]!r})")
        self.segments: list[CurveSegment] = stratify(profile, self.cfg, base_c=base_c)
        self.s_domain = profile.s_domain

    def _t(self, s: float) -> float:
        lo, hi = self.s_domain
        if not lo - 1e-12 <= s <= hi + 1e-12:
            raise OutOfDomain(f"s={s!r} outside the profile", self.s_domain)
        return self.profile.t_of_s(min(max(s, lo), hi))

    def _local(self, s: float):
        """(γ₁, γ₂, γ₁', γ₂', κ, dκ/ds) at arc length s."""
        p = self.profile
        t = self._t(s)
        x, z = p.position(t)
        vx, vz = p.velocity(t)
        v = math.hypot(vx, vz)
        k, dk = p.kappa_and_slope(t)
        return x, z, vx / v, vz / v, k, dk

    def point(self, s: float, u: float) -> tuple[float, float, float]:
        x, z = self.profile.position(self._t(s))
        return (x * math.cos(u), x * math.sin(u), z)

    def sample(self, s: float, u: float = 0.0) -> SurfacePointSample:
        x, z, dx, dz, k, _ = self._local(s)
        o = self.orientation
        k1, k2 = o * k, o * dz / x
        K = k1 * k2
        cu, su = math.cos(u), math.sin(u)
        normal = (-o * dz * cu, -o * dz * su, o * dx)
        return SurfacePointSample(s, u, (x * cu, x * su, z), normal, k1, k2, K, _classify(K))

    def segment(self, segment_id: int) -> CurveSegment:
        return self.segments[segment_id]


def _classify(K: float) -> str:
    if abs(K) < PARABOLIC_K:
        return PARABOLIC
    return ELLIPTIC if K > 0 else HYPERBOLIC


def revolve(profile: PlaneCurve, cfg: ToleranceConfig | None = None,
            flip_normal: bool = False, base_c: float | None = None) -> SurfaceOfRevolution:
    return SurfaceOfRevolution(profile, cfg, flip_normal, base_c)


def principal_curvatures(surface: SurfaceOfRevolution, s: float) -> tuple[float, float]:
    """(κ1, κ2): meridian curvature and parallel curvature γ₂'/γ₁."""
    x, _, _, dz, k, _ = surface._local(s)
    o = surface.orientation
    return o * k, o * dz / x


def gaussian_curvature(surface: SurfaceOfRevolution, s: float) -> float:
    k1, k2 = principal_curvatures(surface, s)
    return k1 * k2


def region_classification(surface: SurfaceOfRevolution, s: float) -> str:
    return _classify(gaussian_curvature(surface, s))


def _profile_fn(surface: SurfaceOfRevolution, fn):
    p = surface.profile
    if isinstance(p, ArcLengthCurve):
        return lambda s: fn(p, s)
    return lambda s: fn(p, p.t_of_s(s))


def feature_circles(surface: SurfaceOfRevolution, cfg: ToleranceConfig | None = None) -> FeatureCircles:
    """Parabolic circles (K = 0) and ridge circles (dκ1/ds = 0) by arc-length station.

    K = κ1 κ2 vanishes exactly where κ1 does (profile inflections) or where
    γ₂' does (horizontal tangent, the parallel flattens), so the two factors
    are searched separately and each root tagged with its cause.  When κ1 is
    constant every parallel is a ridge; that case is flagged instead of listed.
    """
    cfg = cfg or surface.cfg
    lo, hi = surface.s_domain
    edge = 100.0 * cfg.root_tol
    k1 = _profile_fn(surface, lambda p, t: p.kappa(t))
    dz = _profile_fn(surface, lambda p, t: p.velocity(t)[1] / p.speed(t))
    dk1 = _profile_fn(surface, lambda p, t: p.kappa_and_slope(t)[1])

    found: list[FeatureStation] = []
    for r in find_roots(k1, lo, hi, cfg):
        if lo + edge < r < hi - edge:
            found.append(FeatureStation(r, PARABOLIC, "profile_inflection"))
    for r in find_roots(dz, lo, hi, cfg):
        if lo + edge < r < hi - edge and all(abs(r - f.s) > 10 * cfg.root_tol for f in found):
            found.append(FeatureStation(r, PARABOLIC, "parallel_flat"))
    found.sort(key=lambda f: f.s)

    n = cfg.grid_n
    grid = [lo + (hi - lo) * i / n for i in range(n + 1)]
    values = [dk1(s) for s in grid]
    ridges: list[FeatureStation] = []
    degenerate = all(abs(v) < 1e-14 for v in values)
    if not degenerate:
        ridges = [FeatureStation(r, "ridge", "profile_vertex")
                  for r in find_roots(dk1, lo, hi, cfg, values=values)]
    return FeatureCircles(found, ridges, degenerate)


def equal_theta_rings(surface: SurfaceOfRevolution, delta_theta: float) -> list[tuple[float, float, int]]:
    """(s, θ, segment id) for every parallel at θ = kΔθ, ordered by s."""
    rings = []
    for seg in surface.segments:
        for k in theta_lattice(seg, delta_theta):
            theta = k * delta_theta
            rings.append((seg.s_of_theta(theta), theta, seg.index))
    rings.sort()
    return rings


def meridian_speed_squared(surface: SurfaceOfRevolution, segment: CurveSegment,
                           theta: float, u: float = 0.0) -> float:
    """|∂f/∂θ|² along the meridian at angle *u*: |∂f/∂s|² (ds/dθ)²."""
    p = surface.profile
    t = segment.t_of_theta(theta)
    vx, vz = p.velocity(t)
    v = math.hypot(vx, vz)
    fs = (vx / v * math.cos(u), vx / v * math.sin(u), vz / v)
    k = p.kappa(t)
    return (fs[0] ** 2 + fs[1] ** 2 + fs[2] ** 2) / (k * k)


def corollary_residual(surface: SurfaceOfRevolution, theta: float, segment_id: int,
                       h: float = 1e-4, u: float = 0.0) -> Residual:
    """Compare ∂/∂θ |∂f/∂θ|² (centered difference) with -2 (∂κ1/∂s) / κ1⁴."""
    seg = surface.segment(segment_id)
    lo, hi = seg.theta_interval
    if not (lo < theta - h and theta + h < hi):
        raise OutOfRange(f"[theta-h, theta+h] around {theta!r} leaves the chart", (lo, hi))
    lhs = (meridian_speed_squared(surface, seg, theta + h, u)
           - meridian_speed_squared(surface, seg, theta - h, u)) / (2.0 * h)
    k, dk = surface.profile.kappa_and_slope(seg.t_of_theta(theta))
    k1, dk1 = surface.orientation * k, surface.orientation * dk
    rhs = -2.0 / k1 ** 4 * dk1
    return Residual(lhs, rhs, abs(lhs - rhs))


# -- meshes ------------------------------------------------------------------------

@dataclass
class Ring:
    s: float
    theta: float | None
    segment_id: int | None
    region: str
    feature: str | None = None
    causes: tuple[str, ...] = ()
    feature_cause: str | None = None
    radius: float = 0.0
    z: float = 0.0


@dataclass
class RevolutionMesh:
    vertices: list[tuple[float, float, float]]
    rings: list[list[int]]
    meridians: list[list[int]]
    faces: list[tuple[int, int, int, int]]
    vertex_regions: list[str]
    ring_info: list[Ring]

    @property
    def feature_rings(self) -> list[tuple[int, str]]:
        return [(i, r.feature) for i, r in enumerate(self.ring_info) if r.feature]


def _segment_theta(surface: SurfaceOfRevolution, s: float):
    for seg in surface.segments:
        a, b = seg.s_range
        if a < s < b:
            return seg.theta_of_s(s), seg.index
    return None, None


def build_mesh(surface: SurfaceOfRevolution, rings, u_count: int = 64, include_faces: bool = False,
               features: FeatureCircles | None = None) -> RevolutionMesh:
    """Vertices at (station, u_j = 2πj/u_count) with ring loops and meridian polylines.

    *rings* are either ``(s, θ, segment_id)`` tuples or bare arc-length
    stations.  Parabolic and ridge stations are inserted exactly; an
    existing ring within 1e-9 of a feature station takes the feature tag.
    """
    if u_count < 3:
        raise ValueError("u_count must be at least 3")
    stations: list[Ring] = []
    for r in rings:
        if isinstance(r, (tuple, list)):
            s, theta, seg = float(r[0]), r[1], r[2]
        else:
            s = float(r)
            theta, seg = _segment_theta(surface, s)
        stations.append(Ring(s, theta, seg, region_classification(surface, s)))
    if len(stations) < 2:
        raise ValueError("a mesh needs at least two ring stations")
    if features is None:
        features = feature_circles(surface)
    for f in features.parabolic + features.ridge:
        match = [r for r in stations if abs(r.s - f.s) <= 1e-9]
        if not match:
            theta, seg = _segment_theta(surface, f.s)
            match = [Ring(f.s, theta, seg, region_classification(surface, f.s))]
            stations.append(match[0])
        ring = match[0]
        ring.causes = tuple(sorted(set(ring.causes) | {f.cause}))
        # a profile inflection or vertex names the ring; a flat parallel only
        # does so when nothing else lies there
        if ring.feature is None or (f.cause != "parallel_flat" and ring.feature_cause == "parallel_flat"):
            ring.feature, ring.feature_cause = f.kind, f.cause
    stations.sort(key=lambda r: r.s)

    us = [2.0 * math.pi * j / u_count for j in range(u_count)]
    trig = [(math.cos(u), math.sin(u)) for u in us]
    vertices, loops, regions = [], [], []
    for ring in stations:
        x, z = surface.profile.position(surface._t(ring.s))
        ring.radius, ring.z = x, z
        base = len(vertices)
        vertices.extend((x * c, x * s, z) for c, s in trig)
        regions.extend([ring.region] * u_count)
        loops.append(list(range(base, base + u_count)))
    meridians = [[i * u_count + j for i in range(len(stations))] for j in range(u_count)]
    faces = []
    if include_faces:
        for i in range(len(stations) - 1):
            for j in range(u_count):
                jn = (j + 1) % u_count
                faces.append((i * u_count + j, i * u_count + jn,
                              (i + 1) * u_count + jn, (i + 1) * u_count + j))
    return RevolutionMesh(vertices, loops, meridians, faces, regions, stations)

