"""One-dimensional numerical primitives: quadrature, root bracketing, inversion."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DepthExceeded, OutOfRange

_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class ToleranceConfig:
    quad_tol: float = 1e-10
    root_tol: float = 1e-12
    grid_n: int = 512
    max_depth: int = 40

    def __post_init__(self):
        if self.quad_tol <= 0 or self.root_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.grid_n < 16:
            raise ValueError("grid_n must be at least 16")
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")

    def replace(self, **changes) -> "ToleranceConfig":
        fields = {k: getattr(self, k) for k in ("quad_tol", "root_tol", "grid_n", "max_depth")}
        fields.update(changes)
        return ToleranceConfig(**fields)


DEFAULT_TOLERANCES = ToleranceConfig()


def integrate_adaptive(f: Callable[[float], float], a: float, b: float,
                       cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Adaptive Simpson quadrature with Richardson-corrected panels.

    The target error is ``quad_tol * (1 + |I|)`` with ``|I|`` estimated from the
    first Simpson panel.  Reversed limits give the negated integral.

    Raises:
        DepthExceeded: if a panel still fails the test at ``max_depth`` halvings.
    """
    if a == b:
        return 0.0
    if a > b:
        return -integrate_adaptive(f, b, a, cfg)

    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    tol = cfg.quad_tol * (1.0 + abs(whole))
    max_depth = cfg.max_depth

    def panel(lo, hi, flo, fmid, fhi, estimate, tol, depth):
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        # actual widths: near |x| ~ 1 the midpoint does not split exactly
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - estimate
        fsum = abs(flo) + abs(fmid) + abs(fhi) + abs(flm) + abs(frm)
        noise = 64.0 * _EPS * (hi - lo) * fsum
        if abs(delta) <= 15.0 * tol or abs(delta) <= noise or not (lo < lm < mid < rm < hi):
            return left + right + delta / 15.0
        if depth >= max_depth:
            raise DepthExceeded(
                f"quadrature did not converge on [{lo!r}, {hi!r}] after {max_depth} halvings")
        return (panel(lo, mid, flo, flm, fmid, left, 0.5 * tol, depth + 1)
                + panel(mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth + 1))

    return panel(a, b, fa, fm, fb, whole, tol, 0)


def _bisect(f, lo, hi, flo, root_tol):
    while hi - lo > root_tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_roots(f: Callable[[float], float], a: float, b: float,
               cfg: ToleranceConfig = DEFAULT_TOLERANCES, values=None) -> list[float]:
    """All sign changes of *f* on a uniform grid over [a, b], refined by bisection.

    Grid points with ``|f| < 1e-14`` are reported as roots directly; roots of even
    multiplicity are only found that way.  *values* may supply precomputed grid
    samples ``f(x_i)`` (same grid) to avoid re-evaluating.
    """
    n = cfg.grid_n
    xs = [a + (b - a) * i / n for i in range(n + 1)]
    xs[-1] = b
    fs = list(values) if values is not None else [f(x) for x in xs]
    roots = []
    for i, (x, fx) in enumerate(zip(xs, fs)):
        if abs(fx) < 1e-14:
            roots.append(x)
            continue
        if i == n:
            break
        fn = fs[i + 1]
        if abs(fn) < 1e-14:
            continue
        if (fx < 0.0) != (fn < 0.0):
            roots.append(_bisect(f, x, xs[i + 1], fx, cfg.root_tol))
    roots.sort()
    out: list[float] = []
    for r in roots:
        if not out or r - out[-1] > 10.0 * cfg.root_tol:
            out.append(r)
    return out


def invert_monotone(F: Callable[[float], float], y: float, a: float, b: float,
                    cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                    Fa: float | None = None, Fb: float | None = None) -> float:
    """Solve ``F(x) = y`` for strictly monotone *F* on [a, b].

    Illinois-style secant steps inside a shrinking bracket, falling back to
    bisection when a step would not reduce the bracket enough.  *Fa*/*Fb* may be
    passed when the endpoint values are already known.
    """
    if a > b:
        a, b, Fa, Fb = b, a, Fb, Fa
    fa = F(a) if Fa is None else Fa
    fb = F(b) if Fb is None else Fb
    lo_img, hi_img = min(fa, fb), max(fa, fb)
    slack = 4.0 * _EPS * (1.0 + abs(y))
    if not (lo_img - slack <= y <= hi_img + slack):
        raise OutOfRange(f"value {y!r} is outside the image of [{a!r}, {b!r}]",
                         (lo_img, hi_img))
    ga, gb = fa - y, fb - y
    if ga == 0.0:
        return a
    if gb == 0.0:
        return b
    if (ga < 0.0) == (gb < 0.0):
        # y within slack of an endpoint value
        return a if abs(ga) <= abs(gb) else b

    lo, hi, glo, ghi = a, b, ga, gb
    side = 0
    stop = 2.0 * _EPS * (1.0 + abs(y))
    for _ in range(200):
        width = hi - lo
        if width <= cfg.root_tol:
            break
        x = lo - glo * (hi - lo) / (ghi - glo)
        margin = 0.01 * width
        if not (lo + margin < x < hi - margin):
            x = 0.5 * (lo + hi)
        gx = F(x) - y
        if gx == 0.0 or abs(gx) <= stop:
            return x
        if (gx < 0.0) == (glo < 0.0):
            lo, glo = x, gx
            if side == -1:
                ghi *= 0.5
            side = -1
        else:
            hi, ghi = x, gx
            if side == 1:
                glo *= 0.5
            side = 1
    # linear interpolation inside the final bracket
    if ghi != glo:
        x = lo - glo * (hi - lo) / (ghi - glo)
        if lo <= x <= hi:
            return x
    return 0.5 * (lo + hi)


def invert_monotone_newton(F: Callable[[float], float], dF: Callable[[float], float], y: float,
                           a: float, b: float, Fa: float, Fb: float, dFa: float, dFb: float,
                           cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Solve ``F(x) = y`` on a short bracket where F and F' are known at both ends.

    A cubic Hermite model of F supplies the starting point, then safeguarded
    Newton steps on F itself finish the job; typically two evaluations of F.
    Falls back to :func:`invert_monotone` if Newton stalls.
    """
    if a > b:
        a, b, Fa, Fb, dFa, dFb = b, a, Fb, Fa, dFb, dFa
    lo_img, hi_img = min(Fa, Fb), max(Fa, Fb)
    slack = 4.0 * _EPS * (1.0 + abs(y))
    if not (lo_img - slack <= y <= hi_img + slack):
        raise OutOfRange(f"value {y!r} is outside the image of [{a!r}, {b!r}]", (lo_img, hi_img))
    if y == Fa:
        return a
    if y == Fb:
        return b
    increasing = Fb > Fa
    h = b - a

    def model(x):
        u = (x - a) / h
        u2, u3 = u * u, u * u * u
        val = ((2 * u3 - 3 * u2 + 1) * Fa + (u3 - 2 * u2 + u) * h * dFa
               + (-2 * u3 + 3 * u2) * Fb + (u3 - u2) * h * dFb)
        der = ((6 * u2 - 6 * u) * Fa / h + (3 * u2 - 4 * u + 1) * dFa
               + (-6 * u2 + 6 * u) * Fb / h + (3 * u2 - 2 * u) * dFb)
        return val, der

    x = a + (y - Fa) / (Fb - Fa) * h
    x = min(max(x, a), b)
    for _ in range(8):
        m, dm = model(x)
        if dm == 0.0 or (dm > 0) != increasing:
            break
        xn = x - (m - y) / dm
        if not a <= xn <= b:
            break
        done = abs(xn - x) <= 1e-3 * cfg.root_tol
        x = xn
        if done:
            break

    lo, hi = a, b
    for _ in range(12):
        g = F(x) - y
        if g == 0.0:
            return x
        if (g > 0) == increasing:
            hi = x
        else:
            lo = x
        d = dF(x)
        xn = x - g / d if d != 0.0 else 0.5 * (lo + hi)
        if not lo <= xn <= hi:
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= cfg.root_tol:
            return xn
        x = xn
    return invert_monotone(F, y, lo, hi, cfg)
