import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from thetacurv.curves import ParametricCurve, stratify  # noqa: E402
from thetacurv.expr import parse  # noqa: E402
from thetacurv.surface import revolve  # noqa: E402
from thetacurv.synthesis import builtin_curve  # noqa: E402

GALLERY_CURVES = ("euler_spiral", "elastica", "kappa_1_plus_s2", "circle")


@pytest.fixture(scope="session")
def curves():
    return {name: builtin_curve(name) for name in GALLERY_CURVES}


@pytest.fixture(scope="session")
def segments(curves):
    return {name: stratify(c) for name, c in curves.items()}


def positive_segment(segs):
    return next(s for s in segs if s.sign > 0)


@pytest.fixture(scope="session")
def surfaces():
    return {
        "euler": revolve(builtin_curve("euler_spiral", {"offset": (2, 0)})),
        "vertex": revolve(builtin_curve("kappa_1_plus_s2", {"offset": (2, 0)})),
        "elastica": revolve(builtin_curve("elastica", {"offset": (2, 0)})),
    }


def torus_profile(R=3.0, r=1.0, margin=0.3):
    return ParametricCurve(parse(f"{R}+{r}*cos(t)", "t"), parse(f"{r}*sin(t)", "t"),
                           (-math.pi + margin, math.pi - margin), t_origin=0.0)


def sphere_profile(margin=0.05):
    return ParametricCurve(parse("cos(t)", "t"), parse("sin(t)", "t"),
                           (-math.pi / 2 + margin, math.pi / 2 - margin), t_origin=0.0)
