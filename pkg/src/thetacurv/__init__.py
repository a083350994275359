"""Curves and surfaces of revolution parametrized by tangential angle."""

from .curves import (CurveSegment, FrameSample, MarkerSet, PlaneCurve, arc_length,
                     detect_vertices, equal_theta_markers, frame_at, frame_at_s, inflections,
                     s_of_theta, stratify, theorem_residual, theta_of_s)
from .errors import InputError, NumericError
from .expr import Expression, evaluate, evaluate_jet, parse, serialize
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig
from .render import emit_csv_markers, emit_obj_mesh, emit_svg_curve, emit_svg_residual_plot, emit_svg_theta_plot
from .surface import (build_mesh, corollary_residual, equal_theta_rings, feature_circles,
                      gaussian_curvature, principal_curvatures, region_classification, revolve)
from .synthesis import builtin_curve, curve_from_curvature_arclength, curve_from_curvature_theta

__version__ = "0.1.0"
