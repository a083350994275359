"""Text serializers: SVG curve drawings, θ-vs-s plots, marker CSV and OBJ meshes.

All emitters are pure and deterministic; identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .curves import CurveSegment, FrameSample, MarkerSet
from .errors import EmptyInput
from .surface import RevolutionMesh

ORANGE = "#E69F00"  # κ > 0, elliptic
BLUE = "#0072B2"  # κ < 0, hyperbolic
GREEN = "#009E73"  # ridge / vertex
POSITIVE_PALETTE = (ORANGE, "#D55E00")
NEGATIVE_PALETTE = (BLUE, "#56B4E9")
CURVE_SAMPLES = 512


@dataclass(frozen=True)
class SvgOptions:
    samples: int = CURVE_SAMPLES
    marker_radius: float | None = None  # default: 0.8% of the viewBox diagonal
    stroke_width: float | None = None  # default: 0.4% of the viewBox diagonal
    padding: float = 0.05
    marker_fill: str = "#000000"
    vertex_fill: str = GREEN


def _g(x: float) -> str:
    out = format(x, ".6g")
    return "0" if out == "-0" else out


def _segment_polyline(segment: CurveSegment, n: int) -> list[tuple[float, float]]:
    curve = segment.parent
    a, b = segment.s_range
    pts = []
    for i in range(n):
        s = a + (b - a) * i / (n - 1)
        if i == n - 1:
            s = b
        pts.append(curve.position_at_s(s))
    return pts


def _flatten_markers(markers) -> list[FrameSample]:
    if markers is None:
        return []
    if isinstance(markers, MarkerSet):
        return list(markers.markers)
    out: list[FrameSample] = []
    for m in markers:
        if isinstance(m, MarkerSet):
            out.extend(m.markers)
        else:
            out.append(m)
    return out


def emit_svg_curve(segments: Sequence[CurveSegment], markers=None, options: SvgOptions | None = None,
                   vertices: Iterable[FrameSample] = ()) -> str:
    """SVG drawing of a stratified curve.

    One ``path`` per segment, coloured by the sign of κ (orange positive, blue
    negative, alternating shades when neighbours share a sign), one ``circle``
    per marker and one green ``circle`` per vertex.
    """
    opts = options or SvgOptions()
    segments = list(segments)
    if not segments:
        raise EmptyInput("no curve segments to draw")
    if opts.samples < 2:
        raise EmptyInput("a segment needs at least two polyline samples")
    lines = [_segment_polyline(seg, opts.samples) for seg in segments]
    marks = _flatten_markers(markers)
    verts = list(vertices)

    pts = [p for line in lines for p in line] + [m.position for m in marks + verts]
    xmin, xmax = min(p[0] for p in pts), max(p[0] for p in pts)
    ymin, ymax = min(p[1] for p in pts), max(p[1] for p in pts)
    w, h = xmax - xmin, ymax - ymin
    span = max(w, h, 1e-9)
    pad = opts.padding * span
    vx, vy, vw, vh = xmin - pad, -(ymax + pad), w + 2 * pad, h + 2 * pad
    diag = math.hypot(vw, vh)
    radius = opts.marker_radius if opts.marker_radius is not None else 0.008 * diag
    stroke = opts.stroke_width if opts.stroke_width is not None else 0.004 * diag

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
           f'viewBox="{_g(vx)} {_g(vy)} {_g(vw)} {_g(vh)}">',
           '<g transform="scale(1,-1)">']
    counters = {1: 0, -1: 0}
    for seg, line in zip(segments, lines):
        palette = POSITIVE_PALETTE if seg.sign > 0 else NEGATIVE_PALETTE
        color = palette[counters[seg.sign] % len(palette)]
        counters[seg.sign] += 1
        d = "M" + " L".join(f"{_g(x)},{_g(y)}" for x, y in line)
        out.append(f'<path class="segment" data-segment="{seg.index}" d="{d}" fill="none" '
                   f'stroke="{color}" stroke-width="{_g(stroke)}"/>')
    for m in marks:
        out.append(f'<circle class="marker" cx="{_g(m.position[0])}" cy="{_g(m.position[1])}" '
                   f'r="{_g(radius)}" fill="{opts.marker_fill}"/>')
    for v in verts:
        out.append(f'<circle class="vertex" cx="{_g(v.position[0])}" cy="{_g(v.position[1])}" '
                   f'r="{_g(1.5 * radius)}" fill="{opts.vertex_fill}"/>')
    out += ["</g>", "</svg>", ""]
    return "\n".join(out)


def _matplotlib_svg(fig) -> str:
    import matplotlib
    from matplotlib.backends.backend_svg import FigureCanvasSVG

    buf = io.StringIO()
    with matplotlib.rc_context({"svg.hashsalt": "thetacurv", "svg.fonttype": "none",
                                "path.simplify": False}):
        FigureCanvasSVG(fig)
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    return buf.getvalue()


def emit_svg_theta_plot(segment: CurveSegment, n_samples: int = 256,
                        delta_theta: float | None = None) -> str:
    """θ(s) against s over one segment, with gridlines at the marker angles kΔθ."""
    from matplotlib.figure import Figure
    from .curves import theta_lattice

    if segment is None or n_samples < 2:
        raise EmptyInput("nothing to plot")
    a, b = segment.s_range
    ss = [a + (b - a) * i / (n_samples - 1) for i in range(n_samples)]
    ss[-1] = b
    thetas = [segment.theta_of_s(s) for s in ss]

    fig = Figure(figsize=(5.0, 3.5))
    ax = fig.add_subplot(1, 1, 1)
    color = ORANGE if segment.sign > 0 else BLUE
    ax.plot(ss, thetas, color=color, linewidth=1.5)
    if delta_theta:
        for k in theta_lattice(segment, delta_theta):
            th = k * delta_theta
            ax.axhline(th, color="#999999", linewidth=0.5, zorder=0)
            ax.plot([segment.s_of_theta(th)], [th], "o", color="black", markersize=2.5)
    ax.set_xlabel("s")
    ax.set_ylabel("θ")
    ax.set_title(f"segment {segment.index}")
    fig.tight_layout()
    return _matplotlib_svg(fig)


def emit_svg_residual_plot(series: dict[str, tuple[Sequence[float], Sequence[float]]],
                           title: str = "residual") -> str:
    """Scatter of residual against θ, one series per segment (log scale)."""
    from matplotlib.figure import Figure

    if not series:
        raise EmptyInput("no residual series")
    fig = Figure(figsize=(5.0, 3.5))
    ax = fig.add_subplot(1, 1, 1)
    for label in sorted(series):
        xs, ys = series[label]
        ax.plot(list(xs), [max(y, 1e-18) for y in ys], ".", markersize=3, label=label)
    ax.set_yscale("log")
    ax.set_xlabel("θ")
    ax.set_ylabel("|lhs − rhs|")
    ax.set_title(title)
    ax.legend(fontsize="small")
    fig.tight_layout()
    return _matplotlib_svg(fig)


CSV_HEADER = ("k", "theta", "s", "x", "y", "kappa", "dkappa_ds")


def emit_csv_markers(markers) -> str:
    """Marker table ``k,theta,s,x,y,kappa,dkappa_ds`` ordered by arc length."""
    rows = []
    sets = [markers] if isinstance(markers, MarkerSet) else list(markers or [])
    for ms in sets:
        if isinstance(ms, MarkerSet):
            rows.extend(zip(ms.ks, ms.markers))
        else:
            k, frame = ms
            rows.append((k, frame))
    rows.sort(key=lambda r: r[1].s)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    f = lambda v: format(v, ".12g")
    for k, m in rows:
        w.writerow((k, f(m.theta), f(m.s), f(m.position[0]), f(m.position[1]),
                    f(m.kappa), f(m.dkappa_ds)))
    return buf.getvalue()


def emit_obj_mesh(mesh: RevolutionMesh, include_faces: bool | None = None) -> str:
    """Wavefront OBJ with ring loops, meridian polylines and optional quads."""
    if mesh is None or not mesh.vertices:
        raise EmptyInput("mesh has no vertices")
    faces = bool(mesh.faces) if include_faces is None else include_faces
    out = ["# surface of revolution drawn by curvature lines",
           f"# vertices {len(mesh.vertices)} rings {len(mesh.rings)} meridians {len(mesh.meridians)}"]
    out += [f"v {x:.6f} {y:.6f} {z:.6f}" for x, y, z in mesh.vertices]
    for k, (loop, info) in enumerate(zip(mesh.rings, mesh.ring_info)):
        theta = "none" if info.theta is None else format(info.theta, ".12g")
        comment = (f"# ring {k} theta={theta} region={info.region} "
                   f"feature={info.feature or 'none'}")
        if info.causes:
            comment += " causes=" + ",".join(info.causes)
        out.append(comment)
        out.append("l " + " ".join(str(i + 1) for i in loop + loop[:1]))
    for j, mer in enumerate(mesh.meridians):
        out.append(f"# meridian {j}")
        out.append("l " + " ".join(str(i + 1) for i in mer))
    if faces:
        if not mesh.faces:
            raise EmptyInput("faces requested but the mesh was built without them")
        out += ["f " + " ".join(str(i + 1) for i in quad) for quad in mesh.faces]
    out.append("")
    return "\n".join(out)
