import math
import xml.etree.ElementTree as ET

import pytest

from thetacurv.curves import equal_theta_markers, stratify
from thetacurv.errors import EmptyInput
from thetacurv.render import (BLUE, CSV_HEADER, ORANGE, SvgOptions, emit_csv_markers, emit_obj_mesh,
                              emit_svg_curve, emit_svg_residual_plot, emit_svg_theta_plot)
from thetacurv.surface import build_mesh, equal_theta_rings, revolve
from thetacurv.synthesis import builtin_curve

from conftest import positive_segment, sphere_profile

SVG = "{http://www.w3.org/2000/svg}"


def read_obj(text):
    """Minimal OBJ reader: vertices, line elements, faces and comments."""
    verts, lines, faces, comments = [], [], [], []
    for raw in text.splitlines():
        if raw.startswith("#"):
            comments.append(raw[1:].strip())
            continue
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append(tuple(float(p) for p in parts[1:4]))
        elif parts[0] == "l":
            lines.append([int(p) - 1 for p in parts[1:]])
        elif parts[0] == "f":
            faces.append([int(p) - 1 for p in parts[1:]])
    return verts, lines, faces, comments


@pytest.fixture(scope="module")
def euler():
    segs = stratify(builtin_curve("euler_spiral"))
    return segs, [equal_theta_markers(s, 0.5) for s in segs]


def test_svg_euler_two_paths(euler):
    segs, markers = euler
    root = ET.fromstring(emit_svg_curve(segs, markers))
    paths = root.iter(f"{SVG}path")
    colors = [p.get("stroke") for p in paths]
    assert len(colors) == 2 and set(colors) == {ORANGE, BLUE}
    assert len(list(root.iter(f"{SVG}circle"))) == sum(len(m) for m in markers)
    group = root.find(f"{SVG}g")
    assert group.get("transform") == "scale(1,-1)"


def test_svg_path_sample_count(euler):
    segs, _ = euler
    root = ET.fromstring(emit_svg_curve(segs[:1]))
    d = next(root.iter(f"{SVG}path")).get("d")
    assert d.count("L") == 511


def test_svg_circle_markers():
    seg = stratify(builtin_curve("circle"))[0]
    ms = equal_theta_markers(seg, math.pi / 6)
    root = ET.fromstring(emit_svg_curve([seg], ms))
    assert len(list(root.iter(f"{SVG}path"))) == 1
    circles = list(root.iter(f"{SVG}circle"))
    assert len(circles) == 12
    vx, vy, vw, vh = map(float, root.get("viewBox").split())
    assert float(circles[0].get("r")) == pytest.approx(0.008 * math.hypot(vw, vh), rel=1e-5)
    # unit circle padded by 5% of its 2-unit extent
    assert (vx, vw) == pytest.approx((-1.1, 2.2), rel=1e-5)


def test_svg_no_markers(euler):
    segs, _ = euler
    root = ET.fromstring(emit_svg_curve(segs, []))
    assert list(root.iter(f"{SVG}circle")) == []


def test_svg_custom_radius(euler):
    segs, markers = euler
    root = ET.fromstring(emit_svg_curve(segs, markers, SvgOptions(marker_radius=0.25)))
    assert {c.get("r") for c in root.iter(f"{SVG}circle")} == {"0.25"}


def test_svg_six_significant_digits(euler):
    segs, markers = euler
    text = emit_svg_curve(segs, markers)
    root = ET.fromstring(text)
    for c in root.iter(f"{SVG}circle"):
        digits = c.get("cx").lstrip("-").replace(".", "").lstrip("0")
        assert len(digits.split("e")[0]) <= 6


def test_svg_empty_input():
    with pytest.raises(EmptyInput):
        emit_svg_curve([], [])


def test_svg_deterministic(euler):
    segs, markers = euler
    assert emit_svg_curve(segs, markers) == emit_svg_curve(segs, markers)


def test_theta_plot(euler):
    segs, _ = euler
    a = emit_svg_theta_plot(positive_segment(segs), 128, 0.5)
    assert a == emit_svg_theta_plot(positive_segment(segs), 128, 0.5)
    root = ET.fromstring(a)
    assert root.tag == f"{SVG}svg"
    with pytest.raises(EmptyInput):
        emit_svg_theta_plot(None, 10)


def test_residual_plot():
    text = emit_svg_residual_plot({"a": ([0.1, 0.2], [1e-9, 0.0])})
    ET.fromstring(text)
    with pytest.raises(EmptyInput):
        emit_svg_residual_plot({})


# -- CSV -----------------------------------------------------------------------------

def test_csv_euler(euler):
    _, markers = euler
    text = emit_csv_markers(markers)
    rows = text.splitlines()
    assert rows[0] == ",".join(CSV_HEADER)
    assert "\r" not in text
    body = [dict(zip(CSV_HEADER, r.split(","))) for r in rows[1:]]
    s = [float(r["s"]) for r in body]
    assert s == sorted(s)
    positive = [v for v in s if v > 0]
    assert positive[:4] == pytest.approx([1, math.sqrt(2), math.sqrt(3), 2], abs=1e-11)


def test_csv_theta_gaps(euler):
    _, markers = euler
    rows = [r.split(",") for r in emit_csv_markers(markers).splitlines()[1:]]
    for ms in markers:
        th = [m.theta for m in ms]
        for a, b in zip(th, th[1:]):
            assert abs(abs(b - a) - 0.5) <= 1e-9
    assert all(len(r) == 7 for r in rows)


def test_csv_circle_equal_gaps():
    seg = stratify(builtin_curve("circle"))[0]
    rows = emit_csv_markers(equal_theta_markers(seg, math.pi / 6)).splitlines()[1:]
    s = [float(r.split(",")[2]) for r in rows]
    assert len(s) == 12
    assert [b - a for a, b in zip(s, s[1:])] == pytest.approx([math.pi / 6] * 11, abs=1e-10)


def test_csv_empty():
    assert emit_csv_markers([]) == ",".join(CSV_HEADER) + "\n"


# -- OBJ -----------------------------------------------------------------------------

def test_obj_sphere_counts():
    sphere = revolve(sphere_profile())
    lo, hi = sphere.s_domain
    mesh = build_mesh(sphere, [lo + (hi - lo) * (i + 0.5) / 12 for i in range(12)], 24)
    verts, lines, faces, comments = read_obj(emit_obj_mesh(mesh))
    assert len(verts) == 288
    loops = [l for l in lines if l[0] == l[-1]]
    assert len(loops) == 12 and len(lines) - len(loops) == 24
    assert faces == []
    assert sum(c.startswith("ring ") for c in comments) == 12


def test_obj_round_trip_topology():
    surf = revolve(builtin_curve("euler_spiral", {"offset": (2, 0)}))
    mesh = build_mesh(surf, equal_theta_rings(surf, 0.5), 12, include_faces=True)
    verts, lines, faces, _ = read_obj(emit_obj_mesh(mesh))
    assert len(verts) == len(mesh.vertices)
    for v, w in zip(verts, mesh.vertices):
        assert v == pytest.approx(w, abs=5e-7)
    assert lines == [r + r[:1] for r in mesh.rings] + mesh.meridians
    assert faces == [list(f) for f in mesh.faces]


def test_obj_feature_comments():
    euler = revolve(builtin_curve("euler_spiral", {"offset": (2, 0)}))
    vertex = revolve(builtin_curve("kappa_1_plus_s2", {"offset": (2, 0)}))
    for surf, tag in ((euler, "feature=parabolic"), (vertex, "feature=ridge")):
        text = emit_obj_mesh(build_mesh(surf, equal_theta_rings(surf, 0.25), 16))
        rings = [c for c in read_obj(text)[3] if c.startswith("ring ")]
        assert sum(tag in c.split() for c in rings) == 1


def test_obj_empty():
    with pytest.raises(EmptyInput):
        emit_obj_mesh(None)
