"""Command-line front end: ``thetacurv {curve,surface,verify,gallery} ...``.

Exit codes: 0 success, 1 configuration or expression error, 2 numerical
failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import tempfile
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import render
from .curves import (CurveSegment, ParametricCurve, PlaneCurve, detect_vertices, equal_theta_markers,
                     inflections, stratify, theorem_residual)
from .errors import ConfigError, DegenerateAllVertices, InputError, NumericError
from .expr import evaluate, parse
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig
from .surface import (SurfaceOfRevolution, build_mesh, corollary_residual, equal_theta_rings,
                      feature_circles)
from .synthesis import builtin_curve, curve_from_curvature_arclength

GALLERY = ("fig2_elastica", "fig3_euler", "fig4_vertex", "fig6_surface_euler",
           "fig7_surface_vertex", "fig8_wireframes")
FORMATS = ("svg", "csv", "obj", "report")
DEFAULT_SEED = 42
DEFAULT_SAMPLES = 50
RESIDUAL_TOL = 1e-6
# residual sampling stays in the middle of each θ chart, away from inflections
INTERIOR = 0.1


# -- configuration -------------------------------------------------------------------

@dataclass
class SurfaceOptions:
    enabled: bool = False
    u_count: int = 64
    include_faces: bool = False
    flip_normal: bool = False


@dataclass
class RunConfig:
    curves: list[dict]
    theta_step: float
    outputs: list[dict]
    markers: dict = field(default_factory=lambda: {"enabled": True, "vertices": True})
    surface: SurfaceOptions = field(default_factory=SurfaceOptions)
    tolerances: ToleranceConfig = DEFAULT_TOLERANCES
    seed: int = DEFAULT_SEED


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigError(f"missing key {where}.{key}")
    return obj[key]


def _theta_step(value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError("theta_step must be a number or a constant expression")
    if isinstance(value, str):
        expr = parse(value)
        if expr.variable is not None:
            raise ConfigError(f"theta_step expression {value!r} must be constant")
        value = evaluate(expr, 0.0)
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise ConfigError(f"theta_step must be positive, got {value!r}")
    return value


def _domain(spec: dict, where: str):
    d = spec.get("domain")
    if d is None:
        return None
    if not (isinstance(d, list) and len(d) == 2 and all(isinstance(v, (int, float)) for v in d)):
        raise ConfigError(f"{where}.domain must be a list [a, b]")
    if not d[0] < d[1]:
        raise ConfigError(f"{where}.domain needs a < b")
    return (float(d[0]), float(d[1]))


def load_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    if "curves" in data:
        curves = data["curves"]
        if not isinstance(curves, list) or not curves:
            raise ConfigError("curves must be a non-empty list")
    else:
        curves = [_require(data, "curve", "config")]
    for i, c in enumerate(curves):
        where = f"curves[{i}]" if "curves" in data else "curve"
        if not isinstance(c, dict):
            raise ConfigError(f"{where} must be an object")
        kind = _require(c, "kind", where)
        if kind not in ("builtin", "parametric", "curvature_s"):
            raise ConfigError(f"{where}.kind must be builtin, parametric or curvature_s, not {kind!r}")
        _domain(c, where)
    outputs = _require(data, "outputs", "config")
    if not isinstance(outputs, list) or not outputs:
        raise ConfigError("outputs must be a non-empty list")
    for i, o in enumerate(outputs):
        if not isinstance(o, dict):
            raise ConfigError(f"outputs[{i}] must be an object")
        if _require(o, "format", f"outputs[{i}]") not in FORMATS:
            raise ConfigError(f"outputs[{i}].format must be one of {', '.join(FORMATS)}")
        if not isinstance(_require(o, "path", f"outputs[{i}]"), str):
            raise ConfigError(f"outputs[{i}].path must be a string")
    surf = data.get("surface", {})
    if not isinstance(surf, dict):
        raise ConfigError("surface must be an object")
    unknown = set(surf) - {"enabled", "u_count", "include_faces", "flip_normal"}
    if unknown:
        raise ConfigError(f"unknown surface option(s): {', '.join(sorted(unknown))}")
    surface = SurfaceOptions(**surf)
    if not isinstance(surface.u_count, int) or surface.u_count < 3:
        raise ConfigError("surface.u_count must be an integer >= 3")
    try:
        tol = DEFAULT_TOLERANCES.replace(**data.get("tolerances", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"tolerances: {exc}") from None
    markers = {"enabled": True, "vertices": True}
    markers.update(data.get("markers", {}))
    seed = data.get("seed", DEFAULT_SEED)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    return RunConfig(curves, _theta_step(_require(data, "theta_step", "config")), outputs,
                     markers, surface, tol, seed)


def _expr(spec: dict, key: str, var: str):
    source = _require(spec, key, "curve")
    if not isinstance(source, str):
        raise ConfigError(f"curve.{key} must be an expression string")
    try:
        return parse(source, var)
    except InputError as exc:
        raise ConfigError(f"curve.{key}: {exc}") from None


def build_curve(spec: dict, cfg: ToleranceConfig) -> PlaneCurve:
    kind = spec["kind"]
    domain = _domain(spec, "curve")
    base = spec.get("base_c")
    if kind == "builtin":
        params = dict(spec.get("parameters", {}))
        if domain is not None:
            params["domain"] = domain
        return builtin_curve(_require(spec, "name", "curve"), params, cfg)
    if domain is None:
        raise ConfigError(f"curve.domain is required for kind {kind!r}")
    if kind == "parametric":
        var = spec.get("variable", "t")
        x, y = _expr(spec, "x", var), _expr(spec, "y", var)
        return ParametricCurve(x, y, domain, cfg=cfg, t_origin=base,
                               base_s=None if base is None else 0.0, name=spec.get("name", "parametric"))
    kappa = _expr(spec, "kappa", "s")
    return curve_from_curvature_arclength(
        kappa, domain, tuple(spec.get("start_point", (0.0, 0.0))), float(spec.get("start_angle", 0.0)),
        cfg, name=spec.get("name", "curvature_s"), base_s=base)


@dataclass
class Model:
    spec: dict
    curve: PlaneCurve
    segments: list[CurveSegment]
    markers: list
    vertices: list
    surface: SurfaceOfRevolution | None = None


def build_models(rc: RunConfig, with_surface: bool) -> list[Model]:
    models = []
    for spec in rc.curves:
        curve = build_curve(spec, rc.tolerances)
        segments = stratify(curve, rc.tolerances)
        markers = ([equal_theta_markers(s, rc.theta_step) for s in segments]
                   if rc.markers.get("enabled", True) else [])
        vertices = []
        if rc.markers.get("vertices", True):
            for seg in segments:
                try:
                    vertices.extend(detect_vertices(seg, rc.tolerances))
                except DegenerateAllVertices:
                    pass
        surface = None
        if with_surface:
            surface = SurfaceOfRevolution(curve, rc.tolerances, rc.surface.flip_normal)
        models.append(Model(spec, curve, segments, markers, vertices, surface))
    return models


# -- verification --------------------------------------------------------------------

def _thetas(segment: CurveSegment, rng: random.Random, n: int) -> list[float]:
    lo, hi = segment.theta_interval
    a, b = lo + INTERIOR * (hi - lo), hi - INTERIOR * (hi - lo)
    return [rng.uniform(a, b) for _ in range(n)]


def _stats(rows) -> dict:
    res = [r.residual for r in rows]
    ok = all(r.residual <= RESIDUAL_TOL * (1.0 + abs(r.rhs)) for r in rows)
    worst = max(rows, key=lambda r: r.residual / (1.0 + abs(r.rhs)))
    return {"max_residual": max(res), "mean_residual": sum(res) / len(res),
            "worst_relative": worst.residual / (1.0 + abs(worst.rhs)), "pass": ok}


def verify_model(model: Model, rng: random.Random, n: int, series=None) -> dict:
    curve = model.curve
    try:
        infl = inflections(curve)
    except NumericError as exc:
        infl = type(exc).__name__
    out = {"name": curve.name, "kind": curve.kind, "inflections_s": infl, "segments": []}
    ok = True
    for seg in model.segments:
        thetas = _thetas(seg, rng, n)
        rows = [theorem_residual(seg, th) for th in thetas]
        if series is not None:
            series[f"{curve.name} seg {seg.index}"] = (thetas, [r.residual for r in rows])
        chart = max(abs(seg.theta_of_s(seg.s_of_theta(th)) - th) for th in thetas)
        entry = {"index": seg.index, "sign": seg.sign, "s_range": list(seg.s_range),
                 "theta_range": list(seg.theta_range), "theorem": _stats(rows),
                 "chart_roundtrip_max_error": chart}
        try:
            entry["vertices_s"] = [v.s for v in detect_vertices(seg)]
        except DegenerateAllVertices:
            entry["vertices_s"] = "DegenerateAllVertices"
        ok = ok and entry["theorem"]["pass"]
        out["segments"].append(entry)
    if model.surface is not None:
        surf = model.surface
        fc = feature_circles(surf)
        cor = []
        for seg in surf.segments:
            rows = [corollary_residual(surf, th, seg.index) for th in _thetas(seg, rng, n)]
            stats = _stats(rows)
            ok = ok and stats["pass"]
            cor.append({"index": seg.index, **stats})
        out["surface"] = {
            "corollary": cor,
            "parabolic": [{"s": f.s, "cause": f.cause} for f in fc.parabolic],
            "ridge": [{"s": f.s, "cause": f.cause} for f in fc.ridge],
            "ridges_degenerate": fc.degenerate_ridges,
        }
    out["pass"] = ok
    return out


def verify(rc: RunConfig, n_samples: int = DEFAULT_SAMPLES, models=None, series=None) -> dict:
    """Structured residual report for every configured curve (and surface)."""
    if models is None:
        models = build_models(rc, rc.surface.enabled)
    rng = random.Random(rc.seed)
    curves = [verify_model(m, rng, n_samples, series) for m in models]
    return {"samples": n_samples, "seed": rc.seed,
            "tolerance": "residual <= 1e-6 * (1 + |rhs|)",
            "curves": curves, "pass": all(c["pass"] for c in curves)}


# -- outputs --------------------------------------------------------------------------

def write_atomic(path: Path, text: str) -> int:
    data = text.encode("utf-8")
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return len(data)


SUBCOMMAND_FORMATS = {
    "curve": {"svg", "csv", "report"},
    "surface": {"svg", "csv", "obj", "report"},
    "verify": {"svg", "report"},
    "gallery": set(FORMATS),
}


def _pick(models, out, key="curve"):
    i = out.get(key, 0)
    if not isinstance(i, int) or not 0 <= i < len(models):
        raise ConfigError(f"output {out['path']!r}: {key} index {i!r} out of range")
    return models[i]


def render_output(out: dict, models: list[Model], rc: RunConfig, state: dict, n_samples: int) -> str:
    fmt, plot = out["format"], out.get("plot")
    if fmt == "report" or plot == "residual":
        if "report" not in state:
            series = {}
            state["report"] = verify(rc, n_samples, models, series)
            state["series"] = series
        if fmt == "report":
            return json.dumps(state["report"], indent=2) + "\n"
        return render.emit_svg_residual_plot(state["series"], "theta-speed identity residual")
    m = _pick(models, out)
    if fmt == "csv":
        return render.emit_csv_markers(m.markers)
    if fmt == "obj":
        if m.surface is None:
            raise ConfigError("obj output needs the surface to be built")
        rings = equal_theta_rings(m.surface, rc.theta_step)
        mesh = build_mesh(m.surface, rings, rc.surface.u_count, rc.surface.include_faces)
        return render.emit_obj_mesh(mesh)
    if plot in (None, "curve"):
        return render.emit_svg_curve(m.segments, m.markers, vertices=m.vertices)
    if plot == "theta":
        seg = _pick(m.segments, out, "segment")
        return render.emit_svg_theta_plot(seg, int(out.get("samples", 256)), rc.theta_step)
    raise ConfigError(f"unknown svg plot {plot!r}; choose curve, theta or residual")


def execute(rc: RunConfig, command: str, out_dir: Path, n_samples: int) -> list[str]:
    formats = SUBCOMMAND_FORMATS[command]
    wanted = [o for o in rc.outputs if o["format"] in formats]
    if command == "verify":
        wanted = [o for o in wanted if o["format"] == "report" or o.get("plot") == "residual"]
    need_surface = rc.surface.enabled or command == "surface"
    need_surface = need_surface and (command != "curve")
    models = build_models(rc, need_surface)
    state: dict = {}
    lines = []
    texts = [(o, render_output(o, models, rc, state, n_samples)) for o in wanted]
    for o, text in texts:
        path = out_dir / o["path"]
        size = write_atomic(path, text)
        lines.append(f"wrote {path} ({o['format']}, {size} bytes)")
    if command == "verify" and not wanted:
        report = state.get("report") or verify(rc, n_samples, models)
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
        lines.append(f"verify: {'pass' if report['pass'] else 'FAIL'}")
    for o in rc.outputs:
        if o not in wanted:
            lines.append(f"skipped {o['path']} ({o['format']} not produced by {command})")
    return lines


def gallery_config(name: str) -> dict:
    if name not in GALLERY:
        raise ConfigError(f"unknown gallery entry {name!r}; choose one of {', '.join(GALLERY)}")
    text = resources.files("thetacurv").joinpath("gallery", f"{name}.json").read_text("utf-8")
    return json.loads(text)


def _read_config(path: str) -> dict:
    try:
        text = Path(path).read_text("utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thetacurv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_text in (("curve", "draw a curve, its markers and θ plots"),
                            ("surface", "revolve the curve and export curvature-line meshes"),
                            ("verify", "residual report for the θ-speed identities")):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True)
        _common(sp)
    sp = sub.add_parser("gallery", help="reproduce a bundled figure")
    sp.add_argument("name", choices=GALLERY)
    _common(sp)
    return p


def _common(sp):
    sp.add_argument("--out-dir", default=".")
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    sp.add_argument("--seed", type=int, default=None)


def run(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        data = gallery_config(args.name) if args.command == "gallery" else _read_config(args.config)
        rc = load_config(data)
        if args.seed is not None:
            rc.seed = args.seed
        if args.samples < 1:
            raise ConfigError("--samples must be positive")
        for line in execute(rc, args.command, Path(args.out_dir), args.samples):
            print(line)
    except InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 3
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
