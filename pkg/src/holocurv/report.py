"""Report assembly and locus export for batch runs over a geometry spec."""
from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field, fields, is_dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import __version__

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_HYPOTHESIS = 3
EXIT_UNCERTIFIED = 4


def _num(x: float):
    x = float(x)
    return x if math.isfinite(x) else None


def jsonable(obj):
    """Convert results to JSON-ready values; complex numbers become [re, im]."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_num(obj.real), _num(obj.imag)]
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return [jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if is_dataclass(obj):
        return {f.name: jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if hasattr(obj, "__complex__"):
        return jsonable(complex(obj))
    return str(obj)


def _cval(x) -> complex:
    """A complex number from a number, [re, im] pair, or expression text like "i/2"."""
    if isinstance(x, str):
        from .expr import evaluate, parse

        return complex(evaluate(parse(x, symbols=()), {}))
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"expected [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    return complex(x)


# -- loci -----------------------------------------------------------------------------


@dataclass
class LocusTable:
    """Rows of a plottable locus: numeric columns followed by a flags column."""

    name: str
    columns: list
    rows: list = field(default_factory=list)  # (list of floats, flags string)

    def to_dict(self) -> dict:
        return {"name": self.name, "columns": self.columns, "n_rows": len(self.rows)}


def _g17(x) -> str:
    x = float(x)
    return "nan" if math.isnan(x) else "%.17g" % x


def export_locus(table: LocusTable, fmt: str, path) -> Path:
    """Write a locus as CSV (header + rows at 17 significant digits) or JSON records."""
    path = Path(path)
    if fmt == "csv":
        lines = [",".join(table.columns)]
        for vals, flags in table.rows:
            lines.append(",".join([_g17(v) for v in vals] + [flags]))
        path.write_text("\n".join(lines) + "\n")
    elif fmt == "json":
        recs = []
        for vals, flags in table.rows:
            rec = {c: (None if math.isnan(float(v)) else float(v)) for c, v in zip(table.columns, vals)}
            rec[table.columns[-1]] = flags
            recs.append(rec)
        path.write_text(json.dumps({"name": table.name, "columns": table.columns, "rows": recs}, indent=1, allow_nan=False))
    else:
        raise ValueError(f"unknown locus format {fmt!r}")
    return path


# -- analyses -------------------------------------------------------------------------


class _Ctx:
    def __init__(self, spec, tol_rel, tol_iso, root_tol, threads):
        self.spec = spec
        self.tol_rel = tol_rel
        self.tol_iso = tol_iso
        self.root_tol = root_tol
        self.threads = threads
        self.warnings: list = []
        self.tables: list = []
        self.hypothesis_failed = False
        self.uncertified = False

    def warn(self, index, code, message):
        self.warnings.append({"analysis": index, "code": code, "message": str(message)})
        if code == "hypothesis_violation":
            self.hypothesis_failed = True
        elif code in ("uncertified", "error"):
            self.uncertified = True


def _plane(ctx, k, a):
    from . import plane

    spec = ctx.spec
    curve = plane.PlaneCurve(spec.components, spec.branch)
    t = a["type"]
    if t == "invariants_at":
        out = []
        for p in a.get("points", [0]):
            inv = plane.invariants_at(curve, _cval(p), a.get("depth", 3), tol_iso=ctx.tol_iso, tol_rel=ctx.tol_rel)
            out.append(inv.to_dict())
        return {"points": out}
    if t in ("isotropic_points", "inflections", "vertices") and spec.domain["t"].empty:
        raise ValueError(f"{t} counts zeros in a rectangle; the t domain has zero area")
    if t == "isotropic_points":
        rs = plane.isotropic_parameters(curve, spec.domain["t"], spec.option("grid"), ctx.root_tol)
        if not rs.certified:
            ctx.warn(k, "uncertified", "isotropic parameter count not certified: " + "; ".join(rs.notes))
        return {
            "certified": rs.certified,
            "count": rs.count(),
            "points": [{"t": r.value, "multiplicity": r.multiplicity, "residual": r.residual} for r in rs.roots],
        }
    if t in ("inflections", "vertices"):
        from .jets import Jet1
        from .polysolve import zeros_in_box

        def h(tj):
            z = tj.value if isinstance(tj, Jet1) else complex(tj)
            order = 1 if isinstance(tj, Jet1) else 0
            cl = plane._cleared(curve, z, order + 4)
            f = cl.n if t == "inflections" else cl.w
            return Jet1(z, f.c[: order + 1]) if order else complex(f.value)

        rs = zeros_in_box(h, spec.domain["t"], spec.option("grid"), ctx.root_tol)
        if not rs.certified:
            ctx.warn(k, "uncertified", f"{t} count not certified: " + "; ".join(rs.notes))
        return {
            "certified": rs.certified,
            "count": rs.count(),
            "points": [{"t": r.value, "multiplicity": r.multiplicity, "residual": r.residual} for r in rs.roots],
        }
    if t == "evolute":
        n = int(a.get("samples", spec.option("samples")))
        tr = plane.evolute_sample(curve, spec.domain["t"], n, ctx.tol_iso, ctx.tol_rel, spec.option("grid"))
        table = LocusTable(a.get("name", "evolute"), plane.CSV_HEADER.split(","), list(tr.rows()))
        ctx.tables.append(table)
        if not tr.certified:
            ctx.warn(k, "uncertified", "; ".join(tr.warnings))
        flagged = sorted({f for p in tr.samples for f in p.flags} - {"isotropic"})
        if flagged:
            ctx.warn(k, "degenerate", f"evolute samples flagged: {', '.join(flagged)}")
        return {
            "locus": table.name,
            "n_samples": len(tr.samples),
            "isotropic": [jsonable(r) for r in tr.isotropic],
            "certified": tr.certified,
        }
    if t == "contact":
        at = _cval(a.get("t", 0))
        model = a.get("model", "circle")
        if model == "line":
            v = a.get("v")
            if v is None:
                inv = plane.invariants_at(curve, at, tol_iso=ctx.tol_iso, tol_rel=ctx.tol_rel)
                v = [-inv.velocity[1], inv.velocity[0]]
            m = plane.Line(tuple(_cval(x) for x in v))
        elif model == "circle":
            c = a.get("c")
            if c is None:
                inv = plane.invariants_at(curve, at, tol_iso=ctx.tol_iso, tol_rel=ctx.tol_rel)
                if inv.evolute_point is None:
                    raise plane.CurveError("no osculating circle at this point")
                c = inv.evolute_point
            m = plane.Circle(tuple(_cval(x) for x in c))
        else:
            raise ValueError(f"unknown plane contact model {model!r}")
        cc = plane.classify_contact(curve, at, m, tol_rel=ctx.tol_rel, tol_iso=ctx.tol_iso)
        if cc.warnings:
            ctx.warn(k, "borderline", "; ".join(cc.warnings))
        return {"t": at, "model": model, "class": cc.to_dict()}
    if t == "hermitian_jacobian":
        chart = plane.arc_length_chart(curve, _cval(a.get("t0", 0)), spec.branch, float(a.get("radius", 1.0)))
        vals = []
        for s, v in a.get("samples", [[0, 1]]):
            vals.append({"s": _cval(s), "v": _cval(v), "det": plane.hermitian_jacobian(chart, _cval(s), _cval(v))})
        return {"samples": vals}
    raise ValueError(f"unknown analysis {t!r}")


def _space(ctx, k, a):
    from . import space

    spec = ctx.spec
    curve = space.SpaceCurve(spec.components, spec.branch)
    t = a["type"]
    if t == "invariants_at":
        return {"points": [space.frenet_at(curve, _cval(p), tol_iso=ctx.tol_iso).to_dict() for p in a.get("points", [0])]}
    if t == "contact":
        at = _cval(a.get("t", 0))
        v = tuple(_cval(x) for x in a["v"])
        model = space.Plane(v) if a.get("model", "plane") == "plane" else space.Projection(v)
        cc = space.classify_contact3(curve, at, model, tol_rel=ctx.tol_rel, tol_iso=ctx.tol_iso)
        if cc.warnings:
            ctx.warn(k, "borderline", "; ".join(cc.warnings))
        return {"t": at, "model": a.get("model", "plane"), "class": cc.to_dict()}
    raise ValueError(f"unknown analysis {t!r}")


def _surface(ctx, k, a):
    from . import surface

    spec = ctx.spec
    patch = surface.SurfacePatch(spec.components, spec.branch)
    t = a["type"]

    def qs():
        return [(_cval(q[0]), _cval(q[1])) for q in a.get("points", [[0, 0]])]

    if t == "forms_at":
        out = []
        for q in qs():
            f = surface.forms_at(patch, q, tol_iso=ctx.tol_iso)
            rec = {"forms": f.to_dict()}
            if not f.on_il:
                rec["shape"] = surface._shape_from_forms(f, ctx.tol_rel).to_dict()
            out.append(rec)
        return {"points": out}
    if t == "focal_at":
        out = []
        for q in qs():
            fd = surface.focal_at(patch, q, tol_iso=ctx.tol_iso, tol_rel=ctx.tol_rel)
            if fd.il_extension.on_il and fd.il_extension.extended_focal_point is None:
                ctx.warn(k, "degenerate", f"degenerate focal extension at {q}: {fd.il_extension.reason}")
            out.append(fd.to_dict())
        return {"points": out}
    if t == "contact":
        q = tuple(_cval(x) for x in a.get("q", [0, 0]))
        model = a.get("model", "plane")
        if model == "plane":
            m = surface.PlaneModel(None if a.get("v") is None else tuple(_cval(x) for x in a["v"]))
        elif model == "sphere":
            m = surface.Sphere(tuple(_cval(x) for x in a["c"]))
        elif model == "projection":
            m = surface.ProjectionModel(tuple(_cval(x) for x in a["v"]))
        else:
            raise ValueError(f"unknown surface contact model {model!r}")
        rep = surface.contact_report(patch, q, m, tol_rel=ctx.tol_rel, tol_iso=ctx.tol_iso)
        if rep.agrees is False:
            ctx.warn(k, "borderline", "geometric predicate and germ classifier disagree")
        return {"q": q, "report": rep.to_dict()}
    if t == "locus":
        which = a.get("which", "il")
        sl = surface.Slice.from_config(a.get("slice", {}), spec.domain)
        tr = surface.trace_locus(patch, which, sl, int(a.get("n", 64)), threads=ctx.threads)
        table = LocusTable(a.get("name", f"locus_{which}"), surface.LocusTrace.CSV_HEADER.split(","), list(tr.rows()))
        ctx.tables.append(table)
        if "identically_zero" in tr.flags:
            ctx.warn(k, "degenerate", f"{which} defining function vanishes identically on the slice")
        return {"locus": table.name, "which": which, "segments": len(tr.segments), "points": tr.n_points, "flags": tr.flags}
    raise ValueError(f"unknown analysis {t!r}")


def _algebraic(ctx, k, a):
    from . import algebraic

    curve = algebraic.AlgCurve.from_spec(ctx.spec)
    t = a["type"]
    if t == "hypotheses":
        rep = algebraic.check_hypotheses(curve)
        if not rep.ok:
            ctx.warn(k, "hypothesis_violation", rep.summary())
        return rep.to_dict()
    fn = {"isotropic_points": algebraic.isotropic_points, "inflections": algebraic.inflections, "vertices": algebraic.vertices}[t]
    try:
        lc = fn(curve)
    except algebraic.HypothesisError as exc:
        ctx.warn(k, "hypothesis_violation", exc)
        return {"hypothesis_report": exc.report.to_dict()}
    except algebraic.DegenerateLocusError as exc:
        ctx.warn(k, "degenerate", exc)
        return {"degenerate": str(exc)}
    if not lc.certified:
        ctx.warn(k, "uncertified", f"{t}: found {lc.found}, expected {lc.expected}; " + "; ".join(lc.notes))
    return lc.to_dict()


_HANDLERS = {"plane_curve": _plane, "space_curve": _space, "surface": _surface, "algebraic_curve": _algebraic}


def config_digest(doc: dict, overrides: dict) -> str:
    blob = json.dumps({"spec": doc, "overrides": overrides}, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class Report:
    data: dict
    tables: list
    exit_code: int


def run(doc: dict, branch: str | None = None, tol: float | None = None, threads: int = 1) -> Report:
    """Validate the spec document, run its analyses in order, and assemble the report."""
    from .expr import spec_from_dict, validate

    overrides = {k: v for k, v in (("branch", branch), ("tol_rel", tol)) if v is not None}
    doc = dict(doc)
    doc["options"] = {**dict(doc.get("options", {})), **overrides}
    spec = spec_from_dict(doc)
    diags = validate(spec)
    data = {
        "tool": "holocurv",
        "version": __version__,
        "config_digest": config_digest(doc, overrides),
        "kind": spec.kind,
        "branch": None,
        "results": [],
        "warnings": [],
        "diagnostics": [jsonable(d) for d in diags],
    }
    t_start = time.perf_counter()
    if diags:
        data["exit_code"] = EXIT_INVALID
        data["timing"] = {"total_s": time.perf_counter() - t_start, "analyses_s": []}
        return Report(data, [], EXIT_INVALID)
    data["branch"] = spec.branch.value
    ctx = _Ctx(spec, float(spec.option("tol_rel")), float(spec.option("tol_iso")), float(spec.option("root_tol")), threads)
    handler = _HANDLERS[spec.kind]
    times = []
    for k, a in enumerate(spec.analyses):
        t0 = time.perf_counter()
        entry = {"index": k, "type": a["type"], "status": "ok"}
        n_warn = len(ctx.warnings)
        try:
            entry["result"] = jsonable(handler(ctx, k, a))
        except Exception as exc:  # reported per analysis, later analyses still run
            entry["status"] = "error"
            entry["error"] = f"{type(exc).__name__}: {exc}"
            ctx.warn(k, "error", entry["error"])
        if entry["status"] == "ok" and len(ctx.warnings) > n_warn:
            entry["status"] = "warning"
        data["results"].append(entry)
        times.append(time.perf_counter() - t0)
    data["warnings"] = ctx.warnings
    data["loci"] = [t.to_dict() for t in ctx.tables]
    code = EXIT_HYPOTHESIS if ctx.hypothesis_failed else (EXIT_UNCERTIFIED if ctx.uncertified else EXIT_OK)
    data["exit_code"] = code
    data["timing"] = {"total_s": time.perf_counter() - t_start, "analyses_s": times}
    return Report(data, ctx.tables, code)


def write_outputs(report: Report, out_dir, fmt: str = "csv") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for table in report.tables:
        paths.append(export_locus(table, fmt, out / f"{table.name}.{fmt}"))
    p = out / "report.json"
    p.write_text(json.dumps(report.data, indent=2, allow_nan=False) + "\n")
    paths.append(p)
    return paths


def schema_path() -> Path:
    return Path(__file__).with_name("schema") / "report.schema.json"
