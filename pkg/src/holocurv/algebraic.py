"""Isotropic points, inflections and vertices of affine algebraic plane curves f(z1, z2) = 0.

Each locus is the intersection of f = 0 with a second curve g = 0.  Points are
found by eliminating z2 with a resultant (exact over Q(i) for rational input)
after a rational shear z1 = x + s z2 that separates the x-projections, then
back-substituted through the roots of f(x, .) and refined by 2x2 Newton.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exact import GaussQ
from .expr import BinOp, Call, Expr, GeomSpec, Neg, Num, Pow, Sym, parse
from .polysolve import CommonComponentError, MPoly, Root, RootSet, binary_form_squarefree, resultant, roots

RESIDUAL_TOL = 1e-8
SHEARS = (Fraction(3, 7), Fraction(-5, 11), Fraction(2, 13), Fraction(7, 5))


class HypothesisError(ValueError):
    """The circular points lie on the curve at infinity, or f_d is not reduced."""

    def __init__(self, report: "HypothesisReport"):
        super().__init__(report.summary())
        self.report = report


class DegenerateLocusError(ValueError):
    """The locus polynomial vanishes on a whole component of the curve."""


def mpoly_from_expr(e) -> MPoly:
    """Polynomial in z1, z2 from an expression; exact when all literals are."""
    if isinstance(e, str):
        e = parse(e)
    if isinstance(e, Num):
        v = e.value
        if isinstance(v, complex) and v.imag == 0:
            v = v.real
        return MPoly({(0, 0): GaussQ.of(v)}, exact=True)
    if isinstance(e, Sym):
        if e.name not in ("z1", "z2"):
            raise ValueError(f"unexpected symbol {e.name!r} in a plane polynomial")
        return MPoly.variable(0 if e.name == "z1" else 1)
    if isinstance(e, Neg):
        return -mpoly_from_expr(e.arg)
    if isinstance(e, Pow):
        return mpoly_from_expr(e.base) ** e.exponent
    if isinstance(e, BinOp):
        a, b = mpoly_from_expr(e.left), mpoly_from_expr(e.right)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if b.degree > 0:
                raise ValueError("division by a non-constant polynomial")
            c = b.terms.get((0, 0))
            if c is None:
                raise ZeroDivisionError("division by zero polynomial")
            return a * MPoly({(0, 0): GaussQ.of(1) / c}, exact=True)
    if isinstance(e, Call):
        raise ValueError(f"{e.fn} is not polynomial")
    raise TypeError(f"cannot convert {e!r}")


@dataclass
class AlgCurve:
    f: MPoly

    @classmethod
    def from_expr(cls, text) -> "AlgCurve":
        return cls(mpoly_from_expr(text))

    @classmethod
    def from_spec(cls, spec: GeomSpec) -> "AlgCurve":
        if spec.coefficients:
            return cls(MPoly(dict(spec.coefficients), exact=True))
        return cls.from_expr(spec.components[0])

    @property
    def d(self) -> int:
        return self.f.degree

    @property
    def top_form(self) -> list:
        """Coefficients of f_d ordered z1^d, z1^(d-1) z2, ..., z2^d."""
        return self.f.homogeneous_part(self.d)

    @property
    def F(self) -> dict:
        return self.f.homogenize()

    def grad(self):
        return self.f.diff(0), self.f.diff(1)

    def curvature_numerator(self) -> MPoly:
        """f11 f2^2 - 2 f12 f1 f2 + f22 f1^2."""
        f1, f2 = self.grad()
        return f1.diff(0) * f2 * f2 - 2 * (f1.diff(1) * f1 * f2) + f2.diff(1) * f1 * f1

    def speed2(self) -> MPoly:
        f1, f2 = self.grad()
        return f1 * f1 + f2 * f2

    def tangential_derivative(self, h: MPoly) -> MPoly:
        """D_v h with v = (-f2, f1)."""
        f1, f2 = self.grad()
        return -(f2 * h.diff(0)) + f1 * h.diff(1)

    def vertex_polynomial(self) -> MPoly:
        """2 g D_v N - 3 N D_v g, a cleared derivative of kappa^2 along the curve."""
        N, g = self.curvature_numerator(), self.speed2()
        return 2 * (g * self.tangential_derivative(N)) - 3 * (N * self.tangential_derivative(g))

    def hessian_curve(self) -> MPoly:
        """det of the second derivatives of the homogenization F, at z3 = 1."""
        d = self.d
        f = self.f
        f1, f2 = self.grad()
        f11, f12, f22 = f1.diff(0), f1.diff(1), f2.diff(1)
        z1, z2 = MPoly.variable(0, f.exact), MPoly.variable(1, f.exact)
        # Euler's identity sum_j z_j F_ij = (d - 1) F_i fills the z3 row
        F3 = d * f - z1 * f1 - z2 * f2
        F13 = (d - 1) * f1 - z1 * f11 - z2 * f12
        F23 = (d - 1) * f2 - z1 * f12 - z2 * f22
        F33 = (d - 1) * F3 - z1 * F13 - z2 * F23
        return (
            f11 * (f22 * F33 - F23 * F23)
            - f12 * (f12 * F33 - F23 * F13)
            + F13 * (f12 * F23 - f22 * F13)
        )


@dataclass
class HypothesisReport:
    fd_at_circular_points: tuple
    fd_squarefree: bool
    curve_regular_sampled: bool | None = None

    @property
    def ok(self) -> bool:
        return all(bool(v) for v in self.fd_at_circular_points) and self.fd_squarefree and self.curve_regular_sampled is not False

    def summary(self) -> str:
        bad = []
        if not all(bool(v) for v in self.fd_at_circular_points):
            bad.append("top form vanishes at a circular point (1 : +-i : 0)")
        if not self.fd_squarefree:
            bad.append("top form is not squarefree")
        if self.curve_regular_sampled is False:
            bad.append("curve is singular at a computed point")
        return "hypotheses hold" if not bad else "hypothesis violated: " + "; ".join(bad)

    def to_dict(self) -> dict:
        return {
            "fd_at_circular_points": [complex(v) for v in self.fd_at_circular_points],
            "fd_squarefree": self.fd_squarefree,
            "curve_regular_sampled": self.curve_regular_sampled,
            "ok": self.ok,
        }


def check_hypotheses(curve: AlgCurve) -> HypothesisReport:
    if curve.d < 1:
        raise ValueError("curve degree must be >= 1")
    fd = curve.top_form
    fd = [c if isinstance(c, GaussQ) else GaussQ.of(complex(c)) for c in fd]
    vals = []
    for i in (GaussQ.of(1j), GaussQ.of(-1j)):
        acc, p = GaussQ.of(0), GaussQ.of(1)
        for c in fd:  # c_j z1^(d-j) z2^j at (1, i)
            acc = acc + c * p
            p = p * i
        vals.append(acc)
    _, sf = binary_form_squarefree(fd)
    return HypothesisReport(tuple(vals), sf)


@dataclass
class LocusCount:
    which: str
    expected: int
    found: int
    points: RootSet
    hypothesis_report: HypothesisReport
    certified: bool
    discarded: list = field(default_factory=list)
    cross_check: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    at_infinity: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "which": self.which,
            "expected": self.expected,
            "found": self.found,
            "certified": self.certified,
            "points": [
                {"z1": complex(r.value[0]), "z2": complex(r.value[1]), "multiplicity": r.multiplicity, "residual": r.residual}
                for r in self.points.roots
            ],
            "hypothesis_report": self.hypothesis_report.to_dict(),
            "discarded": [{"z1": complex(a), "z2": complex(b), "reason": why} for a, b, why in self.discarded],
            "cross_check": self.cross_check,
            "at_infinity": [[complex(a), complex(b), 0j] for a, b in self.at_infinity],
            "notes": list(self.notes),
        }


def _maj(p: MPoly, z1, z2) -> float:
    """Majorant of p at (max(1, |z1|), max(1, |z2|))."""
    return max(p.abs_eval(max(1.0, abs(z1)), max(1.0, abs(z2))), 1e-300)


def _rel(p: MPoly, z1, z2) -> float:
    return abs(p(z1, z2)) / _maj(p, z1, z2)


def _shear(p: MPoly, s: Fraction) -> MPoly:
    """p(x + s y, y)."""
    x, y = MPoly.variable(0, p.exact), MPoly.variable(1, p.exact)
    u = x + s * y
    out = MPoly({}, exact=p.exact)
    powers = {}
    for (i, j), c in p.terms.items():
        if i not in powers:
            powers[i] = u**i
        out = out + c * (powers[i] * y**j)
    return out


def _newton2(f: MPoly, g: MPoly, z, iters: int = 30):
    f1, f2, g1, g2 = f.diff(0), f.diff(1), g.diff(0), g.diff(1)
    z1, z2 = z
    best = (max(_rel(f, z1, z2), _rel(g, z1, z2)), z1, z2)
    for _ in range(iters):
        J = np.array([[f1(z1, z2), f2(z1, z2)], [g1(z1, z2), g2(z1, z2)]])
        r = np.array([f(z1, z2), g(z1, z2)])
        try:
            dz = np.linalg.solve(J, r)
        except np.linalg.LinAlgError:
            break
        z1, z2 = z1 - dz[0], z2 - dz[1]
        res = max(_rel(f, z1, z2), _rel(g, z1, z2))
        if res < best[0]:
            best = (res, z1, z2)
        if abs(dz[0]) + abs(dz[1]) <= 1e-15 * (1 + abs(z1) + abs(z2)):
            break
    return best


def intersect(f: MPoly, g: MPoly, tol: float = RESIDUAL_TOL):
    """Affine common zeros of f and g as a RootSet of (z1, z2) pairs.

    Raises CommonComponentError when f and g share a factor.
    """
    last = None
    for s in SHEARS:
        fs, gs = _shear(f, s), _shear(g, s)
        if fs.degree_in(1) == 0 and gs.degree_in(1) == 0:
            continue
        R = resultant(fs, gs, 1)
        deg = R.degree
        if deg < 1:
            return RootSet([], 0, True, ["resultant is a nonzero constant: no affine intersections"])
        xs = roots(R, tol=1e-6)
        pts = []
        ok = True
        for r in xs.roots:
            x = complex(r.value)
            if r.multiplicity > 1:
                ok = False
            # y candidates: roots of one polynomial at x, ranked by the other
            prim, other = (fs, gs) if fs.degree_in(1) >= 1 else (gs, fs)
            fy = prim.univariate(1, x)
            if fy.degree < 1:
                prim, other = other, prim
                fy = prim.univariate(1, x)
            ys = roots(fy, tol=1e-3).values
            ys.sort(key=lambda y: _rel(other, x, y))
            for y in ys[: r.multiplicity]:
                z1, z2 = x + complex(s) * y, y
                res, z1, z2 = _newton2(f, g, (z1, z2))
                pts.append((z1, z2, res))
        # merge duplicates produced by clustered x-roots
        merged: list[list] = []
        for z1, z2, res in pts:
            scale = 1 + abs(z1) + abs(z2)
            for m in merged:
                if abs(m[0] - z1) + abs(m[1] - z2) <= 1e-7 * scale:
                    m[3] += 1
                    break
            else:
                merged.append([z1, z2, res, 1])
        out = RootSet([Root((a, b), k, res) for a, b, res, k in merged], None, True)
        if ok and len(merged) == len(pts):
            out.certified_count = deg
            out.notes.extend(xs.notes)
            return out
        last = out
        last.notes.append(f"shear {s}: repeated projection or multiple point")
    last.certified = False
    return last


def points_at_infinity(curve: AlgCurve) -> list:
    """Projective points (a : b : 0) of the curve, from the roots of the top form."""
    fd = [complex(c) for c in curve.top_form]  # z1^(d-j) z2^j
    d = curve.d
    # f_d(u, 1) = sum_j c_j u^(d-j); a missing leading term means (1 : 0 : 0) lies on the curve
    p = np.array([fd[d - k] for k in range(d + 1)])
    out = []
    deg = int(np.flatnonzero(p)[-1]) if np.any(p) else 0
    if deg >= 1:
        out += [(complex(u), 1 + 0j) for u in roots(p[: deg + 1]).values]
    out += [(1 + 0j, 0j)] * (d - deg)
    return out


def _chart(curve: AlgCurve, pt):
    """Curve in the chart z2 = 1 (or z1 = 1) with affine coordinates of the point at infinity."""
    a, b = pt
    F = curve.F  # (i, j, k) exponents of z1, z2, z3
    if abs(b) >= abs(a):
        g = MPoly({(i, k): c for (i, j, k), c in F.items()}, exact=curve.f.exact)
        return AlgCurve(g), (a / b, 0j)
    g = MPoly({(j, k): c for (i, j, k), c in F.items()}, exact=curve.f.exact)
    return AlgCurve(g), (b / a, 0j)


def _locus(curve: AlgCurve, which: str, g: MPoly, expected: int, rep: HypothesisReport, filters=(), tol=RESIDUAL_TOL) -> LocusCount:
    f = curve.f
    pts = intersect(f, g, tol)
    keep, discarded = [], []
    for r in pts.roots:
        z1, z2 = r.value
        why = next((name for name, test in filters if test(z1, z2)), None)
        if why:
            discarded.append((z1, z2, why))
        else:
            keep.append(r)
    rs = RootSet(keep, None, pts.certified, list(pts.notes))
    f1, f2 = curve.grad()
    regular = all(abs(f1(*r.value)) + abs(f2(*r.value)) > 1e-8 * (_maj(f1, *r.value) + _maj(f2, *r.value)) for r in keep)
    rep.curve_regular_sampled = regular if rep.curve_regular_sampled is None else (rep.curve_regular_sampled and regular)
    found = rs.count()
    resid_ok = all(r.residual < tol for r in keep)
    simple = all(r.multiplicity == 1 for r in keep)
    certified = pts.certified and resid_ok and found == expected and regular
    out = LocusCount(which, expected, found, rs, rep, certified, discarded)
    if not resid_ok:
        out.notes.append(f"residual above {tol:g} at some point")
    if not simple:
        out.notes.append("point of multiplicity > 1: non-generic curve")
    if found != expected:
        out.notes.append(f"found {found}, expected {expected}")
    out.notes.extend(rs.notes)
    rs.certified = certified
    rs.certified_count = found if certified else None
    return out


def _require(curve: AlgCurve, require: bool) -> HypothesisReport:
    rep = check_hypotheses(curve)
    if require and not rep.ok:
        raise HypothesisError(rep)
    return rep


def isotropic_points(curve: AlgCurve, require_hypotheses: bool = True) -> LocusCount:
    """Common zeros of f and f_z1^2 + f_z2^2; 2d(d - 1) under the hypotheses."""
    rep = _require(curve, require_hypotheses)
    d = curve.d
    return _locus(curve, "isotropic_points", curve.speed2(), 2 * d * (d - 1), rep)


def inflections(curve: AlgCurve, require_hypotheses: bool = True) -> LocusCount:
    """Intersections with the Hessian curve, each cross-checked by the curvature numerator."""
    d = curve.d
    if d < 2:
        raise ValueError("inflections need degree >= 2")
    rep = _require(curve, require_hypotheses)
    H = curve.hessian_curve()
    expected = 3 * d * (d - 2)
    if H.degree <= 0:
        out = LocusCount("inflections", expected, 0, RootSet([], 0, True), rep, expected == 0 and not H.is_zero())
        out.notes.append("Hessian determinant is constant" if not H.is_zero() else "Hessian vanishes identically")
        if rep.curve_regular_sampled is None:
            rep.curve_regular_sampled = True
        return out
    out = _locus(curve, "inflections", H, expected, rep)
    # flexes on the line at infinity, tested with the Hessian in another chart
    for pt in points_at_infinity(curve):
        ch, (u, w) = _chart(curve, pt)
        Hc = ch.hessian_curve()
        res, u, w = _newton2(ch.f, Hc, (u, w)) if Hc.degree > 0 else (1.0, u, w)
        if res < RESIDUAL_TOL and abs(w) <= 1e-8 * max(1.0, abs(u)):
            out.at_infinity.append(pt)
    if out.at_infinity:
        out.found += len(out.at_infinity)
        out.notes = [n for n in out.notes if not n.startswith("found ")]
        out.notes.append(f"{len(out.at_infinity)} inflection(s) on the line at infinity")
        if out.found != expected:
            out.notes.append(f"found {out.found}, expected {expected}")
        out.certified = out.found == expected and all(r.residual < RESIDUAL_TOL for r in out.points.roots)
    N = curve.curvature_numerator()
    for r in out.points.roots:
        z1, z2 = r.value
        rel = _rel(N, z1, z2)
        out.cross_check.append({"curvature_numerator_rel": rel, "agrees": rel < 1e-6})
    if not all(c["agrees"] for c in out.cross_check):
        out.certified = False
        out.notes.append("curvature numerator does not vanish at some Hessian point")
    return out


def vertices(curve: AlgCurve, require_hypotheses: bool = True) -> LocusCount:
    """Zeros of the vertex polynomial on f = 0, inflections and isotropic points removed."""
    d = curve.d
    if d < 2:
        raise ValueError("vertices need degree >= 2")
    rep = _require(curve, require_hypotheses)
    N, g = curve.curvature_numerator(), curve.speed2()
    filters = (
        ("isotropic", lambda a, b: _rel(g, a, b) < 1e-7),
        ("inflection", lambda a, b: _rel(N, a, b) < 1e-7),
    )
    W = curve.vertex_polynomial()
    if W.is_zero():
        raise DegenerateLocusError("vertex polynomial vanishes identically: constant curvature")
    try:
        return _locus(curve, "vertices", W, 2 * d * (3 * d - 5), rep, filters)
    except CommonComponentError as exc:
        raise DegenerateLocusError("vertex polynomial vanishes on the curve: constant curvature") from exc
