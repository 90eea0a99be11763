"""Holomorphic space curves t -> (z1, z2, z3): Frenet-Serret data and contact types.

With X = gamma' x gamma'', C = <X, X> and s = <gamma', gamma'>:

    kappa = sqrt(C) / s^(3/2),   tau = -<X, gamma'''> / C,
    T = gamma' / sqrt(s),   B = X / sqrt(C),   N = B x T.

Classification never uses a square root: the torsion numerator
m = <X, gamma'''> and the cleared projection invariant

    R = 6 C m'' - 13 C' m'    (t-derivatives, at a point with m = 0)

which is nonzero exactly when kappa' tau' - 3 kappa tau'' (arc-length
derivatives) is.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contact import TOL_REL, ContactClass, classify_series, ladder_margin
from .cplx import TOL_ISO, Branch, BranchedScalar, cross, hnorm2, sqrt_branched
from .jets import DEFAULT_CURVE_ORDER, Jet1
from .param import ParamCurve
from .plane import CurveError, NonRegularError


class SpaceCurve(ParamCurve):
    def __init__(self, components, branch: Branch | str = Branch.PRINCIPAL):
        super().__init__(components, branch)
        if self.dim != 3:
            raise CurveError(f"a space curve has 3 components, got {self.dim}")

    def transformed(self, R, b) -> "SpaceCurve":
        moved = super().transformed(R, b)
        return SpaceCurve(moved.components, self.branch)


def as_space_curve(curve) -> SpaceCurve:
    if isinstance(curve, SpaceCurve):
        return curve
    if isinstance(curve, ParamCurve) or hasattr(curve, "kind"):
        return SpaceCurve(curve.components, curve.branch)
    return SpaceCurve(curve)


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def _maj(v):
    return [x.majorant() for x in v]


def _dot_maj(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross_maj(a, b):
    return [a[1] * b[2] + a[2] * b[1], a[2] * b[0] + a[0] * b[2], a[0] * b[1] + a[1] * b[0]]


@dataclass
class _SpaceJets:
    x: list
    d1: list
    d2: list
    d3: list
    s: Jet1
    X: list
    C: Jet1
    m: Jet1
    sM: Jet1
    XM: list
    CM: Jet1
    mM: Jet1


def _space_jets(curve: SpaceCurve, t: complex, order: int) -> _SpaceJets:
    x = curve.jets(t, order)
    d1 = [c.diff() for c in x]
    d2 = [c.diff() for c in d1]
    d3 = [c.diff() for c in d2]
    X = _cross(d1, d2)
    a1, a2, a3 = _maj(d1), _maj(d2), _maj(d3)
    XM = _cross_maj(a1, a2)
    return _SpaceJets(
        x, d1, d2, d3,
        _dot(d1, d1), X, _dot(X, X), _dot(X, d3),
        _dot_maj(a1, a1), XM, _dot_maj(XM, XM), _dot_maj(XM, a3),
    )


def _val(v):
    return np.array([c.value for c in v])


@dataclass
class FrenetData:
    t: complex
    position: np.ndarray
    velocity: np.ndarray
    branch: Branch
    isotropic_point: bool
    isotropic_osculating_plane: bool
    zero_curvature: bool = False
    T: np.ndarray | None = None
    N: np.ndarray | None = None
    B: np.ndarray | None = None
    kappa: BranchedScalar | None = None
    kappa2: complex | None = None
    tau: complex | None = None
    kappa_s: complex | None = None  # arc-length derivatives
    tau_s: complex | None = None
    tau_ss: complex | None = None
    projection_invariant: complex | None = None  # kappa' tau' - 3 kappa tau''
    cleared_invariant: complex | None = None  # 6 C m'' - 13 C' m'
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        from .report import jsonable

        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k not in ("kappa", "branch")}
        d["branch"] = self.branch.value
        d["kappa"] = None if self.kappa is None else self.kappa.value
        return jsonable(d)


def frenet_at(
    curve,
    t: complex,
    branch: Branch | str | None = None,
    tol_iso: float = TOL_ISO,
    order: int = DEFAULT_CURVE_ORDER,
) -> FrenetData:
    """Frenet frame, curvature and torsion; the frame is withheld at isotropic data."""
    curve = as_space_curve(curve)
    branch = Branch.parse(branch) if branch is not None else curve.branch
    t = complex(t)
    J = _space_jets(curve, t, order)
    pos, vel = _val(J.x), _val(J.d1)
    if hnorm2(vel) <= 1e-28 * max(1.0, hnorm2(pos)):
        raise NonRegularError(f"gamma'({t}) vanishes")
    acc = _val(J.d2)
    Xv = _val(J.X)
    s0, C0 = J.s.value, J.C.value
    iso_pt = abs(s0) <= tol_iso * max(1.0, hnorm2(vel))
    zero_k = hnorm2(Xv) <= (1e-12) ** 2 * max(hnorm2(vel) * hnorm2(acc), 1e-300) or not np.any(Xv)
    iso_plane = (not zero_k) and abs(C0) <= tol_iso * max(1.0, hnorm2(Xv))
    out = FrenetData(t, pos, vel, branch, iso_pt, iso_plane, zero_k)
    if zero_k:
        out.flags.append("zero_curvature")
        out.kappa2 = 0j
        out.kappa = BranchedScalar(0j, branch, 0.0, degenerate=True)
        return out
    if iso_pt:
        out.flags.append("isotropic_point")
    if iso_plane:
        out.flags.append("isotropic_osculating_plane")
    if iso_pt or iso_plane:
        return out
    sigma = J.s.sqrt(branch)
    rootC = J.C.sqrt(branch)
    kappa = rootC / sigma**3
    tau = -J.m / J.C
    out.kappa2 = C0 / s0**3
    out.kappa = BranchedScalar(kappa.value, branch, min(sqrt_branched(s0, branch).cut_margin, sqrt_branched(C0, branch).cut_margin))
    out.tau = tau.value
    out.T = vel / sigma.value
    out.B = Xv / rootC.value
    out.N = cross(out.B, out.T)

    def d_ds(f):
        return f.diff() / sigma.truncate(f.order - 1)

    ks = d_ds(kappa)
    ts = d_ds(tau)
    tss = d_ds(ts)
    out.kappa_s, out.tau_s, out.tau_ss = ks.value, ts.value, tss.value
    out.projection_invariant = ks.value * ts.value - 3 * kappa.value * tss.value
    m1, m2 = J.m.derivative(1), J.m.derivative(2)
    out.cleared_invariant = 6 * C0 * m2 - 13 * J.C.derivative(1) * m1
    return out


# -- contact with planes and projections along lines ------------------------------------


@dataclass(frozen=True)
class Plane:
    """Height function H(t) = <gamma(t), v>."""

    v: tuple


@dataclass(frozen=True)
class Projection:
    """Parallel projection along v onto a complementary plane."""

    v: tuple


def _complement_functionals(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two covectors with common kernel spanned by v (target coordinates)."""
    E = np.eye(3, dtype=complex)
    best = None
    for i in range(3):
        for j in range(i + 1, 3):
            d = abs(np.linalg.det(np.array([v, E[i], E[j]])))
            if best is None or d > best[0]:
                best = (d, E[i], E[j])
    _, p, q = best
    return cross(q, v), cross(v, p)


def image_jet(curve, t: complex, v, order: int = DEFAULT_CURVE_ORDER):
    """Jets (x(t), y(t)) of the projection of gamma along v, and their majorants."""
    curve = as_space_curve(curve)
    v = np.asarray(v, dtype=complex)
    l1, l2 = _complement_functionals(v)
    x = curve.jets(complex(t), order)
    xs = [sum((x[k] * complex(l[k]) for k in range(3)), start=x[0] * 0) for l in (l1, l2)]
    ms = [sum((x[k].majorant() * abs(l[k]) for k in range(3)), start=x[0] * 0) for l in (l1, l2)]
    return xs, ms


def _det2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _classify_projection(curve, t, v, tol_rel, order) -> ContactClass:
    (X, Y), (XM, YM) = image_jet(curve, t, v, order)
    c = [np.array([X.c[k], Y.c[k]]) for k in range(order + 1)]
    m = [np.array([abs(XM.c[k]), abs(YM.c[k])]) for k in range(order + 1)]

    def vanishes(k):
        return math.sqrt(hnorm2(c[k])) <= tol_rel * max(float(np.max(m[k])), 1e-300)

    residuals = [math.sqrt(hnorm2(c[1])) / max(float(np.max(m[1])), 1e-300)]
    if not vanishes(1):
        return ContactClass("A", 0, residuals)
    residuals.append(math.sqrt(hnorm2(c[2])) / max(float(np.max(m[2])), 1e-300))
    if vanishes(2):
        return ContactClass("Degenerate", None, residuals, reason="second derivative of the image vanishes")
    d23 = abs(_det2(c[2], c[3]))
    s23 = float(np.max(m[2]) * np.max(m[3])) * 2
    residuals.append(d23 / max(s23, 1e-300))
    if d23 > tol_rel * s23:
        return ContactClass("A", 2, residuals)
    inv = _det2(c[2], c[5]) - 2 * _det2(c[3], c[4])
    sinv = float(np.max(m[2]) * np.max(m[5]) + 2 * np.max(m[3]) * np.max(m[4])) * 2
    residuals.append(abs(inv) / max(sinv, 1e-300))
    if abs(inv) > tol_rel * sinv:
        return ContactClass("A", 4, residuals)
    return ContactClass("Degenerate", None, residuals, reason="image germ beyond A4")


def classify_contact3(
    curve,
    t: complex,
    model,
    tol_rel: float = TOL_REL,
    tol_iso: float = TOL_ISO,
    order: int = DEFAULT_CURVE_ORDER,
    check_branch: bool = True,
) -> ContactClass:
    """Contact of a space curve with a plane (height) or a line (projection)."""
    curve = as_space_curve(curve)
    t = complex(t)
    fr = frenet_at(curve, t, tol_iso=tol_iso, order=order)
    if fr.isotropic_point or fr.isotropic_osculating_plane:
        raise CurveError(f"contact classification needs non-isotropic data; flags {fr.flags}")
    v = np.asarray(model.v, dtype=complex)
    J = _space_jets(curve, t, order)
    vel = fr.velocity
    nv = math.sqrt(hnorm2(v))
    tau_zero = None
    if not fr.zero_curvature:
        tau_zero = abs(J.m.value) <= tol_rel * max(J.mM.value.real, 1e-300)
    if isinstance(model, Plane):
        x = J.x
        h = x[0] * v[0] + x[1] * v[1] + x[2] * v[2]
        M = x[0].majorant() * abs(v[0]) + x[1].majorant() * abs(v[1]) + x[2].majorant() * abs(v[2])
        out = classify_series(h.c, M.c, tol_rel)
        k = out.k if out.kind == "A" else 99
        tangent_perp = abs(vel @ v) <= tol_rel * math.sqrt(hnorm2(vel)) * nv
        out.checks["A1_iff_v_normal"] = {"predicate": bool(tangent_perp), "agrees": bool(tangent_perp == (k >= 1))}
        if not fr.zero_curvature:
            Xv = _val(J.X)
            binormal = math.sqrt(hnorm2(cross(v, Xv))) <= 1e-6 * math.sqrt(hnorm2(Xv)) * nv
            out.checks["A2_iff_v_binormal"] = {"predicate": bool(binormal), "agrees": bool(binormal == (k >= 2))}
            if binormal:
                m1 = abs(J.m.c[1]) > tol_rel * max(J.mM.c[1].real, 1e-300)
                pred = bool(tau_zero and m1)
                out.checks["A3_iff_torsion_simple_zero"] = {"predicate": pred, "agrees": bool(pred == (k == 3))}
    elif isinstance(model, Projection):
        out = _classify_projection(curve, t, v, tol_rel, order)
        singular = math.sqrt(hnorm2(cross(v, vel))) <= 1e-6 * math.sqrt(hnorm2(vel)) * nv
        out.checks["singular_iff_v_tangent"] = {
            "predicate": bool(singular),
            "agrees": bool(singular == (out.label != "A0")),
        }
        if singular and not fr.zero_curvature:
            out.checks["A2_iff_torsion_nonzero"] = {
                "predicate": bool(not tau_zero),
                "agrees": bool((not tau_zero) == (out.label == "A2")),
            }
            if tau_zero:
                R = fr.cleared_invariant
                scale = _cleared_scale(J)
                nonzero = abs(R) > tol_rel * scale
                out.checks["A4_iff_cleared_invariant_nonzero"] = {
                    "predicate": bool(nonzero),
                    "agrees": bool(nonzero == (out.label == "A4")),
                    "cleared_invariant": [R.real, R.imag],
                    "projection_invariant": [fr.projection_invariant.real, fr.projection_invariant.imag],
                }
                if ladder_margin([abs(R) / max(scale, 1e-300)], tol_rel):
                    out.warnings.append("cleared invariant is within 1e3 of the vanishing tolerance")
    else:
        raise TypeError(f"unknown contact model {model!r}")
    if check_branch:
        other = classify_contact3(
            curve.with_branch(curve.branch.swapped()), t, model, tol_rel, tol_iso, order, check_branch=False
        )
        out.branch_invariant = other.label == out.label
    return out


def _cleared_scale(J: _SpaceJets) -> float:
    # majorant of 6 C m'' - 13 C' m' built from the absolute-value jets
    return float(6 * J.CM.c[0].real * 2 * J.mM.c[2].real + 13 * J.CM.c[1].real * J.mM.c[1].real)
