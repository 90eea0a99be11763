"""Holomorphic plane curves t -> (z1(t), z2(t)) under the holomorphic metric.

Every branch-sensitive quantity (T, N, kappa) is computed from the speed root;
everything that classifies (inflection/vertex orders, evolute, contact) is
computed from cleared numerators that contain no square root:

    n(t) = z1' z2'' - z2' z1''            kappa  = n / sigma^3
    w(t) = n' s - (3/2) s' n              kappa' = w / sigma^5
    e(t) = gamma + (s / n) (-z2', z1')    with s = <gamma', gamma'> = sigma^2
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contact import TOL_REL, ContactClass, classify_series, ladder
from .cplx import TOL_ISO, Branch, BranchedScalar, hnorm2, sqrt_branched
from .expr import Box
from .jets import DEFAULT_CURVE_ORDER, Jet1
from .param import ParamCurve
from .polysolve import BoundaryZeroError, zeros_in_box


class CurveError(ValueError):
    pass


class NonRegularError(CurveError):
    """gamma'(t) = 0."""


class DegenerateIsotropicError(CurveError):
    """Isotropic point where the curve lacks ordinary contact with its tangent line."""


class IsotropicLineError(CurveError):
    """The curve lies in an isotropic line (speed vanishes identically)."""


class ChartError(CurveError):
    """No admissible straight integration path for the unit-speed chart."""


class PlaneCurve(ParamCurve):
    def __init__(self, components, branch: Branch | str = Branch.PRINCIPAL):
        super().__init__(components, branch)
        if self.dim != 2:
            raise CurveError(f"a plane curve has 2 components, got {self.dim}")

    def transformed(self, R, b) -> "PlaneCurve":
        moved = super().transformed(R, b)
        return PlaneCurve(moved.components, self.branch)


def as_plane_curve(curve) -> PlaneCurve:
    if isinstance(curve, PlaneCurve):
        return curve
    if isinstance(curve, ParamCurve):
        return PlaneCurve(curve.components, curve.branch)
    if hasattr(curve, "kind"):
        return PlaneCurve(curve.components, curve.branch)
    return PlaneCurve(curve)


@dataclass
class _Cleared:
    """Jets of gamma and the cleared numerators with their majorants."""

    x: list
    d: list
    s: Jet1
    n: Jet1
    w: Jet1
    sM: Jet1
    nM: Jet1
    wM: Jet1


def _cleared(curve: PlaneCurve, t: complex, order: int) -> _Cleared:
    x1, x2 = curve.jets(t, order)
    d1, d2 = x1.diff(), x2.diff()
    e1, e2 = d1.diff(), d2.diff()
    s = d1 * d1 + d2 * d2
    n = d1 * e2 - d2 * e1
    w = n.diff() * s - 1.5 * (s.diff() * n)
    a1, a2, b1, b2 = d1.majorant(), d2.majorant(), e1.majorant(), e2.majorant()
    sM = a1 * a1 + a2 * a2
    nM = a1 * b2 + a2 * b1
    wM = nM.diff() * sM + 1.5 * (sM.diff() * nM)
    return _Cleared([x1, x2], [d1, d2], s, n, w, sM, nM, wM)


@dataclass
class PointInvariants2:
    t: complex
    position: np.ndarray
    velocity: np.ndarray
    speed2: complex
    isotropic: bool
    branch: Branch
    T: np.ndarray | None = None
    N: np.ndarray | None = None
    kappa: BranchedScalar | None = None
    kappa_derivs: list = field(default_factory=list)
    inflection_order: int | None = None
    vertex_order: int | None = None
    evolute_point: np.ndarray | None = None
    osculating: tuple | None = None  # (center, radius^2)
    curvature_numerator: complex = 0j
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        from .report import jsonable

        return jsonable(
            {
                "t": self.t,
                "position": self.position,
                "velocity": self.velocity,
                "speed2": self.speed2,
                "isotropic": self.isotropic,
                "branch": self.branch.value,
                "T": self.T,
                "N": self.N,
                "kappa": None if self.kappa is None else self.kappa.value,
                "kappa_cut_margin": None if self.kappa is None else self.kappa.cut_margin,
                "kappa_derivs": self.kappa_derivs,
                "inflection_order": self.inflection_order,
                "vertex_order": self.vertex_order,
                "evolute_point": self.evolute_point,
                "osculating_center": None if self.osculating is None else self.osculating[0],
                "osculating_radius2": None if self.osculating is None else self.osculating[1],
                "flags": self.flags,
            }
        )


def _check_regular(cl: _Cleared, t):
    vel = np.array([cl.d[0].value, cl.d[1].value])
    pos = np.array([cl.x[0].value, cl.x[1].value])
    if hnorm2(vel) <= 1e-28 * max(1.0, hnorm2(pos)):
        raise NonRegularError(f"gamma'({t}) vanishes")
    return pos, vel


def _is_isotropic(s0: complex, vel, tol_iso: float) -> bool:
    return abs(s0) <= tol_iso * max(1.0, hnorm2(vel))


def invariants_at(
    curve,
    t: complex,
    depth: int = 3,
    branch: Branch | str | None = None,
    tol_iso: float = TOL_ISO,
    tol_rel: float = TOL_REL,
) -> PointInvariants2:
    """Frenet data, curvature derivatives, inflection/vertex orders, and evolute point."""
    curve = as_plane_curve(curve)
    branch = Branch.parse(branch) if branch is not None else curve.branch
    t = complex(t)
    K = max(DEFAULT_CURVE_ORDER, depth + 3)
    cl = _cleared(curve, t, K)
    pos, vel = _check_regular(cl, t)
    s0 = cl.s.value
    iso = _is_isotropic(s0, vel, tol_iso)
    out = PointInvariants2(t, pos, vel, s0, iso, branch, curvature_numerator=cl.n.value)
    if iso:
        if ladder(cl.s.c, cl.sM.c, tol_rel)[0] is None:
            raise IsotropicLineError("speed vanishes identically: the curve lies in an isotropic line")
        if ladder(cl.n.c[:1], cl.nM.c[:1], tol_rel)[0] is None:
            raise DegenerateIsotropicError(
                f"isotropic point t={t} without ordinary contact with its tangent line"
            )
        out.flags.append("isotropic")
        out.evolute_point = pos + (s0 / cl.n.value) * np.array([-vel[1], vel[0]])
        return out
    sigma = cl.s.sqrt(branch)
    root = sqrt_branched(s0, branch)
    out.T = vel / sigma.value
    out.N = np.array([-vel[1], vel[0]]) / sigma.value
    kappa = cl.n / sigma**3
    out.kappa = BranchedScalar(kappa.value, branch, root.cut_margin)
    out.kappa_derivs = [kappa.derivative(k) for k in range(1, min(depth, kappa.order) + 1)]

    infl, _ = ladder(cl.n.c[: depth + 1], cl.nM.c[: depth + 1], tol_rel)
    if infl is None:
        out.flags.append("kappa_vanishes_to_depth")
    elif infl >= 1:
        out.inflection_order = infl
    if infl == 0:
        n0 = cl.n.value
        out.evolute_point = pos + (s0 / n0) * np.array([-vel[1], vel[0]])
        out.osculating = (out.evolute_point, s0**3 / n0**2)
        vert, _ = ladder(cl.w.c[:depth], cl.wM.c[:depth], tol_rel)
        if vert is None:
            out.flags.append("kappa_constant_to_depth")
        elif vert >= 1:
            out.vertex_order = vert
    else:
        out.flags.append("inflection")
    return out


# -- contact with lines and circles ------------------------------------------------


@dataclass(frozen=True)
class Line:
    """Height function H(t) = <gamma(t), v>."""

    v: tuple


@dataclass(frozen=True)
class Circle:
    """Distance-squared function d(t) = <gamma(t) - c, gamma(t) - c>."""

    c: tuple


def _contact_series(curve: PlaneCurve, t: complex, model, order: int):
    x = curve.jets(t, order)
    if isinstance(model, Line):
        v = [complex(a) for a in model.v]
        h = x[0] * v[0] + x[1] * v[1]
        M = x[0].majorant() * abs(v[0]) + x[1].majorant() * abs(v[1])
    elif isinstance(model, Circle):
        c = [complex(a) for a in model.c]
        y = [x[k] - c[k] for k in range(len(x))]
        h = y[0] * y[0]
        M = y[0].majorant() * y[0].majorant()
        for k in range(1, len(x)):
            h = h + y[k] * y[k]
            M = M + y[k].majorant() * y[k].majorant()
    else:
        raise TypeError(f"unknown contact model {model!r}")
    return h, M


def _parallel(a, b, tol) -> bool:
    det = a[0] * b[1] - a[1] * b[0]
    return abs(det) <= tol * math.sqrt(max(hnorm2(a) * hnorm2(b), 1e-300))


def classify_contact(
    curve,
    t: complex,
    model,
    order: int = DEFAULT_CURVE_ORDER,
    tol_rel: float = TOL_REL,
    tol_iso: float = TOL_ISO,
    check_branch: bool = True,
) -> ContactClass:
    """A_k type of the height (Line) or distance-squared (Circle) function at t."""
    curve = as_plane_curve(curve)
    t = complex(t)
    h, M = _contact_series(curve, t, model, order)
    out = classify_series(h.c, M.c, tol_rel)
    cl = _cleared(curve, t, order)
    _, vel = _check_regular(cl, t)
    if isinstance(model, Line):
        v = np.array(model.v, dtype=complex)
        pred = abs(vel @ v) <= tol_rel * math.sqrt(hnorm2(vel) * hnorm2(v))
        out.checks["singular_iff_v_normal"] = {"predicate": bool(pred), "agrees": bool(pred == (out.k != 0))}
    else:
        c = np.array(model.c, dtype=complex)
        try:
            inv = invariants_at(curve, t, tol_iso=tol_iso, tol_rel=tol_rel)
            e = inv.evolute_point
            on_evolute = e is not None and math.sqrt(hnorm2(e - c)) <= 1e-6 * max(1.0, math.sqrt(hnorm2(c)))
            out.checks["A2_iff_center_on_evolute"] = {
                "predicate": bool(on_evolute),
                "agrees": bool(on_evolute == (out.kind != "A" or out.k >= 2)),
            }
            if on_evolute:
                vertex = inv.vertex_order is not None or "kappa_constant_to_depth" in inv.flags
                out.checks["A3_iff_vertex"] = {
                    "predicate": bool(vertex),
                    "agrees": bool(vertex == (out.kind != "A" or out.k >= 3)),
                }
        except CurveError as exc:
            out.checks["evolute"] = {"predicate": None, "agrees": None, "note": str(exc)}
    if check_branch:
        other = classify_contact(
            curve.with_branch(curve.branch.swapped()), t, model, order, tol_rel, tol_iso, check_branch=False
        )
        out.branch_invariant = other.label == out.label
    return out


# -- evolute -------------------------------------------------------------------


@dataclass
class EvolutePoint:
    t: complex
    point: np.ndarray | None
    flags: list
    envelope_defect: float | None = None


@dataclass
class IsotropicReport:
    t: complex
    gamma: np.ndarray
    evolute: np.ndarray
    evolute_gap: float
    tangency_defect: float | None
    residual: float


@dataclass
class EvoluteTrace:
    samples: list
    isotropic: list
    certified: bool = True
    warnings: list = field(default_factory=list)

    def rows(self):
        for p in self.samples:
            x = p.point if p.point is not None else np.array([np.nan, np.nan])
            yield [p.t.real, p.t.imag, x[0].real, x[0].imag, x[1].real, x[1].imag], "|".join(p.flags)


CSV_HEADER = "re_t,im_t,re_x1,im_x1,re_x2,im_x2,flags"


def evolute_jet(curve: PlaneCurve, t: complex, order: int = 3) -> list[Jet1]:
    """Jet of e = gamma + (s/n) (-z2', z1'); finite at isotropic points with n != 0."""
    cl = _cleared(curve, complex(t), order + 2)
    ratio = cl.s / cl.n
    e1 = cl.x[0] - ratio * cl.d[1]
    e2 = cl.x[1] + ratio * cl.d[0]
    return [e1, e2]


def _sine(a, b) -> float | None:
    na, nb = hnorm2(a), hnorm2(b)
    if na <= 1e-300 or nb <= 1e-300:
        return None
    return abs(a[0] * b[1] - a[1] * b[0]) / math.sqrt(na * nb)


def speed2_function(curve: PlaneCurve):
    """t -> <gamma'(t), gamma'(t)>, accepting complex numbers or order-1 jets."""

    def h(t):
        if isinstance(t, Jet1):
            z = t.value
            d1, d2 = (x.diff() for x in curve.jets(z, t.order + 1))
            s = d1 * d1 + d2 * d2
            return Jet1(z, s.c[: t.order + 1])
        d1, d2 = (x.diff() for x in curve.jets(complex(t), 1))
        return complex((d1 * d1 + d2 * d2).value)

    return h


def isotropic_parameters(curve, region: Box, grid: int = 16, tol: float = 1e-10):
    """Zeros of the speed in ``region`` as a certified RootSet."""
    return zeros_in_box(speed2_function(as_plane_curve(curve)), region, grid, tol)


def evolute_sample(
    curve,
    region: Box,
    n: int = 100,
    tol_iso: float = TOL_ISO,
    tol_rel: float = TOL_REL,
    grid: int = 16,
) -> EvoluteTrace:
    """Evolute along the diagonal of ``region`` plus isotropic-point tangency checks.

    The sample path runs from (re_min + i im_min) to (re_max + i im_max); a
    region of zero height is a real segment.  Isotropic points are searched in
    the region when it has positive area.
    """
    curve = as_plane_curve(curve)
    a = complex(region.re_min, region.im_min)
    b = complex(region.re_max, region.im_max)
    trace = EvoluteTrace([], [])
    for k in range(n):
        t = a + (b - a) * (k / (n - 1) if n > 1 else 0.0)
        cl = _cleared(curve, t, 3)
        try:
            pos, vel = _check_regular(cl, t)
        except NonRegularError:
            trace.samples.append(EvolutePoint(t, None, ["non_regular"]))
            continue
        flags = []
        s0 = cl.s.value
        if _is_isotropic(s0, vel, tol_iso):
            flags.append("isotropic")
        if ladder(cl.n.c[:1], cl.nM.c[:1], tol_rel)[0] is None:
            flags.append("inflection" if "isotropic" not in flags else "degenerate_isotropic")
            flags.append("unbounded")
            trace.samples.append(EvolutePoint(t, None, flags))
            continue
        e = evolute_jet(curve, t, 1)
        point = np.array([e[0].value, e[1].value])
        de = np.array([e[0].c[1], e[1].c[1]])
        normal = np.array([-vel[1], vel[0]])
        defect = None if "isotropic" in flags else _sine(de, normal)
        trace.samples.append(EvolutePoint(t, point, flags, defect))
    if not region.empty:
        try:
            roots = isotropic_parameters(curve, region, grid)
        except BoundaryZeroError as exc:
            trace.certified = False
            trace.warnings.append(f"isotropic search skipped: {exc}")
            roots = None
        if roots is not None:
            if not roots.certified:
                trace.certified = False
                trace.warnings.extend(roots.notes or ["isotropic point count not certified"])
            for r in roots.roots:
                t = r.value
                x = curve.jets(t, 3)
                gamma = np.array([x[0].value, x[1].value])
                dg = np.array([x[0].c[1], x[1].c[1]])
                try:
                    e = evolute_jet(curve, t, 1)
                except ZeroDivisionError:
                    trace.warnings.append(f"degenerate isotropic point at t={t}")
                    continue
                ev = np.array([e[0].value, e[1].value])
                de = np.array([e[0].c[1], e[1].c[1]])
                trace.isotropic.append(
                    IsotropicReport(t, gamma, ev, math.sqrt(hnorm2(ev - gamma)), _sine(de, dg), r.residual)
                )
    return trace


# -- unit-speed charts ---------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


class UnitSpeedChart:
    """Arc length l(t) = integral of the branched speed from t0, and its inverse.

    Integration runs along the straight segment [t0, t]; a segment on which the
    speed root would jump across the branch cut (or meet an isotropic point) is
    rejected with :class:`ChartError`.
    """

    def __init__(self, curve, t0: complex, branch: Branch | str = Branch.PRINCIPAL, radius: float = 1.0):
        self.curve = curve if isinstance(curve, ParamCurve) else ParamCurve(curve.components, curve.branch)
        self.t0 = complex(t0)
        self.branch = Branch.parse(branch)
        self._jets: dict = {}
        self.radius = float(radius)
        self.min_margin = math.inf
        s0 = self._radicand(self.t0)
        d = self._velocity(self.t0)
        if abs(s0) <= TOL_ISO * max(1.0, hnorm2(d)):
            raise ChartError(f"t0={self.t0} is an isotropic point")
        self.min_margin = sqrt_branched(s0, self.branch).cut_margin

    @property
    def region(self) -> str:
        return "complement of B-" if self.branch is Branch.PRINCIPAL else "complement of B+"

    @property
    def path_validity(self) -> dict:
        return {"region": self.region, "min_cut_margin": self.min_margin}

    def _velocity(self, t):
        return np.array([x.c[1] for x in self.curve.jets(t, 1)])

    def _radicand(self, t) -> complex:
        d = self._velocity(t)
        return complex(np.sum(d * d))

    def speed(self, t) -> BranchedScalar:
        return sqrt_branched(self._radicand(t), self.branch)

    def _check_path(self, t: complex, samples: int = 64):
        if abs(t - self.t0) > self.radius * (1 + 1e-12):
            raise ChartError(f"t={t} outside the chart radius {self.radius}")
        prev = None
        for u in np.linspace(0.0, 1.0, samples + 1):
            z = self.t0 + u * (t - self.t0)
            r = self._radicand(z)
            d = self._velocity(z)
            if abs(r) <= TOL_ISO * max(1.0, hnorm2(d)):
                raise ChartError(f"isotropic point near {z} on the segment from {self.t0}")
            root = sqrt_branched(r, self.branch)
            self.min_margin = min(self.min_margin, root.cut_margin)
            if prev is not None and abs(root.value - prev) > abs(root.value + prev):
                raise ChartError(
                    f"segment from {self.t0} to {t} crosses the {self.branch.value} branch cut near {z}; "
                    f"the chart is confined to the {self.region}"
                )
            prev = root.value

    def _panel(self, a: complex, b: complex) -> complex:
        nodes = a + (b - a) * _GL_X
        vals = np.array([self.speed(z).value for z in nodes])
        return complex(np.sum(_GL_W * vals) * (b - a))

    def _adaptive(self, a, b, whole, depth, tol):
        m = 0.5 * (a + b)
        left, right = self._panel(a, m), self._panel(m, b)
        if depth >= 30 or abs(left + right - whole) <= tol:
            return left + right
        return self._adaptive(a, m, left, depth + 1, tol / 2) + self._adaptive(m, b, right, depth + 1, tol / 2)

    def length(self, t: complex, check: bool = True) -> complex:
        t = complex(t)
        if t == self.t0:
            return 0j
        if check:
            self._check_path(t)
        whole = self._panel(self.t0, t)
        tol = 1e-14 * max(1.0, abs(whole))
        return self._adaptive(self.t0, t, whole, 0, tol)

    def inverse(self, s: complex, tol: float = 1e-14) -> complex:
        """Parameter t with l(t) = s, by Newton iteration from t0."""
        s = complex(s)
        t = self.t0 + s / self.speed(self.t0).value
        for _ in range(60):
            f = self.length(t, check=False) - s
            step = f / self.speed(t).value
            t -= step
            if abs(step) <= tol * max(1.0, abs(t)):
                break
        self._check_path(t)
        return t

    def jet_at(self, s: complex, order: int = DEFAULT_CURVE_ORDER):
        """(t, jets of the unit-speed reparametrization at arc length s)."""
        s = complex(s)
        key = (s, order)
        if key in self._jets:
            return self._jets[key]
        t = self.inverse(s)
        x = self.curve.jets(t, order)
        d = [xi.diff() for xi in x]
        rad = d[0] * d[0]
        for di in d[1:]:
            rad = rad + di * di
        sigma = rad.sqrt(self.branch)
        ell = sigma.integrate(constant=s)
        tj = ell.revert()
        out = t, [xi.compose(tj) for xi in x]
        if len(self._jets) < 4096:
            self._jets[key] = out
        return out


def arc_length_chart(curve, t0: complex, branch: Branch | str = Branch.PRINCIPAL, radius: float = 1.0) -> UnitSpeedChart:
    return UnitSpeedChart(curve, t0, branch, radius)


# -- Hermitian normal map ------------------------------------------------------------


def hermitian_jacobian(chart: UnitSpeedChart, s: complex, v: complex) -> float:
    """Real Jacobian determinant of (s, v) -> beta(s) + v * (-conj(beta2'), conj(beta1')).

    beta is the unit-speed reparametrization from ``chart``; the map is viewed
    as R^4 -> R^4 and its determinant computed from the Wirtinger blocks
    [[A, B], [conj B, conj A]] with A = d/d(s, v) and B = d/d(conj s, conj v).
    """
    _, beta = chart.jet_at(s, 2)
    b1 = np.array([beta[0].c[1], beta[1].c[1]])
    b2 = 2.0 * np.array([beta[0].c[2], beta[1].c[2]])
    v = complex(v)
    A = np.array([[b1[0], -np.conj(b1[1])], [b1[1], np.conj(b1[0])]])
    B = np.array([[-v * np.conj(b2[1]), 0], [v * np.conj(b2[0]), 0]])
    J = np.block([[A, B], [np.conj(B), np.conj(A)]])
    return float(np.linalg.det(J).real)
