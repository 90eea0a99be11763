"""Complex surfaces phi: (z1, z2) -> C^3 under the holomorphic metric.

Notation: nu = phi_1 x phi_2, delta = <nu, nu> = EG - F^2, and the cleared
second-form coefficients lbar = <nu, phi_11>, mbar = <nu, phi_12>,
nbar = <nu, phi_22>.  The branch enters only through N = nu / sqrt(delta)
and l = lbar / sqrt(delta) (likewise m, n); everything used for
classification (principal directions, asymptotic directions, K, focal points)
is expressed in the cleared quantities and is branch-free.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .contact import TOL_REL
from .cplx import TOL_ISO, Branch, cross, hnorm2, sqrt_branched
from .germs import Germ2Class, MapGermClass, classify_germ2, classify_map2
from .jets import Jet1, Jet2
from .param import ParamSurface


class SurfaceError(ValueError):
    pass


class NonRegularSurfaceError(SurfaceError):
    """phi_1 and phi_2 are linearly dependent."""


class IsotropicLocusError(SurfaceError):
    """The point lies on the isotropic locus (delta = 0); use forms_at or focal_at."""


class UmbilicError(SurfaceError):
    """Principal directions are undefined (the focal sheets meet)."""


class NormalizationError(SurfaceError):
    """The Monge function does not have vanishing 1-jet at the origin."""


class SurfacePatch(ParamSurface):
    """A parametrized surface; ``from_monge`` builds (z1, z2, f(z1, z2))."""

    @classmethod
    def from_monge(cls, f, branch: Branch | str = Branch.PRINCIPAL):
        return cls(["z1", "z2", f], branch)

    def transformed(self, R, b) -> "SurfacePatch":
        R = np.asarray(R, dtype=complex)
        b = np.asarray(b, dtype=complex)
        base = self

        def comp(k):
            def f(z1, z2):
                vals = [base._eval(c, z1, z2) for c in base.components]
                acc = complex(b[k])
                for j in range(3):
                    acc = complex(R[k, j]) * vals[j] + acc
                return acc

            return f

        return SurfacePatch([comp(k) for k in range(3)], self.branch)


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def _val(v):
    return np.array([c.value for c in v])


@dataclass
class _SJ:
    phi: list
    p1: list
    p2: list
    p11: list
    p12: list
    p22: list
    nu: list
    E: Jet2
    F: Jet2
    G: Jet2
    delta: Jet2
    lb: Jet2
    mb: Jet2
    nb: Jet2


def _surface_jets(patch: ParamSurface, q, order: int = 4) -> _SJ:
    phi = patch.jets(q, order)
    p1 = [c.diff(0) for c in phi]
    p2 = [c.diff(1) for c in phi]
    p11 = [c.diff(0) for c in p1]
    p12 = [c.diff(1) for c in p1]
    p22 = [c.diff(1) for c in p2]
    nu = _cross(p1, p2)
    return _SJ(
        phi, p1, p2, p11, p12, p22, nu,
        _dot(p1, p1), _dot(p1, p2), _dot(p2, p2), _dot(nu, nu),
        _dot(nu, p11), _dot(nu, p12), _dot(nu, p22),
    )


def _check_regular(J: _SJ, q):
    a, b = _val(J.p1), _val(J.p2)
    nu = _val(J.nu)
    if hnorm2(nu) <= 1e-24 * max(hnorm2(a) * hnorm2(b), 1e-300):
        raise NonRegularSurfaceError(f"phi is not an immersion at {q}")
    return a, b, nu


def _on_il(delta: complex, nu, tol_iso: float) -> bool:
    return abs(delta) <= tol_iso * max(1.0, hnorm2(nu))


@dataclass
class FormsData:
    q: tuple
    E: complex
    F: complex
    G: complex
    lbar: complex
    mbar: complex
    nbar: complex
    delta: complex
    nu: np.ndarray
    on_il: bool
    branch: Branch
    l: complex | None = None
    m: complex | None = None
    n: complex | None = None
    N: np.ndarray | None = None
    flags: list = field(default_factory=list)

    @property
    def gauss_curvature(self) -> complex | None:
        if self.on_il:
            return None
        return (self.lbar * self.nbar - self.mbar**2) / self.delta**2

    def to_dict(self) -> dict:
        from .report import jsonable

        d = dict(self.__dict__)
        d["branch"] = self.branch.value
        d["K"] = self.gauss_curvature
        return jsonable(d)


def forms_at(patch, q, branch: Branch | str | None = None, tol_iso: float = TOL_ISO, order: int = 4) -> FormsData:
    """First and second fundamental forms; N withheld on the isotropic locus."""
    patch = as_patch(patch)
    branch = Branch.parse(branch) if branch is not None else patch.branch
    q = (complex(q[0]), complex(q[1]))
    J = _surface_jets(patch, q, order)
    _, _, nu = _check_regular(J, q)
    d = J.delta.value
    out = FormsData(
        q, J.E.value, J.F.value, J.G.value, J.lb.value, J.mb.value, J.nb.value, d, nu,
        _on_il(d, nu, tol_iso), branch,
    )
    if out.on_il:
        out.flags.append("isotropic_locus")
        return out
    r = sqrt_branched(d, branch).value
    out.N = nu / r
    out.l, out.m, out.n = out.lbar / r, out.mbar / r, out.nbar / r
    return out


def as_patch(patch) -> SurfacePatch:
    if isinstance(patch, SurfacePatch):
        return patch
    if isinstance(patch, ParamSurface) or hasattr(patch, "kind"):
        return SurfacePatch(patch.components, patch.branch)
    return SurfacePatch(patch)


# -- binary quadratics ----------------------------------------------------------------


def _normalize_dir(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    v = v / math.sqrt(hnorm2(v))
    k = int(np.argmax(np.abs(v)))
    ph = v[k] / abs(v[k])
    return v / ph


def _dir_key(v):
    return (-round(abs(v[0]), 12), round(v[1].real, 12), round(v[1].imag, 12))


def binary_quadratic_roots(a2: complex, ab: complex, b2: complex, tol: float = 1e-12):
    """Directions (a, b) with a2*a^2 + ab*a*b + b2*b^2 = 0.

    Returns [] when all coefficients vanish (relative to ``tol``), a single
    direction for a double root, otherwise two directions; each normalized and
    sorted by a deterministic key.
    """
    scale = max(abs(a2), abs(ab), abs(b2))
    if scale == 0:
        return []
    disc = ab * ab - 4 * a2 * b2
    if max(abs(a2), abs(b2)) <= tol * scale:
        # only the mixed term survives: a b = 0
        return sorted([np.array([1.0 + 0j, 0j]), np.array([0j, 1.0 + 0j])], key=_dir_key)
    r = cmath.sqrt(disc)
    if abs(ab + r) < abs(ab - r):
        r = -r
    qq = -0.5 * (ab + r)
    if abs(a2) >= abs(b2):
        # t = a/b solves a2 t^2 + ab t + b2 = 0
        t = [qq / a2, b2 / qq if qq != 0 else 0j]
        dirs = [np.array([x, 1.0]) for x in t]
    else:
        u = [qq / b2, a2 / qq if qq != 0 else 0j]
        dirs = [np.array([1.0, x]) for x in u]
    dirs = [_normalize_dir(d) for d in dirs]
    if abs(disc) <= tol * scale * scale:
        return [dirs[0]]
    return sorted(dirs, key=_dir_key)


@dataclass
class ShapeData:
    q: tuple
    A: np.ndarray
    kappa1: complex
    kappa2: complex
    e1: np.ndarray | None
    e2: np.ndarray | None
    K: complex
    H: complex
    umbilic: bool
    parabolic: bool
    asymptotic_dirs: list
    principal_coeffs: tuple
    branch: Branch
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        from .report import jsonable

        d = dict(self.__dict__)
        d["branch"] = self.branch.value
        return jsonable(d)


def _principal_coeffs(E, F, G, lb, mb, nb):
    # (E mbar - F lbar) a^2 + (E nbar - G lbar) a b + (F nbar - G mbar) b^2 = 0
    return (E * mb - F * lb, E * nb - G * lb, F * nb - G * mb)


def _principal_scale(E, F, G, lb, mb, nb):
    return max(abs(E) * abs(mb) + abs(F) * abs(lb), abs(E) * abs(nb) + abs(G) * abs(lb), abs(F) * abs(nb) + abs(G) * abs(mb), 1e-300)


def _quad(a, b, A11, A12, A22):
    return A11 * a * a + 2 * A12 * a * b + A22 * b * b


def shape_at(patch, q, branch: Branch | str | None = None, tol_iso: float = TOL_ISO, tol_rel: float = TOL_REL) -> ShapeData:
    """Shape operator, principal curvatures/directions, K, umbilic and asymptotic data."""
    f = forms_at(patch, q, branch, tol_iso)
    if f.on_il:
        raise IsotropicLocusError(f"q={f.q} is on the isotropic locus")
    return _shape_from_forms(f, tol_rel)


def _shape_from_forms(f: FormsData, tol_rel: float) -> ShapeData:
    E, F, G = f.E, f.F, f.G
    I = np.array([[E, F], [F, G]])
    II = np.array([[f.l, f.m], [f.m, f.n]])
    A = np.linalg.solve(I, II)
    K = (f.lbar * f.nbar - f.mbar**2) / f.delta**2
    H = (E * f.n - 2 * F * f.m + G * f.l) / (2 * f.delta)
    coeffs = _principal_coeffs(E, F, G, f.lbar, f.mbar, f.nbar)
    pscale = _principal_scale(E, F, G, f.lbar, f.mbar, f.nbar)
    umbilic = all(abs(c) <= tol_rel * pscale for c in coeffs)
    qscale = max(abs(f.lbar) * abs(f.nbar) + abs(f.mbar) ** 2, 1e-300)
    formscale = max(abs(f.lbar), abs(f.mbar), abs(f.nbar))
    parabolic = abs(f.lbar * f.nbar - f.mbar**2) <= tol_rel * max(qscale, formscale**2, 1e-300) or formscale == 0
    asym = binary_quadratic_roots(f.lbar, 2 * f.mbar, f.nbar, tol=tol_rel)
    flags = []
    if umbilic:
        k1 = k2 = H
        e1 = e2 = None
        flags.append("umbilic")
    else:
        dirs = binary_quadratic_roots(coeffs[0], coeffs[1], coeffs[2], tol=tol_rel)
        if len(dirs) == 1:
            flags.append("repeated_principal_direction")
            dirs = [dirs[0], dirs[0]]
        e1, e2 = dirs
        k1 = _quad(*e1, f.l, f.m, f.n) / _quad(*e1, E, F, G)
        k2 = _quad(*e2, f.l, f.m, f.n) / _quad(*e2, E, F, G)
    if parabolic:
        flags.append("parabolic")
    if formscale == 0:
        flags.append("planar_point")
    return ShapeData(f.q, A, k1, k2, e1, e2, K, H, umbilic, parabolic, asym, coeffs, f.branch, flags)


# -- curvature functions as jets (ridge residuals, Brioschi) --------------------------


def _H_K_jets(J: _SJ, branch: Branch):
    rd = J.delta.sqrt(branch)
    H = (J.E * J.nb - 2 * (J.F * J.mb) + J.G * J.lb) / (2 * (J.delta * rd))
    K = (J.lb * J.nb - J.mb * J.mb) / (J.delta * J.delta)
    return H, K


def ridge_residuals(patch, q, branch: Branch | str | None = None, tol_rel: float = TOL_REL):
    """d kappa_i (e_i) for i = 1, 2 via (2 kappa_i dH(e_i) - dK(e_i)) / (2 kappa_i - 2 H)."""
    patch = as_patch(patch)
    branch = Branch.parse(branch) if branch is not None else patch.branch
    sh = shape_at(patch, q, branch, tol_rel=tol_rel)
    if sh.umbilic:
        raise UmbilicError(f"umbilic at {sh.q}")
    J = _surface_jets(patch, sh.q, 3)
    H, K = _H_K_jets(J, branch)
    dH = np.array([H.coeff(1, 0), H.coeff(0, 1)])
    dK = np.array([K.coeff(1, 0), K.coeff(0, 1)])
    out = []
    for k, e in ((sh.kappa1, sh.e1), (sh.kappa2, sh.e2)):
        den = 2 * k - 2 * sh.H
        out.append((2 * k * (dH @ e) - dK @ e) / den if den != 0 else complex("nan"))
    return out


def brioschi_K(patch, q, order: int = 4) -> complex:
    """Gaussian curvature from E, F, G and their derivatives only."""
    patch = as_patch(patch)
    J = _surface_jets(patch, (complex(q[0]), complex(q[1])), order)
    E, F, G = J.E, J.F, J.G
    e, f_, g = E.value, F.value, G.value
    Eu, Ev = E.partial(1, 0), E.partial(0, 1)
    Fu, Fv = F.partial(1, 0), F.partial(0, 1)
    Gu, Gv = G.partial(1, 0), G.partial(0, 1)
    Evv, Fuv, Guu = E.partial(0, 2), F.partial(1, 1), G.partial(2, 0)
    M1 = np.array(
        [
            [-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev],
            [Fv - 0.5 * Gu, e, f_],
            [0.5 * Gv, f_, g],
        ]
    )
    M2 = np.array([[0, 0.5 * Ev, 0.5 * Gu], [0.5 * Ev, e, f_], [0.5 * Gu, f_, g]])
    return complex((np.linalg.det(M1) - np.linalg.det(M2)) / (e * g - f_ * f_) ** 2)


# -- focal points -------------------------------------------------------------------


@dataclass
class ILExtension:
    on_il: bool
    extended_focal_point: np.ndarray | None = None
    other_focal_point: np.ndarray | None = None
    tangency_defect: float | None = None
    sheet_rank: int | None = None
    reason: str = ""


@dataclass
class FocalData:
    q: tuple
    c1: np.ndarray | None
    c2: np.ndarray | None
    ridge_residuals: list
    il_extension: ILExtension
    umbilic: bool = False
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        from .report import jsonable

        return jsonable(self.__dict__)


def _hermitian_sine_to_plane(w, nu) -> float:
    nw, nn = hnorm2(w), hnorm2(nu)
    if nw <= 1e-300:
        return 0.0
    return abs(np.sum(w * nu)) / math.sqrt(nw * nn)


def focal_at(
    patch,
    q,
    branch: Branch | str | None = None,
    tol_iso: float = TOL_ISO,
    tol_rel: float = TOL_REL,
    allow_umbilic: bool = True,
) -> FocalData:
    """Focal points phi + N / kappa_i, ridge residuals, and the extension across the IL.

    Off the IL the focal points are computed in the branch-free form
    phi + nu * I(e_i, e_i) / IIbar(e_i, e_i).  On the IL the focal set is cut
    out by c = phi - lambda nu with Q lambda^2 + P lambda + delta = 0
    (P = E nbar + G lbar - 2 F mbar, Q = lbar nbar - mbar^2); the root that
    stays bounded as delta -> 0 gives the extended sheet, which passes through
    phi(q) and whose tangent plane is compared with T_q M.
    """
    patch = as_patch(patch)
    branch = Branch.parse(branch) if branch is not None else patch.branch
    q = (complex(q[0]), complex(q[1]))
    f = forms_at(patch, q, branch, tol_iso)
    phi = patch(*q)
    if f.on_il:
        return FocalData(q, None, None, [], _il_extension(patch, q, tol_rel), flags=["isotropic_locus"])
    sh = _shape_from_forms(f, tol_rel)
    if sh.umbilic:
        if not allow_umbilic:
            raise UmbilicError(f"umbilic at {q}: the focal sheets meet")
        # any direction is principal; both sheets meet at phi + nu I(e,e)/IIbar(e,e)
        e = np.array([1.0, 0.0]) if abs(f.E) >= abs(f.G) else np.array([0.0, 1.0])
        IIb = _quad(*e, f.lbar, f.mbar, f.nbar)
        c = None if IIb == 0 else phi + f.nu * _quad(*e, f.E, f.F, f.G) / IIb
        return FocalData(q, c, c, [], ILExtension(False), umbilic=True, flags=["umbilic"])
    cs = []
    for e in (sh.e1, sh.e2):
        IIb = _quad(*e, f.lbar, f.mbar, f.nbar)
        cs.append(None if abs(IIb) <= 1e-300 else phi + f.nu * _quad(*e, f.E, f.F, f.G) / IIb)
    ridges = ridge_residuals(patch, q, branch, tol_rel)
    out = FocalData(q, cs[0], cs[1], ridges, ILExtension(False))
    if cs[0] is None or cs[1] is None:
        out.flags.append("zero_principal_curvature")
    return out


def _il_extension(patch: SurfacePatch, q, tol_rel: float) -> ILExtension:
    J = _surface_jets(patch, q, 3)
    P = J.E * J.nb + J.G * J.lb - 2 * (J.F * J.mb)
    Qj = J.lb * J.nb - J.mb * J.mb
    P0 = P.value
    pscale = max(abs(J.E.value) * abs(J.nb.value) + abs(J.G.value) * abs(J.lb.value) + 2 * abs(J.F.value) * abs(J.mb.value), 1e-300)
    if abs(P0) <= tol_rel * pscale:
        return ILExtension(True, reason="degenerate extension: P = E nbar + G lbar - 2F mbar vanishes")
    # bounded root lambda = -2 delta / (P (1 + sqrt(1 - 4 Q delta / P^2)))
    root = (1 - 4 * (Qj * J.delta) / (P * P)).sqrt(Branch.PRINCIPAL)
    lam = -2 * J.delta / (P * (1 + root))
    c = [J.phi[k] - lam * J.nu[k] for k in range(3)]
    point = _val(c)
    t1 = np.array([x.coeff(1, 0) for x in c])
    t2 = np.array([x.coeff(0, 1) for x in c])
    nu0 = _val(J.nu)
    defect = max(_hermitian_sine_to_plane(t1, nu0), _hermitian_sine_to_plane(t2, nu0))
    rank = int(np.linalg.matrix_rank(np.array([t1, t2]), tol=1e-9 * max(1.0, math.sqrt(hnorm2(t1) + hnorm2(t2)))))
    other = None
    Q0 = Qj.value
    if abs(Q0) > tol_rel * max(abs(J.lb.value) * abs(J.nb.value) + abs(J.mb.value) ** 2, 1e-300):
        other = _val(J.phi) + (P0 / Q0) * nu0
    return ILExtension(True, point, other, defect, rank)


# -- contact -----------------------------------------------------------------------


@dataclass(frozen=True)
class PlaneModel:
    """Height function along v (None means the normal direction nu(q))."""

    v: tuple | None = None


@dataclass(frozen=True)
class Sphere:
    c: tuple


@dataclass(frozen=True)
class ProjectionModel:
    v: tuple


@dataclass
class ContactReport:
    model: str
    germ: Germ2Class | None = None
    map_germ: MapGermClass | None = None
    label: str = ""
    predicates: dict = field(default_factory=dict)
    agrees: bool | None = None
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        from .report import jsonable

        return jsonable(
            {
                "model": self.model,
                "label": self.label,
                "germ": None if self.germ is None else self.germ.to_dict(),
                "map_germ": None if self.map_germ is None else self.map_germ.to_dict(),
                "predicates": self.predicates,
                "agrees": self.agrees,
                "warnings": self.warnings,
            }
        )


def _is_critical(jet: Jet2, majorant_scale: float, tol: float) -> bool:
    g = jet.gradient()
    return max(abs(g[0]), abs(g[1])) <= tol * majorant_scale


def _abs_dot_scale(phi_jets, v) -> float:
    return max(sum(abs(complex(v[k])) * abs(phi_jets[k].coeff(i, j)) for k in range(3)) for i, j in ((1, 0), (0, 1)))


def contact_report(patch, q, model, order: int = 5, tol_rel: float = TOL_REL, tol_iso: float = TOL_ISO) -> ContactReport:
    """Germ of the height, distance-squared, or projection map at q with geometric cross-checks.

    The germ classifier is authoritative; predicates are reported alongside and
    ``agrees`` records whether the predicted ladder matches the germ label.
    """
    patch = as_patch(patch)
    q = (complex(q[0]), complex(q[1]))
    phi = patch.jets(q, order)
    if isinstance(model, ProjectionModel):
        from .space import _complement_functionals

        v = np.asarray(model.v, dtype=complex)
        l1, l2 = _complement_functionals(v)
        F1 = phi[0] * complex(l1[0]) + phi[1] * complex(l1[1]) + phi[2] * complex(l1[2])
        F2 = phi[0] * complex(l2[0]) + phi[1] * complex(l2[1]) + phi[2] * complex(l2[2])
        mg = classify_map2(F1, F2, tol_rel)
        return ContactReport("projection", map_germ=mg, label=mg.verdict)
    f = forms_at(patch, q, tol_iso=tol_iso)
    if f.on_il:
        raise IsotropicLocusError(f"q={q} is on the isotropic locus")
    sh = _shape_from_forms(f, tol_rel)
    if isinstance(model, PlaneModel):
        v = f.nu if model.v is None else np.asarray(model.v, dtype=complex)
        h = phi[0] * complex(v[0]) + phi[1] * complex(v[1]) + phi[2] * complex(v[2])
        rep = ContactReport("plane")
        if not _is_critical(h, _abs_dot_scale(phi, v), tol_rel):
            rep.label = "A0"
            rep.predicates["v_normal"] = False
            rep.agrees = True
            return rep
        g = classify_germ2(h, tol_rel)
        rep.germ, rep.label = g, g.label
        rep.predicates["parabolic"] = sh.parabolic
        expected = "A1"
        if sh.parabolic:
            trans = _asymptotic_transversality(patch, q, sh, tol_rel)
            rep.predicates["asymptotic_transverse_to_parabolic"] = trans
            if trans is None:
                expected = None
            else:
                expected = "A2" if trans else "A>=3"
        rep.predicates["expected"] = expected
        rep.agrees = _ladder_agrees(expected, g.label)
        rep.warnings.extend(g.warnings)
        return rep
    if isinstance(model, Sphere):
        c = np.asarray(model.c, dtype=complex)
        y = [phi[k] - c[k] for k in range(3)]
        h = y[0] * y[0] + y[1] * y[1] + y[2] * y[2]
        rep = ContactReport("sphere")
        scale = max(sum(abs(y[k].value) * abs(phi[k].coeff(i, j)) for k in range(3)) for i, j in ((1, 0), (0, 1)))
        if not _is_critical(h, 2 * max(scale, 1e-300), tol_rel):
            rep.label = "A0"
            rep.predicates["c_on_normal_line"] = False
            rep.agrees = True
            return rep
        g = classify_germ2(h, tol_rel)
        rep.germ, rep.label = g, g.label
        foc = focal_at(patch, q, tol_iso=tol_iso, tol_rel=tol_rel)
        cscale = max(1.0, math.sqrt(hnorm2(c)))
        near = []
        for i, ci in enumerate((foc.c1, foc.c2)):
            if ci is not None and math.sqrt(hnorm2(ci - c)) <= 1e-6 * cscale:
                near.append(i)
        rep.predicates["umbilic"] = sh.umbilic
        rep.predicates["focal"] = bool(near) or (sh.umbilic and foc.c1 is not None and math.sqrt(hnorm2(foc.c1 - c)) <= 1e-6 * cscale)
        if sh.umbilic:
            expected = "D4" if rep.predicates["focal"] else "A1"
        elif not near:
            expected = "A1"
        else:
            i = near[0]
            r = foc.ridge_residuals[i]
            kap = sh.kappa1 if i == 0 else sh.kappa2
            rscale = max(abs(kap) ** 2, 1e-300)
            on_ridge = abs(r) <= 1e-6 * rscale
            rep.predicates["sheet"] = i + 1
            rep.predicates["ridge_residual"] = r
            rep.predicates["on_ridge"] = on_ridge
            expected = "A>=3" if on_ridge else "A2"
        rep.predicates["expected"] = expected
        rep.agrees = _ladder_agrees(expected, g.label)
        rep.warnings.extend(g.warnings)
        return rep
    raise TypeError(f"unknown contact model {model!r}")


def _ladder_agrees(expected, label) -> bool | None:
    if expected is None:
        return None
    if expected == "A>=3":
        return label.startswith("A") and label not in ("A0", "A1", "A2")
    return expected == label


def _asymptotic_transversality(patch, q, sh: ShapeData, tol_rel: float):
    """True if the asymptotic direction is transverse to the parabolic curve Q = 0."""
    if not sh.asymptotic_dirs:
        return None
    w = sh.asymptotic_dirs[0]
    J = _surface_jets(patch, q, 3)
    Qj = J.lb * J.nb - J.mb * J.mb
    g = np.array([Qj.coeff(1, 0), Qj.coeff(0, 1)])
    gscale = max(
        abs(J.lb.coeff(1, 0)) * abs(J.nb.value) + abs(J.lb.value) * abs(J.nb.coeff(1, 0)) + 2 * abs(J.mb.value) * abs(J.mb.coeff(1, 0)),
        abs(J.lb.coeff(0, 1)) * abs(J.nb.value) + abs(J.lb.value) * abs(J.nb.coeff(0, 1)) + 2 * abs(J.mb.value) * abs(J.mb.coeff(0, 1)),
        1e-300,
    )
    if math.sqrt(hnorm2(g)) <= tol_rel * gscale:
        return None
    return abs(g @ w) > 1e-6 * math.sqrt(hnorm2(g) * hnorm2(w))


# -- Monge families ----------------------------------------------------------------


@dataclass
class MongeFamily:
    which: str  # "height", "distsq", "projection"
    f: object
    order: int = 5
    c0: complex = 0j

    def _fjet(self, order=None) -> Jet2:
        from .jets import lift

        return lift(self.f, (0.0, 0.0), self.order if order is None else order) if not isinstance(self.f, Jet2) else self.f

    def member(self, *params):
        """2-variable jet at the origin of the family member with the given parameters."""
        fj = self._fjet()
        z1, z2 = Jet2.variables((0.0, 0.0), fj.order)
        if self.which == "height":
            v1, v2 = params
            return z1 * v1 + z2 * v2 + fj
        if self.which == "distsq":
            a, b, c = params
            w = fj - (c + self.c0)
            return (z1 - a) * (z1 - a) + (z2 - b) * (z2 - b) + w * w
        if self.which == "projection":
            v1, v2 = params
            g = fj.substitute(z1 + v1 * z2, z2)
            return z1, g - v2 * z2
        raise ValueError(f"unknown family {self.which!r}")

    def classify(self, *params):
        m = self.member(*params)
        if self.which == "projection":
            return classify_map2(*m)
        return classify_germ2(m)


def monge_family(f, which: str, base: complex = 0j, order: int = 5) -> MongeFamily:
    """Height, distance-squared, or projection family of the Monge patch (z1, z2, f)."""
    which = which.lower().replace("_", "")
    if which not in ("height", "distsq", "projection"):
        raise ValueError(f"unknown family {which!r}")
    fam = MongeFamily(which, f, order, complex(base))
    fj = fam._fjet()
    if which != "projection":
        S = max(1.0, max(abs(x) for x in fj.c.ravel()))
        if abs(fj.value) > 1e-12 * S or max(abs(fj.coeff(1, 0)), abs(fj.coeff(0, 1))) > 1e-12 * S:
            raise NormalizationError("Monge function must vanish to first order at the origin")
    return fam


# -- loci on real slices ------------------------------------------------------------


@dataclass(frozen=True)
class Slice:
    """Real 2-plane (x, y) -> (base1 + dir1 * x, base2 + dir2 * y) with x, y in ranges."""

    x_range: tuple = (-1.0, 1.0)
    y_range: tuple = (-1.0, 1.0)
    dir1: complex = 1.0
    dir2: complex = 1.0
    base: tuple = (0j, 0j)

    def point(self, x, y):
        return (complex(self.base[0]) + complex(self.dir1) * x, complex(self.base[1]) + complex(self.dir2) * y)

    @classmethod
    def from_config(cls, cfg: dict, domain: dict | None = None) -> "Slice":
        parts = {"re": 1.0, "im": 1j}
        d1 = parts[cfg.get("z1", "re")]
        d2 = parts[cfg.get("z2", "re")]
        base = tuple(complex(*b) if isinstance(b, (list, tuple)) else complex(b) for b in cfg.get("base", (0, 0)))

        def rng(name, box, part):
            if name in cfg:
                return tuple(cfg[name])
            if box is not None:
                return (box.re_min, box.re_max) if part == "re" else (box.im_min, box.im_max)
            return (-1.0, 1.0)

        domain = domain or {}
        return cls(
            rng("x_range", domain.get("z1"), cfg.get("z1", "re")),
            rng("y_range", domain.get("z2"), cfg.get("z2", "re")),
            d1, d2, base,
        )


@dataclass
class LocusTrace:
    which: str
    segments: list  # list of lists of (x, y, z1, z2, residual)
    flags: list = field(default_factory=list)

    CSV_HEADER = "seg,x,y,re_z1,im_z1,re_z2,im_z2,residual,flags"

    def rows(self):
        flag = "|".join(self.flags)
        for k, seg in enumerate(self.segments):
            for x, y, z1, z2, r in seg:
                yield [k, x, y, z1.real, z1.imag, z2.real, z2.imag, r], flag

    @property
    def n_points(self) -> int:
        return sum(len(s) for s in self.segments)


def defining_function(patch, which: str, branch: Branch | str | None = None):
    """q -> value of the function whose zero set is the requested locus."""
    patch = as_patch(patch)
    branch = Branch.parse(branch) if branch is not None else patch.branch
    which = which.lower()
    if which in ("il", "isotropic"):
        return lambda z1, z2: _surface_jets(patch, (z1, z2), 2).delta.value
    if which == "parabolic":
        def Q(z1, z2):
            J = _surface_jets(patch, (z1, z2), 2)
            return J.lb.value * J.nb.value - J.mb.value ** 2

        return Q
    if which in ("ridge_1", "ridge1", "ridge_2", "ridge2"):
        i = 0 if which.endswith("1") else 1

        def R(z1, z2):
            try:
                return ridge_residuals(patch, (z1, z2), branch)[i]
            except SurfaceError:
                return complex("nan")

        return R
    raise ValueError(f"unknown locus {which!r}")


def trace_locus(patch, which: str, region: Slice, n: int = 64, tol: float = 1e-9, branch=None, threads: int = 1) -> LocusTrace:
    """Zero set of the locus's defining function on a real 2-slice.

    When the function is real on the slice the locus is a union of curves,
    traced as contours (marching squares) and refined by Newton steps along
    the gradient; otherwise its slice is a set of isolated points, found by
    Newton on (Re, Im) from sign-change cells.
    """
    from skimage import measure

    D = defining_function(patch, which, branch)
    xs = np.linspace(region.x_range[0], region.x_range[1], n)
    ys = np.linspace(region.y_range[0], region.y_range[1], n)

    def row(x):
        return [D(*region.point(x, y)) for y in ys]

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(threads) as pool:
            V = np.array(list(pool.map(row, xs)), dtype=complex)
    else:
        V = np.array([row(x) for x in xs], dtype=complex)
    finite = np.isfinite(V)
    trace = LocusTrace(which, [])
    if not finite.any():
        trace.flags.append("undefined_on_slice")
        return trace
    vmax = float(np.max(np.abs(V[finite])))
    if vmax <= 1e-13:
        trace.flags.append("identically_zero")
        return trace
    Vf = np.where(finite, V, np.nan)
    real_valued = float(np.nanmax(np.abs(Vf.imag))) <= 1e-10 * vmax
    hx = (xs[-1] - xs[0]) / (n - 1)
    hy = (ys[-1] - ys[0]) / (n - 1)
    fd = 1e-6 * max(hx, hy)

    def f(x, y):
        return D(*region.point(x, y))

    def grad(x, y):
        gx = (f(x + fd, y) - f(x - fd, y)) / (2 * fd)
        gy = (f(x, y + fd) - f(x, y - fd)) / (2 * fd)
        return gx, gy

    if real_valued:
        contours = measure.find_contours(np.nan_to_num(Vf.real, nan=0.0), 0.0)
        for cont in contours:
            seg = []
            for ci, cj in cont:
                x = xs[0] + ci * hx
                y = ys[0] + cj * hy
                for _ in range(20):
                    v = f(x, y).real
                    if abs(v) <= tol:
                        break
                    gx, gy = grad(x, y)
                    g2 = gx.real**2 + gy.real**2
                    if g2 == 0:
                        break
                    x -= v * gx.real / g2
                    y -= v * gy.real / g2
                r = abs(f(x, y))
                z1, z2 = region.point(x, y)
                seg.append((x, y, z1, z2, r))
            if seg:
                trace.segments.append(seg)
        if not trace.segments:
            trace.flags.append("empty")
        return trace
    # isolated points: cells where both Re and Im change sign
    found = []
    for i in range(n - 1):
        for j in range(n - 1):
            cell = Vf[i : i + 2, j : j + 2]
            if not np.all(np.isfinite(cell)):
                continue
            if np.ptp(np.sign(cell.real)) == 0 or np.ptp(np.sign(cell.imag)) == 0:
                continue
            x, y = xs[i] + 0.5 * hx, ys[j] + 0.5 * hy
            ok = False
            for _ in range(30):
                v = f(x, y)
                if abs(v) <= tol:
                    ok = True
                    break
                gx, gy = grad(x, y)
                M = np.array([[gx.real, gy.real], [gx.imag, gy.imag]])
                try:
                    dx, dy = np.linalg.solve(M, [v.real, v.imag])
                except np.linalg.LinAlgError:
                    break
                x, y = x - dx, y - dy
            if ok and region.x_range[0] <= x <= region.x_range[1] and region.y_range[0] <= y <= region.y_range[1]:
                if all(abs(x - a) + abs(y - b) > 1e-7 for a, b in found):
                    found.append((x, y))
    for x, y in found:
        z1, z2 = region.point(x, y)
        trace.segments.append([(x, y, z1, z2, abs(f(x, y)))])
    trace.flags.append("isolated_points")
    if not found:
        trace.flags.append("empty")
    return trace
