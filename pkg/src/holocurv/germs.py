"""Singularity type of function germs (C^2, q) -> C and fold/cusp tests for maps C^2 -> C^2.

Functions: corank of the Hessian decides the route.  Corank 0 is A1.  Corank 1
goes through the splitting lemma: in coordinates (x, y) with y along the kernel,
solve g_x(phi(y), y) = 0 as a power series and read the order of the residual
r(y) = g(phi(y), y); order k+1 means A_k.  Corank 2 is D4 exactly when the cubic
part is a binary cubic with nonzero discriminant.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contact import TOL_REL, ladder_margin
from .jets import Jet1, Jet2


@dataclass
class Germ2Class:
    corank: int | None
    label: str  # "A1".."A<k>", "D4", "Degenerate"
    k: int | None = None
    reason: str = ""
    residuals: list = field(default_factory=list)
    kernel: np.ndarray | None = None
    residual_jet: list = field(default_factory=list)
    hessian_singular_values: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        from .report import jsonable

        return jsonable(self.__dict__)


def binary_cubic_discriminant(a, b, c, d):
    """Discriminant of a x^3 + b x^2 y + c x y^2 + d y^3."""
    return b * b * c * c - 4 * a * c**3 - 4 * b**3 * d - 27 * a * a * d * d + 18 * a * b * c * d


def _degree_coeffs(jet: Jet2, k: int):
    return jet.homogeneous(k)


def _scale(jet: Jet2) -> float:
    K = jet.order
    vals = [abs(jet.coeff(i, j)) for i in range(K + 1) for j in range(K + 1 - i) if i + j >= 2]
    return max(vals + [1e-300])


def classify_germ2(jet: Jet2, tol: float = TOL_REL, scale: float | None = None) -> Germ2Class:
    """Classify a critical germ from its Taylor jet (order >= 5 recommended)."""
    S = _scale(jet) if scale is None else scale
    H = jet.hessian()
    U, sv, Vh = np.linalg.svd(H)
    out = Germ2Class(None, "Degenerate", hessian_singular_values=[float(x) for x in sv])
    grad = jet.gradient()
    if max(abs(grad[0]), abs(grad[1])) > tol * S:
        out.warnings.append("germ is not critical at the base point")
    rank_tol = tol * 2 * S
    rank = int(np.sum(sv > rank_tol))
    out.corank = 2 - rank
    out.residuals.append(float(sv[-1] / (2 * S)))
    if rank == 2:
        out.label, out.k = "A1", 1
        if ladder_margin([sv[-1] / (2 * S)], tol):
            out.warnings.append("smallest Hessian singular value is near the rank tolerance")
        return out
    if rank == 0:
        a, b, c, d = _degree_coeffs(jet, 3)
        disc = binary_cubic_discriminant(a, b, c, d)
        dscale = max(abs(a), abs(b), abs(c), abs(d), 1e-300) ** 4
        cs = max(abs(a), abs(b), abs(c), abs(d))
        out.residuals.append(float(abs(disc) / (S**4)))
        if cs <= tol * S:
            out.reason = "corank 2 with vanishing cubic part"
            return out
        if abs(disc) > tol * dscale:
            out.label = "D4"
            if ladder_margin([abs(disc) / dscale], tol):
                out.warnings.append("cubic discriminant is near the vanishing tolerance")
        else:
            out.reason = "corank 2 with degenerate cubic part"
        return out
    # corank 1: y runs along the kernel, x along a direction with g_xx != 0
    kvec = Vh.conj()[-1]
    kvec = kvec / np.linalg.norm(kvec)
    out.kernel = kvec
    cands = [np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.conj(kvec)]
    avec = max(cands, key=lambda a: abs(a @ H @ a) * abs(a[0] * kvec[1] - a[1] * kvec[0]))
    K = jet.order
    x, y = Jet2.variables((0.0, 0.0), K)
    q1, q2 = jet.base
    g = jet.substitute(q1 + avec[0] * x + kvec[0] * y, q2 + avec[1] * x + kvec[1] * y)
    # solve g_x = 0 in coordinates scaled by rho so the implicit function has
    # radius ~1; residual coefficients are mapped back by rho^-m
    g2 = abs(g.coeff(2, 0))
    rho = 1.0
    for i in range(K + 1):
        for j in range(K + 1 - i):
            c = abs(g.coeff(i, j))
            if i + j >= 3 and c > 0 and g2 > 0:
                rho = min(rho, (g2 / c) ** (1.0 / (i + j - 2)))
    gs = g.substitute(rho * x, rho * y)
    gx = gs.diff(0)
    gxx = gx.diff(0)
    yv = Jet1.variable(0.0, K)
    phi = Jet1.constant(0.0, 0.0, K)
    try:
        for _ in range(K + 1):
            step = _pad(gx.substitute(phi, yv), K) / _pad(gxx.substitute(phi, yv), K)
            phi = phi - step
            phi.c[0] = 0.0
    except ZeroDivisionError:
        out.reason = "splitting lemma failed: g_xx vanishes along the kernel"
        return out
    r = gs.substitute(phi, yv)
    rc = [complex(v) / rho**m for m, v in enumerate(_pad(r, K).c)]
    out.residual_jet = rc
    Sg = _scale(g) if scale is None else scale
    for m in range(2, len(rc)):
        res = abs(rc[m]) / Sg
        out.residuals.append(float(res))
        if abs(rc[m]) > tol * Sg:
            if m == 2:
                out.label, out.k = "A1", 1
                out.warnings.append("Hessian rank decision and splitting residual disagree; treated as A1")
            else:
                out.label, out.k = f"A{m - 1}", m - 1
            if ladder_margin(out.residuals[1:], tol):
                out.warnings.append("a residual coefficient is near the vanishing tolerance")
            return out
    out.reason = "beyond jet order"
    return out


def _pad(j: Jet1, K: int) -> Jet1:
    if j.order >= K:
        return j.truncate(K)
    c = np.zeros(K + 1, dtype=complex)
    c[: j.order + 1] = j.c
    return Jet1(j.base, c)


# -- maps of the plane: Whitney fold and cusp ----------------------------------------


@dataclass
class MapGermClass:
    verdict: str  # "regular", "fold", "cusp", "codim <= 2, unclassified"
    jacobian: complex
    eta: complex | None = None
    cusp_determinant: complex | None = None
    rank: int = 2
    residuals: list = field(default_factory=list)

    def to_dict(self) -> dict:
        from .report import jsonable

        return jsonable(self.__dict__)


def classify_map2(F1: Jet2, F2: Jet2, tol: float = TOL_REL) -> MapGermClass:
    """Whitney criteria for (F1, F2) at the jets' base point.

    J = det dF; k = kernel field of dF; eta = dJ(k).  Fold: J = 0, dJ != 0,
    eta != 0.  Cusp: eta = 0 and det(grad J, grad eta) != 0.
    """
    a, b = F1.diff(0), F1.diff(1)
    c, d = F2.diff(0), F2.diff(1)
    J = a * d - b * c
    S = max(_scale(F1), _scale(F2), max(abs(F1.coeff(1, 0)), abs(F1.coeff(0, 1)), abs(F2.coeff(1, 0)), abs(F2.coeff(0, 1))))
    J0 = J.value
    if abs(J0) > tol * S * S:
        return MapGermClass("regular", J0, rank=2, residuals=[abs(J0) / (S * S)])
    rows = [(a, b), (c, d)]
    norms = [abs(r[0].value) + abs(r[1].value) for r in rows]
    if max(norms) <= tol * S:
        return MapGermClass("codim <= 2, unclassified", J0, rank=0)
    p, q = rows[int(np.argmax(norms))]
    kx, ky = -q, p  # kernel field of dF along the singular set
    Jx, Jy = J.diff(0), J.diff(1)
    eta = Jx * kx.truncate(Jx.order) + Jy * ky.truncate(Jy.order)
    gJ = (Jx.value, Jy.value)
    out = MapGermClass("codim <= 2, unclassified", J0, eta=eta.value, rank=1)
    gscale = S * S
    if max(abs(gJ[0]), abs(gJ[1])) <= tol * gscale:
        return out
    out.residuals.append(abs(eta.value) / (gscale * S))
    if abs(eta.value) > tol * gscale * S:
        out.verdict = "fold"
        return out
    ex, ey = eta.diff(0).value, eta.diff(1).value
    det = gJ[0] * ey - gJ[1] * ex
    out.cusp_determinant = det
    out.residuals.append(abs(det) / (gscale * gscale * S))
    if abs(det) > tol * gscale * gscale * S:
        out.verdict = "cusp"
    return out
