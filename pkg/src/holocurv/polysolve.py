"""Polynomial roots, resultants, squarefreeness, and zeros of holomorphic maps in boxes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .exact import GaussQ

MAX_ABERTH_ITERS = 200
CLUSTER_FACTOR = 1e-7


class CommonComponentError(ArithmeticError):
    """The resultant vanishes identically: the two polynomials share a factor."""


class BoundaryZeroError(ArithmeticError):
    """The function (nearly) vanishes on the boundary of the search box."""

    def __init__(self, where: complex, value: float):
        self.where = where
        self.value = value
        super().__init__(f"|h| = {value:.3e} on the box boundary near {where:.6g}")


# -- univariate polynomials ----------------------------------------------------------


class CPoly:
    """Dense complex polynomial, lowest degree first; trailing zeros dropped."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        nz = np.flatnonzero(c)
        self.coeffs = c[: nz[-1] + 1].copy() if nz.size else np.zeros(1, dtype=complex)

    @classmethod
    def from_roots(cls, roots, lead=1.0):
        c = np.array([lead], dtype=complex)
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(c)

    @property
    def degree(self) -> int:
        return -1 if self.is_zero() else len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            return np.polyval(self.coeffs[::-1], x)
        return kernels.horner(self.coeffs, complex(x))[0]

    def value_and_derivative(self, x: complex):
        return kernels.horner(self.coeffs, complex(x))

    def deriv(self) -> "CPoly":
        return CPoly(self.coeffs[1:] * np.arange(1, len(self.coeffs)))

    def scale(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    def relative_residual(self, x: complex) -> float:
        den = float(np.sum(np.abs(self.coeffs) * abs(x) ** np.arange(len(self.coeffs))))
        return abs(self(x)) / den if den > 0 else 0.0

    def __repr__(self):
        return f"CPoly({np.array2string(self.coeffs, precision=6)})"


class QPoly:
    """Univariate polynomial with exact Gaussian-rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = [GaussQ.of(x) for x in coeffs]
        while len(c) > 1 and not c[-1]:
            c.pop()
        self.coeffs = c or [GaussQ()]

    @property
    def degree(self) -> int:
        return -1 if self.is_zero() else len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and not self.coeffs[0]

    def lead(self) -> GaussQ:
        return self.coeffs[-1]

    def monic(self) -> "QPoly":
        if self.is_zero():
            return self
        a = self.lead()
        return QPoly([c / a for c in self.coeffs])

    def deriv(self) -> "QPoly":
        return QPoly([c * k for k, c in enumerate(self.coeffs)][1:] or [GaussQ()])

    def divmod(self, other: "QPoly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        q = [GaussQ()] * max(1, len(r) - len(other.coeffs) + 1)
        lead = other.lead()
        dn = len(other.coeffs) - 1
        for k in range(len(r) - 1 - dn, -1, -1):
            c = r[k + dn] / lead
            q[k] = c
            if c:
                for j, oc in enumerate(other.coeffs):
                    r[k + j] = r[k + j] - c * oc
        return QPoly(q), QPoly(r[:dn] or [GaussQ()])

    def __call__(self, x):
        acc = GaussQ()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_cpoly(self) -> CPoly:
        return CPoly([complex(c) for c in self.coeffs])

    def __eq__(self, other):
        return isinstance(other, QPoly) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"QPoly({self.coeffs})"


def gcd_squarefree(p: QPoly) -> tuple[QPoly, bool]:
    """Monic gcd(p, p') by the Euclidean algorithm, and whether p is squarefree."""
    p = p if isinstance(p, QPoly) else QPoly(p)
    a, b = p, p.deriv()
    if b.is_zero():
        g = a.monic() if a.degree > 0 else QPoly([1])
        return g, a.degree <= 0
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    g = a.monic()
    return g, g.degree == 0


def binary_form_squarefree(coeffs) -> tuple[QPoly, bool]:
    """Squarefreeness of a binary form sum c_j z1^(d-j) z2^j (coeffs in that order).

    The form is dehomogenized at z2 = 1; a factor z2^k (k >= 2) also counts as
    repeated.  Returns the gcd of the dehomogenized polynomial with its derivative.
    """
    d = len(coeffs) - 1
    # p(z1) = F(z1, 1): coefficient of z1^(d-j) is c_j
    p = QPoly([coeffs[d - k] for k in range(d + 1)])
    g, sf = gcd_squarefree(p)
    missing = d - p.degree  # multiplicity of the z2 factor
    return g, sf and missing <= 1 and not p.is_zero()


# -- root finding --------------------------------------------------------------------


@dataclass
class Root:
    value: complex | tuple
    multiplicity: int = 1
    residual: float = 0.0


@dataclass
class RootSet:
    roots: list[Root] = field(default_factory=list)
    certified_count: int | None = None
    certified: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def values(self) -> list:
        return [r.value for r in self.roots]

    def count(self) -> int:
        return sum(r.multiplicity for r in self.roots)

    def __len__(self):
        return len(self.roots)


def _initial_circle(c: np.ndarray) -> np.ndarray:
    n = len(c) - 1
    an = c[-1]
    radius = max(abs(c[n - k] / an) ** (1.0 / k) for k in range(1, n + 1))
    radius = radius if radius > 0 else 1.0
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    return radius * np.exp(1j * angles)


def _cluster(vals: np.ndarray, radius: float) -> list[list[int]]:
    n = len(vals)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if abs(vals[i] - vals[j]) <= radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def roots(p, tol: float = 1e-10, cluster_radius: float | None = None) -> RootSet:
    """All complex roots of ``p`` by Aberth-Ehrlich iteration and Newton polishing."""
    p = p if isinstance(p, CPoly) else (p.to_cpoly() if isinstance(p, QPoly) else CPoly(p))
    if p.degree < 1:
        raise ValueError("roots needs a polynomial of degree >= 1")
    c = p.coeffs
    zero_mult = int(np.argmax(c != 0))
    work = c[zero_mult:] / c[-1]
    out = RootSet()
    n = len(work) - 1
    if n:
        z = _initial_circle(work)
        converged = False
        for _ in range(MAX_ABERTH_ITERS):
            if kernels.aberth_sweep(work, z) < 1e-15:
                converged = True
                break
        # Newton polish, keeping an update only when it lowers the residual
        for k in range(n):
            zk = z[k]
            rk = abs(kernels.horner(work, zk)[0])
            for _ in range(3):
                v, dv = kernels.horner(work, zk)
                if dv == 0:
                    break
                cand = zk - v / dv
                rc = abs(kernels.horner(work, cand)[0])
                if not rc < rk:
                    break
                zk, rk = cand, rc
            z[k] = zk
        if not converged:
            # multiple roots converge only linearly; the residual test below decides
            out.notes.append(f"Aberth iteration stalled after {MAX_ABERTH_ITERS} sweeps; roots judged by residual")
    else:
        z = np.zeros(0, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(z)))) if n else 1.0
    radius = CLUSTER_FACTOR * scale if cluster_radius is None else cluster_radius
    for g in _cluster(z, radius):
        val = complex(np.mean(z[g]))
        out.roots.append(Root(val, len(g), p.relative_residual(val)))
    if zero_mult:
        out.roots.append(Root(0j, zero_mult, 0.0))
    out.roots.sort(key=lambda r: (round(r.value.real, 9), round(r.value.imag, 9)))
    bad = [r for r in out.roots if r.residual > tol]
    if bad:
        out.certified = False
        out.notes.append(f"{len(bad)} root(s) with residual above {tol:g}")
    out.certified_count = p.degree if out.certified else None
    return out


# -- bivariate polynomials -----------------------------------------------------------


class MPoly:
    """Bivariate polynomial {(i, j): coefficient of z1^i z2^j}.

    Coefficients are all :class:`GaussQ` (exact) or all complex (floating).
    """

    __slots__ = ("terms", "exact")

    def __init__(self, terms: dict, exact: bool | None = None):
        if exact is None:
            exact = all(isinstance(v, (GaussQ, int, Fraction)) for v in terms.values())
        conv = GaussQ.of if exact else complex
        self.exact = exact
        self.terms = {k: conv(v) for k, v in terms.items() if (bool(v) if exact else v != 0)}

    @classmethod
    def variable(cls, which: int, exact: bool = True):
        return cls({(1, 0) if which == 0 else (0, 1): 1}, exact=exact)

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.terms), default=-1)

    def degree_in(self, var: int) -> int:
        return max((k[var] for k in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def _zero(self):
        return GaussQ() if self.exact else 0j

    def _wrap(self, terms):
        return MPoly(terms, exact=self.exact)

    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.exact != self.exact:
                return (self.to_float(), other.to_float())
            return self, other
        return self, MPoly({(0, 0): other}, exact=self.exact)

    def __add__(self, other):
        a, b = self._coerce(other)
        t = dict(a.terms)
        for k, v in b.terms.items():
            t[k] = t.get(k, a._zero()) + v
        return a._wrap(t)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, MPoly) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        t: dict = {}
        for (i, j), u in a.terms.items():
            for (k, l), v in b.terms.items():
                key = (i + k, j + l)
                t[key] = t.get(key, a._zero()) + u * v
        return a._wrap(t)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = MPoly({(0, 0): 1}, exact=self.exact)
        for _ in range(n):
            out = out * self
        return out

    def diff(self, var: int) -> "MPoly":
        t = {}
        for (i, j), v in self.terms.items():
            e = (i, j)[var]
            if e:
                t[(i - 1, j) if var == 0 else (i, j - 1)] = v * e
        return self._wrap(t)

    def __call__(self, z1, z2):
        total = 0j
        for (i, j), v in self.terms.items():
            total = total + complex(v) * z1**i * z2**j
        return total

    def abs_eval(self, z1, z2) -> float:
        return sum(abs(complex(v)) * abs(z1) ** i * abs(z2) ** j for (i, j), v in self.terms.items())

    def to_float(self) -> "MPoly":
        return MPoly({k: complex(v) for k, v in self.terms.items()}, exact=False)

    def homogeneous_part(self, k: int) -> list:
        """Degree-k coefficients ordered z1^k, z1^(k-1) z2, ..., z2^k."""
        return [self.terms.get((k - j, j), self._zero()) for j in range(k + 1)]

    def homogenize(self) -> dict:
        """{(i, j, k): c} with i + j + k = degree."""
        d = self.degree
        return {(i, j, d - i - j): v for (i, j), v in self.terms.items()}

    def coeffs_in(self, var: int) -> list["MPoly"]:
        """Coefficients as polynomials in the other variable: self = sum c_k * z_var^k."""
        out = [self._wrap({}) for _ in range(self.degree_in(var) + 1)]
        for (i, j), v in self.terms.items():
            if var == 0:
                out[i].terms[(0, j)] = v
            else:
                out[j].terms[(i, 0)] = v
        return out

    def univariate(self, var: int, value) -> CPoly:
        """Polynomial in z_var obtained by fixing the other variable to ``value``."""
        n = self.degree_in(var)
        c = np.zeros(max(n, 0) + 1, dtype=complex)
        for (i, j), v in self.terms.items():
            e, o = (i, j) if var == 0 else (j, i)
            c[e] += complex(v) * value**o
        return CPoly(c)

    def __repr__(self):
        return f"MPoly({self.terms})"


# Gaussian integers as (re, im) pairs of Python ints


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gsub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _gdiv_exact(a, b):
    n = b[0] * b[0] + b[1] * b[1]
    re_ = a[0] * b[0] + a[1] * b[1]
    im_ = a[1] * b[0] - a[0] * b[1]
    q = (re_ // n, im_ // n)
    if q[0] * n != re_ or q[1] * n != im_:
        raise ArithmeticError("inexact Gaussian-integer division in Bareiss elimination")
    return q


def _bareiss_det(M):
    """Determinant of a square matrix of Gaussian integers (fraction-free)."""
    n = len(M)
    A = [row[:] for row in M]
    sign = 1
    prev = (1, 0)
    for k in range(n - 1):
        if A[k][k] == (0, 0):
            for r in range(k + 1, n):
                if A[r][k] != (0, 0):
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return (0, 0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _gsub(_gmul(A[i][j], A[k][k]), _gmul(A[i][k], A[k][j]))
                A[i][j] = _gdiv_exact(num, prev)
        prev = A[k][k]
    d = A[n - 1][n - 1] if n else (1, 0)
    return (sign * d[0], sign * d[1])


def _sylvester(a: list, b: list):
    """Sylvester matrix of two coefficient lists (highest degree first)."""
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    zero = a[0] * 0 if not isinstance(a[0], tuple) else (0, 0)
    S = [[zero] * size for _ in range(size)]
    for r in range(n):
        for k, c in enumerate(a):
            S[r][r + k] = c
    for r in range(m):
        for k, c in enumerate(b):
            S[n + r][r + k] = c
    return S


def _to_gauss_int(mp: MPoly) -> tuple[MPoly, int]:
    den = 1
    for v in mp.terms.values():
        den = math.lcm(den, v.denominator())
    terms = {}
    for k, v in mp.terms.items():
        w = v * den
        terms[k] = (int(w.re), int(w.im))
    out = MPoly.__new__(MPoly)
    out.terms = terms
    out.exact = True
    return out, den


def _spec_coeffs_int(mp: MPoly, var: int, x: int, deg: int):
    # coefficients (highest first) of mp as polynomial in z_var at other var = x
    c = [(0, 0)] * (deg + 1)
    for (i, j), (re_, im_) in mp.terms.items():
        e, o = (i, j) if var == 0 else (j, i)
        p = x**o
        cur = c[e]
        c[e] = (cur[0] + re_ * p, cur[1] + im_ * p)
    return c[::-1]


def _newton_interpolate(xs: list[int], ys: list[GaussQ]) -> QPoly:
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [coef[-1]]
    for k in range(n - 2, -1, -1):
        # poly = poly * (x - xs[k]) + coef[k]
        new = [GaussQ()] * (len(poly) + 1)
        for d, c in enumerate(poly):
            new[d + 1] = new[d + 1] + c
            new[d] = new[d] - c * xs[k]
        new[0] = new[0] + coef[k]
        poly = new
    return QPoly(poly)


def resultant(f: MPoly, g: MPoly, eliminate: int | str = 1):
    """Sylvester resultant of f and g with respect to z1 (0) or z2 (1).

    Exact inputs give a :class:`QPoly` computed by evaluation at integer points,
    fraction-free elimination over the Gaussian integers, and interpolation;
    floating inputs give a :class:`CPoly` via evaluation at roots of unity.
    """
    var = {"z1": 0, "z2": 1}.get(eliminate, eliminate)
    if var not in (0, 1):
        raise ValueError("eliminate must be z1/z2 or 0/1")
    if f.is_zero() or g.is_zero():
        raise ValueError("resultant of a zero polynomial")
    m, n = f.degree_in(var), g.degree_in(var)
    if m == 0 and n == 0:
        raise ValueError("neither polynomial involves the eliminated variable")
    bound = f.degree * g.degree
    if f.exact and g.exact:
        fi, df = _to_gauss_int(f)
        gi, dg = _to_gauss_int(g)
        xs = list(range(bound + 1))
        ys = []
        for x in xs:
            S = _sylvester(_spec_coeffs_int(fi, var, x, m), _spec_coeffs_int(gi, var, x, n))
            d = _bareiss_det(S)
            ys.append(GaussQ(Fraction(d[0]), Fraction(d[1])))
        res = _newton_interpolate(xs, ys)
        scale = GaussQ(Fraction(df**n * dg**m))
        res = QPoly([c / scale for c in res.coeffs])
        if res.is_zero():
            raise CommonComponentError("resultant vanishes identically (common factor)")
        return res
    ff, gf = f.to_float(), g.to_float()
    N = bound + 1
    pts = np.exp(2j * np.pi * np.arange(N) / N)
    vals = np.empty(N, dtype=complex)
    for k, x in enumerate(pts):
        a = _float_coeffs(ff, var, x, m)
        b = _float_coeffs(gf, var, x, n)
        vals[k] = np.linalg.det(np.array(_sylvester(list(a), list(b)), dtype=complex))
    coeffs = np.fft.fft(vals) / N
    # fft with exp(-2pi i jk/N) inverts evaluation at exp(+2pi i k/N)
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    coeffs[np.abs(coeffs) < 1e-12 * scale] = 0
    res = CPoly(coeffs)
    if res.is_zero():
        raise CommonComponentError("resultant vanishes identically (common factor)")
    return res


def _float_coeffs(mp: MPoly, var: int, x: complex, deg: int):
    c = np.zeros(deg + 1, dtype=complex)
    for (i, j), v in mp.terms.items():
        e, o = (i, j) if var == 0 else (j, i)
        c[e] += v * x**o
    return c[::-1]


# -- zeros of holomorphic functions in a rectangle -------------------------------------


def _value_and_derivative(h, z: complex):
    from .jets import Jet1

    out = h(Jet1.variable(z, 1))
    if isinstance(out, Jet1):
        return complex(out.c[0]), complex(out.c[1])
    return complex(out), 0j


def _boundary(box, n_side: int) -> np.ndarray:
    a = complex(box.re_min, box.im_min)
    b = complex(box.re_max, box.im_min)
    c = complex(box.re_max, box.im_max)
    d = complex(box.re_min, box.im_max)
    s = np.arange(n_side) / n_side
    return np.concatenate([a + (b - a) * s, b + (c - b) * s, c + (d - c) * s, d + (a - d) * s])


def _contour_count(h, pts: np.ndarray) -> complex:
    vals = np.array([_value_and_derivative(h, z) for z in pts])
    ratio = vals[:, 1] / vals[:, 0]
    dz = np.roll(pts, -1) - pts
    nxt = np.roll(ratio, -1)
    return complex(np.sum(0.5 * (ratio + nxt) * dz) / (2j * np.pi))


def argument_count(h, box, start: int = 64, max_side: int = 1 << 14) -> tuple[int, bool]:
    """Zeros of h inside ``box`` counted by the argument principle.

    Returns (count, stable): the trapezoid rule is refined by doubling until
    the rounded count repeats and lies within 0.25 of an integer.
    """
    prev = None
    n = start
    while n <= max_side:
        w = _contour_count(h, _boundary(box, n))
        k = round(w.real)
        ok = abs(w - k) < 0.25
        if ok and prev == k:
            return k, True
        prev = k if ok else None
        n *= 2
    return (prev if prev is not None else round(w.real)), False


def _circle_count(h, z0: complex, rho: float, n: int = 64) -> int:
    pts = z0 + rho * np.exp(2j * np.pi * np.arange(n) / n)
    return round(_contour_count(h, pts).real)


def zeros_in_box(h, box, grid: int = 16, tol: float = 1e-10) -> RootSet:
    """Zeros of a holomorphic ``h`` inside a :class:`~holocurv.expr.Box`.

    ``h`` must accept :class:`~holocurv.jets.Jet1` arguments (any function built
    from jet arithmetic does).  Zeros come from Newton iterations started on a
    ``grid`` x ``grid`` lattice; the argument-principle count on the boundary
    certifies the result.
    """
    bpts = _boundary(box, 256)
    bvals = np.array([abs(_value_and_derivative(h, z)[0]) for z in bpts])
    top = max(1.0, float(bvals.max()))
    k = int(np.argmin(bvals))
    if bvals[k] <= 1e3 * tol * top:
        raise BoundaryZeroError(complex(bpts[k]), float(bvals[k]))
    count, stable = argument_count(h, box)

    scale = max(box.scale, 1e-300)
    found: list[complex] = []
    xs = np.linspace(box.re_min, box.re_max, grid + 2)[1:-1]
    ys = np.linspace(box.im_min, box.im_max, grid + 2)[1:-1]
    for y in ys:
        for x in xs:
            z = complex(x, y)
            ok = False
            for _ in range(80):
                v, dv = _value_and_derivative(h, z)
                if v == 0:
                    ok = True
                    break
                if dv == 0 or not np.isfinite(dv):
                    break
                step = v / dv
                z -= step
                if not np.isfinite(z) or abs(z - box.center) > 4 * scale:
                    break
                if abs(step) < 1e-14 * max(1.0, abs(z)):
                    ok = True
                    break
            if not ok or not box.contains(z, pad=1e-9 * scale):
                continue
            if abs(_value_and_derivative(h, z)[0]) > 1e3 * tol * top:
                continue
            if all(abs(z - w) > 1e-6 * scale for w in found):
                found.append(z)
    out = RootSet()
    for z in found:
        others = [abs(z - w) for w in found if w is not z]
        rho = min([1e-3 * scale] + [0.4 * d for d in others])
        m = max(1, _circle_count(h, z, rho))
        if m > 1:
            for _ in range(5):
                v, dv = _value_and_derivative(h, z)
                if dv == 0 or v == 0:
                    break
                z -= m * v / dv
        v = abs(_value_and_derivative(h, z)[0])
        out.roots.append(Root(z, m, v / top))
    out.roots.sort(key=lambda r: (round(r.value.real, 9), round(r.value.imag, 9)))
    out.certified_count = count if stable else None
    out.certified = stable and out.count() == count
    if not stable:
        out.notes.append("argument-principle count did not stabilize")
    elif out.count() != count:
        out.notes.append(f"found {out.count()} zero(s) with multiplicity, contour count {count}")
    return out
