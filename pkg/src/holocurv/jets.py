"""Truncated Taylor expansions ("jets") of holomorphic functions.

A :class:`Jet1` stores ``c[k] = f^(k)(t0)/k!`` for ``k <= K``; a :class:`Jet2`
stores ``c[i, j] = d^(i+j) f / dz1^i dz2^j (q) / (i! j!)`` for ``i + j <= K``.
Arithmetic truncates exactly at order ``K``; analytic functions are applied by
summing their Taylor series in the nilpotent part of the argument.
"""
from __future__ import annotations

import cmath
import math
from numbers import Number

import numpy as np

from . import kernels
from .cplx import Branch, sqrt_branched

DEFAULT_CURVE_ORDER = 6
DEFAULT_SURFACE_ORDER = 5


class JetError(ArithmeticError):
    pass


class IsotropicOrderError(JetError):
    """Square root of a jet whose constant term vanishes.

    ``order`` is the index of the first non-vanishing coefficient (None when the
    whole jet vanishes); for 2-variable jets it is the lowest total degree.
    """

    def __init__(self, order):
        self.order = order
        super().__init__(f"square root of a jet vanishing to order {order}")


def _zero_tol(c) -> float:
    scale = float(np.max(np.abs(c))) if c.size else 0.0
    return 1e-13 * scale


class _Jet:
    __slots__ = ("base", "c")
    # make numpy scalars defer to the jet operators
    __array_ufunc__ = None

    def __init__(self, base, coeffs):
        self.base = base
        self.c = coeffs

    # subclasses provide: order, _mul, _truncate, _const_index, _new_like
    @property
    def value(self) -> complex:
        return complex(self.c[self._const_index])

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.base != self.base:
            raise JetError(f"jets expanded at different points: {self.base} vs {other.base}")

    def _align(self, other):
        self._check(other)
        if other.order == self.order:
            return self.c, other.c, self.order
        k = min(self.order, other.order)
        return self._truncate(self.c, k), self._truncate(other.c, k), k

    def _const(self, x, k):
        out = np.zeros(self._shape(k), dtype=complex)
        out[self._const_index] = x
        return out

    def __neg__(self):
        return self._new(-self.c)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, _Jet):
            a, b, _ = self._align(other)
            return self._new(a + b)
        if isinstance(other, Number):
            c = self.c.copy()
            c[self._const_index] += other
            return self._new(c)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, _Jet):
            a, b, _ = self._align(other)
            return self._new(a - b)
        if isinstance(other, Number):
            c = self.c.copy()
            c[self._const_index] -= other
            return self._new(c)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Number):
            c = -self.c
            c[self._const_index] += other
            return self._new(c)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, _Jet):
            a, b, _ = self._align(other)
            return self._new(self._mul(a, b))
        if isinstance(other, Number):
            return self._new(self.c * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _Jet):
            return self * other.reciprocal()
        if isinstance(other, Number):
            if other == 0:
                raise ZeroDivisionError("jet divided by zero")
            return self._new(self.c / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Number):
            return self.reciprocal() * other
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise JetError("jets support non-negative integer powers only")
        result = self._new(self._const(1.0, self.order))
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def nilpotent(self):
        c = self.c.copy()
        c[self._const_index] = 0
        return self._new(c)

    def apply_series(self, taylor):
        """Evaluate sum(taylor[k] * h**k) with h the nilpotent part of ``self``."""
        h = self.nilpotent()
        K = min(self.order, len(taylor) - 1)
        acc = self._new(self._const(taylor[K], self.order))
        for k in range(K - 1, -1, -1):
            acc = acc * h + taylor[k]
        return acc

    def reciprocal(self):
        c0 = self.value
        if abs(c0) <= _zero_tol(self.c) or c0 == 0:
            raise ZeroDivisionError("division by a jet with vanishing constant term")
        K = self.order
        taylor = [(-1) ** k / c0 ** (k + 1) for k in range(K + 1)]
        return self.apply_series(taylor)

    def exp(self):
        e = cmath.exp(self.value)
        return self.apply_series([e / math.factorial(k) for k in range(self.order + 1)])

    def sin(self):
        s, c = cmath.sin(self.value), cmath.cos(self.value)
        cyc = (s, c, -s, -c)
        return self.apply_series([cyc[k % 4] / math.factorial(k) for k in range(self.order + 1)])

    def cos(self):
        s, c = cmath.sin(self.value), cmath.cos(self.value)
        cyc = (c, -s, -c, s)
        return self.apply_series([cyc[k % 4] / math.factorial(k) for k in range(self.order + 1)])

    def sqrt(self, branch: Branch | str = Branch.PRINCIPAL):
        c0 = self.value
        if c0 == 0 or abs(c0) <= _zero_tol(self.c):
            raise IsotropicOrderError(self.vanishing_order())
        root = sqrt_branched(c0, branch).value
        taylor = []
        binom = 1.0
        for k in range(self.order + 1):
            taylor.append(binom * root / c0**k)
            binom *= (0.5 - k) / (k + 1)
        return self.apply_series(taylor)

    def majorant(self):
        """Majorant jet: coefficientwise absolute values."""
        return self._new(np.abs(self.c).astype(complex))


class Jet1(_Jet):
    """Truncated Taylor series in one variable."""

    __slots__ = ()
    _const_index = 0

    def __init__(self, base, coeffs):
        super().__init__(complex(base), np.asarray(coeffs, dtype=complex))

    @classmethod
    def variable(cls, base, order=DEFAULT_CURVE_ORDER):
        c = np.zeros(order + 1, dtype=complex)
        c[0] = base
        if order >= 1:
            c[1] = 1.0
        return cls(base, c)

    @classmethod
    def constant(cls, value, base, order=DEFAULT_CURVE_ORDER):
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(base, c)

    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @staticmethod
    def _shape(k):
        return (k + 1,)

    @staticmethod
    def _truncate(c, k):
        return c[: k + 1].copy()

    def truncate(self, k):
        return Jet1(self.base, self._truncate(self.c, k))

    def _new(self, c):
        return Jet1(self.base, c)

    @staticmethod
    def _mul(a, b):
        return kernels.mul1(np.ascontiguousarray(a), np.ascontiguousarray(b))

    def derivative(self, k: int) -> complex:
        return complex(self.c[k]) * math.factorial(k)

    def derivatives(self) -> np.ndarray:
        return self.c * np.array([math.factorial(k) for k in range(self.order + 1)], dtype=float)

    def diff(self) -> "Jet1":
        K = self.order
        if K == 0:
            raise JetError("cannot differentiate an order-0 jet")
        return Jet1(self.base, self.c[1:] * np.arange(1, K + 1))

    def integrate(self, constant=0j) -> "Jet1":
        """Antiderivative, one order higher, with the given constant term."""
        c = np.empty(self.order + 2, dtype=complex)
        c[0] = constant
        c[1:] = self.c / np.arange(1, self.order + 2)
        return Jet1(self.base, c)

    def vanishing_order(self, tol: float | None = None):
        tol = _zero_tol(self.c) if tol is None else tol
        for k, ck in enumerate(self.c):
            if abs(ck) > tol:
                return k
        return None

    def compose(self, inner: "_Jet") -> "_Jet":
        """``self`` (expanded at inner.value) composed with ``inner``."""
        if not cmath.isclose(self.base, inner.value, rel_tol=1e-12, abs_tol=1e-12):
            raise JetError(f"outer jet expanded at {self.base}, inner value is {inner.value}")
        out = inner.apply_series(list(self.c))
        k = min(self.order, inner.order)
        return out if out.order == k else out.truncate(k)

    def revert(self) -> "Jet1":
        """Jet of the local inverse function, expanded at ``self.value``."""
        a1 = self.c[1] if self.order >= 1 else 0
        if a1 == 0:
            raise JetError("inverse requires a non-vanishing first derivative")
        s0 = self.value
        a = Jet1(0.0, self.c.copy())
        a.c[0] = 0
        u = Jet1.variable(0.0, self.order)
        h = u / a1
        for _ in range(self.order):
            h = h - (a.apply_series_at(h) - u) / a1
        c = h.c.copy()
        c[0] = self.base
        return Jet1(s0, c)

    def apply_series_at(self, h: "Jet1") -> "Jet1":
        # self has zero constant term; returns self(h) for nilpotent h
        return h.apply_series(list(self.c))

    def __call__(self, x):
        """Evaluate the Taylor polynomial at ``x`` (complex)."""
        p, _ = kernels.horner(np.ascontiguousarray(self.c), complex(x) - self.base)
        return p

    def __repr__(self):
        return f"Jet1(base={self.base!r}, coeffs={np.array2string(self.c, precision=6)})"


class Jet2(_Jet):
    """Truncated Taylor series in two variables (total degree <= K)."""

    __slots__ = ()
    _const_index = (0, 0)

    def __init__(self, base, coeffs):
        super().__init__((complex(base[0]), complex(base[1])), np.asarray(coeffs, dtype=complex))

    @classmethod
    def variables(cls, base, order=DEFAULT_SURFACE_ORDER):
        out = []
        for axis in range(2):
            c = np.zeros((order + 1, order + 1), dtype=complex)
            c[0, 0] = base[axis]
            if order >= 1:
                c[(1, 0) if axis == 0 else (0, 1)] = 1.0
            out.append(cls(base, c))
        return tuple(out)

    @classmethod
    def constant(cls, value, base, order=DEFAULT_SURFACE_ORDER):
        c = np.zeros((order + 1, order + 1), dtype=complex)
        c[0, 0] = value
        return cls(base, c)

    @classmethod
    def from_dict(cls, coeffs: dict, base=(0, 0), order=DEFAULT_SURFACE_ORDER):
        c = np.zeros((order + 1, order + 1), dtype=complex)
        for (i, j), v in coeffs.items():
            if i + j <= order:
                c[i, j] = v
        return cls(base, c)

    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @staticmethod
    def _shape(k):
        return (k + 1, k + 1)

    @staticmethod
    def _truncate(c, k):
        k = min(k, c.shape[0] - 1)
        out = c[: k + 1, : k + 1].copy()
        for i in range(k + 1):
            out[i, k + 1 - i :] = 0
        return out

    def truncate(self, k):
        return Jet2(self.base, self._truncate(self.c, k))

    def _new(self, c):
        return Jet2(self.base, c)

    @staticmethod
    def _mul(a, b):
        return kernels.mul2(np.ascontiguousarray(a), np.ascontiguousarray(b))

    def coeff(self, i: int, j: int) -> complex:
        return complex(self.c[i, j]) if i + j <= self.order else 0j

    def partial(self, i: int, j: int) -> complex:
        return self.coeff(i, j) * math.factorial(i) * math.factorial(j)

    def diff(self, axis: int) -> "Jet2":
        K = self.order
        if K == 0:
            raise JetError("cannot differentiate an order-0 jet")
        if axis == 0:
            c = self.c[1:, :K] * np.arange(1, K + 1)[:, None]
        else:
            c = self.c[:K, 1:] * np.arange(1, K + 1)[None, :]
        return Jet2(self.base, np.ascontiguousarray(c))

    def gradient(self) -> tuple[complex, complex]:
        return self.coeff(1, 0), self.coeff(0, 1)

    def hessian(self) -> np.ndarray:
        return np.array(
            [[2 * self.coeff(2, 0), self.coeff(1, 1)], [self.coeff(1, 1), 2 * self.coeff(0, 2)]]
        )

    def homogeneous(self, k: int) -> list[complex]:
        """Coefficients of the degree-k part, ordered z1^k, z1^(k-1) z2, ..., z2^k."""
        return [self.coeff(k - j, j) for j in range(k + 1)]

    def vanishing_order(self, tol: float | None = None):
        tol = _zero_tol(self.c) if tol is None else tol
        for k in range(self.order + 1):
            if any(abs(x) > tol for x in self.homogeneous(k)):
                return k
        return None

    def substitute(self, x, y):
        """Compose with jets ``x``, ``y`` whose values equal ``self.base``."""
        for v, b in ((x, self.base[0]), (y, self.base[1])):
            val = v.value if isinstance(v, _Jet) else complex(v)
            if not cmath.isclose(val, b, rel_tol=1e-12, abs_tol=1e-12):
                raise JetError(f"substitution value {val} does not match base {b}")
        hx = x - self.base[0]
        hy = y - self.base[1]
        K = self.order
        pow_y = [None] * (K + 1)
        if isinstance(hy, _Jet):
            pow_y[0] = hy * 0 + 1.0
            for j in range(1, K + 1):
                pow_y[j] = pow_y[j - 1] * hy
        acc = None
        for i in range(K, -1, -1):
            row = 0
            for j in range(K - i + 1):
                cij = self.c[i, j]
                if cij != 0:
                    row = row + cij * (pow_y[j] if pow_y[0] is not None else hy**j)
            acc = row if acc is None else acc * hx + row
        return acc

    def __call__(self, z1, z2):
        h1 = complex(z1) - self.base[0]
        h2 = complex(z2) - self.base[1]
        total = 0j
        for i in range(self.order + 1):
            for j in range(self.order + 1 - i):
                total += self.c[i, j] * h1**i * h2**j
        return total

    def __repr__(self):
        return f"Jet2(base={self.base!r}, order={self.order})"


# -- elementary functions accepting complex numbers or jets ----------------------


def jexp(x):
    return x.exp() if isinstance(x, _Jet) else cmath.exp(x)


def jsin(x):
    return x.sin() if isinstance(x, _Jet) else cmath.sin(x)


def jcos(x):
    return x.cos() if isinstance(x, _Jet) else cmath.cos(x)


def jsqrt(x, branch: Branch | str = Branch.PRINCIPAL):
    if isinstance(x, _Jet):
        return x.sqrt(branch)
    return sqrt_branched(x, branch).value


def combine(a, b, op: str, branch: Branch | str = Branch.PRINCIPAL):
    """Binary/unary jet algebra by name.

    ``op`` is one of add, sub, mul, div, compose, sqrt, pow (``b`` is the integer
    exponent for pow and ignored for sqrt).
    """
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "compose":
        return a.compose(b)
    if op == "sqrt":
        return a.sqrt(branch)
    if op == "pow":
        return a**b
    raise ValueError(f"unknown jet operation {op!r}")


def lift(source, at, order: int | None = None, branch: Branch | str = Branch.PRINCIPAL):
    """Jet of an expression (text or AST) at a base point.

    Curves (symbol ``t``) give a :class:`Jet1` at the complex point ``at``;
    surfaces (``z1``, ``z2``) give a :class:`Jet2` at the pair ``at``.
    """
    from .expr import Expr, evaluate, free_symbols, parse

    ast = parse(source) if isinstance(source, str) else source
    if not isinstance(ast, Expr):
        raise TypeError("lift expects an expression string or AST")
    syms = free_symbols(ast)
    if syms <= {"t"} and not isinstance(at, (tuple, list)):
        K = DEFAULT_CURVE_ORDER if order is None else order
        if K < 1:
            raise ValueError("jet order must be >= 1")
        env = {"t": Jet1.variable(at, K)}
        out = evaluate(ast, env, branch)
        return out if isinstance(out, Jet1) else Jet1.constant(out, at, K)
    if syms <= {"z1", "z2"}:
        K = DEFAULT_SURFACE_ORDER if order is None else order
        if K < 1:
            raise ValueError("jet order must be >= 1")
        z1, z2 = Jet2.variables(tuple(at), K)
        out = evaluate(ast, {"z1": z1, "z2": z2}, branch)
        return out if isinstance(out, Jet2) else Jet2.constant(out, tuple(at), K)
    raise ValueError(f"expression mixes parameter symbols {sorted(syms)}")
