"""Complex scalars and vectors under the holomorphic (conjugation-free) inner product.

Vectors are plain ``numpy`` complex arrays of length 2 or 3.  Square roots carry
the branch that produced them, because lengths of vectors are only defined up
to sign.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

TOL_ISO = 1e-10


class DimensionError(ValueError):
    """Vector lengths are incompatible with the requested operation."""


class Branch(enum.Enum):
    """Square-root branch: principal ``arg in (-pi, pi]`` or other ``arg in [0, 2pi)``."""

    PRINCIPAL = "principal"
    OTHER = "other"

    def swapped(self) -> "Branch":
        return Branch.OTHER if self is Branch.PRINCIPAL else Branch.PRINCIPAL

    @classmethod
    def parse(cls, value: "Branch | str") -> "Branch":
        if isinstance(value, Branch):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown branch {value!r}; use 'principal' or 'other'") from None


@dataclass(frozen=True)
class BranchedScalar:
    """A square root together with the branch that produced it.

    ``cut_margin`` is the angular distance (radians) of the radicand's argument
    from the cut of ``branch``; ``degenerate`` marks a zero radicand.
    """

    value: complex
    branch: Branch
    cut_margin: float
    degenerate: bool = False

    def swapped(self) -> "BranchedScalar":
        return BranchedScalar(-self.value, self.branch.swapped(), self.cut_margin, self.degenerate)

    def __complex__(self) -> complex:
        return self.value


def _check_finite(z: complex) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite complex value {z!r}")
    return z


def cvec(components, n: int | None = None) -> np.ndarray:
    """Build a finite complex vector, optionally checking its length."""
    v = np.asarray(components, dtype=complex).reshape(-1)
    if n is not None and v.shape[0] != n:
        raise DimensionError(f"expected a vector of length {n}, got {v.shape[0]}")
    if v.shape[0] not in (2, 3):
        raise DimensionError(f"vectors must have length 2 or 3, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite components")
    return v


def inner(u, v) -> complex:
    """Holomorphic inner product: sum of u_i * v_i, no conjugation."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise DimensionError(f"length mismatch {u.shape} vs {v.shape}")
    return complex(np.sum(u * v))


def cross(u, v) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != (3,) or v.shape != (3,):
        raise DimensionError("cross product needs two vectors of length 3")
    return np.array(
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    )


def hnorm2(v) -> float:
    """Squared Hermitian norm."""
    v = np.asarray(v)
    return float(np.sum(v.real**2 + v.imag**2))


def is_isotropic(v, tol: float = TOL_ISO) -> bool:
    """True when <v,v> vanishes relative to max(1, |v|_H^2)."""
    return abs(inner(v, v)) <= tol * max(1.0, hnorm2(v))


def _principal_arg(z: complex) -> float:
    a = cmath.phase(z)
    # cmath.phase maps -x-0j to -pi; the principal interval is (-pi, pi].  A
    # radicand strictly below the axis keeps -pi (its root tends to -i sqrt|z|).
    return math.pi if a <= -math.pi and z.imag == 0 else a


def _other_arg(z: complex) -> float:
    a = cmath.phase(z)
    if a < 0:
        # Im z < 0; a value rounding up to 2 pi still yields the root -sqrt|z|
        a += 2.0 * math.pi
    return a + 0.0


def sqrt_branched(z: complex, branch: Branch | str = Branch.PRINCIPAL) -> BranchedScalar:
    """Square root by the literal argument-interval definition of ``branch``."""
    z = _check_finite(z)
    branch = Branch.parse(branch)
    if z == 0:
        return BranchedScalar(0j, branch, 0.0, degenerate=True)
    if branch is Branch.PRINCIPAL:
        arg = _principal_arg(z)
        margin = math.pi - abs(arg)
    else:
        arg = _other_arg(z)
        margin = min(arg, 2.0 * math.pi - arg)
    value = math.sqrt(abs(z)) * cmath.exp(0.5j * arg)
    return BranchedScalar(value, branch, margin)


def branch_sign(z: complex) -> int:
    """Ratio of the other-branch root to the principal root of ``z`` (+1 or -1)."""
    return -1 if complex(z).imag < 0 else 1


def random_complex_orthogonal(rng: np.random.Generator, n: int, scale: float = 0.5) -> np.ndarray:
    """Random element of O(n, C) via the Cayley transform of a complex skew matrix."""
    A = scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    A = A - A.T
    eye = np.eye(n)
    return np.linalg.solve(eye - A, eye + A)
