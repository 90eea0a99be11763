import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from holocurv.cplx import (
    Branch,
    DimensionError,
    branch_sign,
    cross,
    hnorm2,
    inner,
    is_isotropic,
    random_complex_orthogonal,
    sqrt_branched,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


def test_inner_is_bilinear_not_hermitian():
    assert inner([1, 1j], [1, 1j]) == 0
    assert inner([1j, 0], [1j, 0]) == -1
    assert hnorm2([1, 1j]) == pytest.approx(2.0)


def test_isotropic_vectors():
    assert is_isotropic([1, 1j, 0])
    assert not is_isotropic([1, 0, 0])
    assert is_isotropic([1e5, 1e5j])


def test_cross_dimension_checked():
    with pytest.raises(DimensionError):
        cross([1, 0], [0, 1])
    assert np.allclose(cross([1, 0, 0], [0, 1, 0]), [0, 0, 1])


def test_sqrt_branches_examples():
    assert sqrt_branched(-4 + 0j).value == pytest.approx(2j)
    assert sqrt_branched(-4 + 0j, Branch.OTHER).value == pytest.approx(2j)
    # just below the negative axis the principal root flips to the lower half plane
    z = sqrt_branched(-4 - 1e-4j).value
    assert z == pytest.approx(2.5e-5 - 2j, abs=1e-9)
    assert sqrt_branched(-4 - 1e-4j, "other").value == pytest.approx(-(2.5e-5 - 2j), abs=1e-9)


@given(cplx)
def test_sqrt_squares_back(z):
    for b in Branch:
        r = sqrt_branched(z, b).value
        assert abs(r * r - z) <= 1e-12 * max(1.0, abs(z))


@given(cplx)
def test_branch_swap_rule(z):
    p = sqrt_branched(z, Branch.PRINCIPAL).value
    o = sqrt_branched(z, Branch.OTHER).value
    assert abs(o - branch_sign(z) * p) <= 1e-12 * max(1.0, abs(p))


@given(cplx)
def test_principal_matches_cmath(z):
    z = complex(z.real, z.imag + 0.0)  # the principal interval treats -0j as +0j
    assert abs(sqrt_branched(z).value - cmath.sqrt(z)) <= 1e-12 * max(1.0, abs(z) ** 0.5)


def test_random_orthogonal_preserves_inner(rng):
    for n in (2, 3):
        R = random_complex_orthogonal(rng, n)
        assert np.allclose(R.T @ R, np.eye(n), atol=1e-12)
        u = rng.normal(size=n) + 1j * rng.normal(size=n)
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        assert inner(R @ u, R @ v) == pytest.approx(inner(u, v), abs=1e-10)
