import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holocurv.germs import binary_cubic_discriminant, classify_germ2, classify_map2
from holocurv.jets import Jet2

K = 7


def _vars(base=(0, 0)):
    return Jet2.variables(base, K)


def _moved(f, rng, nonlinear=True):
    """f composed with a random invertible complex linear map plus quadratic terms."""
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    while abs(np.linalg.det(A)) < 0.3:
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    x, y = _vars()
    u = A[0, 0] * x + A[0, 1] * y
    v = A[1, 0] * x + A[1, 1] * y
    if nonlinear:
        u = u + 0.3 * x * y
        v = v - 0.2 * x * x
    return f.substitute(u, v)


def test_discriminant():
    assert binary_cubic_discriminant(1, 0, -3, 0) != 0  # x^3 - 3xy^2
    assert binary_cubic_discriminant(0, 1, 0, 0) == 0  # x^2 y


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("sign", [1, -1])
def test_a_k_normal_forms(k, sign):
    x, y = _vars()
    f = x * x + sign * y ** (k + 1)
    assert classify_germ2(f).label == f"A{k}"


@pytest.mark.parametrize("seed", range(5))
def test_a_k_after_coordinate_change(seed):
    rng = np.random.default_rng(seed)
    x, y = _vars()
    for k in (1, 2, 3, 4):
        g = _moved(x * x + y ** (k + 1), rng)
        assert classify_germ2(g).label == f"A{k}"


@pytest.mark.parametrize("seed", range(5))
def test_d4(seed):
    rng = np.random.default_rng(seed)
    x, y = _vars()
    for f in (x**3 - 3 * x * y * y, x * x * y + y**3):
        c = classify_germ2(_moved(f, rng))
        assert c.label == "D4" and c.corank == 2


def test_degenerate_cases():
    x, y = _vars()
    assert classify_germ2(x * x * y).label == "Degenerate"
    assert classify_germ2(x**4 + y**4).label == "Degenerate"
    c = classify_germ2(x * x)  # y-direction residual vanishes to the jet order
    assert c.label == "Degenerate" and c.reason == "beyond jet order"


def test_noncritical_warns():
    x, y = _vars()
    c = classify_germ2(x + x * x + y * y)
    assert any("not critical" in w for w in c.warnings)


@settings(max_examples=30)
@given(st.floats(0.2, 3), st.floats(0.2, 3), st.sampled_from([2, 3, 4]))
def test_scaling_invariance(a, b, k):
    x, y = _vars()
    f = a * x * x + b * y ** (k + 1)
    assert classify_germ2(f).label == f"A{k}"


# -- maps of the plane --------------------------------------------------------------


def test_whitney_map_germs():
    x, y = _vars()
    assert classify_map2(x, y).verdict == "regular"
    assert classify_map2(x, y * y).verdict == "fold"
    assert classify_map2(x, y**3 + x * y).verdict == "cusp"
    assert classify_map2(x, y**3).verdict == "codim <= 2, unclassified"
    assert classify_map2(x * x, y * y).verdict == "codim <= 2, unclassified"


def test_map_germs_after_coordinate_change(rng):
    x, y = _vars()
    for F, verdict in (((x, y * y), "fold"), ((x, y**3 + x * y), "cusp")):
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        F1, F2 = (_moved(f, np.random.default_rng(3)) for f in F)  # same source change for both
        G1 = A[0, 0] * F1 + A[0, 1] * F2
        G2 = A[1, 0] * F1 + A[1, 1] * F2
        assert classify_map2(G1, G2).verdict == verdict
