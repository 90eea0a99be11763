import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holocurv.cplx import Branch, inner, random_complex_orthogonal
from holocurv.surface import (
    IsotropicLocusError,
    NonRegularSurfaceError,
    NormalizationError,
    PlaneModel,
    ProjectionModel,
    Slice,
    Sphere,
    SurfacePatch,
    _surface_jets,
    brioschi_K,
    contact_report,
    focal_at,
    forms_at,
    monge_family,
    ridge_residuals,
    shape_at,
    trace_locus,
)

SADDLE = SurfacePatch(["z1", "z2", "z1*z2"])
MONGE23 = SurfacePatch.from_monge("(2*z1^2 + 3*z2^2)/2")
SPHERE = SurfacePatch.from_monge("sqrt(4 - z1^2 - z2^2)")
GENERIC = SurfacePatch.from_monge("(2*z1^2+3*z2^2)/2 + z1^3/3 + z1*z2^2/2 + z2^3/5")
PATCHES = [
    SADDLE,
    GENERIC,
    SurfacePatch(["z1 + z2^2/3", "z2 - z1*z2/4", "exp(z1/2) + z2^2"]),
    SurfacePatch(["cos(z1)", "sin(z1) + z2", "z1*z2 + z2^3"]),
]
POINTS = [(0.1 + 0.05j, -0.2), (-0.3, 0.25 + 0.1j)]


# -- fundamental forms ----------------------------------------------------------------


def test_plane_forms():
    f = forms_at(SurfacePatch(["z1", "z2", "0"]), (0.3, 0.2j))
    assert (f.E, f.F, f.G) == (1, 0, 1)
    assert f.lbar == f.mbar == f.nbar == 0
    np.testing.assert_allclose(f.N, [0, 0, 1])


@pytest.mark.parametrize("q", [(0.3, -0.2), (0.1 + 0.4j, 0.5 - 0.1j)])
def test_saddle_forms(q):
    z1, z2 = q
    f = forms_at(SADDLE, q)
    assert f.E == pytest.approx(1 + z2 * z2) and f.F == pytest.approx(z1 * z2) and f.G == pytest.approx(1 + z1 * z1)
    assert f.delta == pytest.approx(1 + z1 * z1 + z2 * z2)
    assert f.mbar == pytest.approx(1) and abs(f.lbar) < 1e-15 and abs(f.nbar) < 1e-15


def test_monge_forms():
    f = forms_at(MONGE23, (0, 0))
    assert (f.E, f.F, f.G) == (1, 0, 1)
    assert f.l == pytest.approx(2) and f.n == pytest.approx(3) and abs(f.m) < 1e-15


@pytest.mark.parametrize("patch", PATCHES)
@pytest.mark.parametrize("q", POINTS)
def test_normal_and_symmetry(patch, q):
    f = forms_at(patch, q)
    J = _surface_jets(patch, q, 3)
    p1 = np.array([x.value for x in J.p1])
    p2 = np.array([x.value for x in J.p2])
    assert abs(inner(f.N, p1)) < 1e-9 and abs(inner(f.N, p2)) < 1e-9 and abs(inner(f.N, f.N) - 1) < 1e-9
    # <nu_z1, phi_z2> = <nu_z2, phi_z1>
    nu1 = np.array([x.diff(0).value for x in J.nu])
    nu2 = np.array([x.diff(1).value for x in J.nu])
    assert abs(inner(nu1, p2) - inner(nu2, p1)) < 1e-9


def test_on_il_withholds_normal():
    f = forms_at(SADDLE, (1j, 0))
    assert f.on_il and f.N is None
    with pytest.raises(IsotropicLocusError):
        shape_at(SADDLE, (1j, 0))


def test_non_regular():
    with pytest.raises(NonRegularSurfaceError):
        forms_at(SurfacePatch(["z1^2", "z2", "z1^3"]), (0, 0.1))


# -- shape operator -----------------------------------------------------------------


def test_shape_examples():
    s = shape_at(MONGE23, (0, 0))
    assert {s.kappa1, s.kappa2} == {2, 3}
    np.testing.assert_allclose(s.e1, [1, 0], atol=1e-15)
    np.testing.assert_allclose(s.e2, [0, 1], atol=1e-15)
    assert s.K == pytest.approx(6) and not s.umbilic
    s = shape_at(SADDLE, (0, 0))
    dirs = sorted(tuple(np.round(np.abs(d), 12)) for d in s.asymptotic_dirs)
    assert dirs == [(0, 1), (1, 0)] and s.K == pytest.approx(-1)


@pytest.mark.parametrize("q", [(0.3, 0.1), (0.5 + 0.2j, -0.4j)])
def test_sphere_is_umbilic(q):
    s = shape_at(SPHERE, q)
    assert s.umbilic
    assert s.kappa1 == pytest.approx(s.kappa2, rel=1e-9)
    assert s.kappa1**2 == pytest.approx(0.25, rel=1e-9) and s.K == pytest.approx(0.25, rel=1e-9)


@pytest.mark.parametrize("patch", PATCHES[1:])
@pytest.mark.parametrize("q", POINTS)
def test_shape_invariants(patch, q):
    f, s = forms_at(patch, q), shape_at(patch, q)
    I = np.array([[f.E, f.F], [f.F, f.G]])
    II = np.array([[f.l, f.m], [f.m, f.n]])
    np.testing.assert_allclose(s.A, np.linalg.solve(I, II), rtol=1e-10, atol=1e-12)
    assert s.kappa1 * s.kappa2 == pytest.approx(s.K, rel=1e-9)
    assert s.K == pytest.approx((f.lbar * f.nbar - f.mbar**2) / f.delta**2, rel=1e-9)
    a2, ab, b2 = s.principal_coeffs
    for e in (s.e1, s.e2):
        lhs = a2 * e[0] ** 2 + ab * e[0] * e[1] + b2 * e[1] ** 2
        assert abs(lhs) < 1e-9 * max(1, abs(a2) + abs(ab) + abs(b2))
    assert abs(s.e1 @ I @ s.e2) < 1e-9


@settings(max_examples=30)
@given(st.integers(0, 3), st.floats(-0.4, 0.4), st.floats(-0.4, 0.4), st.floats(-0.4, 0.4))
def test_branch_swap(k, a, b, c):
    patch, q = PATCHES[k], (complex(a, c), complex(b, 0.1))
    fp = forms_at(patch, q, Branch.PRINCIPAL)
    fo = forms_at(patch, q, Branch.OTHER)
    if fp.on_il:
        return
    sp, so = shape_at(patch, q, Branch.PRINCIPAL), shape_at(patch, q, Branch.OTHER)
    assert so.K == pytest.approx(sp.K, rel=1e-10, abs=1e-12)
    assert so.umbilic == sp.umbilic
    sgn = fo.N @ fp.N  # +-1
    assert abs(abs(sgn) - 1) < 1e-9
    assert fo.l == pytest.approx(sgn * fp.l, rel=1e-10, abs=1e-12)
    assert {complex(np.round(x, 8)) for x in (so.kappa1, so.kappa2)} == {
        complex(np.round(sgn * x, 8)) for x in (sp.kappa1, sp.kappa2)
    }
    if not sp.umbilic:
        cp = focal_at(patch, q, Branch.PRINCIPAL)
        co = focal_at(patch, q, Branch.OTHER)
        # a zero principal curvature puts its focal point at infinity (None)
        assert sum(c is None for c in (cp.c1, cp.c2)) == sum(c is None for c in (co.c1, co.c2))
        got = [c for c in (co.c1, co.c2) if c is not None]
        for c in (cp.c1, cp.c2):
            if c is not None:
                assert min(np.max(np.abs(c - g)) for g in got) < 1e-6 * max(1, np.max(np.abs(c)))


@pytest.mark.parametrize("patch", PATCHES + [SPHERE])
@pytest.mark.parametrize("q", POINTS)
def test_theorema_egregium(patch, q):
    if forms_at(patch, q).on_il:
        pytest.skip("on the isotropic locus")
    assert brioschi_K(patch, q) == pytest.approx(shape_at(patch, q).K, rel=1e-7, abs=1e-9)


def test_equivariance(rng):
    R = random_complex_orthogonal(rng, 3)
    b = rng.normal(size=3) + 1j * rng.normal(size=3)
    q = (0.1 + 0.05j, -0.2)
    for patch in PATCHES[1:]:
        moved = patch.transformed(R, b)
        assert shape_at(moved, q).K == pytest.approx(shape_at(patch, q).K, rel=1e-8)
        fc = focal_at(patch, q)
        for c in (fc.c1, fc.c2):
            assert contact_report(moved, q, Sphere(tuple(R @ c + b))).label == contact_report(patch, q, Sphere(tuple(c))).label


# -- focal set and ridges --------------------------------------------------------------


def test_focal_examples():
    fc = focal_at(MONGE23, (0, 0))
    np.testing.assert_allclose(fc.c1, [0, 0, 0.5], atol=1e-15)
    np.testing.assert_allclose(fc.c2, [0, 0, 1 / 3], atol=1e-15)
    fc = focal_at(SPHERE, (0.3, 0.2j))
    np.testing.assert_allclose(fc.c1, [0, 0, 0], atol=1e-9)
    np.testing.assert_allclose(fc.c2, [0, 0, 0], atol=1e-9)


@pytest.mark.parametrize("q", POINTS)
def test_focal_points_on_normal_line(q):
    f, fc = forms_at(GENERIC, q), focal_at(GENERIC, q)
    phi = np.array(GENERIC(*q))
    for c in (fc.c1, fc.c2):
        w = c - phi
        lam = inner(w, f.N)
        np.testing.assert_allclose(w, lam * f.N, atol=1e-10)


@pytest.mark.parametrize("q", POINTS)
def test_ridge_residual_matches_finite_differences(q):
    s, r = shape_at(GENERIC, q), ridge_residuals(GENERIC, q)
    h = 1e-5
    for e, k, ri in ((s.e1, s.kappa1, r[0]), (s.e2, s.kappa2, r[1])):

        def kap(t):
            ss = shape_at(GENERIC, (q[0] + t * e[0], q[1] + t * e[1]))
            return min((ss.kappa1, ss.kappa2), key=lambda x: abs(x - k))

        assert (kap(h) - kap(-h)) / (2 * h) == pytest.approx(ri, rel=1e-6)


def test_il_extension():
    z1 = 0.3 + 0.2j
    z2 = np.sqrt(-1 - z1 * z1)
    fc = focal_at(SADDLE, (z1, z2))
    il = fc.il_extension
    assert il.on_il and il.extended_focal_point is not None
    assert il.tangency_defect < 1e-6


# -- contact --------------------------------------------------------------------------


def test_plane_contacts():
    assert contact_report(MONGE23, (0, 0), PlaneModel()).label == "A1"
    r = contact_report(SurfacePatch.from_monge("z1^2/2 + z2^3"), (0, 0), PlaneModel())
    assert r.label == "A2" and r.agrees and r.predicates["parabolic"]
    r = contact_report(SurfacePatch.from_monge("z1^2/2 + z1*z2^2"), (0, 0), PlaneModel())
    assert r.label == "A3" and r.agrees
    assert contact_report(MONGE23, (0, 0), PlaneModel((1, 0, 0))).label == "A0"


def test_sphere_contacts():
    r = contact_report(MONGE23, (0, 0), Sphere((0, 0, 0.5)))
    assert r.label == "A3"  # ridge by symmetry
    r = contact_report(GENERIC, (0, 0), Sphere((0, 0, 0.5)))
    assert r.label == "A2" and r.agrees
    r = contact_report(SurfacePatch.from_monge("(z1^2 + z2^2)/2 + (z1^3 - 3*z1*z2^2)/6"), (0, 0), Sphere((0, 0, 1)))
    assert r.label == "D4" and r.agrees and r.predicates["umbilic"]
    assert contact_report(MONGE23, (0, 0), Sphere((0, 0, 0.7))).label == "A1"


@pytest.mark.parametrize("q", POINTS)
def test_focal_ridge_consistency(q):
    fc = focal_at(GENERIC, q)
    for c, r in ((fc.c1, fc.ridge_residuals[0]), (fc.c2, fc.ridge_residuals[1])):
        rep = contact_report(GENERIC, q, Sphere(tuple(c)))
        assert (rep.label in ("A3", "A4", "D4")) == (abs(r) < 1e-8)


def test_projection_contacts():
    r = contact_report(MONGE23, (0, 0), ProjectionModel((0, 0, 1)))
    assert r.label == "regular"
    r = contact_report(MONGE23, (0, 0), ProjectionModel((1, 0, 0)))
    assert r.label == "fold"


# -- Monge families ---------------------------------------------------------------------


def test_monge_families():
    assert monge_family("z1^2 + z2^3", "height").classify(0, 0).label == "A2"
    assert monge_family("(2*z1^2 + 3*z2^2)/2", "distsq").classify(0, 0, 0.5).label == "A3"
    assert monge_family("(2*z1^2 + 3*z2^2)/2 + z1^3", "distsq").classify(0, 0, 0.5).label == "A2"
    fam = monge_family("z1*z2", "projection")
    assert fam.classify(0, 0).verdict == "codim <= 2, unclassified"
    with pytest.raises(NormalizationError):
        monge_family("z1 + z2^2", "height")


# -- loci ------------------------------------------------------------------------------


def test_il_trace_on_imaginary_slice():
    sl = Slice(x_range=(-1.5, 1.5), y_range=(-1.5, 1.5), dir1=1j, dir2=1j)
    tr = trace_locus(SADDLE, "il", sl, n=48)
    assert tr.n_points > 20
    for seg in tr.segments:
        for x, y, z1, z2, res in seg:
            assert abs(x * x + y * y - 1) < 1e-9


def test_plane_parabolic_identically_zero():
    tr = trace_locus(SurfacePatch(["z1", "z2", "0"]), "parabolic", Slice(), n=8)
    assert "identically_zero" in tr.flags and tr.n_points == 0


def test_ridge_trace_through_origin():
    patch = SurfacePatch.from_monge("(2*z1^2 + 3*z2^2)/2 + z2^3")
    assert abs(ridge_residuals(patch, (0, 0))[0]) < 1e-12
    tr = trace_locus(patch, "ridge_1", Slice((-0.3, 0.3), (-0.3, 0.3)), n=31)
    pts = [(x, y) for seg in tr.segments for x, y, *_ in seg]
    assert min(np.hypot(x, y) for x, y in pts) < 1e-2


def test_empty_locus():
    tr = trace_locus(SADDLE, "il", Slice((-1, 1), (-1, 1)), n=16)
    assert tr.n_points == 0 and "empty" in tr.flags


def test_threads_give_same_trace():
    sl = Slice(x_range=(-1.5, 1.5), y_range=(-1.5, 1.5), dir1=1j, dir2=1j)
    a = list(trace_locus(SADDLE, "il", sl, n=24).rows())
    b = list(trace_locus(SADDLE, "il", sl, n=24, threads=4).rows())
    assert a == b
