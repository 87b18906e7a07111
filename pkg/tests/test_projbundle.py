import numpy as np
import pytest

from ricperp import models
from ricperp import projbundle as pb
from ricperp import tensor as kt
from ricperp.certify import CertifyOptions
from ricperp.errors import (
    DimensionMismatch,
    EmptyGrid,
    IndexOutOfRange,
    LambdaTooSmall,
    SymmetryViolation,
    ZeroVector,
)


def random_input(rng, n, r, lam=7.0, derivatives=True):
    A = rng.standard_normal((r, r, n, n)) + 1j * rng.standard_normal((r, r, n, n))
    Rh = 0.5 * (A + A.transpose(1, 0, 3, 2).conj())
    xi = rng.standard_normal(n)
    Rh[0, 0] = np.diag(xi)
    d3 = d4 = None
    if derivatives:
        d3 = rng.standard_normal((r, n, n, n)) + 1j * rng.standard_normal((r, n, n, n))
        d3 = 0.5 * (d3 + d3.transpose(0, 3, 2, 1))
        d4 = kt.random_tensor(n, rng)
    return pb.ProjBundleInput(lam=lam, Rg=kt.random_tensor(n, rng), Rh=models.BundleCurvature(Rh), d3=d3, d4=d4)


def _fs_input(n, r, lam, xi):
    _, fs = models.fubini_study(n)
    Rh = np.zeros((r, r, n, n), dtype=complex)
    Rh[0, 0] = np.diag(xi)
    return pb.ProjBundleInput(lam=lam, Rg=fs, Rh=models.BundleCurvature(Rh))


def test_metric_at_origin():
    G = pb.g_metric_at_origin(_fs_input(2, 3, 5.0, [0.0, 0.0]))
    assert np.array_equal(G, np.diag([5, 5, 1, 1]).astype(complex))
    G = pb.g_metric_at_origin(_fs_input(2, 2, 3.0, [1.0, 2.0]))
    assert np.array_equal(np.diag(G)[:2].real, [2.0, 1.0])
    with pytest.raises(LambdaTooSmall):
        _fs_input(1, 2, 2.0, [3.0])


def test_input_guards(rng):
    Rh = np.zeros((2, 2, 2, 2), dtype=complex)
    Rh[0, 0] = [[1, 0.5], [0.5, 1]]
    _, fs = models.fubini_study(2)
    with pytest.raises(SymmetryViolation):
        pb.ProjBundleInput(lam=5.0, Rg=fs, Rh=models.BundleCurvature(Rh))
    with pytest.raises(DimensionMismatch):
        pb.ProjBundleInput(lam=5.0, Rg=fs, Rh=models.BundleCurvature(np.zeros((2, 2, 3, 3))))
    with pytest.raises(DimensionMismatch):
        pb.ProjBundleInput(lam=5.0, Rg=fs, Rh=models.BundleCurvature(np.zeros((1, 1, 2, 2))))


@pytest.mark.parametrize("n,r", [(1, 2), (2, 2), (2, 3), (3, 4)])
def test_generic_curvature_is_kahler(n, r, rng):
    inp = random_input(rng, n, r)
    R = pb.g_curvature_at_origin(inp)
    assert kt.symmetry_residual(R)[0] < 1e-10


@pytest.mark.parametrize("n,r", [(1, 2), (2, 3), (3, 3)])
def test_vertical_and_mixed_components(n, r, rng):
    inp = random_input(rng, n, r)
    R = pb.g_curvature_coordinates(inp)
    V = slice(n, n + r - 1)
    _, fs = models.fubini_study(r - 1)
    # the fiber block is exactly the Fubini-Study pattern
    assert np.array_equal(R[V, V, V, V], fs)
    # R_{y sbar y sbar} and R_{y sbar s sbar} vanish identically
    H = slice(0, n)
    assert np.array_equal(R[H, V, H, V], np.zeros_like(R[H, V, H, V]))
    assert np.array_equal(R[H, V, V, V], np.zeros_like(R[H, V, V, V]))


@pytest.mark.parametrize("n,r", [(1, 2), (2, 2), (2, 4), (3, 3)])
def test_ricci_split_matches_contraction(n, r, rng):
    inp = random_input(rng, n, r)
    ric = pb.ricci_from_tensor(inp)
    ys, ss, yy = pb.ricci_split(inp)
    assert np.abs(ric[n:, n:] - ss).max() < 1e-9
    assert np.abs(ric[:n, :n] - yy).max() < 1e-9
    assert np.abs(ric[:n, n:] - ys).max() < 1e-9


def test_ricci_split_degenerate_cases():
    # zero bundle curvature on a flat base: R_{s sbar} = r |s|^2
    n, r = 2, 3
    inp = pb.ProjBundleInput(lam=4.0, Rg=np.zeros((n,) * 4), Rh=models.BundleCurvature(np.zeros((r, r, n, n))))
    ys, ss, yy = pb.ricci_split(inp)
    assert np.allclose(ss, r * np.eye(r - 1))
    assert np.allclose(ys, 0.0)
    # split bundle at a coordinate point, d3 = 0: no mixed Ricci
    model = models.SplitBundleModel(3, (0, 0, -1))
    inp = pb.split_bundle_input(model, 50.0, np.array([0, 0, 1.0]))
    ys, ss, _ = pb.ricci_split(inp)
    assert np.allclose(ys, 0.0)
    ric = pb.ricci_from_tensor(inp)
    assert np.abs(ric[3:, 3:] - ss).max() < 1e-9


@pytest.mark.parametrize("n,r", [(1, 2), (2, 3), (3, 2)])
def test_phi_piece_sum(n, r, rng):
    inp = random_input(rng, n, r)
    for _ in range(50):
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        s = rng.standard_normal(r - 1) + 1j * rng.standard_normal(r - 1)
        b = pb.phi(inp, pb.TangentSplit(y, s))
        assert abs(b.phi - b.piece_sum) <= 1e-9 * max(1.0, abs(b.phi))


def test_phi_pure_vertical(rng):
    inp = random_input(rng, 2, 3, lam=1e4, derivatives=False)
    s = np.array([1.0, 0.5j])
    b = pb.phi(inp, pb.TangentSplit(np.zeros(2), s))
    s2 = float(np.vdot(s, s).real)
    assert b.phi0 == 0 and b.phi2 == 0
    # ((r - 2) + O(eps)) |s|^4
    assert b.phi4 / s2**2 == pytest.approx(1.0, abs=1e-2)
    with pytest.raises(ZeroVector):
        pb.TangentSplit(np.zeros(2), np.zeros(2))


def test_equal_degrees_give_product_metric():
    # P(O(a)^r) = P^n x P^{r-1} with the product of scaled Fubini-Study metrics
    for n, r, a, lam in ((2, 3, 1, 5.0), (3, 2, -2, 7.0), (1, 3, 0, 2.0)):
        inp = pb.split_bundle_input(models.SplitBundleModel(n, (a,) * r), lam)
        R = pb.g_curvature_at_origin(inp)
        _, fs_n = models.fubini_study(n)
        _, fs_f = models.fubini_study(r - 1)
        expected, _ = kt.product_tensor(fs_n / (lam - a), None, fs_f, None)
        assert np.abs(R - expected).max() < 1e-12


def test_adapted_frame_at_general_fiber_point(rng):
    model = models.SplitBundleModel(2, (1, 0, -1))
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    inp = pb.split_bundle_input(model, 6.0, v)
    w = np.abs(v) ** 2 / np.sum(np.abs(v) ** 2)
    assert np.allclose(inp.xi, np.dot(w, [1, 0, -1]))
    assert kt.symmetry_residual(pb.g_curvature_at_origin(inp))[0] < 1e-10


def test_condition_margin_examples():
    _, fs = models.fubini_study(3)
    for degrees, expected in (((0, 0, -1), 1), ((2, 0, 0), -2), ((1, 1, 1), 2)):
        model = models.SplitBundleModel(3, degrees)
        res = pb.condition_margin(fs, models.split_bundle_curvature(model), model=model)
        assert res.closed_form == expected
        assert res.margin == pytest.approx(expected, abs=1e-6)


def test_condition_margin_shift_invariance():
    for degrees in ((0, 0, -1), (3, 1, 0, 0), (2, -1)):
        a = models.SplitBundleModel(3, degrees)
        b = models.SplitBundleModel(3, tuple(x + 5 for x in degrees))
        assert pb.split_margin_closed_form(a) == pb.split_margin_closed_form(b)


def test_condition_margin_dimension_check():
    _, fs = models.fubini_study(2)
    with pytest.raises(DimensionMismatch):
        pb.condition_margin(fs, models.split_bundle_curvature(models.SplitBundleModel(3, (0, 0))))


def test_cotangent_bundle_margin():
    # Omega_{P^n}: min over v, X of n - 2 + n |<v, X>|^2 is n - 2
    n = 3
    _, fs = models.fubini_study(n)
    res = pb.condition_margin(fs, models.pn_cotangent_bundle_curvature(n), samples=128)
    assert res.margin == pytest.approx(n - 2, abs=1e-6)


def test_lambda_search_small():
    opts = CertifyOptions(restarts=16, max_iters=300)
    rep = pb.min_lambda_search(models.SplitBundleModel(3, (0, 0, -1)), [5.0, 20.0], opts, fiber_extra=1)
    assert rep.first_positive == 5.0 and rep.stays_positive
    rep = pb.min_lambda_search(models.SplitBundleModel(1, (1, 0)), [5.0, 50.0], opts, fiber_extra=1)
    assert rep.first_positive is None
    assert all(p.vertical_min <= 1e-9 for p in rep.points)
    with pytest.raises(EmptyGrid):
        pb.min_lambda_search(models.SplitBundleModel(1, (1, 0)), [], opts)
    with pytest.raises(ValueError):
        pb.min_lambda_search(models.SplitBundleModel(1, (1, 0)), [5.0, 4.0], opts)


def test_lambda_search_single_point_input():
    inp = _fs_input(2, 3, 5.0, [0.0, 0.0])
    rep = pb.min_lambda_search(inp, [5.0, 10.0], CertifyOptions(restarts=8, max_iters=200))
    assert [p.lam for p in rep.points] == [5.0, 10.0]


def test_integer_helpers():
    assert pb.section_normal_c1(3, (1, 0, 0), 1) == 2
    assert pb.section_normal_c1(3, (1, 0, 0), 1, in_total_space=True) == 3
    assert all(pb.section_normal_c1(4, (2,) * 4, i) == 0 for i in range(1, 5))
    with pytest.raises(IndexOutOfRange):
        pb.section_normal_c1(3, (1, 0, 0), 4)
    with pytest.raises(DimensionMismatch):
        pb.section_normal_c1(3, (1, 0), 1)
    assert not pb.rational_curve_bound(2, 0)
    assert pb.rational_curve_bound(3, 0)
    assert pb.rational_curve_bound(0, 2)
    with pytest.raises(ValueError):
        pb.rational_curve_bound(1, -1)


def test_condition_gradient_matches_finite_differences(rng):
    n, r = 3, 2
    A = rng.standard_normal((r, r, n, n)) + 1j * rng.standard_normal((r, r, n, n))
    Rh = 0.5 * (A + A.transpose(1, 0, 3, 2).conj())
    form = pb._ConditionForm(kt.random_tensor(n, rng), models.BundleCurvature(Rh))
    v = rng.standard_normal(r) + 1j * rng.standard_normal(r)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    f, gv, gx = form.value_and_grad(v, x)
    assert f == pytest.approx(form(v[None], x[None])[0], abs=1e-12)
    h = 1e-6
    for vec, grad, first in ((v, gv, True), (x, gx, False)):
        for k in range(vec.size):
            for unit, part in ((1.0, grad[k].real), (1j, grad[k].imag)):
                d = np.zeros(vec.size, dtype=complex)
                d[k] = unit * h
                if first:
                    fd = form((v + d)[None], x[None])[0] - form((v - d)[None], x[None])[0]
                else:
                    fd = form(v[None], (x + d)[None])[0] - form(v[None], (x - d)[None])[0]
                assert fd / (2 * h) == pytest.approx(part, abs=1e-6)
