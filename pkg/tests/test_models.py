import numpy as np
import pytest

from ricperp import models
from ricperp import tensor as kt
from ricperp.errors import DimensionMismatch

from conftest import random_unit


def _rho(A):
    return float(np.sum(np.abs(A) ** 2))


@pytest.mark.parametrize("p,q", [(1, 1), (1, 3), (2, 2), (2, 3), (3, 2)])
def test_grassmannian_ricci(p, q):
    g, R = models.type_I_dual(p, q)
    assert kt.symmetry_residual(R)[0] == 0.0
    assert np.array_equal(kt.ricci(R, g), (p + q) * np.eye(p * q))


def test_type_I_rank_one_and_diagonal_directions():
    _, R = models.type_I_dual(2, 2)
    X = np.zeros((2, 2), dtype=complex)
    X[0, 1] = 1.0
    assert kt.holo_sect(R, X.ravel()) == pytest.approx(2.0)
    D = np.eye(2) / np.sqrt(2)
    assert kt.holo_sect(R, D.ravel()) == pytest.approx(1.0)


def test_type_I_holo_sect_matches_matrix_formula(rng):
    p, q = 2, 3
    _, R = models.type_I_dual(p, q)
    for _ in range(20):
        X = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
        expected = (_rho(X @ X.conj().T) + _rho(X.T @ X.conj())) / _rho(X) ** 2
        assert kt.holo_sect(R, X.ravel()) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("r", [2, 3, 4])
def test_type_III_ricci_and_bound(r, rng):
    g, R = models.type_III_dual(r)
    m = r * (r + 1) // 2
    assert R.shape == (m,) * 4
    assert kt.symmetry_residual(R)[0] < 1e-15
    assert np.allclose(kt.ricci(R, g), (r + 1) * np.eye(m))
    H = [kt.holo_sect(R, x) for x in random_unit(rng, m, 200)]
    assert max(H) <= 2.0 + 1e-12


def test_type_III_q_spectrum():
    # eigenvalue 2 on the top irreducible piece, -1 on the remaining one
    _, R = models.type_III_dual(3)
    w = np.linalg.eigvalsh(kt.q_operator(R))
    assert np.allclose(w[:6], -1.0) and np.allclose(w[6:], 2.0)
    assert kt.nu_max(R) == pytest.approx(2.0, abs=1e-12)


def test_symmetric_basis_orthonormal():
    B = models.symmetric_matrix_basis(4)
    assert np.allclose(B.T @ B, np.eye(10))


def test_curve_product():
    g, R = models.curve_product(1, -1)
    assert np.array_equal(kt.ricci(R, g), np.diag([1.0, -1.0]))
    assert kt.ric_perp(R, np.array([1.0, 1.0])) == pytest.approx(0.0)


def test_constructor_guards():
    with pytest.raises(DimensionMismatch):
        models.fubini_study(0)
    with pytest.raises(DimensionMismatch):
        models.type_III_dual(1)
    with pytest.raises(DimensionMismatch):
        models.SplitBundleModel(0, (1,))


def test_split_model_sorting_and_curvature():
    m = models.SplitBundleModel(3, (0, -1, 2))
    assert m.degrees == (2, 0, -1)
    b = models.split_bundle_curvature(m)
    assert b.rank == 3 and b.base_dim == 3
    assert np.allclose(b.det_curvature(), np.eye(3))
    assert b.evaluate(np.array([1, 0, 0]), np.array([0, 1, 0])) == 2.0


def test_tangent_and_cotangent_bundles(rng):
    n = 3
    T = models.pn_tangent_bundle_curvature(n)
    C = models.pn_cotangent_bundle_curvature(n)
    assert T.symmetry_residual() == 0.0 and C.symmetry_residual() == 0.0
    # det T P^n = O(n+1)
    assert np.allclose(T.det_curvature(), (n + 1) * np.eye(n))
    assert np.allclose(C.det_curvature(), -(n + 1) * np.eye(n))
    v, X = random_unit(rng, n), random_unit(rng, n)
    _, fs = models.fubini_study(n)
    assert T.evaluate(v, X) == pytest.approx(kt.evaluate(fs, X, X, v, v).real)
    # dual curvature is minus the transpose
    assert C.evaluate(v, X) == pytest.approx(-T.evaluate(v.conj(), X))
