"""Exact curvature tensors of the model spaces at a base point.

Normalization: the Fubini–Study metric has holomorphic sectional curvature 2
and Ricci curvature ``n + 1``.  All returned metrics are the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch


def _delta(n):
    return np.eye(n)


def fubini_study(n):
    """``R_{i jbar k lbar} = delta_ij delta_kl + delta_il delta_kj``."""
    if n < 1:
        raise DimensionMismatch("n must be at least 1")
    d = _delta(n)
    R = np.einsum("ij,kl->ijkl", d, d) + np.einsum("il,kj->ijkl", d, d)
    return np.eye(n, dtype=complex), R.astype(complex)


def type_I_dual(p, q):
    """Grassmannian ``Gr(p, p+q)``: compact dual of the domain of ``p x q`` matrices.

    Coordinates are matrix entries ``z_{i alpha}`` flattened as ``i * q + alpha``.
    """
    if p < 1 or q < 1:
        raise DimensionMismatch("p and q must be at least 1")
    dp, dq = _delta(p), _delta(q)
    # indices (i a)(j b)(k c)(l d)
    R = np.einsum("ij,kl,ad,cb->iajbkcld", dp, dp, dq, dq) + np.einsum(
        "il,kj,ab,cd->iajbkcld", dp, dp, dq, dq
    )
    n = p * q
    return np.eye(n, dtype=complex), R.reshape(n, n, n, n).astype(complex)


def symmetric_matrix_basis(r):
    """Orthonormal basis of complex symmetric ``r x r`` matrices inside ``C^{r*r}``.

    Diagonal units first, then ``(E_ij + E_ji)/sqrt(2)`` for ``i < j``.
    """
    cols = []
    for i in range(r):
        e = np.zeros((r, r))
        e[i, i] = 1.0
        cols.append(e.ravel())
    for i in range(r):
        for j in range(i + 1, r):
            e = np.zeros((r, r))
            e[i, j] = e[j, i] = 1.0 / np.sqrt(2.0)
            cols.append(e.ravel())
    return np.array(cols).T


def type_III_dual(r):
    """``Sp(r)/U(r)``: restriction of ``type_I_dual(r, r)`` to symmetric matrices."""
    if r < 2:
        raise DimensionMismatch("r must be at least 2")
    _, R = type_I_dual(r, r)
    B = symmetric_matrix_basis(r)
    Rs = np.einsum("ijkl,ia,jb,kc,ld->abcd", R, B, B, B, B, optimize=True)
    m = B.shape[1]
    return np.eye(m, dtype=complex), Rs


def curve_product(k1, k2):
    """Product of two curves with constant curvatures ``k1`` and ``k2``."""
    R = np.zeros((2, 2, 2, 2), dtype=complex)
    R[0, 0, 0, 0] = k1
    R[1, 1, 1, 1] = k2
    return np.eye(2, dtype=complex), R


# ---------------------------------------------------------------------------
# bundle curvature


@dataclass(frozen=True)
class BundleCurvature:
    """``Rh[alpha, beta, i, j] = R^h_{alpha betabar i jbar}`` at a point."""

    Rh: np.ndarray

    def __post_init__(self):
        Rh = np.asarray(self.Rh, dtype=complex)
        if Rh.ndim != 4 or Rh.shape[0] != Rh.shape[1] or Rh.shape[2] != Rh.shape[3]:
            raise DimensionMismatch(f"bundle curvature must be (r, r, n, n), got {Rh.shape}")
        object.__setattr__(self, "Rh", Rh)

    @property
    def rank(self):
        return self.Rh.shape[0]

    @property
    def base_dim(self):
        return self.Rh.shape[2]

    def symmetry_residual(self):
        return float(np.abs(self.Rh - np.conj(self.Rh.transpose(1, 0, 3, 2))).max())

    def det_curvature(self):
        """Curvature form of the determinant line bundle."""
        return np.einsum("aaij->ij", self.Rh)

    def v_slice(self, v):
        """Hermitian form ``R^h_{v vbar i jbar}``."""
        v = np.asarray(v, dtype=complex)
        return np.einsum("abij,a,b->ij", self.Rh, v, v.conj())

    def evaluate(self, v, X):
        """``R^h(v, vbar, X, Xbar)``."""
        X = np.asarray(X, dtype=complex)
        return float(np.einsum("ij,i,j->", self.v_slice(v), X, X.conj()).real)


@dataclass(frozen=True)
class SplitBundleModel:
    """``O(a_1) + ... + O(a_r)`` over ``P^n`` with the standard metrics."""

    n: int
    degrees: tuple

    def __post_init__(self):
        degrees = tuple(int(a) for a in self.degrees)
        if len(degrees) < 1:
            raise DimensionMismatch("need at least one degree")
        if self.n < 1:
            raise DimensionMismatch("base dimension must be at least 1")
        object.__setattr__(self, "degrees", tuple(sorted(degrees, reverse=True)))

    @property
    def rank(self):
        return len(self.degrees)


def split_bundle_curvature(model):
    """``Rh[alpha, beta, i, j] = a_alpha delta_{alpha beta} delta_ij``."""
    a = np.array(model.degrees, dtype=float)
    Rh = np.einsum("ab,ij->abij", np.diag(a), np.eye(model.n))
    return BundleCurvature(Rh)


def pn_tangent_bundle_curvature(n):
    _, R = fubini_study(n)
    # Rh[alpha, beta, i, j] = R_{i jbar alpha betabar}
    return BundleCurvature(R.transpose(2, 3, 0, 1).copy())


def pn_cotangent_bundle_curvature(n):
    tangent = pn_tangent_bundle_curvature(n).Rh
    # dual bundle: R^{E*}_{alpha betabar} = -R^E_{beta alphabar}
    return BundleCurvature(-tangent.transpose(1, 0, 2, 3))
