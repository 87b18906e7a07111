"""Pointwise Kähler curvature algebra.

A curvature tensor is a complex array ``R`` of shape ``(n, n, n, n)`` with
``R[i, j, k, l]`` holding the component :math:`R_{i\\bar j k \\bar l}`.
A Hermitian form (metric, Ricci form) is an ``(n, n)`` array with
``g[i, j] = g_{i\\bar j}``.  Directions are complex vectors of length ``n``.

Every function accepts an optional metric ``g``; ``None`` means the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .errors import (
    DimensionMismatch,
    NonFinite,
    NonUnitaryFrame,
    SingularMetric,
    SymmetryViolation,
    ZeroVector,
)

VALIDATION_TOL = 1e-9
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10


# ---------------------------------------------------------------------------
# validation


def symmetry_residual(R):
    """Largest violation of the Kähler curvature symmetries.

    Returns ``(residual, index, kind)`` where ``index`` is the offending
    quadruple ``(i, j, k, l)`` and ``kind`` names the broken symmetry.
    """
    R = np.asarray(R)
    checks = {
        "conjugate symmetry": np.abs(R - np.conj(R.transpose(1, 0, 3, 2))),
        "swap of unbarred slots": np.abs(R - R.transpose(2, 1, 0, 3)),
        "swap of barred slots": np.abs(R - R.transpose(0, 3, 2, 1)),
    }
    worst = (0.0, (0, 0, 0, 0), "none")
    for kind, diff in checks.items():
        if diff.size == 0:
            continue
        flat = int(np.argmax(diff))
        value = float(diff.flat[flat])
        if value > worst[0]:
            worst = (value, np.unravel_index(flat, diff.shape), kind)
    return worst


def validate_tensor(raw, tol=VALIDATION_TOL):
    """Check a raw ``n**4`` array and return it as a read-only complex tensor.

    Raises :class:`SymmetryViolation` carrying the residual and the index
    quadruple where it occurs, or :class:`NonFinite`.
    """
    R = np.array(raw, dtype=complex)
    if R.ndim != 4 or len(set(R.shape)) != 1 or R.shape[0] < 1:
        raise DimensionMismatch(f"expected an n x n x n x n array, got shape {R.shape}")
    if not np.all(np.isfinite(R)):
        raise NonFinite("curvature tensor contains NaN or Inf")
    residual, index, kind = symmetry_residual(R)
    if residual > tol:
        raise SymmetryViolation(residual, index, kind)
    R.setflags(write=False)
    return R


def validate_hermitian(A, tol=HERMITIAN_TOL):
    A = np.array(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFinite("Hermitian form contains NaN or Inf")
    diff = np.abs(A - A.conj().T)
    if diff.size and diff.max() > tol:
        flat = int(np.argmax(diff))
        raise SymmetryViolation(diff.flat[flat], np.unravel_index(flat, diff.shape), "hermitian")
    return A


def symmetrize(raw):
    """Project an arbitrary ``n**4`` array onto Kähler curvature tensors."""
    R = np.asarray(raw, dtype=complex)
    R = 0.5 * (R + R.transpose(2, 1, 0, 3))
    R = 0.5 * (R + R.transpose(0, 3, 2, 1))
    return 0.5 * (R + np.conj(R.transpose(1, 0, 3, 2)))


def random_tensor(n, rng, scale=1.0):
    """Random Kähler curvature tensor (symmetrized complex Gaussian)."""
    raw = rng.standard_normal((n,) * 4) + 1j * rng.standard_normal((n,) * 4)
    return symmetrize(scale * raw)


def _metric(g, n):
    if g is None:
        return np.eye(n, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if g.shape != (n, n):
        raise DimensionMismatch(f"metric has shape {g.shape}, tensor dimension is {n}")
    return g


def _dim(R):
    R = np.asarray(R)
    if R.ndim != 4:
        raise DimensionMismatch(f"expected a rank-4 tensor, got shape {R.shape}")
    return R.shape[0]


def orthonormal_frame(g):
    """Matrix ``T`` whose columns form a ``g``-orthonormal frame.

    ``g = L L^H`` (Cholesky) and ``T = L^{-T}``, so that ``T^T g conj(T) = I``.
    Components of a vector transform as ``x' = L^T x``.
    """
    g = np.asarray(g, dtype=complex)
    try:
        L = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetric("metric is not positive definite") from exc
    return np.linalg.inv(L).T, L


def to_orthonormal(R, g=None):
    """Express ``R`` in a ``g``-orthonormal frame."""
    n = _dim(R)
    if g is None:
        return np.asarray(R, dtype=complex)
    T, _ = orthonormal_frame(_metric(g, n))
    Tc = T.conj()
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", R, T, Tc, T, Tc, optimize=True)


def direction_to_orthonormal(X, g=None):
    X = np.asarray(X, dtype=complex)
    if g is None:
        return X
    _, L = orthonormal_frame(g)
    return L.T @ X


# ---------------------------------------------------------------------------
# contractions


def evaluate(R, X, Y, Z, W):
    """``R(X, conj Y, Z, conj W)``."""
    return np.einsum("ijkl,i,j,k,l->", R, X, np.conj(Y), Z, np.conj(W), optimize=True)


def norm2(X, g=None):
    X = np.asarray(X, dtype=complex)
    if g is None:
        return float(np.vdot(X, X).real)
    return float(np.einsum("ij,i,j->", g, X, X.conj()).real)


def ricci(R, g=None):
    """Ricci form ``Ric_{i jbar} = sum_{k,l} g^{l kbar} R_{i jbar k lbar}``."""
    n = _dim(R)
    g = _metric(g, n)
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetric("metric is singular") from exc
    if not np.all(np.isfinite(ginv)):
        raise SingularMetric("metric is singular")
    ric = np.einsum("ijkl,lk->ij", R, ginv)
    return 0.5 * (ric + ric.conj().T)


def scalar_curvature(R, g=None):
    n = _dim(R)
    g = _metric(g, n)
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetric("metric is singular") from exc
    return float(np.einsum("ij,ji->", ricci(R, g), ginv).real)


def scale_tensor(R, c):
    return np.asarray(R, dtype=complex) * c


def _nonzero(X, g):
    n2 = norm2(X, g)
    if not n2 > 0.0:
        raise ZeroVector("direction must be non-zero")
    return n2


def holo_sect(R, X, g=None):
    """Holomorphic sectional curvature ``R(X, Xbar, X, Xbar) / |X|^4``."""
    X = np.asarray(X, dtype=complex)
    n = _dim(R)
    if X.shape != (n,):
        raise DimensionMismatch(f"direction has shape {X.shape}, expected ({n},)")
    n2 = _nonzero(X, _metric(g, n) if g is not None else None)
    return float(evaluate(R, X, X, X, X).real) / n2**2


def ric_perp(R, X, g=None):
    """Orthogonal Ricci curvature of the unit direction ``X / |X|``."""
    X = np.asarray(X, dtype=complex)
    n = _dim(R)
    if X.shape != (n,):
        raise DimensionMismatch(f"direction has shape {X.shape}, expected ({n},)")
    gm = _metric(g, n) if g is not None else None
    n2 = _nonzero(X, gm)
    ric = ricci(R, gm)
    ric_xx = float(np.einsum("ij,i,j->", ric, X, X.conj()).real)
    return ric_xx / n2 - holo_sect(R, X, gm)


# ---------------------------------------------------------------------------
# quadratic bisectional curvature


@dataclass(frozen=True)
class FrameAndWeights:
    """Unitary frame (columns of ``U``) together with real weights ``a``."""

    U: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.U, dtype=complex)
        a = np.asarray(self.a, dtype=float)
        if U.ndim != 2 or U.shape[0] != U.shape[1] or a.shape != (U.shape[0],):
            raise DimensionMismatch("frame must be n x n and weights of length n")
        defect = np.abs(U.conj().T @ U - np.eye(U.shape[0])).max()
        if defect > UNITARY_TOL:
            raise NonUnitaryFrame(f"U^H U deviates from identity by {defect:.3e}")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "a", a)


def rotate(R, U):
    """Components of ``R`` in the frame given by the columns of ``U``."""
    Uc = np.conj(U)
    return np.einsum("pqst,pi,qj,sk,tl->ijkl", R, U, Uc, U, Uc, optimize=True)


def bisectional_matrix(R, U=None):
    """``B[i, j] = R_{i ibar j jbar}`` in the frame ``U`` (identity by default)."""
    if U is not None:
        Uc = np.conj(U)
        B = np.einsum("pqst,pi,qi,sj,tj->ij", R, U, Uc, U, Uc, optimize=True)
    else:
        B = np.einsum("iijj->ij", np.asarray(R))
    return B.real


def qb_form(R, frame, g=None):
    """``sum_{i,j} R_{i ibar j jbar} (a_i - a_j)^2`` in the given unitary frame.

    With ``g`` supplied, the frame is understood in ``g``-orthonormal
    coordinates.
    """
    Rn = to_orthonormal(R, g)
    if frame.U.shape[0] != Rn.shape[0]:
        raise DimensionMismatch("frame and tensor dimensions differ")
    B = bisectional_matrix(Rn, frame.U)
    a = frame.a
    return float(np.sum(B * (a[:, None] - a[None, :]) ** 2))


# ---------------------------------------------------------------------------
# curvature operator on symmetric 2-tensors


def sym2_basis(n):
    """Index pairs ``i <= j`` and the coefficients making the basis orthonormal."""
    pairs = list(combinations_with_replacement(range(n), 2))
    coef = np.array([1.0 if i == j else np.sqrt(2.0) for i, j in pairs])
    return pairs, coef


def q_operator(R, g=None):
    """Matrix of the operator ``Q`` on ``S^2 T`` in an orthonormal basis.

    ``(Q(X.Y), Z.W) = R_{X Zbar Y Wbar}``; the basis is ``e_i.e_i`` and
    ``sqrt(2) e_i.e_j`` for ``i < j``.
    """
    Rn = to_orthonormal(R, g)
    n = Rn.shape[0]
    pairs, coef = sym2_basis(n)
    idx = np.array(pairs, dtype=int).reshape(-1, 2)
    i, j = idx[:, 0], idx[:, 1]
    # M[A, B] = c_A c_B R[k, i, l, j] with A = (i, j), B = (k, l)
    M = Rn[i[None, :], i[:, None], j[None, :], j[:, None]]
    M = M * coef[:, None] * coef[None, :]
    return 0.5 * (M + M.conj().T)


def nu_max(R, g=None):
    """Largest eigenvalue of :func:`q_operator`."""
    return float(np.linalg.eigvalsh(q_operator(R, g))[-1])


# ---------------------------------------------------------------------------
# constructions


def ric_operator_tensor(ric, g=None):
    """Kähler curvature tensor with ``T(X, Xbar, X, Xbar) = Ric(X, Xbar) |X|^2``.

    ``T_{i jbar k lbar} = (Ric_{i jbar} g_{k lbar} + Ric_{k lbar} g_{i jbar}
    + Ric_{i lbar} g_{k jbar} + Ric_{k jbar} g_{i lbar}) / 4``.
    """
    ric = np.asarray(ric, dtype=complex)
    if ric.ndim != 2 or ric.shape[0] != ric.shape[1]:
        raise DimensionMismatch("Ricci form must be square")
    g = _metric(g, ric.shape[0])
    return 0.25 * (
        np.einsum("ij,kl->ijkl", ric, g)
        + np.einsum("kl,ij->ijkl", ric, g)
        + np.einsum("il,kj->ijkl", ric, g)
        + np.einsum("kj,il->ijkl", ric, g)
    )


def product_tensor(R1, g1, R2, g2):
    """Curvature and metric of a Riemannian product (block direct sum)."""
    n1, n2 = _dim(R1), _dim(R2)
    g1, g2 = _metric(g1, n1), _metric(g2, n2)
    n = n1 + n2
    R = np.zeros((n,) * 4, dtype=complex)
    R[:n1, :n1, :n1, :n1] = R1
    R[n1:, n1:, n1:, n1:] = R2
    g = np.zeros((n, n), dtype=complex)
    g[:n1, :n1] = g1
    g[n1:, n1:] = g2
    return R, g
