"""Numerical extremization of Ric^perp, H and QB with random restarts.

The direction search runs batched Riemannian gradient descent on the unit
sphere of the orthonormal coordinates.  All functionals are invariant under
``X -> e^{i t} X``, so no projective chart is needed.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import tensor as kt
from .errors import DimensionMismatch

VERDICT_TOL = 1e-6
ARMIJO_C = 1e-4
MAX_BACKTRACK = 50
CHUNK = 8


@dataclass(frozen=True)
class CertifyOptions:
    restarts: int = 64
    max_iters: int = 500
    step_tol: float = 1e-10
    seed: int = 0
    grid_oracle: bool = False

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass
class PositivityReport:
    quantity: str
    value: float
    witness: object
    verdict: str
    margin: float
    method: dict = field(default_factory=dict)

    def to_dict(self):
        w = self.witness
        if isinstance(w, kt.FrameAndWeights):
            w = {"U": w.U, "a": w.a}
        return {
            "quantity": self.quantity,
            "value": self.value,
            "witness": w,
            "verdict": self.verdict,
            "margin": self.margin,
            "method": self.method,
        }


def verdict_for(value, tol=VERDICT_TOL):
    if value > tol:
        return "positive"
    if value >= -tol:
        return "nonnegative_boundary"
    return "fails"


def _workers():
    try:
        return max(1, int(os.environ.get("RICPERP_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# sphere descent


class _Functional:
    """``f(x) = sign * (Ric(x, xbar) - c R(x, xbar, x, xbar))`` on unit ``x``.

    ``c = 1`` gives ``Ric^perp``; ``ric = 0`` with ``c = -1`` gives ``H``.
    """

    def __init__(self, ric, R, c=1.0, sign=1.0):
        self.ric = np.asarray(ric, dtype=complex)
        self.R = np.asarray(R, dtype=complex)
        n = self.R.shape[0]
        # M[(i, k), (j, l)] = R[i, j, k, l]
        self.M = self.R.transpose(0, 2, 1, 3).reshape(n * n, n * n)
        self.c = c
        self.sign = sign

    def _pairs(self, X):
        return (X[:, :, None] * X[:, None, :]).reshape(X.shape[0], -1)

    def value(self, X):
        quad = np.einsum("ij,bi,bj->b", self.ric, X, X.conj()).real
        u = self._pairs(X)
        quart = np.einsum("bp,bp->b", u @ self.M, u.conj()).real
        return self.sign * (quad - self.c * quart)

    def wirtinger(self, X):
        """``d f / d xbar`` for each row of ``X``."""
        n = X.shape[1]
        dquad = X @ self.ric
        W = (self._pairs(X) @ self.M).reshape(-1, n, n)
        dquart = 2.0 * np.einsum("bjl,bl->bj", W, X.conj())
        return self.sign * (dquad - self.c * dquart)


def _normalize(X):
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _sphere_descent(fn, X0, max_iters, step_tol):
    """Minimize ``fn`` from every row of ``X0``; returns ``(X, f, converged, iters)``."""
    X = _normalize(np.array(X0, dtype=complex))
    B = X.shape[0]
    f = fn.value(X)
    t = np.full(B, 0.1)
    converged = np.zeros(B, dtype=bool)
    iters = np.zeros(B, dtype=int)
    prev_X = prev_G = None
    for it in range(max_iters):
        active = ~converged
        if not active.any():
            break
        G = 2.0 * fn.wirtinger(X)
        G = G - np.sum((X.conj() * G).real, axis=1, keepdims=True) * X
        gnorm2 = np.sum(np.abs(G) ** 2, axis=1)
        if prev_G is not None:
            s = X - prev_X
            yv = G - prev_G
            sy = np.sum((s.conj() * yv).real, axis=1)
            ss = np.sum(np.abs(s) ** 2, axis=1)
            bb = np.where(sy > 1e-300, ss / np.where(sy > 1e-300, sy, 1.0), 2.0 * t)
            t = np.clip(bb, 1e-8, 10.0)
        step = t.copy()
        accepted = ~active.copy()
        X_new = X.copy()
        f_new = f.copy()
        for _ in range(MAX_BACKTRACK):
            todo = ~accepted
            if not todo.any():
                break
            cand = _normalize(X[todo] - step[todo, None] * G[todo])
            fc = fn.value(cand)
            ok = fc <= f[todo] - ARMIJO_C * step[todo] * gnorm2[todo]
            idx = np.flatnonzero(todo)
            X_new[idx[ok]] = cand[ok]
            f_new[idx[ok]] = fc[ok]
            accepted[idx[ok]] = True
            step[idx[~ok]] *= 0.5
        moved = np.linalg.norm(X_new - X, axis=1)
        stuck = ~accepted
        iters[active] = it + 1
        prev_X, prev_G = X, G
        X = np.where(accepted[:, None], X_new, X)
        f = np.where(accepted, f_new, f)
        t = step
        converged |= active & (stuck | (moved < step_tol) | (gnorm2 < step_tol**2))
    return X, f, converged, iters


def _starts(n, restarts, seed):
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    k = min(n, restarts // 4)
    basis = np.eye(n, dtype=complex)[:k]
    m = restarts - k
    Z = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    return np.vstack([basis, Z]) if k else Z


def _canonical_phase(x):
    k = int(np.argmax(np.abs(x) > np.abs(x).max() * (1 - 1e-12)))
    return x * (abs(x[k]) / x[k])


def _run_restarts(fn, n, opts):
    X0 = _starts(n, opts.restarts, opts.seed)
    # chunking is fixed so that results do not depend on the worker count
    idx = np.arange(X0.shape[0])
    chunks = [idx[k:k + CHUNK] for k in range(0, idx.size, CHUNK)]

    def job(rows):
        return _sphere_descent(fn, X0[rows], opts.max_iters, opts.step_tol)

    with ThreadPoolExecutor(max_workers=min(_workers(), len(chunks))) as ex:
        parts = list(ex.map(job, chunks))
    X = np.vstack([p[0] for p in parts])
    f = np.concatenate([p[1] for p in parts])
    conv = np.concatenate([p[2] for p in parts])
    iters = np.concatenate([p[3] for p in parts])
    best = int(np.argmin(f))  # lowest restart index on ties
    return X, f, conv, iters, best


def _check_dim(R, g):
    R = np.asarray(R, dtype=complex)
    if R.ndim != 4:
        raise DimensionMismatch("expected a rank-4 tensor")
    n = R.shape[0]
    if g is not None and np.asarray(g).shape != (n, n):
        raise DimensionMismatch("metric and tensor dimensions differ")
    return R, n


def _direction_report(quantity, R, g, opts, fn, evaluate, sign, subspace=None):
    n = fn.R.shape[0]
    X, f, conv, iters, best = _run_restarts(fn, n, opts)
    x = _canonical_phase(X[best])
    if subspace is not None:
        x = subspace @ x
    if g is not None:
        T, _ = kt.orthonormal_frame(np.asarray(g, dtype=complex))
        x = T @ x
    x = x / np.sqrt(kt.norm2(x, g))
    value = evaluate(R, x, g)
    method = {
        "seed": opts.seed,
        "restarts": opts.restarts,
        "converged": bool(conv[best]),
        "converged_count": int(conv.sum()),
        "iterations": int(iters[best]),
    }
    if opts.grid_oracle and subspace is None and n <= 3:
        oracle = grid_extremum(R, g, quantity)
        method["oracle"] = oracle
        method["oracle_agrees"] = bool(abs(oracle - value) <= 1e-4)
    margin = value if sign > 0 else -value
    return PositivityReport(quantity, float(value), list(x), verdict_for(margin), float(margin), method)


def min_ric_perp(R, g=None, opts=None, subspace=None):
    """Minimum of ``Ric^perp`` over unit directions.

    ``subspace`` (orthonormal columns, in ``g``-orthonormal coordinates)
    restricts the search to directions in its span.
    """
    opts = opts or CertifyOptions()
    R, n = _check_dim(R, g)
    Rn = kt.to_orthonormal(R, g)
    ric = kt.ricci(Rn)
    if subspace is not None:
        B = np.asarray(subspace, dtype=complex)
        Rs = kt.rotate(Rn, B)
        rics = B.T @ ric @ B.conj()
        fn = _Functional(rics, Rs, 1.0, 1.0)
    else:
        fn = _Functional(ric, Rn, 1.0, 1.0)
    return _direction_report("ric_perp_min", R, g, opts, fn, kt.ric_perp, 1, subspace)


def max_holo_sect(R, g=None, opts=None):
    """Maximum of ``H`` over unit directions; ``margin`` is ``nu - max H``."""
    opts = opts or CertifyOptions()
    R, n = _check_dim(R, g)
    Rn = kt.to_orthonormal(R, g)
    fn = _Functional(np.zeros((n, n)), Rn, -1.0, -1.0)
    rep = _direction_report("H_max", R, g, opts, fn, kt.holo_sect, -1)
    nu = kt.nu_max(Rn)
    rep.margin = float(nu - rep.value)
    rep.verdict = verdict_for(rep.margin)
    rep.method["nu_max"] = nu
    return rep


# ---------------------------------------------------------------------------
# dense grid oracle (n <= 3)


def _sphere_points(A, n):
    """Unit vectors from rows of sphere parameters (``n`` = 2 or 3)."""
    A = np.atleast_2d(A)
    if n == 2:
        th, ph = A[:, 0], A[:, 1]
        return np.stack([np.cos(th) + 0j, np.sin(th) * np.exp(1j * ph)], axis=1)
    t1, t2, p1, p2 = A.T
    return np.stack(
        [
            np.cos(t1) + 0j,
            np.sin(t1) * np.cos(t2) * np.exp(1j * p1),
            np.sin(t1) * np.sin(t2) * np.exp(1j * p2),
        ],
        axis=1,
    )


def grid_extremum(R, g, quantity, step=0.02):
    """Brute-force extremum on a grid of sphere parameters (``n <= 3``).

    The best grid cells are polished with Nelder-Mead. For ``n = 3`` the grid
    step is ten times coarser.
    """
    R, n = _check_dim(R, g)
    if n > 3:
        raise DimensionMismatch("grid oracle only for n <= 3")
    Rn = kt.to_orthonormal(R, g)
    if quantity == "H_max":
        fn = _Functional(np.zeros((n, n)), Rn, -1.0, -1.0)
        sign = -1.0
    else:
        fn = _Functional(kt.ricci(Rn), Rn, 1.0, 1.0)
        sign = 1.0
    if n == 1:
        return float(sign * fn.value(np.ones((1, 1), dtype=complex))[0])
    if n == 2:
        th = np.arange(0.0, np.pi / 2 + step / 2, step)
        ph = np.arange(0.0, 2 * np.pi, step)
        pts = np.stack(np.meshgrid(th, ph, indexing="ij"), axis=-1).reshape(-1, 2)
    else:
        coarse = 10 * step
        t = np.arange(0.0, np.pi / 2 + coarse / 2, coarse)
        p = np.arange(0.0, 2 * np.pi, coarse)
        pts = np.stack(np.meshgrid(t, t, p, p, indexing="ij"), axis=-1).reshape(-1, 4)
    vals = fn.value(_sphere_points(pts, n))
    best = float(vals.min())
    for k in np.argsort(vals, kind="stable")[:10]:
        res = minimize(
            lambda a: float(fn.value(_sphere_points(a, n))[0]),
            pts[k],
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000},
        )
        best = min(best, float(res.fun))
    return float(sign * best)


# ---------------------------------------------------------------------------
# quadratic bisectional curvature


def _qb_weights(B):
    """Smallest value of ``2 a^T (D - B) a`` over unit ``a`` with ``sum a = 0``."""
    n = B.shape[0]
    Bs = 0.5 * (B + B.T)
    L = 2.0 * (np.diag(Bs.sum(axis=1)) - Bs)
    # orthonormal basis of the complement of (1, ..., 1)
    Q, _ = np.linalg.qr(np.hstack([np.ones((n, 1)), np.eye(n)[:, : n - 1]]))
    P = Q[:, 1:]
    w, V = np.linalg.eigh(P.T @ L @ P)
    a = P @ V[:, 0]
    return float(w[0]), a


def _qb_value(R, U, a):
    B = kt.bisectional_matrix(R, U)
    return float(np.sum(B * (a[:, None] - a[None, :]) ** 2))


def _qb_frame_gradient(R, U, a):
    """Skew-Hermitian descent direction for the frame at fixed weights."""
    c = (a[:, None] - a[None, :]) ** 2
    # G_E[p, i] = 2 sum_j c_ij R(u_i, e_p, u_j, u_j)
    T = np.einsum("pqst,pi,sj,tj->iqj", R, U, U, U.conj(), optimize=True)
    GE = 2.0 * np.einsum("iqj,ij->qi", T, c)
    A = U.conj().T @ GE
    return -(A - A.conj().T)


def _cayley(U, K, t):
    n = U.shape[0]
    I = np.eye(n)
    return U @ np.linalg.solve(I - 0.5 * t * K, I + 0.5 * t * K)


def _qb_restart(R, U, max_iters, step_tol):
    val, a = _qb_weights(kt.bisectional_matrix(R, U))
    t = 0.1
    converged = False
    for _ in range(max_iters):
        K = _qb_frame_gradient(R, U, a)
        gn = float(np.sum(np.abs(K) ** 2))
        if gn < step_tol**2:
            converged = True
            break
        step = t
        moved = False
        for _ in range(MAX_BACKTRACK):
            Un = _cayley(U, K, step)
            vn = _qb_value(R, Un, a)
            if vn <= val - ARMIJO_C * step * gn / 2:
                moved = True
                break
            step *= 0.5
        if not moved:
            converged = True
            break
        U = Un
        new_val, a = _qb_weights(kt.bisectional_matrix(R, U))
        t = min(step * 2.0, 10.0)
        if abs(val - new_val) < step_tol**2 and step * np.sqrt(gn) < step_tol:
            val = new_val
            converged = True
            break
        val = new_val
    # re-orthonormalize against drift
    Q, Rq = np.linalg.qr(U)
    U = Q * (np.diag(Rq) / np.abs(np.diag(Rq)))
    val, a = _qb_weights(kt.bisectional_matrix(R, U))
    return U, a, val, converged


def min_qb(R, opts=None):
    """Heuristic minimum of QB over unitary frames and unit weights with zero sum.

    Alternates an exact eigen-step in the weights with Cayley steps in the
    frame.  No claim of global optimality.
    """
    opts = opts or CertifyOptions()
    R, n = _check_dim(R, None)
    if n < 2:
        raise DimensionMismatch("QB needs n >= 2")
    rng = np.random.default_rng(np.random.SeedSequence(opts.seed))
    starts = [np.eye(n, dtype=complex)]
    for _ in range(opts.restarts - 1):
        Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        Q, Rq = np.linalg.qr(Z)
        starts.append(Q * (np.diag(Rq) / np.abs(np.diag(Rq))))

    def job(U0):
        return _qb_restart(R, U0, opts.max_iters, opts.step_tol)

    with ThreadPoolExecutor(max_workers=_workers()) as ex:
        results = list(ex.map(job, starts))
    vals = np.array([r[2] for r in results])
    best = int(np.argmin(vals))
    U, a, _, conv = results[best]
    frame = kt.FrameAndWeights(U, a)
    value = kt.qb_form(R, frame)
    method = {
        "seed": opts.seed,
        "restarts": opts.restarts,
        "converged": bool(conv),
        "converged_count": int(sum(r[3] for r in results)),
        "heuristic": True,
    }
    return PositivityReport("qb_min", value, frame, verdict_for(value), value, method)


# ---------------------------------------------------------------------------
# nu, Einstein check, rigidity classifier


def nu_report(R, g=None):
    nu = kt.nu_max(R, g)
    Q = kt.q_operator(R, g)
    w, V = np.linalg.eigh(Q)
    return PositivityReport("nu", nu, list(V[:, -1]), verdict_for(nu), nu, {"eigenproblem_size": int(Q.shape[0])})


def einstein_check(R, g=None, tol=1e-9):
    """``(True, mu)`` when ``Ric = mu g`` within ``tol``, else ``(False, None)``."""
    R, n = _check_dim(R, g)
    gm = np.eye(n, dtype=complex) if g is None else np.asarray(g, dtype=complex)
    ric = kt.ricci(R, gm)
    ginv = np.linalg.inv(gm)
    mu = float(np.trace(ric @ ginv).real / n)
    if np.abs(ric - mu * gm).max() <= tol:
        return True, mu
    return False, None


@dataclass
class FlatReport:
    verdict: str
    max_abs_ric_perp: float
    scalar: float
    residual: float
    max_abs_R: float


def flat_ric_perp_classify(R, g=None, tol=1e-9, opts=None, samples=2000):
    """Classify a tensor with vanishing ``Ric^perp``.

    ``Ric^perp`` is sampled on random directions and extremized by descent;
    if it vanishes, the decomposition ``R = R_Ric`` and ``S = 0`` must hold,
    which forces ``R = 0`` for ``n >= 3`` and a conformally split tensor for
    ``n = 2``.
    """
    opts = opts or CertifyOptions(restarts=16, max_iters=200)
    R, n = _check_dim(R, g)
    if n < 2:
        raise DimensionMismatch("the classification needs n >= 2")
    Rn = kt.to_orthonormal(R, g)
    ric = kt.ricci(Rn)
    rng = np.random.default_rng(np.random.SeedSequence(opts.seed))
    Z = _normalize(rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n)))
    fn = _Functional(ric, Rn)
    vals = fn.value(Z)
    lo = min_ric_perp(Rn, None, opts).value
    hi = -_run_restarts(_Functional(ric, Rn, 1.0, -1.0), n, opts)[1].min()
    max_perp = float(max(np.abs(vals).max(), abs(lo), abs(hi)))

    C = 100.0
    scalar = float(np.trace(ric).real)
    residual = float(np.abs(kt.ric_operator_tensor(ric) - Rn).max())
    max_R = float(np.abs(Rn).max())
    if max_perp > tol:
        verdict = "not_ric_perp_flat"
    elif residual > C * tol:
        verdict = "inconsistent"
    elif max_R <= C * tol:
        verdict = "flat"
    elif n == 2 and abs(scalar) <= C * tol:
        verdict = "n2_conformally_split"
    else:
        verdict = "inconsistent"
    return FlatReport(verdict, max_perp, scalar, residual, max_R)
