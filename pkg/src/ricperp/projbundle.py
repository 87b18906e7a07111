"""Curvature of the metric ``lambda * pi^* omega_g + c_1(L, h)`` on ``P(E^*)``.

Everything is computed at one point ``(x, [v])`` in the adapted coordinates
``(z_1..z_n, t_2..t_r)``: ``g(0) = I``, ``dg(0) = 0``, ``h(0) = I``,
``dh(0) = 0``, ``d_i d_j h(0) = 0``, ``e_1(0) = v`` and the ``v``-slice of the
bundle curvature is diagonal, ``R^h_{v vbar i jbar} = xi_i delta_ij``.

Combined index layout: horizontal ``0..n-1`` then vertical ``n..n+r-2``
(vertical index ``alpha`` corresponds to bundle index ``alpha + 1``).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from . import tensor as kt
from .errors import (
    DimensionMismatch,
    EmptyGrid,
    IndexOutOfRange,
    LambdaTooSmall,
    SymmetryViolation,
    ZeroVector,
)
from .models import BundleCurvature, SplitBundleModel, fubini_study, split_bundle_curvature

ADAPTED_TOL = 1e-9


@dataclass(frozen=True)
class ProjBundleInput:
    """Pointwise data for the projectivized-bundle metric.

    ``d3[beta, i, j, k] = h_{u betabar, i jbar k}`` (``beta = 0`` is ``u``)
    and ``d4[i, j, k, l] = h_{u ubar, i jbar k lbar}``; both default to zero.
    """

    lam: float
    Rg: np.ndarray
    Rh: BundleCurvature
    xi: np.ndarray = None
    d3: np.ndarray = None
    d4: np.ndarray = None

    def __post_init__(self):
        Rg = np.asarray(self.Rg, dtype=complex)
        Rh = self.Rh if isinstance(self.Rh, BundleCurvature) else BundleCurvature(self.Rh)
        n, r = Rg.shape[0], Rh.rank
        if Rh.base_dim != n:
            raise DimensionMismatch(f"base dimension {n} but bundle curvature has {Rh.base_dim}")
        if r < 2:
            raise DimensionMismatch("rank must be at least 2")
        vslice = Rh.Rh[0, 0]
        off = vslice - np.diag(np.diag(vslice))
        if np.abs(off).max(initial=0.0) > ADAPTED_TOL:
            raise SymmetryViolation(np.abs(off).max(), (0, 0), "adapted frame (v-slice not diagonal)")
        xi = np.diag(vslice).real.copy() if self.xi is None else np.asarray(self.xi, dtype=float)
        if xi.shape != (n,) or np.abs(xi - np.diag(vslice).real).max() > ADAPTED_TOL:
            raise DimensionMismatch("xi must equal the diagonal of the v-slice")
        if not self.lam > xi.max():
            raise LambdaTooSmall(f"lambda = {self.lam} must exceed max xi = {xi.max()}")
        d3 = np.zeros((r, n, n, n), dtype=complex) if self.d3 is None else np.asarray(self.d3, dtype=complex)
        d4 = np.zeros((n,) * 4, dtype=complex) if self.d4 is None else np.asarray(self.d4, dtype=complex)
        if d3.shape != (r, n, n, n) or d4.shape != (n,) * 4:
            raise DimensionMismatch("d3 must be (r, n, n, n) and d4 must be (n, n, n, n)")
        d3_asym = np.abs(d3 - d3.transpose(0, 3, 2, 1)).max(initial=0.0)
        if d3_asym > ADAPTED_TOL:
            raise SymmetryViolation(d3_asym, (0, 0, 0, 0), "d3 symmetry in unbarred slots")
        kt.validate_tensor(d4, ADAPTED_TOL)
        for name, value in (("Rg", Rg), ("Rh", Rh), ("xi", xi), ("d3", d3), ("d4", d4)):
            object.__setattr__(self, name, value)
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def n(self):
        return self.Rg.shape[0]

    @property
    def r(self):
        return self.Rh.rank

    @property
    def dim(self):
        return self.n + self.r - 1

    @property
    def eps(self):
        return 1.0 / (self.lam - self.xi)


@dataclass(frozen=True)
class TangentSplit:
    """Tangent vector ``X = y + sigma`` in the adapted coordinates."""

    y: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=complex)
        s = np.asarray(self.sigma, dtype=complex)
        if not (np.any(y != 0) or np.any(s != 0)):
            raise ZeroVector("y and sigma are both zero")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "sigma", s)

    @property
    def vector(self):
        return np.concatenate([self.y, self.sigma])


@dataclass(frozen=True)
class PhiBreakdown:
    phi: float
    phi0: float
    phi1: complex
    phi2: float
    phi3: complex
    phi4: float

    @property
    def piece_sum(self):
        return (
            self.phi0
            + 2.0 * self.phi1.real
            + self.phi2
            + 2.0 * self.phi3.real
            + self.phi4
        )


# ---------------------------------------------------------------------------
# metric and its derivatives at the origin


def g_metric_at_origin(inp):
    """``G_{i jbar} = (lambda - xi_i) delta_ij``, ``G_{alpha betabar} = delta``."""
    return np.diag(np.concatenate([inp.lam - inp.xi, np.ones(inp.r - 1)])).astype(complex)


def _first_derivatives(inp):
    """``D1[a, j, c] = G_{a jbar, c}`` for horizontal barred index ``j``."""
    n, N = inp.n, inp.dim
    D1 = np.zeros((N, n, N), dtype=complex)
    Rv0 = inp.Rh.Rh[1:, 0]  # R^h_{alpha vbar i jbar}
    D1[:n, :, :n] = inp.d3[0]
    D1[:n, :, n:] = -Rv0.transpose(1, 2, 0)
    D1[n:, :, :n] = -Rv0.transpose(0, 2, 1)
    return D1


def _second_derivatives(inp):
    """``D2[a, b, c, d] = G_{a bbar, c dbar}``.

    ``G = lambda g + ddbar log h_uu``; with all first derivatives of ``h_uu``
    vanishing, the fourth derivative of ``log h_uu`` is
    ``F_{abcd} - F_{ab} F_{cd} - F_{ad} F_{cb}`` with ``F = h_uu - 1``.
    """
    n, N = inp.n, inp.dim
    Rv = inp.Rh.Rh[1:, 1:]
    d3v = inp.d3[1:]
    H, V = slice(0, n), slice(n, N)

    F4 = np.zeros((N,) * 4, dtype=complex)
    F4[H, H, H, H] = inp.d4
    F4[V, V, H, H] = -Rv
    F4[V, H, H, V] = -Rv.transpose(0, 3, 2, 1)
    F4[H, V, V, H] = -Rv.transpose(2, 1, 0, 3)
    F4[H, H, V, V] = -Rv.transpose(2, 3, 0, 1)
    F4[H, V, H, H] = d3v.transpose(1, 0, 3, 2)
    F4[H, H, H, V] = d3v.transpose(1, 2, 3, 0)
    F4[V, H, H, H] = d3v.conj()
    F4[H, H, V, H] = d3v.conj().transpose(2, 1, 0, 3)

    F2 = np.diag(np.concatenate([-inp.xi, np.ones(inp.r - 1)])).astype(complex)
    D2 = F4 - np.einsum("ab,cd->abcd", F2, F2) - np.einsum("ad,cb->abcd", F2, F2)
    # normal coordinates: g_{i jbar, k lbar}(0) = -R^g_{i jbar k lbar}
    D2[H, H, H, H] += -inp.lam * inp.Rg
    return D2


def g_curvature_coordinates(inp):
    """Curvature of ``G`` in the coordinate frame ``(z, t)``.

    ``R_{a bbar c dbar} = -G_{a bbar, c dbar}
    + sum_j G_{a jbar, c} conj(G_{b jbar, d}) / (lambda - xi_j)``.
    """
    D1 = _first_derivatives(inp)
    D2 = _second_derivatives(inp)
    quad = np.einsum("ajc,bjd,j->abcd", D1, D1.conj(), inp.eps, optimize=True)
    return -D2 + quad


def g_curvature_at_origin(inp, tol=1e-10):
    """Curvature of ``G`` in the ``G``-orthonormal frame (metric = identity)."""
    R = g_curvature_coordinates(inp)
    s = 1.0 / np.sqrt(np.diag(g_metric_at_origin(inp)).real)
    Rn = R * np.einsum("a,b,c,d->abcd", s, s, s, s)
    return kt.validate_tensor(Rn, tol)


# ---------------------------------------------------------------------------
# component formulas


def ricci_split(inp):
    """Ricci blocks of ``G`` from the closed-form component formulas.

    Returns ``(R_ys, R_ss, R_yy)``: the ``n x (r-1)`` form with
    ``R_{y sigmabar} = y^T R_ys conj(sigma)``, the ``(r-1) x (r-1)`` form
    ``R_{sigma sigmabar}`` and the ``n x n`` form ``R_{y ybar}``, all in
    coordinate components.
    """
    r, lam = inp.r, inp.lam
    eps, xi = inp.eps, inp.xi
    Rh = inp.Rh.Rh
    d3, d4 = inp.d3, inp.d4
    Rv0 = Rh[1:, 0]  # [alpha, i, j]

    R_ss = (
        np.einsum("abjj,j->ab", Rh[1:, 1:], eps)
        - np.eye(r - 1) * np.dot(eps, xi)
        + np.einsum("ajl,bjl,j,l->ab", Rv0, Rv0.conj(), eps, eps)
        + r * np.eye(r - 1)
    )

    R_yy = (
        lam * np.einsum("jjik,j->ik", inp.Rg, eps)
        - np.einsum("ikjj,j->ik", d4, eps)
        + np.diag(np.dot(eps, xi) * xi + eps * xi**2)
        + np.einsum("ilj,klj,j,l->ik", d3[0], d3[0].conj(), eps, eps)
        + np.einsum("aaik->ik", Rh[1:, 1:])
        - (r - 1) * Rh[0, 0]
        + np.einsum("aij,akj,j->ik", Rv0, Rv0.conj(), eps)
    )

    R_ys = -np.einsum("bjji,j->ib", d3[1:], eps) - np.einsum(
        "jli,blj,j,l->ib", d3[0], Rh[0, 1:], eps, eps
    )
    return R_ys, R_ss, R_yy


def ricci_from_tensor(inp):
    """Ricci form of ``G`` by contracting the coordinate curvature tensor."""
    R = g_curvature_coordinates(inp)
    ginv = 1.0 / np.diag(g_metric_at_origin(inp)).real
    return np.einsum("abcc,c->ab", R, ginv)


def _components(inp, y, s):
    """Curvature components entering the decomposition of ``Phi``."""
    eps, xi, lam = inp.eps, inp.xi, inp.lam
    Rh = inp.Rh.Rh
    d3 = inp.d3
    s_full = np.concatenate([[0.0], s])  # bundle-index vector for sigma

    xi_y = float(np.dot(xi, np.abs(y) ** 2))
    h3_yy = np.einsum("ijk,i,k->j", d3[0], y, y)  # h_{uu, y jbar y}
    # R^h_{v sigmabar j ybar} = sum_{beta,l} conj(s_beta) Rh[0, beta, j, l] conj(y_l)
    Rh_vs_jy = np.einsum("bjl,b,l->j", Rh[0], s_full.conj(), y.conj())
    # R^h_{sigma vbar y jbar} = sum_{alpha,i} s_alpha Rh[alpha, 0, i, j] y_i
    Rh_sv_yj = np.einsum("aij,a,i->j", Rh[:, 0], s_full, y)

    R_yyyy = (
        lam * kt.evaluate(inp.Rg, y, y, y, y)
        - kt.evaluate(inp.d4, y, y, y, y)
        + 2.0 * xi_y**2
        + np.dot(eps, np.abs(h3_yy) ** 2)
    ).real
    h3s = np.einsum("bijk,b,i,j,k->", d3, s_full.conj(), y, y.conj(), y)
    R_yyys = -h3s - np.dot(eps, h3_yy * Rh_vs_jy)
    Rh_ssyy = np.einsum("abij,a,b,i,j->", Rh, s_full, s_full.conj(), y, y.conj()).real
    s2 = float(np.vdot(s, s).real)
    R_yyss = Rh_ssyy - s2 * xi_y + float(np.dot(eps, np.abs(Rh_sv_yj) ** 2))
    R_ssss = 2.0 * s2**2
    return R_yyyy, R_yyys, R_yyss, R_ssss


def phi(inp, X):
    """``Phi = ||X||^2 Ric(X, Xbar) - R(X, Xbar, X, Xbar)`` and its pieces.

    ``phi`` is evaluated directly from the full curvature tensor; the pieces
    come from the closed-form component formulas.
    """
    if not isinstance(X, TangentSplit):
        raise TypeError("X must be a TangentSplit")
    y, s = X.y, X.sigma
    if y.shape != (inp.n,) or s.shape != (inp.r - 1,):
        raise DimensionMismatch("TangentSplit dimensions do not match the input")
    G = g_metric_at_origin(inp)
    R = g_curvature_coordinates(inp)
    x = X.vector
    ric = np.einsum("abcc,c->ab", R, 1.0 / np.diag(G).real)
    normX = float(np.einsum("ab,a,b->", G, x, x.conj()).real)
    ric_xx = float(np.einsum("ab,a,b->", ric, x, x.conj()).real)
    direct = normX * ric_xx - float(kt.evaluate(R, x, x, x, x).real)

    R_ys, R_ss, R_yy = ricci_split(inp)
    ry_s = complex(np.einsum("ib,i,b->", R_ys, y, s.conj()))
    rs = float(np.einsum("ab,a,b->", R_ss, s, s.conj()).real)
    ry = float(np.einsum("ik,i,k->", R_yy, y, y.conj()).real)
    R_yyyy, R_yyys, R_yyss, R_ssss = _components(inp, y, s)

    ny = float(np.dot(inp.lam - inp.xi, np.abs(y) ** 2))
    s2 = float(np.vdot(s, s).real)
    return PhiBreakdown(
        phi=direct,
        phi0=ny * ry - R_yyyy,
        # one sigma in either barred slot: 4 Re R_{y ybar y sigmabar} in total
        phi1=complex(ny * ry_s - 2.0 * R_yyys),
        phi2=ny * rs + s2 * ry - 4.0 * R_yyss,
        phi3=complex(s2 * ry_s),
        phi4=s2 * rs - R_ssss,
    )


# ---------------------------------------------------------------------------
# condition (1.1)


class _ConditionForm:
    """Vectorized left side of the bundle condition for batches of ``(v, X)``."""

    def __init__(self, Rg, bundle):
        Rg = np.asarray(Rg, dtype=complex)
        n, r = Rg.shape[0], bundle.rank
        self.n, self.r = n, r
        self.ric = kt.ricci(Rg)
        self.det = bundle.det_curvature()
        # M[(i, k), (j, l)] = Rg[i, j, k, l];  B[(a, i), (b, j)] = Rh[a, b, i, j]
        self.M = Rg.transpose(0, 2, 1, 3).reshape(n * n, n * n)
        self.B = bundle.Rh.transpose(0, 2, 1, 3).reshape(r * n, r * n)

    def __call__(self, V, X):
        V = V / np.linalg.norm(V, axis=1, keepdims=True)
        X = X / np.linalg.norm(X, axis=1, keepdims=True)
        Xc = X.conj()
        u = (X[:, :, None] * X[:, None, :]).reshape(X.shape[0], -1)
        perp = np.einsum("bi,ij,bj->b", X, self.ric, Xc).real - np.einsum(
            "bp,pq,bq->b", u, self.M, u.conj()
        ).real
        det = np.einsum("bi,ij,bj->b", X, self.det, Xc).real
        w = (V[:, :, None] * X[:, None, :]).reshape(X.shape[0], -1)
        bun = np.einsum("bp,pq,bq->b", w, self.B, w.conj()).real
        return perp + det - self.r * bun

    def value_and_grad(self, v, x):
        """Value at one pair and the real gradients ``2 d/d(conj v)``, ``2 d/d(conj x)``."""
        n, r = self.n, self.r
        nv, nx = np.vdot(v, v).real, np.vdot(x, x).real
        A = self.ric + self.det
        q1 = (x @ A @ x.conj()).real
        g1 = A.T @ x / nx - q1 * x / nx**2
        uM = ((np.outer(x, x).ravel()) @ self.M).reshape(n, n)
        q2 = (uM.ravel() @ np.outer(x, x).ravel().conj()).real
        g2 = (uM + uM.T) @ x.conj() / nx**2 - 2 * q2 * x / nx**3
        wB = (np.outer(v, x).ravel() @ self.B).reshape(r, n)
        q3 = (wB.ravel() @ np.outer(v, x).ravel().conj()).real
        g3v = wB @ x.conj() / (nv * nx) - q3 * v / (nv**2 * nx)
        g3x = wB.T @ v.conj() / (nv * nx) - q3 * x / (nv * nx**2)
        f = q1 / nx - q2 / nx**2 - r * q3 / (nv * nx)
        return f, 2 * (-r * g3v), 2 * (g1 - g2 - r * g3x)


def condition_value(Rg, bundle, v, X, ric=None):
    """Left side of the pointwise bundle condition at unit ``v`` and ``X``."""
    form = _ConditionForm(Rg, bundle)
    v = np.asarray(v, dtype=complex)[None, :]
    X = np.asarray(X, dtype=complex)[None, :]
    return float(form(v, X)[0])


def split_margin_closed_form(model):
    """Exact minimum for ``O(a_1)+...+O(a_r)`` over ``P^n``: ``n - 1 - sum(a_1 - a_j)``."""
    a = model.degrees
    return (model.n - 1) + sum(a) - model.rank * max(a)


@dataclass
class MarginResult:
    margin: float
    v: np.ndarray
    X: np.ndarray
    closed_form: float = None
    samples: int = 0


def _unit(z):
    return z / np.linalg.norm(z)


def condition_margin(Rg, bundle, samples=256, seed=0, polish=8, model=None):
    """Minimum of the bundle condition over unit ``v`` in the fiber and unit ``X``.

    Candidates are all pairs of coordinate vectors plus ``samples`` random
    pairs; the best ``polish`` candidates are refined by BFGS on the product
    of spheres.  For split models the closed form is attached.
    """
    Rg = np.asarray(Rg, dtype=complex)
    n, r = Rg.shape[0], bundle.rank
    if bundle.base_dim != n:
        raise DimensionMismatch("base tensor and bundle curvature disagree on n")
    form = _ConditionForm(Rg, bundle)
    rng = np.random.default_rng(seed)

    V = [np.eye(r)[a] for a in range(r) for _ in range(n)]
    X = [np.eye(n)[i] for _ in range(r) for i in range(n)]
    V = np.vstack([np.array(V, dtype=complex), rng.standard_normal((samples, r)) + 1j * rng.standard_normal((samples, r))])
    X = np.vstack([np.array(X, dtype=complex), rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n))])
    values = form(V, X)
    order = np.argsort(values, kind="stable")

    def objective(p):
        v = p[:r] + 1j * p[r:2 * r]
        x = p[2 * r:2 * r + n] + 1j * p[2 * r + n:]
        if not (np.any(v) and np.any(x)):
            return np.inf, np.zeros_like(p)
        f, gv, gx = form.value_and_grad(v, x)
        return f, np.concatenate([gv.real, gv.imag, gx.real, gx.imag])

    k = order[0]
    best = (float(values[k]), _unit(V[k]), _unit(X[k]))
    for k in order[:polish]:
        p0 = np.concatenate([V[k].real, V[k].imag, X[k].real, X[k].imag])
        res = minimize(objective, p0, jac=True, method="BFGS", options={"gtol": 1e-10})
        if res.fun < best[0]:
            p = res.x
            best = (float(res.fun), _unit(p[:r] + 1j * p[r:2 * r]), _unit(p[2 * r:2 * r + n] + 1j * p[2 * r + n:]))
    margin, v, x = best
    closed = split_margin_closed_form(model) if model is not None else None
    return MarginResult(margin, v, x, closed, V.shape[0])


# ---------------------------------------------------------------------------
# split bundles over projective space


def _unitary_with_first_column(v):
    v = _unit(np.asarray(v, dtype=complex))
    r = v.size
    M = np.eye(r, dtype=complex)
    M[:, 0] = v
    k = int(np.argmax(np.abs(v)))
    if k != 0:
        M[:, k] = np.eye(r)[0]
    Q, Rq = np.linalg.qr(M)
    # fix the phase so that the first column is exactly v
    Q[:, 0] *= Rq[0, 0] / abs(Rq[0, 0])
    return Q


def adapt_bundle_frame(bundle, v):
    """Rotate the bundle frame so that ``e_1 = v`` (base frame unchanged)."""
    U = _unitary_with_first_column(v)
    Rh = np.einsum("cdij,ca,db->abij", bundle.Rh, U, U.conj())
    return BundleCurvature(Rh), U


def split_bundle_input(model, lam, v=None):
    """Adapted pointwise data for a split bundle with the standard metrics at ``[v]``.

    The fiber metric of ``O(a)`` is ``(1 + |z|^2)^{-a}``, so
    ``h_{u ubar}(z) = sum_c |v_c|^2 (1 + |z|^2)^{-a_c}``: its third derivatives
    vanish and its fourth derivative is
    ``sum_c |v_c|^2 a_c (a_c + 1) (delta_ij delta_kl + delta_il delta_kj)``.
    """
    if not isinstance(model, SplitBundleModel):
        raise TypeError("model must be a SplitBundleModel")
    r, n = model.rank, model.n
    v = np.eye(r)[0] if v is None else np.asarray(v, dtype=complex)
    bundle, _ = adapt_bundle_frame(split_bundle_curvature(model), v)
    a = np.array(model.degrees, dtype=float)
    w = np.abs(_unit(np.asarray(v, dtype=complex))) ** 2
    _, fs = fubini_study(n)
    d4 = float(np.dot(w, a * (a + 1.0))) * fs
    return ProjBundleInput(lam=lam, Rg=fs, Rh=bundle, d4=d4)


def fiber_points(model, extra=4, seed=0):
    """Points ``[v]`` checked in a fiber: coordinate lines plus random lines."""
    r = model.rank
    pts = [np.eye(r)[a].astype(complex) for a in range(r)]
    rng = np.random.default_rng(seed)
    for _ in range(extra):
        pts.append(_unit(rng.standard_normal(r) + 1j * rng.standard_normal(r)))
    return pts


# ---------------------------------------------------------------------------
# lambda search


@dataclass
class LambdaPoint:
    lam: float
    min_ric_perp: float
    verdict: str
    vertical_min: float
    witness_v: list
    witness_X: list
    converged: bool


@dataclass
class LambdaSearchReport:
    points: list
    first_positive: float = None
    stays_positive: bool = None
    scope: str = "pointwise certification at the sampled fiber points"
    settings: dict = field(default_factory=dict)


def _vertical_basis(inp):
    N, n = inp.dim, inp.n
    return np.eye(N, dtype=complex)[:, n:]


def _certify_point(inp_list, opts):
    from .certify import min_ric_perp

    best = None
    vmin = np.inf
    for v, inp in inp_list:
        R = g_curvature_at_origin(inp)
        rep = min_ric_perp(R, None, opts)
        vert = min_ric_perp(R, None, opts, subspace=_vertical_basis(inp))
        vmin = min(vmin, vert.value)
        if best is None or rep.value < best[0].value:
            best = (rep, v)
    return best, vmin


def _workers():
    try:
        return max(1, int(os.environ.get("RICPERP_THREADS", "1")))
    except ValueError:
        return 1


def min_lambda_search(source, grid, opts=None, fiber_extra=4):
    """Certify ``min Ric^perp`` of ``G`` at each ``lambda`` in ``grid``.

    ``source`` is a :class:`SplitBundleModel` (every fiber point from
    :func:`fiber_points` is checked) or a :class:`ProjBundleInput` (its single
    point is checked with ``lambda`` replaced).
    """
    from .certify import CertifyOptions

    opts = opts or CertifyOptions()
    grid = [float(x) for x in grid]
    if not grid:
        raise EmptyGrid("lambda grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("lambda grid must be strictly increasing")

    def build(lam):
        if isinstance(source, SplitBundleModel):
            pts = fiber_points(source, fiber_extra, opts.seed)
            return [(v, split_bundle_input(source, lam, v)) for v in pts]
        if isinstance(source, ProjBundleInput):
            return [(np.eye(source.r)[0], replace(source, lam=lam))]
        raise TypeError("source must be a SplitBundleModel or a ProjBundleInput")

    jobs = [build(lam) for lam in grid]
    with ThreadPoolExecutor(max_workers=_workers()) as ex:
        results = list(ex.map(lambda job: _certify_point(job, opts), jobs))

    points = []
    for lam, ((rep, v), vmin) in zip(grid, results):
        points.append(
            LambdaPoint(
                lam=lam,
                min_ric_perp=rep.value,
                verdict=rep.verdict,
                vertical_min=float(vmin),
                witness_v=[complex(c) for c in v],
                witness_X=rep.witness,
                converged=rep.method["converged"],
            )
        )
    positive = [p.verdict == "positive" for p in points]
    first = next((p.lam for p, ok in zip(points, positive) if ok), None)
    stays = None
    if first is not None:
        k = positive.index(True)
        stays = all(positive[k:])
    settings = {"seed": opts.seed, "restarts": opts.restarts, "fiber_points": len(jobs[0])}
    return LambdaSearchReport(points, first, stays, settings=settings)


# ---------------------------------------------------------------------------
# integer helpers


def section_normal_c1(r, degrees, i, in_total_space=False):
    """First Chern class of the normal bundle of the section ``C_i``.

    ``r * a_i - (a_1 + ... + a_r)`` inside ``P(E|_L)``; one more inside ``P``.
    ``i`` is 1-based.
    """
    degrees = [int(a) for a in degrees]
    if len(degrees) != r:
        raise DimensionMismatch(f"expected {r} degrees, got {len(degrees)}")
    if not 1 <= i <= r:
        raise IndexOutOfRange(f"i = {i} outside 1..{r}")
    value = r * degrees[i - 1] - sum(degrees)
    return value + 1 if in_total_space else value


def rational_curve_bound(KinvC, genus):
    """Whether ``K^{-1} . C >= 3 - 2 g`` holds."""
    if genus < 0:
        raise ValueError("genus must be non-negative")
    return int(KinvC) >= 3 - 2 * int(genus)
