"""Approximation, Kolmogorov, Gelfand, Weyl and Chang numbers of finite operators.

Every solver works on the whole sequence s_1, ..., s_k, warm-starting index
j+1 from the witness of index j, so a computed sequence is nonincreasing by
construction and s_number(T, k) never depends on how many later indices
someone else asked for.

Bound sides: approximation, Kolmogorov and Gelfand values come from explicit
witnesses and are upper bounds (two-sided where a closed form applies); Weyl
and Chang values are the best objective over the contractions tried, i.e.
lower bounds.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
import scipy.linalg
from scipy import optimize

from .operators import FiniteOperator, adjoint
from .opnorm import (DEFAULT_SEED, ball_vertices, cube_vertices, matrix_norm, maximize_convex,
                     sphere_points)
from .spaces import (INF, MAX_ENUM_DIM, ZERO_TOL, SolverError, _norms, annihilator_vertices,
                     best_coefficients,
                     chebyshev_duals, distances, dual_exponent, duality_map,
                     orthonormal_basis)


class SNumberKind(str, Enum):
    APPROXIMATION = "approximation"
    KOLMOGOROV = "kolmogorov"
    GELFAND = "gelfand"
    WEYL = "weyl"
    CHANG = "chang"

    @classmethod
    def parse(cls, name) -> "SNumberKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {"a": "approximation", "d": "kolmogorov", "c": "gelfand", "x": "weyl",
                   "y": "chang"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown s-number kind {name!r}; expected one of "
                             f"{', '.join(k.value for k in cls)}") from None


@dataclass(frozen=True, eq=False)
class SNumberResult:
    value: float
    k: int
    kind: SNumberKind
    witness: dict = field(repr=False)
    bound_side: str  # "upper", "lower" or "two_sided"
    certified: bool = True  # False when an inner norm was only estimated

    def summary(self) -> str:
        parts = []
        for key, val in self.witness.items():
            if isinstance(val, np.ndarray):
                parts.append(f"{key}: {val.shape[0]}x{val.shape[1] if val.ndim > 1 else 1}")
        return ", ".join(parts) or "none"


@dataclass
class SolverSettings:
    """Search effort knobs shared by the subspace and factor searches."""

    restarts: int = 16
    polish: int = 4
    max_outer: int = 200
    rel_tol: float = 1e-10
    nm_rounds: int = 4
    max_coordinate_seeds: int = 64


DEFAULT_SETTINGS = SolverSettings()
FAST_SETTINGS = SolverSettings(restarts=3, polish=1, max_outer=30, nm_rounds=1,
                               max_coordinate_seeds=8)
MEDIUM_SETTINGS = SolverSettings(restarts=6, polish=2, max_outer=60, nm_rounds=2,
                                 max_coordinate_seeds=16)


def _check_k(k):
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    return int(k)


def _zero_tol(M):
    return ZERO_TOL * max(1.0, float(np.abs(M).max(initial=0.0)))


# ---------------------------------------------------------------------------
# subspace search


def _orth(B):
    if B.shape[1] == 0:
        return B
    Q, R = np.linalg.qr(B)
    return Q


def _chart(B0):
    """Local chart of the Grassmannian around span(B0): rows S pinned to I."""
    m, r = B0.shape
    _, _, piv = scipy.linalg.qr(B0.T, pivoting=True)
    S = np.sort(piv[:r])
    rest = np.setdiff1d(np.arange(m), S)
    G = B0 @ np.linalg.inv(B0[S])
    return S, rest, G[rest].ravel()


def _from_chart(S, rest, x, m, r):
    # full column rank by construction; objectives must accept non-orthonormal bases
    B = np.empty((m, r))
    B[S] = np.eye(r)
    B[rest] = x.reshape(len(rest), r)
    return B


def _nelder_mead(f, x0, step=0.3, maxfev=None):
    d = x0.size
    simplex = np.vstack([x0] + [x0 + step * e for e in np.eye(d)])
    res = optimize.minimize(f, x0, method="Nelder-Mead",
                            options={"initial_simplex": simplex, "xatol": 1e-7,
                                     "fatol": 1e-13, "maxfev": maxfev or 300 * (d + 1),
                                     "adaptive": d > 4})
    return float(res.fun), res.x


def _polish_subspace(objective, B0, settings):
    """Chart-wise Nelder-Mead, re-charted until a round stops improving."""
    m, r = B0.shape
    best_B = _orth(B0)
    best = objective(best_B)
    if r == 0 or r >= m:
        return best, best_B
    for _ in range(settings.nm_rounds):
        S, rest, x0 = _chart(best_B)
        val, x = _nelder_mead(lambda z: objective(_from_chart(S, rest, z, m, r)), x0)
        if val < best * (1 - settings.rel_tol) - 1e-300:
            best, best_B = val, _orth(_from_chart(S, rest, x, m, r))
        else:
            break
    return best, best_B


def _coordinate_seeds(m, r, limit, rng):
    combos = list(itertools.combinations(range(m), r))
    if len(combos) > limit:
        picks = rng.choice(len(combos), size=limit, replace=False)
        combos = [combos[i] for i in sorted(picks)]
    seeds = []
    for S in combos:
        B = np.zeros((m, r))
        B[list(S), range(r)] = 1.0
        seeds.append(B)
    return seeds


def _augmentations(B_prev, m, extra):
    """span(B_prev) plus one more direction, for each candidate direction."""
    out = []
    for v in extra:
        B = np.column_stack([B_prev, v])
        if np.linalg.matrix_rank(B, tol=1e-8) == B.shape[1]:
            out.append(_orth(B))
    return out


def _best_by_value(cands, tol=1e-12):
    """Lowest value; ties broken by the smallest Frobenius-size witness."""
    best = min(v for v, _ in cands)
    close = [(v, W) for v, W in cands if v <= best + tol * max(1.0, abs(best))]
    return min(close, key=lambda c: float(np.linalg.norm(c[1])))


def minimize_over_subspaces(objective, m, r, seeds, rng, settings=DEFAULT_SETTINGS):
    """Minimise a basis-invariant objective over r-dimensional subspaces of R^m."""
    if r == 0:
        B = np.zeros((m, 0))
        return objective(B), B
    cands = []
    for B in seeds:
        if B.shape == (m, r) and np.linalg.matrix_rank(B, tol=1e-8) == r:
            B = _orth(B)
            cands.append((objective(B), B))
    for _ in range(settings.restarts):
        B = _orth(rng.standard_normal((m, r)))
        cands.append((objective(B), B))
    cands.sort(key=lambda c: c[0])
    polished = list(cands[:1])
    seen = []
    for val, B in cands:
        if len(seen) >= settings.polish:
            break
        P = B @ B.T
        if any(np.linalg.norm(P - Q) < 1e-6 for Q in seen):
            continue
        seen.append(P)
        polished.append(_polish_subspace(objective, B, settings))
    return _best_by_value(polished)


# ---------------------------------------------------------------------------
# quotient norms


def _dual_certificates(Y, B, q, dists):
    """Vectors w_j with ||w_j||_{q'} <= 1, B^T w_j = 0, <w_j, y_j> = dist_q(y_j, B)."""
    m, r = B.shape
    if q == INF and 0 < r < m <= MAX_ENUM_DIM:
        return chebyshev_duals(Y, B)[1]
    C = best_coefficients(Y, B, q) if r else np.zeros((0, Y.shape[1]))
    R = Y - B @ C
    W = np.zeros_like(Y)
    for j in range(Y.shape[1]):
        res = R[:, j]
        if dists[j] == 0 or not np.all(np.isfinite(res)) or not np.any(res):
            continue
        if q == 1 and r:
            w = np.sign(res)
            S = np.abs(res) <= 1e-12 * np.abs(res).max()
            if np.any(S):
                # complete w on the zero-residual rows so that B^T w = 0
                rhs = -B[~S].T @ w[~S]
                w[S] = np.linalg.lstsq(B[S].T, rhs, rcond=None)[0]
                w = w / max(1.0, np.abs(w).max())
        elif q == INF:
            i = np.abs(res) >= (1 - 1e-9) * np.abs(res).max()
            w = np.zeros(m)
            w[i] = np.sign(res[i])
            w /= np.abs(w).sum()
        else:
            w = duality_map(res / np.abs(res).max(), q)
            w = w / _norms(w[:, None], dual_exponent(q))[0]
        if np.all(np.isfinite(w)):
            W[:, j] = w
    return W


def quotient_sup(M, B, p, q, seed=DEFAULT_SEED, restarts=8):
    """sup{ dist_q(Mx, span B) : ||x||_p <= 1 } = ||Q_N M|| for N = span(B).

    Returns (value, exact). B must have full column rank.
    """
    m, n = M.shape
    r = B.shape[1]
    if r == 0:
        val, _, exact = matrix_norm(M, p, q, seed, restarts)
        return val, exact
    if r >= m:
        return 0.0, True
    if q == 2:
        B = _orth(B)
        val, _, exact = matrix_norm(M - B @ (B.T @ M), p, 2, seed, restarts)
        return val, exact
    if q in (1, INF) and m <= MAX_ENUM_DIM:
        W = annihilator_vertices(B, q)
        return float(_norms(M.T @ W, dual_exponent(p)).max()), True
    V = ball_vertices(n, p)
    if V is not None:
        return float(distances(M @ V, B, q).max()), True

    def value(x):
        return float(distances((M @ x)[:, None], B, q)[0])

    def grad(x):
        y = (M @ x)[:, None]
        d = distances(y, B, q)
        return M.T @ _dual_certificates(y, B, q, d)[:, 0]

    rng = np.random.default_rng(seed)
    starts = np.hstack([np.eye(n), sphere_points(rng, restarts, n, p)])
    val, _ = maximize_convex(value, grad, starts, p, max_iter=100)
    return val, False


# ---------------------------------------------------------------------------
# approximation numbers


def _factor(F, r):
    U, s, Vt = np.linalg.svd(F, full_matrices=False)
    return U[:, :r] * s[:r], Vt[:r]


def _column_structured(M, q, r, seeds, rng, settings):
    """min over rank-r F of ||M - F||_{1->q} = min_U max_j dist_q(m_j, span U).

    Alternating descent on the factor pair (V exact column-wise, U from a
    convex epigraph solve), followed by a Grassmannian polish of U.
    Returns (value, F).
    """
    m, n = M.shape

    def phi(U):
        return float(distances(M, U, q).max())

    def alternate(U):
        U = _orth(U)
        val = phi(U)
        for _ in range(settings.max_outer):
            V = best_coefficients(M, U, q)
            U_new = _u_step(M, V, q, U)
            if U_new is None or np.linalg.matrix_rank(U_new, tol=1e-10) < r:
                break
            U_new = _orth(U_new)
            val_new = phi(U_new)
            if val_new >= val * (1 - settings.rel_tol):
                break
            U, val = U_new, val_new
        return val, U

    cands = []
    for U0 in seeds:
        if np.linalg.matrix_rank(U0, tol=1e-8) == r:
            cands.append(alternate(U0))
    for _ in range(settings.restarts):
        cands.append(alternate(rng.standard_normal((m, r))))
    cands.sort(key=lambda c: c[0])
    polished = [cands[0]]
    for val, U in cands[: settings.polish]:
        polished.append(_polish_subspace(phi, U, settings))
    _, U = _best_by_value(polished)
    return U @ best_coefficients(M, U, q)


def _u_step(M, V, q, U0):
    """argmin_U max_j ||m_j - U v_j||_q (convex)."""
    m, n = M.shape
    r = V.shape[0]
    if q in (1, INF):
        nu = m * r
        # U[i, :] @ V[:, j] as a linear map of vec(U) (row-major)
        rows = []
        for j in range(n):
            for i in range(m):
                a = np.zeros(nu)
                a[i * r:(i + 1) * r] = V[:, j]
                rows.append(a)
        A = np.array(rows)  # (n*m, nu), entry (j, i)
        b = M.T.ravel()
        if q == INF:
            # min t: |b - A u| <= t
            ones = np.ones((n * m, 1))
            A_ub = np.block([[-A, -ones], [A, -ones]])
            b_ub = np.concatenate([-b, b])
            cost = np.zeros(nu + 1)
            cost[-1] = 1.0
            bounds = [(None, None)] * nu + [(0, None)]
        else:
            # min t: |b - A u| <= e, sum_i e_ij <= t for every column j
            ne = n * m
            I = np.eye(ne)
            z = np.zeros((ne, 1))
            G = np.kron(np.eye(n), np.ones((1, m)))
            A_ub = np.block([[-A, -I, z], [A, -I, z],
                             [np.zeros((n, nu)), G, -np.ones((n, 1))]])
            b_ub = np.concatenate([-b, b, np.zeros(n)])
            cost = np.zeros(nu + ne + 1)
            cost[-1] = 1.0
            bounds = [(None, None)] * nu + [(0, None)] * (ne + 1)
        res = optimize.linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
        if res.status != 0:
            return None
        return res.x[:nu].reshape(m, r)

    def obj(u):
        return float(_norms(M - u.reshape(m, r) @ V, q).max())

    _, u = _nelder_mead(obj, U0.ravel(), step=0.1, maxfev=200 * (m * r + 1))
    return u.reshape(m, r)


def _general_factored(M, p, q, r, seeds, rng, settings, seed):
    """min over U (m x r), V (r x n) of ||M - UV||_{p->q} by block and joint descent."""
    m, n = M.shape

    def norm(A):
        return matrix_norm(A, p, q, seed, restarts=4, max_iter=100)[0]

    def split(z):
        return z[: m * r].reshape(m, r), z[m * r:].reshape(r, n)

    def descend(F0):
        U, V = _factor(F0, r)
        val = norm(M - U @ V)
        for _ in range(settings.nm_rounds):
            old = val
            val, v = _nelder_mead(lambda z: norm(M - U @ z.reshape(r, n)), V.ravel(), 0.1)
            V = v.reshape(r, n)
            val, u = _nelder_mead(lambda z: norm(M - z.reshape(m, r) @ V), U.ravel(), 0.1)
            U = u.reshape(m, r)
            val, z = _nelder_mead(lambda z: norm(M - np.matmul(*split(z))),
                                  np.concatenate([U.ravel(), V.ravel()]), 0.05)
            U, V = split(z)
            if val >= old * (1 - settings.rel_tol):
                break
        return val, U @ V

    cands = [(norm(M - F), F) for F in seeds]
    for _ in range(settings.restarts // 4):
        F = rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
        cands.append((norm(M - F), F))
    cands.sort(key=lambda c: c[0])
    polished = [cands[0]]
    for _, F in cands[: max(1, settings.polish // 2)]:
        polished.append(descend(F))
    return _best_by_value(polished)[1]


def _last_index_exact(M, p, q):
    """a_n(M) = 1/||M^{-1}||_{q->p} for square invertible M, with its witness.

    Returns None when M is numerically singular or the inverse norm is not exact.
    """
    n = M.shape[0]
    if np.linalg.cond(M) > 1e10:
        return None
    Minv = np.linalg.inv(M)
    inv_norm, y0, exact = matrix_norm(Minv, q, p)
    if not exact or inv_norm == 0:
        return None
    x = Minv @ y0
    x = x / _norms(x[:, None], p)[0]
    # norming functional of x in l^{p'}
    if p == INF:
        i = int(np.argmax(np.abs(x)))
        f = np.zeros(n)
        f[i] = np.sign(x[i])
    elif p == 1:
        f = np.sign(x)
    else:
        f = duality_map(x, p)
        f = f / (f @ x)
    F = M - np.outer(M @ x, f)
    return float(matrix_norm(M - F, p, q)[0]), F


def _approx_sequence(M, p, q, kmax, seed, settings=DEFAULT_SETTINGS, hints=()):
    """[(value, F, exact_norm, two_sided)] for k = 1..kmax on a raw matrix.

    ``hints`` maps k -> extra seed matrices (candidate approximants of rank < k).
    """
    m, n = M.shape
    hints = dict(hints)
    rng = np.random.default_rng(seed)
    out = []
    norm_val, _, exact = matrix_norm(M, p, q, seed)
    out.append((norm_val, np.zeros_like(M), exact, exact))
    svd = np.linalg.svd(M, full_matrices=False)
    for k in range(2, kmax + 1):
        r = k - 1
        prev_val, prev_F = out[-1][0], out[-1][1]
        if r >= min(m, n) or prev_val <= _zero_tol(M):
            out.append((0.0, M.copy(), True, True))
            continue
        if p == 2 and q == 2:
            U, s, Vt = svd
            F = (U[:, :r] * s[:r]) @ Vt[:r]
            out.append((float(s[r]), F, True, True))
            continue
        if m == n == k:
            last = _last_index_exact(M, p, q)
            if last is not None:
                val, F = last
                if val <= prev_val:
                    out.append((val, F, True, True))
                    continue
        U_svd = svd[0][:, :r] * svd[1][:r]
        tsvd = U_svd @ svd[2][:r]
        if p == 1 or q == INF:
            # F is determined by its range (p = 1) or its row space (q = inf)
            A, expo = (M, q) if p == 1 else (M.T, dual_exponent(p))
            seeds = [svd[0][:, :r] if p == 1 else svd[2][:r].T]
            seeds += [_range(F, r, A.shape[0], p == 1) for F in [prev_F] + hints.get(k, [])]
            seeds += _coordinate_seeds(A.shape[0], r, settings.max_coordinate_seeds, rng)
            seeds = [s for s in seeds if s is not None]
            F = _column_structured(A, expo, r, seeds, rng, settings)
            F = F if p == 1 else F.T
        else:
            seeds = [tsvd, prev_F] + hints.get(k, [])
            F = _general_factored(M, p, q, r, seeds, rng, settings, seed)
        val, _, exact_k = matrix_norm(M - F, p, q, seed)
        if val > prev_val:
            val, F = prev_val, prev_F
        if val <= _zero_tol(M):
            val = 0.0
        out.append((val, F, exact_k, False))
    return out


def _range(F, r, dim, columns):
    """A basis (dim x r) padded to r columns for the range (or row space) of F."""
    A = F if columns else F.T
    Q = orthonormal_basis(A, tol=1e-10)
    if Q.shape[1] > r:
        Q = np.linalg.svd(A, full_matrices=False)[0][:, :r]
    if Q.shape[1] < r:
        extra = np.eye(dim)
        for e in extra.T:
            if Q.shape[1] == r:
                break
            cand = np.column_stack([Q, e])
            if np.linalg.matrix_rank(cand, tol=1e-8) == cand.shape[1]:
                Q = _orth(cand)
    return Q if Q.shape[1] == r else None


def approximation_number(T: FiniteOperator, k: int, seed: int = DEFAULT_SEED,
                         settings: SolverSettings = DEFAULT_SETTINGS) -> SNumberResult:
    """a_k(T) = inf{ ||T - F|| : rank F < k }, with an attaining witness F."""
    k = _check_k(k)
    M = np.array(T.matrix)
    seq = _approx_sequence(M, T.p, T.q, k, seed, settings)
    val, F, exact, two_sided = seq[-1]
    if k == 1 and not exact:
        side = "lower"
    else:
        side = "two_sided" if two_sided else "upper"
    return SNumberResult(val, k, SNumberKind.APPROXIMATION, {"F": F}, side, exact)


# ---------------------------------------------------------------------------
# Kolmogorov and Gelfand numbers


def _kolmogorov_sequence(M, p, q, kmax, seed, settings=DEFAULT_SETTINGS, approximants=None):
    """[(value, B, exact)] for k = 1..kmax; B spans the (k-1)-dim subspace N.

    ``approximants[k-1]`` (rank < k, same shape as M) seeds the search with its
    range, which keeps the result below ||M - F||.
    """
    m, n = M.shape
    key = _memo_key(M, p, q, seed, settings, approximants is None)
    hit = _KOLMOGOROV_MEMO.get(key)
    if hit is not None and len(hit[0]) >= kmax:
        return hit[0][:kmax]
    Ul = np.linalg.svd(M)[0]
    if hit is not None:
        out = list(hit[0])
        rng = np.random.default_rng()
        rng.bit_generator.state = hit[1]
    else:
        rng = np.random.default_rng(seed + 1)
        val0, exact0 = quotient_sup(M, np.zeros((m, 0)), p, q, seed)
        out = [(val0, np.zeros((m, 0)), exact0)]
    for k in range(len(out) + 1, kmax + 1):
        r = k - 1
        prev_val, prev_B, _ = out[-1]
        if r >= m or prev_val <= _zero_tol(M):
            B = np.eye(m)[:, : min(r, m)] if r >= m else _pad(prev_B, r, Ul)
            out.append((0.0, B, True))
            continue
        exact_flag = [True]

        def f(B):
            v, ex = quotient_sup(M, B, p, q, seed)
            if not ex:
                exact_flag[0] = False
            return v

        extra = list(np.eye(m).T) + list(Ul.T)
        seeds = [Ul[:, :r]] + _augmentations(prev_B, m, extra)
        if approximants is not None:
            seeds.append(_range(approximants[k - 1], r, m, True))
        seeds += _coordinate_seeds(m, r, settings.max_coordinate_seeds, rng)
        seeds = [S for S in seeds if S is not None]
        val, B = minimize_over_subspaces(f, m, r, seeds, rng, settings)
        if val > prev_val:
            val, B = prev_val, _pad(prev_B, r, Ul)
        if val <= _zero_tol(M):
            val = 0.0
        out.append((val, B, exact_flag[0]))
    _memo_put(_KOLMOGOROV_MEMO, key, (out, rng.bit_generator.state))
    return list(out)


def _pad(B, r, pool):
    for v in pool.T:
        if B.shape[1] >= r:
            break
        cand = np.column_stack([B, v])
        if np.linalg.matrix_rank(cand, tol=1e-8) == cand.shape[1]:
            B = _orth(cand)
    return B


# Subspace searches are deterministic and prefix-consistent (the first k entries
# do not depend on kmax), so per-k calls reuse and extend one cached sequence.
_MEMO_SIZE = 32
_KOLMOGOROV_MEMO: dict = {}
_APPROXIMANT_MEMO: dict = {}


def _memo_key(M, p, q, seed, settings, *extra):
    return (M.shape, M.tobytes(), float(p), float(q), int(seed),
            tuple(vars(settings).values()), *extra)


def _memo_put(memo, key, value):
    memo.pop(key, None)
    if len(memo) >= _MEMO_SIZE:
        memo.pop(next(iter(memo)))
    memo[key] = value


def _approximants(M, p, q, kmax, seed, settings):
    if min(M.shape) < 2 or kmax < 2:
        return None
    key = _memo_key(M, p, q, seed, settings)
    hit = _APPROXIMANT_MEMO.get(key)
    if hit is None or len(hit) < kmax:
        hit = [F for _, F, *_ in _approx_sequence(M, p, q, kmax, seed, settings)]
        _memo_put(_APPROXIMANT_MEMO, key, hit)
    return hit[:kmax]


def kolmogorov_number(T: FiniteOperator, k: int, seed: int = DEFAULT_SEED,
                      settings: SolverSettings = DEFAULT_SETTINGS) -> SNumberResult:
    """d_k(T) = inf over subspaces N of the codomain, dim N < k, of ||Q_N T||."""
    k = _check_k(k)
    M = np.array(T.matrix)
    m = M.shape[0]
    val, B, exact = _kolmogorov_sequence(M, T.p, T.q, k, seed, settings,
                                         _approximants(M, T.p, T.q, k, seed, settings))[-1]
    if k == 1:
        side = "two_sided" if exact else "lower"
    elif k > m or val == 0.0:
        side = "two_sided"
    else:
        side = "upper"
    return SNumberResult(val, k, SNumberKind.KOLMOGOROV, {"basis": B}, side, exact)


def gelfand_number(T: FiniteOperator, k: int, seed: int = DEFAULT_SEED,
                   settings: SolverSettings = DEFAULT_SETTINGS) -> SNumberResult:
    """c_k(T) = inf over subspaces M of the domain, codim M < k, of ||T J_M||.

    M = ker A for a (k-1) x n constraint matrix A. The restricted norm is
    evaluated through its adjoint, sup{ dist_{p'}(T^T y, range A^T) : ||y||_{q'} <= 1 },
    which is the same number and exact whenever q is 1 or inf.
    """
    k = _check_k(k)
    M = np.array(T.matrix)
    n = M.shape[1]
    F = _approximants(M, T.p, T.q, k, seed, settings)
    val, B, exact = _kolmogorov_sequence(M.T, dual_exponent(T.q), dual_exponent(T.p), k, seed,
                                         settings, None if F is None else [G.T for G in F])[-1]
    if k == 1:
        side = "two_sided" if exact else "lower"
    elif k > n or val == 0.0:
        side = "two_sided"
    else:
        side = "upper"
    return SNumberResult(val, k, SNumberKind.GELFAND, {"constraints": B.T}, side, exact)


# ---------------------------------------------------------------------------
# Weyl and Chang numbers


def _contraction_norm(R, p):
    return matrix_norm(R, 2, p)[0]


def _weyl_sequence(M, p, q, kmax, seed, settings=DEFAULT_SETTINGS, cap=None):
    """x_1..x_kmax of M: l^p -> l^q; returns (values, best R per k, certified).

    The pool of contractions R: l2^n -> l^p_n does not depend on kmax: it holds
    the normalised identity, a rank-one lift of the norm witness and the result
    of a short ascent for every index up to min(m, n). The ascent maximises a
    cheap upper bound of a_k(MR) (truncated SVD or F*R, exact at k = n), and the
    pool is then scored with the real solver. Each value is the best a_k(MR)
    over the pool, so the sequence is nonincreasing.
    """
    m, n = M.shape
    K = min(m, n)
    a_seq = _approx_sequence(M, p, q, K, seed, settings)
    rng = np.random.default_rng(seed + 2)
    _, x_star, _ = matrix_norm(M, p, q, seed)
    pool = [np.eye(n), np.outer(x_star, np.eye(n)[0])]
    pool += [rng.standard_normal((n, n)) for _ in range(2)]
    pool = [R / nr for R in pool if (nr := _contraction_norm(R, p)) > 0]

    def inner(R, kk, cfg):
        hints = {j: [a_seq[j - 1][1] @ R] for j in range(2, kk + 1)}
        return _approx_sequence(M @ R, 2, q, kk, seed, cfg, hints)

    def surrogate(R, kk):
        # cheap upper bound for a_kk(MR): best of the truncated SVD and F*R
        A = M @ R
        if kk == 1:
            return matrix_norm(A, 2, q, seed, restarts=4, max_iter=50)[0]
        if m == n == kk:
            last = _last_index_exact(A, 2, q)
            if last is not None:
                return last[0]
        U, s, Vt = np.linalg.svd(A)
        cands = [(U[:, :kk - 1] * s[:kk - 1]) @ Vt[:kk - 1], a_seq[kk - 1][1] @ R]
        return min(matrix_norm(A - F, 2, q, seed, restarts=4, max_iter=50)[0] for F in cands)

    certified = all(a[2] for a in a_seq) and p in (1, 2, INF)
    exact_hilbert = p == 2 and q == 2
    if not exact_hilbert and n * n <= 25:
        for kk in range(1, K + 1):
            starts = pool + [R / _contraction_norm(R, p)
                             for R in rng.standard_normal((24, n, n))]
            scores = [surrogate(R, kk) for R in starts]
            if max(scores) >= a_seq[kk - 1][0] * (1 - 1e-9):
                continue
            R0 = starts[int(np.argmax(scores))]

            def neg(z, kk=kk):
                R = z.reshape(n, n)
                nr = _contraction_norm(R, p)
                if nr == 0:
                    return 0.0
                return -surrogate(R / nr, kk)

            _, z = _nelder_mead(neg, R0.ravel(), step=0.2, maxfev=60 * n * n)
            R = z.reshape(n, n)
            nr = _contraction_norm(R, p)
            if nr > 0:
                pool.append(R / nr)
    cfg = settings if settings.restarts <= MEDIUM_SETTINGS.restarts else MEDIUM_SETTINGS
    table = np.array([[v for v, *_ in inner(R, K, cfg)] for R in pool])  # (|pool|, K)
    values, best_R = [], []
    for k in range(1, kmax + 1):
        if k > K:
            values.append(0.0)
            best_R.append(pool[0])
            continue
        col = table[:, k - 1]
        i = int(np.argmax(col))
        bound = a_seq[k - 1][0] if cap is None else min(a_seq[k - 1][0], cap[k - 1])
        values.append(float(min(col[i], bound)))
        best_R.append(pool[i])
    return values, best_R, certified, a_seq


def weyl_number(T: FiniteOperator, k: int, seed: int = DEFAULT_SEED,
                settings: SolverSettings = DEFAULT_SETTINGS) -> SNumberResult:
    """x_k(T) = sup{ a_k(TR) : ||R: l2 -> X|| <= 1 }, lower bound.

    The Hilbert space is instantiated as l2 of the domain dimension.
    """
    k = _check_k(k)
    M = np.array(T.matrix)
    values, Rs, certified, a_seq = _weyl_sequence(M, T.p, T.q, k, seed, settings)
    val = values[-1]
    K = min(M.shape)
    if k > K or val == 0.0:
        side = "two_sided"
    elif k <= len(a_seq) and a_seq[k - 1][3] and val >= a_seq[k - 1][0] * (1 - 1e-12):
        side = "two_sided"
    else:
        side = "lower"
    return SNumberResult(val, k, SNumberKind.WEYL, {"contraction": Rs[-1]}, side, certified)


def _chang_cap(T, kmax, seed, settings):
    # a_k(T) and a_k(T') are both upper bounds for y_k(T)
    K = min(T.shape)
    vals = [v for v, *_ in _approx_sequence(np.array(T.matrix), T.p, T.q, min(kmax, K), seed,
                                            settings)]
    return vals + [0.0] * (kmax - len(vals))


def chang_number(T: FiniteOperator, k: int, seed: int = DEFAULT_SEED,
                 settings: SolverSettings = DEFAULT_SETTINGS) -> SNumberResult:
    """y_k(T) = sup{ a_k(ST) : ||S: Y -> l2|| <= 1 }, lower bound.

    a_k(ST) = a_k((ST)') = a_k(T'S') for finite rank, so this is the Weyl
    search on the adjoint; the witness S is returned in its own orientation.
    """
    k = _check_k(k)
    M = np.array(T.matrix)
    Ta = adjoint(T)
    values, Rs, certified, a_seq = _weyl_sequence(Ta.matrix, Ta.p, Ta.q, k, seed, settings,
                                                  _chang_cap(T, k, seed, settings))
    val = values[-1]
    K = min(M.shape)
    if k > K or val == 0.0:
        side = "two_sided"
    elif a_seq[min(k, K) - 1][3] and val >= a_seq[k - 1][0] * (1 - 1e-12):
        side = "two_sided"
    else:
        side = "lower"
    return SNumberResult(val, k, SNumberKind.CHANG, {"contraction": Rs[-1].T}, side, certified)


# ---------------------------------------------------------------------------
# reformulations through a_k and dispatch


def domain_extreme_points(n: int, p: float) -> np.ndarray:
    """Extreme points of the l^p_n unit ball, both signs, as columns (p in {1, inf})."""
    if p == 1:
        return np.hstack([np.eye(n), -np.eye(n)])
    if p == INF:
        V = cube_vertices(n).T
        return np.hstack([V, -V])
    raise ValueError(f"the l^p ball has finitely many extreme points only for p in {{1, inf}}, got {p}")


def kolmogorov_via_ak(T: FiniteOperator, k: int, extreme_points: bool = True,
                      seed: int = DEFAULT_SEED) -> float:
    """d_k(T) as a_k(T E) with E: l^1(ext U_X) -> X the canonical quotient map."""
    k = _check_k(k)
    if not extreme_points:
        raise ValueError("only the extreme-point quotient is implemented")
    if T.p not in (1, INF):
        raise ValueError("kolmogorov_via_ak needs a domain exponent of 1 or inf")
    E = domain_extreme_points(T.dom.dim, T.p)
    TE = FiniteOperator.from_matrix(T.matrix @ E, 1, T.q)
    return approximation_number(TE, k, seed).value


def gelfand_via_ak(T: FiniteOperator, k: int, functional_net: Optional[int] = None,
                   seed: int = DEFAULT_SEED) -> float:
    """c_k(T) as a_k(J T) with J: Y -> l^inf(ext U_{Y'}) the canonical embedding.

    Exact for q in {1, inf}. For other q pass ``functional_net``: J then uses
    that many sampled norming functionals and gives a lower approximation.
    """
    k = _check_k(k)
    m = T.cod.dim
    if T.q in (1, INF) and functional_net is None:
        Fn = domain_extreme_points(m, dual_exponent(T.q)).T
    elif functional_net is None:
        raise ValueError("exact embedding needs a codomain exponent of 1 or inf; "
                         "pass functional_net for other exponents")
    else:
        if functional_net < 1:
            raise ValueError("functional_net must be positive")
        rng = np.random.default_rng(seed)
        qd = dual_exponent(T.q)
        net = np.hstack([np.eye(m), sphere_points(rng, functional_net, m, qd)])
        Fn = net.T
    JT = FiniteOperator.from_matrix(Fn @ T.matrix, T.p, INF)
    return approximation_number(JT, k, seed).value


_SOLVERS = {
    SNumberKind.APPROXIMATION: approximation_number,
    SNumberKind.KOLMOGOROV: kolmogorov_number,
    SNumberKind.GELFAND: gelfand_number,
    SNumberKind.WEYL: weyl_number,
    SNumberKind.CHANG: chang_number,
}


def s_number(T: FiniteOperator, k: int, kind, seed: int = DEFAULT_SEED,
             settings: SolverSettings = DEFAULT_SETTINGS) -> SNumberResult:
    kind = SNumberKind.parse(kind)
    return _SOLVERS[kind](T, k, seed=seed, settings=settings)


def s_sequence(T: FiniteOperator, kmax: int, kind, seed: int = DEFAULT_SEED,
               settings: SolverSettings = DEFAULT_SETTINGS) -> list[float]:
    """s_1(T), ..., s_kmax(T) in one pass."""
    kind = SNumberKind.parse(kind)
    kmax = _check_k(kmax)
    M = np.array(T.matrix)
    if kind is SNumberKind.APPROXIMATION:
        return [v for v, *_ in _approx_sequence(M, T.p, T.q, kmax, seed, settings)]
    if kind is SNumberKind.KOLMOGOROV:
        F = _approximants(M, T.p, T.q, kmax, seed, settings)
        return [v for v, *_ in _kolmogorov_sequence(M, T.p, T.q, kmax, seed, settings, F)]
    if kind is SNumberKind.GELFAND:
        F = _approximants(M, T.p, T.q, kmax, seed, settings)
        F = None if F is None else [G.T for G in F]
        return [v for v, *_ in _kolmogorov_sequence(M.T, dual_exponent(T.q), dual_exponent(T.p),
                                                     kmax, seed, settings, F)]
    if kind is SNumberKind.WEYL:
        return _weyl_sequence(M, T.p, T.q, kmax, seed, settings)[0]
    Ta = adjoint(T)
    return _weyl_sequence(Ta.matrix, Ta.p, Ta.q, kmax, seed, settings,
                          _chang_cap(T, kmax, seed, settings))[0]


def numerical_rank(F, tol=1e-9) -> int:
    s = np.linalg.svd(F, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * max(1.0, s[0])))


__all__ = [
    "SNumberKind", "SNumberResult", "SolverSettings", "SolverError", "approximation_number",
    "kolmogorov_number", "gelfand_number", "weyl_number", "chang_number", "kolmogorov_via_ak",
    "gelfand_via_ak", "s_number", "s_sequence", "quotient_sup", "minimize_over_subspaces",
    "domain_extreme_points", "numerical_rank",
]
