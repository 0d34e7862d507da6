"""Brute-force reference computations for tiny instances (dims <= 4, k <= 3).

Nothing here calls the structured solvers: norms are evaluated from closed
forms, vertex enumeration or raw sphere sampling, distances to subspaces go
through scipy's LP solver, and every inf/sup is realised by random search
plus a pattern-search polish. Infimum-type oracles therefore return upper
bounds and supremum-type oracles lower bounds.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .operators import FiniteOperator
from .spaces import INF, dual_exponent


@dataclass(frozen=True)
class OracleBudget:
    samples: int = 400
    polish_steps: int = 60
    seed: int = 0

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("OracleBudget.samples must be >= 1")
        if self.polish_steps < 0:
            raise ValueError("OracleBudget.polish_steps must be >= 0")


def _pnorm(x, p):
    a = np.abs(x)
    if p == INF:
        return float(a.max()) if a.size else 0.0
    return float((a ** p).sum() ** (1.0 / p))


def _sign_vectors(n):
    return np.array(list(itertools.product((1.0, -1.0), repeat=n)))


def _sample_sphere(rng, count, n, p):
    X = rng.standard_normal((count, n))
    # mix in sparse directions; extreme points of l^1-type balls live there
    mask = rng.random((count, n)) < 0.3
    X[: count // 3] *= mask[: count // 3]
    X[np.all(X == 0, axis=1)] = 1.0
    return X / np.array([_pnorm(x, p) for x in X])[:, None]


def _polish_sphere(f, x, p, steps, rng, radius=0.25):
    """Random-direction hill climb on the l^p sphere, maximising f."""
    fx = f(x)
    n = x.size
    for _ in range(steps):
        improved = False
        for _ in range(2 * n):
            y = x + radius * rng.standard_normal(n)
            ny = _pnorm(y, p)
            if ny == 0:
                continue
            y = y / ny
            fy = f(y)
            if fy > fx:
                x, fx, improved = y, fy, True
        if not improved:
            radius *= 0.5
            if radius < 1e-9:
                break
    return fx, x


def oracle_norm(M: np.ndarray, p: float, q: float, budget: int = 20000, seed: int = 0) -> float:
    """Lower bound for ||M||_{p->q}; exact for p in {1, inf}."""
    M = np.asarray(M, dtype=float)
    m, n = M.shape
    if not np.any(M):
        return 0.0
    if p == 1:
        return max(_pnorm(M[:, j], q) for j in range(n))
    if p == INF:
        return max(_pnorm(M @ s, q) for s in _sign_vectors(n))
    rng = np.random.default_rng(seed)
    X = _sample_sphere(rng, max(budget, 1), n, p)
    vals = np.array([_pnorm(M @ x, q) for x in X])
    best = 0.0
    for idx in np.argsort(vals)[-5:]:
        val, _ = _polish_sphere(lambda x: _pnorm(M @ x, q), X[idx], p, 200, rng)
        best = max(best, val)
    return best


def _eval_norm(M, p, q, seed=0):
    """||M||_{p->q} exactly where a closed form or enumeration exists."""
    if p == 1 or p == INF:
        return oracle_norm(M, p, q)
    if q == INF:
        return max(_pnorm(row, dual_exponent(p)) for row in M)
    if q == 1:
        return oracle_norm(M.T, INF, dual_exponent(p))
    if p == 2 and q == 2:
        return float(np.linalg.norm(M, 2))
    return oracle_norm(M, p, q, budget=2000, seed=seed)


def _pattern_search(f, z, steps, rng, radius=0.5):
    """Minimise f by coordinate and random-direction trial steps."""
    fz = f(z)
    n = z.size
    for _ in range(steps):
        improved = False
        for i in range(n):
            for sgn in (1.0, -1.0):
                y = z.copy()
                y[i] += sgn * radius
                fy = f(y)
                if fy < fz:
                    z, fz, improved = y, fy, True
        for _ in range(n):
            y = z + radius * rng.standard_normal(n) / np.sqrt(n)
            fy = f(y)
            if fy < fz:
                z, fz, improved = y, fy, True
        if not improved:
            radius *= 0.5
            if radius < 1e-10:
                break
    return fz, z


def oracle_approximation_number(T: FiniteOperator, k: int, budget: OracleBudget = OracleBudget()) -> float:
    """Upper bound on a_k(T) by random rank-(k-1) factor search (plus the truncated SVD)."""
    M = T.matrix
    m, n = M.shape
    if k == 1:
        return _eval_norm(M, T.p, T.q)
    r = k - 1
    if r >= min(m, n):
        return 0.0
    rng = np.random.default_rng(budget.seed)
    scale = float(np.abs(M).max()) or 1.0

    def f(z):
        U = z[: m * r].reshape(m, r)
        V = z[m * r:].reshape(r, n)
        return _eval_norm(M - U @ V, T.p, T.q)

    U0, s0, Vt0 = np.linalg.svd(M)
    z0 = np.concatenate([(U0[:, :r] * s0[:r]).ravel(), Vt0[:r].ravel()])
    cands = [(f(z0), z0)]
    mags = scale * np.array([0.25, 0.5, 1.0, 2.0])
    for _ in range(budget.samples):
        z = rng.standard_normal(m * r + r * n)
        z[: m * r] *= rng.choice(mags)
        cands.append((f(z), z))
    cands.sort(key=lambda c: c[0])
    best = cands[0][0]
    for _, z in cands[:3]:
        val, _ = _pattern_search(f, z, budget.polish_steps, rng, radius=0.5 * scale)
        best = min(best, val)
    return best


def _lp_dist(y, B, q):
    """min_c ||y - Bc||_q through an explicit LP / least squares / smooth solve."""
    m, r = B.shape
    if r == 0:
        return _pnorm(y, q)
    if q == 2:
        c = np.linalg.lstsq(B, y, rcond=None)[0]
        return _pnorm(y - B @ c, 2)
    if q == 1:
        A = np.block([[-B, -np.eye(m)], [B, -np.eye(m)]])
        cost = np.concatenate([np.zeros(r), np.ones(m)])
        bounds = [(None, None)] * r + [(0, None)] * m
    elif q == INF:
        A = np.block([[-B, -np.ones((m, 1))], [B, -np.ones((m, 1))]])
        cost = np.zeros(r + 1)
        cost[-1] = 1.0
        bounds = [(None, None)] * r + [(0, None)]
    else:
        res = optimize.minimize(lambda c: _pnorm(y - B @ c, q),
                                np.linalg.lstsq(B, y, rcond=None)[0], method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        return float(res.fun)
    res = optimize.linprog(cost, A_ub=A, b_ub=np.concatenate([-y, y]), bounds=bounds,
                           method="highs")
    return float(res.fun)


def _domain_points(n, p, rng, count):
    if p == 1:
        return np.eye(n)
    if p == INF:
        return _sign_vectors(n)[: 2 ** (n - 1)]
    return _sample_sphere(rng, count, n, p)


def oracle_kolmogorov(T: FiniteOperator, k: int, budget: OracleBudget = OracleBudget()) -> float:
    """Upper bound on d_k(T) by random subspace search in the codomain.

    The inner supremum is exact for p in {1, inf} (vertex enumeration) and a
    sampled lower estimate otherwise.
    """
    M = T.matrix
    m, n = M.shape
    if k == 1:
        return _eval_norm(M, T.p, T.q)
    r = k - 1
    if r >= m:
        return 0.0
    rng = np.random.default_rng(budget.seed)
    X = _domain_points(n, T.p, rng, 200)
    Y = M @ X.T

    def f(z):
        B = z.reshape(m, r)
        if np.linalg.matrix_rank(B) < r:
            return np.inf
        return max(_lp_dist(Y[:, j], B, T.q) for j in range(Y.shape[1]))

    cands = []
    for S in itertools.combinations(range(m), r):
        z = np.zeros((m, r))
        z[list(S), range(r)] = 1.0
        cands.append((f(z.ravel()), z.ravel()))
    for _ in range(budget.samples):
        z = rng.standard_normal(m * r)
        cands.append((f(z), z))
    cands.sort(key=lambda c: c[0])
    best = cands[0][0]
    for _, z in cands[:3]:
        val, _ = _pattern_search(f, z, budget.polish_steps, rng)
        best = min(best, val)
    return best


def _section_sup(M, Z, p, q, rng):
    """sup{ ||Mx||_q : x in range(Z), ||x||_p <= 1 }."""
    n, d = Z.shape
    if d == 0:
        return 0.0
    pts = []
    if p == INF:
        # vertices: d coordinates pinned at +-1
        for S in itertools.combinations(range(n), d):
            ZS = Z[list(S)]
            if abs(np.linalg.det(ZS)) < 1e-12:
                continue
            for sig in _sign_vectors(d):
                x = Z @ np.linalg.solve(ZS, sig)
                if np.max(np.abs(x)) <= 1 + 1e-9:
                    pts.append(x)
    elif p == 1:
        # vertices: directions of range(Z) supported on n-d+1 coordinates
        for S in itertools.combinations(range(n), n - d + 1):
            off = [i for i in range(n) if i not in S]
            if off:
                null = np.linalg.svd(Z[off])[2]
                rank = np.linalg.matrix_rank(Z[off])
                if d - rank != 1:
                    continue
                x = Z @ null[-1]
            else:
                x = Z[:, 0]
            if np.any(x):
                pts.append(x / _pnorm(x, 1))
    else:
        C = rng.standard_normal((600, d))
        best = 0.0
        for c in C:
            x = Z @ c
            best = max(best, _pnorm(M @ x, q) / _pnorm(x, p))
        f = lambda c: _pnorm(M @ (Z @ c), q) / max(_pnorm(Z @ c, p), 1e-300)  # noqa: E731
        val, _ = _polish_sphere(f, C[0] / np.linalg.norm(C[0]), 2, 100, rng)
        return max(best, val)
    if not pts:
        return 0.0
    return max(_pnorm(M @ x, q) for x in pts)


def oracle_gelfand(T: FiniteOperator, k: int, budget: OracleBudget = OracleBudget()) -> float:
    """Upper bound on c_k(T) by random search over codimension-(k-1) subspaces."""
    M = T.matrix
    m, n = M.shape
    if k == 1:
        return _eval_norm(M, T.p, T.q)
    r = k - 1
    if r >= n:
        return 0.0
    rng = np.random.default_rng(budget.seed)

    def f(z):
        A = z.reshape(r, n)
        if np.linalg.matrix_rank(A) < r:
            return np.inf
        Z = np.linalg.svd(A)[2][r:].T
        return _section_sup(M, Z, T.p, T.q, rng)

    cands = []
    for S in itertools.combinations(range(n), r):
        z = np.zeros((r, n))
        z[range(r), list(S)] = 1.0
        cands.append((f(z.ravel()), z.ravel()))
    for _ in range(budget.samples):
        z = rng.standard_normal(r * n)
        cands.append((f(z), z))
    cands.sort(key=lambda c: c[0])
    best = cands[0][0]
    for _, z in cands[:3]:
        val, _ = _pattern_search(f, z, budget.polish_steps, rng)
        best = min(best, val)
    return best


def exact_last_approximation_number(M: np.ndarray, p: float, q: float) -> float:
    """a_n(M) = 1 / ||M^{-1}||_{q->p} for square M (distance to the singular matrices)."""
    if np.linalg.matrix_rank(M) < M.shape[0]:
        return 0.0
    return 1.0 / _eval_norm(np.linalg.inv(M), q, p)


def _inner_ak(M, k, p, q, seed):
    m, n = M.shape
    if k == 1:
        return _eval_norm(M, p, q)
    if k > min(m, n):
        return 0.0
    if p == 2 and q == 2:
        return float(np.linalg.svd(M, compute_uv=False)[k - 1])
    if m == n == k:
        return exact_last_approximation_number(M, p, q)
    raise ValueError("oracle contraction sweeps need an exactly evaluable inner a_k")


def oracle_weyl(T: FiniteOperator, k: int, samples: int = 10000, seed: int = 0) -> float:
    """Lower bound on x_k(T): best a_k(TR) over random R with ||R: l2 -> l^p|| = 1."""
    M = T.matrix
    n = M.shape[1]
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(samples):
        R = rng.standard_normal((n, n))
        R /= _eval_norm(R, 2, T.p)
        best = max(best, _inner_ak(M @ R, k, 2, T.q, seed))
    return best


def oracle_chang(T: FiniteOperator, k: int, samples: int = 10000, seed: int = 0) -> float:
    """Lower bound on y_k(T): best a_k(ST) over random and row-selector S with ||S: l^q -> l2|| = 1."""
    M = T.matrix
    m = M.shape[0]
    rng = np.random.default_rng(seed)
    cands = [np.eye(m)[[i]] for i in range(m)]
    cands += [rng.standard_normal((m, m)) for _ in range(samples)]
    best = 0.0
    for S in cands:
        S = S / _eval_norm(S, T.q, 2)
        best = max(best, _inner_ak(S @ M, k, T.p, 2, seed))
    return best
