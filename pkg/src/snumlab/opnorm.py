"""Operator norms ||T||_{p->q}.

Closed forms are used where they exist (p = 1, q = inf, the spectral norm) and
vertex enumeration where the relevant unit ball is a small cube (p = inf, or
q = 1 through the adjoint). Everything else falls back to a multi-restart
dual-map power iteration, which only certifies a lower bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .operators import FiniteOperator
from .spaces import INF, _norms, ball_argmax, dual_exponent, duality_map

DEFAULT_SEED = 0x5EED

# cube vertex enumeration is exact but exponential; 2**(MAX_CUBE_DIM - 1) vertices
MAX_CUBE_DIM = 14

RESTARTS = 32
MAX_ITER = 500
REL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class NormEstimate:
    lower: float
    upper: Optional[float]
    witness: np.ndarray
    method: str  # "exact" or "optimized"

    @property
    def value(self) -> float:
        return self.lower

    @property
    def exact(self) -> bool:
        return self.method == "exact"


@lru_cache(maxsize=None)
def cube_vertices(n: int) -> np.ndarray:
    """Vertices of [-1, 1]^n modulo sign, as rows (first coordinate +1)."""
    if n == 0:
        return np.zeros((1, 0))
    k = np.arange(2 ** (n - 1))[:, None]
    bits = (k >> np.arange(n - 1)) & 1
    V = np.ones((2 ** (n - 1), n))
    V[:, 1:] = 1 - 2 * bits
    V.setflags(write=False)
    return V


def ball_vertices(n: int, p: float) -> Optional[np.ndarray]:
    """Extreme points (modulo sign) of the l^p unit ball as columns, or None."""
    if p == 1:
        return np.eye(n)
    if p == INF and n <= MAX_CUBE_DIM:
        return cube_vertices(n).T
    return None


def has_exact_norm(p: float, q: float, m: int, n: int) -> bool:
    return (p == 1 or q == INF or (p == 2 and q == 2)
            or (p == INF and n <= MAX_CUBE_DIM) or (q == 1 and m <= MAX_CUBE_DIM))


def sphere_points(rng: np.random.Generator, count: int, n: int, p: float) -> np.ndarray:
    """Random points on the l^p unit sphere, as columns."""
    X = rng.standard_normal((n, count))
    nrm = _norms(X, p)
    nrm[nrm == 0] = 1.0
    return X / nrm


def maximize_convex(value: Callable[[np.ndarray], float],
                    supergradient: Callable[[np.ndarray], np.ndarray],
                    starts: np.ndarray, p: float,
                    max_iter: int = MAX_ITER, tol: float = REL_TOL):
    """Conditional-gradient ascent of a convex function over the l^p ball.

    Each step jumps to the ball point maximising the linearisation, so values
    never decrease. ``starts`` holds one start per column. Returns the best
    (value, x) over all starts.
    """
    best_val, best_x = -1.0, None
    for j in range(starts.shape[1]):
        x = starts[:, j]
        f = value(x)
        for _ in range(max_iter):
            g = supergradient(x)
            x_new = ball_argmax(g, p)
            if not np.any(x_new):
                break
            f_new = value(x_new)
            if f_new <= f * (1 + tol):
                if f_new > f:
                    x, f = x_new, f_new
                break
            x, f = x_new, f_new
        if f > best_val:
            best_val, best_x = f, x
    return best_val, best_x


def _power_iteration(M: np.ndarray, p: float, q: float, seed: int, restarts: int,
                     max_iter: int):
    m, n = M.shape
    rng = np.random.default_rng(seed)
    starts = np.hstack([np.eye(n), sphere_points(rng, restarts, n, p)])

    def value(x):
        return float(_norms((M @ x)[:, None], q)[0])

    def grad(x):
        y = M @ x
        s = float(np.max(np.abs(y)))
        if s == 0:
            return M.T @ np.ones(m)
        return M.T @ duality_map(y / s, q)

    return maximize_convex(value, grad, starts, p, max_iter)


def matrix_norm(M: np.ndarray, p: float, q: float, seed: int = DEFAULT_SEED,
                restarts: int = RESTARTS, max_iter: int = MAX_ITER):
    """(value, witness, exact) for ||M||_{p->q} on raw arrays."""
    m, n = M.shape
    if not np.any(M):
        return 0.0, np.zeros(n), True
    if p == 1:
        cols = _norms(M, q)
        j = int(np.argmax(cols))
        x = np.zeros(n)
        x[j] = 1.0
        return float(cols[j]), x, True
    if q == INF:
        rows = _norms(M.T, dual_exponent(p))
        i = int(np.argmax(rows))
        return float(rows[i]), ball_argmax(M[i], p), True
    if p == 2 and q == 2:
        _, s, Vt = np.linalg.svd(M)
        return float(s[0]), Vt[0], True
    if p == INF and n <= MAX_CUBE_DIM:
        V = cube_vertices(n).T
        vals = _norms(M @ V, q)
        j = int(np.argmax(vals))
        return float(vals[j]), V[:, j].copy(), True
    if q == 1 and m <= MAX_CUBE_DIM:
        S = cube_vertices(m).T
        G = M.T @ S
        vals = _norms(G, dual_exponent(p))
        j = int(np.argmax(vals))
        return float(vals[j]), ball_argmax(G[:, j], p), True
    val, x = _power_iteration(M, p, q, seed, restarts, max_iter)
    return val, x, False


def operator_norm(T: FiniteOperator, seed: int = DEFAULT_SEED, restarts: int = RESTARTS,
                  max_iter: int = MAX_ITER) -> NormEstimate:
    val, x, exact = matrix_norm(T.matrix, T.p, T.q, seed, restarts, max_iter)
    if exact:
        return NormEstimate(val, val, x, "exact")
    return NormEstimate(val, None, x, "optimized")


def oracle_operator_norm(T: FiniteOperator, budget: int = 20000, seed: int = DEFAULT_SEED) -> float:
    from .oracle import oracle_norm
    return oracle_norm(T.matrix, T.p, T.q, budget, seed)
