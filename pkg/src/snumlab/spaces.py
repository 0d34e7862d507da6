"""Finite-dimensional l^p spaces: norms, dual exponents, distances to subspaces."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import optimize

INF = math.inf

# relative threshold for "numerically zero" distances
ZERO_TOL = 1e-9

# enumeration paths for q in {1, inf} are used up to this ambient dimension
MAX_ENUM_DIM = 12


class SolverError(RuntimeError):
    """An inner numerical solve failed to converge."""


def as_exponent(p) -> float:
    """Parse an exponent from a number or one of the strings '1', '2', 'inf'."""
    if isinstance(p, str):
        s = p.strip().lower()
        if s in ("inf", "infinity", "oo"):
            value = INF
        else:
            try:
                value = float(s)
            except ValueError:
                raise ValueError(f"not an exponent: {p!r}") from None
    else:
        value = float(p)
    if math.isnan(value) or value < 1:
        raise ValueError(f"exponent must lie in [1, inf], got {p!r}")
    return value


def dual_exponent(p) -> float:
    p = as_exponent(p)
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    if p == 2:
        return 2.0
    # snap to a nearby simple fraction so that p'' == p in floating point
    f = Fraction(p).limit_denominator(10_000)
    if abs(float(f) - p) <= 4 * math.ulp(p):
        return float(f / (f - 1))
    return p / (p - 1)


def format_exponent(p: float) -> str:
    if p == INF:
        return "inf"
    if float(p).is_integer():
        return str(int(p))
    return repr(float(p))


@dataclass(frozen=True)
class NormedSpace:
    """The space R^dim with the l^p norm."""

    dim: int
    p: float

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "p", as_exponent(self.p))

    @property
    def dual(self) -> "NormedSpace":
        return NormedSpace(self.dim, dual_exponent(self.p))

    def norm(self, x) -> float:
        return vector_norm(x, self.p)

    def __str__(self):
        return f"l{format_exponent(self.p)}^{self.dim}"


def vector_norm(x, p) -> float:
    p = as_exponent(p)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("vector has non-finite entries")
    return float(_norms(x.reshape(-1, 1), p)[0])


def _norms(X: np.ndarray, p: float, axis: int = 0) -> np.ndarray:
    """Column-wise (axis=0) l^p norms, no validation."""
    A = np.abs(X)
    if p == 1:
        return A.sum(axis=axis)
    if p == 2:
        return np.sqrt((A * A).sum(axis=axis))
    if p == INF:
        return A.max(axis=axis) if A.shape[axis] else np.zeros(A.shape[1 - axis])
    # scale first so large entries do not overflow |x|^p
    scale = A.max(axis=axis, keepdims=True) if A.shape[axis] else np.ones((1, A.shape[1 - axis]))
    scale = np.where(scale > 0, scale, 1.0)
    return np.squeeze(scale, axis=axis) * ((A / scale) ** p).sum(axis=axis) ** (1.0 / p)


def duality_map(v: np.ndarray, r: float) -> np.ndarray:
    """Psi_r(v)_i = sign(v_i)|v_i|^(r-1), the gradient direction of the l^r norm."""
    if r == 1:
        return np.sign(v)
    if r == INF:
        out = np.zeros_like(v)
        if v.size:
            i = int(np.argmax(np.abs(v)))
            out[i] = np.sign(v[i])
        return out
    return np.sign(v) * np.abs(v) ** (r - 1)


def ball_argmax(g: np.ndarray, p: float) -> np.ndarray:
    """A maximiser of <g, x> over the closed unit ball of l^p."""
    g = np.asarray(g, dtype=float)
    if not np.any(g):
        return np.zeros_like(g)
    if p == 1:
        x = np.zeros_like(g)
        i = int(np.argmax(np.abs(g)))
        x[i] = 1.0 if g[i] >= 0 else -1.0
        return x
    if p == INF:
        return np.where(g >= 0, 1.0, -1.0)
    x = duality_map(g / np.max(np.abs(g)), dual_exponent(p))
    return x / vector_norm(x, p)


def orthonormal_basis(B: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Orthonormal basis of span(B); may have fewer columns than B."""
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    if B.shape[1] == 0:
        return B.reshape(B.shape[0], 0)
    U, s, _ = np.linalg.svd(B, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((B.shape[0], 0))
    return U[:, s > tol * s[0]]


@lru_cache(maxsize=None)
def _subsets(m: int, r: int) -> np.ndarray:
    return np.array(list(itertools.combinations(range(m), r)), dtype=int).reshape(-1, r)


def _l1_enum(Y: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact l^1 regression by vertex enumeration.

    With full column rank B (m x r), min_c ||y - Bc||_1 is attained where r
    linearly independent residuals vanish, so enumerating the r-row subsets
    is exact. Returns (distances, coefficients) for every column of Y.
    """
    m, r = B.shape
    S = _subsets(m, r)
    BS = B[S]  # (nS, r, r)
    det = np.abs(np.linalg.det(BS))
    ok = det > 1e-12
    if not np.any(ok):
        raise SolverError("no invertible row subset; basis is rank deficient")
    S, BS = S[ok], BS[ok]
    C = np.linalg.solve(BS, Y[S])  # (nS, r, J)
    R = Y[None, :, :] - B[None, :, :] @ C
    vals = np.abs(R).sum(axis=1)  # (nS, J)
    best = np.argmin(vals, axis=0)
    J = np.arange(Y.shape[1])
    return vals[best, J], C[best, :, J].T


def _linf_enum(Y: np.ndarray, B: np.ndarray, with_dual: bool = False):
    """Exact Chebyshev distance via the dual LP.

    dist_inf(y, span B) = max{ <w, y> : ||w||_1 <= 1, B^T w = 0 }; every vertex
    of that polytope is supported on r+1 rows whose block of B has rank r, so
    the vertex is the (normalised) null vector of that block.
    """
    m, r = B.shape
    S = _subsets(m, r + 1)
    BS = B[S]  # (nS, r+1, r)
    # null vector of BS^T through the last left singular vector
    U, s, _ = np.linalg.svd(BS, full_matrices=True)
    w = U[:, :, -1]  # (nS, r+1)
    ok = s[:, -1] > 1e-10
    if not np.any(ok):
        raise SolverError("no rank-r row subset; basis is rank deficient")
    w = w[ok] / np.abs(w[ok]).sum(axis=1, keepdims=True)
    S = S[ok]
    inner = np.einsum("si,sij->sj", w, Y[S])
    vals = np.abs(inner)
    if not with_dual:
        return vals.max(axis=0)
    best = np.argmax(vals, axis=0)
    J = np.arange(Y.shape[1])
    W = np.zeros_like(Y)
    W[S[best].T, J] = (w[best] * np.sign(inner[best, J])[:, None]).T
    return vals[best, J], W


def _lq_fit(y: np.ndarray, B: np.ndarray, q: float) -> np.ndarray:
    """Coefficients minimising ||y - Bc||_q for 1 < q < inf by smooth convex descent."""
    c0 = np.linalg.lstsq(B, y, rcond=None)[0]
    scale = max(float(np.max(np.abs(y))), 1e-300)
    yy = y / scale

    def fun(c):
        r = yy - B @ c
        a = np.abs(r)
        return float((a ** q).sum()), -q * (B.T @ (np.sign(r) * a ** (q - 1)))

    res = optimize.minimize(fun, c0 / scale, jac=True, method="L-BFGS-B",
                            options={"maxiter": 2000, "gtol": 1e-14, "ftol": 1e-15})
    if not np.all(np.isfinite(res.x)):
        raise SolverError(f"l^{q} fit diverged: {res.message}")
    if not res.success and res.nit >= 2000:
        raise SolverError(f"l^{q} fit did not converge: {res.message}")
    return res.x * scale


def _linf_fit(y: np.ndarray, B: np.ndarray) -> np.ndarray:
    m, r = B.shape
    # variables (c, t): minimise t subject to |y - Bc| <= t
    A = np.block([[-B, -np.ones((m, 1))], [B, -np.ones((m, 1))]])
    b = np.concatenate([-y, y])
    cost = np.zeros(r + 1)
    cost[-1] = 1.0
    res = optimize.linprog(cost, A_ub=A, b_ub=b, bounds=[(None, None)] * r + [(0, None)],
                           method="highs")
    if res.status != 0:
        raise SolverError(f"Chebyshev fit failed: {res.message}")
    return res.x[:r]


def _l1_fit_lp(y: np.ndarray, B: np.ndarray) -> np.ndarray:
    m, r = B.shape
    # variables (c, e): minimise sum e subject to |y - Bc| <= e
    A = np.block([[-B, -np.eye(m)], [B, -np.eye(m)]])
    b = np.concatenate([-y, y])
    cost = np.concatenate([np.zeros(r), np.ones(m)])
    res = optimize.linprog(cost, A_ub=A, b_ub=b, bounds=[(None, None)] * r + [(0, None)] * m,
                           method="highs")
    if res.status != 0:
        raise SolverError(f"l1 fit failed: {res.message}")
    return res.x[:r]


def _prepare(Y, B):
    Y = np.asarray(Y, dtype=float)
    single = Y.ndim == 1
    Y = Y.reshape(Y.shape[0], -1)
    if B is None:
        B = np.zeros((Y.shape[0], 0))
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    if B.shape[0] != Y.shape[0]:
        raise ValueError(f"basis has {B.shape[0]} rows, vector has length {Y.shape[0]}")
    return Y, B, single


def distances(Y, B, q) -> np.ndarray:
    """dist_q(y_j, span B) for every column y_j of Y.

    Assumes B has full column rank (orthonormal columns are best conditioned).
    """
    q = as_exponent(q)
    Y, B, _ = _prepare(Y, B)
    m, r = B.shape
    if r == 0:
        return _norms(Y, q)
    if r >= m:
        return np.zeros(Y.shape[1])
    if q == 2:
        Qb = orthonormal_basis(B)
        R = Y - Qb @ (Qb.T @ Y)
        return np.sqrt((R * R).sum(axis=0))
    if q == 1 and m <= MAX_ENUM_DIM:
        return _l1_enum(Y, B)[0]
    if q == INF and m <= MAX_ENUM_DIM:
        return _linf_enum(Y, B)
    C = best_coefficients(Y, B, q)
    return _norms(Y - B @ C, q)


def chebyshev_duals(Y, B) -> tuple[np.ndarray, np.ndarray]:
    """(distances, W) in l^inf, where each column w of W has ||w||_1 = 1, B^T w = 0 and
    <w, y> equal to the distance. Requires at most MAX_ENUM_DIM rows."""
    Y, B, _ = _prepare(Y, B)
    if Y.shape[0] > MAX_ENUM_DIM or B.shape[1] == 0 or B.shape[1] >= Y.shape[0]:
        raise ValueError("chebyshev_duals needs 0 < rank < rows <= MAX_ENUM_DIM")
    return _linf_enum(Y, B, with_dual=True)


def annihilator_vertices(B, q) -> np.ndarray:
    """Vertices (one per sign pair, as columns) of {w : ||w||_{q'} <= 1, B^T w = 0}.

    For q in {1, inf} the distance to span B is the largest <w, y> over these
    vertices, so they turn quotient norms into finite maxima.
    """
    q = as_exponent(q)
    B = np.asarray(B, dtype=float)
    m, r = B.shape
    if m > MAX_ENUM_DIM or not 0 < r < m:
        raise ValueError(f"annihilator enumeration needs 0 < rank < rows <= {MAX_ENUM_DIM}")
    if q == INF:
        S = _subsets(m, r + 1)
        U, sv, _ = np.linalg.svd(B[S], full_matrices=True)
        ok = sv[:, -1] > 1e-10
        if not np.any(ok):
            raise SolverError("no rank-r row subset; basis is rank deficient")
        w = U[ok, :, -1]
        W = np.zeros((m, int(ok.sum())))
        W[S[ok].T, np.arange(W.shape[1])] = (w / np.abs(w).sum(axis=1, keepdims=True)).T
        return W
    if q == 1:
        # a vertex of the cube slice has at least m - r coordinates equal to +-1
        signs = None
        cols = []
        for free in _subsets(m, r):
            fixed = np.setdiff1d(np.arange(m), free)
            BF = B[free]
            if abs(np.linalg.det(BF)) <= 1e-12:
                continue
            if signs is None or signs.shape[0] != fixed.size:
                k = np.arange(2 ** (fixed.size - 1))[:, None]
                signs = np.ones((k.shape[0], fixed.size))
                signs[:, 1:] = 1 - 2 * ((k >> np.arange(fixed.size - 1)) & 1)
            wf = -np.linalg.solve(BF.T, B[fixed].T @ signs.T)  # (r, nsign)
            good = np.all(np.abs(wf) <= 1 + 1e-10, axis=0)
            W = np.zeros((m, int(good.sum())))
            W[fixed] = signs[good].T
            W[free] = np.clip(wf[:, good], -1.0, 1.0)
            cols.append(W)
        if not cols:
            raise SolverError("no invertible row subset; basis is rank deficient")
        return np.hstack(cols)
    raise ValueError(f"annihilator vertices are only finite for q in {{1, inf}}, got {q}")


def best_coefficients(Y, B, q) -> np.ndarray:
    """Coefficients C (r x J) with B @ C[:, j] a best l^q approximation of Y[:, j]."""
    q = as_exponent(q)
    Y, B, single = _prepare(Y, B)
    m, r = B.shape
    if r == 0:
        C = np.zeros((0, Y.shape[1]))
    elif q == 2:
        C = np.linalg.lstsq(B, Y, rcond=None)[0]
    elif q == 1 and m <= MAX_ENUM_DIM and r < m:
        C = _l1_enum(Y, B)[1]
    elif q == 1:
        C = np.column_stack([_l1_fit_lp(Y[:, j], B) for j in range(Y.shape[1])])
    elif q == INF:
        C = np.column_stack([_linf_fit(Y[:, j], B) for j in range(Y.shape[1])])
    else:
        C = np.column_stack([_lq_fit(Y[:, j], B, q) for j in range(Y.shape[1])])
    return C[:, 0] if single else C


def dist_to_subspace(y, B, q) -> float:
    """Distance in l^q from y to the span of the columns of B.

    ``B`` may be empty (shape (m, 0)) or None, in which case the distance is the
    norm of y. Results below ZERO_TOL * ||y||_q are reported as exactly 0.
    """
    q = as_exponent(q)
    y = np.asarray(y, dtype=float).ravel()
    if not np.all(np.isfinite(y)):
        raise ValueError("vector has non-finite entries")
    _, B, _ = _prepare(y, B)
    if B.shape[1] and np.linalg.matrix_rank(B) < B.shape[1]:
        B = orthonormal_basis(B)
    d = float(distances(y, B, q)[0])
    ny = vector_norm(y, q)
    if d <= ZERO_TOL * ny:
        return 0.0
    return min(d, ny)
