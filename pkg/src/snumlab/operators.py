"""Dense operators between finite l^p spaces and infinite matrices given by entry rules."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .spaces import NormedSpace, as_exponent, format_exponent


class SpaceMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteOperator:
    """A real m x n matrix acting from ``dom`` (dim n) into ``cod`` (dim m).

    ``adjoint_of_original`` is the adjoint marker: it flips each time
    :func:`adjoint` is applied.
    """

    matrix: np.ndarray
    dom: NormedSpace
    cod: NormedSpace
    adjoint_of_original: bool = False

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float)
        if M.ndim != 2:
            raise ValueError(f"operator matrix must be 2-d, got shape {M.shape}")
        if M.shape != (self.cod.dim, self.dom.dim):
            raise SpaceMismatch(
                f"matrix shape {M.shape} does not match {self.cod} <- {self.dom}")
        if not np.all(np.isfinite(M)):
            raise ValueError("operator matrix has non-finite entries")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @classmethod
    def from_matrix(cls, M, p, q) -> "FiniteOperator":
        M = np.atleast_2d(np.asarray(M, dtype=float))
        return cls(M, NormedSpace(M.shape[1], p), NormedSpace(M.shape[0], q))

    @property
    def p(self) -> float:
        return self.dom.p

    @property
    def q(self) -> float:
        return self.cod.p

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def with_matrix(self, M) -> "FiniteOperator":
        return FiniteOperator(M, self.dom, self.cod)

    def same_as(self, other: "FiniteOperator") -> bool:
        return (self.dom == other.dom and self.cod == other.cod
                and np.array_equal(self.matrix, other.matrix))

    def __repr__(self):
        return f"FiniteOperator({self.cod} <- {self.dom}, {self.matrix.tolist()})"


def identity(n: int, p) -> FiniteOperator:
    return FiniteOperator.from_matrix(np.eye(n), p, p)


def diagonal(values, p, q=None) -> FiniteOperator:
    return FiniteOperator.from_matrix(np.diag(np.asarray(values, dtype=float)), p,
                                      p if q is None else q)


def apply(T: FiniteOperator, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (T.dom.dim,):
        raise SpaceMismatch(f"vector of shape {x.shape} not in {T.dom}")
    return T.matrix @ x


def adjoint(T: FiniteOperator) -> FiniteOperator:
    """The transpose acting l^{q'} -> l^{p'}."""
    return FiniteOperator(T.matrix.T, T.cod.dual, T.dom.dual, not T.adjoint_of_original)


def compose(A: FiniteOperator, B: FiniteOperator) -> FiniteOperator:
    """A after B."""
    if B.cod != A.dom:
        raise SpaceMismatch(f"cannot compose: {B.cod} is not {A.dom}")
    return FiniteOperator(A.matrix @ B.matrix, B.dom, A.cod)


def add(A: FiniteOperator, B: FiniteOperator) -> FiniteOperator:
    if A.dom != B.dom or A.cod != B.cod:
        raise SpaceMismatch("cannot add operators between different spaces")
    return FiniteOperator(A.matrix + B.matrix, A.dom, A.cod)


def subtract(A: FiniteOperator, B: FiniteOperator) -> FiniteOperator:
    return add(A, scale(-1.0, B))


def scale(c: float, T: FiniteOperator) -> FiniteOperator:
    return FiniteOperator(float(c) * T.matrix, T.dom, T.cod)


@dataclass(frozen=True)
class SequenceOperator:
    """An infinite matrix on N x N (1-based) between sequence spaces.

    ``tail_bound(n)`` bounds the norm of what the n x n section discards;
    ``known_snumbers(kind, k)`` returns an analytic s_k or None.
    """

    id: str
    entry: Callable[[int, int], float]
    dom_p: float
    cod_q: float
    tail_bound: Optional[Callable[[int], float]] = None
    known_snumbers: Optional[Callable[[object, int], Optional[float]]] = None
    description: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "dom_p", as_exponent(self.dom_p))
        object.__setattr__(self, "cod_q", as_exponent(self.cod_q))

    def block(self, rows: int, cols: int) -> np.ndarray:
        M = np.empty((rows, cols))
        for i in range(rows):
            for j in range(cols):
                M[i, j] = float(self.entry(i + 1, j + 1))
        if not np.all(np.isfinite(M)):
            raise ValueError(f"entry rule of {self.id!r} produced non-finite values")
        return M

    def known(self, kind, k: int) -> Optional[float]:
        if self.known_snumbers is None:
            return None
        return self.known_snumbers(kind, k)


def finite_section(Tinf: SequenceOperator, n: int) -> FiniteOperator:
    """The leading n x n block, i.e. Q_n T P_n for coordinate projections."""
    if int(n) != n or n < 1:
        raise ValueError(f"section size must be a positive integer, got {n!r}")
    n = int(n)
    return FiniteOperator(Tinf.block(n, n), NormedSpace(n, Tinf.dom_p), NormedSpace(n, Tinf.cod_q))


# JSON literals ---------------------------------------------------------------

def _exponent_field(doc: dict, key: str, override=None) -> float:
    if override is not None:
        return as_exponent(override)
    if key not in doc:
        raise ValueError(f"operator document lacks {key!r}")
    return as_exponent(doc[key])


def operator_from_dict(doc: dict, p=None, q=None) -> FiniteOperator:
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise ValueError("operator document must be an object with a 'matrix' field")
    rows = doc["matrix"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValueError("'matrix' must be a non-empty list of rows")
    if len({len(r) for r in rows}) != 1 or not rows[0]:
        raise ValueError("'matrix' rows must be non-empty and of equal length")
    try:
        M = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"'matrix' entries must be numbers: {exc}") from None
    return FiniteOperator.from_matrix(M, _exponent_field(doc, "dom_p", p),
                                      _exponent_field(doc, "cod_q", q))


def operator_to_dict(T: FiniteOperator) -> dict:
    return {"matrix": T.matrix.tolist(), "dom_p": format_exponent(T.p),
            "cod_q": format_exponent(T.q)}


def load_operator(path, p=None, q=None) -> FiniteOperator:
    with open(path) as fh:
        doc = json.load(fh)
    return operator_from_dict(doc, p, q)
