"""Infinite matrices whose s-numbers are known in closed form (or deliberately not)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .operators import SequenceOperator
from .snumbers import SNumberKind
from .spaces import INF, as_exponent, format_exponent

_ALL = frozenset(SNumberKind)
_SUB_WEYL = frozenset({SNumberKind.APPROXIMATION, SNumberKind.KOLMOGOROV, SNumberKind.GELFAND})


@dataclass(frozen=True)
class GalleryEntry:
    id: str
    operator: SequenceOperator
    provenance: str

    @property
    def known_snumbers(self):
        return self.operator.known

    @property
    def has_known_values(self) -> bool:
        return self.operator.known_snumbers is not None


def _known(rule, kinds):
    def known(kind, k):
        kind = SNumberKind.parse(kind)
        if int(k) != k or k < 1:
            raise ValueError(f"k must be a positive integer, got {k!r}")
        return rule(int(k)) if kind in kinds else None
    return known


def identity_l1() -> GalleryEntry:
    op = SequenceOperator(
        "identity_l1", lambda i, j: 1.0 if i == j else 0.0, 1, 1,
        known_snumbers=_known(lambda k: 1.0,
                              {SNumberKind.KOLMOGOROV, SNumberKind.APPROXIMATION}),
        description="identity on l^1")
    return GalleryEntry(op.id, op, "classical width computation: d_k(I) = 1 on l^1, and "
                                   "a_k = 1 follows from d_k <= a_k <= ||I|| = 1")


def diag_harmonic() -> GalleryEntry:
    op = SequenceOperator(
        "diag_harmonic", lambda i, j: 1.0 / i if i == j else 0.0, 2, 2,
        tail_bound=lambda n: 1.0 / (n + 1),
        known_snumbers=_known(lambda k: 1.0 / k, _ALL),
        description="diag(1/i) on l^2")
    return GalleryEntry(op.id, op, "singular values of a diagonal operator; all s-numbers "
                                   "coincide on Hilbert spaces")


def diag_geometric(p=INF) -> GalleryEntry:
    p = as_exponent(p)
    kinds = _ALL if p == 2 else _SUB_WEYL
    op = SequenceOperator(
        "diag_geometric", lambda i, j: 2.0 ** (1 - i) if i == j else 0.0, p, p,
        tail_bound=lambda n: 2.0 ** (-n),
        known_snumbers=_known(lambda k: 2.0 ** (1 - k), kinds),
        description=f"diag(2^(1-i)) on l^{format_exponent(p)}")
    return GalleryEntry(op.id, op, "diagonal operator with nonincreasing entries on l^p: "
                                   "a_k = d_k = c_k = k-th entry; checked against the brute-force "
                                   "oracle on sections n <= 4 for p in {1, inf}")


def hilbert_matrix() -> GalleryEntry:
    op = SequenceOperator("hilbert_matrix", lambda i, j: 1.0 / (i + j - 1), 2, 2,
                          description="Hilbert matrix 1/(i+j-1) on l^2")
    return GalleryEntry(op.id, op, "no closed form; reports use extrapolated references")


def weighted_shift() -> GalleryEntry:
    op = SequenceOperator(
        "weighted_shift", lambda i, j: 1.0 / j if i == j + 1 else 0.0, 2, 2,
        tail_bound=lambda n: 1.0 / n,
        known_snumbers=_known(lambda k: 1.0 / k, _ALL),
        description="e_i -> e_{i+1} / i on l^2")
    return GalleryEntry(op.id, op, "T*T = diag(1/i^2), so the singular values are 1/i")


_BUILDERS = {
    "identity_l1": identity_l1,
    "diag_harmonic": diag_harmonic,
    "diag_geometric": diag_geometric,
    "hilbert_matrix": hilbert_matrix,
    "weighted_shift": weighted_shift,
}

GALLERY_IDS = tuple(_BUILDERS)


def gallery() -> dict:
    """All entries keyed by id, in a fixed order."""
    return {name: build() for name, build in _BUILDERS.items()}


def get_entry(entry_id: str, p: Optional[float] = None) -> GalleryEntry:
    """Look an entry up by id; ``p`` re-targets diag_geometric to another l^p."""
    if entry_id not in _BUILDERS:
        raise KeyError(f"unknown gallery id {entry_id!r}; known ids: {', '.join(GALLERY_IDS)}")
    if p is not None:
        if entry_id != "diag_geometric":
            raise ValueError(f"gallery entry {entry_id!r} has fixed exponents")
        return diag_geometric(p)
    return _BUILDERS[entry_id]()
