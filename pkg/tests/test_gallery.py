import numpy as np
import pytest

from snumlab.gallery import GALLERY_IDS, gallery, get_entry
from snumlab.operators import FiniteOperator, finite_section
from snumlab.opnorm import operator_norm
from snumlab.oracle import OracleBudget, oracle_approximation_number
from snumlab.snumbers import SNumberKind, approximation_number
from snumlab.spaces import INF


def test_ids_are_stable():
    assert GALLERY_IDS == ("identity_l1", "diag_harmonic", "diag_geometric", "hilbert_matrix",
                           "weighted_shift")
    assert list(gallery()) == list(GALLERY_IDS)
    with pytest.raises(KeyError):
        get_entry("nope")
    with pytest.raises(ValueError):
        get_entry("identity_l1", p=2)


def test_known_values():
    g = gallery()
    assert g["identity_l1"].known_snumbers(SNumberKind.KOLMOGOROV, 5) == 1.0
    assert g["diag_harmonic"].known_snumbers("approximation", 4) == 0.25
    assert g["hilbert_matrix"].known_snumbers("a", 1) is None
    assert g["diag_geometric"].known_snumbers("weyl", 2) is None
    assert get_entry("diag_geometric", p=2).known_snumbers("weyl", 3) == 0.25
    for entry in g.values():
        assert entry.provenance


def test_weighted_shift_section():
    S = finite_section(get_entry("weighted_shift").operator, 3).matrix
    assert np.allclose(np.linalg.svd(S, compute_uv=False), [1, 0.5, 0])


@pytest.mark.parametrize("gid", ["diag_harmonic", "weighted_shift"])
def test_hilbert_entries_match_svd(gid):
    op = get_entry(gid).operator
    sigma = np.linalg.svd(finite_section(op, 12).matrix, compute_uv=False)
    for k in range(1, 8):
        assert sigma[k - 1] == pytest.approx(op.known("a", k), abs=1e-10)


def test_harmonic_tail_brackets_norm():
    op = get_entry("diag_harmonic").operator
    for n in range(1, 6):
        sec = operator_norm(finite_section(op, n)).value
        assert sec <= 1.0 <= sec + op.tail_bound(n)
    assert [op.tail_bound(n) for n in range(1, 5)] == sorted(
        [op.tail_bound(n) for n in range(1, 5)], reverse=True)


@pytest.mark.parametrize("p", [1, INF])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_geometric_values_validated_by_oracle(p, n):
    op = get_entry("diag_geometric", p=p).operator
    T = finite_section(op, n)
    for k in range(1, min(n, 3) + 1):
        known = op.known("a", k)
        upper = oracle_approximation_number(T, k, OracleBudget(600, 80, 1))
        assert known <= upper + 1e-9
        assert upper == pytest.approx(known, rel=1e-3)
        assert approximation_number(T, k).value == pytest.approx(known, rel=1e-9)
