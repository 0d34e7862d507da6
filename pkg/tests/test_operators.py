import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from snumlab.operators import (FiniteOperator, SequenceOperator, SpaceMismatch, add, adjoint,
                               apply, compose, diagonal, finite_section, identity,
                               load_operator, operator_from_dict, operator_to_dict, scale)
from snumlab.oracle import oracle_norm
from snumlab.spaces import INF, NormedSpace, dual_exponent

PALETTE = [1, 4 / 3, 2, 4, INF]


@pytest.mark.parametrize("T,x,expected", [
    (identity(2, 2), [1, 2], [1, 2]),
    (diagonal([3, 1], 2), [1, 1], [3, 1]),
    (FiniteOperator.from_matrix(np.zeros((2, 2)), 2, 2), [5, 7], [0, 0]),
])
def test_apply(T, x, expected):
    assert apply(T, x).tolist() == expected


def test_apply_dimension_mismatch():
    with pytest.raises(SpaceMismatch):
        apply(identity(2, 2), [1, 2, 3])


def test_adjoint_spaces():
    M = np.arange(6.0).reshape(2, 3)
    T = FiniteOperator.from_matrix(M, 1, 2)
    Ta = adjoint(T)
    assert Ta.dom == NormedSpace(2, 2) and Ta.cod == NormedSpace(3, INF)
    assert np.array_equal(Ta.matrix, M.T)
    assert Ta.adjoint_of_original
    assert adjoint(Ta).same_as(T) and not adjoint(Ta).adjoint_of_original
    assert adjoint(identity(2, 2)).same_as(identity(2, 2))


@given(st.integers(0, 10_000), st.sampled_from(PALETTE), st.sampled_from(PALETTE))
def test_adjoint_is_involution(seed, p, q):
    T = FiniteOperator.from_matrix(np.random.default_rng(seed).standard_normal((2, 3)), p, q)
    assert adjoint(adjoint(T)).same_as(T)


def test_adjoint_preserves_norm_by_oracle(rng):
    for i in range(20):
        p, q = PALETTE[i % 5], PALETTE[(3 * i + 1) % 5]
        M = rng.standard_normal((3, 3))
        a = oracle_norm(M, p, q, budget=3000, seed=i)
        b = oracle_norm(M.T, dual_exponent(q), dual_exponent(p), budget=3000, seed=i)
        assert a == pytest.approx(b, rel=2e-3)


def test_algebra():
    T = FiniteOperator.from_matrix([[1, 2], [3, 4]], 1, 2)
    assert compose(identity(2, 2), T).same_as(T)
    P = identity(2, 1)
    Q = identity(2, 2)
    S = compose(Q, compose(T, P))
    assert S.dom == T.dom and S.cod == T.cod
    assert scale(2, diagonal([1], 2)).same_as(diagonal([2], 2))
    assert np.array_equal(add(T, T).matrix, 2 * T.matrix)
    with pytest.raises(SpaceMismatch):
        compose(T, identity(2, 2))
    with pytest.raises(SpaceMismatch):
        add(T, identity(2, 2))


def test_submultiplicative_by_oracle(rng):
    for i in range(5):
        A = FiniteOperator.from_matrix(rng.standard_normal((3, 3)), 2, 1)
        B = FiniteOperator.from_matrix(rng.standard_normal((3, 3)), INF, 2)
        AB = compose(A, B)
        nab = oracle_norm(AB.matrix, INF, 1, seed=i)
        na = oracle_norm(A.matrix, 2, 1, seed=i)
        nb = oracle_norm(B.matrix, INF, 2, seed=i)
        assert nab <= na * nb * (1 + 1e-3) + 1e-6


def test_validation():
    with pytest.raises(ValueError):
        FiniteOperator.from_matrix([[1, np.nan]], 2, 2)
    with pytest.raises(SpaceMismatch):
        FiniteOperator(np.eye(2), NormedSpace(3, 2), NormedSpace(2, 2))
    T = identity(2, 2)
    with pytest.raises(ValueError):
        T.matrix[0, 0] = 5.0


def test_finite_sections():
    ident = SequenceOperator("id", lambda i, j: float(i == j), 1, 1)
    harmonic = SequenceOperator("h", lambda i, j: 1 / i if i == j else 0.0, 2, 2)
    hilbert = SequenceOperator("hil", lambda i, j: 1 / (i + j - 1), 2, 2)
    assert np.array_equal(finite_section(ident, 3).matrix, np.eye(3))
    assert np.array_equal(finite_section(harmonic, 2).matrix, np.diag([1, 0.5]))
    assert np.allclose(finite_section(hilbert, 2).matrix, [[1, 0.5], [0.5, 1 / 3]])
    assert np.array_equal(finite_section(hilbert, 4).matrix, finite_section(hilbert, 4).matrix)
    with pytest.raises(ValueError):
        finite_section(ident, 0)


def test_json_roundtrip(tmp_path):
    T = FiniteOperator.from_matrix([[1.5, -2], [0, 3]], 1, INF)
    doc = operator_to_dict(T)
    assert doc["cod_q"] == "inf"
    path = tmp_path / "op.json"
    path.write_text(json.dumps(doc))
    assert load_operator(path).same_as(T)
    assert load_operator(path, p=2).p == 2


@pytest.mark.parametrize("doc", [{}, {"matrix": []}, {"matrix": [[1, 2], [3]]},
                                 {"matrix": [["a"]], "dom_p": 1, "cod_q": 1},
                                 {"matrix": [[1]], "dom_p": 0.5, "cod_q": 1},
                                 {"matrix": [[1]], "dom_p": 1}])
def test_json_rejects_malformed(doc):
    with pytest.raises(ValueError):
        operator_from_dict(doc)
