import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snumlab.operators import FiniteOperator, adjoint, diagonal, identity
from snumlab.opnorm import matrix_norm, operator_norm, oracle_operator_norm
from snumlab.oracle import OracleBudget, _section_sup, oracle_approximation_number
from snumlab.snumbers import (FAST_SETTINGS, SNumberKind, approximation_number, chang_number,
                              gelfand_number, gelfand_via_ak, kolmogorov_number,
                              kolmogorov_via_ak, numerical_rank, quotient_sup, s_number,
                              s_sequence, weyl_number)
from snumlab.spaces import INF, dual_exponent

KINDS = list(SNumberKind)
SOLVERS = {SNumberKind.APPROXIMATION: approximation_number,
           SNumberKind.KOLMOGOROV: kolmogorov_number, SNumberKind.GELFAND: gelfand_number,
           SNumberKind.WEYL: weyl_number, SNumberKind.CHANG: chang_number}
EXACT_PAIRS = [(1, 1), (1, 2), (2, 2), (2, INF), (INF, INF), (1, INF), (INF, 1)]

# brute-force upper bound from oracle_weyl(I_2 on l^1, k=2, samples=10**4, seed=0)
ORACLE_X2_IDENTITY_L1 = 0.7056015715391266


def rank_one(rng, m, n, p, q):
    return FiniteOperator.from_matrix(np.outer(rng.standard_normal(m), rng.standard_normal(n)),
                                      p, q)


def test_kind_parsing():
    assert SNumberKind.parse("d") is SNumberKind.KOLMOGOROV
    assert SNumberKind.parse("Weyl") is SNumberKind.WEYL
    with pytest.raises(ValueError):
        SNumberKind.parse("hilbert")
    with pytest.raises(ValueError):
        approximation_number(identity(2, 2), 0)


@pytest.mark.parametrize("kind", KINDS)
def test_diag_hilbert_second_value(kind):
    assert s_number(diagonal([3, 1], 2), 2, kind).value == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("pq", EXACT_PAIRS)
def test_first_value_is_norm(kind, pq, rng):
    T = FiniteOperator.from_matrix(rng.standard_normal((2, 3)), *pq)
    assert s_number(T, 1, kind).value == pytest.approx(operator_norm(T).value, rel=1e-9)


@pytest.mark.parametrize("kind", KINDS)
def test_beyond_dimension_is_zero(kind, rng):
    T = FiniteOperator.from_matrix(rng.standard_normal((2, 3)), 1, INF)
    assert s_number(T, 3, kind).value == 0.0


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("pq", [(1, 1), (2, INF), (INF, 2)])
def test_rank_one_vanishes_at_two(kind, pq, rng):
    assert s_number(rank_one(rng, 3, 3, *pq), 2, kind).value <= 1e-9


def test_identity_l1_widths():
    I3 = identity(3, 1)
    assert kolmogorov_number(I3, 2).value == pytest.approx(1.0, abs=1e-9)
    res = approximation_number(identity(2, 1), 2)
    assert res.value == pytest.approx(1.0, abs=1e-9)


def test_identity_l1_approximation_by_oracle():
    upper = oracle_approximation_number(identity(2, 1), 2, OracleBudget(400, 60, 0))
    assert 1 - 1e-3 <= approximation_number(identity(2, 1), 2).value <= upper + 1e-9


def test_gelfand_identity_linf():
    T = identity(2, INF)
    val = gelfand_number(T, 2).value
    assert 0 <= val <= 1 + 1e-12
    assert val == pytest.approx(gelfand_via_ak(T, 2), rel=2e-2)


def test_weyl_identity_l1_bracket():
    val = weyl_number(identity(2, 1), 2).value
    assert ORACLE_X2_IDENTITY_L1 - 1e-9 <= val <= approximation_number(identity(2, 1), 2).value
    # R = I / sqrt(2) attains 1 / sqrt(2)
    assert val == pytest.approx(2 ** -0.5, abs=1e-9)


def test_chang_diag_l1_first_value():
    from snumlab.oracle import oracle_chang
    T = diagonal([2, 1], 1)
    val = chang_number(T, 1).value
    assert val == pytest.approx(2.0, abs=1e-9)
    assert oracle_chang(T, 1, samples=2000) <= val + 1e-9


@pytest.mark.parametrize("pq", EXACT_PAIRS)
def test_approximation_witness_attains_value(pq, rng):
    T = FiniteOperator.from_matrix(rng.standard_normal((3, 3)), *pq)
    for k in (2, 3):
        res = approximation_number(T, k)
        F = res.witness["F"]
        assert numerical_rank(F) < k
        assert matrix_norm(T.matrix - F, *pq)[0] == pytest.approx(res.value, rel=1e-8, abs=1e-12)


@pytest.mark.parametrize("pq", [(1, 1), (INF, 2), (2, INF), (1, INF)])
def test_kolmogorov_witness(pq, rng):
    T = FiniteOperator.from_matrix(rng.standard_normal((3, 3)), *pq)
    res = kolmogorov_number(T, 2)
    B = res.witness["basis"]
    assert B.shape == (3, 1)
    assert quotient_sup(T.matrix, B, *pq)[0] >= res.value - 1e-8


@pytest.mark.parametrize("pq", [(1, 1), (INF, INF), (INF, 1), (1, INF)])
def test_gelfand_witness_primal(pq, rng):
    T = FiniteOperator.from_matrix(rng.standard_normal((3, 3)), *pq)
    res = gelfand_number(T, 2)
    A = res.witness["constraints"]
    Z = np.linalg.svd(A)[2][A.shape[0]:].T
    primal = _section_sup(T.matrix, Z, T.p, T.q, np.random.default_rng(0))
    assert primal == pytest.approx(res.value, rel=1e-8)


def test_weyl_witness_is_contraction(rng):
    T = FiniteOperator.from_matrix(rng.standard_normal((3, 3)), 1, INF)
    res = weyl_number(T, 2)
    R = res.witness["contraction"]
    assert matrix_norm(R, 2, 1)[0] <= 1 + 1e-9
    assert res.bound_side in ("lower", "two_sided")
    ares = chang_number(T, 2)
    S = ares.witness["contraction"]
    assert matrix_norm(S, INF, 2)[0] <= 1 + 1e-9


def test_via_ak_examples(rng):
    assert kolmogorov_via_ak(identity(2, 1), 2) == pytest.approx(1.0, abs=1e-9)
    assert kolmogorov_via_ak(rank_one(rng, 2, 2, INF, 1), 2) <= 1e-9
    T = FiniteOperator.from_matrix(rng.standard_normal((2, 2)), INF, 2)
    assert kolmogorov_via_ak(T, 2) == pytest.approx(kolmogorov_number(T, 2).value, rel=2e-2)
    D = FiniteOperator.from_matrix(np.diag([3.0, 1.0]), 2, 1)
    assert gelfand_via_ak(D, 2) == pytest.approx(gelfand_number(D, 2).value, rel=2e-2)
    assert gelfand_via_ak(D, 1) == pytest.approx(operator_norm(D).value)
    assert gelfand_via_ak(D, 3) == 0.0
    with pytest.raises(ValueError):
        kolmogorov_via_ak(identity(2, 2), 1)
    with pytest.raises(ValueError):
        gelfand_via_ak(identity(2, 2), 1)


def test_gelfand_functional_net_is_lower_approximation(rng):
    T = FiniteOperator.from_matrix(rng.standard_normal((3, 3)), 2, 4)
    net = gelfand_via_ak(T, 1, functional_net=200)
    assert net <= operator_norm(T).value * (1 + 1e-9) + 1e-9
    assert net >= 0.9 * operator_norm(T).value


@pytest.mark.parametrize("n", [4, 5])
def test_hilbert_coincidence(n, rng):
    M = rng.standard_normal((n, n))
    T = FiniteOperator.from_matrix(M, 2, 2)
    sigma = np.linalg.svd(M, compute_uv=False)
    for kind in KINDS:
        vals = s_sequence(T, 3, kind)
        assert np.allclose(vals, sigma[:3], rtol=1e-3), kind


@pytest.mark.parametrize("kind", KINDS)
def test_sequences_match_single_calls(kind, rng):
    T = FiniteOperator.from_matrix(rng.standard_normal((3, 3)), 1, 1)
    seq = s_sequence(T, 4, kind)
    assert all(b <= a + 1e-12 for a, b in zip(seq, seq[1:]))
    assert seq[3] == 0.0
    for k in (2, 3):
        assert SOLVERS[kind](T, k).value == pytest.approx(seq[k - 1], rel=1e-9)


def test_determinism(rng):
    T = FiniteOperator.from_matrix(rng.standard_normal((3, 3)), INF, 2)
    for kind in KINDS:
        assert s_number(T, 2, kind, seed=7).value == s_number(T, 2, kind, seed=7).value


@settings(max_examples=8)
@given(st.integers(0, 10_000), st.sampled_from(EXACT_PAIRS))
def test_monotone_and_dominated(seed, pq):
    T = FiniteOperator.from_matrix(np.random.default_rng(seed).standard_normal((2, 3)), *pq)
    a = s_sequence(T, 3, "a", settings=FAST_SETTINGS)
    assert all(b <= x + 1e-12 for x, b in zip(a, a[1:]))
    for kind in ("d", "c"):
        s = s_sequence(T, 3, kind, settings=FAST_SETTINGS)
        assert all(x <= y + 1e-6 for x, y in zip(s, a))


@settings(max_examples=15)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_lipschitz_on_hilbert(seed, k):
    rng = np.random.default_rng(seed)
    A = FiniteOperator.from_matrix(rng.standard_normal((3, 3)), 2, 2)
    B = A.with_matrix(A.matrix + 0.3 * rng.standard_normal((3, 3)))
    gap = abs(approximation_number(A, k).value - approximation_number(B, k).value)
    dist = oracle_operator_norm(A.with_matrix(A.matrix - B.matrix), budget=4000)
    assert gap <= dist + 2e-3


@pytest.mark.parametrize("pq", EXACT_PAIRS)
def test_complete_symmetry(pq, rng):
    T = FiniteOperator.from_matrix(rng.standard_normal((3, 3)), *pq)
    for k in (1, 2):
        a = approximation_number(T, k).value
        b = approximation_number(adjoint(T), k).value
        assert a == pytest.approx(b, rel=2e-2)


def test_adjoint_exponents_route_gelfand(rng):
    T = FiniteOperator.from_matrix(rng.standard_normal((3, 2)), INF, 1)
    c = gelfand_number(T, 2).value
    d_adj = kolmogorov_number(adjoint(T), 2).value
    assert c == pytest.approx(d_adj, rel=1e-6)
    assert dual_exponent(T.q) == INF


@pytest.mark.parametrize("kind", [SNumberKind.KOLMOGOROV, SNumberKind.GELFAND])
def test_cached_sequences_match_cold_runs(rng, kind):
    import snumlab.snumbers as sn
    T = FiniteOperator.from_matrix(rng.standard_normal((4, 4)), 1, INF)
    incremental = [s_number(T, k, kind, settings=FAST_SETTINGS).value for k in range(1, 5)]
    sn._KOLMOGOROV_MEMO.clear()
    sn._APPROXIMANT_MEMO.clear()
    cold = s_sequence(T, 4, kind, settings=FAST_SETTINGS)
    assert incremental == cold
