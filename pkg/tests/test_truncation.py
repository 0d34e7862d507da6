import json

import numpy as np
import pytest

from snumlab.gallery import get_entry
from snumlab.operators import SequenceOperator, diagonal
from snumlab.snumbers import SNumberKind
from snumlab.spaces import INF, NormedSpace
from snumlab.truncation import (HypothesisRefused, SchemeKind, TruncationScheme, aitken,
                                check_hypothesis, convergence_experiment, coordinate_projection,
                                coordinate_scheme, parse_csv, reports_to_csv, reports_to_json,
                                truncate, weakstar_residual)


def test_coordinate_projection():
    E = coordinate_projection(2, 3, NormedSpace(3, 1))
    assert np.array_equal(E.matrix, np.diag([1.0, 1.0, 0.0]))
    assert np.array_equal(coordinate_projection(3, 3, NormedSpace(3, 2)).matrix, np.eye(3))
    D = diagonal([5, 4, 3], 2)
    assert np.array_equal((E.matrix @ D.matrix), np.diag([5.0, 4.0, 0.0]))
    with pytest.raises(ValueError):
        coordinate_projection(4, 3, NormedSpace(3, 1))


def test_weakstar_residual():
    harmonic = get_entry("diag_harmonic").operator
    ident = get_entry("identity_l1").operator
    hilbert = get_entry("hilbert_matrix").operator
    two = coordinate_scheme("two_sided", 2, 2)
    assert weakstar_residual(ident, coordinate_scheme("two_sided", 1, 1), 5, 4) == 0.0
    assert weakstar_residual(harmonic, two, 4, 4) == 0.0
    # discarded block of the 6x6 grid when n = 3: largest entry is 1/(1 + 4 - 1)
    assert weakstar_residual(hilbert, two, 3, 6) == pytest.approx(1 / 4)
    with pytest.raises(ValueError):
        weakstar_residual(hilbert, two, 3, 0)


def test_one_sided_sections():
    op = get_entry("hilbert_matrix").operator
    left = truncate(op, coordinate_scheme("left_only", 2, 2), 2, ambient=4).matrix
    right = truncate(op, coordinate_scheme("right_only", 2, 2), 2, ambient=4).matrix
    full = op.block(4, 4)
    assert np.array_equal(left[:2], full[:2]) and not np.any(left[2:])
    assert np.array_equal(right[:, :2], full[:, :2]) and not np.any(right[:, 2:])


def test_harmonic_approximation_sweep():
    op = get_entry("diag_harmonic").operator
    rep = convergence_experiment(op, coordinate_scheme("two_sided", 2, 2), "approximation", 3,
                                 range(1, 9))
    assert [r.n for r in rep.rows] == list(range(1, 9))
    for r in rep.rows:
        assert r.value <= 1 / 3 + 1e-6
        if r.n >= 3:
            assert r.value == pytest.approx(1 / 3, abs=1e-12) and r.residual <= 1e-12
    assert rep.upper_bounded and rep.monotone_observed and rep.converged


def test_identity_kolmogorov_sweep():
    op = get_entry("identity_l1").operator
    rep = convergence_experiment(op, coordinate_scheme("two_sided", 1, 1), "kolmogorov", 2,
                                 range(2, 7))
    assert all(r.value == pytest.approx(1.0, abs=1e-9) for r in rep.rows)


@pytest.mark.parametrize("gid,p", [("diag_harmonic", None), ("weighted_shift", None),
                                   ("diag_geometric", 1), ("diag_geometric", INF)])
def test_two_sided_approximation_is_upper_bounded(gid, p):
    op = get_entry(gid, p).operator
    for k in (1, 2):
        rep = convergence_experiment(op, coordinate_scheme("two_sided", op.dom_p, op.cod_q),
                                     "a", k, [1, 2, 3, 4])
        assert rep.upper_bounded


def test_hypothesis_guard():
    op = get_entry("diag_harmonic").operator
    bad = coordinate_scheme("two_sided", 2, 2, scale=2.0)
    with pytest.raises(HypothesisRefused):
        convergence_experiment(op, bad, "a", 1, [1, 2])
    base = coordinate_scheme("two_sided", 2, 2)
    uncertified = TruncationScheme(SchemeKind.TWO_SIDED, base.P, base.Q, lambda n: None)
    assert check_hypothesis(uncertified, 2, 2).startswith("computed")


def test_extrapolated_reference():
    op = get_entry("hilbert_matrix").operator
    rep = convergence_experiment(op, coordinate_scheme("two_sided", 2, 2), "a", 2, [2, 3, 4])
    assert rep.reference_source == "extrapolated"
    assert rep.upper_bounded is None and not rep.converged
    assert all("extrapolated" in r.flags for r in rep.rows)


def test_aitken():
    vals = [1 - 0.5 ** n for n in range(1, 6)]
    assert aitken(vals) == pytest.approx(1.0)
    assert aitken([0.3]) == 0.3
    assert aitken([0.2, 0.2, 0.2]) == 0.2


def test_solver_failure_recorded(monkeypatch):
    import snumlab.truncation as tr
    from snumlab.spaces import SolverError

    def boom(*args, **kwargs):
        raise SolverError("no convergence")
    monkeypatch.setattr(tr, "s_number", boom)
    op = get_entry("diag_harmonic").operator
    rep = tr.convergence_experiment(op, coordinate_scheme("two_sided", 2, 2), "a", 1, [1, 2])
    assert all(np.isnan(r.value) and "failed:SolverError" in r.flags for r in rep.rows)


def test_bad_n_values():
    op = get_entry("diag_harmonic").operator
    with pytest.raises(ValueError):
        convergence_experiment(op, coordinate_scheme("two_sided", 2, 2), "a", 1, [3, 2])


def test_csv_roundtrip_and_determinism():
    op = get_entry("diag_harmonic").operator
    scheme = coordinate_scheme("two_sided", 2, 2)
    reps = [convergence_experiment(op, scheme, "a", k, range(1, 5)) for k in (2, 1)]
    text = reports_to_csv(reps)
    assert text == reports_to_csv([convergence_experiment(op, scheme, "a", k, range(1, 5))
                                   for k in (2, 1)])
    rows = parse_csv(text)
    assert [r["flags"][1] for r in rows] == ["k=1"] * 4 + ["k=2"] * 4
    flat = [r for rep in sorted(reps, key=lambda r: r.k) for r in rep.rows]
    for parsed, row in zip(rows, flat):
        assert parsed["n"] == row.n
        assert parsed["value"] == pytest.approx(row.value, rel=1e-11)
        assert parsed["reference"] == pytest.approx(row.reference, rel=1e-11)
    doc = json.loads(reports_to_json(reps))
    assert [d["k"] for d in doc["reports"]] == [1, 2]


def test_inline_operator_sequence():
    op = SequenceOperator("tiny", lambda i, j: 1.0 if i == j == 1 else 0.0, 2, 2,
                          known_snumbers=lambda kind, k: 1.0 if k == 1 else 0.0)
    rep = convergence_experiment(op, coordinate_scheme("left_only", 2, 2), SNumberKind.GELFAND,
                                 1, [1, 2])
    assert rep.converged and rep.rows[0].residual == 0.0
