"""Randomised checks of the s-number axioms against the solvers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .operators import FiniteOperator
from .opnorm import operator_norm
from .snumbers import SNumberKind, numerical_rank, s_sequence
from .spaces import INF, format_exponent

PROPERTIES = ("monotone", "rank", "norm", "domination", "lipschitz")
EXPONENT_PAIRS = ((1, 1), (1, 2), (2, 2), (2, INF), (INF, INF), (1, INF))
REL_TOL = 1e-6

Solver = Callable[[FiniteOperator, int, SNumberKind, int], list]


def default_solver(T: FiniteOperator, kmax: int, kind: SNumberKind, seed: int) -> list:
    return s_sequence(T, kmax, kind, seed=seed)


@dataclass
class AxiomReport:
    seed: int
    trials: int
    passed: dict = field(default_factory=lambda: {p: 0 for p in PROPERTIES})
    checked: dict = field(default_factory=lambda: {p: 0 for p in PROPERTIES})
    counterexample: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.counterexample is None

    def lines(self) -> list:
        return [f"{p}: {self.passed[p]}/{self.checked[p]} passed" for p in PROPERTIES]


def random_instance(rng: np.random.Generator, trial: int) -> FiniteOperator:
    """Small random operator; every third one is rank deficient."""
    p, q = EXPONENT_PAIRS[trial % len(EXPONENT_PAIRS)]
    m, n = (int(d) for d in rng.integers(2, 4, size=2))
    if trial % 3 == 2:
        r = int(rng.integers(1, min(m, n)))
        M = rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
    else:
        M = rng.standard_normal((m, n))
    return FiniteOperator.from_matrix(M, p, q)


def _instance_doc(T, trial):
    return {"trial": trial, "matrix": T.matrix.tolist(), "dom_p": format_exponent(T.p),
            "cod_q": format_exponent(T.q)}


def check_instance(T: FiniteOperator, trial: int, seed: int, rng: np.random.Generator,
                   solver: Solver = default_solver):
    """Yield (property, ok, detail) for one operator."""
    kmax = min(T.shape) + 1
    scale = max(1.0, float(np.abs(T.matrix).max()))
    tol = REL_TOL * scale
    seqs = {kind: [float(v) for v in solver(T, kmax, kind, seed)] for kind in SNumberKind}
    norm = operator_norm(T, seed=seed).value
    rank = numerical_rank(T.matrix)

    for kind, s in seqs.items():
        bad = [k for k in range(1, kmax) if s[k] > s[k - 1] + tol]
        yield "monotone", not bad, {"kind": kind.value, "k": bad[0] + 1 if bad else None,
                                    "values": s}
        bad = [k for k in range(rank + 1, kmax + 1) if abs(s[k - 1]) > tol]
        yield "rank", not bad, {"kind": kind.value, "k": bad[0] if bad else None, "rank": rank,
                                "values": s}
        yield "norm", abs(s[0] - norm) <= tol, {"kind": kind.value, "k": 1, "norm": norm,
                                                "values": s}
    a = seqs[SNumberKind.APPROXIMATION]
    for kind in (SNumberKind.KOLMOGOROV, SNumberKind.GELFAND, SNumberKind.WEYL,
                 SNumberKind.CHANG):
        s = seqs[kind]
        bad = [k for k in range(1, kmax + 1) if s[k - 1] > a[k - 1] + tol]
        yield "domination", not bad, {"kind": kind.value, "k": bad[0] if bad else None,
                                      "values": s, "approximation": a}
    if T.p == 2 and T.q == 2:
        E = rng.standard_normal(T.shape)
        E *= 0.1 * norm / max(np.linalg.norm(E, 2), 1e-300)
        S = T.with_matrix(T.matrix + E)
        dist = float(np.linalg.norm(E, 2))
        for kind in SNumberKind:
            s2 = [float(v) for v in solver(S, kmax, kind, seed)]
            gaps = [abs(x - y) for x, y in zip(seqs[kind], s2)]
            bad = [k for k, g in enumerate(gaps, 1) if g > dist + tol]
            yield "lipschitz", not bad, {"kind": kind.value, "k": bad[0] if bad else None,
                                         "distance": dist, "values": seqs[kind],
                                         "perturbed_values": s2,
                                         "perturbed_matrix": S.matrix.tolist()}


def run_axioms(seed: int = 0, trials: int = 25, solver: Solver = default_solver,
               log: Optional[Callable[[str], None]] = None) -> AxiomReport:
    """Check every property on ``trials`` random operators; stops at the first failure."""
    if int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    rng = np.random.default_rng(seed)
    report = AxiomReport(seed, int(trials))
    for trial in range(int(trials)):
        T = random_instance(rng, trial)
        for prop, ok, detail in check_instance(T, trial, seed, rng, solver):
            report.checked[prop] += 1
            if ok:
                report.passed[prop] += 1
            elif report.counterexample is None:
                report.counterexample = {"property": prop, **_instance_doc(T, trial), **detail}
        if log is not None:
            log(f"trial {trial}: {T.shape[0]}x{T.shape[1]} "
                f"({format_exponent(T.p)}, {format_exponent(T.q)})")
        if report.counterexample is not None:
            break
    return report
