"""Finite sections Q_n T P_n of infinite matrices and convergence sweeps over n."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .operators import FiniteOperator, SequenceOperator
from .opnorm import DEFAULT_SEED, operator_norm
from .snumbers import SNumberKind, s_number
from .spaces import NormedSpace, SolverError

NORM_SLACK = 1e-9
UPPER_TOL = 1e-6
CONVERGE_TOL = 1e-3


class HypothesisRefused(ValueError):
    """The scheme cannot certify ||P_n|| ||Q_n|| <= 1."""


class SchemeKind(str, Enum):
    TWO_SIDED = "two_sided"
    LEFT_ONLY = "left_only"
    RIGHT_ONLY = "right_only"

    @classmethod
    def parse(cls, text) -> "SchemeKind":
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).strip().lower().replace("-", "_"))
        except ValueError:
            raise ValueError(f"unknown truncation scheme {text!r}") from None


def coordinate_projection(n: int, ambient: int, space: NormedSpace) -> FiniteOperator:
    """Keep the first n coordinates of a vector in ``space`` (of dimension ``ambient``)."""
    if int(n) != n or n < 0:
        raise ValueError(f"projection rank must be a nonnegative integer, got {n!r}")
    if ambient != space.dim:
        raise ValueError(f"ambient dimension {ambient} does not match {space}")
    if n > ambient:
        raise ValueError(f"cannot keep {n} coordinates of a {ambient}-dimensional space")
    d = np.zeros(ambient)
    d[: int(n)] = 1.0
    return FiniteOperator(np.diag(d), space, space)


@dataclass(frozen=True)
class TruncationScheme:
    """P(n, ambient) and Q(n, ambient) build the projections on domain and codomain.

    ``norm_certificate(n)`` names why ||P_n|| ||Q_n|| <= 1 holds, or returns None
    when the bound has to be checked numerically.
    """

    kind: SchemeKind
    P: Callable[[int, int], FiniteOperator]
    Q: Callable[[int, int], FiniteOperator]
    norm_certificate: Callable[[int], Optional[str]]
    name: str = "custom"


def coordinate_scheme(kind, dom_p: float, cod_q: float, scale: float = 1.0) -> TruncationScheme:
    """Coordinate projections on both sides; ``scale`` != 1 breaks the norm bound on purpose."""
    kind = SchemeKind.parse(kind)

    def P(n, ambient):
        E = coordinate_projection(n, ambient, NormedSpace(ambient, dom_p))
        return E if scale == 1.0 else E.with_matrix(scale * E.matrix)

    def Q(n, ambient):
        return coordinate_projection(n, ambient, NormedSpace(ambient, cod_q))

    def certificate(n):
        return "coordinate projections, norm exactly 1" if scale == 1.0 else None

    name = "coordinate" if scale == 1.0 else f"coordinate x{scale:g}"
    return TruncationScheme(kind, P, Q, certificate, name)


def check_hypothesis(scheme: TruncationScheme, n: int, ambient: int) -> str:
    """Return the certificate for ||P_n|| ||Q_n|| <= 1 or raise HypothesisRefused."""
    tag = scheme.norm_certificate(n)
    if tag is not None:
        return tag
    factors = []
    if scheme.kind is not SchemeKind.LEFT_ONLY:
        factors.append(operator_norm(scheme.P(n, ambient)))
    if scheme.kind is not SchemeKind.RIGHT_ONLY:
        factors.append(operator_norm(scheme.Q(n, ambient)))
    lower = math.prod(f.lower for f in factors)
    if lower > 1 + NORM_SLACK:
        raise HypothesisRefused(
            f"scheme {scheme.name!r} at n={n}: ||P_n|| ||Q_n|| >= {lower:.6g} > 1")
    if any(f.upper is None for f in factors):
        raise HypothesisRefused(
            f"scheme {scheme.name!r} at n={n}: projection norms are not certifiable")
    upper = math.prod(f.upper for f in factors)
    if upper > 1 + NORM_SLACK:
        raise HypothesisRefused(
            f"scheme {scheme.name!r} at n={n}: ||P_n|| ||Q_n|| = {upper:.6g} > 1")
    return f"computed norm product {upper:.12g}"


def section_matrix(Tinf: SequenceOperator, scheme: TruncationScheme, n: int,
                   ambient: int) -> np.ndarray:
    """Apply the scheme to the ambient x ambient block of Tinf."""
    B = Tinf.block(ambient, ambient)
    if scheme.kind is not SchemeKind.RIGHT_ONLY:
        B = scheme.Q(n, ambient).matrix @ B
    if scheme.kind is not SchemeKind.LEFT_ONLY:
        B = B @ scheme.P(n, ambient).matrix
    return B


def truncate(Tinf: SequenceOperator, scheme: TruncationScheme, n: int,
             ambient: Optional[int] = None) -> FiniteOperator:
    """T_n as a finite operator.

    Two-sided sections live on the n x n block. One-sided ones keep the
    untruncated side at ``ambient`` coordinates.
    """
    if scheme.kind is SchemeKind.TWO_SIDED or ambient is None:
        ambient = n
    if ambient < n:
        raise ValueError(f"ambient dimension {ambient} is below n={n}")
    M = section_matrix(Tinf, scheme, n, ambient)
    return FiniteOperator.from_matrix(M, Tinf.dom_p, Tinf.cod_q)


def weakstar_residual(Tinf: SequenceOperator, scheme: TruncationScheme, n: int,
                      grid: int) -> float:
    """max |<e_i, (T_n - T) e_j>| over i, j <= grid."""
    if int(grid) != grid or grid < 1:
        raise ValueError(f"grid must be a positive integer, got {grid!r}")
    grid = int(grid)
    ambient = max(int(n), grid)
    S = section_matrix(Tinf, scheme, n, ambient)[:grid, :grid]
    return float(np.max(np.abs(S - Tinf.block(grid, grid))))


def aitken(values: Sequence[float]) -> float:
    """Aitken delta-squared limit guess from the last three values."""
    if len(values) < 3:
        return float(values[-1])
    x0, x1, x2 = values[-3:]
    denom = x2 - 2 * x1 + x0
    if abs(denom) <= 1e-14 * max(1.0, abs(x2)):
        return float(x2)
    return float(x2 - (x2 - x1) ** 2 / denom)


@dataclass
class ReportRow:
    n: int
    value: float
    reference: Optional[float]
    residual: Optional[float]
    proxy_residual: float
    flags: tuple = ()

    def to_dict(self) -> dict:
        return {"n": self.n, "value": self.value, "reference": self.reference,
                "residual": self.residual, "proxy_residual": self.proxy_residual,
                "flags": list(self.flags)}


@dataclass
class ConvergenceReport:
    operator_id: str
    kind: SNumberKind
    k: int
    scheme: SchemeKind
    rows: list = field(default_factory=list)
    reference_source: str = "known"  # "known", "given" or "extrapolated"
    upper_bounded: Optional[bool] = None
    monotone_observed: bool = False
    converged: bool = False
    certificate: str = ""

    @property
    def final_residual(self) -> Optional[float]:
        return self.rows[-1].residual if self.rows else None

    def to_dict(self) -> dict:
        return {"operator_id": self.operator_id, "kind": self.kind.value, "k": self.k,
                "scheme": self.scheme.value, "reference_source": self.reference_source,
                "upper_bounded": self.upper_bounded,
                "monotone_observed": self.monotone_observed, "converged": self.converged,
                "certificate": self.certificate, "rows": [r.to_dict() for r in self.rows]}


def convergence_experiment(Tinf: SequenceOperator, scheme: TruncationScheme, kind, k: int,
                           n_values: Sequence[int], reference: Optional[float] = None,
                           seed: int = DEFAULT_SEED, settings=None,
                           converge_tol: float = CONVERGE_TOL,
                           upper_tol: float = UPPER_TOL,
                           proxy_grid: int = 4) -> ConvergenceReport:
    kind = SNumberKind.parse(kind)
    ns = [int(n) for n in n_values]
    if not ns or any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError(f"n_values must be positive and increasing, got {list(n_values)!r}")
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    ambient = ns[-1]
    certs = {check_hypothesis(scheme, n, n if scheme.kind is SchemeKind.TWO_SIDED else ambient)
             for n in ns}

    source = "given" if reference is not None else "known"
    if reference is None:
        reference = Tinf.known(kind, k)
    kwargs = {} if settings is None else {"settings": settings}
    values, failures = [], {}
    for n in ns:
        T = truncate(Tinf, scheme, n, ambient)
        try:
            values.append(s_number(T, k, kind, seed=seed, **kwargs).value)
        except (SolverError, np.linalg.LinAlgError) as exc:
            values.append(math.nan)
            failures[n] = type(exc).__name__
    if reference is None:
        source = "extrapolated"
        finite = [v for v in values if math.isfinite(v)]
        reference = aitken(finite) if finite else None

    rows = []
    for n, v in zip(ns, values):
        flags = []
        if n in failures:
            flags.append("failed:" + failures[n])
        if source == "extrapolated":
            flags.append("extrapolated")
        residual = None
        if reference is not None and math.isfinite(v):
            residual = abs(v - reference)
            if source != "extrapolated":
                flags.append("upper" if v <= reference + upper_tol else "exceeds")
        rows.append(ReportRow(n, v, reference, residual,
                              weakstar_residual(Tinf, scheme, n, proxy_grid),
                              tuple(flags)))

    report = ConvergenceReport(Tinf.id, kind, k, scheme.kind, rows, source,
                               certificate="; ".join(sorted(certs)))
    res = [r.residual for r in rows]
    if source != "extrapolated" and reference is not None:
        report.upper_bounded = all(math.isfinite(r.value) and r.value <= reference + upper_tol
                                   for r in rows)
    if all(r is not None for r in res):
        report.monotone_observed = all(b <= a + NORM_SLACK for a, b in zip(res, res[1:]))
        report.converged = source != "extrapolated" and res[-1] < converge_tol
    return report


# serialisation ---------------------------------------------------------------

CSV_COLUMNS = ("n", "value", "reference", "residual", "flags")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(float(x), ".12g")


def report_rows(report: ConvergenceReport) -> list:
    out = []
    for r in report.rows:
        flags = [f"kind={report.kind.value}", f"k={report.k}", *r.flags]
        out.append([str(r.n), _fmt(r.value), _fmt(r.reference), _fmt(r.residual),
                    ";".join(flags)])
    return out


def reports_to_csv(reports: Sequence[ConvergenceReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rep in sorted(reports, key=lambda r: (r.kind.value, r.k)):
        w.writerows(report_rows(rep))
    return buf.getvalue()


def parse_csv(text: str) -> list:
    """Rows of a report CSV as dicts with numbers parsed back."""
    rows = []
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames!r}")
    for rec in reader:
        rows.append({"n": int(rec["n"]),
                     "value": float(rec["value"]),
                     "reference": float(rec["reference"]) if rec["reference"] else None,
                     "residual": float(rec["residual"]) if rec["residual"] else None,
                     "flags": rec["flags"].split(";") if rec["flags"] else []})
    return rows


def reports_to_json(reports: Sequence[ConvergenceReport]) -> str:
    docs = [r.to_dict() for r in sorted(reports, key=lambda r: (r.kind.value, r.k))]
    return json.dumps({"reports": docs}, indent=2, sort_keys=True) + "\n"
