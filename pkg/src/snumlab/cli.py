"""Command line: compute, converge, axioms, gallery.

Exit codes: 0 ok, 2 malformed input or config, 3 solver failure,
4 truncation scheme refused by the norm check, 5 axiom failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .axioms import default_solver, run_axioms
from .gallery import GALLERY_IDS, gallery, get_entry
from .operators import SequenceOperator, operator_from_dict
from .opnorm import DEFAULT_SEED
from .snumbers import SNumberKind, s_number
from .spaces import SolverError, format_exponent
from .truncation import (HypothesisRefused, SchemeKind, convergence_experiment,
                         coordinate_scheme, reports_to_csv, reports_to_json)

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_REFUSED, EXIT_AXIOM = 0, 2, 3, 4, 5


class InputError(ValueError):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


# compute ---------------------------------------------------------------------

def cmd_compute(args) -> int:
    try:
        doc = json.loads(Path(args.matrix).read_text())
        T = operator_from_dict(doc, args.p, args.q)
        kind = SNumberKind.parse(args.kind)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise InputError(str(exc)) from None
    res = s_number(T, args.k, kind, seed=args.seed)
    print(f"{kind.value} k={res.k} on l^{format_exponent(T.p)} -> l^{format_exponent(T.q)}")
    print(f"value: {_fmt(res.value)}")
    print(f"bound: {res.bound_side}{'' if res.certified else ' (inner norms estimated)'}")
    print(f"witness: {res.summary()}")
    return EXIT_OK


# converge --------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    operator: object = None  # gallery id or inline {"matrix", "dom_p", "cod_q"}
    kind: str = "approximation"
    k_values: list = field(default_factory=lambda: [1])
    n_values: list = field(default_factory=lambda: [1, 2, 3, 4])
    scheme: str = "two_sided"
    seed: int = DEFAULT_SEED
    output: Optional[str] = None
    format: str = "csv"
    p: Optional[object] = None
    projection_scale: float = 1.0
    reference: Optional[float] = None

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise InputError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise InputError(f"unknown config keys: {', '.join(sorted(extra))}")
        return cls(**doc)

    def validate(self):
        if self.operator is None:
            raise InputError("config needs an operator (gallery id or inline matrix)")
        for name in ("k_values", "n_values"):
            vals = getattr(self, name)
            if (not isinstance(vals, list) or not vals
                    or not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1
                               for v in vals)
                    or any(b <= a for a, b in zip(vals, vals[1:]))):
                raise InputError(f"{name} must be a nonempty increasing list of positive integers")
        if self.format not in ("csv", "json"):
            raise InputError(f"format must be csv or json, got {self.format!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise InputError("seed must be an integer")
        try:
            SNumberKind.parse(self.kind)
            SchemeKind.parse(self.scheme)
            float(self.projection_scale)
        except (TypeError, ValueError) as exc:
            raise InputError(str(exc)) from None


def _inline_operator(doc: dict) -> SequenceOperator:
    T = operator_from_dict(doc)
    M = np.array(T.matrix)
    m, n = M.shape

    def entry(i, j):
        return M[i - 1, j - 1] if i <= m and j <= n else 0.0
    return SequenceOperator("inline", entry, T.p, T.q, description="inline matrix, zero-padded")


def resolve_operator(cfg: ExperimentConfig) -> SequenceOperator:
    try:
        if isinstance(cfg.operator, dict):
            if cfg.p is not None:
                raise InputError("p applies to gallery entries only")
            return _inline_operator(cfg.operator)
        if isinstance(cfg.operator, str):
            return get_entry(cfg.operator, cfg.p).operator
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc).strip("'\"")) from None
    raise InputError("operator must be a gallery id or an inline operator object")


def _int_list(text: str) -> list:
    """'2..6' or '1,2,5'."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a..b' or a comma list, got {text!r}")


def build_config(args) -> ExperimentConfig:
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config: {exc}") from None
        cfg = ExperimentConfig.from_dict(doc)
    else:
        cfg = ExperimentConfig()
    overrides = {"operator": args.operator, "kind": args.kind, "k_values": args.k,
                 "n_values": args.n, "scheme": args.scheme, "seed": args.seed,
                 "output": args.output, "format": args.format, "p": args.p,
                 "projection_scale": args.projection_scale, "reference": args.reference}
    for key, val in overrides.items():
        if val is not None:
            setattr(cfg, key, val)
    cfg.validate()
    return cfg


def run_converge(cfg: ExperimentConfig) -> list:
    Tinf = resolve_operator(cfg)
    scheme = coordinate_scheme(cfg.scheme, Tinf.dom_p, Tinf.cod_q, float(cfg.projection_scale))
    return [convergence_experiment(Tinf, scheme, cfg.kind, k, cfg.n_values, cfg.reference,
                                   seed=cfg.seed)
            for k in cfg.k_values]


def cmd_converge(args) -> int:
    cfg = build_config(args)
    reports = run_converge(cfg)
    text = reports_to_csv(reports) if cfg.format == "csv" else reports_to_json(reports)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    for rep in sorted(reports, key=lambda r: (r.kind.value, r.k)):
        res = rep.final_residual
        verdict = "converged" if rep.converged else "not converged"
        tail = "" if rep.reference_source != "extrapolated" else " (extrapolated reference)"
        print(f"{verdict} k={rep.k} residual={'nan' if res is None else _fmt(res)}{tail}",
              file=sys.stderr if not cfg.output else sys.stdout)
    return EXIT_OK


# axioms ----------------------------------------------------------------------

def cmd_axioms(args, solver=default_solver) -> int:
    if args.trials < 1:
        raise InputError("trials must be at least 1")
    log = (lambda s: print(s, file=sys.stderr)) if args.verbose else None
    report = run_axioms(args.seed, args.trials, solver, log)
    for line in report.lines():
        print(line)
    if report.ok:
        print(f"all properties hold on {args.trials} trials (seed {args.seed})")
        return EXIT_OK
    print(json.dumps(report.counterexample, sort_keys=True))
    return EXIT_AXIOM


# gallery ---------------------------------------------------------------------

def cmd_gallery(args) -> int:
    for gid, entry in gallery().items():
        op = entry.operator
        known = "known s-numbers" if entry.has_known_values else "no closed form"
        print(f"{gid}: {op.description} (l^{format_exponent(op.dom_p)} -> "
              f"l^{format_exponent(op.cod_q)}), {known}")
        if args.verbose:
            print(f"    {entry.provenance}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="snumlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="s_k of a matrix given as JSON")
    c.add_argument("matrix", help="JSON file with 'matrix' and optionally 'dom_p', 'cod_q'")
    c.add_argument("--p", help="domain exponent (overrides the file)")
    c.add_argument("--q", help="codomain exponent (overrides the file)")
    c.add_argument("--kind", required=True,
                   help="approximation | kolmogorov | gelfand | weyl | chang")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--seed", type=int, default=DEFAULT_SEED)

    v = sub.add_parser("converge", help="finite-section sweep over n")
    v.add_argument("--config", help="ExperimentConfig JSON; flags override its fields")
    v.add_argument("--operator", help=f"gallery id ({', '.join(GALLERY_IDS)})")
    v.add_argument("--kind")
    v.add_argument("--k", type=_int_list)
    v.add_argument("--n", type=_int_list)
    v.add_argument("--scheme", choices=[s.value for s in SchemeKind])
    v.add_argument("--p", help="exponent for diag_geometric")
    v.add_argument("--projection-scale", type=float)
    v.add_argument("--reference", type=float)
    v.add_argument("--seed", type=int)
    v.add_argument("--output")
    v.add_argument("--format", choices=["csv", "json"])

    a = sub.add_parser("axioms", help="randomised s-number property suite")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--trials", type=int, default=25)
    a.add_argument("--verbose", action="store_true")

    g = sub.add_parser("gallery", help="list gallery operators")
    g.add_argument("--verbose", action="store_true")
    return ap


def main(argv=None, axiom_solver=default_solver) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INPUT
    handlers = {"compute": cmd_compute, "converge": cmd_converge, "gallery": cmd_gallery,
                "axioms": lambda a: cmd_axioms(a, axiom_solver)}
    try:
        return handlers[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except HypothesisRefused as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (SolverError, np.linalg.LinAlgError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
