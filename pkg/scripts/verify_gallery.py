"""Sweep every gallery operator through the finite-section experiment.

Writes one CSV per operator into --out and prints a one-line verdict per (kind, k).

    python3 scripts/verify_gallery.py --out runs/gallery --n 1..6 --k 1..3
"""
import argparse
from pathlib import Path

from snumlab.cli import _int_list
from snumlab.gallery import gallery
from snumlab.snumbers import SNumberKind
from snumlab.truncation import convergence_experiment, coordinate_scheme, reports_to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/gallery")
    ap.add_argument("--n", type=_int_list, default=list(range(1, 7)))
    ap.add_argument("--k", type=_int_list, default=[1, 2, 3])
    ap.add_argument("--kinds", default="approximation,kolmogorov,gelfand")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    kinds = [SNumberKind.parse(s) for s in args.kinds.split(",")]
    for gid, entry in gallery().items():
        op = entry.operator
        scheme = coordinate_scheme("two_sided", op.dom_p, op.cod_q)
        reports = []
        for kind in kinds:
            for k in args.k:
                rep = convergence_experiment(op, scheme, kind, k, args.n, seed=args.seed)
                reports.append(rep)
                res = rep.final_residual
                print(f"{gid:16s} {kind.value:13s} k={k} ref={rep.reference_source:12s} "
                      f"residual={res if res is None else f'{res:.3g}':>9} "
                      f"{'converged' if rep.converged else 'open'}")
        (out / f"{gid}.csv").write_text(reports_to_csv(reports))


if __name__ == "__main__":
    main()
