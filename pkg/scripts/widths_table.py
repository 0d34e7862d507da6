"""Table of all five s-numbers of one random matrix across exponent pairs.

    python3 scripts/widths_table.py --n 3 --seed 1
"""
import argparse
import time

import numpy as np

from snumlab.operators import FiniteOperator
from snumlab.snumbers import SNumberKind, s_sequence
from snumlab.spaces import INF, format_exponent

PAIRS = [(1, 1), (1, 2), (2, 2), (2, INF), (INF, INF), (1, INF), (INF, 1)]
# no exact norm branch here, so every inner sup is a multistart ascent (slow)
GENERAL_PAIR = (3, 1.5)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--general", action="store_true", help=f"also run (p, q) = {GENERAL_PAIR}")
    args = ap.parse_args()

    M = np.random.default_rng(args.seed).standard_normal((args.n, args.n))
    print(np.array2string(M, precision=4))
    for p, q in PAIRS + ([GENERAL_PAIR] if args.general else []):
        T = FiniteOperator.from_matrix(M, p, q)
        t0 = time.perf_counter()
        print(f"\n(p, q) = ({format_exponent(p)}, {format_exponent(q)})")
        for kind in SNumberKind:
            vals = s_sequence(T, args.n, kind, seed=args.seed)
            print(f"  {kind.value:13s} " + "  ".join(f"{v:.6f}" for v in vals))
        print(f"  [{time.perf_counter() - t0:.1f}s]")


if __name__ == "__main__":
    main()
