"""Scan the vanishing pattern of D-valued cumulants of diagonal parts.

Runs the uniform Wishart model (alternating values checked against c d1) and a
batch of random R-cyclic models, then prints a summary line per model and
the non-trivial rows of the first failing report, if any.

    python3 scripts/theorem_scan.py --dims 2 3 4 --max-r 5 --models 5
"""

import argparse
import sys
import time
from fractions import Fraction

from rcyclic.freeness import default_probes, off_diagonal_vanishing_check, theorem_pattern_check
from rcyclic.rcyclic_exact import random_model, wishart_entry_model, y_context


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--max-r", type=int, default=5)
    ap.add_argument("--models", type=int, default=3, help="random models per dimension")
    ap.add_argument("--c", type=Fraction, default=Fraction(7, 3))
    ap.add_argument("--per-word", type=int, default=3)
    args = ap.parse_args(argv)

    failed = None
    for d in args.dims:
        jobs = [("wishart", wishart_entry_model(d, args.c), args.c * d)]
        jobs += [(f"random seed={s}", random_model(d, s), None) for s in range(args.models)]
        for name, model, alt in jobs:
            t0 = time.perf_counter()
            rep = theorem_pattern_check(y_context(model), d, args.max_r, default_probes(d),
                                        args.per_word, alternating_value=alt)
            rep = rep.merge(off_diagonal_vanishing_check(y_context(model, transposed=False), d, args.max_r,
                                                         default_probes(d), args.per_word))
            s = rep.summary()
            print(f"d={d} {name:16s} words={s['words']} violations={len(rep.violations)} "
                  f"({time.perf_counter() - t0:.1f}s)")
            if not rep.ok and failed is None:
                failed = rep
    if failed is not None:
        print(failed.table(only_interesting=True))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
