"""Compare sampled Y-word moments with the exact engine over growing sizes.

For each (d2, p) in the sweep, every closed Y-word up to --max-len letters is
estimated from --trials samples and compared slotwise to the limit value with
c = p / (d1 d2). Prints one JSON line per size.

    python3 scripts/mc_convergence.py --d1 2 --sizes 100:200,400:800,1000:2000
"""

import argparse
import itertools
import json
import time
from fractions import Fraction

from rcyclic.rcyclic_exact import wishart_entry_model, y_context
from rcyclic.wishart_mc import EnsembleConfig, default_seed, mc_context


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d1", type=int, default=2)
    ap.add_argument("--sizes", default="100:200,400:800,1000:2000", help="comma list of d2:p")
    ap.add_argument("--max-len", type=int, default=3)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=default_seed())
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args(argv)

    for spec in args.sizes.split(","):
        d2, p = (int(x) for x in spec.split(":"))
        cfg = EnsembleConfig(args.d1, d2, p, args.trials, args.seed)
        exact = y_context(wishart_entry_model(args.d1, Fraction(p, args.d1 * d2)))
        t0 = time.perf_counter()
        ctx = mc_context(cfg, args.max_len, args.threads)
        worst_z = worst_abs = 0.0
        words = outside = 0
        for r in range(1, args.max_len + 1):
            for ks in itertools.product(range(args.d1), repeat=r):
                handles = [f"Y{k}" for k in ks]
                want = exact.moment(exact.word(handles))
                for est, target in zip(ctx.estimate(ctx.word(handles)), want):
                    dev = abs(est.mean - float(target))
                    worst_abs = max(worst_abs, dev)
                    if est.stderr > 0:
                        worst_z = max(worst_z, dev / est.stderr)
                    outside += not est.agrees(float(target))
                words += 1
        print(json.dumps({"d1": args.d1, "d2": d2, "p": p, "c": cfg.c, "words": words,
                          "outside_4_stderr": outside, "max_abs_dev": worst_abs,
                          "max_z": worst_z, "seconds": round(time.perf_counter() - t0, 2)}))


if __name__ == "__main__":
    main()
