"""Write the MP density on its support as CSV, with quadrature moments on stderr.

    python3 scripts/density_table.py --c 0.5 --points 400 > mp.csv
"""

import argparse
import sys

from rcyclic.spectra import MPParams, density_table, mp_moment_quadrature, mp_moments


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--moments", type=int, default=4)
    args = ap.parse_args(argv)

    p = MPParams(args.c)
    sys.stdout.write(density_table(args.c, args.points))
    print(f"# support [{p.a:.6g}, {p.b:.6g}], atom at 0: {p.atom:.6g}", file=sys.stderr)
    for n in range(1, args.moments + 1):
        print(f"# m{n}: quadrature {mp_moment_quadrature(args.c, n):.10f}, "
              f"exact {float(mp_moments(args.c, n)):.10f}", file=sys.stderr)


if __name__ == "__main__":
    main()
