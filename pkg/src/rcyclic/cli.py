"""Command-line entry point: ``rcyclic <command> ...``.

Exit codes: 0 success, 1 a verification failed, 2 bad usage or configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .cumulant_core import moments_to_cumulants, single_variable
from .dval import scalar_functional
from .freeness import (
    ABS_FLOOR,
    VanishingReport,
    default_probes,
    off_diagonal_vanishing_check,
    r_diagonal_pair_test,
    theorem_pattern_check,
)
from .matgroup import (
    FORMULA_TOL,
    check_commutation,
    diag_part,
    partial_transpose,
    shift_lemma_deviation,
    transpose,
    xk_via_expectation,
    xk_via_fourier,
    yk_via_fourier,
)
from .ncpart import NC_CAP, ResourceLimitError, enumerate_nc, mobius_to_top
from .poly import Poly
from .rcyclic_exact import EntryCumulantModel, random_model, scalar_phi, wishart_entry_model, y_context
from .spectra import bn_parameters, free_difference_cumulants, mp_moments
from .wishart_mc import (
    EnsembleConfig,
    build_wishart,
    default_seed,
    empirical_spectrum,
    estimate_scalar_moments,
    mc_context,
    trial_rng,
)

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
        return cls(args.command, params)

    def as_dict(self) -> dict:
        return asdict(self)


def _header(cfg: RunConfig) -> dict:
    return {"schema": SCHEMA, "version": __version__, "config": cfg.as_dict()}


def _emit(text: str, output: str | None):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, default=str) + "\n"


def _parse_c(text: str):
    text = text.strip()
    if text.isidentifier():
        return Poly.symbol(text)
    try:
        c = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad value for c: {text!r}") from exc
    if c <= 0:
        raise UsageError("c must be positive")
    return c


# -- nc ---------------------------------------------------------------------


def cmd_nc(args, cfg: RunConfig) -> int:
    if not 1 <= args.n <= args.cap:
        raise UsageError(f"n must be in 1..{args.cap}")
    parts = enumerate_nc(args.n, cap=args.cap)
    if args.count:
        print(len(parts))
        return EXIT_OK
    mu = mobius_to_top(args.n) if args.mobius else None
    for p in parts:
        print(f"{p}\t{mu[p]}" if mu is not None else str(p))
    return EXIT_OK


# -- verify-identities ----------------------------------------------------------------


def cmd_verify_identities(args, cfg: RunConfig) -> int:
    d = args.d
    if not 1 <= d <= 64:
        raise UsageError("d must be in 1..64")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed)))
    worst = {"commutation": check_commutation(d), "shift_lemma": 0.0, "decomposition": 0.0,
             "xk_three_way": 0.0, "yk": 0.0}
    for _ in range(args.samples):
        x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        worst["shift_lemma"] = max(worst["shift_lemma"], shift_lemma_deviation(x))
        parts = [diag_part(x, k).data for k in range(d)]
        worst["decomposition"] = max(worst["decomposition"], float(np.abs(sum(parts) - x).max()))
        xt = transpose(x).data
        for k in range(d):
            a, b, c = parts[k], xk_via_expectation(x, k).data, xk_via_fourier(x, k).data
            worst["xk_three_way"] = max(worst["xk_three_way"], float(np.abs(a - b).max()), float(np.abs(a - c).max()))
            y = yk_via_fourier(x, k).data
            worst["yk"] = max(worst["yk"], float(np.abs(y - diag_part(xt, k).data).max()))
    ok = all(v <= FORMULA_TOL for v in worst.values())
    out = {**_header(cfg), "max_deviation": worst, "tolerance": FORMULA_TOL, "ok": ok}
    _emit(_json(out), args.output)
    return EXIT_OK if ok else EXIT_FAIL


# -- verify-theorem ------------------------------------------------------------------


def _load_model(args, d1, c) -> list[EntryCumulantModel]:
    if args.model == "uniform":
        return [wishart_entry_model(d1, c)]
    if args.model == "random":
        return [random_model(d1, args.model_seed + k) for k in range(args.models)]
    if not args.model_file:
        raise UsageError("--model file needs --model-file")
    try:
        with open(args.model_file, encoding="utf-8") as fh:
            model = EntryCumulantModel.from_json(json.load(fh))
    except (OSError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot read model: {exc}") from exc
    if model.d != d1:
        raise UsageError(f"model has d={model.d}, --d1 is {d1}")
    return [model]


def _exact_suite(args, d1, c) -> tuple[list[VanishingReport], list[dict]]:
    reports, checks = [], []
    for model in _load_model(args, d1, c):
        # uniform models (built in, or read from a file) are held to the values implied by --c
        uniform = model.uniform
        alt = c * d1 if uniform else None
        ctx = y_context(model)
        probes = default_probes(d1)
        rep = theorem_pattern_check(ctx, d1, args.max_r, probes, per_word=args.probes_per_word, alternating_value=alt)
        rep.name += f" [{model.name}]"
        reports.append(rep)
        for i in range(1, d1):
            reports.append(r_diagonal_pair_test(ctx, f"Y{i}", f"Y{(d1 - i) % d1}", args.max_r, alternating_value=alt))
        xctx = y_context(model, transposed=False)
        rep = off_diagonal_vanishing_check(xctx, d1, args.max_r, probes, per_word=args.probes_per_word)
        rep.name += f" [{model.name}]"
        reports.append(rep)
        if uniform:
            phi = scalar_functional(ctx)
            for n in range(1, args.max_moment + 1):
                got = phi(("Y0",) * n)
                want = mp_moments(c * d1, n)
                checks.append({"check": f"Y0 moment {n}", "value": str(got), "expected": str(want), "ok": got == want})
            c1, c2 = bn_parameters(c, d1)
            rule = free_difference_cumulants(c1, c2)
            moments = [scalar_phi(model, ["WT"] * n) for n in range(1, args.max_moment + 1)]
            f = single_variable(lambda n: moments[n - 1])
            for n in range(1, args.max_moment + 1):
                got = moments_to_cumulants(f, ("x",) * n)
                want = rule(n)
                checks.append({"check": f"BN cumulant {n}", "value": str(got), "expected": str(want), "ok": got == want})
            got = scalar_phi(model, ["W", "WT"]) * Fraction(1, d1 * d1)
            want = c * Fraction(1, d1) + c * c
            checks.append({"check": "phi(w w^t)", "value": str(got), "expected": str(want), "ok": got == want})
    return reports, checks


def _mc_suite(args, d1, c) -> tuple[list[VanishingReport], list[dict]]:
    if args.model != "uniform":
        raise UsageError("the Monte Carlo backend samples Wishart matrices only (--model uniform)")
    if args.d2 is None or args.p is None:
        raise UsageError("--backend mc needs --d2 and --p")
    ens = EnsembleConfig(d1, args.d2, args.p, args.trials, args.seed)
    cval = Fraction(ens.p, ens.d1 * ens.d2)
    ctx = mc_context(ens, max_len=args.max_r, threads=args.threads)
    probes = [tuple(float(x) for x in p) for p in default_probes(d1)]
    alt = float(cval * d1)
    reports = [theorem_pattern_check(ctx, d1, args.max_r, probes, per_word=args.probes_per_word,
                                     abs_floor=args.abs_floor, alternating_value=alt)]
    for i in range(1, d1):
        reports.append(r_diagonal_pair_test(ctx, f"Y{i}", f"Y{(d1 - i) % d1}", args.max_r,
                                            abs_floor=args.abs_floor, alternating_value=alt))
    checks = []
    floor = args.abs_floor
    for n in range(1, args.max_r + 1):
        est = ctx.estimate(ctx.word(["Y0"] * n))
        want = float(mp_moments(cval * d1, n))
        ok = all(e.agrees(want, floor=floor * max(1.0, abs(want))) for e in est)
        checks.append({"check": f"Y0 moment {n}", "value": [e.to_json() for e in est], "expected": want, "ok": ok})
    (est,) = estimate_scalar_moments(ens, [["W", "WG"]], threads=args.threads)
    want = float(cval / d1 + cval * cval)
    checks.append({"check": "phi(W W^Gamma)", "value": est.to_json(), "expected": want,
                   "ok": est.agrees(want, floor=floor)})
    return reports, checks


def cmd_verify_theorem(args, cfg: RunConfig) -> int:
    d1 = args.d1
    if d1 < 1:
        raise UsageError("d1 must be positive")
    if args.max_r is None:
        args.max_r = 6 if args.backend == "exact" else 3
        cfg.params["max_r"] = args.max_r
    if not 1 <= args.max_r <= 8:
        raise UsageError("max-r must be in 1..8")
    if args.models < 1 or args.trials < 1 or args.abs_floor < 0:
        raise UsageError("counts must be positive and abs-floor nonnegative")
    c = _parse_c(args.c)
    t0 = time.perf_counter()
    suite = _exact_suite if args.backend == "exact" else _mc_suite
    reports, checks = suite(args, d1, c)
    ok = all(r.ok for r in reports) and all(ch["ok"] for ch in checks)
    if args.format == "table":
        lines = [r.table(only_interesting=True) for r in reports]
        lines += [f"{ch['check']}: {'ok' if ch['ok'] else 'FAIL'}" for ch in checks]
        lines.append(f"verdict: {'PASS' if ok else 'FAIL'}")
        _emit("\n".join(lines) + "\n", args.output)
    else:
        out = {**_header(cfg), "reports": [r.to_json() for r in reports], "checks": checks, "ok": ok,
               "note": "evidence at bounded order, not a proof"}
        if args.timing:
            out["wall_time"] = time.perf_counter() - t0
        _emit(_json(out), args.output)
    return EXIT_OK if ok else EXIT_FAIL


# -- simulate -------------------------------------------------------------------------


def cmd_simulate(args, cfg: RunConfig) -> int:
    ens = EnsembleConfig(args.d1, args.d2, args.p, args.trials, args.seed)
    t0 = time.perf_counter()
    if args.emit == "spectrum":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["trial", "eigenvalue"])
        for t in range(ens.trials):
            w = build_wishart(ens, trial_rng(ens.seed, t))
            wg = partial_transpose(w)
            for ev in empirical_spectrum(ens.d1 * wg.data):
                wr.writerow([t, repr(float(ev))])
        _emit(buf.getvalue(), args.output)
        return EXIT_OK
    words = {
        "phi_w": ["W"],
        "phi_w_wgamma": ["W", "WG"],
        **{f"phi_wgamma_{n}": ["WG"] * n for n in range(1, args.max_moment + 1)},
    }
    ests = estimate_scalar_moments(ens, list(words.values()), threads=args.threads)
    out = {**_header(cfg), "c": ens.c, "expected_phi_w_wgamma": ens.c / ens.d1 + ens.c ** 2}
    for (name, word), est in zip(words.items(), ests):
        out[name] = {"word": word, "mean": est.mean.real, "mean_imag": est.mean.imag,
                     "stderr": est.stderr, "trials": est.trials}
    if args.timing:
        out["wall_time"] = time.perf_counter() - t0
    _emit(_json(out), args.output)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    seed = default_seed()
    threads = os.cpu_count() or 1
    ap = argparse.ArgumentParser(prog="rcyclic", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nc", help="list non-crossing partitions of n points")
    p.add_argument("n", type=int)
    p.add_argument("--mobius", action="store_true", help="append mu(pi, 1_n) to each row")
    p.add_argument("--count", action="store_true", help="print only the number of partitions")
    p.add_argument("--cap", type=_positive, default=NC_CAP)
    p.set_defaults(func=cmd_nc)

    p = sub.add_parser("verify-identities", help="check the cyclic-group matrix identities on random inputs")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--samples", type=_positive, default=20)
    p.add_argument("--seed", type=_seed, default=seed)
    p.add_argument("--output")
    p.set_defaults(func=cmd_verify_identities)

    p = sub.add_parser("verify-theorem", help="cumulant vanishing scans, Y0 law and cumulant checks")
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--c", default="1", help="rational value, or a name for a symbolic parameter")
    p.add_argument("--max-r", type=int, default=None, help="longest word scanned (default 6 exact, 3 mc)")
    p.add_argument("--max-moment", type=_positive, default=8)
    p.add_argument("--backend", choices=("exact", "mc"), default="exact")
    p.add_argument("--model", choices=("uniform", "random", "file"), default="uniform")
    p.add_argument("--model-file")
    p.add_argument("--models", type=int, default=3, help="number of random models")
    p.add_argument("--model-seed", type=int, default=0)
    p.add_argument("--probes-per-word", type=int, default=3)
    p.add_argument("--d2", type=_positive)
    p.add_argument("--p", type=_positive)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=_seed, default=seed)
    p.add_argument("--abs-floor", type=float, default=ABS_FLOOR)
    p.add_argument("--threads", type=_positive, default=threads)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--timing", action="store_true", help="record wall time (output is then not byte-stable)")
    p.add_argument("--output")
    p.set_defaults(func=cmd_verify_theorem)

    p = sub.add_parser("simulate", help="sample Wishart matrices and emit spectra or moments")
    p.add_argument("--d1", type=_positive, required=True)
    p.add_argument("--d2", type=_positive, required=True)
    p.add_argument("--p", type=_positive, required=True)
    p.add_argument("--trials", type=_positive, default=20)
    p.add_argument("--seed", type=_seed, default=seed)
    p.add_argument("--emit", choices=("spectrum", "moments"), default="moments")
    p.add_argument("--max-moment", type=_positive, default=4)
    p.add_argument("--threads", type=_positive, default=threads)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--output")
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig.from_args(args)
    try:
        return args.func(args, cfg)
    except (UsageError, ResourceLimitError, ValueError) as exc:
        print(f"rcyclic: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
