"""Cumulant vanishing scans over exact or Monte Carlo evaluation contexts.

Every scan produces a :class:`VanishingReport`. Words are written
``Z_{i_1} D_1 ... Z_{i_r} D_r`` with the ``D_t`` drawn from a list of diagonal
probes. Exact contexts are judged by exact comparison with zero; numeric
contexts by ``|mean| <= max(nsigma * stderr, abs_floor)`` slot by slot.

The reports are evidence at bounded order, not proofs.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .dval import DVAL_CAP, DiagonalVector, EvaluationContext, MatrixContext, dvalued_cumulant, ones
from .ncpart import ResourceLimitError
from .poly import Poly

ABS_FLOOR = 1e-2
NSIGMA = 4.0

ZERO, NONZERO, VALUE, FREE = "zero", "nonzero", "value", "unconstrained"


def default_probes(d: int) -> list[DiagonalVector]:
    """Identity, diag(1, 2, ..., d), diag(1, 0, ..., 0) and a scrambled integer diagonal.

    Integer entries keep the exact arithmetic (and the memo-key hashing) cheap.
    """
    generic = tuple((5 * i + 3) % 11 - 4 for i in range(d))
    probes = [ones(d), tuple(range(1, d + 1)), (1,) + (0,) * (d - 1), generic]
    out = []
    for p in probes:
        if p not in out:
            out.append(p)
    # at d = 1 the list collapses; pad with constants so there are always three
    fill = 2
    while len(out) < 3:
        out.append((fill,) * d)
        fill += 1
    return out


@dataclass
class WordRecord:
    handles: tuple
    probes: tuple  # index into the probe list per letter (None for identity-only scans)
    expected: str
    value: Any
    verdict: bool
    target: Any = None

    def label(self) -> str:
        if self.probes is None:
            return " ".join(str(h) for h in self.handles)
        return " ".join(f"{h}.D{p}" for h, p in zip(self.handles, self.probes))

    def value_json(self):
        return [_json_value(v) for v in self.value]


def _json_value(v):
    if hasattr(v, "stderr"):
        return {"mean": [v.mean.real, v.mean.imag], "stderr": v.stderr}
    if isinstance(v, Poly):
        return v.to_json()
    if isinstance(v, (int, Fraction)):
        return str(Fraction(v))
    return [complex(v).real, complex(v).imag]


@dataclass
class VanishingReport:
    name: str
    numeric: bool = False
    abs_floor: float = ABS_FLOOR
    records: list[WordRecord] = field(default_factory=list)

    @property
    def violations(self) -> list[WordRecord]:
        return [r for r in self.records if not r.verdict]

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> dict:
        counts = {ZERO: 0, NONZERO: 0, VALUE: 0, FREE: 0}
        for r in self.records:
            counts[r.expected] += 1
        return {
            "words": len(self.records),
            "expected": counts,
            "violations": len(self.violations),
            "max_deviation": self.max_deviation(),
        }

    def max_deviation(self) -> float | None:
        """Largest |value| over expected-zero words (numeric reports only)."""
        if not self.numeric:
            return None
        devs = [abs(v.mean) for r in self.records if r.expected == ZERO for v in r.value]
        return max(devs, default=0.0)

    def merge(self, other: "VanishingReport") -> "VanishingReport":
        self.records.extend(other.records)
        return self

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "numeric": self.numeric,
            "abs_floor": self.abs_floor if self.numeric else None,
            "summary": self.summary(),
            "records": [
                {"word": r.label(), "expected": r.expected, "value": r.value_json(), "verdict": r.verdict}
                for r in self.records
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def table(self, only_interesting: bool = False) -> str:
        rows = [("word", "expected", "value", "verdict")]
        for r in self.records:
            if only_interesting and r.verdict and r.expected != VALUE:
                continue
            rows.append((r.label(), r.expected, _fmt(r.value), "ok" if r.verdict else "FAIL"))
        widths = [max(len(row[i]) for row in rows) for i in range(4)]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
        s = self.summary()
        lines.append(f"# {self.name}: {s['words']} words, {s['violations']} violations")
        return "\n".join(lines)


def _fmt(value) -> str:
    parts = []
    for v in value:
        if hasattr(v, "stderr"):
            parts.append(f"{v.mean.real:.4g}+-{v.stderr:.2g}")
        else:
            parts.append(str(v))
    return "(" + ", ".join(parts) + ")"


# -- evaluation and verdicts --------------------------------------------------------


def _is_numeric(ctx) -> bool:
    return hasattr(ctx, "estimate_cumulant")


def _cumulant(ctx, letters):
    if _is_numeric(ctx):
        return tuple(ctx.estimate_cumulant(letters))
    return dvalued_cumulant(ctx, letters)


def _judge(value, expected, target, numeric, abs_floor, nsigma=NSIGMA) -> bool:
    if expected in (NONZERO, FREE):
        return True
    if expected == ZERO:
        target = (0,) * len(value)
    if numeric:
        return all(abs(v.mean - complex(t)) <= max(nsigma * v.stderr, abs_floor) for v, t in zip(value, target))
    return all(v == t for v, t in zip(value, target))


def _record(report, ctx, handles, probe_ids, probes, expected, target=None):
    mults = [ones(ctx.d)] * len(handles) if probe_ids is None else [probes[p] for p in probe_ids]
    value = _cumulant(ctx, ctx.word(handles, mults))
    verdict = _judge(value, expected, target, report.numeric, report.abs_floor)
    report.records.append(WordRecord(tuple(handles), probe_ids, expected, value, verdict, target))


def probe_assignments(r: int, n_probes: int, per_word: int, key) -> list[tuple[int, ...]]:
    """Identity everywhere, then seeded draws from the probe list (deduplicated, stable order).

    Probe 0 must be the identity. ``per_word <= 0`` means every assignment.
    """
    if per_word <= 0 or n_probes ** r <= per_word:
        return list(itertools.product(range(n_probes), repeat=r))
    rng = random.Random(repr(key))
    out = [(0,) * r]
    tries = 0
    while len(out) < per_word and tries < 50 * per_word:
        a = tuple(rng.randrange(n_probes) for _ in range(r))
        if a not in out:
            out.append(a)
        tries += 1
    return out


def _check_ctx(ctx: EvaluationContext, d: int, max_r: int, prefix: str):
    if ctx.d != d:
        raise ValueError(f"context has dimension {ctx.d}, scan asked for {d}")
    if max_r > ctx.cap:
        raise ResourceLimitError(f"max_r={max_r} exceeds the context cap {ctx.cap}")
    missing = [f"{prefix}{k}" for k in range(d) if f"{prefix}{k}" not in ctx.elements]
    if missing:
        raise KeyError(f"context lacks elements {missing}")


def allowed_pattern(idx: Sequence[int], d: int) -> bool:
    """All indices zero, or even length with i_t + i_{t+1} = 0 (mod d) cyclically and i_t != 0."""
    r = len(idx)
    if all(i % d == 0 for i in idx):
        return True
    if r % 2:
        return False
    return all(i % d != 0 and (idx[t] + idx[(t + 1) % r]) % d == 0 for t, i in enumerate(idx))


def theorem_pattern_check(ctx: EvaluationContext, d: int, max_r: int,
                          diagonal_probes: Sequence[DiagonalVector] | None = None,
                          per_word: int = 3, abs_floor: float = ABS_FLOOR,
                          alternating_value=None, prefix: str = "Y") -> VanishingReport:
    """Scan kappa-tilde_r(Y_{i_1} D_1, ..., Y_{i_r} D_r) for r <= max_r.

    Words outside :func:`allowed_pattern` must vanish. If
    ``alternating_value`` is given, alternating words with identity
    multipliers must equal it in every slot.
    """
    _check_ctx(ctx, d, max_r, prefix)
    probes = list(diagonal_probes) if diagonal_probes is not None else default_probes(d)
    if not probes or probes[0] != ones(d):
        probes = [ones(d)] + [p for p in probes if tuple(p) != ones(d)]
    report = VanishingReport("theorem pattern", numeric=_is_numeric(ctx), abs_floor=abs_floor)
    for r in range(1, max_r + 1):
        for idx in itertools.product(range(d), repeat=r):
            handles = [f"{prefix}{i}" for i in idx]
            allowed = allowed_pattern(idx, d)
            for a in probe_assignments(r, len(probes), per_word, (d, idx)):
                if not allowed:
                    _record(report, ctx, handles, a, probes, ZERO)
                elif alternating_value is not None and any(idx) and not any(a):
                    _record(report, ctx, handles, a, probes, VALUE, (alternating_value,) * d)
                else:
                    _record(report, ctx, handles, a, probes, NONZERO)
    return report


def sign_words(max_n: int):
    for n in range(1, max_n + 1):
        yield from itertools.product((1, -1), repeat=n)


def r_diagonal_pair_test(ctx: EvaluationContext, y_plus, y_minus, max_n: int,
                         abs_floor: float = ABS_FLOOR, alternating_value=None) -> VanishingReport:
    """Cumulants of sign words (+1 -> y_plus, -1 -> y_minus).

    Only even-length alternating sign words may be nonzero; with
    ``alternating_value`` those must equal it in every slot.
    """
    for h in (y_plus, y_minus):
        if h not in ctx.elements:
            raise KeyError(f"unknown element {h!r}")
    if max_n > ctx.cap:
        raise ResourceLimitError(f"max_n={max_n} exceeds the context cap {ctx.cap}")
    report = VanishingReport(f"R-diagonal pair ({y_plus}, {y_minus})", numeric=_is_numeric(ctx), abs_floor=abs_floor)
    for eps in sign_words(max_n):
        handles = [y_plus if e > 0 else y_minus for e in eps]
        n = len(eps)
        # judged on the handles, so a self-paired element (y_plus == y_minus) is handled too
        alternating = n % 2 == 0 and (
            handles == [y_plus, y_minus] * (n // 2) or handles == [y_minus, y_plus] * (n // 2)
        )
        if not alternating:
            _record(report, ctx, handles, None, None, ZERO)
        elif alternating_value is not None:
            _record(report, ctx, handles, None, None, VALUE, (alternating_value,) * ctx.d)
        else:
            _record(report, ctx, handles, None, None, NONZERO)
    return report


def shift_context(d: int, cap: int = DVAL_CAP) -> MatrixContext:
    """Exact context over the powers S^0, ..., S^(d-1) of the cyclic shift, named ``S<k>``."""
    mats = {}
    for k in range(d):
        mats[f"S{k}"] = [[1 if j == (i + k) % d else 0 for j in range(d)] for i in range(d)]
    return MatrixContext(mats, cap)


def s_cumulant_check(d: int, max_r: int, diagonal_probes: Sequence[DiagonalVector] | None = None,
                     per_word: int = 3) -> VanishingReport:
    """Vanishing of D-valued cumulants of powers of the shift.

    (i) every word with i_1 + ... + i_r != 0 (mod d) vanishes;
    (ii) the paired words (S^{i_1}, S^{-i_1}, ..., S^{i_r}, S^{-i_r}) and their
    rotation by one place vanish unless all i_t agree mod d.
    """
    if not 1 <= d <= 12:
        raise ValueError("d must be in 1..12")
    if not 1 <= max_r <= 6:
        raise ResourceLimitError("max_r must be in 1..6")
    ctx = shift_context(d, cap=max_r)
    probes = list(diagonal_probes) if diagonal_probes is not None else default_probes(d)
    if probes[0] != ones(d):
        probes = [ones(d)] + [p for p in probes if tuple(p) != ones(d)]
    report = VanishingReport("shift cumulants")
    for r in range(1, max_r + 1):
        for idx in itertools.product(range(d), repeat=r):
            handles = [f"S{i}" for i in idx]
            expected = ZERO if sum(idx) % d else FREE
            for a in probe_assignments(r, len(probes), per_word, ("S", d, idx)):
                _record(report, ctx, handles, a, probes, expected)
    for half in range(2, max_r // 2 + 1):
        for ks in itertools.product(range(d), repeat=half):
            paired = [x for k in ks for x in (k, (-k) % d)]
            expected = FREE if len(set(ks)) == 1 else ZERO
            for word in (paired, paired[-1:] + paired[:-1]):
                handles = [f"S{i}" for i in word]
                for a in probe_assignments(len(word), len(probes), per_word, ("S2", d, tuple(word))):
                    _record(report, ctx, handles, a, probes, expected)
    return report


def off_diagonal_vanishing_check(ctx: EvaluationContext, d: int, max_r: int,
                                 diagonal_probes: Sequence[DiagonalVector] | None = None,
                                 per_word: int = 3, abs_floor: float = ABS_FLOOR,
                                 prefix: str = "X") -> VanishingReport:
    """kappa-tilde_r of diagonal parts vanishes whenever i_1 + ... + i_r != 0 (mod d).

    Words with sum 0 are recorded as unconstrained.
    """
    _check_ctx(ctx, d, max_r, prefix)
    probes = list(diagonal_probes) if diagonal_probes is not None else default_probes(d)
    if probes[0] != ones(d):
        probes = [ones(d)] + [p for p in probes if tuple(p) != ones(d)]
    report = VanishingReport("off-diagonal vanishing", numeric=_is_numeric(ctx), abs_floor=abs_floor)
    for r in range(1, max_r + 1):
        for idx in itertools.product(range(d), repeat=r):
            handles = [f"{prefix}{i}" for i in idx]
            expected = ZERO if sum(idx) % d else FREE
            for a in probe_assignments(r, len(probes), per_word, (prefix, d, idx)):
                _record(report, ctx, handles, a, probes, expected)
    return report


def even_element_check(ctx: EvaluationContext, handle, max_n: int) -> VanishingReport:
    """All odd-order cumulants of a single element vanish."""
    report = VanishingReport(f"even element {handle}", numeric=_is_numeric(ctx))
    for n in range(1, max_n + 1, 2):
        _record(report, ctx, [handle] * n, None, None, ZERO)
    return report
