"""Monte Carlo for complex Wishart matrices and their partial transposes.

``W = (1/(d1 d2)) (G_i G_j^*)_{ij}`` with ``G_1..G_d1`` independent ``d2 x p``
complex Gaussian matrices whose entries have E|g|^2 = 1 (real and imaginary
parts N(0, 1/2)). The implied parameter is ``c = p / (d1 d2)``.

Randomness: trial ``t`` draws from a PCG64 stream seeded by
``SeedSequence(seed, spawn_key=(t,))``, so a trial's matrix depends only on
``(seed, t)`` and results do not depend on the number of worker threads.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .dval import EvaluationContext, dvalued_cumulant
from .matgroup import ComplexMatrix, as_matrix, diag_part, partial_transpose

SEED_ENV = "RCYCLIC_SEED"
DEFAULT_SEED = 20190301


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, DEFAULT_SEED))


@dataclass(frozen=True)
class EnsembleConfig:
    d1: int
    d2: int
    p: int
    trials: int = 20
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        for name in ("d1", "d2", "p", "trials"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def c(self) -> float:
        return self.p / (self.d1 * self.d2)

    def as_dict(self) -> dict:
        return {**asdict(self), "c": self.c}


@dataclass(frozen=True)
class EstimateWithError:
    mean: complex
    stderr: float
    trials: int

    @classmethod
    def from_samples(cls, samples) -> "EstimateWithError":
        x = np.asarray(samples, dtype=complex)
        n = len(x)
        mean = x.mean()
        if n < 2:
            return cls(complex(mean), float("inf") if n == 1 else float("nan"), n)
        # sample std of a complex variable: sqrt(var(re) + var(im))
        sd = math.sqrt(x.real.var(ddof=1) + x.imag.var(ddof=1))
        return cls(complex(mean), sd / math.sqrt(n), n)

    def agrees(self, target, nsigma: float = 4.0, floor: float = 0.0) -> bool:
        return abs(self.mean - complex(target)) <= max(nsigma * self.stderr, floor)

    def to_json(self) -> dict:
        return {"mean": [self.mean.real, self.mean.imag], "stderr": self.stderr, "trials": self.trials}


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def sample_gaussian(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    if rows < 1 or cols < 1:
        raise ValueError("dimensions must be positive")
    z = rng.standard_normal((rows, cols, 2))
    return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2)


def _gaussians(cfg: EnsembleConfig, rng) -> np.ndarray:
    """Stacked G_1, ..., G_d1 as one (d1 d2) x p matrix."""
    return sample_gaussian(cfg.d1 * cfg.d2, cfg.p, rng)


def build_wishart(cfg: EnsembleConfig, rng: np.random.Generator) -> ComplexMatrix:
    g = _gaussians(cfg, rng)
    w = g @ g.conj().T / (cfg.d1 * cfg.d2)
    w = (w + w.conj().T) / 2
    return ComplexMatrix(w, cfg.d1, cfg.d2)


def _map_trials(fn, trials: int, threads: int | None):
    if threads == 1 or trials == 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


# -- Y-word path traces -------------------------------------------------------


def _closed_words(d: int, max_len: int):
    for r in range(1, max_len + 1):
        for ks in itertools.product(range(d), repeat=r):
            if sum(ks) % d == 0:
                yield ks


def _path_traces(cfg: EnsembleConfig, trial: int, max_len: int) -> dict:
    """tau of the path product of Y-blocks for every closed Y-word and start slot."""
    d1, m = cfg.d1, cfg.d2
    g = _gaussians(cfg, trial_rng(cfg.seed, trial)).reshape(d1, m, cfg.p)
    # block (a, a+k) of Y_k is d1 * W^Gamma block (a, a+k) = G_{a+k} G_a^* / d2
    blocks = {}
    for a in range(d1):
        for b in range(d1):
            blocks[a, b] = g[b] @ g[a].conj().T / m
    out = {}

    def walk(start, a, ks, prod):
        r = len(ks)
        for k in range(d1):
            b = (a + k) % d1
            step = blocks[a, b]
            word = ks + (k,)
            if b == start:
                # trace(prod @ step) without forming the product
                tr = np.trace(step) if prod is None else np.sum(prod * step.T)
                out[word, start] = tr / m
            if r + 1 < max_len:
                walk(start, b, word, step if prod is None else prod @ step)

    for i in range(d1):
        walk(i, i, (), None)
    return out


class MCContext(EvaluationContext):
    """Evaluation context over ``Y0..Y{d1-1}`` from sampled ``d1 * W^Gamma``.

    All path traces up to ``max_len`` letters are computed when the context is
    built; the oracle averages them over trials. Diagonal multipliers factor
    out of each path, so any interleaved word can be answered from the table.
    """

    def __init__(self, cfg: EnsembleConfig, traces: dict, trials: Sequence[int], max_len: int):
        super().__init__(cfg.d1, tuple(f"Y{k}" for k in range(cfg.d1)), cap=max_len)
        self.cfg = cfg
        self.traces = traces
        self.trials = tuple(trials)
        self.max_len = max_len

    def _slot_samples(self, letters, slot) -> np.ndarray:
        d = self.d
        ks = tuple(int(h[1:]) for h, _ in letters)
        if sum(ks) % d:
            return np.zeros(len(self.trials), dtype=complex)
        scale = 1.0 + 0j
        a = slot
        for k, (_, delta) in zip(ks, letters):
            a = (a + k) % d
            scale *= complex(delta[a])
        vals = self.traces[ks, slot]
        return scale * vals[list(self.trials)]

    def _moment(self, letters):
        out = []
        for i in range(self.d):
            s = self._slot_samples(letters, i)
            out.append(complex(s.mean()) if s.any() else 0)
        return tuple(out)

    def estimate(self, letters) -> list[EstimateWithError]:
        letters = tuple(letters)
        self._validate(letters)
        return [EstimateWithError.from_samples(self._slot_samples(letters, i)) for i in range(self.d)]

    def trial(self, t: int) -> "MCContext":
        return MCContext(self.cfg, self.traces, (t,), self.max_len)

    def estimate_cumulant(self, letters) -> list[EstimateWithError]:
        """D-valued cumulant computed within each trial, then averaged with its stderr."""
        per_trial = [dvalued_cumulant(self.trial(t), letters) for t in self.trials]
        return [EstimateWithError.from_samples([v[i] for v in per_trial]) for i in range(self.d)]


def mc_context(cfg: EnsembleConfig, max_len: int = 4, threads: int | None = None) -> MCContext:
    tables = _map_trials(lambda t: _path_traces(cfg, t, max_len), cfg.trials, threads)
    traces = {key: np.array([tab[key] for tab in tables]) for key in tables[0]}
    for ks in _closed_words(cfg.d1, max_len):
        for i in range(cfg.d1):
            traces.setdefault((ks, i), np.zeros(cfg.trials, dtype=complex))
    return MCContext(cfg, traces, range(cfg.trials), max_len)


# -- scalar moments of W, W^Gamma and the Y parts ----------------------------------


def _parse_symbol(tok: str):
    adj = tok.endswith("*")
    base = tok[:-1] if adj else tok
    if base in ("W", "WG", "W^G", "WGamma"):
        return ("WG" if base != "W" else "W"), None, adj
    if base.startswith("Y") and base[1:].isdigit():
        return "Y", int(base[1:]), adj
    raise KeyError(f"unknown symbol {tok!r}")


def _normalized_trace_of_product(mats: list[np.ndarray]) -> complex:
    if len(mats) == 1:
        return complex(np.trace(mats[0])) / mats[0].shape[0]
    prod = mats[0]
    for x in mats[1:-1]:
        prod = prod @ x
    return complex(np.sum(prod * mats[-1].T)) / prod.shape[0]


def estimate_scalar_moments(cfg: EnsembleConfig, words: Sequence[Sequence[str]],
                            threads: int | None = None) -> list[EstimateWithError]:
    """phi (normalized trace) of each word, averaged over trials.

    Symbols: ``W``, ``WG`` (the partial transpose W^Gamma), ``Y<k>`` (the
    k-th diagonal part of ``d1 * W^Gamma``); a trailing ``*`` takes the adjoint.
    """
    parsed = [[_parse_symbol(t) for t in w] for w in words]
    for w in parsed:
        if not w:
            raise ValueError("empty word")

    def one_trial(t):
        w = build_wishart(cfg, trial_rng(cfg.seed, t))
        wg = partial_transpose(w)
        cache = {"W": w.data, "WG": wg.data}
        vals = []
        for word in parsed:
            mats = []
            for kind, k, adj in word:
                key = kind if k is None else (kind, k)
                if key not in cache:
                    cache[key] = diag_part(wg.with_data(cfg.d1 * wg.data), k).data
                x = cache[key]
                mats.append(x.conj().T if adj else x)
            vals.append(_normalized_trace_of_product(mats))
        return vals

    rows = _map_trials(one_trial, cfg.trials, threads)
    return [EstimateWithError.from_samples([r[i] for r in rows]) for i in range(len(parsed))]


def estimate_scalar_moment(cfg: EnsembleConfig, word: Sequence[str], threads: int | None = None) -> EstimateWithError:
    return estimate_scalar_moments(cfg, [word], threads)[0]


def empirical_spectrum(x, tol: float = 1e-8) -> np.ndarray:
    a = as_matrix(x).data
    if a.shape[0] != a.shape[1]:
        raise ValueError("spectrum needs a square matrix")
    dev = np.abs(a - a.conj().T).max() if a.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (deviation {dev:.3g})")
    return np.linalg.eigvalsh((a + a.conj().T) / 2)


def ks_distance(eigs, cdf) -> float:
    """sup_t |F_empirical(t) - F(t)| for a sorted sample and a CDF callable."""
    x = np.sort(np.asarray(eigs, dtype=float))
    n = len(x)
    worst = 0.0
    for i, t in enumerate(x):
        f = cdf(t)
        worst = max(worst, abs((i + 1) / n - f), abs(i / n - f))
    return worst


def result_record(cfg: EnsembleConfig, word, est: EstimateWithError, wall_time: float) -> dict:
    return {"config": cfg.as_dict(), "word": list(word), **est.to_json(), "wall_time": wall_time}


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0
