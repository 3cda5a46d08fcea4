"""Scalar moment/cumulant transforms over non-crossing partitions.

Functionals are callables taking a tuple of element handles (a *word*) and
returning an exact value (``int``, ``Fraction`` or :class:`~rcyclic.poly.Poly`).
Because scalars commute, the multiplicative extension over a partition is just
the product of the functional on each block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Hashable, Sequence

from .ncpart import (
    NC_CAP,
    Partition,
    ResourceLimitError,
    connects,
    enumerate_nc,
    interval_sigma,
    is_noncrossing,
    mobius_to_top,
)

Word = tuple[Hashable, ...]


@dataclass
class Functional:
    """A memoized multilinear functional on words over a declared universe.

    Used both for moment functionals and for cumulant specifications; which
    one it is depends only on how the caller interprets the values.
    """

    fn: Callable[[Word], Any]
    universe: tuple[Hashable, ...] | None = None
    cap: int = NC_CAP
    _memo: dict = field(default_factory=dict, repr=False)

    def __call__(self, word: Sequence[Hashable]):
        word = tuple(word)
        if not word:
            raise ValueError("functionals are not defined on the empty word")
        if len(word) > self.cap:
            raise ResourceLimitError(f"word length {len(word)} exceeds cap {self.cap}")
        if self.universe is not None:
            for a in word:
                if a not in self.universe:
                    raise KeyError(f"unknown element {a!r}")
        hit = self._memo.get(word)
        if hit is None:
            hit = self.fn(word)
            self._memo[word] = hit
        return hit


MultilinearFunctional = Functional
CumulantSpec = Functional


def single_variable(sequence: Callable[[int], Any], name: Hashable = "x", cap: int = NC_CAP) -> Functional:
    """Functional of one element whose value on ``x^n`` is ``sequence(n)``."""
    return Functional(lambda w: sequence(len(w)), universe=(name,), cap=cap)


def _check_word(word, cap=NC_CAP) -> Word:
    word = tuple(word)
    if not word:
        raise ValueError("empty word")
    if len(word) > cap:
        raise ResourceLimitError(f"word length {len(word)} exceeds cap {cap}")
    return word


def multiplicative_extension(f: Callable[[Word], Any], pi: Partition, word: Sequence[Hashable]):
    word = tuple(word)
    if pi.n != len(word):
        raise ValueError(f"partition of {pi.n} points applied to a word of length {len(word)}")
    if not is_noncrossing(pi):
        raise ValueError(f"partition {pi} is crossing")
    return _extension(f, pi, word)


def _extension(f, pi, word):
    out = 1
    for block in pi.blocks:
        val = f(tuple(word[i] for i in block))
        if val == 0:
            return 0
        out = val * out
    return out


def cumulants_to_moments(k: Callable[[Word], Any], word: Sequence[Hashable]):
    word = _check_word(word)
    total = 0
    for pi in enumerate_nc(len(word)):
        total = total + _extension(k, pi, word)
    return total


def moments_to_cumulants(m: Callable[[Word], Any], word: Sequence[Hashable]):
    word = _check_word(word)
    total = 0
    for pi, mu in mobius_to_top(len(word)).items():
        term = _extension(m, pi, word)
        if term != 0:
            total = total + mu * term
    return total


@lru_cache(maxsize=256)
def connecting_partitions(lengths: tuple[int, ...]) -> tuple[Partition, ...]:
    """All pi in NC(n) whose NC-join with the interval partition of ``lengths`` is 1_n."""
    sigma = interval_sigma(lengths)
    return tuple(pi for pi in enumerate_nc(sigma.n) if connects(pi, sigma))


def grouped_cumulant(k: Callable[[Word], Any], lengths: Sequence[int], word: Sequence[Hashable]):
    """Cumulant of the grouped products ``A_1, ..., A_r`` cut from ``word`` by ``lengths``."""
    word = _check_word(word)
    lengths = tuple(lengths)
    if sum(lengths) != len(word):
        raise ValueError(f"lengths sum to {sum(lengths)}, word has length {len(word)}")
    total = 0
    for pi in connecting_partitions(lengths):
        total = total + _extension(k, pi, word)
    return total
