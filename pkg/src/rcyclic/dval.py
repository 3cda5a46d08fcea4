"""Cumulants valued in the diagonal scalar matrices D.

Everything D-valued is a *diagonal vector*: a length-``d`` tuple holding the
diagonal of a scalar diagonal matrix. Since D is commutative all products are
entrywise.

A *letter* is a pair ``(handle, multiplier)`` standing for ``a * Delta`` with
``Delta`` diagonal; a D-valued word is a tuple of letters, i.e. the product
``a_1 Delta_1 a_2 Delta_2 ... a_r Delta_r``. Left diagonal factors are pushed
onto the previous letter's multiplier, or onto a leading factor of the word.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Hashable, Sequence

from .cumulant_core import Functional, connecting_partitions, moments_to_cumulants
from .ncpart import Partition, ResourceLimitError, enumerate_nc, is_noncrossing, mobius_to_top

DiagonalVector = tuple
Letter = tuple  # (handle, DiagonalVector)

DVAL_CAP = 8


def ones(d: int) -> DiagonalVector:
    return (1,) * d


def zeros(d: int) -> DiagonalVector:
    return (0,) * d


def dmul(x: DiagonalVector, y: DiagonalVector) -> DiagonalVector:
    return tuple(a * b for a, b in zip(x, y))


def dadd(x: DiagonalVector, y: DiagonalVector) -> DiagonalVector:
    return tuple(a + b for a, b in zip(x, y))


def dscale(c, x: DiagonalVector) -> DiagonalVector:
    return tuple(c * a for a in x)


def is_zero(x: DiagonalVector) -> bool:
    return all(a == 0 for a in x)


class EvaluationContext(ABC):
    """Backend supplying the D-valued expectation of words.

    Subclasses implement :meth:`_moment`; this base class validates and
    memoizes. ``slot_constant`` declares that, with identity multipliers,
    every diagonal slot of every moment is the same number.
    """

    slot_constant = False

    def __init__(self, d: int, elements: Sequence[Hashable], cap: int = DVAL_CAP):
        if d < 1:
            raise ValueError("dimension must be positive")
        self.d = d
        self.elements = tuple(elements)
        self.cap = cap
        self._moments: dict = {}
        self._cumulants: dict = {}

    @abstractmethod
    def _moment(self, letters: tuple[Letter, ...]) -> DiagonalVector:
        """phi-tilde of the interleaved product; ``letters`` already validated."""

    def moment(self, letters: Sequence[Letter]) -> DiagonalVector:
        letters = tuple(letters)
        hit = self._moments.get(letters)
        if hit is not None:
            return hit
        self._validate(letters)
        val = self._moment(letters)
        self._moments[letters] = val
        return val

    def _validate(self, letters):
        if not letters:
            raise ValueError("empty D-valued word")
        if len(letters) > self.cap:
            raise ResourceLimitError(f"word length {len(letters)} exceeds cap {self.cap}")
        for h, delta in letters:
            if h not in self.elements:
                raise KeyError(f"unknown element {h!r}")
            if len(delta) != self.d:
                raise ValueError(f"multiplier of length {len(delta)} in a dimension-{self.d} context")

    def word(self, handles: Sequence[Hashable], multipliers: Sequence[DiagonalVector] | None = None):
        """Build a letter tuple; missing multipliers default to the identity."""
        if multipliers is None:
            multipliers = [ones(self.d)] * len(handles)
        if len(multipliers) != len(handles):
            raise ValueError("one multiplier per letter")
        return tuple((h, tuple(m)) for h, m in zip(handles, multipliers))


# -- nested multiplicative extension ---------------------------------------


@lru_cache(maxsize=None)
def removal_schedule(pi: Partition, choice: int = -1) -> tuple:
    """Order in which interval blocks are peeled off ``pi``.

    Returns ``(steps, last)``: each step is ``(block, predecessor)`` where
    ``predecessor`` is the surviving position immediately to the left of the
    block, or ``None`` when the block sits at the front. ``choice`` picks
    which interval block to remove whenever several qualify (index into the
    list of candidates, taken modulo its length).
    """
    alive = list(range(pi.n))
    remaining = [tuple(b) for b in pi.blocks]
    steps = []
    while len(remaining) > 1:
        where = {x: i for i, x in enumerate(alive)}
        candidates = []
        for b in remaining:
            lo = where[b[0]]
            if where[b[-1]] - lo + 1 == len(b):
                candidates.append((b, alive[lo - 1] if lo > 0 else None))
        if not candidates:
            raise ValueError(f"partition {pi} is crossing")
        b, pred = candidates[choice % len(candidates)]
        steps.append((b, pred))
        remaining.remove(b)
        dead = set(b)
        alive = [x for x in alive if x not in dead]
    return tuple(steps), remaining[0]


def nested_extension(
    f: Callable[[tuple], DiagonalVector],
    pi: Partition,
    letters: Sequence[Letter],
    d: int,
    choice: int = -1,
) -> DiagonalVector:
    """Multiplicative extension of a D-valued functional ``f`` over ``pi``.

    Each interval block is evaluated, and its value is multiplied into the
    multiplier of the letter just before it (or into a leading factor).
    """
    letters = list(letters)
    if pi.n != len(letters):
        raise ValueError(f"partition of {pi.n} points applied to a word of length {len(letters)}")
    steps, last = removal_schedule(pi, choice)
    lead = None
    for block, pred in steps:
        val = f(tuple(letters[i] for i in block))
        if is_zero(val):
            return zeros(d)
        if pred is None:
            lead = val if lead is None else dmul(lead, val)
        else:
            h, m = letters[pred]
            letters[pred] = (h, dmul(m, val))
    out = f(tuple(letters[i] for i in last))
    return out if lead is None else dmul(lead, out)


def phi_tilde_pi(ctx: EvaluationContext, pi: Partition, w: Sequence[Letter], choice: int = -1) -> DiagonalVector:
    if not is_noncrossing(pi):
        raise ValueError(f"partition {pi} is crossing")
    return nested_extension(ctx.moment, pi, w, ctx.d, choice)


def dvalued_cumulant(ctx: EvaluationContext, w: Sequence[Letter]) -> DiagonalVector:
    """kappa-tilde_n(w) = sum over NC(n) of mu(pi, 1_n) * phi-tilde_pi(w)."""
    w = tuple(w)
    hit = ctx._cumulants.get(w)
    if hit is not None:
        return hit
    ctx._validate(w)
    total = zeros(ctx.d)
    for pi, mu in mobius_to_top(len(w)).items():
        term = nested_extension(ctx.moment, pi, w, ctx.d)
        if not is_zero(term):
            total = tuple(t + mu * x for t, x in zip(total, term))
    ctx._cumulants[w] = total
    return total


def dvalued_cumulant_pi(ctx: EvaluationContext, pi: Partition, w: Sequence[Letter], choice: int = -1) -> DiagonalVector:
    if not is_noncrossing(pi):
        raise ValueError(f"partition {pi} is crossing")
    return nested_extension(lambda sub: dvalued_cumulant(ctx, sub), pi, w, ctx.d, choice)


def grouped_dvalued_cumulant(ctx: EvaluationContext, lengths: Sequence[int], w: Sequence[Letter]) -> DiagonalVector:
    """Cumulant of the grouped products cut from ``w`` by ``lengths``."""
    w = tuple(w)
    lengths = tuple(lengths)
    if sum(lengths) != len(w):
        raise ValueError(f"lengths sum to {sum(lengths)}, word has length {len(w)}")
    total = zeros(ctx.d)
    for pi in connecting_partitions(lengths):
        total = dadd(total, dvalued_cumulant_pi(ctx, pi, w))
    return total


def slot_average(x: DiagonalVector):
    d = len(x)
    total = sum(x[1:], x[0])
    if isinstance(total, float | complex):
        return total / d
    return total * Fraction(1, d)


def scalar_functional(ctx: EvaluationContext) -> Functional:
    """The scalar state phi = (1/d) trace of phi-tilde, on words of handles."""
    return Functional(lambda w: slot_average(ctx.moment(ctx.word(w))), universe=ctx.elements, cap=ctx.cap)


def scalar_cumulant(ctx: EvaluationContext, handles: Sequence[Hashable], phi: Functional | None = None):
    """Scalar-valued free cumulant, by Moebius inversion of slot-averaged moments."""
    return moments_to_cumulants(phi or scalar_functional(ctx), tuple(handles))


# -- exact scalar-matrix context ---------------------------------------------


class MatrixContext(EvaluationContext):
    """Elements are d x d matrices over the scalars; phi-tilde is the diagonal.

    Entries may be ints, Fractions or Polys; arithmetic stays exact.
    """

    slot_constant = False

    def __init__(self, matrices: dict[Hashable, Sequence[Sequence[Any]]], cap: int = DVAL_CAP):
        mats = {h: tuple(tuple(row) for row in m) for h, m in matrices.items()}
        dims = {len(m) for m in mats.values()}
        if len(dims) != 1:
            raise ValueError("all matrices must share one dimension")
        d = dims.pop()
        for h, m in mats.items():
            if any(len(row) != d for row in m):
                raise ValueError(f"matrix {h!r} is not square")
        super().__init__(d, tuple(mats), cap)
        self.matrices = mats

    def _moment(self, letters):
        d = self.d
        # row vectors of the running product, kept sparse per row
        rows = [{i: 1} for i in range(d)]
        for h, delta in letters:
            m = self.matrices[h]
            new_rows = []
            for row in rows:
                acc: dict[int, Any] = {}
                for k, v in row.items():
                    for j, x in enumerate(m[k]):
                        if x != 0:
                            acc[j] = acc.get(j, 0) + v * x
                new_rows.append({j: v * delta[j] for j, v in acc.items() if v != 0 and delta[j] != 0})
            rows = new_rows
        return tuple(rows[i].get(i, 0) for i in range(d))
