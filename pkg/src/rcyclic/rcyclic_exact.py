"""Exact moments of R-cyclic matrices from their entry cumulants.

An R-cyclic ``d x d`` matrix is described by the free cumulants of its
entries, which vanish unless the index pairs ``(i_1, j_1), ..., (i_s, j_s)``
close up cyclically (``j_t = i_{t+1}`` and ``j_s = i_1``). Entry moments are
sums over non-crossing partitions of products of these cumulants.

The diagonal parts of the matrix and of its transpose are exposed as an
:class:`~rcyclic.dval.EvaluationContext`: letters ``"X<k>"`` are the diagonal
parts of the matrix, ``"Y<k>"`` those of its transpose.
"""

from __future__ import annotations

import json
import random
import threading
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Sequence

from .dval import DVAL_CAP, EvaluationContext, ones
from .ncpart import ResourceLimitError
from .poly import Poly

ENTRY_CAP = 10

IndexPair = tuple[int, int]


def is_cyclic(pairs: Sequence[IndexPair], d: int) -> bool:
    s = len(pairs)
    return all(pairs[t][1] % d == pairs[(t + 1) % s][0] % d for t in range(s))


def _canonical(word: tuple[IndexPair, ...]) -> tuple[IndexPair, ...]:
    relabel: dict[int, int] = {}
    out = []
    for i, j in word:
        a = relabel.setdefault(i, len(relabel))
        b = relabel.setdefault(j, len(relabel))
        out.append((a, b))
    return tuple(out)


class EntryCumulantModel:
    """Entry cumulants of an R-cyclic matrix.

    ``kappa`` maps a tuple of index pairs to an exact value. The engine zeroes
    non-cyclic tuples itself, so ``kappa`` is only consulted on cyclic ones.
    ``uniform`` declares that the value depends only on the tuple length, which
    lets moments be shared between words that differ by a relabelling of
    indices.
    """

    def __init__(self, d: int, kappa: Callable[[tuple[IndexPair, ...]], Any], uniform: bool = False,
                 name: str = "model", cap: int = ENTRY_CAP):
        if d < 1:
            raise ValueError("d must be positive")
        self.d = d
        self.kappa = kappa
        self.uniform = uniform
        self.name = name
        self.cap = cap
        self._lock = threading.Lock()
        self._moments: dict[tuple[IndexPair, ...], Any] = {}
        self._cumulants: dict[tuple[IndexPair, ...], Any] = {}

    def __repr__(self):
        return f"EntryCumulantModel({self.name!r}, d={self.d}, uniform={self.uniform})"

    def cumulant(self, pairs: Sequence[IndexPair]):
        pairs = tuple(pairs)
        if not is_cyclic(pairs, self.d):
            return 0
        hit = self._cumulants.get(pairs)
        if hit is None:
            hit = self.kappa(pairs)
            with self._lock:
                self._cumulants[pairs] = hit
        return hit

    def to_json(self, max_len: int | None = None) -> dict:
        """``{"d": d, "uniform": {"value": poly}}`` or ``{"d": d, "explicit": {"i,j;k,l": poly}}``.

        Explicit models are materialized on every cyclic tuple up to
        ``max_len``; tuples absent from the table have cumulant 0.
        """
        if self.uniform:
            return {"d": self.d, "uniform": {"value": Poly.lift(self.cumulant(((0, 0),))).to_json()}}
        if max_len is None:
            raise ValueError("explicit models need max_len to be serialized")
        table = {}
        for pairs in cyclic_tuples(self.d, max_len):
            val = self.cumulant(pairs)
            if val != 0:
                table[";".join(f"{i},{j}" for i, j in pairs)] = Poly.lift(val).to_json()
        return {"d": self.d, "explicit": table}

    @classmethod
    def from_json(cls, data: dict) -> "EntryCumulantModel":
        d = int(data["d"])
        if "uniform" in data:
            value = Poly.from_json(data["uniform"]["value"])
            value = value.constant_value() if value.is_constant() else value
            return uniform_model(d, value)
        table = {}
        for key, val in data["explicit"].items():
            pairs = tuple(tuple(int(x) for x in p.split(",")) for p in key.split(";"))
            v = Poly.from_json(val)
            table[pairs] = v.constant_value() if v.is_constant() else v
        return cls(d, lambda pairs: table.get(pairs, 0), uniform=False, name="explicit")

    def dumps(self, max_len: int | None = None) -> str:
        return json.dumps(self.to_json(max_len), sort_keys=True)


def cyclic_tuples(d: int, max_len: int) -> Iterable[tuple[IndexPair, ...]]:
    """Every cyclic tuple of index pairs of length 1..max_len."""
    def rec(prefix):
        if prefix:
            yield tuple(zip(prefix, prefix[1:] + prefix[:1]))
        if len(prefix) < max_len:
            for i in range(d):
                yield from rec(prefix + [i])
    yield from rec([])


def uniform_model(d: int, value) -> EntryCumulantModel:
    return EntryCumulantModel(d, lambda pairs: value, uniform=True, name=f"uniform({value})")


def _param(c):
    if isinstance(c, str):
        return Poly.symbol(c)
    if isinstance(c, Poly):
        return c
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def wishart_entry_model(d1: int, c="c") -> EntryCumulantModel:
    """Limit of ``d1 * W`` for the Wishart matrix: every cyclic cumulant is ``c * d1``.

    ``c`` may be a symbol name, a :class:`Poly`, or a rational number.
    """
    if d1 < 1:
        raise ValueError("d1 must be positive")
    model = uniform_model(d1, _param(c) * d1)
    model.name = f"wishart(d1={d1}, c={c})"
    return model


def random_model(d: int, seed: int, low: int = -4, high: int = 4, max_den: int = 3) -> EntryCumulantModel:
    """Non-uniform model with a pseudo-random rational cumulant per cyclic tuple.

    The value of each tuple is a function of ``(seed, tuple)`` only.
    """
    def kappa(pairs):
        r = random.Random(f"{seed}:{pairs}")
        num = r.randint(low, high)
        while num == 0:
            num = r.randint(low, high)
        return Fraction(num, r.randint(1, max_den))

    return EntryCumulantModel(d, kappa, uniform=False, name=f"random(d={d}, seed={seed})")


def entry_moment(model: EntryCumulantModel, word: Sequence[IndexPair], weights: Sequence[Any] | None = None):
    """tau(a_{i1 j1} ... a_{in jn}): sum over NC(n) of products of cyclic block cumulants.

    The sum is organized by the block containing the first letter; the blocks
    are grown only along cyclic continuations and the gaps they leave are
    evaluated recursively (and memoized), so non-cyclic partitions are never
    visited.
    """
    word = tuple((int(i), int(j)) for i, j in word)
    if not word:
        raise ValueError("empty entry word")
    if len(word) > model.cap:
        raise ResourceLimitError(f"entry word length {len(word)} exceeds cap {model.cap}")
    for i, j in word:
        if not (0 <= i < model.d and 0 <= j < model.d):
            raise IndexError(f"index pair {(i, j)} out of range for d={model.d}")
    val = _moment(model, word)
    if weights is not None:
        if len(weights) != len(word):
            raise ValueError("one weight per letter")
        for w in weights:
            val = val * w
    return val


def _moment(model: EntryCumulantModel, word: tuple[IndexPair, ...]):
    if not word:
        return 1
    key = _canonical(word) if model.uniform else word
    hit = model._moments.get(key)
    if hit is not None:
        return hit
    n = len(word)
    total = 0

    def grow(block: list[int], acc):
        nonlocal total
        last = block[-1]
        j_last = word[last][1]
        if j_last == word[block[0]][0]:
            tail = _moment(model, word[last + 1:])
            if tail != 0:
                k = model.cumulant(tuple(word[p] for p in block))
                if k != 0:
                    total = total + acc * tail * k
        for nxt in range(last + 1, n):
            if word[nxt][0] != j_last:
                continue
            gap = _moment(model, word[last + 1:nxt])
            if gap != 0:
                block.append(nxt)
                grow(block, acc * gap)
                block.pop()

    grow([0], 1)
    with model._lock:
        model._moments[key] = total
    return total


class RCyclicContext(EvaluationContext):
    """phi-tilde of words in the diagonal parts of an R-cyclic matrix and its transpose.

    Slot ``i`` of a word ``Z_{k1} D_1 ... Z_{kr} D_r`` is the single path
    ``i -> i+k1 -> ... `` (zero unless the shifts sum to 0 mod d); each step
    ``a -> b`` reads the entry ``(a, b)`` of the matrix for an ``X`` letter and
    the entry ``(b, a)`` for a ``Y`` letter.
    """

    def __init__(self, model: EntryCumulantModel, kinds: Sequence[str] = ("Y",), cap: int = DVAL_CAP):
        self.model = model
        d = model.d
        elements = tuple(f"{kind}{k}" for kind in kinds for k in range(d))
        super().__init__(d, elements, cap)
        self.slot_constant = model.uniform
        self._parsed = {h: (h[0], int(h[1:])) for h in elements}

    def _moment(self, letters):
        d = self.d
        steps = [self._parsed[h] for h, _ in letters]
        if sum(k for _, k in steps) % d:
            return (0,) * d
        out = []
        for i in range(d):
            a = i
            pairs = []
            scale = 1
            for (kind, k), (_, delta) in zip(steps, letters):
                b = (a + k) % d
                pairs.append((a, b) if kind == "X" else (b, a))
                scale = scale * delta[b]
                a = b
            if scale == 0:
                out.append(0)
                continue
            m = _moment(self.model, tuple(pairs))
            out.append(m * scale if m != 0 else 0)
        return tuple(out)


def y_context(model: EntryCumulantModel, transposed: bool = True, cap: int = DVAL_CAP) -> RCyclicContext:
    """Context over ``Y0..Y{d-1}`` (transpose) or ``X0..X{d-1}`` (plain)."""
    return RCyclicContext(model, ("Y",) if transposed else ("X",), cap)


def _token_steps(token: str, d: int) -> tuple[str, tuple[int, ...]]:
    if token == "W":
        return "X", tuple(range(d))
    if token in ("WT", "Wt", "W^t"):
        return "Y", tuple(range(d))
    kind, rest = token[0], token[1:]
    if kind not in "XY" or not rest.isdigit():
        raise KeyError(f"unknown symbol {token!r}")
    return kind, (int(rest) % d,)


def scalar_phi(model: EntryCumulantModel, word: Sequence[str], cap: int = ENTRY_CAP):
    """phi = (1/d) sum_i tau(product)_{ii} for a word of matrix symbols.

    Symbols: ``"X<k>"``, ``"Y<k>"`` (diagonal parts of the matrix and of its
    transpose), ``"W"`` (the whole matrix, i.e. the sum of its ``X`` parts) and
    ``"WT"`` (its transpose). The matrix here is the one whose entries carry
    the model's cumulants, with no 1/d normalization.
    """
    word = tuple(word)
    if not word:
        raise ValueError("empty word")
    if len(word) > cap:
        raise ResourceLimitError(f"word length {len(word)} exceeds cap {cap}")
    d = model.d
    steps = [_token_steps(t, d) for t in word]
    n = len(steps)
    counts: dict[tuple[IndexPair, ...], int] = {}

    def walk(t, a, start, pairs):
        if t == n:
            if a == start:
                key = _canonical(tuple(pairs)) if model.uniform else tuple(pairs)
                counts[key] = counts.get(key, 0) + 1
            return
        kind, shifts = steps[t]
        for k in shifts:
            b = (a + k) % d
            pairs.append((a, b) if kind == "X" else (b, a))
            walk(t + 1, b, start, pairs)
            pairs.pop()

    for i in range(d):
        walk(0, i, i, [])
    total = 0
    for pairs, mult in counts.items():
        m = _moment(model, pairs)
        if m != 0:
            total = total + m * mult
    return total * Fraction(1, d)
