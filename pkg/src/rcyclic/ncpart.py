"""Non-crossing partitions of {0, ..., n-1}.

Partitions are immutable and stored canonically: blocks sorted by their
minimum, elements sorted ascending. The text form used by the CLI and
fixtures is ``"0,1/2/3"`` (blocks joined by ``/``, elements by ``,``).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

NC_CAP = 14


class ResourceLimitError(RuntimeError):
    """Raised when a requested enumeration exceeds its configured cap."""


@dataclass(frozen=True, eq=True)
class Partition:
    n: int
    blocks: tuple[tuple[int, ...], ...]
    _labels: tuple[int, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("partition ground set must be nonempty")
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0] if b else -1))
        labels = [-1] * self.n
        for k, b in enumerate(blocks):
            if not b:
                raise ValueError("empty block")
            for x in b:
                if not 0 <= x < self.n:
                    raise ValueError(f"element {x} outside 0..{self.n - 1}")
                if labels[x] != -1:
                    raise ValueError(f"element {x} appears in two blocks")
                labels[x] = k
        if -1 in labels:
            raise ValueError(f"element {labels.index(-1)} not covered")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "_labels", tuple(labels))

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        groups: dict[int, list[int]] = {}
        for i, lab in enumerate(labels):
            groups.setdefault(lab, []).append(i)
        return cls(len(labels), tuple(tuple(g) for g in groups.values()))

    @classmethod
    def parse(cls, text: str) -> "Partition":
        blocks = [tuple(int(x) for x in part.split(",")) for part in text.strip().split("/")]
        n = sum(len(b) for b in blocks)
        return cls(n, tuple(blocks))

    def __str__(self) -> str:
        return "/".join(",".join(str(x) for x in b) for b in self.blocks)

    @property
    def labels(self) -> tuple[int, ...]:
        """Block index of each element (blocks numbered in canonical order)."""
        return self._labels

    def __len__(self) -> int:
        return len(self.blocks)

    def is_interval(self, block: Sequence[int]) -> bool:
        return block[-1] - block[0] + 1 == len(block)

    def refines(self, other: "Partition") -> bool:
        """``self <= other`` in the refinement order."""
        if self.n != other.n:
            return False
        lab = other.labels
        return all(len({lab[x] for x in b}) == 1 for b in self.blocks)


def zero(n: int) -> Partition:
    return Partition(n, tuple((i,) for i in range(n)))


def one(n: int) -> Partition:
    return Partition(n, (tuple(range(n)),))


def is_noncrossing(p: Partition) -> bool:
    # a < b < c < d with a, c in one block and b, d in another
    lab = p.labels
    n = p.n
    for a in range(n):
        for b in range(a + 1, n):
            if lab[b] == lab[a]:
                continue
            for c in range(b + 1, n):
                if lab[c] != lab[a]:
                    continue
                for d in range(c + 1, n):
                    if lab[d] == lab[b]:
                        return False
    return True


def _crossing_pair(blocks: list[list[int]]):
    lab = {}
    for k, b in enumerate(blocks):
        for x in b:
            lab[x] = k
    n = len(lab)
    for a in range(n):
        for b in range(a + 1, n):
            if lab[b] == lab[a]:
                continue
            for c in range(b + 1, n):
                if lab[c] != lab[a]:
                    continue
                for d in range(c + 1, n):
                    if lab[d] == lab[b]:
                        return lab[a], lab[b]
    return None


@lru_cache(maxsize=None)
def _nc_interval(lo: int, hi: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All NC partitions of the integer interval [lo, hi), as block tuples."""
    if lo >= hi:
        return ((),)
    out = []
    rest = list(range(lo + 1, hi))
    # choose the block containing lo; the gaps it leaves are filled independently
    for mask in range(1 << len(rest)):
        first = [lo] + [rest[i] for i in range(len(rest)) if mask >> i & 1]
        bounds = first + [hi]
        pieces = [_nc_interval(bounds[t] + 1, bounds[t + 1]) for t in range(len(first))]
        combos: list[tuple[tuple[int, ...], ...]] = [(tuple(first),)]
        for options in pieces:
            combos = [c + o for c in combos for o in options]
        out.extend(combos)
    return tuple(out)


def enumerate_nc(n: int, cap: int = NC_CAP) -> list[Partition]:
    """Every non-crossing partition of {0..n-1}; there are Catalan(n) of them."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > cap:
        raise ResourceLimitError(f"NC({n}) exceeds the enumeration cap {cap}")
    return list(_enumerate_cached(n))


@lru_cache(maxsize=16)
def _enumerate_cached(n: int) -> tuple[Partition, ...]:
    parts = _nc_interval(0, n)
    if n > 10:
        _nc_interval.cache_clear()
    return tuple(sorted((Partition(n, b) for b in parts), key=lambda p: p.labels))


def interval_sigma(lengths: Sequence[int]) -> Partition:
    if not lengths:
        raise ValueError("lengths must be nonempty")
    blocks = []
    start = 0
    for ln in lengths:
        if ln < 1:
            raise ValueError("block lengths must be positive")
        blocks.append(tuple(range(start, start + ln)))
        start += ln
    return Partition(start, tuple(blocks))


def join_partitions(p: Partition, q: Partition) -> Partition:
    """Join in the full partition lattice (connected components of block overlaps)."""
    if p.n != q.n:
        raise ValueError(f"size mismatch: {p.n} vs {q.n}")
    parent = list(range(p.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for part in (p, q):
        for b in part.blocks:
            r = find(b[0])
            for x in b[1:]:
                parent[find(x)] = r
    return Partition.from_labels([find(x) for x in range(p.n)])


def join_nc(p: Partition, q: Partition) -> Partition:
    """Least non-crossing partition above both ``p`` and ``q``."""
    joined = join_partitions(p, q)
    blocks = [list(b) for b in joined.blocks]
    while True:
        pair = _crossing_pair(blocks)
        if pair is None:
            break
        i, j = pair
        merged = sorted(blocks[i] + blocks[j])
        blocks = [b for k, b in enumerate(blocks) if k not in (i, j)] + [merged]
    return Partition(p.n, tuple(tuple(b) for b in blocks))


def connects(p: Partition, sigma: Partition) -> bool:
    """Whether ``join_nc(p, sigma)`` is the one-block partition."""
    return len(join_nc(p, sigma)) == 1


_mobius_lock = threading.Lock()
_mobius_memo: dict[tuple[Partition, Partition], int] = {}


def mobius_nc(p: Partition, q: Partition) -> int:
    """Moebius function of the interval [p, q] in NC(n); 0 unless p <= q.

    Uses the defining recursion mu(p, q) = -sum_{p <= s < q} mu(p, s).
    """
    if p.n != q.n or not p.refines(q):
        return 0
    if p == q:
        return 1
    with _mobius_lock:
        hit = _mobius_memo.get((p, q))
    if hit is not None:
        return hit
    total = 0
    for s in enumerate_nc(p.n):
        if s != q and p.refines(s) and s.refines(q):
            total += mobius_nc(p, s)
    with _mobius_lock:
        _mobius_memo[(p, q)] = -total
    return -total


def _pair_mask(p: Partition) -> int:
    lab = p.labels
    mask = 0
    bit = 0
    for a in range(p.n):
        for b in range(a + 1, p.n):
            if lab[a] == lab[b]:
                mask |= 1 << bit
            bit += 1
    return mask


@lru_cache(maxsize=16)
def mobius_to_top(n: int) -> dict[Partition, int]:
    """mu(pi, 1_n) for every pi in NC(n).

    Same recursion as :func:`mobius_nc`, run downward from the top so that
    each value only needs the strict up-set; comparisons are bitmask tests on
    the set of same-block pairs.
    """
    parts = enumerate_nc(n)
    masks = [_pair_mask(p) for p in parts]
    order = sorted(range(len(parts)), key=lambda i: -masks[i].bit_count())
    mu: dict[int, int] = {}
    for i in order:
        mi = masks[i]
        if len(parts[i]) == 1:
            mu[i] = 1
            continue
        total = 0
        for j, val in mu.items():
            mj = masks[j]
            if mi & ~mj == 0 and mj != mi:
                total += val
        mu[i] = -total
    return {parts[i]: mu[i] for i in range(len(parts))}


def catalan(n: int) -> int:
    c = [1]
    for m in range(1, n + 1):
        c.append(sum(c[i] * c[m - 1 - i] for i in range(m)))
    return c[n]


def interval_blocks(p: Partition) -> list[tuple[int, ...]]:
    return [b for b in p.blocks if p.is_interval(b)]


def restrict(p: Partition, keep: Iterable[int]) -> Partition:
    """Partition induced on ``keep`` (relabelled to 0..len(keep)-1, order preserved)."""
    keep = sorted(keep)
    index = {x: i for i, x in enumerate(keep)}
    blocks = []
    for b in p.blocks:
        nb = tuple(index[x] for x in b if x in index)
        if nb:
            blocks.append(nb)
    return Partition(len(keep), tuple(blocks))
