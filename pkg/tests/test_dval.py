import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rcyclic.cumulant_core import moments_to_cumulants
from rcyclic.dval import (
    MatrixContext,
    dmul,
    dvalued_cumulant,
    dvalued_cumulant_pi,
    grouped_dvalued_cumulant,
    nested_extension,
    ones,
    phi_tilde_pi,
    removal_schedule,
    scalar_cumulant,
    scalar_functional,
)
from rcyclic.ncpart import Partition, ResourceLimitError, enumerate_nc, interval_sigma


def random_context(seed, d=3, handles=("a", "b"), density=0.7):
    rng = random.Random(seed)
    mats = {}
    for h in handles:
        mats[h] = [[Fraction(rng.randint(-3, 3), rng.randint(1, 2)) if rng.random() < density else 0
                    for _ in range(d)] for _ in range(d)]
    return MatrixContext(mats)


def random_diag(rng, d):
    return tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(d))


def random_word(rng, ctx, n):
    return ctx.word([rng.choice(ctx.elements) for _ in range(n)], [random_diag(rng, ctx.d) for _ in range(n)])


def insert(letters, pos, diag):
    """Multiply a diagonal into the multiplier of letter ``pos``."""
    out = list(letters)
    h, m = out[pos]
    out[pos] = (h, dmul(m, diag))
    return tuple(out)


def test_matrix_context_is_the_diagonal_of_the_product():
    ctx = MatrixContext({"a": [[1, 2], [3, 4]], "b": [[0, 1], [1, 0]]})
    # a diag(1,2) b = [[1,4],[3,8]] @ [[0,1],[1,0]] = [[4,1],[8,3]]
    assert ctx.moment(ctx.word(["a", "b"], [(1, 2), (1, 1)])) == (4, 3)


@pytest.mark.parametrize("seed", range(20))
def test_second_and_third_cumulants_by_hand(seed):
    rng = random.Random(seed)
    ctx = random_context(seed)
    E = ctx.moment
    x1, x2, x3 = random_word(rng, ctx, 3)
    k2 = tuple(a - b * c for a, b, c in zip(E((x1, x2)), E((x1,)), E((x2,))))
    assert dvalued_cumulant(ctx, (x1, x2)) == k2
    # E(x1 E(x2) x3): the inner expectation lands in x1's multiplier
    inner = E((insert((x1,), 0, E((x2,)))[0], x3))
    k3 = tuple(
        e123 - e1 * e23 - e12 * e3 - i + 2 * e1 * e2 * e3
        for e123, e1, e23, e12, e3, i, e2 in zip(
            E((x1, x2, x3)), E((x1,)), E((x2, x3)), E((x1, x2)), E((x3,)), inner, E((x2,)))
    )
    assert dvalued_cumulant(ctx, (x1, x2, x3)) == k3


@pytest.mark.parametrize("n", range(2, 7))
def test_nested_extension_independent_of_peeling_order(n):
    rng = random.Random(n)
    ctx = random_context(n)
    w = random_word(rng, ctx, n)
    for pi in enumerate_nc(n):
        first = phi_tilde_pi(ctx, pi, w, choice=0)
        assert first == phi_tilde_pi(ctx, pi, w, choice=-1)
        assert first == phi_tilde_pi(ctx, pi, w, choice=1)
        assert dvalued_cumulant_pi(ctx, pi, w, choice=0) == dvalued_cumulant_pi(ctx, pi, w, choice=-1)


def test_removal_schedule_shape():
    steps, last = removal_schedule(Partition.parse("0,3/1,2/4"))
    assert last in ((0, 3), (4,))
    assert {b for b, _ in steps} | {last} == {(0, 3), (1, 2), (4,)}
    with pytest.raises(ValueError):
        removal_schedule(Partition.parse("0,2/1,3"))


@given(st.integers(0, 10 ** 6), st.integers(1, 5))
def test_cumulants_are_right_d_linear(seed, n):
    rng = random.Random(seed)
    ctx = random_context(seed % 97)
    w = random_word(rng, ctx, n)
    delta = random_diag(rng, ctx.d)
    lhs = dvalued_cumulant(ctx, insert(w, n - 1, delta))
    assert lhs == dmul(dvalued_cumulant(ctx, w), delta)


@given(st.integers(0, 10 ** 6), st.integers(2, 5))
def test_cumulants_with_a_scalar_argument_vanish(seed, n):
    """A diagonal matrix among the arguments kills every cumulant of order >= 2."""
    rng = random.Random(seed)
    ctx = random_context(seed % 97)
    d = ctx.d
    ctx_d = MatrixContext({**ctx.matrices, "D": [[Fraction(i + 1) if i == j else 0 for j in range(d)] for i in range(d)]})
    w = list(random_word(rng, ctx_d, n))
    w[rng.randrange(n)] = ("D", random_diag(rng, d))
    assert dvalued_cumulant(ctx_d, w) == (0,) * d


@pytest.mark.parametrize("seed", range(10))
def test_one_dimensional_case_is_scalar(seed):
    ctx = random_context(seed, d=1)
    phi = scalar_functional(ctx)
    rng = random.Random(seed)
    for n in range(1, 6):
        handles = [rng.choice("ab") for _ in range(n)]
        (val,) = dvalued_cumulant(ctx, ctx.word(handles))
        assert val == moments_to_cumulants(phi, handles) == scalar_cumulant(ctx, handles)


@pytest.mark.parametrize("lengths", [(1, 1), (2, 1), (1, 2, 1), (2, 2), (3, 1, 2)])
def test_grouped_cumulant_equals_cumulant_of_products(lengths):
    """Products as arguments: the products of a's are available as matrices, so compare directly."""
    rng = random.Random(sum(lengths))
    ctx = random_context(7, d=2)
    n = sum(lengths)
    w = ctx.word([rng.choice("ab") for _ in range(n)])
    mats = {}
    grouped = []
    pos = 0
    for g, ln in enumerate(lengths):
        prod = None
        for h, _ in w[pos:pos + ln]:
            m = ctx.matrices[h]
            prod = m if prod is None else [[sum(prod[i][k] * m[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
        mats[f"g{g}"] = prod
        grouped.append(f"g{g}")
        pos += ln
    big = MatrixContext(mats)
    assert grouped_dvalued_cumulant(ctx, lengths, w) == dvalued_cumulant(big, big.word(grouped))
    assert interval_sigma(lengths).n == n


def test_validation():
    ctx = random_context(0)
    with pytest.raises(ValueError):
        ctx.moment(())
    with pytest.raises(KeyError):
        ctx.moment((("zz", ones(3)),))
    with pytest.raises(ValueError):
        ctx.moment((("a", (1, 1)),))
    with pytest.raises(ResourceLimitError):
        dvalued_cumulant(ctx, ctx.word(["a"] * 9))
    with pytest.raises(ValueError):
        MatrixContext({"a": [[1, 2]], "b": [[1]]})
    with pytest.raises(ValueError):
        nested_extension(ctx.moment, Partition.parse("0/1"), ctx.word(["a"]), 3)
