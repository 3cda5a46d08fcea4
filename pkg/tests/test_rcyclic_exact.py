import itertools
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rcyclic.dval import dvalued_cumulant, ones
from rcyclic.ncpart import ResourceLimitError
from rcyclic.poly import Poly
from rcyclic.rcyclic_exact import (
    EntryCumulantModel,
    cyclic_tuples,
    entry_moment,
    is_cyclic,
    random_model,
    scalar_phi,
    uniform_model,
    wishart_entry_model,
    y_context,
)
from rcyclic.spectra import mp_moments
from test_ncpart import all_set_partitions, crossing_bruteforce


def moment_bruteforce(model, word):
    """Sum over every set partition, dropping crossing ones and non-cyclic blocks."""
    total = 0
    for p in all_set_partitions(len(word)):
        if crossing_bruteforce(p):
            continue
        term = 1
        for b in p.blocks:
            pairs = tuple(word[i] for i in b)
            term = term * (model.kappa(pairs) if is_cyclic(pairs, model.d) else 0)
        total = total + term
    return total


def path_pairs(idx, start, d, kind="Y"):
    a, out = start, []
    for k in idx:
        b = (a + k) % d
        out.append((b, a) if kind == "Y" else (a, b))
        a = b
    return out


def test_is_cyclic():
    assert is_cyclic([(0, 1), (1, 0)], 2)
    assert not is_cyclic([(0, 1), (0, 1)], 2)
    assert is_cyclic([(2, 2)], 3) and not is_cyclic([(1, 2)], 3)


def test_cyclic_tuples_are_exactly_the_cyclic_ones():
    got = set(cyclic_tuples(2, 3))
    pairs = [(i, j) for i in range(2) for j in range(2)]
    want = {t for r in range(1, 4) for t in itertools.product(pairs, repeat=r) if is_cyclic(t, 2)}
    assert got == want


@given(st.integers(2, 3), st.integers(0, 10 ** 6), st.integers(1, 7))
def test_entry_moment_matches_bruteforce(d, seed, n):
    rng = random.Random(seed)
    model = random_model(d, seed)
    # mostly path-like words so that many terms survive
    word, a = [], rng.randrange(d)
    for _ in range(n):
        b = rng.randrange(d)
        word.append((a, b) if rng.random() < 0.8 else (b, a))
        a = b
    assert entry_moment(model, word) == moment_bruteforce(model, word)


def test_uniform_single_entry_is_free_poisson():
    c = Poly.symbol("c")
    model = uniform_model(1, c)
    for n in range(1, 8):
        assert entry_moment(model, [(0, 0)] * n) == mp_moments(c, n)


def test_entry_moment_validation():
    model = uniform_model(2, 1)
    with pytest.raises(IndexError):
        entry_moment(model, [(0, 2)])
    with pytest.raises(ValueError):
        entry_moment(model, [])
    with pytest.raises(ResourceLimitError):
        entry_moment(model, [(0, 0)] * 11)
    assert entry_moment(model, [(0, 0), (0, 0)], weights=[2, 3]) == 6 * entry_moment(model, [(0, 0)] * 2)


@pytest.mark.parametrize("d1", [2, 3, 4])
def test_phi_w_wt_symbolic(d1):
    c = Poly.symbol("c")
    model = wishart_entry_model(d1, "c")
    # the model's matrix is d1 * w
    assert scalar_phi(model, ["W", "WT"]) * Fraction(1, d1 ** 2) == c * Fraction(1, d1) + c ** 2


@pytest.mark.parametrize("d1", [1, 2, 3])
def test_scalar_trace_of_w_is_c(d1):
    model = wishart_entry_model(d1, "c")
    assert scalar_phi(model, ["W"]) * Fraction(1, d1) == Poly.symbol("c")


@pytest.mark.parametrize("d,seed", [(2, 1), (3, 2), (3, 3), (4, 4)])
def test_dvalued_cumulants_follow_the_path_formula(d, seed):
    """kappa-tilde of Y-words equals the single entry cumulant along the path, times the multipliers."""
    rng = random.Random(seed)
    model = random_model(d, seed)
    ctx = y_context(model)
    for r in range(1, 5):
        for idx in itertools.product(range(d), repeat=r):
            deltas = [tuple(Fraction(rng.randint(-2, 3), rng.randint(1, 2)) for _ in range(d)) for _ in range(r)]
            got = dvalued_cumulant(ctx, ctx.word([f"Y{k}" for k in idx], deltas))
            want = []
            for i in range(d):
                pairs = path_pairs(idx, i, d)
                if pairs[-1][0] != i:  # path does not return
                    want.append(0)
                    continue
                scale, a = 1, i
                for k, delta in zip(idx, deltas):
                    a = (a + k) % d
                    scale *= delta[a]
                want.append(model.cumulant(pairs) * scale)
            assert got == tuple(want), (idx, got, want)


def test_y1_has_zero_diagonal_and_y0_has_mp_law():
    d1 = 3
    ctx = y_context(wishart_entry_model(d1, 1))
    assert ctx.moment(ctx.word(["Y1"])) == (0, 0, 0)
    assert ctx.moment(ctx.word(["Y1", "Y2"])) == (3, 3, 3)
    for n in range(1, 6):
        assert ctx.moment(ctx.word(["Y0"] * n)) == (mp_moments(Fraction(3), n),) * 3


def test_x_and_y_letters_mix():
    model = random_model(2, 9)
    ctx = y_context(model, transposed=False)
    assert set(ctx.elements) == {"X0", "X1"}
    from rcyclic.rcyclic_exact import RCyclicContext
    both = RCyclicContext(model, ("X", "Y"))
    # X1 then Y1 from slot 0: pairs (0,1) then (0,1) -- not cyclic, only the product moment survives
    assert both.moment(both.word(["X1", "Y1"])) == (entry_moment(model, [(0, 1), (0, 1)]),
                                                   entry_moment(model, [(1, 0), (1, 0)]))


@pytest.mark.parametrize("model", [wishart_entry_model(2, "c"), uniform_model(3, Fraction(2, 3)), random_model(2, 5)])
def test_json_roundtrip(model):
    data = json.loads(model.dumps(max_len=4))
    back = EntryCumulantModel.from_json(data)
    assert back.d == model.d
    for pairs in cyclic_tuples(model.d, 4):
        assert back.cumulant(pairs) == model.cumulant(pairs)


def test_explicit_model_needs_length():
    with pytest.raises(ValueError):
        random_model(2, 0).to_json()


def test_random_model_is_deterministic_and_nonzero():
    a, b = random_model(3, 11), random_model(3, 11)
    for pairs in cyclic_tuples(3, 3):
        assert a.cumulant(pairs) == b.cumulant(pairs) != 0
    assert a.cumulant([(0, 1)]) == 0


def test_scalar_phi_validation():
    model = uniform_model(2, 1)
    with pytest.raises(KeyError):
        scalar_phi(model, ["Q"])
    with pytest.raises(ValueError):
        scalar_phi(model, [])
