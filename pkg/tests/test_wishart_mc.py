import itertools
import math

import numpy as np
import pytest

from rcyclic.matgroup import ComplexMatrix, partial_transpose
from rcyclic.rcyclic_exact import wishart_entry_model, y_context
from rcyclic.spectra import mp_cdf
from rcyclic.wishart_mc import (
    EnsembleConfig,
    EstimateWithError,
    build_wishart,
    empirical_spectrum,
    estimate_scalar_moment,
    estimate_scalar_moments,
    ks_distance,
    mc_context,
    result_record,
    sample_gaussian,
    trial_rng,
)


def test_gaussian_moments_and_determinism():
    g = sample_gaussian(100, 1000, trial_rng(1, 0))
    assert abs(np.mean(np.abs(g) ** 2) - 1) < 0.01
    se = np.std(g) / math.sqrt(g.size)
    assert abs(g.mean()) < 4 * se
    assert abs(np.var(g.real) - 0.5) < 0.01 and abs(np.var(g.imag) - 0.5) < 0.01
    assert np.array_equal(g, sample_gaussian(100, 1000, trial_rng(1, 0)))
    assert not np.array_equal(g, sample_gaussian(100, 1000, trial_rng(1, 1)))
    with pytest.raises(ValueError):
        sample_gaussian(0, 3, trial_rng(1, 0))


def test_build_wishart_structure():
    cfg = EnsembleConfig(2, 3, 4, trials=1)
    w = build_wishart(cfg, trial_rng(0, 0))
    assert w.shape == (6, 6) and (w.d1, w.m) == (2, 3)
    assert np.abs(w.data - w.data.conj().T).max() <= 1e-12
    assert np.linalg.eigvalsh(w.data).min() >= -1e-10
    wg = partial_transpose(w)
    assert np.abs(wg.data - wg.data.conj().T).max() <= 1e-12


def test_config_validation():
    assert EnsembleConfig(2, 10, 40).c == 2.0
    for bad in [(0, 1, 1), (1, 0, 1), (1, 1, 0)]:
        with pytest.raises(ValueError):
            EnsembleConfig(*bad)
    with pytest.raises(ValueError):
        EnsembleConfig(1, 1, 1, trials=0)
    with pytest.raises(ValueError):
        EnsembleConfig(1, 1, 1, seed=-1)


def test_estimate_with_error():
    e = EstimateWithError.from_samples([1.0, 2.0, 3.0, 4.0])
    assert e.mean == 2.5 and math.isclose(e.stderr, np.std([1, 2, 3, 4], ddof=1) / 2)
    assert e.agrees(2.5) and not e.agrees(10)


def test_scalar_moments():
    cfg = EnsembleConfig(2, 30, 60, trials=20, seed=5)
    w, wwg, gg, ww = estimate_scalar_moments(cfg, [["W"], ["W", "WG"], ["WG", "WG"], ["W", "W"]])
    assert w.agrees(cfg.c)
    # E phi(W W^Gamma) = c^2 + c / d1 holds at every finite size
    assert wwg.agrees(cfg.c ** 2 + cfg.c / cfg.d1)
    # tr((W^Gamma)^2) = tr(W^2) sample by sample
    assert abs(gg.mean - ww.mean) < 1e-12 and math.isclose(gg.stderr, ww.stderr, rel_tol=1e-9)
    y = estimate_scalar_moment(cfg, ["Y1", "Y1*"])
    assert y.agrees(cfg.c * cfg.d1)
    with pytest.raises(KeyError):
        estimate_scalar_moment(cfg, ["Q"])


def test_reproducible_and_thread_independent():
    cfg = EnsembleConfig(2, 8, 16, trials=6, seed=42)
    a = estimate_scalar_moments(cfg, [["W", "WG"]], threads=1)
    b = estimate_scalar_moments(cfg, [["W", "WG"]], threads=4)
    assert a == b
    ca, cb = mc_context(cfg, 3, threads=1), mc_context(cfg, 3, threads=3)
    for key in ca.traces:
        assert np.array_equal(ca.traces[key], cb.traces[key])


def test_stderr_scaling():
    small = EnsembleConfig(2, 6, 12, trials=200, seed=1)
    big = EnsembleConfig(2, 6, 12, trials=400, seed=1)
    (a,) = estimate_scalar_moments(small, [["W", "WG"]])
    (b,) = estimate_scalar_moments(big, [["W", "WG"]])
    assert abs(a.stderr / b.stderr - math.sqrt(2)) <= 0.3 * math.sqrt(2)


def test_mc_context_matches_exact_engine():
    cfg = EnsembleConfig(2, 60, 120, trials=20, seed=9)
    ctx = mc_context(cfg, max_len=3)
    exact = y_context(wishart_entry_model(2, 1))
    for r in (1, 2, 3):
        for ks in itertools.product(range(2), repeat=r):
            handles = [f"Y{k}" for k in ks]
            want = exact.moment(exact.word(handles))
            for est, target in zip(ctx.estimate(ctx.word(handles)), want):
                assert est.agrees(float(target), floor=1e-9), (ks, est, target)
    assert ctx.moment(ctx.word(["Y1"])) == (0, 0)
    k2 = ctx.estimate_cumulant(ctx.word(["Y1", "Y1"]))
    assert all(e.agrees(2.0) for e in k2)


def test_mc_context_path_traces_by_full_matrices():
    """Table entries agree with phi-tilde of products of the full Y_k matrices."""
    from rcyclic.matgroup import diag_part, phi_tilde_numeric
    cfg = EnsembleConfig(3, 4, 7, trials=2, seed=3)
    ctx = mc_context(cfg, max_len=3, threads=1)
    for t in range(2):
        w = build_wishart(cfg, trial_rng(cfg.seed, t))
        wg = partial_transpose(w)
        y = [diag_part(wg.with_data(cfg.d1 * wg.data), k).data for k in range(3)]
        for ks in [(0,), (1, 2), (2, 1), (1, 1, 1), (0, 2, 1)]:
            prod = np.eye(12)
            for k in ks:
                prod = prod @ y[k]
            want = phi_tilde_numeric(ComplexMatrix(prod, 3, 4))
            got = ctx.trial(t).moment(ctx.word([f"Y{k}" for k in ks]))
            assert np.allclose(got, want)


def test_empirical_spectrum():
    assert np.allclose(empirical_spectrum(np.eye(3)), 1)
    assert np.allclose(empirical_spectrum(np.diag([3.0, 1.0, 2.0])), [1, 2, 3])
    with pytest.raises(ValueError):
        empirical_spectrum(np.array([[0, 1], [0, 0]]))


def test_wishart_spectrum_follows_marchenko_pastur():
    cfg = EnsembleConfig(1, 400, 400, trials=1, seed=2)
    eigs = empirical_spectrum(build_wishart(cfg, trial_rng(cfg.seed, 0)))
    assert ks_distance(eigs, lambda t: mp_cdf(1.0, t)) < 0.05


def test_result_record():
    cfg = EnsembleConfig(1, 2, 2, trials=2)
    rec = result_record(cfg, ["W"], EstimateWithError(1 + 0j, 0.1, 2), 0.5)
    assert set(rec) == {"config", "word", "mean", "stderr", "trials", "wall_time"}
    assert rec["config"]["c"] == 1.0
