"""Smoke tests for the bpnmf python module."""

import numpy as np
import pytest

import bpnmf


def small_counts(seed=0, F=8, T=20):
    rng = np.random.default_rng(seed)
    return rng.poisson(3.0, size=(F, T)).astype(np.int64)


def test_exports():
    for name in (
        "Hyperparams",
        "fit_ssmf",
        "fit_gibbs",
        "generate",
        "stft",
        "istft",
        "quantize",
        "wiener_separate",
        "match_components",
        "bss_eval",
        "step_size",
        "surrogate_loglik",
    ):
        assert hasattr(bpnmf, name), name


def test_step_size():
    assert bpnmf.step_size(1, 0.5) == 1.0
    assert bpnmf.step_size(4, 0.5) == pytest.approx(0.5)


def test_fit_ssmf_runs_and_is_deterministic():
    x = small_counts()
    h = bpnmf.Hyperparams(K=6)
    r1 = bpnmf.fit_ssmf(x, h, max_iters=15, seed=42)
    r2 = bpnmf.fit_ssmf(x, h, max_iters=15, seed=42)
    assert r1["nuW"].shape == (8, 6)
    assert r1["rhoH"].shape == (6, 20)
    assert np.array_equal(r1["nuW"], r2["nuW"])
    assert np.array_equal(r1["alphaPi"], r2["alphaPi"])
    assert (r1["nuW"] > 0).all() and (r1["rhoW"] > 0).all()
    trace = r1["trace"]
    assert len(trace["iteration"]) == 15
    assert trace["step_size"][0] == 1.0
    assert all(s > 0 for s in trace["step_size"])


def test_fit_gibbs_runs():
    x = small_counts(seed=1)
    h = bpnmf.Hyperparams(K=5)
    r = bpnmf.fit_gibbs(x, h, burn_in=10, post_burn_samples=2, seed=7)
    assert r["W"].shape == (8, 5)
    assert r["S"].dtype == np.uint8
    assert ((r["pi"] > 0) & (r["pi"] < 1)).all()
    assert 0 <= r["active_components"] <= 5


def test_generate():
    g = bpnmf.generate(F=10, T=30, L=6, seed=3)
    assert g["X"].shape == (10, 30)
    assert g["W"].shape == (10, 6)
    assert g["S"].shape == (6, 30)
    g2 = bpnmf.generate(F=10, T=30, L=6, seed=3)
    assert np.array_equal(g["X"], g2["X"])


def test_stft_roundtrip_and_quantize():
    t = np.arange(8192)
    sig = 0.5 * np.sin(2 * np.pi * 440.0 * t / 22050.0)
    spec = bpnmf.stft(sig, fft_size=256, hop=128, sample_rate=22050.0)
    assert spec.shape[0] == 129
    rec = bpnmf.istft(spec, fft_size=256, hop=128, sample_rate=22050.0)
    rec = np.asarray(rec)
    n = min(len(rec), len(sig))
    err = np.linalg.norm(rec[256 : n - 256] - sig[256 : n - 256])
    assert err <= 1e-6 * np.linalg.norm(sig[256 : n - 256])

    counts, scale = bpnmf.quantize(spec, target_max=1000)
    assert counts.max() == 1000
    assert scale > 0


def test_wiener_and_eval():
    t = np.arange(4096)
    s1 = 0.4 * np.sin(2 * np.pi * 430.0 * t / 22050.0)
    s2 = 0.3 * np.sin(2 * np.pi * 1720.0 * t / 22050.0)
    mix = s1 + s2
    spec = bpnmf.stft(mix, fft_size=256, hop=128, sample_rate=22050.0)
    F, T = spec.shape
    rng = np.random.default_rng(0)
    W = rng.gamma(1.0, 1.0, size=(F, 4))
    HS = rng.gamma(1.0, 1.0, size=(4, T))
    parts = bpnmf.wiener_separate(
        spec, W, HS, [[0, 1], [2, 3]], fft_size=256, hop=128
    )
    assert len(parts) == 2
    total = parts[0] + parts[1]
    assert np.abs(total - spec).max() <= 1e-9 * np.abs(spec).max()

    n = 4096 - 256
    scores = bpnmf.bss_eval([s1[:n], s2[:n]], [s1[:n], s2[:n]])
    assert scores["mean"][0] == pytest.approx(120.0)
