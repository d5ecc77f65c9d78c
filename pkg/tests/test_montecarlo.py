"""Validation-harness tests: the KS machinery self-tests (with negative
controls), quadrature CDFs, simulation kernels at reduced path counts with
pinned seeds, and the outcome record format."""

import json
import math

import numpy as np
import pytest
from scipy import stats

from artifact import (
    StableParams,
    TooFewSamplesError,
    parse_sigma_spec,
)
from artifact import montecarlo as mc
from artifact.fluctuation_oracles import overshoot_cdf, strip_exit_density


# ---------------------------------------------------------------------------
# KS machinery


def test_ks_statistic_hand_value():
    samples = np.array([0.1, 0.2, 0.7])
    uniform = lambda x: np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    got = mc.ks_statistic(samples, uniform)
    ref = stats.kstest(samples, "uniform").statistic
    assert got == pytest.approx(ref, rel=1e-12)


def test_ks_compare_self_and_negative_control():
    gen = np.random.default_rng(0)
    x = gen.standard_normal(20_000)
    good = mc.ks_compare(x, stats.norm.cdf, seed=0)
    assert good.passed and good.statistic < good.threshold
    # shifted law: must fail decisively
    bad = mc.ks_compare(x, lambda t: stats.norm.cdf(t, loc=0.15), seed=0)
    assert not bad.passed
    assert bad.statistic > 2 * bad.threshold


def test_ks_compare_default_threshold_scaling():
    gen = np.random.default_rng(1)
    for n in (400, 10_000):
        out = mc.ks_compare(gen.random(n), lambda x: np.clip(x, 0, 1))
        assert out.threshold == pytest.approx(1.628 / math.sqrt(n), rel=1e-12)


def test_ks_compare_rejects_tiny_samples():
    with pytest.raises(TooFewSamplesError):
        mc.ks_compare(np.arange(50, dtype=float) / 50.0, lambda x: x)


def test_cdf_from_density_mass_and_singular_edges():
    # integrable endpoint singularity (1-y)^-0.25 on (0,1)
    dens = lambda y: (1.0 - np.asarray(y)) ** -0.25
    cdf = mc.cdf_from_density(dens, 0.0, 1.0)
    assert cdf.total_mass == pytest.approx(4.0 / 3.0, rel=1e-6)
    ys = np.linspace(0.0, 1.0, 101)
    vals = cdf(ys)
    assert vals[0] == pytest.approx(0.0, abs=1e-9)
    assert vals[-1] == pytest.approx(1.0, rel=1e-9)
    assert np.all(np.diff(vals) >= 0)
    # midpoint against direct quadrature of the normalized density
    from scipy import integrate

    m, _ = integrate.quad(dens, 0.0, 0.5)
    assert cdf(np.array([0.5]))[0] == pytest.approx(m / (4.0 / 3.0), rel=1e-6)


# ---------------------------------------------------------------------------
# simulation kernels (reduced n, pinned seeds; full-scale runs live in the
# acceptance suite)


def test_overshoot_kernel_matches_oracle_small_n():
    p = StableParams(1.5, 0.5)
    res = mc.passage_overshoot_samples(p, x0=2.0, level=0.0, n_paths=3000, rng=0)
    depths = res["depths"]
    assert np.all(depths > 0)
    assert res["censored"] <= 0.01 * 3000
    cdf = lambda y: np.array(
        [overshoot_cdf(p, 2.0, 0.0, float(v)).value for v in np.atleast_1d(y)])
    ks = mc.ks_statistic(depths, cdf)
    assert ks < 1.628 / math.sqrt(depths.size), ks


def test_overshoot_kernel_deterministic():
    p = StableParams(1.5, 0.5)
    a = mc.passage_overshoot_samples(p, x0=2.0, level=0.0, n_paths=500, rng=3)
    b = mc.passage_overshoot_samples(p, x0=2.0, level=0.0, n_paths=500, rng=3)
    np.testing.assert_array_equal(a["depths"], b["depths"])


def test_strip_entry_transient_misses_and_determinism():
    p = StableParams(0.7, 0.5)
    out = mc.strip_entry_samples(p, x0=2.0, half_width=1.0, n_paths=2000, rng=0)
    assert out["entry_fraction"] < 1.0
    assert out["missed"] > 0
    assert np.all(np.abs(out["positions"]) < 1.0)
    out2 = mc.strip_entry_samples(p, x0=2.0, half_width=1.0, n_paths=2000, rng=0)
    np.testing.assert_array_equal(out["positions"], out2["positions"])


def test_exit_interval_support_and_determinism():
    p = StableParams(1.5, 0.5)
    a = mc.exit_interval_samples(p, 0.2, lo=-1.0, hi=1.0, n_paths=1500, rng=0)
    assert np.all((a["exit_positions"] <= -1.0) | (a["exit_positions"] >= 1.0))
    b = mc.exit_interval_samples(p, 0.2, lo=-1.0, hi=1.0, n_paths=1500, rng=0)
    np.testing.assert_array_equal(a["exit_positions"], b["exit_positions"])


def test_occupation_vs_potential_small_n():
    p = StableParams(1.5, 0.5)
    s = parse_sigma_spec("power:c=1,theta=2")
    out = mc.occupation_vs_potential(p, s, x0=0.5, window=(1.0, 2.0),
                                     n_paths=10_000, rng=0)
    assert out.passed, out.to_json_line()
    assert out.statistic < 0.04


def test_occupation_potential_lemma_small_n():
    out = mc.occupation_potential_lemma(StableParams(1.2, 0.5), n_paths=6000,
                                        grid_paths=800, rng=0)
    assert out.passed, out.to_json_line()
    assert out.statistic < 1.0  # measured 0.12 at this seed; 3 SE is the gate


def test_perpetual_integral_three_cases():
    f_exp = lambda x: np.exp(-x)
    out = mc.perpetual_integral_law(1.0, f_exp, n_paths=1500, rng=0, expect="finite")
    assert out.passed
    out = mc.perpetual_integral_law(1.0, lambda x: np.ones_like(np.asarray(x)),
                                    n_paths=1500, rng=0, expect="infinite")
    assert out.passed
    out = mc.perpetual_integral_law(1.0, lambda x: 1.0 / (1.0 + np.abs(x)),
                                    n_paths=1500, rng=0, expect="infinite")
    assert out.passed


def test_entrance_proxy_skips_degenerate_start():
    p = StableParams(1.5, 0.5)
    s = parse_sigma_spec("power:c=1,theta=2")
    out = mc.entrance_proxy(p, s, level=10.0, starts=(10.0, 100.0, 1000.0),
                            n_paths=800, rng=0, expect="stabilize")
    assert out.passed
    assert out.extras["skipped_degenerate_starts"] == [10.0]
    assert out.extras["starts"] == [100.0, 1000.0]


def test_entrance_proxy_diverges_for_constant_sigma():
    p = StableParams(1.5, 0.5)
    s = parse_sigma_spec("power:c=1,theta=0")
    out = mc.entrance_proxy(p, s, level=10.0, starts=(100.0, 1000.0),
                            n_paths=800, rng=0, expect="diverge", horizon=3e7)
    assert out.passed
    m = out.extras["medians"]
    assert m[1] / m[0] >= 2.0


# ---------------------------------------------------------------------------
# outcome records


def test_outcome_json_line_is_deterministic_and_typed():
    out = mc.ValidationOutcome(
        name="demo", statistic=np.float64(0.5), threshold=1.0, passed=True,
        n_paths=10, seed=3, runtime_s=1.23456,
        extras={"a": np.int64(2), "b": np.array([1.0, 2.0])},
    )
    line = out.to_json_line()
    doc = json.loads(line)
    assert doc["schema_version"] == "1"
    assert "runtime_s" not in doc  # reruns must be byte-identical
    assert doc["extras"]["a"] == 2 and doc["extras"]["b"] == [1.0, 2.0]
    assert line == out.to_json_line()
    assert json.loads(out.to_json_line(include_runtime=True))["runtime_s"] == 1.235
    # keys sorted for stable byte layout
    assert list(doc.keys()) == sorted(doc.keys())
