"""Time-change engine tests: clock construction, horizon truncation and
explosion detection on single paths, the batched explosion estimator, the
spatial inversion surgery, and a coarse cross-validation of the solver law
against a direct Euler scheme."""

import math

import numpy as np
import pytest
from scipy import stats

from artifact import (
    ExhaustedPathError,
    HitZeroError,
    Path,
    PowerTail,
    StableParams,
    parse_sigma_spec,
    sample_increment,
    sample_path,
    sample_path_at,
)
from artifact.sde_timechange import (
    AdditiveFunctional,
    _explosion_grid,
    additive_functional,
    explosion_estimate,
    spatial_inversion,
    spatial_inversion_inverse,
    time_change_solve,
)


# ---------------------------------------------------------------------------
# the clock


def test_additive_functional_constant_sigma_exact():
    # sigma = 2: A(s) = 2^-alpha s exactly (trapezoid is exact on constants)
    x = sample_path(StableParams(0.5, 0.5), 0.0, 3.0, step=1e-2, rng=1)
    af = additive_functional(x, PowerTail(c=2.0, theta=0.0), alpha=0.5)
    np.testing.assert_allclose(af.cumvals, 2.0 ** -0.5 * x.times, rtol=1e-12)
    assert af.final == pytest.approx(2.0 ** -0.5 * 3.0)


def test_additive_functional_container_invariants():
    with pytest.raises(ValueError):
        AdditiveFunctional(np.array([0.0, 1.0]), np.array([0.1, 0.2]))  # cum[0] != 0
    with pytest.raises(ValueError):
        AdditiveFunctional(np.array([0.0, 1.0]), np.array([0.0, -0.2]))  # decreasing


def test_clock_scale_covariance():
    # sigma -> 2 sigma divides the clock by 2^alpha, exactly, per sample
    p = StableParams(0.5, 0.5)
    x = sample_path(p, 0.0, 2.0, step=1e-2, rng=3)
    a1 = additive_functional(x, PowerTail(c=1.0, theta=2.0), alpha=p.alpha)
    a2 = additive_functional(x, PowerTail(c=2.0, theta=2.0), alpha=p.alpha)
    np.testing.assert_allclose(a2.cumvals, 2.0 ** -p.alpha * a1.cumvals, rtol=1e-12)


# ---------------------------------------------------------------------------
# single-path solving


def test_time_change_preserves_value_multiset_on_prefix():
    p = StableParams(1.5, 0.5)
    s = PowerTail(c=1.0, theta=2.0)
    x = sample_path(p, 0.0, 2.0, step=1e-3, rng=11)
    af = additive_functional(x, s, alpha=p.alpha)
    z = time_change_solve(x, s, horizon=af.final / 2.0, alpha=p.alpha)
    n = len(z)
    # the solution is the driver's value sequence carried onto the new clock
    np.testing.assert_array_equal(z.values, x.values[:n])
    assert z.times[0] == 0.0
    assert np.all(np.diff(z.times) > 0)
    assert z.times[-1] <= af.final / 2.0


def test_time_change_exhausted_driver_raises():
    p = StableParams(1.5, 0.5)
    s = PowerTail(c=1.0, theta=0.0)  # sigma = 1: clock = driver time
    x = sample_path(p, 0.0, 1.0, step=1e-3, rng=5)
    with pytest.raises(ExhaustedPathError):
        time_change_solve(x, s, horizon=2.0, alpha=p.alpha)


def test_time_change_detects_explosion_with_plateaued_clock():
    p = StableParams(0.5, 0.5)
    s = PowerTail(c=1.0, theta=2.0)
    ts = _explosion_grid(1e6, 5e-3, 1.04)
    x = sample_path_at(p, 0.0, ts, rng=7)
    z = time_change_solve(x, s, horizon=1e9, alpha=p.alpha)
    assert z.killed_at is not None
    assert z.meta.get("exploded") is True
    assert z.times[-1] <= z.killed_at
    af = additive_functional(x, s, alpha=p.alpha)
    assert z.killed_at == pytest.approx(af.final, rel=1e-12)


# ---------------------------------------------------------------------------
# batched explosion estimator


def test_explosion_estimate_deterministic_and_plateaued():
    p = StableParams(0.5, 0.5)
    s = parse_sigma_spec("power:c=1,theta=2")
    e1 = explosion_estimate(p, s, x0=0.0, horizon=1e6, n_paths=600, rng=0, batch=300)
    e2 = explosion_estimate(p, s, x0=0.0, horizon=1e6, n_paths=600, rng=0, batch=300)
    np.testing.assert_array_equal(e1.samples, e2.samples)
    assert e1.plateau_fraction > 0.9
    assert e1.samples.size == 600
    flags = np.asarray(e1.flags())
    assert set(np.unique(flags)) <= {"Plateaued", "StillGrowing"}
    assert int((flags == "Plateaued").sum()) == int(e1.plateaued.sum())
    # plateaued samples sit near the known mean explosion time, not at the
    # truncation scale
    assert np.median(e1.plateaued_samples) < 100.0


def test_explosion_estimate_batch_invariance():
    # the per-batch stream keying makes the estimate depend on (seed, batch),
    # so identical batch size reproduces; the estimator must also be
    # insensitive in law -- checked cheaply through the mean at two layouts
    p = StableParams(0.5, 0.5)
    s = parse_sigma_spec("power:c=1,theta=2")
    a = explosion_estimate(p, s, x0=0.0, horizon=1e5, n_paths=400, rng=1, batch=400)
    b = explosion_estimate(p, s, x0=0.0, horizon=1e5, n_paths=400, rng=1, batch=100)
    ma, mb = np.mean(a.samples), np.mean(b.samples)
    pooled = np.sqrt(np.var(a.samples) / 400 + np.var(b.samples) / 400)
    assert abs(ma - mb) < 6 * pooled


# ---------------------------------------------------------------------------
# spatial inversion


def test_spatial_inversion_round_trip():
    p = StableParams(1.5, 0.5)
    s = PowerTail(c=1.0, theta=2.0)
    x = sample_path(p, 2.0, 3.0, step=1e-3, rng=3)
    y = spatial_inversion(x, s, alpha=p.alpha)
    np.testing.assert_allclose(y.values, 1.0 / x.values, rtol=1e-14)
    back = spatial_inversion_inverse(y, s, alpha=p.alpha)
    np.testing.assert_allclose(back.values, x.values, rtol=1e-12)
    # the time axis round-trips through two trapezoid passes: small, not exact
    assert np.max(np.abs(back.times - x.times)) < 0.1 * x.times[-1]


def test_spatial_inversion_rejects_zero_crossing():
    path = Path(np.array([0.0, 1.0, 2.0]), np.array([1.0, 0.0, 2.0]))
    with pytest.raises(HitZeroError):
        spatial_inversion(path, PowerTail(c=1.0, theta=0.0), alpha=1.5)


# ---------------------------------------------------------------------------
# cross-validation against a direct Euler scheme


def test_time_change_law_matches_euler_scheme():
    # dZ = sigma(Z-) dX, alpha = 1.5 symmetric, sigma = 1 + x^2, t = 0.05.
    # Route A: time-change solver on driver paths.  Route B: Euler stepping
    # with exact-in-law stable increments.  Same law; two-sample KS must not
    # separate them at MC resolution.
    p = StableParams(1.5, 0.5)
    s = PowerTail(c=1.0, theta=2.0)
    t_end = 0.05
    n = 4000

    vals_tc = np.empty(n)
    for i in range(n):
        horizon = 0.4
        for _ in range(8):
            x = sample_path(p, 0.0, horizon, step=horizon * 1e-3, rng=100 + i)
            try:
                z = time_change_solve(x, s, horizon=t_end, alpha=p.alpha)
                break
            except ExhaustedPathError:
                horizon *= 4.0
        vals_tc[i] = z.values[-1]

    gen = np.random.default_rng(999)
    dt = 1e-4
    zs = np.zeros(n)
    for _ in range(int(round(t_end / dt))):
        zs += s(zs) * sample_increment(p, dt, gen, size=n)
    d, pval = stats.ks_2samp(vals_tc, zs)
    assert pval > 1e-4, (d, pval)
