import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbmbounds import bounds as bd
from fbmbounds import mc
from fbmbounds.errors import DomainError, SamplerError


def spec(h, steps=256, dt=1.0, method=mc.CIRCULANT):
    return mc.SamplerSpec(bd.Hurst(h), steps, dt, method)


# -- SamplerSpec -------------------------------------------------------------

@pytest.mark.parametrize("steps", [0, 1, 3, 100, 2.0])
def test_spec_requires_power_of_two(steps):
    with pytest.raises(DomainError):
        spec(0.3, steps)


def test_spec_cholesky_limit():
    spec(0.3, mc.CHOLESKY_MAX_STEPS, method=mc.CHOLESKY)
    with pytest.raises(DomainError):
        spec(0.3, 2 * mc.CHOLESKY_MAX_STEPS, method=mc.CHOLESKY)


def test_spec_rejects_bad_dt_and_method():
    with pytest.raises(DomainError):
        spec(0.3, dt=0.0)
    with pytest.raises(DomainError):
        spec(0.3, method="hosking")


# -- moments ----------------------------------------------------------------------

@settings(max_examples=60)
@given(
    st.lists(st.floats(min_value=-1e3, max_value=1e3), min_size=1, max_size=40),
    st.lists(st.floats(min_value=-1e3, max_value=1e3), min_size=1, max_size=40),
)
def test_moments_merge_matches_pooled(a, b):
    merged = mc.Moments.of(np.array(a)).merge(mc.Moments.of(np.array(b)))
    pooled = mc.Moments.of(np.array(a + b))
    assert merged.count == pooled.count
    assert merged.mean == pytest.approx(pooled.mean, abs=1e-9)
    assert merged.m2 == pytest.approx(pooled.m2, rel=1e-9, abs=1e-6)


def test_moments_empty_and_std_error():
    assert mc.Moments().merge(mc.Moments.of([1.0, 3.0])).mean == 2.0
    m = mc.Moments.of([1.0, 3.0])
    assert m.variance == 2.0
    assert m.std_error == pytest.approx(1.0)
    assert mc.Moments().std_error == math.inf


# -- sampler ----------------------------------------------------------------------

def test_autocovariance_lag_zero_and_one():
    r = mc.fgn_autocovariance(0.7, np.arange(3), dt=0.25)
    assert r[0] == pytest.approx(0.25 ** 1.4)
    assert r[1] / r[0] == pytest.approx(2 ** 0.4 - 1)
    assert np.allclose(mc.fgn_autocovariance(0.5, np.arange(1, 5)), 0.0)


def test_sample_is_deterministic_per_path():
    s = spec(0.3)
    a = mc.sample_fgn(s, 7, seed=5)
    assert np.array_equal(a, mc.sample_fgn(s, 7, seed=5))
    assert not np.array_equal(a, mc.sample_fgn(s, 6, seed=5))
    assert not np.array_equal(a, mc.sample_fgn(s, 7, seed=6))
    assert a.shape == (256,)


def test_batch_slices_agree_with_single_paths():
    s = spec(0.7, 64)
    batch = mc.fgn_batch(s, 3, 5, seed=1)
    for k in range(5):
        assert np.array_equal(batch[k], mc.sample_fgn(s, 3 + k, seed=1))


def test_sample_fbm_is_cumsum():
    s = spec(0.4, 32)
    assert np.allclose(mc.sample_fbm(s, 0, 3), np.cumsum(mc.sample_fgn(s, 0, 3)))


def test_negative_path_index():
    with pytest.raises(DomainError):
        mc.sample_fgn(spec(0.3), -1, 0)


def test_negative_eigenvalue_aborts(monkeypatch):
    # a covariance that is not positive definite must not be silently clipped
    def bad_covariance(h, lags, dt=1.0):
        r = np.zeros(len(lags))
        r[:3] = [1.0, 0.9, 0.9]
        return r

    monkeypatch.setattr(mc, "fgn_autocovariance", bad_covariance)
    mc._circulant_scale.cache_clear()
    try:
        with pytest.raises(SamplerError):
            mc.sample_fgn(spec(0.3, 16), 0, 0)
    finally:
        mc._circulant_scale.cache_clear()


def _lag1(h, method, steps=256, paths=4000, seed=3):
    s = spec(h, steps, method=method)
    x = mc.fgn_batch(s, 0, paths, seed)
    per_path = (x[:, :-1] * x[:, 1:]).mean(axis=1)
    return per_path.mean(), per_path.std(ddof=1) / math.sqrt(paths)


@pytest.mark.parametrize("h", [0.3, 0.5, 0.7])
def test_lag_one_correlation(h):
    rho, se = _lag1(h, mc.CIRCULANT)
    assert abs(rho - (2 ** (2 * h - 1) - 1)) <= 5 * se


def test_brownian_increments_uncorrelated():
    steps, paths = 256, 4000
    rho, _ = _lag1(0.5, mc.CIRCULANT, steps, paths)
    assert abs(rho) <= 4 / math.sqrt(steps * paths)


@pytest.mark.parametrize("h", [0.3, 0.7])
def test_circulant_matches_cholesky_covariance(h):
    steps, paths = 256, 4000
    target = mc.fgn_autocovariance(h, np.arange(4))
    for method in (mc.CIRCULANT, mc.CHOLESKY):
        x = mc.fgn_batch(spec(h, steps, method=method), 0, paths, seed=9)
        for lag in range(4):
            prods = (x[:, : steps - lag] * x[:, lag:]).mean(axis=1)
            se = prods.std(ddof=1) / math.sqrt(paths)
            assert abs(prods.mean() - target[lag]) <= 5 * se, (method, lag)


@pytest.mark.parametrize("h", [0.3, 0.5, 0.7])
def test_endpoint_variance(h):
    res = mc.estimate_mu_moment(h, 1.0, 256, 10000, seed=21)
    var = res.meta["endpoint_variance"]
    assert abs(var - 1.0) <= 5 * math.sqrt(2.0 / 9999)


# -- estimators -------------------------------------------------------------------

def test_sup_drift_bit_identical_across_workers():
    kw = dict(h=0.3, c=1.0, horizon=4.0, steps=2048, paths=2100, seed=13)
    one = mc.estimate_sup_drift(**kw, workers=1)
    two = mc.estimate_sup_drift(**kw, workers=2)
    assert one.estimate == two.estimate
    assert one.std_error == two.std_error
    assert one.meta == two.meta


def test_sup_drift_reproducible():
    a = mc.estimate_sup_drift(0.7, 1.0, 8.0, 1024, 300, seed=4)
    b = mc.estimate_sup_drift(0.7, 1.0, 8.0, 1024, 300, seed=4)
    assert a == b
    assert a.estimate >= 0.0 and a.std_error > 0.0
    lo, hi = a.interval(3)
    assert lo < a.estimate < hi


def test_sup_drift_validation():
    with pytest.raises(DomainError):
        mc.estimate_sup_drift(0.5, c=0.0)
    with pytest.raises(DomainError):
        mc.estimate_sup_drift(0.5, horizon=-1.0)
    with pytest.raises(DomainError):
        mc.estimate_sup_drift(0.5, steps=1024, paths=1)


def test_sup_drift_brownian_small():
    res = mc.estimate_sup_drift(0.5, 1.0, 16.0, 1 << 13, 4000, seed=2)
    # grid bias ~0.58 sqrt(dt) = 0.026 pulls the estimate below 1/2
    assert 0.5 - 0.026 - 4 * res.std_error <= res.estimate <= 0.5 + 3 * res.std_error


def test_grid_refinement_increases_estimate():
    coarse = mc.estimate_sup_drift(0.5, 1.0, 8.0, 1 << 8, 2000, seed=8)
    fine = mc.estimate_sup_drift(0.5, 1.0, 8.0, 1 << 12, 2000, seed=8)
    assert fine.estimate >= coarse.estimate - 3 * math.hypot(coarse.std_error, fine.std_error)


def test_drift_two_matches_rescaled_brownian():
    at2 = mc.estimate_sup_drift(0.5, 2.0, 8.0, 1 << 12, 3000, seed=30)
    assert abs(at2.estimate - 0.25) <= 3 * at2.std_error + 0.58 * math.sqrt(8.0 / (1 << 12)) / 2


def test_mu_moment_jensen():
    one = mc.estimate_mu_moment(0.3, 1.0, 1024, 2000, seed=5)
    alpha = 1.0 / 0.7
    high = mc.estimate_mu_moment(0.3, alpha, 1024, 2000, seed=5)
    assert one.estimate ** alpha <= high.estimate + 3 * high.std_error


def test_mu_moment_vs_bounds():
    res = mc.estimate_mu_moment(0.3, 1.0, 4096, 2000, seed=6)
    m = bd.mu_bounds(0.3, 1.0)
    assert m.lower - 0.05 <= res.estimate <= m.upper_combined + 3 * res.std_error
    with pytest.raises(DomainError):
        mc.estimate_mu_moment(0.3, 0.5)


def test_timechanged_large_u_is_zero():
    res = mc.estimate_timechanged_tail(0.5, 20.0, 50.0, 1024, 500, seed=1)
    assert res.estimate == 0.0


def test_timechanged_brownian_tail():
    # P(sup B(t) - t > 1) = e^{-2}; the grid biases the estimate down
    res = mc.estimate_timechanged_tail(0.5, 1.0, 20.0, 1 << 12, 4000, seed=2)
    assert math.exp(-2) * 0.85 - 3 * res.std_error <= res.estimate <= math.exp(-2) + 3 * res.std_error
    with pytest.raises(DomainError):
        mc.estimate_timechanged_tail(0.5, 0.0)


def test_adaptive_horizon_brownian_converges_early():
    res = mc.adaptive_horizon(0.5, 1.0, base_horizon=1.0, steps_per_unit=256, paths=2000, seed=3)
    assert res.meta["converged"]
    assert res.horizon <= 16.0
    assert [row["horizon"] for row in res.meta["history"]] == [2.0 ** k for k in range(res.meta["doublings"] + 1)]


def test_adaptive_horizon_longer_for_larger_h():
    kw = dict(base_horizon=1.0, steps_per_unit=64, paths=1000, seed=4)
    brownian = mc.adaptive_horizon(0.5, 1.0, **kw)
    persistent = mc.adaptive_horizon(0.8, 1.0, **kw)
    assert persistent.horizon > brownian.horizon


def test_adaptive_horizon_stronger_drift_not_longer():
    kw = dict(base_horizon=1.0, steps_per_unit=64, paths=1000, seed=4)
    assert mc.adaptive_horizon(0.7, 2.0, **kw).horizon <= mc.adaptive_horizon(0.7, 1.0, **kw).horizon


def test_adaptive_horizon_flags_non_convergence():
    res = mc.adaptive_horizon(0.9, 1.0, base_horizon=1.0, steps_per_unit=16, paths=200, seed=1, max_doublings=1)
    assert res.meta["converged"] is False
    assert res.meta["doublings"] == 1


def test_adaptive_horizon_validation():
    with pytest.raises(DomainError):
        mc.adaptive_horizon(0.5, 1.0, base_horizon=3.0, steps_per_unit=100)
    with pytest.raises(DomainError):
        mc.adaptive_horizon(0.5, 1.0, base_horizon=0.0)


def test_sup_auto_records_pilot():
    res = mc.estimate_sup_auto(0.4, 1.0, steps=1 << 12, paths=500, seed=7, pilot_steps_per_unit=64)
    assert "pilot_history" in res.meta and res.steps == 1 << 12
    assert res.horizon == res.meta["pilot_history"][-1]["horizon"]
