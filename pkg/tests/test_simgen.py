import math

import numpy as np
import pytest
from scipy.integrate import quad

from driftwatch.errors import BadParams
from driftwatch.simgen import (
    MS_PER_DAY,
    MS_PER_HOUR,
    GenSpec,
    day_shape,
    gen_seasonal,
    gen_shift,
    gen_stale,
    gen_stationary,
    generate,
)


def values(obs, feature):
    return np.array([o.values[feature] for o in obs])


def test_stationary_deterministic():
    assert gen_stationary(count=500, seed=3) == gen_stationary(count=500, seed=3)
    assert gen_stationary(count=500, seed=3) != gen_stationary(count=500, seed=4)


def test_stationary_moments():
    x = values(gen_stationary(100, 10, 10_000, seed=12), "order_total")
    # 3-sigma bands: 3*sqrt(10)/100 ~ 0.095 and 3*10*sqrt(2/10000) ~ 0.42
    assert abs(x.mean() - 100) < 0.1
    assert abs(x.var(ddof=1) - 10) < 0.5


def test_single_and_bad_params():
    assert len(gen_stationary(count=1, seed=0)) == 1
    with pytest.raises(BadParams):
        gen_stationary(sigma2=0)
    with pytest.raises(BadParams):
        gen_stationary(count=0)


def test_timestamps_strictly_increasing():
    for obs, step in ((gen_stationary(count=100, interval_ms=250), 250),
                      (gen_seasonal(days=1), 5000),
                      (gen_stale(count=500, freeze_at=100), 60_000)):
        ts = np.array([o.ts for o in obs])
        assert np.all(np.diff(ts) == step)


def test_shift_segment_means():
    x = values(gen_shift(seed=21), "order_total")
    tol = 3 * math.sqrt(10) / math.sqrt(2000)
    assert abs(x[:2000].mean() - 100) < tol
    assert abs(x[2000:].mean() - 90) < tol


def test_shift_boundary():
    x = values(gen_shift(mu1=0.0, mu2=1000.0, sigma2=1.0, t_shift=99, count=100, seed=1), "order_total")
    assert (x > 500).sum() == 1 and x[-1] > 500
    with pytest.raises(BadParams):
        gen_shift(t_shift=0)
    with pytest.raises(BadParams):
        gen_shift(t_shift=4000, count=4000)


def test_shift_prefix_equals_stationary():
    shift = gen_shift(t_shift=2000, count=4000, seed=6)
    assert shift[:2000] == gen_stationary(100, 10, 2000, seed=6)
    assert gen_shift(mu1=100, mu2=100, seed=6) == gen_stationary(100, 10, 4000, seed=6)


def test_day_shape_mean_zero_peak_one():
    mean, _ = quad(lambda m: float(day_shape(m)), 0, 1440, points=[360, 840, 1320], limit=200)
    assert mean / 1440 == pytest.approx(0.0, abs=1e-9)
    assert float(day_shape(840)) == pytest.approx(1.0, abs=1e-15)
    assert float(day_shape(0)) == float(day_shape(359)) == float(day_shape(1400))


def test_seasonal_noiseless_daily_mean():
    obs = gen_seasonal(base=1000, amplitude=300, noise_sigma=0, days=1, seed=0)
    x = values(obs, "tx_last_hour")
    # exact day integral of the curve is base; the 5 s grid discretization error is tiny
    integral, _ = quad(lambda m: 1000 + 300 * float(day_shape(m)), 0, 1440, points=[360, 840, 1320], limit=200)
    assert integral / 1440 == pytest.approx(1000, abs=1e-9)
    assert x.mean() == pytest.approx(1000, abs=1e-3)


def test_seasonal_amplitude_zero_is_flat():
    x = values(gen_seasonal(amplitude=0, noise_sigma=50, days=1, seed=2), "tx_last_hour")
    hourly = x.reshape(24, -1).mean(axis=1)
    assert np.all(np.abs(hourly - 1000) < 3 * 50 / math.sqrt(720))


def test_seasonal_hour_bucket_means_follow_shape():
    obs = gen_seasonal(days=30, seed=5)
    ts = np.array([o.ts for o in obs])
    x = values(obs, "tx_last_hour")
    hour = (ts % MS_PER_DAY) // MS_PER_HOUR
    measured = np.array([x[hour == h].mean() for h in range(24)])
    analytic = np.array([quad(lambda m: 1000 + 300 * float(day_shape(m)), 60 * h, 60 * h + 60)[0] / 60
                         for h in range(24)])
    noise = 3 * 50 / math.sqrt(30 * 720)
    assert np.all(np.abs(measured - analytic) < noise + 0.5)
    spread = measured.max() - measured.min()
    assert spread == pytest.approx(analytic.max() - analytic.min(), abs=2.0)
    assert spread > 300  # peak-vs-night swing exceeds the amplitude with the unit-peak shape


def test_stale_before_and_after_freeze():
    obs = gen_stale(window_hours=168, freeze_at=10_000, count=30_000, seed=3)
    v = values(obs, "visits_7d")
    ts = np.array([o.ts for o in obs])
    pre = v[:10_000]
    day_means = pre.reshape(-1, 1000).mean(axis=1)
    assert day_means.std() < 0.1 * pre.mean()
    done = ts >= ts[10_000] + 168 * MS_PER_HOUR
    assert done.any() and np.all(v[done] == 0)
    assert np.all(values(obs, "tracked_pages") == 42.0)


def test_stale_decay_non_increasing_in_expectation():
    obs = gen_stale(window_hours=168, freeze_at=5_000, count=20_000, seed=8)
    v = values(obs, "visits_7d")
    day = 24 * 60
    post = v[5_000 : 5_000 + 7 * day]
    daily = post.reshape(7, day).mean(axis=1)
    assert np.all(np.diff(daily) <= 0)


def test_stale_bad_params():
    with pytest.raises(BadParams):
        gen_stale(freeze_at=10, count=10)


def test_generate_dispatch():
    assert generate(GenSpec("stationary", 5, {"count": 10})) == gen_stationary(count=10, seed=5)
    with pytest.raises(BadParams):
        generate(GenSpec("nope"))
    with pytest.raises(BadParams):
        generate(GenSpec("shift", 1, {"bogus": 1}))
