import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from swarmcarry.analysis import detrend, detrend_series, pearson, summarize, synchronicity
from swarmcarry.errors import DomainError
from swarmcarry.sim import TrajectoryLog

T = np.arange(0, 7.0 + 1e-9, 0.01)

SD_COMBINED = [0.59, 0.48, 0.29, 0.17, 0.12]
LJ_COMBINED = [0.57, 0.17, 0.44, 0.41, 0.10]


def make_log(xs, ys=None, t=T):
    xs = np.asarray(xs, dtype=float)
    ys = xs if ys is None else np.asarray(ys, dtype=float)
    pos = np.stack([xs.T, ys.T], axis=-1)
    n = xs.shape[0]
    return TrajectoryLog(t=t, ids=np.arange(n), position=pos, velocity=np.zeros_like(pos), command=np.zeros_like(pos))


def test_linear_input_leaves_nothing():
    assert np.abs(detrend_series(T, 3.0 - 0.7 * T)).max() < 1e-12


def test_zero_mean_zero_slope_sinusoid_unchanged():
    t = np.linspace(0, 2 * math.pi, 2001)
    s = np.cos(3 * t)
    tc = t - t.mean()
    s = s - s.mean() - (tc @ (s - s.mean())) / (tc @ tc) * tc
    np.testing.assert_allclose(detrend_series(t, s), s, atol=1e-9)


def test_line_plus_sinusoid_recovers_sinusoid():
    t = np.linspace(0, 4, 4001)
    s = 0.01 * np.sin(2 * math.pi * t)
    s = s - s.mean()
    tc = t - t.mean()
    s = s - (tc @ s) / (tc @ tc) * tc
    np.testing.assert_allclose(detrend_series(t, 1.0 + 0.2 * t + s), s, atol=1e-12)


@given(st.lists(st.floats(-10, 10), min_size=3, max_size=200))
def test_residual_has_zero_mean_and_slope(values):
    t = np.arange(len(values)) * 0.1
    r = detrend_series(t, values)
    tc = t - t.mean()
    scale = max(1.0, np.abs(values).max())
    assert abs(r.mean()) <= 1e-9 * scale
    assert abs(tc @ r / (tc @ tc)) <= 1e-9 * scale
    np.testing.assert_allclose(detrend_series(t, r), r, atol=1e-12 * scale)


def test_detrend_errors():
    with pytest.raises(DomainError):
        detrend_series([0.0, 1.0], [1.0, 2.0])
    with pytest.raises(DomainError):
        detrend_series([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
    log = make_log(np.zeros((2, T.size)))
    with pytest.raises(DomainError):
        detrend(log, 0, "x", (3.0, 3.0))
    with pytest.raises(DomainError):
        detrend(log, 0, "x", (1.0, 9.0))
    with pytest.raises(DomainError):
        detrend(log, 0, "z", (1.0, 2.0))


@given(
    st.lists(st.floats(-1, 1), min_size=5, max_size=50),
    st.floats(0.1, 100.0),
    st.floats(-100.0, 100.0),
    st.floats(0.1, 100.0),
    st.floats(-100.0, 100.0),
)
def test_pearson_affine_invariance(values, s1, o1, s2, o2):
    a = np.asarray(values)
    # offsets of 100 on a signal much narrower than 1e-3 leave too few significant digits
    assume(np.ptp(a) > 1e-3)
    rng = np.random.default_rng(len(values))
    b = 0.5 * a + rng.normal(0, 0.3, a.size)
    r = pearson(a, b)
    if r is None:
        return
    r2 = pearson(s1 * a + o1, s2 * b + o2)
    assert r2 == pytest.approx(r, abs=1e-9)
    assert -1.0 <= r <= 1.0


def test_identical_and_opposite_residuals():
    rng = np.random.default_rng(0)
    wiggle = rng.normal(0, 0.01, T.size)
    same = make_log([0.2 * T + wiggle, 1 + 0.2 * T + wiggle, 2 + 0.2 * T + wiggle])
    rep = synchronicity(same, (0.5, 6.5))
    assert rep.rho_x_mean == pytest.approx(1.0) and rep.combined == pytest.approx(1.0)
    flip = make_log([0.2 * T + wiggle, 0.2 * T - wiggle])
    assert synchronicity(flip, (0.5, 6.5)).combined == pytest.approx(-1.0)


def test_independent_noise_is_uncorrelated():
    hits = 0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        xs = rng.normal(0, 0.01, (3, 701))
        ys = rng.normal(0, 0.01, (3, 701))
        rep = synchronicity(make_log(xs, ys, t=np.arange(701) * 0.01), (0.0, 7.0))
        hits += abs(rep.combined) <= 0.1
    assert hits >= 48


def test_constant_log_warns_and_reports_missing():
    log = make_log(np.ones((3, T.size)))
    with pytest.warns(RuntimeWarning, match="zero-variance"):
        rep = synchronicity(log, (0.0, 7.0))
    assert len(rep.missing) == 6
    assert math.isnan(rep.combined)


def test_partial_missing_pairs_are_excluded():
    rng = np.random.default_rng(1)
    w = rng.normal(0, 0.01, T.size)
    log = make_log([w, w, np.zeros(T.size)])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = synchronicity(log, (0.0, 7.0))
    assert rep.rho_x_mean == pytest.approx(1.0)


def test_synchronicity_needs_two_agents():
    with pytest.raises(DomainError):
        synchronicity(make_log(np.zeros((1, T.size))), (0.0, 7.0))


def test_summarize_reported_columns():
    mu, sd = summarize(SD_COMBINED)
    assert mu == pytest.approx(0.33, abs=0.005) and sd == pytest.approx(0.20, abs=0.005)
    mu, sd = summarize(LJ_COMBINED)
    assert mu == pytest.approx(0.34, abs=0.005) and sd == pytest.approx(0.20, abs=0.005)


def test_population_convention_would_miss():
    # the population spread of the same numbers rounds to 0.18, not 0.20
    assert np.std(SD_COMBINED) == pytest.approx(0.1797, abs=1e-4)
    assert np.std(LJ_COMBINED) == pytest.approx(0.1757, abs=1e-4)


def test_summarize_single_and_empty():
    assert summarize([0.42]) == (0.42, 0.0)
    with pytest.raises(DomainError):
        summarize([])
