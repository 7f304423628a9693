import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from difflab.decay import (TWO_SIDED, UPPER_BOUND, DecaySeries, InsufficientSpanError, expected_exponents,
                           fit_slope, verdict)


def _series(t, v, label="s"):
    return DecaySeries.from_samples(label, t, v)


def test_exact_power_law():
    t = np.geomspace(1, 1000, 30)
    fit = fit_slope(_series(t, t**-0.75))
    assert fit.slope == pytest.approx(-0.75, abs=1e-12)
    assert fit.rms < 1e-12 and fit.tail_stable and fit.n == 30


def test_perturbed_power_law():
    t = np.geomspace(10, 1000, 40)
    fit = fit_slope(_series(t, 5 / t * (1 + 0.1 / t)), (10, 1000))
    assert fit.slope == pytest.approx(-1.0, abs=0.01)


def test_window_selects_samples():
    t = np.geomspace(1, 1000, 61)
    v = np.where(t < 10, t**-3.0, 10**-2.0 * (t / 10) ** -1.0)
    fit = fit_slope(_series(t, v), (10, 1000))
    assert fit.slope == pytest.approx(-1.0, abs=1e-12) and fit.window == (10.0, 1000.0)


@pytest.mark.parametrize("t", [np.geomspace(1, 1000, 7), np.geomspace(1, 5, 20)])
def test_insufficient_span(t):
    with pytest.raises(InsufficientSpanError):
        fit_slope(_series(t, t**-1.0))


def test_zeros_dropped_and_counted():
    t = np.geomspace(1, 100, 12)
    v = t**-2.0
    v[3] = 0.0
    s = _series(t, v)
    assert s.dropped == 1 and s.t.size == 11


def test_times_must_increase():
    with pytest.raises(ValueError):
        _series([1.0, 1.0, 2.0], [1.0, 1.0, 1.0])


def test_tail_flag_on_curved_series():
    t = np.geomspace(10, 1000, 30)
    fit = fit_slope(_series(t, t**-1.0 * np.exp(-t / 300)))
    assert not fit.tail_stable


@pytest.mark.parametrize("dim,alpha,key,value", [
    (3, 0.0, "heat_L2", 0.75), (3, 0.0, "thm1_diff", 1.75), (3, 0.5, "heat_L2", 2.5 / 3),
    (3, 0.5, "thm1_diff", 2.5 / 3 + 2 / 3), (2, 0.0, "heat_L2", 0.5), (3, 0.0, "energy_2", 5.5),
    (3, 0.0, "grad_0", 2.5), (3, 0.5, "grad_1", 5 / 3 + 3),
])
def test_expected_exponents(dim, alpha, key, value):
    assert expected_exponents(dim, alpha)[key] == pytest.approx(value, abs=1e-12)


@pytest.mark.parametrize("dim,alpha", [(1, 0.0), (3, 1.0), (3, -0.1)])
def test_expected_domain(dim, alpha):
    with pytest.raises(ValueError):
        expected_exponents(dim, alpha)


@pytest.mark.parametrize("slope,expected,mode,tol,ok", [
    (-0.74, 0.75, TWO_SIDED, 0.05, True),
    (-0.60, 0.75, TWO_SIDED, 0.05, False),
    (-1.80, 1.75, UPPER_BOUND, 0.1, True),
    (-1.60, 1.75, UPPER_BOUND, 0.1, False),
    (-0.90, 0.75, TWO_SIDED, 0.05, False),
])
def test_verdict(slope, expected, mode, tol, ok):
    line = verdict(slope, expected, mode, tol)
    assert line.passed is ok
    assert line.report.startswith("PASS" if ok else "FAIL")


def test_verdict_unknown_mode():
    with pytest.raises(ValueError):
        verdict(-1.0, 1.0, "both", 0.1)


@given(st.floats(-4, 0), st.floats(-3, 3), st.floats(1e-3, 1e3))
def test_scale_changes_intercept_only(p, noise_seed, c):
    t = np.geomspace(1, 100, 20)
    v = t**p * np.exp(0.05 * np.sin(noise_seed * np.arange(20)))
    f1, f2 = fit_slope(_series(t, v)), fit_slope(_series(t, c * v))
    assert f2.slope == pytest.approx(f1.slope, abs=1e-12)
    assert f2.intercept - f1.intercept == pytest.approx(np.log(c), abs=1e-9)


@given(st.lists(st.floats(0.0, 1.0), min_size=12, max_size=12))
def test_decreasing_series_has_nonpositive_slope(drops):
    t = np.geomspace(1, 100, 12)
    v = np.exp(-np.cumsum(drops))
    assert fit_slope(_series(t, v)).slope <= 1e-12


@given(st.floats(-5, 1), st.floats(1.0, 50.0))
def test_window_independence_on_power_laws(p, lo):
    t = np.geomspace(1, 10000, 80)
    hi = lo * 10 * 1.5
    assume((t >= lo).sum() >= 8)
    f = fit_slope(_series(t, 3 * t**p), (lo, hi))
    assert f.slope == pytest.approx(p, abs=1e-10)
