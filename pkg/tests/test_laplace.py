import numpy as np
import pytest

from heatlab.core import TimeSeries
from heatlab.laplace import default_lambda_grid, laplace_transform


def test_step_constant_tail_exact():
    # held-at-one signal with constant tail transforms to exactly 1/lam
    t = np.linspace(0, 12, 400)
    s = TimeSeries(t, np.ones_like(t))
    lams = np.array([0.5, 1.0, 3.0])
    out = laplace_transform(s, lams, tail="constant")
    assert np.max(np.abs(out.values - 1.0 / lams)) < 1e-12


def test_exp_decay_zero_tail():
    t = np.linspace(0.0, 30.0, 2_000_001)
    s = TimeSeries(t, np.exp(-t))
    out = laplace_transform(s, np.array([1.0]), tail="zero")
    assert abs(out.values[0] - 0.5) < 1e-10


def test_linear_signal_exact():
    # the interpolant of t is t itself, so only the (negligible) tail is cut
    t = np.linspace(0.0, 40.0, 81)
    s = TimeSeries(t, t.copy())
    out = laplace_transform(s, np.array([1.0]), tail="zero")
    assert abs(out.values[0] - 1.0) < 1e-10


def test_linearity():
    t = np.linspace(0, 20, 5001)
    y1 = np.sin(t) ** 2
    y2 = np.exp(-0.3 * t)
    lams = default_lambda_grid(10)
    a = laplace_transform(TimeSeries(t, y1), lams, tail="zero").values
    b = laplace_transform(TimeSeries(t, y2), lams, tail="zero").values
    c = laplace_transform(TimeSeries(t, 2.0 * y1 - 0.5 * y2), lams, tail="zero").values
    assert np.max(np.abs(c - (2.0 * a - 0.5 * b))) < 1e-12


def test_monotone_decay_for_nonnegative_signal():
    t = np.linspace(0, 20, 4001)
    s = TimeSeries(t, 1.0 + np.cos(t))
    lams = default_lambda_grid(25)
    vals = laplace_transform(s, lams, tail="constant").values
    assert np.all(np.diff(vals) <= 0)


def test_tail_model_difference_bounded():
    t = np.linspace(0, 8, 1601)
    y = np.cos(2 * t)  # |y| <= 1
    lams = np.array([0.7, 1.3, 4.0])
    zero = laplace_transform(TimeSeries(t, y), lams, tail="zero").values
    const = laplace_transform(TimeSeries(t, y), lams, tail="constant").values
    bound = np.exp(-lams * t[-1]) / lams
    assert np.all(np.abs(const - zero) <= bound + 1e-15)


def test_rejects_nonpositive_lambda():
    s = TimeSeries(np.linspace(0, 5, 11), np.ones(11))
    with pytest.raises(ValueError, match="positive rates"):
        laplace_transform(s, np.array([1.0, -2.0]))


def test_truncation_warning():
    s = TimeSeries(np.linspace(0, 2, 11), np.ones(11))
    with pytest.warns(UserWarning, match="truncation"):
        laplace_transform(s, np.array([0.5]), tail="zero")


def test_repeated_time_segment_ignored():
    # a jump encoded by a repeated sample time contributes no segment mass
    t = np.array([0.0, 1.0, 1.0, 6.0])
    y = np.array([0.0, 0.0, 2.0, 2.0])
    out = laplace_transform(TimeSeries(t, y), np.array([1.0]), tail="zero")
    expect = 2.0 * (np.exp(-1.0) - np.exp(-6.0))
    assert abs(out.values[0] - expect) < 1e-14


def test_default_grid_shape():
    g = default_lambda_grid()
    assert g.size == 40 and abs(g[0] - 0.25) < 1e-15 and abs(g[-1] - 25.0) < 1e-12
    assert np.all(np.diff(g) > 0)
