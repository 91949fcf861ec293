import numpy as np
import pytest

from heatlab.core import SpaceTimeGrid, TimeSeries, make_profile, reflect
from heatlab.heat_forward import flux_left, flux_right, solve_forward
from heatlab.reconstruct import (
    ReconstructionConfig,
    ambiguity_experiment,
    flux_formula_H,
    misfit,
    profile_to_params,
    reconstruct,
)

GRID = SpaceTimeGrid(nx=201, nt=800, T_final=5.0)
TRUTH = make_profile("affine:1,2")


@pytest.fixture(scope="module")
def right_data():
    field = solve_forward(TRUTH, "step:1", GRID)
    return flux_right(field, TRUTH)


@pytest.fixture(scope="module")
def left_data():
    field = solve_forward(TRUTH, "step:1", GRID)
    return flux_left(field, TRUTH)


def _rel_l2(p, q):
    xs = np.linspace(0.0, 1.0, 1001)
    return float(np.sqrt(np.trapezoid((p(xs) - q(xs)) ** 2, xs)
                         / np.trapezoid(q(xs) ** 2, xs)))


def test_config_validation():
    with pytest.raises(ValueError, match="m must"):
        ReconstructionConfig(m=2)
    with pytest.raises(ValueError, match="alpha"):
        ReconstructionConfig(alpha=-1.0)
    with pytest.raises(ValueError, match="data_end"):
        ReconstructionConfig(data_end="middle")


def test_misfit_zero_at_truth_inverse_crime(right_data):
    cfg = ReconstructionConfig(m=9, alpha=0.0, data_end="right")
    val = misfit(profile_to_params(TRUTH, 9), right_data, "step:1", GRID, cfg)
    assert val < 1e-20


def test_misfit_floor_with_finer_grid_data():
    # data from a once-refined grid: the misfit at truth drops to the scheme's
    # discretization floor instead of zero (smooth drive keeps t=0 benign)
    fine = SpaceTimeGrid(nx=401, nt=1600, T_final=5.0)
    gf = flux_right(solve_forward(TRUTH, "ramp:1", fine), TRUTH)
    data = TimeSeries(GRID.t, gf.y[::2])
    cfg = ReconstructionConfig(m=9, alpha=0.0, data_end="right")
    val = misfit(profile_to_params(TRUTH, 9), data, "ramp:1", GRID, cfg)
    assert 1e-9 < val < 1e-4


def test_misfit_regularization_term():
    cfg = ReconstructionConfig(m=5, alpha=2.0, data_end="right")
    data = TimeSeries(GRID.t, np.zeros_like(GRID.t))
    bumpy = np.log(np.array([1.0, 2.0, 1.0, 2.0, 1.0]))
    base = misfit(bumpy, data, "zero", GRID, ReconstructionConfig(m=5, alpha=0.0))
    with_reg = misfit(bumpy, data, "zero", GRID, cfg)
    d2 = np.array([1.0 - 4.0 + 1.0, 2.0 - 2.0 + 2.0, 1.0 - 4.0 + 1.0])
    assert abs((with_reg - base) - 2.0 * np.sum(d2**2)) < 1e-12


def test_affine_truth_incurs_zero_penalty(right_data):
    cfg0 = ReconstructionConfig(m=9, alpha=0.0, data_end="right")
    cfg1 = ReconstructionConfig(m=9, alpha=10.0, data_end="right")
    p = profile_to_params(TRUTH, 9)
    assert abs(misfit(p, right_data, "step:1", GRID, cfg0)
               - misfit(p, right_data, "step:1", GRID, cfg1)) < 1e-20


def test_right_end_identifiability_contrast(right_data):
    cfg = ReconstructionConfig(m=9, alpha=0.0, data_end="right")
    at_truth = misfit(profile_to_params(TRUTH, 9), right_data, "step:1", GRID, cfg)
    at_mirror = misfit(profile_to_params(reflect(TRUTH), 9), right_data, "step:1", GRID, cfg)
    assert at_mirror > 1e3 * max(at_truth, 1e-30)
    assert at_mirror > 0.01


def test_left_end_mirror_within_floor(left_data):
    cfg = ReconstructionConfig(m=9, alpha=0.0, data_end="left")
    at_truth = misfit(profile_to_params(TRUTH, 9), left_data, "step:1", GRID, cfg)
    at_mirror = misfit(profile_to_params(reflect(TRUTH), 9), left_data, "step:1", GRID, cfg)
    assert at_truth < 1e-20
    assert at_mirror < 1e-7  # discretization floor, shrinks under refinement


def test_reconstruct_right_end_recovers_truth(right_data):
    cfg = ReconstructionConfig(m=9, alpha=0.0, data_end="right", init="const:1.5")
    res = reconstruct(right_data, "step:1", GRID, cfg)
    assert res.converged
    assert _rel_l2(res.profile, TRUTH) < 0.02
    assert np.all(np.diff(res.misfit_history) <= 0)


def test_reconstruct_at_optimum_stops_immediately(right_data):
    cfg = ReconstructionConfig(m=9, alpha=0.0, data_end="right", init="affine:1,2")
    res = reconstruct(right_data, "step:1", GRID, cfg)
    assert res.converged
    assert len(res.misfit_history) == 1  # zero iterations


def test_reconstruct_left_end_two_minima(left_data):
    mirror = reflect(TRUTH)
    cfg_floor = ReconstructionConfig(m=9, alpha=0.0, data_end="left")
    floor = misfit(profile_to_params(mirror, 9), left_data, "step:1", GRID, cfg_floor)

    res_t = reconstruct(left_data, "step:1", GRID,
                        ReconstructionConfig(m=9, data_end="left", init="affine:1,2"))
    res_m = reconstruct(left_data, "step:1", GRID,
                        ReconstructionConfig(m=9, data_end="left", init="affine:2,1"))
    assert abs(res_t.final_misfit - res_m.final_misfit) <= floor
    assert _rel_l2(res_t.profile, TRUTH) < 0.02
    assert _rel_l2(res_m.profile, mirror) < 0.05
    assert _rel_l2(res_m.profile, mirror) < _rel_l2(res_m.profile, TRUTH)


def test_reconstruct_never_aborts(right_data):
    cfg = ReconstructionConfig(m=9, alpha=0.0, data_end="right",
                               init="const:1.5", max_iters=0)
    res = reconstruct(right_data, "step:1", GRID, cfg)
    assert not res.converged
    assert res.misfit_history.size == 1


def test_reconstruct_rejects_off_grid_data(right_data):
    other = SpaceTimeGrid(nx=201, nt=799, T_final=5.0)
    cfg = ReconstructionConfig(m=9, data_end="right")
    with pytest.raises(ValueError, match="grid times"):
        reconstruct(right_data, "step:1", other, cfg)


def test_noisy_reconstruction_stays_close(right_data):
    # 1 percent uniform noise; smoothing keeps the fit stable (empirical bound)
    rng = np.random.default_rng(0)
    amp = 0.01 * np.max(np.abs(right_data.y))
    noisy = TimeSeries(right_data.t, right_data.y + rng.uniform(-amp, amp, right_data.y.shape))
    cfg = ReconstructionConfig(m=9, alpha=1e-4, data_end="right",
                               init="const:1.5", max_iters=30)
    res = reconstruct(noisy, "step:1", GRID, cfg)
    assert _rel_l2(res.profile, TRUTH) < 0.15


def test_ambiguity_experiment_affine():
    rep = ambiguity_experiment(TRUTH, "step:1", GRID)
    assert not rep.vacuous
    assert rep.asymmetry > 0.5
    assert rep.max_rel_H_diff < 1e-6
    assert rep.max_h_diff < 1e-3
    assert rep.max_g_diff > 0.5
    text = rep.to_text()
    assert "rate-domain" in text and "right-end" in text


def test_ambiguity_experiment_symmetric_flagged():
    sym = make_profile("sin:1,0.5,1")
    rep = ambiguity_experiment(sym, "step:1", SpaceTimeGrid(nx=101, nt=200, T_final=2.0))
    assert rep.vacuous
    assert rep.max_h_diff < 1e-8
    assert rep.max_g_diff < 1e-8
    assert rep.max_rel_H_diff < 1e-8
    assert "vacuous" in rep.to_text()


def test_flux_formula_matches_constant_profile_closed_form():
    # for a = 1 and a held unit drive: H(lam) = 1 / (sqrt(lam) sinh(sqrt(lam)))
    a = make_profile("const:1")
    lams = np.array([0.5, 1.0, 2.0])
    H = flux_formula_H(a, "step:1", GRID, lams)
    expect = 1.0 / (np.sqrt(lams) * np.sinh(np.sqrt(lams)))
    assert np.max(np.abs(H - expect) / expect) < 1e-9
