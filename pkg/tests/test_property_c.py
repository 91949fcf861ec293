import numpy as np
import pytest

from heatlab.core import make_profile, profile_difference
from heatlab.laplace import default_lambda_grid
from heatlab.property_c import (
    build_product_dictionary,
    completeness_residual,
    orthogonality_functional,
)

from oracles import COMPLETENESS_ORACLE_R40, ORTHOGONALITY_GOLDEN

# regression values from this implementation on the 257-point grid
# (the high-resolution oracle value sits at 0.0033241; the coarse-grid
# surrogate is larger because the fitted remainder oscillates near the
# grid scale)
R1_FROZEN = 0.07867604050268834
R40_FROZEN = 0.005784703533083674


@pytest.fixture(scope="module")
def const_dictionary():
    a1 = make_profile("const:1")
    return build_product_dictionary(a1, a1, default_lambda_grid())


def test_column_closed_form_constant_pair(const_dictionary):
    d = const_dictionary
    lam = d.lambdas[0]
    expect = np.cosh(np.sqrt(lam) * d.x) ** 2
    expect /= np.max(expect)
    assert np.max(np.abs(d.columns[:, 0] - expect)) < 1e-9


def test_column_closed_form_mixed_pair():
    lam = np.array([1.0])
    d = build_product_dictionary(make_profile("const:1"), make_profile("const:4"), lam)
    expect = np.cosh(d.x) * np.cosh(d.x / 2.0)
    expect /= np.max(expect)
    assert np.max(np.abs(d.columns[:, 0] - expect)) < 1e-9


def test_column_small_rate_limit():
    d = build_product_dictionary(make_profile("const:1"), make_profile("const:1"),
                                 np.array([1e-10]))
    assert np.max(np.abs(d.columns[:, 0] - 1.0)) < 1e-8


def test_swap_symmetry():
    lams = default_lambda_grid(6)
    a1, a2 = make_profile("const:1"), make_profile("affine:1,2")
    d12 = build_product_dictionary(a1, a2, lams)
    d21 = build_product_dictionary(a2, a1, lams)
    assert np.array_equal(d12.columns, d21.columns)


def test_member_of_span(const_dictionary):
    res = completeness_residual(const_dictionary, const_dictionary.columns[:, 0])
    assert res.residuals[0] < 1e-12


@pytest.mark.parametrize("target", [
    lambda x: x * (1 - x),
    lambda x: np.sin(3 * x),
    lambda x: np.exp(x) - 1,
])
def test_residuals_non_increasing(const_dictionary, target):
    r = completeness_residual(const_dictionary, target).residuals
    assert np.all(np.diff(r) <= 1e-18)


def test_residual_regression(const_dictionary):
    res = completeness_residual(const_dictionary, lambda x: x * (1 - x))
    assert abs(res.residuals[0] - R1_FROZEN) < 1e-9
    assert abs(res.residuals[-1] - R40_FROZEN) < 1e-8
    # coarse-grid surrogate within 2x of the high-resolution oracle
    assert res.residuals[-1] < 2.0 * COMPLETENESS_ORACLE_R40


def test_near_collinear_columns_dropped():
    lams = np.array([1.0, 1.0 + 1e-13])
    d = build_product_dictionary(make_profile("const:1"), make_profile("const:1"), lams)
    res = completeness_residual(d, lambda x: x)
    assert res.dropped == (1,)
    assert res.residuals[1] <= res.residuals[0]


def test_rate_validation():
    a = make_profile("const:1")
    with pytest.raises(ValueError, match="positive"):
        build_product_dictionary(a, a, np.array([-1.0, 2.0]))
    with pytest.raises(ValueError, match="distinct"):
        build_product_dictionary(a, a, np.array([1.0, 1.0]))


def test_orthogonality_zero_cases():
    a1 = make_profile("const:1")
    a2 = make_profile("affine:1,2")
    assert orthogonality_functional(lambda x: np.zeros_like(x), a1, a2, 1.0) == 0.0
    p_same = profile_difference(a1, a1)
    assert abs(orthogonality_functional(p_same, a1, a1, 2.0)) < 1e-15


@pytest.mark.parametrize("lam", [1.0, 2.0, 5.0])
def test_orthogonality_against_bessel_oracle(lam):
    # golden values from the closed-form solution of the affine-profile seed
    # (tests/oracles.py); quadrature here is Simpson on the 257-point grid
    a1 = make_profile("const:1")
    a2 = make_profile("affine:1,2")
    p = profile_difference(a1, a2)   # p(x) = -x
    val = orthogonality_functional(p, a1, a2, lam)
    assert abs(val - ORTHOGONALITY_GOLDEN[lam]) < 1e-8
