import math

import numpy as np
import pytest

import heatlab.spectrum as spectrum_mod
from heatlab.core import make_profile
from heatlab.sl_solver import transformed_length
from heatlab.spectrum import (
    NeumannSpectrum,
    SpectrumShortfallError,
    neumann_spectrum,
    spectrum_symmetry_report,
)


def test_constant_profile_spectrum():
    sp = neumann_spectrum(make_profile("const:1"), 3)
    expect = np.array([0.0, -math.pi**2, -4 * math.pi**2])
    assert np.max(np.abs(sp.eigenvalues - expect)) < 1e-8


def test_constant_four_spectrum():
    # xi(1) = 1/2 halves the effective length, so the first k-root doubles
    sp = neumann_spectrum(make_profile("const:4"), 2)
    assert abs(sp.eigenvalues[1] + 4 * math.pi**2) < 1e-8


def test_single_eigenvalue_is_zero():
    sp = neumann_spectrum(make_profile("sin:1,0.5,1"), 1)
    assert sp.eigenvalues.tolist() == [0.0]


def test_k_scaling_consistency():
    # k_n * xi(1) = n pi for constant conductivity
    a = make_profile("const:4")
    L = transformed_length(a)
    sp = neumann_spectrum(a, 6)
    k = np.sqrt(-sp.eigenvalues[1:])
    assert np.max(np.abs(k * L - np.arange(1, 6) * math.pi)) < 1e-8


def test_eigenvalues_strictly_decreasing():
    sp = neumann_spectrum(make_profile("affine:1,2"), 8)
    assert sp.eigenvalues[0] == 0.0
    assert np.all(np.diff(sp.eigenvalues) < 0)
    assert not sp.gap_warnings


@pytest.mark.parametrize("spec", ["affine:1,2", "sin:1,0.5,0.5"])
def test_reflection_leaves_spectrum_invariant(spec):
    diffs = spectrum_symmetry_report(make_profile(spec), 6)
    assert np.max(diffs) < 1e-8


def test_symmetric_profile_symmetry_report():
    diffs = spectrum_symmetry_report(make_profile("sin:1,0.5,1"), 6)
    assert np.max(diffs) < 1e-8


def test_validation():
    with pytest.raises(ValueError, match="n_max"):
        neumann_spectrum(make_profile("const:1"), 0)
    with pytest.raises(ValueError, match="decrease"):
        NeumannSpectrum(np.array([0.0, 1.0]), 2)


def test_shortfall_reported(monkeypatch):
    # a slope with no sign changes must surface as an explicit shortfall,
    # never as silent truncation
    monkeypatch.setattr(spectrum_mod, "neumann_endpoint", lambda a, lam, tol=0.0: (1.0, 1.0))
    with pytest.raises(SpectrumShortfallError, match="found 1 of 4"):
        neumann_spectrum(make_profile("const:1"), 4)
