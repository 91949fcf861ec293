"""Neumann eigenvalues: the rates lam_j at which the zero-slope seed also has
zero slope at x=1. lam_0 = 0 always qualifies (the constant solution); the
rest are negative and accumulate like -(j pi / xi(1))^2.

Root finding runs in k with lam = -k^2: the k-roots are asymptotically
equispaced with gap pi/xi(1), so a scan at a quarter of that gap separates
consecutive roots, and each bracket is refined by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import parallel_map
from .core import ConductivityProfile, reflect
from .sl_solver import neumann_endpoint, transformed_length

SPECTRUM_ODE_TOL = 1e-12  # tighter than trajectory work: root agreement needs headroom
LAMBDA_REFINE_TOL = 1e-10


class SpectrumShortfallError(RuntimeError):
    """Scan window produced fewer roots than requested."""

    def __init__(self, found: int, requested: int, k_max: float):
        self.found = found
        self.requested = requested
        super().__init__(
            f"found {found} of {requested} requested eigenvalues "
            f"in the scan window k <= {k_max:.4g}"
        )


@dataclass(frozen=True)
class NeumannSpectrum:
    """Decreasing eigenvalue sequence 0 = lam_0 > lam_1 > ..."""

    eigenvalues: np.ndarray
    n_requested: int
    gap_warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev[0] != 0.0 or np.any(np.diff(ev) >= 0):
            raise ValueError("eigenvalues must start at 0 and decrease strictly")
        object.__setattr__(self, "eigenvalues", ev)


def _bisect_k(slope_of_k, klo: float, khi: float, flo: float) -> float:
    # sign-change bracket assumed; stop once the induced lam interval is tight
    while abs(khi * khi - klo * klo) > LAMBDA_REFINE_TOL:
        mid = 0.5 * (klo + khi)
        fm = slope_of_k(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            klo, flo = mid, fm
        else:
            khi = mid
    return 0.5 * (klo + khi)


def neumann_spectrum(a: ConductivityProfile, n_max: int,
                     ode_tol: float = SPECTRUM_ODE_TOL) -> NeumannSpectrum:
    """First n_max eigenvalues (lam_0 = 0 included), refined to |dlam| <= 1e-10."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if n_max == 1:
        return NeumannSpectrum(np.array([0.0]), n_max)

    L = transformed_length(a)
    dk = math.pi / (4.0 * L)
    k_max = (n_max + 2) * math.pi / L

    def slope_of_k(k: float) -> float:
        return neumann_endpoint(a, -k * k, tol=ode_tol)[1]

    ks = dk * np.arange(1, int(math.ceil(k_max / dk)) + 1)
    slopes = parallel_map(slope_of_k, ks)

    brackets = []
    for i in range(len(ks) - 1):
        s0, s1 = slopes[i], slopes[i + 1]
        if s0 == 0.0:
            brackets.append((ks[i], ks[i], s0))
        elif (s0 < 0.0) != (s1 < 0.0):
            brackets.append((ks[i], ks[i + 1], s0))
        if len(brackets) >= n_max - 1:
            break

    if len(brackets) < n_max - 1:
        raise SpectrumShortfallError(len(brackets) + 1, n_max, k_max)

    def refine(br):
        klo, khi, flo = br
        if klo == khi:
            return klo
        return _bisect_k(slope_of_k, klo, khi, flo)

    k_roots = parallel_map(refine, brackets)

    warnings_list = []
    gap_lo, gap_hi = 0.5 * math.pi / L, 2.0 * math.pi / L
    prev = 0.0
    for j, k in enumerate(k_roots, start=1):
        gap = k - prev
        if not (gap_lo <= gap <= gap_hi):
            warnings_list.append(
                f"k-gap {gap:.4g} before root {j} outside the sanity band "
                f"[{gap_lo:.4g}, {gap_hi:.4g}]"
            )
        prev = k
    eigenvalues = np.concatenate([[0.0], [-k * k for k in k_roots]])
    return NeumannSpectrum(eigenvalues, n_max, warnings_list)


def spectrum_symmetry_report(a: ConductivityProfile, n_max: int,
                             ode_tol: float = SPECTRUM_ODE_TOL) -> np.ndarray:
    """Pairwise |lam_j(a) - lam_j(mirror of a)| for the first n_max eigenvalues."""
    ev_a = neumann_spectrum(a, n_max, ode_tol=ode_tol).eigenvalues
    ev_r = neumann_spectrum(reflect(a), n_max, ode_tol=ode_tol).eigenvalues
    return np.abs(ev_a - ev_r)
