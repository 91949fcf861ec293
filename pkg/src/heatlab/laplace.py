"""Numerical Laplace transforms of sampled time signals.

The integrand is the piecewise-linear interpolant of the samples, integrated
exactly against exp(-lam*t) segment by segment, so jump drives transform
exactly. A tail model covers [T, inf): either zero or the last sample held
constant (contributing y(T) e^(-lam T)/lam).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import TimeSeries

DEFAULT_LAMBDA_MIN = 0.25
DEFAULT_LAMBDA_MAX = 25.0
DEFAULT_LAMBDA_COUNT = 40


def default_lambda_grid(count: int = DEFAULT_LAMBDA_COUNT,
                        lo: float = DEFAULT_LAMBDA_MIN,
                        hi: float = DEFAULT_LAMBDA_MAX) -> np.ndarray:
    """Log-spaced decay-rate grid used by the lambda-domain experiments."""
    return np.geomspace(lo, hi, count)


@dataclass(frozen=True)
class SpectralSample:
    """Values of a Laplace-domain quantity on an increasing lambda grid."""

    lambdas: np.ndarray
    values: np.ndarray
    tag: str = ""

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if lam.shape != val.shape or lam.ndim != 1:
            raise ValueError("lambdas and values must be 1D arrays of equal length")
        if np.any(lam <= 0):
            raise ValueError("lambda grid must be strictly positive")
        if np.any(np.diff(lam) <= 0):
            raise ValueError("lambda grid must be strictly increasing")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "values", val)


def _phi2(z: np.ndarray) -> np.ndarray:
    # phi2(z) = (1 - e^-z (1+z)) / z^2, series below z=0.01 to dodge cancellation
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = z < 1e-2
    zs = z[small]
    out[small] = (
        0.5
        - zs / 3.0
        + zs**2 / 8.0
        - zs**3 / 30.0
        + zs**4 / 144.0
        - zs**5 / 840.0
        + zs**6 / 5760.0
    )
    zb = z[~small]
    out[~small] = (-np.expm1(-zb) / zb - np.exp(-zb)) / zb
    return out


def laplace_transform(series: TimeSeries, lambdas, tail: str = "constant",
                      tag: str = "") -> SpectralSample:
    """Transform a sampled signal on the given positive decay rates.

    tail="constant" holds y(T) beyond the last sample; tail="zero" truncates.
    Warns when lambda_min * T < 5 (truncation may dominate).
    """
    lam = np.asarray(lambdas, dtype=float)
    if lam.ndim == 0:
        lam = lam[None]
    if np.any(lam <= 0):
        bad = float(lam[lam <= 0][0])
        raise ValueError(f"transform defined for positive rates only, got lambda={bad}")
    if tail not in ("constant", "zero"):
        raise ValueError(f"tail must be 'constant' or 'zero', got {tail!r}")

    t = series.t
    y = series.y
    T = t[-1]
    if T > 0 and float(np.min(lam)) * T < 5.0:
        warnings.warn(
            f"lambda_min*T = {float(np.min(lam)) * T:.2f} < 5; "
            "truncation error may dominate the transform",
            stacklevel=2,
        )

    dtseg = np.diff(t)
    keep = dtseg > 0
    t0 = t[:-1][keep]
    d = dtseg[keep]
    y0 = y[:-1][keep]
    slope = (y[1:][keep] - y0) / d

    vals = np.empty(lam.shape)
    for i, lm in enumerate(lam):
        z = lm * d
        phi1 = -np.expm1(-z) / z
        seg = np.exp(-lm * t0) * d * (y0 * phi1 + slope * d * _phi2(z))
        total = float(np.sum(seg))
        if tail == "constant":
            total += y[-1] * np.exp(-lm * T) / lm
        vals[i] = total
    return SpectralSample(lam, vals, tag=tag)
