"""Conductivity profiles, grids, and sampled series shared by all solvers.

A profile is a strictly positive function a(x) on [0, 1] with two
derivatives. Named analytic forms carry closed-form derivatives; sampled
profiles get them from a natural cubic spline through the samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

_POSITIVITY_SCAN_POINTS = 1000  # dense scan; adequate at desk scale


class ConductivityProfile:
    """Conductivity a(x) > 0 on [0, 1] with derivative access.

    Immutable after construction; safe to share across worker threads.
    """

    def __init__(self, kind: str, fa: Callable, fda: Callable, fd2a: Callable,
                 values: np.ndarray | None = None):
        self.kind = kind
        self._fa = fa
        self._fda = fda
        self._fd2a = fd2a
        self.values = values  # node samples for sampled/pwl kinds, else None
        self._check_positive()

    def _check_positive(self) -> None:
        xs = np.linspace(0.0, 1.0, _POSITIVITY_SCAN_POINTS)
        vals = np.asarray(self._fa(xs), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"profile {self.kind!r}: non-finite value on [0,1]")
        i = int(np.argmin(vals))
        if vals[i] <= 0.0:
            raise ValueError(
                f"profile {self.kind!r}: non-positive value {vals[i]:.6g} near x={xs[i]:.4f}"
            )

    def __call__(self, x):
        return self._eval(self._fa, x)

    def deriv(self, x):
        return self._eval(self._fda, x)

    def deriv2(self, x):
        return self._eval(self._fd2a, x)

    @staticmethod
    def _eval(f, x):
        arr = np.asarray(x, dtype=float)
        out = np.asarray(f(arr), dtype=float)
        if arr.ndim == 0:
            return float(out)
        return out

    def __repr__(self) -> str:
        return f"ConductivityProfile({self.kind})"


def constant_profile(c: float) -> ConductivityProfile:
    c = float(c)
    return ConductivityProfile(
        f"const:{c:g}",
        lambda x: np.full_like(x, c),
        lambda x: np.zeros_like(x),
        lambda x: np.zeros_like(x),
    )


def affine_profile(a0: float, a1: float) -> ConductivityProfile:
    """Straight-line profile through the endpoint values a(0)=a0, a(1)=a1."""
    a0, a1 = float(a0), float(a1)
    slope = a1 - a0
    return ConductivityProfile(
        f"affine:{a0:g},{a1:g}",
        lambda x: a0 + slope * x,
        lambda x: np.full_like(x, slope),
        lambda x: np.zeros_like(x),
    )


def sin_profile(base: float, amp: float, freq: float) -> ConductivityProfile:
    """a(x) = base + amp*sin(freq*pi*x)."""
    base, amp, freq = float(base), float(amp), float(freq)
    k = freq * np.pi
    return ConductivityProfile(
        f"sin:{base:g},{amp:g},{freq:g}",
        lambda x: base + amp * np.sin(k * x),
        lambda x: amp * k * np.cos(k * x),
        lambda x: -amp * k * k * np.sin(k * x),
    )


def _check_samples(values: Sequence[float], minimum: int) -> np.ndarray:
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1 or vals.size < minimum:
        raise ValueError(f"need at least {minimum} samples on [0,1], got {vals.size}")
    for i, v in enumerate(vals):
        if not np.isfinite(v) or v <= 0.0:
            raise ValueError(f"non-positive at index {i}")
    return vals


def pwl_profile(values: Sequence[float]) -> ConductivityProfile:
    """Piecewise-linear profile through node values on a uniform grid.

    First derivative is the segment slope (right-continuous); curvature is
    reported as zero. Intended for the reconstruction parameterization and
    forward solves, not for the canonical-form transform.
    """
    vals = _check_samples(values, 2)
    n = vals.size
    nodes = np.linspace(0.0, 1.0, n)
    slopes = np.diff(vals) * (n - 1)

    def fa(x):
        return np.interp(x, nodes, vals)

    def fda(x):
        idx = np.clip((np.asarray(x) * (n - 1)).astype(int), 0, n - 2)
        return slopes[idx]

    return ConductivityProfile(
        f"pwl[{n}]", fa, fda, lambda x: np.zeros_like(x), values=vals
    )


def sampled_profile(values: Sequence[float]) -> ConductivityProfile:
    """Smooth profile through samples on a uniform grid spanning [0, 1].

    Natural cubic spline supplies a, a', a''.
    """
    vals = _check_samples(values, 5)
    grid = np.linspace(0.0, 1.0, vals.size)
    spline = CubicSpline(grid, vals, bc_type="natural")
    return ConductivityProfile(
        f"sampled[{vals.size}]",
        spline,
        spline.derivative(1),
        spline.derivative(2),
        values=vals,
    )


def make_profile(spec) -> ConductivityProfile:
    """Build a profile from a spec string, a sample sequence, or a CSV path.

    String forms: ``const:c``, ``affine:a0,a1`` (endpoint values),
    ``sin:base,amp,freq``, ``pwl:v0,v1,...``, or a path to a ``x,a`` CSV.
    """
    if isinstance(spec, ConductivityProfile):
        return spec
    if isinstance(spec, (list, tuple, np.ndarray)):
        return sampled_profile(spec)
    if not isinstance(spec, str):
        raise ValueError(f"unrecognized profile spec {spec!r}")
    text = spec.strip()
    if text.lower().endswith(".csv") or "/" in text:
        return profile_from_csv(text)
    name, _, argstr = text.partition(":")
    name = name.strip().lower()
    try:
        args = [float(tok) for tok in argstr.split(",")] if argstr.strip() else []
    except ValueError:
        raise ValueError(f"bad numeric parameters in profile spec {spec!r}")
    if name in ("const", "constant"):
        if len(args) != 1:
            raise ValueError("const profile takes one parameter: const:c")
        return constant_profile(args[0])
    if name == "affine":
        if len(args) != 2:
            raise ValueError("affine profile takes two endpoint values: affine:a0,a1")
        return affine_profile(args[0], args[1])
    if name in ("sin", "sinusoidal"):
        if len(args) != 3:
            raise ValueError("sin profile takes three parameters: sin:base,amp,freq")
        return sin_profile(args[0], args[1], args[2])
    if name in ("pwl", "piecewise"):
        return pwl_profile(args)
    raise ValueError(f"unknown profile form {name!r}")


def reflect(a: ConductivityProfile) -> ConductivityProfile:
    """Mirror profile x -> a(1-x), with sign-adjusted derivatives."""
    kind = a.kind[8:-1] if a.kind.startswith("reflect(") else f"reflect({a.kind})"
    fa, fda, fd2a = a._fa, a._fda, a._fd2a
    return ConductivityProfile(
        kind,
        lambda x: fa(1.0 - x),
        lambda x: -fda(1.0 - x),
        lambda x: fd2a(1.0 - x),
    )


def profile_difference(a1: ConductivityProfile, a2: ConductivityProfile) -> Callable:
    """Signed difference a1 - a2 as a plain function (no positivity demand)."""
    return lambda x: a1(x) - a2(x)


def thermal_resistance(a: ConductivityProfile) -> float:
    """Integral of 1/a over [0, 1] by adaptive quadrature (abs err <= 1e-10)."""
    val, _ = quad(lambda s: 1.0 / a(s), 0.0, 1.0, epsabs=1e-12, epsrel=1e-12, limit=200)
    return val


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Uniform grid: nx space nodes on [0, 1], nt steps up to T_final."""

    nx: int
    nt: int
    T_final: float

    def __post_init__(self):
        if self.nx < 3:
            raise ValueError(f"nx must be >= 3, got {self.nx}")
        if self.nt < 1:
            raise ValueError(f"nt must be >= 1, got {self.nt}")
        if not self.T_final > 0:
            raise ValueError(f"T_final must be positive, got {self.T_final}")

    @property
    def dx(self) -> float:
        return 1.0 / (self.nx - 1)

    @property
    def dt(self) -> float:
        return self.T_final / self.nt

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.nx)

    @property
    def t(self) -> np.ndarray:
        return self.dt * np.arange(self.nt + 1)


@dataclass(frozen=True)
class TimeSeries:
    """Sampled time signal with t[0] = 0 and non-decreasing times."""

    t: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if t.shape != y.shape or t.ndim != 1:
            raise ValueError("t and y must be 1D arrays of equal length")
        if t.size == 0:
            raise ValueError("empty series")
        if abs(t[0]) > 1e-12:
            raise ValueError(f"series must start at t=0, got t[0]={t[0]}")
        if np.any(np.diff(t) < 0):
            raise ValueError("sample times must be non-decreasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "y", y)

    def to_csv(self, path) -> None:
        write_csv(path, ("t", "value"), (self.t, self.y))

    @classmethod
    def from_csv(cls, path) -> "TimeSeries":
        t, y = read_csv(path, ("t", "value"))
        return cls(t, y)


def write_csv(path, header: Sequence[str], columns) -> None:
    """Write columns with repr-exact floats so reruns are byte-identical.

    Integer-typed columns (indices) are written as plain integers.
    """
    cols = [np.asarray(c) for c in columns]

    def fmt(v):
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        return repr(float(v))

    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*cols):
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_csv(path, expected_header: Sequence[str]):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if [h.strip() for h in header] != list(expected_header):
            raise ValueError(
                f"{path}: expected header {','.join(expected_header)!r}, got {','.join(header)!r}"
            )
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return tuple(data[:, j] for j in range(len(expected_header)))


def profile_to_csv(a: ConductivityProfile, path, nx: int = 257) -> None:
    xs = np.linspace(0.0, 1.0, nx)
    write_csv(path, ("x", "a"), (xs, a(xs)))


def profile_from_csv(path) -> ConductivityProfile:
    xs, vals = read_csv(path, ("x", "a"))
    if xs.size < 5:
        raise ValueError(f"{path}: need at least 5 samples")
    expected = np.linspace(0.0, 1.0, xs.size)
    if abs(xs[0]) > 1e-12 or abs(xs[-1] - 1.0) > 1e-12 or np.max(np.abs(xs - expected)) > 1e-9:
        raise ValueError(f"{path}: x column must be uniform from 0 to 1 inclusive")
    return sampled_profile(vals)
