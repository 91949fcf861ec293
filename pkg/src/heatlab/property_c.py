"""Numerical probe of the completeness of products of seeded-solution slopes.

The probe is a least-squares surrogate: on a shared grid, measure how far a
target function sits from the span of the first N dictionary columns, for
every prefix N. True completeness is an L1-density statement over all
positive rates; the discrete L2 residual decay on a fixed grid is the
implementable stand-in, and the gap between the two is acknowledged here
rather than hidden.

Columns are normalized to unit max-norm before use: raw slope products grow
like exp(2 sqrt(lam)), and normalization is scale-covariant (it cannot change
the span).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from ._parallel import parallel_map
from .core import ConductivityProfile
from .sl_solver import TRAJECTORY_POINTS, solve_dirichlet_seed

DROP_TOL = 1e-12  # column dropped when orthogonalization leaves less than this fraction


@dataclass(frozen=True)
class ProductDictionary:
    """Columns v1'(x, lam_k) * v2'(x, lam_k) on a shared grid, unit max-norm."""

    lambdas: np.ndarray
    x: np.ndarray
    columns: np.ndarray  # shape (len(x), len(lambdas))

    def __post_init__(self):
        if not np.all(np.isfinite(self.columns)):
            raise ValueError("non-finite dictionary column")
        if self.columns.shape != (self.x.size, self.lambdas.size):
            raise ValueError("column block shape mismatch")


@dataclass(frozen=True)
class CompletenessResult:
    """Prefix residual curve r_N plus the indices of dropped columns."""

    residuals: np.ndarray      # r_N for N = 1..len(lambdas)
    dropped: tuple[int, ...]   # 0-based column indices rejected as near-collinear


def build_product_dictionary(a1: ConductivityProfile, a2: ConductivityProfile,
                             lambdas) -> ProductDictionary:
    lam = np.asarray(lambdas, dtype=float)
    if np.any(lam <= 0.0):
        raise ValueError("dictionary rates must be positive")
    if np.unique(lam).size != lam.size:
        raise ValueError("dictionary rates must be distinct")

    def column(lm: float) -> np.ndarray:
        d1 = solve_dirichlet_seed(a1, lm).second
        d2 = solve_dirichlet_seed(a2, lm).second
        col = d1 * d2
        return col / np.max(np.abs(col))

    cols = parallel_map(column, lam)
    x = np.linspace(0.0, 1.0, TRAJECTORY_POINTS)
    return ProductDictionary(lambdas=lam, x=x, columns=np.column_stack(cols))


def completeness_residual(dictionary: ProductDictionary, target,
                          drop_tol: float = DROP_TOL) -> CompletenessResult:
    """Distance from the target to the span of the first N columns, for each N.

    The norm is the trapezoid-weighted L2 norm on the shared grid, so the
    curve is comparable across grid resolutions. Orthogonalization processes
    columns in the given order (twice-iterated Gram-Schmidt); a column whose
    orthogonal part falls below drop_tol of its weighted norm is dropped and
    reported, which keeps the residual sequence exactly non-increasing.
    """
    x = dictionary.x
    y = np.asarray(target(x) if callable(target) else target, dtype=float)
    if y.shape != x.shape:
        raise ValueError("target must be sampled on the dictionary grid")

    w = np.full(x.size, x[1] - x[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    sqw = np.sqrt(w)

    A = dictionary.columns * sqw[:, None]
    resid_vec = y * sqw
    basis: list[np.ndarray] = []
    dropped: list[int] = []
    residuals = np.empty(dictionary.lambdas.size)

    for jcol in range(A.shape[1]):
        col = A[:, jcol].copy()
        norm0 = np.linalg.norm(col)
        for _ in range(2):  # CGS2 reorthogonalization
            for qvec in basis:
                col -= qvec * (qvec @ col)
        norm1 = np.linalg.norm(col)
        if norm1 <= drop_tol * norm0:
            dropped.append(jcol)
        else:
            qvec = col / norm1
            basis.append(qvec)
            resid_vec = resid_vec - qvec * (qvec @ resid_vec)
        residuals[jcol] = np.linalg.norm(resid_vec)
    return CompletenessResult(residuals=residuals, dropped=tuple(dropped))


def orthogonality_functional(p, a1: ConductivityProfile, a2: ConductivityProfile,
                             lam: float) -> float:
    """J(lam) = integral of p(x) v2'(x) psi'(x) over [0,1].

    psi is the Dirichlet seed for a1 and v2 the one for a2 (any solution
    vanishing at 0 is a multiple of the seed, so the seed loses nothing).
    When the two profiles generate identical boundary data, J vanishes for
    every positive rate; that orthogonality against a complete product family
    is what forces the profiles to coincide.
    """
    psi = solve_dirichlet_seed(a1, lam)
    v2 = solve_dirichlet_seed(a2, lam)
    px = np.asarray(p(psi.x) if callable(p) else p, dtype=float)
    return float(simpson(px * v2.second * psi.second, x=psi.x))
