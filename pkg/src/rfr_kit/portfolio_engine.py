"""Mean-variance machinery: frontier, GMV/tangency portfolios, CAL slope.

Short sales are unconstrained, so the closed-form frontier applies.  The
scalars A = 1'S^-1 mu, B = mu'S^-1 mu, C = 1'S^-1 1 are precomputed at model
construction; the tangency construction degenerates exactly at r0 = A/C and
lands on the lower frontier branch for r0 above it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DegenerateTangency, InvalidModel, SingularCovariance

__all__ = [
    "FrontierModel",
    "PortfolioPoint",
    "FrontierRegime",
    "TangencyRegime",
    "gmv_portfolio",
    "tangency_portfolio",
    "cal_slope",
    "classify_tangency_regime",
    "frontier_points",
]

_SYMMETRY_TOL = 1e-10
_PIVOT_FLOOR = 1e-12
_DEGENERACY_TOL = 1e-10


class FrontierRegime(Enum):
    EFFICIENT = "efficient"
    DEGENERATE = "degenerate"
    INVERTED = "inverted"


@dataclass(frozen=True)
class PortfolioPoint:
    """A fully-invested portfolio with its return and risk."""

    weights: tuple[float, ...]
    expected_return: float
    stdev: float


@dataclass(frozen=True)
class TangencyRegime:
    """Where r0 sits relative to the GMV return, and what that does to the tangent."""

    label: FrontierRegime
    r0: float
    gmv_return: float


@dataclass(frozen=True)
class FrontierModel:
    """Expected returns and covariance for the risky universe, with cached scalars.

    Rejects asymmetric or non-positive-definite covariance matrices
    (Cholesky pivots at or below 1e-12 fail) instead of regularizing them.
    """

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).reshape(-1).copy()
        sigma = np.asarray(self.sigma, dtype=float).copy()
        n = mu.size
        if n < 2:
            raise InvalidModel(f"need at least 2 assets, got {n}")
        if not np.all(np.isfinite(mu)):
            raise InvalidModel("expected returns must be finite")
        if sigma.shape != (n, n):
            raise InvalidModel(f"covariance must be {n}x{n}, got {sigma.shape}")
        if not np.all(np.isfinite(sigma)):
            raise InvalidModel("covariance entries must be finite")
        if np.max(np.abs(sigma - sigma.T)) > _SYMMETRY_TOL:
            raise InvalidModel("covariance must be symmetric within 1e-10")
        try:
            chol = np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError as exc:
            raise SingularCovariance(f"covariance is not positive definite: {exc}") from None
        pivots = np.diag(chol) ** 2
        if np.min(pivots) <= _PIVOT_FLOOR:
            raise SingularCovariance(
                f"covariance pivot {np.min(pivots):.3e} at or below floor {_PIVOT_FLOOR}"
            )
        ones = np.ones(n)
        inv_one = _chol_solve(chol, ones)
        inv_mu = _chol_solve(chol, mu)
        a = float(ones @ inv_mu)
        b = float(mu @ inv_mu)
        c = float(ones @ inv_one)
        d = b * c - a * a
        if c <= 0.0:
            raise SingularCovariance(f"C = {c} must be positive")
        mu_spread = float(np.max(mu) - np.min(mu))
        if mu_spread > 0.0 and d <= 0.0:
            raise InvalidModel("B*C - A^2 must be positive when expected returns differ")
        mu.flags.writeable = False
        sigma.flags.writeable = False
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "_chol", chol)
        object.__setattr__(self, "_inv_one", inv_one)
        object.__setattr__(self, "_inv_mu", inv_mu)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @property
    def n_assets(self) -> int:
        return self.mu.size

    @property
    def gmv_return(self) -> float:
        return self.a / self.c


def _chol_solve(chol: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve sigma @ x = rhs given the lower Cholesky factor of sigma."""
    y = np.linalg.solve(chol, rhs)
    return np.linalg.solve(chol.T, y)


def _point(model: FrontierModel, weights: np.ndarray) -> PortfolioPoint:
    ret = float(weights @ model.mu)
    var = float(weights @ model.sigma @ weights)
    return PortfolioPoint(tuple(weights), ret, math.sqrt(max(var, 0.0)))


def gmv_portfolio(model: FrontierModel) -> PortfolioPoint:
    """Global minimum-variance portfolio: weights S^-1 1 / C, return A/C."""
    return _point(model, model._inv_one / model.c)


def tangency_portfolio(model: FrontierModel, r0: float) -> PortfolioPoint:
    """Max-Sharpe fully-invested portfolio for excess returns over r0.

    weights = S^-1 (mu - r0*1) / (1'S^-1 (mu - r0*1)).  Raises
    DegenerateTangency when the normalizer is within 1e-10 of zero, which
    happens exactly at r0 = A/C.
    """
    if not math.isfinite(r0):
        raise ValueError(f"r0 must be finite, got {r0!r}")
    normalizer = model.a - model.c * r0
    if abs(normalizer) <= _DEGENERACY_TOL:
        raise DegenerateTangency(
            f"r0 = {r0} is within {_DEGENERACY_TOL} of the GMV return {model.gmv_return}"
        )
    weights = (model._inv_mu - r0 * model._inv_one) / normalizer
    return _point(model, weights)


def cal_slope(model: FrontierModel, r0: float) -> float:
    """Slope of the capital allocation line: (tangency return - r0) / tangency stdev.

    Equals sqrt(B - 2*A*r0 + C*r0^2) with the sign of A - C*r0, so it is
    negative in the inverted regime.
    """
    point = tangency_portfolio(model, r0)
    return (point.expected_return - r0) / point.stdev


def classify_tangency_regime(model: FrontierModel, r0: float,
                             tol: float = 1e-9) -> TangencyRegime:
    """Efficient below the GMV return, Degenerate at it, Inverted above it."""
    if not math.isfinite(r0):
        raise ValueError(f"r0 must be finite, got {r0!r}")
    gmv_return = model.gmv_return
    if r0 < gmv_return - tol:
        label = FrontierRegime.EFFICIENT
    elif r0 > gmv_return + tol:
        label = FrontierRegime.INVERTED
    else:
        label = FrontierRegime.DEGENERATE
    return TangencyRegime(label=label, r0=r0, gmv_return=gmv_return)


def frontier_points(model: FrontierModel, n_points: int,
                    return_range: Sequence[float]) -> list[PortfolioPoint]:
    """Minimum-variance portfolios for a linspace of target returns.

    Uses the two-fund closed form w(m) = g + h*m; points come back in
    ascending target-return order.
    """
    lo, hi = float(return_range[0]), float(return_range[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise ValueError(f"return_range must satisfy lo < hi, got ({lo}, {hi})")
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points}")
    if model.d <= 0.0:
        raise InvalidModel("frontier is degenerate: all expected returns equal")
    g = (model.b * model._inv_one - model.a * model._inv_mu) / model.d
    h = (model.c * model._inv_mu - model.a * model._inv_one) / model.d
    return [_point(model, g + h * m) for m in np.linspace(lo, hi, n_points)]
