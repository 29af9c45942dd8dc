"""Annualized rate estimators for the six composite-rate sources.

Conventions: rates are annualized decimals, bond discounting uses annual
compounding with times in ACT/365 years, money-market annualization is
simple (period return scaled by day basis over term).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .errors import (
    InvalidBond,
    InvalidLeg,
    InvalidQuote,
    LengthMismatch,
    NoConvergence,
    ZeroMarketVariance,
)

__all__ = [
    "BondSpec",
    "MoneyMarketQuote",
    "ReturnSeries",
    "ArbitrageLeg",
    "ArbitrageOutcome",
    "ScreenHit",
    "ScreenSkipWarning",
    "bond_price",
    "bond_ytm",
    "annualize_money_market",
    "constructor_rate",
    "estimate_beta",
    "zero_beta_screen",
    "arbitrage_return",
]

YTM_BRACKET = (-0.99, 10.0)
YTM_PRICE_TOL = 1e-8
YTM_MAX_ITER = 200
_PRICE_SANITY_FACTOR = 1.0e3


@dataclass(frozen=True)
class BondSpec:
    """A bond as dated cashflows (time in years, amount) plus a market price."""

    cashflows: tuple[tuple[float, float], ...]
    price: float

    def __post_init__(self):
        flows = tuple((float(t), float(a)) for t, a in self.cashflows)
        object.__setattr__(self, "cashflows", flows)
        if not flows:
            raise InvalidBond("bond needs at least one cashflow")
        prev = 0.0
        for t, a in flows:
            if not (math.isfinite(t) and math.isfinite(a)):
                raise InvalidBond("cashflow times and amounts must be finite")
            if t <= prev:
                raise InvalidBond("cashflow times must be strictly increasing and > 0")
            if a <= 0.0:
                raise InvalidBond(f"cashflow amount must be > 0, got {a}")
            prev = t
        if not math.isfinite(self.price) or self.price <= 0.0:
            raise InvalidBond(f"price must be finite and > 0, got {self.price}")
        total = sum(a for _, a in flows)
        if self.price >= total * _PRICE_SANITY_FACTOR:
            raise InvalidBond(
                f"price {self.price} fails sanity bound {total * _PRICE_SANITY_FACTOR}"
            )


@dataclass(frozen=True)
class MoneyMarketQuote:
    """A short-term deposit/loan quote: return over term_days on a 360 or 365 basis."""

    period_return: float
    term_days: int
    day_basis: int = 365

    def __post_init__(self):
        if not math.isfinite(self.period_return):
            raise InvalidQuote(f"period_return must be finite, got {self.period_return!r}")
        if not isinstance(self.term_days, int) or self.term_days < 1:
            raise InvalidQuote(f"term_days must be an integer >= 1, got {self.term_days!r}")
        if self.day_basis not in (360, 365):
            raise InvalidQuote(f"day_basis must be 360 or 365, got {self.day_basis!r}")


@dataclass(frozen=True)
class ReturnSeries:
    """Per-period decimal returns for one asset."""

    asset_id: str
    returns: tuple[float, ...]

    def __post_init__(self):
        r = tuple(float(x) for x in self.returns)
        object.__setattr__(self, "returns", r)
        for x in r:
            if not math.isfinite(x):
                raise ValueError(f"{self.asset_id}: returns must be finite, got {x!r}")

    def __len__(self) -> int:
        return len(self.returns)


@dataclass(frozen=True)
class ArbitrageLeg:
    """One cross-venue round trip: buy low, sell high, pay costs."""

    buy_price: float
    sell_price: float
    costs: float = 0.0
    holding_days: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.buy_price) and self.buy_price > 0.0):
            raise InvalidLeg(f"buy_price must be finite and > 0, got {self.buy_price!r}")
        if not (math.isfinite(self.sell_price) and self.sell_price > 0.0):
            raise InvalidLeg(f"sell_price must be finite and > 0, got {self.sell_price!r}")
        if not (math.isfinite(self.costs) and self.costs >= 0.0):
            raise InvalidLeg(f"costs must be finite and >= 0, got {self.costs!r}")
        if not isinstance(self.holding_days, int) or self.holding_days < 0:
            raise InvalidLeg(f"holding_days must be an integer >= 0, got {self.holding_days!r}")


class ArbitrageOutcome(NamedTuple):
    """Gross return on the deal; annualized is None when holding_days == 0."""

    gross: float
    annualized: Optional[float]


class ScreenHit(NamedTuple):
    asset_id: str
    beta: float
    mean_return: float


class ScreenSkipWarning(UserWarning):
    """An asset was skipped by zero_beta_screen instead of failing the scan."""


def bond_price(bond: BondSpec, yield_: float) -> float:
    """Present value of the bond's cashflows at an annually compounded yield."""
    return sum(a * (1.0 + yield_) ** (-t) for t, a in bond.cashflows)


def bond_ytm(bond: BondSpec) -> float:
    """Yield to maturity: the y with discounted cashflows equal to the price.

    Solved by bisection on (-0.99, 10.0) with Newton steps once the bracket
    is tame; converges when the repriced value is within 1e-8 of the input
    price.  Raises NoConvergence if no root lies in the bracket.
    """
    lo, hi = YTM_BRACKET
    target = bond.price

    def f(y: float) -> float:
        return bond_price(bond, y) - target

    f_lo, f_hi = f(lo), f(hi)
    if abs(f_lo) <= YTM_PRICE_TOL:
        return lo
    if abs(f_hi) <= YTM_PRICE_TOL:
        return hi
    # price(y) decreases in y, so a root needs f(lo) > 0 > f(hi)
    if f_lo < 0.0 or f_hi > 0.0:
        raise NoConvergence(
            f"no yield in ({lo}, {hi}) reprices to {target}"
        )

    y = 0.5 * (lo + hi)
    for _ in range(YTM_MAX_ITER):
        fy = f(y)
        if abs(fy) <= YTM_PRICE_TOL:
            # polish once so a par bond recovers its coupon to ~1e-12, not
            # just to the price tolerance; keep the step only if it helps
            deriv = sum(-t * a * (1.0 + y) ** (-t - 1.0) for t, a in bond.cashflows)
            if deriv != 0.0:
                polished = y - fy / deriv
                if lo <= polished <= hi and abs(f(polished)) <= abs(fy):
                    return polished
            return y
        if fy > 0.0:
            lo = y
        else:
            hi = y
        deriv = sum(-t * a * (1.0 + y) ** (-t - 1.0) for t, a in bond.cashflows)
        if deriv != 0.0:
            y_newton = y - fy / deriv
            if lo < y_newton < hi:
                y = y_newton
                continue
        y = 0.5 * (lo + hi)
    raise NoConvergence(f"YTM search did not converge in {YTM_MAX_ITER} iterations")


def annualize_money_market(quote: MoneyMarketQuote) -> float:
    """Simple annualization: period return scaled by day basis over term."""
    return quote.period_return * quote.day_basis / quote.term_days


def constructor_rate(base: float, premiums: Sequence[float]) -> float:
    """Expert-built rate: base yield plus the sum of risk premiums."""
    if not math.isfinite(base):
        raise ValueError(f"base must be finite, got {base!r}")
    total = float(base)
    for p in premiums:
        if not math.isfinite(p):
            raise ValueError(f"premiums must be finite, got {p!r}")
        total += p
    return total


def estimate_beta(asset: ReturnSeries, market: ReturnSeries) -> float:
    """Beta = sample covariance(asset, market) / sample variance(market)."""
    n = len(asset)
    if n != len(market):
        raise LengthMismatch(
            f"series lengths differ: {asset.asset_id} has {n}, {market.asset_id} has {len(market)}"
        )
    if n < 2:
        raise ZeroMarketVariance("need at least 2 observations to estimate beta")
    mean_a = sum(asset.returns) / n
    mean_m = sum(market.returns) / n
    cov = 0.0
    var = 0.0
    for ra, rm in zip(asset.returns, market.returns):
        da = ra - mean_a
        dm = rm - mean_m
        cov += da * dm
        var += dm * dm
    cov /= n - 1
    var /= n - 1
    if var <= 0.0:
        raise ZeroMarketVariance("market return variance is zero")
    return cov / var


def zero_beta_screen(universe: Sequence[ReturnSeries], market: ReturnSeries,
                     epsilon: float, *, periods_per_year: float) -> list[ScreenHit]:
    """Assets whose |beta| is within epsilon of zero, with annualized mean returns.

    mean_return is the arithmetic mean per-period return scaled by
    periods_per_year.  Assets whose beta cannot be estimated are skipped
    with a ScreenSkipWarning rather than failing the scan.  Results are
    sorted by |beta| ascending, ties broken by asset_id.
    """
    if not (math.isfinite(epsilon) and epsilon > 0.0):
        raise ValueError(f"epsilon must be > 0, got {epsilon!r}")
    if not (math.isfinite(periods_per_year) and periods_per_year > 0.0):
        raise ValueError(f"periods_per_year must be > 0, got {periods_per_year!r}")
    hits: list[ScreenHit] = []
    for asset in universe:
        try:
            beta = estimate_beta(asset, market)
        except (LengthMismatch, ZeroMarketVariance) as exc:
            warnings.warn(f"skipping {asset.asset_id}: {exc}", ScreenSkipWarning,
                          stacklevel=2)
            continue
        if abs(beta) <= epsilon:
            mean_return = sum(asset.returns) / len(asset) * periods_per_year
            hits.append(ScreenHit(asset.asset_id, beta, mean_return))
    hits.sort(key=lambda h: (abs(h.beta), h.asset_id))
    return hits


def arbitrage_return(leg: ArbitrageLeg) -> ArbitrageOutcome:
    """Gross return on buy-side capital, compounded to a year when dated.

    gross = (sell - buy - costs) / buy.  With holding_days > 0 the gross is
    compounded to an annual rate, (1 + gross)^(365/holding_days) - 1; with
    holding_days == 0 the deal is not annualizable and annualized is None.
    """
    gross = (leg.sell_price - leg.buy_price - leg.costs) / leg.buy_price
    if leg.holding_days == 0:
        return ArbitrageOutcome(gross, None)
    if gross <= -1.0:
        # total (or worse) loss cannot be compounded; floor at -100%/yr
        return ArbitrageOutcome(gross, -1.0)
    annualized = (1.0 + gross) ** (365.0 / leg.holding_days) - 1.0
    return ArbitrageOutcome(gross, annualized)
