"""CAPM expected returns and Black-Scholes prices as functions of the risk-free rate.

Both models are exposed with their rate sensitivities so the effect of
switching between two composite rates (e.g. normal vs crisis) is a signed,
reportable quantity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .errors import InvalidOption

__all__ = [
    "OptionKind",
    "CapmInput",
    "OptionSpec",
    "RateShiftReport",
    "norm_cdf",
    "capm_expected_return",
    "capm_rate_sensitivity",
    "bs_price",
    "bs_rho",
    "rate_shift_report",
]

_SQRT2 = math.sqrt(2.0)


class OptionKind(Enum):
    CALL = "call"
    PUT = "put"


@dataclass(frozen=True)
class CapmInput:
    r0: float
    beta: float
    market_return: float

    def __post_init__(self):
        for name in ("r0", "beta", "market_return"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class OptionSpec:
    """European option terms; volatility is per sqrt-year, expiry in years."""

    spot: float
    strike: float
    volatility: float
    rate: float
    time_to_expiry: float
    kind: OptionKind

    def __post_init__(self):
        if not (math.isfinite(self.spot) and self.spot > 0.0):
            raise InvalidOption(f"spot must be > 0, got {self.spot!r}")
        if not (math.isfinite(self.strike) and self.strike > 0.0):
            raise InvalidOption(f"strike must be > 0, got {self.strike!r}")
        if not (math.isfinite(self.volatility) and self.volatility >= 0.0):
            raise InvalidOption(f"volatility must be >= 0, got {self.volatility!r}")
        if not math.isfinite(self.rate):
            raise InvalidOption(f"rate must be finite, got {self.rate!r}")
        if not (math.isfinite(self.time_to_expiry) and self.time_to_expiry >= 0.0):
            raise InvalidOption(f"time_to_expiry must be >= 0, got {self.time_to_expiry!r}")
        if not isinstance(self.kind, OptionKind):
            raise InvalidOption(f"kind must be an OptionKind, got {self.kind!r}")


def norm_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / _SQRT2)


def capm_expected_return(inp: CapmInput) -> float:
    """E[r] = r0 + beta * (market_return - r0)."""
    return inp.r0 + inp.beta * (inp.market_return - inp.r0)


def capm_rate_sensitivity(beta: float) -> float:
    """d E[r] / d r0 = 1 - beta.

    Positive for beta < 1 (lowering r0 lowers the CAPM return), negative
    for beta > 1 (lowering r0 raises it).
    """
    if not math.isfinite(beta):
        raise ValueError(f"beta must be finite, got {beta!r}")
    return 1.0 - beta


def _d1_d2(option: OptionSpec) -> tuple[float, float]:
    s, k = option.spot, option.strike
    sig, r, t = option.volatility, option.rate, option.time_to_expiry
    sig_sqrt_t = sig * math.sqrt(t)
    d1 = (math.log(s / k) + (r + 0.5 * sig * sig) * t) / sig_sqrt_t
    return d1, d1 - sig_sqrt_t


def bs_price(option: OptionSpec) -> float:
    """Black-Scholes price; puts via parity, so parity holds to rounding.

    T == 0 or volatility == 0 collapse to (discounted) intrinsic value so
    scenario sweeps never fail at the boundary.
    """
    s, k = option.spot, option.strike
    r, t = option.rate, option.time_to_expiry
    discounted_strike = k * math.exp(-r * t)
    if t == 0.0 or option.volatility == 0.0:
        call = max(s - discounted_strike, 0.0)
    else:
        d1, d2 = _d1_d2(option)
        call = s * norm_cdf(d1) - discounted_strike * norm_cdf(d2)
    if option.kind is OptionKind.CALL:
        return call
    return call - s + discounted_strike


def bs_rho(option: OptionSpec) -> float:
    """Sensitivity of the option price to the rate, per unit of rate.

    call rho = K*T*exp(-rT)*N(d2) >= 0, put rho = -K*T*exp(-rT)*N(-d2) <= 0.
    Requires T > 0 and volatility > 0.
    """
    if option.time_to_expiry <= 0.0:
        raise InvalidOption("rho needs time_to_expiry > 0")
    if option.volatility <= 0.0:
        raise InvalidOption("rho needs volatility > 0")
    k, r, t = option.strike, option.rate, option.time_to_expiry
    _, d2 = _d1_d2(option)
    if option.kind is OptionKind.CALL:
        return k * t * math.exp(-r * t) * norm_cdf(d2)
    return -k * t * math.exp(-r * t) * norm_cdf(-d2)


def _direction(delta: float) -> str:
    if delta > 0.0:
        return "up"
    if delta < 0.0:
        return "down"
    return "flat"


@dataclass(frozen=True)
class RateShiftReport:
    """Signed effect of moving the risk-free rate on CAPM and option values."""

    r0_old: float
    r0_new: float
    capm_old: float
    capm_new: float
    capm_delta: float
    capm_direction: str
    capm_sensitivity: float
    price_old: float
    price_new: float
    price_delta: float
    price_direction: str
    rho_old: Optional[float] = None
    rho_new: Optional[float] = None


def rate_shift_report(option: OptionSpec, capm: CapmInput,
                      r0_old: float, r0_new: float) -> RateShiftReport:
    """Re-evaluate both models at two rates and report signed deltas.

    The rate fields of `option` and `capm` are overridden by r0_old/r0_new.
    """
    for name, v in (("r0_old", r0_old), ("r0_new", r0_new)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")
    capm_old = capm_expected_return(replace(capm, r0=r0_old))
    capm_new = capm_expected_return(replace(capm, r0=r0_new))
    price_old = bs_price(replace(option, rate=r0_old))
    price_new = bs_price(replace(option, rate=r0_new))
    rho_old = rho_new = None
    if option.time_to_expiry > 0.0 and option.volatility > 0.0:
        rho_old = bs_rho(replace(option, rate=r0_old))
        rho_new = bs_rho(replace(option, rate=r0_new))
    return RateShiftReport(
        r0_old=r0_old,
        r0_new=r0_new,
        capm_old=capm_old,
        capm_new=capm_new,
        capm_delta=capm_new - capm_old,
        capm_direction=_direction(capm_new - capm_old),
        capm_sensitivity=capm_rate_sensitivity(capm.beta),
        price_old=price_old,
        price_new=price_new,
        price_delta=price_new - price_old,
        price_direction=_direction(price_new - price_old),
        rho_old=rho_old,
        rho_new=rho_new,
    )
