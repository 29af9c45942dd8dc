"""Composite risk-free rate: six income sources blended by trading weights.

The composite rate r0 is the weighted average of six source rates
(government bonds, bank deposits, interbank loans, an expert-constructed
rate, zero-beta shares, arbitrage deals), with weights proportional to the
share of funds a trader deploys in each segment.  Normal/crisis presets
translate ordinal significance levels per source into normalized weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

from .errors import (
    AllZeroWeights,
    DuplicateSource,
    EmptyInput,
    InvalidCategoryMap,
    MissingSource,
    NegativeWeight,
)

__all__ = [
    "SourceKind",
    "SourceEstimate",
    "WeightVector",
    "Regime",
    "SignificanceLevel",
    "RateComposition",
    "SurveySpread",
    "DEFAULT_CATEGORY_MAP",
    "NORMAL_SIGNIFICANCE",
    "CRISIS_SIGNIFICANCE",
    "normalize_weights",
    "compose",
    "regime_preset",
    "survey_spread",
]

N_SOURCES = 6


class SourceKind(Enum):
    """The six income sources, in canonical weight order."""

    GOVERNMENT_BONDS = "government_bonds"
    BANK_DEPOSITS = "bank_deposits"
    INTERBANK_LOANS = "interbank_loans"
    CONSTRUCTOR = "constructor"
    ZERO_BETA_SHARES = "zero_beta_shares"
    ARBITRAGE = "arbitrage"

    @property
    def index(self) -> int:
        return _KIND_INDEX[self]


_KIND_ORDER: tuple[SourceKind, ...] = tuple(SourceKind)
_KIND_INDEX: dict[SourceKind, int] = {k: i for i, k in enumerate(_KIND_ORDER)}


class Regime(Enum):
    NORMAL = "normal"
    CRISIS = "crisis"


class SignificanceLevel(Enum):
    """Ordinal significance of a source; HIGH outranks AVERAGE outranks LOW outranks MINIMUM."""

    HIGH = 4
    AVERAGE = 3
    LOW = 2
    MINIMUM = 1

    def __lt__(self, other: "SignificanceLevel") -> bool:
        if not isinstance(other, SignificanceLevel):
            return NotImplemented
        return self.value < other.value


# Significance of each source per regime, in SourceKind order.
NORMAL_SIGNIFICANCE: tuple[SignificanceLevel, ...] = (
    SignificanceLevel.HIGH,     # government bonds
    SignificanceLevel.AVERAGE,  # bank deposits
    SignificanceLevel.LOW,      # interbank loans
    SignificanceLevel.AVERAGE,  # constructor
    SignificanceLevel.MINIMUM,  # zero-beta shares
    SignificanceLevel.MINIMUM,  # arbitrage
)
CRISIS_SIGNIFICANCE: tuple[SignificanceLevel, ...] = (
    SignificanceLevel.LOW,      # government bonds
    SignificanceLevel.LOW,      # bank deposits
    SignificanceLevel.MINIMUM,  # interbank loans
    SignificanceLevel.MINIMUM,  # constructor
    SignificanceLevel.MINIMUM,  # zero-beta shares
    SignificanceLevel.HIGH,     # arbitrage
)

# Shipped numeric values for the four significance levels.  Callers can
# override with any map whose values are non-negative and non-increasing
# from HIGH down to MINIMUM.
DEFAULT_CATEGORY_MAP: Mapping[SignificanceLevel, float] = {
    SignificanceLevel.HIGH: 0.40,
    SignificanceLevel.AVERAGE: 0.20,
    SignificanceLevel.LOW: 0.10,
    SignificanceLevel.MINIMUM: 0.05,
}

_WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class SourceEstimate:
    """Annualized decimal rate for one source, with a provenance label."""

    kind: SourceKind
    rate: float
    provenance: str = ""

    def __post_init__(self):
        if not isinstance(self.kind, SourceKind):
            raise ValueError(f"kind must be a SourceKind, got {self.kind!r}")
        if not math.isfinite(self.rate):
            raise ValueError(f"rate must be finite, got {self.rate!r}")
        if self.rate <= -1.0:
            raise ValueError(f"rate must exceed -1.0, got {self.rate}")


@dataclass(frozen=True)
class WeightVector:
    """Six non-negative weights in SourceKind order, summing to 1."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) != N_SOURCES:
            raise ValueError(f"expected {N_SOURCES} weights, got {len(w)}")
        for x in w:
            if not math.isfinite(x):
                raise ValueError(f"weights must be finite, got {x!r}")
            if x < 0.0:
                raise NegativeWeight(f"weight {x} is negative")
        if abs(sum(w) - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {sum(w)}, expected 1 within {_WEIGHT_SUM_TOL}")

    def __getitem__(self, kind: SourceKind) -> float:
        return self.weights[_KIND_INDEX[kind]]

    def as_dict(self) -> dict[SourceKind, float]:
        return {k: self.weights[i] for i, k in enumerate(_KIND_ORDER)}


@dataclass(frozen=True)
class RateComposition:
    """A composed r0 together with its full weight/rate breakdown."""

    r0: float
    weights: WeightVector
    rates: tuple[SourceEstimate, ...]
    regime: Optional[Regime] = None

    def rate_of(self, kind: SourceKind) -> float:
        return self.rates[_KIND_INDEX[kind]].rate


class SurveySpread(NamedTuple):
    minimum: float
    maximum: float
    spread: float


def normalize_weights(raw: Sequence[float]) -> WeightVector:
    """Scale six non-negative entries so they sum to 1.

    Raises NegativeWeight if any entry is negative and AllZeroWeights if
    every entry is zero.
    """
    values = [float(x) for x in raw]
    if len(values) != N_SOURCES:
        raise ValueError(f"expected {N_SOURCES} weights, got {len(values)}")
    for x in values:
        if not math.isfinite(x):
            raise ValueError(f"weights must be finite, got {x!r}")
        if x < 0.0:
            raise NegativeWeight(f"weight {x} is negative")
    total = sum(values)
    if total == 0.0:
        raise AllZeroWeights("all six weights are zero")
    return WeightVector(tuple(x / total for x in values))


def compose(weights: WeightVector, rates: Iterable[SourceEstimate],
            regime: Optional[Regime] = None) -> RateComposition:
    """Blend six source rates into r0 = sum of weight * rate.

    `rates` must cover each SourceKind exactly once; input order does not
    matter, the breakdown is stored in canonical SourceKind order.
    """
    by_kind: dict[SourceKind, SourceEstimate] = {}
    for est in rates:
        if est.kind in by_kind:
            raise DuplicateSource(f"duplicate estimate for {est.kind.value}")
        by_kind[est.kind] = est
    missing = [k for k in _KIND_ORDER if k not in by_kind]
    if missing:
        raise MissingSource(f"missing estimates for: {', '.join(k.value for k in missing)}")
    ordered = tuple(by_kind[k] for k in _KIND_ORDER)
    r0 = 0.0
    for w, est in zip(weights.weights, ordered):
        r0 += w * est.rate
    return RateComposition(r0=r0, weights=weights, rates=ordered, regime=regime)


def _validate_category_map(category_map: Mapping[SignificanceLevel, float]) -> dict[SignificanceLevel, float]:
    levels = (SignificanceLevel.HIGH, SignificanceLevel.AVERAGE,
              SignificanceLevel.LOW, SignificanceLevel.MINIMUM)
    values = {}
    for level in levels:
        if level not in category_map:
            raise InvalidCategoryMap(f"category map missing {level.name}")
        v = float(category_map[level])
        if not math.isfinite(v) or v < 0.0:
            raise InvalidCategoryMap(f"category value for {level.name} must be finite and >= 0, got {v!r}")
        values[level] = v
    ordered = [values[lv] for lv in levels]
    # Non-increasing HIGH >= AVERAGE >= LOW >= MINIMUM; equal values are
    # allowed (an all-equal map yields uniform weights for either regime).
    for hi, lo in zip(ordered, ordered[1:]):
        if hi < lo:
            raise InvalidCategoryMap(
                "category values must not increase from HIGH down to MINIMUM"
            )
    return values


def regime_preset(regime: Regime,
                  category_map: Mapping[SignificanceLevel, float] = DEFAULT_CATEGORY_MAP) -> WeightVector:
    """Translate a regime's per-source significance row into normalized weights."""
    values = _validate_category_map(category_map)
    row = NORMAL_SIGNIFICANCE if regime is Regime.NORMAL else CRISIS_SIGNIFICANCE
    return normalize_weights([values[level] for level in row])


def survey_spread(rates: Iterable[float]) -> SurveySpread:
    """Min, max and spread (max - min) of a non-empty list of rates."""
    values = [float(x) for x in rates]
    if not values:
        raise EmptyInput("rate list is empty")
    for x in values:
        if not math.isfinite(x):
            raise ValueError(f"rates must be finite, got {x!r}")
    lo, hi = min(values), max(values)
    return SurveySpread(lo, hi, hi - lo)
