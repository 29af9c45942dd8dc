"""Seeded Monte-Carlo of the crisis causal chain on a dual-listed share.

Crisis multiplies both the common and the venue-divergence volatility;
larger divergence opens more and wider cross-venue gaps; gaps above the
trade threshold become arbitrage deals; their mean annualized return feeds
the arbitrage slot of the composite rate, which the crisis weight preset
then amplifies.  Paths are a deterministic function of the seed (xoshiro256**
generator, see `rfr_kit._kernels`), so every result is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, NamedTuple, Optional, Sequence

import numpy as np

from . import _kernels
from .errors import InvalidConfig, LengthMismatch
from .rate_model import (
    DEFAULT_CATEGORY_MAP,
    RateComposition,
    Regime,
    SignificanceLevel,
    SourceEstimate,
    SourceKind,
    compose,
    regime_preset,
)
from .source_estimators import ArbitrageLeg, arbitrage_return

__all__ = [
    "SimConfig",
    "Opportunity",
    "ScenarioResult",
    "BatchSummary",
    "RegimeStats",
    "simulate_dual_listing",
    "detect_arbitrage",
    "run_scenario",
    "batch_compare",
]

_DAYS_PER_YEAR = 365.0

# Baseline annualized rates for the five non-arbitrage sources, in
# SourceKind order (bonds, deposits, interbank, constructor, zero-beta).
DEFAULT_BASELINE_RATES = (0.04, 0.03, 0.025, 0.05, 0.035)


@dataclass(frozen=True)
class SimConfig:
    """Dual-listing simulator settings; defaults were calibrated so the
    crisis regime out-composes the normal regime on paired seeds."""

    base_price: float = 100.0
    common_vol: float = 0.15
    divergence_vol: float = 0.02
    crisis_vol_multiplier: float = 3.0
    n_steps: int = 52
    step_days: int = 7
    arb_threshold: float = 0.01
    arb_cost: float = 0.003
    baseline_rates: tuple[float, ...] = DEFAULT_BASELINE_RATES
    regime: Regime = Regime.NORMAL
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "baseline_rates",
                           tuple(float(x) for x in self.baseline_rates))
        if not (math.isfinite(self.base_price) and self.base_price > 0.0):
            raise InvalidConfig(f"base_price must be > 0, got {self.base_price!r}")
        for name in ("common_vol", "divergence_vol"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise InvalidConfig(f"{name} must be >= 0, got {v!r}")
        if not (math.isfinite(self.crisis_vol_multiplier) and self.crisis_vol_multiplier >= 1.0):
            raise InvalidConfig(
                f"crisis_vol_multiplier must be >= 1, got {self.crisis_vol_multiplier!r}")
        if not isinstance(self.n_steps, int) or self.n_steps < 1:
            raise InvalidConfig(f"n_steps must be an integer >= 1, got {self.n_steps!r}")
        if not isinstance(self.step_days, int) or self.step_days < 1:
            raise InvalidConfig(f"step_days must be an integer >= 1, got {self.step_days!r}")
        if not (math.isfinite(self.arb_threshold) and self.arb_threshold > 0.0):
            raise InvalidConfig(f"arb_threshold must be > 0, got {self.arb_threshold!r}")
        if not (math.isfinite(self.arb_cost) and self.arb_cost >= 0.0):
            raise InvalidConfig(f"arb_cost must be >= 0, got {self.arb_cost!r}")
        if len(self.baseline_rates) != 5:
            raise InvalidConfig(
                f"baseline_rates needs 5 entries, got {len(self.baseline_rates)}")
        for x in self.baseline_rates:
            if not math.isfinite(x) or x <= -1.0:
                raise InvalidConfig(f"baseline rate {x!r} must be finite and > -1")
        if not isinstance(self.regime, Regime):
            raise InvalidConfig(f"regime must be a Regime, got {self.regime!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise InvalidConfig(f"seed must be a non-negative integer, got {self.seed!r}")

    @property
    def vol_multiplier(self) -> float:
        return self.crisis_vol_multiplier if self.regime is Regime.CRISIS else 1.0

    @property
    def dt_years(self) -> float:
        return self.step_days / _DAYS_PER_YEAR


class Opportunity(NamedTuple):
    """One tradable cross-venue gap: step index, relative gap, net gross return."""

    step: int
    gap: float
    gross_return: float


@dataclass(frozen=True)
class ScenarioResult:
    """Everything one simulator run produced, down to the composed r0."""

    config: SimConfig
    path_a: np.ndarray
    path_b: np.ndarray
    opportunities: tuple[Opportunity, ...]
    mean_arb_return: float
    source_rates: tuple[SourceEstimate, ...]
    composition: RateComposition

    @property
    def arb_rate_defaulted(self) -> bool:
        """True when no opportunity was found and the arbitrage rate fell back to 0."""
        return not self.opportunities

    @property
    def r0(self) -> float:
        return self.composition.r0


class RegimeStats(NamedTuple):
    mean: float
    minimum: float
    maximum: float


@dataclass(frozen=True)
class BatchSummary:
    """Paired-seed comparison of composed rates under both regimes."""

    n_seeds: int
    first_seed: int
    normal: RegimeStats
    crisis: RegimeStats
    mean_paired_difference: float
    crisis_greater_fraction: float
    normal_r0: tuple[float, ...]
    crisis_r0: tuple[float, ...]


def simulate_dual_listing(config: SimConfig) -> tuple[np.ndarray, np.ndarray]:
    """Price paths for the two venues, length n_steps + 1, starting at base_price."""
    m = config.vol_multiplier
    return _kernels.simulate_paths(
        config.base_price,
        config.common_vol * m,
        config.divergence_vol * m,
        config.n_steps,
        config.dt_years,
        config.seed,
    )


def detect_arbitrage(path_a: Sequence[float], path_b: Sequence[float],
                     arb_threshold: float, arb_cost: float = 0.0) -> list[Opportunity]:
    """Steps where the relative venue gap covers the threshold.

    The gap is |p_a - p_b| / min(p_a, p_b) (sell the rich venue, buy the
    cheap one, returns measured on the cheap-side capital); the recorded
    gross return nets out arb_cost.  One opportunity per step at most.
    """
    if len(path_a) != len(path_b):
        raise LengthMismatch(f"path lengths differ: {len(path_a)} vs {len(path_b)}")
    if not (math.isfinite(arb_threshold) and arb_threshold > 0.0):
        raise ValueError(f"arb_threshold must be > 0, got {arb_threshold!r}")
    if not (math.isfinite(arb_cost) and arb_cost >= 0.0):
        raise ValueError(f"arb_cost must be >= 0, got {arb_cost!r}")
    gaps = _kernels.relative_gaps(np.asarray(path_a, dtype=float),
                                  np.asarray(path_b, dtype=float))
    return [
        Opportunity(step=i, gap=float(g), gross_return=float(g) - arb_cost)
        for i, g in enumerate(gaps)
        if g >= arb_threshold
    ]


def _mean_annualized_arb(opportunities: Sequence[Opportunity],
                         base_price: float, step_days: int) -> float:
    """Mean of per-deal annualized returns, each deal held for one step."""
    if not opportunities:
        return 0.0
    total = 0.0
    for opp in opportunities:
        # reconstruct the deal on the cheap side: buy 1 unit at base, sell
        # at base*(1+gap), pay cost on the buy-side capital
        leg = ArbitrageLeg(
            buy_price=base_price,
            sell_price=base_price * (1.0 + opp.gap),
            costs=base_price * (opp.gap - opp.gross_return),
            holding_days=step_days,
        )
        outcome = arbitrage_return(leg)
        total += outcome.annualized
    return total / len(opportunities)


def run_scenario(config: SimConfig,
                 category_map: Mapping[SignificanceLevel, float] = DEFAULT_CATEGORY_MAP,
                 ) -> ScenarioResult:
    """Simulate, detect, estimate the arbitrage rate, and compose r0."""
    path_a, path_b = simulate_dual_listing(config)
    opportunities = tuple(detect_arbitrage(path_a, path_b,
                                           config.arb_threshold, config.arb_cost))
    mean_arb = _mean_annualized_arb(opportunities, config.base_price, config.step_days)
    non_arb_kinds = [k for k in SourceKind if k is not SourceKind.ARBITRAGE]
    rates = [
        SourceEstimate(kind, rate, provenance="baseline")
        for kind, rate in zip(non_arb_kinds, config.baseline_rates)
    ]
    arb_provenance = (
        f"simulated, {len(opportunities)} opportunities"
        if opportunities else "simulated, no opportunities"
    )
    rates.append(SourceEstimate(SourceKind.ARBITRAGE, mean_arb, provenance=arb_provenance))
    weights = regime_preset(config.regime, category_map)
    composition = compose(weights, rates, regime=config.regime)
    return ScenarioResult(
        config=config,
        path_a=path_a,
        path_b=path_b,
        opportunities=opportunities,
        mean_arb_return=mean_arb,
        source_rates=tuple(rates),
        composition=composition,
    )


def _stats(values: Sequence[float]) -> RegimeStats:
    return RegimeStats(sum(values) / len(values), min(values), max(values))


def batch_compare(config: SimConfig, n_seeds: int,
                  category_map: Mapping[SignificanceLevel, float] = DEFAULT_CATEGORY_MAP,
                  ) -> BatchSummary:
    """Run seeds seed..seed+n_seeds-1 under both regimes and compare r0.

    Each seed is shared between the Normal and Crisis runs, so a pair
    differs only by the volatility multiplier and the weight preset.
    """
    if not isinstance(n_seeds, int) or n_seeds < 2:
        raise InvalidConfig(f"n_seeds must be an integer >= 2, got {n_seeds!r}")
    normal_r0 = []
    crisis_r0 = []
    for offset in range(n_seeds):
        seed = config.seed + offset
        normal_cfg = replace(config, regime=Regime.NORMAL, seed=seed)
        crisis_cfg = replace(config, regime=Regime.CRISIS, seed=seed)
        normal_r0.append(run_scenario(normal_cfg, category_map).r0)
        crisis_r0.append(run_scenario(crisis_cfg, category_map).r0)
    diffs = [c - n for c, n in zip(crisis_r0, normal_r0)]
    greater = sum(1 for d in diffs if d > 0.0)
    return BatchSummary(
        n_seeds=n_seeds,
        first_seed=config.seed,
        normal=_stats(normal_r0),
        crisis=_stats(crisis_r0),
        mean_paired_difference=sum(diffs) / n_seeds,
        crisis_greater_fraction=greater / n_seeds,
        normal_r0=tuple(normal_r0),
        crisis_r0=tuple(crisis_r0),
    )
