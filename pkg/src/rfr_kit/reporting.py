"""Run-configuration loading, report assembly and deterministic serialization.

A run config is one JSON file naming the inputs for every section; the
report is a pure function of (config, seed), rendered with stable key order
and 12-significant-digit numbers so byte-level golden comparisons work.
All rates in configs and reports are decimals (0.05 means 5%), never
percents.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Any, Callable, Mapping, NamedTuple, Optional, Sequence

from . import __version__
from .crisis_sim import BatchSummary, SimConfig, batch_compare
from .errors import InputError, InvalidConfig, IoError, ParseError
from .ingest import ingest_returns, ingest_survey
from .pricing_models import (
    CapmInput,
    OptionKind,
    OptionSpec,
    bs_price,
    bs_rho,
    capm_expected_return,
    capm_rate_sensitivity,
)
from .portfolio_engine import (
    FrontierModel,
    FrontierRegime,
    PortfolioPoint,
    cal_slope,
    classify_tangency_regime,
    frontier_points,
    gmv_portfolio,
    tangency_portfolio,
)
from .rate_model import (
    DEFAULT_CATEGORY_MAP,
    RateComposition,
    Regime,
    SignificanceLevel,
    SourceEstimate,
    SourceKind,
    SurveySpread,
    WeightVector,
    compose,
    normalize_weights,
    regime_preset,
    survey_spread,
)
from .source_estimators import (
    ArbitrageLeg,
    BondSpec,
    MoneyMarketQuote,
    ReturnSeries,
    annualize_money_market,
    arbitrage_return,
    bond_ytm,
    constructor_rate,
    zero_beta_screen,
)

__all__ = [
    "RunConfig",
    "SourceInputs",
    "Report",
    "CapmRow",
    "OptionRow",
    "RegimeOutcome",
    "FrontierSection",
    "read_config_tree",
    "parse_regime_section",
    "parse_sources_section",
    "parse_capm_section",
    "parse_options_section",
    "parse_frontier_section",
    "parse_simulator_section",
    "load_config",
    "estimate_source_rates",
    "build_report",
    "report_tree",
    "render_json",
    "write_report_csv",
    "CSV_SECTION_FILES",
]

TOOL_NAME = "rfr-kit"

_LEVEL_KEYS = {
    "high": SignificanceLevel.HIGH,
    "average": SignificanceLevel.AVERAGE,
    "low": SignificanceLevel.LOW,
    "minimum": SignificanceLevel.MINIMUM,
}

_KNOWN_SECTIONS = frozenset({
    "regime_analysis", "sources", "capm", "options", "frontier",
    "simulator", "survey_file",
})


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class SourceInputs:
    """Typed raw inputs for the six income sources."""

    bonds: tuple[BondSpec, ...]
    deposit_quotes: tuple[MoneyMarketQuote, ...]
    interbank_quotes: tuple[MoneyMarketQuote, ...]
    constructor_base: float
    constructor_premiums: tuple[float, ...]
    zero_beta_universe: tuple[ReturnSeries, ...]
    zero_beta_market: ReturnSeries
    zero_beta_epsilon: float
    zero_beta_periods_per_year: float
    arbitrage_legs: tuple[ArbitrageLeg, ...]


@dataclass(frozen=True)
class RunConfig:
    """Validated inputs for one report run.

    Every referenced file has been read and parsed by the time construction
    finishes, so report building cannot fail on missing inputs halfway
    through.
    """

    category_map: Mapping[SignificanceLevel, float]
    explicit_weights: Optional[Mapping[Regime, WeightVector]]
    sources: SourceInputs
    capm_betas: tuple[float, ...]
    capm_market_return: float
    options: tuple[OptionSpec, ...]
    frontier_model: Optional[FrontierModel]
    frontier_n_points: int
    frontier_return_range: Optional[tuple[float, float]]
    sim_config: Optional[SimConfig]
    sim_n_seeds: int
    survey_rates: Optional[Mapping[str, Sequence[float]]]
    echo: Mapping[str, Any]

    def weights_for(self, regime: Regime) -> WeightVector:
        if self.explicit_weights is not None:
            return self.explicit_weights[regime]
        return regime_preset(regime, self.category_map)


def _require(mapping: Mapping, key: str, kind, where: str):
    if key not in mapping:
        raise InvalidConfig(f"{where}: missing required key {key!r}")
    value = mapping[key]
    if kind is float:
        return _number(value, f"{where}.{key}")
    if kind is int and isinstance(value, bool):
        raise InvalidConfig(f"{where}.{key}: expected int, got a boolean")
    if not isinstance(value, kind):
        raise InvalidConfig(
            f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidConfig(f"{where}: expected a number, got {value!r}")
    return float(value)


def _number_list(value, where: str) -> list[float]:
    if not isinstance(value, list):
        raise InvalidConfig(f"{where}: expected a list of numbers")
    return [_number(x, f"{where}[{i}]") for i, x in enumerate(value)]


def read_config_tree(path) -> tuple[dict[str, Any], Callable[[str], str]]:
    """Read a config file; returns the raw tree and a path resolver.

    The resolver maps file references that are relative onto the config's
    own directory, so configs stay portable.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise InvalidConfig(f"{path}: top level must be a JSON object")
    unknown = set(raw) - _KNOWN_SECTIONS
    if unknown:
        raise InvalidConfig(f"config: unknown sections {sorted(unknown)}")
    base_dir = os.path.dirname(os.path.abspath(path))

    def resolve(file_ref: str) -> str:
        return file_ref if os.path.isabs(file_ref) else os.path.join(base_dir, file_ref)

    return raw, resolve


def _parse_category_map(raw, where: str) -> dict[SignificanceLevel, float]:
    if not isinstance(raw, dict):
        raise InvalidConfig(f"{where}: expected an object with keys "
                            "high, average, low, minimum")
    unknown = set(raw) - set(_LEVEL_KEYS)
    if unknown:
        raise InvalidConfig(f"{where}: unknown keys {sorted(unknown)}")
    return {_LEVEL_KEYS[k]: _number(v, f"{where}.{k}") for k, v in raw.items()}


def parse_regime_section(tree: Mapping[str, Any]) -> tuple[
        Mapping[SignificanceLevel, float],
        Optional[dict[Regime, WeightVector]]]:
    """Category map plus optional explicit per-regime weights.

    A config may give either explicit weights or a category map, never
    both; with neither, the default map applies.
    """
    raw = tree.get("regime_analysis", {})
    if not isinstance(raw, dict):
        raise InvalidConfig("regime_analysis: expected an object")
    unknown = set(raw) - {"weights", "category_map"}
    if unknown:
        raise InvalidConfig(f"regime_analysis: unknown keys {sorted(unknown)}")
    if "weights" in raw and "category_map" in raw:
        raise InvalidConfig(
            "regime_analysis: give either explicit weights or a category_map, not both")
    category_map: Mapping[SignificanceLevel, float] = DEFAULT_CATEGORY_MAP
    explicit = None
    if "category_map" in raw:
        category_map = _parse_category_map(raw["category_map"],
                                           "regime_analysis.category_map")
        regime_preset(Regime.NORMAL, category_map)  # validate eagerly
    if "weights" in raw:
        weights_raw = raw["weights"]
        if not isinstance(weights_raw, dict) or set(weights_raw) != {"normal", "crisis"}:
            raise InvalidConfig(
                "regime_analysis.weights: expected objects keyed normal and crisis")
        explicit = {
            Regime.NORMAL: normalize_weights(
                _number_list(weights_raw["normal"], "regime_analysis.weights.normal")),
            Regime.CRISIS: normalize_weights(
                _number_list(weights_raw["crisis"], "regime_analysis.weights.crisis")),
        }
    return category_map, explicit


def _parse_quotes(raw, where: str) -> tuple[MoneyMarketQuote, ...]:
    if not isinstance(raw, list) or not raw:
        raise InvalidConfig(f"{where}: expected a non-empty list of quotes")
    quotes = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise InvalidConfig(f"{where}[{i}]: expected an object")
        quotes.append(MoneyMarketQuote(
            period_return=_require(item, "period_return", float, f"{where}[{i}]"),
            term_days=_require(item, "term_days", int, f"{where}[{i}]"),
            day_basis=int(item.get("day_basis", 365)),
        ))
    return tuple(quotes)


def parse_sources_section(tree: Mapping[str, Any],
                          resolve: Callable[[str], str]) -> SourceInputs:
    """Validate the six source-input blocks and load referenced files."""
    sources = _require(tree, "sources", dict, "config")
    for name in ("government_bonds", "bank_deposits", "interbank_loans",
                 "constructor", "zero_beta_shares", "arbitrage"):
        if name not in sources:
            raise InvalidConfig(f"sources: missing section {name!r}")
        if not isinstance(sources[name], dict):
            raise InvalidConfig(f"sources.{name}: expected an object")

    bonds_raw = _require(sources["government_bonds"], "bonds", list,
                         "sources.government_bonds")
    if not bonds_raw:
        raise InvalidConfig("sources.government_bonds.bonds: needs at least one bond")
    bonds = []
    for i, item in enumerate(bonds_raw):
        where = f"sources.government_bonds.bonds[{i}]"
        if not isinstance(item, dict):
            raise InvalidConfig(f"{where}: expected an object")
        flows_raw = _require(item, "cashflows", list, where)
        flows = []
        for j, pair in enumerate(flows_raw):
            if not isinstance(pair, list) or len(pair) != 2:
                raise InvalidConfig(f"{where}.cashflows[{j}]: expected [time, amount]")
            flows.append((_number(pair[0], f"{where}.cashflows[{j}][0]"),
                          _number(pair[1], f"{where}.cashflows[{j}][1]")))
        bonds.append(BondSpec(cashflows=tuple(flows),
                              price=_require(item, "price", float, where)))

    deposits = _parse_quotes(
        _require(sources["bank_deposits"], "quotes", list, "sources.bank_deposits"),
        "sources.bank_deposits.quotes")
    interbank = _parse_quotes(
        _require(sources["interbank_loans"], "quotes", list, "sources.interbank_loans"),
        "sources.interbank_loans.quotes")

    cons = sources["constructor"]
    cons_base = _require(cons, "base", float, "sources.constructor")
    cons_premiums = tuple(_number_list(cons.get("premiums", []),
                                       "sources.constructor.premiums"))

    zb = sources["zero_beta_shares"]
    returns_file = resolve(_require(zb, "returns_file", str, "sources.zero_beta_shares"))
    market_asset = _require(zb, "market_asset", str, "sources.zero_beta_shares")
    zb_epsilon = _require(zb, "epsilon", float, "sources.zero_beta_shares")
    zb_ppy = _require(zb, "periods_per_year", float, "sources.zero_beta_shares")
    returns = ingest_returns(returns_file)
    if market_asset not in returns:
        raise InvalidConfig(
            f"sources.zero_beta_shares: market_asset {market_asset!r} "
            f"not in {returns_file}")
    market_series = ReturnSeries(market_asset, tuple(returns[market_asset]))
    universe = tuple(ReturnSeries(name, tuple(values))
                     for name, values in returns.items() if name != market_asset)
    if not universe:
        raise InvalidConfig(
            f"sources.zero_beta_shares: {returns_file} holds only the market series")

    legs_raw = _require(sources["arbitrage"], "legs", list, "sources.arbitrage")
    if not legs_raw:
        raise InvalidConfig("sources.arbitrage.legs: needs at least one leg")
    legs = []
    for i, item in enumerate(legs_raw):
        where = f"sources.arbitrage.legs[{i}]"
        if not isinstance(item, dict):
            raise InvalidConfig(f"{where}: expected an object")
        leg = ArbitrageLeg(
            buy_price=_require(item, "buy_price", float, where),
            sell_price=_require(item, "sell_price", float, where),
            costs=_number(item.get("costs", 0.0), f"{where}.costs"),
            holding_days=_require(item, "holding_days", int, where),
        )
        if leg.holding_days == 0:
            raise InvalidConfig(
                f"{where}: holding_days must be >= 1 so the leg can be annualized")
        legs.append(leg)

    return SourceInputs(
        bonds=tuple(bonds),
        deposit_quotes=deposits,
        interbank_quotes=interbank,
        constructor_base=cons_base,
        constructor_premiums=cons_premiums,
        zero_beta_universe=universe,
        zero_beta_market=market_series,
        zero_beta_epsilon=zb_epsilon,
        zero_beta_periods_per_year=zb_ppy,
        arbitrage_legs=tuple(legs),
    )


def parse_capm_section(tree: Mapping[str, Any]) -> tuple[tuple[float, ...], float]:
    capm_raw = _require(tree, "capm", dict, "config")
    betas = tuple(_number_list(_require(capm_raw, "betas", list, "capm"), "capm.betas"))
    if not betas:
        raise InvalidConfig("capm.betas: needs at least one beta")
    return betas, _require(capm_raw, "market_return", float, "capm")


def parse_options_section(tree: Mapping[str, Any]) -> tuple[OptionSpec, ...]:
    options_raw = _require(tree, "options", list, "config")
    if not options_raw:
        raise InvalidConfig("options: needs at least one option")
    options = []
    for i, item in enumerate(options_raw):
        where = f"options[{i}]"
        if not isinstance(item, dict):
            raise InvalidConfig(f"{where}: expected an object")
        kind_text = _require(item, "kind", str, where)
        try:
            kind = OptionKind(kind_text)
        except ValueError:
            raise InvalidConfig(f"{where}.kind: expected call or put, "
                                f"got {kind_text!r}") from None
        options.append(OptionSpec(
            spot=_require(item, "spot", float, where),
            strike=_require(item, "strike", float, where),
            volatility=_require(item, "volatility", float, where),
            rate=0.0,  # replaced with each composed r0 during the build
            time_to_expiry=_require(item, "time_to_expiry", float, where),
            kind=kind,
        ))
    return tuple(options)


def parse_frontier_section(tree: Mapping[str, Any]) -> tuple[
        FrontierModel, int, tuple[float, float]]:
    fr = _require(tree, "frontier", dict, "config")
    mu = _number_list(_require(fr, "mu", list, "frontier"), "frontier.mu")
    sigma_raw = _require(fr, "sigma", list, "frontier")
    sigma = [_number_list(row, f"frontier.sigma[{i}]")
             for i, row in enumerate(sigma_raw)]
    model = FrontierModel(mu, sigma)
    n_points = _require(fr, "n_points", int, "frontier")
    range_raw = _number_list(_require(fr, "return_range", list, "frontier"),
                             "frontier.return_range")
    if len(range_raw) != 2:
        raise InvalidConfig("frontier.return_range: expected [low, high]")
    if n_points < 2 or range_raw[0] >= range_raw[1]:
        raise InvalidConfig("frontier: n_points must be >= 2 and "
                            "return_range strictly increasing")
    return model, n_points, (range_raw[0], range_raw[1])


def parse_simulator_section(tree: Mapping[str, Any]) -> tuple[SimConfig, int]:
    sim_raw = _require(tree, "simulator", dict, "config")
    sim_fields = dict(sim_raw)
    n_seeds = sim_fields.pop("n_seeds", 0)
    if isinstance(n_seeds, bool) or not isinstance(n_seeds, int) or n_seeds < 2:
        raise InvalidConfig("simulator.n_seeds: expected an integer >= 2")
    regime_text = sim_fields.pop("regime", "normal")
    try:
        sim_fields["regime"] = Regime(regime_text)
    except ValueError:
        raise InvalidConfig(f"simulator.regime: expected normal or crisis, "
                            f"got {regime_text!r}") from None
    if "baseline_rates" in sim_fields:
        sim_fields["baseline_rates"] = tuple(_number_list(
            sim_fields["baseline_rates"], "simulator.baseline_rates"))
    try:
        cfg = SimConfig(**sim_fields)
    except TypeError as exc:
        raise InvalidConfig(f"simulator: {exc}") from None
    return cfg, n_seeds


def load_config(path) -> RunConfig:
    """Parse and fully validate a run-config JSON file.

    Relative file references are resolved against the config's directory.
    Frontier, simulator and survey sections are optional; everything else
    is required.
    """
    raw, resolve = read_config_tree(path)

    category_map, explicit_weights = parse_regime_section(raw)
    sources = parse_sources_section(raw, resolve)
    betas, market_return = parse_capm_section(raw)
    options = parse_options_section(raw)

    frontier_model = None
    frontier_n_points = 0
    frontier_range = None
    if "frontier" in raw:
        frontier_model, frontier_n_points, frontier_range = parse_frontier_section(raw)

    sim_config = None
    sim_n_seeds = 0
    if "simulator" in raw:
        sim_config, sim_n_seeds = parse_simulator_section(raw)

    survey_rates = None
    if "survey_file" in raw:
        survey_rates = ingest_survey(resolve(_require(raw, "survey_file", str, "config")))

    return RunConfig(
        category_map=category_map,
        explicit_weights=explicit_weights,
        sources=sources,
        capm_betas=betas,
        capm_market_return=market_return,
        options=options,
        frontier_model=frontier_model,
        frontier_n_points=frontier_n_points,
        frontier_return_range=frontier_range,
        sim_config=sim_config,
        sim_n_seeds=sim_n_seeds,
        survey_rates=survey_rates,
        echo=raw,
    )


# ---------------------------------------------------------------------------
# report assembly


class CapmRow(NamedTuple):
    beta: float
    expected_return_normal: float
    expected_return_crisis: float
    delta: float
    rate_sensitivity: float


class OptionRow(NamedTuple):
    option: OptionSpec
    price_normal: float
    price_crisis: float
    price_delta: float
    rho_normal: Optional[float]
    rho_crisis: Optional[float]


@dataclass(frozen=True)
class RegimeOutcome:
    """Frontier geometry at one composed rate."""

    regime: Regime
    r0: float
    label: FrontierRegime
    cal_slope: Optional[float]
    tangency: Optional[PortfolioPoint]


@dataclass(frozen=True)
class FrontierSection:
    model: FrontierModel
    gmv: PortfolioPoint
    points: tuple[PortfolioPoint, ...]
    outcomes: tuple[RegimeOutcome, ...]


@dataclass(frozen=True)
class Report:
    """Everything one run produced, ready for serialization."""

    tool_version: str
    seed: int
    source_rates: tuple[SourceEstimate, ...]
    compositions: tuple[RateComposition, ...]  # normal first, crisis second
    capm_market_return: float
    capm_rows: tuple[CapmRow, ...]
    option_rows: tuple[OptionRow, ...]
    frontier: Optional[FrontierSection]
    sim_config: Optional[SimConfig]
    sim_summary: Optional[BatchSummary]
    survey: Optional[tuple[tuple[str, int, SurveySpread], ...]]
    config_echo: Mapping[str, Any]


def estimate_source_rates(inputs: SourceInputs) -> tuple[SourceEstimate, ...]:
    """Turn raw source inputs into the six annualized rates."""
    ytms = [bond_ytm(bond) for bond in inputs.bonds]
    bond_rate = sum(ytms) / len(ytms)

    deposit_rate = sum(annualize_money_market(q) for q in inputs.deposit_quotes) \
        / len(inputs.deposit_quotes)
    interbank_rate = sum(annualize_money_market(q) for q in inputs.interbank_quotes) \
        / len(inputs.interbank_quotes)

    cons_rate = constructor_rate(inputs.constructor_base, inputs.constructor_premiums)

    hits = zero_beta_screen(
        inputs.zero_beta_universe, inputs.zero_beta_market,
        inputs.zero_beta_epsilon,
        periods_per_year=inputs.zero_beta_periods_per_year)
    if not hits:
        raise InputError(
            "zero-beta screen found no assets with |beta| <= "
            f"{inputs.zero_beta_epsilon}; widen epsilon or extend the universe")
    zb_rate = sum(h.mean_return for h in hits) / len(hits)

    arb_rates = [arbitrage_return(leg).annualized for leg in inputs.arbitrage_legs]
    arb_rate = sum(arb_rates) / len(arb_rates)

    return (
        SourceEstimate(SourceKind.GOVERNMENT_BONDS, bond_rate,
                       provenance=f"mean YTM of {len(inputs.bonds)} bonds"),
        SourceEstimate(SourceKind.BANK_DEPOSITS, deposit_rate,
                       provenance=f"mean of {len(inputs.deposit_quotes)} quotes"),
        SourceEstimate(SourceKind.INTERBANK_LOANS, interbank_rate,
                       provenance=f"mean of {len(inputs.interbank_quotes)} quotes"),
        SourceEstimate(SourceKind.CONSTRUCTOR, cons_rate,
                       provenance="base plus premiums"),
        SourceEstimate(SourceKind.ZERO_BETA_SHARES, zb_rate,
                       provenance=f"mean return of {len(hits)} screened assets"),
        SourceEstimate(SourceKind.ARBITRAGE, arb_rate,
                       provenance=f"mean annualized over "
                                  f"{len(inputs.arbitrage_legs)} legs"),
    )


def build_report(config: RunConfig, seed: Optional[int] = None) -> Report:
    """Assemble the full report; `seed` overrides the simulator seed."""
    rates = estimate_source_rates(config.sources)
    compositions = tuple(
        compose(config.weights_for(regime), rates, regime=regime)
        for regime in (Regime.NORMAL, Regime.CRISIS)
    )
    r0_normal, r0_crisis = compositions[0].r0, compositions[1].r0

    capm_rows = []
    for beta in config.capm_betas:
        normal = capm_expected_return(CapmInput(r0_normal, beta,
                                                config.capm_market_return))
        crisis = capm_expected_return(CapmInput(r0_crisis, beta,
                                                config.capm_market_return))
        capm_rows.append(CapmRow(
            beta=beta,
            expected_return_normal=normal,
            expected_return_crisis=crisis,
            delta=crisis - normal,
            rate_sensitivity=capm_rate_sensitivity(beta),
        ))

    option_rows = []
    for spec in config.options:
        normal_spec = OptionSpec(spec.spot, spec.strike, spec.volatility,
                                 r0_normal, spec.time_to_expiry, spec.kind)
        crisis_spec = OptionSpec(spec.spot, spec.strike, spec.volatility,
                                 r0_crisis, spec.time_to_expiry, spec.kind)
        price_normal = bs_price(normal_spec)
        price_crisis = bs_price(crisis_spec)
        has_rho = spec.time_to_expiry > 0.0 and spec.volatility > 0.0
        option_rows.append(OptionRow(
            option=spec,
            price_normal=price_normal,
            price_crisis=price_crisis,
            price_delta=price_crisis - price_normal,
            rho_normal=bs_rho(normal_spec) if has_rho else None,
            rho_crisis=bs_rho(crisis_spec) if has_rho else None,
        ))

    frontier = None
    if config.frontier_model is not None:
        model = config.frontier_model
        outcomes = []
        for regime, r0 in ((Regime.NORMAL, r0_normal), (Regime.CRISIS, r0_crisis)):
            classification = classify_tangency_regime(model, r0)
            if classification.label is FrontierRegime.DEGENERATE:
                outcomes.append(RegimeOutcome(regime, r0, classification.label,
                                              cal_slope=None, tangency=None))
            else:
                outcomes.append(RegimeOutcome(
                    regime, r0, classification.label,
                    cal_slope=cal_slope(model, r0),
                    tangency=tangency_portfolio(model, r0),
                ))
        frontier = FrontierSection(
            model=model,
            gmv=gmv_portfolio(model),
            points=tuple(frontier_points(model, config.frontier_n_points,
                                         config.frontier_return_range)),
            outcomes=tuple(outcomes),
        )

    sim_config = config.sim_config
    sim_summary = None
    if sim_config is not None:
        if seed is not None:
            if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
                raise InvalidConfig(f"seed must be a non-negative integer, got {seed!r}")
            sim_config = SimConfig(**{**_sim_config_fields(sim_config), "seed": seed})
        sim_summary = batch_compare(sim_config, config.sim_n_seeds,
                                    config.category_map)

    survey = None
    if config.survey_rates is not None:
        survey = tuple(
            (country, len(values), survey_spread(values))
            for country, values in sorted(config.survey_rates.items())
        )

    return Report(
        tool_version=f"{TOOL_NAME} {__version__}",
        seed=sim_config.seed if sim_config is not None else (seed or 0),
        source_rates=rates,
        compositions=compositions,
        capm_market_return=config.capm_market_return,
        capm_rows=tuple(capm_rows),
        option_rows=tuple(option_rows),
        frontier=frontier,
        sim_config=sim_config,
        sim_summary=sim_summary,
        survey=survey,
        config_echo=config.echo,
    )


def _sim_config_fields(cfg: SimConfig) -> dict[str, Any]:
    return {
        "base_price": cfg.base_price,
        "common_vol": cfg.common_vol,
        "divergence_vol": cfg.divergence_vol,
        "crisis_vol_multiplier": cfg.crisis_vol_multiplier,
        "n_steps": cfg.n_steps,
        "step_days": cfg.step_days,
        "arb_threshold": cfg.arb_threshold,
        "arb_cost": cfg.arb_cost,
        "baseline_rates": cfg.baseline_rates,
        "regime": cfg.regime,
        "seed": cfg.seed,
    }


# ---------------------------------------------------------------------------
# serialization


def _format_number(value) -> str:
    if isinstance(value, bool):
        raise ValueError(f"booleans are not report numbers: {value!r}")
    if isinstance(value, int):
        return str(value)
    if not math.isfinite(value):
        raise ValueError(f"report numbers must be finite, got {value!r}")
    return f"{value:.12g}"


def render_json(tree) -> str:
    """Serialize a report tree with stable key order and 12-digit numbers."""
    pieces: list[str] = []
    _render(tree, pieces, 0)
    pieces.append("\n")
    return "".join(pieces)


def _render(node, pieces: list[str], depth: int) -> None:
    pad = "  " * depth
    child_pad = "  " * (depth + 1)
    if isinstance(node, dict):
        if not node:
            pieces.append("{}")
            return
        pieces.append("{\n")
        for i, (key, value) in enumerate(node.items()):
            if not isinstance(key, str):
                raise ValueError(f"report keys must be strings, got {key!r}")
            pieces.append(f"{child_pad}{json.dumps(key)}: ")
            _render(value, pieces, depth + 1)
            pieces.append(",\n" if i < len(node) - 1 else "\n")
        pieces.append(f"{pad}}}")
    elif isinstance(node, (list, tuple)):
        if not node:
            pieces.append("[]")
            return
        flat = all(isinstance(x, (int, float, str)) and not isinstance(x, bool)
                   for x in node)
        if flat:
            rendered = [
                _format_number(x) if isinstance(x, (int, float)) else json.dumps(x)
                for x in node
            ]
            pieces.append("[" + ", ".join(rendered) + "]")
            return
        pieces.append("[\n")
        for i, value in enumerate(node):
            pieces.append(child_pad)
            _render(value, pieces, depth + 1)
            pieces.append(",\n" if i < len(node) - 1 else "\n")
        pieces.append(f"{pad}]")
    elif isinstance(node, bool):
        pieces.append("true" if node else "false")
    elif isinstance(node, (int, float)):
        pieces.append(_format_number(node))
    elif isinstance(node, str):
        pieces.append(json.dumps(node))
    elif node is None:
        raise ValueError("report trees must omit empty sections, not emit null")
    else:
        raise ValueError(f"unserializable report node: {type(node).__name__}")


def report_tree(report: Report) -> dict[str, Any]:
    """The report as a plain tree in its documented, stable key order."""
    tree: dict[str, Any] = {
        "schema_version": 1,
        "tool": report.tool_version,
        "seed": report.seed,
    }

    tree["sources"] = [
        {"source": est.kind.value, "rate": est.rate, "provenance": est.provenance}
        for est in report.source_rates
    ]

    comps: dict[str, Any] = {}
    for comp in report.compositions:
        weights = comp.weights.as_dict()
        comps[comp.regime.value] = {
            "r0": comp.r0,
            "weights": {k.value: w for k, w in weights.items()},
            "contributions": {
                est.kind.value: weights[est.kind] * est.rate for est in comp.rates
            },
        }
    tree["compositions"] = comps

    r0_normal = report.compositions[0].r0
    r0_crisis = report.compositions[1].r0
    tree["capm"] = {
        "market_return": report.capm_market_return,
        "r0_normal": r0_normal,
        "r0_crisis": r0_crisis,
        "rows": [
            {
                "beta": row.beta,
                "expected_return_normal": row.expected_return_normal,
                "expected_return_crisis": row.expected_return_crisis,
                "delta": row.delta,
                "rate_sensitivity": row.rate_sensitivity,
            }
            for row in report.capm_rows
        ],
    }

    option_rows = []
    for row in report.option_rows:
        entry: dict[str, Any] = {
            "kind": row.option.kind.value,
            "spot": row.option.spot,
            "strike": row.option.strike,
            "volatility": row.option.volatility,
            "time_to_expiry": row.option.time_to_expiry,
            "price_normal": row.price_normal,
            "price_crisis": row.price_crisis,
            "price_delta": row.price_delta,
        }
        if row.rho_normal is not None:
            entry["rho_normal"] = row.rho_normal
            entry["rho_crisis"] = row.rho_crisis
        option_rows.append(entry)
    tree["options"] = {
        "r0_normal": r0_normal,
        "r0_crisis": r0_crisis,
        "rows": option_rows,
    }

    if report.frontier is not None:
        fr = report.frontier
        regimes: dict[str, Any] = {}
        for outcome in fr.outcomes:
            entry = {
                "r0": outcome.r0,
                "label": outcome.label.value,
                "gmv_return": fr.model.gmv_return,
            }
            if outcome.tangency is not None:
                entry["cal_slope"] = outcome.cal_slope
                entry["tangency"] = {
                    "expected_return": outcome.tangency.expected_return,
                    "stdev": outcome.tangency.stdev,
                    "weights": list(outcome.tangency.weights),
                }
            regimes[outcome.regime.value] = entry
        tree["frontier"] = {
            "gmv": {
                "expected_return": fr.gmv.expected_return,
                "stdev": fr.gmv.stdev,
                "weights": list(fr.gmv.weights),
            },
            "points": [[p.stdev, p.expected_return] for p in fr.points],
            "regimes": regimes,
        }

    if report.sim_summary is not None:
        cfg = report.sim_config
        summary = report.sim_summary
        tree["simulation"] = {
            "n_seeds": summary.n_seeds,
            "first_seed": summary.first_seed,
            "config": {
                "base_price": cfg.base_price,
                "common_vol": cfg.common_vol,
                "divergence_vol": cfg.divergence_vol,
                "crisis_vol_multiplier": cfg.crisis_vol_multiplier,
                "n_steps": cfg.n_steps,
                "step_days": cfg.step_days,
                "arb_threshold": cfg.arb_threshold,
                "arb_cost": cfg.arb_cost,
                "baseline_rates": list(cfg.baseline_rates),
            },
            "normal_r0": {"mean": summary.normal.mean,
                          "min": summary.normal.minimum,
                          "max": summary.normal.maximum},
            "crisis_r0": {"mean": summary.crisis.mean,
                          "min": summary.crisis.minimum,
                          "max": summary.crisis.maximum},
            "mean_paired_difference": summary.mean_paired_difference,
            "crisis_greater_fraction": summary.crisis_greater_fraction,
        }

    if report.survey is not None:
        tree["survey"] = {
            country: {
                "respondents": count,
                "minimum": spread.minimum,
                "maximum": spread.maximum,
                "spread": spread.spread,
            }
            for country, count, spread in report.survey
        }

    tree["config"] = report.config_echo
    return tree


CSV_SECTION_FILES = (
    "sources.csv",
    "compositions.csv",
    "capm.csv",
    "options.csv",
    "frontier_gmv.csv",
    "frontier_points.csv",
    "frontier_regimes.csv",
    "simulation.csv",
    "survey.csv",
)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        if any(ch in value for ch in ",\"\n"):
            return '"' + value.replace('"', '""') + '"'
        return value
    return _format_number(value)


def _write_csv(path, header: Sequence[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_csv_cell(cell) for cell in row) for row in rows)
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_report_csv(report: Report, out_dir) -> list[str]:
    """One CSV file per report section; returns the paths written."""
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out_dir}: {exc}") from exc
    written: list[str] = []

    def emit(name, header, rows):
        path = os.path.join(out_dir, name)
        _write_csv(path, header, rows)
        written.append(path)

    emit("sources.csv", ("source", "rate", "provenance"),
         [(est.kind.value, est.rate, est.provenance)
          for est in report.source_rates])

    comp_rows = []
    for comp in report.compositions:
        weights = comp.weights.as_dict()
        for est in comp.rates:
            comp_rows.append((comp.regime.value, est.kind.value,
                              weights[est.kind], est.rate,
                              weights[est.kind] * est.rate))
        comp_rows.append((comp.regime.value, "total", 1, None, comp.r0))
    emit("compositions.csv",
         ("regime", "source", "weight", "rate", "contribution"), comp_rows)

    emit("capm.csv",
         ("beta", "expected_return_normal", "expected_return_crisis",
          "delta", "rate_sensitivity"),
         [tuple(row) for row in report.capm_rows])

    emit("options.csv",
         ("kind", "spot", "strike", "volatility", "time_to_expiry",
          "price_normal", "price_crisis", "price_delta",
          "rho_normal", "rho_crisis"),
         [(r.option.kind.value, r.option.spot, r.option.strike,
           r.option.volatility, r.option.time_to_expiry,
           r.price_normal, r.price_crisis, r.price_delta,
           r.rho_normal, r.rho_crisis)
          for r in report.option_rows])

    if report.frontier is not None:
        fr = report.frontier
        n = fr.model.n_assets
        weight_cols = tuple(f"w{i + 1}" for i in range(n))
        emit("frontier_gmv.csv",
             ("expected_return", "stdev") + weight_cols,
             [(fr.gmv.expected_return, fr.gmv.stdev) + fr.gmv.weights])
        emit("frontier_points.csv", ("stdev", "expected_return"),
             [(p.stdev, p.expected_return) for p in fr.points])
        emit("frontier_regimes.csv",
             ("regime", "r0", "label", "gmv_return", "cal_slope",
              "tangency_return", "tangency_stdev"),
             [(o.regime.value, o.r0, o.label.value, fr.model.gmv_return,
               o.cal_slope,
               o.tangency.expected_return if o.tangency else None,
               o.tangency.stdev if o.tangency else None)
              for o in fr.outcomes])

    if report.sim_summary is not None:
        s = report.sim_summary
        emit("simulation.csv",
             ("n_seeds", "first_seed", "normal_mean", "normal_min", "normal_max",
              "crisis_mean", "crisis_min", "crisis_max",
              "mean_paired_difference", "crisis_greater_fraction"),
             [(s.n_seeds, s.first_seed,
               s.normal.mean, s.normal.minimum, s.normal.maximum,
               s.crisis.mean, s.crisis.minimum, s.crisis.maximum,
               s.mean_paired_difference, s.crisis_greater_fraction)])

    if report.survey is not None:
        emit("survey.csv",
             ("country", "respondents", "minimum", "maximum", "spread"),
             [(country, count, spread.minimum, spread.maximum, spread.spread)
              for country, count, spread in report.survey])

    return written
