"""Command-line interface.

Exit codes: 0 success, 2 bad input (flags, config, data files) with a
one-line diagnostic on stderr, 1 internal numerical failure.  Output goes
to stdout unless `--out` is given; nothing is written on failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import __version__
from .crisis_sim import SimConfig, run_scenario
from .errors import InputError, IoError, NumericalError
from .pricing_models import CapmInput, OptionKind, OptionSpec, bs_price, bs_rho, \
    capm_expected_return, capm_rate_sensitivity
from .portfolio_engine import classify_tangency_regime, frontier_points
from .rate_model import Regime, SignificanceLevel, SourceEstimate, SourceKind, \
    compose, normalize_weights, regime_preset, survey_spread
from .reporting import (
    TOOL_NAME,
    build_report,
    estimate_source_rates,
    load_config,
    parse_frontier_section,
    parse_regime_section,
    parse_simulator_section,
    parse_sources_section,
    read_config_tree,
    render_json,
    report_tree,
    write_report_csv,
)
from .ingest import ingest_survey

__all__ = ["main", "build_parser"]

_VERSION_TEXT = f"{TOOL_NAME} {__version__}"
_KIND_ORDER = tuple(SourceKind)


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _parse_float_list(text: str, what: str, n: Optional[int] = None) -> list[float]:
    parts = [p.strip() for p in text.split(",")]
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated numbers, "
                         f"got {text!r}") from None
    if n is not None and len(values) != n:
        raise InputError(f"{what}: expected {n} values, got {len(values)}")
    return values


def _parse_category_map_flag(text: str) -> dict[SignificanceLevel, float]:
    values = _parse_float_list(text, "--category-map", 4)
    return dict(zip((SignificanceLevel.HIGH, SignificanceLevel.AVERAGE,
                     SignificanceLevel.LOW, SignificanceLevel.MINIMUM), values))


def _emit(args, text: str) -> None:
    """Write finished output; called only after all computation succeeded."""
    if getattr(args, "out", None):
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
        except OSError as exc:
            raise IoError(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_compose(args) -> int:
    rates_values = _parse_float_list(args.rates, "--rates", 6)
    estimates = tuple(SourceEstimate(kind, rate)
                      for kind, rate in zip(_KIND_ORDER, rates_values))
    regime = None
    if args.weights is not None:
        weights = normalize_weights(_parse_float_list(args.weights, "--weights", 6))
    else:
        regime = Regime(args.regime)
        category_map = (_parse_category_map_flag(args.category_map)
                        if args.category_map else None)
        weights = regime_preset(regime, category_map) if category_map \
            else regime_preset(regime)
    composition = compose(weights, estimates, regime=regime)
    if args.format == "json":
        tree = {
            "r0": composition.r0,
            "weights": {k.value: composition.weights[k] for k in _KIND_ORDER},
            "rates": {e.kind.value: e.rate for e in composition.rates},
        }
        _emit(args, render_json(tree))
    else:
        _emit(args, f"r0 = {_fmt(composition.r0)}\n")
    return 0


def _cmd_estimate(args) -> int:
    tree, resolve = read_config_tree(args.config)
    rates = estimate_source_rates(parse_sources_section(tree, resolve))
    if args.format == "json":
        _emit(args, render_json({
            "sources": [{"source": e.kind.value, "rate": e.rate,
                         "provenance": e.provenance} for e in rates],
        }))
    else:
        width = max(len(e.kind.value) for e in rates)
        lines = [f"{e.kind.value:<{width}}  {_fmt(e.rate)}" for e in rates]
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_capm(args) -> int:
    expected = capm_expected_return(CapmInput(args.r0, args.beta, args.market_return))
    if args.format == "json":
        tree = {"r0": args.r0, "beta": args.beta,
                "market_return": args.market_return,
                "expected_return": expected,
                "rate_sensitivity": capm_rate_sensitivity(args.beta)}
        if args.r0_new is not None:
            shifted = capm_expected_return(
                CapmInput(args.r0_new, args.beta, args.market_return))
            tree["expected_return_new"] = shifted
            tree["delta"] = shifted - expected
        _emit(args, render_json(tree))
    else:
        lines = [f"expected return = {_fmt(expected)}"]
        if args.r0_new is not None:
            shifted = capm_expected_return(
                CapmInput(args.r0_new, args.beta, args.market_return))
            lines.append(f"expected return at new r0 = {_fmt(shifted)}")
            lines.append(f"delta = {_fmt(shifted - expected)}")
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_bs(args) -> int:
    try:
        kind = OptionKind(args.kind)
    except ValueError:
        raise InputError(f"--kind: expected call or put, got {args.kind!r}") from None
    spec = OptionSpec(spot=args.spot, strike=args.strike,
                      volatility=args.volatility, rate=args.rate,
                      time_to_expiry=args.expiry, kind=kind)
    price = bs_price(spec)
    has_rho = spec.time_to_expiry > 0.0 and spec.volatility > 0.0
    rho = bs_rho(spec) if has_rho else None
    if args.format == "json":
        tree = {"kind": kind.value, "price": price}
        if rho is not None:
            tree["rho"] = rho
        _emit(args, render_json(tree))
    else:
        lines = [f"price = {_fmt(price)}"]
        if rho is not None:
            lines.append(f"rho = {_fmt(rho)}")
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_frontier(args) -> int:
    tree, _ = read_config_tree(args.config)
    model, n_points, return_range = parse_frontier_section(tree)
    points = frontier_points(model, n_points, return_range)
    if args.format == "csv":
        lines = ["stdev,expected_return"]
        lines.extend(f"{_fmt(p.stdev)},{_fmt(p.expected_return)}" for p in points)
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit(args, render_json({
            "gmv_return": model.gmv_return,
            "points": [[p.stdev, p.expected_return] for p in points],
        }))
    return 0


def _cmd_classify(args) -> int:
    tree, _ = read_config_tree(args.config)
    model, _, _ = parse_frontier_section(tree)
    outcome = classify_tangency_regime(model, args.r0)
    label = outcome.label.value.capitalize()
    if args.format == "json":
        _emit(args, render_json({"r0": args.r0, "label": label,
                                 "gmv_return": outcome.gmv_return}))
    else:
        _emit(args, f"{label}\n")
    return 0


def _cmd_simulate(args) -> int:
    if args.config:
        tree, _ = read_config_tree(args.config)
        config, _ = parse_simulator_section(tree)
        category_map, _ = parse_regime_section(tree)
    else:
        config = SimConfig()
        category_map = None
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.regime is not None:
        overrides["regime"] = Regime(args.regime)
    if overrides:
        config = SimConfig(
            base_price=config.base_price, common_vol=config.common_vol,
            divergence_vol=config.divergence_vol,
            crisis_vol_multiplier=config.crisis_vol_multiplier,
            n_steps=config.n_steps, step_days=config.step_days,
            arb_threshold=config.arb_threshold, arb_cost=config.arb_cost,
            baseline_rates=config.baseline_rates,
            regime=overrides.get("regime", config.regime),
            seed=overrides.get("seed", config.seed),
        )
    result = run_scenario(config, category_map) if category_map is not None \
        else run_scenario(config)
    if args.format == "json":
        _emit(args, render_json({
            "seed": config.seed,
            "regime": config.regime.value,
            "r0": result.r0,
            "n_opportunities": len(result.opportunities),
            "mean_arb_return": result.mean_arb_return,
            "source_rates": {e.kind.value: e.rate for e in result.source_rates},
        }))
    else:
        lines = [
            f"seed = {config.seed}",
            f"regime = {config.regime.value}",
            f"opportunities = {len(result.opportunities)}",
            f"mean arb return = {_fmt(result.mean_arb_return)}",
            f"r0 = {_fmt(result.r0)}",
        ]
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_survey(args) -> int:
    rates = ingest_survey(args.file)
    rows = [(country, len(values), survey_spread(values))
            for country, values in sorted(rates.items())]
    if args.format == "json":
        _emit(args, render_json({
            country: {"respondents": count, "minimum": spread.minimum,
                      "maximum": spread.maximum, "spread": spread.spread}
            for country, count, spread in rows
        }))
    elif args.format == "csv":
        lines = ["country,respondents,minimum,maximum,spread"]
        lines.extend(
            f"{country},{count},{_fmt(s.minimum)},{_fmt(s.maximum)},{_fmt(s.spread)}"
            for country, count, s in rows)
        _emit(args, "\n".join(lines) + "\n")
    else:
        lines = [
            f"{country}: n={count} min={_fmt(s.minimum)} "
            f"max={_fmt(s.maximum)} spread={_fmt(s.spread)}"
            for country, count, s in rows
        ]
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_report(args) -> int:
    config = load_config(args.config)
    report = build_report(config, seed=args.seed)
    if args.format == "csv":
        if not args.out:
            raise InputError("--format csv needs --out DIRECTORY "
                             "(one file per section)")
        paths = write_report_csv(report, args.out)
        sys.stdout.write("".join(f"{p}\n" for p in paths))
    else:
        _emit(args, render_json(report_tree(report)))
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_format(parser, choices=("text", "json")) -> None:
    parser.add_argument("--format", choices=choices, default=choices[0],
                        help=f"output format (default: {choices[0]})")


def _add_out(parser) -> None:
    parser.add_argument("--out", metavar="PATH",
                        help="write output to PATH instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Composite risk-free-rate toolkit: compose per-trader "
                    "rates, shift them across regimes, and measure the "
                    "downstream impact on CAPM, frontier geometry, option "
                    "prices and a two-venue crisis simulation.")
    parser.add_argument("--version", action="version", version=_VERSION_TEXT)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("compose", help="blend six source rates into r0")
    p.add_argument("--rates", required=True, metavar="R1,...,R6",
                   help="six source rates in canonical order: government "
                        "bonds, bank deposits, interbank loans, constructor, "
                        "zero-beta shares, arbitrage")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--weights", metavar="W1,...,W6",
                       help="explicit weights (normalized to sum 1)")
    group.add_argument("--regime", choices=("normal", "crisis"),
                       help="use the preset weights for this regime")
    p.add_argument("--category-map", metavar="H,A,L,M",
                   help="significance levels for the preset (with --regime)")
    _add_format(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_compose)

    p = sub.add_parser("estimate", help="estimate the six source rates "
                                        "from a config's inputs")
    p.add_argument("--config", required=True, metavar="PATH")
    _add_format(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_estimate)

    p = sub.add_parser("capm", help="expected return for a beta at a given r0")
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--market-return", type=float, required=True)
    p.add_argument("--r0-new", type=float, default=None,
                   help="also price the same beta at a shifted r0")
    _add_format(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_capm)

    p = sub.add_parser("bs", help="Black-Scholes price (and rho) for one option")
    p.add_argument("--spot", type=float, required=True)
    p.add_argument("--strike", type=float, required=True)
    p.add_argument("--volatility", type=float, required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--expiry", type=float, required=True,
                   help="time to expiry in years")
    p.add_argument("--kind", required=True, help="call or put")
    _add_format(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_bs)

    p = sub.add_parser("frontier", help="minimum-variance frontier points "
                                        "from a config's frontier section")
    p.add_argument("--config", required=True, metavar="PATH")
    _add_format(p, choices=("json", "csv"))
    _add_out(p)
    p.set_defaults(handler=_cmd_frontier)

    p = sub.add_parser("classify", help="tangency regime label for an r0 "
                                        "against a config's frontier model")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--r0", type=float, required=True)
    _add_format(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("simulate", help="run one two-venue crisis scenario")
    p.add_argument("--config", metavar="PATH",
                   help="config with a simulator section (defaults apply "
                        "without one)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--regime", choices=("normal", "crisis"), default=None)
    _add_format(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("survey", help="per-country min/max/spread of "
                                      "surveyed risk-free rates")
    p.add_argument("--file", required=True, metavar="PATH",
                   help="CSV with header country,respondent_id,risk_free_rate")
    _add_format(p, choices=("text", "json", "csv"))
    _add_out(p)
    p.set_defaults(handler=_cmd_survey)

    p = sub.add_parser("report", help="full deterministic report from a config")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--seed", type=int, default=None,
                   help="override the simulator seed")
    _add_format(p, choices=("json", "csv"))
    _add_out(p)
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags, 0 on --help
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (InputError, IoError) as exc:
        print(f"{TOOL_NAME}: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"{TOOL_NAME}: numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
