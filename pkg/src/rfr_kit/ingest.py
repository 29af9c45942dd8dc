"""Strict CSV readers for price, survey and return-series files.

All three formats demand an exact header and fail with the offending line
number; rates and returns are decimals (0.05 means 5%), never percents.
"""

from __future__ import annotations

import csv
import math
from datetime import date
from typing import NamedTuple

from .errors import DuplicateRow, EmptyCountry, IoError, NonPositivePrice, ParseError

__all__ = [
    "PRICES_HEADER",
    "SURVEY_HEADER",
    "RETURNS_HEADER",
    "PriceSeries",
    "ingest_prices",
    "ingest_survey",
    "ingest_returns",
]

PRICES_HEADER = ("date", "asset_id", "venue", "price")
SURVEY_HEADER = ("country", "respondent_id", "risk_free_rate")
RETURNS_HEADER = ("asset_id", "period", "return")


class PriceSeries(NamedTuple):
    """Date-sorted prices of one asset on one venue."""

    asset_id: str
    venue: str
    dates: tuple[date, ...]
    prices: tuple[float, ...]


def _open_rows(path, expected_header):
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, expected header "
                             f"{','.join(expected_header)}", line=1) from None
        if tuple(h.strip() for h in header) != expected_header:
            raise ParseError(
                f"{path}: header must be exactly {','.join(expected_header)}, "
                f"got {','.join(header)}", line=1)
        yield from ((i, row) for i, row in enumerate(reader, start=2))


def _parse_float(text, what, line):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{what} {text!r} is not a number", line=line) from None
    if not math.isfinite(value):
        raise ParseError(f"{what} {text!r} must be finite", line=line)
    return value


def ingest_prices(path) -> dict[tuple[str, str], PriceSeries]:
    """Read `date,asset_id,venue,price` rows into per-(asset, venue) series.

    Dates must be ISO-8601, prices strictly positive; a repeated
    (date, asset_id, venue) combination is an error, not a silent override.
    """
    rows: dict[tuple[str, str], list[tuple[date, float]]] = {}
    seen: set[tuple[date, str, str]] = set()
    for line, row in _open_rows(path, PRICES_HEADER):
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", line=line)
        raw_date, asset_id, venue, raw_price = (field.strip() for field in row)
        try:
            day = date.fromisoformat(raw_date)
        except ValueError:
            raise ParseError(f"date {raw_date!r} is not ISO-8601 (YYYY-MM-DD)",
                             line=line) from None
        if not asset_id:
            raise ParseError("asset_id is empty", line=line)
        if not venue:
            raise ParseError("venue is empty", line=line)
        price = _parse_float(raw_price, "price", line)
        if price <= 0.0:
            raise NonPositivePrice(f"price must be > 0, got {price}", line=line)
        key = (day, asset_id, venue)
        if key in seen:
            raise DuplicateRow(
                f"duplicate row for {asset_id} on {venue} at {day.isoformat()}",
                line=line)
        seen.add(key)
        rows.setdefault((asset_id, venue), []).append((day, price))
    out: dict[tuple[str, str], PriceSeries] = {}
    for (asset_id, venue), pairs in rows.items():
        pairs.sort(key=lambda dp: dp[0])
        out[(asset_id, venue)] = PriceSeries(
            asset_id=asset_id,
            venue=venue,
            dates=tuple(d for d, _ in pairs),
            prices=tuple(p for _, p in pairs),
        )
    return out


def ingest_survey(path) -> dict[str, list[float]]:
    """Read `country,respondent_id,risk_free_rate` rows into per-country lists.

    Rates are decimals; row order within a country is preserved.
    """
    out: dict[str, list[float]] = {}
    for line, row in _open_rows(path, SURVEY_HEADER):
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", line=line)
        country, respondent, raw_rate = (field.strip() for field in row)
        if not country:
            raise EmptyCountry("country is empty", line=line)
        if not respondent:
            raise ParseError("respondent_id is empty", line=line)
        rate = _parse_float(raw_rate, "risk_free_rate", line)
        out.setdefault(country, []).append(rate)
    return out


def ingest_returns(path) -> dict[str, list[float]]:
    """Read `asset_id,period,return` rows into per-asset return lists.

    Periods must count 0, 1, 2, ... per asset so every series is complete
    and ordered; returns are per-period decimals.
    """
    out: dict[str, list[float]] = {}
    for line, row in _open_rows(path, RETURNS_HEADER):
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", line=line)
        asset_id, raw_period, raw_return = (field.strip() for field in row)
        if not asset_id:
            raise ParseError("asset_id is empty", line=line)
        try:
            period = int(raw_period)
        except ValueError:
            raise ParseError(f"period {raw_period!r} is not an integer",
                             line=line) from None
        series = out.setdefault(asset_id, [])
        if period != len(series):
            raise ParseError(
                f"{asset_id}: period {period} out of order, expected {len(series)}",
                line=line)
        series.append(_parse_float(raw_return, "return", line))
    return out
