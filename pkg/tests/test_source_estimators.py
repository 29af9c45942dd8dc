import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rfr_kit.errors import (
    InvalidBond,
    InvalidLeg,
    InvalidQuote,
    LengthMismatch,
    NoConvergence,
    ZeroMarketVariance,
)
from rfr_kit.source_estimators import (
    ArbitrageLeg,
    BondSpec,
    MoneyMarketQuote,
    ReturnSeries,
    ScreenSkipWarning,
    annualize_money_market,
    arbitrage_return,
    bond_price,
    bond_ytm,
    constructor_rate,
    estimate_beta,
    zero_beta_screen,
)

# Frozen oracles, computed before the build:
# - hand covariance/variance of the four-point series below: cov = 1.15e-3/3,
#   var = 8.75e-4/3, beta = 1.15/0.875 = 46/35
BETA_ORACLE = 46.0 / 35.0
# - (1 + 0.005)^(365/30) - 1 at 50-digit precision
ARB_ANNUALIZED_ORACLE = 0.06256070579584206


class TestBondSpec:
    def test_empty_cashflows_rejected(self):
        with pytest.raises(InvalidBond):
            BondSpec(cashflows=(), price=100.0)

    def test_non_increasing_times_rejected(self):
        with pytest.raises(InvalidBond):
            BondSpec(cashflows=((1.0, 5.0), (1.0, 105.0)), price=100.0)

    def test_zero_time_rejected(self):
        with pytest.raises(InvalidBond):
            BondSpec(cashflows=((0.0, 100.0),), price=99.0)

    def test_negative_amount_rejected(self):
        with pytest.raises(InvalidBond):
            BondSpec(cashflows=((1.0, -5.0),), price=10.0)

    def test_non_positive_price_rejected(self):
        with pytest.raises(InvalidBond):
            BondSpec(cashflows=((1.0, 100.0),), price=0.0)

    def test_absurd_price_rejected(self):
        with pytest.raises(InvalidBond):
            BondSpec(cashflows=((1.0, 100.0),), price=1.0e9)


class TestBondYtm:
    def test_par_zero_coupon(self):
        bond = BondSpec(cashflows=((1.0, 100.0),), price=100.0)
        assert bond_ytm(bond) == pytest.approx(0.0, abs=1e-10)

    def test_one_period_discount(self):
        bond = BondSpec(cashflows=((1.0, 100.0),), price=100.0 / 1.10)
        assert bond_ytm(bond) == pytest.approx(0.10, abs=1e-10)

    def test_par_coupon_bond(self):
        bond = BondSpec(cashflows=((1.0, 5.0), (2.0, 105.0)), price=100.0)
        assert bond_ytm(bond) == pytest.approx(0.05, abs=1e-10)

    def test_premium_bond_roundtrip(self):
        # priced from yield 4%: 5/1.04 + 105/1.04^2 (frozen high-precision value)
        bond = BondSpec(cashflows=((1.0, 5.0), (2.0, 105.0)),
                        price=101.88609467455622)
        assert bond_ytm(bond) == pytest.approx(0.04, abs=1e-9)

    def test_reprice_inversion_randomized(self):
        rng = random.Random(17)
        for _ in range(200):
            n = rng.randint(1, 10)
            coupon = rng.uniform(0.0, 12.0)
            face = rng.uniform(50.0, 150.0)
            flows = [(float(t), coupon + 1e-9) for t in range(1, n)]
            flows.append((float(n), face + coupon))
            y_true = rng.uniform(-0.2, 0.5)
            bond = BondSpec(tuple(flows), price=1.0)
            price = bond_price(bond, y_true)
            bond = BondSpec(tuple(flows), price=price)
            y = bond_ytm(bond)
            assert abs(bond_price(bond, y) - price) <= 1e-8

    def test_lower_price_higher_yield(self):
        flows = ((1.0, 6.0), (2.0, 6.0), (3.0, 106.0))
        y_cheap = bond_ytm(BondSpec(flows, price=90.0))
        y_rich = bond_ytm(BondSpec(flows, price=110.0))
        assert y_cheap > y_rich

    def test_out_of_bracket_price_rejected(self):
        # price above the value at y = -0.99 cannot be matched
        bond_hi = BondSpec(cashflows=((1.0, 1.0),), price=500.0)
        with pytest.raises(NoConvergence):
            bond_ytm(bond_hi)
        # price below the value at y = 10.0 cannot be matched either
        bond_lo = BondSpec(cashflows=((1.0, 100.0),), price=1.0)
        with pytest.raises(NoConvergence):
            bond_ytm(bond_lo)


class TestMoneyMarket:
    def test_thirty_day_360(self):
        q = MoneyMarketQuote(period_return=0.01, term_days=30, day_basis=360)
        assert annualize_money_market(q) == pytest.approx(0.12, rel=1e-14)

    def test_zero_rate(self):
        q = MoneyMarketQuote(period_return=0.0, term_days=90)
        assert annualize_money_market(q) == 0.0

    def test_full_year_identity(self):
        q = MoneyMarketQuote(period_return=0.02, term_days=365, day_basis=365)
        assert annualize_money_market(q) == pytest.approx(0.02, rel=1e-14)

    def test_bad_basis_rejected(self):
        with pytest.raises(InvalidQuote):
            MoneyMarketQuote(period_return=0.01, term_days=30, day_basis=364)

    def test_bad_term_rejected(self):
        with pytest.raises(InvalidQuote):
            MoneyMarketQuote(period_return=0.01, term_days=0)


class TestConstructorRate:
    def test_base_plus_single_premium(self):
        assert constructor_rate(0.02, [0.03]) == pytest.approx(0.05, rel=1e-14)

    def test_empty_premiums(self):
        assert constructor_rate(0.02, []) == 0.02

    def test_two_premiums(self):
        assert constructor_rate(0.01, [0.02, 0.015]) == pytest.approx(0.045, rel=1e-14)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            constructor_rate(math.nan, [])
        with pytest.raises(ValueError):
            constructor_rate(0.02, [math.inf])


class TestEstimateBeta:
    def test_self_regression(self):
        s = ReturnSeries("mkt", (0.01, -0.02, 0.03, 0.005))
        assert estimate_beta(s, s) == pytest.approx(1.0, rel=1e-14)

    def test_constant_asset(self):
        asset = ReturnSeries("flat", (0.01, 0.01, 0.01))
        market = ReturnSeries("mkt", (0.02, -0.01, 0.03))
        assert estimate_beta(asset, market) == 0.0

    def test_hand_covariance_oracle(self):
        asset = ReturnSeries("a", (0.01, 0.03, -0.02, 0.04))
        market = ReturnSeries("m", (0.02, 0.01, -0.01, 0.03))
        assert estimate_beta(asset, market) == pytest.approx(BETA_ORACLE, rel=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            estimate_beta(ReturnSeries("a", (0.01,)), ReturnSeries("m", (0.01, 0.02)))

    def test_flat_market_rejected(self):
        asset = ReturnSeries("a", (0.01, 0.02, 0.03))
        market = ReturnSeries("m", (0.02, 0.02, 0.02))
        with pytest.raises(ZeroMarketVariance):
            estimate_beta(asset, market)

    def test_too_short_rejected(self):
        with pytest.raises(ZeroMarketVariance):
            estimate_beta(ReturnSeries("a", (0.01,)), ReturnSeries("m", (0.02,)))

    @given(st.lists(st.floats(-0.2, 0.2), min_size=3, max_size=20),
           st.floats(-5, 5), st.floats(-0.1, 0.1))
    def test_affine_asset_transform(self, market_returns, k, shift):
        if max(market_returns) - min(market_returns) < 1e-3:
            return
        market = ReturnSeries("m", tuple(market_returns))
        base = estimate_beta(market, market)  # 1.0
        scaled = ReturnSeries("s", tuple(k * r + shift for r in market_returns))
        assert estimate_beta(scaled, market) == pytest.approx(k * base, abs=1e-6)


class TestZeroBetaScreen:
    def test_constant_asset_is_hit(self):
        market = ReturnSeries("m", (0.02, -0.01, 0.03, 0.01))
        flat = ReturnSeries("flat", (0.005, 0.005, 0.005, 0.005))
        hits = zero_beta_screen([flat], market, epsilon=0.01, periods_per_year=12)
        assert len(hits) == 1
        assert hits[0].asset_id == "flat"
        assert hits[0].beta == 0.0
        assert hits[0].mean_return == pytest.approx(0.005 * 12, rel=1e-14)

    def test_market_itself_excluded(self):
        market = ReturnSeries("m", (0.02, -0.01, 0.03, 0.01))
        hits = zero_beta_screen([market], market, epsilon=0.5, periods_per_year=12)
        assert hits == []

    def test_membership_matches_bruteforce(self):
        rng = random.Random(23)
        market = ReturnSeries("m", tuple(rng.gauss(0, 0.02) for _ in range(24)))
        universe = []
        for i in range(12):
            loading = rng.uniform(-0.3, 0.3)
            rets = tuple(loading * rm + rng.gauss(0, 0.01) for rm in market.returns)
            universe.append(ReturnSeries(f"asset{i:02d}", rets))
        eps = 0.1
        hits = zero_beta_screen(universe, market, epsilon=eps, periods_per_year=52)
        expected = {a.asset_id for a in universe
                    if abs(estimate_beta(a, market)) <= eps}
        assert {h.asset_id for h in hits} == expected

    def test_sorted_by_abs_beta_then_id(self):
        market = ReturnSeries("m", (0.02, -0.01, 0.03, 0.01, -0.02, 0.015))
        mk = market.returns
        a = ReturnSeries("bbb", tuple(0.05 * r for r in mk))
        b = ReturnSeries("aaa", tuple(-0.05 * r for r in mk))
        c = ReturnSeries("ccc", tuple(0.01 * r for r in mk))
        hits = zero_beta_screen([a, b, c], market, epsilon=0.2, periods_per_year=12)
        assert [h.asset_id for h in hits] == ["ccc", "aaa", "bbb"]

    def test_bad_series_skipped_with_warning(self):
        market = ReturnSeries("m", (0.02, -0.01, 0.03, 0.01))
        short = ReturnSeries("short", (0.01, 0.02))
        flat = ReturnSeries("flat", (0.0, 0.0, 0.0, 0.0))
        with pytest.warns(ScreenSkipWarning):
            hits = zero_beta_screen([short, flat], market, epsilon=0.01,
                                    periods_per_year=12)
        assert [h.asset_id for h in hits] == ["flat"]

    def test_periods_per_year_is_required_keyword(self):
        market = ReturnSeries("m", (0.02, -0.01, 0.03, 0.01))
        with pytest.raises(TypeError):
            zero_beta_screen([market], market, 0.5, 12)  # noqa

    def test_bad_epsilon_rejected(self):
        market = ReturnSeries("m", (0.02, -0.01, 0.03))
        with pytest.raises(ValueError):
            zero_beta_screen([market], market, epsilon=0.0, periods_per_year=12)


class TestArbitrageReturn:
    def test_double_price_gross(self):
        out = arbitrage_return(ArbitrageLeg(buy_price=50.0, sell_price=100.0))
        assert out.gross == 1.0
        assert out.annualized is None

    def test_no_spread(self):
        out = arbitrage_return(ArbitrageLeg(buy_price=80.0, sell_price=80.0))
        assert out.gross == 0.0

    def test_compounding_oracle(self):
        leg = ArbitrageLeg(buy_price=100.0, sell_price=101.0, costs=0.5,
                           holding_days=30)
        out = arbitrage_return(leg)
        assert out.gross == pytest.approx(0.005, rel=1e-14)
        assert out.annualized == pytest.approx(ARB_ANNUALIZED_ORACLE, rel=1e-12)

    def test_undated_not_annualizable(self):
        out = arbitrage_return(ArbitrageLeg(buy_price=100.0, sell_price=105.0,
                                            holding_days=0))
        assert out.annualized is None

    def test_total_loss_floored(self):
        leg = ArbitrageLeg(buy_price=100.0, sell_price=1.0, costs=99.5,
                           holding_days=10)
        out = arbitrage_return(leg)
        assert out.gross < -1.0
        assert out.annualized == -1.0

    def test_monotone_in_leg_fields(self):
        base = dict(buy_price=100.0, sell_price=105.0, costs=1.0, holding_days=5)
        g = arbitrage_return(ArbitrageLeg(**base)).gross
        assert arbitrage_return(ArbitrageLeg(**{**base, "sell_price": 106.0})).gross > g
        assert arbitrage_return(ArbitrageLeg(**{**base, "buy_price": 101.0})).gross < g
        assert arbitrage_return(ArbitrageLeg(**{**base, "costs": 2.0})).gross < g

    def test_invalid_leg_rejected(self):
        with pytest.raises(InvalidLeg):
            ArbitrageLeg(buy_price=0.0, sell_price=10.0)
        with pytest.raises(InvalidLeg):
            ArbitrageLeg(buy_price=10.0, sell_price=10.0, costs=-1.0)
        with pytest.raises(InvalidLeg):
            ArbitrageLeg(buy_price=10.0, sell_price=10.0, holding_days=-1)
