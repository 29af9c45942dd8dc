"""rfr-kit: composite risk-free-rate toolkit.

Composes a per-trader risk-free rate from six income sources, shifts the
source weights between normal and crisis regimes, and quantifies what the
rate choice does to CAPM returns, mean-variance portfolio geometry and
Black-Scholes option prices.  Includes a seeded two-venue crisis simulator
and a CLI (`rfr-kit`).
"""

__version__ = "0.1.0"

from .rate_model import (  # noqa: F401
    DEFAULT_CATEGORY_MAP,
    RateComposition,
    Regime,
    SignificanceLevel,
    SourceEstimate,
    SourceKind,
    WeightVector,
    compose,
    normalize_weights,
    regime_preset,
    survey_spread,
)
from .source_estimators import (  # noqa: F401
    ArbitrageLeg,
    BondSpec,
    MoneyMarketQuote,
    ReturnSeries,
    annualize_money_market,
    arbitrage_return,
    bond_ytm,
    constructor_rate,
    estimate_beta,
    zero_beta_screen,
)
from .pricing_models import (  # noqa: F401
    CapmInput,
    OptionKind,
    OptionSpec,
    bs_price,
    bs_rho,
    capm_expected_return,
    capm_rate_sensitivity,
    rate_shift_report,
)
from .portfolio_engine import (  # noqa: F401
    FrontierModel,
    FrontierRegime,
    PortfolioPoint,
    TangencyRegime,
    cal_slope,
    classify_tangency_regime,
    frontier_points,
    gmv_portfolio,
    tangency_portfolio,
)
from .crisis_sim import (  # noqa: F401
    BatchSummary,
    Opportunity,
    ScenarioResult,
    SimConfig,
    batch_compare,
    detect_arbitrage,
    run_scenario,
    simulate_dual_listing,
)
from .ingest import (  # noqa: F401
    PriceSeries,
    ingest_prices,
    ingest_returns,
    ingest_survey,
)
from .reporting import (  # noqa: F401
    Report,
    RunConfig,
    build_report,
    load_config,
    render_json,
    report_tree,
    write_report_csv,
)
