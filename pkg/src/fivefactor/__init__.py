"""Five-factor capital market model: exact simulation, curves and portfolio analytics."""

from .analytics import PortfolioSpec, asymptotic_vol_rates, factor_weights, sharpe_distribution
from .corrcheck import CorrTriple
from .curves import PricingParams, bei, inflation_bond_price, zcb_price, zcb_yield
from .moments import ModelParams, State, cov_matrix
from .sim import TimeGrid, euler_simulate, simulate

__version__ = "0.1.0"
