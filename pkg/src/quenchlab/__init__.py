"""Numerical laboratory for degenerate diffusion with singular absorption."""

from .barriers import BarrierSpec, normalizing_lambda, quench_bounds, stationary_residual
from .config import ExperimentConfig, load_config, parse_config, serialize
from .errors import QuenchlabError
from .grid import Domain, Field, Grid, norms, solve_zeta
from .params import ModelParams, classify, stationary_constant
from .regularization import RegularizedAbsorption, g_eps
from .solver import RunResult, SimConfig, run, step, sweep_limit

__version__ = "0.1.0"
