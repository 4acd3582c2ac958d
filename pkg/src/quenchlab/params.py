"""Equation parameters, regime classification and the explicit constants.

The model is ``u_t - Lap(u^m) + lam * u^(-beta) * chi{u>0} = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    BetaOutsideWindow,
    DegenerateConstant,
    InvalidParameters,
    RegimeNotApplicable,
)


@dataclass(frozen=True)
class ModelParams:
    m: float
    beta: float
    n_dim: int
    lam: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m >= 1.0):
            raise InvalidParameters(f"m must be >= 1, got {self.m}")
        if not (math.isfinite(self.beta) and self.beta > 0.0):
            raise InvalidParameters(f"beta must be > 0, got {self.beta}")
        if int(self.n_dim) != self.n_dim or self.n_dim < 1:
            raise InvalidParameters(f"n_dim must be an integer >= 1, got {self.n_dim}")
        if not (math.isfinite(self.lam) and self.lam > 0.0):
            raise InvalidParameters(f"lambda must be > 0, got {self.lam}")

    @property
    def gamma(self) -> float:
        """``2/(m+beta)``; the gradient estimates bound ``u^(1/gamma)``."""
        return 2.0 / (self.m + self.beta)

    @property
    def delta_mn(self) -> float:
        return 1.0 - (self.n_dim - 1) * (self.m - 1.0) ** 2

    def with_lambda(self, lam: float) -> "ModelParams":
        return ModelParams(self.m, self.beta, self.n_dim, lam)


@dataclass(frozen=True)
class RegimeReport:
    absorption_dominates: bool
    delta_mn: float
    m_n_window: bool
    beta_in_window: bool
    universal_bound_applicable: bool
    diffusion_dominates_1d: bool
    beta_lt_m: bool


def beta_window(params: ModelParams) -> tuple[float, float] | None:
    """Open interval of admissible beta, or None when ``delta_mn <= 0``."""
    d = params.delta_mn
    if d <= 0.0:
        return None
    root = math.sqrt(d)
    return max(params.m - 1.0 - root, 0.0), params.m - 1.0 + root


def classify(params: ModelParams) -> RegimeReport:
    m, beta, n = params.m, params.beta, params.n_dim
    if m > 2.0 and n > 1:
        raise RegimeNotApplicable(
            f"m={m} > 2 is only covered in one space dimension (got N={n})"
        )
    window = beta_window(params)
    in_window = window is not None and window[0] < beta < window[1]
    if n == 1:
        mn_window = True
    else:
        mn_window = m < 1.0 + 1.0 / math.sqrt(n - 1)
    return RegimeReport(
        absorption_dominates=1.0 <= m < 2.0 + beta,
        delta_mn=params.delta_mn,
        m_n_window=mn_window,
        beta_in_window=in_window,
        universal_bound_applicable=(beta + m <= 2.0) and in_window,
        diffusion_dominates_1d=(n == 1 and m >= beta + 2.0),
        beta_lt_m=beta < m,
    )


def universal_gradient_constant(params: ModelParams) -> float:
    """Time-uniform bound on ``|grad u^((m+beta)/2)|`` when ``m + beta <= 2``."""
    m, beta = params.m, params.beta
    gap = params.delta_mn - (beta + 1.0 - m) ** 2
    if gap <= 0.0:
        raise BetaOutsideWindow(
            f"beta={beta} lies outside the open admissible window for m={m}, "
            f"N={params.n_dim}"
        )
    if beta + m > 2.0:
        raise RegimeNotApplicable(f"m + beta = {m + beta} > 2")
    return (m + beta) * math.sqrt(2.0 + beta - m) / math.sqrt(2.0 * m * gap)


def stationary_constant(params: ModelParams) -> float:
    """Coefficient ``C`` making ``C^(1/m) |x-x0|^(2/(m+beta))`` an exact steady state."""
    m, beta, n, lam = params.m, params.beta, params.n_dim, params.lam
    denom = n * (m + beta) - 2.0 * beta
    if denom <= 0.0:
        raise DegenerateConstant(
            f"N(m+beta) - 2 beta = {denom} <= 0 (N={n}, m={m}, beta={beta})"
        )
    return (lam * (m + beta) ** 2 / (2.0 * m * denom)) ** (m / (m + beta))


def general_barrier_constant(n_dim: int, q: float, lam: float) -> float:
    """Coefficient making ``C |x-x0|^(2/(1-q))`` solve ``-Lap v + lam v^q = 0``."""
    if q >= 1.0:
        raise DegenerateConstant(f"q must be < 1, got {q}")
    denom = n_dim * (1.0 - q) + 2.0 * q
    if denom <= 0.0:
        raise DegenerateConstant(f"N(1-q) + 2q = {denom} <= 0")
    return (lam * (1.0 - q) ** 2 / (2.0 * denom)) ** (1.0 / (1.0 - q))


def smoothing_exponents(params: ModelParams) -> tuple[float, float]:
    """``(alpha, sigma)`` of the L1 -> Linf smoothing effect."""
    n, m = params.n_dim, params.m
    d = n * (m - 1.0) + 2.0
    return n / d, 2.0 / d


def omega_candidates(params: ModelParams) -> dict[str, float]:
    """Candidate small-time exponents for ``||grad u^(1/gamma)(t)||_inf``.

    Two closed forms are printed for the same quantity and the intermediate
    estimate suggests a third; none of them is treated as authoritative.
    """
    alpha, _ = smoothing_exponents(params)
    m, beta = params.m, params.beta
    return {
        "m_ge_1": alpha + 1.0,
        "m_gt_1": (beta + m) / (m - 1.0) if m > 1.0 else math.inf,
        "alt": alpha * (1.0 + beta) + 1.0,
    }
