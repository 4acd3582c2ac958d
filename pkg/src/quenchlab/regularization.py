"""Lipschitz regularization of the singular absorption and the truncations
``T_delta``/``S_delta`` used by the gradient-convergence metric."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import InvalidParameters


def _smoothstep(t):
    return t**3 * (10.0 - 15.0 * t + 6.0 * t**2)


def _smoothstep_prime(t):
    return 30.0 * t**2 * (1.0 - t) ** 2


def psi(s):
    """Nondecreasing C^2 cutoff: 0 on ``s <= 1``, 1 on ``s >= 2``."""
    t = np.clip(np.asarray(s, dtype=float) - 1.0, 0.0, 1.0)
    out = _smoothstep(t)
    return float(out) if out.ndim == 0 else out


def psi_prime(s):
    t = np.asarray(s, dtype=float) - 1.0
    out = np.where((t > 0.0) & (t < 1.0), _smoothstep_prime(np.clip(t, 0.0, 1.0)), 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RegularizedAbsorption:
    """``g_eps(s) = s^(-beta) psi(s/eps)``; zero for ``s <= eps``."""

    eps: float
    beta: float

    def __post_init__(self):
        if not self.eps > 0:
            raise InvalidParameters(f"eps must be > 0, got {self.eps}")
        if not self.beta > 0:
            raise InvalidParameters(f"beta must be > 0, got {self.beta}")

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        pos = s > self.eps
        safe = np.where(pos, s, 1.0)
        out = np.where(pos, safe ** (-self.beta) * psi(safe / self.eps), 0.0)
        return float(out) if out.ndim == 0 else out

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        pos = s > self.eps
        safe = np.where(pos, s, 1.0)
        d = (
            -self.beta * safe ** (-self.beta - 1.0) * psi(safe / self.eps)
            + safe ** (-self.beta) * psi_prime(safe / self.eps) / self.eps
        )
        out = np.where(pos, d, 0.0)
        return float(out) if out.ndim == 0 else out

    def lipschitz_bound(self, samples: int = 20001) -> float:
        """Sampled bound on ``|g'|``; the maximum sits inside ``(eps, 2 eps]``."""
        s = np.linspace(self.eps, 2.0 * self.eps, samples)
        return float(np.max(np.abs(self.derivative(s))))

    def antiderivative(self, r: float, m: float) -> float:
        """``G(r) = m * int_0^r s^(m-1) g(s) ds``."""
        if r <= self.eps:
            return 0.0
        f = lambda s: m * s ** (m - 1.0) * self(s)
        lo, mid = self.eps, min(r, 2.0 * self.eps)
        val = quad(f, lo, mid, limit=200)[0]
        if r > mid:
            # exact tail where psi = 1
            p = m - self.beta
            if p == 0.0:
                val += m * np.log(r / mid)
            else:
                val += m * (r**p - mid**p) / p
        return float(val)

    def antiderivative_bound(self, r: float, m: float) -> float:
        """Upper bound ``m r^(m-beta)/(m-beta)`` valid when ``beta < m``."""
        if self.beta >= m:
            raise InvalidParameters("bound requires beta < m")
        return m * r ** (m - self.beta) / (m - self.beta)


def g_eps(absorption: RegularizedAbsorption, s):
    return absorption(s)


@dataclass(frozen=True)
class Truncation:
    t_delta: float
    s_delta: float


def truncations(delta: float, s: float) -> Truncation:
    """``T_delta(s)`` (clamp to ``[-delta, delta]``) and ``S_delta(s) = int_0^s T_delta``."""
    if not delta > 0:
        raise InvalidParameters(f"delta must be > 0, got {delta}")
    t = float(np.clip(s, -delta, delta))
    a = abs(s)
    big_s = 0.5 * a * a if a < delta else delta * a - 0.5 * delta * delta
    return Truncation(t_delta=t, s_delta=float(big_s))
