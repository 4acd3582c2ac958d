"""Compiled inner loops of the time integrator."""

import math

import numpy as np
from numba import njit

OK = 0
CFL_VIOLATION = 1
NEWTON_DIVERGENCE = 2
MAX_STEPS = 3

NEWTON_MAX_ITER = 50


@njit(cache=True)
def psi_scalar(t):
    if t <= 1.0:
        return 0.0
    if t >= 2.0:
        return 1.0
    x = t - 1.0
    return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)


@njit(cache=True)
def dpsi_scalar(t):
    if t <= 1.0 or t >= 2.0:
        return 0.0
    x = t - 1.0
    return 30.0 * x * x * (1.0 - x) * (1.0 - x)


@njit(cache=True)
def g_scalar(s, beta, eps):
    if s <= eps:
        return 0.0
    return s ** (-beta) * psi_scalar(s / eps)


@njit(cache=True)
def dg_scalar(s, beta, eps):
    if s <= eps:
        return 0.0
    return -beta * s ** (-beta - 1.0) * psi_scalar(s / eps) + s ** (-beta) * dpsi_scalar(
        s / eps
    ) / eps


@njit(cache=True)
def absorb_exact(u, dt, beta, lam, eps):
    """Advance ``u' = -lam g_eps(u)`` over ``dt``.

    Closed form while ``u >= 2 eps``; once the trajectory enters the cutoff
    layer the remainder of the step is one backward-Euler solve, done by
    Newton iteration safeguarded by a bisection bracket on ``[eps, start]``.
    """
    if u <= eps or dt <= 0.0:
        return u, True
    a = 1.0 + beta
    two_eps = 2.0 * eps
    start = u
    rem = dt
    if u >= two_eps:
        ua = u**a
        floor_a = two_eps**a
        s = ua - a * lam * dt
        if s >= floor_a:
            return s ** (1.0 / a), True
        rem = dt - (ua - floor_a) / (a * lam)
        start = two_eps
        if rem <= 0.0:
            return start, True
    c = rem * lam
    lo = eps
    hi = start
    w = start
    tol = 1e-13 * start
    f_prev = math.inf
    for _ in range(NEWTON_MAX_ITER):
        f = w + c * g_scalar(w, beta, eps) - start
        d = 1.0 + c * dg_scalar(w, beta, eps)
        # residual or Newton correction below rounding level
        if abs(f) <= tol or (d > 0.0 and abs(f) <= 1e-15 * w * d):
            return w, True
        if f > 0.0:
            hi = w
        else:
            lo = w
        if hi - lo <= tol:
            return 0.5 * (lo + hi), True
        wn = 0.5 * (lo + hi)
        # Newton while the residual keeps shrinking, bisection otherwise
        if d > 0.0 and abs(f) < 0.5 * f_prev:
            cand = w - f / d
            if lo < cand < hi:
                wn = cand
        f_prev = abs(f)
        w = wn
    return w, False


@njit(cache=True)
def _power(u, m, out):
    n = u.size
    if m == 1.0:
        for i in range(n):
            out[i] = u[i]
    elif m == 2.0:
        for i in range(n):
            out[i] = u[i] * u[i]
    else:
        for i in range(n):
            out[i] = u[i] ** m


@njit(cache=True)
def advance(
    u,
    coef_lo,
    coef_hi,
    is_bnd,
    vol_zeta,
    t,
    t_target,
    dt_fixed,
    cfl_coef,
    cfl_safety,
    eta_cfl,
    m,
    beta,
    lam,
    eps,
    explicit,
    diffusion,
    absorption,
    quench_tol,
    quench_time,
    steps,
    max_steps,
    absorbed,
):
    """Integrate ``u`` in place from ``t`` to ``t_target``.

    Boundary nodes are never written. Returns
    ``(t, steps, absorbed, quench_time, status, dt_last)``.
    """
    n = u.size
    v = np.empty(n)
    du = np.empty(n)
    dt = 0.0
    while t < t_target:
        if steps >= max_steps:
            return t, steps, absorbed, quench_time, MAX_STEPS, dt
        sup = 0.0
        for i in range(n):
            if u[i] > sup:
                sup = u[i]
        dt_max = math.inf
        if diffusion:
            if m == 1.0:
                dt_max = cfl_safety * cfl_coef
            else:
                base = sup + eta_cfl
                if base > 0.0:
                    dt_max = cfl_safety * cfl_coef * base ** (1.0 - m)
        if dt_fixed > 0.0:
            if dt_fixed > dt_max * (1.0 + 1e-12):
                return t, steps, absorbed, quench_time, CFL_VIOLATION, dt_fixed
            dt = dt_fixed
        else:
            dt = dt_max
        remaining = t_target - t
        last = False
        if dt >= remaining * (1.0 - 1e-10):
            dt = remaining
            last = True

        if diffusion:
            _power(u, m, v)
            for i in range(n):
                if is_bnd[i]:
                    du[i] = 0.0
                    continue
                acc = 0.0
                if i + 1 < n:
                    acc += coef_hi[i] * (v[i + 1] - v[i])
                if i > 0:
                    acc -= coef_lo[i] * (v[i] - v[i - 1])
                du[i] = acc
            for i in range(n):
                if not is_bnd[i]:
                    x = u[i] + dt * du[i]
                    u[i] = x if x > 0.0 else 0.0

        if absorption:
            for i in range(n):
                if is_bnd[i]:
                    continue
                old = u[i]
                if explicit:
                    new = old - dt * lam * g_scalar(old, beta, eps)
                else:
                    new, ok = absorb_exact(old, dt, beta, lam, eps)
                    if not ok:
                        return t, steps, absorbed, quench_time, NEWTON_DIVERGENCE, dt
                if new < 0.0:
                    new = 0.0
                u[i] = new
                absorbed += vol_zeta[i] * (old - new)

        t = t_target if last else t + dt
        steps += 1
        if quench_time < 0.0:
            sup = 0.0
            for i in range(n):
                if u[i] > sup:
                    sup = u[i]
            if sup <= quench_tol:
                quench_time = t
    return t, steps, absorbed, quench_time, OK, dt
