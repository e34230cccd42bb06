"""Adjustment coefficient and the exponential (Lundberg-type) ruin bound.

The adjustment coefficient ``R`` is the positive root of
``log E exp(R h(Z, b)) = R c(b)``.  The bound is

    psi_n(u, s) <= xi * sum_t P[s, t] exp(-R u (1 + i_t))

with ``xi = sup_{x >= c(b)} exp(R x) Vbar(x) / int_x^inf exp(R z) dV(z)``,
which reduces to ``1 - b mu R`` for exponential claims.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .claims import ClaimModel, Exponential
from .contract import ReinsuranceTerms, net_profit_ok, retained_premium
from .errors import DivergenceError, DomainError, NoAdjustmentCoefficientError, UnsupportedError
from .market import InterestChain

SCAN_STEPS = 64


@dataclass(frozen=True)
class LundbergResult:
    R: float
    xi: float
    terms: ReinsuranceTerms
    model: ClaimModel
    premium: float
    residual: float


def _log_mgf_gap(loss, c):
    def f(r):
        return loss.log_mgf(r) - r * c

    return f


def solve_R(model: ClaimModel, terms: ReinsuranceTerms) -> LundbergResult:
    """Positive adjustment coefficient for ``model`` under ``terms``.

    Scans ``(0, abscissa)`` on a 64-point grid, geometric toward both ends,
    for the sign change of ``log M(R) - R c(b)`` and refines it with Brent's
    method.  ``xi`` is filled in from :func:`xi_closed_form` for exponential
    claims and :func:`xi_numeric_sup` otherwise.
    """
    if model.tail_index is not None or model.mgf_abscissa <= 0:
        raise NoAdjustmentCoefficientError(
            f"{model.kind} claims are heavy-tailed; the adjustment coefficient does not exist"
        )
    if not net_profit_ok(terms, model.mean):
        raise NoAdjustmentCoefficientError(
            f"net-profit condition fails at b={terms.b}; no positive adjustment coefficient"
        )
    loss = model.retained(terms.b)
    c = retained_premium(terms, model.mean)
    f = _log_mgf_gap(loss, c)
    top = loss.mgf_abscissa
    if not np.isfinite(top):
        # bounded support or mgf finite everywhere: grow until f turns positive
        top = 1.0 / loss.mean
        while f(top) <= 0:
            top *= 2.0
            if top > 1e12:
                raise NoAdjustmentCoefficientError("no sign change found for the adjustment coefficient")
    half = SCAN_STEPS // 2
    fractions = np.concatenate([np.geomspace(1e-12, 0.5, half), 1.0 - np.geomspace(0.5, 1e-12, half)[1:]])
    points = top * np.unique(fractions)
    lo = hi = None
    prev_r = None
    for r in points:
        try:
            val = f(r)
        except DivergenceError:
            break
        if val > 0 and prev_r is not None:
            lo, hi = prev_r, r
            break
        if val < 0:
            prev_r = r
    if lo is None:
        raise NoAdjustmentCoefficientError("no sign change found for the adjustment coefficient")
    R = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    residual = abs(loss.mgf(R) - np.exp(R * c))
    partial = LundbergResult(R, np.nan, terms, model, c, residual)
    if isinstance(model, Exponential):
        xi = xi_closed_form(partial)
    else:
        xi = xi_numeric_sup(model, terms, R)
    return LundbergResult(R, xi, terms, model, c, residual)


def xi_closed_form(result: LundbergResult) -> float:
    """``1 - b mu R`` for exponential claims with mean ``mu``."""
    if not isinstance(result.model, Exponential):
        raise UnsupportedError("closed-form xi only holds for exponential claims")
    return 1.0 - result.terms.b * result.model.mean * result.R


def _tail_ratio(loss, R, x):
    """``exp(R x) Vbar(x) / int_x^inf exp(R z) v(z) dz`` with the exponentials cancelled."""
    surv = float(loss.survival(x))
    if surv <= 0.0:
        return np.nan

    def integrand(t):
        d = float(loss.density(x + t))
        return 0.0 if d == 0.0 else np.exp(R * t) * d / surv

    val, _ = integrate.quad(integrand, 0.0, np.inf, limit=200, epsabs=1e-13, epsrel=1e-12)
    return 1.0 / val


def xi_numeric_sup(model: ClaimModel, terms: ReinsuranceTerms, R: float, points: int = 64) -> float:
    """Supremum of the tail ratio over a geometric grid of ``x`` starting at ``c(b)``.

    The grid runs up to the ``1 - 1e-12`` quantile of the retained loss (at
    least ``2 c(b)``); the result is clipped to ``(0, 1]``.
    """
    loss = model.retained(terms.b)
    if not R < loss.mgf_abscissa:
        raise DomainError(f"tail integral diverges: R={R} is not below the mgf abscissa {loss.mgf_abscissa}")
    c = retained_premium(terms, model.mean)
    if c <= 0:
        raise DomainError(f"retained premium must be positive, got {c}")
    top = max(2.0 * c, float(loss.ppf(1.0 - 1e-12)))
    xs = np.geomspace(c, top, points)
    ratios = np.array([_tail_ratio(loss, R, x) for x in xs])
    best = float(np.nanmax(ratios))
    return float(min(max(best, np.finfo(float).tiny), 1.0))


def upper_bound(u, s: int, result: LundbergResult, chain: InterestChain, allow_negative_rates: bool = False):
    """Unclipped bound ``xi * sum_t P[s, t] exp(-R u (1 + i_t))``; may exceed 1."""
    if not allow_negative_rates and np.any(chain.rates < 0):
        raise DomainError("the exponential bound is only established for nonnegative interest rates")
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise DomainError("capital must be nonnegative")
    total = np.zeros(u.shape)
    for t, rate in enumerate(chain.rates):
        total = total + chain.P[s, t] * np.exp(-result.R * u * (1.0 + rate))
    out = result.xi * total
    return float(out) if out.ndim == 0 else out
