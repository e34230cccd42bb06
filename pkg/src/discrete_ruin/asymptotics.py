"""Large-capital approximation of the ruin probability for regularly varying claims.

For a retained loss with tail index ``alpha``::

    psi_n(u, s) ~ c_n(s) * Vbar(u)            (u -> infinity)
    c_n(s) = sum_j P[s, j] (1 + c_{n-1}(j)) (1 + i_j) ** -alpha,   c_0 = 0
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .claims import RetainedLoss
from .engine import RuinTable
from .errors import DomainError, UnsupportedError
from .market import InterestChain


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """``values[k, s]`` is ``c_k`` for initial state ``s``; row 0 is identically zero."""

    values: np.ndarray
    alpha: float

    @property
    def horizon(self) -> int:
        return self.values.shape[0] - 1

    def __call__(self, n: int, s: int) -> float:
        return float(self.values[n, s])


def coefficients(chain: InterestChain, alpha: float, n: int) -> AsymptoticCoefficients:
    if not alpha > 0:
        raise DomainError(f"tail index must be positive, got {alpha}")
    if np.any(1.0 + chain.rates <= 0):
        raise DomainError("discount factors require 1 + rate > 0 in every state")
    discount = (1.0 + chain.rates) ** (-alpha)
    values = np.zeros((n + 1, chain.n_states))
    for k in range(1, n + 1):
        values[k] = chain.P @ ((1.0 + values[k - 1]) * discount)
    return AsymptoticCoefficients(values, float(alpha))


def asymptotic_psi(u, s: int, coeffs: AsymptoticCoefficients, retained: RetainedLoss, n: int | None = None):
    """``c_n(s) * Vbar(u)``; ``n`` defaults to the coefficients' horizon."""
    tail = retained.tail_index
    if tail is None:
        raise UnsupportedError(f"{retained.base.kind} claims do not have a regularly varying tail")
    if abs(tail - coeffs.alpha) > 1e-12:
        raise DomainError(f"coefficients built for alpha={coeffs.alpha}, loss has tail index {tail}")
    n = coeffs.horizon if n is None else n
    out = coeffs(n, s) * np.asarray(retained.survival(u), dtype=float)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RatioSeries:
    u: np.ndarray
    psi: np.ndarray
    approx: np.ndarray
    ratio: np.ndarray
    excluded: np.ndarray


def convergence_ratio(table: RuinTable, coeffs: AsymptoticCoefficients, retained: RetainedLoss, u_list, s: int) -> RatioSeries:
    """``psi_n(u, s) / (c_n(s) Vbar(u))`` at the table's horizon; points with ``Vbar(u) = 0`` are excluded."""
    n = table.horizon
    u = np.asarray(u_list, dtype=float)
    approx = np.atleast_1d(asymptotic_psi(u, s, coeffs, retained, n))
    keep = approx > 0
    psi = np.atleast_1d(table.psi(n, s, u[keep]))
    return RatioSeries(u[keep], psi, approx[keep], psi / approx[keep], u[~keep])
