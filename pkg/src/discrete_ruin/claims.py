"""Claim-size distributions and the proportional retention of a loss.

Two families are provided, :class:`Exponential` (light tail) and
:class:`Pareto` (regularly varying tail).  Both are parameterised by their
mean so that the per-period expected loss can serve as the monetary unit.
Other distributions can be plugged in by subclassing :class:`ClaimModel` and
implementing ``survival``, ``density`` and ``ppf``.

All evaluation methods accept scalars or numpy arrays and return the same
shape (a Python float for scalar input).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DivergenceError, DomainError, UnsupportedError


def _out(values):
    values = np.asarray(values, dtype=float)
    return float(values) if values.ndim == 0 else values


class ClaimModel:
    """Distribution of the total loss in one period."""

    kind = "generic"
    #: lower end of the support
    support_low = 0.0
    #: tail index if the survival function is regularly varying, else None
    tail_index: float | None = None
    #: abscissa of convergence of the moment generating function
    mgf_abscissa = np.inf

    @property
    def mean(self) -> float:
        raise NotImplementedError

    def survival(self, x):
        raise NotImplementedError

    def density(self, x):
        raise NotImplementedError

    def ppf(self, q):
        raise NotImplementedError

    def cdf(self, x):
        return _out(1.0 - np.asarray(self.survival(x), dtype=float))

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-cdf draws using ``rng``."""
        return self.ppf(rng.random(size))

    def mgf(self, z: float) -> float:
        """E exp(z Z), by quadrature unless a subclass knows better."""
        if z >= self.mgf_abscissa:
            raise DivergenceError(f"mgf diverges at z={z} (abscissa {self.mgf_abscissa})")
        val, _ = integrate.quad(
            lambda x: np.exp(z * x) * self.density(x), self.support_low, np.inf, limit=200
        )
        return val

    def log_mgf(self, z: float) -> float:
        return float(np.log(self.mgf(z)))

    def retained(self, b: float) -> "RetainedLoss":
        return RetainedLoss(self, b)


@dataclass(frozen=True)
class Exponential(ClaimModel):
    mu: float = 1.0

    kind = "exponential"

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError(f"mean must be positive, got {self.mu}")

    @property
    def mean(self) -> float:
        return self.mu

    @property
    def mgf_abscissa(self) -> float:
        return 1.0 / self.mu

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.exp(-np.maximum(x, 0.0) / self.mu))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.where(x >= 0.0, np.exp(-np.maximum(x, 0.0) / self.mu) / self.mu, 0.0))

    def ppf(self, q):
        return _out(-self.mu * np.log1p(-np.asarray(q, dtype=float)))

    def mgf(self, z: float) -> float:
        if z * self.mu >= 1.0:
            raise DivergenceError(f"exponential mgf diverges for z >= {1.0 / self.mu}")
        return 1.0 / (1.0 - self.mu * z)

    def log_mgf(self, z: float) -> float:
        if z * self.mu >= 1.0:
            raise DivergenceError(f"exponential mgf diverges for z >= {1.0 / self.mu}")
        return -float(np.log1p(-self.mu * z))


@dataclass(frozen=True)
class Pareto(ClaimModel):
    """Pareto with cdf ``1 - (beta/x)**alpha`` on ``x >= beta``.

    The scale is derived from the mean: ``beta = mu * (alpha - 1) / alpha``.
    """

    alpha: float = 1.25
    mu: float = 1.0

    kind = "pareto"
    mgf_abscissa = 0.0

    def __post_init__(self):
        if not self.alpha > 1:
            raise DomainError(f"Pareto shape must exceed 1 for a finite mean, got {self.alpha}")
        if not self.mu > 0:
            raise DomainError(f"mean must be positive, got {self.mu}")

    @property
    def beta(self) -> float:
        return self.mu * (self.alpha - 1.0) / self.alpha

    @property
    def support_low(self) -> float:
        return self.beta

    @property
    def tail_index(self) -> float:
        return self.alpha

    @property
    def mean(self) -> float:
        return self.mu

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        beta = self.beta
        with np.errstate(divide="ignore"):
            tail = (beta / np.maximum(x, beta)) ** self.alpha
        return _out(tail)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        beta = self.beta
        safe = np.maximum(x, beta)
        return _out(np.where(x >= beta, self.alpha * beta**self.alpha * safe ** -(self.alpha + 1.0), 0.0))

    def ppf(self, q):
        return _out(self.beta * (1.0 - np.asarray(q, dtype=float)) ** (-1.0 / self.alpha))

    def mgf(self, z: float) -> float:
        if z <= 0:
            return super().mgf(z)
        raise UnsupportedError("Pareto claims have no moment generating function for z > 0")


@dataclass(frozen=True)
class RetainedLoss:
    """The part ``b * Z`` of a loss kept under proportional reinsurance."""

    base: ClaimModel
    b: float

    def __post_init__(self):
        if not 0.0 < self.b <= 1.0:
            raise DomainError(f"retention must lie in (0, 1], got {self.b}")

    @property
    def mean(self) -> float:
        return self.b * self.base.mean

    @property
    def support_low(self) -> float:
        return self.b * self.base.support_low

    @property
    def tail_index(self):
        return self.base.tail_index

    @property
    def mgf_abscissa(self) -> float:
        return self.base.mgf_abscissa / self.b

    def cdf(self, z):
        return self.base.cdf(np.asarray(z, dtype=float) / self.b)

    def survival(self, z):
        return self.base.survival(np.asarray(z, dtype=float) / self.b)

    def density(self, z):
        return _out(np.asarray(self.base.density(np.asarray(z, dtype=float) / self.b)) / self.b)

    def ppf(self, q):
        return _out(self.b * np.asarray(self.base.ppf(q)))

    def sample(self, rng: np.random.Generator, size=None):
        return _out(self.b * np.asarray(self.base.sample(rng, size)))

    def mgf(self, z: float) -> float:
        return self.base.mgf(self.b * z)

    def log_mgf(self, z: float) -> float:
        return self.base.log_mgf(self.b * z)


def cdf(model, x):
    return model.cdf(x)


def density(model, x):
    return model.density(x)


def retained(model: ClaimModel, b: float) -> RetainedLoss:
    return RetainedLoss(model, b)


def sample(model, rng: np.random.Generator, size=None):
    return model.sample(rng, size)


def mgf_exponential(model: ClaimModel, b: float, z: float) -> float:
    """Moment generating function ``1 / (1 - b mu z)`` of the retained exponential loss."""
    if not isinstance(model, Exponential):
        raise UnsupportedError(f"{model.kind} claims have no closed-form mgf")
    return RetainedLoss(model, b).mgf(z)
