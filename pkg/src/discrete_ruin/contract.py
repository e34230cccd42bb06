"""Proportional reinsurance economics under the expected-value premium principle."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import DomainError


@dataclass(frozen=True)
class ReinsuranceTerms:
    """Insurer loading ``theta``, reinsurer loading ``eta`` and retention ``b``.

    The reinsurer is never cheaper than the insurer: ``eta >= theta > 0``.
    """

    theta: float
    eta: float
    b: float = 1.0

    def __post_init__(self):
        if not self.theta > 0:
            raise DomainError(f"insurer loading theta must be positive, got {self.theta}")
        if not self.eta >= self.theta:
            raise DomainError(f"reinsurer loading eta={self.eta} must be >= theta={self.theta}")
        if not 0.0 < self.b <= 1.0:
            raise DomainError(f"retention b must lie in (0, 1], got {self.b}")

    def with_retention(self, b: float) -> "ReinsuranceTerms":
        return replace(self, b=b)

    @property
    def admissibility_threshold(self) -> float:
        """Retention below or at which the net-profit condition fails."""
        return 1.0 - self.theta / self.eta


def retained_premium(terms: ReinsuranceTerms, mu: float = 1.0) -> float:
    """Premium kept per period, ``((1 + eta) b - (eta - theta)) mu``; can be negative."""
    return ((1.0 + terms.eta) * terms.b - (terms.eta - terms.theta)) * mu


def net_profit_ok(terms: ReinsuranceTerms, mu: float = 1.0) -> bool:
    """True iff the expected retained loss ``b mu`` is below the retained premium.

    The premium surplus ``c(b) - b mu`` equals ``(theta - eta (1 - b)) mu``; that
    form keeps the boundary ``b = 1 - theta/eta`` exact in floating point.
    """
    return (terms.theta - terms.eta * (1.0 - terms.b)) * mu > 0.0
