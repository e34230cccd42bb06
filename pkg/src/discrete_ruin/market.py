"""Per-period interest rates driven by a finite time-homogeneous Markov chain.

States are indexed from 0 in the Python API.  The scenario files and CSV
output use 1-based state labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

ROW_TOL = 1e-12


@dataclass(frozen=True)
class InterestChain:
    rates: np.ndarray
    P: np.ndarray
    pi: np.ndarray = field(default=None)

    def __post_init__(self):
        rates = np.atleast_1d(np.asarray(self.rates, dtype=float))
        P = np.atleast_2d(np.asarray(self.P, dtype=float))
        pi = self.pi
        if pi is None:
            pi = np.full(rates.size, 1.0 / max(rates.size, 1))
        pi = np.atleast_1d(np.asarray(pi, dtype=float))
        for arr in (rates, P, pi):
            arr.setflags(write=False)
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "pi", pi)

    @classmethod
    def constant(cls, rate: float = 0.0) -> "InterestChain":
        """Single-state chain (``l = 1``) with a fixed rate."""
        return cls([rate], [[1.0]], [1.0])

    @property
    def n_states(self) -> int:
        return self.rates.size

    def validate(self) -> list[str]:
        """Return a list of field-addressed problems; empty when the chain is valid."""
        problems = []
        l = self.rates.size
        if l == 0:
            return ["rates: at least one state is required"]
        if not np.all(np.isfinite(self.rates)):
            problems.append("rates: values must be finite")
        for s, r in enumerate(self.rates):
            if not 1.0 + r > 0.0:
                problems.append(f"rates[{s}]: 1 + rate must be positive, got rate {r}")
        if self.P.shape != (l, l):
            problems.append(f"P: expected shape ({l}, {l}), got {self.P.shape}")
        else:
            for s, row in enumerate(self.P):
                if not np.all(np.isfinite(row)) or np.any(row < 0.0):
                    problems.append(f"P[{s}]: entries must be finite and nonnegative")
                elif abs(row.sum() - 1.0) > ROW_TOL:
                    problems.append(f"P[{s}]: row sums to {row.sum():.12g}, expected 1")
        if self.pi.shape != (l,):
            problems.append(f"pi: expected {l} entries, got {self.pi.size}")
        elif np.any(self.pi < 0.0) or not np.all(np.isfinite(self.pi)):
            problems.append("pi: entries must be finite and nonnegative")
        elif abs(self.pi.sum() - 1.0) > ROW_TOL:
            problems.append(f"pi: sums to {self.pi.sum():.12g}, expected 1")
        return problems

    def check(self) -> "InterestChain":
        problems = self.validate()
        if problems:
            raise DomainError("invalid interest chain: " + "; ".join(problems))
        return self

    def _cum(self) -> np.ndarray:
        cum = np.cumsum(self.P, axis=1)
        cum[:, -1] = 1.0
        return cum

    def step(self, state: int, rng: np.random.Generator) -> int:
        """Draw the state following ``state``."""
        if not 0 <= state < self.n_states:
            raise DomainError(f"state index {state} out of range 0..{self.n_states - 1}")
        u = rng.random()
        return int(np.searchsorted(self._cum()[state], u, side="right"))

    def step_many(self, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Vectorised :meth:`step`: one uniform draw per entry of ``states``."""
        u = rng.random(states.shape)
        if self.n_states == 1:
            return np.zeros_like(states)
        cum = self._cum()[states]
        return (u[:, None] >= cum[:, :-1]).sum(axis=1)


def validate(chain: InterestChain) -> list[str]:
    return chain.validate()


def step(chain: InterestChain, state: int, rng: np.random.Generator) -> int:
    return chain.step(state, rng)
