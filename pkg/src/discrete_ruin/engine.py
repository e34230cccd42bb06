"""Finite-horizon ruin probabilities by grid dynamic programming.

For horizon ``k + 1`` and initial interest state ``s``::

    psi[k+1](u, s) = sum_j P[s, j] * (Vbar(A_j) + int_{lo}^{A_j} psi[k](A_j - z, j) v(z) dz)

with ``A_j = u (1 + i_j) + c(b)``, ``v``/``Vbar`` the density and survival of
the retained loss and ``lo`` its lower support bound.  ``psi[1]`` is exact.
Each later horizon is stored on a uniform capital grid; between grid points it
is interpolated, and the integral is a composite Gauss-Legendre rule whose
panels start at ``lo``.

The grid only extends as far as the recursion can reach from the requested
capitals, so no value is ever extrapolated: horizon ``k`` of an ``n``-step
table covers ``[0, E_k]`` with ``E_n = max(targets)`` and
``E_k = E_{k+1} (1 + i_max) + c(b) - lo``.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline

from .claims import ClaimModel, Exponential, RetainedLoss
from .contract import ReinsuranceTerms, net_profit_ok, retained_premium
from .errors import ConfigError, DomainError, UnsupportedError
from .market import InterestChain

log = logging.getLogger(__name__)

INTERPOLATIONS = ("linear", "cubic")
CHUNK = 512


@dataclass(frozen=True)
class EngineConfig:
    horizon: int
    targets: Sequence[float] = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)
    step: float = 0.01
    nodes: int = 16
    panel: float = 0.5
    interpolation: str = "cubic"
    #: optional explicit grid upper bound; must cover what the recursion needs
    upper: float | None = None
    workers: int = 1

    def problems(self) -> list[str]:
        out = []
        if not (isinstance(self.horizon, (int, np.integer)) and self.horizon >= 1):
            out.append(f"horizon: must be an integer >= 1, got {self.horizon!r}")
        if len(self.targets) == 0:
            out.append("targets: at least one capital is required")
        elif min(self.targets) < 0:
            out.append("targets: capitals must be nonnegative")
        if not self.step > 0:
            out.append(f"step: must be positive, got {self.step}")
        if not (isinstance(self.nodes, (int, np.integer)) and self.nodes >= 2):
            out.append(f"nodes: must be an integer >= 2, got {self.nodes!r}")
        if not self.panel > 0:
            out.append(f"panel: must be positive, got {self.panel}")
        if self.interpolation not in INTERPOLATIONS:
            out.append(f"interpolation: must be one of {INTERPOLATIONS}, got {self.interpolation!r}")
        if self.workers < 1:
            out.append(f"workers: must be >= 1, got {self.workers}")
        return out


class _Interpolant:
    """Interpolant of one state's values on the uniform grid ``0, h, 2h, ...``."""

    def __init__(self, values: np.ndarray, h: float, kind: str):
        self.values = values
        self.h = h
        self.kind = kind
        self.last = values.size - 1
        if kind == "cubic" and values.size >= 4:
            grid = h * np.arange(values.size)
            self.coef = CubicSpline(grid, values).c
        else:
            self.kind = "linear"

    def __call__(self, y: np.ndarray) -> np.ndarray:
        t = np.clip(np.asarray(y, dtype=float) / self.h, 0.0, self.last)
        idx = np.minimum(t.astype(np.intp), max(self.last - 1, 0))
        frac = t - idx
        if self.last == 0:
            return np.full(t.shape, self.values[0])
        if self.kind == "linear":
            v = self.values
            return v[idx] + frac * (v[idx + 1] - v[idx])
        c = self.coef
        d = frac * self.h
        return ((c[0, idx] * d + c[1, idx]) * d + c[2, idx]) * d + c[3, idx]


@dataclass
class RuinTable:
    """Ruin probabilities ``psi[k](u_g, s)`` for horizons ``k = 1..n``.

    ``values[k - 1]`` has shape ``(l, N_k)``; column ``g`` holds capital ``g * step``.
    Longer horizons cover shorter capital ranges (see the module docstring).
    """

    step: float
    values: list[np.ndarray]
    model: ClaimModel
    terms: ReinsuranceTerms
    chain: InterestChain
    config: EngineConfig
    net_profit_ok: bool = True
    warnings: list[str] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return len(self.values)

    def grid(self, k: int) -> np.ndarray:
        return self.step * np.arange(self.values[k - 1].shape[1])

    def upper(self, k: int) -> float:
        return self.step * (self.values[k - 1].shape[1] - 1)

    def psi(self, k: int, s: int, u):
        """Ruin probability at horizon ``k``, state ``s`` and capital(s) ``u``.

        Capitals that fall on the grid return the stored value; others use the
        engine's interpolation.
        """
        u = np.asarray(u, dtype=float)
        if np.any(u < 0) or np.any(u > self.upper(k) + 1e-9 * self.step):
            raise DomainError(f"capital outside the computed range [0, {self.upper(k)}] at horizon {k}")
        row = self.values[k - 1][s]
        t = u / self.step
        on_grid = np.abs(t - np.rint(t)) < 1e-9
        out = _Interpolant(row, self.step, self.config.interpolation)(u)
        idx = np.clip(np.rint(t).astype(np.intp), 0, row.size - 1)
        out = np.where(on_grid, row[idx], out)
        return float(out) if out.ndim == 0 else out

    def check_invariants(self, atol: float = 1e-12) -> list[str]:
        """Bounds and monotonicity checks; returns a list of violations."""
        bad = []
        for k, vals in enumerate(self.values, start=1):
            if np.any(vals < -atol) or np.any(vals > 1 + atol):
                bad.append(f"horizon {k}: value outside [0, 1]")
            if np.any(np.diff(vals, axis=1) > atol):
                bad.append(f"horizon {k}: increasing in capital")
            if k > 1:
                prev = self.values[k - 2][:, : vals.shape[1]]
                if np.any(vals < prev - atol):
                    bad.append(f"horizon {k}: below horizon {k - 1}")
        return bad


def _grid_extents(u_max: float, horizon: int, c: float, growth: float, lo: float, h: float) -> list[int]:
    """Number of grid points needed at each horizon ``1..n`` (index 0 is horizon 1)."""
    counts = [0] * horizon
    reach = u_max
    for k in range(horizon, 0, -1):
        n_pts = int(math.ceil(reach / h - 1e-9)) + 1
        counts[k - 1] = n_pts
        reach = max((n_pts - 1) * h * growth + c - lo, 0.0)
    return counts


def required_upper(u_max: float, horizon: int, c: float, i_max: float) -> float:
    """Largest argument ``A`` reachable from ``u_max`` within ``horizon`` periods."""
    if i_max == 0:
        return u_max + horizon * c
    g = (1.0 + i_max) ** horizon
    return u_max * g + c * (g - 1.0) / i_max


def psi_one(u, s: int, model: ClaimModel, terms: ReinsuranceTerms, chain: InterestChain):
    """Exact one-period ruin probability ``sum_j P[s, j] Vbar(u (1 + i_j) + c(b))``."""
    if np.any(np.asarray(u) < 0):
        raise DomainError("capital must be nonnegative")
    loss = model.retained(terms.b)
    c = retained_premium(terms, model.mean)
    u = np.asarray(u, dtype=float)
    total = np.zeros(u.shape)
    for j, rate in enumerate(chain.rates):
        total = total + chain.P[s, j] * np.asarray(loss.survival(u * (1.0 + rate) + c))
    return float(total) if total.ndim == 0 else total


class _Stepper:
    """Carries everything needed to advance the recursion by one horizon."""

    def __init__(self, model: ClaimModel, terms: ReinsuranceTerms, chain: InterestChain, config: EngineConfig):
        self.loss = model.retained(terms.b)
        self.c = retained_premium(terms, model.mean)
        self.chain = chain
        self.config = config
        self.h = config.step
        self.lo = self.loss.support_low
        x, w = leggauss(config.nodes)
        self.x = x
        self.w = w

    def continuation(self, prev: np.ndarray, j: int, n_out: int) -> np.ndarray:
        """``Vbar(A_j) + int_lo^{A_j} psi_prev(A_j - z, j) v(z) dz`` on the first ``n_out`` grid points."""
        u = self.h * np.arange(n_out)
        A = u * (1.0 + self.chain.rates[j]) + self.c
        interp = _Interpolant(prev[j], self.h, self.config.interpolation)
        out = np.asarray(self.loss.survival(A), dtype=float).copy()
        # fixed chunking keeps results bitwise independent of the worker count
        chunks = [A[i : i + CHUNK] for i in range(0, n_out, CHUNK)]
        workers = self.config.workers
        if workers > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(workers) as pool:
                parts = list(pool.map(lambda a: self._integral(interp, a), chunks))
        else:
            parts = [self._integral(interp, a) for a in chunks]
        if parts:
            out += np.concatenate(parts)
        return out

    def _integral(self, interp: _Interpolant, A: np.ndarray) -> np.ndarray:
        lo, w = self.lo, self.config.panel
        total = np.zeros(A.shape)
        if A.size == 0:
            return total
        n_panels = int(math.ceil((A.max() - lo) / w)) if A.max() > lo else 0
        for m in range(n_panels):
            a = lo + m * w
            active = A > a
            if not np.any(active):
                break
            top = np.minimum(a + w, A[active])
            half = 0.5 * (top - a)
            z = a + half[:, None] * (1.0 + self.x[None, :])
            y = A[active, None] - z
            f = interp(y) * self.loss.density(z)
            total[active] += half * (f @ self.w)
        return total

    def scalar_step(self, prev: np.ndarray, n_out: int) -> np.ndarray:
        """Next horizon, summing over destination states one at a time."""
        l = self.chain.n_states
        cont = [self.continuation(prev, j, n_out) for j in range(l)]
        nxt = np.zeros((l, n_out))
        for s in range(l):
            for j in range(l):
                nxt[s] += self.chain.P[s, j] * cont[j]
        return nxt

    def matrix_step(self, prev: np.ndarray, n_out: int) -> np.ndarray:
        """Next horizon as ``V @ P.T`` with ``V[g, j]`` the continuation values."""
        V = np.column_stack([self.continuation(prev, j, n_out) for j in range(self.chain.n_states)])
        return (V @ self.chain.P.T).T


def _prepare(model, terms, chain, config):
    problems = config.problems() + [f"chain.{p}" for p in chain.validate()]
    if problems:
        raise ConfigError(problems)
    loss = model.retained(terms.b)
    c = retained_premium(terms, model.mean)
    growth = float(np.max(1.0 + chain.rates))
    counts = _grid_extents(max(config.targets), config.horizon, c, growth, loss.support_low, config.step)
    if config.upper is not None and config.upper < config.step * (counts[0] - 1):
        need = config.step * (counts[0] - 1)
        raise ConfigError([f"engine.upper: grid bound {config.upper} is below the required {need:.6g}"])
    return counts


def compute_ruin_table(
    model: ClaimModel, terms: ReinsuranceTerms, chain: InterestChain, config: EngineConfig
) -> RuinTable:
    """Run the recursion for horizons ``1..config.horizon``."""
    counts = _prepare(model, terms, chain, config)
    table = RuinTable(config.step, [], model, terms, chain, config)
    if not net_profit_ok(terms, model.mean):
        msg = (
            f"net-profit condition fails at b={terms.b} "
            f"(requires b > {terms.admissibility_threshold:.6g}); finite-horizon values still computed"
        )
        table.net_profit_ok = False
        table.warnings.append(msg)
        log.warning(msg)

    h = config.step
    first = np.vstack([psi_one(h * np.arange(counts[0]), s, model, terms, chain) for s in range(chain.n_states)])
    table.values.append(np.clip(first, 0.0, 1.0))
    stepper = _Stepper(model, terms, chain, config)
    for k in range(1, config.horizon):
        nxt = stepper.scalar_step(table.values[-1], counts[k])
        table.values.append(np.clip(nxt, 0.0, 1.0))
    return table


def ruin_matrix_step(
    prev: np.ndarray, model: ClaimModel, terms: ReinsuranceTerms, chain: InterestChain, config: EngineConfig, n_out: int | None = None
) -> np.ndarray:
    """Advance a horizon slice of shape ``(l, N)`` by one period in matrix form.

    ``n_out`` is the number of grid points to produce; by default every point
    whose continuation stays inside the slice.
    """
    prev = np.atleast_2d(np.asarray(prev, dtype=float))
    l = chain.n_states
    if prev.shape[0] != l or chain.P.shape != (l, l):
        raise DomainError(f"slice has {prev.shape[0]} states, chain has {l}")
    stepper = _Stepper(model, terms, chain, config)
    if n_out is None:
        top = (prev.shape[1] - 1) * config.step
        growth = float(np.max(1.0 + chain.rates))
        reach = (top - stepper.c + stepper.lo) / growth
        n_out = int(math.floor(reach / config.step + 1e-9)) + 1
        if n_out < 1:
            raise DomainError("slice too short to advance")
    return np.clip(stepper.matrix_step(prev, n_out), 0.0, 1.0)


def closed_form_psi_exponential(u, k: int, terms: ReinsuranceTerms):
    """Exact ``psi_1`` and ``psi_2`` for unit-mean exponential claims, one state with zero interest."""
    u = np.asarray(u, dtype=float)
    b = terms.b
    c = retained_premium(terms, 1.0)
    first = np.exp(-(u + c) / b)
    if k == 1:
        out = first
    elif k == 2:
        out = first + (u + c) / b * np.exp(-(u + 2.0 * c) / b)
    else:
        raise UnsupportedError(f"closed form only available for horizons 1 and 2, got {k}")
    return float(out) if out.ndim == 0 else out


def closed_form_psi1_pareto(u, terms: ReinsuranceTerms, alpha: float, beta: float):
    """Exact ``psi_1`` for Pareto claims, one state with zero interest."""
    u = np.asarray(u, dtype=float)
    b = terms.b
    arg = u + terms.theta + b * (terms.eta + 1.0) - terms.eta
    floor = b * beta
    out = np.where(arg >= floor, (floor / np.maximum(arg, floor)) ** alpha, 1.0)
    return float(out) if out.ndim == 0 else out
