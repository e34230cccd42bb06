"""Largest retention level keeping the ruin probability within a tolerance."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .claims import ClaimModel
from .contract import ReinsuranceTerms
from .engine import EngineConfig, RuinTable, compute_ruin_table
from .errors import ConfigError, DomainError
from .market import InterestChain

DEFAULT_B_GRID = tuple(np.round(np.arange(2, 11) / 10, 10))


@dataclass(frozen=True)
class RetentionQuery:
    horizon: int
    u: float
    state: int
    tolerance: float = 0.05
    b_grid: Sequence[float] = DEFAULT_B_GRID

    def problems(self) -> list[str]:
        out = []
        if not 0.0 < self.tolerance <= 1.0:
            out.append(f"tolerance: must lie in (0, 1], got {self.tolerance}")
        grid = np.asarray(self.b_grid, dtype=float)
        if grid.size == 0:
            out.append("b_grid: at least one retention is required")
        elif np.any(grid <= 0) or np.any(grid > 1) or np.any(np.diff(grid) <= 0):
            out.append("b_grid: must be strictly increasing within (0, 1]")
        return out


@dataclass
class RetentionResult:
    """Outcome of the search with the probabilities that certify it.

    ``psi[i]`` is the ruin probability at ``b_grid[i]``.  ``b_star`` is None
    when no grid level meets the tolerance.
    """

    query: RetentionQuery
    psi: np.ndarray
    b_star: float | None
    refined: float | None = None

    @property
    def outcome(self) -> str:
        if self.b_star is None:
            return "lack"
        if self.b_star == 1.0:
            return "full"
        return "partial"

    def label(self, fmt=lambda x: format(x, ".6g")) -> str:
        if self.outcome in ("full", "lack"):
            return self.outcome
        return fmt(self.refined if self.refined is not None else self.b_star)

    def certificate(self) -> tuple[float | None, float | None]:
        """``(psi at b*, psi at the next grid level)``; either side may be absent."""
        grid = list(self.query.b_grid)
        if self.b_star is None:
            return None, float(self.psi[0])
        i = grid.index(self.b_star)
        nxt = float(self.psi[i + 1]) if i + 1 < len(grid) else None
        return float(self.psi[i]), nxt

    def verify(self) -> bool:
        eps = self.query.tolerance
        at, nxt = self.certificate()
        if self.b_star is None:
            return bool(np.all(self.psi > eps))
        return at <= eps and (nxt is None or nxt > eps) and bool(np.all(self.psi[np.asarray(self.query.b_grid) > self.b_star] > eps))


def _pick(psi: np.ndarray, grid: Sequence[float], eps: float) -> float | None:
    ok = np.flatnonzero(psi <= eps)
    return float(grid[ok[-1]]) if ok.size else None


def search_tables(query: RetentionQuery, tables: Sequence[RuinTable]) -> RetentionResult:
    """Search using precomputed tables, one per entry of ``query.b_grid``."""
    psi = np.array([t.psi(query.horizon, query.state, query.u) for t in tables])
    return RetentionResult(query, psi, _pick(psi, query.b_grid, query.tolerance))


def max_retention(
    query: RetentionQuery,
    model: ClaimModel,
    terms: ReinsuranceTerms,
    chain: InterestChain,
    config: EngineConfig | None = None,
    refine: bool = False,
    refine_tol: float = 1e-3,
) -> RetentionResult:
    """Largest grid retention with ``psi_n(u, s; b) <= tolerance``.

    ``terms`` supplies the loadings; its retention is ignored.  With
    ``refine`` the boundary between ``b*`` and the next grid level is bisected
    to ``refine_tol``, which relies on the ruin probability increasing in ``b``
    and is only offered for ``u >= 1``.
    """
    problems = query.problems()
    if problems:
        raise ConfigError(problems)
    if refine and query.u < 1:
        raise DomainError("continuous refinement needs u >= 1, where ruin probability increases with retention")
    base = config or EngineConfig(query.horizon, targets=(query.u,))
    base = replace(base, horizon=query.horizon, targets=(query.u,))

    def psi_at(b):
        table = compute_ruin_table(model, terms.with_retention(b), chain, base)
        return table.psi(query.horizon, query.state, query.u)

    psi = np.array([psi_at(b) for b in query.b_grid])
    result = RetentionResult(query, psi, _pick(psi, query.b_grid, query.tolerance))
    if refine and result.outcome == "partial":
        grid = list(query.b_grid)
        lo = result.b_star
        hi = grid[grid.index(lo) + 1]
        while hi - lo > refine_tol:
            mid = 0.5 * (lo + hi)
            if psi_at(mid) <= query.tolerance:
                lo = mid
            else:
                hi = mid
        result.refined = lo
    return result

