"""Monte Carlo estimate of finite-horizon ruin probabilities.

Paths are grouped into fixed-size blocks and every block draws from its own
generator derived from ``(seed, block index)``.  The estimate therefore depends
only on the seed, the number of paths and the block size, never on how many
worker threads process the blocks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .claims import ClaimModel
from .contract import ReinsuranceTerms, retained_premium
from .errors import ConfigError
from .market import InterestChain

BLOCK_SIZE = 1 << 16


@dataclass(frozen=True)
class SimulationSpec:
    model: ClaimModel
    terms: ReinsuranceTerms
    chain: InterestChain
    u: float
    state: int
    horizon: int
    paths: int = 1_000_000
    seed: int = 0
    block_size: int = BLOCK_SIZE


@dataclass(frozen=True)
class SimulationResult:
    estimates: np.ndarray
    stderr: np.ndarray
    ruined: np.ndarray
    paths: int
    seed: int


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def simulate_block(spec: SimulationSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """Cumulative ruin counts after each period for ``size`` paths.

    Per period the next interest state is drawn first, then the claim.
    """
    chain = spec.chain
    loss = spec.model.retained(spec.terms.b)
    c = retained_premium(spec.terms, spec.model.mean)
    growth = 1.0 + chain.rates
    states = np.full(size, spec.state, dtype=np.intp)
    surplus = np.full(size, float(spec.u))
    ruined = np.zeros(size, dtype=bool)
    counts = np.zeros(spec.horizon, dtype=np.int64)
    for k in range(spec.horizon):
        states = chain.step_many(states, rng)
        claims = loss.sample(rng, size)
        surplus = surplus * growth[states] + c - claims
        ruined |= surplus < 0.0
        counts[k] = np.count_nonzero(ruined)
    return counts


def run(spec: SimulationSpec, workers: int = 1) -> SimulationResult:
    problems = []
    if spec.paths < 1:
        problems.append(f"paths: must be >= 1, got {spec.paths}")
    if spec.horizon < 1:
        problems.append(f"horizon: must be >= 1, got {spec.horizon}")
    if not 0 <= spec.state < spec.chain.n_states:
        problems.append(f"state: index {spec.state} out of range")
    if spec.u < 0:
        problems.append(f"u: capital must be nonnegative, got {spec.u}")
    problems += [f"chain.{p}" for p in spec.chain.validate()]
    if problems:
        raise ConfigError(problems)

    sizes = [spec.block_size] * (spec.paths // spec.block_size)
    if spec.paths % spec.block_size:
        sizes.append(spec.paths % spec.block_size)

    def one(block):
        return simulate_block(spec, block_generator(spec.seed, block), sizes[block])

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    else:
        parts = [one(i) for i in range(len(sizes))]
    ruined = np.sum(parts, axis=0)
    p = ruined / spec.paths
    se = np.sqrt(p * (1.0 - p) / spec.paths)
    return SimulationResult(p, se, ruined, spec.paths, spec.seed)
