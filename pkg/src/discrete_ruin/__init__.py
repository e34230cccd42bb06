"""Finite-horizon ruin probabilities for a discrete-time surplus process with
proportional reinsurance and Markov-modulated investment returns."""

from .claims import ClaimModel, Exponential, Pareto, RetainedLoss
from .contract import ReinsuranceTerms, net_profit_ok, retained_premium
from .engine import EngineConfig, RuinTable, compute_ruin_table, psi_one
from .market import InterestChain

__all__ = [
    "ClaimModel",
    "EngineConfig",
    "Exponential",
    "InterestChain",
    "Pareto",
    "ReinsuranceTerms",
    "RetainedLoss",
    "RuinTable",
    "compute_ruin_table",
    "net_profit_ok",
    "psi_one",
    "retained_premium",
]
