"""Scenario files: a YAML tree of model, contract, chain and command options.

Every key is optional; omitted keys fall back to the defaults
(unit-mean claims, theta = 0.2, eta = 0.25, two interest states 0.03/0.05).
Problems are collected with their field paths (``chain.P[1]``) and raised
together as one :class:`~discrete_ruin.errors.ConfigError`.

States are 1-based in scenario files and converted to 0-based indices here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .claims import ClaimModel, Exponential, Pareto
from .engine import EngineConfig
from .errors import ConfigError, RuinError
from .market import InterestChain

DEFAULT_RETENTIONS = tuple(np.round(np.arange(2, 11) / 10, 10))
DEFAULT_CAPITALS = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)


@dataclass
class Scenario:
    model: ClaimModel
    theta: float
    eta: float
    retentions: tuple
    chain: InterestChain
    engine: dict
    capitals: tuple
    horizons: tuple
    states: tuple
    lundberg: dict = field(default_factory=dict)
    asymptotic: dict = field(default_factory=dict)
    retention: dict = field(default_factory=dict)
    simulate: dict = field(default_factory=dict)

    def engine_config(self, horizon: int, targets, workers: int = 1) -> EngineConfig:
        return EngineConfig(horizon=int(horizon), targets=tuple(float(t) for t in targets), workers=workers, **self.engine)


class _Reader:
    def __init__(self):
        self.problems: list[str] = []

    def section(self, tree, key):
        val = tree.get(key, {}) if isinstance(tree, dict) else {}
        if val is None:
            return {}
        if not isinstance(val, dict):
            self.problems.append(f"{key}: expected a mapping")
            return {}
        return val

    def number(self, tree, key, path, default, positive=False, integer=False):
        val = tree.get(key, default)
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            self.problems.append(f"{path}: expected a number, got {val!r}")
            return default
        if integer and int(val) != val:
            self.problems.append(f"{path}: expected an integer, got {val!r}")
            return default
        if positive and not val > 0:
            self.problems.append(f"{path}: must be positive, got {val!r}")
        return int(val) if integer else float(val)

    def numbers(self, tree, key, path, default, integer=False):
        val = tree.get(key, default)
        if isinstance(val, dict):
            try:
                start, stop, step = (float(val[k]) for k in ("from", "to", "step"))
            except (KeyError, TypeError, ValueError):
                self.problems.append(f"{path}: a range needs numeric 'from', 'to' and 'step'")
                return tuple(default)
            if not step > 0 or stop < start:
                self.problems.append(f"{path}: invalid range")
                return tuple(default)
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            return tuple(np.round(start + step * np.arange(count), 12))
        if not isinstance(val, (list, tuple)):
            val = [val]
        out = []
        for i, item in enumerate(val):
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                self.problems.append(f"{path}[{i}]: expected a number, got {item!r}")
            elif integer and int(item) != item:
                self.problems.append(f"{path}[{i}]: expected an integer, got {item!r}")
            else:
                out.append(int(item) if integer else float(item))
        if not out:
            self.problems.append(f"{path}: at least one value is required")
            return tuple(default)
        return tuple(out)


def parse(tree) -> Scenario:
    """Build a validated :class:`Scenario` from a parsed YAML tree."""
    if tree is None:
        tree = {}
    r = _Reader()
    if not isinstance(tree, dict):
        raise ConfigError(["<root>: expected a mapping"])

    claims = r.section(tree, "claims")
    kind = str(claims.get("distribution", "exponential")).lower()
    mean = r.number(claims, "mean", "claims.mean", 1.0, positive=True)
    model = None
    try:
        if kind == "exponential":
            model = Exponential(mean)
        elif kind == "pareto":
            alpha = r.number(claims, "alpha", "claims.alpha", 1.25)
            model = Pareto(alpha, mean)
        else:
            r.problems.append(f"claims.distribution: expected 'exponential' or 'pareto', got {kind!r}")
    except RuinError as exc:
        r.problems.append(f"claims: {exc}")

    contract = r.section(tree, "contract")
    theta = r.number(contract, "theta", "contract.theta", 0.2, positive=True)
    eta = r.number(contract, "eta", "contract.eta", 0.25)
    if eta < theta:
        r.problems.append(f"contract.eta: must be >= theta ({theta}), got {eta}")
    retentions = r.numbers(contract, "retention", "contract.retention", DEFAULT_RETENTIONS)
    for i, b in enumerate(retentions):
        if not 0 < b <= 1:
            r.problems.append(f"contract.retention[{i}]: must lie in (0, 1], got {b}")

    ch = r.section(tree, "chain")
    rates = r.numbers(ch, "states", "chain.states", (0.03, 0.05))
    l = len(rates)
    raw_P = ch.get("P", [[0.4, 0.6], [0.3, 0.7]] if l == 2 else np.eye(l).tolist())
    P = np.full((l, l), np.nan)
    if not isinstance(raw_P, list) or len(raw_P) != l:
        r.problems.append(f"chain.P: expected {l} rows")
    else:
        for s, row in enumerate(raw_P):
            vals = r.numbers({"row": row}, "row", f"chain.P[{s}]", ())
            if len(vals) != l:
                r.problems.append(f"chain.P[{s}]: expected {l} entries, got {len(vals)}")
            else:
                P[s] = vals
    pi = r.numbers(ch, "pi", "chain.pi", tuple(np.full(l, 1.0 / l)))
    chain = InterestChain(rates, P, pi)
    if not any(p.startswith("chain.P") for p in r.problems):
        r.problems += [f"chain.{p}" for p in chain.validate()]

    eng = r.section(tree, "engine")
    engine = {}
    for key, default, integer in (("step", 0.01, False), ("nodes", 16, True), ("panel", 0.5, False)):
        engine[key] = r.number(eng, key, f"engine.{key}", default, positive=True, integer=integer)
    engine["interpolation"] = str(eng.get("interpolation", "cubic"))
    if engine["interpolation"] not in ("linear", "cubic"):
        r.problems.append(f"engine.interpolation: expected 'linear' or 'cubic', got {engine['interpolation']!r}")
        engine["interpolation"] = "cubic"
    if engine["nodes"] < 2:
        r.problems.append("engine.nodes: must be >= 2")

    table = r.section(tree, "table")
    capitals = r.numbers(table, "capitals", "table.capitals", DEFAULT_CAPITALS)
    horizons = r.numbers(table, "horizons", "table.horizons", (5, 10), integer=True)
    states = r.numbers(table, "states", "table.states", tuple(range(1, l + 1)), integer=True)

    def check_common(capitals, horizons, states, prefix):
        if any(u < 0 for u in capitals):
            r.problems.append(f"{prefix}.capitals: must be nonnegative")
        if any(n < 1 for n in horizons):
            r.problems.append(f"{prefix}.horizons: must be >= 1")
        for i, s in enumerate(states):
            if not 1 <= s <= l:
                r.problems.append(f"{prefix}.states[{i}]: must lie in 1..{l}, got {s}")

    check_common(capitals, horizons, states, "table")

    lb = r.section(tree, "lundberg")
    lundberg = {"capitals": r.numbers(lb, "capitals", "lundberg.capitals", capitals)}
    check_common(lundberg["capitals"], (1,), (1,), "lundberg")

    asy = r.section(tree, "asymptotic")
    asymptotic = {
        "horizon": r.number(asy, "horizon", "asymptotic.horizon", 3, positive=True, integer=True),
        "capitals": r.numbers(asy, "capitals", "asymptotic.capitals", tuple(np.arange(0, 41) / 2)),
        "retentions": r.numbers(asy, "retention", "asymptotic.retention", (0.2, 0.4, 0.6, 0.8, 1.0)),
    }
    check_common(asymptotic["capitals"], (asymptotic["horizon"],), (1,), "asymptotic")

    ret = r.section(tree, "retention")
    retention = {
        "tolerance": r.number(ret, "tolerance", "retention.tolerance", 0.05),
        "capitals": r.numbers(ret, "capitals", "retention.capitals", capitals),
        "horizons": r.numbers(ret, "horizons", "retention.horizons", horizons, integer=True),
        "refine": bool(ret.get("refine", False)),
    }
    if not 0 < retention["tolerance"] <= 1:
        r.problems.append(f"retention.tolerance: must lie in (0, 1], got {retention['tolerance']}")
    if list(retentions) != sorted(set(retentions)):
        r.problems.append("contract.retention: must be strictly increasing for the retention search")
    check_common(retention["capitals"], retention["horizons"], (1,), "retention")

    sim = r.section(tree, "simulate")
    simulate = {
        "paths": r.number(sim, "paths", "simulate.paths", 1_000_000, positive=True, integer=True),
        "seed": r.number(sim, "seed", "simulate.seed", 20140601, integer=True),
        "capital": r.number(sim, "capital", "simulate.capital", 0.0),
        "state": r.number(sim, "state", "simulate.state", 1, integer=True),
        "horizon": r.number(sim, "horizon", "simulate.horizon", 10, positive=True, integer=True),
        "retention": r.number(sim, "retention", "simulate.retention", 1.0),
    }
    if not 1 <= simulate["state"] <= l:
        r.problems.append(f"simulate.state: must lie in 1..{l}, got {simulate['state']}")
    if not 0 < simulate["retention"] <= 1:
        r.problems.append(f"simulate.retention: must lie in (0, 1], got {simulate['retention']}")
    if simulate["capital"] < 0:
        r.problems.append("simulate.capital: must be nonnegative")

    if r.problems:
        raise ConfigError(r.problems)
    return Scenario(
        model=model,
        theta=theta,
        eta=eta,
        retentions=retentions,
        chain=chain,
        engine=engine,
        capitals=capitals,
        horizons=horizons,
        states=tuple(s - 1 for s in states),
        lundberg=lundberg,
        asymptotic=asymptotic,
        retention=retention,
        simulate=simulate,
    )


def load(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError([f"{path}: {exc.strerror}"]) from exc
    try:
        tree = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark else "unknown position"
        raise ConfigError([f"{path}: YAML syntax error at {where}"]) from exc
    return parse(tree)
