"""Acceptance checks at the stated tolerances; each prints one PASS/FAIL line in the summary."""

import time
from pathlib import Path

import numpy as np
import pytest

from discrete_ruin.asymptotics import asymptotic_psi, coefficients, convergence_ratio
from discrete_ruin.claims import Exponential, Pareto
from discrete_ruin.cli import run as cli_run
from discrete_ruin.engine import (
    EngineConfig,
    closed_form_psi1_pareto,
    closed_form_psi_exponential,
    compute_ruin_table,
)
from discrete_ruin.lundberg import solve_R, upper_bound, xi_numeric_sup
from discrete_ruin.market import InterestChain
from discrete_ruin.retention import RetentionQuery, search_tables
from discrete_ruin.simulate import SimulationSpec, run as simulate

from conftest import B_GRID, CAPITALS, record, terms

HORIZONS = (5, 10)
ROOT = Path(__file__).resolve().parents[1]


def test_closed_form_exponential(flat_chain):
    t0 = time.perf_counter()
    worst = 0.0
    for b in B_GRID:
        table = compute_ruin_table(Exponential(), terms(b), flat_chain, EngineConfig(2, targets=CAPITALS))
        for k in (1, 2):
            got = np.array([table.psi(k, 0, u) for u in CAPITALS])
            worst = max(worst, np.max(np.abs(got - closed_form_psi_exponential(np.array(CAPITALS), k, terms(b)))))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-6 and elapsed < 5.0
    record("1 exponential closed forms", ok, f"max error {worst:.2e}, {elapsed:.2f} s")
    assert ok


def test_closed_form_pareto(flat_chain):
    worst = 0.0
    for b in B_GRID:
        table = compute_ruin_table(Pareto(1.25), terms(b), flat_chain, EngineConfig(1, targets=CAPITALS))
        got = np.array([table.psi(1, 0, u) for u in CAPITALS])
        worst = max(worst, np.max(np.abs(got - closed_form_psi1_pareto(np.array(CAPITALS), terms(b), 1.25, 0.2))))
    record("2 Pareto one-period closed form", worst < 1e-8, f"max error {worst:.2e}")
    assert worst < 1e-8


@pytest.mark.slow
def test_monte_carlo_agreement(two_state_chain, exp_tables, pareto_tables):
    t0 = time.perf_counter()
    paths = 1_000_000
    failures = []
    worst = 0.0
    cell = 0
    for name, model, tables in (("exponential", Exponential(), exp_tables), ("pareto", Pareto(1.25), pareto_tables)):
        for b in B_GRID:
            for u in CAPITALS:
                for s in (0, 1):
                    spec = SimulationSpec(model, terms(b), two_state_chain, u, s, max(HORIZONS), paths, seed=20140601 + cell)
                    cell += 1
                    mc = simulate(spec)
                    for n in HORIZONS:
                        dp = tables[b].psi(n, s, u)
                        se = mc.stderr[n - 1]
                        if se == 0.0:
                            # no ruined paths: use the binomial error at the engine's value
                            se = np.sqrt(dp * (1 - dp) / paths)
                        z = abs(dp - mc.estimates[n - 1]) / se if se > 0 else np.inf * (dp != mc.estimates[n - 1])
                        worst = max(worst, z)
                        if not z <= 3.29:
                            failures.append(f"{name} b={b} u={u} s={s + 1} n={n}: z={z:.2f}")
    elapsed = time.perf_counter() - t0
    ok = not failures
    record("3 Monte Carlo within 3.29 SE", ok, f"{len(failures)} of 432 cells outside, max z {worst:.2f}, {elapsed:.0f} s")
    assert ok, failures


def test_lundberg_suite(two_state_chain, exp_tables):
    problems = []
    for b in B_GRID:
        if b <= 0.2:
            continue  # net-profit condition fails; no adjustment coefficient
        res = solve_R(Exponential(), terms(b))
        if not res.residual < 1e-10:
            problems.append(f"b={b}: residual {res.residual:.1e}")
        if not b * res.R < 1:
            problems.append(f"b={b}: bR={b * res.R}")
        if abs(res.xi - (1 - b * res.R)) > 1e-12:
            problems.append(f"b={b}: xi differs from 1-bR")
        num = xi_numeric_sup(Exponential(), terms(b), res.R)
        if abs(num - res.xi) > 1e-3:
            problems.append(f"b={b}: numeric sup {num} vs {res.xi}")
        table = exp_tables[b]
        for k in range(1, table.horizon + 1):
            grid = table.grid(k)
            for s in (0, 1):
                if np.any(table.values[k - 1][s] > upper_bound(grid, s, res, two_state_chain) + 1e-12):
                    problems.append(f"b={b} n={k} s={s + 1}: bound violated")
    record("4 Lundberg suite", not problems, "; ".join(problems[:3]))
    assert not problems


def test_monotonicity(exp_tables, pareto_tables):
    problems = []
    for name, tables in (("exponential", exp_tables), ("pareto", pareto_tables)):
        for b, table in tables.items():
            problems += [f"{name} b={b}: {p}" for p in table.check_invariants()]
        for k in range(1, 11):
            for s in (0, 1):
                rows = [tables[b].values[k - 1][s] for b in B_GRID]
                width = min(r.size for r in rows)
                start = int(round(1.0 / tables[1.0].step))
                stack = np.array([r[start:width] for r in rows])
                if np.any(np.diff(stack, axis=0) < -1e-12):
                    problems.append(f"{name} n={k} s={s + 1}: decreasing in b for u >= 1")
    record("5 monotonicity", not problems, "; ".join(problems[:3]))
    assert not problems


def test_asymptotics(two_state_chain):
    problems = []
    c = coefficients(two_state_chain, 1.25, 3)
    if np.any(c.values[0] != 0):
        problems.append("c_0 != 0")
    flat = coefficients(InterestChain.constant(0.0), 1.25, 10)
    if not np.allclose(flat.values[:, 0], np.arange(11), rtol=0, atol=1e-12):
        problems.append("c_n != n for the zero-rate chain")
    if abs(c(1, 0) - 0.95) > 1e-4:
        problems.append(f"c_1(i_1)={c(1, 0)}")
    u = np.geomspace(5, 1e5, 30)
    for b in (0.2, 0.6, 1.0):
        y = asymptotic_psi(u, 0, c, Pareto(1.25).retained(b))
        slope = np.diff(np.log(y)) / np.diff(np.log(u))
        if np.max(np.abs(slope + 1.25)) > 1e-10:
            problems.append(f"b={b}: slope off by {np.max(np.abs(slope + 1.25)):.1e}")
    table = compute_ruin_table(Pareto(1.25), terms(1.0), two_state_chain, EngineConfig(3, targets=(20.0,)))
    series = convergence_ratio(table, c, Pareto(1.25).retained(1.0), [2.0, 20.0], 0)
    r2, r20 = series.ratio
    if not abs(r20 - 1) < abs(r2 - 1):
        problems.append(f"ratio trend: u=2 {r2:.4f}, u=20 {r20:.4f}")
    record("6 asymptotics", not problems, f"c_1={c(1, 0):.6f}, ratio u=2 {r2:.4f}, u=20 {r20:.4f}" + ("; " + "; ".join(problems) if problems else ""))
    assert not problems


def test_retention_semantics(exp_tables, pareto_tables):
    problems = []

    def search(tables, n, u, s):
        return search_tables(RetentionQuery(n, u, s, 0.05, B_GRID), [tables[b] for b in B_GRID])

    for n in HORIZONS:
        for s in (0, 1):
            res = search(pareto_tables, n, 1.0, s)
            if res.outcome != "lack":
                problems.append(f"pareto u=1 n={n} s={s + 1}: {res.label()}")
        for u in (4.0, 5.0):
            res = search(exp_tables, n, u, 0)
            if res.outcome != "full":
                problems.append(f"exponential u={u:g} n={n} i=0.03: {res.label()} (psi at b=1 is {res.psi[-1]:.4f})")
    for tables in (exp_tables, pareto_tables):
        for n in HORIZONS:
            for u in CAPITALS:
                for s in (0, 1):
                    if not search(tables, n, u, s).verify():
                        problems.append(f"certificate failed at n={n} u={u} s={s + 1}")
    record("7 retention semantics", not problems, "; ".join(problems))
    assert not problems


def test_determinism(tmp_path):
    exp, par = str(ROOT / "scenarios" / "default-exponential.yaml"), str(ROOT / "scenarios" / "default-pareto.yaml")
    jobs = [
        ("ruin-table", exp),
        ("ruin-table", par),
        ("lundberg", exp),
        ("asymptotic", par),
        ("retention", exp),
        ("retention", par),
        ("simulate", exp),
        ("simulate", par),
    ]
    differing = []
    for i, (cmd, sc) in enumerate(jobs):
        a, b = tmp_path / f"{i}a.csv", tmp_path / f"{i}b.csv"
        cli_run([cmd, "--scenario", sc, "--out", str(a), "--threads", "1"])
        cli_run([cmd, "--scenario", sc, "--out", str(b), "--threads", "4"])
        if a.read_bytes() != b.read_bytes():
            differing.append(f"{cmd} {Path(sc).stem}")
    record("8 determinism", not differing, ", ".join(differing))
    assert not differing


@pytest.mark.slow
def test_grid_refinement(two_state_chain, exp_tables, pareto_tables):
    worst = 0.0
    for model, tables in ((Exponential(), exp_tables), (Pareto(1.25), pareto_tables)):
        fine_cfg = EngineConfig(10, targets=CAPITALS, step=0.005, nodes=32)
        for b in B_GRID:
            fine = compute_ruin_table(model, terms(b), two_state_chain, fine_cfg)
            for n in HORIZONS:
                for s in (0, 1):
                    for u in CAPITALS:
                        worst = max(worst, abs(fine.psi(n, s, u) - tables[b].psi(n, s, u)))
    record("9 grid refinement", worst < 1e-5, f"max change {worst:.2e}")
    assert worst < 1e-5
