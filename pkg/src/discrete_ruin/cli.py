"""Command-line front end.

    discrete-ruin ruin-table --scenario scenarios/default-exponential.yaml --out psi.csv

Exit status: 0 on success, 2 for configuration problems (including a command
that does not apply to the scenario's claim distribution), 3 for numeric
failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys

from . import asymptotics, lundberg, retention, simulate
from .contract import ReinsuranceTerms
from .engine import compute_ruin_table
from .errors import ConfigError, NoAdjustmentCoefficientError, RuinError, UnsupportedError
from .scenario import Scenario, load

log = logging.getLogger("discrete_ruin")

COMMANDS = ("ruin-table", "lundberg", "asymptotic", "retention", "simulate")


def _formatter(full: bool):
    if full:
        return lambda x: repr(float(x))
    return lambda x: format(float(x), ".6g")


def _tables(sc: Scenario, retentions, horizon, capitals, threads):
    config = sc.engine_config(horizon, capitals, workers=threads)
    out = {}
    for b in retentions:
        table = compute_ruin_table(sc.model, ReinsuranceTerms(sc.theta, sc.eta, b), sc.chain, config)
        out[b] = table
    return out


def cmd_ruin_table(sc: Scenario, fmt, threads=1):
    tables = _tables(sc, sc.retentions, max(sc.horizons), sc.capitals, threads)
    rows = [("u", "b", "n", "state", "psi")]
    for u in sc.capitals:
        for b in sc.retentions:
            for n in sc.horizons:
                for s in sc.states:
                    rows.append((fmt(u), fmt(b), str(n), str(s + 1), fmt(tables[b].psi(n, s, u))))
    return rows


def cmd_lundberg(sc: Scenario, fmt, threads=1):
    rows = [("b", "R", "xi", "u", "state", "bound", "exceeds_one")]
    for b in sc.retentions:
        terms = ReinsuranceTerms(sc.theta, sc.eta, b)
        try:
            res = lundberg.solve_R(sc.model, terms)
        except NoAdjustmentCoefficientError as exc:
            if sc.model.tail_index is not None:
                raise
            log.warning("b=%s skipped: %s", b, exc)
            continue
        for u in sc.lundberg["capitals"]:
            for s in sc.states:
                bound = lundberg.upper_bound(u, s, res, sc.chain)
                rows.append((fmt(b), fmt(res.R), fmt(res.xi), fmt(u), str(s + 1), fmt(bound), str(int(bound > 1.0))))
    return rows


def cmd_asymptotic(sc: Scenario, fmt, threads=1):
    if sc.model.tail_index is None:
        raise UnsupportedError(f"the asymptotic approximation needs regularly varying claims, got {sc.model.kind}")
    opts = sc.asymptotic
    n = opts["horizon"]
    coeffs = asymptotics.coefficients(sc.chain, sc.model.tail_index, n)
    tables = _tables(sc, opts["retentions"], n, opts["capitals"], threads)
    rows = [("u", "b", "n", "state", "psi", "approx", "ratio")]
    for b in opts["retentions"]:
        loss = sc.model.retained(b)
        for s in sc.states:
            series = asymptotics.convergence_ratio(tables[b], coeffs, loss, opts["capitals"], s)
            for excluded in series.excluded:
                log.warning("u=%s excluded: retained survival is zero", excluded)
            for u, psi, approx, ratio in zip(series.u, series.psi, series.approx, series.ratio):
                rows.append((fmt(u), fmt(b), str(n), str(s + 1), fmt(psi), fmt(approx), fmt(ratio)))
    return rows


def cmd_retention(sc: Scenario, fmt, threads=1):
    opts = sc.retention
    horizons = opts["horizons"]
    grid = tuple(sc.retentions)
    tables = _tables(sc, grid, max(horizons), opts["capitals"], threads)
    header = ["u"] + [f"n{n}_s{s + 1}" for n in horizons for s in sc.states]
    rows = [tuple(header)]
    terms = ReinsuranceTerms(sc.theta, sc.eta, 1.0)
    for u in opts["capitals"]:
        cells = [fmt(u)]
        for n in horizons:
            for s in sc.states:
                query = retention.RetentionQuery(n, u, s, opts["tolerance"], grid)
                result = retention.search_tables(query, [tables[b] for b in grid])
                if opts["refine"] and result.outcome == "partial" and u >= 1:
                    result = retention.max_retention(
                        query, sc.model, terms, sc.chain, sc.engine_config(n, (u,), threads), refine=True
                    )
                if not result.verify():
                    raise RuinError(f"retention certificate failed at u={u}, n={n}, state={s + 1}")
                cells.append(result.label(fmt))
        rows.append(tuple(cells))
    return rows


def cmd_simulate(sc: Scenario, fmt, threads=1, seed=None):
    opts = sc.simulate
    spec = simulate.SimulationSpec(
        model=sc.model,
        terms=ReinsuranceTerms(sc.theta, sc.eta, opts["retention"]),
        chain=sc.chain,
        u=opts["capital"],
        state=opts["state"] - 1,
        horizon=opts["horizon"],
        paths=opts["paths"],
        seed=opts["seed"] if seed is None else seed,
    )
    res = simulate.run(spec, workers=threads)
    rows = [("n", "estimate", "stderr", "paths", "seed")]
    for k in range(spec.horizon):
        rows.append((str(k + 1), fmt(res.estimates[k]), fmt(res.stderr[k]), str(res.paths), str(res.seed)))
    return rows


def render(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="discrete-ruin", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--scenario", required=True, help="YAML scenario file")
    parser.add_argument("--out", help="output CSV path (default: stdout)")
    parser.add_argument("--seed", type=int, help="override simulate.seed")
    parser.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    parser.add_argument("--precision", choices=("6", "full"), default="6", help="significant digits in the CSV")
    return parser


def run(argv=None) -> str:
    """Parse ``argv``, execute the command and return the CSV text."""
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        raise ConfigError(["--threads: must be >= 1"])
    sc = load(args.scenario)
    fmt = _formatter(args.precision == "full")
    if args.command == "simulate":
        rows = cmd_simulate(sc, fmt, args.threads, args.seed)
    else:
        handler = {
            "ruin-table": cmd_ruin_table,
            "lundberg": cmd_lundberg,
            "asymptotic": cmd_asymptotic,
            "retention": cmd_retention,
        }[args.command]
        rows = handler(sc, fmt, args.threads)
    text = render(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        run(argv)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except UnsupportedError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (RuinError, FloatingPointError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
