"""Command line: ``onlineload {run,sweep,check-bound,selftest}``.

Exit codes: 0 success, 1 bound violation, 2 invalid config, 3 oracle failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict

from .engine import BlackwellViolation, OracleFailure
from .harness import (ENVIRONMENTS, EXIT_BOUND_VIOLATION, EXIT_INVALID_CONFIG, EXIT_OK,
                      EXIT_ORACLE_FAILURE, PLAYERS, ConfigError, GameConfig, check_bound,
                      run_config, scaling_slope, selftest, sweep, write_sweep_csv)


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _game_flags(p: argparse.ArgumentParser, t_type=int) -> None:
    p.add_argument("--config", help="JSON file with GameConfig fields; flags override it")
    p.add_argument("--k", type=int)
    p.add_argument("--t", type=t_type)
    p.add_argument("--seed", type=int)
    p.add_argument("--env", choices=ENVIRONMENTS)
    p.add_argument("--period", type=int, help="rotating_spike period")
    p.add_argument("--rates", type=_floats, help="bernoulli rates, comma separated")
    p.add_argument("--player", choices=PLAYERS)
    p.add_argument("--eta", type=float, dest="eta_override")
    p.add_argument("--tol", type=float)
    p.add_argument("--out", dest="out_path")


def _config(args, skip=()) -> GameConfig:
    cfg = GameConfig.from_json(args.config) if args.config else GameConfig()
    data = asdict(cfg)
    for name in data:
        if name in skip:
            continue
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    return GameConfig(**data).validate()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="onlineload", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="play one game and write its trace CSV")
    _game_flags(run)
    run.add_argument("--json-out", help="also dump every round as JSON (large)")

    sw = sub.add_parser("sweep", help="vary the horizon and summarize regret vs bound")
    _game_flags(sw, t_type=_ints)
    sw.add_argument("--jobs", type=int, default=1)

    cb = sub.add_parser("check-bound", help="check a trace CSV against 2 sqrt(2T ln 4K)")
    cb.add_argument("trace")
    cb.add_argument("--tol", type=float, default=1e-6)

    st = sub.add_parser("selftest", help="cross-validate the oracles against grid search")
    st.add_argument("--seed", type=int, default=2024)
    return parser


def _run(args) -> int:
    cfg = _config(args)
    trace = run_config(cfg, keep_rounds=bool(args.json_out))
    if args.json_out:
        trace.write_json(args.json_out)
    report = check_bound(trace, cfg.tol, cfg.out_path)
    print("\n".join(report.lines()))
    if cfg.player == "algorithm1" and not (report.passed and report.chain_holds):
        return EXIT_BOUND_VIOLATION
    return EXIT_OK


def _sweep(args) -> int:
    horizons = args.t or [1000, 4000, 16000]
    args.t = None
    cfg = _config(args, skip=("out_path",))
    rows = sweep(cfg, horizons, jobs=args.jobs)
    if args.out_path:
        write_sweep_csv(rows, args.out_path)
    print("T,regret,bound,ratio")
    for t, r, b, q in rows:
        print(f"{t},{r:.12g},{b:.12g},{q:.12g}")
    if len(rows) >= 2 and all(r[1] > 0 for r in rows):
        print(f"# log-log slope {scaling_slope(rows):.4f}")
    ratios = [q for *_, q in rows]
    if any(b > a for a, b in zip(ratios, ratios[1:])):
        print("# note: regret/bound ratio is not monotone in T")
    if cfg.player == "algorithm1" and any(r > b for _, r, b, _ in rows):
        return EXIT_BOUND_VIOLATION
    return EXIT_OK


def _check(args) -> int:
    report = check_bound(args.trace, args.tol)
    print("\n".join(report.lines()))
    return EXIT_OK if report.passed and report.chain_holds else EXIT_BOUND_VIOLATION


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run(args)
        if args.command == "sweep":
            return _sweep(args)
        if args.command == "check-bound":
            return _check(args)
        results = selftest(args.seed)
        return EXIT_OK if all(results.values()) else EXIT_ORACLE_FAILURE
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except (OracleFailure, BlackwellViolation) as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE_FAILURE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG


if __name__ == "__main__":
    sys.exit(main())
