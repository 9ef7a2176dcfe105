"""Command-line front end: closed-loop runs, policy comparison, parameter sweeps, serving.

Every run writes one CSV row per MNO per auction with the header

    auction,seed,policy,fairness,capacity,mno_id,bid,weight,won,payment,revenue,utility,wins,requests

and identical invocations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace

import numpy as np

from .config import ExperimentConfig, build_experiment, load_config
from .engine import EpisodeLog, run_episode
from .errors import ConfigError
from .market import default_mno_configs

CSV_HEADER = [
    "auction", "seed", "policy", "fairness", "capacity", "mno_id", "bid", "weight",
    "won", "payment", "revenue", "utility", "wins", "requests",
]

STEADY_WINDOW = 0.1  # trailing fraction of auctions used for steady-state fairness


def _fmt(x: float) -> str:
    return repr(float(x))


def _episode_rows(log: EpisodeLog) -> list[list]:
    rows = []
    auctions, m = log.bids.shape
    for j in range(auctions):
        for i in range(m):
            rows.append([
                j + 1,
                log.seed,
                log.policy,
                _fmt(log.fairness[j]),
                int(log.capacity[j]),
                i + 1,
                _fmt(log.bids[j, i]),
                _fmt(log.weights[j, i]),
                int(log.won[j, i]),
                _fmt(log.payments[j, i]),
                _fmt(log.revenue[j, i]),
                _fmt(log.utility[j, i]),
                int(log.wins[j, i]),
                int(log.requests[j, i]),
            ])
    return rows


def _write_csv(rows: list[list], out: str | None, extra_header: list[str] | None = None) -> None:
    header = CSV_HEADER + (extra_header or [])
    if out is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _load_experiment(args) -> ExperimentConfig:
    experiment = load_config(args.config) if args.config else build_experiment({})
    if getattr(args, "policy", None):
        experiment.simulation.policy.kind = args.policy
    if getattr(args, "auctions", None) is not None:
        if args.auctions < 0:
            raise ConfigError("--auctions must be non-negative")
        experiment.simulation.episode_length = args.auctions
    if getattr(args, "seeds", None):
        experiment.seeds = _parse_int_list(args.seeds, "--seeds")
    elif getattr(args, "seed", None) is not None:
        experiment.seeds = [args.seed]
    if getattr(args, "out", None):
        experiment.output = args.out
    experiment.simulation.validate()
    return experiment


def _parse_int_list(text: str, flag: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise ConfigError(f"{flag} expects comma-separated integers, got {text!r}") from None


def _run_all_seeds(experiment: ExperimentConfig) -> list[EpisodeLog]:
    return [run_episode(experiment.simulation, seed) for seed in experiment.seeds]


def cmd_run(args) -> int:
    experiment = _load_experiment(args)
    rows = []
    for log in _run_all_seeds(experiment):
        rows.extend(_episode_rows(log))
    _write_csv(rows, experiment.output)
    return 0


def cmd_compare(args) -> int:
    experiment = _load_experiment(args)
    policies = [p.strip() for p in args.policies.split(",") if p.strip()]
    if not policies:
        raise ConfigError("--policies expects at least one policy name")
    means: dict[str, float] = {}
    stds: dict[str, float] = {}
    for kind in policies:
        sim = replace(experiment.simulation, policy=replace(experiment.simulation.policy, kind=kind))
        sim.validate()
        steady = [run_episode(sim, seed).steady_fairness(STEADY_WINDOW) for seed in experiment.seeds]
        means[kind] = float(np.mean(steady))
        stds[kind] = float(np.std(steady))
    baseline = "unweighted" if "unweighted" in means else policies[0]
    print(f"steady-state fairness, mean over final {int(STEADY_WINDOW * 100)}% of "
          f"{experiment.simulation.episode_length} auctions, {len(experiment.seeds)} seed(s)")
    print(f"{'policy':<18}{'fairness':>10}{'std':>10}{'vs ' + baseline:>16}")
    for kind in policies:
        rel = 100.0 * (means[kind] - means[baseline]) / means[baseline]
        print(f"{kind:<18}{means[kind]:>10.4f}{stds[kind]:>10.4f}{rel:>+15.1f}%")
    return 0


def cmd_sweep(args) -> int:
    experiment = _load_experiment(args)
    values = _parse_int_list(args.values, "--values")
    if not values:
        print("sweep: no values given, nothing to do", file=sys.stderr)
        return 0
    rows = []
    for value in values:
        sim = replace(experiment.simulation)
        if args.axis == "n":
            if not 1 <= value <= sim.sensing.total_uavs:
                print(f"sweep: skipping n={value}, outside [1, {sim.sensing.total_uavs}]", file=sys.stderr)
                continue
            sim = replace(sim, sensing=replace(sim.sensing, vote_threshold=value))
        else:  # axis == "mnos"
            if value < 1:
                print(f"sweep: skipping mnos={value}, must be >= 1", file=sys.stderr)
                continue
            sim = replace(
                sim,
                mnos=default_mno_configs(value),
                sensing=replace(sim.sensing, num_mnos=value),
            )
        try:
            sim.validate()
        except ConfigError as exc:
            print(f"sweep: skipping {args.axis}={value}: {exc}", file=sys.stderr)
            continue
        for seed in experiment.seeds:
            log = run_episode(sim, seed)
            for row in _episode_rows(log):
                rows.append(row + [value])
    _write_csv(rows, experiment.output, extra_header=["sweep_value"])
    return 0


def cmd_serve(args) -> int:
    # imported here so plain runs do not pay for the socket machinery
    from .env import serve_stdio, serve_tcp

    if args.port is not None:
        serve_tcp(args.port)
    else:
        serve_stdio()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairvcg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_policy=True):
        p.add_argument("--config", help="YAML experiment config file")
        if with_policy:
            p.add_argument("--policy", help="weight policy kind override")
        p.add_argument("--auctions", type=int, help="auctions per episode")
        group = p.add_mutually_exclusive_group()
        group.add_argument("--seed", type=int, help="single seed")
        group.add_argument("--seeds", help="comma-separated seeds")
        p.add_argument("--out", help="CSV output path (default: stdout)")

    p_run = sub.add_parser("run", help="one closed-loop run per seed, CSV per-MNO rows")
    add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="steady-state fairness table across policies")
    add_common(p_cmp, with_policy=False)
    p_cmp.add_argument("--policies", default="unweighted,combined,mswga",
                       help="comma-separated policy kinds")
    p_cmp.set_defaults(func=cmd_compare)

    p_sweep = sub.add_parser("sweep", help="repeat runs along one config axis")
    add_common(p_sweep)
    p_sweep.add_argument("--axis", choices=("n", "mnos"), required=True,
                         help="n: vote threshold, mnos: operator count")
    p_sweep.add_argument("--values", required=True, help="comma-separated axis values")
    p_sweep.set_defaults(func=cmd_sweep)

    p_serve = sub.add_parser("serve", help="serve the line-JSON environment protocol")
    p_serve.add_argument("--stdio", action="store_true", help="serve over stdin/stdout (default)")
    p_serve.add_argument("--port", type=int, help="serve one TCP client on this port (0 picks one)")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; report those as config errors
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
