"""Command-line interface.

Subcommands:
  train     train the two-agent controller (variants: eatsc, null)
  baseline  run a fixed controller (variants: fixed-cyclic, fixed-penalty, null)
  boundary  solve the interest-rate decision boundary between two queues
  table1    recompute the worked penalty example against its reference values

Runs write CSV artifacts (see README for schemas) under --out; reruns with
identical configuration and seed produce byte-identical files.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

from .agents import run_training
from .baselines import BASELINE_VARIANTS, run_baseline
from .config import RunConfig, load_config, parse_config_file
from .domain import QueueId, QueueState, Vehicle
from .net import save_weights
from .penalty import boundary_rate, choose_green, penalty_difference
from .records import (
    DECISION_COLUMNS,
    EPISODE_COLUMNS,
    PER_QUEUE_COLUMNS,
    WAIT_COLUMNS,
    ensure_dir,
    write_csv,
)

TRAIN_VARIANTS = ("eatsc", "null")


# -- worked penalty example (the table1 report) ------------------------------

#: Reference values as published for the worked example: queue E holds one
#: vehicle that has waited 10 s, queue N two vehicles at 8 s and 9 s, unit
#: principals, a common rate per case. Entries: (rate, penalty_E, penalty_N,
#: difference, decision). The reference digits are 2-decimal displays.
TABLE1_REFERENCE = (
    (0.1, 2.72, 4.68, -1.96, "N"),
    (0.5, 148.41, 144.62, 3.79, "E"),
    (0.0, 1.0, 2.0, -1.0, "N"),
)


@dataclass
class Table1Case:
    case: int
    rate: float
    penalty_e: float
    penalty_n: float
    difference: float
    decision: str
    reference: tuple


def table1_cases() -> list[Table1Case]:
    """Recompute every case of the worked example with the penalty engine."""
    results = []
    for idx, ref in enumerate(TABLE1_REFERENCE, start=1):
        rate = ref[0]
        now = 10.0
        q_e = QueueState(QueueId.E, [Vehicle(arrival_time=0.0)], interest_rate=rate)
        q_w = QueueState(QueueId.W, [], interest_rate=rate)
        q_n = QueueState(
            QueueId.N,
            [Vehicle(arrival_time=1.0), Vehicle(arrival_time=2.0)],
            interest_rate=rate,
        )
        q_s = QueueState(QueueId.S, [], interest_rate=rate)
        report = choose_green([q_e, q_w, q_n, q_s], now)
        results.append(
            Table1Case(
                case=idx,
                rate=rate,
                penalty_e=report.per_queue[QueueId.E],
                penalty_n=report.per_queue[QueueId.N],
                difference=penalty_difference(q_e, q_n, now),
                decision=report.winner.name,
                reference=ref,
            )
        )
    return results


def _cmd_table1(args) -> int:
    print("Worked example: Q_E one vehicle waiting 10 s; Q_N two vehicles waiting 8 s and 9 s.")
    print("Computed with the penalty engine, side by side with the reference values.")
    for c in table1_cases():
        _, ref_pe, ref_pn, ref_d, ref_dec = c.reference
        print(
            f"TABLE1 case={c.case} rate={c.rate!r} "
            f"penalty_E={c.penalty_e!r} penalty_N={c.penalty_n!r} "
            f"difference={c.difference!r} decision={c.decision} "
            f"ref_penalty_E={ref_pe!r} ref_penalty_N={ref_pn!r} "
            f"ref_difference={ref_d!r} ref_decision={ref_dec}"
        )
    return 0


# -- boundary ----------------------------------------------------------------


def _parse_waits(text: str) -> list[float]:
    try:
        waits = [float(w) for w in text.replace("{", "").replace("}", "").split(",") if w.strip()]
    except ValueError:
        raise ValueError(f"bad wait list {text!r}; expected comma-separated seconds") from None
    if not waits:
        raise ValueError(f"wait list {text!r} is empty")
    if min(waits) < 0:
        raise ValueError("waits must be >= 0")
    return waits


def _cmd_boundary(args) -> int:
    w1 = _parse_waits(args.q1)
    w2 = _parse_waits(args.q2)
    rate = boundary_rate(w1, w2, i_max=args.i_max)

    def diff(i):
        return sum(math.exp(w * i) for w in w1) - sum(math.exp(w * i) for w in w2)

    print(f"BOUNDARY q1={w1!r} q2={w2!r} i_max={args.i_max!r}")
    if rate is None:
        print("BOUNDARY rate=none")
    elif rate == 0.0 and sorted(w1) == sorted(w2):
        print("BOUNDARY rate=0.0 note=identical-wait-multisets-tie-at-every-rate")
    else:
        print(f"BOUNDARY rate={rate!r}")
    if args.out:
        ensure_dir(args.out)
        samples = []
        for k in range(args.samples):
            i = args.i_max * k / (args.samples - 1)
            samples.append((i, diff(i)))
        meta = {
            "command": "boundary",
            "q1": ",".join(repr(w) for w in w1),
            "q2": ",".join(repr(w) for w in w2),
            "i_max": repr(float(args.i_max)),
            "rate": "none" if rate is None else repr(rate),
        }
        path = os.path.join(args.out, "boundary_curve.csv")
        write_csv(path, meta, ("i", "D"), samples)
        print(f"BOUNDARY curve={path}")
    return 0


# -- train / baseline ---------------------------------------------------------


def _config_from_args(args, command: str) -> RunConfig:
    overrides = {}
    if args.seed is not None:
        overrides["base_seed"] = str(args.seed)
    if args.replications is not None:
        overrides["replications"] = str(args.replications)
    if args.variant is not None:
        overrides["variant"] = args.variant
    if command == "baseline" and "variant" not in overrides:
        file_values = parse_config_file(args.config) if args.config else {}
        if "variant" not in file_values:
            overrides["variant"] = "fixed-cyclic"
    return load_config(args.config, overrides)


def _write_run(out_dir, cfg: RunConfig, command: str, rep: int, seed: int, result) -> None:
    rep_dir = os.path.join(out_dir, f"rep{rep:03d}")
    ensure_dir(rep_dir)
    meta = {"command": command, "replication": str(rep), "seed": str(seed)}
    meta.update(cfg.echo())
    write_csv(
        os.path.join(rep_dir, "decisions.csv"), meta, DECISION_COLUMNS, result.decision_rows
    )
    write_csv(
        os.path.join(rep_dir, "episodes.csv"),
        meta,
        EPISODE_COLUMNS,
        [s.to_row() for s in result.episodes],
    )
    write_csv(os.path.join(rep_dir, "waits.csv"), meta, WAIT_COLUMNS, result.wait_rows)
    write_csv(
        os.path.join(rep_dir, "per_queue.csv"), meta, PER_QUEUE_COLUMNS, result.per_queue_rows
    )
    if result.pair is not None:
        if result.pair.rate_agent is not None:
            save_weights(result.pair.rate_agent.main, os.path.join(rep_dir, "rate_agent.net"))
        save_weights(result.pair.duration_agent.main, os.path.join(rep_dir, "duration_agent.net"))


def _finalize_run(out_dir, cfg: RunConfig, command: str, results) -> None:
    meta = {"command": command, "replications": str(cfg.replications)}
    meta.update(cfg.echo())
    episode_rows = []
    per_queue_rows = []
    for result in results:
        episode_rows.extend(s.to_row() for s in result.episodes)
        per_queue_rows.extend(result.per_queue_rows)
    write_csv(os.path.join(out_dir, "episodes.csv"), meta, EPISODE_COLUMNS, episode_rows)
    write_csv(os.path.join(out_dir, "per_queue.csv"), meta, PER_QUEUE_COLUMNS, per_queue_rows)
    with open(os.path.join(out_dir, "config.txt"), "w", newline="\n") as fh:
        fh.write(f"# resolved configuration for command '{command}'\n")
        for key, value in cfg.echo().items():
            fh.write(f"{key} = {value}\n")


def _run_experiment(args, command: str) -> int:
    cfg = _config_from_args(args, command)
    if command == "train" and cfg.variant not in TRAIN_VARIANTS:
        raise ValueError(f"train variant must be one of {TRAIN_VARIANTS}, got {cfg.variant!r}")
    if command == "baseline" and cfg.variant not in BASELINE_VARIANTS:
        raise ValueError(
            f"baseline variant must be one of {BASELINE_VARIANTS}, got {cfg.variant!r}"
        )
    ensure_dir(args.out)
    scenario = cfg.scenario()
    results = []
    for rep in range(cfg.replications):
        seed = cfg.base_seed + rep
        if command == "train":
            result = run_training(
                scenario, cfg.train_params(), cfg.max_episode, seed, variant=cfg.variant
            )
        else:
            result = run_baseline(
                scenario,
                cfg.variant,
                cfg.max_episode,
                seed,
                fixed_green=cfg.fixed_green,
                fixed_rates=cfg.fixed_rates(),
            )
        _write_run(args.out, cfg, command, rep, seed, result)
        results.append(result)
        failures = sum(1 for s in result.episodes if s.failed)
        print(
            f"{command} variant={cfg.variant} rep={rep} seed={seed} "
            f"episodes={len(result.episodes)} failures={failures}"
        )
    _finalize_run(args.out, cfg, command, results)
    print(f"{command} done: artifacts in {args.out}")
    return 0


# -- argument parsing ----------------------------------------------------------


def _add_run_flags(sub, variants, default_variant):
    sub.add_argument("--config", default=None, help="flat key=value config file")
    sub.add_argument("--seed", type=int, default=None, help="base seed (replication r uses seed+r)")
    sub.add_argument("--replications", type=int, default=None)
    sub.add_argument("--out", default="out", help="output directory")
    sub.add_argument("--variant", choices=variants, default=default_variant)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eatsc",
        description="Interest-rate driven adaptive traffic signal control experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the two-agent controller")
    _add_run_flags(p_train, TRAIN_VARIANTS, None)

    p_base = sub.add_parser("baseline", help="run a fixed control policy")
    _add_run_flags(p_base, BASELINE_VARIANTS, None)

    p_bound = sub.add_parser("boundary", help="interest-rate decision boundary of two queues")
    p_bound.add_argument("q1", help="comma-separated waits of queue 1, e.g. 10")
    p_bound.add_argument("q2", help="comma-separated waits of queue 2, e.g. 8,9")
    p_bound.add_argument("--i-max", type=float, default=2.0, dest="i_max")
    p_bound.add_argument("--samples", type=int, default=201, help="points on the D(i) curve")
    p_bound.add_argument("--out", default=None, help="directory for boundary_curve.csv")

    p_table = sub.add_parser("table1", help="recompute the worked penalty example")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "table1":
            return _cmd_table1(args)
        if args.command == "boundary":
            return _cmd_boundary(args)
        return _run_experiment(args, args.command)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
