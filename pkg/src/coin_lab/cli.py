"""``coin-lab`` command line."""

from __future__ import annotations

import argparse
import sys

from coin_lab.bar import BarParams
from coin_lab.harness import ALIASES, ConfigError, bar_optimum, format_csv, parse_config, run_batch, write_csv

# flag -> config key
RUN_FLAGS = {
    "problem": "problem",
    "reward": "reward",
    "alpha": "alpha_preset",
    "tensor": "tensor",
    "partition": "partition_kind",
    "weeks": "weeks",
    "runs": "runs",
    "seed": "seed",
    "macro_week": "macro_week",
    "macro_window": "macro_window",
    "agents": "num_agents",
    "leaders": "num_leaders",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coin-lab")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a batch of seeded trials and emit the mean learning curve")
    run.add_argument("--config", help="flat key = value config file")
    run.add_argument("--problem", choices=["bar", "lf", "leader_follower"])
    run.add_argument("--reward", choices=["ud", "gr", "wl"])
    run.add_argument("--alpha", choices=["uniform", "single", "single_night"])
    run.add_argument("--tensor", choices=["worst", "worst_case", "random"])
    run.add_argument("--partition", choices=["singleton", "team", "team_of_3", "random", "random_of_3"])
    run.add_argument("--weeks", type=int)
    run.add_argument("--runs", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--macro-week", type=int)
    run.add_argument("--macro-window", type=int)
    run.add_argument("--agents", type=int)
    run.add_argument("--leaders", type=int)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", help="CSV path (stdout if omitted)")

    opt = sub.add_parser("optimum", help="print the best weekly bar world reward")
    opt.add_argument("--alpha", choices=["uniform", "single", "single_night"], default="uniform")
    opt.add_argument("--agents", type=int, default=168)
    opt.add_argument("--capacity", type=float, default=6.0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "optimum":
        alpha = ALIASES["alpha_preset"].get(args.alpha, args.alpha)
        try:
            params = BarParams.preset(alpha, capacity=args.capacity, num_agents=args.agents)
        except ValueError as exc:
            print(f"coin-lab: {exc}", file=sys.stderr)
            return 2
        print(f"{bar_optimum(params):.6f}")
        return 0

    overrides = {key: getattr(args, flag) for flag, key in RUN_FLAGS.items()}
    try:
        config = parse_config(args.config, overrides)
    except ConfigError as exc:
        print(f"coin-lab: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"coin-lab: {exc}", file=sys.stderr)
        return 2
    series = run_batch(config, workers=args.workers)
    if args.out:
        write_csv(series, args.out)
    else:
        sys.stdout.write(format_csv(series))
    return 0


if __name__ == "__main__":
    sys.exit(main())
