"""Command-line entry point for training weight-policy agents."""

from __future__ import annotations

import argparse
import sys

from .client import ProtocolError
from .trainer import TrainConfig, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairrl",
        description="Train a reinforcement-learning weight policy against the auction environment.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="run a training session")
    p.add_argument("--algo", choices=["ddpg", "sac", "random"], default="ddpg")
    p.add_argument("--env", default="stdio",
                   help="environment address: 'stdio' (spawn a server subprocess) or tcp://host:port")
    p.add_argument("--episodes", type=int, default=20)
    p.add_argument("--auctions", type=int, default=100,
                   help="auctions per episode")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--lr", type=float, default=1e-7,
                   help="critic learning rate; the actor uses lr/10")
    p.add_argument("--gamma", type=float, default=0.05)
    p.add_argument("--tau", type=float, default=0.01)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--noise", type=float, default=0.5,
                   help="initial exploration noise scale (decays linearly)")
    p.add_argument("--warmup", type=int, default=400,
                   help="uniform-random action steps before updates begin")
    p.add_argument("--out", default="runs/latest", help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = TrainConfig(
        algo=args.algo,
        episodes=args.episodes,
        auctions=args.auctions,
        seed=args.seed,
        lr=args.lr,
        gamma=args.gamma,
        tau=args.tau,
        batch_size=args.batch_size,
        noise_scale=args.noise,
        warmup_steps=args.warmup,
    )
    try:
        cfg.validate()
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        meta = train(address=args.env, config=cfg, out_dir=args.out)
    except ProtocolError as exc:
        print(f"environment error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    print(
        f"trained {meta['algo']} for {meta['total_steps']} steps; "
        f"final moving-average reward {meta['final_moving_avg']:.4f}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
