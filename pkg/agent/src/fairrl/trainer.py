"""Training loop: drives the auction environment over its wire protocol and
learns a per-operator weight policy online.

Each episode resets the environment with a fresh seed (base seed + episode
index) and a config requesting external weight control, then steps through a
fixed number of auctions. The reward is the fairness signal returned by the
environment at each step.

Exploration: the first `warmup_steps` actions are drawn uniformly from the
action box (this both fills the replay buffer with diverse action contrast
before any gradient step and delays updates until then); afterwards Gaussian
noise is added to the policy action, with scale decaying linearly from
`noise_scale` to zero at 80% of the total step budget — so the trailing
window of the reward log measures the learned policy, not the exploration.

The single `lr` knob sets the critic learning rate; the actor uses lr / 10,
the usual ratio that keeps the policy from outrunning its value estimate.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np
import torch

from .client import EnvClient, ProtocolError
from .ddpg import AgentConfig, DdpgAgent
from .features import observe
from .sac import SacAgent

MOVING_AVG_WINDOW = 200
CHECKPOINT_EVERY = 100
ACTOR_LR_RATIO = 0.1


@dataclass
class TrainConfig:
    algo: str = "ddpg"
    episodes: int = 20
    auctions: int = 100
    seed: int = 1
    lr: float = 1e-7
    gamma: float = 0.05
    tau: float = 0.01
    batch_size: int = 64
    buffer_size: int = 1_000_000
    hidden: tuple[int, int] = (400, 300)
    noise_scale: float = 0.5
    warmup_steps: int = 400
    policy_delay: int = 4
    pre_tanh_penalty: float = 0.1
    bounded_critic: bool = True
    env_overrides: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.algo not in ("ddpg", "sac", "random"):
            raise ValueError(f"unknown algo {self.algo!r}")
        if self.episodes < 1 or self.auctions < 1:
            raise ValueError("episodes and auctions must be >= 1")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be >= 0")
        if self.warmup_steps < 1:
            raise ValueError("warmup_steps must be >= 1")


def _reset_config(cfg: TrainConfig) -> dict:
    overrides = {"auctions": cfg.auctions, "policy": {"kind": "external"}}
    for key, value in cfg.env_overrides.items():
        if key == "policy":
            merged = dict(value)
            merged["kind"] = "external"
            overrides["policy"] = merged
        elif key == "auctions":
            continue
        else:
            overrides[key] = value
    return overrides


def _reset_with_retry(client: EnvClient, seed: int, overrides: dict) -> dict:
    """One retry on a protocol hiccup, then give up."""
    try:
        return client.reset(seed, overrides)
    except ProtocolError:
        return client.reset(seed, overrides)


def train(
    address: str = "stdio",
    config: TrainConfig | None = None,
    out_dir: str = "runs/latest",
    client: EnvClient | None = None,
) -> dict:
    """Run the full training loop; returns a summary dict.

    `client` may be injected for testing; otherwise one is opened for
    `address` and closed on exit.
    """
    cfg = config or TrainConfig()
    cfg.validate()
    os.makedirs(out_dir, exist_ok=True)

    owns_client = client is None
    if client is None:
        client = EnvClient(address)
    try:
        return _train_loop(client, cfg, out_dir)
    finally:
        if owns_client:
            client.close()


def _make_agent(cfg: TrainConfig, state_dim: int, action_dim: int):
    agent_cfg = AgentConfig(
        state_dim=state_dim,
        action_dim=action_dim,
        hidden=cfg.hidden,
        gamma=cfg.gamma,
        tau=cfg.tau,
        batch_size=cfg.batch_size,
        buffer_size=cfg.buffer_size,
        actor_lr=cfg.lr * ACTOR_LR_RATIO,
        critic_lr=cfg.lr,
        policy_delay=cfg.policy_delay,
        pre_tanh_penalty=cfg.pre_tanh_penalty,
        bounded_critic=cfg.bounded_critic,
    )
    if cfg.algo == "ddpg":
        return DdpgAgent(agent_cfg, seed=cfg.seed)
    if cfg.algo == "sac":
        return SacAgent(agent_cfg, seed=cfg.seed)
    return None  # random ablation: no learner


def _train_loop(client: EnvClient, cfg: TrainConfig, out_dir: str) -> dict:
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)

    overrides = _reset_config(cfg)
    state = _reset_with_retry(client, cfg.seed, overrides)
    action_dim = len(state["bids"])
    obs0 = observe(state)
    agent = _make_agent(cfg, len(obs0), action_dim)
    low, high = 0.05, 1.0
    if agent is not None:
        low, high = agent.config.action_low, agent.config.action_high

    total_steps = cfg.episodes * cfg.auctions
    decay_horizon = max(1, int(0.8 * total_steps))
    update_from = max(cfg.warmup_steps, cfg.batch_size)
    rewards_path = os.path.join(out_dir, "rewards.csv")
    recent: list[float] = []
    global_step = 0
    final_moving_avg = 0.0

    with open(rewards_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "auction", "reward", "moving_avg"])
        for episode in range(cfg.episodes):
            state = _reset_with_retry(client, cfg.seed + episode, overrides)
            obs = observe(state)
            done = False
            auction = 0
            while not done:
                if agent is None or global_step < cfg.warmup_steps:
                    action = rng.uniform(low, high, size=action_dim).astype(np.float32)
                elif isinstance(agent, SacAgent):
                    action = agent.act(obs)
                else:
                    sigma = cfg.noise_scale * max(0.0, 1.0 - global_step / decay_horizon)
                    action = agent.act(obs, noise_scale=sigma, rng=rng)

                next_state, reward, done, _info = client.step(action.tolist())
                next_obs = observe(next_state)
                if agent is not None:
                    agent.buffer.push(obs, action, reward, next_obs, done)
                    if len(agent.buffer) >= update_from:
                        agent.update()

                recent.append(reward)
                if len(recent) > MOVING_AVG_WINDOW:
                    recent.pop(0)
                final_moving_avg = sum(recent) / len(recent)
                writer.writerow([episode, auction, repr(reward), repr(final_moving_avg)])

                obs = next_obs
                auction += 1
                global_step += 1

            if agent is not None and (episode + 1) % CHECKPOINT_EVERY == 0:
                agent.save(os.path.join(out_dir, f"checkpoint_ep{episode + 1:05d}.pt"))

    if agent is not None:
        agent.save(os.path.join(out_dir, "final.pt"))

    meta = {
        "algo": cfg.algo,
        "episodes": cfg.episodes,
        "auctions": cfg.auctions,
        "seed": cfg.seed,
        "lr": cfg.lr,
        "gamma": cfg.gamma,
        "tau": cfg.tau,
        "batch_size": cfg.batch_size,
        "noise_scale": cfg.noise_scale,
        "warmup_steps": cfg.warmup_steps,
        "policy_delay": cfg.policy_delay,
        "pre_tanh_penalty": cfg.pre_tanh_penalty,
        "bounded_critic": cfg.bounded_critic,
        "total_steps": global_step,
        "final_moving_avg": final_moving_avg,
    }
    with open(os.path.join(out_dir, "training_meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2)
    return meta
