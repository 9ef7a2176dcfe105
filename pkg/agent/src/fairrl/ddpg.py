"""Deterministic actor-critic learner with target networks and soft updates.

Two stabilizers address a failure mode specific to this problem — the auction
reward is invariant to uniform weight scaling, leaving a value-flat direction
along which an unconstrained actor drifts until its tanh output saturates at
an action-box corner and gradients die:

- the critic head is bounded to the feasible return range [0, 1/(1-gamma)]
  (rewards are fairness values in [0, 1]), so it cannot fabricate unbounded
  value growth outside the data;
- the actor loss adds an L2 penalty on pre-tanh activations, keeping the
  policy in the squash's responsive zone so the critic can always steer it
  back from a bad region.

The actor is additionally updated only every `policy_delay`-th critic update,
letting the value estimate settle between policy steps.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F

from .buffer import ReplayBuffer
from .nets import Actor, Critic


@dataclass
class AgentConfig:
    state_dim: int
    action_dim: int
    hidden: tuple[int, int] = (400, 300)
    gamma: float = 0.9
    tau: float = 0.01
    batch_size: int = 32
    buffer_size: int = 1_000_000
    actor_lr: float = 1e-7
    critic_lr: float = 1e-7
    action_low: float = 0.05
    action_high: float = 1.0
    policy_delay: int = 1
    pre_tanh_penalty: float = 0.0
    bounded_critic: bool = False

    def validate(self) -> None:
        if self.state_dim < 1 or self.action_dim < 1:
            raise ValueError("state_dim and action_dim must be >= 1")
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError(f"gamma {self.gamma} outside (0, 1]")
        if not (0.0 < self.tau <= 1.0):
            raise ValueError(f"tau {self.tau} outside (0, 1]")
        if self.batch_size < 1 or self.batch_size > self.buffer_size:
            raise ValueError("batch_size must be in [1, buffer_size]")
        if self.actor_lr <= 0 or self.critic_lr <= 0:
            raise ValueError("learning rates must be positive")
        if not (self.action_low < self.action_high):
            raise ValueError("action_low must be < action_high")
        if self.policy_delay < 1:
            raise ValueError("policy_delay must be >= 1")
        if self.pre_tanh_penalty < 0:
            raise ValueError("pre_tanh_penalty must be >= 0")
        if self.bounded_critic and self.gamma >= 1.0:
            raise ValueError("bounded_critic requires gamma < 1")

    @property
    def q_max(self) -> float | None:
        return 1.0 / (1.0 - self.gamma) if self.bounded_critic else None


def soft_update(target: torch.nn.Module, online: torch.nn.Module, tau: float) -> None:
    """target <- tau * online + (1 - tau) * target, parameter-wise."""
    with torch.no_grad():
        for t, o in zip(target.parameters(), online.parameters()):
            t.copy_(tau * o + (1.0 - tau) * t)
        for t, o in zip(target.buffers(), online.buffers()):
            t.copy_(o)


class DdpgAgent:
    def __init__(self, config: AgentConfig, seed: int = 0):
        config.validate()
        self.config = config
        torch.manual_seed(seed)
        c = config
        self.actor = Actor(c.state_dim, c.action_dim, c.hidden, c.action_low, c.action_high)
        self.critic = Critic(c.state_dim, c.action_dim, c.hidden, q_max=c.q_max)
        self.actor_target = copy.deepcopy(self.actor)
        self.critic_target = copy.deepcopy(self.critic)
        for p in self.actor_target.parameters():
            p.requires_grad_(False)
        for p in self.critic_target.parameters():
            p.requires_grad_(False)
        self.actor_opt = torch.optim.Adam(self.actor.parameters(), lr=c.actor_lr)
        self.critic_opt = torch.optim.Adam(self.critic.parameters(), lr=c.critic_lr)
        self.buffer = ReplayBuffer(c.buffer_size, c.state_dim, c.action_dim, seed=seed)
        self._updates = 0

    @torch.no_grad()
    def act(self, obs: np.ndarray, noise_scale: float = 0.0,
            rng: np.random.Generator | None = None) -> np.ndarray:
        state = torch.from_numpy(np.asarray(obs, dtype=np.float32)).unsqueeze(0)
        action = self.actor(state).squeeze(0).numpy()
        if noise_scale > 0.0:
            if rng is None:
                rng = np.random.default_rng()
            action = action + rng.normal(0.0, noise_scale, size=action.shape)
        return np.clip(action, self.config.action_low, self.config.action_high).astype(np.float32)

    def critic_target_values(self, batch: dict[str, torch.Tensor]) -> torch.Tensor:
        """Bootstrapped targets y = r + gamma * (1 - done) * Q'(s', pi'(s'))."""
        with torch.no_grad():
            next_actions = self.actor_target(batch["next_states"])
            next_q = self.critic_target(batch["next_states"], next_actions)
            return batch["rewards"] + self.config.gamma * (1.0 - batch["dones"]) * next_q

    def critic_loss(self, batch: dict[str, torch.Tensor]) -> torch.Tensor:
        y = self.critic_target_values(batch)
        q = self.critic(batch["states"], batch["actions"])
        return F.mse_loss(q, y)

    def actor_loss(self, batch: dict[str, torch.Tensor]) -> torch.Tensor:
        pre = self.actor.pre_activation(batch["states"])
        q = self.critic(batch["states"], self.actor.squash(pre))
        loss = -q.mean()
        if self.config.pre_tanh_penalty > 0:
            loss = loss + self.config.pre_tanh_penalty * pre.pow(2).mean()
        return loss

    def update(self) -> tuple[float, float | None]:
        """One critic step; an actor step every `policy_delay`-th call.
        Returns (critic_loss, actor_loss or None if the actor was skipped)."""
        batch = self.buffer.sample(self.config.batch_size)

        c_loss = self.critic_loss(batch)
        if not torch.isfinite(c_loss):
            raise RuntimeError(f"critic loss diverged: {c_loss.item()}")
        self.critic_opt.zero_grad()
        c_loss.backward()
        self.critic_opt.step()

        self._updates += 1
        a_loss_value: float | None = None
        if self._updates % self.config.policy_delay == 0:
            a_loss = self.actor_loss(batch)
            if not torch.isfinite(a_loss):
                raise RuntimeError(f"actor loss diverged: {a_loss.item()}")
            self.actor_opt.zero_grad()
            a_loss.backward()
            self.actor_opt.step()
            soft_update(self.actor_target, self.actor, self.config.tau)
            a_loss_value = float(a_loss.item())

        soft_update(self.critic_target, self.critic, self.config.tau)
        return float(c_loss.item()), a_loss_value

    def save(self, path: str) -> None:
        torch.save(
            {
                "actor": self.actor.state_dict(),
                "critic": self.critic.state_dict(),
                "actor_target": self.actor_target.state_dict(),
                "critic_target": self.critic_target.state_dict(),
                "config": self.config.__dict__,
            },
            path,
        )

    def load(self, path: str) -> None:
        ckpt = torch.load(path, weights_only=True)
        self.actor.load_state_dict(ckpt["actor"])
        self.critic.load_state_dict(ckpt["critic"])
        self.actor_target.load_state_dict(ckpt["actor_target"])
        self.critic_target.load_state_dict(ckpt["critic_target"])
