"""Stochastic actor-critic learner with twin critics and entropy tuning."""

from __future__ import annotations

import copy

import numpy as np
import torch
import torch.nn.functional as F

from .buffer import ReplayBuffer
from .ddpg import AgentConfig, soft_update
from .nets import Critic, GaussianActor


class SacAgent:
    def __init__(self, config: AgentConfig, seed: int = 0,
                 target_entropy: float | None = None):
        config.validate()
        self.config = config
        torch.manual_seed(seed)
        c = config
        self.actor = GaussianActor(c.state_dim, c.action_dim, c.hidden,
                                   c.action_low, c.action_high)
        # entropy-augmented targets can be negative, so no bounded head here
        self.q1 = Critic(c.state_dim, c.action_dim, c.hidden)
        self.q2 = Critic(c.state_dim, c.action_dim, c.hidden)
        self.q1_target = copy.deepcopy(self.q1)
        self.q2_target = copy.deepcopy(self.q2)
        for net in (self.q1_target, self.q2_target):
            for p in net.parameters():
                p.requires_grad_(False)
        self.actor_opt = torch.optim.Adam(self.actor.parameters(), lr=c.actor_lr)
        self.q_opt = torch.optim.Adam(
            list(self.q1.parameters()) + list(self.q2.parameters()), lr=c.critic_lr
        )
        self.log_alpha = torch.zeros(1, requires_grad=True)
        self.alpha_opt = torch.optim.Adam([self.log_alpha], lr=c.actor_lr)
        self.target_entropy = (
            float(target_entropy) if target_entropy is not None else -float(c.action_dim)
        )
        self.buffer = ReplayBuffer(c.buffer_size, c.state_dim, c.action_dim, seed=seed)

    @property
    def alpha(self) -> torch.Tensor:
        return self.log_alpha.exp()

    @torch.no_grad()
    def act(self, obs: np.ndarray, deterministic: bool = False) -> np.ndarray:
        state = torch.from_numpy(np.asarray(obs, dtype=np.float32)).unsqueeze(0)
        if deterministic:
            action = self.actor.mean_action(state)
        else:
            action, _ = self.actor.sample(state)
        return action.squeeze(0).numpy().astype(np.float32)

    def critic_loss(self, batch: dict[str, torch.Tensor]) -> torch.Tensor:
        with torch.no_grad():
            next_actions, next_logp = self.actor.sample(batch["next_states"])
            next_q = torch.min(
                self.q1_target(batch["next_states"], next_actions),
                self.q2_target(batch["next_states"], next_actions),
            )
            y = batch["rewards"] + self.config.gamma * (1.0 - batch["dones"]) * (
                next_q - self.alpha.detach() * next_logp
            )
        q1 = self.q1(batch["states"], batch["actions"])
        q2 = self.q2(batch["states"], batch["actions"])
        return F.mse_loss(q1, y) + F.mse_loss(q2, y)

    def actor_loss(self, batch: dict[str, torch.Tensor]) -> tuple[torch.Tensor, torch.Tensor]:
        actions, logp = self.actor.sample(batch["states"])
        q = torch.min(self.q1(batch["states"], actions), self.q2(batch["states"], actions))
        return (self.alpha.detach() * logp - q).mean(), logp

    def temperature_loss(self, logp: torch.Tensor) -> torch.Tensor:
        return -(self.log_alpha * (logp + self.target_entropy).detach()).mean()

    def update(self) -> tuple[float, float, float]:
        batch = self.buffer.sample(self.config.batch_size)

        q_loss = self.critic_loss(batch)
        if not torch.isfinite(q_loss):
            raise RuntimeError(f"critic loss diverged: {q_loss.item()}")
        self.q_opt.zero_grad()
        q_loss.backward()
        self.q_opt.step()

        p_loss, logp = self.actor_loss(batch)
        if not torch.isfinite(p_loss):
            raise RuntimeError(f"policy loss diverged: {p_loss.item()}")
        self.actor_opt.zero_grad()
        p_loss.backward()
        self.actor_opt.step()

        a_loss = self.temperature_loss(logp)
        self.alpha_opt.zero_grad()
        a_loss.backward()
        self.alpha_opt.step()

        soft_update(self.q1_target, self.q1, self.config.tau)
        soft_update(self.q2_target, self.q2, self.config.tau)
        return float(q_loss.item()), float(p_loss.item()), float(a_loss.item())

    def save(self, path: str) -> None:
        torch.save(
            {
                "actor": self.actor.state_dict(),
                "q1": self.q1.state_dict(),
                "q2": self.q2.state_dict(),
                "q1_target": self.q1_target.state_dict(),
                "q2_target": self.q2_target.state_dict(),
                "log_alpha": self.log_alpha.detach(),
                "config": self.config.__dict__,
            },
            path,
        )

    def load(self, path: str) -> None:
        ckpt = torch.load(path, weights_only=True)
        self.actor.load_state_dict(ckpt["actor"])
        self.q1.load_state_dict(ckpt["q1"])
        self.q2.load_state_dict(ckpt["q2"])
        self.q1_target.load_state_dict(ckpt["q1_target"])
        self.q2_target.load_state_dict(ckpt["q2_target"])
        with torch.no_grad():
            self.log_alpha.copy_(ckpt["log_alpha"])
