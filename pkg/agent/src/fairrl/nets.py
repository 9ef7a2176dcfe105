"""Actor and critic networks for continuous weight-vector control.

Actions live in a box [low, high]^M (auction weight bounds). The deterministic
actor squashes with tanh and rescales; the stochastic actor samples a
reparameterized tanh-Gaussian with the standard change-of-variables log-prob
correction extended for the affine rescale.

The critic optionally bounds its output to [0, q_max] with a scaled sigmoid.
When rewards are known to lie in [0, 1], returns lie in [0, 1/(1-gamma)], and
a bounded head cannot extrapolate phantom value growth outside the data —
which would otherwise drag the actor to the action-box corners.
"""

from __future__ import annotations

import torch
import torch.nn as nn

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
_EPS = 1e-6


def mlp(sizes: list[int], out_activation: nn.Module | None = None,
        out_init: float | None = 3e-3) -> nn.Sequential:
    """Stack of Linear+ReLU. The output layer is initialized uniformly in
    [-out_init, out_init] so squashed heads start in their responsive zone
    instead of saturating early."""
    layers: list[nn.Module] = []
    last_linear: nn.Linear | None = None
    for i in range(len(sizes) - 1):
        linear = nn.Linear(sizes[i], sizes[i + 1])
        layers.append(linear)
        last_linear = linear
        if i < len(sizes) - 2:
            layers.append(nn.ReLU())
    if out_init is not None and last_linear is not None:
        nn.init.uniform_(last_linear.weight, -out_init, out_init)
        nn.init.uniform_(last_linear.bias, -out_init, out_init)
    if out_activation is not None:
        layers.append(out_activation)
    return nn.Sequential(*layers)


class Actor(nn.Module):
    """Deterministic policy: state -> action in [low, high]^action_dim.

    `pre_activation` exposes the value before the tanh squash so training can
    penalize drift into the saturated region, where gradients vanish and the
    policy would otherwise lock at a corner of the action box.
    """

    def __init__(self, state_dim: int, action_dim: int, hidden=(400, 300),
                 low: float = 0.05, high: float = 1.0):
        super().__init__()
        self.trunk = mlp([state_dim, *hidden, action_dim])
        self.register_buffer("scale", torch.tensor((high - low) / 2.0, dtype=torch.float32))
        self.register_buffer("mid", torch.tensor((high + low) / 2.0, dtype=torch.float32))

    def pre_activation(self, state: torch.Tensor) -> torch.Tensor:
        return self.trunk(state)

    def squash(self, pre: torch.Tensor) -> torch.Tensor:
        return self.mid + self.scale * torch.tanh(pre)

    def forward(self, state: torch.Tensor) -> torch.Tensor:
        return self.squash(self.pre_activation(state))


class Critic(nn.Module):
    """Action-value estimate Q(s, a); bounded to [0, q_max] when q_max is set."""

    def __init__(self, state_dim: int, action_dim: int, hidden=(400, 300),
                 q_max: float | None = None):
        super().__init__()
        self.net = mlp([state_dim + action_dim, *hidden, 1])
        self.q_max = q_max

    def forward(self, state: torch.Tensor, action: torch.Tensor) -> torch.Tensor:
        raw = self.net(torch.cat([state, action], dim=-1)).squeeze(-1)
        if self.q_max is None:
            return raw
        return self.q_max * torch.sigmoid(raw)


class GaussianActor(nn.Module):
    """Tanh-squashed Gaussian policy over [low, high]^action_dim."""

    def __init__(self, state_dim: int, action_dim: int, hidden=(400, 300),
                 low: float = 0.05, high: float = 1.0):
        super().__init__()
        self.trunk = mlp([state_dim, *hidden], out_init=None)
        self.trunk.append(nn.ReLU())
        last = hidden[-1]
        self.mu_head = nn.Linear(last, action_dim)
        self.log_std_head = nn.Linear(last, action_dim)
        for head in (self.mu_head, self.log_std_head):
            nn.init.uniform_(head.weight, -3e-3, 3e-3)
            nn.init.uniform_(head.bias, -3e-3, 3e-3)
        self.register_buffer("scale", torch.tensor((high - low) / 2.0, dtype=torch.float32))
        self.register_buffer("mid", torch.tensor((high + low) / 2.0, dtype=torch.float32))

    def forward(self, state: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        h = self.trunk(state)
        mu = self.mu_head(h)
        log_std = torch.clamp(self.log_std_head(h), LOG_STD_MIN, LOG_STD_MAX)
        return mu, log_std

    def sample(self, state: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Reparameterized sample; returns (action, log_prob per sample)."""
        mu, log_std = self(state)
        std = log_std.exp()
        normal = torch.distributions.Normal(mu, std)
        x = normal.rsample()
        t = torch.tanh(x)
        action = self.mid + self.scale * t
        # log pi(a|s) = log N(x) - sum log |d a / d x|
        #             = log N(x) - sum [log(1 - t^2) + log(scale)]
        log_prob = normal.log_prob(x) - torch.log(1.0 - t.pow(2) + _EPS) - torch.log(self.scale)
        return action, log_prob.sum(dim=-1)

    def mean_action(self, state: torch.Tensor) -> torch.Tensor:
        mu, _ = self(state)
        return self.mid + self.scale * torch.tanh(mu)
