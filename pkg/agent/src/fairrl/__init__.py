"""Reinforcement-learning weight policies for the repeated-auction environment.

Talks to the simulator exclusively over its line-delimited JSON protocol
(stdio subprocess or TCP), so this package has no import-time dependency on
the simulator package.
"""

from .buffer import ReplayBuffer
from .client import EnvClient, ProtocolError
from .ddpg import AgentConfig, DdpgAgent, soft_update
from .features import observation_dim, observe
from .sac import SacAgent
from .trainer import TrainConfig, train

__all__ = [
    "AgentConfig",
    "DdpgAgent",
    "EnvClient",
    "ProtocolError",
    "ReplayBuffer",
    "SacAgent",
    "TrainConfig",
    "observation_dim",
    "observe",
    "soft_update",
    "train",
]

__version__ = "0.1.0"
