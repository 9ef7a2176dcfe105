"""Fairness-aware repeated spectrum auctions.

Cooperative UAV sensing reports per-frame capacity, operators bid for block
packages, a weighted VCG auction clears each round, and weight policies (or an
external controller over the line-JSON protocol) steer long-run fairness.
"""

from .auction import (
    AuctionOutcome,
    WeightedRound,
    apply_weights,
    determine_winners,
    run_auction,
    should_hold_auction,
    vcg_payment,
)
from .config import ExperimentConfig, build_experiment, load_config
from .engine import EpisodeLog, Simulation, SimulationConfig, default_simulation_config, run_episode
from .env import AuctionEnv, EnvState, EnvStep, ProtocolError, ProtocolSession
from .errors import ConfigError, ContractViolation
from .fairness import (
    WeightController,
    WeightPolicy,
    jain_fairness,
    mswga_weights,
    weight_combined,
    weight_utility,
    weight_wpr,
)
from .market import (
    MnoConfig,
    MnoLedger,
    RoundBids,
    default_mno_configs,
    generate_round,
    revenue,
    settle,
)
from .sensing import (
    FlightConfig,
    SensingConfig,
    SensingSnapshot,
    fuse,
    local_decision,
    sense_energy,
    sense_frame,
    simulate_incumbent,
    timing,
)

__version__ = "0.1.0"
