"""Closed-loop simulation: sensing frame, demand round, auction, settlement.

A `Simulation` owns all mutable state (RNG, ledgers, staged round) so that many
instances can run side by side; stepping is deterministic in the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .auction import AuctionOutcome, run_auction
from .errors import ConfigError, ContractViolation
from .fairness import WeightController, WeightPolicy
from .market import MnoConfig, MnoLedger, default_mno_configs, generate_round, validate_mno_configs
from .sensing import SensingConfig, sense_frame, simulate_incumbent


@dataclass
class SimulationConfig:
    """Everything one closed-loop run needs besides the seed."""

    mnos: list[MnoConfig]
    sensing: SensingConfig
    policy: WeightPolicy = field(default_factory=WeightPolicy)
    value_range: tuple[float, float] = (1.0, 1.1)
    episode_length: int = 2000

    @property
    def num_mnos(self) -> int:
        return len(self.mnos)

    def validate(self) -> None:
        validate_mno_configs(self.mnos)
        self.sensing.validate()
        self.policy.validate()
        if self.sensing.num_mnos != len(self.mnos):
            raise ConfigError(
                f"sensing config expects {self.sensing.num_mnos} MNOs, market has {len(self.mnos)}"
            )
        lo, hi = self.value_range
        if not 0 < lo <= hi:
            raise ConfigError("value_range must satisfy 0 < low <= high")
        if self.episode_length < 0:
            raise ConfigError("episode_length must be non-negative")


def default_simulation_config(
    num_mnos: int = 5,
    policy_kind: str = "mswga",
    episode_length: int = 2000,
    **sensing_overrides,
) -> SimulationConfig:
    """Default five-operator setup; sensing fields can be overridden by name."""
    sensing = SensingConfig(num_mnos=num_mnos)
    for key, value in sensing_overrides.items():
        if not hasattr(sensing, key):
            raise ConfigError(f"unknown sensing field {key!r}")
        setattr(sensing, key, value)
    return SimulationConfig(
        mnos=default_mno_configs(num_mnos),
        sensing=sensing,
        policy=WeightPolicy(kind=policy_kind),
        episode_length=episode_length,
    )


class Simulation:
    """One reproducible auction sequence.

    Between steps the next round is already staged: `round_bids` and `snapshot`
    describe the auction that the next `step` call will clear, so an external
    controller can observe them before choosing weights.
    """

    def __init__(self, config: SimulationConfig, seed: int):
        config.validate()
        self.config = config
        self.rng = np.random.default_rng(seed)
        self.ledgers = [MnoLedger() for _ in config.mnos]
        self.auction_index = 1
        self.last_weights = np.ones(config.num_mnos)
        if config.policy.kind == "external":
            self._controller = None
        else:
            shares = [c.market_share for c in config.mnos]
            self._controller = WeightController(config.policy, shares)
        self._truth = np.zeros(config.sensing.num_blocks, dtype=bool)
        self._stage_next_round()

    def _stage_next_round(self) -> None:
        self._truth = simulate_incumbent(self._truth, self.rng, self.config.sensing.incumbent_activity)
        self.snapshot = sense_frame(self.config.sensing, self._truth, self.rng)
        self.round_bids = generate_round(
            self.config.mnos, self.config.sensing.num_blocks, self.rng, self.config.value_range
        )

    @property
    def done(self) -> bool:
        return self.auction_index > self.config.episode_length

    def policy_weights(self) -> np.ndarray:
        """Weights the configured policy assigns to the staged auction."""
        if self._controller is None:
            raise ContractViolation("external policy: weights must be passed to step()")
        return self._controller.weights_for(self.auction_index, self.ledgers)

    def step(self, weights: np.ndarray | None = None) -> AuctionOutcome:
        """Clear the staged auction and stage the next one.

        With no explicit weights the configured policy supplies them; an
        external caller passes its own vector instead.
        """
        if weights is None:
            weights = self.policy_weights()
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (self.config.num_mnos,):
            raise ContractViolation(
                f"expected {self.config.num_mnos} weights, got shape {weights.shape}"
            )
        outcome = run_auction(
            self.round_bids, weights, self.snapshot.capacity, self.ledgers, self.config.mnos
        )
        self.last_weights = weights
        self.auction_index += 1
        self._stage_next_round()
        return outcome


@dataclass
class EpisodeLog:
    """Per-auction traces of one closed-loop run (arrays indexed [auction] or [auction, mno])."""

    policy: str
    seed: int
    fairness: np.ndarray
    capacity: np.ndarray
    bids: np.ndarray
    weights: np.ndarray
    won: np.ndarray
    payments: np.ndarray
    revenue: np.ndarray
    utility: np.ndarray
    wins: np.ndarray
    requests: np.ndarray

    def steady_fairness(self, window_fraction: float = 0.1) -> float:
        """Mean fairness over the trailing window (at least one auction)."""
        n = len(self.fairness)
        if n == 0:
            return 1.0
        w = max(1, int(round(n * window_fraction)))
        return float(np.mean(self.fairness[-w:]))


def run_episode(config: SimulationConfig, seed: int, auctions: int | None = None) -> EpisodeLog:
    """Run a full closed-loop episode under the configured policy and log it."""
    sim = Simulation(config, seed)
    j_max = config.episode_length if auctions is None else auctions
    m = config.num_mnos
    fairness = np.zeros(j_max)
    capacity = np.zeros(j_max, dtype=int)
    bids = np.zeros((j_max, m))
    weights = np.zeros((j_max, m))
    won = np.zeros((j_max, m), dtype=int)
    payments = np.zeros((j_max, m))
    revenue = np.zeros((j_max, m))
    utility = np.zeros((j_max, m))
    wins = np.zeros((j_max, m), dtype=int)
    requests = np.zeros((j_max, m), dtype=int)
    for j in range(j_max):
        capacity[j] = sim.snapshot.capacity
        bids[j] = sim.round_bids.bids
        w = sim.policy_weights()
        weights[j] = w
        outcome = sim.step(w)
        fairness[j] = outcome.fairness
        for winner in outcome.winners:
            won[j, winner - 1] = 1
            payments[j, winner - 1] = outcome.payments[winner]
            revenue[j, winner - 1] = outcome.allocation[winner] * config.mnos[winner - 1].revenue_rate
        for i, led in enumerate(sim.ledgers):
            utility[j, i] = led.cumulative_utility
            wins[j, i] = led.wins
            requests[j, i] = led.requests
    return EpisodeLog(
        policy=config.policy.kind,
        seed=seed,
        fairness=fairness,
        capacity=capacity,
        bids=bids,
        weights=weights,
        won=won,
        payments=payments,
        revenue=revenue,
        utility=utility,
        wins=wins,
        requests=requests,
    )
