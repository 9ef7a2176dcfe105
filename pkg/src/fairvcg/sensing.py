"""Cooperative spectrum sensing by UAV energy detectors.

A fleet of UAVs (one or more per operator) measures energy per resource block.
Each UAV casts a binary vote, 1 when its measured energy clears the detection
threshold (an "incumbent present" vote, ties vote present to protect the
incumbent).  The fusion centre then treats a block as auctionable only when at
least `vote_threshold` of the fleet confirmed it vacant; a single block needs
broad agreement that it is free before it is offered to the market, so raising
the threshold shrinks reported capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


@dataclass
class FlightConfig:
    """Circular sensing trajectory geometry for one UAV."""

    altitude: float = 200.0       # metres
    radius: float = 100.0         # metres
    speed: float = 10.0           # metres/second along the arc
    sensing_angle: float = math.pi / 2   # arc swept while sensing, radians
    decision_angle: float = math.pi / 4  # arc reserved for reporting, radians

    def validate(self) -> None:
        if self.altitude <= 0 or self.radius <= 0:
            raise ConfigError("altitude and radius must be positive")
        if self.speed <= 0:
            raise ConfigError("speed must be positive")
        if self.sensing_angle < 0 or self.decision_angle < 0:
            raise ConfigError("trajectory angles must be non-negative")
        if self.sensing_angle + self.decision_angle >= 2 * math.pi:
            raise ConfigError("sensing plus decision angle must stay below a full circle")


@dataclass
class SensingConfig:
    """Sensing-side parameters: band layout, detector, fleet, and channel."""

    total_bandwidth: float = 100.0    # MHz
    block_bandwidth: float = 5.0      # MHz per resource block
    energy_threshold: float = 1.008   # detector decision level
    vote_threshold: int = 3           # vacancy confirmations required per block
    num_uavs_per_mno: int = 1
    num_mnos: int = 5
    snr_db: float = 18.0              # incumbent signal-to-noise ratio at the UAV
    noise_power: float = 1.0          # unitless noise floor
    incumbent_activity: float = 0.1   # per-block occupancy probability per frame
    perfect_sensing: bool = False
    flight: FlightConfig = field(default_factory=FlightConfig)

    @property
    def num_blocks(self) -> int:
        return int(round(self.total_bandwidth / self.block_bandwidth))

    @property
    def total_uavs(self) -> int:
        return self.num_uavs_per_mno * self.num_mnos

    def validate(self) -> None:
        if self.total_bandwidth <= 0 or self.block_bandwidth <= 0:
            raise ConfigError("bandwidths must be positive")
        blocks = self.total_bandwidth / self.block_bandwidth
        if abs(blocks - round(blocks)) > 1e-9:
            raise ConfigError(
                f"total_bandwidth {self.total_bandwidth} is not a whole number of "
                f"{self.block_bandwidth} MHz blocks"
            )
        if self.energy_threshold <= 0:
            raise ConfigError("energy_threshold must be positive")
        if self.num_uavs_per_mno < 1 or self.num_mnos < 1:
            raise ConfigError("need at least one UAV and one MNO")
        if not 1 <= self.vote_threshold <= self.total_uavs:
            raise ConfigError(
                f"vote_threshold {self.vote_threshold} outside [1, {self.total_uavs}]"
            )
        if self.noise_power <= 0:
            raise ConfigError("noise_power must be positive")
        if not 0.0 <= self.incumbent_activity <= 1.0:
            raise ConfigError("incumbent_activity outside [0, 1]")
        self.flight.validate()


@dataclass
class SensingSnapshot:
    """Fused sensing result for one frame."""

    ground_truth: np.ndarray      # bool per block, True = incumbent transmitting
    votes: np.ndarray             # int per block, "present" votes cast
    occupied: np.ndarray          # bool per block, fused decision
    vacancy: np.ndarray           # bool per block, NOT occupied
    capacity: int                 # number of blocks offered to the auction


def simulate_incumbent(
    prev_truth: np.ndarray, rng: np.random.Generator, activity_prob: float
) -> np.ndarray:
    """Draw this frame's incumbent occupancy, one Bernoulli per block.

    Occupancy is constant within a frame and independent across frames;
    `prev_truth` fixes the block count.
    """
    return rng.random(len(prev_truth)) < activity_prob


def sense_energy(occupied: bool, channel_gain: complex, signal: complex, noise: complex) -> float:
    """Energy seen by one detector: |h*s + n|^2 if occupied else |n|^2."""
    x = channel_gain * signal + noise if occupied else noise
    return abs(x) ** 2


def local_decision(energy: float, threshold: float) -> int:
    """One UAV's vote: 1 ("present") iff energy reaches the threshold."""
    return 1 if energy >= threshold else 0


def fuse(
    votes: np.ndarray, vote_threshold: int, total_uavs: int
) -> tuple[np.ndarray, np.ndarray, int]:
    """Combine per-block "present" vote counts into the fused frame decision.

    A block counts as vacant only when at least `vote_threshold` of the
    `total_uavs` detectors voted it vacant, i.e. cast no "present" vote;
    anything short of that confirmation level keeps the block closed.  Returns
    (occupied, vacancy, capacity).
    """
    if not 1 <= vote_threshold <= total_uavs:
        raise ConfigError(f"vote_threshold {vote_threshold} outside [1, {total_uavs}]")
    votes = np.asarray(votes, dtype=int)
    vacancy = (total_uavs - votes) >= vote_threshold
    occupied = ~vacancy
    return occupied, vacancy, int(vacancy.sum())


def timing(radius: float, speed: float, sensing_angle: float, decision_angle: float) -> tuple[float, float]:
    """Arc-time split of one sensing orbit.

    Returns (sensing_time, data_time): the time spent sweeping the sensing arc
    and the time left for payload traffic after sensing and reporting.
    """
    if speed <= 0:
        raise ConfigError("speed must be positive")
    sensing_time = radius * sensing_angle / speed
    data_time = radius * (2 * math.pi - (sensing_angle + decision_angle)) / speed
    return sensing_time, data_time


def sense_frame(
    config: SensingConfig, ground_truth: np.ndarray, rng: np.random.Generator
) -> SensingSnapshot:
    """Run one frame of fleet sensing against the given occupancy.

    In the noisy path every UAV sees the incumbent through its own flat
    complex-Gaussian channel (drawn once per frame) plus circularly symmetric
    Gaussian noise, measures energy, and votes.  With perfect_sensing the noise
    path is bypassed: votes reproduce the ground truth exactly, so the fused
    vacancy is its complement at any vote threshold.
    """
    truth = np.asarray(ground_truth, dtype=bool)
    k, c = config.total_uavs, config.num_blocks
    if len(truth) != c:
        raise ConfigError(f"ground truth has {len(truth)} blocks, config expects {c}")
    if config.perfect_sensing:
        votes = np.where(truth, k, 0)
    else:
        n0 = config.noise_power
        signal_amp = math.sqrt(n0 * 10 ** (config.snr_db / 10))
        gain = (rng.standard_normal((k, c)) + 1j * rng.standard_normal((k, c))) / math.sqrt(2)
        noise = (rng.standard_normal((k, c)) + 1j * rng.standard_normal((k, c))) * math.sqrt(n0 / 2)
        x = np.where(truth[None, :], gain * signal_amp + noise, noise)
        energy = np.abs(x) ** 2
        votes = (energy >= config.energy_threshold).sum(axis=0)
    occupied, vacancy, capacity = fuse(votes, config.vote_threshold, k)
    return SensingSnapshot(
        ground_truth=truth, votes=votes, occupied=occupied, vacancy=vacancy, capacity=capacity
    )
