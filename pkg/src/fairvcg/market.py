"""Operator demand generation, per-operator ledgers, and settlement accounting.

Each mobile network operator (MNO) is described by a static `MnoConfig` and
accumulates history in a mutable `MnoLedger`.  A `RoundBids` bundle holds one
auction round's requests: per-MNO block counts, valuations, and bids (truthful
by default, so bid == value).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ContractViolation

SHARE_TOL = 1e-9


@dataclass
class MnoConfig:
    """Static description of one mobile network operator.

    Attributes:
        mno_id: 1-based operator index.
        market_share: fraction of the subscriber market, shares sum to 1.
        revenue_rate: average selling price per allocated block per round.
        demand_rate: mean of the per-round block demand draw.
        participation_prob: chance the MNO bids at all in a given round.
    """

    mno_id: int
    market_share: float
    revenue_rate: float
    demand_rate: float
    participation_prob: float = 1.0


def validate_mno_configs(configs: list[MnoConfig]) -> None:
    """Raise ConfigError unless the operator set is internally consistent."""
    if not configs:
        raise ConfigError("need at least one MNO")
    ids = [c.mno_id for c in configs]
    if ids != list(range(1, len(configs) + 1)):
        raise ConfigError(f"mno_id values must be 1..{len(configs)}, got {ids}")
    for c in configs:
        if not 0.0 < c.market_share <= 1.0:
            raise ConfigError(f"MNO {c.mno_id}: market_share {c.market_share} outside (0, 1]")
        if c.revenue_rate <= 0.0:
            raise ConfigError(f"MNO {c.mno_id}: revenue_rate must be positive")
        if c.demand_rate < 0.0:
            raise ConfigError(f"MNO {c.mno_id}: demand_rate must be non-negative")
        if not 0.0 <= c.participation_prob <= 1.0:
            raise ConfigError(f"MNO {c.mno_id}: participation_prob outside [0, 1]")
    total = sum(c.market_share for c in configs)
    if abs(total - 1.0) > SHARE_TOL:
        raise ConfigError(f"market shares sum to {total}, expected 1.0")


def default_mno_configs(
    num_mnos: int,
    demand_mean: float = 6.0,
    value_range: tuple[float, float] = (1.0, 1.1),
    participation_prob: float = 1.0,
) -> list[MnoConfig]:
    """Build a descending-share operator set.

    Shares follow the pattern (M+1, M, ..., 2) / sum.  Demand and the per-block
    selling price both scale with relative share (share times M), so the
    average operator requests `demand_mean` blocks per round and total demand
    grows with the operator count.  The selling price is pinned to the top of
    the valuation range scaled the same way, which keeps every settled round's
    utility non-negative (a payment never exceeds the bid, hence never the
    revenue).
    """
    if num_mnos < 1:
        raise ConfigError("num_mnos must be >= 1")
    pattern = np.arange(num_mnos + 1, 1, -1, dtype=float)
    shares = pattern / pattern.sum()
    configs = []
    for i, share in enumerate(shares):
        configs.append(
            MnoConfig(
                mno_id=i + 1,
                market_share=float(share),
                revenue_rate=float(value_range[1] * num_mnos * share),
                demand_rate=float(demand_mean * num_mnos * share),
                participation_prob=participation_prob,
            )
        )
    return configs


@dataclass
class MnoLedger:
    """Running auction history for one MNO.

    `requests` counts rounds in which the MNO bid, `wins` counts rounds in
    which it was allocated, so wins <= requests always.
    """

    requests: int = 0
    wins: int = 0
    cumulative_utility: float = 0.0
    last_bid: float = 0.0
    last_package: int = 0
    last_value: float = 0.0

    def validate(self) -> None:
        if self.requests < 0 or self.wins < 0:
            raise ContractViolation("ledger counters must be non-negative")
        if self.wins > self.requests:
            raise ContractViolation(f"wins {self.wins} exceed requests {self.requests}")


@dataclass
class RoundBids:
    """One round's demand: aligned per-MNO arrays of bid, block count, value.

    A non-participating MNO holds zeros in all three slots; a participating one
    holds positive values in all three.
    """

    bids: np.ndarray
    packages: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.bids = np.asarray(self.bids, dtype=float)
        self.packages = np.asarray(self.packages, dtype=int)
        self.values = np.asarray(self.values, dtype=float)

    @property
    def num_mnos(self) -> int:
        return len(self.bids)

    def bidders(self) -> list[int]:
        """1-based ids of MNOs requesting at least one block this round."""
        return [i + 1 for i in range(self.num_mnos) if self.packages[i] > 0]

    def validate(self, num_blocks: int) -> None:
        if not (len(self.bids) == len(self.packages) == len(self.values)):
            raise ContractViolation("bid, package, and value arrays must align")
        for i in range(self.num_mnos):
            trio = (self.bids[i], self.packages[i], self.values[i])
            if any(x < 0 for x in trio):
                raise ContractViolation(f"MNO {i + 1}: negative round entry {trio}")
            zeros = [x == 0 for x in trio]
            if any(zeros) and not all(zeros):
                raise ContractViolation(
                    f"MNO {i + 1}: bid, package, value must be zero together or positive together"
                )
            if self.packages[i] > num_blocks:
                raise ContractViolation(
                    f"MNO {i + 1}: package {self.packages[i]} exceeds {num_blocks} blocks"
                )


def generate_round(
    configs: list[MnoConfig],
    num_blocks: int,
    rng: np.random.Generator,
    value_range: tuple[float, float] = (1.0, 2.0),
) -> RoundBids:
    """Draw one round of truthful demand.

    A participating MNO with positive demand_rate requests a Poisson block
    count clipped to [1, num_blocks] and values it at a uniform per-block price
    scaled by its relative market share; the bid equals the value.  Absent MNOs
    (participation draw fails or demand_rate is zero) contribute zeros.
    """
    m = len(configs)
    bids = np.zeros(m)
    packages = np.zeros(m, dtype=int)
    values = np.zeros(m)
    lo, hi = value_range
    for i, cfg in enumerate(configs):
        participates = rng.random() < cfg.participation_prob
        if not participates or cfg.demand_rate == 0.0:
            continue
        p = int(np.clip(rng.poisson(cfg.demand_rate), 1, num_blocks))
        unit_value = rng.uniform(lo, hi) * cfg.market_share * m
        packages[i] = p
        values[i] = p * unit_value
        bids[i] = values[i]
    return RoundBids(bids=bids, packages=packages, values=values)


def revenue(package: int, revenue_rate: float) -> float:
    """Income from selling `package` blocks at the MNO's per-block rate."""
    return package * revenue_rate


def settle(
    ledgers: list[MnoLedger],
    configs: list[MnoConfig],
    round_bids: RoundBids,
    winners: tuple[int, ...],
    payments: dict[int, float],
) -> None:
    """Fold one auction outcome into the ledgers (in place).

    Every bidder's request counter advances; every winner additionally gains a
    win and the round's utility, revenue minus payment.  Rounds where no
    auction was held settle the same way with every bidder in `winners` and
    zero payments.
    """
    bidders = set(round_bids.bidders())
    for w in winners:
        if w not in bidders:
            raise ContractViolation(f"winner {w} did not bid this round")
    for i, ledger in enumerate(ledgers):
        mno_id = i + 1
        ledger.last_bid = float(round_bids.bids[i])
        ledger.last_package = int(round_bids.packages[i])
        ledger.last_value = float(round_bids.values[i])
        if mno_id not in bidders:
            continue
        ledger.requests += 1
        if mno_id in winners:
            ledger.wins += 1
            earned = revenue(int(round_bids.packages[i]), configs[i].revenue_rate)
            ledger.cumulative_utility += earned - payments.get(mno_id, 0.0)
