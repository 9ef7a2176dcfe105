"""Fairness index and bid-weight policies.

Weights scale bids before winner determination so that operators with poor
win histories become more competitive.  All weighted policies share a refresh
schedule: weights start at 1 for the first `update_period` auctions, then are
recomputed every `update_period` auctions and held constant in between.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractViolation
from .market import MnoLedger

POLICY_KINDS = ("unweighted", "win-per-request", "utility", "combined", "mswga", "external")

DEFAULT_WEIGHT_FLOOR = 0.05
DEFAULT_UPDATE_PERIOD = 10


@dataclass
class WeightPolicy:
    """Which weight rule to apply, how often to refresh it, and its floor."""

    kind: str = "mswga"
    update_period: int = DEFAULT_UPDATE_PERIOD
    weight_floor: float = DEFAULT_WEIGHT_FLOOR

    def validate(self) -> None:
        if self.kind not in POLICY_KINDS:
            raise ConfigError(f"unknown policy kind {self.kind!r}, expected one of {POLICY_KINDS}")
        if self.update_period < 1:
            raise ConfigError("update_period must be >= 1")
        if not 0.0 < self.weight_floor <= 1.0:
            raise ConfigError("weight_floor must lie in (0, 1]")


def weight_wpr(ledger: MnoLedger, weight_floor: float = DEFAULT_WEIGHT_FLOOR) -> float:
    """Win-per-request weight: low win ratios earn high weights.

    Returns max(weight_floor, 1 - (1 + wins) / (1 + requests)); a fresh ledger
    and a ledger that wins every round both sit at the floor.
    """
    raw = 1.0 - (1 + ledger.wins) / (1 + ledger.requests)
    return max(weight_floor, raw)


def weight_utility(
    ledgers: list[MnoLedger], index: int, weight_floor: float = DEFAULT_WEIGHT_FLOOR
) -> float:
    """Utility-balance weight: operators holding less of the total utility bid stronger.

    Returns max(weight_floor, 1 - U_m / sum(U)).  While no utility has been
    earned (total <= 0 at cold start) every MNO gets weight 1.
    """
    for led in ledgers:
        if led.cumulative_utility < 0:
            raise ContractViolation("cumulative utility must be non-negative")
    total = sum(led.cumulative_utility for led in ledgers)
    if total <= 0.0:
        return 1.0
    raw = 1.0 - ledgers[index].cumulative_utility / total
    return max(weight_floor, raw)


def weight_combined(
    ledgers: list[MnoLedger], index: int, weight_floor: float = DEFAULT_WEIGHT_FLOOR
) -> float:
    """Product of the win-per-request and utility-balance weights, floored."""
    product = weight_wpr(ledgers[index], weight_floor) * weight_utility(ledgers, index, weight_floor)
    return max(weight_floor, product)


def mswga_weights(
    ledgers: list[MnoLedger],
    market_shares: list[float],
    auction_index: int,
    update_period: int,
    prev_weights: np.ndarray,
    weight_floor: float = DEFAULT_WEIGHT_FLOOR,
) -> np.ndarray:
    """Market-share-weighted greedy weights for auction `auction_index` (1-based).

    For the first `update_period` auctions every weight is 1.  Afterwards the
    vector is recomputed only when (auction_index - 1) is a multiple of
    `update_period`: each MNO's combined weight is scaled by its market share
    relative to the largest share, then clamped to [weight_floor, 1].  Between
    refresh points the previous vector is returned unchanged.
    """
    if update_period < 1:
        raise ConfigError("update_period must be >= 1")
    if len(market_shares) != len(ledgers):
        raise ContractViolation("market_shares must align with ledgers")
    if auction_index <= update_period:
        return np.ones(len(ledgers))
    if (auction_index - 1) % update_period != 0:
        return np.asarray(prev_weights, dtype=float).copy()
    shares = np.asarray(market_shares, dtype=float)
    coeff = shares / shares.max()
    combined = np.array(
        [weight_combined(ledgers, i, weight_floor) for i in range(len(ledgers))]
    )
    return np.clip(coeff * combined, weight_floor, 1.0)


def jain_fairness(ledgers: list[MnoLedger]) -> float:
    """Jain index over win/request ratios of MNOs that have requested at least once.

    Equal ratios score 1, total concentration on one MNO scores 1/active.
    With no requests recorded anywhere (or no wins at all, every active ratio
    zero and hence equal) the index is 1 by convention.
    """
    ratios = [led.wins / led.requests for led in ledgers if led.requests > 0]
    if not ratios:
        return 1.0
    sum_sq = sum(r * r for r in ratios)
    if sum_sq == 0.0:
        return 1.0
    total = sum(ratios)
    return (total * total) / (len(ratios) * sum_sq)


class WeightController:
    """Applies a WeightPolicy over the shared refresh schedule.

    Holds the previously issued vector so that non-refresh auctions reuse it.
    The "external" kind is not served here: external weights arrive from the
    environment protocol action instead.
    """

    def __init__(self, policy: WeightPolicy, market_shares: list[float]):
        policy.validate()
        if policy.kind == "external":
            raise ConfigError("external weights are supplied per step, not computed")
        self.policy = policy
        self.market_shares = list(market_shares)
        self._prev: np.ndarray | None = None

    def weights_for(self, auction_index: int, ledgers: list[MnoLedger]) -> np.ndarray:
        """Weight vector for the given 1-based auction index."""
        m = len(ledgers)
        kind = self.policy.kind
        period = self.policy.update_period
        floor = self.policy.weight_floor
        if kind == "unweighted":
            return np.ones(m)
        if kind == "mswga":
            prev = self._prev if self._prev is not None else np.ones(m)
            out = mswga_weights(ledgers, self.market_shares, auction_index, period, prev, floor)
        else:
            if auction_index <= period:
                out = np.ones(m)
            elif (auction_index - 1) % period != 0 and self._prev is not None:
                out = self._prev.copy()
            else:
                if kind == "win-per-request":
                    out = np.array([weight_wpr(led, floor) for led in ledgers])
                elif kind == "utility":
                    out = np.array([weight_utility(ledgers, i, floor) for i in range(m)])
                else:  # combined
                    out = np.array([weight_combined(ledgers, i, floor) for i in range(m)])
        self._prev = out.copy()
        return out
