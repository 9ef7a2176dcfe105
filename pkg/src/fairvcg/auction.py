"""Weighted sealed-bid auction with exact knapsack winner determination.

Bids are scaled by fairness weights, winners are the subset of bidders whose
block packages fit the sensed capacity while maximising total weighted bid,
and each winner pays the opportunity cost its presence imposes on the others
(computed on weighted bids, never rescaled back).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation
from .fairness import jain_fairness
from .market import MnoConfig, MnoLedger, RoundBids, settle

VALUE_TOL = 1e-9


@dataclass
class WeightedRound:
    """Auction input after weighting: aligned weighted bids and packages plus capacity."""

    weighted_bids: np.ndarray
    packages: np.ndarray
    capacity: int

    def __post_init__(self):
        self.weighted_bids = np.asarray(self.weighted_bids, dtype=float)
        self.packages = np.asarray(self.packages, dtype=int)
        if len(self.weighted_bids) != len(self.packages):
            raise ContractViolation("weighted bids and packages must align")
        if self.capacity < 0:
            raise ContractViolation("capacity must be non-negative")


@dataclass
class AuctionOutcome:
    """Result of one round: allocation, charges, and the post-round fairness index."""

    held: bool
    winners: tuple[int, ...]
    social_value: float
    payments: dict[int, float]
    allocation: dict[int, int]
    fairness: float


def apply_weights(bids: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Elementwise weighted bids; every weight must be strictly positive."""
    bids = np.asarray(bids, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if bids.shape != weights.shape:
        raise ContractViolation(f"weights shape {weights.shape} != bids shape {bids.shape}")
    if np.any(weights <= 0):
        raise ContractViolation("weights must be strictly positive")
    return bids * weights


def should_hold_auction(packages: np.ndarray, capacity: int) -> bool:
    """An auction is needed only when requested blocks exceed available blocks."""
    return int(np.sum(packages)) > capacity


def _better(a: tuple, b: tuple) -> bool:
    """Solution preference: higher value, then more winners, then smaller id tuple."""
    if a[0] > b[0] + VALUE_TOL:
        return True
    if b[0] > a[0] + VALUE_TOL:
        return False
    if a[1] != b[1]:
        return a[1] > b[1]
    return a[2] < b[2]


def _solve_knapsack(
    items: list[tuple[int, int, float]], capacity: int
) -> tuple[tuple[int, ...], float]:
    """Exact 0/1 knapsack over integer capacity.

    `items` are (mno_id, package, weighted_bid) with ids strictly increasing.
    Dynamic program over exact used capacity; each cell keeps the best
    (value, count, ids) under `_better`, which makes the tie-break
    deterministic: more winners first, then the lexicographically smallest id
    tuple.  Returns (winner ids ascending, total weighted bid of winners).
    """
    best_by_used: dict[int, tuple[float, int, tuple[int, ...]]] = {0: (0.0, 0, ())}
    for mno_id, package, wbid in items:
        if package > capacity:
            continue
        updates = {}
        for used, sol in best_by_used.items():
            new_used = used + package
            if new_used > capacity:
                continue
            cand = (sol[0] + wbid, sol[1] + 1, sol[2] + (mno_id,))
            incumbent = updates.get(new_used) or best_by_used.get(new_used)
            if incumbent is None or _better(cand, incumbent):
                updates[new_used] = cand
        best_by_used.update(updates)
    best = (0.0, 0, ())
    for sol in best_by_used.values():
        if _better(sol, best):
            best = sol
    winners = best[2]
    by_id = {mno_id: wbid for mno_id, _, wbid in items}
    social_value = sum(by_id[w] for w in winners)
    return winners, social_value


def _items(weighted_round: WeightedRound, exclude: int | None = None) -> list[tuple[int, int, float]]:
    out = []
    for i in range(len(weighted_round.packages)):
        mno_id = i + 1
        if mno_id == exclude:
            continue
        p = int(weighted_round.packages[i])
        b = float(weighted_round.weighted_bids[i])
        if p > 0 and b > 0:
            out.append((mno_id, p, b))
    return out


def determine_winners(weighted_round: WeightedRound) -> tuple[tuple[int, ...], float]:
    """Winner set and its total weighted bid for one weighted round.

    Only MNOs with a positive package participate; a package larger than the
    capacity can never win.  The empty set is a valid outcome.
    """
    return _solve_knapsack(_items(weighted_round), weighted_round.capacity)


def vcg_payment(
    winner_id: int,
    weighted_round: WeightedRound,
    winners: tuple[int, ...],
    social_value: float,
) -> float:
    """Charge for one winner: the best the others could do without it, minus
    what the others actually got, floored at zero.  Computed on weighted bids.
    """
    if winner_id not in winners:
        raise ContractViolation(f"MNO {winner_id} is not a winner")
    _, best_without = _solve_knapsack(
        _items(weighted_round, exclude=winner_id), weighted_round.capacity
    )
    others_value = social_value - float(weighted_round.weighted_bids[winner_id - 1])
    return max(0.0, best_without - others_value)


def run_auction(
    round_bids: RoundBids,
    weights: np.ndarray,
    capacity: int,
    ledgers: list[MnoLedger],
    configs: list[MnoConfig],
) -> AuctionOutcome:
    """Run one full round: weighting, trigger check, allocation, settlement.

    When total demand fits the capacity no auction is held: every bidder is
    allocated its package at zero payment, and the round still counts one
    request and one win per bidder so the fairness history stays defined.
    Settlement mutates `ledgers`; the returned fairness index reflects the
    ledgers after this round.
    """
    weighted = apply_weights(round_bids.bids, weights)
    bidders = round_bids.bidders()
    if not should_hold_auction(round_bids.packages, capacity):
        winners = tuple(bidders)
        payments = {w: 0.0 for w in winners}
        social_value = float(sum(weighted[w - 1] for w in winners))
        held = False
    else:
        wr = WeightedRound(weighted_bids=weighted, packages=round_bids.packages, capacity=capacity)
        winners, social_value = determine_winners(wr)
        payments = {w: vcg_payment(w, wr, winners, social_value) for w in winners}
        held = True
    allocation = {w: int(round_bids.packages[w - 1]) for w in winners}
    settle(ledgers, configs, round_bids, winners, payments)
    return AuctionOutcome(
        held=held,
        winners=winners,
        social_value=social_value,
        payments=payments,
        allocation=allocation,
        fairness=jain_fairness(ledgers),
    )
