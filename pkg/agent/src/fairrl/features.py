"""Observation vector built from a protocol state message.

The policy's job is to balance win/request ratios across operators, so the
observation keeps the per-operator allocation statistics and the current
round's auction inputs, each normalized to a stable range:

- win ratio        wins_i / (requests_i + 1)
- request share    requests_i / (sum requests + 1)
- utility share    utility_i / (sum |utility| + 1)
- relative bid     bids_i / max bid
- relative demand  packages_i / capacity
- capacity load    capacity / num blocks            (single scalar)

Length is 5 * M + 1 for M operators.
"""

from __future__ import annotations

import numpy as np


def observe(state: dict) -> np.ndarray:
    wins = np.asarray(state["wins"], dtype=np.float64)
    requests = np.asarray(state["requests"], dtype=np.float64)
    utility = np.asarray(state["utility"], dtype=np.float64)
    bids = np.asarray(state["bids"], dtype=np.float64)
    packages = np.asarray(state["packages"], dtype=np.float64)
    capacity = float(state["capacity"])
    blocks = len(state["vacancy"])

    win_ratio = wins / (requests + 1.0)
    request_share = requests / (requests.sum() + 1.0)
    utility_share = utility / (np.abs(utility).sum() + 1.0)
    relative_bid = bids / (bids.max() + 1e-9)
    relative_demand = packages / max(capacity, 1.0)
    load = capacity / max(blocks, 1)

    return np.concatenate(
        [win_ratio, request_share, utility_share, relative_bid, relative_demand, [load]]
    ).astype(np.float32)


def observation_dim(state: dict) -> int:
    """5M + 1 for a state with M operators."""
    return len(observe(state))
