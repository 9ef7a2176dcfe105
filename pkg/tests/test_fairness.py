"""Fairness index and the weight policies built on win/request ledgers."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairvcg.errors import ConfigError, ContractViolation
from fairvcg.fairness import (
    POLICY_KINDS,
    WeightController,
    WeightPolicy,
    jain_fairness,
    mswga_weights,
    weight_combined,
    weight_utility,
    weight_wpr,
)
from fairvcg.market import MnoLedger


def ledgers_from(pairs, utilities=None):
    utilities = utilities or [0.0] * len(pairs)
    return [
        MnoLedger(requests=r, wins=w, cumulative_utility=u)
        for (w, r), u in zip(pairs, utilities)
    ]


# ---------------------------------------------------------------- jain index


def test_jain_equal_ratios_is_one():
    """Identical win ratios are perfectly fair."""
    assert jain_fairness(ledgers_from([(1, 2), (2, 4), (3, 6)])) == pytest.approx(1.0)


def test_jain_single_monopolist_is_reciprocal():
    """One of five active operators takes everything: index 1/5."""
    led = ledgers_from([(1, 1), (0, 1), (0, 1), (0, 1), (0, 1)])
    assert jain_fairness(led) == pytest.approx(0.2)


def test_jain_two_operator_example():
    """Ratios 0.5 and 0.25 give (0.75)^2 / (2 * 0.3125) = 0.9."""
    led = ledgers_from([(1, 2), (1, 4)])
    assert jain_fairness(led) == pytest.approx(0.9)


def test_jain_ignores_operators_with_no_requests():
    """Inactive operators do not drag the index down."""
    led = ledgers_from([(1, 2), (1, 4), (0, 0)])
    assert jain_fairness(led) == pytest.approx(0.9)


def test_jain_all_inactive_is_one_by_convention():
    assert jain_fairness(ledgers_from([(0, 0), (0, 0)])) == 1.0


def test_jain_all_zero_ratios_is_one_by_convention():
    """Nobody has won yet: equally (un)served counts as fair."""
    assert jain_fairness(ledgers_from([(0, 3), (0, 5)])) == 1.0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50)), min_size=1, max_size=10))
def test_jain_bounds(pairs):
    """Index lies in [1/M_active, 1] whenever someone is active."""
    pairs = [(min(w, r), r) for w, r in pairs]
    led = ledgers_from(pairs)
    f = jain_fairness(led)
    active = sum(1 for _, r in pairs if r > 0)
    assert 0.0 < f <= 1.0 + 1e-12
    if active:
        assert f >= 1.0 / active - 1e-12


def test_jain_scale_invariance():
    """Doubling every ledger uniformly leaves the index unchanged."""
    a = ledgers_from([(1, 2), (3, 4), (2, 5)])
    b = ledgers_from([(2, 4), (6, 8), (4, 10)])
    assert jain_fairness(a) == pytest.approx(jain_fairness(b))


# ------------------------------------------------------------ weight schemes


def test_wpr_worked_example():
    """1 win over 9 requests: 1 - (1+1)/(1+9) = 0.8."""
    assert weight_wpr(MnoLedger(requests=9, wins=1), weight_floor=0.05) == pytest.approx(0.8)


def test_wpr_saturated_winner_hits_floor():
    """Winning every round drives the weight to the floor."""
    assert weight_wpr(MnoLedger(requests=9, wins=9), weight_floor=0.05) == pytest.approx(0.05)


def test_wpr_fresh_ledger_is_zero_ratio():
    """No history: weight 1 - 1/1 = 0 clamps to the floor."""
    assert weight_wpr(MnoLedger(), weight_floor=0.05) == pytest.approx(0.05)


def test_utility_worked_example():
    """Cumulative utilities (30, 10): weights (1-0.75, 1-0.25) = (0.25, 0.75)."""
    led = ledgers_from([(0, 0), (0, 0)], utilities=[30.0, 10.0])
    assert weight_utility(led, 0, weight_floor=0.05) == pytest.approx(0.25)
    assert weight_utility(led, 1, weight_floor=0.05) == pytest.approx(0.75)


def test_utility_zero_total_gives_unit_weight():
    led = ledgers_from([(0, 0), (0, 0)], utilities=[0.0, 0.0])
    assert weight_utility(led, 0, weight_floor=0.05) == 1.0


def test_utility_rejects_negative_cumulative_utility():
    led = ledgers_from([(0, 0)], utilities=[-1.0])
    with pytest.raises(ContractViolation):
        weight_utility(led, 0, weight_floor=0.05)


def test_combined_is_product_with_floor():
    """wpr 0.8 and utility 0.25 combine to 0.2; tiny products clamp."""
    led = ledgers_from([(1, 9), (0, 0)], utilities=[30.0, 10.0])
    assert weight_combined(led, 0, weight_floor=0.05) == pytest.approx(0.8 * 0.25)
    crushed = ledgers_from([(9, 9), (0, 0)], utilities=[1000.0, 0.0])
    assert weight_combined(crushed, 0, weight_floor=0.05) == pytest.approx(0.05)


# ------------------------------------------------------------------ schedule


def test_mswga_warmup_is_all_ones():
    """During the first update_period auctions every weight is 1."""
    led = ledgers_from([(1, 9), (5, 9)], utilities=[30.0, 10.0])
    shares = [0.5, 0.5]
    for j in (1, 5, 10):
        w = mswga_weights(led, shares, j, 10, None, 0.05)
        assert np.array_equal(w, np.ones(2))


def test_mswga_refresh_only_on_period_boundary():
    """After warm-up the vector refreshes when (j-1) is a period multiple and
    is otherwise carried forward unchanged."""
    led = ledgers_from([(1, 9), (5, 9)], utilities=[30.0, 10.0])
    shares = [0.5, 0.5]
    w11 = mswga_weights(led, shares, 11, 10, np.ones(2), 0.05)
    assert not np.array_equal(w11, np.ones(2))
    w12 = mswga_weights(led, shares, 12, 10, w11, 0.05)
    assert np.array_equal(w12, w11)
    w21 = mswga_weights(led, shares, 21, 10, w12, 0.05)
    assert np.array_equal(w21, w11)  # same ledgers, fresh computation


def test_mswga_share_scaling_two_to_one():
    """Equal combined terms, shares (0.5, 0.25): the big operator's weight is
    scaled by share/max_share = 1 vs 0.5 for the smaller."""
    led = ledgers_from([(1, 9), (1, 9)], utilities=[10.0, 10.0])
    w = mswga_weights(led, [0.5, 0.25], 11, 10, np.ones(2), 0.05)
    assert w[0] == pytest.approx(2 * w[1])


def test_mswga_clips_into_floor_one_band():
    led = ledgers_from([(9, 9), (0, 9)], utilities=[100.0, 0.0])
    w = mswga_weights(led, [0.9, 0.1], 11, 10, np.ones(2), 0.05)
    assert np.all(w >= 0.05) and np.all(w <= 1.0)


# ---------------------------------------------------------------- controller


def test_policy_kinds_catalogue():
    assert POLICY_KINDS == (
        "unweighted",
        "win-per-request",
        "utility",
        "combined",
        "mswga",
        "external",
    )


def test_policy_validation():
    WeightPolicy(kind="mswga").validate()
    with pytest.raises(ConfigError):
        WeightPolicy(kind="nope").validate()
    with pytest.raises(ConfigError):
        WeightPolicy(kind="mswga", update_period=0).validate()
    with pytest.raises(ConfigError):
        WeightPolicy(kind="mswga", weight_floor=0.0).validate()
    with pytest.raises(ConfigError):
        WeightPolicy(kind="mswga", weight_floor=1.5).validate()


def test_controller_rejects_external_kind():
    """Externally driven weights never flow through the internal controller."""
    with pytest.raises(ConfigError):
        WeightController(WeightPolicy(kind="external"), [1.0])


def test_controller_unweighted_is_always_ones():
    ctl = WeightController(WeightPolicy(kind="unweighted"), [0.6, 0.4])
    led = ledgers_from([(5, 9), (1, 9)], utilities=[50.0, 5.0])
    for j in (1, 11, 999):
        assert np.array_equal(ctl.weights_for(j, led), np.ones(2))


def test_controller_weighted_kinds_share_refresh_schedule():
    """win-per-request follows the same warm-up/hold cadence as mswga."""
    ctl = WeightController(WeightPolicy(kind="win-per-request", update_period=10), [0.5, 0.5])
    led = ledgers_from([(1, 9), (8, 9)], utilities=[0.0, 0.0])
    for j in range(1, 11):
        assert np.array_equal(ctl.weights_for(j, led), np.ones(2))
    w11 = ctl.weights_for(11, led)
    assert w11[0] == pytest.approx(0.8)
    assert w11[1] == pytest.approx(max(0.05, 1 - 9 / 10))
    led2 = ledgers_from([(5, 12), (9, 12)], utilities=[0.0, 0.0])
    assert np.array_equal(ctl.weights_for(12, led2), w11)  # held, not refreshed


def test_controller_weights_stay_in_band():
    ctl = WeightController(WeightPolicy(kind="combined", update_period=1), [0.7, 0.3])
    led = ledgers_from([(3, 9), (9, 9)], utilities=[40.0, 400.0])
    for j in range(1, 30):
        w = ctl.weights_for(j, led)
        assert np.all(w >= 0.05) and np.all(w <= 1.0)
