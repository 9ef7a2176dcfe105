"""Winner determination, payments, and the round runner, checked against brute force."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairvcg.auction import (
    WeightedRound,
    apply_weights,
    determine_winners,
    run_auction,
    should_hold_auction,
    vcg_payment,
)
from fairvcg.errors import ContractViolation
from fairvcg.market import MnoConfig, MnoLedger, RoundBids

TOL = 1e-9


def brute_force_winners(packages, weighted_bids, capacity):
    """Independent oracle: scan all 2^M subsets with the documented tie-break.

    Preference order: higher total weighted bid (1e-9 tolerance), then more
    winners, then lexicographically smallest id tuple.  Totals are summed in
    ascending id order to match the implementation bit for bit.
    """
    m = len(packages)
    bidders = [i + 1 for i in range(m) if packages[i] > 0 and weighted_bids[i] > 0]
    best_ids, best_val, best_cnt = (), 0.0, 0
    for mask in range(1 << len(bidders)):
        ids = tuple(bidders[k] for k in range(len(bidders)) if mask >> k & 1)
        if sum(packages[i - 1] for i in ids) > capacity:
            continue
        val = sum(weighted_bids[i - 1] for i in ids)
        if (
            val > best_val + TOL
            or (abs(val - best_val) <= TOL and len(ids) > best_cnt)
            or (abs(val - best_val) <= TOL and len(ids) == best_cnt and ids < best_ids)
        ):
            best_ids, best_val, best_cnt = ids, val, len(ids)
    return best_ids, best_val


def make_round(packages, bids, capacity):
    return WeightedRound(
        weighted_bids=np.asarray(bids, dtype=float),
        packages=np.asarray(packages, dtype=int),
        capacity=capacity,
    )


def test_apply_weights_identity():
    """Unit weights leave bids untouched."""
    bids = np.array([3.0, 0.0, 7.5])
    out = apply_weights(bids, np.ones(3))
    assert np.array_equal(out, bids)


def test_apply_weights_scales_elementwise():
    """(10, 20) under weights (0.5, 1.0) becomes (5, 20)."""
    out = apply_weights(np.array([10.0, 20.0]), np.array([0.5, 1.0]))
    assert np.allclose(out, [5.0, 20.0], atol=TOL)


def test_apply_weights_rejects_nonpositive():
    with pytest.raises(ContractViolation):
        apply_weights(np.array([1.0]), np.array([0.0]))
    with pytest.raises(ContractViolation):
        apply_weights(np.array([1.0]), np.array([-0.5]))


def test_apply_weights_rejects_shape_mismatch():
    with pytest.raises(ContractViolation):
        apply_weights(np.array([1.0, 2.0]), np.array([1.0]))


def test_trigger_requires_excess_demand():
    """Auction runs only when requested blocks strictly exceed capacity."""
    assert should_hold_auction(np.array([6, 5, 4]), 10) is True
    assert should_hold_auction(np.array([6, 4]), 10) is False
    assert should_hold_auction(np.array([0, 0]), 0) is False


def test_winner_determination_worked_example():
    """Capacity 10, packages (6,5,4), weighted bids (30,25,20): best set {1,3} worth 50."""
    wr = make_round([6, 5, 4], [30.0, 25.0, 20.0], 10)
    winners, social = determine_winners(wr)
    assert winners == (1, 3)
    assert social == 50.0


def test_vcg_payments_worked_example():
    """Same instance: removing MNO 1 lets {2,3} earn 45, others held 20, so 1 pays 25;
    removing MNO 3 leaves {1} at 30 = what the others held, so 3 pays 0."""
    wr = make_round([6, 5, 4], [30.0, 25.0, 20.0], 10)
    winners, social = determine_winners(wr)
    assert vcg_payment(1, wr, winners, social) == pytest.approx(25.0, abs=TOL)
    assert vcg_payment(3, wr, winners, social) == pytest.approx(0.0, abs=TOL)


def test_single_bidder_fits_and_pays_nothing():
    """A lone bidder displaces nobody."""
    wr = make_round([5], [12.0], 10)
    winners, social = determine_winners(wr)
    assert winners == (1,)
    assert social == 12.0
    assert vcg_payment(1, wr, winners, social) == 0.0


def test_oversized_packages_leave_empty_winner_set():
    """Every package exceeding capacity is infeasible alone; empty set is valid."""
    wr = make_round([8, 9], [100.0, 200.0], 4)
    winners, social = determine_winners(wr)
    assert winners == ()
    assert social == 0.0


def test_zero_capacity_sells_nothing():
    wr = make_round([1, 1], [5.0, 5.0], 0)
    assert determine_winners(wr) == ((), 0.0)


def test_tie_break_prefers_more_winners():
    """Value tie between {1} and {2,3}: the larger set wins."""
    wr = make_round([2, 1, 1], [10.0, 5.0, 5.0], 2)
    winners, social = determine_winners(wr)
    assert winners == (2, 3)
    assert social == 10.0


def test_tie_break_prefers_smallest_id_tuple():
    """Equal value, equal size: (1,) beats (2,)."""
    wr = make_round([2, 2], [7.0, 7.0], 2)
    winners, _ = determine_winners(wr)
    assert winners == (1,)


def test_payment_requires_winner():
    wr = make_round([6, 5, 4], [30.0, 25.0, 20.0], 10)
    winners, social = determine_winners(wr)
    with pytest.raises(ContractViolation):
        vcg_payment(2, wr, winners, social)


def _instance_strategy():
    return st.integers(1, 6).flatmap(
        lambda m: st.tuples(
            st.lists(st.integers(1, 12), min_size=m, max_size=m),
            st.lists(st.floats(0.1, 100.0, allow_nan=False), min_size=m, max_size=m),
            st.integers(0, 20),
        )
    )


@settings(max_examples=150, deadline=None)
@given(_instance_strategy())
def test_dp_matches_brute_force(instance):
    """The capacity DP and exhaustive enumeration agree on set and value."""
    packages, bids, capacity = instance
    wr = make_round(packages, bids, capacity)
    winners, social = determine_winners(wr)
    oracle_ids, oracle_val = brute_force_winners(packages, bids, capacity)
    assert winners == oracle_ids
    assert social == oracle_val


@settings(max_examples=100, deadline=None)
@given(_instance_strategy())
def test_payments_bounded_by_weighted_bid(instance):
    """0 <= payment <= the winner's own weighted bid."""
    packages, bids, capacity = instance
    wr = make_round(packages, bids, capacity)
    winners, social = determine_winners(wr)
    for w in winners:
        pay = vcg_payment(w, wr, winners, social)
        assert 0.0 <= pay <= bids[w - 1] + TOL


@settings(max_examples=100, deadline=None)
@given(_instance_strategy(), st.floats(0.001, 50.0))
def test_raising_a_winning_bid_keeps_it_winning(instance, bump):
    """Increasing one winner's weighted bid never ejects it."""
    packages, bids, capacity = instance
    wr = make_round(packages, bids, capacity)
    winners, _ = determine_winners(wr)
    for w in winners:
        raised = list(bids)
        raised[w - 1] += bump
        again, _ = determine_winners(make_round(packages, raised, capacity))
        assert w in again


def test_integer_bid_ties_match_brute_force():
    """Seeded integer-bid instances force value ties through the tie-break path."""
    rng = np.random.default_rng(99)
    for _ in range(300):
        m = int(rng.integers(1, 7))
        packages = rng.integers(1, 8, size=m).tolist()
        bids = rng.integers(1, 6, size=m).astype(float).tolist()
        capacity = int(rng.integers(0, 15))
        wr = make_round(packages, bids, capacity)
        assert determine_winners(wr) == brute_force_winners(packages, bids, capacity)


def _five_mnos():
    # per-block price = 1.1 * 5 * share keeps revenue >= any possible payment
    shares = [0.3, 0.25, 0.2, 0.15, 0.1]
    return [MnoConfig(i + 1, s, 1.1 * 5 * s, 6.0 * 5 * s) for i, s in enumerate(shares)]


def test_run_auction_skips_when_capacity_suffices():
    """Demand 6+4 fits capacity 10: nobody pays, both win, both ledgers advance."""
    configs = _five_mnos()[:2]
    configs[0].market_share, configs[1].market_share = 0.5, 0.5
    ledgers = [MnoLedger(), MnoLedger()]
    rb = RoundBids(bids=[12.0, 8.0], packages=[6, 4], values=[12.0, 8.0])
    out = run_auction(rb, np.ones(2), 10, ledgers, configs)
    assert out.held is False
    assert out.winners == (1, 2)
    assert out.payments == {1: 0.0, 2: 0.0}
    assert ledgers[0].wins == ledgers[0].requests == 1
    assert ledgers[1].wins == ledgers[1].requests == 1
    assert out.fairness == 1.0


def test_run_auction_clears_scarce_round():
    """Excess demand triggers the auction; losers still log a request."""
    configs = _five_mnos()[:3]
    for c, s in zip(configs, (0.4, 0.35, 0.25)):
        c.market_share = s
    ledgers = [MnoLedger() for _ in range(3)]
    rb = RoundBids(bids=[30.0, 25.0, 20.0], packages=[6, 5, 4], values=[30.0, 25.0, 20.0])
    out = run_auction(rb, np.ones(3), 10, ledgers, configs)
    assert out.held is True
    assert out.winners == (1, 3)
    assert out.payments[1] == pytest.approx(25.0, abs=TOL)
    assert out.payments[3] == pytest.approx(0.0, abs=TOL)
    assert [led.requests for led in ledgers] == [1, 1, 1]
    assert [led.wins for led in ledgers] == [1, 0, 1]
    # two of three active requesters hold ratio 1, one holds 0
    assert out.fairness == pytest.approx(4.0 / 6.0, abs=TOL)


def test_run_auction_replays_identically():
    """Same inputs, fresh ledgers: identical outcome both times."""
    configs = _five_mnos()
    rb = RoundBids(
        bids=[9.9, 8.25, 6.6, 4.95, 3.3],
        packages=[6, 5, 4, 3, 2],
        values=[9.9, 8.25, 6.6, 4.95, 3.3],
    )
    weights = np.array([1.0, 0.8, 0.6, 0.4, 0.2])
    outs = []
    for _ in range(2):
        ledgers = [MnoLedger() for _ in range(5)]
        outs.append(run_auction(rb, weights, 9, ledgers, configs))
    assert outs[0] == outs[1]


def test_uniform_weight_scaling_keeps_winner_set():
    """Scaling every weight by the same factor cannot change the winner set."""
    rng = np.random.default_rng(5)
    for _ in range(50):
        m = int(rng.integers(2, 6))
        packages = rng.integers(1, 8, size=m)
        bids = rng.uniform(1.0, 50.0, size=m)
        capacity = int(rng.integers(1, 15))
        base, _ = determine_winners(make_round(packages, bids, capacity))
        scaled, _ = determine_winners(make_round(packages, bids * 3.7, capacity))
        assert base == scaled
