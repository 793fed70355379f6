"""Latency scheduler: slot counts, residual bookkeeping, progress."""

import math

import pytest

from sinrsched import (
    GenConfig,
    Instance,
    Link,
    MetricSpace,
    StepUtility,
    UnschedulableDemand,
    check_admissible,
    gen_random,
    solve_latency,
)
from sinrsched.latency import loose_length_bound, schedule_lower_bound

U = StepUtility(((1.0, 1.0), (8.0, 2.0)))


def _single(demand):
    return Instance(
        metric=MetricSpace.euclidean([[0.0], [1.0]], dim=1),
        alpha=2.0,
        noise=1.0,
        links=(Link(id=0, sender=0, receiver=1, utility=U, demand=demand),),
    )


def _far_pair(demand):
    return Instance(
        metric=MetricSpace.euclidean([[0.0], [1.0], [100.0], [101.0]], dim=1),
        alpha=2.0,
        noise=0.1,
        links=(
            Link(id=0, sender=0, receiver=1, utility=U, demand=demand),
            Link(id=1, sender=2, receiver=3, utility=U, demand=demand),
        ),
    )


def test_single_link_full_demand_one_slot():
    sched = solve_latency(_single(2.0))  # demand == top value
    assert len(sched.slots) == 1
    assert sched.fulfilled and sched.fulfilled_original


def test_single_link_triple_demand_three_slots():
    sched = solve_latency(_single(6.0))
    assert len(sched.slots) == 3
    assert sched.scheme == 2  # scheme 1 stalls: floor(2*u/3u) rounds to zero
    assert sched.lengths[1] == math.inf
    assert sched.fulfilled and sched.fulfilled_original


def test_far_pair_scheduled_together():
    sched = solve_latency(_far_pair(2.0))
    assert len(sched.slots) == 1
    assert set(sched.slots[0].solution.selected) == {0, 1}


def test_empty_demand_set():
    inst = Instance(
        metric=MetricSpace.euclidean([[0.0], [1.0]], dim=1),
        alpha=2.0,
        noise=1.0,
        links=(Link(id=0, sender=0, receiver=1, utility=U, demand=0.0),),
    )
    sched = solve_latency(inst)
    assert sched.slots == () and sched.fulfilled


def test_unschedulable_demand():
    dead = StepUtility(((1.0, 0.0),))
    inst = Instance(
        metric=MetricSpace.euclidean([[0.0], [1.0]], dim=1),
        alpha=2.0,
        noise=1.0,
        links=(Link(id=0, sender=0, receiver=1, utility=dead, demand=1.0),),
    )
    with pytest.raises(UnschedulableDemand):
        solve_latency(inst)


def _random_demand_instance(seed, n=6):
    return gen_random(
        GenConfig(
            n=n,
            seed=seed,
            area=300.0,
            d_range=(1.0, 30.0),
            beta_range=(1.0, 2.0),
            utility={"family": "step", "steps": 3, "gamma_max": 32.0, "value_max": 2.0},
            demand_range=(0.5, 3.0),
            noise=1.0,
        )
    )


def test_residuals_monotone_and_scheme1_rounded():
    for seed in range(6):
        inst = _random_demand_instance(400 + seed)
        sched = solve_latency(inst)
        for run in sched.runs.values():
            if run is None or run.stalled:
                continue
            n = len([l for l in inst.links if (l.demand or 0) > 0])
            prev = None
            for slot in run.slots:
                if prev is not None:
                    for lid, r in slot.residual_after.items():
                        assert r <= prev[lid] + 1e-12
                prev = slot.residual_after
                if run.scheme == 1:
                    for r in prev.values():
                        scaled = r * 2 * n
                        assert abs(scaled - round(scaled)) < 1e-6


def test_scheme2_progress_per_slot():
    # each slot completes some link or carries summed scheme-2 value >= 1
    for seed in range(8):
        inst = _random_demand_instance(500 + seed)
        sched = solve_latency(inst)
        run2 = sched.runs[2]
        for slot in run2.slots:
            assert slot.completed or slot.utility >= 1.0 - 1e-9


def test_slots_individually_feasible():
    for seed in range(4):
        inst = _random_demand_instance(600 + seed)
        sched = solve_latency(inst)
        for slot in sched.slots:
            sol = slot.solution
            for lid in sol.selected:
                assert sol.sinr[lid] >= slot.thresholds[lid] * (1 - 1e-9)
            cert = check_admissible(inst, sol.selected, cap=math.inf, thresholds=slot.thresholds)
            assert cert.feasible


def test_demand_fulfillment_against_original_utilities():
    for seed in range(6):
        inst = _random_demand_instance(700 + seed)
        sched = solve_latency(inst)
        assert sched.fulfilled
        if sched.scheme == 2:
            assert sched.fulfilled_original
        delivered = {lid: 0.0 for lid in inst.link_ids if inst.link(lid).demand}
        for slot in sched.slots:
            for lid, gain in slot.original_gains.items():
                delivered[lid] += gain
        if sched.scheme == 2:
            for lid, total in delivered.items():
                assert total >= inst.link(lid).demand - 1e-9


def test_length_within_loose_bound():
    for seed in range(6):
        inst = _random_demand_instance(800 + seed)
        sched = solve_latency(inst)
        assert len(sched.slots) <= loose_length_bound(inst)
        assert len(sched.slots) >= schedule_lower_bound(inst)


def test_slot_cap_trips_runtime_error():
    inst = _single(2.0)
    with pytest.raises(RuntimeError, match="cap"):
        solve_latency(inst, slot_cap=0)
