"""Demand-driven latency minimization by repeated flexible-rate solves.

Two reshapings of the utilities are scheduled independently and the shorter
schedule is returned. Scheme 1 rounds each utility down to multiples of
1/(2n) of the link's demand and gives every link unit demand; scheme 2
normalizes utilities by their maximum and scales demands accordingly. Each
round caps the utilities at the remaining demands, runs the flexible-rate
solver, schedules the winning set for one slot and subtracts the realized
gains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .flexible import FlexibleRun, solve_flexible
from .model import INF, Instance, Solution
from .utility import (
    CappedUtility,
    ShannonUtility,
    StepUtility,
    UtilitySpec,
    inverse_threshold,
    max_utility,
    scaled_step,
    value,
)

SLOT_CAP = 1_000_000
RESIDUAL_TOL = 1e-9


class UnschedulableDemand(ValueError):
    """A link demands positive utility but can never realize any."""


@dataclass(frozen=True)
class Slot:
    """One schedule step: the transmitting set and what it accomplished."""

    solution: Solution
    level_index: int
    thresholds: dict
    gains: dict           # scheme-unit utility credited per scheduled link
    original_gains: dict  # same slot valued by the original utilities
    residual_after: dict
    completed: tuple[int, ...]

    @property
    def utility(self) -> float:
        return float(sum(self.gains.values()))


@dataclass(frozen=True)
class SchemeRun:
    """Full run of one scheme: slots, final residuals and progress bookkeeping."""

    scheme: int
    slots: tuple[Slot, ...]
    stalled: bool
    fulfilled_scheme_units: bool
    fulfilled_original: bool

    @property
    def length(self) -> float:
        return INF if self.stalled else float(len(self.slots))


@dataclass(frozen=True)
class Schedule:
    """Chosen schedule plus both scheme runs for inspection."""

    scheme: int
    slots: tuple[Slot, ...]
    lengths: dict
    fulfilled: bool
    fulfilled_original: bool
    runs: dict

    def to_dict(self, include_trace: bool = False) -> dict:
        return {
            "scheme": self.scheme,
            "slots": [slot.solution.to_dict(include_trace) for slot in self.slots],
            "residuals": [
                {str(k): v for k, v in slot.residual_after.items()} for slot in self.slots
            ],
            "lengths": {
                "scheme1": "inf" if self.lengths[1] == INF else self.lengths[1],
                "scheme2": "inf" if self.lengths[2] == INF else self.lengths[2],
            },
            "fulfilled": self.fulfilled,
            "fulfilled_original": self.fulfilled_original,
        }


def _rounded_step_utility(u: UtilitySpec, demand: float, n: int) -> StepUtility:
    """Scheme-1 utility: (1/2n) * floor(2n * u(gamma) / demand), materialized
    as a step function via inverse queries so later lookups stay exact.

    Values above 1 are cut off; unit demands never consume more.
    """
    steps = []
    denom = 2 * n
    for k in range(1, denom + 1):
        gamma = inverse_threshold(u, k * demand / denom)
        if gamma is None:
            break
        steps.append((gamma, k / denom))
    if not steps:
        # demand so large that one slot cannot contribute even 1/2n
        return StepUtility(((1.0, 0.0),))
    dedup: dict[float, float] = {}
    for gamma, val in steps:
        dedup[gamma] = max(val, dedup.get(gamma, 0.0))
    return StepUtility(tuple(sorted(dedup.items())))


def _scaled_utility(u: UtilitySpec, factor: float) -> UtilitySpec:
    if isinstance(u, StepUtility):
        return scaled_step(u, factor)
    if isinstance(u, ShannonUtility):
        return ShannonUtility(scale=u.scale * factor, cutoff=u.cutoff)
    raise TypeError(f"cannot scale utility of type {type(u).__name__}")


def _run_scheme(
    instance: Instance,
    scheme: int,
    mode: str,
    ids: Sequence[int],
    scheme_utils: Mapping[int, UtilitySpec],
    scheme_demands: Mapping[int, float],
    original_utils: Mapping[int, UtilitySpec],
    original_demands: Mapping[int, float],
    powers: Optional[Mapping[int, float]],
    slot_cap: int,
) -> SchemeRun:
    residual = {lid: float(scheme_demands[lid]) for lid in ids}
    slots: list[Slot] = []
    stalled = False

    def slot_gains(solution):
        gains = {}
        completes = False
        for lid in solution.selected:
            gains[lid] = value(capped[lid], solution.sinr[lid])
            completes = completes or residual[lid] - gains[lid] <= RESIDUAL_TOL
        return gains, completes

    while sum(residual.values()) > 0.0:
        live = sorted(lid for lid in ids if residual[lid] > 0.0)
        capped = {lid: CappedUtility(scheme_utils[lid], residual[lid]) for lid in live}
        run: FlexibleRun = solve_flexible(
            instance, mode=mode, links=live, utilities=capped, powers=powers
        )
        if run.best_index is None or run.objective <= 0.0:
            stalled = True  # rounding can zero out every reachable value
            break
        level = run.best
        gains, completes = slot_gains(level.solution)
        if scheme == 2 and not completes and sum(gains.values()) < 1.0 - RESIDUAL_TOL:
            # the schedule-length accounting needs every round to finish some
            # link or deliver value 1; when all residuals sit below 1, the
            # shallowest level always finishes its members, so fall back to
            # the most valuable level that finishes one (at most n such
            # rounds can ever happen, which keeps the length bound intact)
            best_alt = None
            for alt in sorted(run.levels, key=lambda l: -l.objective):
                alt_gains, alt_completes = slot_gains(alt.solution)
                if alt_completes:
                    best_alt = (alt, alt_gains)
                    break
            if best_alt is not None:
                level, gains = best_alt

        sol = level.solution
        original_gains, completed = {}, []
        for lid in sol.selected:
            original_gains[lid] = value(original_utils[lid], sol.sinr[lid])
            residual[lid] = max(0.0, residual[lid] - gains[lid])
            if residual[lid] <= RESIDUAL_TOL:
                residual[lid] = 0.0
                completed.append(lid)
        slots.append(
            Slot(
                solution=sol,
                level_index=level.index,
                thresholds=dict(level.thresholds),
                gains=gains,
                original_gains=original_gains,
                residual_after=dict(residual),
                completed=tuple(completed),
            )
        )
        if len(slots) > slot_cap:
            raise RuntimeError(
                f"schedule exceeded the safety cap of {slot_cap} slots; "
                "residual demands are not making progress"
            )

    fulfilled_scheme = not stalled and all(residual[lid] == 0.0 for lid in ids)
    delivered = {lid: 0.0 for lid in ids}
    for slot in slots:
        for lid, gain in slot.original_gains.items():
            delivered[lid] += gain
    fulfilled_original = not stalled and all(
        delivered[lid] >= original_demands[lid] - RESIDUAL_TOL for lid in ids
    )
    return SchemeRun(scheme, tuple(slots), stalled, fulfilled_scheme, fulfilled_original)


def solve_latency(
    instance: Instance,
    mode: str = "unlimited",
    links: Optional[Sequence[int]] = None,
    powers: Optional[Mapping[int, float]] = None,
    slot_cap: int = SLOT_CAP,
) -> Schedule:
    """Schedule every link until its demand is met, in few slots.

    Links with zero demand are dropped up front; a link with positive demand
    but zero achievable utility is unschedulable. Both utility reshapings are
    computed in sequence and the shorter schedule is returned (scheme 2 wins
    ties; scheme 1 can stall when rounding erases all reachable value, scheme
    2 never stalls).
    """
    if links is None:
        links = instance.link_ids
    ids = []
    original_utils: dict[int, UtilitySpec] = {}
    original_demands: dict[int, float] = {}
    for lid in links:
        link = instance.link(lid)
        if link.demand is None or link.utility is None:
            raise ValueError(f"link {lid} needs both a demand and a utility")
        if link.demand == 0.0:
            continue
        ids.append(lid)
        original_utils[lid] = link.utility
        original_demands[lid] = link.demand
    if not ids:
        return Schedule(2, (), {1: 0.0, 2: 0.0}, True, True, {1: None, 2: None})

    from .flexible import _gamma_cap  # shared single-link SINR cap rule

    max_values = {}
    for lid in ids:
        cap = _gamma_cap(instance, lid, mode, powers)
        max_values[lid] = max_utility(original_utils[lid], cap)
        if max_values[lid] <= 0.0:
            raise UnschedulableDemand(
                f"link {lid} demands {original_demands[lid]} but its maximum utility is 0"
            )

    n = len(ids)
    u1 = {lid: _rounded_step_utility(original_utils[lid], original_demands[lid], n) for lid in ids}
    d1 = {lid: 1.0 for lid in ids}
    u2 = {lid: _scaled_utility(original_utils[lid], 1.0 / max_values[lid]) for lid in ids}
    d2 = {lid: original_demands[lid] / max_values[lid] for lid in ids}

    run1 = _run_scheme(instance, 1, mode, ids, u1, d1, original_utils, original_demands, powers, slot_cap)
    run2 = _run_scheme(instance, 2, mode, ids, u2, d2, original_utils, original_demands, powers, slot_cap)
    if run1.stalled and run2.stalled:
        raise RuntimeError("both schedule schemes stalled; demands cannot be met")

    chosen = run2 if run2.length <= run1.length else run1
    return Schedule(
        scheme=chosen.scheme,
        slots=chosen.slots,
        lengths={1: run1.length, 2: run2.length},
        fulfilled=chosen.fulfilled_scheme_units,
        fulfilled_original=chosen.fulfilled_original,
        runs={1: run1, 2: run2},
    )


def loose_length_bound(instance: Instance, links: Optional[Sequence[int]] = None) -> float:
    """4 * sum(ceil(demand / max utility)) * (ceil(log2 n) + 1)^2."""
    if links is None:
        links = instance.link_ids
    ids = [lid for lid in links if (instance.link(lid).demand or 0.0) > 0.0]
    if not ids:
        return 0.0
    total = 0.0
    for lid in ids:
        link = instance.link(lid)
        top = max_utility(link.utility, INF if instance.p_max == INF else
                          instance.p_max / (instance.noise * instance.length(lid) ** instance.alpha))
        total += math.ceil(link.demand / top)
    levels = max(0, math.ceil(math.log2(len(ids)))) + 1
    return 4.0 * total * levels**2


def schedule_lower_bound(instance: Instance, links: Optional[Sequence[int]] = None) -> int:
    """max over links of ceil(demand / max utility): slots any schedule needs."""
    if links is None:
        links = instance.link_ids
    best = 0
    for lid in links:
        link = instance.link(lid)
        if not link.demand:
            continue
        top = max_utility(link.utility, INF if instance.p_max == INF else
                          instance.p_max / (instance.noise * instance.length(lid) ** instance.alpha))
        if top > 0:
            best = max(best, math.ceil(link.demand / top))
    return best
