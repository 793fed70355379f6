"""Flexible-rate capacity maximization on top of the threshold solvers.

The wrapper sweeps geometrically decreasing value targets. At each level it
asks every utility for the smallest SINR reaching the target, uses those as
individual thresholds, runs the requested threshold solver and scores the
result by the utilities realized at the actual SINRs. The best level wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .capacity import solve_fixed, solve_limited, solve_unlimited
from .model import INF, Instance, Solution, empty_solution
from .utility import UtilitySpec, inverse_threshold, max_utility, value

MODES = ("unlimited", "fixed", "limited")


@dataclass(frozen=True)
class FlexibleLevel:
    """One target level: value floor, per-link SINR thresholds, solution."""

    index: int
    target: float
    thresholds: dict
    solution: Solution
    objective: float

    def to_dict(self, include_trace: bool = False) -> dict:
        return {
            "i": self.index,
            "target": self.target,
            "thresholds": {str(k): v for k, v in self.thresholds.items()},
            "solution": self.solution.to_dict(include_trace),
            "objective": self.objective,
        }


@dataclass(frozen=True)
class FlexibleRun:
    """All levels of one flexible-rate solve plus the winning index."""

    top_value: float
    mode: str
    levels: tuple[FlexibleLevel, ...]
    best_index: Optional[int]

    @property
    def best(self) -> Optional[FlexibleLevel]:
        return None if self.best_index is None else self.levels[self.best_index]

    @property
    def objective(self) -> float:
        return 0.0 if self.best_index is None else self.levels[self.best_index].objective

    @property
    def solution(self) -> Solution:
        if self.best_index is None:
            return empty_solution("flexible")
        return self.levels[self.best_index].solution

    def to_dict(self, include_trace: bool = False) -> dict:
        return {
            "B": self.top_value,
            "mode": self.mode,
            "levels": [lvl.to_dict(include_trace) for lvl in self.levels],
            "best_index": self.best_index,
            "objective": self.objective,
        }


def _gamma_cap(instance: Instance, lid: int, mode: str, powers) -> float:
    """Best SINR the link can reach alone: power / (noise * d^alpha)."""
    if mode == "unlimited":
        return INF
    if mode == "limited":
        p = instance.p_max
    else:
        p = powers[lid] if powers is not None and lid in powers else instance.link(lid).fixed_power
        if p is None:
            raise ValueError(f"link {lid} has no fixed power")
    if p == INF:
        return INF
    d_alpha = instance.length(lid) ** instance.alpha
    return p / (instance.noise * d_alpha)


def solve_flexible(
    instance: Instance,
    mode: str = "unlimited",
    links: Optional[Sequence[int]] = None,
    utilities: Optional[Mapping[int, UtilitySpec]] = None,
    powers: Optional[Mapping[int, float]] = None,
) -> FlexibleRun:
    """Maximize summed utility by sweeping ceil(log2 n) + 1 value targets.

    ``utilities`` overrides the links' own utility functions (the latency
    scheduler passes residual-capped ones). Links whose utility cannot reach
    a level's target are left out of that level only. Levels are scored at
    realized SINRs, so the reported objective is the honest achieved value.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if links is None:
        links = instance.link_ids
    ids = list(links)
    if not ids:
        raise ValueError("no links to schedule")

    def util_of(lid) -> UtilitySpec:
        if utilities is not None and lid in utilities:
            return utilities[lid]
        u = instance.link(lid).utility
        if u is None:
            raise ValueError(f"link {lid} has no utility")
        return u

    caps = {lid: _gamma_cap(instance, lid, mode, powers) for lid in ids}
    max_values = {lid: max_utility(util_of(lid), caps[lid]) for lid in ids}
    top = max(max_values.values())
    if not math.isfinite(top):
        raise ValueError("objective unbounded")
    if top <= 0.0:
        # nothing can realize positive value; empty run, objective 0
        return FlexibleRun(0.0, mode, (), None)

    n_levels = max(0, math.ceil(math.log2(len(ids)))) + 1
    levels = []
    for i in range(n_levels):
        target = top * 2.0**-i
        thresholds = {}
        for lid in ids:
            gamma = inverse_threshold(util_of(lid), target)
            if gamma is None:
                continue  # link sits this level out; it may join deeper ones
            thresholds[lid] = gamma
        candidates = sorted(thresholds)
        if not candidates:
            sol = empty_solution(mode)
        elif mode == "unlimited":
            sol = solve_unlimited(instance, candidates, thresholds=thresholds)
        elif mode == "limited":
            sol = solve_limited(instance, candidates, thresholds=thresholds)
        else:
            sol = solve_fixed(
                instance, candidates, powers=powers, thresholds=thresholds,
                warn_preconditions=False,
            )
        realized = sum(value(util_of(lid), sol.sinr[lid]) for lid in sol.selected)
        levels.append(FlexibleLevel(i, target, thresholds, sol, float(realized)))

    # ties go to the shallowest level, whose members each carry the top value
    best_index = max(range(n_levels), key=lambda i: (levels[i].objective, -i))
    return FlexibleRun(float(top), mode, tuple(levels), best_index)
