"""Re-verification of solver outputs against their instance.

Each checker returns a list of human-readable violations (empty means the
artifact holds up); the CLI turns a non-empty list into exit code 1.
"""

from __future__ import annotations

from typing import Mapping, Optional

from .model import CAP_RTOL, FEAS_RTOL, Instance, Solution, evaluate_sinrs

SINR_MATCH_RTOL = 1e-6


def verify_solution(
    instance: Instance,
    solution: Solution,
    thresholds: Optional[Mapping[int, float]] = None,
    check_thresholds: bool = True,
) -> list[str]:
    """Check selected-set consistency, power bounds, SINR claims and the
    objective of a threshold Solution."""
    problems = []
    known = set(instance.link_ids)
    for lid in solution.selected:
        if lid not in known:
            problems.append(f"link {lid}: not part of the instance")
            return problems
    if set(solution.sinr) != set(solution.selected):
        problems.append("sinr keys do not match the selected set")
    # the unlimited-power solver is exempt from the instance cap by definition
    capped = solution.algorithm != "unlimited"
    for lid in solution.selected:
        if lid not in solution.powers:
            problems.append(f"link {lid}: no power assigned")
            return problems
        p = solution.powers[lid]
        if p < 0:
            problems.append(f"link {lid}: negative power")
        if capped and p > instance.p_max * (1 + CAP_RTOL):
            problems.append(f"link {lid}: power {p} exceeds cap {instance.p_max}")

    actual = evaluate_sinrs(instance, solution.selected, solution.powers)
    for lid in solution.selected:
        claimed = solution.sinr.get(lid)
        if claimed is not None and abs(actual[lid] - claimed) > SINR_MATCH_RTOL * max(
            1.0, abs(claimed)
        ):
            problems.append(
                f"link {lid}: stored SINR {claimed:.9g} but re-evaluation gives {actual[lid]:.9g}"
            )
        if check_thresholds:
            if thresholds is not None and lid in thresholds:
                beta = thresholds[lid]
            else:
                beta = instance.link(lid).threshold
            if beta is None:
                continue
            if actual[lid] < beta * (1 - FEAS_RTOL):
                problems.append(
                    f"link {lid}: SINR {actual[lid]:.9g} below threshold {beta:.9g}"
                )

    if solution.algorithm in ("unlimited", "fixed", "limited") and solution.objective != float(
        len(solution.selected)
    ):
        problems.append(
            f"objective {solution.objective} does not equal the selected count "
            f"{len(solution.selected)}"
        )
    return problems


def verify_flexible_run(instance: Instance, run_data: Mapping) -> list[str]:
    """Check every level of a serialized flexible-rate run."""
    problems = []
    for level in run_data.get("levels", []):
        thresholds = {int(k): float(v) for k, v in level["thresholds"].items()}
        sol = Solution.from_dict(level["solution"])
        for issue in verify_solution(instance, sol, thresholds=thresholds):
            problems.append(f"level {level['i']}: {issue}")
    return problems


def verify_schedule(instance: Instance, schedule_data: Mapping) -> list[str]:
    """Check per-slot feasibility of a serialized schedule and that demands
    come out fulfilled."""
    problems = []
    delivered: dict[int, float] = {}
    for t, slot in enumerate(schedule_data.get("slots", [])):
        sol = Solution.from_dict(slot)
        for issue in verify_solution(instance, sol, check_thresholds=False):
            problems.append(f"slot {t}: {issue}")
        for lid in sol.selected:
            link = instance.link(lid)
            if link.utility is not None:
                delivered[lid] = delivered.get(lid, 0.0) + link.utility.value(sol.sinr[lid])
    if schedule_data.get("scheme") == 2 and schedule_data.get("fulfilled"):
        for link in instance.links:
            if link.demand and delivered.get(link.id, 0.0) < link.demand - 1e-9:
                problems.append(
                    f"link {link.id}: delivered {delivered.get(link.id, 0.0):.9g} "
                    f"of demand {link.demand:.9g}"
                )
    return problems
