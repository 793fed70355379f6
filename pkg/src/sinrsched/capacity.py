"""Threshold capacity maximization: greedy link selection with power control.

Three solvers share the sensitivity ordering from the model:

* ``solve_unlimited`` — greedy selection under a pairwise weight budget,
  then a power recurrence that walks from the most sensitive link down.
  Every returned link meets its SINR threshold.
* ``solve_fixed``     — greedy under a bidirectional affectance budget for a
  given power assignment, followed by a clean-up filter.
* ``solve_limited``   — splits links by whether a quarter of the power cap
  covers their sensitivity, runs a capped variant of the unlimited solver on
  one part and the fixed solver at full power on the other, and returns the
  larger solution. Powers never exceed the cap.
"""

from __future__ import annotations

import warnings
from typing import Mapping, Optional, Sequence

import numpy as np

from .model import (
    FEAS_RTOL,
    INF,
    Geometry,
    Instance,
    Solution,
    empty_solution,
    evaluate_sinrs,
    geometry,
    sensitivity_order,
    thresholds_for,
)

# Second-pass weight budget of the limited-power solver.
SECOND_PASS_BUDGET = 0.25


def weight_budget(alpha: float) -> float:
    """Greedy acceptance budget tau = 1 / (6 * 3^alpha + 2)."""
    return 1.0 / (6.0 * 3.0**alpha + 2.0)


def _rank(order: Sequence[int]) -> dict:
    return {lid: pos for pos, lid in enumerate(order)}


def _weight_matrix(geo: Geometry, beta: np.ndarray, rank: Mapping[int, int]) -> np.ndarray:
    """W[a, b] = directed weight from link a onto link b.

    Nonzero only when a is strictly less sensitive than b (rank[a] > rank[b]);
    zero cross-distances saturate individual terms, and the min clamps at 1.
    """
    sens = beta * geo.d_alpha  # beta * d^alpha per link
    # x[a, b] = d(sender_a, receiver_b)^alpha = cross_alpha[b, a]
    x = geo.cross_alpha.T
    with np.errstate(divide="ignore", over="ignore"):
        pair = (sens[:, None] * sens[None, :]) / (x * x.T)
        toward = sens[:, None] / x
        away = sens[:, None] / x.T
        w = np.minimum(1.0, pair + toward + away)
    ranks = np.array([rank[lid] for lid in geo.ids])
    w[ranks[:, None] <= ranks[None, :]] = 0.0
    np.fill_diagonal(w, 0.0)
    return w


def weight(
    instance: Instance,
    from_link: int,
    to_link: int,
    order: Optional[Sequence[int]] = None,
    thresholds: Optional[Mapping[int, float]] = None,
) -> float:
    """Directed conflict weight of ``from_link`` onto ``to_link`` in [0, 1]."""
    ids = [from_link, to_link] if from_link != to_link else [from_link]
    if from_link == to_link:
        return 0.0
    if order is None:
        order = sensitivity_order(instance, ids, thresholds)
    rank = _rank(order)
    geo = geometry(instance, ids)
    beta = thresholds_for(instance, ids, thresholds)
    w = _weight_matrix(geo, beta, rank)
    return float(w[geo.index[from_link], geo.index[to_link]])


def affectance(
    instance: Instance,
    from_link: int,
    to_link: int,
    powers: Mapping[int, float],
    thresholds: Optional[Mapping[int, float]] = None,
) -> float:
    """Normalized interference of ``from_link`` on ``to_link`` in [0, 1].

    Zero for a link onto itself and for a silent sender; saturates at 1 when
    the target cannot exceed its threshold even without interference.
    """
    if from_link == to_link:
        return 0.0
    ids = [from_link, to_link]
    geo = geometry(instance, ids)
    beta = thresholds_for(instance, ids, thresholds)
    p = np.array([powers[lid] for lid in ids], dtype=np.float64)
    a = _affectance_matrix(geo, beta, p, instance.noise)
    return float(a[0, 1])


def _affectance_matrix(geo: Geometry, beta: np.ndarray, p: np.ndarray, noise: float) -> np.ndarray:
    """A[a, b] = affectance of link a on link b; diagonal zero."""
    margin = p / geo.d_alpha - beta * noise  # per target link b
    # received[b, a] = p_a / d(sender_a, receiver_b)^alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        received = p[None, :] / geo.cross_alpha
    received = np.where(p[None, :] == 0, 0.0, received)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = beta[:, None] * received / margin[:, None]
    a = np.where(margin[:, None] > 0, a, np.where(received > 0, INF, 0.0))
    a = np.minimum(1.0, a).T
    # degenerate target: saturate every incoming affectance, silent or not
    bad = margin <= 0
    if np.any(bad):
        a[:, bad] = 1.0
    np.fill_diagonal(a, 0.0)
    return a


def solve_unlimited(
    instance: Instance,
    links: Optional[Sequence[int]] = None,
    thresholds: Optional[Mapping[int, float]] = None,
) -> Solution:
    """Greedy capacity maximization choosing powers from an unbounded range.

    Selection walks from the least to the most sensitive link and accepts a
    candidate when the summed weight from already accepted links stays within
    the budget. Powers are then assigned from the most sensitive link down;
    each power covers noise plus the interference of the more sensitive links
    twice over, which guarantees every accepted link meets its threshold.
    """
    selected, powers, trace, _ = _greedy_unlimited(
        instance, links, thresholds, budget=weight_budget(instance.alpha)
    )
    return _finish(instance, selected, powers, "unlimited", trace)


def _greedy_unlimited(instance, links, thresholds, budget):
    if links is None:
        links = instance.link_ids
    ids = list(links)
    if not ids:
        return [], {}, (), None
    order = sensitivity_order(instance, ids, thresholds)
    rank = _rank(order)
    geo = geometry(instance, ids)
    beta = thresholds_for(instance, ids, thresholds)
    w = _weight_matrix(geo, beta, rank)

    accepted: list[int] = []
    trace = []
    for cand in reversed(order):  # decreasing rank value: least sensitive first
        c = geo.index[cand]
        incoming = float(sum(w[geo.index[a], c] for a in accepted))
        ok = incoming <= budget
        trace.append((cand, ok, incoming))
        if ok:
            accepted.append(cand)

    powers = _power_recurrence(instance, geo, beta, order, accepted)
    return accepted, powers, tuple(trace), order


def _power_recurrence(instance, geo, beta, order, accepted):
    """p(l) = 2 beta N d^alpha + 2 beta d^alpha * sum of prior p / cross-distance^alpha,
    walking from the most sensitive accepted link down."""
    member = set(accepted)
    powers: dict[int, float] = {}
    assigned: list[int] = []
    for lid in order:
        if lid not in member:
            continue
        k = geo.index[lid]
        b = beta[k]
        interference = 0.0
        for prev in assigned:
            interference += powers[prev] * geo.gain[k, geo.index[prev]]
        powers[lid] = float(2.0 * b * geo.d_alpha[k] * (instance.noise + interference))
        assigned.append(lid)
    return powers


def _finish(instance, selected, powers, algorithm, trace):
    if not selected:
        return empty_solution(algorithm)
    selected = tuple(sorted(selected))
    sinr_map = evaluate_sinrs(instance, selected, powers)
    return Solution(
        selected=selected,
        powers={lid: powers[lid] for lid in selected},
        sinr=sinr_map,
        objective=float(len(selected)),
        algorithm=algorithm,
        trace=trace,
    )


def check_power_preconditions(
    instance: Instance,
    ids: Sequence[int],
    powers: Mapping[int, float],
    thresholds: Optional[Mapping[int, float]] = None,
) -> list[str]:
    """Monotone / inverse-normalized power conditions for the fixed solver.

    Violations are reported, not enforced; adversarial inputs still run.
    """
    beta = thresholds_for(instance, ids, thresholds)
    issues = []
    sens = [(float(beta[k]) * instance.length(lid) ** instance.alpha, lid, float(beta[k])) for k, lid in enumerate(ids)]
    rtol = 1e-12
    for s_a, a, b_a in sens:
        for s_b, b, b_b in sens:
            if a == b or s_a > s_b:
                continue
            p_a, p_b = powers[a], powers[b]
            if p_a > p_b * (1 + rtol):
                issues.append(f"power not monotone in sensitivity: links {a}, {b}")
            da = instance.length(a) ** instance.alpha
            db = instance.length(b) ** instance.alpha
            if p_a / (b_a * da) < p_b / (b_b * db) * (1 - rtol):
                issues.append(f"normalized power not antitone in sensitivity: links {a}, {b}")
    return issues


def solve_fixed(
    instance: Instance,
    links: Optional[Sequence[int]] = None,
    powers: Optional[Mapping[int, float]] = None,
    thresholds: Optional[Mapping[int, float]] = None,
    warn_preconditions: bool = True,
) -> Solution:
    """Greedy capacity maximization under a given power assignment.

    Candidates that cannot meet their threshold even alone are dropped up
    front. The tentative pass accepts a link when incoming plus outgoing
    affectance against the accepted set stays within 1/2; the final filter
    keeps links whose total incoming affectance is below 1, so every returned
    link meets its threshold.
    """
    if links is None:
        links = instance.link_ids
    ids = list(links)
    if not ids:
        return empty_solution("fixed")
    if powers is None:
        powers = {}
        for lid in ids:
            fp = instance.link(lid).fixed_power
            if fp is None:
                raise ValueError(f"link {lid} has no fixed power")
            powers[lid] = fp
    else:
        for lid in ids:
            if lid not in powers:
                raise ValueError(f"missing power for link {lid}")

    if warn_preconditions:
        issues = check_power_preconditions(instance, ids, powers, thresholds)
        if issues:
            warnings.warn(
                "fixed power assignment is not monotone (sub-)linear in sensitivity: "
                + issues[0],
                RuntimeWarning,
                stacklevel=2,
            )

    order = sensitivity_order(instance, ids, thresholds)
    geo = geometry(instance, ids)
    beta = thresholds_for(instance, ids, thresholds)
    p = np.array([powers[lid] for lid in geo.ids], dtype=np.float64)
    a = _affectance_matrix(geo, beta, p, instance.noise)

    # solo SINR gate: p / d^alpha must reach beta * N up to tolerance
    solo_ok = {
        lid: p[geo.index[lid]] / geo.d_alpha[geo.index[lid]]
        >= beta[geo.index[lid]] * instance.noise * (1 - FEAS_RTOL)
        for lid in ids
    }

    tentative: list[int] = []
    trace = []
    for cand in reversed(order):
        c = geo.index[cand]
        if not solo_ok[cand]:
            trace.append((cand, False, INF))
            continue
        load = float(sum(a[geo.index[t], c] + a[c, geo.index[t]] for t in tentative))
        ok = load <= 0.5
        trace.append((cand, ok, load))
        if ok:
            tentative.append(cand)

    final = [
        lid
        for lid in tentative
        if sum(a[geo.index[t], geo.index[lid]] for t in tentative) < 1.0
    ]
    sol = _finish(instance, final, {lid: powers[lid] for lid in final}, "fixed", trace)
    return sol


def solve_limited(
    instance: Instance,
    links: Optional[Sequence[int]] = None,
    thresholds: Optional[Mapping[int, float]] = None,
) -> Solution:
    """Capacity maximization with powers chosen from [0, p_max].

    Links whose sensitivity fits within a quarter of the cap go through the
    unlimited-power greedy plus a second pass that re-checks each kept link's
    outgoing weight against the already kept, more sensitive links; that
    bound makes the power recurrence respect the cap. The remaining links run
    the fixed-power solver at full power. The larger solution wins.
    """
    if instance.p_max == INF:
        # no cap: the whole input fits the first branch and the second pass
        # is vacuous, so this is exactly the unlimited solver
        sol = solve_unlimited(instance, links, thresholds)
        return Solution(sol.selected, sol.powers, sol.sinr, sol.objective, "limited", sol.trace)

    if links is None:
        links = instance.link_ids
    ids = list(links)
    if not ids:
        return empty_solution("limited")
    beta = thresholds_for(instance, ids, thresholds)
    sens = {
        lid: float(beta[k]) * instance.noise * instance.length(lid) ** instance.alpha
        for k, lid in enumerate(ids)
    }
    r1 = [lid for lid in ids if sens[lid] <= instance.p_max / 4.0]
    r2 = [lid for lid in ids if lid not in set(r1)]

    sol1 = _limited_first_branch(instance, r1, thresholds) if r1 else empty_solution("limited")
    sol2 = (
        solve_fixed(
            instance,
            r2,
            powers={lid: instance.p_max for lid in r2},
            thresholds=thresholds,
            warn_preconditions=False,
        )
        if r2
        else empty_solution("fixed")
    )

    if len(sol1.selected) >= len(sol2.selected):
        chosen, trace = sol1, sol1.trace
    else:
        chosen, trace = sol2, sol2.trace
    return Solution(chosen.selected, chosen.powers, chosen.sinr, chosen.objective, "limited", trace)


def _limited_first_branch(instance, r1, thresholds):
    budget = weight_budget(instance.alpha)
    first_pass, _, trace1, order = _greedy_unlimited(instance, r1, thresholds, budget)
    if not first_pass:
        return empty_solution("limited")
    geo = geometry(instance, r1)
    beta = thresholds_for(instance, r1, thresholds)
    rank = _rank(order)
    w = _weight_matrix(geo, beta, rank)

    member = set(first_pass)
    kept: list[int] = []
    trace2 = []
    for cand in order:  # increasing rank value: most sensitive first
        if cand not in member:
            continue
        c = geo.index[cand]
        outgoing = float(sum(w[c, geo.index[k]] for k in kept))
        ok = outgoing <= SECOND_PASS_BUDGET
        trace2.append((cand, ok, outgoing))
        if ok:
            kept.append(cand)

    powers = _power_recurrence(instance, geo, beta, order, kept)
    return _finish(instance, kept, powers, "limited", tuple(trace1) + tuple(trace2))
