"""Constructive procedures and adversarial lower-bound experiments.

* ``strengthen``    — split an admissible set into few parts that stay
  admissible at uniformly scaled-up thresholds (two-stage first-fit binning).
* ``reverse_dual``  — swap senders and receivers of an admissible set and
  recover a constant fraction that is admissible in the reversed direction.
* ``gen_greedy_adversary`` / ``simulate_aloha`` — line instances with
  sub-unit thresholds on which greedy selection and ALOHA-style protocols
  provably lose a 1/beta factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .model import (
    FEAS_RTOL,
    INF,
    Instance,
    Link,
    MetricSpace,
    evaluate_sinrs,
    geometry,
    thresholds_for,
)
from .oracle import check_admissible

PERTURB = 1e-9


@dataclass(frozen=True)
class Decomposition:
    """Partition of a link set; every part is admissible at scale * beta."""

    parts: tuple[tuple[int, ...], ...]
    scale: float

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.parts)


def _require_witness(instance, ids, powers, thresholds):
    beta = thresholds_for(instance, ids, thresholds)
    sinrs = evaluate_sinrs(instance, ids, powers)
    for k, lid in enumerate(ids):
        if sinrs[lid] < beta[k] * (1 - FEAS_RTOL):
            raise ValueError(
                f"input set is not admissible under the witness powers: "
                f"link {lid} reaches SINR {sinrs[lid]:.6g} < {beta[k]:.6g}"
            )
    return beta


def _first_fit(instance, members, scaled_powers, goals):
    """Place links into the first bin where their SINR against the links
    already in that bin stays above their goal."""
    bins: list[list[int]] = []
    for lid in members:
        placed = False
        for group in bins:
            trial = group + [lid]
            sinrs = evaluate_sinrs(instance, trial, scaled_powers)
            if sinrs[lid] >= goals[lid] * (1 - FEAS_RTOL):
                group.append(lid)
                placed = True
                break
        if not placed:
            bins.append([lid])
    return bins


def strengthen(
    instance: Instance,
    admissible_set: Sequence[int],
    witness_powers: Mapping[int, float],
    c: float,
    thresholds: Optional[Mapping[int, float]] = None,
) -> Decomposition:
    """Decompose an admissible set into at most ceil(2c)^2 parts, each
    admissible once all thresholds are scaled by c.

    Runs first-fit binning with powers scaled by 2c, demanding SINR at least
    2c * beta against the links already binned; a second pass re-bins each
    part in reverse insertion order. Every part is certified through the
    fixed-point oracle at the scaled thresholds.
    """
    if c < 1:
        raise ValueError("scale c must be >= 1")
    ids = sorted(admissible_set)
    if not ids:
        return Decomposition((), c)
    beta = _require_witness(instance, ids, witness_powers, thresholds)
    beta_of = {lid: float(beta[k]) for k, lid in enumerate(ids)}
    scaled_powers = {lid: 2.0 * c * witness_powers[lid] for lid in ids}
    goals = {lid: 2.0 * c * beta_of[lid] for lid in ids}

    stage_one = _first_fit(instance, ids, scaled_powers, goals)
    parts: list[tuple[int, ...]] = []
    for group in stage_one:
        for sub in _first_fit(instance, list(reversed(group)), scaled_powers, goals):
            parts.append(tuple(sorted(sub)))

    scaled_thresholds = {lid: c * beta_of[lid] for lid in ids}
    for part in parts:
        cert = check_admissible(instance, part, cap=INF, thresholds=scaled_thresholds)
        if not cert.feasible:
            raise AssertionError(f"decomposition part {part} failed certification at scale {c}")
    return Decomposition(tuple(parts), c)


def reversed_instance(instance: Instance, ids: Optional[Sequence[int]] = None) -> Instance:
    """Fragment with each link's sender and receiver swapped."""
    if ids is None:
        ids = instance.link_ids
    links = []
    for lid in ids:
        link = instance.link(lid)
        links.append(
            Link(
                id=link.id,
                sender=link.receiver,
                receiver=link.sender,
                threshold=link.threshold,
                utility=link.utility,
                demand=link.demand,
                fixed_power=link.fixed_power,
            )
        )
    return Instance(
        metric=instance.metric,
        alpha=instance.alpha,
        noise=instance.noise,
        p_max=instance.p_max,
        links=tuple(links),
        allow_sub_unit_threshold=True,
    )


def markov_survivors(
    instance: Instance,
    admissible_set: Sequence[int],
    witness_powers: Mapping[int, float],
    thresholds: Optional[Mapping[int, float]] = None,
) -> tuple[int, ...]:
    """Links whose dual interference is at most twice their dual signal.

    Dual powers are the thresholds times d^alpha over the witness powers;
    an averaging argument guarantees at least half the set survives.
    """
    ids = sorted(admissible_set)
    beta = _require_witness(instance, ids, witness_powers, thresholds)
    beta_of = {lid: float(beta[k]) for k, lid in enumerate(ids)}
    for lid in ids:
        if witness_powers[lid] <= 0:
            raise ValueError(f"witness power of link {lid} is zero; dual power undefined")

    geo = geometry(instance, ids)
    dual = {
        lid: beta_of[lid] * geo.d_alpha[geo.index[lid]] / witness_powers[lid] for lid in ids
    }

    survivors = []
    for lid in ids:
        k = geo.index[lid]
        interference = sum(
            dual[other] * geo.gain[k, geo.index[other]] for other in ids if other != lid
        )
        signal = dual[lid] / geo.d_alpha[k]
        if beta_of[lid] * interference <= 2.0 * signal * (1 + 1e-12):
            survivors.append(lid)
    return tuple(survivors)


def reverse_dual(
    instance: Instance,
    admissible_set: Sequence[int],
    witness_powers: Mapping[int, float],
    thresholds: Optional[Mapping[int, float]] = None,
) -> tuple[tuple[int, ...], Instance]:
    """Select at least |L|/72 links whose reversed copies form an admissible
    set at the original thresholds; returns (subset, reversed fragment).

    The Markov filter keeps links with dual interference at most twice the
    dual signal (at least half); the reversed survivors, admissible at a
    third of the thresholds via the oracle's fixed point, are strengthened by
    a factor 3 and the largest resulting part is returned.
    """
    ids = sorted(admissible_set)
    if not ids:
        raise ValueError("empty input set")
    beta = _require_witness(instance, ids, witness_powers, thresholds)
    beta_of = {lid: float(beta[k]) for k, lid in enumerate(ids)}
    survivors = list(markov_survivors(instance, ids, witness_powers, thresholds))

    fragment = reversed_instance(instance, ids)
    third = {lid: beta_of[lid] / 3.0 for lid in ids}
    cert = check_admissible(fragment, survivors, cap=INF, thresholds=third)
    if not cert.feasible:
        raise AssertionError("reversed survivor set failed the third-threshold certification")
    decomposition = strengthen(fragment, survivors, cert.powers, c=3.0, thresholds=third)
    best = max(decomposition.parts, key=len)
    return best, fragment


def gen_greedy_adversary(k: int, alpha: float = 2.0, noise: float = 1e-9) -> Instance:
    """Line instance on which any greedy selection loses a factor k.

    One forward link of unit length comes first in the processing order
    (smallest sensitivity); the k reversed links that follow are mutually
    compatible at threshold 1/k but each conflicts fatally with the forward
    link. Colocated endpoints are perturbed to keep distances positive.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    beta = 1.0 / k
    points = [[0.0], [1.0]]
    links = [Link(id=0, sender=0, receiver=1, threshold=beta)]
    for i in range(1, k + 1):
        s = len(points)
        points.append([1.0 + i * PERTURB])
        points.append([-i * PERTURB])
        links.append(Link(id=i, sender=s, receiver=s + 1, threshold=beta))
    return Instance(
        metric=MetricSpace.euclidean(points, dim=1),
        alpha=alpha,
        noise=noise,
        links=tuple(links),
        p_max=INF,
        allow_sub_unit_threshold=True,
    )


def aloha_instance(k: int, alpha: float = 2.0, noise: float = 1e-9) -> Instance:
    """k forward and k reversed unit links between (about) 0 and 1."""
    beta = 1.0 / k
    points: list[list[float]] = []
    links = []
    for i in range(k):  # forward: sender near 0, receiver near 1
        s = len(points)
        points.append([i * PERTURB])
        points.append([1.0 - i * PERTURB])
        links.append(Link(id=i, sender=s, receiver=s + 1, threshold=beta))
    for j in range(1, k + 1):  # reversed: sender near 1, receiver near 0
        s = len(points)
        points.append([1.0 + j * PERTURB])
        points.append([-j * PERTURB])
        links.append(Link(id=k + j - 1, sender=s, receiver=s + 1, threshold=beta))
    return Instance(
        metric=MetricSpace.euclidean(points, dim=1),
        alpha=alpha,
        noise=noise,
        links=tuple(links),
        p_max=INF,
        allow_sub_unit_threshold=True,
    )


@dataclass(frozen=True)
class AlohaResult:
    """Per-trial rounds until k/2 successes, plus the fast-finish rate."""

    k: int
    trials: int
    seed: int
    rounds: tuple
    threshold_rounds: float
    fraction_fast: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "trials": self.trials,
            "seed": self.seed,
            "rounds": ["inf" if r == INF else r for r in self.rounds],
            "threshold_rounds": self.threshold_rounds,
            "fraction_fast": self.fraction_fast,
        }


def simulate_aloha(
    k: int,
    probs: Union[str, Sequence[float]] = "uniform",
    trials: int = 1,
    seed: int = 0,
    max_rounds: int = 10_000,
    alpha: float = 2.0,
) -> AlohaResult:
    """Random-access simulation on the two-direction adversary instance.

    Every remaining sender transmits each round with the round's probability
    (the "uniform" policy uses 2/(k+2) throughout); a transmission succeeds
    when its SINR among that round's transmitters reaches the threshold, and
    successful senders drop out. A trial records the round in which total
    successes reach k/2 (inf if never within max_rounds). fraction_fast is
    the empirical probability of finishing within k/16 rounds.
    """
    if k < 2 or k % 2 != 0:
        raise ValueError("k must be an even integer >= 2")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if probs != "uniform":
        probs = [float(p) for p in probs]
        if not probs or any(not (0.0 <= p <= 1.0) for p in probs):
            raise ValueError("transmit probabilities must lie in [0, 1]")

    instance = aloha_instance(k, alpha=alpha)
    ids = list(instance.link_ids)
    geo = geometry(instance, ids)
    beta = 1.0 / k
    uniform_p = 2.0 / (k + 2)
    target = k // 2
    noise = instance.noise

    results = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        remaining = np.ones(len(ids), dtype=bool)
        successes = 0
        finish: float = INF
        for t in range(1, max_rounds + 1):
            p_t = uniform_p if probs == "uniform" else probs[min(t - 1, len(probs) - 1)]
            transmit = remaining & (rng.random(len(ids)) < p_t)
            if not transmit.any():
                continue
            tx = np.flatnonzero(transmit)
            # received[i, j] = power of transmitter j at receiver of link i
            received = geo.gain[np.ix_(tx, tx)]
            signal = np.diag(received)
            interference = received.sum(axis=1) - signal
            sinr = signal / (interference + noise)
            winners = tx[sinr >= beta * (1 - FEAS_RTOL)]
            if winners.size:
                remaining[winners] = False
                successes += int(winners.size)
            if successes >= target:
                finish = float(t)
                break
        results.append(finish)

    threshold_rounds = k / 16.0
    fast = sum(1 for r in results if r <= threshold_rounds) / trials
    return AlohaResult(k, trials, seed, tuple(results), threshold_rounds, fast)
