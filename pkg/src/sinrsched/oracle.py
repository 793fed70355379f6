"""Exact reference procedures: admissibility decisions and brute-force optima.

``check_admissible`` runs the classic monotone fixed-point power iteration
from zero; its limit, when finite and within the cap, is the minimal power
assignment meeting every threshold. ``spectral_admissible`` answers the
uncapped question independently through the spectral radius of the relative
interference matrix. The brute-force searches enumerate all subsets and are
meant for desk-scale ratio experiments and tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Optional, Sequence

import numpy as np

from .model import (
    FEAS_RTOL,
    INF,
    Instance,
    evaluate_sinrs,
    geometry,
    thresholds_for,
)
from .utility import UtilitySpec, value

MAX_ITERATIONS = 100_000
DIVERGENCE_LIMIT = 1e30
CONVERGENCE_RTOL = 1e-12
BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True)
class AdmissibilityCertificate:
    """Outcome of a fixed-point admissibility check.

    powers is the minimal fixed point and is present exactly when feasible;
    violated names the first link whose power exceeded a finite cap.
    """

    feasible: bool
    powers: Optional[dict]
    iterations: int
    violated: Optional[int] = None
    method: str = "fixed_point"

    def to_dict(self) -> dict:
        out = {
            "feasible": self.feasible,
            "powers": {str(k): v for k, v in self.powers.items()} if self.powers else None,
            "iterations": self.iterations,
            "method": self.method,
        }
        if self.violated is not None:
            out["violated"] = self.violated
        return out


def _interference_setup(instance, ids, thresholds):
    geo = geometry(instance, ids)
    beta = thresholds_for(instance, ids, thresholds)
    coupling = beta[:, None] * geo.d_alpha[:, None] * geo.gain
    np.fill_diagonal(coupling, 0.0)
    base = beta * geo.d_alpha * instance.noise
    return geo, coupling, base


def check_admissible(
    instance: Instance,
    subset: Sequence[int],
    cap: Optional[float] = None,
    thresholds: Optional[Mapping[int, float]] = None,
) -> AdmissibilityCertificate:
    """Decide whether some power assignment within the cap meets every
    threshold of ``subset``.

    Iterates p <- beta * d^alpha * (interference(p) + N) from zero; the
    sequence is componentwise nondecreasing and converges exactly when the
    subset is admissible. Divergence is flagged as soon as any power exceeds
    the cap (finite cap) or an absolute guard (infinite cap). If the
    iteration budget runs out, a still-growing update marks the subset
    infeasible; a contracting one is run further until the limit is resolved.
    """
    ids = list(subset)
    if not ids:
        return AdmissibilityCertificate(True, {}, 0)
    cap = instance.p_max if cap is None else cap
    geo, coupling, base = _interference_setup(instance, ids, thresholds)

    p = np.zeros(len(ids))
    limit = cap if cap != INF else DIVERGENCE_LIMIT
    iterations = 0
    budget = MAX_ITERATIONS
    while True:
        p_next = coupling @ p + base
        iterations += 1
        if np.any(p_next < p):
            raise AssertionError("fixed-point iteration lost monotonicity")
        over = p_next > limit
        if np.any(over):
            violated = ids[int(np.argmax(over))] if cap != INF else None
            return AdmissibilityCertificate(False, None, iterations, violated)
        delta = p_next - p
        scale = np.where(p_next > 0, p_next, 1.0)
        converged = bool(np.all(delta <= CONVERGENCE_RTOL * scale))
        if converged:
            p = p_next
            break
        if iterations >= budget:
            # contraction factor of the update tail equals the spectral
            # radius of the coupling; a non-contracting tail cannot converge
            growth = float(np.linalg.norm(coupling @ delta) / np.linalg.norm(delta))
            if growth >= 1.0 - 1e-12:
                return AdmissibilityCertificate(False, None, iterations, None)
            # slow contraction: extend the budget until the remaining gap,
            # bounded by the geometric tail, is negligible
            tail = float(np.linalg.norm(delta)) * growth / (1.0 - growth)
            if tail <= 1e-11 * float(np.linalg.norm(scale)):
                p = p_next
                break
            budget += MAX_ITERATIONS
            if budget > 100 * MAX_ITERATIONS:
                return AdmissibilityCertificate(False, None, iterations, None)
        p = p_next

    powers = {lid: float(p[k]) for k, lid in enumerate(ids)}
    return AdmissibilityCertificate(True, powers, iterations)


def spectral_radius(mat: np.ndarray, tol: float = 1e-13, max_iter: int = 100_000) -> float:
    """Perron root of a nonnegative matrix by power iteration.

    Iterates on mat + I (positive diagonal breaks periodicity) and subtracts
    the shift, so two-cycles like reversed link pairs still converge.
    """
    mat = np.asarray(mat, dtype=np.float64)
    n = mat.shape[0]
    if n == 0:
        return 0.0
    if n == 1:
        return float(mat[0, 0])
    shifted = mat + np.eye(n)
    x = np.ones(n) / math.sqrt(n)
    lam = 0.0
    for _ in range(max_iter):
        y = shifted @ x
        norm = float(np.linalg.norm(y))
        if norm == 0.0 or not math.isfinite(norm):
            return float(norm) - 1.0 if math.isfinite(norm) else INF
        lam_new = norm
        x = y / norm
        if abs(lam_new - lam) <= tol * max(1.0, lam_new):
            lam = lam_new
            break
        lam = lam_new
    return lam - 1.0


def relative_interference_matrix(
    instance: Instance,
    subset: Sequence[int],
    thresholds: Optional[Mapping[int, float]] = None,
) -> np.ndarray:
    """B[i, j] = beta_i * d_i^alpha / d(sender_j, receiver_i)^alpha, zero diagonal."""
    ids = list(subset)
    geo = geometry(instance, ids)
    beta = thresholds_for(instance, ids, thresholds)
    b = beta[:, None] * geo.d_alpha[:, None] * geo.gain
    np.fill_diagonal(b, 0.0)
    return b


def spectral_admissible(
    instance: Instance,
    subset: Sequence[int],
    thresholds: Optional[Mapping[int, float]] = None,
) -> bool:
    """Uncapped admissibility via the spectral-radius criterion rho(B) < 1."""
    ids = list(subset)
    if len(ids) <= 1:
        return True
    return spectral_radius(relative_interference_matrix(instance, subset, thresholds)) < 1.0


def _feasible_under_powers(instance, ids, powers, thresholds):
    if not ids:
        return True
    sinrs = evaluate_sinrs(instance, ids, powers)
    beta = thresholds_for(instance, ids, thresholds)
    return all(sinrs[lid] >= beta[k] * (1 - FEAS_RTOL) for k, lid in enumerate(ids))


def brute_opt_threshold(
    instance: Instance,
    links: Optional[Sequence[int]] = None,
    regime: str = "variable",
    powers: Optional[Mapping[int, float]] = None,
    thresholds: Optional[Mapping[int, float]] = None,
) -> tuple[tuple[int, ...], int]:
    """Maximum-cardinality feasible subset, by exhaustive enumeration.

    regime: "variable" (any powers), "variable_capped" (powers within
    p_max) or "fixed" (SINRs evaluated under the given powers). Ties break
    toward the lexicographically smallest sorted id tuple. Hard limit of
    20 links.
    """
    if links is None:
        links = instance.link_ids
    ids = sorted(links)
    if len(ids) > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_LIMIT} links, got {len(ids)}")
    if regime not in ("variable", "variable_capped", "fixed"):
        raise ValueError(f"unknown regime {regime!r}")
    if regime == "fixed" and powers is None:
        powers = {}
        for lid in ids:
            fp = instance.link(lid).fixed_power
            if fp is None:
                raise ValueError(f"link {lid} has no fixed power")
            powers[lid] = fp

    def feasible(sub):
        if regime == "variable":
            return check_admissible(instance, sub, cap=INF, thresholds=thresholds).feasible
        if regime == "variable_capped":
            return check_admissible(instance, sub, cap=instance.p_max, thresholds=thresholds).feasible
        return _feasible_under_powers(instance, list(sub), powers, thresholds)

    for size in range(len(ids), 0, -1):
        for combo in combinations(ids, size):
            if feasible(combo):
                return combo, size
    return (), 0


def brute_opt_flexible_fixed(
    instance: Instance,
    links: Optional[Sequence[int]] = None,
    powers: Optional[Mapping[int, float]] = None,
    utilities: Optional[Mapping[int, UtilitySpec]] = None,
) -> tuple[tuple[int, ...], float]:
    """Exact flexible-rate optimum under fixed powers, by enumeration.

    Evaluates the summed realized utility of every subset; ties go to the
    lexicographically smallest sorted id tuple (the empty set scores 0).
    """
    if links is None:
        links = instance.link_ids
    ids = sorted(links)
    if len(ids) > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_LIMIT} links, got {len(ids)}")
    if powers is None:
        powers = {}
        for lid in ids:
            fp = instance.link(lid).fixed_power
            if fp is None:
                raise ValueError(f"link {lid} has no fixed power")
            powers[lid] = fp

    def util_of(lid) -> UtilitySpec:
        if utilities is not None and lid in utilities:
            return utilities[lid]
        u = instance.link(lid).utility
        if u is None:
            raise ValueError(f"link {lid} has no utility")
        return u

    best_ids: tuple[int, ...] = ()
    best_value = 0.0
    for size in range(1, len(ids) + 1):
        for combo in combinations(ids, size):
            sinrs = evaluate_sinrs(instance, combo, powers)
            total = sum(value(util_of(lid), sinrs[lid]) for lid in combo)
            if total > best_value or (total == best_value and list(combo) < list(best_ids)):
                best_ids, best_value = combo, total
    return best_ids, best_value
