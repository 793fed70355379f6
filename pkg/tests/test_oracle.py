"""Admissibility oracles and brute-force optima."""

import math

import numpy as np
import pytest

from sinrsched import (
    GenConfig,
    StepUtility,
    brute_opt_flexible_fixed,
    brute_opt_threshold,
    check_admissible,
    gen_greedy_adversary,
    gen_line,
    gen_random,
    relative_interference_matrix,
    spectral_admissible,
    spectral_radius,
    evaluate_sinrs,
)
from sinrsched.model import FEAS_RTOL, Instance, Link, MetricSpace


def test_singleton_fixed_point_is_sensitivity():
    inst = gen_line([(0, 1, 3)], alpha=2, noise=0.5)
    cert = check_admissible(inst, [0], cap=math.inf)
    assert cert.feasible
    # beta * N * d^alpha, reached in one productive step
    assert cert.powers[0] == pytest.approx(3 * 0.5 * 1.0)


def test_symmetric_pair_quarter_coupling_feasible():
    # own length 1, cross distances 2: B = [[0, 1/4], [1/4, 0]], rho = 1/4
    inst = gen_line([(0, 1, 1), (3, 2, 1)], alpha=2, noise=1e-6)
    B = relative_interference_matrix(inst, [0, 1])
    assert B == pytest.approx(np.array([[0.0, 0.25], [0.25, 0.0]]))
    assert spectral_radius(B) == pytest.approx(0.25, rel=1e-9)
    assert check_admissible(inst, [0, 1], cap=math.inf).feasible
    assert spectral_admissible(inst, [0, 1])


def test_symmetric_pair_beta_five_infeasible():
    # rho = 5/4 > 1
    inst = gen_line([(0, 1, 5), (3, 2, 5)], alpha=2, noise=1e-6)
    assert spectral_radius(relative_interference_matrix(inst, [0, 1])) == pytest.approx(1.25, rel=1e-9)
    assert not check_admissible(inst, [0, 1], cap=math.inf).feasible
    assert not spectral_admissible(inst, [0, 1])


def test_certificate_powers_meet_thresholds():
    inst = gen_random(GenConfig(n=6, seed=4, beta_range=(1.0, 2.0)))
    cert = check_admissible(inst, list(inst.link_ids)[:3], cap=math.inf)
    if cert.feasible:
        sinrs = evaluate_sinrs(inst, list(cert.powers), cert.powers)
        for lid, gamma in sinrs.items():
            assert gamma >= inst.link(lid).threshold * (1 - FEAS_RTOL)


def test_cap_violation_names_first_link():
    inst = gen_line([(0, 1, 2)], alpha=2, noise=0.1, p_max=0.15)
    cert = check_admissible(inst, [0], cap=0.15)
    assert not cert.feasible
    assert cert.violated == 0
    assert cert.powers is None


def test_empty_subset_trivially_feasible():
    inst = gen_line([(0, 1, 2)], alpha=2, noise=0.1)
    cert = check_admissible(inst, [], cap=math.inf)
    assert cert.feasible and cert.powers == {}


def test_subset_monotonicity_spot_checks():
    for seed in range(10):
        inst = gen_random(GenConfig(n=6, seed=200 + seed, beta_range=(1.0, 4.0)))
        ids = list(inst.link_ids)
        if check_admissible(inst, ids, cap=math.inf).feasible:
            for drop in ids:
                sub = [x for x in ids if x != drop]
                assert check_admissible(inst, sub, cap=math.inf).feasible


def test_fixed_point_agrees_with_spectral_smoke():
    # full agreement is acceptance criterion 3; spot-check here
    mismatches = 0
    for seed in range(25):
        inst = gen_random(GenConfig(n=5, seed=300 + seed, beta_range=(1.0, 5.0), noise=1e-9))
        ids = list(inst.link_ids)
        from itertools import combinations

        for size in range(1, len(ids) + 1):
            for combo in combinations(ids, size):
                fp = check_admissible(inst, combo, cap=math.inf).feasible
                sp = spectral_admissible(inst, combo)
                mismatches += fp != sp
    assert mismatches == 0


def test_brute_threshold_single_noise_feasible():
    inst = gen_line([(0, 1, 2)], alpha=2, noise=0.1)
    best, size = brute_opt_threshold(inst, regime="variable")
    assert best == (0,) and size == 1


def test_brute_threshold_adversary_reversed_quadruple():
    inst = gen_greedy_adversary(4)
    best, size = brute_opt_threshold(inst, regime="variable")
    assert size == 4
    assert best == (1, 2, 3, 4)
    # all five together are not admissible
    assert not check_admissible(inst, list(inst.link_ids), cap=math.inf).feasible


def test_brute_threshold_capped_empty():
    inst = gen_line([(0, 1, 2), (30, 31, 2)], alpha=2, noise=0.1, p_max=0.15)
    best, size = brute_opt_threshold(inst, regime="variable_capped")
    assert best == () and size == 0


def test_brute_threshold_limit():
    inst = gen_random(GenConfig(n=21, seed=0, beta_range=(1.0, 2.0)))
    with pytest.raises(ValueError, match="20"):
        brute_opt_threshold(inst)


def _flexible_instance(step_pairs, coords):
    points, links = [], []
    for idx, (s, r) in enumerate(coords):
        points.append([s])
        points.append([r])
        links.append(
            Link(
                id=idx,
                sender=2 * idx,
                receiver=2 * idx + 1,
                utility=StepUtility(step_pairs),
                fixed_power=1.0,
            )
        )
    return Instance(
        metric=MetricSpace.euclidean(points, dim=1),
        alpha=2.0,
        noise=0.1,
        links=tuple(links),
    )


def test_brute_flexible_single_link():
    inst = _flexible_instance(((1.0, 1.0), (8.0, 3.0)), [(0, 1)])
    best, util = brute_opt_flexible_fixed(inst)
    # solo SINR = 1/0.1 = 10 >= 8: top step
    assert best == (0,) and util == 3.0


def test_brute_flexible_joint_drop_prefers_singleton():
    # jointly each link sees interference 1/0.8^2, pushing both SINRs to
    # 1/(1.5625 + 0.1) < 1; alone each reaches 10, value 1
    inst = _flexible_instance(((1.0, 1.0),), [(0, 1), (1.8, 0.8)])
    sinrs = evaluate_sinrs(inst, [0, 1], {0: 1.0, 1: 1.0})
    assert max(sinrs.values()) < 1.0
    best, util = brute_opt_flexible_fixed(inst)
    assert best == (0,) and util == 1.0


def test_brute_flexible_all_zero_utilities():
    inst = _flexible_instance(((1.0, 0.0),), [(0, 1), (10, 11)])
    best, util = brute_opt_flexible_fixed(inst)
    assert best == () and util == 0.0


def test_spectral_radius_power_iteration_handles_two_cycle():
    # [[0, 4], [1, 0]] has eigenvalues +-2; plain iteration would oscillate
    assert spectral_radius(np.array([[0.0, 4.0], [1.0, 0.0]])) == pytest.approx(2.0, rel=1e-9)
    assert spectral_radius(np.zeros((1, 1))) == 0.0
    assert spectral_radius(np.zeros((0, 0))) == 0.0
