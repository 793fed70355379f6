"""Why thresholds below 1 defeat the usual approaches: the greedy adversary
and the ALOHA simulation on the two-direction line instance."""

import math

import sinrsched as ss

print("=== the greedy adversary ===")
for k in (2, 4, 8, 16):
    instance = ss.gen_greedy_adversary(k)
    sol = ss.solve_unlimited(instance)
    reversed_ids = list(instance.link_ids[1:])
    cert = ss.check_admissible(instance, reversed_ids, cap=math.inf)
    print(
        f"k={k:2d}: threshold 1/{k}; greedy keeps {len(sol.selected)} link(s) "
        f"while the {len(reversed_ids)} reversed links are jointly admissible "
        f"({cert.feasible}) -> ratio {len(reversed_ids) / len(sol.selected):.0f}"
    )

print(
    "\nthe greedy must take the first link it sees; every reversed link then\n"
    "collides with it fatally, so the gap grows like 1/threshold\n"
)

print("=== ALOHA on the two-direction instance ===")
k = 32
result = ss.simulate_aloha(k, probs="uniform", trials=200, seed=11)
finite = sorted(r for r in result.rounds if r != math.inf)
print(f"k={k}, transmit probability 2/(k+2), {result.trials} trials")
print(f"rounds to reach k/2 successes: median {finite[len(finite)//2]:.0f}, best {finite[0]:.0f}")
print(
    f"P(T <= k/16 = {result.threshold_rounds:.0f}) = {result.fraction_fast:.3f} "
    "(the protocol essentially never finishes fast)"
)

print("\nforcing everyone to transmit every round deadlocks completely:")
stuck = ss.simulate_aloha(2, probs=[1.0], trials=1, seed=0, max_rounds=100)
print(f"k=2, p=1: rounds = {stuck.rounds[0]} (no success within the horizon)")
