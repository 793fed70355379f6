"""Latency minimization: schedule every link until its demand is met.

Runs both utility reshapings (rounded against the demand, normalized by the
maximum) and narrates the slots of the shorter schedule.
"""

import sinrsched as ss

config = ss.GenConfig(
    n=8,
    seed=31,
    area=300.0,
    d_range=(1.0, 30.0),
    beta_range=(1.0, 2.0),
    utility={"family": "step", "steps": 3, "gamma_max": 32.0, "value_max": 2.0},
    demand_range=(0.5, 3.0),
)
instance = ss.gen_random(config)

print("=== demands ===")
for link in instance.links:
    top = link.utility.steps[-1][1]
    print(f"link {link.id}: demand {link.demand:6.3f} = {link.demand / top:4.2f} x its max value {top:.3f}")

schedule = ss.solve_latency(instance)
print(
    f"\nscheme lengths: rounded-utilities {schedule.lengths[1]}, "
    f"normalized-utilities {schedule.lengths[2]}; returned scheme {schedule.scheme}"
)
print(f"demands fulfilled: {schedule.fulfilled} (original units: {schedule.fulfilled_original})")

print("\n=== slot by slot ===")
for t, slot in enumerate(schedule.slots):
    done = f" finished {slot.completed}" if slot.completed else ""
    print(
        f"slot {t:2d}: level {slot.level_index} transmits {slot.solution.selected} "
        f"value {slot.utility:5.3f}{done}"
    )

print("\n=== what each link accumulated (original units) ===")
delivered = {lid: 0.0 for lid in instance.link_ids}
for slot in schedule.slots:
    for lid, gain in slot.original_gains.items():
        delivered[lid] += gain
for link in instance.links:
    print(f"link {link.id}: delivered {delivered[link.id]:6.3f} of demand {link.demand:6.3f}")

from sinrsched.latency import loose_length_bound, schedule_lower_bound

print(
    f"\nschedule length {len(schedule.slots)}; trivial lower bound "
    f"{schedule_lower_bound(instance)}; loose upper bound {loose_length_bound(instance):.0f}"
)
