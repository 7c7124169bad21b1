"""Traffic splitting on a velcro topology: one direct wire against a looped
region whose cheapest traversal costs the same.

Uniform ants wander the loops and mostly report inflated costs for that
side; regular ants collapse onto a single winner.  A mix of the two lands in
between, and that in-between split is the multi-path behavior.
"""
from reachsim import (AntsConfig, ForwardPolicy, ScenarioConfig,
                      enumerate_loop_free_paths, run_scenario, velcro)

t = velcro(10, 5, 2)
paths = enumerate_loop_free_paths(t, 0, 1)
print(f"velcro(10,5,2): direct cost 10; {len(paths) - 1} loopy alternatives, "
      f"cheapest {min(p.total_cost for p in paths if p.hops[0] != (0, 'direct'))}")


def split_for(mix, train_seed, measure_seed):
    trained = run_scenario(ScenarioConfig(
        topology=t, protocol=AntsConfig(mix=mix, rate=1.0),
        duration_ms=40_000.0, seed=train_seed))
    measured = run_scenario(ScenarioConfig(
        topology=t, protocol=AntsConfig(rate=0.0, initial_tables=trained.prob_tables),
        duration_ms=8_000.0, seed=measure_seed, traffic={(0, 1): 0.5},
        split_first_hop=(0, "direct"), forward_policy=ForwardPolicy.PROPORTIONAL))
    sr = measured.report.split_ratios["first_hop"]
    return sr["a"], sr["b"]


print(f"\n{'ant mix':>22}  direct  loopy   direct share")
for mix, name, seeds in ((0.0, "all regular", (1000, 2000)),
                         (1.0, "all uniform", (1010, 2010)),
                         (0.5, "half and half", (1005, 2005))):
    a, b = split_for(mix, *seeds)
    print(f"{name:>22}  {a:6d}  {b:5d}   {a / (a + b):.3f}")

print("\nregular ants give up the loopy side entirely; uniform ants keep it "
      "alive but under-weighted; the mix routes real traffic over both")
