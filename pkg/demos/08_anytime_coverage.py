"""Constructive protocols have a hold time; destructive ones route from the
first instant.

Watching soft-reachability coverage over simulated time: distance-vector
starts from nothing and climbs as its horizon expands, while an ant protocol
starts at full coverage (uniform tables route everywhere, badly) and never
gives it up.
"""
from reachsim import (AntsConfig, DeterministicConfig, Engine, ScenarioConfig,
                      anytime_snapshot, linear_chain, step)

t = linear_chain(4)

print("distance-vector, one synchronous round per ms:")
eng = Engine(ScenarioConfig(topology=t, protocol=DeterministicConfig("distance_vector"),
                            duration_ms=6.0, seed=0))
print(f"  t=start  coverage {anytime_snapshot(eng)[1]:.2f}   (empty tables)")
while (ev := step(eng)) is not None:
    if ev.kind == "round_tick":
        when, cov = anytime_snapshot(eng)
        print(f"  t={when:<5}  coverage {cov:.2f}")

print("\nuniform ants, same topology:")
eng = Engine(ScenarioConfig(topology=t, protocol=AntsConfig(rate=2.0, mix=1.0),
                            duration_ms=2000.0, seed=3))
marks = iter([0.0, 500.0, 1000.0, 1500.0, 1999.0])
mark = next(marks)
while (ev := step(eng)) is not None:
    if ev.time >= mark:
        when, cov = anytime_snapshot(eng)
        print(f"  t={when:<18} coverage {cov:.2f}")
        try:
            mark = next(marks)
        except StopIteration:
            break

print("\nthe ant tables are usable at every instant (anytime operation); the "
      "constructive protocol cannot route to anything it has not built yet")
