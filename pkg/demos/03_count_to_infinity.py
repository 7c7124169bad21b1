"""The count-to-infinity pathology, and why path vectors do not have it.

Four routers in a line, 0-1-2-3.  Remove router 3 after convergence: router
2 knows the link is dead, but router 1 heard a stale cost from router 0 and
the two of them talk each other's estimates upward until the bound.
"""
from reachsim import (diameter, linear_chain, path_vector_failure_trace,
                      simulate_count_to_infinity)

t = linear_chain(4)
trace = simulate_count_to_infinity(t, remove=3, infinity_bound=16)

print("distance-vector costs to the vanished router 3, per round:")
print("round   " + "  ".join(f"r{r}" for r in trace.routers))
for rnd, row in trace.rows:
    print(f"{rnd:5d}   " + "  ".join(f"{row[r]!s:>2}" for r in trace.routers))
print(f"\nevery router counts up by stale hearsay until the bound (16) "
      f"after {len(trace.rows)} rounds")

pv = path_vector_failure_trace(t, remove=3)
print(f"\npath-vector on the identical failure: explicit paths let each router "
      f"discard routes through itself, so the withdrawal just propagates:")
for rnd, row in pv.rows:
    entries = ", ".join(f"r{r}: {'unreachable' if c is None else c}"
                        for r, c in sorted(row.items()))
    print(f"  round {rnd}: {entries}")
print(f"all routes gone in {pv.rounds_to_withdraw} rounds "
      f"(<= diameter {diameter(t)}), no counting")
