"""Uniform and regular ants: exploration keeps every path alive, while
exploitation concentrates on shortest paths.

Each ant carries (source, destination, accumulated cost) and nudges the
receiving router's probability row for its *source* along the arrival
interface: backward learning.  Uniform ants walk blindly; regular ants walk
by the current tables.
"""
from reachsim import (complete, dump_prob_tables, linear_chain,
                      reachability_coverage, train_regular_ants,
                      train_uniform_ants)

mesh = complete(3)
uniform = train_uniform_ants(mesh, 10_000, seed=4)
print("uniform ants on complete(3), 10k ants:")
print(dump_prob_tables(uniform.tables))
print(f"probabilities partition by cost but every interface stays alive: "
      f"coverage {reachability_coverage(uniform.tables, mesh, eps=1e-3):.3f} "
      f"(soft reachability held)\n")

chain = linear_chain(5)
regular = train_regular_ants(chain, 50_000, seed=6000)
print("regular ants on linear_chain(5), 50k ants: mass on the (unique) "
      "shortest first hop toward router 4:")
for r in range(4):
    iface = [l.out_interface for l in chain.out_links(r) if l.dst == r + 1][0]
    p = regular.tables[r].row(4)[chain.iface_index(r, iface)]
    print(f"  router {r}: {p:.4f}")
print("\nexploitation converges toward single-path routing; exploration "
      "(uniform ants) is what preserves the multi-path table")
