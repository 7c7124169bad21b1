"""Link-state, distance-vector and path-vector on the same topology.

All three converge to identical best-path costs; what differs is what they
transmit and how much of it, which is exactly what the message counters
capture.
"""
from reachsim import (diameter, random_connected, run_distance_vector,
                      run_link_state, run_path_vector)

t = random_connected(9, 0.4, (1, 9), seed=21)
R, L = t.router_count, t.link_count
print(f"topology: {R} routers, {L} directed links, diameter {diameter(t)}")

ls = run_link_state(t)
dv = run_distance_vector(t, infinity_bound=10 ** 6)
pv = run_path_vector(t)

print(f"\nlink-state:   flooded every advertisement over the whole network: "
      f"{ls.flood_link_traversals} link traversals "
      f"(bound R*L = {R * L}), payload-weighted cost {ls.message_count}")
print(f"distance-vector: converged in {dv.rounds_used} rounds; message units "
      f"per round {dv.per_round_message_count} (last = sum over routers of "
      f"neighbors x entries)")
print(f"path-vector:  converged in {pv.rounds_used} rounds carrying explicit "
      f"router lists")

# The three tables agree on every best cost.
agree = all(
    ls.tables[a].get(b).cost == dv.tables[a].get(b).cost == pv.tables[a].best(b).cost
    for a in t.sorted_routers() for b in t.sorted_routers() if a != b)
print(f"\nall three protocols agree on every pair's best cost: {agree}")

a = t.sorted_routers()[0]
b = t.sorted_routers()[-1]
route = pv.tables[a].best(b)
print(f"example: router {a} reaches {b} at cost {route.cost} via the explicit "
      f"path {route.path}")
