"""Topology construction, file round trips, and the loop-free-path oracle.

Every protocol in this package is judged against exhaustive enumeration of
simple paths, so this walkthrough starts there.
"""
from reachsim import (complete, diameter, dump_topology, enumerate_loop_free_paths,
                      linear_chain, load_topology, random_connected, velcro)

# A 4-router chain: the textbook setting for distance-vector stories.
chain = linear_chain(4)
print(f"linear_chain(4): {chain.router_count} routers, "
      f"{chain.link_count // 2} wires, diameter {diameter(chain)}")

# Topologies round-trip through a plain text format.
text = dump_topology(chain)
print("\ntopology file form:")
print(text)
assert load_topology(text) == chain

# The oracle enumerates every simple directed path, in a fixed order.
mesh = complete(4)
paths = enumerate_loop_free_paths(mesh, 0, 3)
print(f"complete(4) has {len(paths)} loop-free paths 0 -> 3:")
for p in paths:
    hops = " -> ".join(f"{r}[{i}]" for r, i in p.hops)
    print(f"  {hops} -> {p.terminal}   cost {p.total_cost}")

# The velcro topology: one direct wire and a deliberately loopy alternative
# region whose cheapest traversal matches the direct cost.
v = velcro(10, 5, 2)
alt = [p for p in enumerate_loop_free_paths(v, 0, 1) if p.hops[0] != (0, "direct")]
print(f"\nvelcro(10,5,2): direct cost {v.link(0, 'direct').cost_forward}, "
      f"{len(alt)} alternative paths, cheapest {min(p.total_cost for p in alt)}")

# Random connected topologies are reproducible from their seed alone.
a = random_connected(8, 0.4, (1, 9), seed=7)
b = random_connected(8, 0.4, (1, 9), seed=7)
assert a == b
print(f"\nrandom_connected(8, 0.4, 1..9, seed=7): diameter {diameter(a)}, "
      f"{a.link_count // 2} wires (same on every machine)")
