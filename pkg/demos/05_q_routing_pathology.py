"""Q-routing only explores where data flows, so an improvement on the road
not taken goes unnoticed.

Two disjoint routes between routers 0 and 3: via 1 at cost 10, via 2 at
cost 14.  After convergence the alternate route improves to cost 6; greedy
Q-routing never revisits it, while uniform ants move probability mass over
within the same number of events.
"""
from reachsim import (AntSystem, ForwardPolicy, QRoutingConfig, ScenarioConfig,
                      load_topology, run_scenario, train_uniform_ants)


def two_paths(alt):
    return load_topology(
        "node 0\nnode 1\nnode 2\nnode 3\n"
        "link 0:a 1:a 5 5\nlink 1:b 3:a 5 5\n"
        f"link 0:b 2:a {alt} {alt}\nlink 2:b 3:b {alt} {alt}\n")


before, after = two_paths(7), two_paths(3)
common = dict(traffic={(0, 3): 0.02}, forward_policy=ForwardPolicy.ARGMAX)

phase1 = run_scenario(ScenarioConfig(
    topology=before, duration_ms=100_000.0, seed=701,
    protocol=QRoutingConfig(eta=0.5, zeta_model="service_only"), **common))
q = phase1.q_tables[0]
print("after phase 1 (routes cost 10 and 14), router 0's estimates:",
      {i: round(float(v), 2) for i, v in zip(q.interfaces, q.row(3))})

phase2 = run_scenario(ScenarioConfig(
    topology=after, duration_ms=550_000.0, seed=702,
    protocol=QRoutingConfig(eta=0.5, zeta_model="service_only",
                            initial_tables=phase1.q_tables), **common))
q = phase2.q_tables[0]
used_improved = sum(1 for r in phase2.records if r.delivered and 2 in r.trace)
print(f"alternate route improves to cost 6; after "
      f"{phase2.report.packets_delivered} more episodes the estimates are",
      {i: round(float(v), 2) for i, v in zip(q.interfaces, q.row(3))})
print(f"packets that tried the improved route: {used_improved} "
      f"(the stale estimate is never refreshed)\n")

ants = train_uniform_ants(before, 20_000, seed=703)
ants = AntSystem(after, tables=ants.tables).train(20_000, seed=704, mix=1.0)
row = ants.tables[0].row(3)
print("uniform ants under the same change move mass to the improved route:",
      {i: round(p, 3) for i, p in zip(after.interfaces(0), row)})
