"""How much qualification does a "you cannot get there from here" signal
need before it stops forbidding legitimate routes?

Three small topologies, three qualification levels.  A probe that hits a
dead end or walks a circle triggers a signal that zeroes a table entry; the
loop-free-path oracle then audits every applied zeroing.
"""
from reachsim import (NegQualifier, NegReinforcementSystem, neg_reinf_left,
                      neg_reinf_middle, neg_reinf_right, signal_is_false_negative)

SCENARIOS = [("left (leaf dead end)", neg_reinf_left(), 1),
             ("middle (plain cycle)", neg_reinf_middle(), 4),
             ("right (extra way in)", neg_reinf_right(), 4)]

print(f"{'topology':>22} | {'qualifier':>34} | signals | false negatives")
for level in NegQualifier:
    for name, topo, dest in SCENARIOS:
        system = NegReinforcementSystem(topo, level)
        system.run_probes(0, dest, 400, seed=42)
        applied = system.applied_signals()
        wrong = [s for s in applied if signal_is_false_negative(topo, s, level)]
        print(f"{name:>22} | {level.value:>34} | {len(applied):7d} | "
              + (f"{len(wrong)} ({[(s.router, s.interface) for s in wrong]})"
                 if wrong else "none"))

print("\ndestination-only signals break as soon as a cycle exists; adding the "
      "source fixes the plain cycle but not the topology with a second way "
      "into it; qualifying by the incoming link survives all three")
