"""reachsim: a seeded discrete-event simulator for comparing constructive
deterministic routing protocols (link-state, distance-vector, path-vector)
with destructive probabilistic ones (Q-routing, uniform/regular ants,
backward ants, negative reinforcement), measured against brute-force
loop-free-path oracles."""

from .deterministic import (CountToInfinityTrace, DistanceVectorResult,
                            LinkStateResult, PathVectorResult, dijkstra, dv_round,
                            path_vector_failure_trace, run_distance_vector,
                            run_link_state, run_path_vector,
                            simulate_count_to_infinity)
from .metrics import (LoopStats, MetricsReport, OracleTruncation, SplitRatio,
                      convergence_time, loop_statistics, reachability_coverage,
                      split_ratio)
from .rl import (Ant, AntSystem, BackwardAntSystem, CostFunction, NegQualifier,
                 NegReinforcementSystem, NegSignal, NegTable, ReinforcementUpdate,
                 ant_prob_update, negative_reinforce, q_update,
                 signal_is_false_negative, train_regular_ants, train_uniform_ants)
from .sim import (AntsConfig, ConfigError, DeterministicConfig, Engine,
                  NegReinfConfig, Packet, QRoutingConfig, RunResult,
                  ScenarioConfig, anytime_snapshot, run_scenario, step)
from .tables import (DetTable, ForwardPolicy, PathVectorTable, ProbTable, QTable,
                     choose_interface, dump_prob_tables, init_uniform,
                     init_uniform_tables, prob_from_q)
from .topology import (DisconnectedError, GeneratorSpec, Link, Path, Topology,
                       TopologyError, complete, diameter, dump_topology,
                       enumerate_loop_free_paths, generate, is_connected,
                       linear_chain, load_topology, neg_reinf_left,
                       neg_reinf_middle, neg_reinf_right, parse_generator_spec,
                       random_connected, ring, velcro)

__version__ = "0.1.0"
