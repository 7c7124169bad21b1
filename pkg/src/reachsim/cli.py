"""Command-line entry point: run scenarios from flat key=value config files,
inspect topologies with the loop-free-path oracle, and generate topology
files from parametric specs."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .metrics import OracleTruncation
from .rl import NegQualifier, parse_cost_function
from .sim import (AntsConfig, ConfigError, DeterministicConfig, NegReinfConfig,
                  QRoutingConfig, ScenarioConfig, run_scenario)
from .tables import ForwardPolicy, dump_prob_tables
from .topology import (DisconnectedError, TopologyError, dump_topology,
                       enumerate_loop_free_paths, generate, load_topology,
                       parse_generator_spec)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

ENV_SEED = "REACHSIM_SEED"


def _parse_kv_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def _parse_bool(v: str) -> bool:
    if v.lower() in ("true", "yes", "1", "on"):
        return True
    if v.lower() in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {v!r}")


def _parse_traffic(v: str) -> dict[tuple[int, int], float]:
    out = {}
    for item in v.split(","):
        item = item.strip()
        if not item:
            continue
        pair, _, rate = item.partition(":")
        s, _, d = pair.partition(">")
        out[(int(s), int(d))] = float(rate)
    return out


_KNOWN_KEYS = {
    "topology", "protocol", "policy", "duration", "seed", "hop_budget",
    "ant_hop_budget", "delay", "snapshot_interval", "traffic", "name",
    "split.first_hop", "convergence.delta", "convergence.window",
    "remove.router", "remove.at",
    "ants.mix", "ants.rate", "ants.dest", "ants.backward", "ants.cost_fn",
    "ants.gain", "ants.share_fifo",
    "q.eta", "q.variant", "q.initial", "q.zeta",
    "neg.level", "neg.rate", "neg.pairs",
    "rounds.interval", "rounds.infinity_bound", "trace_updates",
}


def build_scenario(kv: dict[str, str], config_dir: Path, seed_override=None) -> ScenarioConfig:
    """Turn a flat key=value mapping into a ScenarioConfig."""
    unknown = set(kv) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "topology" not in kv:
        raise ConfigError("missing required key 'topology'")
    if "protocol" not in kv:
        raise ConfigError("missing required key 'protocol'")
    if "duration" not in kv:
        raise ConfigError("missing required key 'duration'")

    topo_spec = kv["topology"]
    if topo_spec.startswith("file:"):
        path = (config_dir / topo_spec[5:]).resolve() if not os.path.isabs(topo_spec[5:]) \
            else Path(topo_spec[5:])
        if not path.exists():
            raise ConfigError(f"topology file not found: {path}")
        topology = load_topology(path.read_text())
    elif topo_spec.startswith("gen:"):
        topology = generate(parse_generator_spec(topo_spec[4:]))
    else:
        raise ConfigError("topology must be 'file:<path>' or 'gen:<spec>'")

    proto_name = kv["protocol"]
    if proto_name == "ants":
        dest = kv.get("ants.dest", "uniform")
        weights = None
        if dest.startswith("weighted:"):
            weights = {}
            for item in dest[9:].split(","):
                r, _, w = item.partition("=")
                weights[int(r)] = float(w)
        elif dest != "uniform":
            raise ConfigError(f"ants.dest must be uniform or weighted:..., got {dest!r}")
        cost_fn = parse_cost_function(kv.get("ants.cost_fn", "affine:1,1"),
                                      gain=float(kv.get("ants.gain", "0.1")))
        protocol = AntsConfig(
            mix=float(kv.get("ants.mix", "1.0")),
            rate=float(kv.get("ants.rate", "0.1")),
            dest_weights=weights,
            cost_fn=cost_fn,
            backward=_parse_bool(kv.get("ants.backward", "false")))
    elif proto_name == "q_routing":
        protocol = QRoutingConfig(
            eta=float(kv.get("q.eta", "0.5")),
            variant=kv.get("q.variant", "argmax"),
            zeta_model=kv.get("q.zeta", "measured"),
            initial_q=float(kv.get("q.initial", "0.0")))
        if protocol.variant not in ("argmax", "ratio"):
            raise ConfigError(f"q.variant must be argmax or ratio, got {protocol.variant!r}")
        if protocol.zeta_model not in ("measured", "service_only"):
            raise ConfigError(f"q.zeta must be measured or service_only, got {protocol.zeta_model!r}")
    elif proto_name == "neg_reinforcement":
        level = kv.get("neg.level", "destination_only")
        try:
            qual = NegQualifier(level)
        except ValueError:
            raise ConfigError(f"unknown neg.level {level!r}") from None
        pairs = None
        if "neg.pairs" in kv:
            pairs = []
            for item in kv["neg.pairs"].split(","):
                s, _, d = item.partition(">")
                pairs.append((int(s), int(d)))
        protocol = NegReinfConfig(level=qual, rate=float(kv.get("neg.rate", "0.1")),
                                  probe_pairs=pairs)
    elif proto_name in ("link_state", "distance_vector", "path_vector"):
        protocol = DeterministicConfig(
            kind=proto_name,
            round_interval=float(kv.get("rounds.interval", "1.0")),
            infinity_bound=int(kv.get("rounds.infinity_bound", "16")))
    else:
        raise ConfigError(f"unknown protocol {proto_name!r}")

    try:
        policy = ForwardPolicy(kv.get("policy", "proportional"))
    except ValueError:
        raise ConfigError(f"unknown forwarding policy {kv.get('policy')!r}") from None

    delay = kv.get("delay", "cost")
    if delay.startswith("fixed:"):
        delay = float(delay[6:])
    elif delay != "cost":
        raise ConfigError(f"delay must be 'cost' or 'fixed:<ms>', got {delay!r}")

    if seed_override is not None:
        seed = int(seed_override)
    elif "seed" in kv:
        seed = int(kv["seed"])
    else:
        seed = int(os.environ.get(ENV_SEED, "0"))

    split = None
    if "split.first_hop" in kv:
        r, _, iface = kv["split.first_hop"].partition(":")
        split = (int(r), iface)

    remove = None
    if "remove.router" in kv:
        remove = (float(kv.get("remove.at", "0")), int(kv["remove.router"]))

    snap = kv.get("snapshot_interval")
    return ScenarioConfig(
        topology=topology,
        protocol=protocol,
        duration_ms=float(kv["duration"]),
        seed=seed,
        forward_policy=policy,
        traffic=_parse_traffic(kv.get("traffic", "")),
        delay=delay,
        hop_budget=int(kv.get("hop_budget", "64")),
        ant_hop_budget=int(kv["ant_hop_budget"]) if "ant_hop_budget" in kv else None,
        snapshot_interval=float(snap) if snap else None,
        split_first_hop=split,
        ants_share_fifo=_parse_bool(kv.get("ants.share_fifo", "true")),
        remove_router_at=remove,
        trace_updates=_parse_bool(kv.get("trace_updates", "false")),
        convergence_delta=float(kv.get("convergence.delta", "0.05")),
        convergence_window=float(kv.get("convergence.window", "0")),
        name=kv.get("name", ""),
    )


def cmd_run(args) -> int:
    config_path = Path(args.config)
    try:
        if not config_path.exists():
            raise ConfigError(f"config file not found: {config_path}")
        kv = _parse_kv_text(config_path.read_text())
        for item in args.set or []:
            if "=" not in item:
                raise ConfigError(f"--set expects key=value, got {item!r}")
            k, _, v = item.partition("=")
            kv[k.strip()] = v.strip()
        cfg = build_scenario(kv, config_path.parent, seed_override=args.seed)
    except (ConfigError, TopologyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        result = run_scenario(cfg)
    except (DisconnectedError, OracleTruncation, ConfigError, RuntimeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    report = result.report
    (out_dir / "report.json").write_text(report.to_json() + "\n")
    (out_dir / "report.csv").write_text(report.to_csv())
    if result.prob_tables is not None:
        (out_dir / "tables.dump").write_text(dump_prob_tables(result.prob_tables))
    else:
        (out_dir / "tables.dump").write_text(
            "# tables are qualification-keyed under this protocol; no dump\n")
    (out_dir / "event_log.hash").write_text(report.event_log_hash + "\n")
    if cfg.trace_updates:
        lines = ["time,router,row_dest,interface,delta,p_after"]
        lines += [f"{t},{r},{d},{i},{delta},{p:.6f}"
                  for t, r, d, i, delta, p in result.update_trace]
        (out_dir / "updates.csv").write_text("\n".join(lines) + "\n")
    print(f"event-log hash: {report.event_log_hash}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    try:
        topo = load_topology(Path(args.topology).read_text())
        src, dst = int(args.src), int(args.dst)
        if src not in topo.routers or dst not in topo.routers:
            raise TopologyError(f"unknown router id in pair ({src}, {dst})")
    except (OSError, TopologyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    paths = enumerate_loop_free_paths(topo, src, dst)
    print(f"{len(paths)} paths")
    for i, p in enumerate(paths, start=1):
        hops = " -> ".join(f"{r}:{iface}" for r, iface in p.hops)
        print(f"path {i}: {hops} -> {p.terminal} (cost {p.total_cost})")
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        topo = generate(parse_generator_spec(args.spec))
    except (TopologyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(dump_topology(topo))
    print(f"wrote {out} ({topo.router_count} routers, {topo.link_count // 2} wires)")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reachsim",
                                     description="multi-path routing protocol simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--set", action="append", metavar="k=v",
                       help="override a config key (repeatable)")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.set_defaults(fn=cmd_run)

    p_oracle = sub.add_parser("oracle", help="list all loop-free paths between two routers")
    p_oracle.add_argument("topology")
    p_oracle.add_argument("src")
    p_oracle.add_argument("dst")
    p_oracle.set_defaults(fn=cmd_oracle)

    p_gen = sub.add_parser("gen", help="generate a topology file")
    p_gen.add_argument("spec", help="e.g. linear_chain:4 or velcro:10,5,2")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(fn=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
