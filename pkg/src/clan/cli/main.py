"""Command-line entry point.

Exit codes: 0 success, 1 run failure, 2 configuration error, 3 a reproduced
study missed one of its checks.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import threading
from pathlib import Path

from clan.cli.config import ExperimentConfig, load_config, render_config
from clan.cli.studies import STUDIES
from clan.cluster import RunState, SimTransport, run_agent, run_center, run_experiment
from clan.metrics.report import emit_csv, emit_jsonl, generation_report
from clan.neat.config import ConfigError
from clan.neat.serialize import genome_to_bytes, genome_to_json
from clan.transport.sockets import TransportError

EXIT_OK, EXIT_RUN, EXIT_CONFIG, EXIT_CHECK = 0, 1, 2, 3

log = logging.getLogger("clan")

GENERATION_COLUMNS = (
    "generation", "best_fitness", "mean_fitness", "best_genome_id", "species_count",
    "genes_total", "solved", "clans_reported", "genes_communicated", "inference_gene_ops",
    "evolution_gene_ops", "wall_ms_total", "inference_share", "evolution_share", "comm_share",
    "idle_share",
)


def _json_float(x):
    return x if x is None or math.isfinite(x) else str(x)


def run_directory(out: Path, config: ExperimentConfig, seed: int) -> Path:
    return out / f"{config.topology_spec.name}_{config.env}_{config.mode}_seed{seed}"


def write_artifacts(run_dir: Path, config: ExperimentConfig, seed: int, state: RunState) -> Path:
    """Everything needed to audit or repeat one run; no timestamps, so a
    rerun with the same config and seed writes identical files."""
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.ini").write_text(render_config(config.with_overrides(seeds=(seed,))))
    (run_dir / "seeds.txt").write_text(f"{seed}\n")
    ledger = state.cost_ledger
    emit_csv(ledger.records(), run_dir / "ledger.csv")
    emit_jsonl(ledger.records(), run_dir / "ledger.jsonl")
    rows = []
    for rec in state.records:
        row = rec.to_dict()
        if rec.generation in ledger.closed:
            row.update({k: v for k, v in generation_report(ledger, rec.generation).items() if k in GENERATION_COLUMNS})
        rows.append(row)
    emit_csv(rows, run_dir / "generations.csv", GENERATION_COLUMNS)
    best = state.best_genome
    summary = {
        "topology": config.topology_spec.name,
        "env": config.env,
        "mode": config.mode,
        "seed": seed,
        "generations_run": len(state.records),
        "converged": state.converged,
        "converged_generation": state.converged_generation,
        "best_fitness": _json_float(state.best_fitness),
        "best_genome_id": None if best is None else best.genome_id,
        "genes_communicated": sum(ledger.genes_communicated(g) for g in ledger.generations),
        "inference_gene_ops": ledger.total("inference_gene_ops"),
        "evolution_gene_ops": ledger.total("evolution_gene_ops"),
        "simulated_seconds": state.sim_time,
    }
    (run_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if best is not None:
        (run_dir / "best_genome.bin").write_bytes(genome_to_bytes(best))
        (run_dir / "best_genome.json").write_text(genome_to_json(best) + "\n")
    return run_dir


def _sim_run(config: ExperimentConfig, seed: int) -> RunState:
    t = config.transport
    return run_experiment(
        config.topology_spec, config.env_spec, config.neat, config.eval_mode, config.max_generations,
        SimTransport(t.link, t.compute), seed=seed, episodes=config.episodes,
    )


def _center_run(config: ExperimentConfig, seed: int, port: int | None = None, on_listen=None) -> RunState:
    t = config.transport
    return run_center(
        config.topology_spec, config.env_spec, config.neat, config.eval_mode, config.max_generations,
        seed=seed, episodes=config.episodes, host=t.host, port=t.port if port is None else port,
        timeout=t.timeout, on_listen=on_listen,
    )


def _loopback_run(config: ExperimentConfig, seed: int) -> RunState:
    """Center plus agents as threads of this process, talking over loopback TCP."""
    address: list = []
    errors: list[BaseException] = []

    def agent(i: int) -> None:
        try:
            run_agent(address[0][0], address[0][1], i, timeout=config.transport.timeout)
        except BaseException as exc:  # surfaced after join
            errors.append(exc)

    def on_listen(addr) -> None:
        address.append(addr)
        for i in range(1, config.agents + 1):
            threading.Thread(target=agent, args=(i,), daemon=True).start()

    state = _center_run(config, seed, port=0, on_listen=on_listen)
    if errors:
        raise errors[0]
    return state


def _overrides(args) -> dict:
    return {
        "topology": args.topology,
        "agents": args.agents,
        "clans": args.clans,
        "mode": args.mode,
        "max_generations": args.max_generations,
        "seeds": None if args.seed is None else (args.seed,),
        "output": None if args.out is None else str(args.out),
    }


def _load(args) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig().validate()
    return config.with_overrides(**_overrides(args))


def cmd_run(args) -> int:
    config = _load(args)
    out = Path(config.output)
    for seed in config.seeds:
        if config.transport.kind == "sockets" and config.topology_spec.kind.value != "serial":
            state = _loopback_run(config, seed)
        else:
            state = _sim_run(config, seed)
        path = write_artifacts(run_directory(out, config, seed), config, seed, state)
        status = f"converged at generation {state.converged_generation}" if state.converged else "not converged"
        print(f"seed {seed}: best fitness {state.best_fitness:.4g}, {status} -> {path}")
    return EXIT_OK


def cmd_center(args) -> int:
    config = _load(args)
    if config.topology_spec.kind.value == "serial":
        raise ConfigError("[experiment] topology: the center command needs a distributed topology")
    out = Path(config.output)
    for seed in config.seeds:
        state = _center_run(
            config, seed, on_listen=lambda a: print(f"listening on {a[0]}:{a[1]}", flush=True)
        )
        path = write_artifacts(run_directory(out, config, seed), config, seed, state)
        print(f"seed {seed}: best fitness {state.best_fitness:.4g} -> {path}")
    return EXIT_OK


def cmd_agent(args) -> int:
    for _ in range(args.runs):
        run_agent(args.host, args.port, args.agent_id, timeout=args.timeout)
        print(f"agent {args.agent_id}: stopped by center", flush=True)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    names = list(STUDIES) if args.study == "all" else [args.study]
    ok = True
    for name in names:
        out = None if args.out is None else Path(args.out) / name
        report = STUDIES[name](out, quick=args.quick)
        print(report.text(), end="")
        ok &= report.passed
    return EXIT_OK if ok else EXIT_CHECK


def cmd_validate(args) -> int:
    config = load_config(args.config)
    print(render_config(config), end="")
    return EXIT_OK


def _run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="INI experiment file")
    p.add_argument("--seed", type=int, help="run only this seed")
    p.add_argument("--out", type=Path, help="artifact directory")
    p.add_argument("--topology", choices=["serial", "dcs", "dds", "dda"])
    p.add_argument("--agents", type=int)
    p.add_argument("--clans", type=int)
    p.add_argument("--mode", choices=["multi", "single"])
    p.add_argument("--max-generations", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clan", description="Distributed NEAT experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment (simulated network, or loopback sockets)")
    _run_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("center", help="coordinate remote agents over TCP")
    _run_flags(p)
    p.set_defaults(func=cmd_center)

    p = sub.add_parser("agent", help="serve as one agent of a TCP run")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--agent-id", type=int, required=True)
    p.add_argument("--runs", type=int, default=1, help="number of consecutive runs to serve")
    p.add_argument("--timeout", type=float, default=30.0)
    p.set_defaults(func=cmd_agent)

    p = sub.add_parser("reproduce", help="run a canned study and check its expected outcome")
    p.add_argument("study", choices=[*STUDIES, "all"])
    p.add_argument("--out", type=Path)
    p.add_argument("--quick", action="store_true", help="smaller matrix for smoke testing")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("validate-config", help="parse a config and print it fully resolved")
    p.add_argument("config", type=Path)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TransportError, OSError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUN
    except Exception as exc:
        log.debug("run failed", exc_info=True)
        print(f"run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUN


if __name__ == "__main__":
    sys.exit(main())
