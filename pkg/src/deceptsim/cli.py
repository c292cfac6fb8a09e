"""Command-line front end: run one episode, sweep a parameter grid, aggregate results.

Configuration files are flat ``key = value`` text using the experiment table
field names, e.g. ``num_honeypots_options = 0,2,4,6,9,10``.  Flags override
config-file keys.  A null movement time is spelled ``none`` in configs and
emitted as the literal string ``none`` in outputs.

Every output starts with a manifest comment line recording the resolved
configuration, tool version, timestamp, and output paths; ``--from-manifest``
replays a manifest and reproduces the original file byte-for-byte.  The
manifest timestamp is null unless SOURCE_DATE_EPOCH is set, so that repeated
runs of the same configuration stay byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .agents import AGENT_KINDS
from .engine import trace_record
from .experiment import (
    CELL_FIELDS,
    DERIVED_FIELDS,
    Cell,
    EpisodeRecord,
    SweepConfig,
    aggregate,
    derive_episode_seed,
    run_episode,
    run_sweep,
    scenario_params,
)
from .scenario import GeneratorParams, generate_scenario

MANIFEST_PREFIX = "# deceptsim-manifest: "
WORKERS_ENV_VAR = "DECEPTSIM_WORKERS"
TIMESTAMP_ENV_VAR = "SOURCE_DATE_EPOCH"

RECORD_COLUMNS = CELL_FIELDS + ("repetition", "outcome", "steps", "score", "episode_seed")
STATS_COLUMNS = (
    "episodes",
    "win_probability",
    "loss_honeypot_fraction",
    "timeout_fraction",
    "steps_min",
    "steps_q1",
    "steps_median",
    "steps_q3",
    "steps_max",
)
PROBABILITY_COLUMNS = frozenset(
    {"win_probability", "loss_honeypot_fraction", "timeout_fraction"}
)

# Swept-value config keys (table names) -> SweepConfig field.
LIST_KEYS = {
    "num_honeypots_options": "num_honeypots",
    "movement_time_options": "movement_time",
    "num_hosts_options": "num_hosts",
    "one_goal_options": "one_goal",
    "seed_options": "seeds",
    "agents": "agents",
}

# Fixed-parameter config keys (table names) -> GeneratorParams field.
FIXED_KEYS = {
    "num_sensitive": "num_sensitive",
    "num_services": "num_services",
    "num_os": "num_os",
    "num_processes": "num_processes",
    "num_exploits": "num_exploits",
    "num_privescs": "num_privescs",
    "num_vulns": "num_vulns",
    "r_sensitive": "r_sensitive",
    "r_honeypot": "r_honeypot",
    "action_cost": "action_cost",
    "exploit_probs": "exploit_prob",
    "privesc_probs": "privesc_prob",
    "uniform": "uniform",
    "base_host_value": "base_host_value",
    "host_discovery_value": "host_discovery_value",
    "step_limit": "step_limit",
    "addresses": "num_addresses",
    "subnets": "num_subnets",
}

SCALAR_KEYS = ("repetitions", "master_seed", "workers")

GROUP_BY_FIELDS = CELL_FIELDS + DERIVED_FIELDS
GROUP_ALIASES = {name: name for name in GROUP_BY_FIELDS}
GROUP_ALIASES.update({"honeypots": "num_honeypots", "hosts": "num_hosts", "agents": "agent"})


class ConfigError(Exception):
    """Unusable configuration or arguments; maps to exit status 1."""


# ---------------------------------------------------------------------------
# Value parsing and formatting


def parse_scalar(token: str):
    """Interpret one config token: none, true/false, int, float, or string."""
    token = token.strip()
    lowered = token.lower()
    if lowered == "none":
        return None
    if lowered == "true":
        return True
    if lowered == "false":
        return False
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    return token


def parse_list(raw: str) -> tuple:
    return tuple(parse_scalar(token) for token in raw.split(","))


def format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_probability(value: float) -> str:
    return format(value, ".6g")


def _parse_bool(token: str, field: str) -> bool:
    value = parse_scalar(token)
    if not isinstance(value, bool):
        raise ValueError(f"{field}: expected true or false, got {token!r}")
    return value


# ---------------------------------------------------------------------------
# Config files and manifests


def read_config_file(path: str) -> dict[str, str]:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()
    return entries


def default_timestamp() -> str | None:
    epoch = os.environ.get(TIMESTAMP_ENV_VAR)
    if epoch is None:
        return None
    try:
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    except (ValueError, OverflowError, OSError) as exc:
        raise ConfigError(f"{TIMESTAMP_ENV_VAR} must be a Unix timestamp, got {epoch!r}") from exc
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def build_manifest(command: str, config, outputs: list[str],
                   timestamp: str | None, **extra) -> dict:
    manifest = {
        "command": command,
        "config": config,
        "outputs": outputs,
        "timestamp": timestamp,
        "version": __version__,
    }
    manifest.update(extra)
    return manifest


def manifest_line(manifest: dict) -> str:
    return MANIFEST_PREFIX + json.dumps(manifest, sort_keys=True, separators=(",", ":"))


def _parse_manifest_json(line: str, path: str) -> dict:
    try:
        return json.loads(line[len(MANIFEST_PREFIX):])
    except ValueError as exc:
        raise ConfigError(f"{path}: corrupted manifest line: {exc}") from exc


def load_manifest(path: str, command: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                if line.startswith(MANIFEST_PREFIX):
                    manifest = _parse_manifest_json(line, path)
                    break
                if line.strip() and not line.startswith("#"):
                    raise ConfigError(f"{path}: no manifest line found")
            else:
                raise ConfigError(f"{path}: no manifest line found")
    except OSError as exc:
        raise ConfigError(f"cannot read manifest from {path}: {exc}") from exc
    if manifest.get("command") != command:
        raise ConfigError(
            f"{path}: manifest was written by {manifest.get('command')!r}, expected {command!r}"
        )
    return manifest


def sweep_config_to_dict(config: SweepConfig) -> dict:
    return {
        "num_honeypots_options": list(config.num_honeypots),
        "movement_time_options": list(config.movement_time),
        "num_hosts_options": list(config.num_hosts),
        "one_goal_options": list(config.one_goal),
        "seed_options": list(config.seeds),
        "agents": list(config.agents),
        "repetitions": config.repetitions,
        "master_seed": config.master_seed,
        "fixed": dataclasses.asdict(config.fixed),
    }


def sweep_config_from_dict(data: dict) -> SweepConfig:
    try:
        return SweepConfig(
            num_honeypots=tuple(data["num_honeypots_options"]),
            movement_time=tuple(data["movement_time_options"]),
            num_hosts=tuple(data["num_hosts_options"]),
            one_goal=tuple(data["one_goal_options"]),
            seeds=tuple(data["seed_options"]),
            agents=tuple(data["agents"]),
            repetitions=data["repetitions"],
            master_seed=data["master_seed"],
            fixed=GeneratorParams(**data["fixed"]),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"manifest config is incomplete: {exc}") from exc


# ---------------------------------------------------------------------------
# Configuration resolution


def _split_entries(entries: dict[str, str]):
    """Partition raw config entries into list, fixed, and scalar values."""
    lists: dict[str, tuple] = {}
    fixed: dict[str, object] = {}
    scalars: dict[str, object] = {}
    for key, raw in entries.items():
        if key == "num_creds":
            # Credentials are not modeled; the key is accepted for table
            # compatibility but only with the value none.
            if parse_scalar(raw) is not None:
                raise ConfigError("num_creds: credentials are not modeled, only 'none' is accepted")
            continue
        if key in LIST_KEYS:
            lists[LIST_KEYS[key]] = parse_list(raw)
        elif key in FIXED_KEYS:
            fixed[FIXED_KEYS[key]] = parse_scalar(raw)
        elif key in SCALAR_KEYS:
            scalars[key] = parse_scalar(raw)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return lists, fixed, scalars


def _build_fixed(fixed_fields: dict[str, object], args) -> GeneratorParams:
    if getattr(args, "step_limit", None) is not None:
        fixed_fields["step_limit"] = args.step_limit
    try:
        return GeneratorParams(**fixed_fields)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _validate_sweep(config: SweepConfig) -> None:
    try:
        config.validate()
        for cell in config.cells():
            scenario_params(config.fixed, cell).validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def resolve_sweep(entries: dict[str, str], args) -> tuple[SweepConfig, object]:
    lists, fixed_fields, scalars = _split_entries(entries)
    flag_lists = {
        "num_honeypots": args.honeypots,
        "movement_time": args.movement_times,
        "num_hosts": args.hosts,
        "one_goal": args.one_goal,
        "seeds": args.seeds,
        "agents": args.agents,
    }
    for field, raw in flag_lists.items():
        if raw is not None:
            lists[field] = parse_list(raw)
    repetitions = scalars.get("repetitions", SweepConfig.repetitions)
    master_seed = scalars.get("master_seed", SweepConfig.master_seed)
    if args.repetitions is not None:
        repetitions = args.repetitions
    if args.master_seed is not None:
        master_seed = args.master_seed
    config = SweepConfig(
        **lists,
        repetitions=repetitions,
        master_seed=master_seed,
        fixed=_build_fixed(fixed_fields, args),
    )
    _validate_sweep(config)
    return config, scalars.get("workers")


def resolve_single_episode(entries: dict[str, str], args) -> tuple[Cell, GeneratorParams, int, int]:
    lists, fixed_fields, scalars = _split_entries(entries)
    fixed = _build_fixed(fixed_fields, args)
    cell_values = {
        "num_honeypots": fixed.num_honeypots,
        "movement_time": fixed.movement_time,
        "num_hosts": fixed.num_hosts,
        "one_goal": fixed.one_goal,
        "seed": fixed.seed,
    }
    agent = None
    for field, values in lists.items():
        if len(values) != 1:
            raise ConfigError(f"{field}: run takes a single value, got {len(values)}")
        if field == "agents":
            agent = values[0]
        else:
            cell_values[field if field != "seeds" else "seed"] = values[0]
    for field, flag in (
        ("num_honeypots", args.honeypots),
        ("num_hosts", args.hosts),
        ("seed", args.seed),
    ):
        if flag is not None:
            cell_values[field] = flag
    if args.movement_time is not None:
        value = parse_scalar(args.movement_time)
        if value is not None and not isinstance(value, int):
            raise ConfigError(f"movement_time: expected an integer or none, got {args.movement_time!r}")
        cell_values["movement_time"] = value
    if args.one_goal is not None:
        try:
            cell_values["one_goal"] = _parse_bool(args.one_goal, "one_goal")
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if args.agent is not None:
        agent = args.agent
    if agent is None:
        raise ConfigError("agent: required (use --agent or the agents config key)")
    if agent not in AGENT_KINDS:
        raise ConfigError(
            f"agent: unknown agent kind {agent!r}; expected one of: {', '.join(AGENT_KINDS)}"
        )
    cell = Cell(agent=agent, **cell_values)
    master_seed = scalars.get("master_seed", 0)
    if args.master_seed is not None:
        master_seed = args.master_seed
    repetition = args.repetition if args.repetition is not None else 0
    try:
        scenario_params(fixed, cell).validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cell, fixed, master_seed, repetition


def resolve_workers(flag_value, config_value) -> int:
    value = flag_value
    if value is None:
        value = config_value
    if value is None:
        env = os.environ.get(WORKERS_ENV_VAR)
        if env is not None:
            try:
                value = int(env)
            except ValueError as exc:
                raise ConfigError(f"{WORKERS_ENV_VAR} must be an integer, got {env!r}") from exc
    if value is None:
        return 1
    if not isinstance(value, int) or value < 1:
        raise ConfigError(f"workers must be a positive integer, got {value!r}")
    return value


def normalize_group_by(spec: str | None) -> tuple[str, ...]:
    if spec is None:
        return CELL_FIELDS
    fields = []
    for token in spec.split(","):
        name = token.strip()
        if name not in GROUP_ALIASES:
            raise ConfigError(
                f"unknown group-by field {name!r}; expected one of: "
                + ", ".join(sorted(set(GROUP_ALIASES)))
            )
        fields.append(GROUP_ALIASES[name])
    if not fields:
        raise ConfigError("group-by needs at least one field")
    return tuple(fields)


# ---------------------------------------------------------------------------
# Output writing and reading


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def records_csv_text(manifest: dict, records) -> str:
    buffer = io.StringIO()
    buffer.write(manifest_line(manifest) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(RECORD_COLUMNS)
    for record in records:
        writer.writerow([format_value(getattr(record, column)) for column in RECORD_COLUMNS])
    return buffer.getvalue()


def aggregates_csv_text(manifest: dict, group_by: tuple[str, ...], stats) -> str:
    buffer = io.StringIO()
    buffer.write(manifest_line(manifest) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(group_by) + list(STATS_COLUMNS))
    for entry in stats:
        row = [format_value(value) for _, value in entry.group]
        for column in STATS_COLUMNS:
            value = getattr(entry, column)
            if column in PROBABILITY_COLUMNS:
                row.append(format_probability(value))
            else:
                row.append(format_value(value))
        writer.writerow(row)
    return buffer.getvalue()


def trace_jsonl_text(manifest: dict, rows) -> str:
    lines = [manifest_line(manifest)]
    lines.extend(json.dumps(row, sort_keys=True) for row in rows)
    return "\n".join(lines) + "\n"


def _record_from_row(row: dict[str, str]) -> EpisodeRecord:
    movement = row["movement_time"]
    return EpisodeRecord(
        num_honeypots=int(row["num_honeypots"]),
        movement_time=None if movement == "none" else int(movement),
        num_hosts=int(row["num_hosts"]),
        one_goal=_parse_bool(row["one_goal"], "one_goal"),
        seed=int(row["seed"]),
        agent=row["agent"],
        repetition=int(row["repetition"]),
        outcome=row["outcome"],
        steps=int(row["steps"]),
        score=float(row["score"]),
        episode_seed=int(row["episode_seed"]),
    )


def read_records_csv(path: str) -> tuple[list[EpisodeRecord], dict | None]:
    try:
        with open(path, encoding="utf-8", newline="") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read records file {path}: {exc}") from exc
    manifest = None
    data = []
    for line in lines:
        if line.startswith(MANIFEST_PREFIX):
            manifest = _parse_manifest_json(line, path)
        elif not line.startswith("#"):
            data.append(line)
    reader = csv.DictReader(data)
    header = reader.fieldnames or []
    missing = [column for column in RECORD_COLUMNS if column not in header]
    if missing:
        raise ConfigError(f"{path}: missing record columns: {', '.join(missing)}")
    records = []
    for index, row in enumerate(reader, start=1):
        try:
            records.append(_record_from_row(row))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: bad record row {index}: {exc}") from exc
    return records, manifest


# ---------------------------------------------------------------------------
# Subcommands


def run_config_dict(cell: Cell, fixed: GeneratorParams, master_seed: int,
                    repetition: int) -> dict:
    return {
        "agent": cell.agent,
        "num_honeypots": cell.num_honeypots,
        "movement_time": cell.movement_time,
        "num_hosts": cell.num_hosts,
        "one_goal": cell.one_goal,
        "seed": cell.seed,
        "master_seed": master_seed,
        "repetition": repetition,
        "fixed": dataclasses.asdict(fixed),
    }


def _cell_from_run_config(config: dict) -> tuple[Cell, GeneratorParams, int, int]:
    try:
        cell = Cell(
            num_honeypots=config["num_honeypots"],
            movement_time=config["movement_time"],
            num_hosts=config["num_hosts"],
            one_goal=config["one_goal"],
            seed=config["seed"],
            agent=config["agent"],
        )
        fixed = GeneratorParams(**config["fixed"])
        return cell, fixed, config["master_seed"], config["repetition"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"manifest config is incomplete: {exc}") from exc


def cmd_run(args) -> int:
    if args.from_manifest:
        manifest = load_manifest(args.from_manifest, "run")
        cell, fixed, master_seed, repetition = _cell_from_run_config(manifest["config"])
        timestamp = manifest.get("timestamp")
        trace_path = args.trace
        if trace_path is None and manifest.get("outputs"):
            trace_path = manifest["outputs"][0]
    else:
        entries = read_config_file(args.config) if args.config else {}
        cell, fixed, master_seed, repetition = resolve_single_episode(entries, args)
        timestamp = default_timestamp()
        trace_path = args.trace
    episode_seed = derive_episode_seed(master_seed, cell, repetition)
    scenario = generate_scenario(scenario_params(fixed, cell))
    trace_rows = []

    def sink(step_index, action, obs, state, knowledge_reset):
        row = trace_record(step_index, action, obs, state)
        if knowledge_reset:
            row["knowledge_reset"] = True
        trace_rows.append(row)

    record = run_episode(
        scenario,
        cell.agent,
        episode_seed,
        repetition,
        trace_sink=sink if trace_path else None,
    )
    outputs = [trace_path] if trace_path else []
    manifest = build_manifest(
        "run", run_config_dict(cell, fixed, master_seed, repetition), outputs, timestamp
    )
    print(manifest_line(manifest))
    print(" ".join(
        f"{column}={format_value(getattr(record, column))}" for column in RECORD_COLUMNS
    ))
    if trace_path:
        write_text(trace_path, trace_jsonl_text(manifest, trace_rows))
    return 0


def cmd_sweep(args) -> int:
    if args.from_manifest:
        manifest = load_manifest(args.from_manifest, "sweep")
        config = sweep_config_from_dict(manifest["config"])
        _validate_sweep(config)
        config_workers = None
        timestamp = manifest.get("timestamp")
        out_path = args.out if args.out is not None else manifest["outputs"][0]
    else:
        entries = read_config_file(args.config) if args.config else {}
        config, config_workers = resolve_sweep(entries, args)
        timestamp = default_timestamp()
        out_path = args.out if args.out is not None else "records.csv"
    workers = resolve_workers(args.workers, config_workers)
    records = run_sweep(config, workers=workers)
    manifest = build_manifest("sweep", sweep_config_to_dict(config), [out_path], timestamp)
    write_text(out_path, records_csv_text(manifest, records))
    print(f"wrote {len(records)} episode records to {out_path}")
    return 0


def cmd_aggregate(args) -> int:
    if args.from_manifest:
        manifest = load_manifest(args.from_manifest, "aggregate")
        try:
            records_path = manifest["records"]
            group_by = tuple(manifest["group_by"])
            out_path = manifest["outputs"][0]
        except KeyError as exc:
            raise ConfigError(f"manifest config is incomplete: {exc}") from exc
        timestamp = manifest.get("timestamp")
        if args.out is not None:
            out_path = args.out
    else:
        records_path = args.records
        group_by = normalize_group_by(args.group_by)
        out_path = args.out if args.out is not None else "-"
        timestamp = default_timestamp()
    records, source_manifest = read_records_csv(records_path)
    if not records:
        raise ConfigError(f"{records_path}: no records to aggregate")
    try:
        stats = aggregate(records, group_by)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    source_config = source_manifest.get("config") if source_manifest else None
    manifest = build_manifest(
        "aggregate",
        source_config,
        [out_path],
        timestamp,
        group_by=list(group_by),
        records=records_path,
    )
    text = aggregates_csv_text(manifest, group_by, stats)
    if out_path == "-":
        sys.stdout.write(text)
    else:
        write_text(out_path, text)
        print(f"wrote {len(stats)} aggregate rows to {out_path}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


class _Parser(argparse.ArgumentParser):
    # Usage problems must exit 1, not argparse's default 2.
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="deceptsim",
        description="Deception-defense sizing simulator: honeypots and address mutation "
        "against scripted attackers.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="run a single episode")
    run.add_argument("--config", help="key = value config file")
    run.add_argument("--agent", help=f"attacker script: {', '.join(AGENT_KINDS)}")
    run.add_argument("--honeypots", type=int, help="number of honeypot hosts")
    run.add_argument("--movement-time", help="address mutation interval, or none")
    run.add_argument("--hosts", type=int, help="number of normal hosts")
    run.add_argument("--one-goal", help="true: one sensitive host wins; false: all must fall")
    run.add_argument("--seed", type=int, help="scenario generation seed")
    run.add_argument("--master-seed", type=int, help="episode seed derivation root")
    run.add_argument("--repetition", type=int, help="repetition index for seed derivation")
    run.add_argument("--step-limit", type=int, help="maximum actions before timeout")
    run.add_argument("--trace", metavar="PATH", help="write a per-step JSONL trace")
    run.add_argument("--from-manifest", metavar="PATH",
                     help="re-run the episode recorded in an output's manifest")
    run.set_defaults(func=cmd_run)

    sweep = subparsers.add_parser("sweep", help="run the full parameter grid")
    sweep.add_argument("--config", help="key = value config file")
    sweep.add_argument("--out", help="records CSV path (default records.csv)")
    sweep.add_argument("--workers", type=int,
                       help=f"parallel worker processes (default ${WORKERS_ENV_VAR} or 1)")
    sweep.add_argument("--honeypots", help="comma-separated honeypot counts")
    sweep.add_argument("--movement-times", help="comma-separated intervals, none allowed")
    sweep.add_argument("--hosts", help="comma-separated normal host counts")
    sweep.add_argument("--one-goal", help="comma-separated objective values (true,false)")
    sweep.add_argument("--seeds", help="comma-separated scenario seeds")
    sweep.add_argument("--agents", help="comma-separated agent kinds")
    sweep.add_argument("--repetitions", type=int, help="episodes per cell")
    sweep.add_argument("--master-seed", type=int, help="episode seed derivation root")
    sweep.add_argument("--step-limit", type=int, help="maximum actions before timeout")
    sweep.add_argument("--from-manifest", metavar="PATH",
                       help="re-run the sweep recorded in an output's manifest")
    sweep.set_defaults(func=cmd_sweep)

    agg = subparsers.add_parser("aggregate", help="summarize a records file")
    agg.add_argument("--records", help="records CSV written by sweep")
    agg.add_argument("--group-by",
                     help="comma-separated fields, e.g. agent,honeypots or agent,mtd_on")
    agg.add_argument("--out", help="aggregates CSV path (default stdout)")
    agg.add_argument("--from-manifest", metavar="PATH",
                     help="recompute the aggregation recorded in an output's manifest")
    agg.set_defaults(func=cmd_aggregate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.func is cmd_aggregate and not args.from_manifest and not args.records:
            raise ConfigError("aggregate needs --records or --from-manifest")
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
