"""Monte-Carlo harness.

Expands the swept parameter grid into cells, runs seeded episode batches
(serially or across processes), and aggregates outcome statistics. Episode
seeds are a pure hash of (master seed, cell, repetition), so any subset of
the grid reproduces identical records in any execution order. The cell key
deliberately excludes the objective flag: cells differing only in one_goal
share episode seeds, which makes their win probabilities exactly paired.
"""

from __future__ import annotations

import dataclasses
import hashlib
import itertools
import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .agents import AGENT_KINDS, make_agent
from .engine import new_network_state, step as engine_step
from .scenario import GeneratorParams, Scenario, generate_scenario

DEFAULT_NUM_HONEYPOTS = (0, 2, 4, 6, 9, 10)
DEFAULT_MOVEMENT_TIMES = (None, 25, 50, 75, 100)
DEFAULT_NUM_HOSTS = (10, 50)
DEFAULT_ONE_GOAL = (False, True)
DEFAULT_SEEDS = (1234, 42, 24121997)
DEFAULT_REPETITIONS = 100

CELL_FIELDS = ("num_honeypots", "movement_time", "num_hosts", "one_goal", "seed", "agent")

# Derived grouping dimensions accepted by aggregate() besides CELL_FIELDS.
DERIVED_FIELDS = ("honeypots_on", "mtd_on")


class SweepError(RuntimeError):
    """A cell of the sweep could not be generated or run."""


@dataclass(frozen=True)
class Cell:
    """One combination of swept parameter values."""

    num_honeypots: int
    movement_time: int | None
    num_hosts: int
    one_goal: bool
    seed: int
    agent: str


@dataclass(frozen=True)
class SweepConfig:
    """The experiment grid: swept value lists plus fixed world parameters."""

    num_honeypots: tuple[int, ...] = DEFAULT_NUM_HONEYPOTS
    movement_time: tuple[int | None, ...] = DEFAULT_MOVEMENT_TIMES
    num_hosts: tuple[int, ...] = DEFAULT_NUM_HOSTS
    one_goal: tuple[bool, ...] = DEFAULT_ONE_GOAL
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    agents: tuple[str, ...] = AGENT_KINDS
    repetitions: int = DEFAULT_REPETITIONS
    master_seed: int = 0
    fixed: GeneratorParams = GeneratorParams()

    def validate(self) -> None:
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be at least 1, got {self.repetitions}")
        for name in ("num_honeypots", "movement_time", "num_hosts", "one_goal", "seeds", "agents"):
            if not getattr(self, name):
                raise ValueError(f"swept value list {name} must not be empty")
        for agent in self.agents:
            if agent not in AGENT_KINDS:
                raise ValueError(
                    f"unknown agent kind {agent!r}; expected one of: {', '.join(AGENT_KINDS)}"
                )

    def cells(self) -> list[Cell]:
        return [
            Cell(*combo)
            for combo in itertools.product(
                self.num_honeypots,
                self.movement_time,
                self.num_hosts,
                self.one_goal,
                self.seeds,
                self.agents,
            )
        ]


@dataclass(frozen=True)
class EpisodeRecord:
    """One episode's cell parameters and outcome, flat for tabular output."""

    num_honeypots: int
    movement_time: int | None
    num_hosts: int
    one_goal: bool
    seed: int
    agent: str
    repetition: int
    outcome: str
    steps: int
    score: float
    episode_seed: int


@dataclass(frozen=True)
class AggregateStats:
    """Outcome fractions and step-count distribution for one record group."""

    group: tuple[tuple[str, object], ...]
    episodes: int
    win_probability: float
    loss_honeypot_fraction: float
    timeout_fraction: float
    steps_min: int
    steps_q1: float
    steps_median: float
    steps_q3: float
    steps_max: int


def derive_episode_seed(master_seed: int, cell: Cell, repetition: int) -> int:
    """Stable per-episode seed; one_goal is left out so objective variants
    of a cell run on common random numbers."""
    key = (
        f"{master_seed}|hp={cell.num_honeypots}|mt={cell.movement_time}"
        f"|hosts={cell.num_hosts}|seed={cell.seed}|agent={cell.agent}|rep={repetition}"
    )
    digest = hashlib.sha256(key.encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _substream(episode_seed: int, label: str) -> random.Random:
    digest = hashlib.sha256(f"{episode_seed}:{label}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def scenario_params(fixed: GeneratorParams, cell: Cell) -> GeneratorParams:
    return dataclasses.replace(
        fixed,
        num_honeypots=cell.num_honeypots,
        movement_time=cell.movement_time,
        num_hosts=cell.num_hosts,
        one_goal=cell.one_goal,
        seed=cell.seed,
    )


def run_episode(
    scenario: Scenario,
    agent_kind: str,
    episode_seed: int,
    repetition: int = 0,
    trace_sink=None,
) -> EpisodeRecord:
    """Play one episode to termination; deterministic in all arguments.

    ``trace_sink``, when given, is called after every step with
    (step index, action, observation, state, knowledge_reset flag).
    """
    engine_rng = _substream(episode_seed, "engine")
    agent_rng = _substream(episode_seed, "agent")
    agent = make_agent(agent_kind, scenario, agent_rng)
    state = new_network_state(scenario, engine_rng)
    while state.outcome is None:
        action = agent.next_action()
        resets_before = agent.resets
        obs, state = engine_step(state, action)
        agent.observe(action, obs)
        if trace_sink is not None:
            trace_sink(state.steps_taken, action, obs, state, agent.resets > resets_before)
    outcome = state.outcome
    params = scenario.params
    return EpisodeRecord(
        num_honeypots=params.num_honeypots,
        movement_time=params.movement_time,
        num_hosts=params.num_hosts,
        one_goal=params.one_goal,
        seed=params.seed,
        agent=agent_kind,
        repetition=repetition,
        outcome=outcome.kind.value,
        steps=outcome.steps,
        score=outcome.score,
        episode_seed=episode_seed,
    )


def _run_cell(task: tuple[GeneratorParams, Cell, int, int]) -> list[EpisodeRecord]:
    fixed, cell, repetitions, master_seed = task
    try:
        scenario = generate_scenario(scenario_params(fixed, cell))
    except ValueError as exc:
        raise SweepError(f"cell {cell} failed to generate: {exc}") from exc
    return [
        run_episode(
            scenario,
            cell.agent,
            derive_episode_seed(master_seed, cell, repetition),
            repetition,
        )
        for repetition in range(repetitions)
    ]


def run_sweep(config: SweepConfig, workers: int | None = None) -> list[EpisodeRecord]:
    """All cells x repetitions, ordered by cell then repetition.

    ``workers`` > 1 distributes whole cells over processes; the output is
    identical to a serial run because results are flattened in cell order.
    """
    config.validate()
    tasks = [
        (config.fixed, cell, config.repetitions, config.master_seed)
        for cell in config.cells()
    ]
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_cell, tasks))
    else:
        batches = [_run_cell(task) for task in tasks]
    return [record for batch in batches for record in batch]


def record_field(record: EpisodeRecord, name: str):
    """A record's value for a grouping field, including derived dimensions."""
    if name == "honeypots_on":
        return record.num_honeypots > 0
    if name == "mtd_on":
        return record.movement_time is not None
    return getattr(record, name)


def aggregate(records, group_by: tuple[str, ...] = CELL_FIELDS) -> list[AggregateStats]:
    """Group records and compute outcome fractions and step quartiles.

    Quartiles use inclusive linear interpolation. Output order follows the
    sorted group keys, so it is independent of record order.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to aggregate")
    valid = set(CELL_FIELDS) | set(DERIVED_FIELDS)
    for name in group_by:
        if name not in valid:
            raise ValueError(
                f"unknown group-by field {name!r}; expected any of: "
                f"{', '.join(CELL_FIELDS + DERIVED_FIELDS)}"
            )
    groups: dict[tuple, list[EpisodeRecord]] = {}
    for record in records:
        key = tuple(record_field(record, name) for name in group_by)
        groups.setdefault(key, []).append(record)

    stats = []
    for key in sorted(groups, key=lambda k: tuple((v is None, v) for v in k)):
        members = groups[key]
        n = len(members)
        outcomes = [r.outcome for r in members]
        steps = sorted(r.steps for r in members)
        if len(steps) > 1:
            q1, median, q3 = statistics.quantiles(steps, n=4, method="inclusive")
        else:
            q1 = median = q3 = float(steps[0])
        stats.append(
            AggregateStats(
                group=tuple(zip(group_by, key)),
                episodes=n,
                win_probability=outcomes.count("win") / n,
                loss_honeypot_fraction=outcomes.count("loss_honeypot") / n,
                timeout_fraction=outcomes.count("timeout") / n,
                steps_min=steps[0],
                steps_q1=q1,
                steps_median=median,
                steps_q3=q3,
                steps_max=steps[-1],
            )
        )
    return stats
