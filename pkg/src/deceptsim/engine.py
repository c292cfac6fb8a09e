"""Episode state machine.

Executes attacker actions against a scenario: charges costs, answers scans
truthfully, applies exploits and privilege escalations, fires the periodic
address mutation of the moving-target defense, and detects the three
terminal outcomes (win, honeypot loss, timeout).

State transitions mutate the passed-in ``NetworkState``; ``step`` also
returns it so call sites can chain functionally if they prefer.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from .scenario import (
    AccessLevel,
    Address,
    HostKind,
    Scenario,
    TARGET_SUBNET,
)


class EpisodeTerminatedError(RuntimeError):
    """An action was submitted after the episode reached a terminal outcome."""


class InvalidActionError(ValueError):
    """Malformed action: bad target address or unknown exploit/privesc id."""


class ActionKind(str, Enum):
    SUBNET_SCAN = "subnet_scan"
    SERVICE_SCAN = "service_scan"
    OS_SCAN = "os_scan"
    VULN_SCAN = "vuln_scan"
    PROCESS_SCAN = "process_scan"
    EXPLOIT = "exploit"
    PRIVESC = "privesc"
    WIRETAP = "wiretap"


@dataclass(frozen=True, slots=True)
class Action:
    """One attacker move. All actions cost one unit by default."""

    kind: ActionKind
    target: Address | None = None
    exploit_id: int | None = None
    privesc_id: int | None = None
    cost: int = 1

    @classmethod
    def subnet_scan(cls) -> Action:
        return cls(ActionKind.SUBNET_SCAN)

    @classmethod
    def service_scan(cls, target: Address) -> Action:
        return cls(ActionKind.SERVICE_SCAN, target)

    @classmethod
    def os_scan(cls, target: Address) -> Action:
        return cls(ActionKind.OS_SCAN, target)

    @classmethod
    def vuln_scan(cls, target: Address) -> Action:
        return cls(ActionKind.VULN_SCAN, target)

    @classmethod
    def process_scan(cls, target: Address) -> Action:
        return cls(ActionKind.PROCESS_SCAN, target)

    @classmethod
    def exploit(cls, target: Address, exploit_id: int) -> Action:
        return cls(ActionKind.EXPLOIT, target, exploit_id=exploit_id)

    @classmethod
    def privesc(cls, target: Address, privesc_id: int) -> Action:
        return cls(ActionKind.PRIVESC, target, privesc_id=privesc_id)

    @classmethod
    def wiretap(cls, target: Address) -> Action:
        return cls(ActionKind.WIRETAP, target)


@dataclass(slots=True)
class Observation:
    """The engine's truthful reply to one action.

    ``connection_failed`` is set when the targeted address hosts an empty
    filler; it is the only signal from which an agent can infer that
    addresses have mutated.
    """

    success: bool
    connection_failed: bool = False
    discovered_addresses: tuple[Address, ...] | None = None
    services: frozenset[int] | None = None
    os: int | None = None
    vulns: frozenset[int] | None = None
    processes: frozenset[int] | None = None
    access_gained: AccessLevel | None = None


class OutcomeKind(str, Enum):
    WIN = "win"
    LOSS_HONEYPOT = "loss_honeypot"
    TIMEOUT = "timeout"


@dataclass(frozen=True, slots=True)
class EpisodeOutcome:
    kind: OutcomeKind
    steps: int
    score: float


@dataclass
class NetworkState:
    """Mutable per-episode state; confined to a single episode runner."""

    scenario: Scenario
    address_map: dict[int, Address]
    addr_to_host: dict[Address, int]
    rng: random.Random
    access: dict[int, AccessLevel] = field(default_factory=dict)
    accumulated_cost: float = 0.0
    cost_since_mutation: float = 0.0
    steps_taken: int = 0
    outcome: EpisodeOutcome | None = None


def new_network_state(scenario: Scenario, rng: random.Random) -> NetworkState:
    address_map = dict(scenario.initial_address_map)
    return NetworkState(
        scenario=scenario,
        address_map=address_map,
        addr_to_host={addr: host_id for host_id, addr in address_map.items()},
        rng=rng,
    )


def step(state: NetworkState, action: Action) -> tuple[Observation, NetworkState]:
    """Execute one action: account cost, apply semantics, check terminals.

    The mutation clock is evaluated last and only on non-terminal states, so
    a win or loss on the mutation boundary is never masked by the mutation.
    """
    if state.outcome is not None:
        raise EpisodeTerminatedError(
            f"episode already ended with {state.outcome.kind.value} "
            f"after {state.outcome.steps} steps"
        )
    if action.target is not None:
        if action.target[0] != TARGET_SUBNET or action.target not in state.addr_to_host:
            raise InvalidActionError(f"target address {action.target} is not in the target subnet")

    state.steps_taken += 1
    state.accumulated_cost += action.cost
    state.cost_since_mutation += action.cost

    obs = _apply(state, action)

    outcome = check_termination(state)
    if outcome is not None:
        state.outcome = outcome

    movement_time = state.scenario.params.movement_time
    if (
        state.outcome is None
        and movement_time is not None
        and state.cost_since_mutation >= movement_time
    ):
        mutate_addresses(state, state.rng)
        state.cost_since_mutation = 0
    return obs, state


def _apply(state: NetworkState, action: Action) -> Observation:
    scenario = state.scenario
    kind = action.kind
    if kind is ActionKind.SUBNET_SCAN:
        discovered = sorted(state.address_map[h] for h in scenario.non_empty_ids)
        return Observation(success=True, discovered_addresses=tuple(discovered))

    host_id = state.addr_to_host[action.target]
    host = scenario.hosts[host_id]
    if host.kind is HostKind.EMPTY:
        return Observation(success=False, connection_failed=True)

    if kind is ActionKind.SERVICE_SCAN:
        return Observation(success=True, services=host.services)
    if kind is ActionKind.OS_SCAN:
        return Observation(success=True, os=host.os)
    if kind is ActionKind.VULN_SCAN:
        return Observation(success=True, vulns=host.vulns)
    if kind is ActionKind.PROCESS_SCAN:
        return Observation(success=True, processes=host.processes)

    if kind is ActionKind.EXPLOIT:
        if not 0 <= action.exploit_id < len(scenario.exploits):
            raise InvalidActionError(f"unknown exploit id {action.exploit_id}")
        exploit = scenario.exploits[action.exploit_id]
        if not exploit.matches(host.services, host.vulns, host.os):
            return Observation(success=False)
        if state.rng.random() >= exploit.prob:
            return Observation(success=False)
        gained = max(state.access.get(host_id, AccessLevel.NONE), exploit.grants)
        state.access[host_id] = gained
        return Observation(success=True, access_gained=gained)

    if kind is ActionKind.PRIVESC:
        if not 0 <= action.privesc_id < len(scenario.privescs):
            raise InvalidActionError(f"unknown privesc id {action.privesc_id}")
        privesc = scenario.privescs[action.privesc_id]
        if state.access.get(host_id, AccessLevel.NONE) < AccessLevel.USER:
            return Observation(success=False)
        if privesc.required_process not in host.processes:
            return Observation(success=False)
        if state.rng.random() >= privesc.prob:
            return Observation(success=False)
        state.access[host_id] = AccessLevel.ROOT
        return Observation(success=True, access_gained=AccessLevel.ROOT)

    if kind is ActionKind.WIRETAP:
        # Credentials are not modelled: wiretapping costs a step and succeeds
        # at root access, changing nothing else.
        has_root = state.access.get(host_id, AccessLevel.NONE) is AccessLevel.ROOT
        return Observation(success=has_root)

    raise InvalidActionError(f"unknown action kind {kind!r}")


def mutate_addresses(state: NetworkState, rng: random.Random) -> NetworkState:
    """Reassign every target-subnet address by a uniform random permutation.

    Empty hosts move too, so the effective mutation space is the whole
    subnet. Access levels and host configurations are untouched; only the
    hosts' addresses (and the attacker's stale knowledge of them) change.
    """
    addresses = [state.address_map[host_id] for host_id in range(len(state.scenario.hosts))]
    rng.shuffle(addresses)
    for host_id, address in enumerate(addresses):
        state.address_map[host_id] = address
    state.addr_to_host = {address: host_id for host_id, address in state.address_map.items()}
    return state


def check_termination(state: NetworkState) -> EpisodeOutcome | None:
    """Pure terminal-condition check: honeypot loss, then win, then timeout."""
    scenario = state.scenario
    access = state.access
    for host_id in scenario.honeypot_ids:
        if access.get(host_id, AccessLevel.NONE) >= AccessLevel.USER:
            return EpisodeOutcome(OutcomeKind.LOSS_HONEYPOT, state.steps_taken, episode_score(state))
    sensitive = scenario.sensitive_ids
    if scenario.params.one_goal:
        won = any(access.get(h, AccessLevel.NONE) is AccessLevel.ROOT for h in sensitive)
    else:
        won = bool(sensitive) and all(
            access.get(h, AccessLevel.NONE) is AccessLevel.ROOT for h in sensitive
        )
    if won:
        return EpisodeOutcome(OutcomeKind.WIN, state.steps_taken, episode_score(state))
    if state.steps_taken >= scenario.params.step_limit:
        return EpisodeOutcome(OutcomeKind.TIMEOUT, state.steps_taken, episode_score(state))
    return None


def episode_score(state: NetworkState) -> float:
    """Sum of the values of every host compromised to at least user access."""
    return float(
        sum(
            state.scenario.hosts[host_id].value
            for host_id, level in state.access.items()
            if level >= AccessLevel.USER
        )
    )


def trace_record(step_index: int, action: Action, obs: Observation,
                 state: NetworkState) -> dict:
    """Compact per-step record for line-delimited trace output."""
    record = {
        "step": step_index,
        "action": action.kind.value,
        "success": obs.success,
    }
    if action.target is not None:
        record["target"] = list(action.target)
    if action.exploit_id is not None:
        record["exploit_id"] = action.exploit_id
    if action.privesc_id is not None:
        record["privesc_id"] = action.privesc_id
    if obs.connection_failed:
        record["connection_failed"] = True
    if obs.discovered_addresses is not None:
        record["discovered"] = len(obs.discovered_addresses)
    if obs.access_gained is not None:
        record["access_gained"] = obs.access_gained.name.lower()
    record["outcome"] = state.outcome.kind.value if state.outcome else None
    return record
