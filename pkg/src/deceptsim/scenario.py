"""World model and deterministic scenario generation.

A scenario is an immutable description of one simulated network: the hosts
behind the target subnet (normal, sensitive, honeypot, plus empty address
fillers), the attacker's exploit and privilege-escalation toolkit, and the
initial host-to-address assignment. Generation is a pure function of the
parameter set, so identical parameters always yield an identical world.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass
from enum import Enum, IntEnum
from functools import cached_property

# An address is a (subnet, index) pair. Subnet 0 holds only the attacker;
# every other address lives in the single target subnet.
Address = tuple[int, int]

ATTACKER_SUBNET = 0
TARGET_SUBNET = 1


class ParameterError(ValueError):
    """A generator parameter violates its invariants."""


class CapacityError(ValueError):
    """Host counts exceed the target subnet's address capacity."""


class AccessLevel(IntEnum):
    NONE = 0
    USER = 1
    ROOT = 2


class HostKind(str, Enum):
    NORMAL = "normal"
    SENSITIVE = "sensitive"
    HONEYPOT = "honeypot"
    EMPTY = "empty"


@dataclass(frozen=True)
class GeneratorParams:
    """Scenario generator knobs.

    The first five fields are the ones experiments vary (counts, mutation
    interval, objective, seed); the rest pin the world size and action
    economics and normally stay at their defaults.
    """

    num_hosts: int = 10
    num_honeypots: int = 0
    movement_time: int | None = None
    one_goal: bool = False
    seed: int = 1234
    num_sensitive: int = 3
    num_services: int = 10
    num_os: int = 1
    num_processes: int = 10
    num_exploits: int = 10
    num_privescs: int = 10
    num_vulns: int = 10
    r_sensitive: float = 1000.0
    r_honeypot: float = -1000.0
    base_host_value: float = 1.0
    host_discovery_value: float = 1.0
    action_cost: int = 1
    exploit_prob: float = 1.0
    privesc_prob: float = 1.0
    uniform: bool = True
    step_limit: int = 3000
    num_addresses: int = 256
    num_subnets: int = 2

    @property
    def target_capacity(self) -> int:
        """Addresses available in the target subnet (one is the attacker's)."""
        return self.num_addresses - 1

    def validate(self) -> None:
        counts = {
            "num_hosts": self.num_hosts,
            "num_honeypots": self.num_honeypots,
            "num_sensitive": self.num_sensitive,
            "num_services": self.num_services,
            "num_processes": self.num_processes,
            "num_exploits": self.num_exploits,
            "num_privescs": self.num_privescs,
            "num_vulns": self.num_vulns,
        }
        for name, value in counts.items():
            if value < 0:
                raise ParameterError(f"{name} must be non-negative, got {value}")
        if self.num_os < 1:
            raise ParameterError(f"num_os must be at least 1, got {self.num_os}")
        if self.num_subnets != 2:
            raise ParameterError(
                f"only two subnets are supported (attacker + target), got {self.num_subnets}"
            )
        if self.movement_time is not None and self.movement_time <= 0:
            raise ParameterError(
                f"movement_time must be positive when set, got {self.movement_time}"
            )
        for name, prob in (("exploit_prob", self.exploit_prob), ("privesc_prob", self.privesc_prob)):
            if not 0.0 <= prob <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {prob}")
        if self.action_cost <= 0:
            raise ParameterError(f"action_cost must be positive, got {self.action_cost}")
        if self.step_limit < 1:
            raise ParameterError(f"step_limit must be at least 1, got {self.step_limit}")
        if self.num_sensitive + self.num_honeypots > 0:
            if self.num_exploits < 1:
                raise ParameterError("at least one exploit is required to reach goal hosts")
            if self.num_services < 1 or self.num_vulns < 1:
                raise ParameterError("exploits need at least one service and one vulnerability")
        if self.num_privescs > 0 and self.num_processes < 1:
            raise ParameterError("privilege escalations need at least one process")
        real_hosts = self.num_sensitive + self.num_hosts + self.num_honeypots
        if real_hosts > self.target_capacity:
            raise CapacityError(
                f"{real_hosts} hosts do not fit the {self.target_capacity} "
                f"target-subnet addresses"
            )


@dataclass(frozen=True)
class HostSpec:
    """One host: a stable identity plus its fixed configuration."""

    id: int
    kind: HostKind
    services: frozenset[int]
    os: int
    processes: frozenset[int]
    vulns: frozenset[int]
    value: float


@dataclass(frozen=True)
class ExploitDef:
    """An exploit: requirements on the target plus the access it grants."""

    id: int
    required_service: int
    required_vuln: int
    required_os: int
    grants: AccessLevel
    prob: float

    def matches(self, services: frozenset[int], vulns: frozenset[int], os: int) -> bool:
        return (
            self.required_service in services
            and self.required_vuln in vulns
            and self.required_os == os
        )


@dataclass(frozen=True)
class PrivEscDef:
    """A privilege escalation: needs user access and a running process."""

    id: int
    required_process: int
    prob: float


@dataclass(frozen=True)
class Scenario:
    """An immutable generated world, shared read-only across episodes.

    Host ids are list indices. The address map is a bijection between all
    non-attacker hosts (empty fillers included) and target-subnet addresses.
    """

    params: GeneratorParams
    hosts: tuple[HostSpec, ...]
    exploits: tuple[ExploitDef, ...]
    privescs: tuple[PrivEscDef, ...]
    subnets: tuple[int, ...]
    initial_address_map: dict[int, Address]

    def host(self, host_id: int) -> HostSpec:
        return self.hosts[host_id]

    @cached_property
    def sensitive_ids(self) -> tuple[int, ...]:
        return tuple(h.id for h in self.hosts if h.kind is HostKind.SENSITIVE)

    @cached_property
    def honeypot_ids(self) -> tuple[int, ...]:
        return tuple(h.id for h in self.hosts if h.kind is HostKind.HONEYPOT)

    @cached_property
    def non_empty_ids(self) -> tuple[int, ...]:
        return tuple(h.id for h in self.hosts if h.kind is not HostKind.EMPTY)


def generate_scenario(params: GeneratorParams) -> Scenario:
    """Build a randomized world from ``params``; deterministic per seed.

    Host configurations are uniform draws over service/process/vulnerability
    subsets. Sensitive and honeypot hosts are drawn from the same
    distribution and then patched so each one can be taken to root access
    (a matching root exploit, or a matching user exploit plus a matching
    privilege escalation); without that guarantee a seed could produce an
    unwinnable world. Leftover target-subnet addresses become empty hosts.
    """
    params.validate()
    rng = random.Random(params.seed)

    exploits = tuple(
        ExploitDef(
            id=i,
            required_service=i % params.num_services,
            required_vuln=i % params.num_vulns,
            required_os=0,
            grants=rng.choice((AccessLevel.USER, AccessLevel.ROOT)),
            prob=params.exploit_prob,
        )
        for i in range(params.num_exploits)
    )
    privescs = tuple(
        PrivEscDef(id=i, required_process=i % params.num_processes, prob=params.privesc_prob)
        for i in range(params.num_privescs)
    )

    capacity = params.target_capacity
    num_empty = capacity - (params.num_sensitive + params.num_hosts + params.num_honeypots)
    kinds = (
        [HostKind.SENSITIVE] * params.num_sensitive
        + [HostKind.NORMAL] * params.num_hosts
        + [HostKind.HONEYPOT] * params.num_honeypots
        + [HostKind.EMPTY] * num_empty
    )
    values = {
        HostKind.SENSITIVE: float(params.r_sensitive),
        HostKind.NORMAL: float(params.base_host_value),
        HostKind.HONEYPOT: float(params.r_honeypot),
        HostKind.EMPTY: 0.0,
    }
    hosts = []
    for host_id, kind in enumerate(kinds):
        if kind is HostKind.EMPTY:
            hosts.append(
                HostSpec(host_id, kind, frozenset(), 0, frozenset(), frozenset(), 0.0)
            )
            continue
        services = _draw_subset(rng, params.num_services)
        os_id = rng.randrange(params.num_os)
        processes = _draw_subset(rng, params.num_processes)
        vulns = _draw_subset(rng, params.num_vulns)
        if kind is not HostKind.NORMAL:
            services, os_id, processes, vulns = _ensure_rootable(
                rng, exploits, privescs, services, os_id, processes, vulns
            )
        hosts.append(HostSpec(host_id, kind, services, os_id, processes, vulns, values[kind]))

    addresses = [(TARGET_SUBNET, i) for i in range(capacity)]
    rng.shuffle(addresses)
    address_map = {host.id: addresses[host.id] for host in hosts}

    return Scenario(
        params=params,
        hosts=tuple(hosts),
        exploits=exploits,
        privescs=privescs,
        subnets=(1, capacity),
        initial_address_map=address_map,
    )


def _draw_subset(rng: random.Random, n: int) -> frozenset[int]:
    """Uniform draw over all subsets of range(n), one bit per element."""
    if n <= 0:
        return frozenset()
    mask = rng.getrandbits(n)
    return frozenset(i for i in range(n) if mask >> i & 1)


def _ensure_rootable(rng, exploits, privescs, services, os_id, processes, vulns):
    """Patch a goal/decoy host's configuration until root access is reachable."""
    matching = [e for e in exploits if e.matches(services, vulns, os_id)]
    if not matching:
        e = exploits[rng.randrange(len(exploits))]
        services |= {e.required_service}
        vulns |= {e.required_vuln}
        os_id = e.required_os
        matching = [e for e in exploits if e.matches(services, vulns, os_id)]
    if not any(e.grants is AccessLevel.ROOT for e in matching):
        if privescs:
            if not any(p.required_process in processes for p in privescs):
                p = privescs[rng.randrange(len(privescs))]
                processes |= {p.required_process}
        else:
            root_exploits = [e for e in exploits if e.grants is AccessLevel.ROOT]
            if not root_exploits:
                raise ParameterError(
                    "no path to root access: no root-granting exploit and no "
                    "privilege escalations defined"
                )
            e = root_exploits[rng.randrange(len(root_exploits))]
            services |= {e.required_service}
            vulns |= {e.required_vuln}
            os_id = e.required_os
    return services, os_id, processes, vulns


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "params": asdict(scenario.params),
        "hosts": [
            {
                "id": h.id,
                "kind": h.kind.value,
                "services": sorted(h.services),
                "os": h.os,
                "processes": sorted(h.processes),
                "vulns": sorted(h.vulns),
                "value": h.value,
            }
            for h in scenario.hosts
        ],
        "exploits": [
            {
                "id": e.id,
                "required_service": e.required_service,
                "required_vuln": e.required_vuln,
                "required_os": e.required_os,
                "grants": e.grants.name.lower(),
                "prob": e.prob,
            }
            for e in scenario.exploits
        ],
        "privescs": [
            {"id": p.id, "required_process": p.required_process, "prob": p.prob}
            for p in scenario.privescs
        ],
        "subnets": list(scenario.subnets),
        "address_map": [
            [host_id, subnet, index]
            for host_id, (subnet, index) in sorted(scenario.initial_address_map.items())
        ],
    }


def scenario_from_dict(data: dict) -> Scenario:
    return Scenario(
        params=GeneratorParams(**data["params"]),
        hosts=tuple(
            HostSpec(
                id=h["id"],
                kind=HostKind(h["kind"]),
                services=frozenset(h["services"]),
                os=h["os"],
                processes=frozenset(h["processes"]),
                vulns=frozenset(h["vulns"]),
                value=h["value"],
            )
            for h in data["hosts"]
        ),
        exploits=tuple(
            ExploitDef(
                id=e["id"],
                required_service=e["required_service"],
                required_vuln=e["required_vuln"],
                required_os=e["required_os"],
                grants=AccessLevel[e["grants"].upper()],
                prob=e["prob"],
            )
            for e in data["exploits"]
        ),
        privescs=tuple(
            PrivEscDef(id=p["id"], required_process=p["required_process"], prob=p["prob"])
            for p in data["privescs"]
        ),
        subnets=tuple(data["subnets"]),
        initial_address_map={
            host_id: (subnet, index) for host_id, subnet, index in data["address_map"]
        },
    )


def scenario_to_json(scenario: Scenario) -> str:
    """Canonical single-line JSON (sorted keys) for golden files and replay."""
    return json.dumps(scenario_to_dict(scenario), sort_keys=True, separators=(",", ":"))


def scenario_from_json(text: str) -> Scenario:
    return scenario_from_dict(json.loads(text))
