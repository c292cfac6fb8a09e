"""Scripted attacker policies.

Three phase machines:

* careful: scan every discovered host fully, then attack chosen hosts with
  the best matching exploit.
* standard: scan and attack one host at a time, vertically.
* aggressive: never scan beyond the subnet; sweep one random exploit or
  privilege escalation across all known addresses in random order.

Agents know their own toolkit (the exploit and privilege-escalation
definitions) but nothing about any host until they observe it, and they
address hosts purely by network address, so an address mutation silently
invalidates their beliefs. Mutation is inferred only from observations: a
connection failure on a known address, a scan that contradicts an earlier
one, or a subnet scan listing a different address set.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .engine import Action, ActionKind, Observation
from .scenario import AccessLevel, Address, Scenario

AGENT_KINDS = ("careful", "standard", "aggressive")

_SCAN_REPLIES = (
    ActionKind.SERVICE_SCAN,
    ActionKind.OS_SCAN,
    ActionKind.VULN_SCAN,
    ActionKind.PROCESS_SCAN,
)


@dataclass
class HostBelief:
    """What the agent thinks sits at one address; fields stay None until scanned."""

    services: frozenset[int] | None = None
    os: int | None = None
    vulns: frozenset[int] | None = None
    processes: frozenset[int] | None = None
    access: AccessLevel = AccessLevel.NONE


@dataclass
class Knowledge:
    """Observation-derived world view; the only state agents may act on."""

    addresses: list[Address] = field(default_factory=list)
    beliefs: dict[Address, HostBelief] = field(default_factory=dict)
    failed: set[tuple[Address, ActionKind, int]] = field(default_factory=set)

    def belief(self, address: Address) -> HostBelief:
        return self.beliefs.setdefault(address, HostBelief())

    def clear(self) -> None:
        self.addresses.clear()
        self.beliefs.clear()
        self.failed.clear()


class ScriptedAgent:
    """Shared toolkit access, belief bookkeeping, and attack selection."""

    kind = "scripted"

    def __init__(self, scenario: Scenario, rng: random.Random):
        self.exploits = scenario.exploits
        self.privescs = scenario.privescs
        self.rng = rng
        self.knowledge = Knowledge()
        self.resets = 0  # completed knowledge wipes after detected mutations

    def next_action(self) -> Action:
        raise NotImplementedError

    def observe(self, action: Action, obs: Observation) -> None:
        raise NotImplementedError

    def _scan_mismatch(self, belief: HostBelief, kind: ActionKind, obs: Observation) -> bool:
        if kind is ActionKind.SERVICE_SCAN:
            return belief.services is not None and belief.services != obs.services
        if kind is ActionKind.OS_SCAN:
            return belief.os is not None and belief.os != obs.os
        if kind is ActionKind.VULN_SCAN:
            return belief.vulns is not None and belief.vulns != obs.vulns
        if kind is ActionKind.PROCESS_SCAN:
            return belief.processes is not None and belief.processes != obs.processes
        return False

    def _ingest_scan(self, belief: HostBelief, kind: ActionKind, obs: Observation) -> None:
        if kind is ActionKind.SERVICE_SCAN:
            belief.services = obs.services
        elif kind is ActionKind.OS_SCAN:
            belief.os = obs.os
        elif kind is ActionKind.VULN_SCAN:
            belief.vulns = obs.vulns
        elif kind is ActionKind.PROCESS_SCAN:
            belief.processes = obs.processes

    def _best_exploit(self, address: Address):
        """Untried exploit matching the believed configuration; root-granting
        first, then lowest id."""
        belief = self.knowledge.beliefs.get(address)
        if (
            belief is None
            or belief.services is None
            or belief.vulns is None
            or belief.os is None
        ):
            return None
        candidates = [
            e
            for e in self.exploits
            if (address, ActionKind.EXPLOIT, e.id) not in self.knowledge.failed
            and e.matches(belief.services, belief.vulns, belief.os)
        ]
        if not candidates:
            return None
        return min(candidates, key=lambda e: (-int(e.grants), e.id))

    def _untried_privesc(self, address: Address):
        belief = self.knowledge.beliefs.get(address)
        if belief is None or belief.processes is None:
            return None
        candidates = [
            p
            for p in self.privescs
            if (address, ActionKind.PRIVESC, p.id) not in self.knowledge.failed
            and p.required_process in belief.processes
        ]
        return min(candidates, key=lambda p: p.id) if candidates else None

    def _record_attack_reply(self, action: Action, obs: Observation) -> AccessLevel | None:
        """Update beliefs and the failed-attempt set; return gained access."""
        if action.kind is ActionKind.EXPLOIT:
            if obs.success:
                belief = self.knowledge.belief(action.target)
                belief.access = max(belief.access, obs.access_gained)
                return obs.access_gained
            self.knowledge.failed.add((action.target, ActionKind.EXPLOIT, action.exploit_id))
        elif action.kind is ActionKind.PRIVESC:
            if obs.success:
                self.knowledge.belief(action.target).access = AccessLevel.ROOT
                return obs.access_gained
            self.knowledge.failed.add((action.target, ActionKind.PRIVESC, action.privesc_id))
        return None


class CarefulAgent(ScriptedAgent):
    """Scan everything, then attack: subnet scan plus service, vulnerability
    and OS scans on every host before the first exploit. Process scans are
    deferred until a host is at user access. Detected mutation restarts the
    whole scan phase."""

    kind = "careful"
    SCAN_KINDS = (ActionKind.SERVICE_SCAN, ActionKind.VULN_SCAN, ActionKind.OS_SCAN)

    def __init__(self, scenario: Scenario, rng: random.Random):
        super().__init__(scenario, rng)
        self.need_subnet = True
        self.scanning = True
        self.scan_queue: deque[tuple[ActionKind, Address]] = deque()
        self.pending: deque[Action] = deque()

    def next_action(self) -> Action:
        if self.pending:
            return self.pending.popleft()
        if self.scanning:
            if self.need_subnet:
                return Action.subnet_scan()
            if self.scan_queue:
                kind, address = self.scan_queue.popleft()
                return Action(kind, address)
            self.scanning = False
        choice = self._pick_attack()
        if choice is not None:
            return choice
        # Nothing attackable under current knowledge: rescan everything but
        # keep the attempt memory so failed pairs are not retried.
        self.scanning = True
        self.need_subnet = True
        return Action.subnet_scan()

    def _pick_attack(self) -> Action | None:
        options = []
        for address in self.knowledge.addresses:
            belief = self.knowledge.beliefs.get(address)
            if belief is None:
                continue
            if belief.access is AccessLevel.NONE:
                exploit = self._best_exploit(address)
                if exploit is not None:
                    options.append(Action.exploit(address, exploit.id))
            elif belief.access is AccessLevel.USER:
                if belief.processes is None:
                    options.append(Action.process_scan(address))
                else:
                    privesc = self._untried_privesc(address)
                    if privesc is not None:
                        options.append(Action.privesc(address, privesc.id))
        if not options:
            return None
        return options[self.rng.randrange(len(options))]

    def observe(self, action: Action, obs: Observation) -> None:
        kind = action.kind
        if kind is ActionKind.SUBNET_SCAN:
            discovered = list(obs.discovered_addresses)
            if self.knowledge.addresses and set(discovered) != set(self.knowledge.addresses):
                self._mtd_reset()
            self.knowledge.addresses = discovered
            self.need_subnet = False
            self.scanning = True
            self.scan_queue = deque(
                (scan_kind, address)
                for address in discovered
                for scan_kind in self.SCAN_KINDS
            )
            return
        if obs.connection_failed:
            self._mtd_reset()
            self.need_subnet = True
            self.scanning = True
            return
        if kind in _SCAN_REPLIES:
            belief = self.knowledge.belief(action.target)
            if self._scan_mismatch(belief, kind, obs):
                self._mtd_reset()
                self.need_subnet = True
                self.scanning = True
                return
            self._ingest_scan(belief, kind, obs)
            return
        gained = self._record_attack_reply(action, obs)
        if gained is AccessLevel.ROOT:
            self.pending.append(Action.wiretap(action.target))
        elif gained is AccessLevel.USER:
            self.pending.append(Action.process_scan(action.target))
        # wiretap replies carry no knowledge

    def _mtd_reset(self) -> None:
        self.resets += 1
        self.knowledge.clear()
        self.scan_queue.clear()
        self.pending.clear()


class StandardAgent(ScriptedAgent):
    """One host at a time: pick a random known host, scan only it, then
    attack it until success or until no untried exploit or escalation is
    left, then move on. Detected mutation restarts from the subnet scan."""

    kind = "standard"
    SCAN_KINDS = (
        ActionKind.SERVICE_SCAN,
        ActionKind.OS_SCAN,
        ActionKind.VULN_SCAN,
        ActionKind.PROCESS_SCAN,
    )

    def __init__(self, scenario: Scenario, rng: random.Random):
        super().__init__(scenario, rng)
        self.need_subnet = True
        self.focus: Address | None = None
        self.scan_queue: deque[ActionKind] = deque()
        self.pending: deque[Action] = deque()
        self.exhausted: set[Address] = set()

    def next_action(self) -> Action:
        if self.pending:
            return self.pending.popleft()
        if self.need_subnet:
            return Action.subnet_scan()
        while True:
            if self.focus is None:
                candidates = []
                for address in self.knowledge.addresses:
                    if address in self.exhausted:
                        continue
                    belief = self.knowledge.beliefs.get(address)
                    if belief is not None and belief.access is AccessLevel.ROOT:
                        continue
                    candidates.append(address)
                if not candidates:
                    # Everything exhausted or owned: re-discover, which also
                    # gives mutation a chance to be noticed.
                    return Action.subnet_scan()
                self.focus = candidates[self.rng.randrange(len(candidates))]
                self.scan_queue = deque(self.SCAN_KINDS)
            if self.scan_queue:
                return Action(self.scan_queue.popleft(), self.focus)
            belief = self.knowledge.belief(self.focus)
            if belief.access is AccessLevel.NONE:
                exploit = self._best_exploit(self.focus)
                if exploit is not None:
                    return Action.exploit(self.focus, exploit.id)
            elif belief.access is AccessLevel.USER:
                privesc = self._untried_privesc(self.focus)
                if privesc is not None:
                    return Action.privesc(self.focus, privesc.id)
            else:
                return Action.wiretap(self.focus)
            self.exhausted.add(self.focus)
            self.focus = None

    def observe(self, action: Action, obs: Observation) -> None:
        kind = action.kind
        if kind is ActionKind.SUBNET_SCAN:
            discovered = list(obs.discovered_addresses)
            if self.knowledge.addresses and set(discovered) != set(self.knowledge.addresses):
                self._mtd_reset()
            self.knowledge.addresses = discovered
            self.need_subnet = False
            return
        if obs.connection_failed:
            self._mtd_reset()
            self.need_subnet = True
            return
        if kind in _SCAN_REPLIES:
            belief = self.knowledge.belief(action.target)
            if self._scan_mismatch(belief, kind, obs):
                self._mtd_reset()
                self.need_subnet = True
                return
            self._ingest_scan(belief, kind, obs)
            return
        if kind is ActionKind.WIRETAP:
            self.focus = None
            return
        gained = self._record_attack_reply(action, obs)
        if gained is AccessLevel.ROOT:
            self.pending.append(Action.wiretap(action.target))
        elif gained is AccessLevel.USER:
            self.focus = None  # success: move to a new host, come back later

    def _mtd_reset(self) -> None:
        self.resets += 1
        self.knowledge.clear()
        self.exhausted.clear()
        self.scan_queue.clear()
        self.pending.clear()
        self.focus = None


class AggressiveAgent(ScriptedAgent):
    """No host scans at all: after one subnet scan, repeatedly pick a random
    exploit or escalation and sweep it over every known address in a random
    order, wiretapping after each success. Detected mutation forces a fresh
    subnet scan; the chosen action is kept and the sweep restarts."""

    kind = "aggressive"

    def __init__(self, scenario: Scenario, rng: random.Random):
        super().__init__(scenario, rng)
        self.need_subnet = True
        self.catalog = [(ActionKind.EXPLOIT, e.id) for e in self.exploits]
        self.catalog += [(ActionKind.PRIVESC, p.id) for p in self.privescs]
        self.current: tuple[ActionKind, int] | None = None
        self.sweep: deque[Address] = deque()
        self.pending_wiretap: Address | None = None

    def next_action(self) -> Action:
        if self.need_subnet:
            return Action.subnet_scan()
        if self.pending_wiretap is not None:
            return Action.wiretap(self.pending_wiretap)
        while True:
            if self.current is None:
                viable = [spec for spec in self.catalog if self._has_untried(spec)]
                if not viable:
                    # Every pair tried and failed: re-discover and retry; only
                    # a mutation can make progress possible again.
                    return Action.subnet_scan()
                self.current = viable[self.rng.randrange(len(viable))]
                self._new_sweep()
            kind, ident = self.current
            while self.sweep:
                address = self.sweep.popleft()
                if (address, kind, ident) in self.knowledge.failed:
                    continue
                if kind is ActionKind.EXPLOIT:
                    return Action.exploit(address, ident)
                return Action.privesc(address, ident)
            self.current = None

    def _has_untried(self, spec: tuple[ActionKind, int]) -> bool:
        kind, ident = spec
        return any(
            (address, kind, ident) not in self.knowledge.failed
            for address in self.knowledge.addresses
        )

    def _new_sweep(self) -> None:
        order = list(self.knowledge.addresses)
        self.rng.shuffle(order)
        self.sweep = deque(order)

    def observe(self, action: Action, obs: Observation) -> None:
        kind = action.kind
        if kind is ActionKind.SUBNET_SCAN:
            discovered = list(obs.discovered_addresses)
            if self.knowledge.addresses and set(discovered) != set(self.knowledge.addresses):
                self._mtd_reset()
            self.knowledge.addresses = discovered
            self.need_subnet = False
            if self.current is not None:
                self._new_sweep()
            return
        if obs.connection_failed:
            self._mtd_reset()
            self.need_subnet = True
            return
        if kind is ActionKind.WIRETAP:
            self.pending_wiretap = None
            return
        if obs.success:
            self.pending_wiretap = action.target
            self.current = None
            self.sweep.clear()
        else:
            self._record_attack_reply(action, obs)

    def _mtd_reset(self) -> None:
        # The chosen action survives; the sweep restarts over fresh addresses.
        self.resets += 1
        self.knowledge.clear()
        self.sweep.clear()
        self.pending_wiretap = None


_AGENT_CLASSES = {cls.kind: cls for cls in (CarefulAgent, StandardAgent, AggressiveAgent)}


def make_agent(kind: str, scenario: Scenario, rng: random.Random) -> ScriptedAgent:
    try:
        cls = _AGENT_CLASSES[kind]
    except KeyError:
        raise ValueError(
            f"unknown agent kind {kind!r}; expected one of: {', '.join(AGENT_KINDS)}"
        ) from None
    return cls(scenario, rng)
