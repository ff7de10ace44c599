"""Event-calendar simulation kernel.

A small, deterministic discrete-event engine built around the classic
entity lifecycle: every entity is in exactly one of five states, and each
state maps to exactly one kernel list:

    Ready / Active      -> current event list (CEL)
    TimeDelayed         -> future event list (FEL, a min-heap)
    ConditionDelayed    -> delay list (DL)
    Dormant             -> user-managed list (UML)

A run alternates two phases: the clock-update phase pops *all* events
sharing the earliest due time from the FEL onto the CEL, and the
entity-movement phase drains the CEL through model handlers, re-testing
condition guards until no more entities wake at the current instant.
Simultaneous events execute FIFO by insertion sequence, which makes a run
a pure function of its initial schedule and handler behavior.

The kernel is single-threaded; run independent instances on separate
threads or processes for parallelism.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Mapping, NamedTuple


class EntityState(Enum):
    READY = "ready"
    ACTIVE = "active"
    TIME_DELAYED = "time_delayed"
    CONDITION_DELAYED = "condition_delayed"
    DORMANT = "dormant"


class KernelError(Exception):
    """Base class for kernel usage errors."""


class PastTime(KernelError):
    """Schedule target lies before the current clock."""


class DuplicateSchedule(KernelError):
    """Entity is already waiting on the future event list."""


class EmptyCalendar(KernelError):
    """Clock update requested with no pending events."""


class InvalidState(KernelError):
    """Entity is not in the state the operation requires."""


class HandlerFailure(KernelError):
    """A model handler raised; carries the offending entity id."""

    def __init__(self, entity_id: int, cause: BaseException) -> None:
        super().__init__(f"handler failed for entity {entity_id}: {cause!r}")
        self.entity_id = entity_id


class KernelInvariantError(KernelError):
    """Internal consistency check failed; indicates a kernel or model bug."""


@dataclass
class Entity:
    """A dynamic unit flowing through the model.

    ``kind`` selects the handler from the model's callback table; ``payload``
    carries model attributes the kernel never inspects.
    """

    id: int
    kind: str
    payload: Any = None
    state: EntityState = EntityState.DORMANT
    alive: bool = True


@dataclass
class ConditionGuard:
    """A predicate an entity waits on.  Must not mutate kernel state."""

    condition_id: str
    predicate: Callable[[], bool]


class EventHandle(NamedTuple):
    due: float
    sequence: int
    entity_id: int


@dataclass
class RunReport:
    final_clock: float
    events_executed: int
    entities_processed: int
    remaining: dict[str, int] = field(default_factory=dict)


Handler = Callable[["Engine", Entity], None]


class Engine:
    """One simulation instance: clock, lists, and the phase loop."""

    def __init__(self, record_trace: bool = False, check_every: int = 0) -> None:
        self.clock: float = 0.0
        self._fel: list[tuple[float, int, Entity]] = []
        self._cel: deque[Entity] = deque()
        self._dl: list[tuple[ConditionGuard, Entity]] = []
        self._uml: dict[int, Entity] = {}
        self._seq = 0
        self._next_id = 0
        self._active: Entity | None = None
        self._created = 0
        self._terminated = 0
        self._fel_ids: set[int] = set()
        self._last_dequeued_due = 0.0
        self.events_executed = 0
        self.entities_processed = 0
        self.record_trace = record_trace
        self.trace: list[tuple[float, int, str]] = []
        # Full state-list audit every N phases (0 = only on demand).
        self.check_every = check_every
        self._phase_count = 0

    # -- entity lifecycle ------------------------------------------------

    def create(self, kind: str, payload: Any = None) -> Entity:
        """Create a dormant entity; schedule or unpark it to set it moving."""
        ent = Entity(self._next_id, kind, payload)
        self._next_id += 1
        self._created += 1
        self._uml[ent.id] = ent
        return ent

    def terminate(self, entity: Entity) -> None:
        """Remove the entity from the model for good."""
        if not entity.alive:
            raise InvalidState(f"entity {entity.id} already terminated")
        self._detach(entity)
        entity.state = EntityState.DORMANT
        entity.alive = False
        self._terminated += 1

    def _detach(self, entity: Entity) -> None:
        """Pull the entity out of whichever list currently holds it."""
        st = entity.state
        if st == EntityState.TIME_DELAYED:
            self._fel = [item for item in self._fel if item[2] is not entity]
            heapq.heapify(self._fel)
            self._fel_ids.discard(entity.id)
        elif st == EntityState.READY:
            self._cel.remove(entity)
        elif st == EntityState.CONDITION_DELAYED:
            self._dl = [(g, e) for g, e in self._dl if e is not entity]
        elif st == EntityState.DORMANT:
            self._uml.pop(entity.id, None)
        elif st == EntityState.ACTIVE:
            self._active = None

    # -- scheduling operations --------------------------------------------

    def schedule(self, entity: Entity, due: float) -> EventHandle:
        """Put the entity on the FEL to wake at ``due``."""
        if not entity.alive:
            raise InvalidState(f"entity {entity.id} was terminated")
        if due < self.clock:
            raise PastTime(f"due {due} < clock {self.clock}")
        if entity.id in self._fel_ids:
            raise DuplicateSchedule(f"entity {entity.id} already time-delayed")
        self._detach(entity)
        entity.state = EntityState.TIME_DELAYED
        self._seq += 1
        heapq.heappush(self._fel, (due, self._seq, entity))
        self._fel_ids.add(entity.id)
        return EventHandle(due, self._seq, entity.id)

    def delay_until(self, entity: Entity, guard: ConditionGuard) -> None:
        """Park the active entity until the guard's predicate turns true."""
        if entity.state != EntityState.ACTIVE:
            raise InvalidState(f"delay_until needs an active entity, not {entity.state}")
        self._active = None
        entity.state = EntityState.CONDITION_DELAYED
        self._dl.append((guard, entity))

    def park(self, entity: Entity) -> None:
        """Move the active entity to the user-managed (dormant) list."""
        if entity.state != EntityState.ACTIVE:
            raise InvalidState(f"park needs an active entity, not {entity.state}")
        self._active = None
        entity.state = EntityState.DORMANT
        self._uml[entity.id] = entity

    def unpark(self, entity: Entity) -> None:
        """Wake a dormant entity onto the CEL at the current clock."""
        if entity.state != EntityState.DORMANT or entity.id not in self._uml:
            raise InvalidState(f"unpark needs a dormant entity, not {entity.state}")
        del self._uml[entity.id]
        entity.state = EntityState.READY
        self._cel.append(entity)

    # -- phases ------------------------------------------------------------

    def clock_update_phase(self) -> float:
        """Advance the clock to the earliest due time and stage its events.

        Every event sharing that due time moves to the CEL in insertion
        order, so simultaneous events execute as one batch.
        """
        if not self._fel:
            raise EmptyCalendar("future event list is empty")
        due = self._fel[0][0]
        if due < self._last_dequeued_due:
            raise KernelInvariantError(
                f"FEL dequeue order regressed: {due} after {self._last_dequeued_due}"
            )
        self._last_dequeued_due = due
        self.clock = due
        while self._fel and self._fel[0][0] == due:
            _, _, ent = heapq.heappop(self._fel)
            self._fel_ids.discard(ent.id)
            ent.state = EntityState.READY
            self._cel.append(ent)
            self.events_executed += 1
        return self.clock

    def entity_movement_phase(self, handlers: Mapping[str, Handler]) -> int:
        """Drain the CEL through handlers, waking satisfied guards as we go.

        After the CEL empties, all condition guards are re-tested; entities
        whose guard holds join the CEL and run at the same clock.  The phase
        ends only when no guard fires, so condition chains resolve within
        one instant.  A handler that returns while its entity is still
        active has finished that entity's life: the kernel terminates it.
        """
        processed = 0
        while True:
            while self._cel:
                ent = self._cel.popleft()
                ent.state = EntityState.ACTIVE
                self._active = ent
                if self.record_trace:
                    self.trace.append((self.clock, ent.id, ent.kind))
                try:
                    handlers[ent.kind](self, ent)
                except Exception as exc:
                    raise HandlerFailure(ent.id, exc) from exc
                if ent.state == EntityState.ACTIVE:
                    self.terminate(ent)
                processed += 1
            released = False
            remaining: list[tuple[ConditionGuard, Entity]] = []
            for guard, ent in self._dl:
                if guard.predicate():
                    ent.state = EntityState.READY
                    self._cel.append(ent)
                    released = True
                else:
                    remaining.append((guard, ent))
            self._dl = remaining
            if not released:
                break
        self.entities_processed += processed
        return processed

    def run(self, until: float, handlers: Mapping[str, Handler]) -> RunReport:
        """Alternate clock updates and entity movement until done.

        Stops when the FEL empties (normal termination) or when the next
        event would push the clock past ``until``; events due exactly at
        ``until`` still execute.
        """
        while self._fel and self._fel[0][0] <= until:
            self.clock_update_phase()
            self.entity_movement_phase(handlers)
            self._phase_count += 1
            if self.check_every and self._phase_count % self.check_every == 0:
                self.check_invariants()
        return RunReport(
            final_clock=self.clock,
            events_executed=self.events_executed,
            entities_processed=self.entities_processed,
            remaining=self.list_sizes(),
        )

    # -- introspection and invariants ---------------------------------------

    def list_sizes(self) -> dict[str, int]:
        return {
            "fel": len(self._fel),
            "cel": len(self._cel),
            "dl": len(self._dl),
            "uml": len(self._uml),
        }

    def check_invariants(self) -> None:
        """Audit state-list consistency and entity conservation.

        O(total entities); the engine also enforces the cheap invariants
        (clock monotone, FEL dequeue order) inline on every phase.
        """
        for _, _, ent in self._fel:
            if ent.state != EntityState.TIME_DELAYED:
                raise KernelInvariantError(f"entity {ent.id} on FEL in state {ent.state}")
        for ent in self._cel:
            if ent.state not in (EntityState.READY, EntityState.ACTIVE):
                raise KernelInvariantError(f"entity {ent.id} on CEL in state {ent.state}")
        for _, ent in self._dl:
            if ent.state != EntityState.CONDITION_DELAYED:
                raise KernelInvariantError(f"entity {ent.id} on DL in state {ent.state}")
        for ent in self._uml.values():
            if ent.state != EntityState.DORMANT:
                raise KernelInvariantError(f"entity {ent.id} on UML in state {ent.state}")
        present = len(self._fel) + len(self._cel) + len(self._dl) + len(self._uml)
        if self._active is not None:
            present += 1
        if self._created - self._terminated != present:
            raise KernelInvariantError(
                f"entity conservation broken: created={self._created} "
                f"terminated={self._terminated} present={present}"
            )
