"""Three-stage supply chain model: stores, distribution centers, suppliers.

Stores face compound-Poisson customer demand (exponential inter-arrival
times, triangular quantities) and serve it immediately from on-hand
stock; what cannot be served is lost, not backordered.  At the end of
every working day each store reviews its (s, S) position and may order
from its home distribution center; each distribution center then reviews
and may order from the supplier offering the shortest lead time.
Suppliers hold no inventory and always deliver in full after their lead
time.  Orders placed to a distribution center are cut to available stock,
the shortfall recorded as lost at the node that failed to serve.

All node activity runs on a working calendar of 6 days per week, 8 hours
per day; the simulation clock counts working hours only, so off days
simply do not exist on the clock.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .config import DAYS_PER_WEEK, HOURS_PER_DAY, ScenarioConfig
from .des import Engine, Entity, RunReport
from .policy import ItemInventory, review
from .streams import StreamHub


class ModelError(Exception):
    """Base class for model-level failures."""


class NoSupplier(ModelError):
    """A distribution center has no candidate supplier for an item."""


class CapacityExceeded(ModelError):
    """A shipment pushed on-hand stock above the order-up-to level."""


class ConservationError(ModelError):
    """Weekly inventory balance check failed; carries full diagnostics."""


class RunStopped(ModelError):
    """Raised by a day callback to cancel a run at a day boundary."""


@dataclass(frozen=True)
class WorkCalendar:
    days_per_week: int = DAYS_PER_WEEK
    hours_per_day: int = HOURS_PER_DAY

    def day_of(self, clock: float) -> int:
        return int(clock // self.hours_per_day)

    def day_start(self, day: int) -> float:
        return day * self.hours_per_day


@dataclass
class Order:
    """A replenishment request placed by ``origin`` to ``destination``."""

    id: int
    origin: str
    destination: str
    item: int
    quantity_requested: int
    placed_at: float
    quantity_delivered: int = 0
    quantity_lost: int = 0
    received_at: float | None = None


@dataclass
class NodeStats:
    """Counters and logs for demand received *at* one node."""

    orders_received: int = 0
    orders_fully_satisfied: int = 0
    total_quantity_ordered: int = 0
    total_quantity_lost: int = 0
    arrival_times: list[float] = field(default_factory=list)
    ordered_quantities: list[int] = field(default_factory=list)
    received_quantities: list[int] = field(default_factory=list)
    waiting_times: list[float] = field(default_factory=list)


def fill_rate_orders(stats: NodeStats) -> float:
    """Fraction of orders satisfied in full; vacuously 1 with no orders."""
    if stats.orders_received == 0:
        return 1.0
    return stats.orders_fully_satisfied / stats.orders_received


def fill_rate_quantity(stats: NodeStats) -> float:
    """Lost quantity as a fraction of ordered quantity; 0 with nothing ordered."""
    if stats.total_quantity_ordered == 0:
        return 0.0
    return stats.total_quantity_lost / stats.total_quantity_ordered


@dataclass
class Slot:
    """One (node, item) inventory slot plus its bookkeeping."""

    inv: ItemInventory
    demand_today: int = 0
    received_total: int = 0
    delivered_total: int = 0
    initial_on_hand: int = 0
    oh_area: float = 0.0
    oh_mark: float = 0.0


@dataclass
class Node:
    id: str
    kind: str  # "store" | "dc" | "supplier"
    index: int
    upstream: list[str] = field(default_factory=list)
    slots: dict[int, Slot] = field(default_factory=dict)


class Network:
    """A built supply chain bound to one engine and one stream hub."""

    def __init__(self, config: ScenarioConfig, hub: StreamHub) -> None:
        config.validate()
        self.config = config
        self.hub = hub
        self.calendar = WorkCalendar()
        self.engine = Engine()
        self.nodes: dict[str, Node] = {}
        self.stores: list[Node] = []
        self.dcs: list[Node] = []
        self.suppliers: list[Node] = []
        self.home_dc: dict[str, str] = {}
        self.stats: dict[str, NodeStats] = {}
        self.open_orders: dict[int, Order] = {}
        self.closed_orders = 0
        self._next_order_id = 0
        self._todays_store_orders: list[Order] = []
        self._todays_dc_orders: list[Order] = []
        self.stats_start: float = config.warmup_days * HOURS_PER_DAY
        self.day_callback: Callable[[int], None] | None = None
        # When set to a list, every daily review appends
        # (day, node_id, item, ReviewResult) for trace-level validation.
        self.review_log: list | None = None
        self._handlers = {
            "arrival": self._on_arrival,
            "day_end": self._on_day_end,
            "shipment": self._on_shipment,
        }
        self._build()

    # -- construction -----------------------------------------------------

    def _build(self) -> None:
        cfg = self.config
        for i in range(cfg.stores):
            node = Node(f"store-{i}", "store", i)
            self.nodes[node.id] = node
            self.stores.append(node)
        for i in range(cfg.distribution_centers):
            node = Node(f"dc-{i}", "dc", i)
            self.nodes[node.id] = node
            self.dcs.append(node)
        for i in range(cfg.suppliers):
            node = Node(f"sup-{i}", "supplier", i)
            self.nodes[node.id] = node
            self.suppliers.append(node)

        supplier_ids = [s.id for s in self.suppliers]
        for store in self.stores:
            dc = self.dcs[store.index % len(self.dcs)]
            self.home_dc[store.id] = dc.id
            store.upstream = [dc.id]
            for item in range(cfg.items):
                store.slots[item] = self._make_slot(cfg.store_capacity, cfg.lead_time_days(item))
        for dc in self.dcs:
            dc.upstream = list(supplier_ids)
            for item in range(cfg.items):
                lead = min(
                    cfg.supplier_lead_time(s.index, item) for s in self.suppliers
                )
                dc.slots[item] = self._make_slot(cfg.dc_capacity, lead)
        for node in self.nodes.values():
            self.stats[node.id] = NodeStats()

        # Seed the event calendar: one perpetual arrival entity per
        # (store, item) and the daily review ticker.
        if cfg.demand_model != "none":
            for store in self.stores:
                for item in range(cfg.items):
                    ent = self.engine.create("arrival", (store.id, item))
                    self.engine.schedule(ent, self._first_arrival(store.id, item))
        ticker = self.engine.create("day_end", None)
        self.engine.schedule(ticker, float(HOURS_PER_DAY))

    def _make_slot(self, capacity: int, lead: int) -> Slot:
        inv = ItemInventory(
            on_hand=capacity,
            order_up_to=capacity,
            lead_time=lead,
            forecast_window=self.config.forecast_window,
            safety_window=self.config.safety_window,
        )
        return Slot(inv=inv, initial_on_hand=capacity)

    def _first_arrival(self, store_id: str, item: int) -> float:
        mean = self.config.interarrival_hours(item)
        if self.config.demand_model == "deterministic":
            return mean / 2.0
        return self.hub.stream(store_id, item, "interarrival").interarrival(mean)

    def _next_interarrival(self, store_id: str, item: int) -> float:
        mean = self.config.interarrival_hours(item)
        if self.config.demand_model == "deterministic":
            return mean
        return self.hub.stream(store_id, item, "interarrival").interarrival(mean)

    def _demand_quantity(self, store_id: str, item: int) -> int:
        if self.config.fixed_demand_quantity is not None:
            return self.config.fixed_demand_quantity
        lo, mode, hi = self.config.quantity_support(item)
        if self.config.demand_model == "deterministic":
            return mode
        return self.hub.stream(store_id, item, "quantity").demand_quantity(lo, mode, hi)

    # -- on-hand time average ----------------------------------------------

    def _integrate(self, slot: Slot) -> None:
        now = self.engine.clock
        start = max(slot.oh_mark, self.stats_start)
        if now > start:
            slot.oh_area += slot.inv.on_hand * (now - start)
        slot.oh_mark = now

    def avg_on_hand(self, node: Node, horizon: float) -> float:
        """Time-averaged total on-hand stock at the node over the stats window."""
        span = horizon - self.stats_start
        if span <= 0:
            return 0.0
        total = 0.0
        for slot in node.slots.values():
            area = slot.oh_area
            if horizon > max(slot.oh_mark, self.stats_start):
                area += slot.inv.on_hand * (horizon - max(slot.oh_mark, self.stats_start))
            total += area
        return total / span

    # -- customer demand -----------------------------------------------------

    def _on_arrival(self, engine: Engine, ent: Entity) -> None:
        store_id, item = ent.payload
        qty = self._demand_quantity(store_id, item)
        self.on_customer_arrival(store_id, item, qty)
        engine.schedule(ent, engine.clock + self._next_interarrival(store_id, item))

    def on_customer_arrival(self, store_id: str, item: int, qty: int) -> None:
        """Serve a customer immediately from stock; unmet demand is lost."""
        slot = self.nodes[store_id].slots[item]
        delivered = min(qty, slot.inv.on_hand)
        self._integrate(slot)
        slot.inv.on_hand -= delivered
        slot.delivered_total += delivered
        slot.demand_today += qty
        if self.engine.clock >= self.stats_start:
            st = self.stats[store_id]
            st.orders_received += 1
            st.orders_fully_satisfied += int(delivered == qty)
            st.total_quantity_ordered += qty
            st.total_quantity_lost += qty - delivered
            st.arrival_times.append(self.engine.clock)
            st.ordered_quantities.append(qty)
            st.received_quantities.append(delivered)
            st.waiting_times.append(0.0)

    # -- daily review cascade ---------------------------------------------

    def _on_day_end(self, engine: Engine, ent: Entity) -> None:
        day = self.calendar.day_of(engine.clock) - 1
        self.end_of_day(day)
        if self.day_callback is not None:
            self.day_callback(day)
        engine.schedule(ent, engine.clock + HOURS_PER_DAY)

    def end_of_day(self, day: int) -> list[Order]:
        """Close the day's demand, run all reviews, place and fulfill orders.

        The sequence matters.  Store orders register as distribution-center
        demand for the same day and are physically cut to center stock
        *before* the center's own review: reviewing afterwards keeps the
        position topped up to exactly S, which is what makes the capacity
        bound on later arrivals provable (a lossy fulfillment after the
        review would leave the position above S by the lost amount).
        """
        self._todays_store_orders = []
        self._todays_dc_orders = []
        for store in self.stores:
            for item, slot in store.slots.items():
                slot.inv.daily_demand_history.append(slot.demand_today)
                slot.demand_today = 0
        for store in self.stores:
            dc = self.nodes[self.home_dc[store.id]]
            for item, slot in store.slots.items():
                result = review(slot.inv)
                if self.review_log is not None:
                    self.review_log.append((day, store.id, item, result))
                if result.order_quantity > 0:
                    self._place_order(store, dc, item, result.order_quantity)
        for order in self._todays_store_orders:
            self.fulfill_order(self.nodes[order.destination], order)
        for dc in self.dcs:
            for item, slot in dc.slots.items():
                slot.inv.daily_demand_history.append(slot.demand_today)
                slot.demand_today = 0
        for dc in self.dcs:
            for item, slot in dc.slots.items():
                result = review(slot.inv)
                if self.review_log is not None:
                    self.review_log.append((day, dc.id, item, result))
                if result.order_quantity > 0:
                    supplier = self.nodes[self.select_supplier(dc, item)]
                    self._place_order(dc, supplier, item, result.order_quantity)
        placed = self._todays_store_orders + self._todays_dc_orders
        for order in self._todays_dc_orders:
            self.fulfill_order(self.nodes[order.destination], order)
        if (day + 1) % self.calendar.days_per_week == 0:
            self.check_conservation(day)
        if self.config.warmup_days and day == self.config.warmup_days - 1:
            self._reset_stats()
        return placed

    def _place_order(self, origin: Node, destination: Node, item: int, qty: int) -> Order:
        order = Order(
            id=self._next_order_id,
            origin=origin.id,
            destination=destination.id,
            item=item,
            quantity_requested=qty,
            placed_at=self.engine.clock,
        )
        self._next_order_id += 1
        self.open_orders[order.id] = order
        origin.slots[item].inv.on_order += qty
        if destination.kind == "dc":
            dslot = destination.slots[item]
            dslot.inv.to_ship += qty
            dslot.demand_today += qty
            self._todays_store_orders.append(order)
        else:
            self._todays_dc_orders.append(order)
        return order

    def select_supplier(self, dc: Node, item: int) -> str:
        """Candidate supplier with the shortest lead time; first index wins ties."""
        if not dc.upstream:
            raise NoSupplier(f"{dc.id} has no candidate suppliers for item {item}")
        best_id = None
        best_lead = None
        for sup_id in dc.upstream:
            sup = self.nodes[sup_id]
            lead = self.config.supplier_lead_time(sup.index, item)
            if best_lead is None or lead < best_lead:
                best_id, best_lead = sup_id, lead
        return best_id

    def fulfill_order(self, source: Node, order: Order) -> None:
        """Cut the order to the source's stock and put the shipment in transit.

        Distribution centers ship what they hold and record the shortfall
        as lost; suppliers always ship in full.  The goods arrive at the
        origin after the source->origin lead time, in working days.
        """
        req = order.quantity_requested
        if source.kind == "dc":
            slot = source.slots[order.item]
            delivered = min(req, slot.inv.on_hand)
            self._integrate(slot)
            slot.inv.on_hand -= delivered
            slot.inv.to_ship -= req
            slot.delivered_total += delivered
            lead = self.config.lead_time_days(order.item)
        else:
            delivered = req
            lead = self.config.supplier_lead_time(source.index, order.item)
        order.quantity_delivered = delivered
        order.quantity_lost = req - delivered
        if self.engine.clock >= self.stats_start:
            st = self.stats[source.id]
            st.orders_received += 1
            st.orders_fully_satisfied += int(delivered == req)
            st.total_quantity_ordered += req
            st.total_quantity_lost += req - delivered
            st.arrival_times.append(order.placed_at)
            st.ordered_quantities.append(req)
            st.received_quantities.append(delivered)
        shipment = self.engine.create("shipment", order)
        self.engine.schedule(shipment, self.engine.clock + lead * HOURS_PER_DAY)

    def _on_shipment(self, engine: Engine, ent: Entity) -> None:
        order: Order = ent.payload
        self.receive_shipment(order)
        engine.terminate(ent)

    def receive_shipment(self, order: Order) -> None:
        slot = self.nodes[order.origin].slots[order.item]
        self._integrate(slot)
        slot.inv.on_hand += order.quantity_delivered
        slot.inv.on_order -= order.quantity_requested
        slot.received_total += order.quantity_delivered
        if slot.inv.on_hand > slot.inv.order_up_to:
            raise CapacityExceeded(
                f"{order.origin} item {order.item}: on-hand {slot.inv.on_hand} "
                f"exceeds capacity {slot.inv.order_up_to} after order {order.id}"
            )
        order.received_at = self.engine.clock
        if self.engine.clock >= self.stats_start:
            self.stats[order.destination].waiting_times.append(
                order.received_at - order.placed_at
            )
        del self.open_orders[order.id]
        self.closed_orders += 1

    # -- audits ---------------------------------------------------------------

    def check_conservation(self, day: int) -> None:
        """Verify on-hand = initial + received - delivered for every slot,
        and that the on-order/to-ship ledgers match open orders exactly."""
        on_order: dict[tuple[str, int], int] = {}
        for order in self.open_orders.values():
            key = (order.origin, order.item)
            on_order[key] = on_order.get(key, 0) + order.quantity_requested
        for node in self.stores + self.dcs:
            for item, slot in node.slots.items():
                expect = slot.initial_on_hand + slot.received_total - slot.delivered_total
                if slot.inv.on_hand != expect:
                    raise ConservationError(
                        f"day {day} {node.id} item {item}: on-hand {slot.inv.on_hand} "
                        f"!= {slot.initial_on_hand} + {slot.received_total} "
                        f"- {slot.delivered_total}"
                    )
                ledger = on_order.get((node.id, item), 0)
                if slot.inv.on_order != ledger:
                    raise ConservationError(
                        f"day {day} {node.id} item {item}: on-order {slot.inv.on_order} "
                        f"!= open-order ledger {ledger}"
                    )
                if slot.inv.to_ship != 0:
                    raise ConservationError(
                        f"day {day} {node.id} item {item}: to-ship {slot.inv.to_ship} "
                        f"nonzero between daily reviews"
                    )

    def _reset_stats(self) -> None:
        for node_id in self.stats:
            self.stats[node_id] = NodeStats()
        for node in self.stores + self.dcs:
            for slot in node.slots.values():
                slot.oh_area = 0.0
                slot.oh_mark = self.engine.clock

    # -- running ------------------------------------------------------------

    def run(self) -> RunReport:
        horizon = self.config.run_length_days * HOURS_PER_DAY
        return self.engine.run(horizon, self._handlers)

    def node_results(self, horizon: float | None = None) -> list[dict]:
        """Per-node result records for stores and distribution centers."""
        if horizon is None:
            horizon = self.config.run_length_days * HOURS_PER_DAY
        records = []
        for node in self.stores + self.dcs:
            st = self.stats[node.id]
            waits = st.waiting_times
            records.append(
                {
                    "node_id": node.id,
                    "node_kind": node.kind,
                    "orders_received": st.orders_received,
                    "orders_satisfied": st.orders_fully_satisfied,
                    "fill_rate_orders": fill_rate_orders(st),
                    "qty_ordered": st.total_quantity_ordered,
                    "qty_lost": st.total_quantity_lost,
                    "fill_rate_quantity": fill_rate_quantity(st),
                    "avg_on_hand": self.avg_on_hand(node, horizon),
                    "avg_waiting_hours": sum(waits) / len(waits) if waits else 0.0,
                }
            )
        return records


def build_network(config: ScenarioConfig, hub: StreamHub | None = None) -> Network:
    """Construct a network from a validated scenario.

    Counts, capacities, and lead times are checked up front
    (raising :class:`ConfigError` with the offending field); a fresh
    stream hub keyed by the scenario's master seed is created unless one
    is supplied (the experiment runner passes per-replication hubs).
    """
    if hub is None:
        hub = StreamHub(config.master_seed)
    return Network(config, hub)
