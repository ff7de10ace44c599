"""Independent day-stepped reference for the minimal deterministic chain.

No event engine: a plain per-day loop over a 1-store / 1-DC / 1-supplier /
1-item network with one fixed-quantity customer arrival per day.  Used to
cross-check the event-driven model trace for trace equality, so it must
not share any simulation code with the package beyond plain arithmetic.

Daily sequence mirrored here:
  1. the day's customer demand is served from store stock (excess lost);
  2. shipments placed ``lead_time`` days ago arrive (before reviews);
  3. the store closes its demand day and reviews; an order registers as
     distribution-center demand the same day and is immediately cut to
     center stock (shortfall lost at the center);
  4. the distribution center closes its day and reviews with that demand
     already reflected, then the supplier fulfills center orders in full.
"""

from dataclasses import dataclass, field
from statistics import fmean, stdev


@dataclass
class DayRow:
    day: int
    on_hand: int
    on_order: int
    position: int
    order_qty: int
    delivered: int
    lost: int


@dataclass
class _Stage:
    on_hand: int
    capacity: int
    on_order: int = 0
    to_ship: int = 0
    history: list = field(default_factory=list)
    inbound: dict = field(default_factory=dict)  # arrival day -> (qty, requested)


def _order_point(history, lead_time):
    if len(history) < lead_time + 1:
        return 0.0
    sums = [sum(history[j : j + lead_time]) for j in range(len(history) - lead_time + 1)]
    return stdev(sums) if len(sums) > 1 else 0.0


def _review_qty(stage, lead_time):
    position = stage.on_hand + stage.on_order - stage.to_ship
    if position <= _order_point(stage.history, lead_time):
        return position, max(0, stage.capacity - position)
    return position, 0


def run_oracle(
    days: int,
    demand_qty: int = 5,
    store_capacity: int = 40,
    dc_capacity: int = 200,
    lead_time: int = 1,
    forecast_window: int = 3,
):
    """Returns (store_rows, dc_rows) of per-day DayRow traces."""
    del forecast_window  # forecast value never alters the trace fields
    store = _Stage(on_hand=store_capacity, capacity=store_capacity)
    dc = _Stage(on_hand=dc_capacity, capacity=dc_capacity)
    store_rows, dc_rows = [], []
    for day in range(days):
        delivered = min(demand_qty, store.on_hand)
        lost = demand_qty - delivered
        store.on_hand -= delivered

        for stage in (store, dc):
            if day in stage.inbound:
                qty, requested = stage.inbound.pop(day)
                stage.on_hand += qty
                stage.on_order -= requested
                assert stage.on_hand <= stage.capacity

        store.history.append(demand_qty)
        store_position, store_q = _review_qty(store, lead_time)
        dc_demand_today = 0
        dc_delivered_today = 0
        dc_lost_today = 0
        if store_q > 0:
            store.on_order += store_q
            dc.to_ship += store_q
            dc_demand_today += store_q
            shipped = min(store_q, dc.on_hand)
            dc.on_hand -= shipped
            dc.to_ship -= store_q
            dc_delivered_today = shipped
            dc_lost_today = store_q - shipped
            store.inbound[day + lead_time] = (shipped, store_q)

        dc.history.append(dc_demand_today)
        dc_position, dc_q = _review_qty(dc, lead_time)
        if dc_q > 0:
            dc.on_order += dc_q
            dc.inbound[day + lead_time] = (dc_q, dc_q)

        store_rows.append(
            DayRow(day, store.on_hand, store.on_order, store_position, store_q, delivered, lost)
        )
        dc_rows.append(
            DayRow(day, dc.on_hand, dc.on_order, dc_position, dc_q, dc_delivered_today, dc_lost_today)
        )
    return store_rows, dc_rows


def expected_store_fill(days, demand_qty=5, **kwargs):
    rows, _ = run_oracle(days, demand_qty, **kwargs)
    satisfied = sum(1 for r in rows if r.lost == 0)
    return satisfied / len(rows)


if __name__ == "__main__":
    store_rows, dc_rows = run_oracle(15)
    for row in store_rows:
        print(row)
    print("store fill:", fmean(1.0 if r.lost == 0 else 0.0 for r in store_rows))
