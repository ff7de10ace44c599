"""Order-point, order-up-to-level (s, S) inventory control.

A warehouse slot for one item is reviewed once per working day.  The
review computes the inventory position

    position = on_hand + on_order - to_ship

forecasts daily demand with a moving average, sums it over the
replenishment lead time, and sets the order point s to the safety stock,
defined as the standard deviation of the rolling lead-time demand.  When
the position has dropped to s or lower, the order quantity tops the
position back up to the capacity S.

Intermediate values (forecast, lead-time demand, safety stock) stay
fractional; only the order quantity is integral.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ItemInventory:
    """Per (node, item) inventory state.

    ``order_up_to`` is the warehouse capacity reserved for the item, so
    on-hand stock can never legitimately exceed it.  ``daily_demand_history``
    grows by exactly one entry per simulated working day and records
    *requested* demand, not delivered.
    """

    on_hand: int
    order_up_to: int
    lead_time: int
    on_order: int = 0
    to_ship: int = 0
    forecast_window: int = 20
    safety_window: int = 60
    daily_demand_history: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class ReviewResult:
    position: int
    forecast: float
    lead_time_demand: float
    safety_stock: float
    order_point: float
    order_quantity: int


def inventory_position(inv: ItemInventory) -> int:
    """On-hand plus on-order minus to-ship; negative when commitments exceed holdings."""
    return inv.on_hand + inv.on_order - inv.to_ship


def forecast(history: list[int], window: int) -> float:
    """Moving average of the last ``window`` days; 0 with no history."""
    if not history:
        return 0.0
    tail = history[-window:] if window < len(history) else history
    return sum(tail) / len(tail)


def lead_time_demand(daily_forecast: float, lead_time: int) -> float:
    """Forecast demand summed over the lead time.

    The moving average is flat over future days, so the sum collapses to
    lead_time * daily_forecast.
    """
    return lead_time * daily_forecast


def safety_stock(history: list[int], lead_time: int, window: int) -> float:
    """Sample standard deviation of rolling lead-time demand sums.

    Computed over the last ``window`` days of history.  Returns 0 during
    warm-up (fewer than lead_time + 1 days), where no spread is measurable.
    """
    tail = history[-window:] if window < len(history) else history
    n = len(tail)
    if n < lead_time + 1:
        return 0.0
    prefix = np.concatenate(([0.0], np.cumsum(np.asarray(tail, dtype=np.float64))))
    sums = prefix[lead_time:] - prefix[:-lead_time]
    return float(np.std(sums, ddof=1))


def review(inv: ItemInventory) -> ReviewResult:
    """End-of-day replenishment decision for one item slot.

    Orders trigger when the position has dropped *to* the order point or
    lower (boundary included), and the quantity refills the position to
    capacity.  Never returns a negative quantity.
    """
    pos = inventory_position(inv)
    df = forecast(inv.daily_demand_history, inv.forecast_window)
    dlt = lead_time_demand(df, inv.lead_time)
    ss = safety_stock(inv.daily_demand_history, inv.lead_time, inv.safety_window)
    qty = 0
    if pos <= ss:
        qty = max(0, inv.order_up_to - pos)
    return ReviewResult(
        position=pos,
        forecast=df,
        lead_time_demand=dlt,
        safety_stock=ss,
        order_point=ss,
        order_quantity=qty,
    )
