"""Penalty engine: the compounding-interest cost of keeping vehicles waiting.

Each stopped vehicle lends its principal to the intersection controller; the
payoff grows as principal * e^(wait * rate). Queue penalties are the sums of
their vehicles' payoffs, the next green goes to the queue with the highest
penalty, and at rate 0 everything collapses to plain vehicle counts
(the null model).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .domain import QUEUE_ORDER, QueueId, QueueState, Vehicle

#: Guard against float overflow; acceptance scenarios stay far below this.
_MAX_EXPONENT = 700.0


@dataclass
class PenaltyReport:
    """Per-queue penalties and the resulting signal decision."""

    per_queue: dict[QueueId, float]
    winner: QueueId
    tie: bool

    def difference(self, q1: QueueId, q2: QueueId) -> float:
        return self.per_queue[q1] - self.per_queue[q2]


def vehicle_penalty(principal: float, wait: float, rate: float) -> float:
    """Payoff owed to one vehicle: principal * e^(wait * rate)."""
    if principal <= 0:
        raise ValueError(f"principal must be > 0, got {principal}")
    if wait < 0:
        raise ValueError(f"wait must be >= 0, got {wait}")
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    exponent = wait * rate
    if exponent >= _MAX_EXPONENT:
        raise ValueError(f"wait*rate={exponent} would overflow the penalty")
    return principal * math.exp(exponent)


def update_wait(vehicle: Vehicle, now: float, cycle_start: float) -> float:
    """Total waiting time of a vehicle at ``now``.

    Vehicles that arrived before the current cycle carry their earlier wait:
    carried_wait + now - cycle_start. Vehicles that arrived within the
    current cycle have waited now - arrival_time.
    """
    if now < vehicle.arrival_time:
        raise ValueError(f"now={now} precedes arrival_time={vehicle.arrival_time}")
    if vehicle.arrival_time < cycle_start:
        return vehicle.carried_wait + now - cycle_start
    return now - vehicle.arrival_time


def queue_penalty(queue: QueueState, now: float) -> float:
    """Total penalty of a queue: sum of its vehicles' payoffs at ``now``."""
    if not queue.vehicles:
        return 0.0
    principal = np.array([v.principal for v in queue.vehicles], dtype=np.float64)
    arrival = np.array([v.arrival_time for v in queue.vehicles], dtype=np.float64)
    carried = np.array([v.carried_wait for v in queue.vehicles], dtype=np.float64)
    return kernels.penalty_sum(
        principal, arrival, carried, float(now), float(queue.cycle_start), float(queue.interest_rate)
    )


def argmax_queue(values) -> tuple[int, bool]:
    """First index of the maximum over the fixed E > W > N > S order,
    plus a flag for exact ties."""
    winner = 0
    best = values[0]
    tie = False
    for q in range(1, 4):
        if values[q] > best:
            winner, best, tie = q, values[q], False
        elif values[q] == best:
            tie = True
    return winner, tie


def choose_green(queues, now: float) -> PenaltyReport:
    """Assign the next green to the queue with the highest penalty.

    ``queues`` must be the four QueueStates in E, W, N, S order. Exact ties
    are broken by that fixed order and flagged in the report.
    """
    ids = tuple(q.id for q in queues)
    if ids != QUEUE_ORDER:
        raise ValueError(f"queues must be in E,W,N,S order, got {ids}")
    penalties = [queue_penalty(q, now) for q in queues]
    winner, tie = argmax_queue(penalties)
    return PenaltyReport(
        per_queue=dict(zip(QUEUE_ORDER, penalties)),
        winner=QUEUE_ORDER[winner],
        tie=tie,
    )


def penalty_difference(q1: QueueState, q2: QueueState, now: float) -> float:
    """Penalty of q1 minus penalty of q2; positive means q1 wins the green."""
    return queue_penalty(q1, now) - queue_penalty(q2, now)


def boundary_rate(
    waits_q1,
    waits_q2,
    i_max: float = 2.0,
    tol: float = 1e-9,
) -> float | None:
    """Interest rate at which two queues' penalties tie (unit principals).

    Both queues share the candidate rate. Returns the root of
    D(i) = penalty_q1(i) - penalty_q2(i) found by bisection on [0, i_max],
    or None when D has no sign change on the bracket. Equal wait multisets
    make D identically zero; 0.0 is returned and every rate is a tie.
    """
    w1 = [float(w) for w in waits_q1]
    w2 = [float(w) for w in waits_q2]
    if not w1 or not w2:
        raise ValueError("both wait lists must be nonempty")
    if min(w1 + w2) < 0:
        raise ValueError("waits must be >= 0")

    def diff(i: float) -> float:
        total = 0.0
        for w in w1:
            total += math.exp(w * i)
        for w in w2:
            total -= math.exp(w * i)
        return total

    lo, hi = 0.0, float(i_max)
    d_lo, d_hi = diff(lo), diff(hi)
    if d_lo == 0.0:
        return 0.0
    if (d_lo < 0.0) == (d_hi < 0.0):
        return None
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        d_mid = diff(mid)
        if abs(d_mid) < tol:
            break
        if (d_mid < 0.0) == (d_lo < 0.0):
            lo, d_lo = mid, d_mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return mid
