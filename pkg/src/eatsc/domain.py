"""Shared domain types: queues, vehicles, decision records, action decoding.

A four-leg intersection has twelve approach lanes grouped into four
non-conflicting queues (one per compass direction), each served by a single
green phase. Stopped vehicles are queue entries, not kinematic bodies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

#: Discrete interest-rate levels available to the rate agent (per second).
INTEREST_RATES = (0.1, 0.2, 0.3)

#: Number of actions of the rate agent: one per (EW, NS) rate combination.
N_RATE_ACTIONS = len(INTEREST_RATES) ** 2

#: Number of actions of the duration agent: green lengths 10..60 s in 10 s steps.
N_DURATION_ACTIONS = 6
GREEN_STEP = 10

#: Default maximum queue length; reaching it is a system failure.
DEFAULT_CAPACITY = 110


class QueueId(IntEnum):
    """The four non-conflicting queues, in fixed priority order E > W > N > S."""

    E = 0
    W = 1
    N = 2
    S = 3

    @property
    def lanes(self) -> tuple[str, str, str]:
        """Approach lanes served by this queue's green phase."""
        base = 3 * self.value
        return (f"d{base + 1}", f"d{base + 2}", f"d{base + 3}")


QUEUE_ORDER = (QueueId.E, QueueId.W, QueueId.N, QueueId.S)


@dataclass
class Vehicle:
    """A stopped vehicle: the creditor in the virtual transaction.

    ``carried_wait`` is the waiting time accumulated in previous signal
    cycles; it is zero for vehicles that arrived in the current cycle.
    """

    arrival_time: float
    principal: float = 1.0
    carried_wait: float = 0.0

    def __post_init__(self):
        if self.principal <= 0:
            raise ValueError(f"principal must be > 0, got {self.principal}")
        if self.arrival_time < 0:
            raise ValueError(f"arrival_time must be >= 0, got {self.arrival_time}")
        if self.carried_wait < 0:
            raise ValueError(f"carried_wait must be >= 0, got {self.carried_wait}")


@dataclass
class QueueState:
    """One queue: FIFO vehicle list plus its signalling bookkeeping.

    ``cycle_start`` is the time the queue's current cycle began (the instant
    its green most recently ended); waits of vehicles that arrived before it
    are ``carried_wait + now - cycle_start``.
    """

    id: QueueId
    vehicles: list[Vehicle] = field(default_factory=list)
    capacity: int = DEFAULT_CAPACITY
    interest_rate: float = 0.0
    cycle_start: float = 0.0

    def __post_init__(self):
        if self.interest_rate < 0:
            raise ValueError(f"interest_rate must be >= 0, got {self.interest_rate}")
        if self.capacity <= 0:
            raise ValueError(f"capacity must be > 0, got {self.capacity}")
        self.check()

    def check(self):
        """Validate FIFO order and capacity; raises ValueError on violation."""
        if len(self.vehicles) > self.capacity:
            raise ValueError(f"queue {self.id.name} exceeds capacity {self.capacity}")
        times = [v.arrival_time for v in self.vehicles]
        if any(a > b for a, b in zip(times, times[1:])):
            raise ValueError(f"queue {self.id.name} vehicles are not in FIFO order")

    def __len__(self) -> int:
        return len(self.vehicles)


@dataclass
class DecisionRecord:
    """One MDP transition as stored in replay memory.

    ``state`` and ``next_state`` are raw per-queue vehicle counts (length-4
    int arrays in E, W, N, S order). ``td_error`` is maintained by the
    prioritized memory, not by the producer of the record.
    """

    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    terminal: bool
    td_error: float = 0.0


def decode_action1(index: int) -> tuple[float, float]:
    """Decode a rate-agent action into the (EW, NS) interest-rate pair.

    Row-major over INTEREST_RATES x INTEREST_RATES with the EW rate as the
    major axis: index 0 -> (0.1, 0.1), 5 -> (0.2, 0.3), 8 -> (0.3, 0.3).
    """
    if not 0 <= index < N_RATE_ACTIONS:
        raise ValueError(f"rate action index out of range [0,{N_RATE_ACTIONS}): {index}")
    n = len(INTEREST_RATES)
    return INTEREST_RATES[index // n], INTEREST_RATES[index % n]


def decode_action2(index: int) -> int:
    """Decode a duration-agent action into a green time in seconds (10..60)."""
    if not 0 <= index < N_DURATION_ACTIONS:
        raise ValueError(f"duration action index out of range [0,{N_DURATION_ACTIONS}): {index}")
    return GREEN_STEP * (index + 1)
