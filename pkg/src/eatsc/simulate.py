"""Discrete-time (1-second tick) intersection simulator.

Arrivals are Bernoulli per tick per queue at probability v/3600, where each
queue's hourly volume v is drawn once per episode from its configured normal
distribution (clipped at zero). The green queue discharges one vehicle per
saturation-headway seconds. An episode fails the moment any queue count
reaches capacity.

Identical (config, seed, action sequence) triples reproduce episodes
bit-exactly on either kernel backend.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .domain import DEFAULT_CAPACITY, QUEUE_ORDER, QueueId, QueueState, Vehicle
from .penalty import argmax_queue

#: Longest green a controller can command; used only to size episode buffers.
MAX_GREEN = 60


@dataclass
class ScenarioConfig:
    """Traffic scenario: per-queue demand and the service/failure parameters.

    ``flow_mean``/``flow_std`` are per-queue hourly volumes in E, W, N, S
    order. ``seed`` is the default episode seed used when ``new_episode``
    is not given an explicit one.
    """

    flow_mean: tuple[float, float, float, float]
    flow_std: tuple[float, float, float, float]
    max_sim_time: int
    capacity: int = DEFAULT_CAPACITY
    saturation_headway: float = 2.0
    principal: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    seed: int = 0

    def __post_init__(self):
        if len(self.flow_mean) != 4 or len(self.flow_std) != 4:
            raise ValueError("flow_mean and flow_std must have one entry per queue")
        if min(self.flow_mean) <= 0:
            raise ValueError("flow means must be > 0")
        if min(self.flow_std) < 0:
            raise ValueError("flow stds must be >= 0")
        if self.saturation_headway <= 0:
            raise ValueError("saturation_headway must be > 0")
        if self.capacity <= 0:
            raise ValueError("capacity must be > 0")
        if self.max_sim_time < 1:
            raise ValueError("max_sim_time must be >= 1")

    @classmethod
    def paired(cls, mean_ew, std_ew, mean_ns, std_ns, **kwargs) -> "ScenarioConfig":
        """East/west queues share one flow distribution, north/south another."""
        return cls(
            flow_mean=(mean_ew, mean_ew, mean_ns, mean_ns),
            flow_std=(std_ew, std_ew, std_ns, std_ns),
            **kwargs,
        )


@dataclass
class StepOutcome:
    """Result of running one green phase from a decision point."""

    next_state: np.ndarray
    reward: int
    failed: bool
    elapsed: int
    green_queue: QueueId
    tie: bool
    wait_mean: np.ndarray
    arrivals: np.ndarray
    discharged: np.ndarray
    passthrough: np.ndarray
    failed_queue: QueueId | None = None


@dataclass
class IntersectionState:
    """Mutable state of one episode; use :func:`new_episode` to create it."""

    config: ScenarioConfig
    rng: np.random.Generator
    volumes: np.ndarray
    clock: int = 0
    green_queue: QueueId = QueueId.E
    green_remaining: int = 0
    failed: bool = False
    failed_queue: QueueId | None = None
    decisions: int = 0
    probs: np.ndarray = field(init=False)
    rates: np.ndarray = field(init=False)
    cycle_start: np.ndarray = field(init=False)

    def __post_init__(self):
        self.probs = np.minimum(self.volumes / 3600.0, 1.0)
        self.rates = np.zeros(4)
        self.cycle_start = np.zeros(4)
        self._buf_ticks = self.config.max_sim_time + MAX_GREEN + 2
        shape = (4, self._buf_ticks)
        self._principal = np.zeros(shape)
        self._arrival = np.zeros(shape)
        self._carried = np.zeros(shape)
        self._head = np.zeros(4, dtype=np.int64)
        self._tail = np.zeros(4, dtype=np.int64)
        self._new_principal = np.asarray(self.config.principal, dtype=np.float64)

    # -- observation ------------------------------------------------------

    def counts(self) -> np.ndarray:
        return self._tail - self._head

    def observe(self) -> np.ndarray:
        """Per-queue vehicle counts in E, W, N, S order."""
        return self.counts()

    def observe_normalized(self) -> np.ndarray:
        """Counts scaled by capacity, the learner's network input."""
        return self.counts() / float(self.config.capacity)

    def queue_state(self, qid: QueueId) -> QueueState:
        """Materialize one queue as a domain-level QueueState."""
        q = int(qid)
        lo, hi = int(self._head[q]), int(self._tail[q])
        vehicles = [
            Vehicle(
                arrival_time=float(self._arrival[q, j]),
                principal=float(self._principal[q, j]),
                carried_wait=float(self._carried[q, j]),
            )
            for j in range(lo, hi)
        ]
        return QueueState(
            id=qid,
            vehicles=vehicles,
            capacity=self.config.capacity,
            interest_rate=float(self.rates[q]),
            cycle_start=float(self.cycle_start[q]),
        )

    def penalties(self) -> np.ndarray:
        """Current per-queue penalties at the simulation clock."""
        now = float(self.clock)
        out = np.zeros(4)
        for q in range(4):
            lo, hi = int(self._head[q]), int(self._tail[q])
            if hi > lo:
                out[q] = kernels.penalty_sum(
                    self._principal[q, lo:hi],
                    self._arrival[q, lo:hi],
                    self._carried[q, lo:hi],
                    now,
                    float(self.cycle_start[q]),
                    float(self.rates[q]),
                )
        return out

    def wait_stats(self) -> tuple[np.ndarray, np.ndarray]:
        """(mean wait, count) per queue at the simulation clock."""
        now = float(self.clock)
        means = np.zeros(4)
        n = self.counts()
        for q in range(4):
            lo, hi = int(self._head[q]), int(self._tail[q])
            if hi > lo:
                total = kernels.wait_sum(
                    self._arrival[q, lo:hi], self._carried[q, lo:hi], now, float(self.cycle_start[q])
                )
                means[q] = total / (hi - lo)
        return means, n

    # -- dynamics ---------------------------------------------------------

    def apply_decision(
        self,
        rates: tuple[float, float],
        duration: int,
        winner: QueueId | None = None,
    ) -> StepOutcome:
        """Set interest rates, pick the green queue, and run one phase.

        ``rates`` is the (EW, NS) pair; east/west share the first rate and
        north/south the second. The green queue is the penalty argmax unless
        ``winner`` forces one (fixed-sequence controllers). The phase runs
        ``duration`` ticks, stopping early only if a queue reaches capacity.
        """
        if self.failed:
            raise ValueError("cannot act on a failed episode")
        duration = int(duration)
        if duration < 1:
            raise ValueError(f"duration must be >= 1 tick, got {duration}")
        i_ew, i_ns = float(rates[0]), float(rates[1])
        if i_ew < 0 or i_ns < 0:
            raise ValueError("interest rates must be >= 0")
        if self.clock + duration >= self._buf_ticks:
            raise ValueError("phase would run past the episode horizon")
        self.rates[:] = (i_ew, i_ew, i_ns, i_ns)

        # The ending green phase is its queue's cycle boundary: fold waits
        # into carried_wait and restart the queue's cycle at the current time.
        now = float(self.clock)
        prev = int(self.green_queue)
        lo, hi = int(self._head[prev]), int(self._tail[prev])
        kernels.update_carried(
            self._arrival[prev, lo:hi], self._carried[prev, lo:hi], now, float(self.cycle_start[prev])
        )
        self.cycle_start[prev] = now

        if winner is None:
            green_idx, tie = argmax_queue(self.penalties())
        else:
            green_idx, tie = int(winner), False
        self.green_queue = QueueId(green_idx)

        before = self.counts()
        head_before = self._head.copy()
        tail_before = self._tail.copy()
        passthrough = np.zeros(4, dtype=np.int64)
        uniforms = self.rng.random((duration, 4))
        done, fail_q, _ = kernels.run_phase(
            self._principal,
            self._arrival,
            self._carried,
            self._head,
            self._tail,
            green_idx,
            duration,
            self.probs,
            uniforms,
            self._new_principal,
            self.config.capacity,
            float(self.config.saturation_headway),
            now,
            0.0,
            passthrough,
        )
        self.clock += done
        self.green_remaining = 0
        self.decisions += 1
        if fail_q >= 0:
            self.failed = True
            self.failed_queue = QueueId(fail_q)

        after = self.counts()
        wait_mean, _ = self.wait_stats()
        return StepOutcome(
            next_state=after,
            reward=int((before - after).sum()),
            failed=self.failed,
            elapsed=done,
            green_queue=self.green_queue,
            tie=tie,
            wait_mean=wait_mean,
            arrivals=self._tail - tail_before,
            discharged=self._head - head_before,
            passthrough=passthrough,
            failed_queue=self.failed_queue,
        )


def new_episode(config: ScenarioConfig, seed: int | None = None) -> IntersectionState:
    """Start an empty episode.

    Per-queue hourly volumes are drawn once (E, W, N, S order) from the
    scenario's normal distributions, clipped at zero. The initial green
    belongs to queue E with zero remaining time, so the first decision
    happens at t=0.
    """
    if seed is None:
        seed = config.seed
    rng = np.random.default_rng(seed)
    volumes = np.empty(4)
    for q in range(4):
        v = rng.normal(config.flow_mean[q], config.flow_std[q])
        volumes[q] = v if v > 0.0 else 0.0
    return IntersectionState(config=config, rng=rng, volumes=volumes)


def observe(state: IntersectionState) -> np.ndarray:
    """Module-level alias for :meth:`IntersectionState.observe`."""
    return state.observe()
