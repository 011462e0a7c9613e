"""Comparison controllers: fixed-time cyclic, fixed-time penalty-sequenced,
and the null model (zero interest rates, i.e. longest-queue-first)."""

from __future__ import annotations

import dataclasses

from .agents import RunResult
from .domain import QUEUE_ORDER, QueueId
from .penalty import PenaltyReport, choose_green
from .records import EpisodeRecorder
from .simulate import ScenarioConfig, new_episode

BASELINE_VARIANTS = ("fixed-cyclic", "fixed-penalty", "null")

#: Default fixed green time: midpoint of the 10-60 s action range.
DEFAULT_FIXED_GREEN = 30


def fixed_cyclic(phase_index: int, duration: int = DEFAULT_FIXED_GREEN) -> tuple[QueueId, int]:
    """Round-robin service E -> W -> N -> S at a constant green time."""
    return QUEUE_ORDER[phase_index % 4], duration


def fixed_penalty_sequence(
    queues,
    now: float,
    rates: tuple[float, float] = (0.1, 0.1),
    duration: int = DEFAULT_FIXED_GREEN,
) -> tuple[QueueId, int, PenaltyReport]:
    """Penalty-argmax sequencing at a constant green time and fixed rates."""
    per_queue_rates = (rates[0], rates[0], rates[1], rates[1])
    configured = [
        dataclasses.replace(q, interest_rate=r) for q, r in zip(queues, per_queue_rates)
    ]
    report = choose_green(configured, now)
    return report.winner, duration, report


def null_model(
    queues, now: float, duration: int = DEFAULT_FIXED_GREEN
) -> tuple[QueueId, int, PenaltyReport]:
    """Zero-rate penalty sequencing: the winner is simply the longest queue."""
    return fixed_penalty_sequence(queues, now, rates=(0.0, 0.0), duration=duration)


class Controller:
    """A fixed (non-learning) signal policy driving the simulator loop.

    ``decide`` returns (forced_winner, rates, duration); a None winner lets
    the simulator's penalty argmax pick the queue.
    """

    def decide(self, sim) -> tuple[QueueId | None, tuple[float, float], int]:
        raise NotImplementedError


class FixedCyclicController(Controller):
    def __init__(self, duration: int = DEFAULT_FIXED_GREEN):
        self.duration = duration
        self.phase = 0

    def decide(self, sim):
        winner, duration = fixed_cyclic(self.phase, self.duration)
        self.phase += 1
        return winner, (0.0, 0.0), duration


class FixedPenaltyController(Controller):
    def __init__(self, rates: tuple[float, float] = (0.1, 0.1), duration: int = DEFAULT_FIXED_GREEN):
        self.rates = rates
        self.duration = duration

    def decide(self, sim):
        return None, self.rates, self.duration


class NullController(Controller):
    def __init__(self, duration: int = DEFAULT_FIXED_GREEN):
        self.duration = duration

    def decide(self, sim):
        return None, (0.0, 0.0), self.duration


def make_controller(variant: str, fixed_green: int, fixed_rates: tuple[float, float]) -> Controller:
    if variant == "fixed-cyclic":
        return FixedCyclicController(fixed_green)
    if variant == "fixed-penalty":
        return FixedPenaltyController(fixed_rates, fixed_green)
    if variant == "null":
        return NullController(fixed_green)
    raise ValueError(f"unknown baseline variant {variant!r}")


def run_baseline(
    scenario: ScenarioConfig,
    variant: str,
    max_episode: int,
    seed: int,
    fixed_green: int = DEFAULT_FIXED_GREEN,
    fixed_rates: tuple[float, float] = (0.1, 0.1),
) -> RunResult:
    """Run a fixed controller over the same episode protocol as training.

    Episode seeds depend only on (seed, episode index), so baseline runs are
    paired with training runs that share the seed.
    """
    from .agents import episode_seed  # local import avoids cycle at module load

    if variant not in BASELINE_VARIANTS:
        raise ValueError(f"variant must be one of {BASELINE_VARIANTS}, got {variant!r}")
    result = RunResult(variant=variant, seed=seed)
    for ep in range(max_episode):
        ep_seed = episode_seed(seed, ep)
        sim = new_episode(scenario, ep_seed)
        recorder = EpisodeRecorder(ep, ep_seed)
        controller = make_controller(variant, fixed_green, fixed_rates)
        decision_index = 0
        while not sim.failed and sim.clock < scenario.max_sim_time:
            winner, rates, duration = controller.decide(sim)
            green = min(duration, scenario.max_sim_time - sim.clock)
            state = sim.observe()
            t_decision = sim.clock
            outcome = sim.apply_decision(rates, green, winner=winner)
            recorder.add(decision_index, t_decision, state, rates[0], rates[1], green, 0.0, outcome)
            decision_index += 1
        result.episodes.append(recorder.summary(sim.clock, sim.failed))
        result.decision_rows.extend(recorder.decision_rows)
        result.wait_rows.extend(recorder.wait_rows)
        result.per_queue_rows.extend(recorder.per_queue_rows())
    return result
