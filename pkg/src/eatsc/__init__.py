"""Interest-rate driven adaptive traffic signal control.

A four-leg intersection simulator where waiting vehicles accrue
compounding-interest penalties, the queue with the highest penalty wins the
next green, and two DQN agents learn interest rates and green durations.
"""

from .domain import (
    DecisionRecord,
    QueueId,
    QueueState,
    Vehicle,
    decode_action1,
    decode_action2,
)
from .kernels import BACKEND
from .penalty import (
    PenaltyReport,
    boundary_rate,
    choose_green,
    penalty_difference,
    queue_penalty,
    update_wait,
    vehicle_penalty,
)
from .simulate import IntersectionState, ScenarioConfig, StepOutcome, new_episode

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DecisionRecord",
    "IntersectionState",
    "PenaltyReport",
    "QueueId",
    "QueueState",
    "ScenarioConfig",
    "StepOutcome",
    "Vehicle",
    "boundary_rate",
    "choose_green",
    "decode_action1",
    "decode_action2",
    "new_episode",
    "penalty_difference",
    "queue_penalty",
    "update_wait",
    "vehicle_penalty",
    "__version__",
]
