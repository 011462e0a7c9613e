"""Rank-based prioritized replay memory.

Records are kept oldest-first in a bounded store. Each record's priority is
its latest absolute TD error; sampling probabilities follow the rank-based
scheme P_s = (1/rank_s)^alpha / sum_k (1/rank_k)^alpha, where ranks sort
priorities in descending order (ties keep insertion order). Importance
weights are (1/(M * P_s))^beta with M the current memory size, normalized by
the largest weight in the batch.

At the default memory size (500) ranks are recomputed by sorting on every
sampling call; no sum-tree is needed.
"""

from __future__ import annotations

import numpy as np

from .domain import DecisionRecord


class PrioritizedMemory:
    """Bounded replay store with rank-based priorities."""

    def __init__(self, capacity: int = 500, alpha: float = 0.6):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        if alpha < 0:
            raise ValueError("alpha must be >= 0")
        self.capacity = int(capacity)
        self.alpha = float(alpha)
        self._records: list[DecisionRecord] = []
        self._priorities: list[float] = []

    def __len__(self) -> int:
        return len(self._records)

    @property
    def is_full(self) -> bool:
        return len(self._records) >= self.capacity

    @property
    def records(self) -> list[DecisionRecord]:
        """Live records, oldest first."""
        return self._records

    def append(self, record: DecisionRecord) -> None:
        """Store a record; evicts the oldest when full.

        New records enter with the maximum priority currently in memory
        (1.0 when empty) so they are sampled at least once before their
        rank can decay.
        """
        priority = max(self._priorities, default=1.0)
        if len(self._records) >= self.capacity:
            self._records.pop(0)
            self._priorities.pop(0)
        record.td_error = priority
        self._records.append(record)
        self._priorities.append(priority)

    def priorities(self) -> np.ndarray:
        return np.asarray(self._priorities, dtype=np.float64)

    def probabilities(self) -> np.ndarray:
        """Per-record sampling probabilities from the priority ranks."""
        prios = self.priorities()
        order = np.argsort(-prios, kind="stable")
        ranks = np.empty(len(prios), dtype=np.float64)
        ranks[order] = np.arange(1, len(prios) + 1)
        scaled = ranks**-self.alpha
        return scaled / scaled.sum()

    def importance_weights(self, beta: float, probs: np.ndarray | None = None) -> np.ndarray:
        """Raw importance weights (1/(M * P_s))^beta, not normalized."""
        if probs is None:
            probs = self.probabilities()
        m = len(self._records)
        return (1.0 / (m * probs)) ** beta

    def sample(self, batch_size: int, beta: float, rng: np.random.Generator):
        """Draw a prioritized batch.

        Returns (records, indices, weights); weights are the importance
        weights normalized by the batch maximum. Raises when the memory
        holds fewer records than the batch size.
        """
        if len(self._records) < batch_size:
            raise ValueError(
                f"memory holds {len(self._records)} records, need {batch_size} to sample"
            )
        probs = self.probabilities()
        indices = rng.choice(len(self._records), size=batch_size, p=probs)
        weights = self.importance_weights(beta, probs)[indices]
        weights = weights / weights.max()
        records = [self._records[i] for i in indices]
        return records, indices, weights

    def update_priorities(self, indices, td_errors) -> None:
        """Refresh the |TD| priorities of previously sampled records."""
        for i, td in zip(indices, td_errors):
            value = abs(float(td))
            self._priorities[int(i)] = value
            self._records[int(i)].td_error = value
