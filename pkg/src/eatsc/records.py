"""Metric records and CSV persistence.

All experiment outputs are plain CSV with a small ``# key=value`` comment
header carrying the seed and run settings, so every row is reproducible from
its file alone. Floats are written with ``repr`` (shortest round-trip form),
making emitted files byte-stable across reruns and parse(emit(x)) == x.

File schemas (column orders are fixed):

decisions.csv  episode, decision_index, t, n_E, n_W, n_N, n_S, i_EW, i_NS,
               green_queue, green_len, reward, epsilon, failed
               (t is the decision instant; green_len the commanded green;
               reward/failed describe the phase that followed)
episodes.csv   episode, non_failure_time, mean_reward, mean_queue_size,
               mean_wait, failed, seed
waits.csv      episode, decision_index, t, wait_E, wait_W, wait_N, wait_S
               (t is the phase end; wait_q the mean wait of queued vehicles)
per_queue.csv  episode, queue, mean_count, mean_wait, seed

Queue-size and wait metrics are end-of-phase snapshots: mean_queue_size is
the per-queue average count, mean_wait the vehicle-weighted mean wait
(zero when the intersection is empty).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .domain import QUEUE_ORDER

DECISION_COLUMNS = (
    "episode",
    "decision_index",
    "t",
    "n_E",
    "n_W",
    "n_N",
    "n_S",
    "i_EW",
    "i_NS",
    "green_queue",
    "green_len",
    "reward",
    "epsilon",
    "failed",
)
DECISION_TYPES = (int, int, int, int, int, int, int, float, float, str, int, int, float, int)

EPISODE_COLUMNS = (
    "episode",
    "non_failure_time",
    "mean_reward",
    "mean_queue_size",
    "mean_wait",
    "failed",
    "seed",
)
EPISODE_TYPES = (int, int, float, float, float, int, int)

WAIT_COLUMNS = ("episode", "decision_index", "t", "wait_E", "wait_W", "wait_N", "wait_S")
WAIT_TYPES = (int, int, int, float, float, float, float)

PER_QUEUE_COLUMNS = ("episode", "queue", "mean_count", "mean_wait", "seed")
PER_QUEUE_TYPES = (int, str, float, float, int)


@dataclass
class EpisodeSummary:
    """One row of episodes.csv."""

    episode: int
    non_failure_time: int
    mean_reward: float
    mean_queue_size: float
    mean_wait: float
    failed: bool
    seed: int

    def to_row(self):
        return (
            self.episode,
            self.non_failure_time,
            self.mean_reward,
            self.mean_queue_size,
            self.mean_wait,
            int(self.failed),
            self.seed,
        )


class EpisodeRecorder:
    """Accumulates per-decision rows and end-of-episode aggregates."""

    def __init__(self, episode: int, seed: int):
        self.episode = episode
        self.seed = seed
        self.decision_rows = []
        self.wait_rows = []
        self._rewards = []
        self._total_counts = []
        self._wait_totals = []
        self._per_queue_counts = [[] for _ in range(4)]
        self._per_queue_waits = [[] for _ in range(4)]

    def add(self, decision_index, t, state, i_ew, i_ns, green_len, epsilon, outcome):
        self.decision_rows.append(
            (
                self.episode,
                decision_index,
                t,
                int(state[0]),
                int(state[1]),
                int(state[2]),
                int(state[3]),
                float(i_ew),
                float(i_ns),
                outcome.green_queue.name,
                green_len,
                outcome.reward,
                float(epsilon),
                int(outcome.failed),
            )
        )
        t_end = t + outcome.elapsed
        wm = outcome.wait_mean
        self.wait_rows.append(
            (self.episode, decision_index, t_end, float(wm[0]), float(wm[1]), float(wm[2]), float(wm[3]))
        )
        counts = outcome.next_state
        self._rewards.append(outcome.reward)
        self._total_counts.append(int(counts.sum()))
        self._wait_totals.append(float((wm * counts).sum()))
        for q in range(4):
            self._per_queue_counts[q].append(int(counts[q]))
            self._per_queue_waits[q].append(float(wm[q]))

    def summary(self, non_failure_time: int, failed: bool) -> EpisodeSummary:
        n = max(1, len(self._rewards))
        total_vehicles = sum(self._total_counts)
        mean_wait = sum(self._wait_totals) / total_vehicles if total_vehicles else 0.0
        return EpisodeSummary(
            episode=self.episode,
            non_failure_time=non_failure_time,
            mean_reward=sum(self._rewards) / n,
            mean_queue_size=sum(self._total_counts) / (4.0 * n),
            mean_wait=mean_wait,
            failed=failed,
            seed=self.seed,
        )

    def per_queue_rows(self):
        n = max(1, len(self._rewards))
        rows = []
        for q, qid in enumerate(QUEUE_ORDER):
            rows.append(
                (
                    self.episode,
                    qid.name,
                    sum(self._per_queue_counts[q]) / n,
                    sum(self._per_queue_waits[q]) / n,
                    self.seed,
                )
            )
        return rows


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, meta: dict, columns, rows) -> None:
    """Write rows with a ``# key=value`` metadata header. Byte-deterministic."""
    with open(path, "w", newline="\n") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}={value}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(cell) for cell in row) + "\n")


def read_csv(path, types=None):
    """Read a CSV written by :func:`write_csv`.

    Returns (meta, columns, rows); rows are tuples converted with ``types``
    when given, else raw strings.
    """
    meta = {}
    columns = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value
                continue
            cells = line.split(",")
            if columns is None:
                columns = tuple(cells)
                continue
            if types is not None:
                rows.append(tuple(conv(cell) for conv, cell in zip(types, cells)))
            else:
                rows.append(tuple(cells))
    return meta, columns, rows


def ensure_dir(path) -> None:
    os.makedirs(path, exist_ok=True)
