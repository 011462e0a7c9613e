"""Prioritized replay: ranks, probabilities, weights, eviction, sampling stats."""

import numpy as np
import pytest

from eatsc.domain import DecisionRecord
from eatsc.replay import PrioritizedMemory


def record(tag=0):
    return DecisionRecord(
        state=np.array([tag, 0, 0, 0]),
        action=0,
        reward=0.0,
        next_state=np.zeros(4, dtype=np.int64),
        terminal=False,
    )


def memory_with_priorities(priorities, capacity=None, alpha=0.6):
    mem = PrioritizedMemory(capacity or len(priorities), alpha=alpha)
    for i in range(len(priorities)):
        mem.append(record(i))
    for i, p in enumerate(priorities):
        mem._priorities[i] = float(p)
    return mem


class TestAppend:
    def test_first_record_priority_one(self):
        mem = PrioritizedMemory(4)
        mem.append(record())
        assert mem.priorities()[0] == 1.0

    def test_new_records_enter_with_max_priority(self):
        mem = memory_with_priorities([0.5, 7.0, 2.0], capacity=10)
        mem.append(record(99))
        assert mem.priorities()[-1] == 7.0
        assert mem.records[-1].td_error == 7.0

    def test_eviction_oldest_first(self):
        mem = PrioritizedMemory(3)
        tagged = [record(i) for i in range(4)]
        for r in tagged:
            mem.append(r)
        assert len(mem) == 3
        assert [int(r.state[0]) for r in mem.records] == [1, 2, 3]


class TestProbabilities:
    def test_three_record_rank_distribution(self):
        # alpha=1, ranks 1..3: p = 1, 1/2, 1/3 -> P = 6/11, 3/11, 2/11
        mem = memory_with_priorities([9.0, 5.0, 1.0], alpha=1.0)
        probs = mem.probabilities()
        assert probs[0] == pytest.approx(6 / 11, abs=1e-12)
        assert probs[1] == pytest.approx(3 / 11, abs=1e-12)
        assert probs[2] == pytest.approx(2 / 11, abs=1e-12)

    def test_rank_ties_keep_insertion_order(self):
        mem = memory_with_priorities([3.0, 3.0, 3.0], alpha=0.6)
        probs = mem.probabilities()
        assert probs[0] > probs[1] > probs[2]

    def test_alpha_zero_is_uniform(self):
        mem = memory_with_priorities([9.0, 5.0, 1.0], alpha=0.0)
        assert np.allclose(mem.probabilities(), 1 / 3)

    def test_probabilities_sum_to_one(self):
        mem = memory_with_priorities(np.random.default_rng(0).uniform(0, 5, 50))
        assert mem.probabilities().sum() == pytest.approx(1.0, abs=1e-12)


class TestImportanceWeights:
    def test_formula(self):
        mem = memory_with_priorities([4.0, 2.0, 1.0, 0.5], alpha=0.6)
        probs = mem.probabilities()
        for beta in (0.4, 0.7, 1.0):
            manual = (1.0 / (4 * probs)) ** beta
            assert np.allclose(mem.importance_weights(beta), manual, atol=1e-15)

    def test_beta_zero_all_ones(self):
        mem = memory_with_priorities([4.0, 2.0, 1.0])
        assert np.all(mem.importance_weights(0.0) == 1.0)

    def test_uniform_priorities_beta_one_equal_weights(self):
        mem = memory_with_priorities([2.0] * 6, alpha=0.0)
        rng = np.random.default_rng(1)
        _, _, weights = mem.sample(4, beta=1.0, rng=rng)
        assert np.allclose(weights, 1.0)


class TestSampling:
    def test_refuses_below_batch_size(self):
        mem = memory_with_priorities([1.0, 1.0])
        with pytest.raises(ValueError):
            mem.sample(3, beta=0.4, rng=np.random.default_rng(0))

    def test_empirical_frequencies_match_probabilities(self):
        rng = np.random.default_rng(77)
        mem = memory_with_priorities(np.linspace(5.0, 0.5, 10))
        probs = mem.probabilities()
        draws = 20000
        counts = np.zeros(10)
        for _ in range(draws // 10):
            _, indices, _ = mem.sample(10, beta=0.4, rng=rng)
            for i in indices:
                counts[i] += 1
        sigma = np.sqrt(draws * probs * (1 - probs))
        assert np.all(np.abs(counts - draws * probs) <= 3 * sigma)

    def test_weights_normalized_by_batch_max(self):
        mem = memory_with_priorities([4.0, 2.0, 1.0, 0.5])
        rng = np.random.default_rng(3)
        records, indices, weights = mem.sample(4, beta=0.7, rng=rng)
        raw = mem.importance_weights(0.7)[indices]
        assert np.allclose(weights, raw / raw.max(), atol=1e-15)
        assert weights.max() == pytest.approx(1.0)

    def test_update_priorities_reflected(self):
        mem = memory_with_priorities([1.0, 1.0, 1.0])
        mem.update_priorities([1], [-3.5])
        assert mem.priorities()[1] == 3.5  # absolute TD
        assert mem.records[1].td_error == 3.5
