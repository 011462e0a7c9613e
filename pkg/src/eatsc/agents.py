"""Two-agent learner: epsilon-greedy control of interest rates and green
durations, trained with double-DQN targets, dueling networks, and rank-based
prioritized replay.

Agent 1 picks the (EW, NS) interest-rate pair that drives the penalty-based
signal sequencing; agent 2 picks the green duration. Both observe the same
queue-count state and receive the same reward (the drop in total queued
vehicles over the phase).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import (
    N_DURATION_ACTIONS,
    N_RATE_ACTIONS,
    DecisionRecord,
    decode_action1,
    decode_action2,
)
from .net import DuelingNet, backward_batch, copy_into, sgd_step
from .records import EpisodeRecorder, EpisodeSummary
from .replay import PrioritizedMemory
from .simulate import ScenarioConfig, new_episode

#: Sub-stream tag separating agent randomness from episode traffic streams.
_AGENT_STREAM = 1 << 32

TRAIN_VARIANTS = ("eatsc", "null")


@dataclass
class TrainParams:
    """Training hyperparameters (defaults follow the reference setup)."""

    gamma: float = 0.95
    learning_rate: float = 0.005
    batch_size: int = 32
    target_update_period: int = 40
    greedy_decrement: float = 0.008
    min_greedy: float = 0.02
    memory_size: int = 500
    alpha: float = 0.6
    beta_start: float = 0.4
    beta_anneal_iters: int = 40000
    train_gate_records: int = 0
    n_hidden: int = 20

    @property
    def gate(self) -> int:
        """Records required in memory before training starts.

        Defaults to a full memory; configurable down to the batch size.
        """
        return self.train_gate_records or self.memory_size


def epsilon_after(n_decisions: int, delta: float = 0.008, eps_min: float = 0.02) -> float:
    """Exploration rate after ``n_decisions`` signal switches: max(1 - delta*n, eps_min)."""
    return max(1.0 - delta * n_decisions, eps_min)


def select_action(net: DuelingNet, state, epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy action: explore uniformly, otherwise argmax of Q."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0,1], got {epsilon}")
    if rng.random() < epsilon:
        return int(rng.integers(net.n_actions))
    return int(np.argmax(net.forward(state)))


def compute_target(
    record: DecisionRecord,
    main: DuelingNet,
    target: DuelingNet,
    gamma: float = 0.95,
    state_scale: float = 1.0,
) -> float:
    """Double-DQN target: r + gamma * Q_target(s', argmax_a Q_main(s', a)).

    Terminal records return the bare reward. ``state_scale`` converts raw
    counts into the networks' normalized input.
    """
    if not main.same_architecture(target):
        raise ValueError("main and target networks must share an architecture")
    if record.terminal:
        return float(record.reward)
    s2 = np.asarray(record.next_state, dtype=np.float64) * state_scale
    best = int(np.argmax(main.forward(s2)))
    return float(record.reward + gamma * target.forward(s2)[best])


class Agent:
    """One learner: main/target networks plus its replay memory."""

    def __init__(self, n_actions: int, params: TrainParams, seed: int):
        self.n_actions = n_actions
        self.main = DuelingNet(n_actions, n_hidden=params.n_hidden, seed=seed)
        self.target = DuelingNet(n_actions, n_hidden=params.n_hidden, seed=seed)
        copy_into(self.main, self.target)
        self.memory = PrioritizedMemory(params.memory_size, params.alpha)


class AgentPair:
    """The two agents plus shared exploration / training bookkeeping.

    ``rate_agent`` is None for the null variant, which forces zero interest
    rates and learns only green durations.
    """

    def __init__(
        self,
        params: TrainParams,
        capacity: int,
        seeds: tuple[int, int],
        include_rate_agent: bool = True,
    ):
        self.params = params
        self.state_scale = 1.0 / capacity
        self.rate_agent = Agent(N_RATE_ACTIONS, params, seeds[0]) if include_rate_agent else None
        self.duration_agent = Agent(N_DURATION_ACTIONS, params, seeds[1])
        self.decisions = 0
        self.train_iters = 0

    @property
    def epsilon(self) -> float:
        return epsilon_after(self.decisions, self.params.greedy_decrement, self.params.min_greedy)

    @property
    def beta(self) -> float:
        """Importance exponent, annealed linearly from beta_start to 1."""
        p = self.params
        if p.beta_anneal_iters <= 0:
            return 1.0
        frac = min(1.0, self.train_iters / p.beta_anneal_iters)
        return p.beta_start + (1.0 - p.beta_start) * frac

    def active_agents(self):
        return [a for a in (self.rate_agent, self.duration_agent) if a is not None]

    def ready_to_train(self) -> bool:
        return all(len(a.memory) >= self.params.gate for a in self.active_agents())


def train_step(pair: AgentPair, rng: np.random.Generator):
    """One training iteration for every active agent.

    Per agent: sample a prioritized batch, build double-DQN targets, take a
    weighted-MSE gradient step on the main network, then refresh the sampled
    records' |TD| priorities against the updated network. Every
    ``target_update_period`` iterations the target networks are replaced by
    snapshots of the mains.
    """
    p = pair.params
    beta = pair.beta
    batch = p.batch_size
    rows = np.arange(batch)
    losses = []
    for agent in pair.active_agents():
        records, indices, weights = agent.memory.sample(batch, beta, rng)
        states = np.empty((batch, 4))
        next_states = np.empty((batch, 4))
        actions = np.empty(batch, dtype=np.intp)
        rewards = np.empty(batch)
        live = np.empty(batch)
        for i, r in enumerate(records):
            states[i] = r.state
            next_states[i] = r.next_state
            actions[i] = r.action
            rewards[i] = r.reward
            live[i] = 0.0 if r.terminal else 1.0
        states *= pair.state_scale
        next_states *= pair.state_scale

        # the target network is untouched by the update below, so its
        # next-state values are shared by target building and the refresh
        q_next_target = agent.target.forward(next_states)
        best = np.argmax(agent.main.forward(next_states), axis=1)
        targets = rewards + p.gamma * q_next_target[rows, best] * live
        loss, grads, _ = backward_batch(agent.main, states, actions, targets, weights)
        sgd_step(agent.main, grads, p.learning_rate)

        best = np.argmax(agent.main.forward(next_states), axis=1)
        new_targets = rewards + p.gamma * q_next_target[rows, best] * live
        q_now = agent.main.forward(states)[rows, actions]
        agent.memory.update_priorities(indices, np.abs(new_targets - q_now))
        losses.append(loss)
    pair.train_iters += 1
    if pair.train_iters % p.target_update_period == 0:
        for agent in pair.active_agents():
            copy_into(agent.main, agent.target)
    return losses


def episode_seed(run_seed: int, episode: int) -> int:
    """Episode seed derived from (run seed, episode index) only.

    Independent of controller behaviour, so different policies facing the
    same run seed see identical traffic (paired comparisons).
    """
    return int(np.random.SeedSequence((run_seed, episode)).generate_state(1, np.uint64)[0])


@dataclass
class RunResult:
    """Everything a training or baseline run produces, pre-serialization."""

    variant: str
    seed: int
    episodes: list[EpisodeSummary] = field(default_factory=list)
    decision_rows: list = field(default_factory=list)
    wait_rows: list = field(default_factory=list)
    per_queue_rows: list = field(default_factory=list)
    pair: AgentPair | None = None


def run_training(
    scenario: ScenarioConfig,
    params: TrainParams,
    max_episode: int,
    seed: int,
    variant: str = "eatsc",
) -> RunResult:
    """The two-agent training loop.

    Episodes run until the simulation horizon or a capacity failure. At each
    decision point both agents act on the shared state, the phase runs, the
    transition is appended to both memories (each with its own action), the
    exploration rate decays, and one training iteration runs once the
    memories have filled to the training gate.
    """
    if variant not in TRAIN_VARIANTS:
        raise ValueError(f"variant must be one of {TRAIN_VARIANTS}, got {variant!r}")
    include_rate = variant == "eatsc"

    root = np.random.SeedSequence((seed, _AGENT_STREAM))
    ss_actions, ss_net1, ss_net2 = root.spawn(3)
    rng = np.random.default_rng(ss_actions)
    net_seeds = (
        int(ss_net1.generate_state(1, np.uint64)[0]),
        int(ss_net2.generate_state(1, np.uint64)[0]),
    )
    pair = AgentPair(params, scenario.capacity, net_seeds, include_rate)
    result = RunResult(variant=variant, seed=seed, pair=pair)

    for ep in range(max_episode):
        ep_seed = episode_seed(seed, ep)
        sim = new_episode(scenario, ep_seed)
        recorder = EpisodeRecorder(ep, ep_seed)
        decision_index = 0
        while not sim.failed and sim.clock < scenario.max_sim_time:
            state = sim.observe()
            state_norm = state * pair.state_scale
            eps = pair.epsilon
            if include_rate:
                a1 = select_action(pair.rate_agent.main, state_norm, eps, rng)
                rates = decode_action1(a1)
            else:
                a1 = None
                rates = (0.0, 0.0)
            a2 = select_action(pair.duration_agent.main, state_norm, eps, rng)
            green = min(decode_action2(a2), scenario.max_sim_time - sim.clock)

            t_decision = sim.clock
            outcome = sim.apply_decision(rates, green)

            if include_rate:
                pair.rate_agent.memory.append(
                    DecisionRecord(state, a1, outcome.reward, outcome.next_state, outcome.failed)
                )
            pair.duration_agent.memory.append(
                DecisionRecord(state, a2, outcome.reward, outcome.next_state, outcome.failed)
            )
            pair.decisions += 1
            recorder.add(decision_index, t_decision, state, rates[0], rates[1], green, eps, outcome)
            decision_index += 1

            if pair.ready_to_train():
                train_step(pair, rng)

        result.episodes.append(recorder.summary(sim.clock, sim.failed))
        result.decision_rows.extend(recorder.decision_rows)
        result.wait_rows.extend(recorder.wait_rows)
        result.per_queue_rows.extend(recorder.per_queue_rows())
    return result
