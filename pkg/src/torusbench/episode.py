"""Episode execution and group scoring.

One episode runs the observe / communicate / act / advance-objects / reward
loop for a fixed number of iterations and logs every agent's reward per
iteration. The group intelligence score is the grand mean of that log;
batched evaluation repeats independent episodes from derived sub-seeds and
reports mean and dispersion.

Determinism contract: everything derives from explicit 64-bit seeds. Random
streams are keyed by (episode seed, agent id, iteration), never by roster
position or processing order, so permuting the roster or parallelizing over
agents cannot change any result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Optional

import numpy as np

from .agents import (
    AgentSpec,
    AgentState,
    CommMethod,
    Policy,
    local_search_decide,
    oracle_decide,
    random_decide,
)
from .comms import (
    imitation_select,
    merged_reward_map,
    stigmergy_exchange,
    talking_exchange,
)
from .grid import (
    ConfigurationError,
    Environment,
    MovementPattern,
    Position,
    apply_action,
    observe,
    random_pattern,
    reward_at,
    step_special_objects,
)

__all__ = [
    "DEFAULT_PATTERN_SEED",
    "EpisodeConfig",
    "GroupScore",
    "MissingKindError",
    "RewardLog",
    "episode_seed",
    "evaluate",
    "group_score",
    "run_episode",
    "weighted_average_baseline",
]

# Named seed for the default looping movement patterns. Held fixed so every
# configuration in a study faces the same movement task.
DEFAULT_PATTERN_SEED = 0x5EED_7A5C

_MASK64 = (1 << 64) - 1
_TAG_EPISODE = 0xE1
_TAG_INIT = 0x11
_TAG_AGENT = 0xA6


def _mix(*parts: int) -> int:
    """Splitmix-style avalanche over integer parts; stable across platforms."""
    h = 0x9E3779B97F4A7C15
    for p in parts:
        h = ((h ^ (p & _MASK64)) * 0xBF58476D1CE4E5B9) & _MASK64
        h ^= h >> 27
        h = (h * 0x94D049BB133111EB) & _MASK64
        h ^= h >> 31
    return h


def episode_seed(master_seed: int, index: int) -> int:
    """Sub-seed of episode `index`; a pure function of (master seed, index),
    so growing a batch never disturbs the episodes already in it."""
    return _mix(master_seed, _TAG_EPISODE, index)


class _LazyStream:
    """Per-(agent, iteration) random stream that only pays for generator
    construction if the agent actually draws."""

    __slots__ = ("_seed", "_gen")

    def __init__(self, seed: int):
        self._seed = seed
        self._gen = None

    def integers(self, *args, **kwargs):
        gen = self._gen
        if gen is None:
            gen = self._gen = np.random.Generator(np.random.PCG64(self._seed))
        return gen.integers(*args, **kwargs)


def agent_stream(ep_seed: int, agent_id: int, iteration: int) -> _LazyStream:
    return _LazyStream(_mix(ep_seed, _TAG_AGENT, agent_id, iteration))


@dataclass(frozen=True)
class EpisodeConfig:
    """Full parameterization of one experiment point."""

    m: int = 20
    roster: tuple[AgentSpec, ...] = ()
    iterations: int = 20
    seed: int = 0
    pattern_length: int = 64
    pattern_seed: int = DEFAULT_PATTERN_SEED
    random_includes_stay: bool = False
    # Explicit placements and patterns override the seeded initialization;
    # used by replay tests and demos that need a controlled geometry.
    initial_good: Optional[Position] = None
    initial_evil: Optional[Position] = None
    initial_agents: Optional[tuple[Position, ...]] = None
    pattern_good: Optional[MovementPattern] = None
    pattern_evil: Optional[MovementPattern] = None

    def __post_init__(self) -> None:
        if self.m < 5:
            raise ConfigurationError(f"grid side must be >= 5, got {self.m}")
        if not self.roster:
            raise ConfigurationError("roster must contain at least one agent")
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        if self.pattern_length < 1:
            raise ConfigurationError("pattern length must be >= 1")
        ids = [spec.id for spec in self.roster]
        if len(set(ids)) != len(ids):
            raise ConfigurationError("agent ids must be unique")
        if self.initial_agents is not None and len(self.initial_agents) != len(self.roster):
            raise ConfigurationError("initial_agents must match roster size")

    @property
    def n(self) -> int:
        return len(self.roster)


@lru_cache(maxsize=None)
def _default_patterns(length: int, seed: int) -> tuple[MovementPattern, MovementPattern]:
    # Good and evil follow independent sequences drawn from sub-seeds of the
    # named pattern seed.
    return (
        random_pattern(length, _mix(seed, 0)),
        random_pattern(length, _mix(seed, 1)),
    )


def build_patterns(config: EpisodeConfig) -> tuple[MovementPattern, MovementPattern]:
    good, evil = _default_patterns(config.pattern_length, config.pattern_seed)
    if config.pattern_good is not None:
        good = config.pattern_good
    if config.pattern_evil is not None:
        evil = config.pattern_evil
    return good, evil


@dataclass(frozen=True)
class RewardLog:
    """Per-agent, per-iteration rewards of one episode, plus the trajectory."""

    agent_ids: tuple[int, ...]
    rewards: np.ndarray  # shape (n, iterations)
    agent_track: np.ndarray  # shape (iterations, n, 2), post-move cells
    object_track: np.ndarray  # shape (iterations, 2, 2), post-move (good, evil)


def _initial_placement(config: EpisodeConfig, seed: int):
    m = config.m
    rng = np.random.Generator(np.random.PCG64(_mix(seed, _TAG_INIT)))

    def draw() -> Position:
        return Position(int(rng.integers(m)), int(rng.integers(m)))

    pos_good = config.initial_good if config.initial_good is not None else draw()
    pos_evil = config.initial_evil
    if pos_evil is None:
        pos_evil = draw()
        while pos_evil == pos_good:
            pos_evil = draw()
    elif pos_evil == pos_good:
        raise ConfigurationError("special objects must start on distinct cells")

    if config.initial_agents is not None:
        agent_pos = {spec.id: Position(*p) for spec, p in zip(config.roster, config.initial_agents)}
    else:
        # Drawn in ascending id order so the assignment is a function of
        # agent identity, not roster position.
        agent_pos = {spec.id: draw() for spec in sorted(config.roster, key=lambda s: s.id)}
    return pos_good, pos_evil, agent_pos


def run_episode(config: EpisodeConfig, seed: int) -> RewardLog:
    """Execute one episode.

    Iteration order: agents observe the pre-move snapshot, exchange
    information and all move simultaneously, the special objects take their
    next pattern step, and only then are rewards read off the renewed field
    at the agents' new positions.
    """
    m = config.m
    n = config.n
    pattern_good, pattern_evil = build_patterns(config)
    pos_good, pos_evil, agent_pos = _initial_placement(config, seed)
    env = Environment(m, pos_good, pos_evil, pattern_good, pattern_evil)
    states = [AgentState(spec.id, agent_pos[spec.id]) for spec in config.roster]

    rewards = np.empty((n, config.iterations))
    agent_track = np.empty((config.iterations, n, 2), dtype=np.int32)
    object_track = np.empty((config.iterations, 2, 2), dtype=np.int32)

    for i in range(config.iterations):
        observations = {s.id: observe(env, s.pos) for s in states}

        # Talking receivers all see the same exact union, and their own exact
        # window agrees with it; build that merged view once per iteration.
        talk_map = None
        chosen: list = [None] * n
        for j, spec in enumerate(config.roster):
            state = states[j]
            rng = agent_stream(seed, spec.id, i)
            if spec.policy is Policy.ORACLE:
                action = oracle_decide(env, state)
            elif spec.policy is Policy.RANDOM:
                action = random_decide(rng, config.random_includes_stay)
            else:
                comm = spec.comm
                if comm is CommMethod.TALKING:
                    if talk_map is None:
                        talk_map = merged_reward_map(talking_exchange(observations, state.id))
                        # Union over all agents: any receiver's map is this.
                    info = talk_map
                elif comm is CommMethod.STIGMERGY:
                    info = merged_reward_map(stigmergy_exchange(observations, state.id, rng))
                elif comm is CommMethod.IMITATION:
                    # No action history exists on the first iteration.
                    action = imitation_select(states, state.id, rng, m) if i > 0 else None
                    if action is not None:
                        chosen[j] = action
                        continue
                    info = dict(observations[state.id].cells)
                else:
                    info = dict(observations[state.id].cells)
                action = local_search_decide(info, state, rng, m)
            chosen[j] = action

        for j, state in enumerate(states):
            state.pos = apply_action(state.pos, chosen[j], m)
            state.last_action = chosen[j]
            agent_track[i, j] = state.pos

        env = step_special_objects(env)
        object_track[i, 0] = env.pos_good
        object_track[i, 1] = env.pos_evil

        for j, state in enumerate(states):
            rewards[j, i] = reward_at(state.pos, env)

    return RewardLog(
        agent_ids=tuple(spec.id for spec in config.roster),
        rewards=rewards,
        agent_track=agent_track,
        object_track=object_track,
    )


def group_score(log: RewardLog) -> float:
    """Group intelligence score: total reward over (agents x iterations)."""
    return float(log.rewards.mean())


@dataclass(frozen=True)
class GroupScore:
    """Aggregate of a batch of independent episodes."""

    mean: float
    std_dev: float
    episode_count: int
    config: EpisodeConfig
    episode_scores: np.ndarray = field(repr=False)
    # Mean reward of each roster slot per episode; feeds the subgroup
    # decomposition of heterogeneous runs.
    episode_agent_means: np.ndarray = field(repr=False)

    @property
    def std_err(self) -> float:
        return self.std_dev / (self.episode_count ** 0.5)

    def agent_means(self) -> np.ndarray:
        return self.episode_agent_means.mean(axis=0)


def evaluate(
    config: EpisodeConfig,
    episodes: int,
    master_seed: Optional[int] = None,
) -> GroupScore:
    """Run `episodes` independent episodes from sub-seeds of the master seed."""
    if episodes < 1:
        raise ConfigurationError("episode count must be >= 1")
    master = config.seed if master_seed is None else master_seed
    scores = np.empty(episodes)
    agent_means = np.empty((episodes, config.n))
    for k in range(episodes):
        log = run_episode(config, episode_seed(master, k))
        scores[k] = log.rewards.mean()
        agent_means[k] = log.rewards.mean(axis=1)
    std = float(scores.std(ddof=1)) if episodes > 1 else 0.0
    return GroupScore(
        mean=float(scores.mean()),
        std_dev=std,
        episode_count=episodes,
        config=config,
        episode_scores=scores,
        episode_agent_means=agent_means,
    )


class MissingKindError(KeyError):
    """A composition names an agent kind with no homogeneous score."""


def weighted_average_baseline(
    homo_scores: Mapping, composition: Mapping
) -> float:
    """Composition-weighted mean of homogeneous group scores: the reference
    level a same-size heterogeneous group is measured against."""
    missing = [k for k in composition if k not in homo_scores]
    if missing:
        raise MissingKindError(f"no homogeneous score for kind(s): {missing}")
    total = sum(composition.values())
    acc = 0.0
    for kind, count in composition.items():
        score = homo_scores[kind]
        value = score.mean if isinstance(score, GroupScore) else float(score)
        acc += count * value
    return acc / total
