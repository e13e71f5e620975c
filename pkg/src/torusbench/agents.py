"""Agent decision policies: local search, oracle pursuit, random walk.

Every policy is a pure function of its inputs plus an explicit random stream,
so identical inputs and stream state always reproduce the same action.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from .grid import (
    ACTIONS,
    DELTA_TO_ACTION,
    MOVE_ACTIONS,
    Action,
    Environment,
    Position,
    apply_action,
    reward_at,
    torus_chebyshev,
)

__all__ = [
    "AgentSpec",
    "AgentState",
    "CommMethod",
    "Policy",
    "greedy_step_toward",
    "local_search_decide",
    "oracle_decide",
    "random_decide",
]


class Policy(Enum):
    LOCAL_SEARCH = "local_search"
    ORACLE = "oracle"
    RANDOM = "random"


class CommMethod(Enum):
    TALKING = "talking"
    STIGMERGY = "stigmergy"
    IMITATION = "imitation"
    NONE = "none"


@dataclass(frozen=True, slots=True)
class AgentSpec:
    """What an agent is: its decision policy, communication method, and a
    stable small-integer identity used to key its random streams."""

    policy: Policy
    comm: CommMethod
    id: int

    def __post_init__(self) -> None:
        # Oracle and random agents donate observations to others but never
        # originate a communication method of their own.
        if self.policy in (Policy.ORACLE, Policy.RANDOM) and self.comm is not CommMethod.NONE:
            raise ValueError(f"{self.policy.value} agents cannot use a communication method")


@dataclass(slots=True)
class AgentState:
    id: int
    pos: Position
    last_action: Action = Action.STAY


def _axis_step(a: int, b: int, m: int) -> int:
    """Unit step along one axis from a toward b over the shorter wrap; on an
    exact half-torus tie the positive direction is taken."""
    fwd = (b - a) % m
    if fwd == 0:
        return 0
    return 1 if fwd <= m - fwd else -1


def greedy_step_toward(frm: Position, to: Position, m: int) -> Action:
    """The action stepping each nonzero axis toward `to` along its shorter
    wrap. Strictly decreases the chessboard distance by one whenever it is
    positive; returns STAY at distance zero. A target inside the Moore window
    is entered directly."""
    return DELTA_TO_ACTION[(_axis_step(frm[0], to[0], m), _axis_step(frm[1], to[1], m))]


def local_search_decide(
    info: Mapping[Position, float],
    state: AgentState,
    rng: np.random.Generator,
    m: int,
) -> Action:
    """Head for the best-rewarded known cell.

    `info` is the merged per-cell reward map: the agent's own exact window
    plus whatever peers contributed this iteration. A best cell inside the
    Moore window is entered directly; a remote best cell (known only through
    communication) is approached one greedy chessboard step at a time, with
    a fresh decision every iteration. Exact ties are broken uniformly at
    random.
    """
    best = max(info.values())
    targets = [p for p, v in info.items() if v == best]
    if len(targets) > 1:
        # Sort so the draw depends only on the tied set, never on the
        # insertion order of the map.
        targets.sort()
        target = targets[rng.integers(len(targets))]
    else:
        target = targets[0]
    return greedy_step_toward(state.pos, target, m)


def oracle_decide(env: Environment, state: AgentState) -> Action:
    """Chase the good object using knowledge of its movement pattern.

    Minimizes the chessboard distance to the object's anticipated position
    (one pattern step ahead); among minimizers prefers the highest immediate
    reward, then the first in action-enumeration order. Fully deterministic,
    and blind to the evil object by definition.
    """
    next_good = apply_action(env.pos_good, env.pattern_good.current_action, env.m)
    best_action = None
    best_key = None
    for a in ACTIONS:
        landing = apply_action(state.pos, a, env.m)
        key = (torus_chebyshev(landing, next_good, env.m), -reward_at(landing, env))
        if best_key is None or key < best_key:
            best_key = key
            best_action = a
    return best_action


def random_decide(rng: np.random.Generator, include_stay: bool = False) -> Action:
    """Uniform draw over the 8 neighbor moves (or all 9 with include_stay)."""
    pool = ACTIONS if include_stay else MOVE_ACTIONS
    return pool[rng.integers(len(pool))]
