"""Toroidal gridworld: geometry, reward field, special-object movement.

The world is an m-by-m grid with periodic boundaries. Two special objects
roam it along looping action patterns: a good one emitting positive reward
shells and an evil one emitting the exactly opposite negative shells. Agents
sense the reward field through a radius-1 Moore window; object identities are
never exposed, only rewards.

Axis convention (fixed for reproducibility): x is the column, y is the row,
"up" decrements y and "left" decrements x. Coordinates are 0-based and always
reduced modulo m.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple

import numpy as np

__all__ = [
    "Action",
    "ConfigurationError",
    "Environment",
    "MovementPattern",
    "Observation",
    "Position",
    "apply_action",
    "environment_entropy_bits",
    "observe",
    "pattern_complexity_bits",
    "random_pattern",
    "reward_at",
    "step_special_objects",
    "torus_chebyshev",
]


class ConfigurationError(ValueError):
    """Raised when simulation parameters violate a structural constraint."""


class Position(NamedTuple):
    x: int
    y: int


class Action(Enum):
    """The 9-move action alphabet; each value is the (dx, dy) step."""

    LEFT = (-1, 0)
    RIGHT = (1, 0)
    UP = (0, -1)
    DOWN = (0, 1)
    UP_LEFT = (-1, -1)
    UP_RIGHT = (1, -1)
    DOWN_LEFT = (-1, 1)
    DOWN_RIGHT = (1, 1)
    STAY = (0, 0)

    @property
    def dx(self) -> int:
        return self.value[0]

    @property
    def dy(self) -> int:
        return self.value[1]


ACTIONS = tuple(Action)
MOVE_ACTIONS = tuple(a for a in Action if a is not Action.STAY)
DELTA_TO_ACTION = {a.value: a for a in Action}

OPPOSITE_ACTION = {
    Action.LEFT: Action.RIGHT,
    Action.RIGHT: Action.LEFT,
    Action.UP: Action.DOWN,
    Action.DOWN: Action.UP,
    Action.UP_LEFT: Action.DOWN_RIGHT,
    Action.DOWN_RIGHT: Action.UP_LEFT,
    Action.UP_RIGHT: Action.DOWN_LEFT,
    Action.DOWN_LEFT: Action.UP_RIGHT,
    Action.STAY: Action.STAY,
}

# Reward by chessboard distance to a special object; beyond radius 3 the
# contribution is zero. The evil object uses the same table negated, so the
# two shells cancel exactly on any cell equidistant from both.
_SHELL = (1.0, 0.8, 0.5, 0.1)
_SHELL_RADIUS = 3

# Minimum grid side so a radius-3 shell cannot wrap onto itself.
MIN_GRID_SIDE = 5


def torus_chebyshev(a: Position | tuple, b: Position | tuple, m: int) -> int:
    """Chessboard distance on the m-torus: each axis takes the shorter wrap."""
    dx = abs(a[0] - b[0])
    if dx > m - dx:
        dx = m - dx
    dy = abs(a[1] - b[1])
    if dy > m - dy:
        dy = m - dy
    return dx if dx > dy else dy


def apply_action(p: Position, a: Action, m: int) -> Position:
    """Shift each coordinate by the action's component, wrapping modulo m."""
    d = a.value
    return Position((p[0] + d[0]) % m, (p[1] + d[1]) % m)


@dataclass(frozen=True, slots=True)
class MovementPattern:
    """A finite looping action sequence with a cursor into it."""

    actions: tuple[Action, ...]
    cursor: int = 0

    def __post_init__(self) -> None:
        if not self.actions:
            raise ConfigurationError("movement pattern must contain at least one action")
        if not 0 <= self.cursor < len(self.actions):
            raise ConfigurationError(
                f"pattern cursor {self.cursor} out of range [0, {len(self.actions)})"
            )

    @property
    def current_action(self) -> Action:
        return self.actions[self.cursor]

    def advanced(self) -> "MovementPattern":
        """The same pattern with the cursor moved one step, wrapping to 0."""
        return replace(self, cursor=(self.cursor + 1) % len(self.actions))


def random_pattern(length: int, seed: int) -> MovementPattern:
    """A looping pattern of `length` actions drawn uniformly from a fixed seed."""
    if length < 1:
        raise ConfigurationError("pattern length must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = rng.integers(0, len(ACTIONS), size=length)
    return MovementPattern(tuple(ACTIONS[i] for i in idx))


@dataclass(frozen=True, slots=True)
class Environment:
    """Immutable world snapshot: grid side, object positions, their patterns.

    Stepping produces a fresh value, so snapshots are safe to share across
    parallel episode workers.
    """

    m: int
    pos_good: Position
    pos_evil: Position
    pattern_good: MovementPattern
    pattern_evil: MovementPattern

    def __post_init__(self) -> None:
        if self.m < MIN_GRID_SIDE:
            raise ConfigurationError(
                f"grid side {self.m} < {MIN_GRID_SIDE}; radius-3 reward shells would self-overlap"
            )


def reward_at(cell: Position | tuple, env: Environment) -> float:
    """Reward of a cell: positive shell around the good object plus the
    exactly negated shell around the evil one. Always in [-1, +1]."""
    d = torus_chebyshev(cell, env.pos_good, env.m)
    r = _SHELL[d] if d <= _SHELL_RADIUS else 0.0
    d = torus_chebyshev(cell, env.pos_evil, env.m)
    return r - (_SHELL[d] if d <= _SHELL_RADIUS else 0.0)


def step_special_objects(env: Environment) -> Environment:
    """Advance both objects by their pattern's current action, cursors wrapping."""
    return Environment(
        m=env.m,
        pos_good=apply_action(env.pos_good, env.pattern_good.current_action, env.m),
        pos_evil=apply_action(env.pos_evil, env.pattern_evil.current_action, env.m),
        pattern_good=env.pattern_good.advanced(),
        pattern_evil=env.pattern_evil.advanced(),
    )


class Observation(NamedTuple):
    """The 9-cell Moore window around `origin` with the true reward of each cell."""

    origin: Position
    cells: tuple[tuple[Position, float], ...]


# Moore window in a fixed enumeration order (row-major around the center).
_MOORE_OFFSETS = tuple(
    (dx, dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1)
)


def observe(env: Environment, p: Position) -> Observation:
    """Radius-1 Moore neighborhood of p (center included), rewards only."""
    m = env.m
    cells = []
    for dx, dy in _MOORE_OFFSETS:
        c = Position((p[0] + dx) % m, (p[1] + dy) % m)
        cells.append((c, reward_at(c, env)))
    return Observation(origin=p, cells=tuple(cells))


def environment_entropy_bits(m: int) -> float:
    """Search-space uncertainty in bits: two objects placed independently and
    uniformly on m^2 cells, i.e. 2 * log2(m^2)."""
    if m < 1:
        raise ConfigurationError("grid side must be >= 1")
    return 2.0 * math.log2(m * m)


def pattern_complexity_bits(pattern: MovementPattern) -> float:
    """Upper-bound proxy for the movement-task complexity: the raw-deflate
    compressed size of the action sequence, in bits.

    True program-length complexity is uncomputable; a universal compressor
    gives a usable upper bound whose relative ordering is what experiments
    rely on (the pattern is held fixed across every configuration of a sweep).
    """
    data = bytes(ACTIONS.index(a) for a in pattern.actions)
    co = zlib.compressobj(level=9, wbits=-15)
    compressed = co.compress(data) + co.flush()
    return 8.0 * len(compressed)
