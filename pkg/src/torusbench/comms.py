"""Per-iteration information exchange between agents.

Three methods: talking (exact observation sharing), stigmergy (peers' cell
positions arrive but every peer reward is replaced by a random fake), and
imitation (copy a visible agent's previous action). All exchanges read a
frozen iteration-start snapshot, so computing every receiver in parallel, or
in any order, yields the same result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .agents import AgentState
from .grid import Action, Observation, Position, torus_chebyshev

__all__ = [
    "REWARD_ALPHABET",
    "SharedInfo",
    "imitation_select",
    "merged_reward_map",
    "stigmergy_exchange",
    "talking_exchange",
]

# The environment's native reward-value set; symmetric, so fake rewards are
# mean-zero directionless noise.
REWARD_ALPHABET = (-1.0, -0.8, -0.5, -0.1, 0.0, 0.1, 0.5, 0.8, 1.0)
_ALPHABET_ARRAY = np.array(REWARD_ALPHABET)


@dataclass(frozen=True, slots=True)
class SharedInfo:
    """Everything one agent knows at decision time: its own exact window,
    peer-contributed cells (exact or corrupted), and visible peers' previous
    actions when imitating."""

    own: Observation
    peer_cells: tuple[tuple[Position, float], ...] = ()
    peer_actions: tuple[tuple[int, Action], ...] = field(default=())


def _peers_in_id_order(observations: Mapping[int, Observation], receiver: int):
    # Ascending sender id keeps every receiver's view independent of roster
    # ordering, which the permutation-invariance contract relies on.
    return [(i, observations[i]) for i in sorted(observations) if i != receiver]


def talking_exchange(observations: Mapping[int, Observation], receiver: int) -> SharedInfo:
    """Exact sharing: the receiver gets every other agent's observed cells
    verbatim; overlapping cells agree by construction and are deduplicated."""
    seen: dict[Position, float] = {}
    for _, obs in _peers_in_id_order(observations, receiver):
        for cell, r in obs.cells:
            seen[cell] = r
    return SharedInfo(own=observations[receiver], peer_cells=tuple(seen.items()))


def stigmergy_exchange(
    observations: Mapping[int, Observation],
    receiver: int,
    rng: np.random.Generator,
) -> SharedInfo:
    """Corrupted sharing: peers' cell positions arrive intact but every peer
    reward is replaced by an independent uniform draw from the reward-value
    alphabet. The receiver's own observation stays exact."""
    peers = _peers_in_id_order(observations, receiver)
    n_cells = sum(len(obs.cells) for _, obs in peers)
    fakes = _ALPHABET_ARRAY[rng.integers(0, len(REWARD_ALPHABET), size=n_cells)]
    pairs = []
    k = 0
    for _, obs in peers:
        for cell, _ in obs.cells:
            pairs.append((cell, float(fakes[k])))
            k += 1
    return SharedInfo(own=observations[receiver], peer_cells=tuple(pairs))


def imitation_select(
    states: Sequence[AgentState],
    receiver: int,
    rng: np.random.Generator,
    m: int,
) -> Optional[Action]:
    """Pick one agent visible in the receiver's Moore window (uniformly when
    several) and return the action it took last iteration. None when nobody
    is in range, signalling a fall-back to plain local search."""
    me = next(s for s in states if s.id == receiver)
    visible = [s for s in states if s.id != receiver and torus_chebyshev(s.pos, me.pos, m) <= 1]
    if not visible:
        return None
    visible.sort(key=lambda s: s.id)
    if len(visible) == 1:
        return visible[0].last_action
    return visible[rng.integers(len(visible))].last_action


def merged_reward_map(shared: SharedInfo) -> dict[Position, float]:
    """Collapse SharedInfo into one per-cell reward map for decision-making.

    Peer cells land first in their exchange order (ascending sender id), so
    repeated positions resolve deterministically; the agent's own exact
    window is written last and overrides any peer claim about cells it can
    see itself.
    """
    info: dict[Position, float] = dict(shared.peer_cells)
    for cell, r in shared.own.cells:
        info[cell] = r
    return info
