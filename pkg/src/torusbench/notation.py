"""Compact group notation: parse and render strings like "SL10" or "SL9&O1".

A group is one or more terms joined by '&'. Each term is an agent-kind token
followed by a positive decimal count. Kind tokens map onto (policy,
communication) pairs:

    SL  local search + stigmergy      TL  local search + talking
    IL  local search + imitation      O   oracle        R   random
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .agents import AgentSpec, CommMethod, Policy

__all__ = [
    "AgentKind",
    "GroupNotation",
    "GroupParseError",
    "composition_of",
    "kind_of",
    "parse_group",
    "render_group",
    "roster_from_notation",
]


class AgentKind(Enum):
    SL = (Policy.LOCAL_SEARCH, CommMethod.STIGMERGY)
    TL = (Policy.LOCAL_SEARCH, CommMethod.TALKING)
    IL = (Policy.LOCAL_SEARCH, CommMethod.IMITATION)
    O = (Policy.ORACLE, CommMethod.NONE)
    R = (Policy.RANDOM, CommMethod.NONE)

    @property
    def policy(self) -> Policy:
        return self.value[0]

    @property
    def comm(self) -> CommMethod:
        return self.value[1]


# Longest tokens first so "SL" never half-matches as an unknown "S".
_TOKENS = sorted((k.name for k in AgentKind), key=len, reverse=True)


class GroupParseError(ValueError):
    """Invalid group notation; `position` is the offending 0-based index."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class GroupNotation:
    """An ordered list of (kind, count) terms; kinds unique, counts >= 1."""

    terms: tuple[tuple[AgentKind, int], ...]

    @property
    def total(self) -> int:
        return sum(c for _, c in self.terms)


def parse_group(text: str) -> GroupNotation:
    if not text:
        raise GroupParseError("empty group notation", 0)
    terms: list[tuple[AgentKind, int]] = []
    seen: set[AgentKind] = set()
    pos = 0
    while True:
        kind = None
        for token in _TOKENS:
            if text.startswith(token, pos):
                kind = AgentKind[token]
                break
        if kind is None:
            raise GroupParseError(f"unknown agent kind in {text!r}", pos)
        pos += len(kind.name)
        if kind in seen:
            raise GroupParseError(f"duplicate kind {kind.name}", pos - len(kind.name))
        seen.add(kind)

        digits_start = pos
        while pos < len(text) and text[pos].isdigit():
            pos += 1
        if pos == digits_start:
            raise GroupParseError(f"missing count after {kind.name}", pos)
        count = int(text[digits_start:pos])
        if count < 1:
            raise GroupParseError(f"count must be >= 1, got {count}", digits_start)
        terms.append((kind, count))

        if pos == len(text):
            return GroupNotation(tuple(terms))
        if text[pos] != "&":
            raise GroupParseError(f"trailing garbage in {text!r}", pos)
        pos += 1
        if pos == len(text):
            raise GroupParseError("dangling '&'", pos)


def render_group(notation: GroupNotation) -> str:
    return "&".join(f"{kind.name}{count}" for kind, count in notation.terms)


def roster_from_notation(notation: GroupNotation) -> tuple[AgentSpec, ...]:
    """Expand notation into agent specs with ids 0..n-1 in term order."""
    roster = []
    next_id = 0
    for kind, count in notation.terms:
        for _ in range(count):
            roster.append(AgentSpec(policy=kind.policy, comm=kind.comm, id=next_id))
            next_id += 1
    return tuple(roster)


def kind_of(spec: AgentSpec) -> AgentKind:
    for kind in AgentKind:
        if kind.policy is spec.policy and kind.comm is spec.comm:
            return kind
    raise ValueError(f"no notation token for policy={spec.policy}, comm={spec.comm}")


def composition_of(notation: GroupNotation) -> dict[AgentKind, int]:
    return dict(notation.terms)
