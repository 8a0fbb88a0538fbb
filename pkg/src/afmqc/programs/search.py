"""Pulse-sequence synthesis.

:func:`find_sequence` is a breadth-first search over classical
configurations. :func:`repair_conjugated` looks for the smallest edit of a
literal pulse list that makes a conjugated program ``X + core + reverse(X)``
map every start configuration to its goal.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

from afmqc.chain import ChainConfig, PulseClass, all_classes, apply_pi
from afmqc.programs.core import PulseProgram, pi_program

DEFAULT_NODE_CAP = 10_000_000


class NotFound(LookupError):
    """No program within the length bound reaches the goal."""


class SearchSpaceExceeded(RuntimeError):
    """The search visited more configurations than its node cap allows."""


def find_sequence(
    start: ChainConfig,
    goal: ChainConfig,
    max_len: int,
    allowed: Optional[Iterable[PulseClass]] = None,
    node_cap: int = DEFAULT_NODE_CAP,
    name: str = "search",
) -> PulseProgram:
    """Shortest pi-pulse program from ``start`` to ``goal``.

    Among programs of minimal length the lexicographically smallest one
    (A before B before D, then ascending m) is returned. Expanding
    children in that order and keeping the first parent that reaches a
    configuration gives exactly that program.
    """
    if (start.n, start.dopant) != (goal.n, goal.dopant):
        raise ValueError("start and goal must share N and dopant site")
    if allowed is None:
        allowed = all_classes(dopant=start.dopant is not None)
    classes = sorted(set(allowed))
    if start == goal:
        return PulseProgram(name, ())
    parent: dict[ChainConfig, tuple[ChainConfig, PulseClass]] = {start: None}
    frontier = deque([start])
    for _ in range(max_len):
        nxt = deque()
        while frontier:
            config = frontier.popleft()
            for cls in classes:
                child = apply_pi(config, cls)
                if child in parent:
                    continue
                parent[child] = (config, cls)
                if child == goal:
                    return pi_program(name, _walk_back(parent, child))
                if len(parent) > node_cap:
                    raise SearchSpaceExceeded(f"visited more than {node_cap} configurations")
                nxt.append(child)
        if not nxt:
            break
        frontier = nxt
    raise NotFound(f"no program of length <= {max_len} reaches the goal")


def _walk_back(parent, node) -> list[PulseClass]:
    path = []
    while parent[node] is not None:
        node, cls = parent[node]
        path.append(cls)
    return path[::-1]


@dataclass(frozen=True)
class Repair:
    """Result of :func:`repair_conjugated`."""

    pulses: tuple[PulseClass, ...]
    distance: int
    changed: tuple[int, ...]


def repair_conjugated(
    literal: Sequence[PulseClass],
    core: Sequence[PulseClass],
    cases: Sequence[tuple[ChainConfig, ChainConfig]],
    alphabet: Sequence[PulseClass],
    max_distance: int,
    min_distance: int = 0,
) -> list[Repair]:
    """All minimal-distance edits ``W`` of ``literal`` solving every case.

    A case ``(s, g)`` is solved when ``W + core + reverse(W)`` maps ``s``
    to ``g``. Because every pi-pulse is an involution this is checked as
    ``core(W(s)) == W(g)``. Candidates are enumerated against the first
    case and confirmed on the rest. Returns an empty list if no edit of
    at most ``max_distance`` positions works. Distances below
    ``min_distance`` are not tried.
    """
    if not cases:
        raise ValueError("need at least one case")
    literal = list(literal)
    alphabet = sorted(set(alphabet))
    for d in range(min_distance, max_distance + 1):
        found = []
        for positions in combinations(range(len(literal)), d):
            choices = [[c for c in alphabet if c != literal[p]] for p in positions]
            for repl in product(*choices):
                w = list(literal)
                for p, c in zip(positions, repl):
                    w[p] = c
                if all(_conjugate_ok(w, core, s, g) for s, g in cases):
                    found.append(Repair(tuple(w), d, positions))
        if found:
            found.sort(key=lambda r: [c.sort_key() for c in r.pulses])
            return found
    return []


def _conjugate_ok(w, core, s: ChainConfig, g: ChainConfig) -> bool:
    for c in w:
        s = apply_pi(s, c)
        g = apply_pi(g, c)
    for c in core:
        s = apply_pi(s, c)
    return s == g
