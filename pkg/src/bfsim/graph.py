"""Leader-follower sensing topology and gain feasibility checks.

Agents are numbered 1..n with agent 1 the leader. Each follower i senses
only lower-numbered agents, so the digraph is acyclic with a directed
spanning tree rooted at the leader. A renumbering helper is provided for
graphs that arrive with arbitrary labels.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidGain
from .reporting import ValidationReport


@dataclass(frozen=True)
class SensingGraph:
    """Static sensing topology: ``neighbors[i - 1]`` is the set N_i of agent i.

    The constructor checks only container shape; semantic requirements
    (leader senses nothing, followers sense lower-numbered agents, ...)
    are checked by :func:`validate_topology` so that malformed topologies
    can be reported rather than rejected at parse time.
    """

    n: int
    neighbors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 agents, got n={self.n}")
        if len(self.neighbors) != self.n:
            raise ValueError(
                f"neighbors has {len(self.neighbors)} entries for n={self.n}")
        coerced = tuple(tuple(int(j) for j in nbrs) for nbrs in self.neighbors)
        object.__setattr__(self, "neighbors", coerced)

    def neighbors_of(self, agent: int) -> tuple[int, ...]:
        return self.neighbors[agent - 1]

    def cardinality(self, agent: int) -> int:
        return len(self.neighbors[agent - 1])

    @property
    def followers(self) -> range:
        return range(2, self.n + 1)

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """All sensing edges (i, j) with j in N_i, in agent order."""
        return tuple((i, j) for i in range(1, self.n + 1)
                     for j in self.neighbors[i - 1])


def validate_topology(g: SensingGraph) -> ValidationReport:
    """Check the leader-follower invariants and leader reachability.

    The structural checks (leader senses nothing, every follower senses at
    least one lower-numbered agent, no duplicates) already imply a directed
    path from every agent to the leader; reachability is nevertheless
    re-verified by explicit traversal as an independent cross-check.
    """
    report = ValidationReport()

    if g.neighbors[0]:
        report.add_fail("leader_senses_nothing",
                        f"N_1 = {list(g.neighbors[0])}, expected empty")
    else:
        report.add_pass("leader_senses_nothing")

    bad_empty = [i for i in g.followers if not g.neighbors_of(i)]
    if bad_empty:
        report.add_fail("followers_have_neighbors",
                        f"agents {bad_empty} have empty neighbor sets")
    else:
        report.add_pass("followers_have_neighbors")

    bad_range = []
    for i in g.followers:
        for j in g.neighbors_of(i):
            if not 1 <= j <= i - 1:
                bad_range.append((i, j))
    if bad_range:
        report.add_fail("neighbors_lower_numbered",
                        f"edges {bad_range} point outside {{1..i-1}}")
    else:
        report.add_pass("neighbors_lower_numbered")

    dup = [i for i in range(1, g.n + 1)
           if len(set(g.neighbors_of(i))) != len(g.neighbors_of(i))]
    if dup:
        report.add_fail("no_duplicate_neighbors", f"agents {dup} repeat a neighbor")
    else:
        report.add_pass("no_duplicate_neighbors")

    unreachable = _unreachable_from_leader(g)
    if unreachable:
        report.add_fail("leader_reachable",
                        f"no directed path to agent 1 from agents {unreachable}")
    else:
        report.add_pass("leader_reachable")

    return report


def _unreachable_from_leader(g: SensingGraph) -> list[int]:
    """Agents with no directed sensing path to agent 1 (graph traversal)."""
    unreachable = []
    for start in range(2, g.n + 1):
        seen = {start}
        stack = [start]
        found = False
        while stack:
            node = stack.pop()
            if node == 1:
                found = True
                break
            for j in g.neighbors_of(node):
                if 1 <= j <= g.n and j not in seen:
                    seen.add(j)
                    stack.append(j)
        if not found:
            unreachable.append(start)
    return unreachable


def max_kp(cardinality: int, kd: float) -> float:
    """Upper bound on the position gain: ``4/N - 4/(kd^2 N^3)``.

    The bound is sufficient (not necessary) for exponential formation
    tracking and requires ``kd > 1``.

    Raises
    ------
    InvalidGain
        If ``kd <= 1``; the bound is meaningless there.
    """
    if cardinality < 1:
        raise ValueError(f"cardinality must be >= 1, got {cardinality}")
    if kd <= 1.0:
        raise InvalidGain(f"kd must exceed 1, got {kd}")
    n = float(cardinality)
    return 4.0 / n - 4.0 / (kd * kd * n ** 3)


def validate_gains(g: SensingGraph, gains) -> ValidationReport:
    """Per-follower gain feasibility.

    ``gains`` maps agent id -> object with ``kp`` and ``kd`` attributes
    (a ``ControlGains`` works). ``kd <= 1`` and ``kp <= 0`` are failures;
    ``kp`` at or above the sufficient bound is only a warning, since the
    bound is not necessary and hardware has been flown beyond it.
    """
    report = ValidationReport()
    for i in g.followers:
        gi = gains[i]
        name = f"gains_agent_{i}"
        if gi.kd <= 1.0:
            report.add_fail(name, f"kd = {gi.kd} must exceed 1")
            continue
        if gi.kp <= 0.0:
            report.add_fail(name, f"kp = {gi.kp} must be positive")
            continue
        bound = max_kp(g.cardinality(i), gi.kd)
        if gi.kp < bound:
            report.add_pass(name, f"kp = {gi.kp} < bound {bound:.4f}")
        else:
            report.add_warn(
                name,
                f"kp = {gi.kp} >= sufficient bound {bound:.4f} "
                f"(N_i = {g.cardinality(i)}, kd = {gi.kd}); convergence not guaranteed")
    return report


def renumber_leader_first(neighbor_map: dict[int, set[int] | list[int] | tuple[int, ...]]
                          ) -> tuple[dict[int, int], SensingGraph]:
    """Relabel an arbitrarily-numbered leader-follower digraph canonically.

    ``neighbor_map`` maps agent label -> labels it senses. Exactly one
    agent (the leader) must sense nothing, and a topological order must
    exist. Returns ``(old_label -> new_id, graph)`` with the leader first
    and every agent's neighbors lower-numbered.
    """
    labels = sorted(neighbor_map)
    roots = [a for a in labels if not neighbor_map[a]]
    if len(roots) != 1:
        raise ValueError(f"expected exactly one leader, found {roots}")

    order: list[int] = []
    placed: set[int] = set()
    remaining = set(labels)
    while remaining:
        ready = sorted(a for a in remaining
                       if all(j in placed for j in neighbor_map[a]))
        if not ready:
            raise ValueError(f"cycle among agents {sorted(remaining)}")
        for a in ready:
            order.append(a)
            placed.add(a)
            remaining.discard(a)

    mapping = {old: new + 1 for new, old in enumerate(order)}
    neighbors = tuple(
        tuple(sorted(mapping[j] for j in neighbor_map[old]))
        for old in order)
    return mapping, SensingGraph(n=len(order), neighbors=neighbors)
