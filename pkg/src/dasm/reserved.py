"""Maximal b-matching, plain and with affiliation reservations.

A reserved b-matching keeps, for every affiliation set ``S``, at least
``r(S)`` members strictly below their quota.  Vertices are integers
``0..len(quota)-1``; sets may overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

Edge = tuple[int, int]


class UnknownEdge(ValueError):
    """A matching refers to an edge that is not in the problem."""


@dataclass(frozen=True)
class ReservedProblem:
    quota: tuple[int, ...]
    edges: tuple[Edge, ...]
    affiliations: tuple[frozenset[int], ...] = ()
    reservation: tuple[int, ...] = ()

    def __post_init__(self):
        nv = len(self.quota)
        if any(q < 0 for q in self.quota):
            raise ValueError("quotas must be nonnegative")
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < nv and 0 <= v < nv):
                raise ValueError(f"edge ({u}, {v}) references an undeclared vertex")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add(key)
        if len(self.affiliations) != len(self.reservation):
            raise ValueError("one reservation per affiliation set is required")
        for s, r in zip(self.affiliations, self.reservation):
            if any(not 0 <= v < nv for v in s):
                raise ValueError("affiliation references an undeclared vertex")
            if not 0 <= r <= len(s):
                raise ValueError(f"reservation {r} outside [0, {len(s)}]")

    @classmethod
    def create(cls, quota: Sequence[int], edges, affiliations=(), reservation=()) -> ReservedProblem:
        return cls(
            quota=tuple(int(q) for q in quota),
            edges=tuple((int(u), int(v)) for u, v in edges),
            affiliations=tuple(frozenset(int(v) for v in s) for s in affiliations),
            reservation=tuple(int(r) for r in reservation),
        )

    @property
    def vertices(self) -> range:
        return range(len(self.quota))


@dataclass
class WorkCounter:
    """Counts elementary edge checks, for the linear-time instrumentation."""

    steps: int = 0


@dataclass(frozen=True)
class BMatching:
    chosen: tuple[Edge, ...] = field(default=())

    def degrees(self, nv: int) -> list[int]:
        deg = [0] * nv
        for u, v in self.chosen:
            deg[u] += 1
            deg[v] += 1
        return deg

    def __len__(self) -> int:
        return len(self.chosen)


def greedy_core(edges, residual: list[int], sets_of=None, unfilled=None,
                reservation=None, counter: WorkCounter | None = None) -> list[Edge]:
    """Scan ``edges`` once and add each one that keeps the matching reserved.

    ``residual`` is consumed in place.  ``sets_of[v]`` lists the indices of
    the affiliation sets containing ``v``; ``unfilled[k]`` counts members of
    set ``k`` that are still below quota and is updated in place.
    """
    chosen = []
    steps = 0
    if sets_of is None:
        for u, v in edges:
            steps += 1
            if residual[u] > 0 and residual[v] > 0:
                residual[u] -= 1
                residual[v] -= 1
                chosen.append((u, v))
    else:
        for u, v in edges:
            steps += 1
            ru, rv = residual[u], residual[v]
            if ru <= 0 or rv <= 0:
                continue
            filling = []
            if ru == 1:
                filling.extend(sets_of[u])
            if rv == 1:
                filling.extend(sets_of[v])
            if filling:
                steps += len(filling)
                drop: dict[int, int] = {}
                for k in filling:
                    drop[k] = drop.get(k, 0) + 1
                if any(unfilled[k] - d < reservation[k] for k, d in drop.items()):
                    continue
                for k, d in drop.items():
                    unfilled[k] -= d
            residual[u] = ru - 1
            residual[v] = rv - 1
            chosen.append((u, v))
    if counter is not None:
        counter.steps += steps
    return chosen


def _membership(p: ReservedProblem) -> tuple[list[list[int]] | None, list[int]]:
    if not p.affiliations:
        return None, []
    sets_of: list[list[int]] = [[] for _ in p.vertices]
    for k, s in enumerate(p.affiliations):
        for v in s:
            sets_of[v].append(k)
    unfilled = [sum(1 for v in s if p.quota[v] > 0) for s in p.affiliations]
    return sets_of, unfilled


def greedy_reserved(p: ReservedProblem, counter: WorkCounter | None = None) -> BMatching:
    """Greedy reserved maximal b-matching in input edge order, O(|E|) for disjoint sets."""
    sets_of, unfilled = _membership(p)
    residual = list(p.quota)
    chosen = greedy_core(p.edges, residual, sets_of, unfilled, list(p.reservation), counter)
    return BMatching(tuple(chosen))


def greedy_maximal(vertices, edges, quota, counter: WorkCounter | None = None) -> BMatching:
    """Plain greedy maximal b-matching.

    ``vertices`` is either a count or an iterable of ``0..k-1``; ``quota`` is
    indexed by vertex.
    """
    nv = vertices if isinstance(vertices, int) else len(list(vertices))
    if len(quota) != nv:
        raise ValueError("one quota per vertex is required")
    return greedy_reserved(ReservedProblem.create(quota, edges), counter)


def _check_edges(p: ReservedProblem, m: BMatching) -> None:
    known = {(min(u, v), max(u, v)) for u, v in p.edges}
    keys = [(min(u, v), max(u, v)) for u, v in m.chosen]
    for key in keys:
        if key not in known:
            raise UnknownEdge(f"edge {key} is not in the problem")
    if len(set(keys)) != len(keys):
        raise UnknownEdge("edge chosen twice")


def _feasible(p: ReservedProblem, deg: Sequence[int]) -> bool:
    if any(d > q for d, q in zip(deg, p.quota)):
        return False
    for s, r in zip(p.affiliations, p.reservation):
        if sum(1 for v in s if deg[v] < p.quota[v]) < r:
            return False
    return True


def is_reserved_b_matching(p: ReservedProblem, m: BMatching) -> bool:
    _check_edges(p, m)
    return _feasible(p, m.degrees(len(p.quota)))


def is_maximal(p: ReservedProblem, m: BMatching) -> bool:
    """True iff no unchosen edge can be added without breaking a constraint."""
    _check_edges(p, m)
    deg = m.degrees(len(p.quota))
    taken = {(min(u, v), max(u, v)) for u, v in m.chosen}
    for u, v in p.edges:
        if (min(u, v), max(u, v)) in taken:
            continue
        deg[u] += 1
        deg[v] += 1
        ok = _feasible(p, deg)
        deg[u] -= 1
        deg[v] -= 1
        if ok:
            return False
    return True
