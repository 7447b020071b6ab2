"""Priority graphs, PriorityMatch and SmartPriorityMatch.

Every applicant-employer pair the applicant likes is put on one of four
priority levels:

* ``g0`` affiliate pairs the employer likes both for itself and for the
  affiliate;
* ``g1`` non-affiliate pairs of mutual interest;
* ``g2`` affiliate pairs liked for the employer's own sake only;
* ``g3`` affiliate pairs liked only for the affiliate's sake.

``smart_priority_match`` runs a reserved greedy pass on ``g1`` that keeps
room for each employer's ``g0`` star, then plain greedy passes on ``g0``,
``g2`` and ``g3`` with residual quotas.  Its output does not depend on the
affiliate weight and is stable for every weight in [0, 1].
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .model import Instance, Matching
from .reserved import WorkCounter, greedy_core


@dataclass(frozen=True)
class PriorityGraphs:
    """Edge arrays of shape ``(k, 2)`` holding ``(applicant, employer)`` rows,
    sorted by employer then applicant."""

    g0: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    g3: np.ndarray

    def as_lists(self) -> dict[str, list[tuple[int, int]]]:
        return {name: [tuple(r) for r in getattr(self, name).tolist()]
                for name in ("g0", "g1", "g2", "g3")}


def _edges(mask_ea: np.ndarray) -> np.ndarray:
    e_idx, a_idx = np.nonzero(mask_ea)
    return np.stack([a_idx, e_idx], axis=1).astype(np.int64).reshape(-1, 2)


def _affiliate_edges(a_idx: np.ndarray, owner: np.ndarray, keep: np.ndarray) -> np.ndarray:
    a_idx, e_idx = a_idx[keep], owner[keep]
    order = np.lexsort((a_idx, e_idx))
    return np.stack([a_idx[order], e_idx[order]], axis=1).astype(np.int64).reshape(-1, 2)


def build_priority_graphs(inst: Instance) -> PriorityGraphs:
    n, m = inst.n, inst.m
    a_idx = np.arange(n, dtype=np.int64)
    owner = np.asarray(inst.owner, dtype=np.int64).reshape(n)
    # Only g1 needs the full table; the other graphs live on the n affiliate pairs.
    mutual = inst.pref_employer_own & inst.pref_applicant.T   # [e, a]
    mutual = mutual.astype(bool)
    mutual[owner, a_idx] = False
    likes = inst.pref_applicant[a_idx, owner].astype(bool)
    own = inst.pref_employer_own[owner, a_idx].astype(bool)
    for_aff = inst.pref_affiliate[a_idx, owner].astype(bool)
    return PriorityGraphs(
        g0=_affiliate_edges(a_idx, owner, likes & own & for_aff),
        g1=_edges(mutual),
        g2=_affiliate_edges(a_idx, owner, likes & own & ~for_aff),
        g3=_affiliate_edges(a_idx, owner, likes & for_aff & ~own),
    )


@dataclass
class Phase:
    name: str
    edges: np.ndarray
    residual_applicant: tuple[int, ...]
    residual_employer: tuple[int, ...]
    chosen: list[tuple[int, int]]
    reservations: dict[int, int] = field(default_factory=dict)


class Algorithm(enum.Enum):
    SMART = "smart"
    NAIVE = "naive"


@dataclass
class SolveResult:
    matching: Matching
    phases: list[Phase]
    algorithm: Algorithm

    def trace_dict(self, inst: Instance) -> dict:
        A, E = inst.applicant_names, inst.employer_names
        out = []
        for ph in self.phases:
            entry = {
                "phase": ph.name,
                "candidate_edges": len(ph.edges),
                "residual_quota": {
                    **{A[a]: q for a, q in enumerate(ph.residual_applicant)},
                    **{E[e]: q for e, q in enumerate(ph.residual_employer)},
                },
                "chosen": [[A[a], E[e]] for a, e in ph.chosen],
            }
            if ph.reservations:
                entry["reservations"] = {E[e]: r for e, r in sorted(ph.reservations.items())}
            out.append(entry)
        return {"algorithm": self.algorithm.value, "phases": out}


def _scan_by_employer(edges: np.ndarray, residual: list[int], n: int):
    """Yield ``(a, n + e)`` in order, skipping edges the greedy would reject on capacity.

    Within each employer block, applicants already at quota are filtered out
    up front and the block is abandoned once the employer is full.  The
    greedy consumes edges one at a time, so ``residual`` is current whenever
    this generator resumes.
    """
    if not len(edges):
        return
    a_col = edges[:, 0]
    e_col = edges[:, 1]
    alive = np.array(residual[:n], dtype=np.int64) > 0
    cuts = (np.flatnonzero(np.diff(e_col)) + 1).tolist()
    for start, stop in zip([0] + cuts, cuts + [len(a_col)]):
        v = int(e_col[start]) + n
        if residual[v] <= 0:
            continue
        block = a_col[start:stop]
        for a in block[alive[block]].tolist():
            yield a, v
            if residual[a] <= 0:
                alive[a] = False
            if residual[v] <= 0:
                break


def _greedy_phase(name, edges, res_a, res_e, n, counter, sets_of=None,
                  unfilled=None, reservation=None, reservations=None) -> Phase:
    """Greedy pass over ``(a, e)`` edges; ``res_a`` and ``res_e`` are consumed."""
    before_a, before_e = tuple(res_a), tuple(res_e)
    residual = res_a + res_e
    vertex_edges = _scan_by_employer(edges, residual, n)
    picked = greedy_core(vertex_edges, residual, sets_of, unfilled, reservation, counter)
    res_a[:] = residual[:n]
    res_e[:] = residual[n:]
    chosen = [(u, v - n) for u, v in picked]
    return Phase(name, edges, before_a, before_e, chosen, reservations or {})


def _naive(inst: Instance, counter: WorkCounter | None = None) -> SolveResult:
    graphs = build_priority_graphs(inst)
    res_a, res_e = list(inst.applicant_quota), list(inst.employer_quota)
    phases = [
        _greedy_phase(name, getattr(graphs, name), res_a, res_e, inst.n, counter)
        for name in ("g0", "g1", "g2", "g3")
    ]
    pairs = [p for ph in phases for p in ph.chosen]
    return SolveResult(Matching.of(pairs), phases, Algorithm.NAIVE)


def _smart(inst: Instance, counter: WorkCounter | None = None) -> SolveResult:
    n, m = inst.n, inst.m
    graphs = build_priority_graphs(inst)
    q_a, q_e = list(inst.applicant_quota), list(inst.employer_quota)

    # g0 is a union of stars centred on employers.  Applicants with no
    # capacity can never take a g0 edge, so they are left out of the star.
    star: list[list[int]] = [[] for _ in range(m)]
    for a, e in graphs.g0.tolist():
        if q_a[a] > 0:
            star[e].append(a)
    keep = [min(len(star[e]), q_e[e]) for e in range(m)]

    set_ids = [e for e in range(m) if star[e]]
    sets_of: list[list[int]] = [[] for _ in range(n + m)]
    for k, e in enumerate(set_ids):
        for a in star[e]:
            sets_of[a].append(k)
    unfilled = [len(star[e]) for e in set_ids]
    reservation = [keep[e] for e in set_ids]

    res_a = list(q_a)
    res_e = [q_e[e] - keep[e] for e in range(m)]
    phase1 = _greedy_phase(
        "reserved_g1", graphs.g1, res_a, res_e, n, counter,
        sets_of, unfilled, reservation,
        reservations={e: keep[e] for e in set_ids},
    )
    # Hand back the capacity held for the g0 stars.
    for e in range(m):
        res_e[e] += keep[e]
    phases = [phase1]
    for name in ("g0", "g2", "g3"):
        phases.append(_greedy_phase(name, getattr(graphs, name), res_a, res_e, n, counter))
    pairs = [p for ph in phases for p in ph.chosen]
    return SolveResult(Matching.of(pairs), phases, Algorithm.SMART)


def priority_match(inst: Instance) -> Matching:
    """Greedy maximal b-matchings on g0..g3 in priority order.  Not always stable."""
    return _naive(inst).matching


def smart_priority_match(inst: Instance) -> Matching:
    return _smart(inst).matching


def solve(inst: Instance, algorithm: Algorithm | str = Algorithm.SMART,
          counter: WorkCounter | None = None) -> SolveResult:
    """Run either algorithm and keep the per-phase trace."""
    algorithm = Algorithm(algorithm)
    if algorithm is Algorithm.SMART:
        return _smart(inst, counter)
    return _naive(inst, counter)
