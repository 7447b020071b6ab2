"""Blocking-tuple enumeration and the stability verifier.

A potential blocking tuple ``(a, a', a'', e, e', e'')`` describes ``a`` and
``e`` breaking one match each (with ``e'`` and ``a'``) to match each other,
after which ``a'`` may rematch with ``e''`` and ``e'`` with ``a''``.  Unused
slots hold :data:`GAMMA`, the empty agent.

:func:`is_blocking` is the reference check and recomputes every valuation
from scratch.  :func:`find_blocking_tuple` walks the same enumeration order
but prunes with exact incremental score deltas, then confirms each hit with
:func:`is_blocking`.
"""

from __future__ import annotations

import enum
from typing import Iterator, NamedTuple, Union

from .model import (
    AgentId,
    Instance,
    Lambda,
    Matching,
    prefers,
)


class Empty(enum.Enum):
    GAMMA = "γ"

    def __repr__(self) -> str:
        return "γ"


GAMMA = Empty.GAMMA
Slot = Union[int, Empty]


class InvalidTuple(ValueError):
    """The tuple is not a potential blocking tuple for the given matching."""


class PotentialBlockingTuple(NamedTuple):
    a: int
    a_prime: Slot
    a_dprime: Slot
    e: int
    e_prime: Slot
    e_dprime: Slot

    def order_key(self) -> tuple[int, ...]:
        """Enumeration order: a, e, a', e', a'', e'' with the empty agent first."""
        k = [-1 if s is GAMMA else s for s in self]
        return (k[0], k[3], k[1], k[4], k[2], k[5])

    def label(self, inst: Instance) -> tuple[str | None, ...]:
        A, E = inst.applicant_names, inst.employer_names
        names = (A, A, A, E, E, E)
        return tuple(None if s is GAMMA else names[i][s] for i, s in enumerate(self))


def free_agents(inst: Instance, mu: Matching) -> tuple[frozenset[int], frozenset[int]]:
    """Applicants and employers with remaining capacity under ``mu``."""
    fa = frozenset(a for a in range(inst.n) if len(mu.of_applicant(a)) < inst.applicant_quota[a])
    fe = frozenset(e for e in range(inst.m) if len(mu.of_employer(e)) < inst.employer_quota[e])
    return fa, fe


def is_potential_tuple(inst: Instance, mu: Matching, t: PotentialBlockingTuple) -> bool:
    a, a1, a2, e, e1, e2 = t
    if not (isinstance(a, int) and 0 <= a < inst.n and isinstance(e, int) and 0 <= e < inst.m):
        return False
    for s, bound in ((a1, inst.n), (a2, inst.n), (e1, inst.m), (e2, inst.m)):
        if s is not GAMMA and not (isinstance(s, int) and 0 <= s < bound):
            return False
    free_a, free_e = free_agents(inst, mu)
    if e in mu.of_applicant(a):
        return False
    if a1 is GAMMA:
        if e not in free_e:
            return False
    elif a1 not in mu.of_employer(e):
        return False
    if e1 is GAMMA:
        if a not in free_a:
            return False
    elif e1 not in mu.of_applicant(a):
        return False
    if e1 is GAMMA:
        if a2 is not GAMMA:
            return False
    elif a2 is not GAMMA and (a2 in mu.of_employer(e1) or (a2 not in free_a and a2 != a1)):
        return False
    if a1 is GAMMA:
        if e2 is not GAMMA:
            return False
    elif e2 is not GAMMA and (e2 in mu.of_applicant(a1) or (e2 not in free_e and e2 != e1)):
        return False
    rematch_a = a2 is not GAMMA and a2 == a1
    rematch_e = e2 is not GAMMA and e2 == e1
    return rematch_a == rematch_e


def enumerate_potential_tuples(inst: Instance, mu: Matching) -> Iterator[PotentialBlockingTuple]:
    """Yield every potential blocking tuple for ``mu`` exactly once, in order."""
    free_a, free_e = free_agents(inst, mu)
    for a in range(inst.n):
        matched_a = mu.of_applicant(a)
        e1_options = ([GAMMA] if a in free_a else []) + sorted(matched_a)
        for e in range(inst.m):
            if e in matched_a:
                continue
            a1_options = ([GAMMA] if e in free_e else []) + sorted(mu.of_employer(e))
            for a1 in a1_options:
                for e1 in e1_options:
                    yield from _completions(mu, a, a1, e, e1, free_a, free_e)


def _completions(mu, a, a1, e, e1, free_a, free_e):
    if e1 is GAMMA:
        a2_options = [GAMMA]
    else:
        pool = set(free_a)
        if a1 is not GAMMA:
            pool.add(a1)
        a2_options = [GAMMA] + sorted(pool - mu.of_employer(e1))
    if a1 is GAMMA:
        e2_options = [GAMMA]
    else:
        pool = set(free_e)
        if e1 is not GAMMA:
            pool.add(e1)
        e2_options = [GAMMA] + sorted(pool - mu.of_applicant(a1))
    for a2 in a2_options:
        rematch_a = a2 is not GAMMA and a2 == a1
        for e2 in e2_options:
            if rematch_a == (e2 is not GAMMA and e2 == e1):
                yield PotentialBlockingTuple(a, a1, a2, e, e1, e2)


def swapped_matching(inst: Instance, mu: Matching, t: PotentialBlockingTuple) -> Matching:
    if not is_potential_tuple(inst, mu, t):
        raise InvalidTuple(f"{t!r} is not a potential blocking tuple")
    return _swap(mu, t)


def _swap(mu: Matching, t: PotentialBlockingTuple) -> Matching:
    a, a1, a2, e, e1, e2 = t
    remove = []
    if e1 is not GAMMA:
        remove.append((a, e1))
    if a1 is not GAMMA:
        remove.append((a1, e))
    add = [(a, e)]
    if a1 is not GAMMA and e2 is not GAMMA:
        add.append((a1, e2))
    if a2 is not GAMMA and e1 is not GAMMA:
        add.append((a2, e1))
    return mu.with_changes(remove=remove, add=add)


def is_blocking(inst: Instance, mu: Matching, t: PotentialBlockingTuple, lam: Lambda) -> bool:
    """Check the six blocking conditions with full valuation recomputation.

    The follow-up conditions for ``a'``/``e''`` and ``e'``/``a''`` apply to a
    rematch pair only when that pair is actually formed; an agent that is
    dropped and does not rematch has no condition to satisfy.
    """
    if not is_potential_tuple(inst, mu, t):
        raise InvalidTuple(f"{t!r} is not a potential blocking tuple")
    a, a1, a2, e, e1, e2 = t
    new = _swap(mu, t)
    if not prefers(inst, AgentId.applicant(a), new, mu, lam):
        return False
    if not prefers(inst, AgentId.employer(e), new, mu, lam):
        return False
    if a1 is not GAMMA and e2 is not GAMMA:
        without = new.with_changes(remove=[(a1, e2)])
        if not prefers(inst, AgentId.applicant(a1), new, without, lam):
            return False
        if not prefers(inst, AgentId.employer(e2), new, without, lam):
            return False
    if e1 is not GAMMA and a2 is not GAMMA:
        without = new.with_changes(remove=[(a2, e1)])
        if not prefers(inst, AgentId.employer(e1), new, without, lam):
            return False
        if not prefers(inst, AgentId.applicant(a2), new, without, lam):
            return False
    return True


def _pair_wanted(inst: Instance, lam: Lambda, a: int, e: int) -> bool:
    """Both sides strictly gain from adding (a, e), everything else fixed."""
    return inst.pa[a][e] == 1 and lam.positive(*inst.pair_gain(a, e))


def iter_blocking_tuples(inst: Instance, mu: Matching, lam: Lambda) -> Iterator[PotentialBlockingTuple]:
    """Yield every blocking tuple in enumeration order."""
    pa, pe = inst.pa, inst.pe
    aff = inst.affiliate_pref
    free_a, free_e = free_agents(inst, mu)
    for a in range(inst.n):
        matched_a = mu.of_applicant(a)
        row = pa[a]
        # a must strictly gain: it likes e and (if it drops e') dislikes e'.
        e1_options = ([GAMMA] if a in free_a else []) + [x for x in sorted(matched_a) if row[x] == 0]
        if not e1_options:
            continue
        for e in range(inst.m):
            if row[e] == 0 or e in matched_a:
                continue
            a1_options = ([GAMMA] if e in free_e else []) + sorted(mu.of_employer(e))
            gain_own = pe[e][a]
            gain_self = aff(e, a, e)
            for a1 in a1_options:
                own = gain_own - (0 if a1 is GAMMA else pe[e][a1])
                base1 = gain_self - (0 if a1 is GAMMA else aff(e, a1, e))
                if a1 is GAMMA:
                    e2_pool: list = []
                else:
                    e2_pool = sorted(
                        x for x in free_e - mu.of_applicant(a1) if _pair_wanted(inst, lam, a1, x)
                    )
                for e1 in e1_options:
                    base = base1 - (0 if e1 is GAMMA else aff(e, a, e1))
                    e2_options = [GAMMA] + [x for x in e2_pool if x != e1]
                    a2_options: list = [GAMMA]
                    if e1 is not GAMMA:
                        pool = {
                            x for x in free_a - mu.of_employer(e1)
                            if x != a1 and _pair_wanted(inst, lam, x, e1)
                        }
                        # a' and e' may instead pair up with each other.
                        if (a1 is not GAMMA and a1 not in mu.of_employer(e1)
                                and _pair_wanted(inst, lam, a1, e1)):
                            pool.add(a1)
                        a2_options += sorted(pool)
                    for a2 in a2_options:
                        if a2 is not GAMMA and a2 == a1:
                            pairs = [(e1, aff(e, a1, e1))]
                        else:
                            pairs = [
                                (e2, (0 if e2 is GAMMA else aff(e, a1, e2))
                                 + (0 if a2 is GAMMA else aff(e, a2, e1)))
                                for e2 in e2_options
                            ]
                        for e2, extra in pairs:
                            if not lam.positive(own, base + extra):
                                continue
                            t = PotentialBlockingTuple(a, a1, a2, e, e1, e2)
                            if is_blocking(inst, mu, t, lam):
                                yield t


def find_blocking_tuple(inst: Instance, mu: Matching, lam: Lambda) -> PotentialBlockingTuple | None:
    """First blocking tuple in enumeration order, or ``None`` when ``mu`` is stable."""
    return next(iter_blocking_tuples(inst, mu, lam), None)


def is_stable(inst: Instance, mu: Matching, lam: Lambda) -> bool:
    return find_blocking_tuple(inst, mu, lam) is None


def naive_blocking_tuples(inst: Instance, mu: Matching, lam: Lambda) -> Iterator[PotentialBlockingTuple]:
    """Reference scan: every potential tuple through :func:`is_blocking`."""
    for t in enumerate_potential_tuples(inst, mu):
        if is_blocking(inst, mu, t, lam):
            yield t
