"""Integer-program encoding of DASM stability.

Variables ``z_e{i}_a{j}`` mark matched pairs.  Besides the quota rows, every
tuple that would block *whenever* the matching makes it a potential blocking
tuple gets one covering row: at least one of the tuple's matching-dependent
requirements must fail.  Requirements are literals on single ``z`` variables
("(a, e) unmatched", "(a', e) matched", ...) plus capacity tests ("e has
room").  A capacity test for an agent with quota ``q`` is linear through the
term ``sum z / q``, which only works when at most one of the capacity tests in
a row has ``q >= 2``.  Rows with two such tests use saturation indicators
``s_a{j}`` / ``s_e{i}`` tied to the quota by ``q * s <= sum z``.

The seven stability families follow the shape of the tuple:

1. both ``a`` and ``e`` have room;
2. ``e`` has room, ``a`` drops ``e'`` (which may take a free ``a''``);
3. ``a`` has room, ``e`` drops ``a'`` (which may take a free ``e''``);
4. both drop, nobody rematches;
5. both drop, ``a'`` takes a free ``e''``;
6. both drop, ``e'`` takes a free ``a''``;
7. both drop and both rematch, either with each other or with free agents.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .blocking import GAMMA, PotentialBlockingTuple
from .model import ONE, Instance, Lambda, Matching


class DimensionMismatch(ValueError):
    pass


class Sense(enum.Enum):
    LE = "<="
    GE = ">="


class Family(enum.Enum):
    BINARY = "Binary"
    EMPLOYER_QUOTA = "EmployerQuota"
    APPLICANT_QUOTA = "ApplicantQuota"
    SATURATION = "Saturation"
    STABILITY1 = "Stability1"
    STABILITY2 = "Stability2"
    STABILITY3 = "Stability3"
    STABILITY4 = "Stability4"
    STABILITY5 = "Stability5"
    STABILITY6 = "Stability6"
    STABILITY7 = "Stability7"


STABILITY_FAMILIES = tuple(Family(f"Stability{k}") for k in range(1, 8))


def zvar(e: int, a: int) -> str:
    return f"z_e{e}_a{a}"


def svar(side: str, index: int) -> str:
    return f"s_{side}{index}"


@dataclass(frozen=True)
class LinearConstraint:
    name: str
    family: Family
    terms: tuple[tuple[int, str], ...]
    sense: Sense
    rhs: int
    provenance: PotentialBlockingTuple | None = None

    def lhs(self, values: Mapping[str, int]) -> int:
        return sum(c * values.get(v, 0) for c, v in self.terms)

    def satisfied(self, values: Mapping[str, int]) -> bool:
        lhs = self.lhs(values)
        return lhs <= self.rhs if self.sense is Sense.LE else lhs >= self.rhs


@dataclass(frozen=True)
class IlpModel:
    n: int
    m: int
    lam: Lambda
    quota_applicant: tuple[int, ...]
    quota_employer: tuple[int, ...]
    binaries: tuple[str, ...]
    constraints: tuple[LinearConstraint, ...]

    def by_family(self, family: Family) -> list[LinearConstraint]:
        return [c for c in self.constraints if c.family is family]


@dataclass
class _Builder:
    inst: Instance
    lam: Lambda
    rows: dict[Family, list[LinearConstraint]] = field(default_factory=dict)
    saturation: set[tuple[str, int]] = field(default_factory=set)

    def quota_of(self, agent: tuple[str, int]) -> int:
        side, i = agent
        return self.inst.applicant_quota[i] if side == "a" else self.inst.employer_quota[i]

    def incident(self, agent: tuple[str, int]) -> list[str]:
        side, i = agent
        if side == "a":
            return [zvar(e, i) for e in range(self.inst.m)]
        return [zvar(i, a) for a in range(self.inst.n)]

    def cover(self, family: Family, t: PotentialBlockingTuple,
              matched: Iterable[str], unmatched: Iterable[str],
              room: Iterable[tuple[str, int]]) -> None:
        """Emit a row that holds iff some requirement of ``t`` fails.

        ``matched``: pairs the tuple needs matched; ``unmatched``: pairs it
        needs unmatched; ``room``: agents that must be below quota.
        """
        room = list(room)
        big = [v for v in room if self.quota_of(v) >= 2]
        coef: dict[str, int] = {}
        if len(big) <= 1:
            scale = self.quota_of(big[0]) if big else 1
            for v in room:
                c = scale // self.quota_of(v)
                for var in self.incident(v):
                    coef[var] = coef.get(var, 0) + c
        else:
            scale = 1
            for v in room:
                self.saturation.add(v)
                var = svar(*v)
                coef[var] = coef.get(var, 0) + 1
        rhs = scale
        for var in unmatched:
            coef[var] = coef.get(var, 0) + scale
        for var in matched:
            coef[var] = coef.get(var, 0) - scale
            rhs -= scale
        terms = tuple((c, v) for v, c in coef.items() if c != 0)
        rows = self.rows.setdefault(family, [])
        rows.append(LinearConstraint(f"{family.value}_{len(rows)}", family, terms, Sense.GE, rhs, t))


def _stability_rows(b: _Builder) -> None:
    inst, lam = b.inst, b.lam
    n, m = inst.n, inst.m
    pa, pe = inst.pa, inst.pe
    af = inst.affiliate_pref
    pos = lam.positive
    qa, qe = inst.applicant_quota, inst.employer_quota

    def wanted(a: int, e: int) -> bool:
        return pa[a][e] == 1 and pos(pe[e][a], af(e, a, e))

    G = GAMMA
    for a in range(n):
        for e in range(m):
            if pa[a][e] != 1:
                continue
            # First: a and e both have room.
            if qa[a] > 0 and qe[e] > 0 and pos(pe[e][a], af(e, a, e)):
                b.cover(Family.STABILITY1, PotentialBlockingTuple(a, G, G, e, G, G),
                        matched=(), unmatched=[zvar(e, a)], room=[("a", a), ("e", e)])
            # Second: e has room, a drops e' and e' may take a free a''.
            if qe[e] > 0:
                for e1 in range(m):
                    if e1 == e or pa[a][e1] != 0:
                        continue
                    base = af(e, a, e) - af(e, a, e1)
                    for a2 in [G] + [x for x in range(n) if x != a and qa[x] > 0 and wanted(x, e1)]:
                        extra = 0 if a2 is G else af(e, a2, e1)
                        if not pos(pe[e][a], base + extra):
                            continue
                        unmatched = [zvar(e, a)]
                        room = [("e", e)]
                        if a2 is not G:
                            unmatched.append(zvar(e1, a2))
                            room.append(("a", a2))
                        b.cover(Family.STABILITY2, PotentialBlockingTuple(a, G, a2, e, e1, G),
                                matched=[zvar(e1, a)], unmatched=unmatched, room=room)
            # Third: a has room, e drops a' and a' may take a free e''.
            if qa[a] > 0:
                for a1 in range(n):
                    if a1 == a:
                        continue
                    own = pe[e][a] - pe[e][a1]
                    base = af(e, a, e) - af(e, a1, e)
                    for e2 in [G] + [x for x in range(m) if x != e and qe[x] > 0 and wanted(a1, x)]:
                        extra = 0 if e2 is G else af(e, a1, e2)
                        if not pos(own, base + extra):
                            continue
                        unmatched = [zvar(e, a)]
                        room = [("a", a)]
                        if e2 is not G:
                            unmatched.append(zvar(e2, a1))
                            room.append(("e", e2))
                        b.cover(Family.STABILITY3, PotentialBlockingTuple(a, a1, G, e, G, e2),
                                matched=[zvar(e, a1)], unmatched=unmatched, room=room)
            # Fourth to seventh: both a and e drop a match.
            for e1 in range(m):
                if e1 == e or pa[a][e1] != 0:
                    continue
                for a1 in range(n):
                    if a1 == a:
                        continue
                    own = pe[e][a] - pe[e][a1]
                    base = af(e, a, e) - af(e, a, e1) - af(e, a1, e)
                    matched = [zvar(e, a1), zvar(e1, a)]
                    free_e2 = [x for x in range(m) if x not in (e, e1) and qe[x] > 0 and wanted(a1, x)]
                    free_a2 = [x for x in range(n) if x not in (a, a1) and qa[x] > 0 and wanted(x, e1)]

                    if pos(own, base):
                        b.cover(Family.STABILITY4, PotentialBlockingTuple(a, a1, G, e, e1, G),
                                matched=matched, unmatched=[zvar(e, a)], room=())
                    for e2 in free_e2:
                        if pos(own, base + af(e, a1, e2)):
                            b.cover(Family.STABILITY5, PotentialBlockingTuple(a, a1, G, e, e1, e2),
                                    matched=matched, unmatched=[zvar(e, a), zvar(e2, a1)],
                                    room=[("e", e2)])
                    for a2 in free_a2:
                        if pos(own, base + af(e, a2, e1)):
                            b.cover(Family.STABILITY6, PotentialBlockingTuple(a, a1, a2, e, e1, G),
                                    matched=matched, unmatched=[zvar(e, a), zvar(e1, a2)],
                                    room=[("a", a2)])
                    # Seventh, in enumeration order of (a'', e'').
                    pairs = [(a2, e2) for a2 in free_a2 for e2 in free_e2]
                    if wanted(a1, e1):
                        pairs.append((a1, e1))
                    for a2, e2 in sorted(pairs):
                        if a2 == a1:
                            if pos(own, base + af(e, a1, e1)):
                                b.cover(Family.STABILITY7, PotentialBlockingTuple(a, a1, a1, e, e1, e1),
                                        matched=matched, unmatched=[zvar(e, a), zvar(e1, a1)], room=())
                        elif pos(own, base + af(e, a1, e2) + af(e, a2, e1)):
                            b.cover(Family.STABILITY7, PotentialBlockingTuple(a, a1, a2, e, e1, e2),
                                    matched=matched,
                                    unmatched=[zvar(e, a), zvar(e2, a1), zvar(e1, a2)],
                                    room=[("a", a2), ("e", e2)])


def build_model(inst: Instance, lam: Lambda = ONE) -> IlpModel:
    """Quota rows, the seven stability families and any saturation links."""
    b = _Builder(inst, lam)
    n, m = inst.n, inst.m
    quota_rows = []
    for e in range(m):
        quota_rows.append(LinearConstraint(
            f"EmployerQuota_{e}", Family.EMPLOYER_QUOTA,
            tuple((1, zvar(e, a)) for a in range(n)), Sense.LE, inst.employer_quota[e]))
    for a in range(n):
        quota_rows.append(LinearConstraint(
            f"ApplicantQuota_{a}", Family.APPLICANT_QUOTA,
            tuple((1, zvar(e, a)) for e in range(m)), Sense.LE, inst.applicant_quota[a]))
    _stability_rows(b)

    links = []
    for k, (side, i) in enumerate(sorted(b.saturation)):
        q = b.quota_of((side, i))
        terms = ((q, svar(side, i)),) + tuple((-1, v) for v in b.incident((side, i)))
        links.append(LinearConstraint(f"Saturation_{k}", Family.SATURATION, terms, Sense.LE, 0))

    stability = [c for f in STABILITY_FAMILIES for c in b.rows.get(f, [])]
    binaries = tuple(zvar(e, a) for e in range(m) for a in range(n)) + tuple(
        svar(side, i) for side, i in sorted(b.saturation))
    return IlpModel(
        n=n, m=m, lam=lam,
        quota_applicant=inst.applicant_quota,
        quota_employer=inst.employer_quota,
        binaries=binaries,
        constraints=tuple(quota_rows + links + stability),
    )


def assignment(model: IlpModel, mu: Matching) -> dict[str, int]:
    """Variable values for ``mu``; saturation indicators set wherever allowed."""
    for a, e in mu.pairs:
        if not (0 <= a < model.n and 0 <= e < model.m):
            raise DimensionMismatch(f"pair ({a}, {e}) outside a {model.n}x{model.m} model")
    values = {zvar(e, a): 0 for e in range(model.m) for a in range(model.n)}
    for a, e in mu.pairs:
        values[zvar(e, a)] = 1
    for a in range(model.n):
        q = model.quota_applicant[a]
        values[svar("a", a)] = int(q > 0 and len(mu.of_applicant(a)) >= q)
    for e in range(model.m):
        q = model.quota_employer[e]
        values[svar("e", e)] = int(q > 0 and len(mu.of_employer(e)) >= q)
    return values


def check_matching(model: IlpModel, mu: Matching) -> list[LinearConstraint]:
    values = assignment(model, mu)
    return [c for c in model.constraints if not c.satisfied(values)]


def _format_row(c: LinearConstraint) -> Iterator[str]:
    parts = []
    for coef, var in c.terms:
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        parts.append(f"{sign} {var}" if mag == 1 else f"{sign} {mag} {var}")
    if parts and parts[0].startswith("+ "):
        parts[0] = parts[0][2:]
    head = f" {c.name}:"
    for start in range(0, max(len(parts), 1), 8):
        chunk = " ".join(parts[start:start + 8])
        yield f"{head} {chunk}" if start == 0 else f"   {chunk}"
    yield f"   {c.sense.value} {c.rhs}"


def export_lp(model: IlpModel, title: str = "dasm") -> str:
    """CPLEX LP text for ``model``; identical input gives identical bytes."""
    lines = [
        f"\\ {title}: {model.n} applicants, {model.m} employers, lambda={model.lam}",
        "Minimize",
        " obj: 0",
        "Subject To",
    ]
    for c in model.constraints:
        lines.extend(_format_row(c))
    lines.append("Binary")
    lines.extend(f" {v}" for v in model.binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"
