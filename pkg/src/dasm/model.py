"""Market data model: agents, instances, matchings and exact valuations.

Applicants and employers are addressed by integer index on their own side.
Preferences are dichotomous (0/1) and stored as read-only ``uint8`` arrays.
Because every applicant is the affiliate of exactly one employer, the
affiliate preference table is stored per applicant: row ``a`` holds the
preferences of ``owner[a]`` over the employers ``a`` could be matched to.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np


class InstanceError(ValueError):
    """Raised when a market description violates the model constraints."""


class DisjointCoverViolation(InstanceError):
    pass


class IncompletePreferences(InstanceError):
    pass


class NegativeQuota(InstanceError):
    pass


class UnknownAgentReference(InstanceError):
    pass


class UnknownAgent(LookupError):
    """An agent index outside the instance was passed to a valuation."""


class Side(enum.Enum):
    APPLICANT = "applicant"
    EMPLOYER = "employer"


class AgentId(NamedTuple):
    side: Side
    index: int

    @classmethod
    def applicant(cls, index: int) -> AgentId:
        return cls(Side.APPLICANT, index)

    @classmethod
    def employer(cls, index: int) -> AgentId:
        return cls(Side.EMPLOYER, index)


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lambda:
    """Affiliate weight: an exact rational in [0, 1] or the infinitesimal eps.

    ``value is None`` encodes eps, under which employer scores compare
    lexicographically (own matches first, affiliate matches as tiebreak).
    """

    value: Fraction | None

    def __post_init__(self):
        if self.value is not None:
            v = Fraction(self.value)
            if not 0 <= v <= 1:
                raise ValueError(f"lambda must lie in [0, 1], got {v}")
            object.__setattr__(self, "value", v)

    @classmethod
    def rational(cls, numerator: int, denominator: int = 1) -> Lambda:
        return cls(Fraction(numerator, denominator))

    @classmethod
    def epsilon(cls) -> Lambda:
        return cls(None)

    @classmethod
    def parse(cls, text: str) -> Lambda:
        """Parse ``"0"``, ``"1"``, ``"p/q"``, a decimal such as ``"0.25"``,
        or ``"eps"``."""
        t = text.strip().lower()
        if t in ("eps", "epsilon", "ε"):
            return cls.epsilon()
        try:
            return cls(Fraction(t))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse lambda {text!r}") from exc

    @property
    def is_epsilon(self) -> bool:
        return self.value is None

    def key(self, own: int, affiliate: int):
        """Sort key of the score ``own + lambda * affiliate``.

        Keys produced under the same lambda are mutually comparable and
        order scores exactly; no floating point is involved.
        """
        if self.value is None:
            return (own, affiliate)
        return own + self.value * affiliate

    def positive(self, own: int, affiliate: int) -> bool:
        """True iff ``own + lambda * affiliate > 0``."""
        if self.value is None:
            return own > 0 or (own == 0 and affiliate > 0)
        return own * self.value.denominator + self.value.numerator * affiliate > 0

    def __str__(self) -> str:
        return "eps" if self.value is None else str(self.value)


ZERO = Lambda.rational(0)
ONE = Lambda.rational(1)
EPS = Lambda.epsilon()
STANDARD_LAMBDAS = (ZERO, Lambda.rational(1, 4), Lambda.rational(1, 2), ONE, EPS)


@dataclass(frozen=True, order=False)
class EmployerScore:
    """An employer's valuation kept as its two integer components."""

    own_liked: int
    affiliate_liked: int

    def key(self, lam: Lambda):
        return lam.key(self.own_liked, self.affiliate_liked)

    def beats(self, other: EmployerScore, lam: Lambda) -> bool:
        return self.key(lam) > other.key(lam)

    def weighted(self, lam: Lambda) -> Fraction | str:
        """Human-readable weighted value (``"1+2eps"`` style under eps)."""
        if lam.value is None:
            return f"{self.own_liked}+{self.affiliate_liked}eps"
        return self.own_liked + lam.value * self.affiliate_liked


# ---------------------------------------------------------------------------
# Instance
# ---------------------------------------------------------------------------


def _frozen_table(table, shape: tuple[int, int], name: str) -> np.ndarray:
    arr = np.asarray(table, dtype=np.int64).reshape(shape)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise InstanceError(f"{name} must contain only 0/1 entries")
    out = arr.astype(np.uint8)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Instance:
    """A DASM market.

    ``owner[a]`` is the employer whose affiliate ``a`` is; the affiliation
    sets are its fibres. ``pref_applicant[a, e]``, ``pref_employer_own[e, a]``
    and ``pref_affiliate[a, e]`` (the owner's preference over ``a`` being
    matched to ``e``) are 0/1 tables.
    """

    applicant_names: tuple[str, ...]
    employer_names: tuple[str, ...]
    owner: tuple[int, ...]
    applicant_quota: tuple[int, ...]
    employer_quota: tuple[int, ...]
    pref_applicant: np.ndarray
    pref_employer_own: np.ndarray
    pref_affiliate: np.ndarray
    meta: Mapping | None = field(default=None)

    @classmethod
    def build(
        cls,
        owner: Sequence[int],
        applicant_quota: Sequence[int],
        employer_quota: Sequence[int],
        pref_applicant,
        pref_employer_own,
        pref_affiliate,
        applicant_names: Sequence[str] | None = None,
        employer_names: Sequence[str] | None = None,
        meta: Mapping | None = None,
    ) -> Instance:
        """Construct and validate an instance from index-based tables."""
        n, m = len(applicant_quota), len(employer_quota)
        if len(owner) != n:
            raise DisjointCoverViolation("every applicant needs exactly one owner")
        for a, e in enumerate(owner):
            if not 0 <= e < m:
                raise DisjointCoverViolation(f"applicant {a} has no valid owner")
        if any(q < 0 for q in applicant_quota) or any(q < 0 for q in employer_quota):
            raise NegativeQuota("quotas must be nonnegative")
        if applicant_names is None:
            applicant_names = [f"a{i + 1}" for i in range(n)]
        if employer_names is None:
            employer_names = [f"e{j + 1}" for j in range(m)]
        names = list(applicant_names) + list(employer_names)
        if len(applicant_names) != n or len(employer_names) != m:
            raise InstanceError("name lists do not match agent counts")
        if len(set(names)) != len(names):
            raise InstanceError("agent names must be unique across both sides")
        return cls(
            applicant_names=tuple(applicant_names),
            employer_names=tuple(employer_names),
            owner=tuple(int(e) for e in owner),
            applicant_quota=tuple(int(q) for q in applicant_quota),
            employer_quota=tuple(int(q) for q in employer_quota),
            pref_applicant=_frozen_table(pref_applicant, (n, m), "pref_applicant"),
            pref_employer_own=_frozen_table(pref_employer_own, (m, n), "pref_employer_own"),
            pref_affiliate=_frozen_table(pref_affiliate, (n, m), "pref_employer_affiliate"),
            meta=meta,
        )

    @property
    def n(self) -> int:
        return len(self.applicant_quota)

    @property
    def m(self) -> int:
        return len(self.employer_quota)

    @property
    def applicants(self) -> list[AgentId]:
        return [AgentId.applicant(i) for i in range(self.n)]

    @property
    def employers(self) -> list[AgentId]:
        return [AgentId.employer(j) for j in range(self.m)]

    @cached_property
    def affiliation(self) -> tuple[frozenset[int], ...]:
        members: list[set[int]] = [set() for _ in range(self.m)]
        for a, e in enumerate(self.owner):
            members[e].add(a)
        return tuple(frozenset(s) for s in members)

    def quota(self, agent: AgentId) -> int:
        self.check_agent(agent)
        if agent.side is Side.APPLICANT:
            return self.applicant_quota[agent.index]
        return self.employer_quota[agent.index]

    def check_agent(self, agent: AgentId) -> None:
        bound = self.n if agent.side is Side.APPLICANT else self.m
        if not 0 <= agent.index < bound:
            raise UnknownAgent(f"{agent.side.value} {agent.index} not in instance")

    # Plain nested lists make scalar lookups in the verifier hot loops cheap.
    @cached_property
    def pa(self) -> list[list[int]]:
        return self.pref_applicant.tolist()

    @cached_property
    def pe(self) -> list[list[int]]:
        return self.pref_employer_own.tolist()

    @cached_property
    def paff(self) -> list[list[int]]:
        return self.pref_affiliate.tolist()

    def affiliate_pref(self, e: int, a: int, e_star: int) -> int:
        """``I[a in aff(e)] * pr_e^a(e_star)``."""
        return self.paff[a][e_star] if self.owner[a] == e else 0

    def pair_gain(self, a: int, e: int) -> tuple[int, int]:
        """(own, affiliate) components that employer ``e`` gains from pair (a, e)."""
        return self.pe[e][a], self.affiliate_pref(e, a, e)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.applicant_names == other.applicant_names
            and self.employer_names == other.employer_names
            and self.owner == other.owner
            and self.applicant_quota == other.applicant_quota
            and self.employer_quota == other.employer_quota
            and np.array_equal(self.pref_applicant, other.pref_applicant)
            and np.array_equal(self.pref_employer_own, other.pref_employer_own)
            and np.array_equal(self.pref_affiliate, other.pref_affiliate)
        )

    __hash__ = None  # type: ignore[assignment]


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------


_EMPTY: frozenset[int] = frozenset()


@dataclass(frozen=True)
class Matching:
    """An immutable set of (applicant, employer) pairs.

    Both directions are derived from the same pair set, so ``e in mu(a)``
    holds exactly when ``a in mu(e)``.
    """

    pairs: frozenset[tuple[int, int]] = frozenset()

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]]) -> Matching:
        return cls(frozenset((int(a), int(e)) for a, e in pairs))

    @cached_property
    def forward(self) -> dict[int, frozenset[int]]:
        out: dict[int, set[int]] = {}
        for a, e in self.pairs:
            out.setdefault(a, set()).add(e)
        return {a: frozenset(es) for a, es in out.items()}

    @cached_property
    def backward(self) -> dict[int, frozenset[int]]:
        out: dict[int, set[int]] = {}
        for a, e in self.pairs:
            out.setdefault(e, set()).add(a)
        return {e: frozenset(as_) for e, as_ in out.items()}

    def of_applicant(self, a: int) -> frozenset[int]:
        return self.forward.get(a, _EMPTY)

    def of_employer(self, e: int) -> frozenset[int]:
        return self.backward.get(e, _EMPTY)

    def with_changes(self, remove=(), add=()) -> Matching:
        return Matching((self.pairs - set(remove)) | set(add))

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def __iter__(self):
        return iter(self.sorted_pairs())


# ---------------------------------------------------------------------------
# Valuations
# ---------------------------------------------------------------------------


def valuation_applicant(inst: Instance, mu: Matching, a: int) -> int:
    inst.check_agent(AgentId.applicant(a))
    row = inst.pa[a]
    return sum(row[e] for e in mu.of_applicant(a))


def valuation_employer(inst: Instance, mu: Matching, e: int) -> EmployerScore:
    inst.check_agent(AgentId.employer(e))
    row = inst.pe[e]
    own = sum(row[a] for a in mu.of_employer(e))
    affiliate = 0
    for a in inst.affiliation[e]:
        prefs = inst.paff[a]
        affiliate += sum(prefs[x] for x in mu.of_applicant(a))
    return EmployerScore(own, affiliate)


def valuation_key(inst: Instance, mu: Matching, agent: AgentId, lam: Lambda):
    if agent.side is Side.APPLICANT:
        return valuation_applicant(inst, mu, agent.index)
    return valuation_employer(inst, mu, agent.index).key(lam)


def prefers(inst: Instance, agent: AgentId, mu1: Matching, mu2: Matching, lam: Lambda) -> bool:
    """True iff ``agent`` strictly prefers ``mu1`` to ``mu2`` under ``lam``."""
    return valuation_key(inst, mu1, agent, lam) > valuation_key(inst, mu2, agent, lam)


def is_valid_matching(inst: Instance, mu: Matching) -> bool:
    for a, e in mu.pairs:
        if not (0 <= a < inst.n and 0 <= e < inst.m):
            return False
    for a, es in mu.forward.items():
        if len(es) > inst.applicant_quota[a]:
            return False
    for e, as_ in mu.backward.items():
        if len(as_) > inst.employer_quota[e]:
            return False
    return True
