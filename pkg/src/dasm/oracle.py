"""Brute-force ground truth for tiny instances."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterator

from . import ilp
from .blocking import is_stable
from .io import instance_to_dict, matching_to_dict
from .model import EPS, ONE, Instance, Lambda, Matching
from .solver import smart_priority_match

DEFAULT_PAIR_CAP = 12

# Weights ordered from lowest to highest; eps sits between 0 and every positive rational.
LAMBDA_LADDER = (Lambda.parse("0"), EPS, Lambda.parse("1/4"), Lambda.parse("1/2"), ONE)


class InstanceTooLarge(ValueError):
    pass


def _guard(inst: Instance, cap: int) -> None:
    if inst.n * inst.m > cap:
        raise InstanceTooLarge(f"{inst.n}x{inst.m} has {inst.n * inst.m} pairs, cap is {cap}")


def enumerate_matchings(inst: Instance, cap: int = DEFAULT_PAIR_CAP) -> Iterator[Matching]:
    """Every quota-respecting subset of A x E exactly once, in DFS order over sorted pairs."""
    _guard(inst, cap)
    pairs = [(a, e) for a in range(inst.n) for e in range(inst.m)]
    res_a = list(inst.applicant_quota)
    res_e = list(inst.employer_quota)
    chosen: list[tuple[int, int]] = []

    def dfs(i: int) -> Iterator[Matching]:
        if i == len(pairs):
            yield Matching.of(chosen)
            return
        yield from dfs(i + 1)
        a, e = pairs[i]
        if res_a[a] > 0 and res_e[e] > 0:
            res_a[a] -= 1
            res_e[e] -= 1
            chosen.append((a, e))
            yield from dfs(i + 1)
            chosen.pop()
            res_a[a] += 1
            res_e[e] += 1

    yield from dfs(0)


def stable_set(inst: Instance, lam: Lambda, cap: int = DEFAULT_PAIR_CAP) -> list[Matching]:
    return [mu for mu in enumerate_matchings(inst, cap) if is_stable(inst, mu, lam)]


def instance_digest(inst: Instance) -> str:
    blob = json.dumps(instance_to_dict(inst), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class MonotonicityObservation:
    lam_hi: Lambda
    lam_lo: Lambda
    matching: Matching
    stable_hi: bool
    stable_lo: bool


@dataclass
class StabilityReport:
    digest: str
    lam: Lambda
    total_matchings: int
    stable_matchings: list[Matching]
    solver_output: Matching
    solver_output_stable: bool
    ilp_agreement: bool
    ilp_disagreements: list[Matching] = field(default_factory=list)
    monotonicity_observations: list[MonotonicityObservation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """The asserted checks: solver output stable and ILP agreement."""
        return self.solver_output_stable and self.ilp_agreement

    def to_dict(self, inst: Instance) -> dict:
        def mdict(mu):
            return matching_to_dict(inst, mu)["matches"]

        return {
            "digest": self.digest,
            "lambda": str(self.lam),
            "total_matchings": self.total_matchings,
            "stable_count": len(self.stable_matchings),
            "stable_matchings": [mdict(mu) for mu in self.stable_matchings],
            "solver_output": mdict(self.solver_output),
            "solver_output_stable": self.solver_output_stable,
            "ilp_agreement": self.ilp_agreement,
            "ilp_disagreements": [mdict(mu) for mu in self.ilp_disagreements],
            "monotonicity_observations": [
                {"lambda_hi": str(o.lam_hi), "lambda_lo": str(o.lam_lo),
                 "matching": mdict(o.matching), "stable_hi": o.stable_hi, "stable_lo": o.stable_lo}
                for o in self.monotonicity_observations
            ],
        }


def cross_check(inst: Instance, lam: Lambda = ONE, cap: int = DEFAULT_PAIR_CAP) -> StabilityReport:
    """Exhaustive check of the solver and the ILP against the verifier.

    ILP agreement is tested at ``lam`` and, when different, also at weight 1.
    Monotonicity across the weight ladder is only observed: a matching stable
    at a higher weight but unstable at a lower one is recorded.
    """
    _guard(inst, cap)
    matchings = list(enumerate_matchings(inst, cap))
    verdicts = {l: [is_stable(inst, mu, l) for mu in matchings] for l in LAMBDA_LADDER}
    if lam not in verdicts:
        verdicts[lam] = [is_stable(inst, mu, lam) for mu in matchings]

    disagreements = []
    for l in dict.fromkeys((lam, ONE)):
        model = ilp.build_model(inst, l)
        for mu, ok in zip(matchings, verdicts[l]):
            if (not ilp.check_matching(model, mu)) != ok:
                disagreements.append(mu)

    observations = []
    for i, hi in enumerate(LAMBDA_LADDER):
        for lo in LAMBDA_LADDER[:i]:
            for mu, s_hi, s_lo in zip(matchings, verdicts[hi], verdicts[lo]):
                if s_hi and not s_lo:
                    observations.append(MonotonicityObservation(hi, lo, mu, s_hi, s_lo))

    out = smart_priority_match(inst)
    return StabilityReport(
        digest=instance_digest(inst),
        lam=lam,
        total_matchings=len(matchings),
        stable_matchings=[mu for mu, ok in zip(matchings, verdicts[lam]) if ok],
        solver_output=out,
        solver_output_stable=is_stable(inst, out, lam),
        ilp_agreement=not disagreements,
        ilp_disagreements=disagreements,
        monotonicity_observations=observations,
    )
