"""Uniform random DASM instances.

Each preference list (applicant over employers, employer over applicants,
employer over each affiliate's possible employers) is an independent uniform
random ranking whose top ``ceil(t * L)`` entries are approved.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .model import Instance

PRNG = "numpy.PCG64"


class ParamOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class GenParams:
    m: int
    ratio: int
    q: int
    t: float
    seed: int = 0

    def __post_init__(self):
        for name in ("m", "ratio", "q"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 0:
                raise ParamOutOfRange(f"{name} must be a nonnegative integer, got {v!r}")
        if not 0 < self.t < 1:
            raise ParamOutOfRange(f"threshold must lie in (0, 1), got {self.t!r}")
        if not 0 <= self.seed < 2**64:
            raise ParamOutOfRange("seed must be a 64-bit unsigned integer")

    @property
    def n(self) -> int:
        return self.m * self.ratio

    @property
    def employer_quota(self) -> int:
        return self.q * self.ratio


def approvals(t: float, length: int) -> int:
    """``ceil(t * length)`` computed on the decimal value of ``t``.

    Going through ``str`` keeps ``0.3 * 10`` at exactly 3.
    """
    if length <= 0:
        return 0
    return math.ceil(Fraction(str(t)) * length)


def _approval_rows(rng: np.random.Generator, rows: int, length: int, k: int) -> np.ndarray:
    out = np.zeros((rows, length), dtype=np.uint8)
    if rows == 0 or length == 0 or k == 0:
        return out
    ranking = rng.permuted(np.tile(np.arange(length), (rows, 1)), axis=1)
    np.put_along_axis(out, ranking[:, :k], 1, axis=1)
    return out


def generate(p: GenParams) -> Instance:
    rng = np.random.Generator(np.random.PCG64(p.seed))
    n, m = p.n, p.m
    k_e = approvals(p.t, m)
    k_a = approvals(p.t, n)
    pref_applicant = _approval_rows(rng, n, m, k_e)
    pref_employer_own = _approval_rows(rng, m, n, k_a)
    pref_affiliate = _approval_rows(rng, n, m, k_e)
    return Instance.build(
        owner=[a // p.ratio for a in range(n)],
        applicant_quota=[p.q] * n,
        employer_quota=[p.employer_quota] * m,
        pref_applicant=pref_applicant,
        pref_employer_own=pref_employer_own,
        pref_affiliate=pref_affiliate,
        meta={"params": {k: v for k, v in asdict(p).items() if k != "seed"},
              "seed": p.seed, "prng": PRNG},
    )
