"""Hand-built instances shared by the test modules."""

from __future__ import annotations

import random

import numpy as np

from dasm.model import Instance


def lb() -> Instance:
    """Two applicants both affiliated with e1; greedy g0-first matching fails here."""
    pa = np.ones((2, 2), dtype=np.uint8)
    pe = np.ones((2, 2), dtype=np.uint8)
    paff = np.ones((2, 2), dtype=np.uint8)
    paff[1, 1] = 0  # e1 does not care for a2 at e2
    pe[1, 1] = 0    # e2 does not want a2
    pa[1, 1] = 0    # a2 does not want e2
    return Instance.build(owner=[0, 0], applicant_quota=[1, 1], employer_quota=[1, 1],
                          pref_applicant=pa, pref_employer_own=pe, pref_affiliate=paff)


def max_weight() -> Instance:
    """a belongs to e, a' to e'; e' has no capacity; every preference is 1."""
    ones = np.ones((2, 2), dtype=np.uint8)
    return Instance.build(owner=[0, 1], applicant_quota=[1, 1], employer_quota=[1, 0],
                          pref_applicant=ones, pref_employer_own=ones, pref_affiliate=ones,
                          applicant_names=["a", "a'"], employer_names=["e", "e'"])


def weight_flip() -> Instance:
    """Employer e can trade one liked hire for two liked affiliate placements.

    Applicants a, a2, x; employers e (owns a and a2, capacity 2) and f (owns x).
    Under {(a2, e), (x, e)} the score of e is (2, 0); after (a, a2, -, e, -, f)
    it is (1, 2).
    """
    pa = np.zeros((3, 2), dtype=np.uint8)
    pe = np.zeros((2, 3), dtype=np.uint8)
    paff = np.zeros((3, 2), dtype=np.uint8)
    pa[0, 0] = 1             # a likes e
    pa[1, 1] = 1             # a2 likes f
    pe[0, 1] = pe[0, 2] = 1  # e likes a2 and x for itself
    pe[1, 1] = 1             # f likes a2
    paff[0, 0] = 1           # e likes a placed at e
    paff[1, 1] = 1           # e likes a2 placed at f
    return Instance.build(owner=[0, 0, 1], applicant_quota=[1, 1, 1], employer_quota=[2, 1],
                          pref_applicant=pa, pref_employer_own=pe, pref_affiliate=paff,
                          applicant_names=["a", "a2", "x"], employer_names=["e", "f"])


def random_instance(rng: random.Random, max_n: int = 3, max_m: int = 3, max_q: int = 2,
                    density: float = 0.6, max_pairs: int | None = None,
                    min_pairs: int = 0) -> Instance:
    while True:
        n, m = rng.randint(1, max_n), rng.randint(1, max_m)
        if (max_pairs is None or n * m <= max_pairs) and n * m >= min_pairs:
            break

    def table(r, c):
        return np.array([[rng.random() < density for _ in range(c)] for _ in range(r)], dtype=np.uint8)

    return Instance.build(
        owner=[rng.randrange(m) for _ in range(n)],
        applicant_quota=[rng.randint(0, max_q) for _ in range(n)],
        employer_quota=[rng.randint(0, max_q) for _ in range(m)],
        pref_applicant=table(n, m), pref_employer_own=table(m, n), pref_affiliate=table(n, m),
    )


def random_matching(rng: random.Random, inst: Instance, p: float = 0.5):
    from dasm.model import Matching

    res_a, res_e = list(inst.applicant_quota), list(inst.employer_quota)
    pairs = []
    cells = [(a, e) for a in range(inst.n) for e in range(inst.m)]
    rng.shuffle(cells)
    for a, e in cells:
        if res_a[a] and res_e[e] and rng.random() < p:
            res_a[a] -= 1
            res_e[e] -= 1
            pairs.append((a, e))
    return Matching.of(pairs)
