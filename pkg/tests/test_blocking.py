import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtures import random_instance, random_matching
from dasm.blocking import (
    GAMMA,
    InvalidTuple,
    PotentialBlockingTuple as T,
    enumerate_potential_tuples,
    find_blocking_tuple,
    free_agents,
    is_blocking,
    is_potential_tuple,
    is_stable,
    iter_blocking_tuples,
    naive_blocking_tuples,
    swapped_matching,
)
from dasm.model import EPS, ONE, STANDARD_LAMBDAS, ZERO, Matching, is_valid_matching

G = GAMMA


# Independent reference: literal conditions over every slot combination.

def _val_a(inst, pairs, a):
    return sum(inst.pref_applicant[a, e] for x, e in pairs if x == a)


def _val_e(inst, pairs, e, lam):
    own = sum(int(inst.pref_employer_own[e, a]) for a, y in pairs if y == e)
    aff = sum(int(inst.pref_affiliate[a, y]) for a, y in pairs if inst.owner[a] == e)
    if lam.is_epsilon:
        return (own, aff)
    return (own + lam.value * aff, 0)


def _ref_potential(inst, pairs, t):
    a, a1, a2, e, e1, e2 = t
    deg_a = lambda x: sum(1 for p in pairs if p[0] == x)
    deg_e = lambda y: sum(1 for p in pairs if p[1] == y)
    free_a = lambda x: deg_a(x) < inst.applicant_quota[x]
    free_e = lambda y: deg_e(y) < inst.employer_quota[y]
    if a is G or e is G or (a, e) in pairs:
        return False
    if not ((a1 is G and free_e(e)) or (a1 is not G and (a1, e) in pairs)):
        return False
    if not ((e1 is G and free_a(a)) or (e1 is not G and (a, e1) in pairs)):
        return False
    if e1 is G and a2 is not G:
        return False
    if a1 is G and e2 is not G:
        return False
    if a2 is not G and ((a2, e1) in pairs or not (free_a(a2) or a2 == a1)):
        return False
    if e2 is not G and ((a1, e2) in pairs or not (free_e(e2) or e2 == e1)):
        return False
    return (a2 is not G and a2 == a1) == (e2 is not G and e2 == e1)


def _ref_blocking(inst, pairs, t, lam):
    a, a1, a2, e, e1, e2 = t
    new = set(pairs) - {(a, e1), (a1, e)} | {(a, e)}
    if a1 is not G and e2 is not G:
        new.add((a1, e2))
    if a2 is not G and e1 is not G:
        new.add((a2, e1))
    if not _val_a(inst, new, a) > _val_a(inst, pairs, a):
        return False
    if not _val_e(inst, new, e, lam) > _val_e(inst, pairs, e, lam):
        return False
    for x, y in ((a1, e2), (a2, e1)):
        if x is G or y is G:
            continue
        rest = new - {(x, y)}
        if not (_val_a(inst, new, x) > _val_a(inst, rest, x)
                and _val_e(inst, new, y, lam) > _val_e(inst, rest, y, lam)):
            return False
    return True


def all_combinations(inst, mu, lam):
    pairs = set(mu.pairs)
    A = [G] + list(range(inst.n))
    E = [G] + list(range(inst.m))
    out = []
    for a, a1, a2 in itertools.product(A, repeat=3):
        for e, e1, e2 in itertools.product(E, repeat=3):
            t = T(a, a1, a2, e, e1, e2)
            if _ref_potential(inst, pairs, t) and _ref_blocking(inst, pairs, t, lam):
                out.append(t)
    return sorted(out, key=T.order_key)


LB_BAD = T(1, 0, G, 0, G, 1)


def test_lb_free_agents(lb):
    assert free_agents(lb, Matching.of([])) == ({0, 1}, {0, 1})
    assert free_agents(lb, Matching.of([(0, 0)])) == ({1}, {1})


def test_lb_witness(lb):
    mu = Matching.of([(0, 0)])
    assert LB_BAD in set(enumerate_potential_tuples(lb, mu))
    assert swapped_matching(lb, mu, LB_BAD) == Matching.of([(1, 0), (0, 1)])
    assert is_blocking(lb, mu, LB_BAD, ONE)
    assert find_blocking_tuple(lb, mu, ONE) == LB_BAD
    assert not is_stable(lb, mu, ONE)


@pytest.mark.parametrize("lam", STANDARD_LAMBDAS, ids=str)
def test_lb_good_matching_stable(lb, lam):
    assert is_stable(lb, Matching.of([(1, 0), (0, 1)]), lam)


def test_weight_flip(weight_flip):
    mu = Matching.of([(1, 0), (2, 0)])
    t = T(0, 1, G, 0, G, 1)
    assert is_blocking(weight_flip, mu, t, ONE)
    assert not is_blocking(weight_flip, mu, t, EPS)
    assert not is_blocking(weight_flip, mu, t, ZERO)


def test_half_weight_boundary(weight_flip):
    # e trades 1 own for 2 affiliate: blocks iff lambda > 1/2.
    mu = Matching.of([(1, 0), (2, 0)])
    t = T(0, 1, G, 0, G, 1)
    from dasm.model import Lambda
    assert not is_blocking(weight_flip, mu, t, Lambda.rational(1, 2))
    assert is_blocking(weight_flip, mu, t, Lambda.rational(2, 3))


def test_invalid_tuple(lb):
    mu = Matching.of([(0, 0)])
    with pytest.raises(InvalidTuple):
        swapped_matching(lb, mu, T(0, G, G, 0, G, G))
    with pytest.raises(InvalidTuple):
        is_blocking(lb, mu, T(1, G, G, 0, G, G), ONE)
    assert not is_potential_tuple(lb, mu, T(1, 0, G, 0, G, 9))


def test_all_zero_preferences_always_stable():
    rng = random.Random(0)
    for _ in range(30):
        inst = random_instance(rng, density=0.0)
        mu = random_matching(rng, inst)
        for lam in STANDARD_LAMBDAS:
            assert is_stable(inst, mu, lam)


def test_potential_enumeration_matches_reference():
    rng = random.Random(1)
    for _ in range(150):
        inst = random_instance(rng)
        mu = random_matching(rng, inst)
        pairs = set(mu.pairs)
        A = [G] + list(range(inst.n))
        E = [G] + list(range(inst.m))
        ref = [T(a, a1, a2, e, e1, e2)
               for a, a1, a2 in itertools.product(A, repeat=3)
               for e, e1, e2 in itertools.product(E, repeat=3)
               if _ref_potential(inst, pairs, T(a, a1, a2, e, e1, e2))]
        got = list(enumerate_potential_tuples(inst, mu))
        assert len(got) == len(set(got))
        assert sorted(got, key=T.order_key) == got
        assert set(got) == set(ref)


def test_verifier_agrees_with_all_combinations():
    rng = random.Random(2)
    hits = 0
    for _ in range(200):
        inst = random_instance(rng)
        mu = random_matching(rng, inst)
        for lam in STANDARD_LAMBDAS:
            expected = all_combinations(inst, mu, lam)
            assert list(iter_blocking_tuples(inst, mu, lam)) == expected
            assert is_stable(inst, mu, lam) == (not expected)
            hits += bool(expected)
    assert hits > 50


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(STANDARD_LAMBDAS))
def test_fast_path_equals_naive_scan(seed, lam):
    rng = random.Random(seed)
    inst = random_instance(rng, 4, 4, 3)
    mu = random_matching(rng, inst)
    assert list(iter_blocking_tuples(inst, mu, lam)) == list(naive_blocking_tuples(inst, mu, lam))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(STANDARD_LAMBDAS))
def test_witness_soundness(seed, lam):
    rng = random.Random(seed)
    inst = random_instance(rng, 4, 4, 3)
    mu = random_matching(rng, inst)
    t = find_blocking_tuple(inst, mu, lam)
    if t is None:
        return
    new = swapped_matching(inst, mu, t)
    assert is_valid_matching(inst, new)
    assert _ref_blocking(inst, set(mu.pairs), t, lam)
    assert find_blocking_tuple(inst, mu, lam) == t


def test_fraction_lambda_consistency():
    # the float-free path: 1/3 is not representable in binary
    from dasm.model import Lambda
    lam = Lambda.rational(1, 3)
    assert lam.value == Fraction(1, 3)
    assert lam.positive(-1, 3) is False
    assert lam.positive(-1, 4) is True
