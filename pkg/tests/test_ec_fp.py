import math
import random

import pytest
from hypothesis import given, strategies as st

from mwf import _arith, _kernels
from mwf.ec_fp import (
    CurveFp,
    SubgroupLStats,
    add_points,
    count_points,
    exponent_by_closure,
    generated_lpart_stats,
    group_structure,
    lpart_stats_by_closure,
    lpart_stats_raw,
    point_order,
    scalar_mul,
    subgroup_closure,
    sylow_project,
)
from mwf.errors import (
    BadFactorization,
    ClosureBudgetExceeded,
    CurveMismatch,
    NotOnCurve,
    SamplingExhausted,
    SingularCurve,
)
from mwf.fp import primes_in_range

E5 = CurveFp(3, 0, 5)
P41 = E5.point(4, 1)
SMALL_PRIMES = [int(p) for p in primes_in_range(5, 400)]


def random_curve(rng, p):
    while True:
        a, b = rng.randrange(p), rng.randrange(p)
        if (4 * a**3 + 27 * b * b) % p:
            return CurveFp(a, b, p)


def test_group_law_examples():
    assert add_points(P41, P41) == E5.point(1, 3)
    assert (P41 + -P41).is_infinity
    assert P41 + E5.infinity == P41
    assert scalar_mul(5, P41).is_infinity
    assert scalar_mul(4, P41) == E5.point(4, 4)
    assert scalar_mul(1, P41) == P41
    assert scalar_mul(-1, P41) == E5.point(4, 4)
    assert scalar_mul(0, P41).is_infinity


def test_curve_validation():
    with pytest.raises(SingularCurve):
        CurveFp(0, 0, 7)
    with pytest.raises(SingularCurve):
        CurveFp(1, 1, 3)
    with pytest.raises(NotOnCurve):
        E5.point(4, 2)
    with pytest.raises(CurveMismatch):
        add_points(P41, CurveFp(1, 0, 5).infinity)
    with pytest.raises(ValueError):
        CurveFp(3, 0, 5, cached_order=20)


@pytest.mark.parametrize("a,b,n", [(3, 0, 10), (-1, 1, 8), (1, 0, 4)])
def test_count_examples(a, b, n):
    assert count_points(CurveFp(a, b, 5)) == n


def test_point_order_examples():
    assert point_order(P41, 10) == 5
    assert point_order(P41, 10, [(2, 1), (5, 1)]) == 5
    assert point_order(CurveFp(1, 0, 5).point(0, 0), 4) == 2
    assert point_order(E5.infinity, 10) == 1
    with pytest.raises(BadFactorization):
        point_order(P41, 10, [(2, 1), (3, 1)])


def test_sylow_examples():
    assert sylow_project(P41, 10, 5) == E5.point(1, 3)
    assert sylow_project(P41, 10, 3).is_infinity
    assert sylow_project(E5.infinity, 10, 7).is_infinity


def test_stats_examples():
    assert generated_lpart_stats([P41], 5).as_tuple() == (1, 1, 1)
    assert generated_lpart_stats([P41], 3).as_tuple() == (0, 0, 0)
    assert generated_lpart_stats([E5.infinity], 3).as_tuple() == (0, 0, 0)
    with pytest.raises(ValueError):
        SubgroupLStats(3, 1, 0, 1)
    with pytest.raises(ValueError):
        SubgroupLStats(3, 1, 2, 1)


def test_group_structure_examples():
    assert group_structure(E5) == (1, 10)
    assert group_structure(CurveFp(-1, 0, 5)) == (2, 4)


def test_group_structure_needs_samples():
    E = CurveFp(-1, 0, 10007)
    with pytest.raises(SamplingExhausted):
        group_structure(E, trials=0)


@given(st.integers(0, 2**32))
def test_group_structure_invariants(seed):
    rng = random.Random(seed)
    p = rng.choice(SMALL_PRIMES)
    E = random_curve(rng, p)
    n1, n2 = group_structure(E, seed=rng.randrange(100))
    assert n1 * n2 == count_points(E)
    assert n2 % n1 == 0 and (p - 1) % n1 == 0


def test_group_axioms_many_primes():
    rng = random.Random(7)
    primes = [int(p) for p in primes_in_range(2**30, 2**30 + 3000)][:20]
    fails = 0
    for p in primes:
        E = random_curve(rng, p)
        for _ in range(50):
            P, Q, R = (E.random_point(rng) for _ in range(3))
            fails += (P + Q) + R != P + (Q + R)
            fails += P + Q != Q + P
            fails += P + E.infinity != P
            fails += not (P + -P).is_infinity
    assert fails == 0


@pytest.mark.parametrize("seed", range(10))
def test_hasse_and_lagrange(seed):
    rng = random.Random(seed)
    for p in rng.sample(SMALL_PRIMES, 10) + [int(q) for q in primes_in_range(10**5, 10**5 + 100)]:
        E = random_curve(rng, p)
        N = count_points(E)
        assert (N - p - 1) ** 2 <= 4 * p
        assert scalar_mul(N, E.random_point(rng)).is_infinity


def test_naive_matches_bsgs():
    rng = random.Random(11)
    primes = [int(p) for p in primes_in_range(100, 10**4)]
    ambiguous = 0
    for _ in range(300):
        p = rng.choice(primes)
        E = random_curve(rng, p)
        n = _kernels.hasse_count(E.a, E.b, p)
        if n == -1:
            ambiguous += 1
            continue
        assert n == count_points(CurveFp(E.a, E.b, p), method="naive")
    assert ambiguous < 10


def test_count_above_naive_threshold_matches_naive():
    rng = random.Random(3)
    for p in [int(q) for q in primes_in_range(20000, 20400)]:
        E = random_curve(rng, p)
        assert count_points(E) == _kernels.naive_count_np(E.a, E.b, p)


def test_eps_matches_closure_exponent():
    rng = random.Random(5)
    done = 0
    while done < 100:
        p = rng.choice(SMALL_PRIMES)
        E = random_curve(rng, p)
        N = count_points(E)
        ells = [q for q in (2, 3, 5, 7) if N % q == 0]
        if not ells:
            continue
        ell = rng.choice(ells)
        gens = [E.random_point(rng) for _ in range(rng.randint(1, 3))]
        projected = [sylow_project(g, N, ell) for g in gens]
        assert generated_lpart_stats(gens, ell).eps == exponent_by_closure(projected, ell)
        done += 1


@given(st.integers(0, 2**32), st.integers(1, 3), st.sampled_from([2, 3, 5]), st.booleans())
def test_stats_match_closure(seed, k, ell, product):
    rng = random.Random(seed)
    p = rng.choice(SMALL_PRIMES)
    curves = [random_curve(rng, p) for _ in range(2 if product else 1)]
    gens = [tuple(E.random_point(rng).xy for E in curves) for _ in range(k)]
    factors = [(E.a, p) for E in curves]
    orders = [count_points(E) for E in curves]
    fast = lpart_stats_raw(gens, factors, orders, ell)
    assert fast == lpart_stats_by_closure(gens, factors, orders, ell)
    assert fast.rad == int(fast.nu >= 1) and fast.eps <= fast.nu


def test_closure_cap():
    E = CurveFp(-1, 0, 10007)
    P = E.random_point(random.Random(1))
    add = lambda u, v: _arith.add(u, v, E.a, E.p)
    with pytest.raises(ClosureBudgetExceeded):
        subgroup_closure([P.xy], add, _arith.INF, cap=10)


def test_order_cache_is_idempotent():
    E = CurveFp(2, 3, 101)
    n = count_points(E)
    E.cached_order = n
    with pytest.raises(ValueError):
        E.cached_order = n + 1
    assert math.isclose(count_points(E), n)
