import logging
import math

import pytest
from hypothesis import given, strategies as st

from mwf.ec_q import CurveQ
from mwf.errors import EllDividesDegree, EmptyOverlap, EmptyWindow, IndexNotComputable
from mwf.fingerprint import (
    DensityQuery,
    compare,
    compare_all,
    epsilon_distribution,
    estimate_density,
    isogeny_invariance_check,
    lemma_isogenous_check,
    product_sweep,
    subgroup_index,
    sweep,
    theorem_demo,
    wilson_interval,
)
from mwf.isogeny import identity_isogeny, velu_2isogeny

E1 = CurveQ(-2, 0)
P = E1.point(-1, 1)
T = E1.point(0, 0)
O = E1.infinity
PHI = velu_2isogeny(E1, 0)
E1p = PHI.codomain
Pp = E1p.point(1, 3)
E2 = CurveQ(-1, 1)
Q = E2.point(0, 1)


def _rows(rep):
    return [(r.p, *r.stats.as_tuple()) for r in rep.rows]


def test_sweep_examples():
    assert _rows(sweep(E1, [P], 5, 5, 5)) == [(5, 1, 1, 1)]
    assert _rows(sweep(E1, [P], 3, 5, 5)) == [(5, 0, 0, 0)]
    assert {r[1:] for r in _rows(sweep(E1, [T], 3, 5, 2000))} == {(0, 0, 0)}


def test_sweep_rows_cover_good_primes():
    rep = sweep(E2, [Q], 3, 5, 500)
    ps = [r.p for r in rep.rows]
    assert ps == sorted(ps) and 23 not in ps and 19 in ps and 29 in ps
    for r in rep.rows:
        assert r.stats.rad == int(r.stats.nu >= 1) and r.stats.eps <= r.stats.nu


def test_sweep_matches_per_prime_reduction():
    from mwf.ec_fp import generated_lpart_stats
    from mwf.ec_q import reduce_point

    for r in sweep(E1, [P, 3 * P], 3, 5, 600).rows:
        assert r.stats == generated_lpart_stats([reduce_point(P, r.p), reduce_point(3 * P, r.p)], 3)


def test_product_sweep_examples():
    single = sweep(E1, [P], 3, 5, 3000)
    prod = product_sweep([E1, E1], [(P, O), (O, P)], 3, 5, 3000)
    for s, t in zip(single.rows, prod.rows):
        assert s.p == t.p
        assert (t.stats.eps, t.stats.rad) == (s.stats.eps, s.stats.rad)
        assert t.stats.nu == 2 * s.stats.nu
    diag = product_sweep([E1, E1], [(P, P)], 3, 5, 3000)
    assert _rows(diag) == _rows(single)
    trivial = product_sweep([E1, E1], [(O, O)], 3, 5, 500)
    assert {r[1:] for r in _rows(trivial)} == {(0, 0, 0)}


def test_product_of_different_curves():
    rep = product_sweep([E1, E2], [(P, Q)], 3, 5, 2000)
    a, b = sweep(E1, [P], 3, 5, 2000, also_good_for=[E2]), sweep(E2, [Q], 3, 5, 2000, also_good_for=[E1])
    for r, s, t in zip(rep.rows, a.rows, b.rows):
        assert r.stats.eps == max(s.stats.eps, t.stats.eps)
        assert r.stats.nu == r.stats.eps  # cyclic


def test_compare_reflexive():
    rep = sweep(E2, [Q], 3, 5, 2000)
    for c in (2, 3, 4):
        v = compare(rep, rep, c)
        assert v.holds_on_window and v.holds_both_ways and v.witnesses == ()


def test_compare_isogenous_pair():
    a = sweep(E1, [P], 3, 5, 3000, also_good_for=[E1p])
    b = sweep(E1p, [Pp], 3, 5, 3000, also_good_for=[E1])
    assert all(v.holds_both_ways for v in compare_all(a, b).values())


def test_compare_refutation_has_witnesses_both_ways():
    a = sweep(E1, [P], 3, 5, 10**4, also_good_for=[E2])
    b = sweep(E2, [Q], 3, 5, 10**4, also_good_for=[E1])
    v = compare(a, b, 2)
    assert not v.holds_on_window
    assert v.n_witnesses > 0 and v.n_reverse > 0
    assert all(x > y for _, x, y in v.witnesses) and all(y > x for _, x, y in v.reverse_witnesses)


def test_compare_errors():
    with pytest.raises(EmptyOverlap):
        compare(sweep(E1, [P], 3, 5, 100), sweep(E1, [P], 3, 200, 300), 2)
    with pytest.raises(ValueError):
        compare(sweep(E1, [P], 3, 5, 100), sweep(E1, [P], 5, 5, 100), 2)
    with pytest.raises(ValueError):
        compare(sweep(E1, [P], 3, 5, 100), sweep(E1, [P], 3, 5, 100), 5)


def test_flagged_rows_are_excluded():
    rep = sweep(E1, [P, 2 * P], 3, 5, 3000, closure_cap=2)
    assert rep.flags
    v = compare(rep, sweep(E1, [P], 3, 5, 3000), 2)
    assert v.excluded == len(rep.flags)
    assert v.primes_compared + v.excluded == len(rep.rows)


def test_isogeny_invariance():
    assert isogeny_invariance_check(E1, [P], PHI, 5, 5, 3000).equal
    assert isogeny_invariance_check(E1, [P], identity_isogeny(E1), 3, 5, 1000).equal
    with pytest.raises(EllDividesDegree):
        isogeny_invariance_check(E1, [P], PHI, 2, 5, 100)


def test_lemma_isogenous():
    same = lemma_isogenous_check(PHI, [P], [Pp], 3, 5, 3000)
    assert same.index == 1 and same.holds and same.equal
    doubled = lemma_isogenous_check(PHI, [P], [2 * Pp], 3, 5, 3000)
    assert doubled.index == 2 and doubled.holds
    assert subgroup_index(PHI, [P], [5 * Pp]) == 5
    with pytest.raises(EllDividesDegree):
        lemma_isogenous_check(PHI, [P], [Pp], 2, 5, 100)
    with pytest.raises(EllDividesDegree):
        lemma_isogenous_check(PHI, [P], [3 * Pp], 3, 5, 100)
    with pytest.raises(IndexNotComputable):
        lemma_isogenous_check(PHI, [P], [E1p.point(0, 0)], 3, 5, 100)


def test_density_examples(caplog):
    est = estimate_density(DensityQuery((P,), (0,), 3, 10**4))
    assert est.fraction > 0 and est.wilson95[0] > 0
    with caplog.at_level(logging.WARNING):
        tors = estimate_density(DensityQuery((T,), (0,), 3, 3000))
    assert tors.fraction == 1 and tors.hits == tors.total
    assert "not almost free" in caplog.text
    with pytest.raises(EmptyWindow):
        estimate_density(DensityQuery((P,), (0,), 3, 4))


def test_density_avoiding():
    q = DensityQuery.avoiding(P, [Q], 3, 1, 10**4)
    est = estimate_density(q)
    assert 0 < est.fraction < estimate_density(DensityQuery((P,), (1,), 3, 10**4)).fraction


def test_partition():
    dist = epsilon_distribution(P, 3, 10**4)
    assert sum(d.hits for d in dist.values()) == next(iter(dist.values())).total
    assert math.isclose(sum(d.fraction for d in dist.values()), 1.0)
    some = [estimate_density(DensityQuery((P,), (m,), 3, 10**4)).fraction for m in (0, 1)]
    assert sum(some) <= 1


def _wilson_by_bisection(k, n, z=1.959963984540054):
    # roots of (phat - p)^2 = z^2 p (1 - p) / n on either side of phat
    phat = k / n
    f = lambda p: (phat - p) ** 2 - z * z * p * (1 - p) / n

    def root(lo, hi):
        for _ in range(200):
            mid = (lo + hi) / 2
            if (f(lo) > 0) == (f(mid) > 0):
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2

    lo = 0.0 if k == 0 else root(0.0, phat)
    hi = 1.0 if k == n else root(phat, 1.0)
    return lo, hi


@given(st.integers(1, 5000), st.data())
def test_wilson_matches_bisection(n, data):
    k = data.draw(st.integers(0, n))
    lo, hi = wilson_interval(k, n)
    blo, bhi = _wilson_by_bisection(k, n)
    assert 0 <= lo <= k / n <= hi <= 1
    assert lo == pytest.approx(blo, abs=1e-9) and hi == pytest.approx(bhi, abs=1e-9)


def test_theorem_demo():
    rep = theorem_demo(E1, [P], E2, [Q], 3, 5, 10**4, ms=(0, 1, 2))
    assert rep.qualifying[1] and rep.almost_free == (True, True)
    a = sweep(E1, [P], 3, 5, 10**4, also_good_for=[E2]).stats_by_prime()
    b = sweep(E2, [Q], 3, 5, 10**4, also_good_for=[E1]).stats_by_prime()
    assert rep.qualifying[0] == tuple(p for p in sorted(b) if b[p].eps == 0)
    assert all(a[p].eps >= 2 and b[p].eps == 0 for p in rep.qualifying[2])
    iso = theorem_demo(E1, [P], E1p, [Pp], 3, 5, 3000, ms=(1, 2))
    assert iso.qualifying == {1: (), 2: ()}
