"""Acceptance criteria, one test each.

Every test records a ``PASS``/``FAIL`` line; the lines are printed in the
pytest terminal summary and also when the file is run as a script
(``python3 tests/test_acceptance.py``).
"""
import math
import os
import random
import subprocess
import sys
import time

from mwf import _arith
from mwf.ec_fp import CurveFp, count_points, exponent_by_closure, generated_lpart_stats, sylow_project
from mwf.ec_q import CurveQ, good_primes
from mwf.errors import AmbiguousOrder
from mwf.fingerprint import (
    compare,
    compare_all,
    epsilon_distribution,
    estimate_density,
    DensityQuery,
    isogeny_invariance_check,
    product_sweep,
    sweep,
)
from mwf.fp import is_prime, primes_in_range
from mwf.heights import canonical_height, is_almost_free, regulator
from mwf.isogeny import velu_2isogeny

RESULTS: list[str] = []

E1 = CurveQ(-2, 0)
P = E1.point(-1, 1)
PHI = velu_2isogeny(E1, 0)
E1p = PHI.codomain
Pp = E1p.point(1, 3)
E2 = CurveQ(-1, 1)
Q = E2.point(0, 1)


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _random_curve(rng, p):
    while True:
        a, b = rng.randrange(p), rng.randrange(p)
        if (4 * a**3 + 27 * b * b) % p:
            return CurveFp(a, b, p)


def test_criterion_01_group_axioms():
    rng = random.Random(20240101)
    primes = []
    while len(primes) < 20:
        n = rng.randrange(2**20, 2**31)
        if is_prime(n):
            primes.append(n)
    t0 = time.perf_counter()
    fails = triples = 0
    for p in primes:
        E = _random_curve(rng, p)
        a = E.a
        for _ in range(50):
            A, B, C = (E.random_point(rng).xy for _ in range(3))
            add = lambda u, v: _arith.add(u, v, a, p)
            fails += add(add(A, B), C) != add(A, add(B, C))
            fails += add(A, B) != add(B, A)
            fails += add(A, _arith.INF) != A
            fails += add(A, _arith.neg(A, p)) != _arith.INF
            triples += 1
    dt = time.perf_counter() - t0
    record(1, fails == 0 and triples >= 1000 and dt < 5,
           f"{triples} triples over {len(primes)} primes < 2^31, {fails} failures, {dt:.2f}s (limit 5s)")


def test_criterion_02_hasse_and_bsgs():
    rng = random.Random(2)
    primes = [int(p) for p in primes_in_range(5, 10**4)]
    hasse_fail = checked = 0
    for _ in range(10):
        a, b = rng.randrange(-50, 50), rng.randrange(-50, 50)
        if 4 * a**3 + 27 * b * b == 0:
            b += 1
        E = CurveQ(a, b)
        for p in good_primes(E, 5, 10**4):
            N = count_points(E.reduce(p))
            checked += 1
            hasse_fail += (N - p - 1) ** 2 > 4 * p
    mismatch = ambiguous = 0
    for _ in range(200):
        p = rng.choice(primes)
        E = _random_curve(rng, p)
        naive = count_points(CurveFp(E.a, E.b, p), method="naive")
        try:
            bsgs = count_points(CurveFp(E.a, E.b, p), method="bsgs")
        except AmbiguousOrder:
            ambiguous += 1
            continue
        mismatch += naive != bsgs
    record(2, hasse_fail == 0 and mismatch == 0 and ambiguous == 0,
           f"Hasse: {checked} (curve, p) pairs, {hasse_fail} violations; "
           f"naive vs BSGS on 200 pairs: {mismatch} mismatches, {ambiguous} undetermined")


def test_criterion_03_eps_oracle():
    rng = random.Random(3)
    primes = [int(p) for p in primes_in_range(5, 2000)]
    done = bad = 0
    while done < 100:
        p = rng.choice(primes)
        E = _random_curve(rng, p)
        N = count_points(E)
        ells = [q for q in (2, 3, 5, 7) if N % q == 0]
        if not ells:
            continue
        ell = rng.choice(ells)
        gens = [E.random_point(rng) for _ in range(rng.randint(1, 3))]
        eps = generated_lpart_stats(gens, ell).eps
        brute = exponent_by_closure([sylow_project(g, N, ell) for g in gens], ell)
        bad += eps != brute
        done += 1
    record(3, bad == 0, f"lcm-of-orders vs closure exponent on {done} instances: {bad} differences")


def test_criterion_04_isogenous_pair():
    t0 = time.perf_counter()
    detail = []
    ok = True
    for ell in (3, 5, 7):
        A = sweep(E1, [P], ell, 5, 10**4, also_good_for=[E1p])
        B = sweep(E1p, [Pp], ell, 5, 10**4, also_good_for=[E1])
        same = [r.stats.as_tuple() == s.stats.as_tuple() for r, s in zip(A.rows, B.rows)]
        wit = sum(v.n_witnesses + v.n_reverse for v in compare_all(A, B).values())
        ok &= all(same) and len(A.rows) == len(B.rows) > 0 and wit == 0 and not A.flags and not B.flags
        detail.append(f"ell={ell}: {sum(same)}/{len(same)} primes equal, {wit} witnesses")
    dt = time.perf_counter() - t0
    record(4, ok and dt < 60, "; ".join(detail) + f"; {dt:.1f}s (limit 60s)")


def test_criterion_05_isogeny_invariance():
    detail, ok = [], True
    for ell in (3, 5, 7):
        v = isogeny_invariance_check(E1, [P], PHI, ell, 5, 10**4)
        n = v.verdicts[2].primes_compared
        ok &= v.equal and n > 0
        detail.append(f"ell={ell}: equal={v.equal} on {n} primes")
    record(5, ok, "; ".join(detail))


def test_criterion_06_refutation():
    t0 = time.perf_counter()
    n1 = count_points(CurveFp(-2, 0, 5), method="naive")
    n2 = count_points(CurveFp(-1, 1, 5), method="naive")
    A = sweep(E1, [P], 3, 5, 10**5, also_good_for=[E2])
    B = sweep(E2, [Q], 3, 5, 10**5, also_good_for=[E1])
    v = compare(A, B, 2)
    dt = time.perf_counter() - t0
    ok = n1 == 10 and n2 == 8 and v.n_witnesses > 0 and v.n_reverse > 0 and dt < 120
    record(6, ok, f"#E1(F_5)={n1}, #E2(F_5)={n2}; order condition over {v.primes_compared} primes: "
                  f"{v.n_witnesses} forward, {v.n_reverse} reverse witnesses; {dt:.1f}s (limit 120s)")


def test_criterion_07_density():
    detail, ok = [], True
    for m in (0, 1, 2):
        d = estimate_density(DensityQuery((P,), (m,), 3, 10**5))
        ok &= d.wilson95[0] > 0
        detail.append(f"m={m}: {d.fraction:.4f} [{d.wilson95[0]:.4f}, {d.wilson95[1]:.4f}]")
    dist = epsilon_distribution(P, 3, 10**5)
    total = sum(e.hits for e in dist.values())
    frac = sum(e.fraction for e in dist.values())
    ok &= total == next(iter(dist.values())).total and math.isclose(frac, 1.0)
    record(7, ok, "; ".join(detail) + f"; fractions over m={sorted(dist)} sum to {frac:.12g}")


def test_criterion_08_heights():
    h1, h2 = canonical_height(P), canonical_height(2 * P)
    ht = canonical_height(E1.point(0, 0))
    reg = regulator([P, 2 * P])
    af = (is_almost_free([P]), is_almost_free([P, 2 * P]), is_almost_free([E1.point(0, 0)]))
    diff = abs(h2.hhat - 4 * h1.hhat)
    ok = diff < 1e-6 and ht.hhat <= 1e-8 and reg < 1e-6 and af == (True, False, False)
    record(8, ok, f"|h(2P)-4h(P)|={diff:.2e}, h((0,0))={ht.hhat:.1e}, reg([P,2P])={reg:.2e}, "
                  f"almost free [P],[P,2P],[(0,0)] = {af}")


def test_criterion_09_square_free():
    O = E1.infinity
    single = sweep(E1, [P], 3, 5, 10**4)
    prod = product_sweep([E1, E1], [(P, O), (O, P)], 3, 5, 10**4)
    bad = flagged = 0
    for s, t in zip(single.rows, prod.rows):
        if t.stats is None:
            flagged += 1
            continue
        bad += not (s.p == t.p and t.stats.eps == s.stats.eps and t.stats.rad == s.stats.rad
                    and t.stats.nu == 2 * s.stats.nu)
    ok = bad == 0 and flagged == 0 and len(single.rows) == len(prod.rows)
    record(9, ok, f"{len(prod.rows)} primes: {bad} mismatches, {flagged} flagged rows")


def _cli(args, threads):
    env = dict(os.environ, MWF_LOG="ERROR")
    res = subprocess.run([sys.executable, "-m", "mwf", *args, "--threads", str(threads), "--out", "-"],
                         env=env, capture_output=True)
    return res.returncode, res.stdout


def test_criterion_10_determinism(tmp_path):
    jobs = []
    for ell in (3, 5, 7):
        pair = ["--curve", "-2 0", "--point", "-1 1", "--curve", "8 0", "--point", "1 3", "--ell", str(ell),
                "--primes", "5:10000"]
        jobs += [["compare", *pair], ["sweep", *pair[:4], *pair[8:]], ["sweep", *pair[4:]]]
    non = ["--curve", "-2 0", "--point", "-1 1", "--curve", "-1 1", "--point", "0 1", "--ell", "3",
           "--primes", "5:100000"]
    jobs += [["compare", *non, "--condition", "2"], ["sweep", *non[:4], *non[8:]], ["sweep", *non[4:]]]
    differing = 0
    for job in jobs:
        outs = {_cli(job, t) for t in (1, 8, 1, 8)}
        differing += len(outs) != 1 or not next(iter(outs))[1]
    record(10, differing == 0, f"{len(jobs)} CSV jobs x 4 runs (--threads 1, 8, 1, 8): {differing} differ")


if __name__ == "__main__":
    import tempfile
    import pathlib

    failed = 0
    for name, fn in sorted((k, v) for k, v in dict(globals()).items() if k.startswith("test_criterion")):
        try:
            fn(pathlib.Path(tempfile.mkdtemp())) if "tmp_path" in fn.__code__.co_varnames else fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
