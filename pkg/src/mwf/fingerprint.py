"""Per-prime sweeps of ``(nu, eps, rho)`` and the experiments built on them.

A sweep reduces a finitely generated subgroup of ``E(Q)`` (or of a product of
curves) modulo every common good prime in a window and records the
ell-adic valuations of the order, exponent and radical of the reduced group.
Comparisons, isogeny-invariance checks and density estimates are all thin
layers over sweeps.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .ec_fp import DEFAULT_CLOSURE_CAP, SubgroupLStats, count_points, lpart_stats_raw, zero_stats
from .ec_q import CurveQ, RationalPoint, common_good_primes, reduce_xy, torsion_order
from .errors import (
    ClosureBudgetExceeded,
    CurveMismatch,
    EllDividesDegree,
    EmptyOverlap,
    EmptyWindow,
    IndeterminateRank,
    IndexNotComputable,
    MWFError,
)
from .fp import is_prime
from .heights import find_relation, is_almost_free, regulator
from .isogeny import Isogeny, pushforward

log = logging.getLogger(__name__)

WITNESS_CAP = 10**4
CONDITIONS = {2: "order", 3: "exponent", 4: "radical"}
WILSON_Z = 1.959963984540054


@dataclass(frozen=True)
class SweepRow:
    p: int
    stats: SubgroupLStats | None
    flag: str | None = None


@dataclass
class SweepReport:
    curves: tuple[CurveQ, ...]
    generators: tuple[tuple[RationalPoint, ...], ...]
    ell: int
    prime_range: tuple[int, int]
    rows: list[SweepRow] = field(default_factory=list)

    @property
    def flags(self) -> list[tuple[int, str]]:
        return [(r.p, r.flag) for r in self.rows if r.flag is not None]

    def stats_by_prime(self) -> dict[int, SubgroupLStats]:
        return {r.p: r.stats for r in self.rows if r.stats is not None}

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r.stats, name) for r in self.rows if r.stats is not None], dtype=np.int64)


def _check_ell(ell: int) -> None:
    if not is_prime(ell):
        raise ValueError(f"ell = {ell} is not prime")


def group_orders(E: CurveQ, primes: Sequence[int]) -> np.ndarray:
    """``#E(F_p)`` for each prime (batch kernel, per-prime fallback if ambiguous)."""
    if not len(primes):
        return np.zeros(0, dtype=np.int64)
    p_arr = np.asarray(primes, dtype=np.int64)
    a_arr = np.array([E.a % int(p) for p in primes], dtype=np.int64)
    b_arr = np.array([E.b % int(p) for p in primes], dtype=np.int64)
    N = _kernels.count_many(a_arr, b_arr, p_arr)
    for i in np.flatnonzero(N < 0):
        N[i] = count_points(E.reduce(int(p_arr[i])))
    return N


def _sweep_product(curves, gen_tuples, ell, lo, hi, primes, closure_cap) -> SweepReport:
    _check_ell(ell)
    report = SweepReport(tuple(curves), tuple(tuple(g) for g in gen_tuples), ell, (lo, hi))
    if primes is None:
        primes = common_good_primes(curves, lo, hi)
    primes = [int(p) for p in primes]
    if not primes:
        return report
    p_arr = np.asarray(primes, dtype=np.int64)
    orders = [group_orders(E, primes) for E in curves]
    # reduced[g][c][i]: component c of generator g at prime i
    reduced = [[[reduce_xy(P, p) for p in primes] for P in g] for g in gen_tuples]
    # v_ell of the order of each component's Sylow projection
    vals = np.zeros((len(gen_tuples), len(curves), len(primes)), dtype=np.int64)
    for gi, g in enumerate(reduced):
        for c, E in enumerate(curves):
            a_arr = np.array([E.a % p for p in primes], dtype=np.int64)
            vals[gi, c] = _kernels.sylow_valuations(g[c], a_arr, p_arr, orders[c], ell)
    single = len(gen_tuples) == 1 and len(curves) == 1
    for i, p in enumerate(primes):
        eps = int(vals[:, :, i].max()) if vals.size else 0
        if eps == 0:
            report.rows.append(SweepRow(p, zero_stats(ell)))
        elif single:
            report.rows.append(SweepRow(p, SubgroupLStats(ell, eps, eps, 1)))
        else:
            gens = [tuple(g[c][i] for c in range(len(curves))) for g in reduced]
            try:
                st = lpart_stats_raw(gens, [(E.a % p, p) for E in curves],
                                     [int(o[i]) for o in orders], ell, closure_cap)
                report.rows.append(SweepRow(p, st))
            except ClosureBudgetExceeded as exc:
                log.warning("p=%d flagged: %s", p, exc)
                report.rows.append(SweepRow(p, None, exc.code))
    return report


def sweep(E: CurveQ, generators: Sequence[RationalPoint], ell: int, lo: int, hi: int,
          closure_cap: int = DEFAULT_CLOSURE_CAP, also_good_for: Sequence[CurveQ] = ()) -> SweepReport:
    """Stats of ``<generators>`` reduced mod each good prime in ``[lo, hi]``.

    ``also_good_for`` restricts the window to primes that are good for those
    curves too, so that two sweeps line up prime by prime.
    """
    for P in generators:
        if P.curve != E:
            raise CurveMismatch(f"{P} is not on {E.equation}")
    primes = common_good_primes([E, *also_good_for], lo, hi)
    return _sweep_product([E], [(P,) for P in generators], ell, lo, hi, primes, closure_cap)


def product_sweep(curves: Sequence[CurveQ], gen_tuples: Sequence[Sequence[RationalPoint]], ell: int,
                  lo: int, hi: int, closure_cap: int = DEFAULT_CLOSURE_CAP) -> SweepReport:
    """Stats of a subgroup of ``E_1 x ... x E_k`` given by tuples of points."""
    curves = list(curves)
    for g in gen_tuples:
        if len(g) != len(curves):
            raise CurveMismatch(f"generator {g} has {len(g)} components for {len(curves)} curves")
        for P, E in zip(g, curves):
            if P.curve != E:
                raise CurveMismatch(f"{P} is not on {E.equation}")
    return _sweep_product(curves, gen_tuples, ell, lo, hi, None, closure_cap)


# ---------------------------------------------------------------- comparisons


@dataclass(frozen=True)
class ComparisonVerdict:
    """Pointwise ``lhs <= rhs`` on the common window.

    ``witnesses`` lists primes where ``lhs > rhs``; ``reverse_witnesses``
    where ``rhs > lhs``.  Both are capped at ``WITNESS_CAP`` entries; the
    totals are kept separately.
    """

    condition: int
    holds_on_window: bool
    witnesses: tuple[tuple[int, int, int], ...]
    reverse_witnesses: tuple[tuple[int, int, int], ...]
    n_witnesses: int
    n_reverse: int
    primes_compared: int
    excluded: int = 0

    @property
    def name(self) -> str:
        return CONDITIONS[self.condition]

    @property
    def holds_both_ways(self) -> bool:
        return self.n_witnesses == 0 and self.n_reverse == 0


_FIELD = {2: "nu", 3: "eps", 4: "rad"}


def compare(A: SweepReport, B: SweepReport, condition: int) -> ComparisonVerdict:
    if condition not in _FIELD:
        raise ValueError(f"condition must be 2, 3 or 4, got {condition}")
    if A.ell != B.ell:
        raise ValueError(f"reports use different ell ({A.ell} vs {B.ell})")
    sa, sb = A.stats_by_prime(), B.stats_by_prime()
    pa = {r.p for r in A.rows}
    pb = {r.p for r in B.rows}
    common = sorted(pa & pb)
    if not common:
        raise EmptyOverlap("the two reports share no primes")
    f = _FIELD[condition]
    fwd, rev, excluded, compared = [], [], 0, 0
    for p in common:
        if p not in sa or p not in sb:
            excluded += 1
            continue
        compared += 1
        x, y = getattr(sa[p], f), getattr(sb[p], f)
        if x > y:
            fwd.append((p, x, y))
        elif y > x:
            rev.append((p, x, y))
    return ComparisonVerdict(condition, not fwd, tuple(fwd[:WITNESS_CAP]), tuple(rev[:WITNESS_CAP]),
                             len(fwd), len(rev), compared, excluded)


def compare_all(A: SweepReport, B: SweepReport) -> dict[int, ComparisonVerdict]:
    return {c: compare(A, B, c) for c in _FIELD}


@dataclass(frozen=True)
class InvarianceVerdict:
    verdicts: dict[int, ComparisonVerdict]
    index: int = 1

    @property
    def holds(self) -> bool:
        """All three inequalities hold (one-sided)."""
        return all(v.holds_on_window for v in self.verdicts.values())

    @property
    def equal(self) -> bool:
        return all(v.holds_both_ways for v in self.verdicts.values())


def isogeny_invariance_check(E: CurveQ, generators: Sequence[RationalPoint], iota: Isogeny, ell: int,
                             lo: int, hi: int, closure_cap: int = DEFAULT_CLOSURE_CAP) -> InvarianceVerdict:
    """Compare the sweep of ``<generators>`` with the sweep of their images."""
    if iota.degree % ell == 0:
        raise EllDividesDegree(f"ell = {ell} divides the degree {iota.degree}")
    if E != iota.domain:
        raise CurveMismatch(f"{E.equation} is not the domain of the isogeny")
    images = [pushforward(iota, P) for P in generators]
    A = sweep(E, generators, ell, lo, hi, closure_cap, also_good_for=[iota.codomain])
    B = sweep(iota.codomain, images, ell, lo, hi, closure_cap, also_good_for=[E])
    return InvarianceVerdict(compare_all(A, B))


def _express(targets, sources, bound) -> list[tuple[int, ...]] | None:
    """Exact small-coefficient expressions of each target in the sources."""
    out = []
    for T in targets:
        c = find_relation([*sources, T], bound)
        if c is None or c[-1] not in (1, -1):
            return None
        # sum c_i S_i + c_T T is torsion; keep only exact equalities
        coeffs = tuple(-c[-1] * ci for ci in c[:-1])
        S = T.curve.infinity
        for ci, Si in zip(coeffs, sources):
            S = S + ci * Si
        if S != T:
            return None
        out.append(coeffs)
    return out


def subgroup_index(phi: Isogeny, generators: Sequence[RationalPoint], target: Sequence[RationalPoint],
                   bound: int = 6) -> int:
    """``[phi(G) : phi(G) ∩ G']`` for the supported containment patterns.

    Either every pushed-forward generator is a small combination of the target
    generators (index 1), or the target generators are small combinations of
    the pushed-forward ones with a square coefficient matrix (index
    ``|det|``, cross-checked against the regulator ratio).
    """
    images = [pushforward(phi, P) for P in generators]
    if any(torsion_order(P) is not None for P in [*images, *target]):
        raise IndexNotComputable("index computation needs non-torsion generators")
    if _express(images, target, bound) is not None:
        return 1
    coeffs = _express(target, images, bound)
    if coeffs is None or len(coeffs) != len(images):
        raise IndexNotComputable("neither subgroup is visibly contained in the other")
    det = _int_det([list(row) for row in coeffs])
    if det == 0:
        raise IndexNotComputable("target generators have infinite index")
    ratio = regulator(target) / regulator(images)
    if not math.isclose(ratio, det * det, rel_tol=1e-6):
        raise IndexNotComputable(f"regulator ratio {ratio} disagrees with index^2 = {det * det}")
    return abs(det)


def _int_det(M: list[list[int]]) -> int:
    """Exact determinant by fraction-free elimination."""
    M = [[Fraction(v) for v in row] for row in M]
    n = len(M)
    det = Fraction(1)
    for i in range(n):
        piv = next((r for r in range(i, n) if M[r][i] != 0), None)
        if piv is None:
            return 0
        if piv != i:
            M[i], M[piv] = M[piv], M[i]
            det = -det
        det *= M[i][i]
        for r in range(i + 1, n):
            f = M[r][i] / M[i][i]
            for c in range(i, n):
                M[r][c] -= f * M[i][c]
    return int(det)


def lemma_isogenous_check(phi: Isogeny, generators: Sequence[RationalPoint], target: Sequence[RationalPoint],
                          ell: int, lo: int, hi: int, closure_cap: int = DEFAULT_CLOSURE_CAP) -> InvarianceVerdict:
    """One-sided ``nu <= nu'``, ``eps <= eps'``, ``rho <= rho'`` for ``G`` on the domain, ``G'`` on the codomain."""
    if phi.degree % ell == 0:
        raise EllDividesDegree(f"ell = {ell} divides the degree {phi.degree}")
    i = subgroup_index(phi, generators, target)
    if i % ell == 0:
        raise EllDividesDegree(f"ell = {ell} divides the index {i}")
    A = sweep(phi.domain, generators, ell, lo, hi, closure_cap, also_good_for=[phi.codomain])
    B = sweep(phi.codomain, target, ell, lo, hi, closure_cap, also_good_for=[phi.domain])
    return InvarianceVerdict(compare_all(A, B), i)


# ---------------------------------------------------------------- density


@dataclass(frozen=True)
class DensityQuery:
    """Primes where ``eps(P_i) = m_i`` for every ``i``.

    The base-point form ``eps(P) = m``, ``eps(Q_j) = 0`` is built by
    :meth:`avoiding`.
    """

    points: tuple[RationalPoint, ...]
    targets: tuple[int, ...]
    ell: int
    bound: int
    lo: int = 5

    def __post_init__(self):
        if len(self.points) != len(self.targets):
            raise ValueError("one target per point is required")

    @classmethod
    def avoiding(cls, P: RationalPoint, avoid: Sequence[RationalPoint], ell: int, m: int, bound: int,
                 lo: int = 5) -> DensityQuery:
        return cls((P, *avoid), (m, *([0] * len(avoid))), ell, bound, lo)


@dataclass(frozen=True)
class DensityEstimate:
    hits: int
    total: int
    fraction: float
    wilson95: tuple[float, float]
    window: tuple[int, int]


def wilson_interval(hits: int, total: int, z: float = WILSON_Z) -> tuple[float, float]:
    n = total
    phat = hits / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, min(centre - half, phat)), min(1.0, max(centre + half, phat))


def epsilon_table(points: Sequence[RationalPoint], ell: int, lo: int, hi: int) -> tuple[list[int], np.ndarray]:
    """Common good primes in the window and ``eps`` of each cyclic ``<P_i>`` there."""
    _check_ell(ell)
    curves = list(dict.fromkeys(P.curve for P in points))
    primes = [int(p) for p in common_good_primes(curves, lo, hi)]
    table = np.zeros((len(points), len(primes)), dtype=np.int64)
    if not primes:
        return primes, table
    p_arr = np.asarray(primes, dtype=np.int64)
    orders = {E: group_orders(E, primes) for E in curves}
    for i, P in enumerate(points):
        a_arr = np.array([P.curve.a % p for p in primes], dtype=np.int64)
        table[i] = _kernels.sylow_valuations([reduce_xy(P, p) for p in primes], a_arr, p_arr, orders[P.curve], ell)
    return primes, table


def _warn_if_not_almost_free(points: Sequence[RationalPoint]) -> None:
    by_curve: dict[CurveQ, list[RationalPoint]] = {}
    for P in points:
        by_curve.setdefault(P.curve, []).append(P)
    for pts in by_curve.values():
        try:
            ok = is_almost_free(pts)
        except IndeterminateRank:
            ok = False
        if not ok:
            log.warning("points %s are not almost free; positive density is not predicted",
                        ", ".join(map(str, pts)))


def _estimate(hits: int, total: int, window) -> DensityEstimate:
    if total == 0:
        raise EmptyWindow(f"no good primes in {window}")
    return DensityEstimate(hits, total, hits / total, wilson_interval(hits, total), window)


def estimate_density(q: DensityQuery) -> DensityEstimate:
    _warn_if_not_almost_free(q.points)
    primes, table = epsilon_table(q.points, q.ell, q.lo, q.bound)
    mask = np.ones(len(primes), dtype=bool)
    for row, m in zip(table, q.targets):
        mask &= row == m
    return _estimate(int(mask.sum()), len(primes), (q.lo, q.bound))


def epsilon_distribution(P: RationalPoint, ell: int, bound: int, lo: int = 5) -> dict[int, DensityEstimate]:
    """Density of ``eps(P) = m`` for every attained ``m``; fractions sum to 1."""
    primes, table = epsilon_table([P], ell, lo, bound)
    values, counts = np.unique(table[0], return_counts=True)
    return {int(m): _estimate(int(c), len(primes), (lo, bound)) for m, c in zip(values, counts)}


# ---------------------------------------------------------------- demo


@dataclass(frozen=True)
class DemoReport:
    ell: int
    window: tuple[int, int]
    primes_compared: int
    qualifying: dict[int, tuple[int, ...]]
    almost_free: tuple[bool | None, bool | None]


def theorem_demo(E1: CurveQ, gens1: Sequence[RationalPoint], E2: CurveQ, gens2: Sequence[RationalPoint],
                 ell: int, lo: int, hi: int, ms: Sequence[int] = (1, 2),
                 closure_cap: int = DEFAULT_CLOSURE_CAP) -> DemoReport:
    """Primes with ``eps(G)(p) >= m`` while ``eps(G')(p) = 0``, for each ``m``."""
    A = sweep(E1, gens1, ell, lo, hi, closure_cap, also_good_for=[E2])
    B = sweep(E2, gens2, ell, lo, hi, closure_cap, also_good_for=[E1])
    sa, sb = A.stats_by_prime(), B.stats_by_prime()
    common = sorted(set(sa) & set(sb))
    qualifying = {m: tuple(p for p in common if sa[p].eps >= m and sb[p].eps == 0) for m in ms}
    free = []
    for gens in (gens1, gens2):
        try:
            free.append(is_almost_free(gens))
        except MWFError:
            free.append(None)
    return DemoReport(ell, (lo, hi), len(common), qualifying, tuple(free))
