"""Elliptic curves over prime fields and the ell-part of generated subgroups."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import _arith, _kernels
from .errors import (
    AmbiguousOrder,
    BadFactorization,
    ClosureBudgetExceeded,
    CurveMismatch,
    NotOnCurve,
    SamplingExhausted,
    SingularCurve,
)
from .factor import factorint, valuation
from .fp import FpElement, PrimeModulus, legendre_int, sqrt_mod_int

INF = _arith.INF
DEFAULT_CLOSURE_CAP = 1 << 20


class CurveFp:
    """``y^2 = x^3 + a x + b`` over ``F_p`` with ``p > 3``.

    The group order is filled in lazily by :func:`count_points`; the fill is
    idempotent, so sharing a curve between workers is safe.
    """

    __slots__ = ("a", "b", "p", "_order")

    def __init__(self, a: int, b: int, p: int, cached_order: int | None = None):
        p = p if isinstance(p, PrimeModulus) else PrimeModulus(p)
        if p <= 3:
            raise SingularCurve("curve arithmetic needs p > 3")
        a, b = int(a) % p, int(b) % p
        if (4 * a**3 + 27 * b * b) % p == 0:
            raise SingularCurve(f"4a^3 + 27b^2 = 0 over F_{p}")
        self.a, self.b, self.p = a, b, p
        self._order = None
        if cached_order is not None:
            self.cached_order = cached_order

    @property
    def cached_order(self) -> int | None:
        return self._order

    @cached_order.setter
    def cached_order(self, n: int) -> None:
        n = int(n)
        if (n - self.p - 1) ** 2 > 4 * self.p:
            raise ValueError(f"order {n} violates the Hasse bound for p={self.p}")
        if self._order is not None and self._order != n:
            raise ValueError("conflicting group orders for one curve")
        self._order = n

    def __eq__(self, other):
        return isinstance(other, CurveFp) and (self.a, self.b, self.p) == (other.a, other.b, other.p)

    def __hash__(self):
        return hash((self.a, self.b, int(self.p)))

    def __repr__(self):
        return f"CurveFp(y^2 = x^3 + {self.a}x + {self.b} over F_{self.p})"

    def rhs(self, x: int) -> int:
        return (x * x * x + self.a * x + self.b) % self.p

    def contains(self, x: int, y: int) -> bool:
        return (y * y - self.rhs(x)) % self.p == 0

    def point(self, x, y) -> FpPoint:
        x, y = int(x) % self.p, int(y) % self.p
        if not self.contains(x, y):
            raise NotOnCurve(f"({x}, {y}) is not on {self}")
        return FpPoint(self, (x, y))

    @property
    def infinity(self) -> FpPoint:
        return FpPoint(self, INF)

    def order(self) -> int:
        return count_points(self)

    def random_point(self, rng: random.Random) -> FpPoint:
        while True:
            x = rng.randrange(self.p)
            r = self.rhs(x)
            if legendre_int(r, self.p) >= 0:
                y = sqrt_mod_int(r, self.p)
                if rng.random() < 0.5:
                    y = -y % self.p
                return FpPoint(self, (x, y))


@dataclass(frozen=True, eq=True)
class FpPoint:
    curve: CurveFp
    xy: tuple[int, int]

    @property
    def is_infinity(self) -> bool:
        return self.xy[0] == -1

    @property
    def x(self) -> FpElement | None:
        return None if self.is_infinity else FpElement(self.xy[0], self.curve.p)

    @property
    def y(self) -> FpElement | None:
        return None if self.is_infinity else FpElement(self.xy[1], self.curve.p)

    def __add__(self, other: FpPoint) -> FpPoint:
        return add_points(self, other)

    def __neg__(self) -> FpPoint:
        return FpPoint(self.curve, _arith.neg(self.xy, self.curve.p))

    def __sub__(self, other: FpPoint) -> FpPoint:
        return add_points(self, -other)

    def __rmul__(self, n: int) -> FpPoint:
        return scalar_mul(n, self)

    def __repr__(self):
        if self.is_infinity:
            return "FpPoint(inf)"
        return f"FpPoint({self.xy[0]}, {self.xy[1]} mod {self.curve.p})"


@dataclass(frozen=True)
class SubgroupLStats:
    """ell-adic valuations of the order, exponent and radical of a finite group."""

    ell: int
    nu: int
    eps: int
    rad: int

    def __post_init__(self):
        if self.rad != int(self.nu >= 1) or self.eps > self.nu or (self.nu >= 1 and self.eps < 1):
            raise ValueError(f"inconsistent stats {self}")

    def as_tuple(self) -> tuple[int, int, int]:
        return self.nu, self.eps, self.rad


def zero_stats(ell: int) -> SubgroupLStats:
    return SubgroupLStats(ell, 0, 0, 0)


def add_points(P: FpPoint, Q: FpPoint) -> FpPoint:
    if P.curve != Q.curve:
        raise CurveMismatch("points lie on different curves")
    E = P.curve
    return FpPoint(E, _arith.add(P.xy, Q.xy, E.a, E.p))


def scalar_mul(n: int, P: FpPoint) -> FpPoint:
    E = P.curve
    return FpPoint(E, _arith.mul(int(n), P.xy, E.a, E.p))


def count_points(E: CurveFp, method: str = "auto") -> int:
    """``#E(F_p)``.

    ``auto`` counts naively below ``2**14`` and by baby-step giant-step in the
    Hasse interval above, falling back to the naive count when BSGS cannot
    single out the order and ``p < 10**7``.  ``naive`` and ``bsgs`` force one
    route (``bsgs`` raises :class:`AmbiguousOrder` instead of falling back).
    """
    if method == "auto" and E.cached_order is not None:
        return E.cached_order
    p = E.p
    if method == "naive" or (method == "auto" and p < _kernels.NAIVE_THRESHOLD):
        n = _kernels.naive_count(E.a, E.b, p)
    else:
        n = _kernels.hasse_count(E.a, E.b, p)
        if n == -1:
            if method == "bsgs" or p >= _kernels.NAIVE_FALLBACK_BOUND:
                raise AmbiguousOrder(f"BSGS could not determine #E for {E}")
            n = _kernels.naive_count(E.a, E.b, p)
    if method == "auto":
        E.cached_order = n
    return n


def _check_factorization(N: int, factorization) -> list[tuple[int, int]]:
    if factorization is None:
        return list(factorint(N))
    facs = [(int(q), int(e)) for q, e in factorization]
    if math.prod(q**e for q, e in facs) != N:
        raise BadFactorization(f"factorization does not multiply to {N}")
    return facs


def point_order(P: FpPoint, N: int, factorization=None) -> int:
    """Exact order of ``P`` given ``N * P == O`` and (optionally) the factorization of ``N``."""
    facs = _check_factorization(N, factorization)
    E = P.curve
    if _arith.mul(N, P.xy, E.a, E.p)[0] != -1:
        raise ValueError("N * P is not the identity")
    return _arith.order_from_multiple(N, P.xy, E.a, E.p, facs)


def prime_to_part(N: int, ell: int) -> int:
    while N % ell == 0:
        N //= ell
    return N


def sylow_project(P: FpPoint, N: int, ell: int) -> FpPoint:
    return scalar_mul(prime_to_part(N, ell), P)


def subgroup_closure(gens: Iterable, add, identity, cap: int = DEFAULT_CLOSURE_CAP) -> set:
    """All elements of the subgroup generated by ``gens`` (breadth-first coset growth)."""
    H = {identity}
    for g in gens:
        extend_closure(H, g, add, cap)
    return H


def extend_closure(H: set, g, add, cap: int = DEFAULT_CLOSURE_CAP) -> set:
    """Grow the subgroup ``H`` in place to ``<H, g>``."""
    if g in H:
        return H
    base = list(H)
    cur = g
    while cur not in H:
        H.update([add(cur, h) for h in base])
        if len(H) > cap:
            raise ClosureBudgetExceeded(f"subgroup closure exceeds cap {cap}")
        cur = add(cur, g)
    return H


def _exact_log(n: int, ell: int) -> int:
    v = 0
    while n > 1:
        if n % ell:
            raise ArithmeticError(f"{n} is not a power of {ell}")
        n //= ell
        v += 1
    return v


class _LGroup:
    """Subgroup of an ell-group kept as ``nu`` digit generators of relative order ``ell``.

    Every element is ``sum d_i g_i`` with ``0 <= d_i < ell``; membership is a
    meet-in-the-middle search over the two halves of the digits, so tables
    hold about ``ell ** (nu / 2)`` elements instead of the whole subgroup.
    """

    def __init__(self, ell, add, neg, mul_ell, identity, cap):
        self.ell, self.add, self.neg, self.mul_ell = ell, add, neg, mul_ell
        self.identity, self.cap = identity, cap
        self.digits = []
        self._baby = None

    def _span(self, digits):
        S = [self.identity]
        for g in digits:
            layer, cur = list(S), S
            for _ in range(self.ell - 1):
                cur = [self.add(s, g) for s in cur]
                layer.extend(cur)
            S = layer
            if len(S) > self.cap:
                raise ClosureBudgetExceeded(f"subgroup table exceeds cap {self.cap}")
        return S

    def contains(self, x) -> bool:
        if self._baby is None:
            half = len(self.digits) // 2
            self._baby = set(self._span(self.digits[:half]))
            self._giant = [self.neg(g) for g in self._span(self.digits[half:])]
        return any(self.add(x, g) in self._baby for g in self._giant)

    def extend(self, g) -> None:
        powers = []
        while not self.contains(g):
            powers.append(g)
            g = self.mul_ell(g)
        if powers:
            self.digits.extend(powers)
            self._baby = None

    @property
    def nu(self) -> int:
        return len(self.digits)


def lpart_stats_raw(gens: Sequence[tuple], curves: Sequence[tuple[int, int]], orders: Sequence[int],
                    ell: int, cap: int = DEFAULT_CLOSURE_CAP) -> SubgroupLStats:
    """Stats of the subgroup of ``prod E_i(F_{p_i})`` generated by tuples of raw points.

    ``curves`` holds ``(a, p)`` per factor and ``orders`` the factor group orders.
    A single curve is the one-factor case.  The generators are first projected
    onto the ell-Sylow subgroup; ``eps`` is the largest ell-power order among
    the projections and ``nu`` comes from an exact subgroup-order computation
    (see :class:`_LGroup`).
    """
    proj = _project(gens, curves, orders, ell)
    eps = 0
    for g in proj:
        for P, (a, p) in zip(g, curves):
            eps = max(eps, _arith.lpower_order(P, ell, a, p))
    if eps == 0:
        return zero_stats(ell)
    H = _LGroup(
        ell,
        _tuple_add(curves),
        lambda u: tuple(_arith.neg(P, p) for P, (_, p) in zip(u, curves)),
        lambda u: tuple(_arith.mul(ell, P, a, p) for P, (a, p) in zip(u, curves)),
        tuple(INF for _ in curves),
        cap,
    )
    for g in proj:
        H.extend(g)
    return SubgroupLStats(ell, H.nu, eps, 1)


def _project(gens, curves, orders, ell):
    M = 1
    for n in orders:
        m = prime_to_part(n, ell)
        M = M * m // math.gcd(M, m)
    return [tuple(_arith.mul(M, P, a, p) for P, (a, p) in zip(g, curves)) for g in gens]


def _tuple_add(curves):
    if len(curves) == 1:
        a, p = curves[0]
        return lambda u, v: (_arith.add(u[0], v[0], a, p),)
    return lambda u, v: tuple(_arith.add(s, t, a, p) for s, t, (a, p) in zip(u, v, curves))


def lpart_stats_by_closure(gens: Sequence[tuple], curves: Sequence[tuple[int, int]], orders: Sequence[int],
                           ell: int, cap: int = DEFAULT_CLOSURE_CAP) -> SubgroupLStats:
    """Same as :func:`lpart_stats_raw` but enumerates the whole ell-part (test oracle)."""
    proj = _project(gens, curves, orders, ell)
    H = subgroup_closure(proj, _tuple_add(curves), tuple(INF for _ in curves), cap)
    nu = _exact_log(len(H), ell)
    eps = 0
    for h in H:
        for P, (a, p) in zip(h, curves):
            eps = max(eps, _arith.lpower_order(P, ell, a, p))
    return SubgroupLStats(ell, nu, eps, int(nu >= 1))


def generated_lpart_stats(gens: Sequence[FpPoint], ell: int, order: int | None = None,
                          closure_cap: int = DEFAULT_CLOSURE_CAP) -> SubgroupLStats:
    """``(nu, eps, rho)`` of the ell-part of the subgroup generated by ``gens``."""
    gens = list(gens)
    if not gens:
        return zero_stats(ell)
    E = gens[0].curve
    for g in gens[1:]:
        if g.curve != E:
            raise CurveMismatch("generators lie on different curves")
    N = count_points(E) if order is None else order
    return lpart_stats_raw([(g.xy,) for g in gens], [(E.a, E.p)], [N], ell, closure_cap)


def exponent_by_closure(gens: Sequence[FpPoint], ell: int, closure_cap: int = DEFAULT_CLOSURE_CAP) -> int:
    """ell-valuation of the exponent of the ell-part, by enumerating the whole subgroup.

    Brute-force counterpart to the lcm-of-orders rule used by
    :func:`generated_lpart_stats`.
    """
    E = gens[0].curve
    a, p = E.a, E.p
    H = subgroup_closure([g.xy for g in gens], lambda u, v: _arith.add(u, v, a, p), INF, closure_cap)
    best = 0
    for h in H:
        n = 1
        Q = h
        while Q[0] != -1:
            Q = _arith.add(Q, h, a, p)
            n += 1
        best = max(best, valuation(n, ell))
    return best


def group_structure(E: CurveFp, trials: int = 64, seed: int = 0,
                    closure_cap: int = DEFAULT_CLOSURE_CAP) -> tuple[int, int]:
    """Invariant factors ``(n1, n2)`` with ``E(F_p) = Z/n1 x Z/n2`` and ``n1 | n2``."""
    N = count_points(E)
    if N <= 1:
        raise SamplingExhausted(f"degenerate group order {N}")
    rng = random.Random(seed)
    a, p = E.a, E.p
    n1 = n2 = 1
    for q, e in factorint(N):
        cof = N // q**e
        add = lambda u, v: _arith.add(u, v, a, p)
        H = {INF}
        best = 0
        for _ in range(trials):
            R = _arith.mul(cof, E.random_point(rng).xy, a, p)
            best = max(best, _arith.lpower_order(R, q, a, p))
            if best == e:
                break
            extend_closure(H, R, add, closure_cap)
            if len(H) == q**e:
                break
        else:
            raise SamplingExhausted(f"{q}-part of E(F_{p}) undetermined after {trials} samples")
        if best < e and len(H) != q**e:
            raise SamplingExhausted(f"{q}-part of E(F_{p}) undetermined")
        n2 *= q**best
        n1 *= q ** (e - best)
    if n2 % n1 or (p - 1) % n1:
        raise SamplingExhausted(f"inconsistent structure ({n1}, {n2}) for {E}")
    return n1, n2
