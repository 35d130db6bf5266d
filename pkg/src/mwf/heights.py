"""Canonical heights, height pairing, regulators and almost-free tests over Q.

Heights use the x-coordinate normalization ``hhat(P) = lim h(x(2^k P)) / 4^k``
with ``h(n/d) = log max(|n|, |d|)``.

Two estimators are provided:

``series`` (default)
    Exact doubling of ``P`` until a multiple ``Q = nP`` reduces to a smooth
    point at every bad prime.  From there on the reduced doubling never
    cancels a common factor, so ``hhat(Q) = log den(x(Q)) + sum_j 4^-(j+1)
    log|4 f(x_j)|`` with ``x_j = x(2^j Q)`` carried in high-precision reals.
    Converges geometrically; error is at the level of the working precision.

``doubling``
    The plain limit ``h(2^k P) / 4^k`` with exact big-integer doubling,
    stopping once successive estimates agree to ``tol`` or at ``k_max``.
    Kept as an independent cross-check of ``series``.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import gmpy2
import mpmath

from .ec_q import CurveQ, RationalPoint, add_q, mul_q, torsion_order
from .errors import CurveMismatch, IndeterminateRank, PrecisionNotReached
from .factor import factorint

log = logging.getLogger(__name__)

SERIES_DPS = 50
DEFAULT_TOL = 1e-8
DEFAULT_K_MAX = 10
DEFAULT_REG_TOL = 1e-6


@dataclass(frozen=True)
class HeightData:
    hhat: float
    err_bound: float
    method: str = "series"
    converged: bool = True
    steps: int = 0


def log_abs(n) -> float:
    """Natural log of ``|n|`` for arbitrarily large integers."""
    n = abs(gmpy2.mpz(n))
    bl = n.bit_length()
    if bl < 1000:
        return math.log(int(n))
    shift = bl - 64
    return math.log(int(n >> shift)) + shift * math.log(2)


def naive_height(x) -> float:
    if x is None:
        return 0.0
    return max(log_abs(x.numerator) if x.numerator else 0.0, log_abs(x.denominator))


@lru_cache(maxsize=1024)
def bad_primes(E: CurveQ) -> tuple[int, ...]:
    D = abs(4 * E.a**3 + 27 * E.b**2)
    return tuple(sorted({2} | {q for q, _ in factorint(D)}))


def _smooth_at(x, E: CurveQ, p: int) -> bool:
    """Whether the point with abscissa ``x`` reduces to a smooth point mod ``p``."""
    if x is None or x.denominator % p == 0:
        return True
    xm = x.numerator * pow(x.denominator, -1, p) % p
    if p == 2:
        # mod 2 the cubic's only singular point sits at x = a
        return (xm - E.a) % 2 != 0
    f = (xm**3 + E.a * xm + E.b) % p
    df = (3 * xm * xm + E.a) % p
    return not (f == 0 and df == 0)


def smooth_multiplier(P: RationalPoint, limit: int = 10**4) -> int:
    """Least ``n`` with ``nP`` smooth at every bad prime (lcm of per-prime indices)."""
    E = P.curve
    n = 1
    for p in bad_primes(E):
        Q, k = P, 1
        while not _smooth_at(Q.x, E, p):
            Q = add_q(Q, P)
            k += 1
            if k > limit:
                raise ArithmeticError(f"no smooth multiple of {P} at {p} below {limit}")
        n = n * k // math.gcd(n, k)
    return n


def _series_height_mp(P: RationalPoint, dps: int) -> tuple[mpmath.mpf, mpmath.mpf, int]:
    E = P.curve
    n = smooth_multiplier(P)
    Q = mul_q(n, P)
    with mpmath.workdps(dps + 10):
        a, b = mpmath.mpf(E.a), mpmath.mpf(E.b)
        x = mpmath.mpf(Q.x.numerator) / Q.x.denominator
        total = mpmath.log(Q.x.denominator)
        terms = int(dps * math.log(10) / math.log(4)) + 8
        weight = mpmath.mpf(1)
        last = mpmath.mpf(0)
        for _ in range(terms):
            f4 = 4 * (x**3 + a * x + b)
            weight /= 4
            last = weight * mpmath.log(abs(f4))
            total += last
            x = (x**4 - 2 * a * x**2 - 8 * b * x + a * a) / f4
        value = total / (n * n)
        err = (abs(last) * 2 + mpmath.mpf(10) ** (-dps) * (1 + abs(total))) / (n * n)
    return value, err, n


def _x_double(X, Z, a, b, R):
    X2, Z2 = X * X, Z * Z
    N = X2 * X2 - 2 * a * X2 * Z2 - 8 * b * X * Z2 * Z + a * a * Z2 * Z2
    D = 4 * Z * (X2 * X + a * X * Z2 + b * Z2 * Z)
    # any common factor divides Res(N, D) = 256 (4a^3 + 27b^2)^2
    g = gmpy2.gcd(gmpy2.gcd(R, N % R), D % R)
    if D < 0:
        g = -g
    return N // g, D // g


def height_difference_bound(E: CurveQ) -> float:
    """Bound on ``|h(x(P)) - hhat(P)|`` (Silverman's 1990 bound, rescaled to x-heights)."""
    A = 4 * E.a**3
    den = 4 * E.a**3 + 27 * E.b**2
    j_num, j_den = 1728 * A, den
    g = math.gcd(j_num, j_den)
    hj = 0.0 if j_num == 0 else max(log_abs(j_num // g), log_abs(j_den // g))
    hD = log_abs(E.discriminant)
    return 2 * (hj / 8 + hD / 12 + 1.07)


def doubling_height(P: RationalPoint, tol: float = DEFAULT_TOL, k_max: int = DEFAULT_K_MAX,
                    strict: bool = False) -> HeightData:
    """``h(2^k P) / 4^k`` with exact doubling; adaptive in ``k``."""
    if torsion_order(P) is not None:
        return HeightData(0.0, 0.0, "doubling", True, 0)
    E = P.curve
    a, b = gmpy2.mpz(E.a), gmpy2.mpz(E.b)
    R = gmpy2.mpz(256 * (4 * E.a**3 + 27 * E.b**2) ** 2)
    X, Z = gmpy2.mpz(P.x.numerator), gmpy2.mpz(P.x.denominator)
    prev = max(log_abs(X) if X else 0.0, log_abs(Z))
    diff = math.inf
    k = 0
    while k < k_max:
        X, Z = _x_double(X, Z, a, b, R)
        k += 1
        est = max(log_abs(X) if X else 0.0, log_abs(Z)) / 4**k
        diff, prev = abs(est - prev), est
        if diff < tol:
            break
    err = diff + height_difference_bound(E) / 4**k
    res = HeightData(prev, err, "doubling", diff < tol, k)
    if not res.converged:
        msg = f"height of {P} not within tol={tol} after k_max={k_max} doublings"
        if strict:
            raise PrecisionNotReached(msg, res)
        log.info(msg)
    return res


@lru_cache(maxsize=4096)
def _hhat_mp(P: RationalPoint, dps: int = SERIES_DPS):
    if torsion_order(P) is not None:
        return mpmath.mpf(0), mpmath.mpf(0)
    value, err, _ = _series_height_mp(P, dps)
    return value, err


def canonical_height(P: RationalPoint, method: str = "series", tol: float = DEFAULT_TOL,
                     k_max: int = DEFAULT_K_MAX, strict: bool = False) -> HeightData:
    if method == "doubling":
        return doubling_height(P, tol, k_max, strict)
    if method != "series":
        raise ValueError(f"unknown height method {method!r}")
    value, err = _hhat_mp(P)
    return HeightData(float(value), float(err), "series", True, 0)


def height_pairing(P: RationalPoint, Q: RationalPoint) -> float:
    return float(_pairing_mp(P, Q)[0])


def _pairing_mp(P, Q):
    s, es = _hhat_mp(add_q(P, Q))
    p, ep = _hhat_mp(P)
    q, eq = _hhat_mp(Q)
    return (s - p - q) / 2, (es + ep + eq) / 2


def _gram_mp(points):
    r = len(points)
    G = mpmath.matrix(r, r)
    Err = mpmath.matrix(r, r)
    for i in range(r):
        for j in range(i, r):
            if i == j:
                v, e = _hhat_mp(points[i])
            else:
                v, e = _pairing_mp(points[i], points[j])
            G[i, j] = G[j, i] = v
            Err[i, j] = Err[j, i] = e
    return G, Err


def gram_matrix(points: Sequence[RationalPoint]) -> list[list[float]]:
    G, _ = _gram_mp(list(points))
    return [[float(G[i, j]) for j in range(G.cols)] for i in range(G.rows)]


def regulator_with_error(points: Sequence[RationalPoint]) -> tuple[float, float]:
    points = list(points)
    if not points:
        return 1.0, 0.0
    E = points[0].curve
    if any(P.curve != E for P in points):
        raise CurveMismatch("regulator needs points on one curve")
    with mpmath.workdps(SERIES_DPS):
        G, Err = _gram_mp(points)
        det = mpmath.det(G)
        # first-order bound: each cofactor is at most (r-1)! * scale^(r-1)
        r = len(points)
        scale = max(abs(G[i, j]) for i in range(r) for j in range(r)) + 1
        emax = max(Err[i, j] for i in range(r) for j in range(r))
        bound = 2 * r * r * math.factorial(r) * scale ** (r - 1) * emax
        bound += mpmath.mpf(10) ** (-(SERIES_DPS - 15)) * scale**r
    return float(det), float(bound)


def regulator(points: Sequence[RationalPoint]) -> float:
    return regulator_with_error(points)[0]


def find_relation(points: Sequence[RationalPoint], bound: int | None = None) -> tuple[int, ...] | None:
    """Small nonzero ``c`` with ``sum c_i P_i`` torsion, or ``None`` if none with ``|c_i| <= bound``."""
    points = list(points)
    r = len(points)
    if bound is None:
        bound = {1: 12, 2: 12, 3: 6}.get(r, 2)
    multiples = [[mul_q(c, P) for c in range(-bound, bound + 1)] for P in points]
    for c in itertools.product(range(-bound, bound + 1), repeat=r):
        nz = [v for v in c if v]
        if not nz or nz[0] < 0:
            continue
        S = points[0].curve.infinity
        for i, v in enumerate(c):
            if v:
                S = add_q(S, multiples[i][v + bound])
        if torsion_order(S) is not None:
            return c
    return None


def is_almost_free(points: Sequence[RationalPoint], reg_tol: float = DEFAULT_REG_TOL) -> bool:
    """Almost-freeness for points on one curve over Q.

    ``End(E) = Z`` over Q, so this is: every point has infinite order and the
    points are independent modulo torsion.  A regulator within its own error
    of zero is settled by an exact search for a small integer relation;
    :class:`IndeterminateRank` is raised when neither route decides.
    """
    points = list(points)
    if not points:
        return True
    if any(torsion_order(P) is not None for P in points):
        return False
    reg, err = regulator_with_error(points)
    if abs(reg) > err:
        return reg > reg_tol
    if find_relation(points) is not None:
        return False
    raise IndeterminateRank(f"regulator {reg:.3e} is within its error {err:.3e} of 0 and no small relation exists")
