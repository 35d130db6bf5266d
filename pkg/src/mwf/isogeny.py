"""Explicit isogenies over Q from Vélu's formulas.

An isogeny is stored as a list of kernel terms ``(x_Q, t_Q, u_Q)``, one per
point ``Q`` of a half-kernel (the 2-torsion point itself for degree 2), giving

    X = x + sum t_Q / (x - x_Q) + u_Q / (x - x_Q)^2
    Y = y * dX/dx

with codomain ``a' = a - 5 sum t_Q`` and ``b' = b - 7 sum (u_Q + x_Q t_Q)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import gmpy2

from .ec_q import CurveQ, RationalPoint, add_q, mul_q, torsion_order
from .errors import DomainMismatch, NoIsomorphismFound, NotOddTorsion, NotTwoTorsion
from .fp import is_prime

ISOMORPHISM_SCALE_BOUND = 10**3


@dataclass(frozen=True)
class Isogeny:
    domain: CurveQ
    codomain: CurveQ
    kernel_x: tuple[Fraction, ...]
    degree: int
    terms: tuple[tuple[Fraction, Fraction, Fraction], ...]

    def __call__(self, P: RationalPoint) -> RationalPoint:
        return pushforward(self, P)

    def x_map(self, x: Fraction) -> Fraction:
        X = x
        for xq, t, u in self.terms:
            d = x - xq
            X += t / d + u / (d * d)
        return X

    def x_map_derivative(self, x: Fraction) -> Fraction:
        dX = Fraction(1)
        for xq, t, u in self.terms:
            d = x - xq
            dX -= t / (d * d) + 2 * u / (d * d * d)
        return dX


def _codomain(E: CurveQ, terms) -> CurveQ:
    T = sum((t for _, t, _ in terms), Fraction(0))
    W = sum((u + xq * t for xq, t, u in terms), Fraction(0))
    a2, b2 = E.a - 5 * T, E.b - 7 * W
    if a2.denominator != 1 or b2.denominator != 1:
        raise ArithmeticError(f"Vélu codomain ({a2}, {b2}) is not integral")
    return CurveQ(int(a2), int(b2))


def identity_isogeny(E: CurveQ) -> Isogeny:
    return Isogeny(E, E, (), 1, ())


def velu_2isogeny(E: CurveQ, x0) -> Isogeny:
    """The 2-isogeny with kernel ``{O, (x0, 0)}``."""
    x0 = Fraction(x0)
    if x0**3 + E.a * x0 + E.b != 0:
        raise NotTwoTorsion(f"({x0}, 0) is not on {E.equation}")
    t = 3 * x0 * x0 + E.a
    terms = ((x0, t, Fraction(0)),)
    return Isogeny(E, _codomain(E, terms), (x0,), 2, terms)


def velu_odd_isogeny(E: CurveQ, T: RationalPoint) -> Isogeny:
    """The isogeny with kernel ``<T>`` for ``T`` of odd prime order."""
    if T.curve != E:
        raise DomainMismatch(f"{T} is not on {E.equation}")
    n = torsion_order(T)
    if n is None or n < 3 or not is_prime(n):
        raise NotOddTorsion(f"{T} does not have odd prime order (order {n})")
    terms = []
    Q = T
    for _ in range((n - 1) // 2):
        gx = 3 * Q.x * Q.x + E.a
        terms.append((Q.x, 2 * gx, 4 * Q.y * Q.y))
        Q = add_q(Q, T)
    kernel = tuple(mul_q(k, T).x for k in range(1, n))
    return Isogeny(E, _codomain(E, terms), kernel, n, tuple(terms))


def pushforward(phi: Isogeny, P: RationalPoint) -> RationalPoint:
    if P.curve != phi.domain:
        raise DomainMismatch(f"{P} is not on the domain {phi.domain.equation}")
    if P.x is None or P.x in phi.kernel_x:
        return phi.codomain.infinity
    return RationalPoint(phi.codomain, phi.x_map(P.x), P.y * phi.x_map_derivative(P.x))


def _rational_root(q: Fraction, k: int) -> Fraction | None:
    """Positive ``r`` with ``r**k == q``, if one exists."""
    if q <= 0:
        return None
    n, nexact = gmpy2.iroot(gmpy2.mpz(q.numerator), k)
    d, dexact = gmpy2.iroot(gmpy2.mpz(q.denominator), k)
    if not (nexact and dexact):
        return None
    return Fraction(int(n), int(d))


def scaling_between(src: CurveQ, dst: CurveQ, bound: int = ISOMORPHISM_SCALE_BOUND) -> Fraction:
    """``u > 0`` with ``dst = (u^4 a, u^6 b)`` for ``src = (a, b)``."""
    if (src.a == 0) != (dst.a == 0) or (src.b == 0) != (dst.b == 0):
        raise NoIsomorphismFound(f"{src.equation} and {dst.equation} are not related by a scaling")
    if src.a != 0:
        u = _rational_root(Fraction(dst.a, src.a), 4)
    else:
        u2 = _rational_root(Fraction(dst.b, src.b), 3)
        u = None if u2 is None else _rational_root(u2, 2)
    if u is None or u.numerator > bound or u.denominator > bound:
        raise NoIsomorphismFound(f"no scaling u with |num|, den <= {bound} maps {src.equation} to {dst.equation}")
    if u**4 * src.a != dst.a or u**6 * src.b != dst.b:
        raise NoIsomorphismFound(f"no scaling u maps {src.equation} to {dst.equation}")
    return u


def dual_2isogeny(phi: Isogeny) -> tuple[Isogeny, Fraction]:
    """The 2-isogeny back from the codomain and the scaling onto ``phi.domain``.

    For a Vélu 2-isogeny with kernel at ``x0`` the codomain has the rational
    2-torsion point ``(-2 x0, 0)``, which generates the dual's kernel.
    """
    if phi.degree != 2:
        raise ValueError("dual_2isogeny needs a degree-2 isogeny")
    psi = velu_2isogeny(phi.codomain, -2 * phi.kernel_x[0])
    return psi, scaling_between(phi.domain, psi.codomain)


def unscale(P: RationalPoint, u: Fraction, target: CurveQ) -> RationalPoint:
    if P.x is None:
        return target.infinity
    return RationalPoint(target, P.x / u**2, P.y / u**3)


def dual_check(phi: Isogeny, samples: Sequence[RationalPoint]) -> bool:
    """Whether the dual composed with ``phi`` acts as ``[2]`` (up to sign) on ``samples``."""
    psi, u = dual_2isogeny(phi)
    for P in samples:
        R = unscale(pushforward(psi, pushforward(phi, P)), u, phi.domain)
        twoP = mul_q(2, P)
        if R != twoP and R != -twoP:
            return False
    return True
