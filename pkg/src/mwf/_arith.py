"""Affine group law on y^2 = x^3 + a x + b over F_p, on bare Python ints.

A point is ``(x, y)``; the point at infinity is ``INF = (-1, 0)``.  These
helpers carry no validation and are what every hot path in the package
calls; the checked, object-level API lives in :mod:`mwf.ec_fp`.
"""
from __future__ import annotations

from .factor import factorint

INF = (-1, 0)


def add(P, Q, a, p):
    x1, y1 = P
    x2, y2 = Q
    if x1 == -1:
        return Q
    if x2 == -1:
        return P
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return INF
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def neg(P, p):
    return P if P[0] == -1 else (P[0], -P[1] % p)


def mul(k, P, a, p):
    if k < 0:
        k, P = -k, neg(P, p)
    R = INF
    while k:
        if k & 1:
            R = add(R, P, a, p)
        k >>= 1
        if k:
            P = add(P, P, a, p)
    return R


def order_from_multiple(M, P, a, p, factors=None):
    """Exact order of ``P`` given ``M * P == INF``."""
    order = M
    for q, _ in factors if factors is not None else factorint(M):
        while order % q == 0 and mul(order // q, P, a, p)[0] == -1:
            order //= q
    return order


def lpower_order(P, ell, a, p, cap=256):
    """``v`` with ``ord(P) == ell**v`` for a point of ell-power order."""
    v = 0
    while P[0] != -1:
        P = mul(ell, P, a, p)
        v += 1
        if v > cap:
            raise ArithmeticError("point does not have ell-power order")
    return v
