"""Integer factorization for group orders: trial division, then Pollard-Brent."""
from __future__ import annotations

import math
from functools import lru_cache

from .fp import _small_primes, is_prime

TRIAL_BOUND = 10**6
_TRIAL_PRIMES = None


def _trial_primes():
    global _TRIAL_PRIMES
    if _TRIAL_PRIMES is None:
        _TRIAL_PRIMES = [int(q) for q in _small_primes(TRIAL_BOUND)]
    return _TRIAL_PRIMES


def _brent(n: int, c: int) -> int:
    y, m, g, r, q = 2, 128, 1, 1, 1
    f = lambda v: (v * v + c) % n
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = f(y)
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = f(y)
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        g = 1
        while g == 1:
            ys = f(ys)
            g = math.gcd(abs(x - ys), n)
    return g


def _split(n: int) -> int:
    for c in range(1, 200):
        d = _brent(n, c)
        if 1 < d < n:
            return d
    raise ArithmeticError(f"Pollard-Brent failed on {n}")


@lru_cache(maxsize=65536)
def factorint(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of ``n >= 1`` as sorted ``((q, e), ...)``."""
    if n < 1:
        raise ValueError("factorint needs n >= 1")
    out: dict[int, int] = {}
    for q in _trial_primes():
        if q * q > n:
            break
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            out[q] = e
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
        else:
            d = _split(m)
            stack += [d, m // d]
    return tuple(sorted(out.items()))


def valuation(n: int, q: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v
