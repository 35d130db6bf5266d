"""Prime-field arithmetic and prime enumeration.

Hot paths inside the package work on plain ``int`` residues; the
:class:`FpElement` wrapper exists for callers that want operator syntax and
for the public ``mod_inverse`` / ``legendre`` / ``sqrt_mod`` surface.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonResidue, NotPrime, RangeTooLarge, ZeroInverse

MODULUS_BOUND = 1 << 62
SIEVE_BOUND = 1 << 32

# Deterministic for n < 3.3e24, which covers every modulus we accept.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeModulus(int):
    """An ``int`` known to be a prime below 2**62."""

    def __new__(cls, p, *, check: bool = True):
        p = int(p)
        if check and not (2 <= p < MODULUS_BOUND and is_prime(p)):
            raise NotPrime(f"{p} is not a prime in [2, 2^62)")
        return super().__new__(cls, p)

    def __repr__(self):
        return f"PrimeModulus({int(self)})"

    __str__ = int.__repr__


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroInverse(f"0 has no inverse mod {p}")
    return pow(a, -1, p)


def legendre_int(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod_int(a: int, p: int) -> int:
    """Return the smaller square root of ``a`` modulo an odd prime ``p``.

    Tonelli-Shanks, with the ``p % 4 == 3`` shortcut.
    """
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        raise NonResidue(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return min(r, p - r)


@dataclass(frozen=True)
class FpElement:
    value: int
    modulus: PrimeModulus

    def __post_init__(self):
        if not isinstance(self.modulus, PrimeModulus):
            object.__setattr__(self, "modulus", PrimeModulus(self.modulus))
        object.__setattr__(self, "value", int(self.value) % self.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, FpElement):
            if other.modulus != self.modulus:
                raise ValueError("elements of different fields")
            return other.value
        return int(other)

    def _new(self, v: int) -> FpElement:
        return FpElement(v, self.modulus)

    def __add__(self, other):
        return self._new(self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._new(self.value - self._coerce(other))

    def __rsub__(self, other):
        return self._new(self._coerce(other) - self.value)

    def __mul__(self, other):
        return self._new(self.value * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.value)

    def __truediv__(self, other):
        return self * mod_inverse(self._new(self._coerce(other)))

    def __pow__(self, n: int):
        if n < 0:
            return mod_inverse(self) ** (-n)
        return self._new(pow(self.value, n, self.modulus))

    def __eq__(self, other):
        if isinstance(other, FpElement):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, int(self.modulus)))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {int(self.modulus)})"


def mod_inverse(a: FpElement) -> FpElement:
    return FpElement(inv_mod(a.value, a.modulus), a.modulus)


def legendre(a: FpElement) -> int:
    if a.modulus == 2:
        return 0 if a.value == 0 else 1
    return legendre_int(a.value, a.modulus)


def sqrt_mod(a: FpElement) -> tuple[FpElement, ...]:
    """Both square roots ``(r, p - r)`` with ``r <= p - r``; ``(0,)`` for zero."""
    p = a.modulus
    if a.value == 0:
        return (FpElement(0, p),)
    if p == 2:
        return (FpElement(1, p),)
    r = sqrt_mod_int(a.value, p)
    return (FpElement(r, p), FpElement(p - r, p))


def _small_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return np.flatnonzero(sieve).astype(np.int64)


def prime_array(lo: int, hi: int, segment: int = 1 << 20) -> np.ndarray:
    """Primes in ``[lo, hi]`` as an int64 array (segmented sieve)."""
    if hi > SIEVE_BOUND:
        raise RangeTooLarge(f"hi={hi} exceeds sieve bound 2^32")
    lo = max(lo, 2)
    if hi < lo:
        return np.zeros(0, dtype=np.int64)
    base = _small_primes(math.isqrt(hi))
    chunks = []
    start = lo
    while start <= hi:
        stop = min(start + segment - 1, hi)
        mask = np.ones(stop - start + 1, dtype=bool)
        for q in base:
            q = int(q)
            if q * q > stop:
                break
            first = max(q * q, -(-start // q) * q)
            if first <= stop:
                mask[first - start :: q] = False
        chunks.append(np.flatnonzero(mask).astype(np.int64) + start)
        start = stop + 1
    return np.concatenate(chunks)


def primes_in_range(lo: int, hi: int) -> list[PrimeModulus]:
    return [PrimeModulus(int(q), check=False) for q in prime_array(lo, hi)]
