"""Elliptic curves over Q in integral short Weierstrass form, and reduction mod p."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _arith
from .ec_fp import CurveFp, FpPoint
from .errors import BadPrime, CurveMismatch, NotOnCurve, SingularCurve
from .fp import PrimeModulus, prime_array

MAZUR_BOUND = 12


@dataclass(frozen=True)
class CurveQ:
    """``y^2 = x^3 + a x + b`` with integer ``a, b``.

    The model is not required to be minimal; a non-minimal model simply has
    more bad primes.
    """

    a: int
    b: int

    def __post_init__(self):
        object.__setattr__(self, "a", int(self.a))
        object.__setattr__(self, "b", int(self.b))
        if 4 * self.a**3 + 27 * self.b**2 == 0:
            raise SingularCurve(f"y^2 = x^3 + ({self.a})x + ({self.b}) is singular")

    @property
    def discriminant(self) -> int:
        return -16 * (4 * self.a**3 + 27 * self.b**2)

    def __str__(self):
        return f"{self.a} {self.b}"

    @property
    def equation(self) -> str:
        text = "y^2 = x^3"
        if self.a:
            text += f" {'-' if self.a < 0 else '+'} {abs(self.a) if abs(self.a) != 1 else ''}x"
        if self.b:
            text += f" {'-' if self.b < 0 else '+'} {abs(self.b)}"
        return text

    def contains(self, x: Fraction, y: Fraction) -> bool:
        return y * y == x**3 + self.a * x + self.b

    def residual(self, x: Fraction, y: Fraction) -> Fraction:
        return y * y - (x**3 + self.a * x + self.b)

    def point(self, x, y) -> RationalPoint:
        return RationalPoint(self, Fraction(x), Fraction(y))

    @property
    def infinity(self) -> RationalPoint:
        return RationalPoint(self, None, None)

    def is_good(self, p: int) -> bool:
        return p > 3 and self.discriminant % p != 0

    def reduce(self, p: int) -> CurveFp:
        if not self.is_good(p):
            raise BadPrime(f"{p} is not a good prime (p > 3, p does not divide {self.discriminant})")
        return CurveFp(self.a, self.b, p)


@dataclass(frozen=True)
class RationalPoint:
    curve: CurveQ
    x: Fraction | None
    y: Fraction | None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise ValueError("both coordinates or neither")
        if self.x is not None and not self.curve.contains(self.x, self.y):
            raise NotOnCurve(f"({self.x}, {self.y}) is not on {self.curve.equation}")

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def is_integral(self) -> bool:
        return self.x is None or (self.x.denominator == 1 and self.y.denominator == 1)

    def __add__(self, other: RationalPoint) -> RationalPoint:
        return add_q(self, other)

    def __neg__(self) -> RationalPoint:
        return self if self.x is None else RationalPoint(self.curve, self.x, -self.y)

    def __sub__(self, other: RationalPoint) -> RationalPoint:
        return add_q(self, -other)

    def __rmul__(self, n: int) -> RationalPoint:
        return mul_q(n, self)

    def __str__(self):
        return "inf" if self.x is None else f"{self.x} {self.y}"


def _add_unchecked(E: CurveQ, x1, y1, x2, y2):
    if x1 == x2:
        if y1 + y2 == 0:
            return None, None
        lam = (3 * x1 * x1 + E.a) / (2 * y1)
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam - x1 - x2
    return x3, lam * (x1 - x3) - y1


def add_q(P: RationalPoint, Q: RationalPoint) -> RationalPoint:
    if P.curve != Q.curve:
        raise CurveMismatch("points lie on different curves")
    if P.x is None:
        return Q
    if Q.x is None:
        return P
    x, y = _add_unchecked(P.curve, P.x, P.y, Q.x, Q.y)
    # skip re-validation: the chord-tangent formulas keep points on the curve
    pt = object.__new__(RationalPoint)
    object.__setattr__(pt, "curve", P.curve)
    object.__setattr__(pt, "x", x)
    object.__setattr__(pt, "y", y)
    return pt


def mul_q(n: int, P: RationalPoint) -> RationalPoint:
    if n < 0:
        n, P = -n, -P
    R = P.curve.infinity
    while n:
        if n & 1:
            R = add_q(R, P)
        n >>= 1
        if n:
            P = add_q(P, P)
    return R


def torsion_order(P: RationalPoint) -> int | None:
    """Order of ``P`` if it is torsion, else ``None``.

    Integral model, so a non-integral ``P`` or ``2P`` is non-torsion
    (Nagell-Lutz); otherwise multiples are tried up to Mazur's bound 12.
    """
    if P.is_infinity:
        return 1
    if not P.is_integral():
        return None
    if P.y == 0:
        return 2
    if (4 * P.curve.a**3 + 27 * P.curve.b**2) % int(P.y) ** 2 != 0:
        return None
    Q = P
    for n in range(2, MAZUR_BOUND + 1):
        Q = add_q(Q, P)
        if Q.is_infinity:
            return n
        if not Q.is_integral():
            return None
    return None


def is_torsion(P: RationalPoint) -> bool:
    return torsion_order(P) is not None


def good_primes(E: CurveQ, lo: int, hi: int) -> list[PrimeModulus]:
    """Primes of good reduction in ``[max(lo, 5), hi]``."""
    ps = prime_array(max(lo, 5), hi)
    D = abs(E.discriminant)
    return [PrimeModulus(int(p), check=False) for p in ps if D % int(p)]


def common_good_primes(curves, lo: int, hi: int) -> list[PrimeModulus]:
    ps = prime_array(max(lo, 5), hi)
    Ds = [abs(E.discriminant) for E in curves]
    return [PrimeModulus(int(p), check=False) for p in ps if all(D % int(p) for D in Ds)]


def reduce_xy(P: RationalPoint, p: int) -> tuple[int, int]:
    """Raw reduction ``(x, y)`` of ``P`` mod ``p`` (``(-1, 0)`` for the identity).

    Assumes ``p`` is good for the curve.
    """
    if P.x is None or P.x.denominator % p == 0:
        return _arith.INF
    x = P.x.numerator * pow(P.x.denominator, -1, p) % p
    y = P.y.numerator * pow(P.y.denominator, -1, p) % p
    return x, y


def reduce_point(P: RationalPoint, p: int, curve_fp: CurveFp | None = None) -> FpPoint:
    E = curve_fp if curve_fp is not None else P.curve.reduce(p)
    if curve_fp is None and not P.curve.is_good(p):
        raise BadPrime(f"{p} is bad for {P.curve.equation}")
    return FpPoint(E, reduce_xy(P, p))


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def parse_curve(text: str) -> CurveQ:
    parts = text.split()
    if len(parts) != 2:
        raise ValueError(f"curve must be 'a b', got {text!r}")
    return CurveQ(int(parts[0]), int(parts[1]))


def parse_point(E: CurveQ, text: str) -> RationalPoint:
    text = text.strip()
    if text.lower() in ("inf", "infinity", "o"):
        return E.infinity
    parts = text.split()
    if len(parts) != 2:
        raise ValueError(f"point must be 'x y' or 'inf', got {text!r}")
    return E.point(parse_rational(parts[0]), parse_rational(parts[1]))
