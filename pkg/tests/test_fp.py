import pytest
import sympy
from hypothesis import given, strategies as st

from mwf.errors import NonResidue, NotPrime, RangeTooLarge, ZeroInverse
from mwf.fp import (
    FpElement,
    PrimeModulus,
    is_prime,
    legendre,
    mod_inverse,
    prime_array,
    primes_in_range,
    sqrt_mod,
)

P5 = PrimeModulus(5)
P7 = PrimeModulus(7)

primes_st = st.sampled_from([5, 7, 11, 101, 65537, 2**31 - 1, 1000000007, 2**61 - 1])


def F(v, p):
    return FpElement(v % p, PrimeModulus(p))


@pytest.mark.parametrize("a,p,expected", [(2, 5, 3), (1, 13, 1), (3, 7, 5)])
def test_mod_inverse_examples(a, p, expected):
    assert mod_inverse(F(a, p)).value == expected


def test_zero_has_no_inverse():
    with pytest.raises(ZeroInverse):
        mod_inverse(F(0, 5))


@pytest.mark.parametrize("a,expected", [(4, 1), (0, 0), (2, -1)])
def test_legendre_examples(a, expected):
    assert legendre(F(a, 5)) == expected


def test_sqrt_examples():
    assert sorted(r.value for r in sqrt_mod(F(4, 5))) == [2, 3]
    assert sorted(r.value for r in sqrt_mod(F(2, 7))) == [3, 4]
    assert [r.value for r in sqrt_mod(F(0, 7))] == [0]
    with pytest.raises(NonResidue):
        sqrt_mod(F(3, 5))


def test_modulus_validation():
    with pytest.raises(NotPrime):
        PrimeModulus(9)
    with pytest.raises(NotPrime):
        PrimeModulus(1 << 62)


def test_element_is_canonical():
    assert FpElement(12, P5).value == 2
    assert FpElement(-1, P5).value == 4
    assert (F(3, 5) + F(4, 5)).value == 2
    assert (F(3, 5) * F(4, 5)).value == 2
    assert (F(3, 5) / F(4, 5) * F(4, 5)).value == 3


@given(primes_st, st.integers(min_value=1))
def test_inverse_property(p, a):
    a %= p
    if a == 0:
        return
    assert (F(a, p) * mod_inverse(F(a, p))).value == 1


@given(primes_st, st.integers(min_value=0))
def test_sqrt_property(p, a):
    x = F(a, p)
    if legendre(x) < 0:
        with pytest.raises(NonResidue):
            sqrt_mod(x)
        return
    roots = sqrt_mod(x)
    assert all((r * r).value == x.value for r in roots)
    assert {r.value for r in roots} == {roots[0].value, (-roots[0]).value}


@pytest.mark.parametrize("p", [q for q in range(3, 100) if is_prime(q)])
def test_half_of_units_are_squares(p):
    assert len({x * x % p for x in range(1, p)}) == (p - 1) // 2
    assert sum(legendre(F(x, p)) == 1 for x in range(1, p)) == (p - 1) // 2


def test_primes_in_range_examples():
    assert primes_in_range(2, 10) == [2, 3, 5, 7]
    assert primes_in_range(14, 16) == []
    assert primes_in_range(9973, 9973) == [9973]
    with pytest.raises(RangeTooLarge):
        primes_in_range(2, 2**32 + 10)


@given(st.integers(min_value=0, max_value=2**32 - 10**4))
def test_sieve_matches_sympy(lo):
    hi = lo + 10**4
    assert list(prime_array(lo, hi)) == list(sympy.primerange(lo, hi + 1))


def test_sieve_across_segments():
    got = prime_array(10**6, 3 * 10**6, segment=1 << 16)
    assert list(got) == list(sympy.primerange(10**6, 3 * 10**6 + 1))


@given(st.integers(min_value=0, max_value=2**64))
def test_is_prime_matches_sympy(n):
    assert is_prime(n) == sympy.isprime(n)
