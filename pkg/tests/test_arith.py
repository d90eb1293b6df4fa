"""Exact arithmetic: primality, factorization, cyclotomics, smooth parts."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phistar.arith import (DomainError, EffortBudget, EffortExceeded,
                           Factorization, cyclotomic_value, divisors,
                           euler_phi, factorize, format_factored, is_prime,
                           largest_prime_factor, mobius, multiplicative_order,
                           parse_factored, primes_below, smooth_part)

# the full factorization displayed for 2**210 - 1; re-multiplied below
POW210_FACTORS = ((3, 2), (7, 2), (11, 1), (31, 1), (43, 1), (71, 1),
                  (127, 1), (151, 1), (211, 1), (281, 1), (331, 1), (337, 1),
                  (5419, 1), (29191, 1), (86171, 1), (106681, 1), (122921, 1),
                  (152041, 1), (664441, 1), (1564921, 1))


def spf_table(limit):
    spf = list(range(limit))
    for i in range(2, math.isqrt(limit - 1) + 1):
        if spf[i] == i:
            for j in range(i * i, limit, i):
                if spf[j] == j:
                    spf[j] = i
    return spf


# --------------------------------------------------------------------------
# primality
# --------------------------------------------------------------------------

def test_is_prime_small_exhaustive():
    limit = 100000
    spf = spf_table(limit)
    for n in range(limit):
        assert is_prime(n) == (n > 1 and spf[n] == n), n


@pytest.mark.parametrize("n,expected", [
    (2, True), (19531, True), (65537, True), (1, False), (0, False),
    (2047, False), (2 ** 61 - 1, True), (2 ** 89 - 1, True),
    (1564921, True), (12207031, True), (305175781, True),
    (2 ** 64 + 13, True), (2 ** 64 + 15, False),
    ((2 ** 89 - 1) * (2 ** 61 - 1), False),
    (10 ** 30 + 57, True),  # known titanic-free prime
])
def test_is_prime_spot(n, expected):
    assert is_prime(n) == expected


def test_is_prime_strong_pseudoprimes():
    # strong pseudoprimes to base 2; must all be rejected
    for n in (2047, 3277, 4033, 4681, 8321, 15841, 29341, 42799, 49141,
              3215031751, 3825123056546413051):
        assert not is_prime(n)


# --------------------------------------------------------------------------
# factorization
# --------------------------------------------------------------------------

def test_factorize_examples():
    assert factorize(2047).pairs == ((23, 1), (89, 1))
    assert factorize(1).pairs == ()
    f = factorize(2 ** 210 - 1)
    assert f.pairs == POW210_FACTORS
    assert f.omega == 20
    assert f.value() == 2 ** 210 - 1


def test_factorize_agrees_with_sieve_oracle():
    limit = 200000
    spf = spf_table(limit)
    for n in range(1, limit):
        expected = {}
        m = n
        while m > 1:
            p = spf[m]
            expected[p] = expected.get(p, 0) + 1
            m //= p
        assert factorize(n).pairs == tuple(sorted(expected.items())), n


def test_factorize_sampled_beyond_sieve():
    rng = random.Random(20240811)
    for _ in range(300):
        n = rng.randrange(2, 10 ** 12)
        f = factorize(n)
        assert f.value() == n
        f.validate()


def test_largest_prime_factor():
    assert largest_prime_factor(63) == 7
    assert largest_prime_factor(2047) == 89
    assert largest_prime_factor(2) == 2
    with pytest.raises(DomainError):
        largest_prime_factor(1)


def test_largest_prime_factor_full_sweep_vs_sieve():
    limit = 100000
    spf = spf_table(limit)
    for n in range(2, limit):
        m, big = n, 1
        while m > 1:
            big = max(big, spf[m])
            m //= spf[m]
        assert largest_prime_factor(n) == big, n


def test_effort_exceeded_names_cofactor():
    # product of two 40-digit-ish primes is far beyond the rho budget
    p = 10 ** 30 + 57
    q = 10 ** 31 + 33
    assert is_prime(q)
    tiny = EffortBudget(trial_bound=1000, rho_rounds=1, rho_iterations=200,
                        pm1_bound=200)
    with pytest.raises(EffortExceeded) as err:
        factorize(3 * p * q, tiny)
    assert err.value.cofactor == p * q
    assert (3, 1) in err.value.partial


def test_factorization_type_invariants():
    with pytest.raises(ValueError):
        Factorization(((4, 1), (3, 1)))  # unsorted
    with pytest.raises(ValueError):
        Factorization(((3, 0),))  # zero exponent
    with pytest.raises(ValueError):
        Factorization(((9, 1),)).validate()  # 9 not prime
    f = parse_factored("2^32*3*5*17*257*65537")
    assert f.value() == 2 ** 32 * (2 ** 32 - 1)
    assert format_factored(f) == "2^32*3*5*17*257*65537"
    assert parse_factored("1").pairs == ()


def test_decimal_roundtrip():
    n = 2 ** 210 - 1
    assert int(str(n)) == n  # decimal string encoding is exact


# --------------------------------------------------------------------------
# cyclotomic values and orders
# --------------------------------------------------------------------------

def test_cyclotomic_examples():
    assert cyclotomic_value(1, 2) == 1
    assert cyclotomic_value(6, 2) == 3
    assert cyclotomic_value(11, 2) == 2047


@pytest.mark.parametrize("a", [2, 3, 5, 7])
def test_cyclotomic_product_identity(a):
    for k in range(1, 201):
        prod = 1
        for d in divisors(k):
            prod *= cyclotomic_value(d, a)
        assert prod == a ** k - 1, (a, k)


def test_cyclotomic_lower_bound():
    # Phi_k(2)**2 >= 3**phi(k), exactly, for 3 <= k <= 500
    for k in range(3, 501):
        assert cyclotomic_value(k, 2) ** 2 >= 3 ** euler_phi(k), k


def test_multiplicative_order():
    assert multiplicative_order(2, 3) == 2
    assert multiplicative_order(2, 7) == 3
    assert multiplicative_order(2, 89) == 11
    with pytest.raises(DomainError):
        multiplicative_order(14, 7)


def test_mobius_and_divisors():
    assert [mobius(k) for k in (1, 2, 3, 4, 6, 12, 30)] == [1, -1, -1, 0, 1, 0, -1]
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


# --------------------------------------------------------------------------
# smooth parts
# --------------------------------------------------------------------------

def test_smooth_part_examples():
    smooth, cof = smooth_part(63, 10)
    assert smooth.pairs == ((3, 2), (7, 1)) and cof == 1
    smooth, cof = smooth_part(2 ** 31 - 1, 10 ** 5)
    assert smooth.pairs == () and cof == 2147483647
    smooth, cof = smooth_part(997 * 991, 2)
    assert smooth.pairs == () and cof == 997 * 991


def test_smooth_part_progression_filter():
    # only primes = 1 (mod 11) below the bound are tried
    n = 23 * 89 * 7  # 23 and 89 are 1 mod 11; 7 is not
    smooth, cof = smooth_part(n, 100, modulus=11)
    assert smooth.pairs == ((23, 1), (89, 1))
    assert cof == 7
    smooth, cof = smooth_part(n, 100, modulus=11, extra_primes=(7,))
    assert cof == 1


@given(n=st.integers(min_value=1, max_value=2 ** 64 - 1),
       bound=st.sampled_from([10, 1000, 65536]))
@settings(max_examples=150, deadline=None)
def test_smooth_part_property(n, bound):
    smooth, cof = smooth_part(n, bound)
    assert smooth.value() * cof == n
    tried = primes_below(bound)
    for p, _ in smooth.pairs:
        assert p < bound
    # cofactor is coprime to every tried prime
    for p in tried.tolist():
        assert cof % p, (n, bound, p)
