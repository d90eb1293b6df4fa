"""Backend equivalence: compiled and pure kernels must agree bit for bit."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phistar.kernels import available_backends, divide_out, sieve

BACKENDS = available_backends()


def brute_primes(limit):
    out = []
    for n in range(2, limit):
        if all(n % p for p in out if p * p <= n):
            out.append(n)
    return out


@pytest.mark.parametrize("name", sorted(BACKENDS))
@pytest.mark.parametrize("limit", [0, 1, 2, 3, 4, 10, 97, 100, 1000, 7919])
def test_sieve_matches_brute_force(name, limit):
    got = BACKENDS[name].sieve(limit).tolist()
    assert got == brute_primes(limit)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_sieve_large_spot(name):
    primes = BACKENDS[name].sieve(10 ** 6)
    assert len(primes) == 78498
    assert int(primes[-1]) == 999983


@given(n=st.integers(min_value=1, max_value=10 ** 30),
       bound=st.sampled_from([10, 100, 1000, 65536]))
@settings(max_examples=200, deadline=None)
def test_divide_out_backends_agree(n, bound):
    primes = sieve(bound)
    results = {}
    for name, mod in BACKENDS.items():
        pairs, residual, certified = mod.divide_out(n, primes, sqrt_cut=False)
        value = math.prod(p ** e for p, e in pairs) * residual
        assert value == n
        results[name] = (pairs, residual, certified)
    assert len(set(map(str, results.values()))) == 1


@given(n=st.integers(min_value=2, max_value=10 ** 24))
@settings(max_examples=200, deadline=None)
def test_divide_out_sqrt_cut_certifies_prime(n):
    primes = sieve(100000)
    for name, mod in BACKENDS.items():
        pairs, residual, certified = mod.divide_out(n, primes, sqrt_cut=True)
        assert math.prod(p ** e for p, e in pairs) * residual == n
        if certified and residual > 1:
            # certificate: residual prime (all divisors below cut were tried)
            assert all(residual % p for p in brute_primes(min(
                math.isqrt(residual) + 1, 1000)))


def test_divide_out_full_multiplicity():
    primes = sieve(100)
    pairs, residual, _ = divide_out(2 ** 10 * 3 ** 5 * 97 ** 3, primes)
    assert pairs == [(2, 10), (3, 5), (97, 3)]
    assert residual == 1


def test_divide_out_big_then_small_transition():
    # starts far above 2**63, ends tiny
    n = (2 ** 89 - 1) * 2 ** 70 * 3
    primes = sieve(1000)
    pairs, residual, _ = divide_out(n, primes)
    assert dict(pairs)[2] == 70
    assert dict(pairs)[3] == 1
    assert residual == 2 ** 89 - 1
