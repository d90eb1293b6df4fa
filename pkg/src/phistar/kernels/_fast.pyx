# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: odd-wheel sieve and multiplicity-exact trial division.

Must stay behaviourally identical to ``_pyref``; the test suite cross-checks
the two backends on random inputs.
"""

from libc.stdint cimport uint64_t, int64_t
from libc.string cimport memset

import math

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef uint64_t _U63 = (<uint64_t>1) << 63


def sieve(limit):
    """All primes < limit as a uint64 array (odd-only Eratosthenes)."""
    if limit <= 2:
        return np.empty(0, dtype=np.uint64)
    cdef int64_t half = limit // 2
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] comp = np.zeros(half, dtype=np.uint8)
    cdef cnp.uint8_t[::1] c = comp
    c[0] = 1
    cdef int64_t i, j, p, top
    top = (math.isqrt(limit - 1) - 1) // 2
    for i in range(1, top + 1):
        if not c[i]:
            p = 2 * i + 1
            j = (p * p) // 2
            while j < half:
                c[j] = 1
                j += p
    odds = 2 * np.nonzero(comp == 0)[0].astype(np.uint64) + 1
    return np.concatenate([np.array([2], dtype=np.uint64), odds])


def divide_out(n, primes, bint sqrt_cut=False):
    """Divide primes out of n to full multiplicity.

    Same contract as the reference backend: returns (pairs, residual,
    certified); with sqrt_cut the scan stops once q*q exceeds the residual,
    which certifies the residual as 1 or prime provided the prime list
    covers every possible divisor below the stopping point.
    """
    n = int(n)
    if n < 1:
        raise ValueError("divide_out requires n >= 1")
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] arr = np.ascontiguousarray(primes, dtype=np.uint64)
    cdef uint64_t[::1] pv = arr
    cdef Py_ssize_t m = pv.shape[0]
    cdef Py_ssize_t i = 0
    pairs = []
    cdef uint64_t q, r, nn
    cdef int e
    big = n  # arbitrary-precision residual

    # object-arithmetic phase while the residual does not fit in 63 bits
    while i < m and big.bit_length() > 63:
        q = pv[i]
        if big % q == 0:
            e = 0
            while big % q == 0:
                big //= q
                e += 1
            pairs.append((int(q), e))
        i += 1
    if big == 1:
        return pairs, 1, True
    if i >= m:
        return pairs, big, False

    # native phase
    nn = <uint64_t>big
    while i < m:
        q = pv[i]
        if sqrt_cut and (q >= 4294967296ULL or q * q > nn):
            return pairs, int(nn), True
        if nn % q == 0:
            e = 0
            while nn % q == 0:
                nn //= q
                e += 1
            pairs.append((int(q), e))
            if nn == 1:
                return pairs, 1, True
        i += 1
    return pairs, int(nn), nn == 1
