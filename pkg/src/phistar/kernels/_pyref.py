"""Pure-Python/numpy reference kernels.

Semantics here define the contract; the Cython backend must match bit for
bit.  ``divide_out`` is the inner loop of every smoothness certificate, so
the fallback still vectorises the common case (residual fits in 64 bits)
with numpy.
"""

import math

import numpy as np

_CHUNK = 1 << 15


def sieve(limit):
    """All primes < limit as a uint64 array (odd-only Eratosthenes)."""
    if limit <= 2:
        return np.empty(0, dtype=np.uint64)
    half = limit // 2  # index i represents 2*i + 1
    comp = np.zeros(half, dtype=bool)
    comp[0] = True  # 1 is not prime
    for i in range(1, (math.isqrt(limit - 1) - 1) // 2 + 1):
        if not comp[i]:
            p = 2 * i + 1
            comp[(p * p) // 2::p] = True
    odds = 2 * np.nonzero(~comp)[0].astype(np.uint64) + 1
    return np.concatenate([np.array([2], dtype=np.uint64), odds])


def divide_out(n, primes, sqrt_cut=False):
    """Divide primes out of n to full multiplicity.

    Returns ``(pairs, residual, certified)`` with ``prod(p**e) * residual
    == n``.  ``primes`` must be ascending.  With ``sqrt_cut`` the scan stops
    once q*q > residual; that early exit is only sound when the prime list
    covers every possible divisor of n below the stopping point, and then
    ``certified`` means the residual is 1 or prime.
    """
    n = int(n)
    if n < 1:
        raise ValueError("divide_out requires n >= 1")
    pairs = []
    arr = np.asarray(primes, dtype=np.uint64)
    pos = 0
    m = len(arr)
    while pos < m and n > 1:
        chunk = arr[pos:pos + _CHUNK]
        pos += _CHUNK
        if n < (1 << 63):
            # residual fits well inside int64: vectorised scan of the chunk
            if sqrt_cut:
                isq = math.isqrt(n)
                if int(chunk[0]) > isq:
                    return pairs, n, True
                hi = int(np.searchsorted(chunk, isq, side="right"))
                view = chunk[:hi]
                trimmed = hi < len(chunk)
            else:
                view = chunk
                trimmed = False
            hits = view[n % view == 0]
            for q in hits.tolist():
                if n % q:
                    continue  # an earlier hit shrank n
                e = 0
                while n % q == 0:
                    n //= q
                    e += 1
                pairs.append((q, e))
                if sqrt_cut and q * q > n:
                    return pairs, n, True
            if n == 1:
                return pairs, 1, True
            if trimmed:
                return pairs, n, True
        else:
            for q in chunk.tolist():
                if n % q == 0:
                    e = 0
                    while n % q == 0:
                        n //= q
                        e += 1
                    pairs.append((q, e))
                    if n == 1:
                        return pairs, 1, True
                    if n < (1 << 63):
                        break  # reroute the rest through the fast path
            if n < (1 << 63):
                # recompute position: primes up to q were consumed
                done = int(np.searchsorted(arr, q, side="right"))
                pos = done
    return pairs, n, n == 1
