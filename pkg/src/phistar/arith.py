"""Exact integer arithmetic: primality, factorization, cyclotomic values.

Everything downstream (totient identities, smoothness certificates, the
search) runs on plain Python integers and the :class:`Factorization` type
defined here.  Primality is deterministic below 2**64 and a fixed strong
probable-prime battery plus a strong Lucas test above (see ``is_prime``).
Factoring is trial division backed by the compiled kernel, then Brent's
cycle variant of Pollard rho and a p-1 stage, all with fixed seeds so that
every run is reproducible.  A budget overrun raises :class:`EffortExceeded`
carrying the unfactored cofactor instead of looping forever.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Iterable, Iterator, Optional

import numpy as np

from .kernels import divide_out, sieve


class DomainError(ValueError):
    """Argument outside an operation's domain (e.g. largest prime of 1)."""


class EffortExceeded(ArithmeticError):
    """A composite cofactor resisted the factoring budget.

    Attributes: ``cofactor`` (the unfactored composite) and ``partial``
    (the pairs extracted before giving up).
    """

    def __init__(self, cofactor: int, partial=()):
        self.cofactor = cofactor
        self.partial = tuple(partial)
        super().__init__(f"factoring budget exhausted; composite cofactor {cofactor}")


# --------------------------------------------------------------------------
# factorizations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Factorization:
    """Sorted tuple of (prime, exponent) pairs; the empty tuple is 1."""

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        last = 1
        for p, e in self.pairs:
            if p <= last:
                raise ValueError(f"primes must be strictly increasing: {self.pairs}")
            if e < 1:
                raise ValueError(f"exponents must be positive: {self.pairs}")
            last = p

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[int, int]]) -> "Factorization":
        """Build from unsorted pairs, merging duplicate primes."""
        acc: dict[int, int] = {}
        for p, e in pairs:
            acc[p] = acc.get(p, 0) + e
        return Factorization(tuple(sorted((p, e) for p, e in acc.items() if e)))

    def value(self) -> int:
        n = 1
        for p, e in self.pairs:
            n *= p ** e
        return n

    @property
    def omega(self) -> int:
        return len(self.pairs)

    def exponent(self, p: int) -> int:
        for q, e in self.pairs:
            if q == p:
                return e
        return 0

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    def largest_prime(self) -> int:
        if not self.pairs:
            raise DomainError("1 has no prime factors")
        return self.pairs[-1][0]

    def __mul__(self, other: "Factorization") -> "Factorization":
        return Factorization.from_pairs(self.pairs + other.pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.pairs)

    def __str__(self) -> str:
        return format_factored(self)

    def validate(self) -> None:
        """Check the full type invariant, including primality of every base."""
        for p, e in self.pairs:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime in {self}")

    def divisors(self) -> list[int]:
        """All divisors, ascending."""
        divs = [1]
        for p, e in self.pairs:
            divs = [d * p ** k for d in divs for k in range(e + 1)]
        return sorted(divs)


def format_factored(f: Factorization) -> str:
    """Render as ``2^32*3*5`` (exponent 1 omitted); 1 for the empty product."""
    if not f.pairs:
        return "1"
    return "*".join(f"{p}^{e}" if e > 1 else f"{p}" for p, e in f.pairs)


def parse_factored(text: str) -> Factorization:
    """Parse ``2^32*3*5*17`` style notation; bases must be prime."""
    text = text.strip()
    if text in ("", "1"):
        return Factorization()
    pairs = []
    for part in text.split("*"):
        part = part.strip()
        if "^" in part:
            base, _, exp = part.partition("^")
            p, e = int(base), int(exp)
        else:
            p, e = int(part), 1
        if e < 1:
            raise ValueError(f"bad exponent in {part!r}")
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        pairs.append((p, e))
    return Factorization.from_pairs(pairs)


# --------------------------------------------------------------------------
# primality
# --------------------------------------------------------------------------

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                 59, 61, 67, 71, 73, 79, 83, 89, 97)

# These seven witnesses decide primality for every n < 2^64 (Sinclair's set).
_MR_WITNESSES_64 = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)

# Above 2^64: strong probable-prime tests to the first twelve prime bases
# plus a strong Lucas test with Selfridge parameters.  This is a superset of
# the Baillie-PSW test, which has no known counterexample; all
# correctness-critical primes in this artifact are far below 2^64 anyway and
# are decided deterministically.
_MR_BASES_LARGE = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _mr_composite(n: int, a: int, d: int, s: int) -> bool:
    """True if a witnesses compositeness of n (n odd, n-1 = d*2^s)."""
    a %= n
    if a == 0:
        return False
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def _jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n > 0."""
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas_pp(n: int) -> bool:
    """Strong Lucas probable-prime test, Selfridge method A parameters."""
    # D = 5, -7, 9, -11, ... first with (D/n) = -1
    d = 5
    while True:
        j = _jacobi(d % n, n)
        if j == -1:
            break
        if j == 0 and abs(d) != n:
            return False
        d = -(d + 2) if d > 0 else -(d - 2)
    p, q = 1, (1 - d) // 4

    m = n + 1
    s = (m & -m).bit_length() - 1
    t = m >> s

    # compute U_t, V_t (mod n) by a binary double-and-add chain
    u, v, qk = 1, p, q % n
    for bit in bin(t)[3:]:
        u = u * v % n
        v = (v * v - 2 * qk) % n
        qk = qk * qk % n
        if bit == "1":
            u, v = (p * u + v) % n, (d * u + p * v) % n
            if u & 1:
                u += n
            if v & 1:
                v += n
            u, v = (u >> 1) % n, (v >> 1) % n
            qk = qk * q % n
    if u == 0 or v == 0:
        return True
    for _ in range(s - 1):
        v = (v * v - 2 * qk) % n
        if v == 0:
            return True
        qk = qk * qk % n
    return False


def is_prime(n: int) -> bool:
    """Exact below 2**64; strong-probable-prime battery + Lucas above."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    if n < 1 << 64:
        return not any(_mr_composite(n, a, d, s) for a in _MR_WITNESSES_64)
    if any(_mr_composite(n, a, d, s) for a in _MR_BASES_LARGE):
        return False
    if math.isqrt(n) ** 2 == n:
        return False
    return _strong_lucas_pp(n)


# --------------------------------------------------------------------------
# prime sieve access (cached)
# --------------------------------------------------------------------------

_sieve_lock = threading.Lock()
_sieve_cache: dict[str, np.ndarray] = {}


def primes_below(limit: int) -> np.ndarray:
    """Primes < limit as a uint64 array; the largest sieve is kept cached."""
    limit = int(limit)
    with _sieve_lock:
        arr = _sieve_cache.get("primes")
        if arr is None or _sieve_cache["limit"] < limit:
            arr = sieve(limit)
            _sieve_cache["primes"] = arr
            _sieve_cache["limit"] = limit
            return arr
        if _sieve_cache["limit"] == limit:
            return arr
        hi = int(np.searchsorted(arr, limit, side="left"))
        return arr[:hi]


# --------------------------------------------------------------------------
# factoring
# --------------------------------------------------------------------------

_default_cache = None
_default_cache_lock = threading.Lock()


def default_cache():
    """Process-wide factor cache (in-memory unless reconfigured)."""
    global _default_cache
    with _default_cache_lock:
        if _default_cache is None:
            from .cache import FactorCache
            _default_cache = FactorCache()
        return _default_cache


def set_default_cache(cache) -> None:
    global _default_cache
    with _default_cache_lock:
        _default_cache = cache


@dataclass(frozen=True)
class EffortBudget:
    """Deterministic resource bounds for ``factorize``."""

    trial_bound: int = 1 << 16          # trial-divide by all primes below this
    rho_rounds: int = 24                # number of (constant, start) seeds tried
    rho_iterations: int = 1 << 18       # Brent iterations per seed
    pm1_bound: int = 20_000             # p-1 stage-1 smoothness bound


DEFAULT_EFFORT = EffortBudget()


def _brent_rho(n: int, c: int, x0: int, max_iters: int) -> int:
    """Brent's cycle-finding rho; returns a nontrivial factor or 1."""
    y, r, q = x0, 1, 1
    g, xs, x = 1, 0, 0
    iters = 0
    m = 128
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            xs = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
            iters += m
            if iters > max_iters:
                return 1
        r *= 2
    if g == n:
        # backtrack one step at a time
        g = 1
        y = xs
        while g == 1:
            y = (y * y + c) % n
            g = math.gcd(abs(x - y), n)
    return g if g != n else 1


def _pollard_pm1(n: int, bound: int, base: int = 2) -> int:
    """Pollard p-1, stage 1 only; returns a nontrivial factor or 1."""
    a = base
    for p in primes_below(bound).tolist():
        pe = p
        while pe * p <= bound:
            pe *= p
        a = pow(a, pe, n)
        if a == 1:
            return 1
    g = math.gcd(a - 1, n)
    return g if g != n else 1


# fixed (c, x0) seeds: reproducible runs, no RNG
_RHO_SEEDS = tuple((c, x0) for c in (1, 3, 5, 7, 11, 15, 21, 33, 45, 67, 85,
                                     101, 127, 151, 179, 201, 255, 301, 341,
                                     401, 467, 501, 577, 601)
                   for x0 in (2,))


def _split_composite(n: int, effort: EffortBudget) -> int:
    """Find one nontrivial factor of the odd composite n, or raise."""
    if math.isqrt(n) ** 2 == n:
        return math.isqrt(n)
    g = _pollard_pm1(n, effort.pm1_bound)
    if 1 < g < n:
        return g
    for c, x0 in _RHO_SEEDS[:effort.rho_rounds]:
        g = _brent_rho(n, c, x0, effort.rho_iterations)
        if 1 < g < n:
            return g
    raise EffortExceeded(n)


def factorize(n: int, effort: EffortBudget = DEFAULT_EFFORT,
              cache: Optional["FactorCache"] = None) -> Factorization:
    """Complete factorization of n >= 1, or :class:`EffortExceeded`.

    Consults and updates the factor cache (the module default when none is
    passed).  Deterministic: same input, same budget, same answer.
    """
    if n < 1:
        raise DomainError("factorize requires n >= 1")
    if n == 1:
        return Factorization()
    if cache is None:
        cache = default_cache()
    hit = cache.get(n)
    if hit is not None:
        return hit

    pairs, residual, certified = divide_out(
        n, primes_below(effort.trial_bound), sqrt_cut=True)
    found = dict(pairs)
    stack = []
    if residual > 1:
        if certified or is_prime(residual):
            found[residual] = found.get(residual, 0) + 1
        else:
            stack.append(residual)
    while stack:
        m = stack.pop()
        if is_prime(m):
            found[m] = found.get(m, 0) + 1
            continue
        try:
            g = _split_composite(m, effort)
        except EffortExceeded:
            partial = Factorization.from_pairs(found.items())
            raise EffortExceeded(m, partial.pairs) from None
        stack.append(g)
        stack.append(m // g)

    result = Factorization.from_pairs(found.items())
    cache.put(n, result)
    return result


def largest_prime_factor(n: int, effort: EffortBudget = DEFAULT_EFFORT) -> int:
    """P(n): the largest prime dividing n (n >= 2)."""
    if n <= 1:
        raise DomainError("largest_prime_factor requires n >= 2")
    return factorize(n, effort).largest_prime()


# --------------------------------------------------------------------------
# divisor / Moebius helpers on small integers
# --------------------------------------------------------------------------

@lru_cache(maxsize=65536)
def small_factorization(k: int) -> Factorization:
    """Factorization of a small positive integer (cached, trial-only path)."""
    return factorize(k)


def divisors(k: int) -> list[int]:
    """All divisors of k >= 1, ascending."""
    return small_factorization(k).divisors()


def mobius(k: int) -> int:
    f = small_factorization(k)
    if any(e > 1 for _, e in f.pairs):
        return 0
    return -1 if f.omega % 2 else 1


def euler_phi(k: int) -> int:
    n = 1
    for p, e in small_factorization(k).pairs:
        n *= (p - 1) * p ** (e - 1)
    return n


# --------------------------------------------------------------------------
# cyclotomic values and orders
# --------------------------------------------------------------------------

@lru_cache(maxsize=8192)
def cyclotomic_value(k: int, a: int) -> int:
    """Phi_k(a), exactly, via the Moebius product over divisors of k."""
    if k < 1:
        raise DomainError("cyclotomic index must be positive")
    if k == 1:
        return a - 1
    num = den = 1
    for d in divisors(k):
        mu = mobius(k // d)
        if mu == 1:
            num *= a ** d - 1
        elif mu == -1:
            den *= a ** d - 1
    value, rem = divmod(num, den)
    if rem:
        raise AssertionError(f"cyclotomic division not exact for k={k}, a={a}")
    return value


def multiplicative_order(a: int, p: int) -> int:
    """Least d >= 1 with a^d = 1 (mod p), for prime p not dividing a."""
    if a % p == 0:
        raise DomainError(f"{p} divides {a}; order undefined")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    d = p - 1
    for q, _ in factorize(p - 1).pairs:
        while d % q == 0 and pow(a, d // q, p) == 1:
            d //= q
    return d


# --------------------------------------------------------------------------
# smooth-part extraction
# --------------------------------------------------------------------------

def smooth_part(n: int, bound: int, modulus: Optional[int] = None,
                extra_primes: Iterable[int] = ()) -> tuple[Factorization, int]:
    """Split n into (B-smooth part, cofactor) by trial division.

    With ``modulus`` m set, only primes = 1 (mod m) below the bound are
    tried, plus any ``extra_primes``; the cofactor is then only guaranteed
    free of primes in the tried set.  Primes are always divided out to full
    multiplicity.
    """
    if n < 1:
        raise DomainError("smooth_part requires n >= 1")
    if bound < 2:
        raise DomainError("smooth bound must be >= 2")
    primes = primes_below(bound)
    complete = modulus is None or modulus == 1
    if not complete:
        primes = primes[primes % np.uint64(modulus) == 1]
    extras = sorted({int(p) for p in extra_primes})
    if extras:
        primes = np.unique(np.concatenate(
            [primes, np.array(extras, dtype=np.uint64)]))
    pairs, residual, certified = divide_out(n, primes, sqrt_cut=complete and not extras)
    if residual > 1 and certified and residual < bound:
        # the sqrt cut proved the residual prime; it is below the bound
        pairs = pairs + [(residual, 1)]
        residual = 1
    return Factorization.from_pairs(pairs), residual
