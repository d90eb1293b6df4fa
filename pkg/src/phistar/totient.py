"""Unitary-totient arithmetic and the structural toolkit around phi*(N) | N.

phi*(N) multiplies (p**e - 1) over the prime powers exactly dividing N, and
h(N) = N / phi*(N).  Everything here is exact: h values are `fractions
.Fraction`, never floats, because the downstream case analysis leans on
strict inequalities that floats would smear.

The load-bearing facts, each carried by an operation below:

* if q**g exactly divides N then every prime power dividing q**g - 1 must
  divide N, and iterating through squarefree parts keeps forcing more
  divisors (``arrow_closure``);
* the 2-exponent of N caps the joint 2-adic demand of its odd primes
  (``two_adic_capacity_ok``);
* a solution with r odd prime factors is at most 2**2**(r+1) - 2**2**r
  (``cooper_bound``), and each odd prime power divides the tail of that
  bound (``max_prime_power_bound``);
* for a partial product M the next prime p must have p - 1 dividing
  M / gcd(M, phi*(M)) (``next_prime_candidates``).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .arith import (DomainError, EffortBudget, DEFAULT_EFFORT, Factorization,
                    factorize, is_prime, primes_below)


def phi_star(n: Factorization) -> int:
    """Product of (p**e - 1) over unitary prime-power divisors; phi*(1)=1."""
    out = 1
    for p, e in n.pairs:
        out *= p ** e - 1
    return out


def h_ratio(n: Factorization) -> Fraction:
    """h(n) = n / phi*(n), exactly reduced."""
    return Fraction(n.value(), phi_star(n))


def unitary_ratio_product(prime_powers: Iterable[int]) -> Fraction:
    """Product of Q/(Q-1) over the given prime powers, exactly.

    This is h of the corresponding squarefull number when the entries are
    pairwise coprime prime powers; it is also how displayed inequality
    corpora are evaluated without trusting any factoring step.
    """
    out = Fraction(1)
    for q in prime_powers:
        out *= Fraction(q, q - 1)
    return out


def is_unitary_divisor(d: int, n: int) -> bool:
    """True iff d | n and gcd(d, n // d) == 1."""
    if d < 1 or n < 1:
        raise DomainError("unitary divisibility needs positive integers")
    if n % d:
        return False
    return math.gcd(d, n // d) == 1


# --------------------------------------------------------------------------
# solutions
# --------------------------------------------------------------------------

KNOWN_LIST = "known-list"
SEARCH_DISCOVERED = "search"
USER_SUPPLIED = "user"


@dataclass(frozen=True)
class SolutionRecord:
    """A certified N with phi*(N) | N."""

    n: Factorization
    h: int
    source: str = USER_SUPPLIED

    def value(self) -> int:
        return self.n.value()


def is_solution(n: Factorization, source: str = USER_SUPPLIED) -> Optional[SolutionRecord]:
    """Record with integral h when phi*(n) | n, else None."""
    value = n.value()
    ps = phi_star(n)
    if value % ps:
        return None
    return SolutionRecord(n=n, h=value // ps, source=source)


_KNOWN_PAIRS = (
    (),                                                      # 1
    ((2, 1),),                                               # 2
    ((2, 1), (3, 1)),                                        # 6
    ((2, 2), (3, 1)),                                        # 12
    ((2, 3), (3, 1), (7, 1)),                                # 168
    ((2, 4), (3, 1), (5, 1)),                                # 240
    ((2, 5), (3, 1), (5, 1), (31, 1)),                       # 14880
    ((2, 8), (3, 1), (5, 1), (17, 1)),                       # 65280
    ((2, 11), (3, 1), (5, 1), (11, 2), (23, 1), (89, 1)),    # 2^11*3*5*11^2*23*89
    ((2, 16), (3, 1), (5, 1), (17, 1), (257, 1)),            # 2^16*3*5*17*257
    ((2, 17), (3, 1), (5, 1), (17, 1), (257, 1), (131071, 1)),
    ((2, 32), (3, 1), (5, 1), (17, 1), (257, 1), (65537, 1)),
)

_known_cache: list[SolutionRecord] = []
_known_lock = threading.Lock()


def known_solutions() -> list[SolutionRecord]:
    """The twelve known solutions, re-verified on first use.

    The embedded constants are never trusted: each is pushed back through
    ``is_solution`` and a failure raises instead of returning stale data.
    """
    with _known_lock:
        if not _known_cache:
            for pairs in _KNOWN_PAIRS:
                f = Factorization(pairs)
                f.validate()
                rec = is_solution(f, source=KNOWN_LIST)
                if rec is None:
                    raise AssertionError(f"embedded solution {f} failed verification")
                _known_cache.append(rec)
        return list(_known_cache)


# --------------------------------------------------------------------------
# forced-divisor closure (the arrow relation)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimePower:
    p: int
    e: int

    def __post_init__(self):
        if self.e < 1 or not is_prime(self.p):
            raise DomainError(f"not a prime power: {self.p}^{self.e}")

    def value(self) -> int:
        return self.p ** self.e


def forced_divisor_ledger(seed: PrimePower, depth: int = 8,
                          effort: EffortBudget = DEFAULT_EFFORT) -> dict[int, int]:
    """Multiplicity ledger of divisors forced by ``seed`` unitarily dividing N.

    Level 0 charges the full factorization of seed.value() - 1; every later
    level charges p - 1 for each newly forced prime p.  The charges multiply
    across distinct primes, so ledger[p] is a proven lower bound for the
    exponent of p in any N with the seed as unitary factor and phi*(N) | N.
    Exploration order cannot change the result: each prime is expanded once
    and the ledger only accumulates.
    """
    ledger: dict[int, int] = {}
    frontier: list[int] = []
    seen = {seed.p}

    def charge(m: int) -> None:
        for q, v in factorize(m, effort).pairs:
            ledger[q] = ledger.get(q, 0) + v
            if q not in seen:
                seen.add(q)
                frontier.append(q)

    charge(seed.value() - 1)
    for _ in range(max(depth - 1, 0)):
        if not frontier:
            break
        batch, frontier = sorted(frontier), []
        for q in batch:
            if q != 2:
                charge(q - 1)
    return ledger


def arrow_closure(seed: PrimePower, depth: int = 8,
                  effort: EffortBudget = DEFAULT_EFFORT) -> set[PrimePower]:
    """All prime powers forced to divide any N with seed as unitary factor."""
    ledger = forced_divisor_ledger(seed, depth, effort)
    return {PrimePower(p, e) for p, e in ledger.items()}


# --------------------------------------------------------------------------
# capacity and bound lemmas
# --------------------------------------------------------------------------

def _v2(n: int) -> int:
    return (n & -n).bit_length() - 1


def two_adic_capacity_ok(n: Factorization, h_target_two_exponent: int = 0) -> bool:
    """Check f + sum of v2(p-1) over odd primes of n <= v2(n).

    ``f`` is the 2-exponent of the targeted h value.  Any N violating this
    cannot satisfy h(N) * phi*(N) = N; in particular a nonempty odd N never
    divides by its unitary totient.
    """
    if h_target_two_exponent < 0:
        raise DomainError("h 2-exponent must be nonnegative")
    e = n.exponent(2)
    demand = h_target_two_exponent
    for p, _ in n.pairs:
        if p != 2:
            demand += _v2(p - 1)
    return demand <= e


def cooper_bound(r_odd_primes: int) -> int:
    """Largest possible solution with r odd prime factors: 2^2^(r+1)-2^2^r."""
    if r_odd_primes < 0:
        raise DomainError("r must be nonnegative")
    return (1 << (1 << (r_odd_primes + 1))) - (1 << (1 << r_odd_primes))


def max_prime_power_bound(r_odd_primes: int) -> int:
    """Upper bound 2^2^(r-1) for each odd unitary prime power of a solution."""
    if r_odd_primes < 1:
        raise DomainError("r must be positive")
    return 1 << (1 << (r_odd_primes - 1))


# --------------------------------------------------------------------------
# next-prime candidate generation
# --------------------------------------------------------------------------

def next_prime_candidates(m_k: Factorization, h_target,
                          r_total: int) -> list[int]:
    """Primes eligible as the next (larger) prime factor after the partial m_k.

    A candidate p must exceed every prime of m_k, have p - 1 dividing
    m_k / gcd(m_k, phi*(m_k)), and satisfy
    (p/(p-1)) ** (r_total - k) >= h_target / h(m_k) with k the number of odd
    primes already present.  Exact rational comparisons throughout.
    """
    value = m_k.value()
    quotient = value // math.gcd(value, phi_star(m_k))
    k = sum(1 for p, _ in m_k.pairs if p != 2)
    exponent = r_total - k
    if exponent < 0:
        raise DomainError("r_total smaller than the number of odd primes present")
    p_max = max((p for p, _ in m_k.pairs), default=1)
    ratio_needed = Fraction(h_target) / h_ratio(m_k)

    out = []
    for d in factorize(quotient).divisors():
        p = d + 1
        if p <= p_max or not is_prime(p):
            continue
        if Fraction(p, p - 1) ** exponent >= ratio_needed:
            out.append(p)
    return sorted(out)


# --------------------------------------------------------------------------
# primorial probe
# --------------------------------------------------------------------------

def primorial_probe(r: int) -> tuple[Fraction, bool]:
    """h and divisibility verdict for the product of the first r primes.

    Squarefree reading: exponents all 1, starting from 2.  (The broader
    family with arbitrary exponents is reachable through the search's
    ``consecutive_primes_only`` restriction instead.)
    """
    if r < 1:
        raise DomainError("r must be positive")
    bound = 64
    while True:
        primes = primes_below(bound)
        if len(primes) >= r:
            break
        bound *= 2
    pairs = tuple((int(p), 1) for p in primes[:r])
    f = Factorization(pairs)
    h = h_ratio(f)
    return h, h.denominator == 1
