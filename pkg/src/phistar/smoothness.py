"""Smoothness certificates for a**k - 1 via cyclotomic factors.

P(a**k - 1) < B exactly when every cyclotomic value Phi_d(a), d | k, is
B-smooth.  A prime q dividing Phi_d(a) is either congruent to 1 mod d or is
the largest prime factor of d (the intrinsic prime), so trial division by
that restricted set is complete below the bound: whatever survives has no
prime factor under B.  Primes are divided out to full multiplicity, which
keeps every verdict unconditional; Wieferich-type square factors only enter
the analytic pre-filter that truncates the exponent range.

The pre-filter generalizes the bound-10**8 argument to any B: if
P(2**k - 1) < B then

    3**(phi(k)/2)  <=  Phi_k(2)  <=  W * P(k) * prod(q : q < B, q = 1 mod k)

with W the product of the base-2 Wieferich primes below B (1093 and 3511;
no other exists below 10**8, and searches have pushed that frontier past
10**15).  Counting candidates ik+1 < B bounds the product by B**((B-2)/k),
which makes the surviving k range finite.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .arith import (DomainError, Factorization, cyclotomic_value, divisors,
                    euler_phi, is_prime, primes_below, small_factorization)
from .kernels import divide_out

LN3 = math.log(3)
_WIEFERICH_BASE2 = (1093, 3511)
# float-safety slack, in nats, on the reject side of every log comparison
_MARGIN = 8.0

_SCAN_LIMIT = 510510  # 2*3*5*7*11*13*17; phi >= 92160 beyond, killing eq51


@dataclass(frozen=True)
class SmoothnessVerdict:
    """Outcome of certifying P(base**exponent - 1) < bound."""

    base: int
    exponent: int
    bound: int
    smooth: bool
    factors_found: Factorization
    residual: int

    def __post_init__(self):
        value = self.base ** self.exponent - 1
        if self.factors_found.value() * self.residual != max(value, 1):
            raise AssertionError("verdict does not multiply back")


# --------------------------------------------------------------------------
# per-divisor cyclotomic verdicts
# --------------------------------------------------------------------------

_verdict_lock = threading.Lock()
_verdict_cache: dict[tuple[int, int, int], tuple[tuple, int]] = {}
_trial_cache: dict[tuple[int, int], np.ndarray] = {}


def _trial_primes(d: int, bound: int) -> np.ndarray:
    """Primes < bound that can divide Phi_d(a): q = 1 (mod d) plus P(d)."""
    key = (d, bound)
    with _verdict_lock:
        got = _trial_cache.get(key)
    if got is not None:
        return got
    primes = primes_below(bound)
    if d > 1:
        primes = primes[primes % np.uint64(d) == 1]
        intrinsic = small_factorization(d).largest_prime()
        if intrinsic < bound:
            primes = np.concatenate(
                [np.array([intrinsic], dtype=np.uint64), primes])
            primes.sort()
    with _verdict_lock:
        _trial_cache[key] = primes
    return primes


def cyclotomic_factor_split(a: int, d: int, bound: int) -> tuple[Factorization, int]:
    """(sub-bound part, residual) of Phi_d(a); residual 1 means smooth.

    Every prime extracted from the primitive part is checked to be 1 mod d.
    Results are memoized per (a, d, bound).
    """
    key = (a, d, bound)
    with _verdict_lock:
        hit = _verdict_cache.get(key)
    if hit is not None:
        return Factorization(hit[0]), hit[1]

    value = cyclotomic_value(d, a)
    if value <= 1:
        result = (Factorization(), 1) if value == 1 else (Factorization(), value)
        pairs, residual = result
    else:
        trial = _trial_primes(d, bound)
        raw, residual, certified = divide_out(value, trial, sqrt_cut=True)
        if residual > 1 and certified and residual < bound:
            raw = raw + [(residual, 1)]
            residual = 1
        intrinsic = small_factorization(d).largest_prime() if d > 1 else None
        for q, _ in raw:
            if d > 1 and q != intrinsic and q % d != 1:
                raise AssertionError(
                    f"prime {q} from Phi_{d}({a}) breaks the 1 mod {d} congruence")
        pairs = Factorization.from_pairs(raw)
    with _verdict_lock:
        _verdict_cache[key] = (pairs.pairs, residual)
    return pairs, residual


def is_shifted_smooth(a: int, k: int, bound: int) -> SmoothnessVerdict:
    """Certify whether P(a**k - 1) < bound, with the full sub-bound part.

    Pure trial division over the congruence-restricted prime sets; exact for
    repeated factors, no Wieferich assumption involved.
    """
    if a < 2:
        raise DomainError("base must be >= 2")
    if k < 1:
        raise DomainError("exponent must be positive")
    if bound < 2:
        raise DomainError("bound must be >= 2")
    factors = Factorization()
    residual = 1
    for d in divisors(k):
        part, res = cyclotomic_factor_split(a, d, bound)
        factors = factors * part
        residual *= res
    return SmoothnessVerdict(base=a, exponent=k, bound=bound,
                             smooth=residual == 1, factors_found=factors,
                             residual=residual)


# --------------------------------------------------------------------------
# analytic exponent cutoff
# --------------------------------------------------------------------------

_phi_cache: dict[str, np.ndarray] = {}
_phi_lock = threading.Lock()


def _phi_table(limit: int) -> np.ndarray:
    """Euler phi for 0..limit-1; one growing table is kept cached."""
    with _phi_lock:
        tab = _phi_cache.get("phi")
        if tab is None or len(tab) < limit:
            size = max(limit, 1 << 14)
            tab = np.arange(size, dtype=np.int64)
            for p in primes_below(size).tolist():
                tab[p::p] -= tab[p::p] // p
            _phi_cache["phi"] = tab
        return tab[:limit]


def _value_log_floor(base: int) -> float:
    """ln Phi_k(base) >= phi(k) * this, for every k >= 3.

    Conjugate root pairs give (base - zeta)(base - conj zeta) >= 3 for any
    base >= 2, and |base - zeta| >= base - 1 always.
    """
    return max(LN3 / 2.0, math.log(base - 1) if base > 2 else 0.0)


@dataclass(frozen=True)
class ExponentCutoff:
    """Finite pre-filter for exponents k with P(base**k - 1) < bound."""

    bound: int
    base: int
    k_max: int
    wieferich_primes: tuple[int, ...]
    _passing: np.ndarray = field(repr=False, compare=False)

    def passes(self, k: int) -> bool:
        """False only when k is analytically impossible (never a false reject)."""
        if k < 1:
            raise DomainError("exponent must be positive")
        if k < len(self._passing):
            return bool(self._passing[k])
        # beyond the scan, phi(k) >= sqrt(k/2) outgrows the candidate side
        return False


def _scan_limit(bound: int, ln_floor: float) -> int:
    """Smallest scanned range outside which every exponent provably fails."""
    ln_b = math.log(bound)
    ln_w = sum(math.log(p) for p in _WIEFERICH_BASE2)
    limit = 1 << 10
    while limit < _SCAN_LIMIT:
        # phi(k) >= sqrt(k/2) for every k >= 1
        k = float(limit)
        if math.sqrt(k / 2.0) * ln_floor > (bound / k) * ln_b + ln_w \
                + math.log(k) + 2 * _MARGIN:
            return limit
        limit *= 2
    # base 2 at huge bounds: phi >= 92160 from 510510 on, growing ~linearly
    return _SCAN_LIMIT


def exponent_cutoff(bound: int, base: int = 2) -> ExponentCutoff:
    """Pre-filter every k with P(base**k - 1) < bound must pass.

    Rejects k when the root-pair lower bound on Phi_k(base) outweighs the
    product of all progression candidates ik+1 < bound times the Wieferich
    and intrinsic allowances.  The square-factor allowance is the base-2
    Wieferich pair; for other bases it acts as a generous margin rather
    than a census, and only this pre-filter relies on it.
    """
    if bound < 100:
        raise DomainError("cutoff needs bound >= 100")
    wief = tuple(p for p in _WIEFERICH_BASE2 if p < bound)
    ln_w = sum(math.log(p) for p in wief)
    ln_floor = _value_log_floor(base)
    limit = _scan_limit(bound, ln_floor) + 1
    phi = _phi_table(limit).astype(np.float64)
    k = np.arange(limit, dtype=np.float64)
    k[0] = 1.0
    candidates = np.maximum(bound - 2, 0) // np.arange(limit).clip(min=1)
    lhs = phi * ln_floor
    rhs = candidates * math.log(bound) + ln_w + np.log(np.maximum(k, 2.0)) + _MARGIN
    passing = lhs <= rhs
    passing[0] = False
    passing[1] = passing[2] = True
    k_max = int(np.nonzero(passing)[0].max())
    return ExponentCutoff(bound=bound, base=base, k_max=k_max,
                          wieferich_primes=wief, _passing=passing)


# --------------------------------------------------------------------------
# progression log-mass tables (shared by lists, tables, and supports)
# --------------------------------------------------------------------------

_logsum_lock = threading.Lock()
_logsum_cache: dict[tuple[int, int], float] = {}


def _progression_logsum(d: int, bound: int) -> float:
    """Sum of ln q over primes q < bound with q = 1 (mod d), plus ln P(d)."""
    key = (d, bound)
    with _logsum_lock:
        got = _logsum_cache.get(key)
    if got is None:
        primes = primes_below(bound)
        mask = primes % np.uint64(d) == 1
        got = float(np.log(primes[mask].astype(np.float64)).sum())
        intrinsic = small_factorization(d).largest_prime()
        if intrinsic < bound:
            got += math.log(intrinsic)
        with _logsum_lock:
            _logsum_cache[key] = got
    return got


def _reject_by_log_mass(a: int, d: int, bound: int, ln_w: float) -> bool:
    """Certified non-smoothness of Phi_d(a) without touching its value.

    If Phi_d(a) were bound-smooth its logarithm could not exceed the total
    progression log mass plus the square allowance; the value itself is at
    least (a-1)**phi(d) and 3**(phi(d)/2).  A wide slack absorbs both float
    error and square factors beyond the listed Wieferich pair.
    """
    if d <= 2:
        return False
    slack = _MARGIN if a == 2 else 8 * _MARGIN
    need = euler_phi(d) * _value_log_floor(a) - ln_w - slack
    if need <= 0:
        return False
    return _progression_logsum(d, bound) < need


class _SmoothStatus:
    """Per-divisor smoothness of Phi_d(a), lazily: reject cheaply or split."""

    def __init__(self, a: int, bound: int, ln_w: float):
        self.a = a
        self.bound = bound
        self.ln_w = ln_w
        self._status: dict[int, bool] = {}

    def smooth(self, d: int) -> bool:
        got = self._status.get(d)
        if got is None:
            if _reject_by_log_mass(self.a, d, self.bound, self.ln_w):
                got = False
            else:
                _, residual = cyclotomic_factor_split(self.a, d, self.bound)
                got = residual == 1
            self._status[d] = got
        return got


def smooth_exponents_base2(bound: int) -> list[int]:
    """All k with P(2**k - 1) < bound, ascending (k=1 counts: 2**1-1 = 1).

    Staged: analytic cutoff, then a per-exponent progression log-mass
    rejection, then unconditional trial-division verdicts for survivors.
    Per-divisor results are shared across exponents.
    """
    if bound < 2:
        raise DomainError("bound must be >= 2")
    cut = exponent_cutoff(max(bound, 100))
    ln_w = sum(math.log(p) for p in cut.wieferich_primes if p < bound)
    status = _SmoothStatus(2, bound, ln_w)
    out = []
    for k in range(1, cut.k_max + 1):
        if not cut.passes(k):
            continue
        if all(status.smooth(d) for d in divisors(k)):
            out.append(k)
    return out


_TWO_BY_TABLE_CONVENTION = "table"


def smooth_prime_powers(p_bound: int, bound: int, k: int,
                        include_two: str | bool = _TWO_BY_TABLE_CONVENTION) -> list[int]:
    """Primes p < p_bound with P(p**k - 1) < bound, ascending.

    ``include_two`` mirrors the published table rows by default: the base 2
    is listed only for odd k.  Pass True/False to force either behaviour.
    """
    if k < 2:
        raise DomainError("table exponent must be >= 2")
    out = []
    if include_two == _TWO_BY_TABLE_CONVENTION:
        want_two = k % 2 == 1
    else:
        want_two = bool(include_two)
    if want_two and 2 < p_bound and is_shifted_smooth(2, k, bound).smooth:
        out.append(2)
    divs = [d for d in divisors(k) if d > 1]
    # most restrictive progression first: fewest candidate primes, fails fast
    divs.sort(key=euler_phi, reverse=True)
    trial_sets = {d: _trial_primes(d, bound) for d in divs}
    for p in primes_below(p_bound)[1:].tolist():
        if _prime_power_smooth(p, k, bound, divs, trial_sets):
            out.append(p)
    return out


def _prime_power_smooth(p: int, k: int, bound: int, divs: list[int],
                        trial_sets: dict[int, np.ndarray]) -> bool:
    # p - 1 (d=1) is automatically bound-smooth whenever p <= bound
    if p - 1 >= bound:
        _, residual = cyclotomic_factor_split(p, 1, bound)
        if residual != 1:
            return False
    for d in divs:
        value = cyclotomic_value(d, p)
        if value < bound:
            continue
        _, residual, certified = divide_out(value, trial_sets[d], sqrt_cut=True)
        if residual > 1 and not (certified and residual < bound):
            return False
    return True


def odd_exponent_support(p: int, bound: int, power_cap: Optional[int] = None) -> list[int]:
    """Admissible exponents k: p**k <= power_cap and P(p**k - 1) < bound.

    Without a cap the range comes from the analytic cutoff for base p;
    membership itself always rests on unconditional trial division.
    """
    if not is_prime(p) or p == 2:
        raise DomainError("odd prime required")
    if p >= bound:
        return []
    cut = None
    if power_cap is not None:
        k_top = 0
        v = p
        while v <= power_cap:
            k_top += 1
            v *= p
    else:
        cut = exponent_cutoff(max(bound, 100), base=p)
        k_top = cut.k_max
    ln_w = sum(math.log(q) for q in _WIEFERICH_BASE2 if q < bound)
    status = _SmoothStatus(p, bound, ln_w)
    out = []
    for k in range(1, k_top + 1):
        if cut is not None and not cut.passes(k):
            continue
        if all(status.smooth(d) for d in divisors(k)):
            out.append(k)
    return out
