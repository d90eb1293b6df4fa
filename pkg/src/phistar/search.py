"""Backtracking enumeration of N with phi*(N) | N under explicit bounds.

One branch per admissible 2-exponent e.  Within a branch the odd primes of
N are chosen in increasing order; at each node

* every prime power dividing any assigned p**a - 1 is charged to a forced-
  multiplicity ledger, and each still-unassigned forced prime q also
  charges its q - 1 (valid for any future exponent);
* the ledger must fit: the 2-demand within e, each assigned prime within
  its exponent, each pending prime power within the cap;
* the next prime must come from the divisor condition
  (p - 1) | M / gcd(M, phi*(M)) and survive the exact-rational window
  (p/(p-1))**slots >= target / h(M) for the smallest feasible integer
  target;
* a node whose pending set is empty and whose ledger fits is a solution
  (phi*(N) | N holds identically), and extension continues past it.

Elimination is certified: a branch with no solutions carries either its
root contradiction or the exhaustion summary, and re-running the branch
reproduces the certificate bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .arith import (DEFAULT_EFFORT, EffortBudget, EffortExceeded,
                    Factorization, factorize, is_prime)
from .smoothness import odd_exponent_support, smooth_exponents_base2
from .totient import (SEARCH_DISCOVERED, SolutionRecord, h_ratio, is_solution,
                      known_solutions, phi_star)

# closed contradiction taxonomy
FORCED_POWER_EXCEEDS_CAP = "forced-power-exceeds-cap"
FORCED_EXCEEDS_UNITARY = "forced-exceeds-unitary"
NO_CANDIDATE_PRIME = "no-candidate-prime"
H_OUT_OF_RANGE = "h-out-of-range"
UNDECIDABLE = "undecidable"


@dataclass(frozen=True)
class SearchConfig:
    prime_bound: int = 10 ** 5
    odd_power_cap: int = 10 ** 8
    two_exponent_set: Optional[tuple[int, ...]] = None
    omega_cap: Optional[int] = None
    h_targets: Optional[tuple[int, ...]] = None
    effort: EffortBudget = DEFAULT_EFFORT
    parallel_width: int = 1
    consecutive_primes_only: bool = False

    def __post_init__(self):
        if self.prime_bound < 3:
            raise ValueError("prime_bound must be >= 3")
        if self.odd_power_cap < self.prime_bound:
            raise ValueError("odd_power_cap must be >= prime_bound")

    def exponents(self) -> tuple[int, ...]:
        if self.two_exponent_set is not None:
            return tuple(self.two_exponent_set)
        return tuple(smooth_exponents_base2(self.prime_bound))


@dataclass(frozen=True)
class SearchState:
    """Snapshot of a node: assignment, ledger, processed marks, trail."""

    assigned: tuple[tuple[int, int], ...]       # (prime, exponent>0), ascending
    required: tuple[int, ...]                   # forced primes, exponent open
    forced_multiplicity: tuple[tuple[int, int], ...]
    marks: tuple[int, ...]
    trail: tuple[tuple[int, int], ...]          # odd-prime decisions in order


@dataclass(frozen=True)
class Verdict:
    keep: bool
    kind: Optional[str] = None
    prime: Optional[int] = None
    needed_exponent: Optional[int] = None
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EliminationCertificate:
    two_exponent: int
    kind: str
    prime: Optional[int] = None
    needed_exponent: Optional[int] = None
    cofactor: Optional[int] = None
    detail: dict = field(default_factory=dict)


@dataclass
class BranchOutcome:
    two_exponent: int
    solutions: list[SolutionRecord]
    certificate: Optional[EliminationCertificate]
    nodes: int = 0

    @property
    def outcome(self) -> str:
        if self.certificate is not None and self.certificate.kind == UNDECIDABLE:
            return "undecidable"
        if self.solutions:
            return "solution"
        return "eliminated"


class _Branch:
    """Mutable context for one 2-exponent branch."""

    def __init__(self, e: int, config: SearchConfig):
        self.e = e
        self.config = config
        self.solutions: list[SolutionRecord] = []
        self.nodes = 0
        self.contradictions: dict[str, int] = {}
        self._power_vectors: dict[tuple[int, int], tuple[tuple[int, int], ...]] = {}
        self._supports: dict[int, list[int]] = {}

    # -- factor bookkeeping ------------------------------------------------

    def power_vector(self, p: int, a: int) -> tuple[tuple[int, int], ...]:
        """Factor vector of p**a - 1."""
        key = (p, a)
        got = self._power_vectors.get(key)
        if got is None:
            got = factorize(p ** a - 1, self.config.effort).pairs
            self._power_vectors[key] = got
        return got

    def support(self, p: int) -> list[int]:
        got = self._supports.get(p)
        if got is None:
            got = odd_exponent_support(p, self.config.prime_bound,
                                       self.config.odd_power_cap)
            self._supports[p] = got
        return got

    # -- node evaluation ----------------------------------------------------

    def close(self, assigned: tuple[tuple[int, int], ...]):
        """Forced closure of a node.

        Returns (state, verdict, ledger, assigned_ledger) where ledger maps
        each prime to its total forced multiplicity and assigned_ledger only
        charges the assigned powers (that is the factorization of phi*(M)).
        """
        assigned_map = dict(assigned)
        assigned_ledger: dict[int, int] = {}
        for p, a in assigned:
            for q, v in self.power_vector(p, a):
                assigned_ledger[q] = assigned_ledger.get(q, 0) + v

        # each forced prime is expanded exactly once and the ledger only
        # accumulates, so the fixpoint is independent of expansion order
        ledger = dict(assigned_ledger)
        pending = sorted(q for q in ledger if q not in assigned_map and q != 2)
        seen = set(pending)
        idx = 0
        while idx < len(pending):
            q = pending[idx]
            idx += 1
            for t, v in self.power_vector(q, 1):
                ledger[t] = ledger.get(t, 0) + v
                if t != 2 and t not in assigned_map and t not in seen:
                    seen.add(t)
                    pending.append(t)
        required = tuple(sorted(seen))

        state = SearchState(
            assigned=assigned,
            required=required,
            forced_multiplicity=tuple(sorted(ledger.items())),
            marks=tuple(sorted(pending)),
            trail=tuple(pair for pair in assigned if pair[0] != 2),
        )
        verdict = self._verdict(assigned_map, required, ledger)
        return state, verdict, ledger, assigned_ledger

    def _verdict(self, assigned_map, required, ledger) -> Verdict:
        cfg = self.config
        # 1. a pending prime power that cannot fit under the cap
        for q in required:
            need = max(ledger.get(q, 0), 1)
            if q ** need > cfg.odd_power_cap:
                return Verdict(False, FORCED_POWER_EXCEEDS_CAP, prime=q,
                               needed_exponent=ledger.get(q, 0))
        # 2. the 2-adic capacity
        if ledger.get(2, 0) > assigned_map[2]:
            return Verdict(False, FORCED_EXCEEDS_UNITARY, prime=2,
                           needed_exponent=ledger.get(2, 0))
        # 3. an assigned odd exponent overrun
        for p, a in sorted(assigned_map.items()):
            if p != 2 and ledger.get(p, 0) > a:
                return Verdict(False, FORCED_EXCEEDS_UNITARY, prime=p,
                               needed_exponent=ledger[p])
        # 4. forced primes outside the searchable range
        for q in required:
            if q >= cfg.prime_bound:
                return Verdict(False, NO_CANDIDATE_PRIME, prime=q,
                               detail={"reason": "forced-prime-out-of-bound"})
        # 5. a forced prime below the frontier can never be inserted
        p_max = max(assigned_map)
        for q in required:
            if q < p_max:
                return Verdict(False, NO_CANDIDATE_PRIME, prime=q,
                               detail={"reason": "forced-prime-below-frontier"})
        # 6. omega cap
        if cfg.omega_cap is not None:
            width = len(assigned_map) + len(required)
            if width > cfg.omega_cap:
                return Verdict(False, NO_CANDIDATE_PRIME,
                               detail={"reason": "omega-cap", "omega": width})
        # 7. consecutive-primes restriction
        if cfg.consecutive_primes_only and not self._consecutive(assigned_map):
            return Verdict(False, NO_CANDIDATE_PRIME,
                           detail={"reason": "not-consecutive"})
        return Verdict(True)

    @staticmethod
    def _consecutive(assigned_map) -> bool:
        from .arith import primes_below
        ps = sorted(assigned_map)
        first = primes_below(ps[-1] + 1).tolist()
        return ps == first

    # -- recursion -----------------------------------------------------------

    def explore(self, assigned: tuple[tuple[int, int], ...]):
        cfg = self.config
        self.nodes += 1
        state, verdict, ledger, assigned_ledger = self.close(assigned)
        if not verdict.keep:
            self.contradictions[verdict.kind] = \
                self.contradictions.get(verdict.kind, 0) + 1
            return verdict

        m = Factorization(assigned)
        h_m = h_ratio(m)
        if not state.required and h_m.denominator == 1:
            record = is_solution(m, source=SEARCH_DISCOVERED)
            if record is not None and (cfg.h_targets is None
                                       or record.h in cfg.h_targets):
                self.solutions.append(record)

        # extension window
        e = assigned[0][1]
        slots = len(state.required) + max(0, e - ledger.get(2, 0))
        if slots == 0:
            return verdict
        t_min = math.floor(h_m) + 1
        candidates = self._candidates(m, assigned_ledger, h_m, t_min, slots,
                                      state.required)
        if not candidates:
            return verdict

        for p in candidates:
            floor_exp = max(ledger.get(p, 0), 1)
            for a in self.support(p):
                if a < floor_exp:
                    continue
                self.explore(assigned + ((p, a),))
        return verdict

    def _candidates(self, m: Factorization, assigned_ledger, h_m: Fraction,
                    t_min: int, slots: int, required) -> list[int]:
        cfg = self.config
        # M / gcd(M, phi*(M)) straight from the ledgers
        quotient_pairs = []
        for p, a in m.pairs:
            v = max(0, a - assigned_ledger.get(p, 0))
            if v:
                quotient_pairs.append((p, v))
        quotient = Factorization(tuple(quotient_pairs))

        p_max = max(p for p, _ in m.pairs)
        limit = min(required) if required else cfg.prime_bound - 1
        # the h window must reach the next integer target
        c = _next_prime(p_max)
        if Fraction(c, c - 1) ** slots * h_m < t_min:
            self.contradictions[H_OUT_OF_RANGE] = \
                self.contradictions.get(H_OUT_OF_RANGE, 0) + 1
            return []
        ratio_needed = Fraction(t_min) / h_m
        out = []
        for d in quotient.divisors():
            p = d + 1
            if p <= p_max or p > limit or p >= cfg.prime_bound:
                continue
            if not is_prime(p):
                continue
            if Fraction(p, p - 1) ** slots >= ratio_needed:
                out.append(p)
        return sorted(out)

    # -- entry ----------------------------------------------------------------

    def run(self) -> BranchOutcome:
        try:
            root_verdict = self.explore(((2, self.e),))
        except EffortExceeded as exc:
            cert = EliminationCertificate(
                two_exponent=self.e, kind=UNDECIDABLE, cofactor=exc.cofactor,
                detail={"stage": "factorization"})
            return BranchOutcome(self.e, self.solutions, cert, self.nodes)
        self.solutions.sort(key=lambda r: r.value())
        if self.solutions:
            return BranchOutcome(self.e, self.solutions, None, self.nodes)
        cert = self._certificate(root_verdict)
        return BranchOutcome(self.e, [], cert, self.nodes)

    def _certificate(self, root_verdict: Verdict) -> EliminationCertificate:
        detail = {"nodes": self.nodes,
                  "contradictions": dict(sorted(self.contradictions.items()))}
        if not root_verdict.keep:
            # root-level contradiction: attach the first-level forced product
            detail["forced_product"] = str(self._root_forced_product())
            return EliminationCertificate(
                two_exponent=self.e, kind=root_verdict.kind,
                prime=root_verdict.prime,
                needed_exponent=root_verdict.needed_exponent,
                detail={**detail, **root_verdict.detail})
        return EliminationCertificate(
            two_exponent=self.e, kind=NO_CANDIDATE_PRIME,
            detail={**detail, "reason": "exhausted"})

    def _root_forced_product(self) -> Factorization:
        """Factorization of prod(q - 1) over the odd primes of 2**e - 1."""
        acc: dict[int, int] = {}
        for q, _ in self.power_vector(2, self.e):
            for t, v in self.power_vector(q, 1):
                acc[t] = acc.get(t, 0) + v
        return Factorization(tuple(sorted(acc.items())))


def close_and_check(e: int, config: SearchConfig) -> BranchOutcome:
    """Process the single 2**e branch."""
    if e < 1:
        raise ValueError("2-exponent must be positive")
    return _Branch(e, config).run()


def prune(assigned: tuple[tuple[int, int], ...], config: SearchConfig) -> Verdict:
    """Evaluate one node in isolation: Keep or a typed contradiction."""
    branch = _Branch(assigned[0][1], config)
    _, verdict, _, _ = branch.close(assigned)
    return verdict


def enumerate_solutions(config: SearchConfig) -> tuple[list[SolutionRecord],
                                                       list[EliminationCertificate]]:
    """All solutions within the configured bounds, plus branch certificates."""
    outcomes = run_branches(config)
    solutions = [rec for out in outcomes for rec in out.solutions]
    # N = 1 is the lone odd solution; it belongs to no 2-exponent branch
    if config.h_targets is None or 1 in config.h_targets:
        solutions.append(SolutionRecord(Factorization(), h=1,
                                        source=SEARCH_DISCOVERED))
    certificates = [out.certificate for out in outcomes
                    if out.certificate is not None]
    solutions.sort(key=lambda r: r.value())
    _assert_omega_floor(solutions)
    return solutions, certificates


def run_branches(config: SearchConfig) -> list[BranchOutcome]:
    """Branch outcomes for every configured 2-exponent, in exponent order."""
    exponents = config.exponents()
    if config.parallel_width > 1 and len(exponents) > 1:
        import concurrent.futures as cf
        with cf.ProcessPoolExecutor(max_workers=config.parallel_width) as pool:
            outs = list(pool.map(_branch_worker,
                                 [(e, config) for e in exponents]))
    else:
        outs = [close_and_check(e, config) for e in exponents]
    return sorted(outs, key=lambda o: o.two_exponent)


def _branch_worker(args) -> BranchOutcome:
    e, config = args
    return close_and_check(e, config)


def _assert_omega_floor(solutions) -> None:
    known = {rec.value() for rec in known_solutions()}
    for rec in solutions:
        if rec.value() not in known and 0 < rec.n.omega <= 7:
            raise AssertionError(
                f"solution {rec.n} outside the known list with omega <= 7; "
                "this contradicts established structure, refusing to emit")


def _next_prime(n: int) -> int:
    p = n + 1
    while not is_prime(p):
        p += 1
    return p
