"""Command-line front end.

Every subcommand renders one JSON-serializable payload in three formats
(json, csv, text).  Integers travel as decimal strings in JSON and CSV:
values here routinely exceed 64 bits and must survive any consumer.  The
``search`` subcommand streams one JSON line per branch outcome as it
finishes.  Exit codes: 0 success, 1 verified-negative, 2 error, 3 usage.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .arith import (DomainError, EffortExceeded, Factorization, factorize,
                    format_factored, parse_factored, set_default_cache)
from .cache import FactorCache
from .search import SearchConfig, close_and_check, run_branches
from .smoothness import is_shifted_smooth, smooth_exponents_base2, smooth_prime_powers
from .totient import (PrimePower, SolutionRecord, forced_divisor_ledger,
                      h_ratio, is_solution, known_solutions,
                      next_prime_candidates, phi_star, primorial_probe)

DEFAULT_CACHE_PATH = os.path.join("~", ".phistar", "factors.txt")
CACHE_ENV = "PHISTAR_CACHE"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(3)


def _s(x) -> str:
    return str(int(x))


def _fraction_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def _record_payload(rec: SolutionRecord) -> dict:
    return {
        "n": _s(rec.value()),
        "factorization": format_factored(rec.n),
        "h": _s(rec.h),
        "omega": rec.n.omega,
        "source": rec.source,
    }


def _certificate_payload(cert) -> dict:
    data = {"kind": cert.kind}
    if cert.prime is not None:
        data["prime"] = _s(cert.prime)
    if cert.needed_exponent is not None:
        data["needed_exponent"] = cert.needed_exponent
    if cert.cofactor is not None:
        data["cofactor"] = _s(cert.cofactor)
    if cert.detail:
        data["detail"] = {k: v for k, v in sorted(cert.detail.items())}
    return data


def _branch_payload(out) -> dict:
    data: dict = {"e": out.two_exponent, "outcome": out.outcome}
    body: dict = {"nodes": out.nodes}
    if out.solutions:
        body["solutions"] = [_record_payload(r) for r in out.solutions]
    if out.certificate is not None:
        body["certificate"] = _certificate_payload(out.certificate)
    data["data"] = body
    return data


def _parse_n(text: str) -> Factorization:
    if "^" in text or "*" in text:
        return parse_factored(text)
    return factorize(int(text))


# --------------------------------------------------------------------------
# rendering
# --------------------------------------------------------------------------

def _canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _flatten(payload, prefix="") -> list[tuple[str, str]]:
    rows: list[tuple[str, str]] = []
    if isinstance(payload, dict):
        for k, v in payload.items():
            rows.extend(_flatten(v, f"{prefix}{k}."))
    elif isinstance(payload, (list, tuple)):
        for i, v in enumerate(payload):
            rows.extend(_flatten(v, f"{prefix}{i}."))
    else:
        rows.append((prefix[:-1], "" if payload is None else str(payload)))
    return rows


def _emit(payload: dict, fmt: str, stream=None) -> None:
    stream = stream or sys.stdout
    if fmt == "json":
        json.dump(payload, stream, indent=2)
        stream.write("\n")
    elif fmt == "csv":
        stream.write("key,value\n")
        for key, value in _flatten(payload):
            value = str(value).replace('"', '""')
            stream.write(f'{key},"{value}"\n')
    else:
        for key, value in _flatten(payload):
            stream.write(f"{key} = {value}\n")


def _write_manifest(path: str, command: str, config: dict, cache_path,
                    wall: float, payload) -> None:
    manifest = {
        "command": command,
        "config": config,
        "tool_version": __version__,
        "cache_file": cache_path,
        "wall_time_s": round(wall, 6),
        "result_digest": "sha256:" + hashlib.sha256(
            _canonical_json(payload).encode()).hexdigest(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


# --------------------------------------------------------------------------
# subcommand handlers: each returns (payload, exit_code)
# --------------------------------------------------------------------------

def _cmd_phistar(args):
    f = _parse_n(args.n)
    return {"n": _s(f.value()), "factorization": format_factored(f),
            "phi_star": _s(phi_star(f))}, 0


def _cmd_h(args):
    f = _parse_n(args.n)
    h = h_ratio(f)
    return {"n": _s(f.value()), "h": _fraction_str(h),
            "numerator": _s(h.numerator), "denominator": _s(h.denominator),
            "integral": h.denominator == 1}, 0


def _cmd_verify(args):
    f = _parse_n(args.n)
    rec = is_solution(f)
    payload = {"n": _s(f.value()), "factorization": format_factored(f),
               "phi_star": _s(phi_star(f))}
    if rec is None:
        payload["outcome"] = "non-solution"
        payload["h"] = _fraction_str(h_ratio(f))
        return payload, 1
    payload["outcome"] = "solution"
    payload["h"] = _s(rec.h)
    return payload, 0


def _cmd_known(args):
    return {"count": 12,
            "solutions": [_record_payload(r) for r in known_solutions()]}, 0


def _cmd_exponents(args):
    if args.check is not None:
        verdict = is_shifted_smooth(2, args.check, args.bound)
        return {"bound": _s(args.bound), "k": args.check,
                "smooth": verdict.smooth,
                "factors_found": format_factored(verdict.factors_found),
                "residual": _s(verdict.residual)}, 0
    ks = smooth_exponents_base2(args.bound)
    return {"bound": _s(args.bound), "count": len(ks), "exponents": ks}, 0


def _cmd_table(args):
    two = {"auto": "table", "include": True, "exclude": False}[args.two]
    pbound = args.pbound if args.pbound is not None else args.bound
    ps = smooth_prime_powers(pbound, args.bound, args.k, include_two=two)
    return {"k": args.k, "bound": _s(args.bound), "pbound": _s(pbound),
            "count": len(ps), "primes": [_s(p) for p in ps]}, 0


def _cmd_arrow(args):
    f = parse_factored(args.seed)
    if f.omega != 1:
        raise DomainError("arrow seed must be a single prime power, e.g. 5^7")
    (p, e), = f.pairs
    ledger = forced_divisor_ledger(PrimePower(p, e), depth=args.depth)
    forced = [{"p": _s(q), "e": v} for q, v in sorted(ledger.items())]
    return {"seed": format_factored(f), "depth": args.depth,
            "forced": forced}, 0


def _cmd_candidates(args):
    m = parse_factored(args.m)
    cands = next_prime_candidates(m, args.h, args.r)
    return {"m": format_factored(m), "h_target": _s(args.h),
            "r_total": args.r, "candidates": [_s(p) for p in cands]}, 0


def _cmd_primorial(args):
    h, divisible = primorial_probe(args.r)
    return {"r": args.r, "h": _fraction_str(h), "divisible": divisible}, 0


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        prime_bound=args.bound,
        odd_power_cap=args.cap,
        two_exponent_set=tuple(args.e) if getattr(args, "e", None) else None,
        omega_cap=args.omega,
        h_targets=tuple(args.h_target) if args.h_target else None,
        parallel_width=getattr(args, "jobs", 1),
        consecutive_primes_only=getattr(args, "consecutive", False),
    )


def _cmd_search(args):
    config = _search_config(args)
    outcomes = run_branches(config)
    stream = sys.stdout if args.format == "json" else None
    branches = []
    for out in outcomes:
        line = _branch_payload(out)
        branches.append(line)
        if stream is not None:
            stream.write(json.dumps(line) + "\n")
    solutions = sorted((r for o in outcomes for r in o.solutions),
                       key=lambda r: r.value())
    records = [_record_payload(r) for r in solutions]
    if config.h_targets is None or 1 in config.h_targets:
        records.insert(0, _record_payload(
            SolutionRecord(Factorization(), h=1, source="search")))
    payload = {
        "bound": _s(config.prime_bound),
        "cap": _s(config.odd_power_cap),
        "exponents": list(config.exponents()),
        "exponent_set_note": "base-2 exponent list from the smooth-exponent "
                             "computation (not the odd-base table)",
        "solutions": records,
        "branches": branches,
    }
    undecidable = any(o.outcome == "undecidable" for o in outcomes)
    payload["complete"] = not undecidable
    return payload, 0


def _cmd_close(args):
    config = _search_config(args)
    out = close_and_check(args.e_value, config)
    return _branch_payload(out), 0


def _cmd_cache(args, cache: FactorCache):
    if args.action == "stats":
        st = cache.stats()
        st["entries"] = int(st["entries"])
        return {k: (v if v is not None else "") for k, v in st.items()}, 0
    if args.action == "verify":
        count = cache.verify()
        return {"verified_entries": count, "ok": True}, 0
    # compact: rewrite the file (sorted, deduplicated by construction)
    cache.dirty = True
    cache.flush()
    return {"compacted": True, "entries": len(cache)}, 0


# --------------------------------------------------------------------------
# argument wiring
# --------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="phistar",
                     description="unitary-totient multiperfect numbers: "
                                 "verify, certify smoothness, search")
    parser.add_argument("--format", choices=("json", "csv", "text"),
                        default="json")
    parser.add_argument("--cache", default=None,
                        help="factor cache file (default ~/.phistar/factors.txt; "
                             f"env {CACHE_ENV} overrides)")
    parser.add_argument("--no-cache", action="store_true",
                        help="in-memory cache only, for cold-run audits")
    parser.add_argument("--manifest", default=None,
                        help="write a run manifest (config, digest) to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phistar", help="unitary totient of n")
    p.add_argument("n")
    p.set_defaults(func=_cmd_phistar)

    p = sub.add_parser("h", help="h(n) = n/phi*(n), exact")
    p.add_argument("n")
    p.set_defaults(func=_cmd_h)

    p = sub.add_parser("verify", help="check phi*(n) | n; exit 1 if not")
    p.add_argument("n")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("known", help="the twelve known solutions")
    p.set_defaults(func=_cmd_known)

    p = sub.add_parser("exponents", help="k with P(2^k-1) below the bound")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--check", type=int, default=None,
                   help="test a single exponent instead of listing all")
    p.set_defaults(func=_cmd_exponents)

    p = sub.add_parser("table", help="primes p with P(p^k-1) below the bound")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--pbound", type=int, default=None,
                   help="prime range limit (default: same as --bound)")
    p.add_argument("--two", choices=("auto", "include", "exclude"),
                   default="auto", help="list p=2 (auto: published-table style)")
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("arrow", help="prime powers forced by a unitary factor")
    p.add_argument("seed", help="prime power, e.g. 5^7")
    p.add_argument("--depth", type=int, default=8)
    p.set_defaults(func=_cmd_arrow)

    p = sub.add_parser("candidates", help="admissible next primes after m")
    p.add_argument("m", help="factored partial product, e.g. 2^16 or 2^4*3*5")
    p.add_argument("--h", type=int, default=2, help="target h")
    p.add_argument("--r", type=int, default=64, help="total odd-prime budget")
    p.set_defaults(func=_cmd_candidates)

    p = sub.add_parser("search", help="enumerate solutions under bounds")
    p.add_argument("--bound", type=int, default=10 ** 5)
    p.add_argument("--cap", type=int, default=10 ** 8)
    p.add_argument("--omega", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--h-target", type=int, action="append", default=None)
    p.add_argument("--e", type=int, action="append", default=None,
                   help="restrict to these 2-exponents (repeatable)")
    p.add_argument("--consecutive", action="store_true",
                   help="restrict support to consecutive-prime products")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("close", help="process a single 2-exponent branch")
    p.add_argument("--e", dest="e_value", type=int, required=True)
    p.add_argument("--bound", type=int, default=10 ** 5)
    p.add_argument("--cap", type=int, default=10 ** 8)
    p.add_argument("--omega", type=int, default=None)
    p.add_argument("--h-target", type=int, action="append", default=None)
    p.set_defaults(func=_cmd_close)

    p = sub.add_parser("primorial", help="h of the first-r-primes product")
    p.add_argument("--r", type=int, required=True)
    p.set_defaults(func=_cmd_primorial)

    p = sub.add_parser("cache", help="factor cache maintenance")
    p.add_argument("action", choices=("stats", "verify", "compact"))
    p.set_defaults(func=_cmd_cache, needs_cache=True)

    return parser


def _configure_cache(args) -> FactorCache:
    if args.no_cache:
        cache = FactorCache()
    else:
        path = args.cache or os.environ.get(CACHE_ENV) \
            or os.path.expanduser(DEFAULT_CACHE_PATH)
        cache = FactorCache(path)
    set_default_cache(cache)
    return cache


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cache = _configure_cache(args)
    started = time.monotonic()
    try:
        if getattr(args, "needs_cache", False):
            payload, code = args.func(args, cache)
        else:
            payload, code = args.func(args)
    except EffortExceeded as exc:
        payload = {"outcome": "undecidable", "cofactor": _s(exc.cofactor),
                   "partial": format_factored(Factorization(exc.partial))}
        code = 0
    except (DomainError, ValueError) as exc:
        sys.stderr.write(f"phistar: error: {exc}\n")
        return 2
    wall = time.monotonic() - started
    if args.command == "search" and args.format == "json":
        # branch lines were already streamed; emit the summary separately
        sys.stdout.write(json.dumps({"summary": payload}) + "\n")
    else:
        _emit(payload, args.format)
    if args.manifest:
        config = {k: v for k, v in vars(args).items()
                  if k not in ("func", "needs_cache", "manifest", "jobs")
                  and not callable(v)}
        _write_manifest(args.manifest, args.command, config,
                        cache.path, wall, payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
