"""Persistent factorization cache.

File format: UTF-8 text, one entry per line, ``n=p1^e1*p2*...`` in decimal
(exponent 1 omitted), sorted by n, newline-terminated.  Entries re-multiply
to their key and every base is prime; both are checked on load so a corrupt
cache fails loudly instead of poisoning results.  Writes go through
atomically (temp file + rename) on every put, keeping the file current.
"""

from __future__ import annotations

import os
import threading
from typing import Optional

from .arith import Factorization, format_factored, is_prime


class CacheCorrupt(ValueError):
    """A cache line failed validation."""


class FactorCache:
    """Write-through, internally synchronized factorization cache."""

    def __init__(self, path: Optional[str] = None, validate: bool = True):
        self.path = path
        self._lock = threading.Lock()
        self._entries: dict[int, Factorization] = {}
        self.dirty = False
        self.hits = 0
        self.misses = 0
        if path and os.path.exists(path):
            self._load(validate=validate)

    def _load(self, validate: bool) -> None:
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    key_s, _, rhs = line.partition("=")
                    key = int(key_s)
                    fact = _parse_rhs(rhs, validate=validate)
                except (ValueError, AssertionError) as exc:
                    raise CacheCorrupt(
                        f"{self.path}:{lineno}: bad cache line {line!r}: {exc}"
                    ) from None
                if fact.value() != key:
                    raise CacheCorrupt(
                        f"{self.path}:{lineno}: product mismatch for {key}")
                self._entries[key] = fact

    def get(self, n: int) -> Optional[Factorization]:
        with self._lock:
            f = self._entries.get(n)
            if f is None:
                self.misses += 1
            else:
                self.hits += 1
            return f

    def put(self, n: int, fact: Factorization) -> None:
        with self._lock:
            if self._entries.get(n) == fact:
                return
            self._entries[n] = fact
            self.dirty = True
            if self.path:
                self._flush_locked()

    def flush(self) -> None:
        with self._lock:
            if self.path and self.dirty:
                self._flush_locked()

    def _flush_locked(self) -> None:
        tmp = self.path + ".tmp"
        os.makedirs(os.path.dirname(os.path.abspath(self.path)), exist_ok=True)
        with open(tmp, "w", encoding="utf-8") as fh:
            for n in sorted(self._entries):
                fh.write(f"{n}={format_factored(self._entries[n])}\n")
        os.replace(tmp, self.path)
        self.dirty = False

    def __len__(self) -> int:
        return len(self._entries)

    def verify(self) -> int:
        """Re-validate every entry (product and primality); returns count."""
        with self._lock:
            for n, f in self._entries.items():
                if f.value() != n:
                    raise CacheCorrupt(f"product mismatch for {n}")
                f.validate()
            return len(self._entries)

    def stats(self) -> dict:
        with self._lock:
            return {
                "path": self.path,
                "entries": len(self._entries),
                "hits": self.hits,
                "misses": self.misses,
                "bytes": os.path.getsize(self.path)
                if self.path and os.path.exists(self.path) else 0,
            }


def _parse_rhs(rhs: str, validate: bool) -> Factorization:
    if rhs in ("", "1"):
        return Factorization()
    pairs = []
    for part in rhs.split("*"):
        if "^" in part:
            base_s, _, exp_s = part.partition("^")
            p, e = int(base_s), int(exp_s)
        else:
            p, e = int(part), 1
        if validate and not is_prime(p):
            raise CacheCorrupt(f"{p} is not prime")
        pairs.append((p, e))
    return Factorization(tuple(pairs))
