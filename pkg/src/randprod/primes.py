"""Smallest-prime-factor sieve and the integer-side quantities built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidArgument, ResourceLimitError

DEFAULT_MEMORY_BUDGET = 2 * 1024**3


class PrimePower(NamedTuple):
    p: int
    m: int
    n: int


def _estimate_bytes(limit: int) -> int:
    # spf (int32) plus transient int64 work arrays during prime-power extraction
    return 4 * (limit + 1) + 24 * (limit + 1)


@dataclass(eq=False, frozen=True)
class LambdaTable:
    """Sieved data for 1..limit.

    ``spf[n]`` is the smallest prime factor of n (0 for n < 2). Prime powers
    are kept as three parallel sorted arrays ``pp_n``, ``pp_p``, ``pp_m`` so
    that Λ(n) = ln p is produced on demand and never stored as a float.
    """

    limit: int
    spf: np.ndarray = field(repr=False)
    pp_n: np.ndarray = field(repr=False)
    pp_p: np.ndarray = field(repr=False)
    pp_m: np.ndarray = field(repr=False)

    def __hash__(self):
        return id(self)

    @property
    def primes(self) -> np.ndarray:
        return self.pp_n[self.pp_m == 1]

    def check(self, n: int, lo: int = 1) -> int:
        n = int(n)
        if n < lo or n > self.limit:
            raise InvalidArgument(f"n={n} outside table range [{lo}, {self.limit}]")
        return n

    def is_prime(self, n: int) -> bool:
        n = self.check(n)
        return n >= 2 and int(self.spf[n]) == n

    def smallest_prime_factor(self, n: int) -> int:
        return int(self.spf[self.check(n, lo=2)])

    def prime_power(self, n: int) -> PrimePower | None:
        """(p, m) with n = p**m, or None when n is not a prime power."""
        n = self.check(n)
        if n < 2:
            return None
        p = int(self.spf[n])
        r, m = n, 0
        while r % p == 0:
            r //= p
            m += 1
        return PrimePower(p, m, n) if r == 1 else None

    def mangoldt(self, n: int) -> float:
        pp = self.prime_power(n)
        return math.log(pp.p) if pp else 0.0

    def pp_slice(self, lo: int, hi: int) -> slice:
        """Index range of prime powers n with lo < n <= hi."""
        a = int(np.searchsorted(self.pp_n, lo, side="right"))
        b = int(np.searchsorted(self.pp_n, hi, side="right"))
        return slice(a, b)


def build_lambda_table(limit: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> LambdaTable:
    limit = int(limit)
    if limit < 2:
        raise InvalidArgument("sieve limit must be >= 2")
    if limit >= 2**31 - 1:
        raise ResourceLimitError("limits beyond 2**31 need a segmented sieve")
    need = _estimate_bytes(limit)
    if need > memory_budget:
        raise ResourceLimitError(
            f"limit {limit} needs ~{need / 2**20:.0f} MiB, budget is {memory_budget / 2**20:.0f} MiB"
        )

    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    rest = rest[rest >= 2]
    spf[rest] = rest

    # strip the smallest prime factor repeatedly; prime powers end at 1
    n = np.arange(2, limit + 1, dtype=np.int64)
    p = spf[2:].astype(np.int64)
    r = n // p
    m = np.ones_like(n)
    active = r % p == 0
    while active.any():
        idx = np.flatnonzero(active)
        r[idx] //= p[idx]
        m[idx] += 1
        active[idx] = r[idx] % p[idx] == 0
    is_pp = r == 1
    return LambdaTable(
        limit=limit,
        spf=spf,
        pp_n=n[is_pp],
        pp_p=p[is_pp],
        pp_m=m[is_pp],
    )


def sopfr(n: int, table: LambdaTable) -> int:
    """Sum of prime factors with multiplicity; 0 for n = 1."""
    n = table.check(n)
    total = 0
    while n > 1:
        p = int(table.spf[n])
        total += p
        n //= p
    return total


def sopfr_array(n_max: int, table: LambdaTable) -> np.ndarray:
    """sopfr(n) for n = 0..n_max (entry 0 is 0)."""
    n_max = table.check(n_max)
    out = np.zeros(n_max + 1, dtype=np.int64)
    r = np.arange(n_max + 1, dtype=np.int64)
    spf = table.spf[: n_max + 1].astype(np.int64)
    live = np.flatnonzero(r > 1)
    while live.size:
        p = spf[r[live]]
        out[live] += p
        r[live] //= p
        live = live[r[live] > 1]
    return out


def chebyshev_psi(u: int, table: LambdaTable) -> float:
    u = table.check(u, lo=0)
    sl = table.pp_slice(0, u)
    return math.fsum(np.log(table.pp_p[sl].astype(float)))


def prime_powers_in(M: int, N: int, table: LambdaTable) -> list[PrimePower]:
    """All p**m in (M, M+N], ascending."""
    M, N = int(M), int(N)
    if M < 0 or N < 0 or M + N > table.limit:
        raise InvalidArgument(f"range ({M}, {M + N}] outside table (limit {table.limit})")
    sl = table.pp_slice(M, M + N)
    return [
        PrimePower(int(p), int(m), int(n))
        for p, m, n in zip(table.pp_p[sl], table.pp_m[sl], table.pp_n[sl])
    ]


def prime_count(u: int, table: LambdaTable) -> int:
    u = table.check(u, lo=0)
    sl = table.pp_slice(0, u)
    return int(np.count_nonzero(table.pp_m[sl] == 1))
