"""Reference computations that share no code with the package."""

import math

import numpy as np


def mangoldt_trial(n):
    """Λ(n) by trial division."""
    if n < 2:
        return 0.0
    d = 2
    while d * d <= n:
        if n % d == 0:
            while n % d == 0:
                n //= d
            return math.log(d) if n == 1 else 0.0
        d += 1
    return math.log(n)


def factor_trial(n):
    out = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def eratosthenes(limit):
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags)


def prime_power_list(limit):
    """(n, p, m) for every prime power n = p**m <= limit, unsorted."""
    out = []
    for p in eratosthenes(limit).tolist():
        q, m = p, 1
        while q <= limit:
            out.append((q, p, m))
            q *= p
            m += 1
    return out


def lambda_dirichlet(sigma, limit):
    """Σ_{n<=limit} Λ(n) n^-σ plus the PNT tail ∫_limit^∞ u^-σ du."""
    terms = [math.log(p) * n ** (-sigma) for n, p, _ in prime_power_list(limit)]
    return math.fsum(terms) + limit ** (1 - sigma) / (sigma - 1)


def zeta_direct(sigma, limit=10**6):
    """Σ n^-σ with Euler–Maclaurin tail."""
    n = np.arange(1, limit + 1, dtype=float)
    head = math.fsum(n ** (-sigma))
    return head + limit ** (1 - sigma) / (sigma - 1) - 0.5 * limit ** (-sigma)
