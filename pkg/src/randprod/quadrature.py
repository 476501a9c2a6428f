"""Adaptive composite Gauss–Legendre quadrature along straight segments in ℂ."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureError


@lru_cache(maxsize=8)
def _rule(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0  # mapped to [0, 1]


@dataclass
class QuadResult:
    value: complex
    error: float
    panels: int
    evaluations: int


def integrate_segment(
    func,
    z0: complex,
    z1: complex,
    tol: float = 1e-8,
    order: int = 16,
    initial_panels: int = 1,
    max_panels: int = 20_000,
) -> QuadResult:
    """∫ func(z) dz along the segment z0 -> z1.

    ``func`` maps a complex array to a complex array. A panel is accepted
    once its single-rule estimate and the sum over its two halves differ by
    less than its share of ``tol`` (proportional to panel length); the
    two-half value is kept. When a panel is split, each half's rule value
    becomes the child's coarse estimate, so every round costs one batched
    call with ``2 * order`` nodes per pending panel.
    """
    z0, z1 = complex(z0), complex(z1)
    dz = z1 - z0
    if dz == 0:
        return QuadResult(0j, 0.0, 0, 0)
    x, w = _rule(order)

    def rule(a, b):
        nonlocal evaluations
        taus = a[:, None] + (b - a)[:, None] * x
        vals = np.asarray(func(z0 + dz * taus.ravel()), dtype=complex).reshape(taus.shape)
        evaluations += vals.size
        if not np.all(np.isfinite(vals)):
            raise QuadratureError("integrand is not finite on the segment", segment=(z0, z1))
        return (vals @ w) * (b - a)

    evaluations = 0
    edges = np.linspace(0.0, 1.0, max(1, initial_panels) + 1)
    a, b = edges[:-1], edges[1:]
    coarse = rule(a, b)
    total = 0j
    err_total = 0.0
    accepted = 0
    while a.size:
        m = 0.5 * (a + b)
        halves = rule(np.concatenate([a, m]), np.concatenate([m, b]))
        left, right = halves[: a.size], halves[a.size :]
        fine = left + right
        err = np.abs(fine - coarse) * abs(dz)
        ok = err <= tol * (b - a)
        total += dz * fine[ok].sum()
        err_total += float(err[ok].sum())
        accepted += int(ok.sum())
        bad = ~ok
        if accepted + 2 * int(bad.sum()) > max_panels:
            raise QuadratureError(
                f"no convergence after {accepted} panels (tol {tol:g})", segment=(z0, z1)
            )
        a = np.concatenate([a[bad], m[bad]])
        b = np.concatenate([m[bad], b[bad]])
        coarse = np.concatenate([left[bad], right[bad]])
    return QuadResult(complex(total), err_total, accepted, evaluations)
