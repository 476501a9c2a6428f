"""Exponential sums weighted by Λ(n) and Λ(n)/ln n, plus their Abel identity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .primes import LambdaTable
from .theta import ThetaSample, compensated_sum, phases

DEFAULT_RATIO = 2.0**0.25
DEFAULT_START = 100


@dataclass(frozen=True)
class SumTrace:
    theta: ThetaSample
    checkpoints: np.ndarray
    s_values: np.ndarray
    c_values: np.ndarray

    def __post_init__(self):
        k = len(self.checkpoints)
        if not (len(self.s_values) == len(self.c_values) == k):
            raise InvalidArgument("trace sequences must have equal length")

    @property
    def normalized(self) -> np.ndarray:
        """|S_N| / (N^(1/2) (ln N)^(5/2)) at each checkpoint."""
        n = self.checkpoints.astype(float)
        return np.abs(self.s_values) / (np.sqrt(n) * np.log(n) ** 2.5)


def _weights_lambda(sl: slice, table: LambdaTable) -> np.ndarray:
    return np.log(table.pp_p[sl].astype(float))


def _weights_inverse_m(sl: slice, table: LambdaTable) -> np.ndarray:
    # Λ(n)/ln n == 1/m for n = p**m
    return 1.0 / table.pp_m[sl]


def _range_sum(lo: int, hi: int, theta: ThetaSample, table: LambdaTable, weights) -> complex:
    sl = table.pp_slice(lo, hi)
    return compensated_sum(weights(sl, table) * phases(table.pp_n[sl], theta))


def s_sum(N: int, theta: ThetaSample, table: LambdaTable) -> complex:
    """S_N(θ) = Σ_{2<=n<=N} Λ(n) e(nθ)."""
    N = table.check(N, lo=2)
    return _range_sum(0, N, theta, table, _weights_lambda)


def c_sum(u: int, theta: ThetaSample, table: LambdaTable) -> complex:
    """Σ_{1<n<=u} (Λ(n)/ln n) e(nθ); zero at u = 1."""
    u = table.check(u, lo=1)
    return _range_sum(0, u, theta, table, _weights_inverse_m)


def lambda_block_sum(M: int, N: int, theta: ThetaSample, table: LambdaTable) -> complex:
    """Σ_{M<n<=M+N} Λ(n) e(nθ)."""
    _check_block(M, N, table)
    return _range_sum(M, M + N, theta, table, _weights_lambda)


def _check_block(M: int, N: int, table: LambdaTable) -> None:
    if M < 0 or N < 0 or M + N > table.limit:
        raise InvalidArgument(f"block ({M}, {M + N}] outside table (limit {table.limit})")


def block_f(M: int, N: int, theta: ThetaSample, table: LambdaTable) -> float:
    """|Σ_{M<n<=M+N} (Λ(n)/ln n) e(nθ)|, zero for N = 0."""
    M, N = int(M), int(N)
    _check_block(M, N, table)
    if N == 0:
        return 0.0
    return abs(_range_sum(M, M + N, theta, table, _weights_inverse_m))


def abel_rhs(N: int, theta: ThetaSample, table: LambdaTable) -> complex:
    """ℭ(N) ln N - Σ_{n=2}^{N-1} ℭ(n) ln((n+1)/n), built from dense prefix sums of ℭ."""
    N = table.check(N, lo=2)
    sl = table.pp_slice(0, N)
    dense = np.zeros(N + 1, dtype=complex)
    dense[table.pp_n[sl]] = _weights_inverse_m(sl, table) * phases(table.pp_n[sl], theta)
    prefix = np.cumsum(dense)
    n = np.arange(2, N, dtype=float)
    steps = prefix[2:N] * np.log1p(1.0 / n)
    return prefix[N] * math.log(N) - compensated_sum(steps)


def abel_residual(N: int, theta: ThetaSample, table: LambdaTable) -> float:
    return abs(s_sum(N, theta, table) - abel_rhs(N, theta, table))


def geometric_grid(n_max: int, ratio: float = DEFAULT_RATIO, start: int = DEFAULT_START) -> np.ndarray:
    """Integer checkpoints start, start·r, start·r², ... ending exactly at n_max."""
    n_max = int(n_max)
    if n_max < 2:
        raise InvalidArgument("grid needs n_max >= 2")
    if ratio <= 1.0:
        raise InvalidArgument("geometric ratio must exceed 1")
    start = max(2, min(start, n_max))
    k = np.arange(int(math.floor(math.log(n_max / start) / math.log(ratio) + 1e-12)) + 1)
    pts = np.rint(start * ratio**k).astype(np.int64)
    pts = np.unique(np.append(pts[pts <= n_max], n_max))
    return pts


def parse_grid(spec: str | None, n_max: int) -> np.ndarray:
    """``geometric:r`` or ``list:a,b,c``; default geometric with ratio 2^(1/4)."""
    if not spec:
        return geometric_grid(n_max)
    kind, _, arg = spec.partition(":")
    try:
        if kind == "geometric":
            return geometric_grid(n_max, float(arg) if arg else DEFAULT_RATIO)
        if kind == "list":
            pts = np.array(sorted({int(x) for x in arg.split(",") if x.strip()}), dtype=np.int64)
            return pts
    except ValueError as exc:
        raise InvalidArgument(f"bad grid spec {spec!r}") from exc
    raise InvalidArgument(f"unknown grid kind {kind!r}")


def trace(theta: ThetaSample, n_grid, table: LambdaTable) -> SumTrace:
    """S_N and ℭ(N) at each checkpoint from a single pass over n <= max(grid)."""
    grid = np.asarray(n_grid, dtype=np.int64)
    if grid.size == 0:
        raise InvalidArgument("checkpoint grid is empty")
    if grid[0] < 2 or np.any(np.diff(grid) <= 0):
        raise InvalidArgument("checkpoints must be strictly increasing and >= 2")
    if grid[-1] > table.limit:
        raise InvalidArgument(f"grid reaches {grid[-1]} beyond table limit {table.limit}")
    sl = table.pp_slice(0, int(grid[-1]))
    ph = phases(table.pp_n[sl], theta)
    s_terms = _weights_lambda(sl, table) * ph
    c_terms = _weights_inverse_m(sl, table) * ph
    cuts = np.searchsorted(table.pp_n[sl], grid, side="right")
    s_vals = np.empty(grid.size, dtype=complex)
    c_vals = np.empty(grid.size, dtype=complex)
    s_blocks_re, s_blocks_im, c_blocks_re, c_blocks_im = [], [], [], []
    lo = 0
    for k, hi in enumerate(cuts):
        s_blocks_re.append(math.fsum(s_terms.real[lo:hi]))
        s_blocks_im.append(math.fsum(s_terms.imag[lo:hi]))
        c_blocks_re.append(math.fsum(c_terms.real[lo:hi]))
        c_blocks_im.append(math.fsum(c_terms.imag[lo:hi]))
        s_vals[k] = complex(math.fsum(s_blocks_re), math.fsum(s_blocks_im))
        c_vals[k] = complex(math.fsum(c_blocks_re), math.fsum(c_blocks_im))
        lo = hi
    return SumTrace(theta, grid, s_vals, c_vals)


TRACE_COLUMNS = ("theta", "N", "re_S", "im_S", "abs_S", "re_C", "im_C", "normalized")


def trace_rows(tr: SumTrace) -> list[dict]:
    rows = []
    for n, s, c, z in zip(tr.checkpoints, tr.s_values, tr.c_values, tr.normalized):
        rows.append(
            {
                "theta": tr.theta.label,
                "N": int(n),
                "re_S": float(s.real),
                "im_S": float(s.imag),
                "abs_S": float(abs(s)),
                "re_C": float(c.real),
                "im_C": float(c.imag),
                "normalized": float(z),
            }
        )
    return rows
