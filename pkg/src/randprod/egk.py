"""Checks on the hypotheses and conclusion of the Erdős–Gál–Koksma lemma.

Everything is specialised to the blockwise functional
F(M, N, θ) = |Σ_{M<n<=M+N} (Λ(n)/ln n) e(nθ)| with p = 2 and g(N) = N, but
the growth function and exponent are pluggable through :class:`EGKConfig`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidArgument
from .expsums import block_f, trace
from .primes import LambdaTable
from .theta import ThetaSample, TWO_PI, _two_product, uniform

GROWTH_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "linear": lambda n: n,
    "nlogn": lambda n: n * np.log(n),
}

# |estimate - closed form| <= K * stderr is reported as ok
MOMENT_OK_SIGMAS = 4.0


@dataclass(frozen=True)
class EGKConfig:
    p_exponent: float = 2.0
    g_of_N: str = "linear"
    epsilon: float = 0.1
    mc_samples: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.p_exponent < 1:
            raise InvalidArgument("p_exponent must be >= 1")
        if self.mc_samples < 100:
            raise InvalidArgument("mc_samples must be >= 100")
        if self.epsilon <= 0:
            raise InvalidArgument("epsilon must be positive")
        if self.g_of_N not in GROWTH_FUNCTIONS:
            raise InvalidArgument(f"unknown growth function {self.g_of_N!r}")

    def g(self, n):
        return GROWTH_FUNCTIONS[self.g_of_N](np.asarray(n, dtype=float))


@dataclass(frozen=True)
class MomentReport:
    M: int
    N: int
    closed_form: float
    mc_estimate: float
    mc_stderr: float
    samples: int

    @property
    def ok(self) -> bool:
        return abs(self.mc_estimate - self.closed_form) <= MOMENT_OK_SIGMAS * self.mc_stderr + 1e-12


MOMENT_COLUMNS = ("M", "N", "closed_form", "mc_estimate", "mc_stderr", "samples", "ok")


def moment_row(r: MomentReport) -> dict:
    return {
        "M": r.M,
        "N": r.N,
        "closed_form": r.closed_form,
        "mc_estimate": r.mc_estimate,
        "mc_stderr": r.mc_stderr,
        "samples": r.samples,
        "ok": str(r.ok).lower(),
    }


def _check_range(M: int, N: int, table: LambdaTable) -> None:
    if M < 0 or N < 0 or M + N > table.limit:
        raise InvalidArgument(f"block ({M}, {M + N}] outside table (limit {table.limit})")


def moment_closed_form(M: int, N: int, table: LambdaTable) -> float:
    """∫₀¹ F(M,N,θ)² dθ, which by orthogonality is Σ 1/m² over p**m in (M, M+N]."""
    M, N = int(M), int(N)
    _check_range(M, N, table)
    sl = table.pp_slice(M, M + N)
    return math.fsum(1.0 / table.pp_m[sl].astype(float) ** 2)


def moment_bound_check(M: int, N: int, table: LambdaTable) -> bool:
    return moment_closed_form(M, N, table) <= N


def _block_moduli(M: int, N: int, thetas: np.ndarray, table: LambdaTable, chunk: int = 2**22) -> np.ndarray:
    """F(M,N,θ) for a vector of explicit θ values."""
    sl = table.pp_slice(M, M + N)
    n = table.pp_n[sl].astype(float)
    w = 1.0 / table.pp_m[sl]
    out = np.empty(thetas.size)
    if n.size == 0:
        out[:] = 0.0
        return out
    rows = max(1, chunk // n.size)
    for i in range(0, thetas.size, rows):
        th = thetas[i : i + rows, None]
        hi, lo = _two_product(np.broadcast_to(n, (th.shape[0], n.size)), th)
        f = (hi - np.floor(hi)) + lo
        ang = TWO_PI * f
        out[i : i + rows] = np.hypot(np.cos(ang) @ w, np.sin(ang) @ w)
    return out


def moment_monte_carlo(M: int, N: int, cfg: EGKConfig, table: LambdaTable, stream_offset: int = 0) -> MomentReport:
    """Sample mean and standard error of F(M,N,θ)^p over seeded uniform θ."""
    M, N = int(M), int(N)
    _check_range(M, N, table)
    k = cfg.mc_samples
    if N == 0:
        return MomentReport(M, N, 0.0, 0.0, 0.0, k)
    thetas = uniform(cfg.seed, stream_offset, k)
    vals = _block_moduli(M, N, thetas, table) ** cfg.p_exponent
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(k))
    closed = moment_closed_form(M, N, table) if cfg.p_exponent == 2 else float("nan")
    return MomentReport(M, N, closed, mean, stderr, k)


def check_growth_hypothesis(cfg: EGKConfig, n_grid) -> None:
    """Raise unless g(N)/N is non-decreasing along ``n_grid``."""
    n = np.asarray(n_grid, dtype=float)
    ratio = cfg.g(n) / n
    if np.any(np.diff(ratio) < -1e-12 * np.abs(ratio[1:])):
        raise InvalidArgument(f"g(N)/N is not non-decreasing for g={cfg.g_of_N!r}")


def subadditivity_fuzz(trials: int, n_cap: int, seed: int, table: LambdaTable) -> float:
    """Largest F(M,N) - F(M,N') - F(M+N',N-N') over random instances with M+N <= n_cap."""
    if n_cap > table.limit or n_cap < 1:
        raise InvalidArgument("n_cap must lie in [1, table limit]")
    u = uniform(seed, 0, 4 * trials).reshape(trials, 4)
    worst = -math.inf
    for a, b, c, d in u:
        M = int(a * n_cap)
        N = int(b * (n_cap - M + 1))
        Np = int(c * (N + 1))
        th = ThetaSample.explicit(d)
        v = block_f(M, N, th, table) - block_f(M, Np, th, table) - block_f(M + Np, N - Np, th, table)
        worst = max(worst, v)
    return worst


@dataclass
class ConclusionRow:
    theta: ThetaSample
    sup_statistic: float
    growth: float
    flags: list[str] = field(default_factory=list)


CONCLUSION_COLUMNS = ("theta", "sup_statistic", "growth", "flags")

# fitted log-log slope of the statistic above which a row is marked unbounded_suspect
UNBOUNDED_SLOPE = 0.1


def conclusion_statistic(c_values, n_grid, cfg: EGKConfig) -> np.ndarray:
    """F(0,N,θ) / (g(N)^(1/p) (ln N)^((p+1)/p + ε))."""
    n = np.asarray(n_grid, dtype=float)
    p = cfg.p_exponent
    return np.abs(c_values) / (cfg.g(n) ** (1 / p) * np.log(n) ** ((p + 1) / p + cfg.epsilon))


def ae_conclusion_scan(thetas, n_grid, cfg: EGKConfig, table: LambdaTable):
    """Per-θ sup of the normalised ℭ(N) over the grid plus quantiles across θ."""
    grid = np.asarray(n_grid, dtype=np.int64)
    check_growth_hypothesis(cfg, grid)
    rows = []
    for th in thetas:
        tr = trace(th, grid, table)
        stat = conclusion_statistic(tr.c_values, grid, cfg)
        growth = _upper_half_slope(grid, stat)
        flags = ["unbounded_suspect"] if growth > UNBOUNDED_SLOPE else []
        rows.append(ConclusionRow(th, float(stat.max()), growth, flags))
    sups = np.array([r.sup_statistic for r in rows])
    quantiles = {q: float(np.percentile(sups, q)) for q in (50, 90, 95, 99)}
    return rows, quantiles


def _upper_half_slope(grid: np.ndarray, values: np.ndarray) -> float:
    x = np.log(grid.astype(float))
    keep = (x >= 0.5 * (x[0] + x[-1])) & (values > 0)
    if np.count_nonzero(keep) < 2:
        return 0.0
    return float(np.polyfit(x[keep], np.log(values[keep]), 1)[0])
