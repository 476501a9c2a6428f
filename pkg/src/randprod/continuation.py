"""f(s, θ) in Re s > 1 and its continuation to Re s > 1/2 through −f′/f = F + R₁ − R₂.

F is the Λ-weighted Dirichlet series, R₁ collects the m >= 2 terms of the
Euler-product logarithmic derivative (phases e(mθp)) and R₂ the same terms
with phases e(θp^m). log f is only ever produced by integrating f′/f from an
anchor line where the Euler product converges quickly.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError, InvalidArgument
from .expsums import geometric_grid, trace
from .primes import LambdaTable, sopfr_array
from .quadrature import integrate_segment
from .theta import ThetaSample, compensated_sum, phases

# ψ(x) < 1.03883·x for all x > 0 (Rosser–Schoenfeld)
PSI_RATIO = 1.04
NEAR_ZERO = 1e-8
_CHUNK_ELEMENTS = 2**21


@dataclass(frozen=True)
class SPoint:
    sigma: float
    t: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and math.isfinite(self.t)):
            raise InvalidArgument("s must be finite")

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.t)

    @classmethod
    def parse(cls, text: str) -> "SPoint":
        try:
            sigma, t = (float(x) for x in text.split(","))
        except ValueError as exc:
            raise InvalidArgument(f"expected 'sigma,t', got {text!r}") from exc
        return cls(sigma, t)


@dataclass(frozen=True)
class ContinuationParams:
    n_max: int = 10**6
    p_max: int = 10**6
    cutoff: int = 10**6
    epsilon: float = 0.05
    margin: float = 0.05
    anchor: float = 2.0
    quad_order: int = 16
    quad_tol: float = 1e-9

    @property
    def needed_limit(self) -> int:
        return max(self.n_max, self.p_max, self.cutoff)


class SeriesValue(NamedTuple):
    value: complex
    tail: float
    heuristic: bool = False


@dataclass
class ContinuationResult:
    s: SPoint
    theta: ThetaSample
    log_f: complex
    f: complex
    logderiv: complex
    trunc_error: float
    params: ContinuationParams
    flags: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "s": {"sigma": self.s.sigma, "t": self.s.t},
            "theta": self.theta.label,
            "log_f": [self.log_f.real, self.log_f.imag],
            "f": [self.f.real, self.f.imag],
            "logderiv": [self.logderiv.real, self.logderiv.imag],
            "trunc_error": self.trunc_error,
            "params": asdict(self.params),
            "flags": list(self.flags),
        }


# -- tail estimates --------------------------------------------------------

def lambda_tail(alpha: float, x: float) -> float:
    """Upper bound for Σ_{n>x} Λ(n) n^-alpha (alpha > 1), from ψ(u) <= 1.04u."""
    if alpha <= 1:
        return math.inf
    return PSI_RATIO * alpha * x ** (1.0 - alpha) / (alpha - 1.0)


def euler_tail(sigma: float, p_max: int) -> float:
    """Bound on |log f - log f_P|: Σ_{p>P} 2 p^-σ, valid while P^-σ <= 1/2."""
    return 2.0 * lambda_tail(sigma, p_max) / math.log(p_max)


def f_tail(
    sigma: float, abs_s: float, n_max: int, sup_constant: float, epsilon: float, heuristic_ok: bool = False
) -> tuple[float, bool]:
    """Tail of F beyond n_max and whether it rests on the empirical sup constant.

    For Re s > 1 the ψ-based bound is used unless ``heuristic_ok`` lets the
    (smaller) empirical estimate win; for Re s <= 1 only the empirical
    estimate C·N^(1/2+ε-σ)(1 + |s|/(σ-1/2-ε)) exists.
    """
    gap = sigma - 0.5 - epsilon
    heuristic = sup_constant * n_max ** (-gap) * (1.0 + abs_s / gap) if gap > 0 else math.inf
    if sigma > 1:
        rigorous = lambda_tail(sigma, n_max)
        if not heuristic_ok or rigorous <= heuristic:
            return rigorous, False
    return heuristic, True


def r1_tail(sigma: float, p_max: int) -> float:
    return lambda_tail(2 * sigma, p_max) / (1.0 - p_max ** (-sigma))


def r2_tail(sigma: float, cutoff: int, table: LambdaTable) -> float:
    """Bound on Σ ln p · p^(-mσ) over p^m > cutoff, m >= 2."""
    x = float(cutoff)
    root2 = math.sqrt(x)
    total = lambda_tail(2 * sigma, root2)  # m = 2, p > √x
    root3 = x ** (1.0 / 3.0)
    total += lambda_tail(3 * sigma, root3) / (1.0 - root3 ** (-sigma))  # m >= 3, p > x^(1/3)
    small = table.primes[table.primes <= root3]
    for p in small.tolist():  # m >= 3 with p^m > x, p <= x^(1/3)
        m0 = max(3, int(math.log(x) / math.log(p)) + 1)
        while p**m0 <= x:
            m0 += 1
        q = p ** (-sigma)
        total += math.log(p) * q**m0 / (1.0 - q)
    return total


# -- vectorised kernel -----------------------------------------------------

class _Kernel:
    """Per-(θ, truncation) arrays for evaluating F, R₁, R₂ at many s at once."""

    def __init__(self, table: LambdaTable, theta: ThetaSample, n_max: int, p_max: int, cutoff: int):
        top = max(n_max, p_max, cutoff)
        if top > table.limit:
            raise InvalidArgument(f"truncation {top} exceeds table limit {table.limit}")
        self.n_max, self.p_max, self.cutoff = n_max, p_max, cutoff
        primes = table.primes
        primes = primes[primes <= max(n_max, p_max)]
        self.logp = np.log(primes.astype(float))
        self.phase_p = phases(primes, theta)
        self.n_f_primes = int(np.searchsorted(primes, n_max, side="right"))
        self.n_r1 = int(np.searchsorted(primes, p_max, side="right"))

        sl = table.pp_slice(0, max(n_max, cutoff))
        higher = table.pp_m[sl] >= 2
        hn = table.pp_n[sl][higher]
        hp = table.pp_p[sl][higher]
        self.high_logn = np.log(hn.astype(float))
        self.high_coef = np.log(hp.astype(float)) * phases(hn, theta)
        self.high_in_f = hn <= n_max
        self.high_in_r2 = hn <= cutoff

    def evaluate(self, s: np.ndarray):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        F = np.empty(s.size, dtype=complex)
        R1 = np.empty(s.size, dtype=complex)
        R2 = np.empty(s.size, dtype=complex)
        rows = max(1, _CHUNK_ELEMENTS // max(1, self.logp.size))
        wF = self.logp[: self.n_f_primes] * self.phase_p[: self.n_f_primes]
        for i in range(0, s.size, rows):
            sc = s[i : i + rows, None]
            pw = np.exp(-sc * self.logp)  # p^-s
            F[i : i + rows] = pw[:, : self.n_f_primes] @ wF
            x = self.phase_p[: self.n_r1] * pw[:, : self.n_r1]
            R1[i : i + rows] = (x * x / (1.0 - x)) @ self.logp[: self.n_r1]
            hw = np.exp(-sc * self.high_logn) * self.high_coef
            F[i : i + rows] += hw[:, self.high_in_f].sum(axis=1)
            R2[i : i + rows] = hw[:, self.high_in_r2].sum(axis=1)
        return F, R1, R2

    def anchor_log(self, s: complex) -> complex:
        """-Σ_{p<=p_max} Log(1 - e(θp) p^-s), principal branch per factor."""
        x = self.phase_p[: self.n_r1] * np.exp(-s * self.logp[: self.n_r1])
        return -compensated_sum(np.log1p(-x))


@lru_cache(maxsize=16)
def _kernel(table, theta, n_max, p_max, cutoff) -> _Kernel:
    return _Kernel(table, theta, n_max, p_max, cutoff)


@lru_cache(maxsize=64)
def sup_constant(table: LambdaTable, theta: ThetaSample, n_max: int, epsilon: float) -> float:
    """max over a geometric grid up to n_max of |S_N(θ)| / N^(1/2+ε)."""
    grid = geometric_grid(n_max, start=10)
    tr = trace(theta, grid, table)
    return float(np.max(np.abs(tr.s_values) / grid.astype(float) ** (0.5 + epsilon)))


def _require(sigma: float, bound: float, what: str) -> None:
    if not sigma > bound:
        raise DomainError(f"{what} needs Re s > {bound:g}, got {sigma:g}")


# -- public operations -----------------------------------------------------

def coefficient(n: int, theta: ThetaSample, table: LambdaTable) -> complex:
    """a_n(θ) = e(θ·sopfr(n))."""
    n = table.check(n)
    ell = sopfr_array(n, table)[n] if n > 1 else 0
    return complex(phases(np.array([ell]), theta)[0])


def euler_product(s: SPoint, theta: ThetaSample, p_max: int, table: LambdaTable) -> SeriesValue:
    """∏_{p<=p_max} (1 - e(θp) p^-s)^-1; ``tail`` bounds the error of its logarithm."""
    _require(s.sigma, 1.0, "euler_product")
    if p_max > table.limit or p_max < 2:
        raise InvalidArgument(f"p_max must lie in [2, {table.limit}]")
    k = _kernel(table, theta, p_max, p_max, 2)
    log_val = k.anchor_log(s.s)
    return SeriesValue(complex(np.exp(log_val)), euler_tail(s.sigma, p_max))


def euler_log(s: SPoint, theta: ThetaSample, p_max: int, table: LambdaTable) -> SeriesValue:
    _require(s.sigma, 1.0, "euler_log")
    k = _kernel(table, theta, p_max, p_max, 2)
    return SeriesValue(k.anchor_log(s.s), euler_tail(s.sigma, p_max))


def dirichlet_partial(s: SPoint, theta: ThetaSample, n_max: int, table: LambdaTable) -> complex:
    """Σ_{n<=n_max} a_n(θ) n^-s (raw partial sum)."""
    n_max = table.check(n_max)
    n = np.arange(1, n_max + 1)
    ell = sopfr_array(n_max, table)[1:]
    terms = phases(ell, theta) * np.exp(-s.s * np.log(n.astype(float)))
    return compensated_sum(terms)


def dirichlet_tail(sigma: float, n_max: int) -> float:
    """Σ_{n>n_max} n^-σ <= n_max^(1-σ)/(σ-1)."""
    return n_max ** (1.0 - sigma) / (sigma - 1.0) if sigma > 1 else math.inf


def f_series(
    s: SPoint,
    theta: ThetaSample,
    n_max: int,
    table: LambdaTable,
    sup_const: float | None = None,
    epsilon: float = 0.05,
) -> SeriesValue:
    """Σ_{n<=n_max} Λ(n) e(θn) n^-s with a tail estimate.

    For Re s <= 1 the tail relies on the empirical sup of |S_N|/N^(1/2+ε)
    and is flagged heuristic.
    """
    _require(s.sigma, 0.5, "f_series")
    k = _kernel(table, theta, n_max, 2, 2)
    F, _, _ = k.evaluate(np.array([s.s]))
    if sup_const is None:
        sup_const = sup_constant(table, theta, n_max, epsilon) if s.sigma <= 1 else 0.0
    tail, heuristic = f_tail(s.sigma, abs(s.s), n_max, sup_const, epsilon)
    return SeriesValue(complex(F[0]), tail, heuristic)


def r1_series(s: SPoint, theta: ThetaSample, p_max: int, table: LambdaTable) -> SeriesValue:
    """Σ_{p<=p_max} ln p · x²/(1-x) with x = e(θp) p^-s."""
    _require(s.sigma, 0.5, "r1_series")
    k = _kernel(table, theta, 2, p_max, 2)
    _, R1, _ = k.evaluate(np.array([s.s]))
    return SeriesValue(complex(R1[0]), r1_tail(s.sigma, p_max))


def r2_series(s: SPoint, theta: ThetaSample, cutoff: int, table: LambdaTable) -> SeriesValue:
    """Σ ln p · e(θp^m) p^(-ms) over p^m <= cutoff, m >= 2."""
    _require(s.sigma, 0.5, "r2_series")
    k = _kernel(table, theta, 2, 2, cutoff)
    _, _, R2 = k.evaluate(np.array([s.s]))
    return SeriesValue(complex(R2[0]), r2_tail(s.sigma, cutoff, table))


def _logderiv_tail(
    sigma: float, abs_s: float, theta, params: ContinuationParams, table, heuristic_ok: bool = False
) -> tuple[float, bool]:
    C = sup_constant(table, theta, params.n_max, params.epsilon) if sigma <= 1 or heuristic_ok else 0.0
    ft, heuristic = f_tail(sigma, abs_s, params.n_max, C, params.epsilon, heuristic_ok)
    return ft + r1_tail(sigma, params.p_max) + r2_tail(sigma, params.cutoff, table), heuristic


def log_derivative_many(s_values, theta: ThetaSample, params: ContinuationParams, table: LambdaTable) -> np.ndarray:
    """f′/f = −(F + R₁ − R₂) at an array of points (no error estimate)."""
    k = _kernel(table, theta, params.n_max, params.p_max, params.cutoff)
    F, R1, R2 = k.evaluate(s_values)
    return -(F + R1 - R2)


def log_derivative(s: SPoint, theta: ThetaSample, params: ContinuationParams, table: LambdaTable) -> SeriesValue:
    _require(s.sigma, 0.5, "log_derivative")
    val = log_derivative_many(np.array([s.s]), theta, params, table)[0]
    tail, heuristic = _logderiv_tail(s.sigma, abs(s.s), theta, params, table)
    return SeriesValue(complex(val), tail, heuristic)


def continue_log_f(
    s: SPoint,
    theta: ThetaSample,
    params: ContinuationParams,
    table: LambdaTable,
) -> ContinuationResult:
    """log f(s) = log f(σ₀+it) − ∫_σ^σ₀ (f′/f)(u+it) du with σ₀ = params.anchor."""
    _require(s.sigma, 0.5 + params.margin, "continue_log_f")
    _require(params.anchor, 1.0, "anchor line")
    anchor = SPoint(params.anchor, s.t)
    k = _kernel(table, theta, params.n_max, params.p_max, params.cutoff)
    anchor_log = k.anchor_log(anchor.s)
    error = euler_tail(params.anchor, params.p_max)

    quad = integrate_segment(
        lambda z: log_derivative_many(z, theta, params, table),
        s.s,
        anchor.s,
        tol=params.quad_tol,
        order=params.quad_order,
    )
    log_f = anchor_log - quad.value
    error += quad.error

    # integrate the tail bound of f′/f along the same segment
    lo, hi = sorted((s.sigma, params.anchor))
    heuristic = s.sigma <= 1.0
    if hi > lo:
        x, w = np.polynomial.legendre.leggauss(32)
        us = lo + (hi - lo) * (x + 1) / 2
        # below Re s = 1 the ψ bound diverges near u = 1, so the whole path may use the empirical one
        tails = [_logderiv_tail(u, abs(complex(u, s.t)), theta, params, table, heuristic)[0] for u in us]
        error += (hi - lo) / 2 * float(np.dot(w, tails))

    ld = log_derivative(s, theta, params, table)
    f = complex(np.exp(log_f))
    flags = []
    if heuristic or ld.heuristic:
        flags.append("heuristic_tail")
    if abs(f) < NEAR_ZERO:
        flags.append("near_zero")
    return ContinuationResult(s, theta, complex(log_f), f, ld.value, error, params, flags)


@dataclass
class WindingResult:
    raw: complex
    nearest: int
    quad_error: float
    evaluations: int

    def to_json(self) -> dict:
        return {
            "raw": [self.raw.real, self.raw.imag],
            "nearest": self.nearest,
            "quad_error": self.quad_error,
            "evaluations": self.evaluations,
        }


def winding_number(
    rect: tuple[float, float, float, float],
    theta: ThetaSample,
    grid_step: float,
    params: ContinuationParams,
    table: LambdaTable,
) -> WindingResult:
    """(1/2πi)∮ f′/f ds counter-clockwise around σ1<=σ<=σ2, t1<=t<=t2."""
    s1, s2, t1, t2 = rect
    if not (s1 < s2 and t1 < t2):
        raise InvalidArgument("rectangle needs sigma1 < sigma2 and t1 < t2")
    _require(s1, 0.5 + params.margin, "winding_number")
    if grid_step <= 0:
        raise InvalidArgument("grid step must be positive")
    corners = [complex(s1, t1), complex(s2, t1), complex(s2, t2), complex(s1, t2)]
    total, err, evals = 0j, 0.0, 0
    for a, b in zip(corners, corners[1:] + corners[:1]):
        res = integrate_segment(
            lambda z: log_derivative_many(z, theta, params, table),
            a,
            b,
            tol=params.quad_tol,
            order=params.quad_order,
            initial_panels=max(1, math.ceil(abs(b - a) / grid_step)),
        )
        total += res.value
        err += res.error
        evals += res.evaluations
    raw = total / (2j * math.pi)
    return WindingResult(complex(raw), int(round(raw.real)), err / (2 * math.pi), evals)
