"""Seeded campaigns over θ measuring how fast |S_N(θ)| grows."""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import FitError, InvalidArgument
from .expsums import SumTrace, parse_grid, trace
from .primes import LambdaTable
from .theta import ThetaSample, uniform

PERCENTILES = (50, 90, 95, 99)
REPORT_COLUMNS = ("kind", "theta", "a", "q", "sup_normalized", "exponent_fit", "flags")
MIN_FIT_POINTS = 4


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 1
    theta_count: int = 100
    n_max: int = 10**6
    grid: str | None = None
    epsilon: float = 0.1
    controls: tuple[tuple[int, int], ...] = ((0, 1), (1, 2), (1, 3), (2, 5))

    def __post_init__(self):
        if self.theta_count < 1:
            raise InvalidArgument("theta_count must be >= 1")
        if self.n_max < 2:
            raise InvalidArgument("n_max must be >= 2")
        for a, q in self.controls:
            if q < 1 or not 0 <= a < q:
                raise InvalidArgument(f"control {a}/{q} needs q >= 1 and 0 <= a < q")


@dataclass
class ThetaReport:
    kind: str
    theta: ThetaSample
    sup_normalized: float
    exponent_fit: float
    flags: list[str] = field(default_factory=list)

    def row(self) -> dict:
        rational = self.theta.kind == "rational"
        return {
            "kind": self.kind,
            "theta": repr(self.theta.value),
            "a": self.theta.a if rational else "",
            "q": self.theta.q if rational else "",
            "sup_normalized": repr(self.sup_normalized),
            "exponent_fit": repr(self.exponent_fit),
            "flags": ";".join(self.flags),
        }


@dataclass
class CampaignResult:
    config: ExperimentConfig
    reports: list[ThetaReport]
    summary: dict[str, dict[int, float]]
    fit_window: tuple[int, int]

    @property
    def random_reports(self) -> list[ThetaReport]:
        return [r for r in self.reports if r.kind == "random"]

    @property
    def control_reports(self) -> list[ThetaReport]:
        return [r for r in self.reports if r.kind == "control"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# schema=1\n")
        buf.write(",".join(REPORT_COLUMNS) + "\n")
        for r in self.reports:
            row = r.row()
            buf.write(",".join(str(row[c]) for c in REPORT_COLUMNS) + "\n")
        cfg = self.config
        buf.write(f"# seed={cfg.seed} thetas={cfg.theta_count} n_max={cfg.n_max} grid={cfg.grid or 'geometric'}\n")
        buf.write(f"# fit_window={self.fit_window[0]}..{self.fit_window[1]}\n")
        for stat, qs in self.summary.items():
            body = " ".join(f"p{q}={v!r}" for q, v in qs.items())
            buf.write(f"# {stat} {body}\n")
        return buf.getvalue()


def sample_thetas(count: int, seed: int) -> list[ThetaSample]:
    if count < 1:
        raise InvalidArgument("count must be >= 1")
    values = uniform(seed, 0, count)
    return [ThetaSample(float(v), "seeded", seed=seed, index=i) for i, v in enumerate(values)]


def fit_window(checkpoints: np.ndarray) -> np.ndarray:
    """Mask selecting the upper half (in ln N) of a checkpoint grid."""
    x = np.log(np.asarray(checkpoints, dtype=float))
    return x >= 0.5 * (x[0] + x[-1])


def exponent_fit(tr: SumTrace) -> float:
    """Least-squares slope of ln|S_N| against ln N over the upper half of the grid."""
    mag = np.abs(tr.s_values)
    keep = fit_window(tr.checkpoints) & (mag > 0)
    if np.count_nonzero(keep) < MIN_FIT_POINTS:
        raise FitError(f"need >= {MIN_FIT_POINTS} usable checkpoints in the fit window")
    x = np.log(tr.checkpoints[keep].astype(float))
    y = np.log(mag[keep])
    slope = np.polyfit(x, y, 1)[0]
    if not math.isfinite(slope):
        raise FitError("exponent fit is not finite")
    return float(slope)


def theta_report(kind: str, theta: ThetaSample, grid: np.ndarray, table: LambdaTable) -> ThetaReport:
    tr = trace(theta, grid, table)
    norm = tr.normalized
    flags = ["control"] if kind == "control" else []
    if norm[-1] > 1.0:
        flags.append("exceeds_envelope")
    return ThetaReport(kind, theta, float(norm.max()), exponent_fit(tr), flags)


def run_campaign(cfg: ExperimentConfig, table: LambdaTable, threads: int = 1) -> CampaignResult:
    if cfg.n_max > table.limit:
        raise InvalidArgument(f"n_max {cfg.n_max} exceeds table limit {table.limit}")
    grid = parse_grid(cfg.grid, cfg.n_max)
    jobs = [("random", th) for th in sample_thetas(cfg.theta_count, cfg.seed)]
    jobs += [("control", ThetaSample.rational(a, q)) for a, q in cfg.controls]

    def work(job):
        return theta_report(job[0], job[1], grid, table)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(work, jobs))
    else:
        reports = [work(j) for j in jobs]

    rnd = [r for r in reports if r.kind == "random"]
    summary = {
        "sup_normalized": _percentiles([r.sup_normalized for r in rnd]),
        "exponent_fit": _percentiles([r.exponent_fit for r in rnd]),
    }
    window = grid[fit_window(grid)]
    return CampaignResult(cfg, reports, summary, (int(window[0]), int(window[-1])))


def _percentiles(values) -> dict[int, float]:
    arr = np.asarray(values, dtype=float)
    return {q: float(np.percentile(arr, q)) for q in PERCENTILES}
