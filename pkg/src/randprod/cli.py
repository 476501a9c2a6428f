"""``randprod`` command line entry point."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys

import numpy as np

from . import __version__
from .continuation import (
    ContinuationParams,
    SPoint,
    continue_log_f,
    dirichlet_partial,
    dirichlet_tail,
    euler_product,
    log_derivative,
    winding_number,
)
from .egk import (
    CONCLUSION_COLUMNS,
    MOMENT_COLUMNS,
    EGKConfig,
    ae_conclusion_scan,
    moment_bound_check,
    moment_monte_carlo,
    moment_row,
    subadditivity_fuzz,
)
from .errors import InvalidArgument, RandprodError, ResourceLimitError
from .experiments import REPORT_COLUMNS, ExperimentConfig, run_campaign, sample_thetas
from .expsums import TRACE_COLUMNS, parse_grid, trace, trace_rows
from .primes import build_lambda_table, chebyshev_psi, prime_count
from .theta import ThetaSample

log = logging.getLogger("randprod")

SCHEMA = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--limit", type=int, default=None, help="sieve limit (default: what the command needs)")
    p.add_argument("--threads", default=None, help="worker count or 'auto' (env RANDPROD_THREADS)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--log-level", default="WARNING")
    p.add_argument("--config", default=None, help="JSON file whose keys override flags")
    return p


def _continuation_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--theta", required=True)
    p.add_argument("--nmax", type=int, default=10**6)
    p.add_argument("--pmax", type=int, default=10**6)
    p.add_argument("--cutoff", type=int, default=10**6)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--margin", type=float, default=0.05)
    p.add_argument("--anchor", type=float, default=2.0)
    p.add_argument("--tol", type=float, default=1e-9)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="randprod", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sieve", parents=[common], help="sieve and print π(L), ψ(L)")
    p.add_argument("--check", action="store_true", help="verify Λ against trial division")

    p = sub.add_parser("sum-scan", parents=[common], help="trace S_N(θ) and ℭ(N) along a grid")
    p.add_argument("--theta", required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--grid", default=None, help="geometric:r or list:a,b,c")

    p = sub.add_parser("egk", parents=[common], help="Erdős–Gál–Koksma harness")
    egk = p.add_subparsers(dest="egk_command", required=True, parser_class=_Parser)
    q = egk.add_parser("moments", parents=[common])
    q.add_argument("--cells", required=True, help="JSON list of [M, N] pairs")
    q.add_argument("--samples", type=int, default=10_000)
    q.add_argument("--seed", type=int, default=0)
    q = egk.add_parser("fuzz", parents=[common])
    q.add_argument("--trials", type=int, default=10_000)
    q.add_argument("--ncap", type=int, default=10_000)
    q.add_argument("--seed", type=int, default=0)
    q = egk.add_parser("scan", parents=[common])
    q.add_argument("--thetas", type=int, default=100)
    q.add_argument("--seed", type=int, default=1)
    q.add_argument("--nmax", type=int, default=10**6)
    q.add_argument("--epsilon", type=float, default=0.1)
    q.add_argument("--grid", default=None)

    p = sub.add_parser("eval", parents=[common], help="f(s,θ) for Re s > 1")
    p.add_argument("--s", required=True, help="sigma,t")
    _continuation_flags(p)

    p = sub.add_parser("continue", parents=[common], help="continue log f into Re s > 1/2")
    p.add_argument("--s", required=True, help="sigma,t")
    _continuation_flags(p)

    p = sub.add_parser("winding", parents=[common], help="winding number of f around a rectangle")
    p.add_argument("--rect", required=True, help="sigma1,sigma2,t1,t2")
    p.add_argument("--step", type=float, default=1.0)
    _continuation_flags(p)

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo growth-exponent campaign")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--thetas", type=int, default=100)
    p.add_argument("--nmax", type=int, default=10**6)
    p.add_argument("--controls", default="0,1/2,1/3,2/5")
    p.add_argument("--grid", default=None)
    p.add_argument("--epsilon", type=float, default=0.1)
    return parser


# -- helpers ---------------------------------------------------------------

def _apply_config(args: argparse.Namespace) -> None:
    if not args.config:
        return
    try:
        with open(args.config) as fh:
            overrides = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidArgument(f"cannot read config {args.config!r}: {exc}") from exc
    if not isinstance(overrides, dict):
        raise InvalidArgument("config file must hold a JSON object")
    for key, value in overrides.items():
        dest = key.replace("-", "_")
        if dest in ("command", "egk_command") or not hasattr(args, dest):
            raise InvalidArgument(f"unknown config key {key!r}")
        setattr(args, dest, value)


def _threads(args) -> int:
    raw = args.threads or os.environ.get("RANDPROD_THREADS") or "1"
    if str(raw) == "auto":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise InvalidArgument(f"bad thread count {raw!r}") from exc
    if n < 1:
        raise InvalidArgument("threads must be >= 1")
    return n


def _table(args, needed: int):
    limit = args.limit if args.limit is not None else needed
    if limit < needed:
        raise InvalidArgument(f"--limit {limit} is below the {needed} this command needs")
    return build_lambda_table(max(limit, 2))


def _params(args) -> ContinuationParams:
    return ContinuationParams(
        n_max=args.nmax,
        p_max=args.pmax,
        cutoff=args.cutoff,
        epsilon=args.epsilon,
        margin=args.margin,
        anchor=args.anchor,
        quad_tol=args.tol,
    )


def _cplx(z: complex) -> list[float]:
    return [z.real, z.imag]


def _flatten(prefix: str, value, out: dict) -> None:
    """Flatten nested JSON-ish output into one CSV row (complex pairs -> _re/_im)."""
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}{k}" if not prefix else f"{prefix}_{k}", v, out)
    elif isinstance(value, list) and len(value) == 2 and all(isinstance(x, float) for x in value):
        out[f"{prefix}_re"] = value[0]
        out[f"{prefix}_im"] = value[1]
    elif isinstance(value, list):
        out[prefix] = ";".join(str(x) for x in value)
    else:
        out[prefix] = value


def _write(args, text: str) -> None:
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)


def _emit_rows(args, rows: list[dict], columns, default: str = "csv", meta: dict | None = None) -> None:
    fmt = args.format or default
    if fmt == "json":
        doc = {"schema": SCHEMA, **(meta or {}), "rows": rows}
        _write(args, json.dumps(doc, indent=2) + "\n")
        return
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA}\n")
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: _fmt(r[c]) for c in columns})
    for k, v in (meta or {}).items():
        buf.write(f"# {k}={v}\n")
    _write(args, buf.getvalue())


def _emit_doc(args, doc: dict, default: str = "json") -> None:
    fmt = args.format or default
    if fmt == "json":
        _write(args, json.dumps({"schema": SCHEMA, **doc}, indent=2) + "\n")
        return
    flat: dict = {}
    _flatten("", doc, flat)
    _emit_rows(args, [flat], list(flat))


def _fmt(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else v


# -- commands --------------------------------------------------------------

def cmd_sieve(args) -> None:
    limit = args.limit if args.limit is not None else 100
    table = build_lambda_table(limit)
    doc = {"limit": limit, "pi": prime_count(limit, table), "psi": chebyshev_psi(limit, table)}
    if args.check:
        doc["check"] = "ok" if _trial_division_check(table, min(limit, 10**5)) else "FAILED"
    if (args.format or "text") == "text":
        _write(args, " ".join(f"{k}={v}" for k, v in doc.items()) + "\n")
    else:
        _emit_doc(args, doc)
    if doc.get("check") == "FAILED":
        raise RandprodError("sieve check failed")


def _trial_division_check(table, upto: int) -> bool:
    for n in range(1, upto + 1):
        m, p, lam = n, 2, 0.0
        while p * p <= m and m % p:
            p += 1
        if n > 1:
            if m % p:
                p = m  # n itself is prime
            while m % p == 0:
                m //= p
            lam = math.log(p) if m == 1 else 0.0
        if lam != table.mangoldt(n):
            log.error("Λ(%d) mismatch", n)
            return False
    return True


def cmd_sum_scan(args) -> None:
    theta = ThetaSample.parse(args.theta)
    table = _table(args, args.nmax)
    grid = parse_grid(args.grid, args.nmax)
    _emit_rows(args, trace_rows(trace(theta, grid, table)), TRACE_COLUMNS)


def _load_cells(path: str) -> list[tuple[int, int]]:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidArgument(f"cannot read cells {path!r}: {exc}") from exc
    cells = []
    for c in raw:
        if isinstance(c, dict):
            cells.append((int(c["M"]), int(c["N"])))
        else:
            cells.append((int(c[0]), int(c[1])))
    return cells


def cmd_egk(args) -> None:
    if args.egk_command == "moments":
        cells = _load_cells(args.cells)
        table = _table(args, max([m + n for m, n in cells] + [2]))
        cfg = EGKConfig(mc_samples=args.samples, seed=args.seed)
        rows = []
        for i, (M, N) in enumerate(cells):
            rep = moment_monte_carlo(M, N, cfg, table, stream_offset=i * cfg.mc_samples)
            row = moment_row(rep)
            row["ok"] = str(rep.ok and moment_bound_check(M, N, table)).lower()
            rows.append(row)
        _emit_rows(args, rows, MOMENT_COLUMNS)
    elif args.egk_command == "fuzz":
        table = _table(args, args.ncap)
        worst = subadditivity_fuzz(args.trials, args.ncap, args.seed, table)
        doc = {"trials": args.trials, "ncap": args.ncap, "seed": args.seed, "max_violation": worst,
               "ok": worst <= 1e-10}
        _emit_doc(args, doc)
    else:
        table = _table(args, args.nmax)
        cfg = EGKConfig(epsilon=args.epsilon, seed=args.seed)
        thetas = [ThetaSample.rational(0, 1)] + sample_thetas(args.thetas, args.seed)
        rows, quantiles = ae_conclusion_scan(thetas, parse_grid(args.grid, args.nmax), cfg, table)
        out = [
            {"theta": r.theta.label, "sup_statistic": r.sup_statistic, "growth": r.growth,
             "flags": ";".join((["control"] if i == 0 else []) + r.flags)}
            for i, r in enumerate(rows)
        ]
        meta = {f"p{q}": v for q, v in quantiles.items()}
        _emit_rows(args, out, CONCLUSION_COLUMNS, meta=meta)


def cmd_eval(args) -> None:
    s = SPoint.parse(args.s)
    theta = ThetaSample.parse(args.theta)
    params = _params(args)
    table = _table(args, params.needed_limit)
    ep = euler_product(s, theta, args.pmax, table)
    dp = dirichlet_partial(s, theta, args.nmax, table)
    ld = log_derivative(s, theta, params, table)
    doc = {
        "s": {"sigma": s.sigma, "t": s.t},
        "theta": theta.label,
        "f": _cplx(ep.value),
        "log_tail_bound": ep.tail,
        "dirichlet_partial": _cplx(dp),
        "dirichlet_tail_bound": dirichlet_tail(s.sigma, args.nmax),
        "logderiv": _cplx(ld.value),
        "logderiv_tail": ld.tail,
        "params": {"n_max": args.nmax, "p_max": args.pmax, "cutoff": args.cutoff},
    }
    _emit_doc(args, doc)


def cmd_continue(args) -> None:
    s = SPoint.parse(args.s)
    theta = ThetaSample.parse(args.theta)
    params = _params(args)
    table = _table(args, params.needed_limit)
    _emit_doc(args, continue_log_f(s, theta, params, table).to_json())


def cmd_winding(args) -> None:
    try:
        rect = tuple(float(x) for x in args.rect.split(","))
    except ValueError as exc:
        raise InvalidArgument(f"bad rectangle {args.rect!r}") from exc
    if len(rect) != 4:
        raise InvalidArgument("rectangle needs sigma1,sigma2,t1,t2")
    theta = ThetaSample.parse(args.theta)
    params = _params(args)
    table = _table(args, params.needed_limit)
    res = winding_number(rect, theta, args.step, params, table)
    doc = {"rect": list(rect), "theta": theta.label, **res.to_json()}
    _emit_doc(args, doc)


def _parse_controls(text: str) -> tuple[tuple[int, int], ...]:
    out = []
    for item in filter(None, (x.strip() for x in text.split(","))):
        th = ThetaSample.parse(item)
        if th.kind == "rational":
            out.append((th.a, th.q))
        elif th.value == 0.0:
            out.append((0, 1))
        else:
            raise InvalidArgument(f"control {item!r} must be rational a/q")
    return tuple(out)


def cmd_mc(args) -> None:
    cfg = ExperimentConfig(
        seed=args.seed,
        theta_count=args.thetas,
        n_max=args.nmax,
        grid=args.grid,
        epsilon=args.epsilon,
        controls=_parse_controls(args.controls),
    )
    table = _table(args, cfg.n_max)
    result = run_campaign(cfg, table, threads=_threads(args))
    if (args.format or "csv") == "csv":
        _write(args, result.to_csv())
    else:
        rows = [r.row() for r in result.reports]
        doc = {"schema": SCHEMA, "rows": rows, "fit_window": list(result.fit_window),
               "summary": {k: {f"p{q}": v for q, v in d.items()} for k, d in result.summary.items()}}
        _write(args, json.dumps(doc, indent=2) + "\n")


COMMANDS = {
    "sieve": cmd_sieve,
    "sum-scan": cmd_sum_scan,
    "egk": cmd_egk,
    "eval": cmd_eval,
    "continue": cmd_continue,
    "winding": cmd_winding,
    "mc": cmd_mc,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        _apply_config(args)
        COMMANDS[args.command](args)
    except RandprodError as exc:
        print(f"randprod: {exc}", file=sys.stderr)
        return exc.exit_code
    except MemoryError:
        print("randprod: out of memory", file=sys.stderr)
        return ResourceLimitError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
