"""Command-line front end: ``fbmbounds {bounds,mu,omega,validate,figure}``.

Exit codes: 0 success, 1 validation failure, 2 I/O error, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import bounds as bd
from . import mc
from .errors import DomainError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_USAGE = 64

H_MIN, H_MAX = 1e-6, 1.0 - 1e-6
COMMANDS = ("bounds", "mu", "omega", "validate", "figure")
FIGURES = ("all-bounds", "mu-compare", "ratio")

BOUNDS_COLUMNS = ["H", "L1", "L2", "L3", "L", "U1", "U2", "U2_sudakov", "U2_circ", "U", "ratio"]


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if not self.step > 0.0:
            raise UsageError(f"grid step must be positive, got {self.step}")
        if not 0.0 < self.start <= self.stop < 1.0:
            raise UsageError(f"grid needs 0 < start <= stop < 1, got {self.start}:{self.stop}")

    @classmethod
    def parse(cls, text: str, warnings: Optional[list] = None) -> "GridSpec":
        """Parse start:stop:step; endpoints outside [1e-6, 1 - 1e-6] are clamped."""
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"--h-grid expects start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise UsageError(f"--h-grid expects numbers, got {text!r}") from None
        if not step > 0.0:
            raise UsageError(f"grid step must be positive, got {step}")
        warnings = [] if warnings is None else warnings
        start, stop = _clamp(start, warnings), _clamp(stop, warnings)
        return cls(start, stop, step)

    def values(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + i * self.step, 12) for i in range(n)]


@dataclass
class RunConfig:
    command: str
    hs: list[float]
    seed: int = 0
    paths: int = mc.DEFAULT_PATHS
    steps: int = mc.DEFAULT_STEPS
    output_path: Optional[str] = None
    format: str = "csv"
    which: Optional[str] = None
    drift: float = 2.0
    alpha: Optional[float] = None
    c_half: float = bd.MU_HALF_DEFAULT
    workers: int = 1
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.paths < 2 or self.steps < 2:
            raise UsageError("--paths and --steps must be at least 2")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else repr(value)
    return value


def render_csv(columns: Sequence[str], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def render_json(columns: Sequence[str], rows: Iterable[dict], meta: dict) -> str:
    doc = {
        "meta": [{"key": k, "value": _json_value(v)} for k, v in meta.items()],
        "rows": [{c: _json_value(row.get(c)) for c in columns} for row in rows],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def emit(config: RunConfig, columns: Sequence[str], rows: list[dict], meta: dict) -> None:
    meta = {"command": config.command, **meta}
    for i, w in enumerate(config.warnings):
        meta[f"warning_{i}"] = w
    if config.format == "json":
        text = render_json(columns, rows, meta)
    else:
        text = render_csv(columns, rows)
        for w in config.warnings:
            print(f"warning: {w}", file=sys.stderr)
    if config.output_path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# table builders
# ---------------------------------------------------------------------------

def bounds_row(h: float, c_half: float = bd.MU_HALF_DEFAULT) -> dict:
    r = bd.combined_bounds(h, c_half=c_half)
    return {
        "H": h, "L1": r.l1, "L2": r.l2, "L3": r.l3, "L": r.lower_combined,
        "U1": r.u1, "U2": r.u2, "U2_sudakov": r.u2_sudakov, "U2_circ": r.u2_circ,
        "U": r.upper_combined, "ratio": r.ratio,
    }


def _require_sub_grid(config: RunConfig, what: str) -> None:
    bad = [h for h in config.hs if h > 0.5]
    if bad:
        raise UsageError(f"{what} is defined on (0, 1/2] only; got H={bad[0]}")


def run_bounds(config: RunConfig) -> int:
    rows = []
    for h in config.hs:
        try:
            rows.append(bounds_row(h, config.c_half))
        except OverflowError as exc:
            config.warnings.append(f"H={h}: {exc}")
            rows.append({"H": h})
    emit(config, BOUNDS_COLUMNS, rows, {"mu_half": config.c_half})
    return EXIT_OK


def run_mu(config: RunConfig) -> int:
    _require_sub_grid(config, "mu")
    columns = ["H", "alpha", "lower", "upper_borovkov", "upper_sudakov", "upper_combined"]
    rows = []
    for h in config.hs:
        alphas = [config.alpha] if config.alpha is not None else [1.0, 1.0 / (1.0 - h)]
        for a in alphas:
            m = bd.mu_bounds(h, a, c_half=config.c_half)
            rows.append({
                "H": h, "alpha": a, "lower": m.lower, "upper_borovkov": m.upper_borovkov,
                "upper_sudakov": m.upper_sudakov, "upper_combined": m.upper_combined,
            })
    emit(config, columns, rows, {"mu_half": config.c_half})
    return EXIT_OK


def run_omega(config: RunConfig) -> int:
    _require_sub_grid(config, "omega")
    columns = ["H", "omega", "branch", "omega0", "omega1", "omega2", "tau_circ"]
    rows = []
    for h in config.hs:
        o = bd.omega(h)
        rows.append({
            "H": h, "omega": o.omega, "branch": o.branch.value, "omega0": o.omega0,
            "omega1": o.omega1, "omega2": o.omega2, "tau_circ": o.tau_circ,
        })
    emit(config, columns, rows, {"H0": bd.h_zero()})
    return EXIT_OK


def run_figure(config: RunConfig) -> int:
    which = config.which or "all-bounds"
    if which not in FIGURES:
        raise UsageError(f"--which must be one of {', '.join(FIGURES)}")
    if which == "all-bounds":
        return run_bounds(config)
    _require_sub_grid(config, f"figure {which}")
    if which == "mu-compare":
        columns = ["H", "borovkov", "sudakov", "combined"]
        rows = []
        for h in config.hs:
            b = bd.mu_one_upper_borovkov(h)
            s = bd.mu_one_upper_sudakov(h, c_half=config.c_half)
            rows.append({"H": h, "borovkov": b, "sudakov": s, "combined": min(b, s)})
    else:
        columns = ["H", "ratio"]
        rows = [{"H": h, "ratio": bd.combined_bounds(h, c_half=config.c_half).ratio} for h in config.hs]
    emit(config, columns, rows, {"figure": which, "mu_half": config.c_half})
    return EXIT_OK


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

VALIDATE_COLUMNS = ["check", "H", "estimate", "std_error", "lo", "hi", "passed", "detail"]


def _check(name: str, h: float, estimate: float, se: float, lo: float, hi: float, detail: str = "") -> dict:
    passed = bool(lo <= estimate <= hi)
    return {"check": name, "H": h, "estimate": estimate, "std_error": se, "lo": lo, "hi": hi,
            "passed": passed, "detail": detail}


def lag_one_correlation(h: float, steps: int, paths: int, seed: int) -> tuple[float, float]:
    """Mean and standard error of the per-path lag-1 fGn correlation (unit spacing)."""
    spec = mc.SamplerSpec(bd.Hurst(h), steps, 1.0)
    stats = mc.Moments()
    size = 256
    for first in range(0, paths, size):
        x = mc.fgn_batch(spec, first, min(size, paths - first), seed)
        stats = stats.merge(mc.Moments.of((x[:, :-1] * x[:, 1:]).mean(axis=1)))
    return stats.mean, stats.std_error


def endpoint_variance(h: float, steps: int, paths: int, seed: int) -> tuple[float, float]:
    """Sample variance of B_H(1) and its standard error sqrt(2/(n-1))·s² (Gaussian)."""
    res = mc.estimate_mu_moment(h, 1.0, steps, paths, seed)
    var = res.meta["endpoint_variance"]
    return var, var * math.sqrt(2.0 / (paths - 1))


def scaled_unit_horizon(h: float, c: float, horizon: float) -> float:
    """Horizon for drift 1 whose grid maps onto [0, horizon] at drift c under self-similarity."""
    return horizon * c ** (1.0 / (1.0 - h))


def validation_checks(h: float, config: RunConfig) -> list[dict]:
    seed, paths, steps, workers = config.seed, config.paths, config.steps, config.workers
    rows = []

    sup = mc.estimate_sup_auto(h, 1.0, steps, paths, seed, workers=workers)
    b = bd.combined_bounds(h, c_half=config.c_half)
    rows.append(_check(
        "bound_sandwich", h, sup.estimate, sup.std_error,
        b.lower_combined - 3 * sup.std_error, b.upper_combined + 3 * sup.std_error,
        f"horizon={sup.horizon}",
    ))

    if h == 0.5:
        exact = mc.adaptive_horizon(
            h, 1.0, mc.DEFAULT_BASE_HORIZON, max(steps // 4, 1), paths, seed + 11, workers=workers
        )
        rows.append(_check(
            "brownian_exact_mean", h, exact.estimate, exact.std_error,
            0.5 - 3 * exact.std_error, 0.5 + 3 * exact.std_error, f"horizon={exact.horizon}",
        ))
        mu_half = mc.estimate_mu_moment(h, 1.0, max(steps, 1 << 16), paths, seed + 12)
        rows.append(_check(
            "mu_half_reflection", h, mu_half.estimate, mu_half.std_error,
            bd.MU_HALF_REFLECTION - 3 * mu_half.std_error - 0.02,
            bd.MU_HALF_REFLECTION + 3 * mu_half.std_error + 0.02,
            f"sqrt(pi/2)={bd.MU_HALF_LITERAL!r} is outside the interval when this passes",
        ))

    u = 1.0
    lam = bd.lambda_u(u, h)
    tail_h = 200.0 if h > 0.5 else 50.0
    tail = mc.estimate_timechanged_tail(h, u, tail_h, steps, paths, seed + 13, workers=workers)
    scaled, scaled_se = lam * tail.estimate, lam * tail.std_error
    upper = 1.0 if h >= 0.5 else 2.0
    rows.append(_check(
        "timechanged_tail", h, scaled, scaled_se,
        2.0 - 2.0 * h - 3 * scaled_se, upper + 3 * scaled_se, f"lambda={lam!r}, P={tail.estimate!r}",
    ))

    small = min(steps, 1 << 10)
    var, var_se = endpoint_variance(h, small, max(paths, 10000), seed + 14)
    rows.append(_check("endpoint_variance", h, var, var_se, 1 - 5 * var_se, 1 + 5 * var_se))

    rho, rho_se = lag_one_correlation(h, small, paths, seed + 15)
    target = 2.0 ** (2.0 * h - 1.0) - 1.0
    rows.append(_check("lag1_correlation", h, rho, rho_se, target - 5 * rho_se, target + 5 * rho_se,
                       f"target={target!r}"))

    c = config.drift
    horizon_c = 16.0
    at_c = mc.estimate_sup_drift(h, c, horizon_c, min(steps, 1 << 14), paths, seed + 16, workers=workers)
    at_one = mc.estimate_sup_drift(
        h, 1.0, scaled_unit_horizon(h, c, horizon_c), min(steps, 1 << 14), paths, seed + 17, workers=workers
    )
    rescaled = bd.drift_rescale(h, c, at_one.estimate)
    factor = bd.drift_rescale(h, c, 1.0)
    se = math.hypot(at_c.std_error, factor * at_one.std_error)
    rows.append(_check("self_similarity", h, at_c.estimate, se, rescaled - 3 * se, rescaled + 3 * se,
                       f"drift={c!r}"))
    return rows


def run_validate(config: RunConfig) -> int:
    rows = []
    for h in config.hs:
        try:
            rows.extend(validation_checks(h, config))
        except (ArithmeticError, RuntimeError, ValueError) as exc:
            rows.append({"check": "error", "H": h, "passed": False, "detail": f"{type(exc).__name__}: {exc}"})
    ok = all(r["passed"] for r in rows)
    emit(config, VALIDATE_COLUMNS, rows, {"seed": config.seed, "paths": config.paths, "steps": config.steps,
                                          "all_passed": ok})
    return EXIT_OK if ok else EXIT_VALIDATION


RUNNERS = {
    "bounds": run_bounds,
    "mu": run_mu,
    "omega": run_omega,
    "validate": run_validate,
    "figure": run_figure,
}

DEFAULT_GRIDS = {
    "bounds": "0.01:0.99:0.01",
    "mu": "0.01:0.5:0.01",
    "omega": "0.01:0.5:0.01",
    "validate": None,
    "figure": None,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fbmbounds", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    where = parser.add_mutually_exclusive_group()
    where.add_argument("--h", type=float, help="single Hurst parameter")
    where.add_argument("--h-grid", help="start:stop:step")
    parser.add_argument("--paths", type=int, default=mc.DEFAULT_PATHS)
    parser.add_argument("--steps", type=int, default=mc.DEFAULT_STEPS)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="output file (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--which", choices=FIGURES, default=None)
    parser.add_argument("--drift", type=float, default=2.0, help="drift used by the self-similarity check")
    parser.add_argument("--alpha", type=float, default=None, help="moment order for the mu command")
    parser.add_argument("--mu-half", choices=("reflection", "literal"), default="reflection",
                        help="E sup_[0,1] of Brownian motion used by the Sudakov bounds")
    parser.add_argument("--workers", type=int, default=1)
    return parser


def _clamp(h: float, warnings: list[str]) -> float:
    if h < H_MIN or h > H_MAX:
        clamped = min(max(h, H_MIN), H_MAX)
        warnings.append(f"H={h!r} clamped to {clamped!r}")
        return clamped
    return h


def config_from_args(args: argparse.Namespace) -> RunConfig:
    warnings: list[str] = []
    if args.h is not None:
        if not 0.0 < args.h < 1.0:
            raise UsageError(f"--h must lie in (0, 1), got {args.h}")
        hs = [args.h]
    else:
        default = DEFAULT_GRIDS[args.command]
        if args.command == "figure":
            default = "0.01:0.99:0.01" if (args.which or "all-bounds") == "all-bounds" else "0.005:0.5:0.005"
        text = args.h_grid or default
        hs = [0.5] if text is None else GridSpec.parse(text, warnings).values()
    hs = [_clamp(h, warnings) for h in hs]
    if args.drift <= 0.0:
        raise UsageError("--drift must be positive")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    if args.alpha is not None and args.alpha < 1.0:
        raise UsageError("--alpha must be >= 1")
    return RunConfig(
        command=args.command,
        hs=hs,
        seed=args.seed,
        paths=args.paths,
        steps=args.steps,
        output_path=args.out,
        format=args.format,
        which=args.which,
        drift=args.drift,
        alpha=args.alpha,
        c_half=bd.MU_HALF_REFLECTION if args.mu_half == "reflection" else bd.MU_HALF_LITERAL,
        workers=args.workers,
        warnings=warnings,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        return RUNNERS[config.command](config)
    except (UsageError, DomainError) as exc:
        print(f"fbmbounds: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"fbmbounds: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
