"""Config ingestion, SNR sweeps, pre-loglog slope fits and output emission.

This module only orchestrates the bound evaluators and oracles; it never
re-derives a formula.  Sweep outputs are deterministic functions of the
config (grid points are independent and evaluated in grid order), so two
runs with the same config and seed produce byte-identical files.

Config files are JSON with a versioned ``schema`` field; unknown keys are
rejected everywhere, and user-facing SNR/power values are base-10 logs
(converted to nats internally).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .channel import ChannelConfig, config_from_dict, config_to_dict, snr_of
from .converse import BoundParams, ConstEps, ConverseStats, upper_bound
from .direct import (
    DirectStats,
    LogUniformX2,
    build_scheme,
    lemma_mi_lower_bound,
    log_block_average_power,
    lower_bound,
    optimize_tau,
    schedule_is_valid,
)
from .fading import ZeroPath, entropy_rate_szego, spectral_density, stats_of
from .oracle import (
    CheckReport,
    default_workers,
    mc_block_power,
    mc_log_gain,
    mi_scalar_gaussian,
    verify_log_moment_bounds,
)

SCHEMA_VERSION = 1
LOG10 = math.log(10.0)
CSV_HEADER = "log_snr,upper,lower,tau_star,loglog_snr,ratio_upper,ratio_lower"

# JSON sweep output: an array of per-grid-point objects with exactly these keys.
OUTPUT_SCHEMA = {
    "type": "array",
    "minItems": 1,
    "items": {
        "type": "object",
        "properties": {
            "log_snr": {"type": "number"},
            "upper": {"type": "number"},
            "lower": {"type": "number"},
            "tau_star": {"type": "integer", "minimum": 1},
            "loglog_snr": {"type": "number"},
            "ratio_upper": {"type": "number"},
            "ratio_lower": {"type": "number"},
        },
        "required": [
            "log_snr",
            "upper",
            "lower",
            "tau_star",
            "loglog_snr",
            "ratio_upper",
            "ratio_lower",
        ],
        "additionalProperties": False,
    },
}

CONFIG_KEYS = {"schema", "channel", "bounds", "grid", "tau", "tau_max", "seed", "output_format"}
BOUNDS_KEYS = {"delta", "eta", "eps_const", "xi"}
GRID_KEYS = {"log10_snr_start", "log10_snr_stop", "points"}


@dataclass(frozen=True)
class GridSpec:
    """A base-10 logarithmic SNR grid."""

    log10_snr_start: float
    log10_snr_stop: float
    points: int

    def __post_init__(self) -> None:
        if not self.log10_snr_start < self.log10_snr_stop:
            raise ValueError("grid start must lie below grid stop")
        if self.points < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.points}")

    def log_snr_values(self) -> np.ndarray:
        """Grid in nats of log-SNR, ascending."""
        return np.linspace(self.log10_snr_start, self.log10_snr_stop, self.points) * LOG10


@dataclass(frozen=True)
class SweepConfig:
    channel: ChannelConfig
    bound_params: BoundParams
    grid: GridSpec
    tau_max: int
    seed: int
    output_format: str
    tau: Optional[int] = None  # fixed block length; None searches 1..tau_max

    def __post_init__(self) -> None:
        if self.tau_max < 1:
            raise ValueError(f"tau_max must be >= 1, got {self.tau_max}")
        if self.tau is not None and self.tau < 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"output format must be 'csv' or 'json', got {self.output_format!r}")


@dataclass(frozen=True)
class SweepPoint:
    """One evaluated grid point (all rate quantities in nats per channel use)."""

    log_snr: float
    upper: float
    lower: float
    tau_star: int
    loglog_snr: float
    ratio_upper: float
    ratio_lower: float

    def to_dict(self) -> dict:
        return {
            "log_snr": self.log_snr,
            "upper": self.upper,
            "lower": self.lower,
            "tau_star": self.tau_star,
            "loglog_snr": self.loglog_snr,
            "ratio_upper": self.ratio_upper,
            "ratio_lower": self.ratio_lower,
        }


def _reject_unknown(data: dict, allowed: set, where: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown keys {sorted(unknown)} in {where} (allowed: {sorted(allowed)})")


def bound_params_from_dict(data: dict) -> BoundParams:
    _reject_unknown(data, BOUNDS_KEYS, "bounds")
    eps_const = float(data.get("eps_const", 0.0))
    xi = data.get("xi", None)
    params = BoundParams() if eps_const == 0.0 else BoundParams(eps=ConstEps(eps_const))
    return BoundParams(
        delta=float(data.get("delta", 1.0)),
        eta=float(data.get("eta", 0.5)),
        eps=params.eps,
        xi_override=None if xi is None else float(xi),
        constants_certified=False,
    )


def bound_params_to_dict(params: BoundParams) -> dict:
    return {
        "delta": params.delta,
        "eta": params.eta,
        "eps_const": params.eps(params.delta, params.eta),
        "xi": params.xi_override,
    }


def sweep_config_from_dict(data: dict) -> SweepConfig:
    if not isinstance(data, dict):
        raise ValueError("config must be a JSON object")
    _reject_unknown(data, CONFIG_KEYS, "config")
    if data.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported config schema {data.get('schema')!r}, expected {SCHEMA_VERSION}")
    missing = {"channel", "grid"} - set(data)
    if missing:
        raise ValueError(f"config is missing required sections: {sorted(missing)}")
    grid_raw = data["grid"]
    missing_grid = GRID_KEYS - set(grid_raw)
    if missing_grid:
        raise ValueError(f"grid is missing required fields: {sorted(missing_grid)}")
    _reject_unknown(grid_raw, GRID_KEYS, "grid")
    return SweepConfig(
        channel=config_from_dict(data["channel"]),
        bound_params=bound_params_from_dict(data.get("bounds", {})),
        grid=GridSpec(
            log10_snr_start=float(grid_raw["log10_snr_start"]),
            log10_snr_stop=float(grid_raw["log10_snr_stop"]),
            points=int(grid_raw["points"]),
        ),
        tau_max=int(data.get("tau_max", 1024)),
        seed=int(data.get("seed", 0)),
        output_format=str(data.get("output_format", "csv")),
        tau=None if data.get("tau") is None else int(data["tau"]),
    )


def sweep_config_to_dict(config: SweepConfig) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "channel": config_to_dict(config.channel),
        "bounds": bound_params_to_dict(config.bound_params),
        "grid": {
            "log10_snr_start": config.grid.log10_snr_start,
            "log10_snr_stop": config.grid.log10_snr_stop,
            "points": config.grid.points,
        },
        "tau": config.tau,
        "tau_max": config.tau_max,
        "seed": config.seed,
        "output_format": config.output_format,
    }


def load_config(path) -> SweepConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return sweep_config_from_dict(json.load(handle))


def demo_config() -> SweepConfig:
    """The in-repo demo: three correlated taps with geometrically decaying variance."""
    from .fading import Ar1Gaussian

    return SweepConfig(
        channel=ChannelConfig(
            path_specs=(
                Ar1Gaussian(alpha=1.0, a=0.5),
                Ar1Gaussian(alpha=0.5, a=0.5),
                Ar1Gaussian(alpha=0.25, a=0.5),
            ),
            noise_variance=1.0,
            log_power=3.0 * LOG10,
        ),
        bound_params=BoundParams(),
        grid=GridSpec(log10_snr_start=20.0, log10_snr_stop=200.0, points=19),
        tau_max=1024,
        seed=20260809,
        output_format="csv",
    )


def run_sweep(config: SweepConfig) -> Tuple[List[SweepPoint], dict]:
    """Evaluate both bounds on the grid; returns the points and a metadata echo."""
    if config.grid.log10_snr_start * LOG10 <= 1.0:
        raise ValueError(
            "grid contains SNR <= e, outside the domain of log log SNR; "
            "raise log10_snr_start above 1/ln(10) ~= 0.4343"
        )
    cstats = ConverseStats.from_config(config.channel)
    dstats = DirectStats.from_config(config.channel)
    points = []
    for log_snr in config.grid.log_snr_values():
        upper = upper_bound(log_snr, cstats, config.bound_params)
        if config.tau is None:
            tau_star, lower = optimize_tau(log_snr, dstats, config.tau_max)
        else:
            tau_star, lower = config.tau, lower_bound(log_snr, config.tau, dstats)
        loglog = math.log(log_snr)
        points.append(
            SweepPoint(
                log_snr=float(log_snr),
                upper=float(upper),
                lower=float(lower),
                tau_star=int(tau_star),
                loglog_snr=float(loglog),
                ratio_upper=float(upper / loglog),
                ratio_lower=float(lower / loglog),
            )
        )
    metadata = {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "seed": config.seed,
        "constants_certified": config.bound_params.constants_certified,
        "workers": default_workers(),
        "config": sweep_config_to_dict(config),
    }
    return points, metadata


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float


def fit_preloglog_slope(points: Sequence[SweepPoint], which: str) -> SlopeFit:
    """Ordinary least squares of a bound against log log SNR.

    ``residual`` is the root-mean-square misfit; a perfect pre-loglog line
    has slope 1 and residual 0.
    """
    if which not in ("upper", "lower"):
        raise ValueError(f"which must be 'upper' or 'lower', got {which!r}")
    if len(points) < 3:
        raise ValueError(f"need at least 3 points for a slope fit, got {len(points)}")
    x = np.array([p.loglog_snr for p in points])
    y = np.array([getattr(p, which) for p in points])
    if np.ptp(x) == 0.0:
        raise ValueError("degenerate grid: all log log SNR values coincide")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return SlopeFit(
        slope=float(slope),
        intercept=float(intercept),
        residual=float(np.sqrt(np.mean(resid**2))),
    )


def emit(points: Sequence[SweepPoint], output_format: str) -> str:
    """Render the sweep points as CSV (17 significant digits) or JSON."""
    if not points:
        raise ValueError("nothing to emit: no sweep points")
    if output_format == "csv":
        lines = [CSV_HEADER]
        for p in points:
            lines.append(
                f"{p.log_snr:.17g},{p.upper:.17g},{p.lower:.17g},{p.tau_star},"
                f"{p.loglog_snr:.17g},{p.ratio_upper:.17g},{p.ratio_lower:.17g}"
            )
        return "\n".join(lines) + "\n"
    if output_format == "json":
        return json.dumps([p.to_dict() for p in points], indent=2, sort_keys=True) + "\n"
    raise ValueError(f"output format must be 'csv' or 'json', got {output_format!r}")


def parse_emitted(text: str, output_format: str) -> List[SweepPoint]:
    """Inverse of ``emit``; round-trips values bit-exactly."""
    if output_format == "csv":
        lines = [line for line in text.splitlines() if line]
        if not lines or lines[0] != CSV_HEADER:
            raise ValueError("malformed CSV: missing or unexpected header")
        points = []
        for line in lines[1:]:
            f = line.split(",")
            points.append(
                SweepPoint(
                    log_snr=float(f[0]),
                    upper=float(f[1]),
                    lower=float(f[2]),
                    tau_star=int(f[3]),
                    loglog_snr=float(f[4]),
                    ratio_upper=float(f[5]),
                    ratio_lower=float(f[6]),
                )
            )
        return points
    if output_format == "json":
        return [SweepPoint(**entry) for entry in json.loads(text)]
    raise ValueError(f"output format must be 'csv' or 'json', got {output_format!r}")


def write_outputs(points: Sequence[SweepPoint], metadata: dict, out_path, output_format: str) -> Path:
    """Write the data file and its JSON metadata sidecar; returns the sidecar path."""
    out_path = Path(out_path)
    try:
        out_path.write_text(emit(points, output_format), encoding="utf-8")
        sidecar = out_path.with_name(out_path.name + ".meta.json")
        sidecar.write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as err:
        raise OSError(f"failed writing sweep output near {out_path}: {err}") from err
    return sidecar


def run_verification_suite(
    config: SweepConfig,
    samples_mi: int = 100_000,
    samples_moments: int = 1_000_000,
) -> List[CheckReport]:
    """The oracle audit behind the ``verify`` subcommand.

    Checks closed-form path statistics against Monte Carlo and quadrature
    oracles, scheme power admissibility, the output log-moment identities,
    and the scalar mutual-information bound, at the channel's configured
    transmit power.
    """
    chan = config.channel
    seed = config.seed
    reports: List[CheckReport] = []
    workers = default_workers()

    for ell, spec in enumerate(chan.path_specs):
        if isinstance(spec, ZeroPath):
            continue
        stats = stats_of(spec)
        est = mc_log_gain(spec, samples_moments, seed=_sub_seed(seed, "log_gain", ell))
        reports.append(
            CheckReport(
                check=f"mean_log_gain_path_{ell}",
                lhs=est.value,
                rhs=stats.mean_log_gain,
                std_error=est.std_error,
                passed=abs(est.value - stats.mean_log_gain) <= 3.0 * est.std_error,
                workers=workers,
            )
        )
        szego = entropy_rate_szego(spectral_density(spec), 2**16)
        reports.append(
            CheckReport(
                check=f"entropy_rate_path_{ell}",
                lhs=szego,
                rhs=stats.entropy_rate,
                std_error=0.0,
                passed=abs(szego - stats.entropy_rate) < 1e-5,
                workers=workers,
            )
        )

    log_p = chan.log_power
    tau_verify = max((t for t in range(1, 9) if schedule_is_valid(log_p, t)), default=None)
    if tau_verify is None:
        raise ValueError(
            f"no admissible scheme at the configured power (log10 P = {log_p / LOG10:.4g}); "
            f"raise the channel power"
        )
    scheme = build_scheme(tau_verify, log_p, chan.num_paths)

    log_block = log_block_average_power(scheme)
    reports.append(
        CheckReport(
            check="block_power_admissible",
            lhs=log_block,
            rhs=log_p,
            std_error=0.0,
            passed=log_block <= log_p,
            workers=workers,
        )
    )
    block_mc = mc_block_power(scheme, samples_moments, seed=_sub_seed(seed, "block_power"))
    reports.append(
        CheckReport(
            check="block_power_mc",
            lhs=block_mc.value,
            rhs=math.exp(log_block),
            std_error=block_mc.std_error,
            passed=abs(block_mc.value - math.exp(log_block)) <= 3.0 * block_mc.std_error,
            workers=workers,
        )
    )

    reports.extend(
        verify_log_moment_bounds(
            chan,
            scheme,
            k=scheme.block_len,
            n_samples=samples_moments,
            seed=_sub_seed(seed, "log_moments"),
        )
    )

    law = LogUniformX2(0.0, math.log(100.0))
    alpha_0 = chan.path_specs[0].alpha
    stats0 = stats_of(chan.path_specs[0])
    lemma = lemma_mi_lower_bound(
        h_x=law.entropy_x,
        mean_log_x2=law.mean_log_x2,
        mean_log_h2=stats0.mean_log_gain,
        sigma_h=math.sqrt(alpha_0),
        sigma_w=math.sqrt(chan.noise_variance),
        x2_law=law,
    )
    mi = mi_scalar_gaussian(
        h_variance=alpha_0,
        w_variance=chan.noise_variance,
        x2_law=law,
        n_outer=samples_mi,
        seed=_sub_seed(seed, "mi"),
    )
    reports.append(
        CheckReport(
            check="lemma_mi_bound",
            lhs=mi.value,
            rhs=lemma,
            std_error=mi.std_error,
            passed=mi.value >= lemma - 3.0 * mi.std_error,
            workers=workers,
        )
    )
    return reports


def _sub_seed(seed: int, label: str, index: int = 0) -> int:
    digest = sum(ord(c) * (31**i) for i, c in enumerate(label)) % (2**20)
    return (int(seed) << 24) ^ (digest << 4) ^ int(index)


def _stats_payload(config: SweepConfig) -> dict:
    chan = config.channel
    per_path = []
    for ell, spec in enumerate(chan.path_specs):
        stats = stats_of(spec)
        per_path.append(
            {
                "path": ell,
                "alpha": stats.alpha,
                "entropy_rate": stats.entropy_rate,
                "mean_log_gain": stats.mean_log_gain,
                "active": stats.active,
            }
        )
    cstats = ConverseStats.from_config(chan)
    return {
        "paths": per_path,
        "alpha_total": cstats.alpha_total,
        "inf_entropy_gap": cstats.inf_gap,
        "log_snr": snr_of(chan),
        "constants_certified": config.bound_params.constants_certified,
    }


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fadecap",
        description="Capacity bounds and Monte Carlo audits for noncoherent multipath fading channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep_p = sub.add_parser("sweep", help="evaluate both bounds over an SNR grid")
    sweep_p.add_argument("--config", required=True, help="JSON config path")
    sweep_p.add_argument("--seed", type=int, default=None, help="override the config seed")
    sweep_p.add_argument("--output", default=None, help="output data file (default: sweep.<format>)")
    sweep_p.add_argument("--format", choices=("csv", "json"), default=None, help="override output format")
    sweep_p.add_argument("--delta", type=float, default=None)
    sweep_p.add_argument("--eta", type=float, default=None)
    sweep_p.add_argument("--eps-const", type=float, default=None)
    sweep_p.add_argument("--xi", type=float, default=None, help="fixed xi instead of the closed-form choice")
    sweep_p.add_argument("--tau", type=int, default=None, help="fixed block length instead of searching")
    sweep_p.add_argument("--tau-max", type=int, default=None)

    verify_p = sub.add_parser("verify", help="run the Monte Carlo oracle audit")
    verify_p.add_argument("--config", required=True)
    verify_p.add_argument("--seed", type=int, default=None)
    verify_p.add_argument("--samples-mi", type=int, default=100_000)
    verify_p.add_argument("--samples-moments", type=int, default=1_000_000)
    verify_p.add_argument("--output", default=None, help="write the JSON report here")

    stats_p = sub.add_parser("stats", help="print per-path statistics for a config")
    stats_p.add_argument("--config", required=True)

    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        if getattr(args, "seed", None) is not None:
            config = _replace_seed(config, args.seed)

        if args.command == "sweep":
            config = _apply_sweep_overrides(config, args)
            points, metadata = run_sweep(config)
            out_path = args.output or f"sweep.{config.output_format}"
            sidecar = write_outputs(points, metadata, out_path, config.output_format)
            for which in ("upper", "lower"):
                fit = fit_preloglog_slope(points, which)
                print(
                    f"{which}: slope {fit.slope:.6f}, intercept {fit.intercept:.6f}, "
                    f"rms residual {fit.residual:.3g}"
                )
            print(f"wrote {out_path} and {sidecar}")
            return 0

        if args.command == "verify":
            reports = run_verification_suite(
                config, samples_mi=args.samples_mi, samples_moments=args.samples_moments
            )
            for report in reports:
                status = "PASS" if report.passed else "FAIL"
                print(
                    f"[{status}] {report.check}: lhs={report.lhs:.6g} rhs={report.rhs:.6g} "
                    f"std_error={report.std_error:.3g}"
                )
            if args.output:
                Path(args.output).write_text(
                    json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n",
                    encoding="utf-8",
                )
            return 0 if all(r.passed for r in reports) else 2

        if args.command == "stats":
            print(json.dumps(_stats_payload(config), indent=2, sort_keys=True))
            return 0
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


def _replace_seed(config: SweepConfig, seed: int) -> SweepConfig:
    return SweepConfig(
        channel=config.channel,
        bound_params=config.bound_params,
        grid=config.grid,
        tau_max=config.tau_max,
        seed=seed,
        output_format=config.output_format,
        tau=config.tau,
    )


def _apply_sweep_overrides(config: SweepConfig, args) -> SweepConfig:
    params = config.bound_params
    raw = bound_params_to_dict(params)
    if args.delta is not None:
        raw["delta"] = args.delta
    if args.eta is not None:
        raw["eta"] = args.eta
    if args.eps_const is not None:
        raw["eps_const"] = args.eps_const
    if args.xi is not None:
        raw["xi"] = args.xi
    return SweepConfig(
        channel=config.channel,
        bound_params=bound_params_from_dict(raw),
        grid=config.grid,
        tau_max=args.tau_max if args.tau_max is not None else config.tau_max,
        seed=config.seed,
        output_format=args.format if args.format is not None else config.output_format,
        tau=args.tau if args.tau is not None else config.tau,
    )


if __name__ == "__main__":
    raise SystemExit(main())
