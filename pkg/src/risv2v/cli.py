"""Configuration loading, single-point runs, sweeps, and validation.

Config files are JSON objects with flat dotted keys mirroring the config
dataclasses ("power.p_total_dbm", "surfaces.n1", ...). Missing keys fall
back to the built-in defaults; unknown keys are rejected. All emitted CSV
uses shortest round-trip decimal formatting and is byte-stable for a fixed
(config, arguments, seed).
"""

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from . import analytics
from .analytics import Thresholds
from .fading import FadingParams
from .linkmodel import Geometry, PowerConfig, SurfaceConfig, SystemConfig
from .montecarlo import point_estimates

CSV_HEADER = "param,value,scheme,user,metric,analytic,mc_mean,mc_ci_low,mc_ci_high,trials,seed"

PARAMETERS = ("transmit_power_dbm", "n_elements", "mean_snr_db")
METRICS = ("op", "ec", "ee")
SCHEMES = ("noma", "oma")

# Default scenario: 30 dBm transmit / -90 dBm noise, 50+50 elements,
# beta 0.8/0.6, split 0.4/0.6, 10 m LoS hops, 100 m faded hop at exponent 4,
# amplifier efficiency 1.2, 10 dBm per element and per receiver circuit,
# fading shape (1, 3), half-rate orthogonal slots.
DEFAULTS = {
    "geometry.d_tx_ris_m": 10.0,
    "geometry.d_ris_star_m": 100.0,
    "geometry.d_star_to_r_m": 10.0,
    "geometry.d_star_to_t_m": 10.0,
    "geometry.kappa": 4.0,
    "geometry.d_loss_db": None,
    "surfaces.n1": 50,
    "surfaces.n2": 50,
    "surfaces.beta_r": 0.8,
    "surfaces.beta_t": 0.6,
    "power.p_total_dbm": 30.0,
    "power.p_r": 0.4,
    "power.p_t": 0.6,
    "power.noise_dbm": -90.0,
    "power.alpha": 1.2,
    "power.p_ris_element_dbm": 10.0,
    "power.p_star_element_dbm": 10.0,
    "power.p_circuit_t_dbm": 10.0,
    "power.p_circuit_r_dbm": 10.0,
    "power.gamma_bar_db": None,
    "fading.m1": 1.0,
    "fading.m2": 3.0,
    "oma_resource_fraction": 0.5,
}

_INT_KEYS = {"surfaces.n1", "surfaces.n2"}
_OPTIONAL_KEYS = {"geometry.d_loss_db", "power.gamma_bar_db"}


class ConfigError(ValueError):
    """Raised for unparseable, unknown, or invariant-violating configuration."""


def config_from_mapping(overrides) -> SystemConfig:
    """Build a validated SystemConfig from flat dotted keys over the defaults."""
    merged = dict(DEFAULTS)
    for key, value in overrides.items():
        if key not in merged:
            raise ConfigError("unknown configuration key: %r" % (key,))
        merged[key] = _coerce(key, value)
    groups = {"geometry": {}, "surfaces": {}, "power": {}, "fading": {}}
    for key, value in merged.items():
        if "." in key:
            prefix, field = key.split(".", 1)
            groups[prefix][field] = value
    try:
        return SystemConfig(
            geometry=Geometry(**groups["geometry"]),
            surfaces=SurfaceConfig(**groups["surfaces"]),
            power=PowerConfig(**groups["power"]),
            fading=FadingParams(**groups["fading"]),
            oma_resource_fraction=merged["oma_resource_fraction"],
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _coerce(key, value):
    if value is None:
        if key in _OPTIONAL_KEYS:
            return None
        raise ConfigError("configuration key %r must not be null" % (key,))
    if isinstance(value, bool):
        raise ConfigError("configuration key %r must be a number, got %r" % (key, value))
    if key in _INT_KEYS:
        if not isinstance(value, int):
            raise ConfigError("configuration key %r must be an integer, got %r"
                              % (key, value))
        return value
    if not isinstance(value, (int, float)):
        raise ConfigError("configuration key %r must be a number, got %r" % (key, value))
    return float(value)


def load_config(path: Optional[str]) -> SystemConfig:
    """Load a SystemConfig from a JSON file; None or an empty file = defaults."""
    if path is None:
        return config_from_mapping({})
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as e:
        raise ConfigError("cannot read config file %s: %s" % (path, e)) from e
    if not text.strip():
        return config_from_mapping({})
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("invalid JSON in %s: %s" % (path, e)) from e
    if not isinstance(data, dict):
        raise ConfigError("config file %s must contain a JSON object" % (path,))
    return config_from_mapping(data)


def default_config() -> SystemConfig:
    return config_from_mapping({})


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional parameter sweep request."""

    parameter: str
    start: float
    stop: float
    step: float
    scheme: str = "both"
    metrics: Tuple[str, ...] = ("op", "ec", "ee")
    trials: int = 100_000
    seed: int = 12345

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise ValueError("sweep parameter must be one of %r, got %r"
                             % (PARAMETERS, self.parameter))
        if not self.start <= self.stop:
            raise ValueError("sweep start must not exceed stop")
        if not self.step > 0.0:
            raise ValueError("sweep step must be > 0, got %r" % (self.step,))
        if self.scheme not in SCHEMES + ("both",):
            raise ValueError("scheme must be noma, oma or both, got %r" % (self.scheme,))
        if not self.metrics or any(m not in METRICS for m in self.metrics):
            raise ValueError("metrics must be a non-empty subset of %r, got %r"
                             % (METRICS, self.metrics))

    def values(self):
        out = []
        k = 0
        while True:
            v = self.start + k * self.step
            if v > self.stop + 1e-9 * max(1.0, abs(self.stop)):
                break
            out.append(v)
            k += 1
        return out

    def schemes(self):
        return SCHEMES if self.scheme == "both" else (self.scheme,)


@dataclass(frozen=True)
class ResultRow:
    param: str
    value: float
    scheme: str
    user: str
    metric: str
    analytic: float
    mc_mean: Optional[float]
    mc_ci_low: Optional[float]
    mc_ci_high: Optional[float]
    trials: int
    seed: int


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join(_fmt(v) for v in (
            r.param, r.value, r.scheme, r.user, r.metric, r.analytic,
            r.mc_mean, r.mc_ci_low, r.mc_ci_high, r.trials, r.seed)))
    return "\n".join(lines) + "\n"


def _with_parameter(cfg: SystemConfig, parameter: str, value: float) -> SystemConfig:
    if parameter == "transmit_power_dbm":
        return dataclasses.replace(
            cfg, power=dataclasses.replace(cfg.power, p_total_dbm=float(value)))
    if parameter == "n_elements":
        n = int(round(value))
        if abs(value - n) > 1e-9 or n < 1:
            raise ConfigError("n_elements sweep values must be integers >= 1, got %r"
                              % (value,))
        return dataclasses.replace(
            cfg, surfaces=dataclasses.replace(cfg.surfaces, n1=n, n2=n))
    if parameter == "mean_snr_db":
        return dataclasses.replace(
            cfg, power=dataclasses.replace(cfg.power, gamma_bar_db=float(value)))
    raise ConfigError("unknown sweep parameter %r" % (parameter,))


def _point_rows(cfg, th, trials, seed, workers, schemes, metrics,
                param, value) -> list:
    """Rows for one configuration; analytic values come straight from analytics."""
    orep = analytics.outage_report(cfg, th) if "op" in metrics else None
    crep = analytics.capacity_report(cfg)
    analytic = {
        ("op", "noma", "r"): orep.p_out_r_noma if orep else None,
        ("op", "noma", "t"): orep.p_out_t_noma if orep else None,
        ("op", "oma", "r"): orep.p_out_r_oma if orep else None,
        ("op", "oma", "t"): orep.p_out_t_oma if orep else None,
        ("ec", "noma", "r"): crep.ec_r_noma,
        ("ec", "noma", "t"): crep.ec_t_noma,
        ("ec", "oma", "r"): crep.ec_r_oma,
        ("ec", "oma", "t"): crep.ec_t_oma,
        ("ee", "noma"): crep.ee_noma,
        ("ee", "oma"): crep.ee_oma,
    }
    est = {}
    if trials > 0:
        est = point_estimates(cfg, th, trials, seed, workers=workers,
                              schemes=schemes, metrics=metrics)
    rows = []
    for scheme in schemes:
        for user in ("r", "t"):
            for metric in metrics:
                key = (metric, scheme) if metric == "ee" else (metric, scheme, user)
                e = est.get(key)
                rows.append(ResultRow(
                    param=param, value=float(value), scheme=scheme, user=user,
                    metric=metric, analytic=analytic[key],
                    mc_mean=e.value if e else None,
                    mc_ci_low=e.ci_low if e else None,
                    mc_ci_high=e.ci_high if e else None,
                    trials=trials, seed=seed))
    return rows


def run_point(cfg: SystemConfig, th: Thresholds, trials: int, seed: int,
              workers: int = 1) -> list:
    """Every metric for both schemes and both users at one configuration."""
    return _point_rows(cfg, th, trials, seed, workers, SCHEMES, METRICS,
                       "transmit_power_dbm", cfg.power.p_total_dbm)


def run_sweep(cfg: SystemConfig, spec: SweepSpec,
              th: Optional[Thresholds] = None, workers: int = 1) -> str:
    """CSV for a parameter sweep, ordered by sweep value, scheme, user."""
    th = th if th is not None else Thresholds.from_db()
    metrics = tuple(m for m in METRICS if m in spec.metrics)
    rows = []
    for value in spec.values():
        cfg_v = _with_parameter(cfg, spec.parameter, value)
        rows.extend(_point_rows(cfg_v, th, spec.trials, spec.seed, workers,
                                spec.schemes(), metrics, spec.parameter, value))
    return rows_to_csv(rows)


def run_validate(cfg: SystemConfig, th: Thresholds, trials: int, seed: int,
                 workers: int = 1):
    """Closed form vs Monte Carlo at one configuration.

    Outage estimates for both OMA users and the NOMA refraction receiver
    must agree within max(0.01, 3 CI half-widths). The NOMA reflection
    receiver compares the product-form closed form against the exact
    joint-event estimate and is reported without gating (the two outage
    events share the same draw, so the printed factorization is an
    approximation). Empirical capacities and EE must not exceed their
    analytic upper bounds.

    Returns (ok, report_lines, rows).
    """
    orep = analytics.outage_report(cfg, th)
    crep = analytics.capacity_report(cfg)
    est = point_estimates(cfg, th, trials, seed, workers=workers)
    lines = []
    ok = True

    gated = [("noma", "t", orep.p_out_t_noma), ("oma", "r", orep.p_out_r_oma),
             ("oma", "t", orep.p_out_t_oma)]
    for scheme, user, ana in gated:
        e = est[("op", scheme, user)]
        budget = max(0.01, 3.0 * (e.ci_high - e.ci_low) / 2.0)
        diff = abs(ana - e.value)
        good = diff <= budget
        ok &= good
        lines.append("%s op %s-%s analytic=%.6f mc=%.6f diff=%.6f budget=%.6f"
                     % ("ok  " if good else "FAIL", scheme, user, ana, e.value,
                        diff, budget))
    e = est[("op", "noma", "r")]
    lines.append("note op noma-r product-form=%.6f joint-mc=%.6f discrepancy=%.6f"
                 " (independence approximation, not gated)"
                 % (orep.p_out_r_noma, e.value, abs(orep.p_out_r_noma - e.value)))

    bounds = {("noma", "r"): crep.ec_r_noma, ("noma", "t"): crep.ec_t_noma,
              ("oma", "r"): crep.ec_r_oma, ("oma", "t"): crep.ec_t_oma}
    for (scheme, user), bound in bounds.items():
        e = est[("ec", scheme, user)]
        good = e.value <= bound
        ok &= good
        lines.append("%s ec %s-%s bound=%.6f mc=%.6f"
                     % ("ok  " if good else "FAIL", scheme, user, bound, e.value))
    for scheme, ana in (("noma", crep.ee_noma), ("oma", crep.ee_oma)):
        e = est[("ee", scheme)]
        good = e.value <= ana
        ok &= good
        lines.append("%s ee %s bound=%.6f mc=%.6f"
                     % ("ok  " if good else "FAIL", scheme, ana, e.value))

    rows = _point_rows(cfg, th, trials, seed, workers, SCHEMES, METRICS,
                       "transmit_power_dbm", cfg.power.p_total_dbm)
    return ok, lines, rows


def _parse_thresholds(text: str) -> Thresholds:
    parts = text.split(",")
    if len(parts) != 4:
        raise ConfigError(
            "--thresholds-db expects 4 comma-separated dB values "
            "(sic, noma-r, noma-t, oma), got %r" % (text,))
    try:
        vals = [float(p) for p in parts]
    except ValueError as e:
        raise ConfigError("invalid threshold value in %r" % (text,)) from e
    return Thresholds.from_db(*vals)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="risv2v",
        description="Outage / capacity / energy-efficiency analysis of a "
                    "RIS + STAR-surface assisted V2V link, closed form and "
                    "Monte Carlo.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials_default=100_000):
        p.add_argument("--config", required=True,
                       help="JSON config file (empty file = defaults)")
        p.add_argument("--trials", type=int, default=trials_default,
                       help="Monte-Carlo trials (0 = analytic only)")
        p.add_argument("--seed", type=int, default=12345)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--thresholds-db", default="0,0,0,0",
                       help="decoding thresholds in dB: sic,noma-r,noma-t,oma")

    p_point = sub.add_parser("point", help="all metrics at one configuration")
    common(p_point)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter, write CSV")
    common(p_sweep)
    p_sweep.add_argument("--param", required=True, choices=("P", "N", "snr"),
                         help="P: transmit power dBm, N: elements, snr: mean SNR dB")
    p_sweep.add_argument("--from", dest="start", type=float, required=True)
    p_sweep.add_argument("--to", dest="stop", type=float, required=True)
    p_sweep.add_argument("--step", type=float, required=True)
    p_sweep.add_argument("--metric", default="op,ec,ee",
                         help="comma-separated subset of op,ec,ee")
    p_sweep.add_argument("--scheme", default="both", choices=("noma", "oma", "both"))
    p_sweep.add_argument("--out", required=True, help="output CSV path")

    p_val = sub.add_parser("validate",
                           help="closed form vs Monte Carlo; nonzero exit on breach")
    common(p_val)
    p_val.add_argument("--out", default=None, help="optional CSV output path")
    return parser


_PARAM_NAMES = {"P": "transmit_power_dbm", "N": "n_elements", "snr": "mean_snr_db"}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        th = _parse_thresholds(args.thresholds_db)
        if args.command == "point":
            rows = run_point(cfg, th, args.trials, args.seed, workers=args.workers)
            sys.stdout.write(rows_to_csv(rows))
            return 0
        if args.command == "sweep":
            metrics = tuple(m for m in args.metric.split(",") if m)
            spec = SweepSpec(parameter=_PARAM_NAMES[args.param], start=args.start,
                             stop=args.stop, step=args.step, scheme=args.scheme,
                             metrics=metrics, trials=args.trials, seed=args.seed)
            csv_text = run_sweep(cfg, spec, th, workers=args.workers)
            with open(args.out, "w", encoding="utf-8", newline="") as f:
                f.write(csv_text)
            return 0
        if args.command == "validate":
            ok, lines, rows = run_validate(cfg, th, args.trials, args.seed,
                                           workers=args.workers)
            for line in lines:
                print(line)
            if args.out:
                with open(args.out, "w", encoding="utf-8", newline="") as f:
                    f.write(rows_to_csv(rows))
            return 0 if ok else 3
    except ConfigError as e:
        print("config error: %s" % (e,), file=sys.stderr)
        return 2
    except ValueError as e:
        print("error: %s" % (e,), file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
