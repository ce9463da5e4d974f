"""Command-line front end: config file in, reproducible CSV files out.

Four subcommands cover the standard experiments: `bep-curve` (detector
comparison over an SNR x ACF grid), `adapt` (rate schedule, bound trace
and average-rate curve), `rate-opt` (max average rate over an SNR x
threshold grid) and `power` (minimum-power trace plus energy summary).

Every output is a CSV with a header row plus a JSON metadata sidecar
(`<name>.csv.meta.json`). Outputs are byte-for-byte reproducible from
(config, seed); the --threads flag never changes results.
"""

import argparse
import configparser
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import backend_name
from .bep_analysis import BepContext, psk_bep_approx, uub
from .channel import ChannelEstimate, WobbleParams, temporal_acf
from .constellation import constellation_for
from .detectors import DetectorKind, monte_carlo_bep
from .errors import ConfigError, UavlinkError
from .fixtures import FIXTURE_NAMES, load_fixture
from .power_control import energy_savings, min_power_schedule
from .rate_optimizer import (
    average_rate,
    build_rate_schedule,
    optimum_transmission_time,
    sweep_rave_max,
)
from .scenario import (
    LinkScenario,
    average_snr_db,
    noise_power_dbm,
    path_loss_db,
)

__all__ = ["RunConfig", "load_config", "main"]

_OUT_DIR_ENV = "UAVLINK_OUT_DIR"
_DETECTOR_TOKENS = {
    "ml": "ml",
    "so": "so",
    "uub": "analytic-uub",
    "analytic-uub": "analytic-uub",
    "psk-approx": "psk-approx",
}
_DEFAULT_SNR_DB = (0.0, 4.0, 8.0, 12.0, 16.0, 20.0, 24.0)
_DEFAULT_ACF = (1.0, 0.99, 0.95, 0.9)
_DEFAULT_THRESHOLDS = (1e-3, 1e-5, 1e-6)
_DEFAULT_ORDERS = (4, 16)


@dataclass(frozen=True)
class RunConfig:
    """Everything one experiment run needs, resolved and validated."""

    fixture: str | None
    scenario: LinkScenario
    wobble: WobbleParams
    estimate: ChannelEstimate
    scheme: str
    snr_db: tuple
    acf: tuple
    bep_thresholds: tuple
    orders: tuple
    detectors: tuple
    n_symbols: int
    seed: int
    sample_dt: float
    out_dir: str

    def __post_init__(self):
        if self.scheme not in ("psk", "qam"):
            raise ConfigError(f"run.scheme must be psk or qam, got {self.scheme!r}")
        if self.n_symbols < 1:
            raise ConfigError("run.n_symbols must be at least 1")
        if self.sample_dt <= 0:
            raise ConfigError("run.sample_dt must be positive")
        for name, grid in (("snr_db", self.snr_db), ("acf", self.acf),
                           ("bep_thresholds", self.bep_thresholds),
                           ("orders", self.orders),
                           ("detectors", self.detectors)):
            if len(grid) == 0:
                raise ConfigError(f"run.{name} must be non-empty")
        for det in self.detectors:
            if det not in _DETECTOR_TOKENS.values():
                raise ConfigError(f"unknown detector {det!r} in run.detectors")


def _require(parser: configparser.ConfigParser, section: str, key: str) -> str:
    if not parser.has_option(section, key):
        raise ConfigError(f"missing required field {section}.{key}")
    return parser.get(section, key)


def _as_float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"field {section}.{key} is not a number: {raw!r}") from exc


def _as_int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"field {section}.{key} is not an integer: {raw!r}") from exc


def _float_list(section: str, key: str, raw: str) -> tuple:
    return tuple(_as_float(section, key, tok)
                 for tok in raw.replace(",", " ").split())


def _scenario_from(parser: configparser.ConfigParser) -> LinkScenario:
    sec = "scenario"
    if not parser.has_section(sec):
        raise ConfigError("missing required field run.fixture "
                          "(or a [scenario] section)")
    get = lambda key: _as_float(sec, key, _require(parser, sec, key))
    t_co = (_as_float(sec, "t_coherence", parser.get(sec, "t_coherence"))
            if parser.has_option(sec, "t_coherence") else None)
    return LinkScenario(
        uav_height=get("uav_height"),
        ground_xy=(get("ground_x"), get("ground_y")),
        carrier_freq=get("carrier_freq"),
        n_rx_antennas=_as_int(sec, "n_rx_antennas",
                              _require(parser, sec, "n_rx_antennas")),
        bandwidth=get("bandwidth"),
        temperature=get("temperature"),
        p_max_dbm=get("p_max_dbm"),
        bep_threshold=get("bep_threshold"),
        t_estimate=get("t_estimate"),
        t_coherence=t_co,
    )


def _wobble_from(parser: configparser.ConfigParser,
                 scenario: LinkScenario) -> WobbleParams:
    sec = "wobble"
    if not parser.has_section(sec):
        raise ConfigError("missing required field wobble.omega_v")
    omega_v = _as_float(sec, "omega_v", _require(parser, sec, "omega_v"))
    mu = _as_float(sec, "mu", _require(parser, sec, "mu"))
    sigma = (_as_float(sec, "sigma_v_sq", parser.get(sec, "sigma_v_sq"))
             if parser.has_option(sec, "sigma_v_sq") else None)
    return WobbleParams.for_carrier(scenario.carrier_freq, omega_v, mu, sigma)


def _estimate_from(parser: configparser.ConfigParser,
                   scenario: LinkScenario) -> ChannelEstimate:
    sec = "channel"
    if not parser.has_section(sec):
        raise ConfigError("missing required field channel.h_real")
    re = _float_list(sec, "h_real", _require(parser, sec, "h_real"))
    im = _float_list(sec, "h_imag", _require(parser, sec, "h_imag"))
    if len(re) != len(im):
        raise ConfigError("channel.h_real and channel.h_imag lengths differ")
    if len(re) != scenario.n_rx_antennas:
        raise ConfigError(
            f"channel vector has {len(re)} entries but "
            f"scenario.n_rx_antennas = {scenario.n_rx_antennas}")
    h = np.array(re, dtype=float) + 1j * np.array(im, dtype=float)
    return ChannelEstimate(h, scenario.t_estimate)


def load_config(path: str, seed_override: int | None = None,
                out_override: str | None = None) -> RunConfig:
    """Parse an INI run configuration (see README for the format)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    if not parser.has_section("run"):
        raise ConfigError("missing required section [run]")

    fixture = parser.get("run", "fixture", fallback=None)
    if fixture is not None:
        if fixture not in FIXTURE_NAMES:
            raise ConfigError(
                f"unknown fixture {fixture!r}; choose from {FIXTURE_NAMES}")
        fx = load_fixture(fixture)
        scenario, wobble, estimate = fx.scenario, fx.wobble, fx.estimate
    else:
        scenario = _scenario_from(parser)
        wobble = _wobble_from(parser, scenario)
        estimate = _estimate_from(parser, scenario)

    if seed_override is not None:
        seed = seed_override
    else:
        seed = _as_int("run", "seed", _require(parser, "run", "seed"))

    def grid(key: str, default: tuple) -> tuple:
        if parser.has_option("run", key):
            return _float_list("run", key, parser.get("run", key))
        return default

    detectors_raw = parser.get("run", "detectors", fallback="ml, so, uub")
    detectors = []
    for tok in detectors_raw.replace(",", " ").split():
        if tok not in _DETECTOR_TOKENS:
            raise ConfigError(f"unknown detector {tok!r} in run.detectors")
        detectors.append(_DETECTOR_TOKENS[tok])

    out_dir = out_override
    if out_dir is None:
        out_dir = os.environ.get(_OUT_DIR_ENV)
    if out_dir is None:
        out_dir = parser.get("run", "out_dir", fallback="out")

    return RunConfig(
        fixture=fixture,
        scenario=scenario,
        wobble=wobble,
        estimate=estimate,
        scheme=_require(parser, "run", "scheme").strip().lower(),
        snr_db=grid("snr_db", _DEFAULT_SNR_DB),
        acf=grid("acf", _DEFAULT_ACF),
        bep_thresholds=grid("bep_thresholds", _DEFAULT_THRESHOLDS),
        orders=tuple(int(o) for o in grid("orders", _DEFAULT_ORDERS)),
        detectors=tuple(detectors),
        n_symbols=_as_int("run", "n_symbols",
                          parser.get("run", "n_symbols", fallback="100000")),
        seed=seed,
        sample_dt=_as_float("run", "sample_dt",
                            parser.get("run", "sample_dt", fallback="1e-5")),
        out_dir=out_dir,
    )


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, header, rows, meta: dict) -> None:
    try:
        lines = [",".join(header)]
        lines.extend(",".join(_cell(v) for v in row) for row in rows)
        path.write_text("\n".join(lines) + "\n")
        sidecar = path.with_name(path.name + ".meta.json")
        sidecar.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    except OSError as exc:
        raise UavlinkError(f"cannot write {path}: {exc}") from exc


def _base_meta(cfg: RunConfig) -> dict:
    return {
        "version": __version__,
        "backend": backend_name(),
        "seed": cfg.seed,
        "scheme": cfg.scheme,
        "fixture": cfg.fixture,
        "n_rx_antennas": cfg.scenario.n_rx_antennas,
        "norm_h_sq": cfg.estimate.norm_sq,
        "normalization": {
            "constellation": "unit average symbol energy",
            "power_average": "trapezoid over samples, in linear watts",
            "bep": "bit errors per transmitted bit, Gray labels",
        },
    }


def cmd_bep_curve(cfg: RunConfig, threads: int, out_dir: Path) -> None:
    """Detector comparison over the SNR x ACF grid, one CSV row per point."""
    if "psk-approx" in cfg.detectors and cfg.scheme != "psk":
        raise ConfigError("detector psk-approx requires run.scheme = psk")
    rows = []
    for order in cfg.orders:
        c = constellation_for(cfg.scheme, order)
        for snr_db in cfg.snr_db:
            gamma = 10.0 ** (snr_db / 10.0)
            for acf in cfg.acf:
                for det in cfg.detectors:
                    if det in ("ml", "so"):
                        kind = DetectorKind.ML if det == "ml" else DetectorKind.SO
                        est = monte_carlo_bep(cfg.estimate, acf, gamma, c,
                                              kind, cfg.n_symbols, cfg.seed,
                                              threads=threads)
                        bep, se, bits = est.bep, est.std_error, est.bits_simulated
                    elif det == "analytic-uub":
                        ctx = BepContext(cfg.estimate, acf, gamma, c)
                        bep, se, bits = float(uub(ctx)), 0.0, 0
                    else:
                        bep = psk_bep_approx(order, cfg.estimate, acf, gamma)
                        se, bits = 0.0, 0
                    rows.append((snr_db, acf, cfg.scheme, order, det,
                                 bep, se, bits))
    meta = _base_meta(cfg)
    meta.update(n_symbols=cfg.n_symbols, snr_db=list(cfg.snr_db),
                acf=list(cfg.acf), orders=list(cfg.orders),
                detectors=list(cfg.detectors))
    _write_csv(out_dir / "bep_curve.csv",
               ["snr_db", "acf", "scheme", "order", "detector",
                "bep", "std_error", "bits"],
               rows, meta)


def _schedule_for(cfg: RunConfig):
    gamma_max = 10.0 ** (average_snr_db(cfg.scenario.p_max_dbm,
                                        cfg.scenario) / 10.0)
    schedule = build_rate_schedule(cfg.estimate, gamma_max, cfg.scheme,
                                   cfg.scenario.bep_threshold, cfg.wobble,
                                   cfg.scenario.t_estimate)
    return gamma_max, schedule


def cmd_adapt(cfg: RunConfig, out_dir: Path) -> None:
    """Rate schedule, bound-versus-time trace and average-rate curve."""
    gamma_max, schedule = _schedule_for(cfg)
    optimum = optimum_transmission_time(schedule, cfg.scenario.t_coherence)
    t_e = schedule.t_estimate

    rows = []
    for th in sorted(schedule.thresholds, key=lambda th: -th.n):
        t_start = schedule.switch_time(th.n + 1)
        c_start = temporal_acf(cfg.wobble, t_start - t_e)
        rows.append((t_start, th.t_n, th.n, 1 << th.n, c_start, th.c_n))
    meta = _base_meta(cfg)
    meta.update(gamma_max_db=10.0 * math.log10(gamma_max),
                bep_threshold=cfg.scenario.bep_threshold,
                r_max=schedule.r_max,
                t_max=optimum.t_max, r_ave_max=optimum.r_ave_max,
                r_op=optimum.r_op)
    _write_csv(out_dir / "adapt_schedule.csv",
               ["t_start", "t_end", "rate_bits", "order", "c_start", "c_end"],
               rows, meta)

    trace = []
    if not schedule.is_empty:
        n_steps = int(math.floor((schedule.t_zero_rate - t_e)
                                 / cfg.sample_dt + 1e-9))
        for k in range(1, n_steps + 1):
            t = t_e + k * cfg.sample_dt
            rate = schedule.rate_at(t)
            if rate == 0:
                break
            acf = temporal_acf(cfg.wobble, t - t_e)
            c = constellation_for(cfg.scheme, 1 << rate)
            bound = float(uub(BepContext(cfg.estimate, acf, gamma_max, c)))
            trace.append((t, acf, rate, 1 << rate, bound))
    _write_csv(out_dir / "adapt_uub_trace.csv",
               ["t", "acf", "rate_bits", "order", "uub"], trace, meta)

    curve = []
    if not schedule.is_empty:
        t_c_max = schedule.t_zero_rate - t_e
        n_steps = int(math.floor(t_c_max / cfg.sample_dt + 1e-9))
        curve = [(k * cfg.sample_dt,
                  average_rate(schedule, k * cfg.sample_dt))
                 for k in range(1, n_steps + 1)]
    _write_csv(out_dir / "adapt_rave.csv", ["t_c", "r_ave"], curve, meta)


def cmd_rate_opt(cfg: RunConfig, out_dir: Path) -> None:
    """Max average rate for every (SNR, threshold) grid cell."""
    matrix = sweep_rave_max(cfg.estimate, cfg.snr_db, cfg.bep_thresholds,
                            cfg.scheme, cfg.wobble, cfg.scenario.t_estimate)
    rows = [(snr_db, beta, matrix[i, j])
            for i, snr_db in enumerate(cfg.snr_db)
            for j, beta in enumerate(cfg.bep_thresholds)]
    meta = _base_meta(cfg)
    meta.update(snr_db=list(cfg.snr_db),
                bep_thresholds=list(cfg.bep_thresholds),
                t_estimate=cfg.scenario.t_estimate)
    _write_csv(out_dir / "rate_opt_contour.csv",
               ["snr_db", "bep_threshold", "r_ave_max"], rows, meta)


def _bep_at(cfg: RunConfig, order: int, acf: float, gamma: float) -> float:
    if cfg.scheme == "psk":
        return psk_bep_approx(order, cfg.estimate, acf, gamma)
    c = constellation_for(cfg.scheme, order)
    return float(uub(BepContext(cfg.estimate, acf, gamma, c)))


def cmd_power(cfg: RunConfig, out_dir: Path) -> None:
    """Minimum-power trace plus the energy summary over both windows."""
    gamma_max, schedule = _schedule_for(cfg)
    power = min_power_schedule(schedule, cfg.estimate, cfg.scenario,
                               cfg.wobble, cfg.sample_dt)
    pl = path_loss_db(cfg.scenario)
    n0 = noise_power_dbm(cfg.scenario)

    rows = []
    for s in power.samples:
        gamma_emitted = 10.0 ** ((s.p_min_dbm - pl - n0) / 10.0)
        rows.append((s.t, s.rate, s.order, s.acf_value, s.gamma_min_db,
                     s.p_min_dbm, s.clamped,
                     _bep_at(cfg, s.order, s.acf_value, gamma_emitted)))
    meta = _base_meta(cfg)
    meta.update(gamma_max_db=10.0 * math.log10(gamma_max),
                bep_threshold=cfg.scenario.bep_threshold,
                p_max_dbm=cfg.scenario.p_max_dbm,
                sample_dt=cfg.sample_dt)
    _write_csv(out_dir / "power_trace.csv",
               ["t", "rate_bits", "order", "acf", "gamma_min_db",
                "p_min_dbm", "clamped", "bep_at_pmin"],
               rows, meta)

    t_e = schedule.t_estimate
    optimum = optimum_transmission_time(schedule, cfg.scenario.t_coherence)
    windows = [("full", t_e, schedule.t_zero_rate)]
    if optimum.t_max > 0:
        windows.append(("optimum", t_e, t_e + optimum.t_max))
    srows = []
    for name, t_a, t_b in windows:
        sv = energy_savings(power, cfg.scenario.p_max_dbm, (t_a, t_b))
        srows.append((name, t_a, t_b, sv.mean_power_dbm, sv.savings_percent,
                      cfg.scenario.p_max_dbm))
    _write_csv(out_dir / "power_savings.csv",
               ["window", "t_start", "t_end", "mean_power_dbm",
                "savings_percent", "baseline_dbm"],
               srows, meta)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="uavlink",
        description="Wobbling-UAV mm-wave link: BEP, rate and power tools")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("bep-curve", None), ("adapt", None),
                     ("rate-opt", None), ("power", None)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="INI run config")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads (never changes results)")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, seed_override=args.seed,
                          out_override=args.out)
        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "bep-curve":
            cmd_bep_curve(cfg, args.threads, out_dir)
        elif args.command == "adapt":
            cmd_adapt(cfg, out_dir)
        elif args.command == "rate-opt":
            cmd_rate_opt(cfg, out_dir)
        else:
            cmd_power(cfg, out_dir)
    except UavlinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
