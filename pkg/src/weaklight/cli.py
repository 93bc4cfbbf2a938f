"""Command-line front end: simulate, sweep, calibrate, estimate.

Configuration comes from a JSON file (schema below), optionally seeded by a
named preset, with command-line flags taking highest precedence:

    flags  >  --config file  >  --source preset  >  built-in defaults

Config schema (schema_version 1, all keys optional):

    {
      "schema_version": 1,
      "source":        {"lambda0_nm": 808.0, "delta_lambda_nm": 38.8},
      "alpha_rad":     0.004,            # direct phase parameter, or...
      "plate":         {"theta_rad": 0.1, "n0": 1.54,
                        "lambda0_design_nm": 808.0},
      "postselection": {"beta_rad": 0.004, "spread_rad": 0.0},
      "dispersion":    {"thickness_mm": 1.0, "index": "znse"},   # or null
      "spectrometer":  {"start_nm": 715.0, "step_nm": 0.02, "count": 10001,
                        "centroid_noise_nm": 0.0, "relative_noise": 0.0},
      "extended_grid": true,
      "seed": 0
    }

Every emitted data file is accompanied by a ``run_manifest.json`` whose
``resolved_config`` can be fed back through ``--config`` to reproduce the
run. Exit codes: 0 success, 2 configuration/usage, 3 physics (no light),
4 calibration (non-invertible), 5 estimation out of range.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from pathlib import Path

from . import __version__, estimator, simulator, spectral
from .errors import (
    CalibrationDomainError,
    DegenerateSpectrumError,
    ExtrapolationRefusedError,
    GridMismatchError,
    InvalidConfigError,
    NoPhotonsError,
    OrthogonalPostselectionError,
)
from .polarization import PlateParams, PostSelectionParams
from .simulator import DispersionSpec, SetupConfig, SpectrometerParams
from .spectral import SourceParams, WavelengthGrid

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_CALIBRATION = 4
EXIT_ESTIMATION = 5

PRESETS = {
    "led808": {
        "source": {"lambda0_nm": 808.0, "delta_lambda_nm": 38.8},
    },
    "znse": {
        "source": {"lambda0_nm": 805.0, "delta_lambda_nm": 41.6},
        "dispersion": {"thickness_mm": 1.0, "index": "znse"},
    },
    "filtered": {
        "source": {"lambda0_nm": 795.0, "delta_lambda_nm": 18.9},
    },
}

_DEFAULT_CONFIG = {
    "schema_version": SCHEMA_VERSION,
    "source": {"lambda0_nm": 808.0, "delta_lambda_nm": 38.8},
    "alpha_rad": None,
    "plate": None,
    "postselection": {"beta_rad": 0.0, "spread_rad": 0.0},
    "dispersion": None,
    "spectrometer": {
        "start_nm": 715.0,
        "step_nm": 0.02,
        "count": 10001,
        "centroid_noise_nm": 0.0,
        "relative_noise": 0.0,
    },
    "extended_grid": True,
    "seed": 0,
}

_KNOWN_INDEX_MODELS = ("znse", "znse_pole")


# ---------------------------------------------------------------------------
# config resolution


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _check_keys(section: dict, allowed, path: str) -> None:
    for key in section:
        if key not in allowed:
            raise InvalidConfigError(f"{path}{key}: unknown config field")


def _number(section: dict, key: str, path: str) -> float:
    value = section.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise InvalidConfigError(f"{path}{key}: expected a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise InvalidConfigError(f"{path}{key}: must be finite, got {value!r}")
    return float(value)


def load_config_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise InvalidConfigError(f"{path}: top level must be an object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise InvalidConfigError(
            f"schema_version: expected {SCHEMA_VERSION}, got {version!r}"
        )
    _check_keys(data, set(_DEFAULT_CONFIG), "")
    return data


def build_setup_config(cfg: dict) -> SetupConfig:
    """Validate a resolved config dict and build the SetupConfig.

    Error messages carry the offending field path.
    """
    _check_keys(cfg, set(_DEFAULT_CONFIG), "")

    src = cfg.get("source")
    if not isinstance(src, dict):
        raise InvalidConfigError("source: expected an object")
    _check_keys(src, {"lambda0_nm", "delta_lambda_nm"}, "source.")
    lambda0 = _number(src, "lambda0_nm", "source.")
    dlam = _number(src, "delta_lambda_nm", "source.")
    if lambda0 <= 0:
        raise InvalidConfigError("source.lambda0_nm: must be > 0")
    if not 0 < dlam < lambda0:
        raise InvalidConfigError("source.delta_lambda_nm: must be in (0, lambda0_nm)")
    source = SourceParams(lambda0, dlam)

    alpha = cfg.get("alpha_rad")
    plate_cfg = cfg.get("plate")
    plate = None
    if plate_cfg is not None:
        if not isinstance(plate_cfg, dict):
            raise InvalidConfigError("plate: expected an object or null")
        _check_keys(plate_cfg, {"theta_rad", "n0", "lambda0_design_nm"}, "plate.")
        theta = _number(plate_cfg, "theta_rad", "plate.")
        n0 = _number(plate_cfg, "n0", "plate.") if "n0" in plate_cfg else 1.54
        lam0d = (
            _number(plate_cfg, "lambda0_design_nm", "plate.")
            if "lambda0_design_nm" in plate_cfg
            else lambda0
        )
        if abs(theta) >= math.pi / 2:
            raise InvalidConfigError("plate.theta_rad: must satisfy |theta| < pi/2")
        if n0 <= 1:
            raise InvalidConfigError("plate.n0: must be > 1")
        if lam0d <= 0:
            raise InvalidConfigError("plate.lambda0_design_nm: must be > 0")
        plate = PlateParams(theta, n0, lam0d)
    if alpha is not None:
        if not isinstance(alpha, (int, float)) or isinstance(alpha, bool):
            raise InvalidConfigError(f"alpha_rad: expected a number, got {alpha!r}")
        alpha = float(alpha)
    if (alpha is None) == (plate is None):
        raise InvalidConfigError(
            "exactly one of alpha_rad and plate must be set"
        )

    post = cfg.get("postselection")
    if not isinstance(post, dict):
        raise InvalidConfigError("postselection: expected an object")
    _check_keys(post, {"beta_rad", "spread_rad"}, "postselection.")
    beta = _number(post, "beta_rad", "postselection.") if "beta_rad" in post else 0.0
    spread = _number(post, "spread_rad", "postselection.") if "spread_rad" in post else 0.0
    if abs(beta) > math.pi / 2:
        raise InvalidConfigError("postselection.beta_rad: must satisfy |beta| <= pi/2")
    if spread < 0:
        raise InvalidConfigError("postselection.spread_rad: must be >= 0")

    disp_cfg = cfg.get("dispersion")
    dispersion = None
    if disp_cfg is not None:
        if not isinstance(disp_cfg, dict):
            raise InvalidConfigError("dispersion: expected an object or null")
        _check_keys(disp_cfg, {"thickness_mm", "index"}, "dispersion.")
        thickness = _number(disp_cfg, "thickness_mm", "dispersion.")
        if thickness < 0:
            raise InvalidConfigError("dispersion.thickness_mm: must be >= 0")
        index = disp_cfg.get("index", "znse")
        if index not in _KNOWN_INDEX_MODELS:
            raise InvalidConfigError(
                f"dispersion.index: unknown model {index!r}; "
                f"known: {list(_KNOWN_INDEX_MODELS)}"
            )
        dispersion = DispersionSpec(thickness, index)

    spm = cfg.get("spectrometer")
    if not isinstance(spm, dict):
        raise InvalidConfigError("spectrometer: expected an object")
    _check_keys(
        spm,
        {"start_nm", "step_nm", "count", "centroid_noise_nm", "relative_noise"},
        "spectrometer.",
    )
    start = _number(spm, "start_nm", "spectrometer.")
    step = _number(spm, "step_nm", "spectrometer.")
    count = spm.get("count")
    if not isinstance(count, int) or isinstance(count, bool) or count < 2:
        raise InvalidConfigError("spectrometer.count: must be an integer >= 2")
    if start <= 0:
        raise InvalidConfigError("spectrometer.start_nm: must be > 0")
    if step <= 0:
        raise InvalidConfigError("spectrometer.step_nm: must be > 0")
    cnoise = (
        _number(spm, "centroid_noise_nm", "spectrometer.")
        if "centroid_noise_nm" in spm
        else 0.0
    )
    rnoise = (
        _number(spm, "relative_noise", "spectrometer.")
        if "relative_noise" in spm
        else 0.0
    )
    if cnoise < 0:
        raise InvalidConfigError("spectrometer.centroid_noise_nm: must be >= 0")
    if rnoise < 0:
        raise InvalidConfigError("spectrometer.relative_noise: must be >= 0")

    extended = cfg.get("extended_grid", True)
    if not isinstance(extended, bool):
        raise InvalidConfigError("extended_grid: must be true or false")
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise InvalidConfigError("seed: must be a non-negative integer")

    return SetupConfig(
        source=source,
        postsel=PostSelectionParams(beta, spread),
        plate=plate,
        alpha=alpha,
        dispersion=dispersion,
        spectrometer=SpectrometerParams(WavelengthGrid(start, step, count), cnoise, rnoise),
        extended_grid=extended,
        seed=seed,
    )


def config_to_dict(config: SetupConfig) -> dict:
    """Schema-form echo of a SetupConfig (usable directly via --config)."""
    return {
        "schema_version": SCHEMA_VERSION,
        "source": {
            "lambda0_nm": config.source.lambda0,
            "delta_lambda_nm": config.source.delta_lambda,
        },
        "alpha_rad": config.alpha,
        "plate": None
        if config.plate is None
        else {
            "theta_rad": config.plate.theta,
            "n0": config.plate.n0,
            "lambda0_design_nm": config.plate.lambda0_design,
        },
        "postselection": {
            "beta_rad": config.postsel.beta,
            "spread_rad": config.postsel.spread,
        },
        "dispersion": None
        if config.dispersion is None
        else {
            "thickness_mm": config.dispersion.thickness_mm,
            "index": config.dispersion.index,
        },
        "spectrometer": {
            "start_nm": config.spectrometer.grid.start,
            "step_nm": config.spectrometer.grid.step,
            "count": config.spectrometer.grid.count,
            "centroid_noise_nm": config.spectrometer.centroid_noise_nm,
            "relative_noise": config.spectrometer.relative_noise,
        },
        "extended_grid": config.extended_grid,
        "seed": config.seed,
    }


def _parse_dispersion_flag(text: str) -> dict | None:
    if text == "none":
        return None
    for name in _KNOWN_INDEX_MODELS:
        prefix = name + "_"
        if text.startswith(prefix) and text.endswith("mm"):
            try:
                thickness = float(text[len(prefix):-2])
            except ValueError:
                break
            return {"thickness_mm": thickness, "index": name}
    raise InvalidConfigError(
        f"--dispersion: expected 'none' or '<model>_<thickness>mm' "
        f"(e.g. znse_1mm), got {text!r}"
    )


def _parse_range(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidConfigError(f"range must be lo:hi:count, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InvalidConfigError(f"range must be lo:hi:count, got {text!r}") from None
    if n < 1 or hi < lo:
        raise InvalidConfigError(f"range must satisfy lo <= hi, count >= 1: {text!r}")
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def resolve_config(args) -> dict:
    """Merge defaults <- preset <- config file <- flags into a config dict."""
    cfg = copy.deepcopy(_DEFAULT_CONFIG)
    preset = getattr(args, "source", None)
    if preset is not None:
        if preset not in PRESETS:
            raise InvalidConfigError(
                f"--source: unknown preset {preset!r}; known: {sorted(PRESETS)}"
            )
        cfg = _deep_merge(cfg, PRESETS[preset])
    if getattr(args, "config", None):
        cfg = _deep_merge(cfg, load_config_file(args.config))
    if getattr(args, "alpha", None) is not None:
        cfg["alpha_rad"] = args.alpha
        cfg["plate"] = None
    if getattr(args, "theta", None) is not None:
        base_plate = cfg.get("plate") or {}
        cfg["plate"] = {
            "theta_rad": args.theta,
            "n0": base_plate.get("n0", 1.54),
            "lambda0_design_nm": base_plate.get(
                "lambda0_design_nm", cfg["source"]["lambda0_nm"]
            ),
        }
        cfg["alpha_rad"] = None
    if getattr(args, "beta", None) is not None and not isinstance(args.beta, list):
        cfg["postselection"]["beta_rad"] = args.beta
    if getattr(args, "spread", None) is not None:
        cfg["postselection"]["spread_rad"] = args.spread
    if getattr(args, "dispersion", None) is not None:
        cfg["dispersion"] = _parse_dispersion_flag(args.dispersion)
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    if getattr(args, "no_extended_grid", False):
        cfg["extended_grid"] = False
    return cfg


# ---------------------------------------------------------------------------
# output helpers


def _write_json(path: Path, record: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_manifest(
    out_dir: Path,
    command: str,
    parameters: dict,
    resolved_config: dict,
    outputs: list[str],
) -> Path:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "parameters": parameters,
        "config_file": parameters.get("config_file"),
        "resolved_config": resolved_config,
        "seed": resolved_config.get("seed"),
        "outputs": outputs,
    }
    path = out_dir / "run_manifest.json"
    _write_json(path, manifest)
    return path


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(args) -> int:
    cfg = resolve_config(args)
    if cfg.get("alpha_rad") is None and cfg.get("plate") is None:
        raise InvalidConfigError(
            "alpha_rad: set a phase (--alpha/--theta, config alpha_rad or plate)"
        )
    config = build_setup_config(cfg)
    if config.postsel.spread > 0:
        result = simulator.run_with_polarizer_spread(config, mode=args.spread_mode)
    else:
        result = simulator.run(config)
    measured = simulator.apply_spectrometer(result, config)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    spectrum_path = out_dir / "spectrum.csv"
    spectral.save_spectrum_csv(measured.output_spectrum, spectrum_path)

    def _report(value: float) -> float:
        return value if args.signed else abs(value)

    record = {
        "delta_lambda_nm": _report(result.delta_lambda),
        "postselect_prob": result.postselection_probability,
        "reference_centroid_nm": result.reference_centroid,
        "measured_delta_lambda_nm": _report(measured.delta_lambda),
        "measured_reference_centroid_nm": measured.reference_centroid,
        "alpha_rad": config.effective_alpha,
        "beta_rad": config.postsel.beta,
    }
    result_path = out_dir / "result.json"
    _write_json(result_path, record)
    write_manifest(
        out_dir,
        "simulate",
        {
            "config_file": args.config,
            "spread_mode": args.spread_mode,
            "signed": bool(args.signed),
        },
        config_to_dict(config),
        [spectrum_path.name, result_path.name],
    )
    print(
        f"delta_lambda_nm={record['delta_lambda_nm']:.9g} "
        f"postselect_prob={record['postselect_prob']:.9g} -> {out_dir}"
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.alpha_range is None and args.theta_range is None:
        raise InvalidConfigError("one of --alpha and --theta is required")
    if args.alpha_range is not None and args.theta_range is not None:
        raise InvalidConfigError("--alpha and --theta are mutually exclusive")
    cfg = resolve_config(args)
    if cfg.get("alpha_rad") is None and cfg.get("plate") is None:
        cfg["alpha_rad"] = 0.0  # placeholder; sweep overrides per row
    base = build_setup_config(cfg)

    alphas = _parse_range(args.alpha_range) if args.alpha_range else None
    thetas = _parse_range(args.theta_range) if args.theta_range else None
    rows = simulator.sweep(
        base,
        betas=args.beta,
        alphas=alphas,
        thetas=thetas,
        mode=args.spread_mode,
        threads=args.threads,
    )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    per_beta = len(rows) // len(args.beta)
    for i, beta in enumerate(args.beta):
        chunk = rows[i * per_beta : (i + 1) * per_beta]
        name = f"sweep_beta_{beta:g}.csv"
        simulator.write_sweep_csv(chunk, out_dir / name, signed=args.signed)
        outputs.append(name)
    failures = [row for row in rows if row.error is not None]
    for row in failures:
        print(
            f"warning: row alpha={row.alpha:.6g} beta={row.beta:.6g} failed: {row.error}",
            file=sys.stderr,
        )
    write_manifest(
        out_dir,
        "sweep",
        {
            "config_file": args.config,
            "betas": list(args.beta),
            "alpha_range": args.alpha_range,
            "theta_range": args.theta_range,
            "spread_mode": args.spread_mode,
            "threads": args.threads,
            "signed": bool(args.signed),
        },
        config_to_dict(base),
        outputs,
    )
    print(f"{len(rows)} rows ({len(failures)} failed) -> {out_dir}")
    return EXIT_OK


_MODE_ALIASES = {
    "analytic": "analytic",
    "simulated": "simulated",
    "spread": "simulated-with-spread",
    "simulated-with-spread": "simulated-with-spread",
}


def cmd_calibrate(args) -> int:
    cfg = resolve_config(args)
    if cfg.get("alpha_rad") is None and cfg.get("plate") is None:
        cfg["alpha_rad"] = 0.0  # phase comes from the calibration range
    base = build_setup_config(cfg)
    mode = _MODE_ALIASES[args.mode]
    if args.alpha_range is None:
        lo, hi = estimator.DEFAULT_ALPHA_RANGE
    else:
        parts = args.alpha_range.split(":")
        if len(parts) != 2:
            raise InvalidConfigError(
                f"--alpha-range must be lo:hi, got {args.alpha_range!r}"
            )
        try:
            lo, hi = float(parts[0]), float(parts[1])
        except ValueError:
            raise InvalidConfigError(
                f"--alpha-range must be lo:hi, got {args.alpha_range!r}"
            ) from None
    spread = base.postsel.spread
    if mode == "simulated-with-spread" and spread == 0.0:
        raise InvalidConfigError(
            "postselection.spread_rad: spread mode needs --spread > 0"
        )
    curve = estimator.build_calibration(
        beta=base.postsel.beta,
        source=base.source,
        alpha_range=(lo, hi),
        n_points=args.points,
        mode=mode,
        spread=spread,
    )
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    estimator.save_calibration(curve, out_path)
    write_manifest(
        out_path.parent,
        "calibrate",
        {
            "config_file": args.config,
            "beta": base.postsel.beta,
            "mode": mode,
            "alpha_range": [lo, hi],
            "points": args.points,
            "spread": spread,
        },
        config_to_dict(base),
        [out_path.name, out_path.with_suffix(".json").name],
    )
    print(
        f"calibration ({mode}, beta={curve.beta:g}, {curve.alphas.size} nodes, "
        f"shift range [{curve.shift_range[0]:.6g}, {curve.shift_range[1]:.6g}] nm) "
        f"-> {out_path}"
    )
    return EXIT_OK


def cmd_estimate(args) -> int:
    have_scalar = args.delta_lambda is not None
    have_files = args.spectrum is not None or args.reference is not None
    if have_scalar == have_files or (
        have_files and (args.spectrum is None or args.reference is None)
    ):
        raise InvalidConfigError(
            "provide exactly one input form: --delta-lambda, or both "
            "--spectrum and --reference"
        )
    curve = estimator.load_calibration(args.calibration)
    if have_scalar:
        measured = abs(args.delta_lambda)
    else:
        grid = spectral.SPECTROMETER_GRID
        reference = spectral.load_spectrum_csv(args.reference, grid)
        spectrum = spectral.load_spectrum_csv(args.spectrum, grid)
        measured = abs(spectral.shift_between(reference, spectrum))
    est = estimator.estimate_from_shift(curve, measured, args.sigma_dl)
    record = {
        "alpha_hat_rad": est.alpha_hat,
        "sigma_alpha_rad": est.sigma_alpha,
        "beta_used_rad": est.beta_used,
        "method": est.method,
        "measured_delta_lambda_nm": measured,
    }
    text = json.dumps(record, indent=2, sort_keys=True)
    print(text)
    if args.out:
        out_path = Path(args.out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        _write_json(out_path, record)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weaklight",
        description="White-light weak-measurement phase estimation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"weaklight {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file (schema in module docs)")
        p.add_argument(
            "--source",
            metavar="PRESET",
            help=f"source preset: {', '.join(sorted(PRESETS))}",
        )
        p.add_argument("--seed", type=int, help="master RNG seed")

    sim = sub.add_parser("simulate", help="run one configuration")
    add_common(sim)
    sim.add_argument("--alpha", type=float, help="phase parameter (rad)")
    sim.add_argument("--theta", type=float, help="plate tilt angle (rad)")
    sim.add_argument("--beta", type=float, help="post-selection parameter (rad)")
    sim.add_argument("--spread", type=float, help="polarizer angular uncertainty (rad)")
    sim.add_argument(
        "--spread-mode", choices=("exact", "paper"), default="exact",
        help="ensemble weighting when spread > 0",
    )
    sim.add_argument("--dispersion", help="'none' or '<model>_<thickness>mm' (znse_1mm)")
    sim.add_argument("--no-extended-grid", action="store_true",
                     help="run the physics on the spectrometer window itself")
    sim.add_argument("--signed", action="store_true",
                     help="report signed shifts instead of magnitudes")
    sim.add_argument("--out-dir", default="out", help="output directory")
    sim.set_defaults(func=cmd_simulate)

    swp = sub.add_parser("sweep", help="sweep phase and post-selection angle")
    add_common(swp)
    swp.add_argument("--beta", type=float, nargs="+", required=True,
                     help="post-selection parameter values (rad)")
    swp.add_argument("--alpha", dest="alpha_range", metavar="LO:HI:N",
                     help="phase parameter range")
    swp.add_argument("--theta", dest="theta_range", metavar="LO:HI:N",
                     help="tilt angle range (converted to phase per row)")
    swp.add_argument("--spread", type=float, help="polarizer angular uncertainty (rad)")
    swp.add_argument("--spread-mode", choices=("exact", "paper"), default="exact")
    swp.add_argument("--dispersion", help="'none' or '<model>_<thickness>mm'")
    swp.add_argument("--no-extended-grid", action="store_true")
    swp.add_argument("--signed", action="store_true")
    swp.add_argument("--threads", type=int, default=1, help="row-level parallelism")
    swp.add_argument("--out-dir", default="out", help="output directory")
    swp.set_defaults(func=cmd_sweep)

    cal = sub.add_parser("calibrate", help="build and persist a calibration curve")
    add_common(cal)
    cal.add_argument("--beta", type=float, required=True,
                     help="post-selection parameter (rad)")
    cal.add_argument("--mode", choices=tuple(_MODE_ALIASES), default="analytic")
    cal.add_argument("--alpha-range", metavar="LO:HI", help="phase range (default 0:0.013)")
    cal.add_argument("--points", type=int, default=estimator.DEFAULT_POINTS)
    cal.add_argument("--spread", type=float, help="polarizer angular uncertainty (rad)")
    cal.add_argument("--out", default="calibration.csv", help="output CSV path")
    cal.set_defaults(func=cmd_calibrate)

    est = sub.add_parser("estimate", help="invert a measured shift on a curve")
    est.add_argument("--calibration", required=True, help="calibration CSV path")
    est.add_argument("--delta-lambda", type=float, help="measured shift (nm)")
    est.add_argument("--spectrum", help="measured spectrum CSV")
    est.add_argument("--reference", help="reference spectrum CSV")
    est.add_argument("--sigma-dl", type=float, default=0.0,
                     help="one-sigma shift uncertainty (nm)")
    est.add_argument("--out", help="also write the estimate JSON here")
    est.set_defaults(func=cmd_estimate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (
        NoPhotonsError,
        OrthogonalPostselectionError,
        DegenerateSpectrumError,
        GridMismatchError,
    ) as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except CalibrationDomainError as exc:
        print(f"calibration error (non-invertible): {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except ExtrapolationRefusedError as exc:
        print(f"estimation error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION


if __name__ == "__main__":
    raise SystemExit(main())
