"""Configuration-driven experiment runner.

Usage:
    torus-echo <mode> --config <path> [--out <dir>] [--set key=value ...]
    torus-echo selftest

Modes: le-curve, le-sweep, purity-curve, purity-sweep, predict, selftest.

Config files are flat key = value text: one assignment per line, '#' starts
a comment, lists are comma separated.  Example:

    mode = purity-sweep
    N = 800
    a = 2
    b = 2
    k = 0.01
    model = gdm
    epsilon = 0.05, 0.08, 0.12, 0.2
    t_max = 12
    seed = 7

Any key can be overridden from the command line with --set key=value.
Outputs: one CSV per curve or sweep plus manifest.json in the output
directory.  Exit codes: 0 success, 1 config error, 2 runtime/fit error,
3 resource refusal.
"""

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .analysis import (
    dc_rate_prediction,
    gdm_rate_prediction,
    sweep_echo,
    sweep_purity,
)
from .decoherence import LORENTZ_DEFAULT_IMAGE_CUTOFF, build_kernel, purity_curve
from .dynamics import MapParams, build_propagator, lyapunov_closed_form
from .echo import PerturbationSpec, averaged_le
from .hilbert import coherent_state, make_space
from .rng import substream
from .selftest import run_selftest

MODES = ("le-curve", "le-sweep", "purity-curve", "purity-sweep", "predict", "selftest")
ECHO_MODES = ("le-curve", "le-sweep")
PURITY_MODES = ("purity-curve", "purity-sweep")
MODELS = ("gdm", "dc", "ldm", "mixture")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_RESOURCE = 3


class ConfigError(ValueError):
    pass


class ResourceRefusal(RuntimeError):
    pass


@dataclass
class RunConfig:
    mode: str
    N: int
    a: int = 2
    b: int = 2
    k: float = None  # mode-dependent default, see parse_config
    sigma_over_hbar: list = field(default_factory=list)
    epsilon: list = field(default_factory=list)
    model: Optional[str] = None
    mixture_weight: float = 0.5
    image_cutoff: int = LORENTZ_DEFAULT_IMAGE_CUTOFF
    t_max: Optional[int] = None
    n_states: int = 16
    seed: int = 1
    transient_skip: int = 2
    floor_factor: float = 3.0
    out_dir: str = "torus-echo-out"
    memory_cap_gib: float = 8.0


_INT_KEYS = ("N", "a", "b", "image_cutoff", "t_max", "n_states", "seed", "transient_skip")
_FLOAT_KEYS = ("k", "mixture_weight", "floor_factor", "memory_cap_gib")
_LIST_KEYS = ("sigma_over_hbar", "epsilon")
_STR_KEYS = ("mode", "model", "out_dir")
_ALL_KEYS = _INT_KEYS + _FLOAT_KEYS + _LIST_KEYS + _STR_KEYS


def _parse_scalar(key: str, text: str):
    text = text.strip()
    if key in _STR_KEYS:
        return text
    if key in _LIST_KEYS:
        items = [p.strip() for p in text.split(",") if p.strip()]
        try:
            return [float(p) for p in items]
        except ValueError:
            raise ConfigError(f"key '{key}' expects a comma-separated list of numbers, got {text!r}")
    if key in _INT_KEYS:
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"key '{key}' expects an integer, got {text!r}")
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"key '{key}' expects a number, got {text!r}")


def parse_config(text: str, overrides=()) -> RunConfig:
    """Parse and validate a flat key = value document, applying overrides."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"unknown key '{key}' (line {lineno})")
        raw[key] = _parse_scalar(key, value)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"unknown key '{key}' in --set")
        raw[key] = _parse_scalar(key, value)
    return _validate(raw)


def _validate(raw: dict) -> RunConfig:
    if "mode" not in raw:
        raise ConfigError("missing required key 'mode'")
    mode = raw["mode"]
    if mode not in MODES:
        raise ConfigError(f"key 'mode' must be one of {', '.join(MODES)}; got {mode!r}")

    if mode == "selftest":
        return RunConfig(mode=mode, N=raw.get("N", 8), k=raw.get("k", 0.0),
                         out_dir=raw.get("out_dir", "torus-echo-out"))

    needs_purity = mode in PURITY_MODES
    if "N" not in raw:
        if needs_purity:
            raw["N"] = 800
        else:
            raise ConfigError("missing required key 'N'")
    if raw["N"] <= 0:
        raise ConfigError(f"key 'N' must be a positive integer, got {raw['N']}")
    a, b = raw.get("a", 2), raw.get("b", 2)
    if a <= 0 or b <= 0 or a % 2 or b % 2:
        raise ConfigError(f"keys 'a'/'b' must be even positive integers, got a={a}, b={b}")
    if "k" not in raw:
        raw["k"] = 0.01 if (needs_purity or mode == "predict") else 0.0002

    if mode in ECHO_MODES:
        controls = raw.get("sigma_over_hbar", [])
        if not controls:
            raise ConfigError(f"mode '{mode}' requires a non-empty 'sigma_over_hbar' list")
        if any(c <= 0 for c in controls):
            raise ConfigError("key 'sigma_over_hbar' entries must be > 0")
        if raw.get("n_states", 16) < 1:
            raise ConfigError(f"key 'n_states' must be >= 1, got {raw['n_states']}")
    if needs_purity or mode == "predict":
        controls = raw.get("epsilon", [])
        if not controls:
            raise ConfigError(f"mode '{mode}' requires a non-empty 'epsilon' list")
        if any(e <= 0 for e in controls):
            raise ConfigError("key 'epsilon' entries must be > 0")
        if "model" not in raw:
            raise ConfigError(f"mode '{mode}' requires key 'model'")
        if raw["model"] not in MODELS:
            raise ConfigError(f"key 'model' must be one of {', '.join(MODELS)}; got {raw['model']!r}")
        if mode == "predict" and raw["model"] not in ("gdm", "dc"):
            raise ConfigError("mode 'predict' supports only models with analytic rates: gdm, dc")
        mw = raw.get("mixture_weight", 0.5)
        if not 0.0 <= mw <= 1.0:
            raise ConfigError(f"key 'mixture_weight' must be in [0, 1], got {mw}")
    if raw.get("t_max") is None:
        lam = lyapunov_closed_form(a, b)
        raw["t_max"] = int(np.ceil((np.log(raw["N"]) + 2.0) / lam))
    if raw["t_max"] < 1:
        raise ConfigError(f"key 't_max' must be >= 1, got {raw['t_max']}")
    if raw.get("seed", 1) < 0:
        raise ConfigError(f"key 'seed' must be a nonnegative integer, got {raw['seed']}")
    if raw.get("transient_skip", 2) < 0:
        raise ConfigError(f"key 'transient_skip' must be >= 0, got {raw['transient_skip']}")
    if raw.get("floor_factor", 3.0) <= 0:
        raise ConfigError(f"key 'floor_factor' must be > 0, got {raw['floor_factor']}")
    if raw.get("image_cutoff", LORENTZ_DEFAULT_IMAGE_CUTOFF) < 10:
        raise ConfigError(f"key 'image_cutoff' must be >= 10, got {raw['image_cutoff']}")
    return RunConfig(**raw)


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def _check_memory(config: RunConfig):
    if config.mode in PURITY_MODES:
        working_set = 12 * 16 * config.N ** 2
    else:
        working_set = 64 * 16 * config.N
    cap = config.memory_cap_gib * 2**30
    if working_set > cap:
        raise ResourceRefusal(
            f"estimated working set {working_set / 2**30:.1f} GiB exceeds cap "
            f"{config.memory_cap_gib} GiB (N={config.N}, mode={config.mode}); "
            "raise memory_cap_gib to force the run"
        )


def _write_curve_csv(path: Path, values: np.ndarray):
    lines = ["t,value,minus_ln_value"]
    for t, v in enumerate(values):
        mlv = _fmt(-np.log(v)) if v > 0 else "inf"
        lines.append(f"{t},{_fmt(v)},{mlv}")
    path.write_text("\n".join(lines) + "\n")


def _write_sweep_csv(path: Path, rows):
    lines = ["control,gamma,stderr,window_t1,window_t2,n_points,prediction"]
    for row in rows:
        pred = _fmt(row.prediction) if row.prediction is not None else ""
        if row.fit is None:
            lines.append(f"{_fmt(row.control)},,,,,,{pred}")
        else:
            f = row.fit
            lines.append(
                f"{_fmt(row.control)},{_fmt(f.gamma)},{_fmt(f.stderr)},"
                f"{f.window[0]},{f.window[1]},{f.n_points},{pred}"
            )
    path.write_text("\n".join(lines) + "\n")


def run(config: RunConfig) -> int:
    """Execute one configured run; returns the process exit code."""
    if config.mode == "selftest":
        return EXIT_OK if run_selftest(verbose=True) else EXIT_RUNTIME

    _check_memory(config)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    space = make_space(config.N)
    params = MapParams(config.a, config.b, config.k)
    row_status = []
    outputs = []
    had_error = False

    if config.mode == "le-curve":
        for i, soh in enumerate(config.sigma_over_hbar):
            pert = PerturbationSpec.from_sigma_over_hbar(space, config.k, soh)
            curve = averaged_le(space, params, pert, config.t_max,
                                config.n_states, config.seed)
            name = f"curve_le_{i:03d}.csv"
            _write_curve_csv(out_dir / name, curve.values)
            outputs.append(name)
            row_status.append({"control": soh, "status": "ok", "output": name})

    elif config.mode == "purity-curve":
        q0, p0 = substream(config.seed, 0).random(2)
        psi0 = coherent_state(space, q0, p0)
        prop = build_propagator(space, params)
        for i, eps in enumerate(config.epsilon):
            kernel = build_kernel(space, config.model, eps,
                                  config.mixture_weight, config.image_cutoff)
            curve = purity_curve(psi0, prop, kernel, config.t_max)
            name = f"curve_purity_{i:03d}.csv"
            _write_curve_csv(out_dir / name, curve.values)
            outputs.append(name)
            row_status.append({"control": eps, "status": "ok", "output": name})

    elif config.mode == "le-sweep":
        rows = sweep_echo(space, params, config.sigma_over_hbar, config.t_max,
                          config.n_states, config.seed,
                          transient_skip=config.transient_skip,
                          floor_factor=config.floor_factor)
        _write_sweep_csv(out_dir / "sweep.csv", rows)
        outputs.append("sweep.csv")
        for row in rows:
            status = "ok" if row.error is None else f"error: {row.error}"
            had_error = had_error or row.error is not None
            row_status.append({"control": row.control, "status": status, "output": "sweep.csv"})

    elif config.mode == "purity-sweep":
        rows = sweep_purity(space, params, config.model, config.epsilon,
                            config.t_max, config.seed,
                            mixture_weight=config.mixture_weight,
                            image_cutoff=config.image_cutoff,
                            transient_skip=config.transient_skip,
                            floor_factor=config.floor_factor)
        _write_sweep_csv(out_dir / "sweep.csv", rows)
        outputs.append("sweep.csv")
        for row in rows:
            status = "ok" if row.error is None else f"error: {row.error}"
            had_error = had_error or row.error is not None
            row_status.append({"control": row.control, "status": status, "output": "sweep.csv"})

    elif config.mode == "predict":
        lines = ["control,prediction"]
        for eps in config.epsilon:
            pred = (gdm_rate_prediction(eps, config.N) if config.model == "gdm"
                    else dc_rate_prediction(eps))
            lines.append(f"{_fmt(eps)},{_fmt(pred)}")
        (out_dir / "predictions.csv").write_text("\n".join(lines) + "\n")
        outputs.append("predictions.csv")
        for eps in config.epsilon:
            row_status.append({"control": eps, "status": "ok", "output": "predictions.csv"})

    manifest = {
        "version": __version__,
        "config": asdict(config),
        "duration_seconds": time.time() - started,
        "rows": row_status,
        "outputs": outputs,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    if had_error:
        failed = [r for r in row_status if r["status"] != "ok"]
        print(f"{len(failed)} row(s) failed:", file=sys.stderr)
        for r in failed:
            print(f"  control={r['control']}: {r['status']}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="torus-echo",
        description="Loschmidt echo / purity decay experiments on quantized torus maps",
    )
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", help="path to a key = value config file")
    parser.add_argument("--out", help="output directory (overrides out_dir)")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key")
    args = parser.parse_args(argv)

    try:
        text = ""
        if args.config:
            text = Path(args.config).read_text()
        elif args.mode != "selftest":
            parser.error(f"mode '{args.mode}' requires --config")
        overrides = [f"mode={args.mode}"] + list(args.overrides)
        if args.out:
            overrides.append(f"out_dir={args.out}")
        config = parse_config(text, overrides=overrides)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return run(config)
    except ResourceRefusal as err:
        print(f"refused: {err}", file=sys.stderr)
        return EXIT_RESOURCE
    except Exception as err:  # runtime failures map to exit 2
        print(f"runtime error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
