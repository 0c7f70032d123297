"""Scenario files: JSON configs with every default materialized.

Each command has a table of known keys and defaults.  Loading rejects
unknown keys, so a report that embeds the resolved scenario is enough to
reproduce the run.
"""

from __future__ import annotations

import copy
import json
import math
from pathlib import Path

from .errors import ConfigError

THRESHOLDS_VERIFY = {"commutator": 1e-7, "duality": 1e-12, "jacobi": 1e-12, "omega_spread": 1e-6}
THRESHOLDS_INTEGRATE = {"constraint": 1e-8, "oracle": 1e-5}

DEFAULTS = {
    "verify-group": {
        "group": None, "alpha": None, "points": 100, "seed": 0, "h_frame": 1e-5, "box": 1.0,
        "thresholds": THRESHOLDS_VERIFY,
    },
    "integrate": {
        "group": None, "alpha": None, "interval": [0.0, 1.0], "eta": {},
        "initial": {"alpha": [0.0, 0.0, 0.0], "beta": [0.0, 0.0, 0.0]},
        "step": 1e-3, "adaptive": False, "tol": 1e-9, "outputs": 11, "form": "specialized",
        "oracle_points": 0, "h_field": 1e-4, "box": 1.0, "seed": 0, "thresholds": THRESHOLDS_INTEGRATE,
    },
    "check-solution": {
        "case": None, "alpha": None, "constants": {}, "functions": {}, "interval": [0.0, 1.0], "variant": {},
        "perturb": {}, "samples": 50, "quad_tol": 1e-9, "threshold": 1e-6, "det_tol": 1e-8,
        "oracle_points": 0, "oracle_threshold": 1e-5, "h_field": 1e-4, "box": 1.0, "seed": 0,
    },
    "adjudicate": {
        "case": None, "alpha": None, "constants": {}, "functions": {}, "interval": [0.0, 1.0], "variant": {},
        "perturb": {}, "variants": None, "samples": 50, "quad_tol": 1e-9, "threshold": 1e-6, "det_tol": 1e-8,
        "seed": 0,
    },
}

REQUIRED = {"verify-group": ("group",), "integrate": ("group",), "check-solution": ("case",),
            "adjudicate": ("case",)}


def load_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}", "config") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
                          "config") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object", "config")
    return data


def _positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"must be an integer >= 1, got {value!r}", name)
    return value


def _nonneg_int(value, name):
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ConfigError(f"must be an integer >= 0, got {value!r}", name)
    return value


def _positive_real(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not (value > 0 and math.isfinite(value)):
        raise ConfigError(f"must be a positive number, got {value!r}", name)
    return float(value)


def _interval(value, name="interval"):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"must be [t0, t1], got {value!r}", name)
    t0, t1 = value
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(f"bounds must be finite numbers, got {value!r}", name)
    if not t1 > t0:
        raise ConfigError(f"interval [{t0}, {t1}] is degenerate (need t1 > t0)", name)
    return [float(t0), float(t1)]


def resolve(command: str, raw: dict, *, seed: int | None = None, points: int | None = None) -> dict:
    """Merge ``raw`` over the defaults for ``command`` and validate shapes."""
    defaults = DEFAULTS[command]
    unknown = sorted(set(raw) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown keys {unknown} for {command}; known: {sorted(defaults)}", unknown[0])
    sc = copy.deepcopy(defaults)
    for key, val in raw.items():
        if key == "thresholds":
            if not isinstance(val, dict):
                raise ConfigError("must be an object", "thresholds")
            bad = sorted(set(val) - set(defaults["thresholds"]))
            if bad:
                raise ConfigError(f"unknown thresholds {bad}", "thresholds")
            sc["thresholds"].update(val)
        else:
            sc[key] = copy.deepcopy(val)
    for key in REQUIRED[command]:
        if sc.get(key) is None:
            raise ConfigError(f"missing required key {key!r}", key)
    if seed is not None:
        sc["seed"] = seed
    if points is not None:
        sc["points" if command == "verify-group" else "oracle_points"] = points
    if isinstance(sc["seed"], bool) or not isinstance(sc["seed"], int):
        raise ConfigError(f"seed must be an integer, got {sc['seed']!r}", "seed")

    if command == "verify-group":
        _positive_int(sc["points"], "points")
        _positive_real(sc["h_frame"], "h_frame")
        _positive_real(sc["box"], "box")
    elif command == "integrate":
        sc["interval"] = _interval(sc["interval"])
        _positive_int(sc["outputs"], "outputs")
        _nonneg_int(sc["oracle_points"], "oracle_points")
        for key in ("step", "tol", "h_field", "box"):
            _positive_real(sc[key], key)
        if sc["form"] not in ("specialized", "generic", "printed"):
            raise ConfigError(f"form must be specialized, generic or printed, got {sc['form']!r}", "form")
        init = sc["initial"]
        if not isinstance(init, dict) or set(init) - {"alpha", "beta"}:
            raise ConfigError("initial must be {\"alpha\": [3 numbers], \"beta\": [3 numbers]}", "initial")
        for key in ("alpha", "beta"):
            vec = init.get(key, [0.0, 0.0, 0.0])
            if (not isinstance(vec, list) or len(vec) != 3
                    or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in vec)):
                raise ConfigError(f"must be a list of three numbers, got {vec!r}", f"initial.{key}")
            init[key] = [float(x) for x in vec]
    else:
        sc["interval"] = _interval(sc["interval"])
        _positive_int(sc["samples"], "samples")
        for key in ("quad_tol", "threshold", "det_tol"):
            _positive_real(sc[key], key)
        if command == "check-solution":
            _nonneg_int(sc["oracle_points"], "oracle_points")
    return sc


def dumps(report: dict) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=True) + "\n"
