"""Scenario configuration and reproducible run records.

Configs are flat JSON objects; unknown keys are rejected outright because a
silently ignored typo in a physics configuration is worse than an error.
Run records echo the full effective configuration so any run can be
reproduced from its record alone, and serialise losslessly (floats are
written in shortest round-trip form by the json module).
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import ConfigError

FOCK_MODELS = ("harmonic", "quartic", "custom-polynomial")
ALL_MODELS = FOCK_MODELS + ("spin1",)

_COMMON_KEYS = {"model", "t0", "t1", "n", "format", "output"}
_FOCK_KEYS = {"hbar", "dim", "p0", "q0", "fiducial", "fiducial_vector",
              "evolution", "extended_generators", "classical_rhs",
              "hamiltonian_terms"}
_SPIN_KEYS = {"lambda", "spin_theta0", "spin_theta_rate", "spin_phi0",
              "spin_phi_rate"}

_DEFAULT_FIDUCIAL = {
    "harmonic": "oscillator_ground",
    "quartic": "hamiltonian_ground",
    "custom-polynomial": "hamiltonian_ground",
}


def _require_finite_number(cfg: dict, key: str, default=None) -> float:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return float(default)
    val = cfg[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"key {key!r} must be a number, got {val!r}")
    if not np.isfinite(val):
        raise ConfigError(f"key {key!r} must be finite, got {val!r}")
    return float(val)


def validate_scenario(cfg: Any) -> dict:
    """Check one scenario config and fill defaults; returns the effective dict."""
    if not isinstance(cfg, dict):
        raise ConfigError(f"scenario must be a JSON object, got {type(cfg).__name__}")
    model = cfg.get("model")
    if model not in ALL_MODELS:
        raise ConfigError(f"unknown or missing model {model!r}; "
                          f"choose from {', '.join(ALL_MODELS)}")
    allowed = _COMMON_KEYS | (_SPIN_KEYS if model == "spin1" else _FOCK_KEYS)
    unknown = set(cfg) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    out: dict[str, Any] = {"model": model}
    out["t0"] = _require_finite_number(cfg, "t0", 0.0)
    out["t1"] = _require_finite_number(cfg, "t1")
    if out["t1"] <= out["t0"]:
        raise ConfigError(f"need t1 > t0, got [{out['t0']}, {out['t1']}]")
    n = cfg.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 4 or n % 2:
        raise ConfigError(f"n must be an even integer >= 4, got {n!r}")
    out["n"] = n
    fmt = cfg.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"format must be 'json' or 'csv', got {fmt!r}")
    out["format"] = fmt
    out["output"] = cfg.get("output")
    if out["output"] is not None and not isinstance(out["output"], str):
        raise ConfigError("output must be a path string")

    if model == "spin1":
        out["lambda"] = _require_finite_number(cfg, "lambda", 1.0)
        out["spin_theta0"] = _require_finite_number(cfg, "spin_theta0")
        out["spin_theta_rate"] = _require_finite_number(cfg, "spin_theta_rate", 0.0)
        out["spin_phi0"] = _require_finite_number(cfg, "spin_phi0", 0.0)
        out["spin_phi_rate"] = _require_finite_number(cfg, "spin_phi_rate", 0.0)
        for t in (out["t0"], out["t1"]):
            theta = out["spin_theta0"] + out["spin_theta_rate"] * (t - out["t0"])
            if not (0.0 <= theta <= np.pi):
                raise ConfigError(
                    f"theta leaves [0, pi] over the time window (theta({t:g}) "
                    f"= {theta:g})"
                )
        return out

    out["hbar"] = _require_finite_number(cfg, "hbar", 1.0)
    if out["hbar"] <= 0:
        raise ConfigError(f"hbar must be positive, got {out['hbar']}")
    dim = cfg.get("dim", 64)
    if dim != "auto" and (not isinstance(dim, int) or isinstance(dim, bool)
                          or dim < 4):
        raise ConfigError(f"dim must be an integer >= 4 or 'auto', got {dim!r}")
    out["dim"] = dim
    out["p0"] = _require_finite_number(cfg, "p0", 0.0)
    out["q0"] = _require_finite_number(cfg, "q0", 0.0)
    fiducial = cfg.get("fiducial", _DEFAULT_FIDUCIAL[model])
    if fiducial not in ("oscillator_ground", "hamiltonian_ground", "explicit"):
        raise ConfigError(f"unknown fiducial kind {fiducial!r}")
    out["fiducial"] = fiducial
    if fiducial == "explicit":
        vec = cfg.get("fiducial_vector")
        if (not isinstance(vec, list) or not vec
                or not all(isinstance(x, list) and len(x) == 2 for x in vec)):
            raise ConfigError("fiducial_vector must be a list of [re, im] pairs")
        out["fiducial_vector"] = [[float(a), float(b)] for a, b in vec]
    elif "fiducial_vector" in cfg:
        raise ConfigError("fiducial_vector only applies to fiducial='explicit'")

    evolution = cfg.get("evolution", "classical")
    if evolution not in ("classical", "schrodinger"):
        raise ConfigError(f"evolution must be 'classical' or 'schrodinger', "
                          f"got {evolution!r}")
    out["evolution"] = evolution

    rhs = cfg.get("classical_rhs", "bare")
    if rhs not in ("bare", "expectation"):
        raise ConfigError(f"classical_rhs must be 'bare' or 'expectation', "
                          f"got {rhs!r}")
    if evolution == "schrodinger" and "classical_rhs" in cfg:
        raise ConfigError("classical_rhs does not apply to evolution="
                          "'schrodinger'")
    out["classical_rhs"] = rhs

    gens = cfg.get("extended_generators", [])
    if not isinstance(gens, list):
        raise ConfigError("extended_generators must be a list of [p_power, "
                          "q_power] pairs")
    if gens and evolution == "schrodinger":
        raise ConfigError("extended_generators only apply to classical "
                          "(coherent-path) scenarios")
    cleaned = []
    for g in gens:
        if (not isinstance(g, list) or len(g) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool)
                           and x >= 0 for x in g)):
            raise ConfigError(f"bad generator spec {g!r}; expected "
                              f"[p_power, q_power] with non-negative integers")
        cleaned.append([g[0], g[1]])
    out["extended_generators"] = cleaned

    if model == "custom-polynomial":
        terms = cfg.get("hamiltonian_terms")
        if not isinstance(terms, list) or not terms:
            raise ConfigError("custom-polynomial needs hamiltonian_terms, a "
                              "list of [coeff, p_power, q_power]")
        out["hamiltonian_terms"] = [list(t) for t in terms]
    elif "hamiltonian_terms" in cfg:
        raise ConfigError("hamiltonian_terms only applies to custom-polynomial")
    return out


def validate_pair(cfg: Any) -> dict:
    """Check a pair config: two scenarios plus shared output options."""
    if not isinstance(cfg, dict):
        raise ConfigError("pair config must be a JSON object")
    unknown = set(cfg) - {"first", "second", "format", "output"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "first" not in cfg or "second" not in cfg:
        raise ConfigError("pair config needs 'first' and 'second' scenarios")
    first = validate_scenario(cfg["first"])
    second = validate_scenario(cfg["second"])
    for key in ("t0", "t1", "n"):
        if first[key] != second[key]:
            raise ConfigError(f"pair scenarios must share the grid; {key!r} "
                              f"differs ({first[key]!r} vs {second[key]!r})")
    fmt = cfg.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"format must be 'json' or 'csv', got {fmt!r}")
    return {"first": first, "second": second, "format": fmt,
            "output": cfg.get("output")}


def validate_scan(cfg: Any) -> dict:
    """Check a scan config: one scenario plus the hbar list."""
    if not isinstance(cfg, dict):
        raise ConfigError("scan config must be a JSON object")
    if "hbars" not in cfg:
        raise ConfigError("scan config needs an 'hbars' list")
    hbars = cfg["hbars"]
    if not isinstance(hbars, list) or not hbars:
        raise ConfigError("hbars must be a non-empty list of positive numbers")
    for h in hbars:
        if isinstance(h, bool) or not isinstance(h, (int, float)) \
                or not np.isfinite(h) or h <= 0:
            raise ConfigError(f"bad hbar value {h!r}")
    rest = {k: v for k, v in cfg.items() if k != "hbars"}
    scenario = validate_scenario(rest)
    if scenario["model"] not in FOCK_MODELS:
        raise ConfigError("hbar scans only apply to oscillator models")
    scenario["hbars"] = [float(h) for h in hbars]
    return scenario


def record_to_json(record: dict) -> str:
    return json.dumps(record, indent=2, sort_keys=True)


def _fmt(x) -> str:
    return repr(float(x))


def trace_csv(times, columns: dict[str, Any], summary: dict[str, Any]) -> str:
    """Trace table as CSV: header, one row per node, '#key=value' footer lines."""
    names = list(columns)
    lines = [",".join(["t"] + names)]
    for i, t in enumerate(times):
        lines.append(",".join([_fmt(t)] + [_fmt(columns[c][i]) for c in names]))
    for key, val in summary.items():
        if isinstance(val, bool):
            lines.append(f"#{key}={'true' if val else 'false'}")
        elif isinstance(val, (int, float)):
            lines.append(f"#{key}={_fmt(val)}")
        else:
            lines.append(f"#{key}={val}")
    return "\n".join(lines) + "\n"


def rows_csv(header: list[str], rows: list[list], summary: dict[str, Any]) -> str:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for x in row:
            cells.append(str(x) if isinstance(x, int) else _fmt(x))
        lines.append(",".join(cells))
    for key, val in summary.items():
        if isinstance(val, bool):
            lines.append(f"#{key}={'true' if val else 'false'}")
        else:
            lines.append(f"#{key}={val if isinstance(val, str) else _fmt(val)}")
    return "\n".join(lines) + "\n"
