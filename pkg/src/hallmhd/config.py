"""TOML run configuration: parse, validate, serialize, hash.

Experiments are config-defined so they can be archived and rerun; the
sha256 hash of the canonical serialization names every output file.
Validation errors carry the line number of the offending key when the
raw text is available.
"""

from __future__ import annotations

import hashlib
import json

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, asdict
from pathlib import Path

from .params import PhysParams


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "physics": {"beta": 1.0, "eta": 1.0, "gamma": 1.0, "s": 0.75,
                "K": 1.1, "R": 4.0, "delta": 1.0},
    "grid": {"n": 32, "dealias_fraction": 2.0 / 3.0},
    "time": {"dt": 0.0, "T": 0.25, "cfl_safety": 0.25,
             "probe_interval": 0.025},
    "initial": {"preset": "trig", "amplitude": 0.2,
                "e0_policy": "well_prepared", "seed": 0},
    "output": {"directory": "", "snapshot_interval": 0.0,
               "formats": ["csv", "json"]},
    "sweep": {"gamma_list": []},
}

_SCHEMA_TYPES = {
    ("physics", "beta"): float, ("physics", "eta"): float,
    ("physics", "gamma"): float, ("physics", "s"): float,
    ("physics", "K"): float, ("physics", "R"): float,
    ("physics", "delta"): float,
    ("grid", "n"): int, ("grid", "dealias_fraction"): float,
    ("time", "dt"): float, ("time", "T"): float,
    ("time", "cfl_safety"): float, ("time", "probe_interval"): float,
    ("initial", "preset"): str, ("initial", "amplitude"): float,
    ("initial", "e0_policy"): str, ("initial", "seed"): int,
    ("output", "directory"): str, ("output", "snapshot_interval"): float,
    ("output", "formats"): list,
    ("sweep", "gamma_list"): list,
}


@dataclass
class RunConfig:
    physics: dict = field(default_factory=lambda: dict(DEFAULTS["physics"]))
    grid: dict = field(default_factory=lambda: dict(DEFAULTS["grid"]))
    time: dict = field(default_factory=lambda: dict(DEFAULTS["time"]))
    initial: dict = field(default_factory=lambda: dict(DEFAULTS["initial"]))
    output: dict = field(default_factory=lambda: dict(DEFAULTS["output"]))
    sweep: dict = field(default_factory=lambda: dict(DEFAULTS["sweep"]))

    def params(self) -> PhysParams:
        p = self.physics
        return PhysParams(beta=p["beta"], eta=p["eta"], gamma=p["gamma"],
                          sobolev_s=p["s"], band_K=p["K"], band_R=p["R"],
                          band_delta=p["delta"])

    def as_dict(self) -> dict:
        return asdict(self)

    def config_hash(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True,
                          separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _find_line(text: str, section: str, key: str):
    in_section = False
    for i, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("["):
            in_section = stripped == f"[{section}]"
        elif in_section and stripped.split("=")[0].strip() == key:
            return i
    return None


def _fail(msg: str, text: str = "", section: str = "", key: str = ""):
    line = _find_line(text, section, key) if text else None
    loc = f" (line {line})" if line else ""
    raise ConfigError(msg + loc)


def parse_config(text: str) -> RunConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc
    cfg = RunConfig()
    for section, body in doc.items():
        if section not in DEFAULTS:
            _fail(f"unknown config section [{section}]")
        if not isinstance(body, dict):
            _fail(f"[{section}] must be a table")
        target = getattr(cfg, section)
        for key, value in body.items():
            if (section, key) not in _SCHEMA_TYPES:
                _fail(f"unknown key {key!r} in [{section}]",
                      text, section, key)
            want = _SCHEMA_TYPES[(section, key)]
            if want is float and isinstance(value, int):
                value = float(value)
            if not isinstance(value, want):
                _fail(f"[{section}] {key} must be {want.__name__}, "
                      f"got {type(value).__name__}", text, section, key)
            target[key] = value
    _validate(cfg, text)
    return cfg


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def _validate(cfg: RunConfig, text: str = "") -> None:
    try:
        cfg.params()
    except ValueError as exc:
        # map the failing parameter back to its config key for the line hint
        msg = str(exc)
        key = next((k for k, name in
                    (("gamma", "gamma"), ("beta", "beta"), ("eta", "eta"),
                     ("s", "sobolev_s"), ("K", "band_K"), ("R", "band_R"),
                     ("delta", "band_delta"))
                    if name in msg), "")
        _fail(f"invalid [physics]: {msg}", text, "physics", key)
    from .params import K_MAX_BANDS
    if not cfg.physics["K"] < K_MAX_BANDS:
        _fail(f"[physics] K must lie in (1, sqrt(5)/2), "
              f"got {cfg.physics['K']}", text, "physics", "K")
    g = cfg.grid
    if g["n"] < 8 or g["n"] % 2:
        _fail(f"[grid] n must be even and >= 8, got {g['n']}",
              text, "grid", "n")
    if not 0 < g["dealias_fraction"] <= 1:
        _fail("[grid] dealias_fraction must lie in (0, 1]",
              text, "grid", "dealias_fraction")
    t = cfg.time
    if t["T"] < 0:
        _fail("[time] T must be nonnegative", text, "time", "T")
    if t["dt"] < 0:
        _fail("[time] dt must be nonnegative (0 selects the automatic "
              "stability-bound policy)", text, "time", "dt")
    if not 0 < t["cfl_safety"] <= 1:
        _fail("[time] cfl_safety must lie in (0, 1]",
              text, "time", "cfl_safety")
    if t["probe_interval"] <= 0:
        _fail("[time] probe_interval must be positive",
              text, "time", "probe_interval")
    ini = cfg.initial
    if ini["preset"] not in ("trig", "random"):
        _fail(f"[initial] unknown preset {ini['preset']!r}",
              text, "initial", "preset")
    if ini["e0_policy"] not in ("zero", "well_prepared"):
        _fail(f"[initial] unknown e0_policy {ini['e0_policy']!r}",
              text, "initial", "e0_policy")
    if ini["amplitude"] <= 0:
        _fail("[initial] amplitude must be positive",
              text, "initial", "amplitude")
    gl = cfg.sweep["gamma_list"]
    if gl:
        vals = []
        for v in gl:
            if not isinstance(v, (int, float)) or not 0 < float(v) <= 1:
                _fail(f"[sweep] gamma_list entries must lie in (0, 1], "
                      f"got {v!r}", text, "sweep", "gamma_list")
            vals.append(float(v))
        if any(b >= a for a, b in zip(vals, vals[1:])):
            _fail("[sweep] gamma_list must be strictly decreasing",
                  text, "sweep", "gamma_list")
        cfg.sweep["gamma_list"] = vals
    for fmt in cfg.output["formats"]:
        if fmt not in ("csv", "json"):
            _fail(f"[output] unknown format {fmt!r}",
                  text, "output", "formats")


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g") if v != int(v) or abs(v) >= 1e16 \
            else f"{v:.1f}"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, list):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def serialize_config(cfg: RunConfig) -> str:
    lines = []
    for section in ("physics", "grid", "time", "initial", "output", "sweep"):
        body = getattr(cfg, section)
        lines.append(f"[{section}]")
        for key in sorted(body):
            lines.append(f"{key} = {_toml_value(body[key])}")
        lines.append("")
    return "\n".join(lines)
