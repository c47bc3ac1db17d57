"""Key-value configuration files, typed campaign resolution, run manifests.

Config files are plain `key = value` lines ('#' starts a comment). Every
campaign resolves missing keys to its dataclass defaults, so an empty file
yields the headline parameter sets, and the resolved snapshot is echoed
into the run manifest for exact replay.
"""

import dataclasses
import json
from dataclasses import dataclass

from .experiments import (
    DEFAULT_SEED,
    Fig2Config,
    Fig4Config,
    VARIANT_FREE_SIMILAR,
    VARIANT_ZEALOT_SIMILAR,
)


class ConfigError(Exception):
    """A configuration problem; the message names the offending field."""


def load_config(path):
    """Parse a key = value file into a raw string dict."""
    raw = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, value = line.split("=", 1)
            key = key.strip()
            if not key:
                raise ConfigError(f"{path}:{lineno}: empty key")
            if key in raw:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            raw[key] = value.strip()
    return raw


def _as_int(name, value, lo=None):
    try:
        if isinstance(value, float) and not value.is_integer():
            raise ValueError
        v = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected an integer, got {value!r}") from None
    if lo is not None and v < lo:
        raise ConfigError(f"{name}: must be >= {lo}, got {v}")
    return v


def _as_float(name, value, lo=None, hi=None):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a number, got {value!r}") from None
    if lo is not None and v < lo:
        raise ConfigError(f"{name}: must be >= {lo}, got {v}")
    if hi is not None and v > hi:
        raise ConfigError(f"{name}: must be <= {hi}, got {v}")
    return v


def _as_choice(name, value, choices):
    if value not in choices:
        raise ConfigError(f"{name}: expected one of {sorted(map(str, choices))}, got {value!r}")
    return value


def _as_grid(name, value):
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip()]
    elif isinstance(value, (list, tuple)):
        parts = value
    else:
        raise ConfigError(f"{name}: expected a comma-separated list, got {value!r}")
    if not parts:
        raise ConfigError(f"{name}: must not be empty")
    return tuple(_as_float(name, p, lo=0.0, hi=1.0) for p in parts)


def _check_unknown(raw, known, context):
    unknown = sorted(set(raw) - set(known))
    if unknown:
        raise ConfigError(f"{context}: unknown field(s) {', '.join(unknown)}")


_FIG2_FIELDS = {
    "n": lambda v: _as_int("n", v, lo=2),
    "sigma": lambda v: _as_float("sigma", v, lo=0.0),
    "alpha": lambda v: _as_float("alpha", v, lo=0.0),
    "beta": lambda v: _as_float("beta", v, lo=0.0),
    "runs_per_point": lambda v: _as_int("runs_per_point", v, lo=1),
    "repeats": lambda v: _as_int("repeats", v, lo=1),
    "variant": lambda v: _as_choice("variant", v, (VARIANT_ZEALOT_SIMILAR, VARIANT_FREE_SIMILAR)),
    "scenario": lambda v: _as_choice("scenario", _as_int("scenario", v), (1, 2)),
    "max_steps": lambda v: _as_int("max_steps", v, lo=0),
    "seed": lambda v: _as_int("seed", v),
}

_FIG4_FIELDS = {
    "n": lambda v: _as_int("n", v, lo=2),
    "m_edges": lambda v: _as_int("m_edges", v, lo=1),
    "sigma": lambda v: _as_float("sigma", v, lo=0.0),
    "alpha": lambda v: _as_float("alpha", v, lo=0.0),
    "beta": lambda v: _as_float("beta", v, lo=0.0),
    "ensembles": lambda v: _as_int("ensembles", v, lo=1),
    "rho0_grid": lambda v: _as_grid("rho0_grid", v),
    "omega_grid": lambda v: _as_grid("omega_grid", v),
    "stationarity_tol": lambda v: (
        None if isinstance(v, str) and v.lower() == "none"
        else _as_float("stationarity_tol", v, lo=0.0)
    ),
    "seed": lambda v: _as_int("seed", v),
}


def _resolve(raw, fields, cls, context):
    _check_unknown(raw, fields, context)
    kwargs = {}
    for key, convert in fields.items():
        if key in raw and raw[key] is not None:
            kwargs[key] = convert(raw[key])
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def resolve_fig2(raw):
    """Raw mapping -> Fig2Config; missing keys take the headline defaults."""
    return _resolve(raw, _FIG2_FIELDS, Fig2Config, "fig2")


def resolve_fig4(raw):
    """Raw mapping -> Fig4Config; missing keys take the headline defaults."""
    return _resolve(raw, _FIG4_FIELDS, Fig4Config, "fig4")


@dataclass(frozen=True)
class SimulateSettings:
    """Single-run settings for the simulate subcommand."""

    graph: str = "star"
    scenario: int = 1
    variant: str = VARIANT_ZEALOT_SIMILAR
    n: int = 40
    m: int = 0
    m_edges: int = 1500
    omega: float = 0.5
    rho0: float = 0.09
    steps: int = 10_000
    sigma: float = 0.2
    alpha: float = 1.5
    beta: float = 1.0
    seed: int = DEFAULT_SEED
    snapshot_every: int = None
    record_node: int = None

    def __post_init__(self):
        if self.graph not in ("star", "two-community"):
            raise ValueError(f"graph: expected 'star' or 'two-community', got {self.graph!r}")


_SIMULATE_FIELDS = {
    "graph": lambda v: _as_choice("graph", v, ("star", "two-community")),
    "scenario": lambda v: _as_choice("scenario", _as_int("scenario", v), (1, 2)),
    "variant": lambda v: _as_choice("variant", v, (VARIANT_ZEALOT_SIMILAR, VARIANT_FREE_SIMILAR)),
    "n": lambda v: _as_int("n", v, lo=2),
    "m": lambda v: _as_int("m", v, lo=0),
    "m_edges": lambda v: _as_int("m_edges", v, lo=1),
    "omega": lambda v: _as_float("omega", v, lo=0.0, hi=1.0),
    "rho0": lambda v: _as_float("rho0", v, lo=0.0, hi=1.0),
    "steps": lambda v: _as_int("steps", v, lo=0),
    "sigma": lambda v: _as_float("sigma", v, lo=0.0),
    "alpha": lambda v: _as_float("alpha", v, lo=0.0),
    "beta": lambda v: _as_float("beta", v, lo=0.0),
    "seed": lambda v: _as_int("seed", v),
    "snapshot_every": lambda v: _as_int("snapshot_every", v, lo=0),
    "record_node": lambda v: _as_int("record_node", v, lo=0),
}


def resolve_simulate(raw):
    return _resolve(raw, _SIMULATE_FIELDS, SimulateSettings, "simulate")


@dataclass
class RunManifest:
    """Everything needed to replay a run byte-for-byte (plus wall-clock)."""

    command: str
    version: str
    seed: int
    config: dict
    outputs: list
    duration_seconds: float

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        return cls(**data)

    def write(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_json())


def config_snapshot(cfg):
    """Resolved config as a plain dict (tuples flattened to lists for JSON)."""
    out = {}
    for key, value in dataclasses.asdict(cfg).items():
        out[key] = list(value) if isinstance(value, tuple) else value
    return out
