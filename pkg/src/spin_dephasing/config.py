"""Run configuration: an INI file with sections, overridable key by key.

Example::

    [model]
    n_sites = 4
    lambda = 1.0
    beta = 1.0

    [cutoff]
    family = gaussian
    scale = 1.0

Every key is addressed as ``section.key`` (e.g. ``model.beta``); command-line
flags override file values.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bath import FAMILIES, CutoffFunction, SpectralFunctions
from .model import SpinChainModel


class ConfigError(ValueError):
    pass


def _floats(text):
    """Comma or space separated numbers; fractions such as ``1/3`` are allowed."""
    if isinstance(text, (list, tuple)):
        return tuple(float(Fraction(str(x))) for x in text)
    return tuple(float(Fraction(x)) for x in str(text).replace(",", " ").split())


def _optional_float(text):
    if text is None or str(text).strip().lower() in ("", "none", "auto"):
        return None
    return float(text)


# dotted key -> (field name, parser)
KEYS = {
    "model.n_sites": ("n_sites", int),
    "model.lambda": ("lam", float),
    "model.beta": ("beta", float),
    "cutoff.family": ("cutoff_family", str),
    "cutoff.scale": ("cutoff_scale", float),
    "cutoff.exponent": ("cutoff_exponent", float),
    "coefficients.source": ("coefficient_source", str),
    "coefficients.b": ("b_override", _optional_float),
    "tolerances.quad_tol": ("quad_tol", float),
    "tolerances.tail_tol": ("tail_tol", float),
    "tolerances.t_max": ("t_max", float),
    "tolerances.ode_step": ("ode_step", float),
    "tolerances.theorem_tol": ("theorem_tol", float),
    "time.t_start": ("t_start", float),
    "time.t_end": ("t_end", float),
    "time.points": ("points", int),
    "time.spacing": ("spacing", str),
    "decoherence.epsilon": ("epsilon", float),
    "theorem.observable": ("theorem_observable", str),
    "theorem.horizon": ("theorem_horizon", _optional_float),
    "pointer.s": ("s_values", _floats),
    "run.seed": ("seed", int),
}


@dataclass(frozen=True)
class RunConfig:
    n_sites: int = 4
    lam: float = 1.0
    beta: float = 1.0
    cutoff_family: str = "gaussian"
    cutoff_scale: float = 1.0
    cutoff_exponent: float = 3.0
    coefficient_source: str = "closed_form"
    b_override: float | None = None
    quad_tol: float = 1e-10
    tail_tol: float = 1e-6
    t_max: float = 200.0
    ode_step: float = 1e-3
    theorem_tol: float = 1e-8
    t_start: float = 0.0
    t_end: float = 10.0
    points: int = 101
    spacing: str = "linear"
    epsilon: float = 0.01
    theorem_observable: str = "random"
    theorem_horizon: float | None = None
    s_values: tuple = field(default=(0.5, 1.0 / 3.0))
    seed: int = 0

    def __post_init__(self):
        for name in ("lam", "beta", "cutoff_scale", "quad_tol", "tail_tol", "t_max", "ode_step", "theorem_tol"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be positive, got {v!r}")
        if self.n_sites < 1:
            raise ConfigError("model.n_sites must be >= 1")
        if self.cutoff_family not in FAMILIES:
            raise ConfigError(f"cutoff.family must be one of {FAMILIES}")
        if self.cutoff_family == "algebraic" and not self.cutoff_exponent > 2:
            raise ConfigError("cutoff.exponent must exceed 2")
        if self.coefficient_source not in ("closed_form", "bath_numerical"):
            raise ConfigError("coefficients.source must be closed_form or bath_numerical")
        if self.spacing not in ("linear", "log"):
            raise ConfigError("time.spacing must be linear or log")
        if self.points < 1:
            raise ConfigError("time.points must be >= 1")
        if not 0 <= self.t_start <= self.t_end:
            raise ConfigError("time grid needs 0 <= t_start <= t_end")
        if self.spacing == "log" and self.t_start <= 0:
            raise ConfigError("log spacing needs t_start > 0")
        if not 0 < self.epsilon < 1:
            raise ConfigError("decoherence.epsilon must lie in (0, 1)")
        if self.theorem_observable not in ("random", "diagonal"):
            raise ConfigError("theorem.observable must be random or diagonal")
        if any(not 0 <= s <= 1 for s in self.s_values):
            raise ConfigError("pointer.s values must lie in [0, 1]")
        if self.seed < 0:
            raise ConfigError("run.seed must be nonnegative")

    def model(self) -> SpinChainModel:
        return SpinChainModel(self.n_sites, self.lam, self.beta)

    def cutoff(self) -> CutoffFunction:
        return CutoffFunction(self.cutoff_family, self.cutoff_scale, self.cutoff_exponent)

    def spectral(self) -> SpectralFunctions:
        return SpectralFunctions(self.beta, self.cutoff())

    def times(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.t_start, self.t_end, self.points)
        return np.linspace(self.t_start, self.t_end, self.points)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def to_dict(self) -> dict:
        """Resolved configuration, keyed by section."""
        out = {}
        for dotted, (name, _) in KEYS.items():
            section, key = dotted.split(".")
            value = getattr(self, name)
            out.setdefault(section, {})[key] = list(value) if isinstance(value, tuple) else value
        return out


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Read an INI file (optional) and apply ``{"section.key": value}`` overrides."""
    values = {}
    if path is not None:
        parser = configparser.ConfigParser()
        with open(path) as fh:
            parser.read_file(fh)
        for section in parser.sections():
            for key, raw in parser.items(section):
                values[f"{section}.{key}"] = raw
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})

    kwargs = {}
    for dotted, raw in values.items():
        if dotted not in KEYS:
            raise ConfigError(f"unknown configuration key {dotted!r}")
        name, parse = KEYS[dotted]
        try:
            kwargs[name] = parse(raw)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad value for {dotted}: {raw!r}") from exc
    try:
        return RunConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def replace(config: RunConfig, **changes) -> RunConfig:
    return dataclasses.replace(config, **changes)
