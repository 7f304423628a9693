"""Flat ``key = value`` experiment configuration.

One key per line, ``#`` starts a comment, blank lines are ignored.  An empty
value leaves the field at its default (used for optional overrides such as
``beta``).
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace

EXPERIMENTS = ("heat_decay", "heat_optimality", "wave_energy", "diffusion_phenomenon", "property_suite")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "heat_decay"
    N: int = 3
    alpha: float = 0.0
    a0: float = 1.0
    profile: str = "pure_power"
    delta: float = 0.0
    r0: float = 1.0
    R0: float = 3.0
    amplitude: float = 1.0
    velocity: float = 1.0
    T: float = 2000.0
    cfl: float = 0.5
    dr: float = 0.05
    beta: float | None = None
    eps_shift: float = 0.05
    window_lo: float | None = None     # defaults to T/10
    samples: int = 24                  # log-spaced samples inside the fit window
    early_samples: int = 8             # log-spaced samples in [early_start, window_lo)
    early_start: float = 1.0
    heat_cap: float = 0.05             # dt <= heat_cap * (1 + t)
    R: float | None = None             # optimality radius, defaults to 2 * r0
    trials: int = 100                  # property_suite: Hardy trial functions
    seed: int = 42
    out: str = ""
    name: str = ""

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        if self.N < 2:
            raise ConfigError("N must be >= 2")
        if not 0 <= self.alpha < 1:
            raise ConfigError("alpha must lie in [0, 1)")
        if self.profile not in ("pure_power", "perturbed_power"):
            raise ConfigError(f"unknown profile {self.profile!r}")
        if self.profile == "pure_power" and self.delta != 0:
            raise ConfigError("delta must be 0 for a pure_power profile")
        if self.a0 <= 0 or self.delta < 0:
            raise ConfigError("need a0 > 0 and delta >= 0")
        if not 0 < self.r0 < self.R0:
            raise ConfigError("need 0 < r0 < R0")
        if self.T <= 0 or self.dr <= 0:
            raise ConfigError("T and dr must be positive")
        if not 0 < self.cfl <= 0.5:
            raise ConfigError("cfl must lie in (0, 0.5]")
        if self.samples < 8:
            raise ConfigError("need at least 8 samples in the fit window")
        lo = self.fit_window[0]
        if not 0 < lo or self.T / lo < 10 * (1 - 1e-9):
            raise ConfigError("fit window must span at least one decade")
        if self.R is not None and self.R < 2 * self.r0:
            raise ConfigError("optimality radius R must be at least 2 * r0")

    @property
    def fit_window(self) -> tuple[float, float]:
        return (self.T / 10 if self.window_lo is None else self.window_lo, self.T)

    @property
    def radius(self) -> float:
        return 2 * self.r0 if self.R is None else self.R

    @property
    def ident(self) -> str:
        if self.name:
            return self.name
        return f"{self.experiment}_N{self.N}_alpha{self.alpha:g}"


_FIELDS = {f.name: f for f in fields(ExperimentConfig)}


def _convert(key: str, raw: str):
    f = _FIELDS[key]
    typ = str(f.type)
    if raw == "":
        return f.default
    try:
        if typ.startswith("int"):
            return int(raw)
        if typ.startswith("float"):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return raw


def parse(text: str) -> ExperimentConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, raw)
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize(cfg: ExperimentConfig) -> str:
    return "".join(f"{name} = {_format(getattr(cfg, name))}".rstrip() + "\n" for name in _FIELDS)


def load(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse(fh.read())


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
