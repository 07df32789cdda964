"""
Run configuration: TOML file, command-line flags and defaults.

Precedence is flags > file > defaults. The seed default is read from
EIGENBATH_SEED.
"""

from dataclasses import dataclass, field, fields
import os
from pathlib import Path
from typing import Optional

import toml

from eigenbath.dynamics import INITIAL_STATES
from eigenbath.ensembles import MAX_SEED
from eigenbath.lib.errors import ConfigError
from eigenbath.spinbath import INTRA_KINDS, ZEEMAN_SAMPLINGS
from eigenbath.subspace import band_degeneracy

SEED_ENV = "EIGENBATH_SEED"

TASKS = ("lambda-dist", "evolve", "sweep", "gue-pdf", "report")
ABSTRACT_FAMILIES = ("gue", "structured_degenerate", "structured_equidistant")
SPIN_FAMILIES = ("spin_star", "spin_ring", "spin_inhomogeneous")
FAMILIES = ABSTRACT_FAMILIES + SPIN_FAMILIES
COUPLING_KINDS = ("random", "flip_flop")
FLOAT_FIELDS = (
    "delta_s",
    "delta_c",
    "delta_eps",
    "zeeman_center",
    "zeeman_spread",
    "scale",
    "intra_strength",
    "t_max",
)

# TOML section of every config key.
SECTIONS = {
    "model": ("family", "g", "g_prime", "n_env", "band_k", "delta_s", "delta_c", "resonant"),
    "spectrum": ("delta_eps", "zeeman_center", "zeeman_spread", "zeeman_sampling"),
    "coupling": ("scale", "kind", "intra_kind", "intra_strength"),
    "run": (
        "task",
        "samples",
        "seed",
        "jobs",
        "bins",
        "scales",
        "t_max",
        "time_samples",
        "initial",
        "out",
    ),
}

# Config keys whose dataclass field has another name.
RENAMED = {"kind": "coupling_kind"}


@dataclass
class RunConfig:
    task: str = "report"
    family: Optional[str] = None
    g: Optional[int] = None
    g_prime: Optional[int] = None
    n_env: Optional[int] = None
    band_k: Optional[int] = None
    delta_s: float = 1.0
    delta_c: float = 1.0
    resonant: bool = True
    delta_eps: float = 0.0
    zeeman_center: float = 1.0
    zeeman_spread: float = 0.2
    zeeman_sampling: str = "stratified"
    scale: float = 1.0
    coupling_kind: str = "random"
    intra_kind: Optional[str] = None
    intra_strength: float = 1.0
    samples: int = 1
    seed: int = 0
    jobs: int = 1
    bins: int = 50
    scales: list[float] = field(default_factory=lambda: [0.25 * i for i in range(17)])
    t_max: Optional[float] = None
    time_samples: int = 2000
    initial: str = "mixed"
    out: Path = Path("out")

    @property
    def is_spin_family(self) -> bool:
        return self.family in SPIN_FAMILIES

    def validate(self) -> "RunConfig":
        """Checks field presence and ranges; raises ConfigError."""
        if self.task not in TASKS:
            raise ConfigError("task", f"must be one of {', '.join(TASKS)}")
        if self.task != "gue-pdf" and self.family is None:
            raise ConfigError("family", "is required")
        if self.family is not None and self.family not in FAMILIES:
            raise ConfigError("family", f"must be one of {', '.join(FAMILIES)}")
        _check_int(self, "samples", minimum=1)
        _check_int(self, "seed", minimum=0)
        if self.seed > MAX_SEED:
            raise ConfigError("seed", "must fit in 64 bits")
        _check_int(self, "jobs", minimum=1)
        _check_int(self, "bins", minimum=1)
        _check_int(self, "time_samples", minimum=2)
        for name in FLOAT_FIELDS:
            value = getattr(self, name)
            if value is None and name == "t_max":
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(name, f"must be a number, got {value!r}")
        if self.family in SPIN_FAMILIES:
            _check_int(self, "n_env", minimum=1)
            _check_int(self, "band_k", minimum=0)
            if self.band_k > self.n_env - 1:
                raise ConfigError("band_k", f"must be below n_env={self.n_env}")
        elif self.family in ABSTRACT_FAMILIES or self.task == "gue-pdf":
            _check_int(self, "g", minimum=1)
            _check_int(self, "g_prime", minimum=1)
        if self.family == "structured_equidistant" and self.delta_eps <= 0:
            raise ConfigError("delta_eps", "must be positive for equidistant bands")
        if self.coupling_kind not in COUPLING_KINDS:
            raise ConfigError("coupling.kind", f"must be one of {', '.join(COUPLING_KINDS)}")
        if self.intra_kind not in INTRA_KINDS:
            raise ConfigError("intra_kind", f"must be one of {', '.join(INTRA_KINDS)}")
        if self.family != "spin_ring" and self.intra_kind != "none":
            raise ConfigError("intra_kind", "intra-bath coupling needs the spin_ring family")
        for name in ("scale", "delta_eps", "zeeman_spread", "intra_strength"):
            if getattr(self, name) < 0:
                raise ConfigError(name, "must be non-negative")
        if self.scale == 0:
            raise ConfigError("scale", "must be positive")
        if not self.scales or any(s < 0 for s in self.scales):
            raise ConfigError("scales", "must be a non-empty list of non-negative values")
        if self.t_max is not None and self.t_max <= 0:
            raise ConfigError("t_max", "must be positive")
        if not isinstance(self.resonant, bool):
            raise ConfigError("resonant", f"must be true or false, got {self.resonant!r}")
        if self.zeeman_sampling not in ZEEMAN_SAMPLINGS:
            raise ConfigError("zeeman_sampling", f"must be one of {', '.join(ZEEMAN_SAMPLINGS)}")
        if self.initial not in INITIAL_STATES:
            raise ConfigError("initial", f"must be one of {', '.join(INITIAL_STATES)}")
        return self

    def metadata(self) -> dict:
        """Key-value pairs recorded in output headers."""
        meta = {"task": self.task, "family": self.family, "seed": self.seed}
        if self.family in SPIN_FAMILIES:
            meta.update(
                g=band_degeneracy(self.n_env, self.band_k),
                g_prime=band_degeneracy(self.n_env, self.band_k + 1),
                n_env=self.n_env,
                band_k=self.band_k,
                resonant=self.resonant,
            )
        else:
            meta.update(g=self.g, g_prime=self.g_prime)
        meta["samples"] = self.samples
        if self.task == "evolve":
            meta["initial"] = self.initial
        return meta


def _check_int(config: RunConfig, name: str, minimum: int):
    value = getattr(config, name)
    if value is None:
        raise ConfigError(name, "is required")
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(name, f"must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(name, f"must be at least {minimum}, got {value}")


def default_seed() -> int:
    text = os.environ.get(SEED_ENV)
    if text is None:
        return 0
    try:
        return int(text, 0)
    except ValueError:
        raise ConfigError(SEED_ENV, f"is not an integer: {text!r}")


def read_config_file(path: Path) -> dict:
    """Flattens a TOML run configuration into RunConfig field names."""
    try:
        document = toml.load(path)
    except toml.TomlDecodeError as e:
        raise ConfigError(str(path), f"malformed TOML: {e}")
    except OSError as e:
        raise ConfigError(str(path), f"cannot read config: {e.strerror}")
    values = {}
    for section, table in document.items():
        if section not in SECTIONS:
            raise ConfigError(section, "unknown config section")
        if not isinstance(table, dict):
            raise ConfigError(section, "must be a table")
        for key, value in table.items():
            if key not in SECTIONS[section]:
                raise ConfigError(f"{section}.{key}", "unknown config key")
            values[RENAMED.get(key, key)] = value
    return values


def load_config(path: Optional[Path] = None, overrides: Optional[dict] = None) -> RunConfig:
    """Merges defaults, config file and flag overrides, then validates."""
    values = {"seed": default_seed()}
    if path is not None:
        values.update(read_config_file(path))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    names = {f.name for f in fields(RunConfig)}
    unknown = set(values) - names
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown setting")
    if "out" in values:
        if not isinstance(values["out"], (str, os.PathLike)):
            raise ConfigError("out", f"must be a path, got {values['out']!r}")
        values["out"] = Path(values["out"])
    if "scales" in values:
        try:
            values["scales"] = [float(s) for s in values["scales"]]
        except (TypeError, ValueError):
            raise ConfigError("scales", "must be a list of numbers")
    config = RunConfig(**values)
    if config.family == "spin_ring" and config.intra_kind is None:
        config.intra_kind = "xx_plus_yy"
    if config.intra_kind is None:
        config.intra_kind = "none"
    return config.validate()
