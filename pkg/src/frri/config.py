"""Flat ``key = value`` experiment configuration with environment overrides.

Every key can be overridden by an environment variable ``FRRI_<KEY>``
(upper case), e.g. ``FRRI_THETA=0.3``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .evaluation import Variant
from .fuzzy import Implicator, TNorm
from .induction import FRRIConfig

ENV_PREFIX = "FRRI_"

STANDARD_VARIANTS = ("control", "ofrfs-1", "ofrfs-0.9", "ofrfs-0.8", "ofrfs-0",
                  "mi-1", "mi-0.9", "mi-0.8", "pcc-1", "pcc-0.9", "pcc-0.8")


class ConfigError(ValueError):
    pass


def _optional_float(text: str) -> float | None:
    return None if text.strip().lower() in ("", "none") else float(text)


def _bool(text: str) -> bool:
    s = text.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _list(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.replace("\n", ",").split(",") if x.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[str, ...] = ()
    variants: tuple[str, ...] = STANDARD_VARIANTS
    folds: int = 10
    seed: int = 0
    theta: float = 0.5
    scale: float = 1.0
    epsilon: float = 0.0
    tnorm: str = TNorm.MINIMUM.value
    implicator: str = Implicator.LUKASIEWICZ.value
    node_budget: int = 5_000_000
    time_limit: float | None = None
    jobs: int = 1
    output: str = "report"
    label_column: str = "class"
    fold_files: bool = True
    base_dir: str = field(default=".", compare=False)

    _parsers = {"datasets": _list, "variants": _list, "folds": int, "seed": int, "theta": float,
                "scale": float, "epsilon": float, "tnorm": str, "implicator": str, "node_budget": int,
                "time_limit": _optional_float, "jobs": int, "output": str, "label_column": str,
                "fold_files": _bool}

    def __post_init__(self):
        try:
            for v in self.variants:
                Variant.parse(v)
            self.frri_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if not self.variants:
            raise ConfigError("at least one variant is required")

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls) if f.name != "base_dir"]

    @classmethod
    def from_mapping(cls, values: dict[str, str], base_dir: str = ".") -> "ExperimentConfig":
        kwargs = {}
        for key, text in values.items():
            if key not in cls._parsers:
                raise ConfigError(f"unknown config key {key!r}; known keys: {', '.join(cls.keys())}")
            try:
                kwargs[key] = cls._parsers[key](text)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {exc}") from None
        return cls(base_dir=base_dir, **kwargs)

    @classmethod
    def load(cls, path: str | Path | None = None, overrides: dict[str, str] | None = None,
             environ=os.environ) -> "ExperimentConfig":
        values: dict[str, str] = {}
        base = "."
        if path is not None:
            path = Path(path)
            base = str(path.parent)
            values.update(parse_text(path.read_text(encoding="utf-8")))
        for key in cls._parsers:
            env = environ.get(ENV_PREFIX + key.upper())
            if env is not None:
                values[key] = env
        values.update(overrides or {})
        return cls.from_mapping(values, base)

    def frri_config(self) -> FRRIConfig:
        return FRRIConfig(TNorm(self.tnorm), Implicator(self.implicator), self.scale, self.epsilon,
                          self.theta, self.node_budget, self.time_limit)

    def dataset_paths(self) -> list[Path]:
        return [p if p.is_absolute() else Path(self.base_dir) / p for p in map(Path, self.datasets)]

    def resolved(self) -> dict[str, str]:
        out = {}
        for key in self.keys():
            v = getattr(self, key)
            out[key] = ", ".join(v) if isinstance(v, tuple) else ("none" if v is None else str(v).lower()
                                                                   if isinstance(v, bool) else str(v))
        return out

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.resolved().items())


def parse_text(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; indented lines continue the previous value."""
    values = {}
    last = None
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if line[:1].isspace() and "=" not in s and last is not None:
            values[last] = f"{values[last]} {s}".strip()
            continue
        key, sep, value = s.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        last = key.strip().lower()
        values[last] = value.strip()
    return values
