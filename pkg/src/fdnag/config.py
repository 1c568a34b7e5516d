"""Run specification files (INI) and ``key=value`` overrides.

Every key lives in exactly one section, so overrides may use the bare key
(``seed=3``) or the qualified form (``generation.seed=3``).
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .codec import Genotype, SearchSpaceShape
from .engine import ConfigError, GenerationConfig
from .selection import SelectionConfig

_BOOL = {"true": True, "yes": True, "on": True, "1": True,
         "false": False, "no": False, "off": False, "0": False}


def _bool(s: str) -> bool:
    try:
        return _BOOL[s.strip().lower()]
    except KeyError:
        raise ValueError(f"not a boolean: {s!r}") from None


def _seed(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise ValueError("seed must fit in 64 bits")
    return v


SCHEMA: dict[str, dict[str, tuple[Callable[[str], object], object]]] = {
    "generation": {
        "d1": (int, 6),
        "d2": (int, 5),
        "n": (int, 30),
        "steps": (int, 100),
        "abar_start": (float, 1 - 1e-4),
        "abar_end": (float, 1e-4),
        "sigma": (float, 0.8),
        "sigma_mode": (str, "scaled"),
        "beta": (float, 10.0),
        "seed": (_seed, 0),
        "topk": (int, 5),
        "guidance": (_bool, True),
        "use_selection": (_bool, True),
        "record_timing": (_bool, False),
    },
    "selection": {
        "frac_elite": (float, 0.10),
        "frac_diverse": (float, 0.20),
        "frac_roulette": (float, 0.70),
    },
    "oracle": {
        "type": (str, "planted"),
        "path": (str, ""),
        "allow_partial": (_bool, False),
        "floor": (float, 0.0),
        "cache": (_bool, True),
        "optimum": (str, ""),
        "smoothness": (float, 0.05),
        "table_seed": (int, 0),
        "dim": (int, 8),
    },
    "output": {
        "out": (str, "runs/latest"),
    },
}

ORACLE_TYPES = ("tabular", "planted", "sphere", "rastrigin")
_SECTION_OF = {key: sec for sec, keys in SCHEMA.items() for key in keys}


@dataclass
class RunSpec:
    values: dict[str, dict[str, object]] = field(
        default_factory=lambda: {s: {k: d for k, (_, d) in keys.items()} for s, keys in SCHEMA.items()}
    )

    def __getitem__(self, key: str):
        return self.values[_SECTION_OF[key]][key]

    def set(self, key: str, raw: str) -> None:
        section, name = _resolve(key)
        conv = SCHEMA[section][name][0]
        try:
            self.values[section][name] = conv(raw.strip()) if conv is not str else raw.strip()
        except ValueError as e:
            raise ConfigError(f"bad value for {section}.{name}: {raw!r} ({e})") from None

    @property
    def shape(self) -> SearchSpaceShape:
        try:
            return SearchSpaceShape(self["d1"], self["d2"])
        except ValueError as e:
            raise ConfigError(str(e)) from None

    def generation_config(self) -> GenerationConfig:
        g = self.values["generation"]
        try:
            sel = SelectionConfig(**self.values["selection"])
            return GenerationConfig(
                shape=self.shape, n=g["n"], steps=g["steps"], abar_start=g["abar_start"],
                abar_end=g["abar_end"], sigma=g["sigma"], sigma_mode=g["sigma_mode"], beta=g["beta"],
                selection=sel, seed=g["seed"], topk=g["topk"], guidance=g["guidance"],
                use_selection=g["use_selection"], record_timing=g["record_timing"],
            )
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(str(e)) from None

    def oracle_section(self) -> dict:
        o = dict(self.values["oracle"])
        if o["type"] not in ORACLE_TYPES:
            raise ConfigError(f"oracle type must be one of {ORACLE_TYPES}, got {o['type']!r}")
        if o["type"] == "tabular" and not o["path"]:
            raise ConfigError("oracle type 'tabular' needs a path")
        if o["type"] == "planted":
            try:
                opt = Genotype.parse(o["optimum"], self.shape) if o["optimum"] else None
            except ValueError as e:
                raise ConfigError(f"bad planted optimum: {e}") from None
            o["optimum"] = str(opt) if opt else ""
        return o

    def echo(self) -> dict:
        """Effective settings for the result document (output location excluded)."""
        return {s: dict(v) for s, v in self.values.items() if s != "output"}


def _resolve(key: str) -> tuple[str, str]:
    if "." in key:
        section, name = key.split(".", 1)
        if section not in SCHEMA or name not in SCHEMA[section]:
            raise ConfigError(f"unknown config key {key!r}")
        return section, name
    if key not in _SECTION_OF:
        raise ConfigError(f"unknown config key {key!r}")
    return _SECTION_OF[key], key


def load_runspec(path=None, overrides: list[str] | tuple = ()) -> RunSpec:
    """Defaults, then the file (if any), then ``key=value`` overrides."""
    spec = RunSpec()
    if path is not None:
        path = Path(path)
        cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
        cp.optionxform = str
        try:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e.strerror or e}") from None
        except configparser.Error as e:
            raise ConfigError(f"cannot parse config {path}: {e}") from None
        for section in cp.sections():
            if section not in SCHEMA:
                raise ConfigError(f"{path}: unknown section [{section}]")
            for key, raw in cp.items(section):
                if key not in SCHEMA[section]:
                    raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
                spec.set(f"{section}.{key}", raw)
        p = spec.values["oracle"]["path"]
        if p and not Path(p).is_absolute():
            spec.values["oracle"]["path"] = str(path.parent / p)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        k, v = item.split("=", 1)
        spec.set(k.strip(), v)
    return spec
