"""Experiment configuration: defaults, key=value files, flag overrides, hashing.

Config files use one ``key = value`` pair per line (same names as the CLI
flags); command-line flags override file values.  Every field has a default
and the whole config round-trips losslessly through ``to_dict``/``from_dict``,
which is also what the config hash is computed from.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError

CONSTRUCTIONS = (
    "davenport",
    "weierstrass",
    "prescribed",
    "two-exponent",
    "multinomial",
    "cascade",
    "transference",
)


def parse_profile(text: str):
    """Profile micro-format: kind:comma-separated-params, e.g. 'affine:0.3,0.4'."""
    from .generators import HolderProfile

    kind, _, raw = text.partition(":")
    kind = kind.strip()
    if kind not in ("constant", "affine", "sinusoid", "piecewise-linear", "table"):
        raise ConfigError(f"profile: unknown kind {kind!r}")
    try:
        params = tuple(float(v) for v in raw.split(",")) if raw else ()
    except ValueError as exc:
        raise ConfigError(f"profile: bad parameter list {raw!r}") from exc
    if kind in ("piecewise-linear", "table"):
        if len(params) % 2 or len(params) < 4:
            raise ConfigError(f"profile: {kind} needs paired t,v lists")
        half = len(params) // 2
        params = (params[:half], params[half:])
    return HolderProfile(kind, params)


def parse_law(text: str, b: int):
    """Weight-law micro-format, e.g. 'two-point:0.2,0.8' or 'lognormal:0.7'."""
    from .measures import CascadeSpec

    name, _, raw = text.partition(":")
    name = name.strip()
    try:
        params = tuple(float(v) for v in raw.split(",")) if raw else ()
    except ValueError as exc:
        raise ConfigError(f"law: bad parameter list {raw!r}") from exc
    if name == "two-point" and len(params) == 2:
        params = (*params, 0.5)
    return CascadeSpec(b=b, law=name, params=params)


def _parse_range(text: str, n_fields: int, name: str) -> tuple:
    parts = text.split(":")
    if len(parts) != n_fields:
        raise ConfigError(f"{name}: expected {n_fields} colon-separated values, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"{name}: non-numeric component in {text!r}") from exc


@dataclass
class ExperimentConfig:
    construction: str = "davenport"
    params: dict = field(default_factory=dict)
    wavelet: str = "db4"
    levels: int = 14
    fit: tuple[int, int] | None = None
    pgrid: tuple[float, float, int] = (-10.0, 10.0, 81)
    qgrid: tuple[float, float, int] = (-10.0, 10.0, 81)
    hgrid: tuple[float, float, int] = (0.0, 2.0, 201)
    points: tuple[float, ...] = ()
    seed: int = 0
    out: str = "."
    format: str = "mfs1"
    figures: bool = True
    oscillation: bool = False
    tau: bool = False

    def __post_init__(self):
        if self.construction not in CONSTRUCTIONS:
            raise ConfigError(
                f"construction: {self.construction!r} not one of {CONSTRUCTIONS}"
            )
        if self.format not in ("mfs1", "csv"):
            raise ConfigError(f"format: must be mfs1 or csv, got {self.format!r}")
        if not 3 <= self.levels <= 24:
            raise ConfigError(f"levels: need 3 <= J <= 24, got {self.levels}")
        if not (self.wavelet.startswith("db") and self.wavelet[2:].isdigit()):
            raise ConfigError(f"wavelet: expected dbN, got {self.wavelet!r}")
        for x in self.points:
            if not 0.0 <= x < 1.0:
                raise ConfigError(f"points: {x} outside [0, 1)")
        if self.fit is not None and self.fit[1] - self.fit[0] < 4:
            raise ConfigError(f"fit: window {self.fit} shorter than 4 scales")

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        kwargs = {}
        for f in fields(cls):
            if f.name not in doc:
                continue
            v = doc[f.name]
            if f.name in ("pgrid", "qgrid", "hgrid"):
                v = (float(v[0]), float(v[1]), int(v[2]))
            elif f.name == "fit" and v is not None:
                v = (int(v[0]), int(v[1]))
            elif f.name == "points":
                v = tuple(float(x) for x in v)
            kwargs[f.name] = v
        return cls(**kwargs)

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True)
        return "sha256:" + hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def grids(self):
        import numpy as np

        p = np.unique(
            np.concatenate(
                [np.linspace(*self.pgrid[:2], int(self.pgrid[2])), [-0.1, 0.0, 0.1]]
            )
        )
        q = np.unique(
            np.concatenate(
                [np.linspace(*self.qgrid[:2], int(self.qgrid[2])), [-0.1, 0.0, 0.1]]
            )
        )
        h = np.linspace(*self.hgrid[:2], int(self.hgrid[2]))
        return p, q, h


def load_config_file(path) -> dict:
    """Parse a key=value config file into a raw override dict."""
    doc: dict = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip().replace("-", "_"), value.strip()
        doc[key] = value
    return doc


def apply_overrides(base: ExperimentConfig, raw: dict) -> ExperimentConfig:
    """Apply string-valued overrides (from file or flags) onto a config."""
    doc = base.to_dict()
    for key, value in raw.items():
        if value is None:
            continue
        if key not in doc and key != "param":
            raise ConfigError(f"{key}: unknown configuration key")
        if key in ("levels", "seed"):
            doc[key] = int(value)
        elif key in ("figures", "oscillation", "tau"):
            doc[key] = value if isinstance(value, bool) else value.lower() in ("1", "true", "yes")
        elif key == "fit":
            j1, j2 = _parse_range(str(value), 2, "fit")
            doc[key] = [int(j1), int(j2)]
        elif key in ("pgrid", "qgrid", "hgrid"):
            lo, hi, n = _parse_range(str(value), 3, key)
            doc[key] = [lo, hi, int(n)]
        elif key == "points":
            if isinstance(value, str):
                try:
                    doc[key] = [float(v) for v in value.split(",") if v.strip()]
                except ValueError as exc:
                    raise ConfigError(f"points: bad list {value!r}") from exc
            else:
                doc[key] = list(value)
        elif key == "params":
            doc[key] = dict(value)
        else:
            doc[key] = value
    return ExperimentConfig.from_dict(doc)
