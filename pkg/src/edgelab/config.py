"""Experiment configurations as frozen dataclasses.

Defaults reproduce the acceptance settings. ``dump`` writes JSON with
17-digit floats and ``load`` rebuilds the dataclass, so a config survives a
round trip through its file unchanged.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

DEFAULT_SEED = 2024


@dataclass(frozen=True)
class NullRateConfig:
    xi: float = 1.0
    ns: tuple = (50, 100, 200, 400, 800)
    reps: int = 4000
    seed: int = DEFAULT_SEED
    dist: str = "gaussian"
    workers: int = 1


@dataclass(frozen=True)
class UniversalityConfig:
    xi: float = 0.5
    n: int = 400
    reps: int = 4000
    seed: int = DEFAULT_SEED
    dists: tuple = ("gaussian", "rademacher")


@dataclass(frozen=True)
class RigidityConfig:
    xis: tuple = (0.25, 1.0)
    n: int = 300
    reps: int = 200
    hard_ns: tuple = (100, 200, 400)
    seed: int = DEFAULT_SEED
    epsilon: float = 0.1
    omega: float = 0.1


@dataclass(frozen=True)
class CouplingConfig:
    n: int = 200
    xi: float = 0.5
    runs: int = 100
    seed: int = DEFAULT_SEED
    dt: float = 2e-4
    probe_times: tuple = (0.02, 0.05, 0.1, 0.2)


@dataclass(frozen=True)
class CharacteristicsConfig:
    xi: float = 0.25
    n: float = 1e9
    phi: float = 50.0
    edge_e: float = 1.49
    bulk_z: tuple = (1.0, 1e-3)
    times: tuple = (0.01, 0.1, 0.5)
    integral_times: tuple = (0.05, 0.5)


@dataclass(frozen=True)
class SeparableConfig:
    xi: float = 0.5
    ns: tuple = (100, 200, 400)
    reps: int = 2000
    seed: int = DEFAULT_SEED
    atoms: tuple = (1.0, 2.0)
    workers: int = 1


def dump(cfg) -> str:
    from .cli import dumps

    return dumps({"kind": type(cfg).__name__, **asdict(cfg)})


def load(cls, text: str):
    raw = json.loads(text)
    kind = raw.pop("kind", cls.__name__)
    if kind != cls.__name__:
        raise ValueError(f"config is a {kind}, expected {cls.__name__}")
    names = {f.name for f in fields(cls)}
    unknown = set(raw) - names
    if unknown:
        raise ValueError(f"unknown config field(s): {', '.join(sorted(unknown))}")
    return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in raw.items()})


def load_file(cls, path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    return load(cls, path.read_text())
