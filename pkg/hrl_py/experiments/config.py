"""Experiment configuration: one JSON file plus KEY=VALUE overrides."""

import json
import os
from dataclasses import asdict, dataclass, fields
from typing import List, Optional

from hrl_py.algorithms.bootstrap import BootstrapConfig
from hrl_py.framework.errors import ConfigurationError
from hrl_py.framework.sphere import SUPPORTED_DIMENSIONS
from hrl_py.utils.misc import parse_override

_FIELD_KINDS = {
    "seed": "int",
    "n": "int",
    "map": "str",
    "boundary": "str",
    "atlas": "str",
    "points": "int",
    "quad_degree": "int",
    "k_max": "int",
    "density": "int",
    "mu": "float",
    "eta": "list",
    "pairs": "int",
    "mori_pairs": "int",
    "chart_pairs": "int",
    "oracle": "bool",
    "slack": "float",
    "constant_slack": "float",
    "eta_count": "int",
    "final_k_max": "int",
    "global_pairs": "int",
    "progress": "bool",
}
_OPTIONAL = ("atlas", "quad_degree", "eta")


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_kind(value, kind):
    if kind == "int":
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == "float":
        return _is_number(value)
    if kind == "bool":
        return isinstance(value, bool)
    if kind == "str":
        return isinstance(value, str)
    return isinstance(value, list) and all(_is_number(v) for v in value)


@dataclass
class ExperimentConfig:
    """Everything an experiment run depends on.

    Attributes:
        seed (int): seed of every random sampler; required.
        n (int): dimension.
        map (str): gallery map name.
        boundary (str): boundary data selector for extend/gradient/decay/holder:
            "trace", "constant:<c>", "coordinate:<j>", "distance-power",
            "harmonic:<degree>:<index>" or "file:<path>" (a JSON list of
            polynomial terms).
        atlas (str): chart atlas file replacing the gallery domain.
        points (int): evaluation points for extend/gradient.
        quad_degree (int): degree of a fixed uniform rule; graded rules when None.
        k_max (int): depth of the geometric r grid, 1 - r = 2^{-k}.
        density (int): grid points per halving of 1 - r.
        mu (float): Holder exponent for decay/holder.
        eta (list): boundary point for decay and anchored estimates (e_n by default).
        pairs (int): sampled pairs for Holder estimates.
        oracle (bool): add closed-form oracle columns when the data is harmonic.
    """

    seed: int
    n: int = 2
    map: str = "identity"
    boundary: str = "trace"
    atlas: Optional[str] = None
    points: int = 10
    quad_degree: Optional[int] = None
    k_max: int = 10
    density: int = 1
    mu: float = 0.5
    eta: Optional[List[float]] = None
    pairs: int = 2000
    mori_pairs: int = 100000
    chart_pairs: int = 10000
    oracle: bool = False
    slack: float = 0.05
    constant_slack: float = 0.05
    eta_count: int = 16
    final_k_max: int = 12
    global_pairs: int = 64
    progress: bool = False

    def validate(self):
        for name, kind in _FIELD_KINDS.items():
            value = getattr(self, name)
            if value is None and name in _OPTIONAL:
                continue
            if not _is_kind(value, kind):
                raise ConfigurationError("%s must be of type %s, got %r" % (name, kind, value))
        if self.n not in SUPPORTED_DIMENSIONS:
            raise ConfigurationError("n must be one of %s, got %r" % (SUPPORTED_DIMENSIONS, self.n))
        if self.points < 1 or self.pairs < 1:
            raise ConfigurationError("points and pairs must be positive")
        if self.k_max < 1 or self.density < 1:
            raise ConfigurationError("k_max and density must be positive")
        if not self.mu > 0.0:
            raise ConfigurationError("mu must be positive, got %r" % (self.mu,))
        if self.quad_degree is not None and self.quad_degree < 1:
            raise ConfigurationError("quad_degree must be positive, got %r" % (self.quad_degree,))
        for name in ("mori_pairs", "chart_pairs", "eta_count", "final_k_max", "global_pairs"):
            if getattr(self, name) < 1:
                raise ConfigurationError("%s must be positive" % name)
        if self.slack < 0.0 or self.constant_slack < 0.0:
            raise ConfigurationError("slack and constant_slack must be non-negative")
        if self.eta is not None and len(self.eta) != self.n:
            raise ConfigurationError("eta must have %d entries" % self.n)
        return self

    def bootstrap_config(self):
        return BootstrapConfig(
            k_max=self.k_max,
            final_k_max=self.final_k_max,
            slack=self.slack,
            constant_slack=self.constant_slack,
            eta_count=self.eta_count,
            mori_pairs=self.mori_pairs,
            global_pairs=self.global_pairs,
            seed=self.seed,
            progress=self.progress,
        )

    def to_dict(self):
        return asdict(self)


def config_from_dict(data):
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigurationError("Unknown configuration keys: %s" % ", ".join(unknown))
    if "seed" not in data:
        raise ConfigurationError("The configuration must set 'seed'")
    return ExperimentConfig(**data).validate()


def load_config(path=None, overrides=()):
    """Reads the JSON file at `path` (if any) and applies KEY=VALUE overrides."""
    data = {}
    if path is not None:
        if not os.path.exists(path):
            raise ConfigurationError("Config file %s does not exist" % path)
        with open(path) as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigurationError("Config file %s is not valid JSON: %s" % (path, e))
        if not isinstance(data, dict):
            raise ConfigurationError("Config file %s must hold a JSON object" % path)
    for text in overrides:
        try:
            key, value = parse_override(text)
        except ValueError as e:
            raise ConfigurationError(str(e))
        data[key] = value
    return config_from_dict(data)
