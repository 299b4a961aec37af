"""Run configuration, hashing, and reproducible output bundles.

Every output file starts with comment lines carrying the configuration
hash, the package version and the seed, and floats are written with 17
significant digits, so re-running the same configuration reproduces the
bundle byte for byte.
"""

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .chain import ChainGeometry, RHModel
from .constants import ATOMIC_MASS, YB171_MASS_AMU
from .errors import ConfigError
from .units import to_angular

__all__ = [
    "config_hash",
    "canonical_json",
    "RunBundle",
    "format_float",
    "load_model",
    "model_to_config",
    "load_chain_spec",
]

FLOAT_FORMAT = "%.17g"


def format_float(x):
    return FLOAT_FORMAT % float(x)


def canonical_json(obj) -> str:
    """Deterministic JSON encoding (sorted keys, no whitespace)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def config_hash(config: dict) -> str:
    """12-hex-digit digest identifying a run configuration.

    The output directory is excluded: where a bundle lands must not change
    its contents (re-running the same physics config reproduces the files
    byte for byte wherever they are written).
    """
    stripped = {k: v for k, v in config.items() if k != "out"}
    return hashlib.sha256(canonical_json(stripped).encode()).hexdigest()[:12]


@dataclass
class RunBundle:
    """A run's outputs: config snapshot, data files, log, wall time."""

    config: dict
    out_dir: Path
    outputs: list = field(default_factory=list)
    log_lines: list = field(default_factory=list)
    wall_time: float = 0.0
    _started: float = field(default_factory=time.monotonic, repr=False)

    def __post_init__(self):
        self.out_dir = Path(self.out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.hash = config_hash(self.config)

    @property
    def seed(self):
        return self.config.get("seed", 0)

    def meta_lines(self):
        return [
            f"# config_hash={self.hash}",
            f"# version={__version__}",
            f"# seed={self.seed}",
        ]

    def log(self, message):
        self.log_lines.append(message)

    def path(self, name):
        return self.out_dir / name

    def write_csv(self, name, header, rows):
        """Write a CSV with metadata comment lines and 17-digit floats."""
        path = self.path(name)
        with open(path, "w") as fh:
            for line in self.meta_lines():
                fh.write(line + "\n")
            fh.write(",".join(header) + "\n")
            for row in rows:
                cells = [format_float(c) if isinstance(c, (float, np.floating))
                         else str(c) for c in row]
                fh.write(",".join(cells) + "\n")
        self.outputs.append(path)
        return path

    def write_json(self, name, payload):
        path = self.path(name)
        body = {
            "config_hash": self.hash,
            "version": __version__,
            "seed": self.seed,
        }
        body.update(payload)
        with open(path, "w") as fh:
            json.dump(body, fh, indent=2, sort_keys=True, default=_jsonable)
            fh.write("\n")
        self.outputs.append(path)
        return path

    def finalize(self):
        self.wall_time = time.monotonic() - self._started
        with open(self.path("config.json"), "w") as fh:
            json.dump(self.config, fh, indent=2, sort_keys=True)
            fh.write("\n")
        with open(self.path("run.log"), "w") as fh:
            for line in self.meta_lines():
                fh.write(line + "\n")
            for line in self.log_lines:
                fh.write(line + "\n")
            fh.write(f"wall_time_s={self.wall_time:.3f}\n")
        return self


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj)}")


# -- configuration parsing ---------------------------------------------------


def _require(config, key, kind=None):
    if key not in config:
        raise ConfigError(f"missing required key {key!r}")
    value = config[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"key {key!r} has wrong type {type(value).__name__}")
    return value


def _two_pi(config):
    flag = config.get("two_pi", True)
    if not isinstance(flag, bool):
        raise ConfigError("'two_pi' must be a boolean")
    return flag


def load_model(source) -> RHModel:
    """Build an :class:`RHModel` from a config mapping or JSON file path.

    Expected keys: ``spin_freq_khz``, ``site_freqs_khz``, ``hoppings_khz``
    and optionally ``coupling_khz``; quoted values are cycles (times 2 pi)
    unless ``two_pi`` is false.
    """
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            source = json.load(fh)
    if not isinstance(source, dict):
        raise ConfigError("model config must be a JSON object")
    two_pi = _two_pi(source)
    try:
        spin = to_angular(float(_require(source, "spin_freq_khz")), "kHz", two_pi)
        site = to_angular(np.asarray(_require(source, "site_freqs_khz"), dtype=float),
                          "kHz", two_pi)
        hop = to_angular(np.asarray(_require(source, "hoppings_khz"), dtype=float),
                         "kHz", two_pi)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad model config: {exc}") from exc
    coupling = source.get("coupling_khz")
    if coupling is not None:
        coupling = to_angular(float(coupling), "kHz", two_pi)
    try:
        return RHModel(spin_freq=spin, site_freqs=site, hoppings=hop,
                       coupling=coupling)
    except ValueError as exc:
        raise ConfigError(f"bad model config: {exc}") from exc


def model_to_config(model: RHModel, two_pi=True) -> dict:
    """Serialize a model back to the JSON-config convention."""
    scale = 2 * math.pi * 1e3 if two_pi else 1e3
    cfg = {
        "spin_freq_khz": model.spin_freq / scale,
        "site_freqs_khz": (model.site_freqs / scale).tolist(),
        "hoppings_khz": (model.hoppings / scale).tolist(),
        "two_pi": two_pi,
    }
    if model.coupling is not None:
        cfg["coupling_khz"] = model.coupling / scale
    return cfg


def load_chain_spec(source):
    """Parse a chain specification file into (ChainGeometry, detunings).

    Keys: ``n_ions``, ``spacings_um`` or ``uniform_spacing_um``,
    ``trap_freq_mhz``, optional ``mass_amu`` (default 171Yb+) and optional
    ``detunings_khz: {"blue": ..., "red": ...}``.  Returns the detunings in
    rad/s, or None when absent.
    """
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            source = json.load(fh)
    if not isinstance(source, dict):
        raise ConfigError("chain spec must be a JSON object")
    two_pi = _two_pi(source)
    n_ions = _require(source, "n_ions", int)
    trap = to_angular(float(_require(source, "trap_freq_mhz")), "MHz", two_pi)
    mass = float(source.get("mass_amu", YB171_MASS_AMU)) * ATOMIC_MASS
    if "spacings_um" in source:
        spacings = np.asarray(source["spacings_um"], dtype=float) * 1e-6
        if len(spacings) != n_ions - 1:
            raise ConfigError("need n_ions - 1 spacings")
    elif "uniform_spacing_um" in source:
        spacings = np.full(n_ions - 1, float(source["uniform_spacing_um"]) * 1e-6)
    else:
        raise ConfigError("chain spec needs 'spacings_um' or 'uniform_spacing_um'")
    try:
        geom = ChainGeometry(spacings, trap, mass=mass)
    except ValueError as exc:
        raise ConfigError(f"bad chain spec: {exc}") from exc
    detunings = None
    det = source.get("detunings_khz")
    if det is not None:
        if not isinstance(det, dict) or "blue" not in det or "red" not in det:
            raise ConfigError("'detunings_khz' needs 'blue' and 'red' entries")
        detunings = (to_angular(float(det["blue"]), "kHz", two_pi),
                     to_angular(float(det["red"]), "kHz", two_pi))
    return geom, detunings
