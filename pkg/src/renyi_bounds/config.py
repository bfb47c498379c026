"""Experiment configuration as flat ``section.key=value`` text, with a JSON mirror."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .hamiltonian import MODEL_NAMES, TFIM, XXZ, ChainSpec, RandomNN
from .linalg import DimensionError

EXPERIMENTS = ("quench", "lr-probe", "tail-bound", "negativity")
BOUND_NAMES = ("eq1", "telescopic_numeric", "telescopic_analytic", "marien", "schuch_wolf")
STATE_KINDS = ("basis", "bloch", "random")


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = field(default="quench", metadata={"key": "experiment", "kind": str, "doc": "|".join(EXPERIMENTS)})
    seed: int = field(default=0, metadata={"key": "seed", "kind": int, "doc": "master seed"})
    graph_lr: bool = field(default=False, metadata={"key": "graph_lr", "kind": bool, "doc": "rescale t' = 2Jt"})

    model_name: str = field(default="tfim", metadata={"key": "model.name", "kind": str, "doc": "tfim|xxz|random"})
    model_L: int = field(default=5, metadata={"key": "model.L", "kind": int, "doc": "half-length; sites -L..L"})
    model_r: int = field(default=2, metadata={"key": "model.r", "kind": int, "doc": "local dimension"})
    model_J_zz: float = field(default=1.0, metadata={"key": "model.J_zz", "kind": float, "doc": "tfim coupling"})
    model_h_x: float = field(default=1.0, metadata={"key": "model.h_x", "kind": float, "doc": "tfim field"})
    model_J_xy: float = field(default=1.0, metadata={"key": "model.J_xy", "kind": float, "doc": "xxz hopping"})
    model_J_z: float = field(default=1.0, metadata={"key": "model.J_z", "kind": float, "doc": "xxz anisotropy"})
    model_h: float = field(default=0.0, metadata={"key": "model.h", "kind": float, "doc": "xxz longitudinal field"})
    model_scale: float = field(default=1.0, metadata={"key": "model.scale", "kind": float, "doc": "random bond norm"})

    state_kind: str = field(default="basis", metadata={"key": "state.kind", "kind": str, "doc": "basis|bloch|random"})
    state_labels: tuple[int, ...] = field(
        default=(0,), metadata={"key": "state.labels", "kind": "ints", "doc": "one level, or one per site"}
    )
    state_angles: tuple[float, ...] = field(
        default=(), metadata={"key": "state.angles", "kind": "floats", "doc": "theta,phi per site"}
    )
    state_seeds: tuple[int, ...] = field(
        default=(), metadata={"key": "state.seeds", "kind": "ints", "doc": "random product states to add"}
    )

    alphas: tuple[float, ...] = field(
        default=(0.3, 0.5, 0.9, 1.0), metadata={"key": "alphas", "kind": "floats", "doc": "Renyi orders in (0, 1]"}
    )
    time_t_max: float = field(default=0.0, metadata={"key": "time.t_max", "kind": float, "doc": "0 means 2/J"})
    time_steps: int = field(default=80, metadata={"key": "time.steps", "kind": int, "doc": "grid intervals"})

    bounds: tuple[str, ...] = field(
        default=BOUND_NAMES, metadata={"key": "bounds", "kind": "strs", "doc": ",".join(BOUND_NAMES)}
    )
    bounds_c: float = field(default=2.854, metadata={"key": "bounds.c", "kind": float, "doc": "constant c > e"})

    lr_ks: tuple[int, ...] = field(default=(2, 3, 4), metadata={"key": "lr.k", "kind": "ints", "doc": "radii"})
    lr_site: int = field(default=0, metadata={"key": "lr.site", "kind": int, "doc": "site of sigma_z"})
    otoc_distance: int = field(default=3, metadata={"key": "otoc.distance", "kind": int, "doc": "0 disables"})

    tail_xi: float = field(default=0.5, metadata={"key": "tail.xi", "kind": float, "doc": "decay length"})
    tail_envelope: str = field(
        default="exponential", metadata={"key": "tail.envelope", "kind": str, "doc": "exponential|compact"}
    )
    tail_alphas: tuple[float, ...] = field(
        default=(0.8, 0.9, 1.0), metadata={"key": "tail.alphas", "kind": "floats", "doc": "must exceed alphaMin"}
    )
    tail_beta_factor: float = field(
        default=1.05, metadata={"key": "tail.beta_factor", "kind": float, "doc": "beta = factor * betaMin"}
    )
    tail_c_prime: float = field(default=2.1, metadata={"key": "tail.c_prime", "kind": float, "doc": "c' > 2"})
    tail_v_lr: float = field(default=0.0, metadata={"key": "tail.v_lr", "kind": float, "doc": "0 means 4eJ"})

    negativity_samples: int = field(
        default=100, metadata={"key": "negativity.samples", "kind": int, "doc": "states and ensembles"}
    )

    output_path: str = field(default="", metadata={"key": "output.path", "kind": str, "doc": "empty means stdout"})
    output_format: str = field(default="csv", metadata={"key": "output.format", "kind": str, "doc": "csv|json"})

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.model_name not in MODEL_NAMES:
            raise ConfigError(f"unknown model {self.model_name!r}")
        if self.state_kind not in STATE_KINDS:
            raise ConfigError(f"unknown state kind {self.state_kind!r}")
        for a in self.alphas + self.tail_alphas:
            if not 0 < a <= 1:
                raise ConfigError(f"Renyi order {a} outside (0, 1]")
        unknown = set(self.bounds) - set(BOUND_NAMES)
        if unknown:
            raise ConfigError(f"unknown bounds {sorted(unknown)}")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("output.format must be csv or json")
        if self.time_steps < 1 or self.time_t_max < 0:
            raise ConfigError("time grid needs steps >= 1 and t_max >= 0")
        if self.model_L < 1:
            raise ConfigError("model.L must be at least 1")
        if self.tail_envelope not in ("exponential", "compact"):
            raise ConfigError("tail.envelope must be exponential or compact")

    def chain_spec(self) -> ChainSpec:
        name = self.model_name
        if name == "tfim":
            model = TFIM(self.model_J_zz, self.model_h_x)
        elif name == "xxz":
            model = XXZ(self.model_J_xy, self.model_J_z, self.model_h)
        else:
            model = RandomNN(self.seed, self.model_scale)
        try:
            return ChainSpec(self.model_L, model, self.model_r)
        except DimensionError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def with_overrides(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


_FIELDS = {f.metadata["key"]: f for f in fields(ExperimentConfig)}


def _format_value(value, kind) -> str:
    if kind is bool:
        return "true" if value else "false"
    if kind in ("ints", "floats", "strs"):
        return ",".join(repr(v) if kind == "floats" else str(v) for v in value)
    if kind is float:
        return repr(float(value))
    return str(value)


def _parse_value(text: str, kind, key: str):
    text = text.strip()
    try:
        if kind is bool:
            low = text.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return low in ("true", "1", "yes")
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        if kind is str:
            return text
        items = [s.strip() for s in text.split(",") if s.strip()]
        cast = {"ints": int, "floats": float, "strs": str}[kind]
        return tuple(cast(s) for s in items)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r}") from exc


def _coerce_json_value(value, kind, key: str):
    if isinstance(value, list):
        return _parse_value(",".join(str(v) for v in value), kind, key)
    if isinstance(value, bool):
        return _parse_value("true" if value else "false", kind, key)
    return _parse_value(str(value), kind, key)


def from_mapping(values: dict) -> ExperimentConfig:
    kwargs = {}
    for key, raw in values.items():
        if key not in _FIELDS:
            raise ConfigError(f"unknown key {key!r}")
        f = _FIELDS[key]
        kwargs[f.name] = _coerce_json_value(raw, f.metadata["kind"], key)
    return ExperimentConfig(**kwargs)


def parse(text: str) -> ExperimentConfig:
    """Parse flat ``key=value`` lines; ``#`` starts a comment. A JSON object is accepted too."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        return from_mapping(_flatten(data))
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    kwargs = {}
    for key, value in values.items():
        if key not in _FIELDS:
            raise ConfigError(f"unknown key {key!r}")
        f = _FIELDS[key]
        kwargs[f.name] = _parse_value(value, f.metadata["kind"], key)
    return ExperimentConfig(**kwargs)


def _flatten(data: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in data.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def emit(cfg: ExperimentConfig, with_docs: bool = False) -> str:
    lines = []
    for f in fields(cfg):
        key, kind = f.metadata["key"], f.metadata["kind"]
        line = f"{key}={_format_value(getattr(cfg, f.name), kind)}"
        if with_docs and f.metadata.get("doc"):
            line += f"  # {f.metadata['doc']}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def emit_json(cfg: ExperimentConfig) -> str:
    data = {}
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        data[f.metadata["key"]] = list(value) if isinstance(value, tuple) else value
    return json.dumps(data, indent=2) + "\n"


def load(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse(text)
