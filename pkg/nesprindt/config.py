"""
Run and probe configuration.

Values are layered: NESPRINDT_DEFAULTS from settings, then the JSON config
file, then command-line overrides. The merged mapping is validated by the
serializers in ``nesprindt.serializers`` and turned into the frozen
dataclasses below.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from django.conf import settings

from core.exceptions import ConfigError
from ctree.types import TreeParams
from prindt.types import InnerConfig

DEFAULTS = {
    'class_column': 'class',
    'schema': {},
    'nesting': {'column': 'SPEAKER', 'small_level': 'child'},
    'outer_reps': 10,
    'inner_reps': 999,
    'percents': [0.06],
    'alpha': 0.01,
    'min_split': 20,
    'min_leaf': 7,
    'max_depth': None,
    'k_best': 3,
    'ensemble_size': 3,
    'seed': 0,
    'predictors': None,
    'forbidden': [],
    'parts': 8,
    'probe_parts': None,
}


@dataclass(frozen=True)
class NestingSpec:
    column: str
    small_level: str

    def to_dict(self):
        return {'column': self.column, 'small_level': self.small_level}


@dataclass(frozen=True)
class RunConfig:
    nesting: NestingSpec
    outer_reps: int = 10
    inner_reps: int = 999
    percents: tuple = (0.06,)
    tree: TreeParams = field(default_factory=lambda: TreeParams(alpha=0.01))
    k_best: int = 3
    ensemble_size: int = 3
    master_seed: int = 0
    forbidden: tuple = ()
    predictors: Optional[tuple] = None
    class_column: str = 'class'
    schema_hint: tuple = ()  # (column, kind) pairs
    probe_parts: Optional[int] = None

    def __post_init__(self):
        if self.outer_reps < 1 or self.inner_reps < 1 or self.k_best < 1 or self.ensemble_size < 1:
            raise ConfigError("outer_reps, inner_reps, k_best and ensemble_size must all be >= 1")
        if not self.percents or any(not 0.0 < p <= 1.0 for p in self.percents):
            raise ConfigError(f"percents must be a non-empty list of values in (0, 1], got {list(self.percents)}")
        if self.probe_parts is not None and self.probe_parts < 2:
            raise ConfigError(f"probe parts must be >= 2, got {self.probe_parts}")

    def inner_config(self, predictors):
        return InnerConfig(
            percents=tuple(self.percents),
            inner_reps=self.inner_reps,
            tree=self.tree,
            forbidden=tuple(self.forbidden),
            predictors=tuple(predictors),
        )

    def probe_config(self, parts=None):
        return ProbeConfig(
            nesting=self.nesting,
            parts=parts or self.probe_parts or DEFAULTS['parts'],
            tree=self.tree,
            predictors=self.predictors,
            class_column=self.class_column,
            schema_hint=self.schema_hint,
        )

    def to_dict(self):
        return {
            'class_column': self.class_column,
            'schema': dict(self.schema_hint),
            'nesting': self.nesting.to_dict(),
            'outer_reps': self.outer_reps,
            'inner_reps': self.inner_reps,
            'percents': list(self.percents),
            **self.tree.to_dict(),
            'k_best': self.k_best,
            'ensemble_size': self.ensemble_size,
            'seed': self.master_seed,
            'predictors': list(self.predictors) if self.predictors is not None else None,
            'forbidden': [combination.to_dict() for combination in self.forbidden],
            'probe_parts': self.probe_parts,
        }


@dataclass(frozen=True)
class ProbeConfig:
    nesting: NestingSpec
    parts: int = 8
    tree: TreeParams = field(default_factory=lambda: TreeParams(alpha=0.01))
    predictors: Optional[tuple] = None
    class_column: str = 'class'
    schema_hint: tuple = ()

    def __post_init__(self):
        if self.parts < 2:
            raise ConfigError(f"The heterogeneity probe needs at least 2 parts, got {self.parts}")


def resolve_predictors(d, predictors, nesting):
    """Configured predictors, or every column except the class and nesting columns."""
    if predictors is None:
        return tuple(name for name in d.predictor_names if name != nesting.column)
    unknown = [name for name in predictors if name not in d.column_names]
    if unknown:
        raise ConfigError(f"Configured predictors not found in the data: {unknown}")
    if d.class_column in predictors:
        raise ConfigError(f"The class column {d.class_column!r} cannot be a predictor")
    return tuple(predictors)


def merged_settings(path=None, overrides=None):
    """Settings defaults < JSON file < overrides (None values are ignored)."""
    data = dict(DEFAULTS)
    data.update(getattr(settings, 'NESPRINDT_DEFAULTS', {}))
    if path:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}")
        try:
            from_file = json.loads(path.read_text(encoding='utf-8'))
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config file {path} is not valid JSON: {e}") from e
        if not isinstance(from_file, dict):
            raise ConfigError(f"Config file {path} must hold a JSON object")
        data.update(from_file)
    data.update({key: value for key, value in (overrides or {}).items() if value is not None})
    return data


def load_run_config(path=None, overrides=None):
    return parse_run_config(merged_settings(path, overrides))


def load_probe_config(path=None, overrides=None):
    return parse_probe_config(merged_settings(path, overrides))


def parse_run_config(data):
    """Validate a merged configuration document into a RunConfig."""
    from .serializers import RunConfigSerializer

    serializer = RunConfigSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigError(f"Invalid run configuration: {_flatten_errors(serializer.errors)}")
    return serializer.to_run_config()


def parse_probe_config(data):
    from .serializers import ProbeConfigSerializer

    serializer = ProbeConfigSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigError(f"Invalid probe configuration: {_flatten_errors(serializer.errors)}")
    return serializer.to_probe_config()


def _flatten_errors(errors, prefix=''):
    if isinstance(errors, dict):
        parts = [_flatten_errors(value, f"{prefix}{key}.") for key, value in errors.items()]
        return '; '.join(part for part in parts if part)
    if isinstance(errors, list):
        parts = [_flatten_errors(value, prefix) for value in errors]
        return '; '.join(part for part in parts if part)
    return f"{prefix.rstrip('.')}: {errors}" if prefix else str(errors)
