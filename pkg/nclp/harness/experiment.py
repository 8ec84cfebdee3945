"""Experiment configuration and trial planning."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, fields, replace
from typing import Any, Mapping, NamedTuple, Optional

from config import settings

from ..exceptions import ConfigInvalid, NclpError
from ..matcore import PNorm
from ..serializers import FORMATS

logger = logging.getLogger(__name__)

EXPONENT_AXES = ("p", "q", "r")
SCALAR_AXES = ("eta", "t", "eps")
AXES = EXPONENT_AXES + SCALAR_AXES


class Trial(NamedTuple):
    """Everything a worker needs to run one trial; plain values only."""

    check_name: str
    trial: int
    dim: int
    point: tuple
    seed: int
    cond: Optional[float]
    dims: tuple

    def get(self, axis: str):
        return dict(self.point)[axis]


@dataclass(frozen=True)
class ExperimentConfig:
    """One run: a check, its grid, the trial count and where reports go.

    Empty grids and ``None`` fields are filled from the check's defaults by
    ``resolve``.
    """

    check_name: str
    dims: tuple = ()
    p: tuple = ()
    q: tuple = ()
    r: tuple = ()
    eta: tuple = ()
    t: tuple = ()
    eps: tuple = ()
    trials: Optional[int] = None
    seed: int = field(default_factory=lambda: settings.DEFAULT_SEED)
    tol: Optional[float] = None
    cond: Optional[float] = None
    out: Optional[str] = None
    fmt: str = "json"
    jobs: int = 1
    timing: bool = False

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], **overrides) -> "ExperimentConfig":
        """Merge a config-file mapping with command-line overrides (overrides win)."""
        known = {f.name for f in fields(cls)}
        merged = dict(data)
        merged.update({k: v for k, v in overrides.items() if v not in (None, ())})
        unknown = sorted(set(merged) - known)
        if unknown:
            raise ConfigInvalid(unknown[0], "unknown configuration field")
        if "check_name" not in merged:
            raise ConfigInvalid("check_name", "missing")
        for name in ("dims",) + AXES:
            if name in merged:
                merged[name] = _as_tuple(merged[name])
        return cls(**merged)

    def resolve(self) -> "ExperimentConfig":
        """Fill defaults from the check registry and validate every field."""
        from .checks import get_check

        try:
            check = get_check(self.check_name)
        except KeyError:
            raise ConfigInvalid("check_name", f"unknown check {self.check_name!r}") from None
        updates = {}
        if not self.dims:
            updates["dims"] = check.dims
        for axis in check.axes:
            if not getattr(self, axis):
                updates[axis] = check.defaults[axis]
        if self.trials is None:
            updates["trials"] = check.trials
        if self.cond is None:
            updates["cond"] = check.cond
        config = replace(self, **updates)
        config = replace(config, **{axis: _parse_axis(axis, getattr(config, axis)) for axis in AXES})
        config.validate()
        return config

    def validate(self):
        from .checks import get_check

        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigInvalid("trials", f"must be an integer >= 1, got {self.trials!r}")
        if not self.dims:
            raise ConfigInvalid("dims", "at least one dimension is required")
        for n in self.dims:
            if not isinstance(n, int) or not 1 <= n <= settings.MAX_DIM:
                raise ConfigInvalid("dims", f"each dimension must lie in [1, {settings.MAX_DIM}], got {n!r}")
        if self.fmt not in FORMATS:
            raise ConfigInvalid("fmt", f"must be one of {', '.join(FORMATS)}")
        if self.jobs < 1:
            raise ConfigInvalid("jobs", f"must be >= 1, got {self.jobs}")
        if self.tol is not None and not self.tol >= 0:
            raise ConfigInvalid("tol", f"must be >= 0, got {self.tol}")
        if self.cond is not None and not self.cond >= 1:
            raise ConfigInvalid("cond", f"must be >= 1, got {self.cond}")
        get_check(self.check_name).validate(self)

    def grid(self) -> list[tuple]:
        """Cartesian product of the axes the check uses, as (axis, value) pairs."""
        from .checks import get_check

        axes = get_check(self.check_name).axes
        values = [getattr(self, axis) for axis in axes]
        return [tuple(zip(axes, combo)) for combo in itertools.product(*values)]

    def to_dict(self) -> dict:
        data = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in EXPONENT_AXES:
                value = [str(v) for v in value]
            elif isinstance(value, tuple):
                value = list(value)
            data[f.name] = value
        return data


def _as_tuple(value) -> tuple:
    if isinstance(value, (list, tuple)):
        return tuple(value)
    return (value,)


def _parse_axis(axis: str, values: tuple) -> tuple:
    parsed = []
    for v in values:
        try:
            if axis in EXPONENT_AXES:
                parsed.append(PNorm.of(v))
            else:
                parsed.append(float(v))
        except (NclpError, ValueError, TypeError, ZeroDivisionError) as exc:
            raise ConfigInvalid(axis, f"cannot use {v!r}: {exc}") from exc
    return tuple(parsed)


def plan_trials(config: ExperimentConfig) -> list[Trial]:
    """Trials in canonical order: dimension, then grid point, then trial number."""
    from .checks import get_check

    check = get_check(config.check_name)
    dims = config.dims if check.uses_dims else config.dims[:1]
    trials = check.fixed_trials or config.trials
    plan = []
    index = 0
    for dim in dims:
        for point in config.grid():
            for _ in range(trials):
                plan.append(Trial(config.check_name, index, dim, point, config.seed, config.cond, config.dims))
                index += 1
    logger.info(f"planned {len(plan)} trials of {config.check_name}")
    return plan
