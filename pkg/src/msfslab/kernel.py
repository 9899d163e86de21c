"""Experiment plumbing shared by all case studies.

A case study registers a runner function under its id; an
ExperimentConfig names the study, a strategy, a parameter map and a
seed; run_batch turns that into one RunTrace per repetition. Each
repetition draws from its own counter-derived random stream, so trace
i is a pure function of (seed, i) no matter how the batch is split
across workers, and the whole batch output is a pure function of the
config.

Traces store measure series only; state snapshots are attached when
the caller asks for a full trace (batch sizes in the collective
decision study make snapshots-by-default too expensive).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .measures import MeasureSeries

__all__ = [
    "ConfigurationError",
    "ExperimentConfig",
    "RunTrace",
    "register_case_study",
    "case_studies",
    "case_study_strategies",
    "run_batch",
    "rng_stream",
    "aggregate_weighted",
]


class ConfigurationError(ValueError):
    """Unknown case study or strategy, or invalid run parameters."""


_SCALAR_TYPES = (int, float, str, bool)


@dataclass(frozen=True)
class ExperimentConfig:
    """The unit of reproducibility: everything a batch depends on."""

    case_study: str
    strategy: str
    parameters: Mapping
    seed: int
    horizon: float
    repetitions: int = 1

    def __post_init__(self) -> None:
        if self.horizon <= 0:
            raise ConfigurationError("horizon must be positive")
        if self.repetitions < 1:
            raise ConfigurationError("repetitions must be at least 1")
        for key, value in self.parameters.items():
            if not isinstance(value, _SCALAR_TYPES):
                raise ConfigurationError(
                    f"parameter {key!r} must be a scalar, got {type(value).__name__}"
                )
        object.__setattr__(self, "parameters", dict(self.parameters))

    def parameter(self, name: str, default=None):
        return self.parameters.get(name, default)


@dataclass
class RunTrace:
    """Measure output of one repetition.

    ``measures`` maps measure kind to its series; ``cycle_boundaries``
    are the step indices where feedback cycles end, so windowed
    measures can refer to the interval between two boundaries.
    ``snapshots`` is None unless the run was asked for a full trace.
    """

    case_study: str
    strategy: str
    seed: int
    stream: int
    measures: dict[str, MeasureSeries] = field(default_factory=dict)
    cycle_boundaries: list[int] = field(default_factory=list)
    snapshots: list | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if any(
            b <= a for a, b in zip(self.cycle_boundaries, self.cycle_boundaries[1:])
        ):
            raise ValueError("cycle boundaries must be strictly increasing")


# A runner maps (config, stream index, that stream's generator, whether
# to keep snapshots) to one trace.
Runner = Callable[[ExperimentConfig, int, np.random.Generator, bool], RunTrace]

_REGISTRY: dict[str, tuple[Runner, tuple[str, ...]]] = {}


def register_case_study(
    name: str, runner: Runner, strategies: tuple[str, ...] = ()
) -> None:
    _REGISTRY[name] = (runner, strategies)


def case_studies() -> list[str]:
    return sorted(_REGISTRY)


def case_study_strategies(name: str) -> tuple[str, ...]:
    try:
        return _REGISTRY[name][1]
    except KeyError:
        raise ConfigurationError(f"unknown case study {name!r}") from None


def rng_stream(seed: int, stream: int) -> np.random.Generator:
    """Independent reproducible stream ``stream`` of the given seed."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
    )


def _execute(cfg: ExperimentConfig, stream: int, full_trace: bool) -> RunTrace:
    # Worker processes import the package fresh, which re-registers
    # every case study before this lookup runs.
    import msfslab  # noqa: F401

    entry = _REGISTRY.get(cfg.case_study)
    if entry is None:
        raise ConfigurationError(f"unknown case study {cfg.case_study!r}")
    runner, strategies = entry
    if strategies and cfg.strategy not in strategies:
        raise ConfigurationError(
            f"case study {cfg.case_study!r} has no strategy {cfg.strategy!r}"
        )
    trace = runner(cfg, stream, rng_stream(cfg.seed, stream), full_trace)
    for boundary in trace.cycle_boundaries:
        if boundary > cfg.horizon:
            raise ValueError("cycle boundary beyond the horizon")
    return trace


def run_batch(
    cfg: ExperimentConfig, jobs: int = 1, full_trace: bool = False
) -> list[RunTrace]:
    """One trace per repetition, in repetition order."""
    if cfg.case_study not in _REGISTRY:
        raise ConfigurationError(f"unknown case study {cfg.case_study!r}")
    if jobs < 1:
        raise ConfigurationError("jobs must be at least 1")
    streams = range(cfg.repetitions)
    if jobs == 1 or cfg.repetitions == 1:
        return [_execute(cfg, i, full_trace) for i in streams]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_execute, [cfg] * cfg.repetitions, streams, [full_trace] * cfg.repetitions))


def aggregate_weighted(values, weights) -> float:
    """Weighted mean sum(v*w)/sum(w)."""
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    if v.shape != w.shape or v.ndim != 1:
        raise ValueError("values and weights must be equal-length vectors")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    total = w.sum()
    if total == 0:
        raise ValueError("all weights are zero; nothing to aggregate")
    return float((v * w).sum() / total)
