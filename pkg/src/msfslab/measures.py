"""Shared information-measure primitives for the case studies.

Syntactic content is quantified in whichever unit a study needs:
Shannon entropy of discrete state registers (bits), plain memory-unit
counts, or a continuous-entropy form built on the Jensen-Shannon
divergence from the uniform density. Semantic and pragmatic measures
are built from state values: the change of a state value over an
observation window is the value of the information received in that
window, and dividing a value by the syntactic content it consumed
gives an efficiency.

"NA" (no prior knowledge to compare against) is represented as None
throughout and is distinct from 0: a zero-valued measure means "no
change", None means "nothing to compare yet". CSV writers render it
as the literal string NA.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DiscreteDistribution",
    "StateValueSeries",
    "MeasureSeries",
    "shannon_entropy",
    "kl_divergence",
    "js_divergence",
    "bates_pdf",
    "bin_probabilities",
    "state_value_delta",
    "efficiency",
    "trapezoid_integrate",
    "unit_midpoint_grid",
]

LN2 = math.log(2.0)

STATE_VALUE_ROLES = ("truth", "optimal", "goal")

# Measure kinds follow the framework vocabulary: syntactic content,
# semantic/pragmatic deltas, truth/goal values, efficiencies.
_KIND_PREFIXES = ("c_syn", "delta_", "v_", "e_", "sv_")


@dataclass
class DiscreteDistribution:
    """Probability mass over a finite outcome set."""

    outcomes: list
    probs: np.ndarray

    def __post_init__(self) -> None:
        self.probs = np.asarray(self.probs, dtype=float)
        if len(self.outcomes) != self.probs.size:
            raise ValueError("outcomes and probs must have equal length")
        if np.any(self.probs < 0):
            raise ValueError("probabilities must be nonnegative")
        total = float(self.probs.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    @classmethod
    def uniform(cls, outcomes) -> "DiscreteDistribution":
        outcomes = list(outcomes)
        return cls(outcomes, np.full(len(outcomes), 1.0 / len(outcomes)))

    @classmethod
    def from_counts(cls, counts: dict) -> "DiscreteDistribution":
        total = float(sum(counts.values()))
        if total <= 0:
            raise ValueError("counts must sum to a positive total")
        outcomes = list(counts.keys())
        return cls(outcomes, np.array([counts[o] / total for o in outcomes]))


@dataclass
class StateValueSeries:
    """Time-indexed state values SV with a role tag.

    The role says what the value is measured against: "truth" compares
    knowledge to an observable ground truth, "optimal" to the best
    achievable knowledge, "goal" to the system's goal state.
    """

    times: list
    values: list
    role: str

    def __post_init__(self) -> None:
        if self.role not in STATE_VALUE_ROLES:
            raise ValueError(f"role must be one of {STATE_VALUE_ROLES}")
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have equal length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")

    def delta_series(self) -> "MeasureSeries":
        """Per-step state-value changes; the first entry is NA."""
        deltas = [None]
        deltas += [
            state_value_delta(now, prev)
            for prev, now in zip(self.values, self.values[1:])
        ]
        return MeasureSeries(f"v_{self.role}", list(self.times), deltas)


@dataclass
class MeasureSeries:
    """Time-indexed record of one measure for one system/strategy/seed.

    ``window`` is the observation window length the measure was
    computed over, in the study's own time units; None means
    single-step. Values may contain None (NA).
    """

    kind: str
    times: list
    values: list
    window: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.kind.startswith(_KIND_PREFIXES):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have equal length")

    def defined(self) -> list:
        """(time, value) pairs with the NA entries dropped."""
        return [(t, v) for t, v in zip(self.times, self.values) if v is not None]


def shannon_entropy(dist: DiscreteDistribution) -> float:
    """H = -sum p log2 p in bits; p = 0 terms contribute nothing."""
    p = dist.probs[dist.probs > 0]
    return float(-(p * np.log2(p)).sum())


def unit_midpoint_grid(n: int) -> np.ndarray:
    """n cell midpoints of [0, 1]: (i + 0.5)/n.

    Densities sampled here avoid the support endpoints, where the
    divergence integrands can be singular.
    """
    if n < 2:
        raise ValueError("grid needs at least 2 points")
    return (np.arange(n) + 0.5) / n


def trapezoid_integrate(values, grid) -> float:
    """Trapezoid rule for samples of f on a strictly increasing grid."""
    y = np.asarray(values, dtype=float)
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("grid needs at least 2 points")
    if y.shape != x.shape:
        raise ValueError("values and grid must have equal length")
    dx = np.diff(x)
    if np.any(dx <= 0):
        raise ValueError("grid must be strictly increasing")
    return float(0.5 * (dx * (y[1:] + y[:-1])).sum())


def _kl_pointwise(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    mask = p > 0
    if np.any(q[mask] <= 0):
        raise ValueError("q vanishes inside the support of p")
    out = np.zeros_like(p)
    out[mask] = p[mask] * np.log(p[mask] / q[mask])
    return out


def kl_divergence(p, q, grid=None, base: float | None = None) -> float:
    """D_KL(p || q), natural log unless ``base`` is given.

    With ``grid``, p and q are densities sampled on a common grid over
    [0, 1] and the integral uses the trapezoid rule. Without a grid
    they are probability mass vectors and the discrete sum is used.
    q must be positive wherever p is.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("p and q must be sampled on the same grid")
    pointwise = _kl_pointwise(p, q)
    if grid is None:
        value = float(pointwise.sum())
    else:
        value = trapezoid_integrate(pointwise, grid)
    if base is not None:
        value /= math.log(base)
    return value


def js_divergence(f1, f2, grid=None) -> float:
    """Jensen-Shannon divergence, natural log, in [0, ln 2].

    Same calling convention as :func:`kl_divergence`: pass a grid for
    densities on [0, 1], none for probability mass vectors (the binned
    form the oscillator study uses; see :func:`bin_probabilities`).
    """
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    if f1.shape != f2.shape:
        raise ValueError("densities must share a grid")
    mid = 0.5 * (f1 + f2)

    def half(p: np.ndarray) -> np.ndarray:
        # mid >= p/2 in exact arithmetic; mid == 0 with p > 0 happens
        # only through subnormal underflow, where the dropped term is
        # below 1e-320 nats.
        mask = (p > 0) & (mid > 0)
        out = np.zeros_like(p)
        out[mask] = p[mask] * np.log(p[mask] / mid[mask])
        return out

    if grid is None:
        return float(0.5 * half(f1).sum() + 0.5 * half(f2).sum())
    return 0.5 * trapezoid_integrate(half(f1), grid) + 0.5 * trapezoid_integrate(
        half(f2), grid
    )


def bates_pdf(n: int, x):
    """Density of the mean of n independent uniform[0, 1] draws.

    Closed-form alternating sum; n = 1 is the uniform density itself
    (the generic sum degenerates to 0 there). Zero outside [0, 1].
    Scalar in, scalar out; array in, array out.
    """
    if n < 1 or n != int(n):
        raise ValueError("n must be a positive integer")
    n = int(n)
    arr = np.asarray(x, dtype=float)
    inside = (arr >= 0.0) & (arr <= 1.0)
    if n == 1:
        out = np.where(inside, 1.0, 0.0)
    else:
        acc = np.zeros_like(arr)
        for k in range(n + 1):
            t = np.clip(arr - k / n, 0.0, None)
            acc += (-1.0) ** k * math.comb(n, k) * t ** (n - 1)
        out = np.where(inside, acc * float(n**n) / math.factorial(n - 1), 0.0)
    if np.ndim(x) == 0:
        return float(out)
    return out


def bin_probabilities(density, bins: int) -> np.ndarray:
    """Masses of ``bins`` equal-width bins of [0, 1].

    ``density`` must be sampled on a uniform midpoint grid whose size
    is a multiple of the bin count (see :func:`unit_midpoint_grid`).
    The result is normalized to sum to exactly 1.
    """
    d = np.asarray(density, dtype=float)
    if bins < 1:
        raise ValueError("bin count must be positive")
    if d.ndim != 1 or d.size % bins:
        raise ValueError("grid size must be a positive multiple of the bin count")
    masses = d.reshape(bins, -1).mean(axis=1) / bins
    total = float(masses.sum())
    if not math.isclose(total, 1.0, abs_tol=1e-6):
        raise ValueError(f"binned density integrates to {total!r}, not 1")
    return masses / total


def state_value_delta(sv_now, sv_prev):
    """Change in state value; positive means improvement.

    Returns None (NA) when either endpoint is undefined. NA marks
    "no prior knowledge" and must never be collapsed to 0.
    """
    if sv_now is None or sv_prev is None:
        return None
    return sv_now - sv_prev


def efficiency(value, c_syn: float):
    """Measure value per unit of syntactic content consumed.

    NA propagates. A non-positive c_syn is a caller error and raises
    instead of producing an infinity.
    """
    if value is None:
        return None
    if c_syn <= 0:
        raise ZeroDivisionError("syntactic content must be positive")
    return value / c_syn
