"""Delay-coupled biochemical oscillator hierarchies.

Four repressilator-style oscillators sit at the bottom of a tree and
are driven toward synchronized oscillation by feedback that travels
through the hierarchy: each oscillator's X concentration is abstracted
upward as the average of its children and handed back down as a
blended drive signal Gamma, delayed by the per-scale communication
delay. The study compares a 2-scale system (4 oscillators under one
parent) against a 3-scale system (4 oscillators, 2 middle managers,
1 top) on speed of synchronization and on the information measures.

Integration is a fixed-step RK4 method of steps: the step is required
to divide every communication delay and the internal lag of 2 s, so
full-step lag lookups are exact grid reads and half-step stage lookups
interpolate linearly between two stored grid points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import ExperimentConfig, RunTrace, register_case_study
from .measures import (
    LN2,
    MeasureSeries,
    bates_pdf,
    bin_probabilities,
    js_divergence,
    unit_midpoint_grid,
)

__all__ = [
    "OscillatorHierarchy",
    "ConcentrationHistory",
    "OSCILLATOR_STRATEGIES",
    "two_scale_hierarchy",
    "three_scale_hierarchy",
    "blended_drive",
    "concentration_rates",
    "integrate_hierarchy",
    "syntactic_content",
    "semantic_measures",
    "pragmatic_measures",
    "time_to_synchronize",
    "INIT_BOTTOM_X",
    "JS_BINS",
    "DEFAULT_COUPLING",
    "DEFAULT_DELAY",
]

OSCILLATOR_STRATEGIES = ("two_scale", "three_scale")

INIT_BOTTOM_X = (0.2, 0.4, 0.6, 0.8)

# Internal production/repression lag of the oscillator model, seconds.
INTERNAL_LAG = 2.0

# Bin count for the continuous-entropy discretization (Sturges' rule
# for 4096 samples); reproduces the reported per-oscillator contents.
JS_BINS = 13
_FINE_PER_BIN = 800

# Calibrated defaults: the weakest sweep couplings leave the four
# bottom oscillators essentially independent, so the shipped pair comes
# from the extended sweep in demos/calibrate_oscillators.py. At (4.0,
# 6.0) both systems keep a healthy oscillation amplitude and reach
# bottom-scale synchrony well inside the 300 s budget, the 2-scale one
# first.
DEFAULT_COUPLING = 4.0
DEFAULT_DELAY = 6.0


@dataclass(frozen=True)
class OscillatorHierarchy:
    """Structure and parameters of one oscillator tree.

    ``scales`` counts oscillators per scale, bottom first; each scale
    must divide evenly into the one above so children are assigned
    contiguously. ``coupling`` (F) and ``delay`` (tau, seconds) are
    per scale; ``weight`` (W) blends parent against children in the
    drive signal; ``pp_coupling`` selects the PP coupling variant
    (the study runs NN, the default).
    """

    scales: tuple[int, ...]
    coupling: tuple[float, ...]
    delay: tuple[float, ...]
    weight: float = 0.5
    pp_coupling: bool = False

    def __post_init__(self) -> None:
        if len(self.scales) < 2:
            raise ValueError("a hierarchy needs at least 2 scales")
        if self.scales[0] != 4:
            raise ValueError("the bottom scale holds exactly 4 oscillators")
        if self.scales[-1] != 1:
            raise ValueError("exactly one oscillator sits at the top")
        for below, above in zip(self.scales, self.scales[1:]):
            if above < 1 or below % above:
                raise ValueError(f"scale sizes {self.scales} do not nest evenly")
        if not (len(self.coupling) == len(self.delay) == len(self.scales)):
            raise ValueError("coupling and delay must list one value per scale")
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError("weight must lie in [0, 1]")

    @property
    def n_oscillators(self) -> int:
        return sum(self.scales)

    def flat_index(self, scale: int, i: int) -> int:
        return sum(self.scales[:scale]) + i

    def scale_of(self, flat: int) -> int:
        for m, n in enumerate(self.scales):
            if flat < n:
                return m
            flat -= n
        raise IndexError("oscillator index out of range")

    def parent_index(self, flat: int) -> int | None:
        """Flat index of the parent; None for the top oscillator."""
        m = self.scale_of(flat)
        if m == len(self.scales) - 1:
            return None
        i = flat - sum(self.scales[:m])
        span = self.scales[m] // self.scales[m + 1]
        return self.flat_index(m + 1, i // span)

    def children_indices(self, flat: int) -> list[int]:
        m = self.scale_of(flat)
        if m == 0:
            return []
        i = flat - sum(self.scales[:m])
        span = self.scales[m - 1] // self.scales[m]
        return [self.flat_index(m - 1, i * span + j) for j in range(span)]

    def bottom_descendants(self, flat: int) -> int:
        return self.scales[0] // self.scales[self.scale_of(flat)]


def two_scale_hierarchy(
    coupling: float = DEFAULT_COUPLING,
    delay: float = DEFAULT_DELAY,
    weight: float = 0.5,
    pp_coupling: bool = False,
) -> OscillatorHierarchy:
    return OscillatorHierarchy(
        (4, 1), (coupling, coupling), (delay, delay), weight, pp_coupling
    )


def three_scale_hierarchy(
    coupling: float = DEFAULT_COUPLING,
    delay: float = DEFAULT_DELAY,
    weight: float = 0.5,
    pp_coupling: bool = False,
) -> OscillatorHierarchy:
    return OscillatorHierarchy(
        (4, 2, 1),
        (coupling, coupling, coupling),
        (delay, delay, delay),
        weight,
        pp_coupling,
    )


def _structure_arrays(hier: OscillatorHierarchy):
    """(parent gather index, parent weight, children matrix, children weight).

    The top oscillator points at itself with weight 0 so one gather
    works for every row.
    """
    n = hier.n_oscillators
    parent = np.zeros(n, dtype=int)
    w_parent = np.zeros(n)
    child_mat = np.zeros((n, n))
    w_children = np.zeros(n)
    top = len(hier.scales) - 1
    for o in range(n):
        m = hier.scale_of(o)
        p = hier.parent_index(o)
        parent[o] = o if p is None else p
        kids = hier.children_indices(o)
        for c in kids:
            child_mat[o, c] = 1.0 / len(kids)
        if m == 0:
            w_parent[o] = 1.0
        elif m == top:
            w_children[o] = 1.0
        else:
            w_parent[o] = hier.weight
            w_children[o] = 1.0 - hier.weight
    return parent, w_parent, child_mat, w_children


def blended_drive(hier: OscillatorHierarchy, x_lagged: np.ndarray) -> np.ndarray:
    """Per-oscillator drive signal Gamma from one lagged X snapshot.

    Middle scales blend parent and children with weight W; the bottom
    uses the parent's value alone and the top the children mean alone.
    """
    x_lagged = np.asarray(x_lagged, dtype=float)
    if x_lagged.shape != (hier.n_oscillators,):
        raise ValueError("snapshot must hold one X value per oscillator")
    parent, w_parent, child_mat, w_children = _structure_arrays(hier)
    return w_parent * x_lagged[parent] + w_children * (child_mat @ x_lagged)


def concentration_rates(
    x: float,
    y: float,
    drive: float,
    y_internal_lag: float,
    x_internal_lag: float,
    coupling: float,
    pp_coupling: bool = False,
) -> tuple[float, float]:
    """(dX/dt, dY/dt) for one oscillator given its lagged lookups.

    ``drive`` is Gamma at t - tau; the internal-lag arguments are the
    oscillator's own concentrations at t - 2 s.
    """
    fg = (coupling * drive) ** 3
    numerator = 1.0 + fg if pp_coupling else 1.0
    dx = numerator / (1.0 + fg + (y_internal_lag / 0.5) ** 3) - 0.5 * x + 0.1
    hill = (x_internal_lag / 0.5) ** 3
    dy = hill / (1.0 + hill) - 0.5 * y + 0.1
    return dx, dy


@dataclass
class ConcentrationHistory:
    """X and Y trajectories on the integration grid, pre-history included.

    ``times`` covers the output window [0, t_end]; the full buffers
    keep ``n_hist`` extra rows of constant pre-history in front so
    lagged lookups stay in range for every output time.
    """

    hierarchy: OscillatorHierarchy
    step: float
    times: np.ndarray
    x_full: np.ndarray
    y_full: np.ndarray
    n_hist: int

    @property
    def x(self) -> np.ndarray:
        return self.x_full[self.n_hist :]

    @property
    def y(self) -> np.ndarray:
        return self.y_full[self.n_hist :]

    def bottom_x(self) -> np.ndarray:
        return self.x[:, : self.hierarchy.scales[0]]

    def lagged_x(self, flat: int, lag_seconds: float) -> np.ndarray:
        """X of one oscillator at t - lag, aligned to the output grid."""
        steps = lag_seconds / self.step
        if abs(steps - round(steps)) > 1e-9:
            raise ValueError("lag must be a multiple of the step")
        steps = round(steps)
        if steps < 0 or steps > self.n_hist:
            raise ValueError("requested lag exceeds the stored history")
        start = self.n_hist - steps
        return self.x_full[start : start + self.times.size, flat]


def _steps_of(value: float, step: float, what: str) -> int:
    ratio = value / step
    if abs(ratio - round(ratio)) > 1e-9:
        raise ValueError(f"step {step} must divide {what} {value}")
    return round(ratio)


def integrate_hierarchy(
    hier: OscillatorHierarchy,
    t_end: float = 300.0,
    step: float = 0.01,
    init_bottom_x: tuple[float, ...] = INIT_BOTTOM_X,
) -> ConcentrationHistory:
    """RK4 method-of-steps integration over [0, t_end].

    Initial bottom X concentrations are the given quadruple; every
    higher oscillator starts at the average of its children, Y starts
    at its quasi-steady value for the constant pre-history, and the
    pre-history itself is constant at the initial values.
    """
    if len(init_bottom_x) != hier.scales[0]:
        raise ValueError("need one initial X per bottom oscillator")
    n = hier.n_oscillators
    n_steps = _steps_of(t_end, step, "t_end")
    lag_internal = _steps_of(INTERNAL_LAG, step, "the internal lag")
    tau_steps = np.array(
        [
            _steps_of(hier.delay[hier.scale_of(o)], step, "the scale delay")
            for o in range(n)
        ]
    )
    n_hist = int(max(tau_steps.max(), lag_internal))

    parent, w_parent, child_mat, w_children = _structure_arrays(hier)
    coupling = np.array([hier.coupling[hier.scale_of(o)] for o in range(n)])

    x0 = np.empty(n)
    x0[: hier.scales[0]] = init_bottom_x
    for o in range(hier.scales[0], n):
        x0[o] = np.mean([x0[c] for c in hier.children_indices(o)])
    hill0 = (x0 / 0.5) ** 3
    y0 = 2.0 * (hill0 / (1.0 + hill0) + 0.1)

    xs = np.empty((n_hist + n_steps + 1, n))
    ys = np.empty_like(xs)
    xs[: n_hist + 1] = x0
    ys[: n_hist + 1] = y0

    osc = np.arange(n)
    pp = hier.pp_coupling
    h = step

    def lagged(buf: np.ndarray, row: int, lag: np.ndarray | int, half: bool):
        # Stage times sit on the grid except the half step, which is
        # exactly midway between two stored rows.
        if half:
            lo = buf[row - lag, osc] if isinstance(lag, np.ndarray) else buf[row - lag]
            hi = (
                buf[row - lag + 1, osc]
                if isinstance(lag, np.ndarray)
                else buf[row - lag + 1]
            )
            return 0.5 * (lo + hi)
        return buf[row - lag, osc] if isinstance(lag, np.ndarray) else buf[row - lag]

    def rhs(x_now, y_now, x_at_tau, y_at_lag2, x_at_lag2):
        gamma = w_parent * x_at_tau[parent] + w_children * (child_mat @ x_at_tau)
        fg = (coupling * gamma) ** 3
        numerator = 1.0 + fg if pp else 1.0
        dx = numerator / (1.0 + fg + (y_at_lag2 / 0.5) ** 3) - 0.5 * x_now + 0.1
        hill = (x_at_lag2 / 0.5) ** 3
        dy = hill / (1.0 + hill) - 0.5 * y_now + 0.1
        return dx, dy

    for k in range(n_steps):
        r = n_hist + k
        x_t, y_t = xs[r], ys[r]

        x_tau_0 = lagged(xs, r, tau_steps, half=False)
        y_l2_0 = lagged(ys, r, lag_internal, half=False)
        x_l2_0 = lagged(xs, r, lag_internal, half=False)
        # Half stages sit at t + h/2, so their lagged time falls midway
        # between rows r - lag and r - lag + 1.
        x_tau_h = lagged(xs, r, tau_steps, half=True)
        y_l2_h = lagged(ys, r, lag_internal, half=True)
        x_l2_h = lagged(xs, r, lag_internal, half=True)
        x_tau_1 = lagged(xs, r + 1, tau_steps, half=False)
        y_l2_1 = lagged(ys, r + 1, lag_internal, half=False)
        x_l2_1 = lagged(xs, r + 1, lag_internal, half=False)

        k1x, k1y = rhs(x_t, y_t, x_tau_0, y_l2_0, x_l2_0)
        k2x, k2y = rhs(
            x_t + 0.5 * h * k1x, y_t + 0.5 * h * k1y, x_tau_h, y_l2_h, x_l2_h
        )
        k3x, k3y = rhs(
            x_t + 0.5 * h * k2x, y_t + 0.5 * h * k2y, x_tau_h, y_l2_h, x_l2_h
        )
        k4x, k4y = rhs(x_t + h * k3x, y_t + h * k3y, x_tau_1, y_l2_1, x_l2_1)

        xs[r + 1] = x_t + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        ys[r + 1] = y_t + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)

    times = np.arange(n_steps + 1) * step
    return ConcentrationHistory(hier, step, times, xs, ys, n_hist)


def syntactic_content(hier: OscillatorHierarchy) -> tuple[np.ndarray, float]:
    """Per-oscillator and total syntactic content of the hierarchy.

    A bottom oscillator carries a uniform[0, 1] density (content
    exactly 1); an oscillator with d bottom descendants carries the
    Bates(d) density of their average. Content is 1 - D_JS(f||U)/ln 2
    on the binned masses.
    """
    grid = unit_midpoint_grid(JS_BINS * _FINE_PER_BIN)
    uniform_masses = bin_probabilities(np.ones(grid.size), JS_BINS)
    per_osc = np.empty(hier.n_oscillators)
    for o in range(hier.n_oscillators):
        d = hier.bottom_descendants(o)
        if d == 1:
            per_osc[o] = 1.0
            continue
        masses = bin_probabilities(bates_pdf(d, grid), JS_BINS)
        per_osc[o] = 1.0 - js_divergence(uniform_masses, masses) / LN2
    return per_osc, float(per_osc.sum())


def _bottom_parent_series(hist: ConcentrationHistory) -> np.ndarray:
    """Lagged parent X seen by each bottom oscillator, (times, bottom)."""
    hier = hist.hierarchy
    tau0 = hier.delay[0]
    cols = [
        hist.lagged_x(hier.parent_index(i), tau0) for i in range(hier.scales[0])
    ]
    return np.column_stack(cols)


def semantic_measures(
    hist: ConcentrationHistory, c_syn_total: float | None = None
) -> dict[str, np.ndarray]:
    """delta_sm, v_sm_th and e_sm_th series on the output grid.

    The knowledge a bottom oscillator acts on is its parent's lagged
    X; the semantic delta is the mean rate of change of that
    knowledge, and the truth value is positive when the knowledge
    approaches the bottom-scale average (the ground truth).
    """
    if c_syn_total is None:
        c_syn_total = syntactic_content(hist.hierarchy)[1]
    received = _bottom_parent_series(hist)
    h = hist.step
    delta_sm = np.gradient(received.mean(axis=1), h)
    truth = hist.bottom_x().mean(axis=1)
    mismatch = np.abs(truth[:, None] - received).mean(axis=1)
    v_sm_th = -np.gradient(mismatch, h)
    return {
        "delta_sm": delta_sm,
        "v_sm_th": v_sm_th,
        "e_sm_th": v_sm_th / c_syn_total,
    }


def pragmatic_measures(
    hist: ConcentrationHistory,
    c_syn_total: float | None = None,
    goal_value_sign: str = "prose",
) -> dict[str, np.ndarray]:
    """delta_pr, delta_gl, v_pr_gl and e_pr_gl series.

    delta_gl is the population variance of the bottom X concentrations
    (0 at the synchronization goal). The written formula for the goal
    value carries the opposite sign to the surrounding text; "prose"
    (default) makes shrinking variance a positive value, "literal"
    applies the formula as printed.
    """
    if goal_value_sign not in ("prose", "literal"):
        raise ValueError("goal_value_sign must be 'prose' or 'literal'")
    if c_syn_total is None:
        c_syn_total = syntactic_content(hist.hierarchy)[1]
    h = hist.step
    bottom = hist.bottom_x()
    accel = np.gradient(np.gradient(bottom, h, axis=0), h, axis=0)
    delta_pr = accel.mean(axis=1)
    delta_gl = bottom.var(axis=1)
    v_pr_gl = np.gradient(delta_gl, h)
    if goal_value_sign == "prose":
        v_pr_gl = -v_pr_gl
    return {
        "delta_pr": delta_pr,
        "delta_gl": delta_gl,
        "v_pr_gl": v_pr_gl,
        "e_pr_gl": v_pr_gl / c_syn_total,
    }


def time_to_synchronize(
    hist: ConcentrationHistory, threshold: float = 1e-3
) -> float | None:
    """First time after which bottom-scale variance stays below threshold.

    None when the trajectory is still above threshold at the end.
    """
    variance = hist.bottom_x().var(axis=1)
    above = variance >= threshold
    if above[-1]:
        return None
    if not above.any():
        return float(hist.times[0])
    last_above = int(np.nonzero(above)[0][-1])
    return float(hist.times[last_above + 1])


def _run_oscillators(
    cfg: ExperimentConfig, stream: int, rng: np.random.Generator, full_trace: bool
) -> RunTrace:
    maker = (
        two_scale_hierarchy if cfg.strategy == "two_scale" else three_scale_hierarchy
    )
    hier = maker(
        float(cfg.parameter("coupling", DEFAULT_COUPLING)),
        float(cfg.parameter("delay", DEFAULT_DELAY)),
        float(cfg.parameter("weight", 0.5)),
        bool(cfg.parameter("pp_coupling", False)),
    )
    step = float(cfg.parameter("step", 0.01))
    stride = int(cfg.parameter("record_stride", 10))
    if stride < 1:
        raise ValueError("record_stride must be at least 1")
    hist = integrate_hierarchy(hier, t_end=float(cfg.horizon), step=step)
    per_osc, total = syntactic_content(hier)
    semantic = semantic_measures(hist, total)
    pragmatic = pragmatic_measures(
        hist, total, str(cfg.parameter("goal_value_sign", "prose"))
    )
    times = hist.times[::stride].tolist()

    def series(kind: str, values: np.ndarray) -> MeasureSeries:
        return MeasureSeries(kind, times, np.asarray(values)[::stride].tolist())

    measures = {
        "c_syn_total": MeasureSeries("c_syn_total", [0.0], [total]),
        "delta_semantic": series("delta_semantic", semantic["delta_sm"]),
        "v_semantic_truth": series("v_semantic_truth", semantic["v_sm_th"]),
        "e_semantic_truth": series("e_semantic_truth", semantic["e_sm_th"]),
        "delta_pragmatic": series("delta_pragmatic", pragmatic["delta_pr"]),
        "delta_goal": series("delta_goal", pragmatic["delta_gl"]),
        "v_pragmatic_goal": series("v_pragmatic_goal", pragmatic["v_pr_gl"]),
        "e_pragmatic_goal": series("e_pragmatic_goal", pragmatic["e_pr_gl"]),
    }
    # One feedback cycle spans one communication delay.  Boundaries are
    # whole seconds so they stay comparable with the horizon; skip them
    # entirely for fractional delays.
    cycle = hier.delay[0]
    boundaries = []
    if abs(cycle - round(cycle)) < 1e-9 and round(cycle) >= 1:
        boundaries = list(range(round(cycle), int(cfg.horizon) + 1, round(cycle)))
    meta = {
        "time_to_synchronize": time_to_synchronize(hist),
        "c_syn_per_oscillator": per_osc.tolist(),
    }
    snapshots = hist.x[::stride].tolist() if full_trace else None
    return RunTrace(
        cfg.case_study,
        cfg.strategy,
        cfg.seed,
        stream,
        measures,
        boundaries,
        snapshots,
        meta,
    )


register_case_study("hierarchical_oscillators", _run_oscillators, OSCILLATOR_STRATEGIES)
