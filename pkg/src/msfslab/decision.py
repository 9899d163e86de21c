"""Grid-world collective decision making under environment feedback.

A shared task is displayed on a square grid of binary cells: each cell
shows task A or task B, and the fraction of A-cells is the workload
weight the group is supposed to track. Stationary agents scan nearby
cells, form individual opinions of the weight, and merge them into one
collective opinion per feedback cycle. The environment pushes back:
whenever the collective opinion underestimates the weight the task
grows, whenever it overestimates the task shrinks, so misreadings
amplify until the weight hits a collapse boundary.

Four strategies separate where information enters the pipeline:
``consensus`` runs the full scan-blend-average loop, ``random_opinion``
replaces the scans with uniform noise but still negotiates, and
``random_consensus`` / ``random_total`` short-circuit the negotiation
with a randomly picked opinion or a fully random outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernel import ExperimentConfig, RunTrace, register_case_study
from .measures import DiscreteDistribution, MeasureSeries, efficiency, shannon_entropy

__all__ = [
    "GRID_SIZE",
    "CELL_COUNT",
    "INNER_MARGIN",
    "COLLAPSE_LOW",
    "COLLAPSE_HIGH",
    "OPINION_MEMORY",
    "CONSENSUS_RATE",
    "ENV_STEP",
    "START_WEIGHT",
    "MAX_STEPS",
    "STRATEGIES",
    "CycleRecord",
    "DecisionTrace",
    "scan_offsets",
    "scan_indices",
    "place_agents",
    "scan_average",
    "blend_opinions",
    "consensus_outcome",
    "collapse_state",
    "goal_level",
    "environment_step",
    "opinion_entropy",
    "signal_entropy",
    "collective_entropy",
    "c_syn_decision",
    "simulate_decision",
    "cycle_measures",
    "cycle_averages",
]

GRID_SIZE = 58
CELL_COUNT = GRID_SIZE * GRID_SIZE
# Agents are placed away from the border so every scan neighbourhood
# stays on the grid without clipping.
INNER_MARGIN = 4
COLLAPSE_LOW = 0.10
COLLAPSE_HIGH = 0.90
OPINION_MEMORY = 0.5
CONSENSUS_RATE = 2.0
ENV_STEP = 0.002
START_WEIGHT = 0.6
MAX_STEPS = 5000

STRATEGIES = ("consensus", "random_opinion", "random_consensus", "random_total")

# Strategies whose agents actually read the grid when forming opinions.
_SCANNING = ("consensus", "random_consensus")

# Accumulated float error over thousands of fixed-size weight steps is
# ~1e-13 at worst; the guard keeps a boundary crossing from being missed
# by one ulp without ever absorbing a genuine step of 0.002.
_COLLAPSE_EPS = 1e-9

_ENTROPY_SAMPLES = 100_000
_ENTROPY_SEED = 492867310


def _ring_offsets(distance: int) -> list[tuple[int, int]]:
    if distance == 0:
        return [(0, 0)]
    cells = [
        (dr, dc)
        for dr in range(-distance, distance + 1)
        for dc in range(-distance, distance + 1)
        if max(abs(dr), abs(dc)) == distance
    ]
    cells.sort(key=lambda off: math.atan2(off[0], off[1]) % math.tau)
    return cells


def _build_offsets(max_ring: int) -> np.ndarray:
    table: list[tuple[int, int]] = []
    for distance in range(max_ring + 1):
        table.extend(_ring_offsets(distance))
    return np.array(table, dtype=int)


# Rings 0..INNER_MARGIN ordered by distance, ties broken by angle; the
# margin guarantees all of them fit inside the grid.
_SCAN_TABLE = _build_offsets(INNER_MARGIN)
_MAX_SOURCES = len(_SCAN_TABLE)


def scan_offsets(n_sources: int) -> np.ndarray:
    """The first ``n_sources`` cells an agent reads, as (row, col) offsets.

    Cells come in concentric square rings around the agent, nearest ring
    first, ordered by angle inside a ring. The agent's own cell is the
    nearest source of all.
    """
    if not 1 <= n_sources <= _MAX_SOURCES:
        raise ValueError(f"n_sources must be in [1, {_MAX_SOURCES}]")
    return _SCAN_TABLE[:n_sources].copy()


def scan_indices(positions: np.ndarray, n_sources: int) -> np.ndarray:
    """Flat grid indices of each agent's scan cells, shape (agents, sources)."""
    offsets = scan_offsets(n_sources)
    positions = np.asarray(positions, dtype=int)
    rows = positions[:, 0][:, None] + offsets[:, 0]
    cols = positions[:, 1][:, None] + offsets[:, 1]
    if rows.min() < 0 or rows.max() >= GRID_SIZE or cols.min() < 0 or cols.max() >= GRID_SIZE:
        raise ValueError("scan neighbourhood leaves the grid")
    return rows * GRID_SIZE + cols


def place_agents(n_agents: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random agent positions on the inner region of the grid."""
    if n_agents < 1:
        raise ValueError("n_agents must be at least 1")
    low = INNER_MARGIN
    high = GRID_SIZE - INNER_MARGIN
    return rng.integers(low, high, size=(n_agents, 2))


def scan_average(grid: np.ndarray, positions: np.ndarray, n_sources: int) -> np.ndarray:
    """Mean cell reading per agent over its scan neighbourhood."""
    flat = np.asarray(grid, dtype=float).reshape(-1)
    if flat.size != CELL_COUNT:
        raise ValueError(f"grid must hold {CELL_COUNT} cells")
    return flat[scan_indices(positions, n_sources)].mean(axis=1)


def blend_opinions(fresh, previous, memory: float = OPINION_MEMORY) -> np.ndarray:
    """Mix fresh readings into remembered opinions.

    ``memory`` is the weight kept on the remembered opinion; the default
    splits evenly. ``previous`` is None on the first cycle: nothing is
    remembered yet, so the fresh readings are adopted as-is.
    """
    if not 0.0 <= memory <= 1.0:
        raise ValueError("memory must lie in [0, 1]")
    fresh = np.asarray(fresh, dtype=float)
    if previous is None:
        return fresh.copy()
    return (1.0 - memory) * fresh + memory * np.asarray(previous, dtype=float)


def consensus_outcome(opinions, strategy: str, rng: np.random.Generator,
                      rate: float = CONSENSUS_RATE) -> tuple[float, int]:
    """Collective opinion and the number of steps the negotiation takes.

    ``consensus`` and ``random_opinion`` average all opinions; the
    negotiation grows with group size and with how far the opinions
    disagree, never below one step. ``random_consensus`` adopts one
    uniformly chosen opinion and ``random_total`` a fresh uniform draw,
    both in a single step.
    """
    if strategy == "random_total":
        return float(rng.random()), 1
    ops = np.asarray(opinions, dtype=float)
    if ops.ndim != 1 or ops.size < 1:
        raise ValueError("opinions must be a non-empty vector")
    if strategy == "random_consensus":
        return float(ops[rng.integers(ops.size)]), 1
    if strategy not in ("consensus", "random_opinion"):
        raise ValueError(f"unknown strategy {strategy!r}")
    spread = float(ops.max() - ops.min())
    steps = max(1, math.ceil(rate * ops.size * spread))
    return float(ops.mean()), steps


def collapse_state(weight: float) -> bool:
    """Whether the workload weight has hit a collapse boundary."""
    return weight <= COLLAPSE_LOW + _COLLAPSE_EPS or weight >= COLLAPSE_HIGH - _COLLAPSE_EPS


def goal_level(weight: float) -> float:
    """Closeness of the workload to the balanced state, 1 at 0.5, 0 at the edges."""
    return 1.0 - 2.0 * abs(0.5 - weight)


def _next_weight(weight: float, collective, step_size: float) -> float:
    if collective is None or collective == weight:
        return weight
    if collective < weight:
        return min(1.0, weight + step_size)
    return max(0.0, weight - step_size)


def _sync_grid(grid: np.ndarray, count: int, weight: float,
               rng: np.random.Generator) -> int:
    """Flip the fewest uniformly chosen cells so the A-count matches ``weight``."""
    target = int(round(weight * grid.size))
    if target > count:
        pool = np.flatnonzero(~grid)
        grid[rng.choice(pool, target - count, replace=False)] = True
    elif target < count:
        pool = np.flatnonzero(grid)
        grid[rng.choice(pool, count - target, replace=False)] = False
    return target


def environment_step(grid: np.ndarray, weight: float, collective,
                     rng: np.random.Generator, step_size: float = ENV_STEP) -> float:
    """Advance the workload one step under the standing collective opinion.

    The task grows when the collective underestimates the weight and
    shrinks when it overestimates; an exact match, or no collective
    opinion yet, holds the weight constant. The grid is re-randomised by
    flipping the minimal number of uniformly chosen cells so its A-count
    matches the new weight. Returns the new weight; the grid mutates in
    place.
    """
    weight = _next_weight(weight, collective, step_size)
    _sync_grid(grid, int(grid.sum()), weight, rng)
    return weight


@dataclass(frozen=True)
class CycleRecord:
    """One completed feedback cycle.

    ``start`` and ``end`` are step indices, so ``end - start`` is the
    cycle length; ``weight`` is the workload weight when the cycle's
    collective opinion took effect.
    """

    start: int
    end: int
    opinion: float
    weight: float
    consensus_steps: int


@dataclass(frozen=True)
class DecisionTrace:
    strategy: str
    n_agents: int
    n_sources: int
    survival: int
    collapsed: bool
    records: list[CycleRecord]
    weights: np.ndarray | None = None


def simulate_decision(
    strategy: str,
    n_agents: int,
    n_sources: int,
    rng: np.random.Generator,
    *,
    start_weight: float = START_WEIGHT,
    step_size: float = ENV_STEP,
    memory: float = OPINION_MEMORY,
    rate: float = CONSENSUS_RATE,
    max_steps: int = MAX_STEPS,
    keep_weights: bool = False,
) -> DecisionTrace:
    """Run one simulation until collapse or exactly ``max_steps`` steps.

    Each cycle spends one step on opinion formation (none for
    ``random_total``, which produces its outcome directly) plus the
    negotiation steps reported by :func:`consensus_outcome`. The
    environment keeps moving under the previous collective opinion for
    the whole cycle; the new opinion takes effect only when the cycle
    completes. A cycle cut short by collapse or by the step cap is not
    recorded.

    Scanning strategies read the grid once, at the start of each cycle.
    The grid's cell mix is reconciled with the weight at exactly those
    read points; because the weight moves in one direction between
    consecutive reads, batching the uniform cell flips there draws from
    the same distribution as flipping after every step.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    if not 0.0 <= start_weight <= 1.0:
        raise ValueError("start_weight must lie in [0, 1]")
    if step_size <= 0 or rate <= 0:
        raise ValueError("step_size and rate must be positive")

    weight = float(start_weight)
    history = [weight] if keep_weights else None
    records: list[CycleRecord] = []
    if collapse_state(weight):
        return DecisionTrace(
            strategy, n_agents, n_sources, 0, True, records,
            np.array(history) if history is not None else None,
        )

    positions = place_agents(n_agents, rng)
    scans = strategy in _SCANNING
    if scans:
        indices = scan_indices(positions, n_sources)
        grid = np.zeros(CELL_COUNT, dtype=bool)
        cells = _sync_grid(grid, 0, weight, rng)
    else:
        scan_offsets(n_sources)
        grid = None
        cells = 0

    opinions = None
    collective = None
    collapsed = False
    t = 0
    while t < max_steps:
        start = t
        if scans:
            cells = _sync_grid(grid, cells, weight, rng)
            opinions = blend_opinions(grid[indices].mean(axis=1), opinions, memory)
        elif strategy == "random_opinion":
            opinions = rng.random(n_agents)
        outcome, negotiation = consensus_outcome(opinions, strategy, rng, rate)
        length = negotiation if strategy == "random_total" else 1 + negotiation
        planned = min(length, max_steps - t)
        for _ in range(planned):
            t += 1
            weight = _next_weight(weight, collective, step_size)
            if history is not None:
                history.append(weight)
            if collapse_state(weight):
                collapsed = True
                break
        if collapsed or planned < length:
            break
        collective = outcome
        records.append(CycleRecord(start, t, collective, weight, negotiation))

    return DecisionTrace(
        strategy, n_agents, n_sources, t, collapsed, records,
        np.array(history) if history is not None else None,
    )


def _binomial_mean_entropy(trials: int) -> float:
    """Entropy in bits of the mean of ``trials`` fair binary readings."""
    log_half = trials * math.log(2.0)
    log_probs = [
        math.lgamma(trials + 1) - math.lgamma(k + 1) - math.lgamma(trials - k + 1)
        - log_half
        for k in range(trials + 1)
    ]
    probs = np.exp(log_probs)
    outcomes = [k / trials for k in range(trials + 1)]
    return shannon_entropy(DiscreteDistribution(outcomes, probs / probs.sum()))


def opinion_entropy(n_sources: int) -> float:
    """Bits one scanned opinion can carry.

    The opinion register holds the mean of ``n_sources`` binary cells;
    with every cell equally likely to show either task the attainable
    means follow a symmetric binomial law.
    """
    if n_sources < 1:
        raise ValueError("n_sources must be at least 1")
    return _binomial_mean_entropy(n_sources)


def signal_entropy(n_agents: int, n_sources: int, strategy: str) -> float:
    """Bits held across all individual opinion registers per cycle.

    Scanning strategies store one binomial-mean opinion per agent.
    ``random_opinion`` fills the same registers with uniform noise, which
    at the register's resolution is the maximum-entropy content.
    ``random_total`` never forms individual opinions at all.
    """
    if n_agents < 1:
        raise ValueError("n_agents must be at least 1")
    if strategy in _SCANNING:
        return n_agents * opinion_entropy(n_sources)
    if strategy == "random_opinion":
        if n_sources < 1:
            raise ValueError("n_sources must be at least 1")
        return n_agents * math.log2(n_sources + 1)
    if strategy == "random_total":
        scan_offsets(n_sources)
        return 0.0
    raise ValueError(f"unknown strategy {strategy!r}")


def collective_entropy(n_agents: int, n_sources: int, strategy: str,
                       samples: int = _ENTROPY_SAMPLES,
                       rng: np.random.Generator | None = None) -> float:
    """Bits the collective opinion register can carry per cycle.

    For ``consensus`` the average of the agents' binomial means lands
    exactly on the lattice of multiples of 1/(agents * sources), and its
    law is the binomial of the pooled readings, so the entropy has a
    closed form. ``random_opinion`` averages continuous uniform draws
    instead; its entropy on the same lattice is estimated by Monte Carlo
    with a fixed internal seed unless a generator is supplied.
    ``random_consensus`` publishes one uniformly chosen opinion, whose
    marginal law is that of a single opinion, and ``random_total`` a
    uniform draw quantised to the lattice.
    """
    if n_agents < 1 or n_sources < 1:
        raise ValueError("n_agents and n_sources must be at least 1")
    lattice = n_agents * n_sources
    if strategy == "consensus":
        return _binomial_mean_entropy(lattice)
    if strategy == "random_consensus":
        return opinion_entropy(n_sources)
    if strategy == "random_total":
        return math.log2(lattice + 1)
    if strategy != "random_opinion":
        raise ValueError(f"unknown strategy {strategy!r}")
    if samples < 1:
        raise ValueError("samples must be positive")
    if rng is None:
        rng = np.random.default_rng(_ENTROPY_SEED)
    means = rng.random((samples, n_agents)).mean(axis=1)
    bins = np.bincount(np.rint(means * lattice).astype(int), minlength=lattice + 1)
    probs = bins[bins > 0] / samples
    return float(-(probs * np.log2(probs)).sum())


_C_SYN_CACHE: dict[tuple[int, int, str], float] = {}


def c_syn_decision(n_agents: int, n_sources: int, strategy: str) -> float:
    """Syntactic content of one feedback cycle, in bits.

    The sum of what the individual opinion registers and the collective
    opinion register can carry. Deterministic, so results are cached.
    """
    key = (n_agents, n_sources, strategy)
    if key not in _C_SYN_CACHE:
        _C_SYN_CACHE[key] = signal_entropy(
            n_agents, n_sources, strategy
        ) + collective_entropy(n_agents, n_sources, strategy)
    return _C_SYN_CACHE[key]


def cycle_measures(trace: DecisionTrace, c_syn: float | None = None,
                   goal_value_sign: str = "prose") -> dict[str, list]:
    """Per-cycle information measures, indexed by cycle end times.

    Cross-cycle measures (semantic change, both values, the pragmatic
    change and the efficiencies) are NA on the first cycle because there
    is no earlier cycle to compare against; the truth and goal distances
    are defined from the first cycle on.

    ``goal_value_sign`` follows the convention used for the oscillator
    study: "prose" (default) counts a move toward the balanced workload
    as positive value, "literal" flips the sign.
    """
    if goal_value_sign not in ("prose", "literal"):
        raise ValueError("goal_value_sign must be 'prose' or 'literal'")
    if c_syn is None:
        c_syn = c_syn_decision(trace.n_agents, trace.n_sources, trace.strategy)
    records = trace.records
    truth = [abs(r.opinion - r.weight) for r in records]
    goal = [goal_level(r.weight) for r in records]
    semantic: list = [None] if records else []
    pragmatic: list = [None] if records else []
    v_truth: list = [None] if records else []
    v_goal: list = [None] if records else []
    for k in range(1, len(records)):
        semantic.append(abs(records[k].opinion - records[k - 1].opinion))
        pragmatic.append(abs(records[k].weight - records[k - 1].weight))
        v_truth.append(truth[k - 1] - truth[k])
        swing = goal[k] - goal[k - 1]
        v_goal.append(swing if goal_value_sign == "prose" else -swing)
    return {
        "times": [r.end for r in records],
        "delta_semantic": semantic,
        "delta_truth": truth,
        "v_semantic_truth": v_truth,
        "e_semantic_truth": [efficiency(v, c_syn) for v in v_truth],
        "delta_pragmatic": pragmatic,
        "delta_goal": goal,
        "v_pragmatic_goal": v_goal,
        "e_pragmatic_goal": [efficiency(v, c_syn) for v in v_goal],
    }


def cycle_averages(trace: DecisionTrace, c_syn: float | None = None,
                   goal_value_sign: str = "prose") -> dict:
    """Within-run averages of the per-cycle measures.

    Returns the mean over defined entries for every measure (None when
    nothing is defined), plus the cycle count, survival time and
    collapse flag. Cross-run aggregation should weight these means by
    the cycle count.
    """
    table = cycle_measures(trace, c_syn, goal_value_sign)
    out = {
        "cycles": len(trace.records),
        "survival": trace.survival,
        "collapsed": trace.collapsed,
    }
    for kind, values in table.items():
        if kind == "times":
            continue
        defined = [v for v in values if v is not None]
        out[kind] = sum(defined) / len(defined) if defined else None
    return out


def _run_collective_decision(
    cfg: ExperimentConfig, stream: int, rng: np.random.Generator, full_trace: bool
) -> RunTrace:
    n_agents = int(cfg.parameter("n_agents", cfg.parameter("N", 5)))
    n_sources = int(cfg.parameter("n_sources", cfg.parameter("R", 5)))
    start = float(cfg.parameter("start_weight", cfg.parameter("W_A_start", START_WEIGHT)))
    trace = simulate_decision(
        cfg.strategy,
        n_agents,
        n_sources,
        rng,
        start_weight=start,
        step_size=float(cfg.parameter("step_size", ENV_STEP)),
        memory=float(cfg.parameter("memory", OPINION_MEMORY)),
        rate=float(cfg.parameter("rate", CONSENSUS_RATE)),
        max_steps=int(cfg.horizon),
        keep_weights=full_trace,
    )
    c_syn = c_syn_decision(n_agents, n_sources, cfg.strategy)
    table = cycle_measures(
        trace, c_syn, str(cfg.parameter("goal_value_sign", "prose"))
    )
    times = table.pop("times")
    measures = {
        kind: MeasureSeries(kind, times, values) for kind, values in table.items()
    }
    snapshots = trace.weights.tolist() if trace.weights is not None else None
    return RunTrace(
        cfg.case_study,
        cfg.strategy,
        cfg.seed,
        stream,
        measures,
        [record.end for record in trace.records],
        snapshots,
        {
            "c_syn_cycle": c_syn,
            "survival_steps": trace.survival,
            "collapsed": trace.collapsed,
            "cycles": len(trace.records),
        },
    )


register_case_study("collective_decision", _run_collective_decision, STRATEGIES)
