"""Self-distributing robot swarm on a ring of four rooms.

A hundred robots spread themselves over four ring-connected rooms in
proportion to how many objects each room holds (70/70/30/30 out of 200).
A robot only ever senses its own room and hears from robots standing in
the same room, so the heart of the model is the estimation pipeline:
per-room detection buffers, smoothed gossip, and the demand signal that
steers locomotion toward under-served rooms.

Four strategies share the locomotion rule and differ in how the
six-component estimate vector (objects and robots over the three rooms a
robot can reach) is produced:

* ``estimation_long`` and ``estimation_short``: moving-average sensing
  with horizons of 100 or 10 samples, blended pairwise with gossiped
  estimates and renormalized per half.
* ``ground_truth``: the actual normalized counts are copied in directly.
* ``random``: fresh uniform noise, normalized, every step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import ExperimentConfig, RunTrace, register_case_study
from .measures import MeasureSeries

N_ROBOTS = 100
N_ROOMS = 4
OBJECT_COUNTS = np.array([70, 70, 30, 30])
TOTAL_OBJECTS = 200
OBJECT_FRACTIONS = OBJECT_COUNTS / TOTAL_OBJECTS

# Row r lists the rooms a robot standing in room r can reason about:
# left neighbor, the room itself, right neighbor on the ring.
_REL_TABLE = np.stack(
    (
        (np.arange(N_ROOMS) - 1) % N_ROOMS,
        np.arange(N_ROOMS),
        (np.arange(N_ROOMS) + 1) % N_ROOMS,
    ),
    axis=1,
)
_OBJ_SHARE = OBJECT_COUNTS[_REL_TABLE] / OBJECT_COUNTS[_REL_TABLE].sum(
    axis=1, keepdims=True
)
_ROOM_IDS = np.arange(N_ROOMS)

MOVE_PROBABILITY = 0.1
COMM_SMOOTHING = 0.1
MAX_COMM_PARTNERS = 2
# Steps a committed hop spends in flight (counted in the origin room).
# Zero would make hops instantaneous, letting every strategy re-decide
# before any relocation lands; the resulting dynamics drain smoothly
# into the proportional fixed point and freeze there, which is not how
# a swarm with travel time behaves.
TRAVEL_DELAY = 3
DEFAULT_STEPS = 2000
GOAL_WINDOWS = (10, 100, 500)

STRATEGIES = ("estimation_long", "estimation_short", "ground_truth", "random")
SENSING_HORIZONS = {"estimation_long": 100, "estimation_short": 10}

# Memory census: six sample buffers of M entries plus the fixed registers
# of the estimation pipeline; direct strategies keep only the estimate
# vector, the demand vector, and the goal.
BUFFERED_MEMORY_OFFSET = 38
DIRECT_MEMORY_UNITS = 10.0

__all__ = [
    "GOAL_WINDOWS",
    "MOVE_PROBABILITY",
    "N_ROBOTS",
    "N_ROOMS",
    "OBJECT_COUNTS",
    "SENSING_HORIZONS",
    "STRATEGIES",
    "StepMeasures",
    "SwarmState",
    "SwarmTrace",
    "c_syn_robotic",
    "choose_goals",
    "estimate_demand",
    "goal_distance",
    "goal_value_windows",
    "initial_state",
    "normalize_halves",
    "relevant_rooms",
    "semantic_truth_values",
    "simulate",
    "step",
    "step_toward",
    "true_estimates",
]


def c_syn_robotic(strategy: str, sensing_horizon: int | None = None) -> float:
    """Memory units a single robot devotes to the strategy's pipeline."""
    if strategy in SENSING_HORIZONS:
        horizon = SENSING_HORIZONS[strategy] if sensing_horizon is None else int(
            sensing_horizon
        )
        return 6.0 * horizon + BUFFERED_MEMORY_OFFSET
    if strategy in STRATEGIES:
        return DIRECT_MEMORY_UNITS
    raise ValueError(f"unknown strategy {strategy!r}")


def relevant_rooms(rooms: np.ndarray) -> np.ndarray:
    """The rooms a robot can reason about: left neighbor, here, right."""
    return _REL_TABLE[np.asarray(rooms)]


def normalize_halves(raw: np.ndarray) -> np.ndarray:
    """Scale the object and robot halves to sum to one where possible.

    All-zero halves are left alone; a zero vector carries no information
    to distribute.
    """
    est = np.array(raw, dtype=float)
    for sl in (slice(0, 3), slice(3, 6)):
        part = est[..., sl]
        total = part.sum(axis=-1, keepdims=True)
        np.divide(part, total, out=part, where=total > 0)
    return est


def _room_truth(robot_counts: np.ndarray) -> np.ndarray:
    """True estimate vector for a robot standing in each room, (4, 6)."""
    robots = np.asarray(robot_counts, dtype=float)[_REL_TABLE]
    total = robots.sum(axis=1, keepdims=True)
    np.divide(robots, total, out=robots, where=total > 0)
    return np.concatenate([_OBJ_SHARE, robots], axis=1)


def true_estimates(rooms: np.ndarray, robot_counts: np.ndarray) -> np.ndarray:
    return _room_truth(robot_counts)[np.asarray(rooms)]


def estimate_demand(estimates: np.ndarray) -> np.ndarray:
    """Per-room demand: object share of everything seen in the room.

    Rooms with no evidence at all (both halves zero) come back as NaN so
    goal selection can skip them.
    """
    est = np.asarray(estimates, dtype=float)
    objects = est[..., :3]
    denom = objects + est[..., 3:]
    phi = np.full_like(denom, np.nan)
    np.divide(objects, denom, out=phi, where=denom > 0)
    return phi


def _choose_goals_at(
    rel: np.ndarray, demand: np.ndarray, rooms: np.ndarray, fallback: np.ndarray
) -> np.ndarray:
    filled = np.where(np.isnan(demand), -np.inf, np.asarray(demand, dtype=float))
    best = filled.max(axis=-1)
    tied = filled == best[..., None]
    lowest_tied = np.where(tied, rel, N_ROOMS).min(axis=-1)
    goals = np.where(tied[..., 1], rooms, lowest_tied)
    return np.where(np.isfinite(best), goals, fallback)


def choose_goals(
    demand: np.ndarray, rooms: np.ndarray, fallback: np.ndarray
) -> np.ndarray:
    """Pick the highest-demand relevant room per robot.

    The current room wins ties, then the lowest room index; a robot with
    no defined demand at all keeps its fallback goal.
    """
    return _choose_goals_at(relevant_rooms(rooms), demand, rooms, fallback)


def step_toward(rooms: np.ndarray, goals: np.ndarray) -> np.ndarray:
    """Adjacent room nearest the goal on the ring (lower index on a tie)."""
    rooms = np.asarray(rooms)
    ahead = (np.asarray(goals) - rooms) % N_ROOMS
    forward = (rooms + 1) % N_ROOMS
    back = (rooms - 1) % N_ROOMS
    nearest = np.where(
        ahead == 1, forward, np.where(ahead == 3, back, np.minimum(forward, back))
    )
    return np.where(ahead == 0, rooms, nearest)


def goal_distance(robot_counts: np.ndarray) -> float:
    """Mean absolute gap between robot and object distributions."""
    counts = np.asarray(robot_counts, dtype=float)
    fractions = counts / counts.sum()
    return float(np.abs(OBJECT_FRACTIONS - fractions).sum() / N_ROOMS)


@dataclass
class SwarmState:
    strategy: str
    sensing_horizon: int
    rooms: np.ndarray
    goals: np.ndarray
    estimates: np.ndarray
    # Room each robot occupied when its estimate vector was computed;
    # receivers need it to map gossiped components onto absolute rooms.
    frame_rooms: np.ndarray
    comm: np.ndarray
    buffers: np.ndarray
    buffer_len: np.ndarray
    buffer_pos: np.ndarray
    buffer_sum: np.ndarray
    # In-flight hops: destination room (-1 when idle) and steps left.
    transit_target: np.ndarray
    transit_left: np.ndarray

    def room_counts(self) -> np.ndarray:
        return np.bincount(self.rooms, minlength=N_ROOMS)


@dataclass(frozen=True)
class StepMeasures:
    delta_semantic: float
    delta_truth_counts: float
    delta_truth_full: float
    delta_truth_partial: float
    delta_goal: float


def initial_state(strategy: str, sensing_horizon: int | None = None) -> SwarmState:
    """Twenty-five robots per room, goals at home, uninformed pipelines.

    Robots start from default knowledge: a uniform estimate vector and a
    uniform gossip memory, so every room looks alike until detections
    arrive.  Sense buffers start empty.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    horizon = SENSING_HORIZONS.get(strategy, 0)
    if sensing_horizon is not None:
        if strategy not in SENSING_HORIZONS:
            raise ValueError(f"{strategy!r} does not use a sensing horizon")
        horizon = int(sensing_horizon)
        if horizon < 1:
            raise ValueError("sensing horizon must be at least 1")
    depth = max(horizon, 1)
    rooms = np.arange(N_ROBOTS) % N_ROOMS
    return SwarmState(
        strategy=strategy,
        sensing_horizon=horizon,
        rooms=rooms,
        goals=rooms.copy(),
        estimates=np.full((N_ROBOTS, 6), 1.0 / 3.0),
        frame_rooms=rooms.copy(),
        comm=np.full((N_ROBOTS, N_ROOMS, 2), 1.0 / 3.0),
        buffers=np.zeros((N_ROBOTS, N_ROOMS, 2, depth)),
        buffer_len=np.zeros((N_ROBOTS, N_ROOMS, 2), dtype=int),
        buffer_pos=np.zeros((N_ROBOTS, N_ROOMS, 2), dtype=int),
        buffer_sum=np.zeros((N_ROBOTS, N_ROOMS, 2)),
        transit_target=np.full(N_ROBOTS, -1),
        transit_left=np.zeros(N_ROBOTS, dtype=int),
    )


def _sample_partners(rooms: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Up to two distinct same-room gossip partners per robot, or -1.

    Sampling works on room-sorted ranks so no per-room Python loop is
    needed; draw counts are fixed per step, keeping streams aligned
    between runs regardless of where robots stand.
    """
    n = rooms.size
    order = np.argsort(rooms, kind="stable")
    counts = np.bincount(rooms, minlength=N_ROOMS)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    rank = np.empty(n, dtype=int)
    rank[order] = np.arange(n) - np.repeat(starts, counts)
    k = counts[rooms]
    base = starts[rooms]

    partners = np.full((n, MAX_COMM_PARTNERS), -1)
    first = rng.integers(0, np.maximum(k - 1, 1))
    first += first >= rank
    has_one = k >= 2
    partners[:, 0] = np.where(has_one, order[np.minimum(base + first, n - 1)], -1)

    second = rng.integers(0, np.maximum(k - 2, 1))
    lo = np.minimum(rank, first)
    hi = np.maximum(rank, first)
    second += second >= lo
    second += second >= hi
    has_two = k >= 3
    partners[:, 1] = np.where(has_two, order[np.minimum(base + second, n - 1)], -1)
    return partners


def _sense(state: SwarmState, rng: np.random.Generator) -> None:
    """Bernoulli detections in the current room, pushed into ring buffers."""
    rooms = state.rooms
    n = rooms.size
    counts = state.room_counts()
    chance = np.stack(
        [OBJECT_COUNTS[rooms] / TOTAL_OBJECTS, counts[rooms] / n], axis=1
    )
    sample = (rng.random((n, 2)) < chance).astype(float)
    # Both detection kinds of the current room live in adjacent cells of
    # the flattened (robot, room, kind) grid.
    cells = ((np.arange(n) * N_ROOMS + rooms) * 2)[:, None] + np.arange(2)
    depth = state.buffers.shape[-1]
    buffers = state.buffers.reshape(-1, depth)
    buffer_sum = state.buffer_sum.reshape(-1)
    buffer_pos = state.buffer_pos.reshape(-1)
    buffer_len = state.buffer_len.reshape(-1)
    pos = buffer_pos[cells]
    old = buffers[cells, pos]
    buffers[cells, pos] = sample
    buffer_sum[cells] += sample - old
    buffer_pos[cells] = (pos + 1) % depth
    buffer_len[cells] = np.minimum(buffer_len[cells] + 1, depth)


def _gossip(
    state: SwarmState, rng: np.random.Generator, comm_rate: float
) -> None:
    partners = _sample_partners(state.rooms, rng)
    comm = state.comm.reshape(-1, 2)
    for column in range(MAX_COMM_PARTNERS):
        listeners = np.nonzero(partners[:, column] >= 0)[0]
        if listeners.size == 0:
            continue
        speakers = partners[listeners, column]
        cells = (
            listeners[:, None] * N_ROOMS + _REL_TABLE[state.frame_rooms[speakers]]
        )
        # Rearrange the flat six-component vectors to (room, kind) blocks
        # matching the comm layout.
        received = state.estimates[speakers].reshape(-1, 2, 3).transpose(0, 2, 1)
        comm[cells] = (1.0 - comm_rate) * comm[cells] + comm_rate * received


def _estimation_vectors(state: SwarmState, rel: np.ndarray) -> np.ndarray:
    n = state.rooms.size
    cells = np.arange(n)[:, None] * N_ROOMS + rel
    sums = state.buffer_sum.reshape(-1, 2)[cells]
    lens = state.buffer_len.reshape(-1, 2)[cells]
    sensed = np.zeros_like(sums)
    np.divide(sums, lens, out=sensed, where=lens > 0)
    paired = (sensed + state.comm.reshape(-1, 2)[cells]) / 2.0
    half_total = paired.sum(axis=1, keepdims=True)
    np.divide(paired, half_total, out=paired, where=half_total > 0)
    return paired.transpose(0, 2, 1).reshape(n, 6)


def step(
    state: SwarmState,
    rng: np.random.Generator,
    *,
    p_move: float = MOVE_PROBABILITY,
    comm_rate: float = COMM_SMOOTHING,
    travel_delay: int = TRAVEL_DELAY,
) -> StepMeasures:
    """Advance the swarm one tick and report the step's measures.

    All robots read the same start-of-step world: detection and gossip
    use the old room occupancy and last step's estimate vectors, then
    everyone moves at once.  A hop that wins its p_move draw is
    committed: the robot stays counted in its origin room while in
    flight and lands travel_delay steps later, whatever its goal says
    by then.
    """
    rooms = state.rooms
    counts = state.room_counts()
    rel = _REL_TABLE[rooms]
    truth_by_room = _room_truth(counts)
    truth = truth_by_room[rooms]
    previous = state.estimates

    # All robots in a room share the true estimate, so the true goal only
    # needs deciding once per room.  Object counts are all positive, so
    # true demand is defined everywhere and never falls back.
    true_goals = _choose_goals_at(
        _REL_TABLE, estimate_demand(truth_by_room), _ROOM_IDS, _ROOM_IDS
    )[rooms]

    if state.strategy in SENSING_HORIZONS:
        _sense(state, rng)
        _gossip(state, rng, comm_rate)
        estimates = _estimation_vectors(state, rel)
        goals = _choose_goals_at(rel, estimate_demand(estimates), rooms, state.goals)
    elif state.strategy == "ground_truth":
        estimates = truth
        goals = true_goals
    else:
        estimates = normalize_halves(rng.random((rooms.size, 6)))
        goals = _choose_goals_at(rel, estimate_demand(estimates), rooms, state.goals)

    wrong = goals != true_goals

    state.frame_rooms = rooms
    state.estimates = estimates
    state.goals = goals

    in_flight = state.transit_target >= 0
    state.transit_left[in_flight] -= 1
    landing = in_flight & (state.transit_left <= 0)
    new_rooms = np.where(landing, state.transit_target, rooms)
    state.transit_target = np.where(landing, -1, state.transit_target)

    launching = (
        (state.transit_target < 0)
        & (goals != new_rooms)
        & (rng.random(rooms.size) < p_move)
    )
    if travel_delay > 0:
        state.transit_target = np.where(
            launching, step_toward(new_rooms, goals), state.transit_target
        )
        state.transit_left = np.where(launching, travel_delay, state.transit_left)
    else:
        new_rooms = np.where(launching, step_toward(new_rooms, goals), new_rooms)
    state.rooms = new_rooms

    return StepMeasures(
        delta_semantic=float(np.abs(estimates - previous).max(axis=1).mean()),
        delta_truth_counts=float(np.abs(estimates - truth).mean()),
        delta_truth_full=float(wrong.mean()),
        delta_truth_partial=float((wrong & (goals != rooms)).mean()),
        delta_goal=goal_distance(state.room_counts()),
    )


@dataclass(frozen=True)
class SwarmTrace:
    strategy: str
    sensing_horizon: int
    delta_semantic: np.ndarray
    delta_truth_counts: np.ndarray
    delta_truth_full: np.ndarray
    delta_truth_partial: np.ndarray
    delta_goal: np.ndarray
    room_history: np.ndarray | None = None


def simulate(
    strategy: str,
    steps: int = DEFAULT_STEPS,
    rng: np.random.Generator | int | None = None,
    *,
    sensing_horizon: int | None = None,
    p_move: float = MOVE_PROBABILITY,
    comm_rate: float = COMM_SMOOTHING,
    travel_delay: int = TRAVEL_DELAY,
    keep_rooms: bool = False,
) -> SwarmTrace:
    """Run one repetition and collect the per-step measure series.

    ``delta_goal`` covers t = 0..steps (the start counts included); the
    discrepancy series start at t = 1, the first step with estimates.
    """
    if steps < 1:
        raise ValueError("steps must be positive")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    state = initial_state(strategy, sensing_horizon)
    semantic = np.empty(steps)
    counts_gap = np.empty(steps)
    full_gap = np.empty(steps)
    partial_gap = np.empty(steps)
    goal_gap = np.empty(steps + 1)
    goal_gap[0] = goal_distance(state.room_counts())
    rooms = np.empty((steps + 1, N_ROOMS), dtype=int) if keep_rooms else None
    if rooms is not None:
        rooms[0] = state.room_counts()
    for t in range(1, steps + 1):
        record = step(
            state, rng, p_move=p_move, comm_rate=comm_rate, travel_delay=travel_delay
        )
        semantic[t - 1] = record.delta_semantic
        counts_gap[t - 1] = record.delta_truth_counts
        full_gap[t - 1] = record.delta_truth_full
        partial_gap[t - 1] = record.delta_truth_partial
        goal_gap[t] = record.delta_goal
        if rooms is not None:
            rooms[t] = state.room_counts()
    return SwarmTrace(
        strategy,
        state.sensing_horizon,
        semantic,
        counts_gap,
        full_gap,
        partial_gap,
        goal_gap,
        rooms,
    )


def semantic_truth_values(
    delta_truth: np.ndarray, c_syn: float
) -> tuple[list[float | None], list[float | None]]:
    """Truth value and efficiency per step; the first step has no anchor."""
    values: list[float | None] = [None]
    efficiency: list[float | None] = [None]
    series = np.asarray(delta_truth, dtype=float)
    for prev, now in zip(series[:-1], series[1:]):
        gain = float(prev - now)
        values.append(gain)
        efficiency.append(gain / c_syn)
    return values, efficiency


def goal_value_windows(
    delta_goal: np.ndarray, window: int, c_syn: float
) -> tuple[list[float | None], list[float | None]]:
    """Windowed goal value and efficiency; NA until the window fills."""
    if window < 1:
        raise ValueError("window must be positive")
    series = np.asarray(delta_goal, dtype=float)
    blank = min(window, series.size)
    values: list[float | None] = [None] * blank
    efficiency: list[float | None] = [None] * blank
    for t in range(blank, series.size):
        gain = float(series[t - window] - series[t])
        values.append(gain)
        efficiency.append(gain / c_syn)
    return values, efficiency


def _run_robotic_collective(
    cfg: ExperimentConfig, stream: int, rng: np.random.Generator, full_trace: bool
) -> RunTrace:
    steps = int(cfg.horizon)
    horizon_param = cfg.parameter("sensing_horizon", 0)
    trace = simulate(
        cfg.strategy,
        steps,
        rng,
        sensing_horizon=int(horizon_param) if horizon_param else None,
        p_move=float(cfg.parameter("p_move", MOVE_PROBABILITY)),
        comm_rate=float(cfg.parameter("comm_rate", COMM_SMOOTHING)),
        travel_delay=int(cfg.parameter("travel_delay", TRAVEL_DELAY)),
        keep_rooms=full_trace,
    )
    c_syn = c_syn_robotic(cfg.strategy, trace.sensing_horizon or None)
    step_times = list(range(1, steps + 1))
    goal_times = list(range(steps + 1))
    measures = {
        "delta_semantic": MeasureSeries(
            "delta_semantic", step_times, trace.delta_semantic.tolist()
        ),
        "delta_goal": MeasureSeries(
            "delta_goal", goal_times, trace.delta_goal.tolist()
        ),
    }
    submodels = {
        "counts": trace.delta_truth_counts,
        "full": trace.delta_truth_full,
        "partial": trace.delta_truth_partial,
    }
    for label, series in submodels.items():
        measures[f"delta_truth_{label}"] = MeasureSeries(
            f"delta_truth_{label}", step_times, series.tolist()
        )
        value, efficiency = semantic_truth_values(series, c_syn)
        measures[f"v_semantic_truth_{label}"] = MeasureSeries(
            f"v_semantic_truth_{label}", step_times, value
        )
        measures[f"e_semantic_truth_{label}"] = MeasureSeries(
            f"e_semantic_truth_{label}", step_times, efficiency
        )
    for window in GOAL_WINDOWS:
        value, efficiency = goal_value_windows(trace.delta_goal, window, c_syn)
        measures[f"v_pragmatic_goal_{window}"] = MeasureSeries(
            f"v_pragmatic_goal_{window}", goal_times, value, window=float(window)
        )
        measures[f"e_pragmatic_goal_{window}"] = MeasureSeries(
            f"e_pragmatic_goal_{window}", goal_times, efficiency, window=float(window)
        )
    snapshots = None
    if full_trace and trace.room_history is not None:
        snapshots = [tuple(int(c) for c in row) for row in trace.room_history]
    return RunTrace(
        cfg.case_study,
        cfg.strategy,
        cfg.seed,
        stream,
        measures,
        [],
        snapshots,
        {"c_syn_memory": c_syn},
    )


register_case_study("robotic_collective", _run_robotic_collective, STRATEGIES)
