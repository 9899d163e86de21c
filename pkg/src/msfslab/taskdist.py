"""Task redistribution in a three-scale worker/manager hierarchy.

Four workers each execute one of two task types; the goal is to move
all of them onto the second type. Two mid-managers summarize their
worker pair and one top manager summarizes the mids. Five strategies
differ in how that summary information is turned into switching:

- ``broadcast``: the top manager computes a signed shortfall against
  the goal, each mid receives the ceiling half of it and broadcasts it
  to its workers, and every worker that sees a shortfall switches with
  a fixed propensity.
- ``mediated``: each mid knows its share of the goal and directs the
  exact workers that must switch; the top manager only passes the goal
  down and keeps no error register.
- ``random_switch``: every worker toggles task with the same propensity
  the broadcast workers use, ignoring the hierarchy.
- ``random_rebalance``: every worker re-draws its task fairly each
  step, ignoring the hierarchy.
- ``static``: nobody ever switches.

The module provides the register-level step function, a deterministic
demonstration scenario with prescribed draw outcomes, the per-cycle
information accounting, equivalence-class transition chains over the
worker count, goal-value curves, and the faulty-reporter experiment in
which worker 0 claims to be done regardless of its true task.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb
from typing import Iterable, Mapping

import numpy as np

from .kernel import ExperimentConfig, RunTrace, register_case_study
from .measures import DiscreteDistribution, MeasureSeries, shannon_entropy

__all__ = [
    "STRATEGIES",
    "GOAL",
    "SWITCH_PROBABILITY",
    "CONTROL_LATENCY",
    "STATE_VALUES",
    "MEDIATED_CYCLE_BITS",
    "TaskHierarchy",
    "StepEvents",
    "initial_hierarchy",
    "feedback_cycle_step",
    "step_with_events",
    "ScenarioReplay",
    "scenario_replay",
    "semantic_delta_td",
    "semantic_truth_td",
    "pragmatic_deltas_td",
    "build_transition_matrix",
    "worker_level_chain",
    "project_worker_chain",
    "goal_value_curve",
    "pragmatic_goal_value_td",
    "error_injection_experiment",
    "CycleInformation",
    "c_syn_td",
    "inter_scale_entropy_delta",
    "abstraction_entropies",
    "scenario_table_rows",
    "goal_value_rows",
]

STRATEGIES = ("broadcast", "mediated", "random_switch", "random_rebalance", "static")

N_WORKERS = 4
GOAL = 4

SWITCH_PROBABILITY: Mapping[str, float] = {
    "broadcast": 0.15,
    "random_switch": 0.15,
    "random_rebalance": 0.5,
}

# Steps of control latency before an instructed switch can first move
# worker state, matching the published goal-value curves: the broadcast
# loop spends two steps carrying the shortfall down, the mediated loop
# one step handing the goal to the mids; the flat strategies act at
# once.
CONTROL_LATENCY: Mapping[str, int] = {
    "broadcast": 2,
    "mediated": 1,
    "random_switch": 0,
    "random_rebalance": 0,
    "static": 0,
}

# Value of having z workers on the goal task, z = 0..4.
STATE_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)

# The mediated wiring stores goal shares and per-worker directives on
# top of the shared registers; its published per-cycle cost is adopted
# as a constant rather than re-derived from a register census.
MEDIATED_CYCLE_BITS = 24.0

TRUTH_DELTA_SCALE = 4.0
TRUTH_EFFICIENCY_SCALE = 10.0

_CONFIGS = tuple(product((0, 1), repeat=N_WORKERS))
_CONFIG_INDEX = {cfg: i for i, cfg in enumerate(_CONFIGS)}


def _require_strategy(strategy: str) -> None:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")


@dataclass(frozen=True)
class TaskHierarchy:
    """Registers of the three-scale hierarchy at one time step.

    Abstraction registers always exist; the control-side registers are
    None for strategies whose wiring never populates them (the
    mediated top manager keeps no error, and the flat strategies keep
    no manager-side control at all).
    """

    worker_states: tuple[int, ...]
    mid_abstractions: tuple[int, int]
    top_abstraction: int
    worker_errors: tuple[int, ...] | None
    mid_errors: tuple[int, int] | None
    top_error: int | None
    goal: int = GOAL

    def __post_init__(self) -> None:
        if len(self.worker_states) != N_WORKERS or any(
            s not in (0, 1) for s in self.worker_states
        ):
            raise ValueError("worker states must be four task flags")

    @property
    def workers_on_goal(self) -> int:
        return sum(self.worker_states)


@dataclass(frozen=True)
class StepEvents:
    """Who could have switched and who did, for one transition."""

    eligible: frozenset
    switched: frozenset


def _abstract(states: Iterable[int]) -> tuple[tuple[int, int], int]:
    s = tuple(states)
    mids = (s[0] + s[1], s[2] + s[3])
    return mids, mids[0] + mids[1]


def _split_between_mids(delta: int | None) -> tuple[int, int]:
    """Each mid receives the ceiling half of the shortfall, signed."""
    if delta is None or delta == 0:
        return (0, 0)
    half = (abs(delta) + 1) // 2
    signed = half if delta > 0 else -half
    return (signed, signed)


def initial_hierarchy(strategy: str, goal: int = GOAL) -> TaskHierarchy:
    """All workers off the goal task, registers zeroed where they exist."""
    _require_strategy(strategy)
    states = (0,) * N_WORKERS
    mids, top = _abstract(states)
    if strategy == "broadcast":
        return TaskHierarchy(states, mids, top, (0,) * N_WORKERS, (0, 0), top - goal, goal)
    if strategy == "mediated":
        return TaskHierarchy(states, mids, top, None, (0, 0), None, goal)
    return TaskHierarchy(states, mids, top, None, None, None, goal)


def _eligible_workers(
    h: TaskHierarchy, strategy: str, error_inject: bool, participation: str
) -> frozenset:
    if strategy in ("random_switch", "random_rebalance"):
        return frozenset(range(N_WORKERS))
    if strategy == "static" or h.mid_errors is None:
        return frozenset()
    chosen = set()
    for j, state in enumerate(h.worker_states):
        err = h.mid_errors[j // 2]
        if strategy == "broadcast":
            # A frozen faulty reporter also believes its own lie and
            # never acts; an acting one lies only upward.
            if error_inject and participation == "frozen" and j == 0:
                continue
            if (err < 0 and state == 0) or (err > 0 and state == 1):
                chosen.add(j)
        else:
            believed = 1 if (error_inject and j == 0) else state
            if err > 0 and believed == 0:
                chosen.add(j)
    return frozenset(chosen)


def step_with_events(
    h: TaskHierarchy,
    strategy: str,
    rng: np.random.Generator | None = None,
    *,
    error_inject: bool = False,
    participation: str = "frozen",
    scripted_successes: frozenset | set | None = None,
) -> tuple[TaskHierarchy, StepEvents]:
    """Advance one simulation step and report the switch events.

    Control registers update on the downward lag: the mids pick up the
    top shortfall computed last step, the workers act on the mid
    values visible when the step begins and see their copy arrive at
    the end of it. ``scripted_successes`` replaces the propensity draw
    with a prescribed set of succeeding workers (eligibility still
    applies), which is how the demonstration scenario stays exact.
    """
    _require_strategy(strategy)
    if participation not in ("frozen", "acting"):
        raise ValueError(f"unknown participation mode {participation!r}")
    eligible = _eligible_workers(h, strategy, error_inject, participation)
    if strategy == "mediated":
        switched = set(eligible)
    elif scripted_successes is not None:
        switched = set(scripted_successes) & set(eligible)
    elif strategy in SWITCH_PROBABILITY:
        if rng is None and eligible:
            raise ValueError(f"{strategy} switching needs a generator")
        p = SWITCH_PROBABILITY[strategy]
        switched = {j for j in eligible if rng.random() < p}
    else:
        switched = set()
    if strategy == "broadcast" and h.goal != GOAL and h.mid_errors is not None:
        # Split magnitudes cap per-mid switching below the published
        # four-worker goal; at the full goal every shortfall covers
        # both of a mid's children, so the cap never binds there.
        for mid in (0, 1):
            members = sorted(j for j in switched if j // 2 == mid)
            for j in members[abs(h.mid_errors[mid]):]:
                switched.discard(j)

    states = tuple(
        1 - s if j in switched else s for j, s in enumerate(h.worker_states)
    )
    mids_reported, top_reported = _abstract(
        _reported_states_tuple(states, error_inject)
    )

    if strategy == "broadcast":
        nxt = TaskHierarchy(
            states,
            mids_reported,
            top_reported,
            tuple(h.mid_errors[j // 2] for j in range(N_WORKERS)),
            _split_between_mids(h.top_error),
            top_reported - h.goal,
            h.goal,
        )
    elif strategy == "mediated":
        shares = ((h.goal + 1) // 2, h.goal // 2)
        nxt = TaskHierarchy(
            states,
            mids_reported,
            top_reported,
            None,
            (shares[0] - mids_reported[0], shares[1] - mids_reported[1]),
            None,
            h.goal,
        )
    else:
        # No information relay: manager registers stay untouched.
        nxt = TaskHierarchy(
            states, h.mid_abstractions, h.top_abstraction, None, None, None, h.goal
        )
    return nxt, StepEvents(frozenset(eligible), frozenset(switched))


def _reported_states_tuple(states: tuple[int, ...], error_inject: bool) -> tuple[int, ...]:
    return ((1,) + states[1:]) if error_inject else states


def feedback_cycle_step(
    h: TaskHierarchy,
    strategy: str,
    rng: np.random.Generator | None = None,
    *,
    error_inject: bool = False,
    participation: str = "frozen",
    scripted_successes: frozenset | set | None = None,
) -> TaskHierarchy:
    """One simulation step; see ``step_with_events`` for the event view."""
    nxt, _ = step_with_events(
        h,
        strategy,
        rng,
        error_inject=error_inject,
        participation=participation,
        scripted_successes=scripted_successes,
    )
    return nxt


# Prescribed draw outcomes that make the broadcast demonstration land
# exactly on its published register sequence: two workers succeed on
# the first live step, the other two on the next.
SCENARIO_SUCCESSES: Mapping[int, frozenset] = {
    1: frozenset({1, 3}),
    2: frozenset({0, 2}),
}


@dataclass
class ScenarioReplay:
    """Snapshots t_0..t_n plus the events of each transition."""

    strategy: str
    snapshots: list[TaskHierarchy]
    events: list[StepEvents]

    def __post_init__(self) -> None:
        if len(self.events) != len(self.snapshots) - 1:
            raise ValueError("one event record per transition expected")

    def switch_counts(self) -> list[int | None]:
        """Actual switches arriving at each step; None before the first
        transition exists."""
        return [None] + [len(ev.switched) for ev in self.events]

    def table(self, columns: int = 6) -> dict[str, list]:
        """Per-step measure rows of the demonstration scenario."""
        if len(self.snapshots) <= columns:
            raise ValueError("replay too short for the requested table")
        truth = semantic_truth_td(self)
        scope, adaptation = pragmatic_deltas_td(self)
        forward = [
            semantic_delta_td(a, b)
            for a, b in zip(self.snapshots, self.snapshots[1:])
        ]
        rows = {
            "workers_on_goal": [h.workers_on_goal for h in self.snapshots],
            "delta_semantic": forward,
            "delta_truth": truth["delta_truth"],
            "sv_truth": truth["sv_truth"],
            "v_semantic_truth": truth["v_semantic_truth"],
            "e_semantic_truth": truth["e_semantic_truth"],
            "delta_pragmatic_scope": scope,
            "delta_pragmatic_adaptation": adaptation,
        }
        return {name: series[:columns] for name, series in rows.items()}


def scenario_replay(
    strategy: str,
    steps: int = 7,
    rng: np.random.Generator | None = None,
    *,
    error_inject: bool = False,
    participation: str = "frozen",
) -> ScenarioReplay:
    """Run the demonstration scenario from the all-idle start.

    The broadcast strategy replays its prescribed draw outcomes; the
    mediated and static strategies are deterministic anyway; the
    random strategies need ``rng``.
    """
    _require_strategy(strategy)
    h = initial_hierarchy(strategy)
    snapshots, events = [h], []
    for t in range(steps):
        scripted = None
        if strategy == "broadcast":
            scripted = SCENARIO_SUCCESSES.get(t, frozenset())
        h, ev = step_with_events(
            h,
            strategy,
            rng,
            error_inject=error_inject,
            participation=participation,
            scripted_successes=scripted,
        )
        snapshots.append(h)
        events.append(ev)
    return ScenarioReplay(strategy, snapshots, events)


def semantic_delta_td(h_prev: TaskHierarchy, h_now: TaskHierarchy) -> float:
    """Total absolute register change between consecutive snapshots.

    Registers that a wiring never populates (None) contribute nothing.
    The two copies of a mid's broadcast held by its workers carry one
    value, so the change count takes one representative per mid.
    """
    total = 0.0
    total += sum(
        abs(b - a) for a, b in zip(h_prev.worker_states, h_now.worker_states)
    )
    total += sum(
        abs(b - a) for a, b in zip(h_prev.mid_abstractions, h_now.mid_abstractions)
    )
    total += abs(h_now.top_abstraction - h_prev.top_abstraction)
    if h_prev.mid_errors is not None and h_now.mid_errors is not None:
        total += sum(abs(b - a) for a, b in zip(h_prev.mid_errors, h_now.mid_errors))
    if h_prev.top_error is not None and h_now.top_error is not None:
        total += abs(h_now.top_error - h_prev.top_error)
    if h_prev.worker_errors is not None and h_now.worker_errors is not None:
        for j in (0, 2):
            total += abs(h_now.worker_errors[j] - h_prev.worker_errors[j])
    return total


def _truth_value(sv_now: float, sv_prev: float | None) -> float | None:
    """Direction of the state-value move, scaled to [-1, 1].

    None when there is no previous value; 0 when nothing changed. The
    all-zero denominator case also returns 0 -- it never occurs in the
    bundled scenarios, and callers can find it via the meta flag on
    the series they build.
    """
    if sv_prev is None:
        return None
    if sv_now == sv_prev:
        return 0.0
    if sv_now + sv_prev == 0:
        return 0.0
    return (sv_now - sv_prev) / (sv_now + sv_prev)


def semantic_truth_td(
    replay: ScenarioReplay, cycle_bits: float | None = None
) -> dict[str, list]:
    """Manager-estimate-against-ground-truth series for a replay.

    The estimate is the summed mid error register; the observation is
    the signed distance of the true worker count from the goal, taken
    in each wiring's own error convention (the broadcast loop tracks
    state minus goal, the mediated loop goal minus state). Strategies
    with no mid error registers yield all-None series.
    """
    if cycle_bits is None:
        cycle_bits = c_syn_td(replay.strategy).cycle
    delta, sv, value, efficiency = [], [], [], []
    prev_sv: float | None = None
    for h in replay.snapshots:
        if h.mid_errors is None:
            delta.append(None)
            sv.append(None)
            value.append(None)
            efficiency.append(None)
            continue
        est = sum(h.mid_errors)
        obs = (
            h.workers_on_goal - h.goal
            if replay.strategy == "broadcast"
            else h.goal - h.workers_on_goal
        )
        d = est - obs
        s = 1.0 - abs(d) / TRUTH_DELTA_SCALE
        v = _truth_value(s, prev_sv)
        delta.append(d)
        sv.append(s)
        value.append(v)
        efficiency.append(
            None
            if v is None
            else ((v + 1.0) / 2.0) / cycle_bits * TRUTH_EFFICIENCY_SCALE
        )
        prev_sv = s
    return {
        "delta_truth": delta,
        "sv_truth": sv,
        "v_semantic_truth": value,
        "e_semantic_truth": efficiency,
    }


def pragmatic_deltas_td(replay: ScenarioReplay) -> tuple[list, list]:
    """(scope, adaptation) series for a replay.

    Scope at step t counts the workers whose switch opportunity during
    the arriving transition existed only because control information
    reached them; strategies that ignore the hierarchy have the same
    opportunities either way, so their scope is zero. Adaptation is
    the change in actual switch counts and needs two transitions, so
    its first two entries are None.
    """
    uses_control = replay.strategy in ("broadcast", "mediated")
    scope: list = [0]
    for ev in replay.events:
        scope.append(len(ev.eligible) if uses_control else 0)
    counts = replay.switch_counts()
    adaptation: list = []
    for t in range(len(counts)):
        if t < 2 or counts[t] is None or counts[t - 1] is None:
            adaptation.append(None)
        else:
            adaptation.append(counts[t] - counts[t - 1])
    return scope[: len(replay.snapshots)], adaptation


def worker_level_chain(
    strategy: str,
    *,
    error_inject: bool = False,
    participation: str = "frozen",
) -> np.ndarray:
    """16-state transition matrix over worker configurations.

    One acting step of the strategy: control latency is not part of
    the chain and is applied by the goal-value curve. The faulty
    reporter freezes the chain once the reported count hits the goal,
    which with an acting reporter can strand the true state off-goal.
    """
    _require_strategy(strategy)
    chain = np.zeros((len(_CONFIGS), len(_CONFIGS)))
    for idx, cfg in enumerate(_CONFIGS):
        for target, p in _chain_moves(cfg, strategy, error_inject, participation):
            chain[idx, _CONFIG_INDEX[target]] += p
    return chain


def _chain_moves(cfg, strategy, error_inject, participation):
    if strategy == "static":
        return [(cfg, 1.0)]
    if strategy in ("random_switch", "random_rebalance"):
        p = SWITCH_PROBABILITY[strategy]
        movers = range(N_WORKERS)
        return _independent_flips(cfg, movers, p)
    reported = _reported_states_tuple(cfg, error_inject)
    if sum(reported) >= GOAL:
        return [(cfg, 1.0)]
    if strategy == "mediated":
        target = list(cfg)
        for j in range(N_WORKERS):
            believed = reported[j]
            if believed == 0:
                target[j] = 1
        return [(tuple(target), 1.0)]
    movers = [
        j
        for j in range(N_WORKERS)
        if cfg[j] == 0
        and not (error_inject and participation == "frozen" and j == 0)
    ]
    return _independent_flips(cfg, movers, SWITCH_PROBABILITY["broadcast"])


def _independent_flips(cfg, movers, p):
    movers = list(movers)
    out = []
    for pattern in product((0, 1), repeat=len(movers)):
        prob = 1.0
        target = list(cfg)
        for j, flip in zip(movers, pattern):
            prob *= p if flip else 1.0 - p
            if flip:
                target[j] = 1 - target[j]
        out.append((tuple(target), prob))
    return out


def project_worker_chain(chain: np.ndarray) -> np.ndarray:
    """Collapse a 16-state chain onto worker-count classes.

    Rows average the configurations inside each class, which is exact
    when the chain treats workers exchangeably.
    """
    classes = np.array([sum(cfg) for cfg in _CONFIGS])
    projected = np.zeros((N_WORKERS + 1, N_WORKERS + 1))
    for z in range(N_WORKERS + 1):
        members = classes == z
        rows = chain[members].sum(axis=0) / members.sum()
        for z2 in range(N_WORKERS + 1):
            projected[z, z2] = rows[classes == z2].sum()
    return projected


def build_transition_matrix(strategy: str) -> np.ndarray:
    """Class-level transition matrix over z = workers on the goal task."""
    _require_strategy(strategy)
    n = N_WORKERS + 1
    matrix = np.zeros((n, n))
    if strategy == "static":
        return np.eye(n)
    if strategy == "mediated":
        matrix[:, N_WORKERS] = 1.0
        return matrix
    if strategy == "broadcast":
        p = SWITCH_PROBABILITY[strategy]
        for z in range(n):
            for k in range(N_WORKERS - z + 1):
                matrix[z, z + k] = (
                    comb(N_WORKERS - z, k) * p**k * (1 - p) ** (N_WORKERS - z - k)
                )
        return matrix
    p = SWITCH_PROBABILITY[strategy]
    for z in range(n):
        for up in range(N_WORKERS - z + 1):
            for down in range(z + 1):
                prob = (
                    comb(N_WORKERS - z, up)
                    * p**up
                    * (1 - p) ** (N_WORKERS - z - up)
                    * comb(z, down)
                    * p**down
                    * (1 - p) ** (z - down)
                )
                matrix[z, z + up - down] += prob
    return matrix


def goal_value_curve(
    strategy: str,
    m_max: int = 50,
    *,
    error_inject: bool = False,
    participation: str = "frozen",
    cycle_bits: float | None = None,
) -> dict[str, np.ndarray]:
    """Adaptation value, goal value and efficiency for m = 0..m_max.

    The adaptation value weights the m-step state distribution from
    the all-idle start by the state values; the goal value divides its
    progress over the start value by the goal-keeping term (2 minus
    the goal state's own m-step value when progressing, that value
    itself when regressing, with -1 when the divisor vanishes);
    efficiency averages the goal value over steps 1..m against the
    per-cycle information cost.
    """
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    if cycle_bits is None:
        cycle_bits = c_syn_td(strategy).cycle
    chain = worker_level_chain(
        strategy, error_inject=error_inject, participation=participation
    )
    values = np.array([STATE_VALUES[sum(cfg)] for cfg in _CONFIGS])
    start = np.zeros(len(_CONFIGS))
    start[_CONFIG_INDEX[(0,) * N_WORKERS]] = 1.0
    from_goal = np.zeros(len(_CONFIGS))
    from_goal[_CONFIG_INDEX[(1,) * N_WORKERS]] = 1.0
    start_value = float(start @ values)

    latency = CONTROL_LATENCY[strategy]
    v_adp = np.zeros(m_max + 1)
    v_gl = np.zeros(m_max + 1)
    e_gl = np.zeros(m_max + 1)
    dist, goal_dist = start.copy(), from_goal.copy()
    steps_taken = 0
    running = 0.0
    for m in range(m_max + 1):
        effective = max(0, m - latency)
        while steps_taken < effective:
            dist = dist @ chain
            goal_dist = goal_dist @ chain
            steps_taken += 1
        adapt = float(dist @ values)
        keep_base = float(goal_dist @ values)
        keep = 2.0 - keep_base if adapt >= start_value else keep_base
        v_adp[m] = adapt
        v_gl[m] = -1.0 if keep == 0 else (adapt - start_value) / keep
        if m > 0:
            running += v_gl[m]
            e_gl[m] = running / (m * cycle_bits)
    return {"v_adp": v_adp, "v_gl": v_gl, "e_gl": e_gl}


def pragmatic_goal_value_td(
    strategy: str,
    m: int,
    *,
    error_inject: bool = False,
    participation: str = "frozen",
) -> tuple[float, float, float]:
    """(adaptation value, goal value, efficiency) after m steps."""
    curve = goal_value_curve(
        strategy, m, error_inject=error_inject, participation=participation
    )
    return float(curve["v_adp"][m]), float(curve["v_gl"][m]), float(curve["e_gl"][m])


def error_injection_experiment(
    strategy: str, m: int, participation: str = "frozen"
) -> float:
    """Goal value after m steps with worker 0 always reporting done."""
    return pragmatic_goal_value_td(
        strategy, m, error_inject=True, participation=participation
    )[1]


@dataclass(frozen=True)
class CycleInformation:
    """Entropy accounting of one feedback cycle for one strategy."""

    per_variable: Mapping[str, float]
    per_scale: Mapping[str, float]
    cycle: float


def _class_distribution() -> DiscreteDistribution:
    return DiscreteDistribution.from_counts(
        {z: comb(N_WORKERS, z) for z in range(N_WORKERS + 1)}
    )


def c_syn_td(strategy: str) -> CycleInformation:
    """Per-register, per-scale and per-cycle information in bits.

    Outcome probabilities come from the sixteen equally likely worker
    configurations. The broadcast cycle charges both the upward
    summaries and the downward error registers; the mediated cycle
    cost is the adopted constant; strategies without any relay carry
    only the worker registers.
    """
    _require_strategy(strategy)
    h_worker = 1.0
    h_mid_abs = shannon_entropy(DiscreteDistribution.from_counts({0: 1, 1: 2, 2: 1}))
    h_top_abs = shannon_entropy(_class_distribution())
    per_scale = {
        "workers": N_WORKERS * h_worker,
        "mids": 2 * h_mid_abs,
        "top": h_top_abs,
    }
    if strategy == "broadcast":
        # Split magnitudes over the 16 configurations: shortfall 3 or 4
        # gives 2 per mid, 1 or 2 gives 1, zero shortfall gives 0.
        h_split = shannon_entropy(
            DiscreteDistribution.from_counts({-2: 5, -1: 10, 0: 1})
        )
        per_variable = {
            "worker_state": h_worker,
            "mid_abstraction": h_mid_abs,
            "top_abstraction": h_top_abs,
            "worker_error": h_split,
            "mid_error": h_split,
            "top_error": h_top_abs,
        }
        cycle = (
            per_scale["workers"]
            + per_scale["mids"]
            + per_scale["top"]
            + N_WORKERS * h_split
            + 2 * h_split
            + h_top_abs
        )
        return CycleInformation(per_variable, per_scale, cycle)
    if strategy == "mediated":
        per_variable = {
            "worker_state": h_worker,
            "mid_abstraction": h_mid_abs,
            "top_abstraction": h_top_abs,
        }
        return CycleInformation(per_variable, per_scale, MEDIATED_CYCLE_BITS)
    return CycleInformation(
        {"worker_state": h_worker},
        {"workers": N_WORKERS * h_worker},
        N_WORKERS * h_worker,
    )


def inter_scale_entropy_delta(h_from: float, h_to: float) -> float:
    """Information change across one abstraction hop."""
    return h_to - h_from


def abstraction_entropies(strategy: str) -> tuple[float, ...]:
    """Scale entropies bottom-up as seen by the abstraction path."""
    info = c_syn_td(strategy)
    if strategy in ("broadcast", "mediated"):
        return (
            info.per_scale["workers"],
            info.per_scale["mids"],
            info.per_scale["top"],
        )
    return (info.per_scale["workers"],)


def scenario_table_rows(strategy: str) -> tuple[list[str], list[list]]:
    """Header and rows of the demonstration table, one row per measure."""
    table = scenario_replay(strategy).table()
    columns = len(table["workers_on_goal"])
    header = ["measure"] + [f"t{t}" for t in range(columns)]
    rows = [[name] + values for name, values in table.items()]
    return header, rows


def goal_value_rows(
    strategies: Iterable[str] = STRATEGIES,
    m_max: int = 50,
    *,
    error_inject: bool = False,
) -> tuple[list[str], list[list]]:
    """Header and rows of the goal-value curves, one row per (strategy, m)."""
    header = ["strategy", "m", "v_adp", "v_gl", "e_gl"]
    rows = []
    for strategy in strategies:
        curve = goal_value_curve(strategy, m_max, error_inject=error_inject)
        for m in range(m_max + 1):
            rows.append(
                [
                    strategy,
                    m,
                    float(curve["v_adp"][m]),
                    float(curve["v_gl"][m]),
                    float(curve["e_gl"][m]),
                ]
            )
    return header, rows


def _run_task_distribution(
    cfg: ExperimentConfig, stream: int, rng: np.random.Generator, full_trace: bool
) -> RunTrace:
    steps = int(cfg.horizon)
    error_inject = bool(cfg.parameter("error_inject", False))
    participation = "acting" if cfg.parameter("injection_acting", False) else "frozen"
    h = initial_hierarchy(cfg.strategy)
    snapshots, events = [h], []
    for _ in range(steps):
        h, ev = step_with_events(
            h,
            cfg.strategy,
            rng,
            error_inject=error_inject,
            participation=participation,
        )
        snapshots.append(h)
        events.append(ev)
    replay = ScenarioReplay(cfg.strategy, snapshots, events)
    truth = semantic_truth_td(replay)
    scope, adaptation = pragmatic_deltas_td(replay)
    forward = [
        semantic_delta_td(a, b) for a, b in zip(snapshots, snapshots[1:])
    ] + [None]
    times = list(range(steps + 1))

    def series(kind: str, values: list) -> MeasureSeries:
        return MeasureSeries(kind, times, values)

    measures = {
        "sv_goal": series(
            "sv_goal", [STATE_VALUES[s.workers_on_goal] for s in snapshots]
        ),
        "delta_semantic": series("delta_semantic", forward),
        "delta_truth": series("delta_truth", truth["delta_truth"]),
        "sv_truth": series("sv_truth", truth["sv_truth"]),
        "v_semantic_truth": series("v_semantic_truth", truth["v_semantic_truth"]),
        "e_semantic_truth": series("e_semantic_truth", truth["e_semantic_truth"]),
        "delta_pragmatic_scope": series("delta_pragmatic_scope", scope),
        "delta_pragmatic_adaptation": series(
            "delta_pragmatic_adaptation", adaptation
        ),
    }
    boundaries = list(range(2, steps + 1, 2))
    snaps = [s.worker_states for s in snapshots] if full_trace else None
    return RunTrace(
        cfg.case_study, cfg.strategy, cfg.seed, stream, measures, boundaries, snaps
    )


register_case_study("task_distribution", _run_task_distribution, STRATEGIES)
