"""msfslab: a simulation laboratory for multi-scale feedback systems.

Information flowing through a multi-scale system is measured on three
levels: syntactic (how much is transmitted or stored), semantic (how
well it reflects the state of the world) and pragmatic (how much it
helps the system reach its goal). This package implements that measure
layer once, generically, and then reproduces four desk-scale case
studies on top of it: a robotic collective sorting objects between
rooms, lattice-based collective decision making, task distribution
through a small management hierarchy, and delay-coupled biochemical
oscillator hierarchies.

The measure primitives live in :mod:`msfslab.measures`, the experiment
plumbing (configs, seeded streams, batch running) in
:mod:`msfslab.kernel`, and each case study in its own module. The
``msfslab`` console script exposes ``run``, ``verify`` and ``list``.
"""

from .measures import (
    DiscreteDistribution,
    MeasureSeries,
    StateValueSeries,
    bates_pdf,
    bin_probabilities,
    efficiency,
    js_divergence,
    kl_divergence,
    shannon_entropy,
    state_value_delta,
    trapezoid_integrate,
    unit_midpoint_grid,
)

# Importing the case-study modules registers their runners, which also
# happens in freshly spawned worker processes.
from . import decision  # noqa: F401  (registration side effect)
from . import oscillators  # noqa: F401  (registration side effect)
from . import robotic  # noqa: F401  (registration side effect)
from . import taskdist  # noqa: F401  (registration side effect)

__version__ = "0.1.0"

__all__ = [
    "DiscreteDistribution",
    "MeasureSeries",
    "StateValueSeries",
    "bates_pdf",
    "bin_probabilities",
    "efficiency",
    "js_divergence",
    "kl_divergence",
    "shannon_entropy",
    "state_value_delta",
    "trapezoid_integrate",
    "unit_midpoint_grid",
    "__version__",
]
