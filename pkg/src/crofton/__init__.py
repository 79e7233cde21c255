"""Random planar tessellations, zero cells, and renewal-structure verification.

The library simulates iteration-stable (cell-splitting) and Poisson line
tessellations in convex windows, samples the zero cell exactly by adaptive
radius doubling, runs the renormalized stationary zero-cell recursion, and
verifies the closed-form regenerative laws of the containment indicators by
exact computation and seeded Monte Carlo.
"""

from .errors import ConfigError, InsufficientConditioningEvents, SimulationAbort
from .geometry import (
    EPS_AREA,
    EPS_GEOM,
    ConvexPolygon,
    Direction,
    HalfPlane,
    Line,
    box,
    centered_square,
    clip,
    contains,
    contains_origin_interior,
    contains_point,
    halfplane_intersection,
    regular_polygon,
    scale,
    split,
    translate,
    width,
)
from .measure import (
    Discrete,
    Isotropic,
    LineMeasure,
    Mixture,
    discrete_xy,
    isotropic,
    lambda_of,
    sample_hitting,
    sample_poisson_hitting,
)
from .montecarlo import (
    ConditionalPattern,
    EstimateReport,
    Experiment,
    ExperimentSpec,
    ergodic_average,
    two_sample_containment_test,
)
from .renewal import (
    PVector,
    QVector,
    RegenParams,
    TailTooHeavy,
    conditional_pattern_prob,
    joint_q_probability,
    marginal_thinning_ratio,
    mean_recurrence,
    p_by_inclusion_exclusion,
    p_by_renewal_recursion,
    q_vector,
    stationary_delay,
)
from .rng import GENERATOR_FAMILY, master_stream, substream
from .svg import render_svg
from .tessellation import (
    PoissonLines,
    StitState,
    Tessellation,
    nest,
    pht_run,
    pht_sample_lines,
    restrict,
    stit_run,
    stit_run_detailed,
    superpose,
    tessellation_from_lines,
    touches_boundary,
    zero_cell_of,
)
from .zero_cell import (
    IndicatorSequence,
    ZeroCellPath,
    indicators,
    indicators_pair,
    sample_gamma_path,
    sample_zero_cell,
    write_path_csv,
    write_path_jsonl,
)

__version__ = "0.1.0"
