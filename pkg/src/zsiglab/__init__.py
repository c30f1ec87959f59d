"""Exact-arithmetic laboratory for primitive prime divisors and dynamical Zsigmondy sets."""

from .arith import Factorization, FactorBudget, factor, is_probable_prime, ord_p
from .geometry import (
    HomogeneousForm,
    Morphism,
    OrbitCache,
    ProjectivePoint,
    apply_morphism,
    evaluate_form,
    normal_crossings_linear_check,
    normalize,
    orbit_point,
    reduced_pullback_degree,
)
from .heights import canonical_height_estimate, local_height, truncated_counting, weil_height
from .primdiv import (
    TermRecord,
    ZsigmondyReport,
    b_statistic,
    has_primitive_divisor,
    primitive_part,
    reduction_intersects,
    zsigmondy_set,
)
from .sequences import EDS, DynValue, GcdGroup, Lucas, PowerDiff, SequenceSpec, TermStream, WanderingNumerator, term
from .vojta import (
    ExperimentConfig,
    ThresholdVerdict,
    check_deltaj,
    check_theorem01,
    min_iterate_j,
    run_experiment,
)

__version__ = "0.1.0"
