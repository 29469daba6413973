"""dyadbloom: a desk-scale testbed for two-weight dyadic Haar analysis.

Step functions on the dyadic grid of [0,1), Haar transforms, A2 weights,
Bloom-type BMO functionals, paraproducts, the dyadic shift, commutators and
their exact six-term expansion, weighted operator norms, Carleson embedding
checks, and stopping-time/corona constructions -- with randomized seeded
verification suites over all of it.
"""

from .bmo import (
    BmoReport,
    bloom_b2,
    bloom_b2_dual,
    bloom_b2_l2form,
    bmo_report,
    bmo_rho,
    bmo_rho_l1,
    neccon_functional,
)
from .config import SUITE_NAMES, ExperimentConfig, derive_seed
from .errors import (
    ConfigError,
    DenseCapError,
    DyadBloomError,
    EnsembleTargetError,
    GridMismatchError,
    InadmissibleLevelError,
    NotPositiveDefiniteError,
    PackingSearchError,
)
from .grid import (
    DyadicGrid,
    DyadicInterval,
    HaarSpectrum,
    StepFunction,
    haar_analyze,
    haar_function,
    haar_matrix,
    haar_synthesize,
    indicator,
    pointwise_multiply,
    square_function,
)
from .normest import (
    CarlesonSequence,
    LinearOperatorMatrix,
    NormReport,
    adjoint_paraproduct_carleson_sequence,
    best_quadratic_constant,
    carleson_constant,
    carleson_embedding_check,
    commutator_matrix,
    compute_norm_report,
    necessity_test_function_bound,
    operator_matrix,
    paraproduct_adjoint_matrix,
    paraproduct_carleson_sequence,
    paraproduct_matrix,
    power_iteration_norm,
    ppott_best_constant,
    ppott_forms,
    shift_matrix,
    weighted_operator_norm,
)
from .operators import (
    ExpansionTerms,
    commutator_shift,
    expansion_terms,
    haar_shift,
    is_admissible,
    paraproduct,
    paraproduct_adjoint,
    project_admissible,
    remainder_closed_form,
)
from .stopping import (
    StoppingFamily,
    corona_generations,
    deviation_factory,
    maximal_stopping_intervals,
    minimal_corona_constant,
    minimal_packing_constant,
    packing_ratio,
    square_sum_factory,
    three_condition_factory,
    threshold_factory,
    unstopped_intervals,
)
from .suites import Assertion, Finding, SuiteResult, run_suite
from .weights import (
    EnsembleSpec,
    Weight,
    a2_characteristic,
    generate,
    interval_average,
    interval_mass,
    rho_weight,
    weighted_expectation,
)

__version__ = "0.1.0"
