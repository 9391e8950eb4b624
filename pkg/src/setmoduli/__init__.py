"""Local calmness and semilocal Lipschitz upper-semicontinuity moduli of
parametric set-valued mappings: sampling estimators of the defining upper
limits, exact point-based calculators for structured classes, and
numerical checks of the topological premises under which the two scales
agree."""

__version__ = "0.1.0"

from ._backend import backend_name, have_compiled
from .errors import (
    DegenerateLevelSetError,
    DimensionMismatchError,
    EnumerationBudgetError,
    NoAdmissibleActiveSetError,
    PreconditionError,
    ScenarioValidationError,
    SetModuliError,
    SingularMatrixError,
    SolverFailureError,
    UnboundedPolyhedronError,
    UnsupportedDimensionError,
    UnsupportedSizeError,
)
from .geometry import (
    FinitePointSet,
    Interval,
    IntervalUnion,
    NormSpec,
    Polyhedron,
    SampledCloud,
    distance_to_set,
    enumerate_vertices,
    polyhedron_is_bounded,
    project_onto_polyhedron,
    sup_distance_over_set,
)
from .families import (
    MappingFamily,
    counterexample_family,
    custom_family,
    evaluate,
    example_lcp,
    example_lcp_nominal_parameter,
    example_lp_nominal_parameter,
    example_lp_optimal,
    example_sip,
    example_sublevel,
    lcp_family,
    lp_feasible_family,
    lp_optimal_family,
    qp_canonical_family,
    qp_kkt_family,
    sample_parameters,
    sip_family,
    solve_lcp_enumerate,
    sublevel_family,
)
from .estimation import (
    EqualityReport,
    ModulusEstimate,
    RadiusSchedule,
    default_nominal_probes,
    estimate_calmness,
    estimate_lipusc,
    sup_calmness_over_nominal,
    verify_equality,
)
from .exact import (
    KktCertificate,
    SublevelModulus,
    certificate_probe_directions,
    cone_membership,
    operator_partial_inverse_norm,
    qp_canonical_modulus,
    sublevel_modulus,
)
from .hypotheses import (
    HypothesisVerdict,
    check_local_boundedness,
    check_outer_semicontinuity,
    hypothesis_report,
)
from .scenario import (
    RunReport,
    Scenario,
    load_scenario,
    reproduce_paper,
    run_scenario,
)
