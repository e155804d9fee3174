"""Finite-dimensional quantum-logic toolkit.

Builds the maximal sublattice of subspaces on which a state's probabilities
form a measure over 2-valued homomorphisms, enumerates those property states,
checks Kochen-Specker colorability and local-hidden-variable feasibility, and
runs dual dynamics: unitary evolution of the possibility structure plus a
meshing stochastic jump process.
"""
from .determinate import (
    BornProbabilities,
    DeterminateSublattice,
    ExtensionReport,
    ObservableSpec,
    ProjectedRay,
    PropertyState,
    born_check,
    build_determinate,
    complement_probe_rays,
    contains,
    extend_and_check,
    property_states,
    truth_value,
)
from .dynamics import (
    EvolutionSpec,
    MarginalSample,
    PossibilityTrajectory,
    PropertyTrajectory,
    default_timestep,
    evolve_possibility,
    jump_process,
    sample_marginals,
    trajectory_rows,
)
from .errors import (
    AlreadyMember,
    BudgetExceeded,
    DimMismatch,
    LabelDiscontinuity,
    MalformedContext,
    NonUnitary,
    NotClosed,
    NotDensityOperator,
    NotHermitian,
    NotInSublattice,
    NotNormalized,
    NotResolutionOfIdentity,
    QptError,
    RayFileError,
    TableShapeMismatch,
    UnknownFactor,
    ZeroVector,
)
from .lattice import (
    Subspace,
    SublatticeSet,
    closure,
    commutes,
    is_boolean,
    join,
    meet,
    orthocomplement,
)
from .linalg import (
    DEFAULT_TOL,
    ComplexVector,
    Operator,
    RegisterLayout,
    Tolerance,
    apply,
    basis_vector,
    canonical_phase,
    embed,
    orthonormalize,
    partial_trace,
    random_state,
    reduced_state,
    tensor,
)
from .nogo import (
    Assignment,
    ChshSetting,
    NoAssignment,
    RaySet,
    Satisfiable,
    Unsatisfiable,
    chsh_lhv_bound,
    chsh_value,
    correlation_table,
    correlator,
    find_assignment,
    local_map_search,
    measurement_rays,
    setting_ray_sets,
    singlet,
    spin_observable,
)
from .report import SCHEMA_VERSION, Check, Quantity, ScenarioReport
from .scenarios import (
    correspondence_scenario,
    decoherence_scenario,
    epr_scenario,
    teleportation_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "AlreadyMember",
    "Assignment",
    "BornProbabilities",
    "BudgetExceeded",
    "Check",
    "ChshSetting",
    "ComplexVector",
    "DEFAULT_TOL",
    "DeterminateSublattice",
    "DimMismatch",
    "EvolutionSpec",
    "ExtensionReport",
    "LabelDiscontinuity",
    "MalformedContext",
    "MarginalSample",
    "NoAssignment",
    "NonUnitary",
    "NotClosed",
    "NotDensityOperator",
    "NotHermitian",
    "NotInSublattice",
    "NotNormalized",
    "NotResolutionOfIdentity",
    "ObservableSpec",
    "Operator",
    "PossibilityTrajectory",
    "ProjectedRay",
    "PropertyState",
    "PropertyTrajectory",
    "QptError",
    "Quantity",
    "RaySet",
    "RayFileError",
    "RegisterLayout",
    "SCHEMA_VERSION",
    "Satisfiable",
    "ScenarioReport",
    "Subspace",
    "SublatticeSet",
    "TableShapeMismatch",
    "Tolerance",
    "UnknownFactor",
    "Unsatisfiable",
    "ZeroVector",
    "apply",
    "basis_vector",
    "born_check",
    "build_determinate",
    "canonical_phase",
    "chsh_lhv_bound",
    "chsh_value",
    "closure",
    "commutes",
    "complement_probe_rays",
    "contains",
    "correlation_table",
    "correlator",
    "correspondence_scenario",
    "decoherence_scenario",
    "default_timestep",
    "embed",
    "epr_scenario",
    "evolve_possibility",
    "extend_and_check",
    "find_assignment",
    "is_boolean",
    "join",
    "jump_process",
    "local_map_search",
    "measurement_rays",
    "meet",
    "orthocomplement",
    "orthonormalize",
    "partial_trace",
    "property_states",
    "random_state",
    "reduced_state",
    "sample_marginals",
    "setting_ray_sets",
    "singlet",
    "spin_observable",
    "teleportation_scenario",
    "tensor",
    "truth_value",
]
