"""Desk-scale laboratory for quantum-style SDP solving.

Exact dense-matrix simulations of the input-model oracles, block-encoding
algebra, Gibbs samplers, trace estimators and search frameworks, with every
composite routine charged against a registered query-cost formula.
"""

from .blockenc import (
    BlockEncoding,
    ControlledSimUnitary,
    StatePrepPair,
    TaylorSpec,
    controlled_simulation,
    dilate,
    extract_block,
    hamiltonian_simulation,
    linear_combination,
    make_purification,
    negative_power,
    positive_power,
    purified_density_encoding,
    smooth_function,
    state_prep_pair,
)
from .errors import (
    ContractViolation,
    DomainError,
    IllConditionedThreshold,
    SeedExhaustion,
)
from .gibbs import (
    GibbsRequest,
    SubnormalizedGibbsPart,
    gibbs_exact,
    gibbs_operator_model,
    gibbs_state_decomposition,
    gibbs_state_model,
    gibbs_state_model_seeded,
    project_uniform,
)
from .instance import SdpInstance, load_instance, random_instance, save_instance
from .ledger import FORMULAS, QueryLedger
from .linalg import (
    DensityOperator,
    HermitianOperator,
    Projector,
    gibbs_state,
    matrix_function,
    min_eigenvalue,
    threshold_projector,
    trace_distance,
)
from .oracles import (
    HamiltonianOracle,
    OperatorOracle,
    SparseOracle,
    StateDecomposition,
    hamiltonian_to_operator,
    hamiltonian_to_state,
    to_block_encoding_sparse,
    to_block_encoding_state,
)
from .search import two_phase_min_find_sim, two_phase_search_sim
from .solver import (
    FrameworkOutcome,
    SolveOutcome,
    SolverConfig,
    arora_kale_solve,
    primal_oracle_solve,
    sdp_solve,
    theta_oracle,
    verify_dual,
    verify_primal,
)
from .traceest import (
    TraceEstimator,
    build_trace_estimator,
    trace_estimator_sample,
    trace_mean_estimate,
)
from .vecstore import SparseVectorTree, solver_grid

__version__ = "0.1.0"

__all__ = [
    "BlockEncoding",
    "ContractViolation",
    "ControlledSimUnitary",
    "DensityOperator",
    "DomainError",
    "FORMULAS",
    "FrameworkOutcome",
    "GibbsRequest",
    "HamiltonianOracle",
    "HermitianOperator",
    "IllConditionedThreshold",
    "OperatorOracle",
    "Projector",
    "QueryLedger",
    "SdpInstance",
    "SeedExhaustion",
    "SolveOutcome",
    "SolverConfig",
    "SparseOracle",
    "SparseVectorTree",
    "StateDecomposition",
    "StatePrepPair",
    "SubnormalizedGibbsPart",
    "TaylorSpec",
    "TraceEstimator",
    "arora_kale_solve",
    "build_trace_estimator",
    "controlled_simulation",
    "dilate",
    "extract_block",
    "gibbs_exact",
    "gibbs_operator_model",
    "gibbs_state",
    "gibbs_state_decomposition",
    "gibbs_state_model",
    "gibbs_state_model_seeded",
    "hamiltonian_simulation",
    "hamiltonian_to_operator",
    "hamiltonian_to_state",
    "linear_combination",
    "load_instance",
    "make_purification",
    "matrix_function",
    "min_eigenvalue",
    "negative_power",
    "positive_power",
    "primal_oracle_solve",
    "project_uniform",
    "purified_density_encoding",
    "random_instance",
    "save_instance",
    "sdp_solve",
    "smooth_function",
    "solver_grid",
    "state_prep_pair",
    "theta_oracle",
    "threshold_projector",
    "to_block_encoding_sparse",
    "to_block_encoding_state",
    "trace_distance",
    "trace_estimator_sample",
    "trace_mean_estimate",
    "two_phase_min_find_sim",
    "two_phase_search_sim",
    "verify_dual",
    "verify_primal",
]
