"""Quantitative persistence of excitation for discrete-time LTI systems.

Hankel-matrix PE checks, the structured matrices built from the annihilating
polynomial and Markov parameters of an LTI system, explicit PE lower bounds
propagated from input to output/state, and numerical verifiers for all of them.
"""

from .bounds import (
    BoundReport,
    Verdict,
    bound_chain_verify,
    corollary1_verify,
    corollary2_verify,
    design_input_gain,
    directional_bound_input,
    directional_bound_output,
    robust_bound_verify,
    state_input_matrix,
    theorem1_verify,
    theorem3_verify,
    verify_io_representation,
)
from .fundamental import (
    CounterexampleReport,
    TrajectorySpaceBasis,
    counterexample_run,
    counterexample_system,
    image_equality_check,
    io_data_matrix,
    parametrize,
    rank_condition_check,
    trajectory_space_basis,
)
from .linalg import numerical_rank
from .lti import (
    LtiSystem,
    MarkovParameters,
    annihilating_polynomial,
    as_signal,
    controllability_matrix,
    delay_input,
    extend_to_state_output,
    is_controllable,
    is_output_reachable,
    markov_parameters,
    observability_matrix,
    relative_degree,
    simulate,
    toeplitz_io_matrix,
)
from .pe import PeCertificate, hankel, kpe_check, pe_gram, pe_order_check, psd_dominates, window_gram
from .structmat import (
    RankDeficiencyWarning,
    StructuredSet,
    build_Dbar,
    build_Gammabar,
    build_Gammabar_relaxed,
    build_M,
    build_M_kron_d,
    build_M_kron_Dbar,
    build_relaxed_M,
    build_T,
    build_Z,
    structured_set,
)

__version__ = "0.1.0"

__all__ = [
    "annihilating_polynomial",
    "as_signal",
    "bound_chain_verify",
    "BoundReport",
    "build_Dbar",
    "build_Gammabar",
    "build_Gammabar_relaxed",
    "build_M",
    "build_M_kron_d",
    "build_M_kron_Dbar",
    "build_relaxed_M",
    "build_T",
    "build_Z",
    "controllability_matrix",
    "corollary1_verify",
    "corollary2_verify",
    "counterexample_run",
    "counterexample_system",
    "CounterexampleReport",
    "delay_input",
    "design_input_gain",
    "directional_bound_input",
    "directional_bound_output",
    "extend_to_state_output",
    "hankel",
    "image_equality_check",
    "io_data_matrix",
    "is_controllable",
    "is_output_reachable",
    "kpe_check",
    "LtiSystem",
    "markov_parameters",
    "MarkovParameters",
    "numerical_rank",
    "observability_matrix",
    "parametrize",
    "pe_gram",
    "pe_order_check",
    "PeCertificate",
    "psd_dominates",
    "rank_condition_check",
    "RankDeficiencyWarning",
    "relative_degree",
    "robust_bound_verify",
    "simulate",
    "state_input_matrix",
    "structured_set",
    "StructuredSet",
    "theorem1_verify",
    "theorem3_verify",
    "toeplitz_io_matrix",
    "trajectory_space_basis",
    "TrajectorySpaceBasis",
    "Verdict",
    "verify_io_representation",
    "window_gram",
]
