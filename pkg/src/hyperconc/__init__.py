"""Concentration of partially hyperentangled GHZ states, in simulation and
closed form.

N-photon states entangled in polarization and spatial mode are driven toward
the maximally entangled form by repeated parity-check rounds, either against
tailored single-photon ancillas or between two identical copies.  The package
provides dense-vector simulation of the rounds, the closed-form success
probabilities of the iteration, and a brute-force enumeration oracle that
cross-checks both.
"""

from .analytics import (
    BranchDistribution,
    BranchProbs,
    RoundTable,
    branch_rates,
    coefficient_at_round,
    grid_axis,
    grid_sweep,
    initial_distribution,
    markov_evolve,
    pool_expected_yield,
    round1_probabilities,
    round_success_unrolled,
    squared_renormalized,
    success_table,
    total_success,
)
from .measurement import (
    DIAGONAL_OUTCOMES,
    MIN_BRANCH_PROBABILITY,
    DiagonalOutcome,
    ParityOutcome,
    RandomSource,
    diagonal_branch,
    diagonal_components,
    measure_diagonal,
    parity_branch,
    parity_measure,
)
from .oracle import (
    McReport,
    OutcomeLeaf,
    OutcomeTree,
    enumerate_scheme,
    exact_iteration_tree,
    mc_estimate,
)
from .protocol import (
    BranchClass,
    CorrectionParity,
    IterationTrace,
    ParameterEstimate,
    PoolReport,
    PoolRound,
    RoundResult,
    branch_concentrates,
    classify_residual,
    corrections_from_outcomes,
    estimate_parameters,
    iterate_scheme_a,
    iterate_scheme_b_pool,
    run_scheme_a_round,
    run_scheme_b_round,
)
from .states import (
    BALANCED,
    PHOTON_CAP,
    Dof,
    DofAmplitudes,
    FullState,
    Gate,
    GhzForm,
    apply_single_photon_gate,
    fidelity,
    flip_copy,
    full_to_ghz,
    ghz_to_full,
    is_maximal,
    maximal_ghz,
    prepare_ancilla,
    prepare_partial_ghz,
    tensor,
)

__version__ = "0.1.0"

__all__ = [
    "BALANCED",
    "BranchClass",
    "BranchDistribution",
    "BranchProbs",
    "CorrectionParity",
    "DIAGONAL_OUTCOMES",
    "DiagonalOutcome",
    "Dof",
    "DofAmplitudes",
    "FullState",
    "Gate",
    "GhzForm",
    "IterationTrace",
    "MIN_BRANCH_PROBABILITY",
    "McReport",
    "OutcomeLeaf",
    "OutcomeTree",
    "PHOTON_CAP",
    "ParameterEstimate",
    "ParityOutcome",
    "PoolReport",
    "PoolRound",
    "RandomSource",
    "RoundResult",
    "RoundTable",
    "apply_single_photon_gate",
    "branch_rates",
    "branch_concentrates",
    "classify_residual",
    "coefficient_at_round",
    "corrections_from_outcomes",
    "diagonal_branch",
    "diagonal_components",
    "enumerate_scheme",
    "estimate_parameters",
    "exact_iteration_tree",
    "fidelity",
    "flip_copy",
    "full_to_ghz",
    "ghz_to_full",
    "grid_axis",
    "grid_sweep",
    "initial_distribution",
    "is_maximal",
    "iterate_scheme_a",
    "iterate_scheme_b_pool",
    "markov_evolve",
    "maximal_ghz",
    "mc_estimate",
    "measure_diagonal",
    "parity_branch",
    "parity_measure",
    "pool_expected_yield",
    "prepare_ancilla",
    "prepare_partial_ghz",
    "round1_probabilities",
    "round_success_unrolled",
    "run_scheme_a_round",
    "run_scheme_b_round",
    "squared_renormalized",
    "success_table",
    "tensor",
    "total_success",
]
