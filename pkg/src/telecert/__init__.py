"""telecert: certification toolkit for teleportation-network processes.

Decides, from process-tomography data, whether a (possibly simulated)
network teleportation process exhibits Bell-nonlocal, nonbilocal,
steering, or hybrid quantum correlations, by computing classical-mimicry
fidelity thresholds via convex optimisation and comparing experimental
process fidelities against them.
"""

from .classical import (
    classical_conditional_probs,
    classical_process_matrix,
    lhs_model_process_matrix,
    lhv_equivalent_probs,
    marginal_distribution,
    optimal_transition_matrix,
    random_transition_matrix,
    uniform_transition_matrix,
    validate_transition_matrix,
)
from .errors import CertificationError, InvariantError, ValidationError
from .linalg import (
    HermitianSpectrum,
    hermitian_eigen,
    is_psd,
    process_fidelity,
    project_psd,
)
from .network import (
    CorrelationVerdict,
    ThresholdSet,
    average_state_fidelity,
    chain_fidelity,
    classify,
    compose,
    compose_n,
    compose_oracle,
    n_local_threshold,
    paper_thresholds,
    recomputed_thresholds,
    threshold_table,
)
from .optimizer import (
    MimicryProblem,
    ScanResult,
    SolverConfig,
    SolverResult,
    build_problem,
    fit_transition_matrix,
    lp_upper_bound,
    maximize_mimicry_fidelity,
    objective_coefficients,
    scan_thresholds,
)
from .simulator import (
    NetworkReport,
    bisect_noise_crossing,
    depolarizing_fidelity,
    network_fidelities,
    noise_sweep,
    noise_tolerance,
    teleport_channel,
    werner_state,
)
from .tomography import (
    ConditionalProbTable,
    ObservableTriple,
    apply_process,
    assemble_process_matrix,
    estimate_conditional_probs,
    ideal_process_matrix,
    process_matrix_from_table,
    reconstruct_output_state,
    rotated_observables,
    simulate_table,
    validate_process_matrix,
)

__version__ = "0.1.0"
