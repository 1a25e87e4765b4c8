"""Probabilistic error cancellation with noisy cancellation gates.

Pauli channel algebra, noise-aware quasiprobability programs, analytic
bias bounds, signed Monte Carlo sampling, dense state measures, and a
deterministic experiment harness, all at desk scale.
"""

__version__ = "0.1.0"

from .bias import (
    BiasReport,
    bias_report,
    bound_direct,
    bound_separate,
    canceled_error_direct,
    canceled_error_separate,
    cptp_bound_direct,
    cptp_bound_separate,
    exact_bias,
    implementability_distance,
    mitigation_bias_bound,
    model_violation_bias,
)
from .channels import (
    LindbladModel,
    NotInvertibleError,
    PauliChannel,
    apply_dense,
    channel_from_coeffs,
    compose,
    compose_power,
    depolarizing_channel,
    eigenvalues,
    from_eigenvalues,
    identity_channel,
    identity_component,
    inverse,
    is_cptp,
    lindblad_channel,
    pauli_conjugation,
    random_pauli_lindblad,
    tensor,
    twirl_diagonal,
)
from .experiments import (
    ExperimentConfig,
    run_fig3,
    run_fig4,
    run_invertibility_study,
)
from .implementability import (
    FreeSet,
    LpResult,
    QuasiProgram,
    TargetOutsideSpanError,
    implementability_lp,
    p_pauli,
    pauli_channel_as_vector,
    pauli_conjugation_free_set,
    quasi_program,
    robustness,
    two_point_decomposition,
)
from .measures import (
    diamond_lower_bound,
    log_negativity,
    partial_transpose,
    purity,
    purity_ratio_bound,
    trace_norm,
)
from .noise_map import (
    InvertibilityResult,
    NoiseMap,
    SingularMapError,
    apply_noise,
    identity_noise_map,
    invert_noise_map,
    invertibility_criterion,
    modified_quasiprobability,
    noise_map_from_gate_noises,
    p_over_noisy_gates,
    simulate_estimation,
    theta_lambda,
)
from .pauli import (
    PauliString,
    commutation_sign,
    fast_symplectic_transform,
    pauli_from_label,
    pauli_product,
    sign_vector,
)
from .sampler import PecEstimate, run_pec, variance_prediction
