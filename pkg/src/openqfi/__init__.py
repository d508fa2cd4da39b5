"""Quantum Fisher information and dissipative Cramer-Rao bounds for Lindblad dynamics."""

from .dynamics import (
    LindbladGenerator,
    RateProfile,
    VectorizedState,
    apply_generator,
    check_density_matrix,
    devectorize,
    evolve_direct,
    evolve_vectorized,
    propagate,
    pure_state,
    superoperator,
    trace_distance,
    vectorize,
)
from .errors import *  # noqa: F401,F403
from .fisher import (
    ParameterizedEvolution,
    QfiReport,
    chain_rule,
    kappa,
    qcrb,
    qfi_closed_pure,
    qfi_exact,
    qfi_report,
    qfi_tilde_cov,
    qfi_tilde_exact,
    qfi_tilde_fd,
    qfi_tilde_from_sld,
    sandwich_bounds,
    sld,
)
from .linalg import eigh, expm, expm_frechet, kron

__version__ = "0.1.0"
