"""Gaussian channels, entanglement degradation and Gaussian error-correction search."""

from .channels import (
    GaussianChannel,
    amplification,
    attenuation,
    canonical_form,
    classical_noise,
    compose,
    identity_channel,
    is_entanglement_breaking,
    measure_prepare,
    phase_conjugation,
    validate,
)
from .entanglement import (
    capacity_upper_bound,
    degradation_from_choi,
    entanglement_degradation,
    finite_r_degradation,
    log_negativity,
    nu_minus,
)
from .gecc import GECCode, degradation_of_code, effective_channel
from .nogo_search import search, sweep_report
from .symplectic import symplectic_eigenvalues, tmsv_covariance
from .teleport import choi_state, lemma1_residual, teleport_channel

__version__ = "0.1.0"
