"""Gaussian two-mode entanglement under one-side channels.

Covariance-matrix tools, the squeezed-then-filtered closed forms, three
entanglement measures, the two-state channel probe and a truncated Fock-space
oracle for cross-checking all of them.
"""

from .channels import (
    FilterOp,
    GaussianChannel,
    QuadExpState,
    apply_filter_tmss,
    apply_oneside_channel,
    beamsplitter_channel,
    channel_output,
    cm_from_quadexp,
    detA_closed_form,
    filtered_coeffs,
    identity_channel,
    pre_process,
)
from .core import (
    CharacteristicEntanglement,
    GaussianState,
    SymplecticOp,
    apply_symplectic,
    beamsplitter,
    euler_compose,
    euler_decompose,
    partial_trace,
    rotation,
    squeeze_r,
    squeeze_u,
    symplectic_eigenvalues,
    symplectic_generator,
    tensor,
    thermal_state,
    tmss_state,
    vacuum,
)
from .entanglement import (
    EntanglementReport,
    char_ent_pure,
    entanglement_report,
    geof,
    geof_result,
    log_negativity,
    standard_form,
    theorem2_ratio,
)
from .errors import (
    ConvergenceError,
    DegenerateChannelError,
    DomainError,
    NotSymplecticError,
    NumericalConsistencyError,
    PurityError,
    TruncationError,
)
from .fock import (
    FockVector,
    TruncationReport,
    apply_generator_exp,
    check_normal_ordered_squeeze,
    check_tt0,
    cm_from_fock,
    filter_fock,
    tmss_fock,
)
from .protocol import (
    ProbeReport,
    SweepResult,
    fact1_equivalent_V,
    lemma2_invariance_check,
    optimize_preprocessing,
    probe_channel,
    sweep_entanglement,
)

__version__ = "0.1.0"
