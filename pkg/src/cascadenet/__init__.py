"""Effective interactions and open-system dynamics of quantum cascade networks."""
from .amplitudes import (
    AmplitudeVector,
    CouplingMatrix,
    coupling_matrix,
    coupling_matrix_oracle,
    level_unitary,
    propagate,
    signal_amplitudes,
)
from .errors import (
    CascadeError,
    PhysicalityError,
    ResourceCapError,
    ThresholdError,
    ValidationError,
)
from .gksl import (
    GkslForm,
    ThetaMatrix,
    build_theta,
    gksl_decompose,
    lindblad_closed_form_evenodd,
)
from .network import BeamSplitter, NetworkSpec, RegularSpec, bs_unitary, expand_regular
from .regular import (
    DesignSchedule,
    TransferMatrix,
    XiProfile,
    design_pruned,
    threshold_scan,
    transfer_matrix,
    xi_k2_analytic,
    xi_profile,
    xi_profile_closed,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeVector",
    "BeamSplitter",
    "CascadeError",
    "CouplingMatrix",
    "DesignSchedule",
    "GkslForm",
    "NetworkSpec",
    "PhysicalityError",
    "RegularSpec",
    "ResourceCapError",
    "ThetaMatrix",
    "ThresholdError",
    "TransferMatrix",
    "ValidationError",
    "XiProfile",
    "bs_unitary",
    "build_theta",
    "coupling_matrix",
    "coupling_matrix_oracle",
    "design_pruned",
    "expand_regular",
    "gksl_decompose",
    "level_unitary",
    "lindblad_closed_form_evenodd",
    "propagate",
    "signal_amplitudes",
    "threshold_scan",
    "transfer_matrix",
    "xi_k2_analytic",
    "xi_profile",
    "xi_profile_closed",
]
