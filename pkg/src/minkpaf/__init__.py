"""Positional adapted frames and field evolution along non-null curves in Minkowski 3-space."""

from .algebra import (
    Causal,
    Signature,
    causal_character,
    cross_l,
    inner,
    normalize,
    validate_frame,
)
from .curves import CurveSpec, Family, check_unit_speed, evaluate, frenet, frenet_trace
from .errors import MinkError
from .evolution import CaseKind, EvolutionCase, evolve, fermi_walker_derivative, fw_transport, rhs
from .force import derive_magnetic_vector, force_matrix, verify_force_identity
from .paf import (
    FrameField,
    angular_momentum,
    paf_trace,
    position_components,
    type2_apparatus,
    type2_frame,
    type3_apparatus,
    type3_frame,
    verify_derivative_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "Causal", "Signature", "causal_character", "cross_l", "inner", "normalize", "validate_frame",
    "CurveSpec", "Family", "check_unit_speed", "evaluate", "frenet", "frenet_trace",
    "MinkError",
    "CaseKind", "EvolutionCase", "evolve", "fermi_walker_derivative", "fw_transport", "rhs",
    "derive_magnetic_vector", "force_matrix", "verify_force_identity",
    "FrameField", "angular_momentum", "paf_trace", "position_components", "type2_apparatus", "type2_frame",
    "type3_apparatus", "type3_frame", "verify_derivative_matrix",
]
