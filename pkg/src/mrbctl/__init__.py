"""Controllability tools for the n-dimensional rigid body on so(n)."""

from .beta_saturation import (
    beta,
    beta_chain,
    saturate,
    saturate_constrained,
    theorem1_seeds,
    verify_multiplication_table,
)
from .bracket_calculus import (
    PolyVectorField,
    bracket_generating_rank,
    drift_field,
    lie_bracket,
    verify_extension_relations,
)
from .dynamics_steering import ControlledSystem, conservation_report, integrate, steer
from .errors import (
    DimensionError,
    DivergenceError,
    GenericityError,
    InvalidIndexError,
    MRBError,
    PreconditionError,
    ResourceError,
    ValidationError,
)
from .lie_so_n import SkewMatrix, basis, basis_element, commutator, conjugate, inner
from .rigid_body import (
    RigidBody,
    euler_drift,
    inertia_apply,
    inertia_inverse,
    is_principal_axis,
    make_body,
    steady_residual,
)

__all__ = [
    "ControlledSystem",
    "DimensionError",
    "DivergenceError",
    "GenericityError",
    "InvalidIndexError",
    "MRBError",
    "PolyVectorField",
    "PreconditionError",
    "ResourceError",
    "RigidBody",
    "SkewMatrix",
    "ValidationError",
    "basis",
    "basis_element",
    "beta",
    "beta_chain",
    "bracket_generating_rank",
    "commutator",
    "conjugate",
    "conservation_report",
    "drift_field",
    "euler_drift",
    "inertia_apply",
    "inertia_inverse",
    "inner",
    "integrate",
    "is_principal_axis",
    "lie_bracket",
    "make_body",
    "saturate",
    "saturate_constrained",
    "steady_residual",
    "steer",
    "theorem1_seeds",
    "verify_extension_relations",
    "verify_multiplication_table",
]
