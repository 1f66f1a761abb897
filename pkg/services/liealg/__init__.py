# services/liealg/__init__.py
from .algebra import (
    LieAlgebra,
    LieRep,
    JacobiReport,
    RepresentationReport,
    from_brackets,
    from_constants,
    make_rep,
    bracket,
    batch_bracket,
    ad,
    batch_ad,
    check_jacobi,
    is_derivation,
    derivation_residual,
    center,
    check_representation,
)
from .cohomology import Cochain, alternating_differential, ce_differential, cohomology_dims, euler_characteristic
from .flows import derivation_flow, derivation_flow_path, bracket_preservation_residual

__all__ = [
    'LieAlgebra',
    'LieRep',
    'JacobiReport',
    'RepresentationReport',
    'from_brackets',
    'from_constants',
    'make_rep',
    'bracket',
    'batch_bracket',
    'ad',
    'batch_ad',
    'check_jacobi',
    'is_derivation',
    'derivation_residual',
    'center',
    'check_representation',
    'Cochain',
    'alternating_differential',
    'ce_differential',
    'cohomology_dims',
    'euler_characteristic',
    'derivation_flow',
    'derivation_flow_path',
    'bracket_preservation_residual'
]
