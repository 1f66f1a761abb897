# services/extension/__init__.py
from .couple import (
    Couple,
    AdmissibilityReport,
    make_couple,
    curv_D,
    ad_omega,
    covariant_differential,
    is_admissible,
    semidirect,
    central,
)
from .build import ExtendedAlgebra, build_extension, project, inject, lift, vertical_part, curvature_identity_residual
from .gauge import (
    GaugeTransform,
    EquivalenceDecision,
    apply_gauge,
    shift_isomorphism_residual,
    are_equivalent,
    EQUIVALENT,
    NOT_EQUIVALENT,
    UNDECIDED,
)

__all__ = [
    'Couple',
    'AdmissibilityReport',
    'make_couple',
    'curv_D',
    'ad_omega',
    'covariant_differential',
    'is_admissible',
    'semidirect',
    'central',
    'ExtendedAlgebra',
    'build_extension',
    'project',
    'inject',
    'lift',
    'vertical_part',
    'curvature_identity_residual',
    'GaugeTransform',
    'EquivalenceDecision',
    'apply_gauge',
    'shift_isomorphism_residual',
    'are_equivalent',
    'EQUIVALENT',
    'NOT_EQUIVALENT',
    'UNDECIDED'
]
