# services/spectral/__init__.py
from .bigraded import (
    BigradedCochain,
    make_bigraded,
    decompose,
    recompose,
    delta01,
    delta10,
    delta21,
    bigraded_differential,
)
from .differentials import RelationsReport, verify_sum_decomposition, verify_relations
from .pages import (
    FilteredComplex,
    Page,
    SpectralSequence,
    AbutmentReport,
    DimensionCheck,
    page,
    abutment,
    spectral_sequence,
    kernel_cohomology_representation,
    e1_dimension_check,
    e2_dimension_check,
)

__all__ = [
    'BigradedCochain',
    'make_bigraded',
    'decompose',
    'recompose',
    'delta01',
    'delta10',
    'delta21',
    'bigraded_differential',
    'RelationsReport',
    'verify_sum_decomposition',
    'verify_relations',
    'FilteredComplex',
    'Page',
    'SpectralSequence',
    'AbutmentReport',
    'DimensionCheck',
    'page',
    'abutment',
    'spectral_sequence',
    'kernel_cohomology_representation',
    'e1_dimension_check',
    'e2_dimension_check'
]
