# services/holonomy/__init__.py
from .transport import (
    Transport,
    connection_matrices,
    parallel_transport,
    transport_path,
    transport_grid,
    group_element,
)
from .splitting import (
    SplitPath,
    SplitHomotopyReport,
    split_path,
    unsplit,
    concat_split,
    transported_curvature,
    split_homotopy_check,
)
from .monodromy import (
    MonodromyElement,
    CocycleReport,
    monodromy_partial,
    connecting_partial2,
    total_monodromy_path,
    cocycle_check,
)

__all__ = [
    'Transport',
    'connection_matrices',
    'parallel_transport',
    'transport_path',
    'transport_grid',
    'group_element',
    'SplitPath',
    'SplitHomotopyReport',
    'split_path',
    'unsplit',
    'concat_split',
    'transported_curvature',
    'split_homotopy_check',
    'MonodromyElement',
    'CocycleReport',
    'monodromy_partial',
    'connecting_partial2',
    'total_monodromy_path',
    'cocycle_check'
]
