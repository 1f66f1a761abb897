# cli/__init__.py
from .models import Manifest
from .manifest import JsonManifestLoader
from .commands import CommandResult, COMMANDS, EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT_ERROR, EXIT_NUMERICAL_FAILURE

__all__ = [
    'Manifest',
    'JsonManifestLoader',
    'CommandResult',
    'COMMANDS',
    'EXIT_OK',
    'EXIT_CHECK_FAILED',
    'EXIT_INPUT_ERROR',
    'EXIT_NUMERICAL_FAILURE'
]
