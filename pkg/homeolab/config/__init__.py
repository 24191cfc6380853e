"""
Configuration package for homeolab.

This package exposes all configuration settings and paths in a centralized way.
"""

from .paths import (
    BASE_DIR,
    PACKAGE_DIR,
    SCHEMAS_PATH,
    RESULTS_PATH,
    REPORTS_PATH,
    TRIAL_LOGS_PATH,
)

from .settings import (
    PIECE_CEILING,
    DEFAULT_Q_MAX,
    DEFAULT_N_ITER,
    DEFAULT_BITS,
    DEFAULT_SEED,
    DEFAULT_WORKERS,
    MAX_PAYLOAD_MB,
    MIN_DYADIC_BITS,
    MAX_DYADIC_BITS,
    TRIAL_CHUNK_SIZE,
    WILSON_Z,
    REPORT_SCHEMA_VERSION,
    LOG_LEVEL,
    piece_ceiling,
    init_config
)

__all__ = [
    # Paths
    'BASE_DIR',
    'PACKAGE_DIR',
    'SCHEMAS_PATH',
    'RESULTS_PATH',
    'REPORTS_PATH',
    'TRIAL_LOGS_PATH',
    # Settings
    'PIECE_CEILING',
    'DEFAULT_Q_MAX',
    'DEFAULT_N_ITER',
    'DEFAULT_BITS',
    'DEFAULT_SEED',
    'DEFAULT_WORKERS',
    'MAX_PAYLOAD_MB',
    'MIN_DYADIC_BITS',
    'MAX_DYADIC_BITS',
    'TRIAL_CHUNK_SIZE',
    'WILSON_Z',
    'REPORT_SCHEMA_VERSION',
    'LOG_LEVEL',
    'piece_ceiling',
    'init_config'
]
