"""
Global settings configuration for homeolab.

This module centralizes all settings and environment configurations.
"""

import os
from fractions import Fraction

from dotenv import load_dotenv

# Load environment variables first
load_dotenv()

# Resource ceilings
PIECE_CEILING = int(os.getenv('HOMEOLAB_CEILING', 1_000_000))

# Circle analysis defaults
DEFAULT_Q_MAX = int(os.getenv('HOMEOLAB_Q_MAX', 12))
DEFAULT_N_ITER = int(os.getenv('HOMEOLAB_N_ITER', 1000))

# Input files
MAX_PAYLOAD_MB = float(os.getenv('HOMEOLAB_MAX_PAYLOAD_MB', 16))

# Sampling configuration
DEFAULT_BITS = int(os.getenv('HOMEOLAB_BITS', 32))
DEFAULT_SEED = int(os.getenv('HOMEOLAB_SEED', 7))
DEFAULT_WORKERS = int(os.getenv('HOMEOLAB_WORKERS', 1))
MIN_DYADIC_BITS = 8
MAX_DYADIC_BITS = 62  # numpy integer draws stay inside int64
TRIAL_CHUNK_SIZE = 250  # Trials per worker task

# Wilson score interval, z = 1.96 as an exact rational
WILSON_Z = Fraction(49, 25)

# Output configuration
REPORT_SCHEMA_VERSION = "1"
LOG_LEVEL = os.getenv('HOMEOLAB_LOG_LEVEL', 'WARNING').upper()


def piece_ceiling(override=None) -> int:
    """Resolve the effective piece-count ceiling."""
    return PIECE_CEILING if override is None else int(override)


# Initialize configuration
def init_config():
    """Validate and initialize configuration."""
    if PIECE_CEILING < 1:
        raise ValueError("HOMEOLAB_CEILING must be a positive integer")
    if not MIN_DYADIC_BITS <= DEFAULT_BITS <= MAX_DYADIC_BITS:
        raise ValueError(f"HOMEOLAB_BITS must lie in [{MIN_DYADIC_BITS}, {MAX_DYADIC_BITS}]")
    if DEFAULT_Q_MAX < 1 or DEFAULT_N_ITER < 1:
        raise ValueError("HOMEOLAB_Q_MAX and HOMEOLAB_N_ITER must be at least 1")
    if MAX_PAYLOAD_MB <= 0:
        raise ValueError("HOMEOLAB_MAX_PAYLOAD_MB must be positive")
    if DEFAULT_WORKERS < 1:
        raise ValueError("HOMEOLAB_WORKERS must be at least 1")

    return {
        'piece_ceiling': PIECE_CEILING,
        'q_max': DEFAULT_Q_MAX,
        'n_iter': DEFAULT_N_ITER,
        'bits': DEFAULT_BITS,
        'seed': DEFAULT_SEED,
        'workers': DEFAULT_WORKERS,
        'max_payload_mb': MAX_PAYLOAD_MB,
        'log_level': LOG_LEVEL,
        'schema_version': REPORT_SCHEMA_VERSION,
    }
