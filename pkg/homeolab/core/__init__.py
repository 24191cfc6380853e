"""
Core modules for homeolab.

This package contains:
- Exact piecewise-linear maps of [0, 1] and their sign words
- Interval and circle classification, conjugacy and constructions
- Generalized permutation unitaries and their spectra
- Seeded Monte Carlo experiments, payload loading and report storage
"""

from .circle_dynamics import CircleLift, classify_circle, conjugate_decision_circle, rotation_number
from .errors import (
    HomeolabError,
    InvariantViolation,
    MapFormatError,
    PayloadReadError,
    PieceCeilingExceeded,
    PreconditionError,
)
from .interval_dynamics import classify, conjugate_decision
from .loader import PayloadLoader
from .pl_core import PLMap
from .random_lab import ExperimentRunner, SamplerConfig
from .report_store import ReportStore
from .spectral import GenPermUnitary, spectral_data

__all__ = [
    'CircleLift',
    'ExperimentRunner',
    'GenPermUnitary',
    'HomeolabError',
    'InvariantViolation',
    'MapFormatError',
    'PayloadLoader',
    'PayloadReadError',
    'PieceCeilingExceeded',
    'PLMap',
    'PreconditionError',
    'ReportStore',
    'SamplerConfig',
    'classify',
    'classify_circle',
    'conjugate_decision',
    'conjugate_decision_circle',
    'rotation_number',
    'spectral_data',
]
