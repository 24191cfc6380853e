"""
Path configurations for homeolab.

This module centralizes all path-related configurations.
"""

from pathlib import Path
import os

# Package root and repository root
PACKAGE_DIR = Path(__file__).parent.parent
BASE_DIR = PACKAGE_DIR.parent

# Shipped JSON schemas
SCHEMAS_PATH = PACKAGE_DIR / "schemas"

# Experiment outputs
RESULTS_PATH = Path(os.getenv('HOMEOLAB_RESULTS', BASE_DIR / "results"))
REPORTS_PATH = RESULTS_PATH / "reports"
TRIAL_LOGS_PATH = RESULTS_PATH / "trials"

