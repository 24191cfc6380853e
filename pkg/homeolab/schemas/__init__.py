"""
Shipped JSON schemas for homeolab.

Every JSON document the CLI prints validates against one of these files
(JSON Schema draft 2020-12).
"""

import json
from functools import lru_cache
from typing import Any, Dict, List

from jsonschema import Draft202012Validator

from homeolab.config import SCHEMAS_PATH

SCHEMA_NAMES = (
    "map_payload",
    "unitary_payload",
    "interval_class",
    "conjugacy_certificate",
    "circle_class",
    "circle_conjugacy",
    "rotation",
    "spectral",
    "bochner",
    "collapse",
    "experiment_report",
    "validation_report",
    "error",
)


@lru_cache(maxsize=None)
def load_schema(name: str) -> Dict[str, Any]:
    """Load a shipped schema by name (file stem)."""
    if name not in SCHEMA_NAMES:
        raise KeyError(f"unknown schema {name!r}")
    with open(SCHEMAS_PATH / f"{name}.json", encoding="utf-8") as f:
        return json.load(f)


def schema_errors(name: str, document: Any) -> List[str]:
    """All validation messages, empty when the document conforms."""
    validator = Draft202012Validator(load_schema(name))
    return [error.message for error in validator.iter_errors(document)]


def validate_document(name: str, document: Any) -> None:
    """
    Validate a document against a shipped schema.

    Raises:
        jsonschema.ValidationError: The document does not conform
    """
    Draft202012Validator(load_schema(name)).validate(document)


__all__ = ['SCHEMA_NAMES', 'load_schema', 'schema_errors', 'validate_document']
