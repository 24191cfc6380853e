"""Shared fixtures for the homeolab test suite."""

import json
from pathlib import Path

import pytest
from hypothesis import settings

from homeolab.core.circle_dynamics import emit_lift, representative_circle, rigid_rotation
from homeolab.core.pl_core import emit_map, tent_map

settings.register_profile("homeolab", max_examples=40, deadline=None)
settings.load_profile("homeolab")


@pytest.fixture
def write_payload(tmp_path):
    """Write a payload (text or JSON-able object) and return its path."""

    def _write(name: str, payload) -> Path:
        path = tmp_path / name
        text = payload if isinstance(payload, str) else json.dumps(payload)
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture
def tent_file(write_payload):
    return write_payload("tent.json", emit_map(tent_map("2/3")))


@pytest.fixture
def rotation_file(write_payload):
    return write_payload("rotation.json", emit_lift(rigid_rotation("2/5")))


@pytest.fixture
def representative_file(write_payload):
    return write_payload("rep.json", emit_lift(representative_circle(0, 1, 2)))
