"""
Payload file loading and validation for homeolab.

This module handles:
- Reading payload files with size limits
- Dispatching on payload kind (interval map, lift, unitary)
- Full invariant reports for the ``validate`` command
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, ValidationError

from homeolab.config import MAX_PAYLOAD_MB
from homeolab.core.circle_dynamics import CircleLift, parse_lift
from homeolab.core.errors import HomeolabError, MapFormatError, PayloadReadError
from homeolab.core.payloads import MapPayload, UnitaryPayload
from homeolab.core.pl_core import PLMap, parse_map, parse_rat
from homeolab.core.spectral import GenPermUnitary, parse_unitary

Payload = Union[PLMap, CircleLift, GenPermUnitary]


class Diagnostic(BaseModel):
    violation: str
    detail: str
    index: Optional[int] = None


class ValidationReport(BaseModel):
    file: str
    kind: Optional[str]
    valid: bool
    diagnostics: List[Diagnostic]


def detect_kind(document: dict) -> Optional[str]:
    """Payload kind: the explicit ``kind`` field, or "unitary" for operator documents."""
    if "kind" in document:
        return document["kind"] if isinstance(document["kind"], str) else None
    if "perm" in document:
        return "unitary"
    return None


def graph_diagnostics(kind: str, payload: MapPayload) -> List[Diagnostic]:
    """Every broken breakpoint invariant of an interval map or lift payload."""
    diagnostics = []
    points: List[Tuple[Fraction, Fraction]] = []
    for i, (x, y) in enumerate(payload.breakpoints):
        try:
            points.append((parse_rat(x), parse_rat(y)))
        except MapFormatError as e:
            diagnostics.append(Diagnostic(violation="rational", detail=str(e), index=i))
    if diagnostics:
        return diagnostics
    if len(points) < 2:
        return [Diagnostic(violation="too-few-breakpoints", detail="at least two breakpoints are required")]
    if points[0][0] != 0 or points[-1][0] != 1:
        diagnostics.append(Diagnostic(violation="domain", detail=f"abscissae span [{points[0][0]}, {points[-1][0]}], not [0, 1]"))
    for i, ((x0, y0), (x1, y1)) in enumerate(zip(points, points[1:]), start=1):
        if x1 <= x0:
            diagnostics.append(Diagnostic(violation="monotonicity", detail=f"abscissa {x1} does not follow {x0}", index=i))
        elif y1 <= y0:
            diagnostics.append(Diagnostic(violation="monotonicity", detail=f"value {y1} at x={x1} does not increase", index=i))
    y_first, y_last = points[0][1], points[-1][1]
    if kind == "interval" and (y_first != 0 or y_last != 1):
        diagnostics.append(Diagnostic(violation="range", detail=f"values run from {y_first} to {y_last}, not 0 to 1"))
    if kind == "lift":
        if y_last != y_first + 1:
            diagnostics.append(Diagnostic(violation="lift-period", detail=f"F(1) = {y_last} but F(0) + 1 = {y_first + 1}"))
        if not 0 <= y_first < 1:
            diagnostics.append(Diagnostic(violation="lift-normalization", detail=f"F(0) = {y_first} outside [0, 1)"))
    return diagnostics


def unitary_diagnostics(payload: UnitaryPayload) -> List[Diagnostic]:
    diagnostics = []
    if len(payload.perm) != payload.dim:
        diagnostics.append(Diagnostic(violation="dimension", detail=f"dim={payload.dim} but perm has {len(payload.perm)} entries"))
    if len(payload.phases) != payload.dim:
        diagnostics.append(Diagnostic(violation="dimension", detail=f"dim={payload.dim} but {len(payload.phases)} phases"))
    if sorted(payload.perm) != list(range(len(payload.perm))):
        diagnostics.append(Diagnostic(violation="permutation", detail=f"{payload.perm} is not a bijection"))
    for i, text in enumerate(payload.phases):
        try:
            phase = parse_rat(text)
        except MapFormatError as e:
            diagnostics.append(Diagnostic(violation="rational", detail=str(e), index=i))
            continue
        if not 0 <= phase < 1:
            diagnostics.append(Diagnostic(violation="angle-range", detail=f"phase {phase} outside [0, 1)", index=i))
    return diagnostics


class PayloadLoader:
    """Reads payload files and turns them into domain objects or diagnostics."""

    def __init__(self, max_payload_mb: float = MAX_PAYLOAD_MB):
        self.max_payload_mb = max_payload_mb
        self.logger = logging.getLogger(__name__)

    def validate_file_size(self, file_path: Path) -> bool:
        """
        Check if file size is within the allowed limit.

        Args:
            file_path (Path): Path to the file to check

        Returns:
            bool: True if file size is valid, False otherwise
        """
        file_size_mb = file_path.stat().st_size / (1024 * 1024)
        return file_size_mb <= self.max_payload_mb

    def read_text(self, file_path: Path) -> str:
        """
        Read a payload file.

        Raises:
            PayloadReadError: Missing, unreadable, oversized or not UTF-8
        """
        file_path = Path(file_path)
        try:
            if not self.validate_file_size(file_path):
                raise PayloadReadError(f"{file_path} exceeds {self.max_payload_mb} MB")
            return file_path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            if isinstance(e, PayloadReadError):
                raise
            self.logger.error(f"Error reading payload {file_path}: {e}")
            raise PayloadReadError(f"cannot read {file_path}: {e}") from e

    def load_map(self, file_path: Path) -> PLMap:
        return parse_map(self.read_text(file_path))

    def load_lift(self, file_path: Path) -> CircleLift:
        return parse_lift(self.read_text(file_path))

    def load_unitary(self, file_path: Path) -> GenPermUnitary:
        return parse_unitary(self.read_text(file_path))

    def load(self, file_path: Path) -> Payload:
        """Load any payload, dispatching on its kind."""
        text = self.read_text(file_path)
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise MapFormatError(f"{file_path} is not JSON: {e}") from e
        kind = detect_kind(document) if isinstance(document, dict) else None
        if kind == "interval":
            return parse_map(text)
        if kind == "lift":
            return parse_lift(text)
        if kind == "unitary":
            return parse_unitary(text)
        raise MapFormatError(f"{file_path} has no recognizable payload kind")

    def validate(self, file_path: Path) -> ValidationReport:
        """
        Full invariant report for one payload file.

        I/O problems raise PayloadReadError; everything about the content is
        reported as diagnostics.
        """
        text = self.read_text(file_path)
        name = str(file_path)
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            return ValidationReport(file=name, kind=None, valid=False, diagnostics=[Diagnostic(violation="json", detail=str(e))])
        kind = detect_kind(document) if isinstance(document, dict) else None
        if kind not in ("interval", "lift", "unitary"):
            diag = Diagnostic(violation="schema", detail="expected kind 'interval' or 'lift', or an operator with perm")
            return ValidationReport(file=name, kind=None, valid=False, diagnostics=[diag])
        try:
            if kind == "unitary":
                diagnostics = unitary_diagnostics(UnitaryPayload.model_validate(document))
            else:
                diagnostics = graph_diagnostics(kind, MapPayload.model_validate(document))
        except ValidationError as e:
            diagnostics = [Diagnostic(violation="schema", detail=err["msg"]) for err in e.errors()]
        if not diagnostics:
            # Constructors re-check everything the diagnostics cover
            try:
                {"interval": parse_map, "lift": parse_lift, "unitary": parse_unitary}[kind](text)
            except HomeolabError as e:
                diagnostics.append(Diagnostic(violation=getattr(e, "violation", "invalid"), detail=str(e)))
        self.logger.info(f"Validated {name}: {len(diagnostics)} diagnostics")
        return ValidationReport(file=name, kind=kind, valid=not diagnostics, diagnostics=diagnostics)
