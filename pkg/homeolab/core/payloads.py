"""
Wire models for homeolab payloads.

These pydantic models only check the *shape* of incoming JSON; the
mathematical invariants are enforced by the domain constructors.
"""

from typing import List, Literal, Tuple

from pydantic import BaseModel, ConfigDict, Field, StringConstraints
from typing_extensions import Annotated

RatText = Annotated[str, StringConstraints(strip_whitespace=True, pattern=r"^-?\d+(/\d+)?$")]


class MapPayload(BaseModel):
    """Interval map or circle lift: {"kind", "breakpoints": [["p/q", "p/q"], ...]}."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["interval", "lift"]
    breakpoints: List[Tuple[RatText, RatText]] = Field(..., min_length=1)


class UnitaryPayload(BaseModel):
    """Generalized permutation unitary: {"dim", "perm", "phases"}."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["unitary"] = "unitary"
    dim: int = Field(..., ge=1)
    perm: List[int]
    phases: List[RatText]
