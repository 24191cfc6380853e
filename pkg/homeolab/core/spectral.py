"""
Exact spectral data of generalized permutation unitaries.

An operator sends basis vector j to e^{2πi·phase_j} times basis vector π(j);
phases are rational angles in [0, 1). Every cycle of π contributes the
roots of its phase product, so spectra stay closed-form and exact.
"""

import json
import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from homeolab.core.errors import (
    DimensionMismatch,
    HomeolabError,
    InvariantViolation,
    MapFormatError,
    PreconditionError,
)
from homeolab.core.payloads import UnitaryPayload
from homeolab.core.pl_core import ZERO, RatLike, format_rat, parse_rat, to_rat

logger = logging.getLogger(__name__)


def angle(value: RatLike) -> Fraction:
    """Reduce a rational angle into [0, 1)."""
    value = to_rat(value)
    return value - math.floor(value)


@dataclass(frozen=True)
class GenPermUnitary:
    perm: Tuple[int, ...]
    phases: Tuple[Fraction, ...]

    def __post_init__(self):
        perm = tuple(self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise InvariantViolation("permutation", f"{list(perm)} is not a bijection of 0..{len(perm) - 1}")
        if len(self.phases) != len(perm):
            raise InvariantViolation("phases", f"expected {len(perm)} phases, got {len(self.phases)}")
        if not perm:
            raise InvariantViolation("dimension", "dimension must be at least 1")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "phases", tuple(angle(p) for p in self.phases))

    @property
    def dim(self) -> int:
        return len(self.perm)

    def apply(self, j: int) -> Tuple[int, Fraction]:
        """Image of e_j as (index, phase angle)."""
        return self.perm[j], self.phases[j]

    def cycles(self) -> List[Tuple[int, ...]]:
        """Cycles of π, each starting at its smallest index."""
        seen = set()
        result = []
        for start in range(self.dim):
            if start in seen:
                continue
            cycle = [start]
            j = self.perm[start]
            while j != start:
                cycle.append(j)
                j = self.perm[j]
            seen.update(cycle)
            result.append(tuple(cycle))
        return result


def identity_unitary(dim: int) -> GenPermUnitary:
    return GenPermUnitary(tuple(range(dim)), (ZERO,) * dim)


def diagonal_unitary(phases: Sequence[RatLike]) -> GenPermUnitary:
    return GenPermUnitary(tuple(range(len(phases))), tuple(to_rat(p) for p in phases))


def cyclic_shift(dim: int) -> GenPermUnitary:
    """e_j ↦ e_{j+1 mod dim}."""
    return GenPermUnitary(tuple((j + 1) % dim for j in range(dim)), (ZERO,) * dim)


def compose_unitaries(U: GenPermUnitary, V: GenPermUnitary) -> GenPermUnitary:
    """Return UV (V acts first)."""
    if U.dim != V.dim:
        raise DimensionMismatch(f"dimensions {U.dim} and {V.dim} differ")
    perm = tuple(U.perm[V.perm[j]] for j in range(V.dim))
    phases = tuple(V.phases[j] + U.phases[V.perm[j]] for j in range(V.dim))
    return GenPermUnitary(perm, phases)


def inverse_unitary(U: GenPermUnitary) -> GenPermUnitary:
    perm = [0] * U.dim
    phases = [ZERO] * U.dim
    for j, (target, phase) in enumerate(zip(U.perm, U.phases)):
        perm[target] = j
        phases[target] = -phase
    return GenPermUnitary(tuple(perm), tuple(phases))


def conjugate_unitary(U: GenPermUnitary, V: GenPermUnitary) -> GenPermUnitary:
    """Return V U V⁻¹."""
    return compose_unitaries(V, compose_unitaries(U, inverse_unitary(V)))


def rotate(U: GenPermUnitary, theta: RatLike) -> GenPermUnitary:
    """Multiply U by the scalar e^{2πiθ}."""
    theta = to_rat(theta)
    return GenPermUnitary(U.perm, tuple(p + theta for p in U.phases))


def multishift_truncated(k: int, M: int) -> GenPermUnitary:
    """k disjoint cyclic shifts of length M: e_{i,j} ↦ e_{i,j+1 mod M}."""
    if k < 1 or M < 1:
        raise PreconditionError(f"k and M must be positive, got k={k}, M={M}")
    perm = tuple(i * M + (j + 1) % M for i in range(k) for j in range(M))
    return GenPermUnitary(perm, (ZERO,) * (k * M))


# Spectral data

@dataclass(frozen=True)
class SpectralData:
    """Atoms (angle, multiplicity) sorted by angle."""

    atoms: Tuple[Tuple[Fraction, int], ...]

    @classmethod
    def from_counter(cls, counts: Dict[Fraction, int]) -> "SpectralData":
        return cls(tuple(sorted(counts.items())))

    @property
    def total(self) -> int:
        return sum(m for _, m in self.atoms)

    def multiplicity(self, theta: RatLike) -> int:
        return dict(self.atoms).get(angle(theta), 0)

    def to_json(self) -> List[dict]:
        return [{"angle": format_rat(a), "multiplicity": m} for a, m in self.atoms]


def _cycle_phase(U: GenPermUnitary, cycle: Sequence[int]) -> Fraction:
    return angle(sum((U.phases[j] for j in cycle), ZERO))


def spectral_data(U: GenPermUnitary) -> SpectralData:
    """
    Eigenvalue angles with multiplicity.

    A cycle of length L with phase sum s contributes (s + j)/L mod 1 for
    j = 0..L-1.
    """
    counts: Counter = Counter()
    for cycle in U.cycles():
        s, L = _cycle_phase(U, cycle), len(cycle)
        for j in range(L):
            counts[angle((s + j) / L)] += 1
    return SpectralData.from_counter(counts)


def shift_spectrum(data: SpectralData, theta: RatLike) -> SpectralData:
    """Push every atom forward by θ mod 1."""
    counts: Counter = Counter()
    for a, m in data.atoms:
        counts[angle(a + to_rat(theta))] += m
    return SpectralData.from_counter(counts)


def is_uniform_support(data: SpectralData) -> bool:
    """Atoms equally spaced around the circle with one common multiplicity."""
    M = len(data.atoms)
    if M == 0 or len({m for _, m in data.atoms}) != 1:
        return False
    start = data.atoms[0][0]
    return all(a == start + Fraction(j, M) for j, (a, _) in enumerate(data.atoms))


def conjugate_decision_unitary(U1: GenPermUnitary, U2: GenPermUnitary) -> bool:
    if U1.dim != U2.dim:
        raise DimensionMismatch(f"dimensions {U1.dim} and {U2.dim} differ")
    return spectral_data(U1) == spectral_data(U2)


# Bochner coefficients

def _cycle_of(U: GenPermUnitary, i: int) -> Tuple[int, ...]:
    for cycle in U.cycles():
        if i in cycle:
            return cycle
    raise HomeolabError(f"index {i} lies on no cycle")


def bochner_direct(U: GenPermUnitary, i: int, n: int) -> Optional[Fraction]:
    """⟨Uⁿe_i, e_i⟩ by iterating U; None stands for the value 0."""
    V = U if n >= 0 else inverse_unitary(U)
    j, acc = i, ZERO
    for _ in range(abs(n)):
        j, phase = V.apply(j)
        acc += phase
    return angle(acc) if j == i else None


def bochner_atomic(U: GenPermUnitary, i: int, n: int) -> Optional[Fraction]:
    """
    ∫ zⁿ dμ_{e_i} over the atoms of e_i's cycle, each of weight 1/L.

    The sum is e^{2πi·ns/L} times the geometric sum of ωⁿʲ, ω = e^{2πi/L},
    which is L when L divides n and 0 otherwise.
    """
    cycle = _cycle_of(U, i)
    s, L = _cycle_phase(U, cycle), len(cycle)
    if n % L:
        return None
    return angle(n * s / L)


def bochner_coeff(U: GenPermUnitary, i: int, n: int) -> Optional[Fraction]:
    """
    Exact Bochner coefficient of e_i, cross-checked against its spectral measure.

    Returns:
        Optional[Fraction]: Angle of the unimodular value, or None for 0

    Raises:
        PreconditionError: i outside 0..N-1
    """
    if not 0 <= i < U.dim:
        raise PreconditionError(f"basis index {i} outside 0..{U.dim - 1}")
    direct, atomic = bochner_direct(U, i, n), bochner_atomic(U, i, n)
    if direct != atomic:
        raise HomeolabError(f"Bochner paths disagree at i={i}, n={n}: {direct} vs {atomic}")
    return direct


# Wire format

def parse_unitary(text: str) -> GenPermUnitary:
    """
    Parse {"dim", "perm", "phases"}.

    Raises:
        MapFormatError: Malformed JSON or shape
        InvariantViolation: Not a permutation, or lengths disagree with dim
    """
    try:
        payload = UnitaryPayload.model_validate_json(text)
    except ValidationError as e:
        raise MapFormatError(f"malformed operator payload: {e.errors()[0]['msg']}") from e
    return unitary_from_payload(payload)


def unitary_from_payload(payload: UnitaryPayload) -> GenPermUnitary:
    if len(payload.perm) != payload.dim:
        raise InvariantViolation("dimension", f"dim={payload.dim} but perm has {len(payload.perm)} entries")
    phases = tuple(parse_rat(p) for p in payload.phases)
    for j, phase in enumerate(phases):
        if not 0 <= phase < 1:
            raise InvariantViolation("angle-range", f"phase {j} = {phase} must lie in [0, 1)")
    return GenPermUnitary(tuple(payload.perm), phases)


def emit_unitary(U: GenPermUnitary) -> str:
    body = {"dim": U.dim, "perm": list(U.perm), "phases": [format_rat(p) for p in U.phases]}
    return json.dumps(body, separators=(",", ":"))
