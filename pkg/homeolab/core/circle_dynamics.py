"""
Circle homeomorphisms through their PL lifts.

This module handles:
- Lifts F with F(x + 1) = F(x) + 1 and their algebra (composition, inverse, powers)
- Exact rational rotation numbers with certified enclosures as fallback
- Periodic structure, crossing flags and cyclic sign words
- Classification, conjugacy decisions and the explicit constructions:
  zigzag representatives, orbit collapse and the ψ solver
"""

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from homeolab.config import DEFAULT_N_ITER, DEFAULT_Q_MAX
from homeolab.core.errors import (
    HomeolabError,
    InvariantViolation,
    MapFormatError,
    NoPeriodicPoints,
    PieceCeilingExceeded,
    PreconditionError,
)
from homeolab.core.pl_core import (
    ONE,
    ZERO,
    Letter,
    PLGraph,
    Point,
    RatLike,
    breakpoints_from_payload,
    certify_gap_sign,
    check_ceiling,
    emit_breakpoints,
    format_rat,
    load_payload,
    to_rat,
    zero_components,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CircleLift(PLGraph):
    """
    PL lift over one period: breakpoints on [0, 1] with y_m = y_0 + 1.

    Parsed lifts are normalized (y_0 in [0, 1)); powers and compositions
    built internally keep their integer offset.
    """

    def _check_endpoints(self, points: Tuple[Point, ...]) -> None:
        if points[-1][1] != points[0][1] + 1:
            raise InvariantViolation("lift-period", "a lift must satisfy F(1) = F(0) + 1")

    @property
    def is_normalized(self) -> bool:
        return 0 <= self.ys[0] < 1

    def __call__(self, x: RatLike) -> Fraction:
        return lift_eval(self, to_rat(x))

    def __repr__(self) -> str:
        inner = ", ".join(f"({x}, {y})" for x, y in self.breakpoints)
        return f"CircleLift[{inner}]"


def lift_eval(F: CircleLift, x: Fraction) -> Fraction:
    """F on all of ℝ via F(x + n) = F(x) + n."""
    shift = math.floor(x)
    return F._value(x - shift) + shift


def lift_preimage(F: CircleLift, y: Fraction) -> Fraction:
    shift = math.floor(y - F.ys[0])
    return F._preimage(y - shift) + shift


def circle_map(F: CircleLift, x: Fraction) -> Fraction:
    """The induced circle map, as a point of [0, 1)."""
    y = lift_eval(F, x)
    return y - math.floor(y)


def rigid_rotation(alpha: RatLike) -> CircleLift:
    """Lift x + α, with α reduced into [0, 1)."""
    alpha = to_rat(alpha)
    alpha -= math.floor(alpha)
    return CircleLift(((ZERO, alpha), (ONE, alpha + 1)))


def identity_lift() -> CircleLift:
    return rigid_rotation(0)


def normalize_lift(F: CircleLift) -> CircleLift:
    """Shift by an integer so that F(0) lies in [0, 1)."""
    shift = math.floor(F.ys[0])
    if shift == 0:
        return F
    return CircleLift(tuple((x, y - shift) for x, y in F.breakpoints))


def lift_from_nodes(nodes: Sequence[Point]) -> CircleLift:
    """
    Periodic PL lift through the given nodes of ℝ, reduced modulo 1.

    Nodes must come from an increasing map commuting with x ↦ x + 1 and
    contain at most one representative per class mod 1.
    """
    reduced = sorted((x - math.floor(x), y - math.floor(x)) for x, y in nodes)
    if not reduced:
        return identity_lift()
    if reduced[0][0] == 0:
        start = reduced[0][1]
    else:
        (x0, y0), (x1, y1) = (reduced[-1][0] - 1, reduced[-1][1] - 1), reduced[0]
        start = y0 + (y1 - y0) * (0 - x0) / (x1 - x0)
    inner = [p for p in reduced if p[0] > 0]
    return CircleLift(((ZERO, start), *inner, (ONE, start + 1)))


def compose_lifts(F: CircleLift, G: CircleLift, ceiling: Optional[int] = None) -> CircleLift:
    """Return F∘G; breakpoints at G's and at G⁻¹ of every integer shift of F's."""
    lo, hi = G.ys[0], G.ys[-1]
    cuts = set(G.xs)
    base = math.floor(lo)
    for shift in (base, base + 1):
        for xf in F.xs:
            t = xf + shift
            if lo <= t <= hi:
                cuts.add(G._preimage(t))
    xs = sorted(cuts)
    check_ceiling(len(xs) - 1, ceiling)
    return CircleLift(tuple((x, lift_eval(F, G._value(x))) for x in xs))


def lift_inverse(F: CircleLift) -> CircleLift:
    ts = sorted({y - math.floor(y) for y in F.ys} | {ZERO})
    points = [(t, lift_preimage(F, t)) for t in ts]
    points.append((ONE, points[0][1] + 1))
    return CircleLift(tuple(points))


def lift_power(F: CircleLift, n: int, ceiling: Optional[int] = None) -> CircleLift:
    """n-th iterate of F as a lift (negative n iterates the inverse)."""
    base = F if n >= 0 else lift_inverse(F)
    result = identity_lift()
    for _ in range(abs(n)):
        result = compose_lifts(base, result, ceiling=ceiling)
    return result


def conjugate_lift(F: CircleLift, H: CircleLift, ceiling: Optional[int] = None) -> CircleLift:
    """Return H⁻¹∘F∘H, normalized."""
    inner = compose_lifts(F, H, ceiling=ceiling)
    return normalize_lift(compose_lifts(lift_inverse(H), inner, ceiling=ceiling))


# Rotation numbers

@dataclass(frozen=True)
class RationalRotation:
    p: int
    q: int

    def __post_init__(self):
        if not (self.q >= 1 and 0 <= self.p < self.q and math.gcd(self.p, self.q) == 1):
            raise InvariantViolation("rotation", f"{self.p}/{self.q} is not a reduced fraction in [0, 1)")

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    def to_json(self):
        return f"{self.p}/{self.q}"


@dataclass(frozen=True)
class RotationInterval:
    """Certified enclosure of τ(F) for the lift as given (not reduced mod 1)."""

    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, value: Fraction) -> bool:
        return self.lo <= value <= self.hi

    def intersects(self, other: "RotationInterval") -> bool:
        return max(self.lo, other.lo) <= min(self.hi, other.hi)

    def to_json(self):
        return {"lo": format_rat(self.lo), "hi": format_rat(self.hi)}


RotationNumber = Union[RationalRotation, RotationInterval]


class FixedPointKind(str, Enum):
    ATTRACTIVE = "attractive"
    REPULSIVE = "repulsive"
    NON_CROSSING = "non-crossing"

    @property
    def crossing(self) -> bool:
        return self is not FixedPointKind.NON_CROSSING


@dataclass(frozen=True)
class PeriodicStructure:
    """
    Periodic points of period q with shift p: solutions of F^q(x) = x + p in [0, 1).

    A degenerate structure has F^q = id + p on whole segments; its
    ``segments`` hold those circle arcs (hi may exceed 1 when an arc wraps)
    and the point data is left empty.
    """

    q: int
    shift: int
    points: Tuple[Fraction, ...]
    orbits: Tuple[Tuple[int, ...], ...]
    ell: Optional[int]
    flags: Tuple[FixedPointKind, ...]
    segments: Tuple[Tuple[Fraction, Fraction], ...] = ()

    @property
    def degenerate(self) -> bool:
        return bool(self.segments)

    @property
    def all_crossing(self) -> bool:
        return not self.degenerate and all(flag.crossing for flag in self.flags)

    @property
    def orbit_count(self) -> int:
        return len(self.orbits)


def _displacement_range(G: PLGraph) -> Tuple[Fraction, Fraction]:
    disp = [y - x for x, y in G.breakpoints]
    return min(disp), max(disp)


def _feasible_shift(G: PLGraph) -> Optional[int]:
    """The integer p with G(x) = x + p solvable, if any (at most one exists)."""
    lo, hi = _displacement_range(G)
    p = math.ceil(lo)
    return p if p <= hi else None


def _circle_components(G: PLGraph, shift: int) -> List[Tuple[Fraction, Fraction]]:
    """Zero arcs of G − id − shift on the circle, wrap-around arc merged."""
    comps = zero_components(G, Fraction(shift))
    if not comps or comps == [(ZERO, ONE)]:
        return comps
    if comps[0][0] == 0:
        lo_last, hi_first = comps[-1][0], comps[0][1]
        if lo_last == 1:
            comps = comps[:-1]
        else:
            comps = comps[1:-1] + [(lo_last, hi_first + 1)]
    return comps


def _arc_sign(G: PLGraph, shift: int, a: Fraction, b: Fraction) -> Letter:
    """Certified sign of G − id − shift on the open arc (a, b), b ≤ a + 1."""
    parts = []
    if a < 1:
        parts.append((a, min(b, ONE)))
    if b > 1:
        parts.append((max(a, ONE) - 1, b - 1))
    signs = {certify_gap_sign(G, u, v, Fraction(shift)) for u, v in parts if u < v}
    if len(signs) != 1:
        raise HomeolabError(f"arc ({a}, {b}) has no single sign")
    return signs.pop()


def _arc_signs(G: PLGraph, shift: int, comps: List[Tuple[Fraction, Fraction]]) -> List[Letter]:
    """Sign on the arc following each component, the last one wrapping."""
    signs = []
    for i, (_, hi) in enumerate(comps):
        nxt = comps[i + 1][0] if i + 1 < len(comps) else comps[0][0] + 1
        signs.append(_arc_sign(G, shift, hi, nxt))
    return signs


def _point_kind(left: Letter, right: Letter) -> FixedPointKind:
    if left is right:
        return FixedPointKind.NON_CROSSING
    return FixedPointKind.ATTRACTIVE if left is Letter.POS else FixedPointKind.REPULSIVE


def _structure_from_power(F: CircleLift, G: CircleLift, q: int, shift: int) -> PeriodicStructure:
    comps = _circle_components(G, shift)
    if any(lo != hi for lo, hi in comps):
        return PeriodicStructure(q, shift, (), (), None, (), tuple((lo, hi) for lo, hi in comps if lo != hi))
    points = tuple(lo for lo, _ in comps)
    K = len(points)
    index = {pt: i for i, pt in enumerate(points)}
    steps = set()
    for i, pt in enumerate(points):
        j = index.get(circle_map(F, pt))
        if j is None:
            raise HomeolabError(f"image of periodic point {pt} is not periodic")
        steps.add((j - i) % K)
    if len(steps) != 1:
        raise HomeolabError(f"periodic points are not shifted uniformly: {sorted(steps)}")
    ell = steps.pop()
    period = K // math.gcd(ell, K)
    if period != q:
        raise PreconditionError(f"periodic points have minimal period {period}, not {q}")
    seen, orbits = set(), []
    for start in range(K):
        if start in seen:
            continue
        orbit = tuple((start + m * ell) % K for m in range(q))
        seen.update(orbit)
        orbits.append(orbit)
    gaps = _arc_signs(G, shift, comps)
    flags = tuple(_point_kind(gaps[i - 1], gaps[i]) for i in range(K))
    return PeriodicStructure(q, shift, points, tuple(orbits), ell, flags)


def periodic_structure(F: CircleLift, q: int, ceiling: Optional[int] = None) -> PeriodicStructure:
    """
    Exact periodic structure at period q.

    Raises:
        NoPeriodicPoints: F^q(x) = x + p has no solution for any integer p
        PreconditionError: q is not the minimal period of the solutions
    """
    if q < 1:
        raise PreconditionError(f"q must be positive, got {q}")
    G = lift_power(F, q, ceiling=ceiling)
    shift = _feasible_shift(G)
    if shift is None:
        raise NoPeriodicPoints(f"no periodic points of period {q}")
    return _structure_from_power(F, G, q, shift)


def rotation_enclosure(F: CircleLift, n_iter: int) -> RotationInterval:
    """Intersect [(F^m(0) − 1)/m, (F^m(0) + 1)/m] over m = 1..n_iter."""
    lo, hi = None, None
    y = ZERO
    for m in range(1, n_iter + 1):
        y = lift_eval(F, y)
        a, b = (y - 1) / m, (y + 1) / m
        lo = a if lo is None else max(lo, a)
        hi = b if hi is None else min(hi, b)
    return RotationInterval(lo, hi)


def rotation_number(
    F: CircleLift,
    q_max: int = DEFAULT_Q_MAX,
    n_iter: int = DEFAULT_N_ITER,
    ceiling: Optional[int] = None,
) -> Tuple[RotationNumber, Optional[PeriodicStructure]]:
    """
    Rotation number of a lift, exact when some period q ≤ q_max exists.

    Args:
        F (CircleLift): Lift to analyze
        q_max (int): Largest period scanned exactly
        n_iter (int): Iterations used for the enclosure fallback
        ceiling (Optional[int]): Piece-count ceiling for F^q

    Returns:
        Tuple[RotationNumber, Optional[PeriodicStructure]]: RationalRotation
        with its structure, or a RotationInterval and None

    Raises:
        PieceCeilingExceeded: F^q outgrew the ceiling (reports the q reached)
    """
    if q_max < 1 or n_iter < 1:
        raise PreconditionError("q_max and n_iter must be positive")
    G = identity_lift()
    for q in range(1, q_max + 1):
        try:
            G = compose_lifts(F, G, ceiling=ceiling)
        except PieceCeilingExceeded as e:
            raise e.at_q(q) from e
        shift = _feasible_shift(G)
        if shift is not None:
            logger.debug(f"Periodic points found at q={q} with shift {shift}")
            return RationalRotation(shift % q, q), _structure_from_power(F, G, q, shift)
    logger.debug(f"No period up to q_max={q_max}, falling back to enclosure")
    return rotation_enclosure(F, n_iter), None


# Classification

class CircleHaarNullReason(str, Enum):
    INFINITE_PERIODIC = "infinite-periodic"
    NON_CROSSING = "non-crossing"


@dataclass(frozen=True)
class CircleNonHaarNull:
    rotation: RationalRotation
    orbit_pairs: int

    def to_json(self) -> dict:
        return {
            "rotation": self.rotation.to_json(),
            "orbit_count": 2 * self.orbit_pairs,
            "crossing": True,
            "verdict": "non-haar-null",
            "orbit_pairs": self.orbit_pairs,
        }


@dataclass(frozen=True)
class CircleHaarNull:
    rotation: RationalRotation
    reason: CircleHaarNullReason
    orbit_count: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "rotation": self.rotation.to_json(),
            "orbit_count": self.orbit_count,
            "crossing": False,
            "verdict": "haar-null",
            "reason": self.reason.value,
        }


@dataclass(frozen=True)
class CircleUndetermined:
    enclosure: RotationInterval

    def to_json(self) -> dict:
        return {
            "rotation": self.enclosure.to_json(),
            "orbit_count": None,
            "crossing": None,
            "verdict": "undetermined",
        }


CircleClass = Union[CircleNonHaarNull, CircleHaarNull, CircleUndetermined]


def classify_structure(rotation: RationalRotation, struct: PeriodicStructure) -> CircleClass:
    if struct.degenerate:
        return CircleHaarNull(rotation, CircleHaarNullReason.INFINITE_PERIODIC)
    if not struct.all_crossing:
        return CircleHaarNull(rotation, CircleHaarNullReason.NON_CROSSING, struct.orbit_count)
    K = len(struct.points)
    if K % (2 * struct.q):
        raise HomeolabError(f"{K} crossing periodic points cannot split into orbit pairs of period {struct.q}")
    return CircleNonHaarNull(rotation, K // (2 * struct.q))


def classify_circle(
    F: CircleLift,
    q_max: int = DEFAULT_Q_MAX,
    n_iter: int = DEFAULT_N_ITER,
    ceiling: Optional[int] = None,
) -> CircleClass:
    rotation, struct = rotation_number(F, q_max, n_iter, ceiling)
    if struct is None:
        return CircleUndetermined(rotation)
    return classify_structure(rotation, struct)


def count_periodic_orbits(F: CircleLift, q_max: int = DEFAULT_Q_MAX, ceiling: Optional[int] = None) -> Optional[int]:
    """Number of periodic orbits, None when undetected or infinite."""
    _, struct = rotation_number(F, q_max, 1, ceiling)
    if struct is None or struct.degenerate:
        return None
    return struct.orbit_count


# Signatures and conjugacy

class CyclicSignWord:
    """Letters read around the circle; equality is up to cyclic rotation."""

    def __init__(self, letters: Sequence[Letter]):
        self.letters = tuple(letters)

    def rotations(self) -> List[Tuple[Letter, ...]]:
        n = len(self.letters)
        doubled = self.letters + self.letters
        return [doubled[i:i + n] for i in range(max(n, 1))]

    def canonical(self) -> Tuple[str, ...]:
        return min(tuple(c.value for c in r) for r in self.rotations())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CyclicSignWord):
            return NotImplemented
        if len(self.letters) != len(other.letters):
            return False
        return other.letters in self.rotations()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def __len__(self) -> int:
        return len(self.letters)

    def __repr__(self) -> str:
        return f"CyclicSignWord({' '.join(c.value for c in self.letters)})"

    def to_json(self) -> List[str]:
        return [c.value for c in self.letters]


def signature(F: CircleLift) -> CyclicSignWord:
    """
    Cyclic word of fixed arcs and arc signs of F − id − p around the circle.

    Raises:
        NoPeriodicPoints: F has no fixed points on the circle
    """
    shift = _feasible_shift(F)
    if shift is None:
        raise NoPeriodicPoints("signature needs fixed points")
    comps = _circle_components(F, shift)
    if comps == [(ZERO, ONE)]:
        return CyclicSignWord([Letter.SEG])
    letters: List[Letter] = []
    for (lo, hi), sign in zip(comps, _arc_signs(F, shift, comps)):
        letters.append(Letter.PT if lo == hi else Letter.SEG)
        letters.append(sign)
    return CyclicSignWord(letters)


class CircleVerdict(str, Enum):
    CONJUGATE = "conjugate"
    NOT_CONJUGATE = "not-conjugate"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class CircleDecision:
    verdict: CircleVerdict
    rotation_f: RotationNumber
    rotation_g: RotationNumber
    word_f: Optional[CyclicSignWord] = None
    word_g: Optional[CyclicSignWord] = None
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "rotation_f": self.rotation_f.to_json(),
            "rotation_g": self.rotation_g.to_json(),
            "word_f": self.word_f.to_json() if self.word_f else None,
            "word_g": self.word_g.to_json() if self.word_g else None,
            "reason": self.reason,
        }


def _disjoint_mod_one(a: RotationInterval, b: RotationInterval) -> bool:
    """No integer m with [a.lo, a.hi] ∩ [b.lo + m, b.hi + m] nonempty."""
    return math.ceil(a.lo - b.hi) > math.floor(a.hi - b.lo)


def conjugate_decision_circle(
    F: CircleLift,
    G: CircleLift,
    q_max: int = DEFAULT_Q_MAX,
    n_iter: int = DEFAULT_N_ITER,
    ceiling: Optional[int] = None,
) -> CircleDecision:
    """
    Decide conjugacy through F^q and G^q once both rotation numbers equal p/q.

    A map whose scan found no period ≤ q_max has no rotation number p/q
    with q ≤ q_max, so it never matches a resolved one. Two unresolved
    maps differ when their enclosures are disjoint mod 1.
    """
    rot_f, _ = rotation_number(F, q_max, n_iter, ceiling)
    rot_g, _ = rotation_number(G, q_max, n_iter, ceiling)
    if isinstance(rot_f, RotationInterval) and isinstance(rot_g, RotationInterval):
        if _disjoint_mod_one(rot_f, rot_g):
            return CircleDecision(CircleVerdict.NOT_CONJUGATE, rot_f, rot_g, reason="rotation numbers differ")
        return CircleDecision(CircleVerdict.UNDETERMINED, rot_f, rot_g, reason="rotation number not resolved")
    if rot_f != rot_g:
        return CircleDecision(CircleVerdict.NOT_CONJUGATE, rot_f, rot_g, reason="rotation numbers differ")
    word_f = signature(lift_power(F, rot_f.q, ceiling))
    word_g = signature(lift_power(G, rot_g.q, ceiling))
    if word_f == word_g:
        return CircleDecision(CircleVerdict.CONJUGATE, rot_f, rot_g, word_f, word_g)
    return CircleDecision(CircleVerdict.NOT_CONJUGATE, rot_f, rot_g, word_f, word_g, "signatures differ")


# Constructions

def representative_circle(p: int, q: int, k: int) -> CircleLift:
    """
    Canonical lift with rotation p/q and 2k periodic orbits.

    With n = 2kq, F maps each [j/n, (j+1)/n] onto the interval 2kp steps
    further, through two linear pieces bulging above the translate for
    even j and below it for odd j.
    """
    if q < 1 or not 0 <= p < q or math.gcd(p, q) != 1:
        raise PreconditionError(f"{p}/{q} is not a reduced rotation in [0, 1)")
    if k < 1:
        raise PreconditionError(f"k must be at least 1, got {k}")
    n = 2 * k * q
    jump = 2 * k * p
    points: List[Point] = []
    for j in range(n):
        points.append((Fraction(j, n), Fraction(j + jump, n)))
        lift = Fraction(3, 4) if j % 2 == 0 else Fraction(1, 4)
        points.append((Fraction(2 * j + 1, 2 * n), (j + jump + lift) / n))
    points.append((ONE, Fraction(n + jump, n)))
    return CircleLift(tuple(points))


def orbit_collapse(
    F: CircleLift,
    struct: Optional[PeriodicStructure] = None,
    q_max: int = DEFAULT_Q_MAX,
    ceiling: Optional[int] = None,
) -> Tuple[CircleLift, CircleLift]:
    """
    Remove two periodic orbits from a crossing map.

    Points are relabelled so p_0 is repulsive. For every point p_{iℓ} of
    its orbit, h stretches [x_i, y_i] onto [x_i, u_i] and [y_i, v_i] onto
    [u_i, v_i], where x_i, y_i are the quarter and half points of the gap
    after p_{iℓ} and u_i, v_i the half and three-quarter points of the gap
    after p_{iℓ+2}; h is the identity elsewhere. The orbits of p_1 and p_2
    are no longer periodic for h∘f.

    Returns:
        Tuple[CircleLift, CircleLift]: (h, lift of h∘f)
    """
    if struct is None:
        _, struct = rotation_number(F, q_max, 1, ceiling)
    if struct is None or not struct.all_crossing:
        raise PreconditionError("orbit_collapse needs finitely many periodic points, all crossing")
    K, q, ell = len(struct.points), struct.q, struct.ell
    if K % (2 * q) or K // (2 * q) < 2:
        raise PreconditionError(f"orbit_collapse needs at least 4 orbits, got {K // q}")
    r0 = struct.flags.index(FixedPointKind.REPULSIVE)

    def lifted(j: int) -> Fraction:
        idx = r0 + j
        return struct.points[idx % K] + idx // K

    nodes: List[Point] = []
    for i in range(q):
        b = (i * ell) % K
        p0, p1, p2, p3 = (lifted(b + t) for t in range(4))
        x, y = p0 + (p1 - p0) / 4, p0 + (p1 - p0) / 2
        u, v = p2 + (p3 - p2) / 2, p2 + 3 * (p3 - p2) / 4
        nodes += [(x, x), (y, u), (v, v)]
    H = lift_from_nodes(nodes)
    return H, normalize_lift(compose_lifts(H, F, ceiling=ceiling))


def _affine_piece(F: CircleLift, y: Fraction) -> Tuple[Fraction, Fraction, Fraction]:
    """(s, t, end) with F(z) = s·z + t on the piece [start, end) containing y."""
    shift = math.floor(y)
    i = min(bisect_right(F.xs, y - shift) - 1, F.pieces - 1)
    (x0, y0), (x1, y1) = F.breakpoints[i], F.breakpoints[i + 1]
    s = (y1 - y0) / (x1 - x0)
    start = x0 + shift
    return s, y0 + shift - s * start, x1 + shift


def psi_bracket(F: CircleLift, n: int, k: int) -> Tuple[Fraction, Fraction]:
    """[k/n − max(F − id), k/n − min(F − id)], which always contains ψ."""
    lo, hi = _displacement_range(F)
    return Fraction(k, n) - hi, Fraction(k, n) - lo


def psi(F: CircleLift, n: int, k: int, x: RatLike) -> Fraction:
    """
    The unique α with (F + α)^n(x) = x + k, exact.

    α ↦ (F + α)^n(x) − x is increasing and PL; the walk moves α through
    its affine pieces, each trajectory point tracked as a + b·α, until
    the piece containing the target value is reached.
    """
    if n < 1:
        raise PreconditionError(f"n must be positive, got {n}")
    x = to_rat(x)
    alpha, upper = psi_bracket(F, n, k)
    while alpha <= upper:
        a, b = x, ZERO
        limit = None
        for _ in range(n):
            s, t, end = _affine_piece(F, a + b * alpha)
            if b > 0:
                reach = (end - a) / b
                limit = reach if limit is None else min(limit, reach)
            a, b = s * a + t, s * b + 1
        target = (k + x - a) / b
        if limit is None or target <= limit:
            return target
        alpha = limit
    raise HomeolabError(f"psi walk left its bracket at x={x}")


def psi_variation(F: CircleLift, n: int, k: int, grid: int) -> Fraction:
    """Variation of ψ sampled on i/grid, closed around the circle."""
    if grid < 2:
        raise PreconditionError(f"grid must be at least 2, got {grid}")
    values = [psi(F, n, k, Fraction(i, grid)) for i in range(grid)]
    values.append(values[0])
    return sum((abs(b - a) for a, b in zip(values, values[1:])), ZERO)


# Wire format

def parse_lift(text: str) -> CircleLift:
    """
    Parse a normalized lift from its JSON payload.

    Raises:
        MapFormatError: Malformed payload or wrong kind
        InvariantViolation: Lift law, monotonicity or normalization breach
    """
    payload = load_payload(text)
    if payload.kind != "lift":
        raise MapFormatError(f"expected kind 'lift', got {payload.kind!r}")
    F = CircleLift(tuple(breakpoints_from_payload(payload)))
    if not F.is_normalized:
        raise InvariantViolation("lift-normalization", f"F(0) = {F.ys[0]} must lie in [0, 1)")
    return F


def emit_lift(F: CircleLift) -> str:
    return emit_breakpoints("lift", F)
