"""
Exact piecewise-linear maps of [0, 1] for homeolab.

This module handles:
- Rational scalars (``fractions.Fraction``) and their "p/q" wire form
- Increasing PL homeomorphisms of [0, 1] as canonical breakpoint lists
- Composition, inversion, powers and pointwise envelopes
- Fixed-set extraction and the sign-word conjugacy invariant
"""

import json
import logging
import re
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import ValidationError

from homeolab.config import piece_ceiling
from homeolab.core.errors import (
    HomeolabError,
    InvariantViolation,
    MapFormatError,
    PieceCeilingExceeded,
    PreconditionError,
)
from homeolab.core.payloads import MapPayload

logger = logging.getLogger(__name__)

Rat = Fraction
RatLike = Union[int, Fraction, str]
Point = Tuple[Fraction, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)

_RAT_PATTERN = re.compile(r"^-?\d+(/\d+)?$")


def parse_rat(text: str) -> Fraction:
    """
    Parse a decimal-free rational of the form "p/q" or "p".

    Args:
        text (str): Rational literal

    Returns:
        Fraction: Value in lowest terms
    """
    text = text.strip()
    if not _RAT_PATTERN.match(text):
        raise MapFormatError(f"not a rational literal: {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError as e:
        raise MapFormatError(f"zero denominator in {text!r}") from e


def format_rat(value: Fraction) -> str:
    """Canonical wire form "p/q" (denominator always present)."""
    return f"{value.numerator}/{value.denominator}"


def to_rat(value: RatLike) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings; floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rat(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def sign_of(value: Fraction) -> int:
    return (value > 0) - (value < 0)


class Letter(str, Enum):
    """Alphabet of sign words: gap signs and fixed-component types."""

    POS = "+"
    NEG = "-"
    PT = "pt"
    SEG = "seg"

    def flipped(self) -> "Letter":
        if self is Letter.POS:
            return Letter.NEG
        if self is Letter.NEG:
            return Letter.POS
        return self

    @classmethod
    def from_sign(cls, value: int) -> "Letter":
        if value == 0:
            raise ValueError("zero has no gap sign")
        return cls.POS if value > 0 else cls.NEG


def _collinear(a: Point, b: Point, c: Point) -> bool:
    return (b[1] - a[1]) * (c[0] - b[0]) == (c[1] - b[1]) * (b[0] - a[0])


def canonicalize(points: Iterable[Point]) -> Tuple[Point, ...]:
    """Drop interior breakpoints that are collinear with their neighbours."""
    kept: List[Point] = []
    for point in points:
        while len(kept) >= 2 and _collinear(kept[-2], kept[-1], point):
            kept.pop()
        kept.append(point)
    return tuple(kept)


def _interpolate(a: Point, b: Point, x: Fraction) -> Fraction:
    if x == a[0]:
        return a[1]
    if x == b[0]:
        return b[1]
    return a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0])


def linear_root(u: Fraction, du: Fraction, v: Fraction, dv: Fraction) -> Fraction:
    """Abscissa where the segment from (u, du) to (v, dv) crosses zero."""
    return u + du * (v - u) / (du - dv)


def check_ceiling(pieces: int, ceiling: Optional[int]) -> None:
    limit = piece_ceiling(ceiling)
    if pieces > limit:
        raise PieceCeilingExceeded(pieces, limit)


@dataclass(frozen=True)
class PLGraph:
    """
    Strictly increasing PL graph over [0, 1], stored canonically.

    Shared by interval maps and circle lifts; subclasses add their
    endpoint invariants in ``_check_endpoints``.
    """

    breakpoints: Tuple[Point, ...]

    def __post_init__(self):
        points = tuple((to_rat(x), to_rat(y)) for x, y in self.breakpoints)
        if len(points) < 2:
            raise InvariantViolation("too-few-breakpoints", "at least two breakpoints are required")
        if points[0][0] != 0 or points[-1][0] != 1:
            raise InvariantViolation("domain", f"breakpoints must span [0, 1], got [{points[0][0]}, {points[-1][0]}]")
        for (x0, y0), (x1, y1) in zip(points, points[1:]):
            if x1 <= x0:
                raise InvariantViolation("monotonicity", f"abscissae not strictly increasing at x={x1}")
            if y1 <= y0:
                raise InvariantViolation("monotonicity", f"values not strictly increasing at x={x1}")
        self._check_endpoints(points)
        object.__setattr__(self, "breakpoints", canonicalize(points))

    def _check_endpoints(self, points: Tuple[Point, ...]) -> None:
        pass

    @cached_property
    def xs(self) -> Tuple[Fraction, ...]:
        return tuple(x for x, _ in self.breakpoints)

    @cached_property
    def ys(self) -> Tuple[Fraction, ...]:
        return tuple(y for _, y in self.breakpoints)

    @property
    def pieces(self) -> int:
        return len(self.breakpoints) - 1

    def slopes(self) -> List[Fraction]:
        return [(b[1] - a[1]) / (b[0] - a[0]) for a, b in zip(self.breakpoints, self.breakpoints[1:])]

    def _value(self, x: Fraction) -> Fraction:
        """Evaluate on [0, 1] without domain checks."""
        i = bisect_right(self.xs, x) - 1
        i = min(max(i, 0), self.pieces - 1)
        return _interpolate(self.breakpoints[i], self.breakpoints[i + 1], x)

    def _preimage(self, y: Fraction) -> Fraction:
        """Inverse evaluation on [y_0, y_m] without range checks."""
        i = bisect_right(self.ys, y) - 1
        i = min(max(i, 0), self.pieces - 1)
        (x0, y0), (x1, y1) = self.breakpoints[i], self.breakpoints[i + 1]
        return _interpolate((y0, x0), (y1, x1), y)


@dataclass(frozen=True)
class PLMap(PLGraph):
    """Increasing PL homeomorphism of [0, 1] (fixes both endpoints)."""

    def _check_endpoints(self, points: Tuple[Point, ...]) -> None:
        if points[0][1] != 0 or points[-1][1] != 1:
            raise InvariantViolation("range", "an interval homeomorphism must fix 0 and 1")

    @classmethod
    def from_points(cls, points: Iterable[Tuple[RatLike, RatLike]]) -> "PLMap":
        return cls(tuple((to_rat(x), to_rat(y)) for x, y in points))

    def __call__(self, x: RatLike) -> Fraction:
        return evaluate(self, x)

    def __repr__(self) -> str:
        inner = ", ".join(f"({x}, {y})" for x, y in self.breakpoints)
        return f"PLMap[{inner}]"


def identity() -> PLMap:
    return PLMap(((ZERO, ZERO), (ONE, ONE)))


def tent_map(a: RatLike) -> PLMap:
    """
    Witness-family member through (1/2, a): 2ax on [0, 1/2], 2(1 - a)x + 2a - 1 after.

    Args:
        a (RatLike): Value at 1/2, strictly between 0 and 1

    Returns:
        PLMap: The two-piece map
    """
    a = to_rat(a)
    if not 0 < a < 1:
        raise PreconditionError(f"tent parameter must lie in (0, 1), got {a}")
    return PLMap(((ZERO, ZERO), (HALF, a), (ONE, ONE)))


def evaluate(f: PLMap, x: RatLike) -> Fraction:
    """
    Evaluate a PL map exactly.

    Args:
        f (PLMap): Map to evaluate
        x (RatLike): Point of [0, 1]

    Returns:
        Fraction: f(x)
    """
    x = to_rat(x)
    if not 0 <= x <= 1:
        raise PreconditionError(f"x={x} lies outside [0, 1]")
    return f._value(x)


def compose(f: PLMap, g: PLMap, ceiling: Optional[int] = None) -> PLMap:
    """Return f∘g, breakpoints at g's and at g⁻¹ of f's."""
    xs = sorted(set(g.xs) | {g._preimage(x) for x in f.xs})
    check_ceiling(len(xs) - 1, ceiling)
    return PLMap(tuple((x, f._value(g._value(x))) for x in xs))


def compose_all(*maps: PLMap, ceiling: Optional[int] = None) -> PLMap:
    """Compose right to left: compose_all(f, g, h) = f∘g∘h."""
    if not maps:
        return identity()
    result = maps[-1]
    for f in reversed(maps[:-1]):
        result = compose(f, result, ceiling=ceiling)
    return result


def invert(f: PLMap) -> PLMap:
    return PLMap(tuple((y, x) for x, y in f.breakpoints))


def conjugate(f: PLMap, h: PLMap, ceiling: Optional[int] = None) -> PLMap:
    """Return h⁻¹∘f∘h."""
    return compose_all(invert(h), f, h, ceiling=ceiling)


def power(f: PLMap, n: int, ceiling: Optional[int] = None) -> PLMap:
    """n-th iterate of f (negative n iterates the inverse)."""
    base = f if n >= 0 else invert(f)
    result = identity()
    for _ in range(abs(n)):
        result = compose(base, result, ceiling=ceiling)
    return result


def _pair_envelope(f: PLMap, g: PLMap, pick: Callable[[Fraction, Fraction], Fraction]) -> PLMap:
    xs = sorted(set(f.xs) | set(g.xs))
    crossings = []
    for u, v in zip(xs, xs[1:]):
        du, dv = f._value(u) - g._value(u), f._value(v) - g._value(v)
        if du * dv < 0:
            crossings.append(linear_root(u, du, v, dv))
    abscissae = sorted(set(xs) | set(crossings))
    return PLMap(tuple((x, pick(f._value(x), g._value(x))) for x in abscissae))


def min_envelope(family: Sequence[PLMap]) -> PLMap:
    """
    Pointwise minimum of a nonempty family, exact.

    Crossing abscissae of every pair of consecutive partial envelopes
    become breakpoints, so the result is again an increasing PL map.
    """
    if not family:
        raise PreconditionError("min_envelope needs a nonempty family")
    result = family[0]
    for f in family[1:]:
        result = _pair_envelope(result, f, min)
    return result


def max_envelope(family: Sequence[PLMap]) -> PLMap:
    """Pointwise maximum of a nonempty family, exact."""
    if not family:
        raise PreconditionError("max_envelope needs a nonempty family")
    result = family[0]
    for f in family[1:]:
        result = _pair_envelope(result, f, max)
    return result


def sup_distance(f: PLMap, g: PLMap) -> Fraction:
    """Uniform distance; attained at a breakpoint of f or g."""
    return max(abs(f._value(x) - g._value(x)) for x in set(f.xs) | set(g.xs))


def two_sided_distance(f: PLMap, g: PLMap) -> Fraction:
    """‖f − g‖∞ + ‖f⁻¹ − g⁻¹‖∞, for diagnostics."""
    return sup_distance(f, g) + sup_distance(invert(f), invert(g))


# Fixed sets and sign words

@dataclass(frozen=True)
class FixPoint:
    x: Fraction

    @property
    def kind(self) -> Letter:
        return Letter.PT

    @property
    def lo(self) -> Fraction:
        return self.x

    @property
    def hi(self) -> Fraction:
        return self.x


@dataclass(frozen=True)
class FixSegment:
    a: Fraction
    b: Fraction

    def __post_init__(self):
        if not self.a < self.b:
            raise InvariantViolation("monotonicity", f"segment [{self.a}, {self.b}] is degenerate")

    @property
    def kind(self) -> Letter:
        return Letter.SEG

    @property
    def lo(self) -> Fraction:
        return self.a

    @property
    def hi(self) -> Fraction:
        return self.b


FixComponent = Union[FixPoint, FixSegment]


@dataclass(frozen=True)
class FixSet:
    """Ordered fixed components and the sign of f − id on each gap between them."""

    components: Tuple[FixComponent, ...]
    gap_signs: Tuple[Letter, ...]

    def __post_init__(self):
        if len(self.gap_signs) != max(len(self.components) - 1, 0):
            raise InvariantViolation("gap-count", "one gap sign per pair of consecutive components")

    @property
    def interior(self) -> Tuple[FixComponent, ...]:
        return self.components[1:-1]

    def gaps(self) -> List[Tuple[Fraction, Fraction, Letter]]:
        return [(a.hi, b.lo, s) for a, b, s in zip(self.components, self.components[1:], self.gap_signs)]


def _make_component(lo: Fraction, hi: Fraction) -> FixComponent:
    return FixPoint(lo) if lo == hi else FixSegment(lo, hi)


def _zero_runs(samples: Sequence[Tuple[Fraction, Fraction]]) -> List[Tuple[Fraction, Fraction]]:
    """Merged closed zero intervals of the PL function through the (x, d) samples."""
    raw: List[Tuple[Fraction, Fraction]] = []
    for (x0, d0), (x1, d1) in zip(samples, samples[1:]):
        if d0 == 0 and d1 == 0:
            raw.append((x0, x1))
        elif d0 == 0:
            raw.append((x0, x0))
        elif d1 == 0:
            raw.append((x1, x1))
        elif d0 * d1 < 0:
            root = linear_root(x0, d0, x1, d1)
            raw.append((root, root))
    raw.sort()
    merged: List[Tuple[Fraction, Fraction]] = []
    for lo, hi in raw:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def zero_components(graph: PLGraph, offset: Fraction = ZERO) -> List[Tuple[Fraction, Fraction]]:
    """
    Closed zero intervals of x ↦ graph(x) − x − offset over [0, 1], merged.

    Returns:
        List[Tuple[Fraction, Fraction]]: (lo, hi) pairs, lo == hi for isolated zeros
    """
    return _zero_runs([(x, y - x - offset) for x, y in graph.breakpoints])


def certify_gap_sign(graph: PLGraph, a: Fraction, b: Fraction, offset: Fraction = ZERO) -> Letter:
    """
    Certify that graph − id − offset has one strict sign on (a, b).

    The difference is linear between consecutive breakpoints, so a sign
    agreeing at every sub-piece midpoint and at the gap's quartiles holds
    on the whole open gap once the zero set has been removed.
    """
    cuts = [a] + [x for x in graph.xs if a < x < b] + [b]
    test_points = [(u + v) / 2 for u, v in zip(cuts, cuts[1:])]
    test_points += [a + (b - a) / 4, a + 3 * (b - a) / 4]
    signs = {sign_of(graph._value(x) - x - offset) for x in test_points}
    if len(signs) != 1 or 0 in signs:
        raise HomeolabError(f"gap ({a}, {b}) failed sign certification: {sorted(signs)}")
    return Letter.from_sign(signs.pop())


def fix_set(f: PLMap) -> FixSet:
    """
    Exact fixed set of an interval map.

    Args:
        f (PLMap): Interval homeomorphism

    Returns:
        FixSet: Components in order with certified gap signs
    """
    comps = [_make_component(lo, hi) for lo, hi in zero_components(f)]
    signs = tuple(certify_gap_sign(f, a.hi, b.lo) for a, b in zip(comps, comps[1:]))
    return FixSet(tuple(comps), signs)


def coincidence_set(f: PLMap, g: PLMap, ceiling: Optional[int] = None) -> FixSet:
    """
    Fixed set of g⁻¹∘f, read off f − g without composing.

    g is increasing, so g⁻¹f(x) = x exactly where f(x) = g(x), and
    g⁻¹f − id has the sign of f − g everywhere else.

    Args:
        f (PLMap): Map applied first
        g (PLMap): Translate whose inverse is applied second
        ceiling (Optional[int]): Piece-count ceiling for the common refinement

    Returns:
        FixSet: Equal to fix_set(compose(invert(g), f))
    """
    xs = sorted(set(f.xs) | set(g.xs))
    check_ceiling(len(xs) - 1, ceiling)
    samples = [(x, f._value(x) - g._value(x)) for x in xs]
    comps = [_make_component(lo, hi) for lo, hi in _zero_runs(samples)]
    signs = tuple(_certify_difference_sign(f, g, samples, a.hi, b.lo) for a, b in zip(comps, comps[1:]))
    return FixSet(tuple(comps), signs)


def _certify_difference_sign(
    f: PLMap, g: PLMap, samples: Sequence[Tuple[Fraction, Fraction]], a: Fraction, b: Fraction
) -> Letter:
    """f − g is linear between samples: one midpoint of the first sub-piece plus every sample inside (a, b)."""
    inside = [(x, d) for x, d in samples if a < x < b]
    first_cut = inside[0][0] if inside else b
    mid = (a + first_cut) / 2
    signs = {sign_of(d) for _, d in inside} | {sign_of(f._value(mid) - g._value(mid))}
    if len(signs) != 1 or 0 in signs:
        raise HomeolabError(f"gap ({a}, {b}) failed sign certification: {sorted(signs)}")
    return Letter.from_sign(signs.pop())


@dataclass(frozen=True)
class IntervalInvariant:
    """
    Sign word of an interval map.

    ``word`` alternates gap signs with interior component letters;
    ``endpoint_flags`` records the type of the components holding 0 and 1.
    """

    word: Tuple[Letter, ...]
    endpoint_flags: Tuple[Letter, Letter]

    def flipped(self) -> "IntervalInvariant":
        return IntervalInvariant(tuple(c.flipped() for c in self.word), self.endpoint_flags)

    def to_text(self) -> str:
        return " ".join(c.value for c in self.word)

    def to_json(self) -> dict:
        return {"word": [c.value for c in self.word], "endpoints": [c.value for c in self.endpoint_flags]}


def sign_word(f: PLMap) -> IntervalInvariant:
    fs = fix_set(f)
    word: List[Letter] = []
    for i, sign in enumerate(fs.gap_signs):
        word.append(sign)
        if i < len(fs.gap_signs) - 1:
            word.append(fs.components[i + 1].kind)
    flags = (fs.components[0].kind, fs.components[-1].kind)
    return IntervalInvariant(tuple(word), flags)


# Wire format

def breakpoints_from_payload(payload: MapPayload) -> List[Point]:
    """Parse the rational pairs of a payload, which must be listed by increasing x."""
    points = [(parse_rat(x), parse_rat(y)) for x, y in payload.breakpoints]
    for i, ((x0, _), (x1, _)) in enumerate(zip(points, points[1:]), start=1):
        if x1 <= x0:
            raise InvariantViolation("monotonicity", f"abscissa {x1} at index {i} does not follow {x0}")
    return points


def load_payload(text: str) -> MapPayload:
    try:
        return MapPayload.model_validate_json(text)
    except ValidationError as e:
        raise MapFormatError(f"malformed map payload: {e.errors()[0]['msg']}") from e


def parse_map(text: str) -> PLMap:
    """
    Parse an interval map from its JSON payload.

    Raises:
        MapFormatError: Malformed JSON, shape or rational literal
        InvariantViolation: Domain, range or monotonicity breach
    """
    payload = load_payload(text)
    if payload.kind != "interval":
        raise MapFormatError(f"expected kind 'interval', got {payload.kind!r}")
    return PLMap(tuple(breakpoints_from_payload(payload)))


def emit_breakpoints(kind: str, graph: PLGraph) -> str:
    body = {"kind": kind, "breakpoints": [[format_rat(x), format_rat(y)] for x, y in graph.breakpoints]}
    return json.dumps(body, separators=(",", ":"))


def emit_map(f: PLMap) -> str:
    return emit_breakpoints("interval", f)
