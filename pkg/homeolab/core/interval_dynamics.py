"""
Conjugacy classification of interval homeomorphisms for homeolab.

This module handles:
- Class labels for PL maps of [0, 1] (non-Haar-null vs Haar-null side)
- Conjugacy decisions certified by an explicit sign-matching homeomorphism
- Canonical zigzag representatives
- The constructive translates: strict minorants, finite crossing
  translates and removal of an interior fixed point
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from homeolab.core.errors import HomeolabError, PreconditionError
from homeolab.core.pl_core import (
    ONE,
    ZERO,
    FixPoint,
    FixSegment,
    FixSet,
    IntervalInvariant,
    Letter,
    PLMap,
    RatLike,
    compose,
    format_rat,
    fix_set,
    invert,
    max_envelope,
    min_envelope,
    sign_of,
    sign_word,
    to_rat,
)

logger = logging.getLogger(__name__)


class HaarNullReason(str, Enum):
    INTERIOR_SEGMENT = "interior-segment"
    NON_CROSSING_POINT = "non-crossing-point"


@dataclass(frozen=True)
class NonHaarNull:
    """Finitely many interior fixed points, each crossing."""

    n: int
    first_sign: Letter

    @property
    def verdict(self) -> str:
        return "non-haar-null"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "n": self.n, "first_sign": self.first_sign.value}


@dataclass(frozen=True)
class HaarNull:
    reason: HaarNullReason

    @property
    def verdict(self) -> str:
        return "haar-null"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "reason": self.reason.value}


IntervalClass = Union[NonHaarNull, HaarNull]


class Accumulation(str, Enum):
    BOTH_ENDPOINTS = "both-endpoints"
    LEFT_ENDPOINT = "left-endpoint"
    RIGHT_ENDPOINT = "right-endpoint"


@dataclass(frozen=True)
class SymbolicIntervalClass:
    """
    Label for a class whose fixed points accumulate at an endpoint.

    Such classes have no finite PL member, so these labels are never
    produced by ``classify``. ``side_sign`` is the sign of f − id next to
    the non-accumulating endpoint; it is ``None`` for the symmetric
    two-sided case.
    """

    accumulation: Accumulation
    side_sign: Optional[Letter] = None

    def describe(self) -> str:
        if self.side_sign is None:
            return f"fixed points accumulate at {self.accumulation.value}"
        return f"fixed points accumulate at {self.accumulation.value}, sign {self.side_sign.value} elsewhere"


def symbolic_classes() -> List[SymbolicIntervalClass]:
    """The five accumulation classes, listed for reports and documentation."""
    return [
        SymbolicIntervalClass(Accumulation.BOTH_ENDPOINTS),
        SymbolicIntervalClass(Accumulation.LEFT_ENDPOINT, Letter.POS),
        SymbolicIntervalClass(Accumulation.LEFT_ENDPOINT, Letter.NEG),
        SymbolicIntervalClass(Accumulation.RIGHT_ENDPOINT, Letter.POS),
        SymbolicIntervalClass(Accumulation.RIGHT_ENDPOINT, Letter.NEG),
    ]


def classify(f: PLMap) -> IntervalClass:
    """
    Classify an interval map.

    Args:
        f (PLMap): Interval homeomorphism

    Returns:
        IntervalClass: HaarNull with its reason, or NonHaarNull{n, first_sign}
    """
    return classify_fix_set(fix_set(f))


def classify_fix_set(fs: FixSet) -> IntervalClass:
    """Classification from an already computed fixed set."""
    if any(isinstance(c, FixSegment) for c in fs.components):
        return HaarNull(HaarNullReason.INTERIOR_SEGMENT)
    # Interior point i sits between gap i-1 and gap i
    for i in range(1, len(fs.components) - 1):
        if fs.gap_signs[i - 1] == fs.gap_signs[i]:
            return HaarNull(HaarNullReason.NON_CROSSING_POINT)
    return NonHaarNull(len(fs.interior), fs.gap_signs[0])


# Conjugacy

@dataclass(frozen=True)
class Conjugator:
    """Sign-matching homeomorphism h with its exact certification points."""

    h: PLMap
    checked_points: Tuple[Tuple[Fraction, int], ...]


@dataclass(frozen=True)
class MismatchReport:
    index: Optional[int]
    expected: Optional[str]
    found: Optional[str]
    reason: str


@dataclass(frozen=True)
class Conjugate:
    conjugator: Conjugator
    word_f: IntervalInvariant
    word_g: IntervalInvariant

    @property
    def verdict(self) -> str:
        return "conjugate"


@dataclass(frozen=True)
class NotConjugate:
    report: MismatchReport
    word_f: IntervalInvariant
    word_g: IntervalInvariant

    @property
    def verdict(self) -> str:
        return "not-conjugate"


ConjugacyVerdict = Union[Conjugate, NotConjugate]


def _mismatch(wf: IntervalInvariant, wg: IntervalInvariant) -> MismatchReport:
    if wf.endpoint_flags != wg.endpoint_flags:
        return MismatchReport(
            None,
            "/".join(c.value for c in wf.endpoint_flags),
            "/".join(c.value for c in wg.endpoint_flags),
            "endpoint components differ",
        )
    for i, (a, b) in enumerate(zip(wf.word, wg.word)):
        if a != b:
            return MismatchReport(i, a.value, b.value, "letters differ")
    i = min(len(wf.word), len(wg.word))
    expected = wf.word[i].value if i < len(wf.word) else None
    found = wg.word[i].value if i < len(wg.word) else None
    return MismatchReport(i, expected, found, "words have different lengths")


def _certify(f: PLMap, g: PLMap, h: PLMap) -> Tuple[Tuple[Fraction, int], ...]:
    """
    Check sign(f(x) − x) = sign(g(h(x)) − h(x)) exactly.

    Both sides are linear between consecutive cut points, so agreement at
    the cuts and at each midpoint covers every x.
    """
    cuts = sorted(set(f.xs) | set(h.xs) | {h._preimage(y) for y in g.xs})
    test_points = list(cuts) + [(u + v) / 2 for u, v in zip(cuts, cuts[1:])]
    checked = []
    for x in sorted(test_points):
        hx = h._value(x)
        left, right = sign_of(f._value(x) - x), sign_of(g._value(hx) - hx)
        if left != right:
            raise HomeolabError(f"sign identity fails at x={x}: {left} vs {right}")
        checked.append((x, left))
    return tuple(checked)


def build_conjugator(f: PLMap, g: PLMap) -> Conjugator:
    """
    Build the PL homeomorphism carrying f's fixed components onto g's.

    h sends the i-th fixed component of f onto the i-th of g (segment
    endpoints to segment endpoints) and is affine on every gap closure.

    Raises:
        PreconditionError: The sign words of f and g differ
    """
    if sign_word(f) != sign_word(g):
        raise PreconditionError("build_conjugator needs equal sign words")
    nodes = []
    for cf, cg in zip(fix_set(f).components, fix_set(g).components):
        nodes.append((cf.lo, cg.lo))
        if isinstance(cf, FixSegment):
            nodes.append((cf.hi, cg.hi))
    h = PLMap(tuple(nodes))
    return Conjugator(h, _certify(f, g, h))


def conjugate_decision(f: PLMap, g: PLMap) -> ConjugacyVerdict:
    wf, wg = sign_word(f), sign_word(g)
    if wf == wg:
        return Conjugate(build_conjugator(f, g), wf, wg)
    report = _mismatch(wf, wg)
    logger.debug(f"Not conjugate: {report.reason} at index {report.index}")
    return NotConjugate(report, wf, wg)


def certificate_json(verdict: ConjugacyVerdict) -> dict:
    """Serialize a decision as {verdict, word_f, word_g, conjugator?, mismatch_index?}."""
    body = {
        "verdict": verdict.verdict,
        "word_f": verdict.word_f.to_json(),
        "word_g": verdict.word_g.to_json(),
    }
    if isinstance(verdict, Conjugate):
        body["conjugator"] = [[format_rat(x), format_rat(y)] for x, y in verdict.conjugator.h.breakpoints]
    else:
        body["mismatch_index"] = verdict.report.index
        body["mismatch_reason"] = verdict.report.reason
    return body


# Constructions

def representative(n: int, first_sign: Letter) -> PLMap:
    """
    Canonical zigzag with interior fixed points at i/(n+1).

    Each gap's midpoint is moved a quarter gap-width up or down, the
    direction alternating from ``first_sign``.
    """
    if n < 0:
        raise PreconditionError(f"n must be non-negative, got {n}")
    if first_sign not in (Letter.POS, Letter.NEG):
        raise PreconditionError(f"first_sign must be + or -, got {first_sign}")
    width = Fraction(1, n + 1)
    points = [(ZERO, ZERO)]
    sign = first_sign
    for i in range(n + 1):
        a = i * width
        mid = a + width / 2
        bump = width / 4 if sign is Letter.POS else -width / 4
        points.append((mid, mid + bump))
        points.append((a + width, a + width))
        sign = sign.flipped()
    return PLMap(tuple(points))


def _certify_strictly_below(g: PLMap, h: PLMap) -> None:
    cuts = sorted(set(g.xs) | set(h.xs))
    test_points = [x for x in cuts if 0 < x < 1] + [(u + v) / 2 for u, v in zip(cuts, cuts[1:])]
    for x in test_points:
        if not g._value(x) < h._value(x):
            raise HomeolabError(f"strict minorance fails at x={x}")


def strict_minorant(family: Sequence[PLMap], x0: RatLike, y0: RatLike) -> PLMap:
    """
    PL homeomorphism g with g(x0) = y0 lying strictly below every member on (0, 1).

    The envelope h = min(family) is scaled by the tent factor T with
    T(0) = T(x0) = y0/h(x0), T(1) = 1, affine in between, and T·h is
    interpolated at h's breakpoints and x0.

    Raises:
        PreconditionError: x0, y0 outside (0, 1) or y0 ≥ h(x0)
    """
    x0, y0 = to_rat(x0), to_rat(y0)
    if not (0 < x0 < 1 and 0 < y0 < 1):
        raise PreconditionError("x0 and y0 must lie in (0, 1)")
    h = min_envelope(family)
    hx0 = h._value(x0)
    if y0 >= hx0:
        raise PreconditionError(f"y0={y0} is not below the envelope value {hx0} at x0={x0}")
    c = y0 / hx0

    def tent(x: Fraction) -> Fraction:
        if x <= x0:
            return c
        return c + (1 - c) * (x - x0) / (1 - x0)

    xs = sorted(set(h.xs) | {x0})
    g = PLMap(tuple((x, tent(x) * h._value(x)) for x in xs))
    _certify_strictly_below(g, h)
    return g


def strict_majorant(family: Sequence[PLMap], x0: RatLike, y0: RatLike) -> PLMap:
    """Mirror of strict_minorant: g(x0) = y0 and g above every member on (0, 1)."""
    x0, y0 = to_rat(x0), to_rat(y0)
    return invert(strict_minorant([invert(f) for f in family], y0, x0))


def crossing_translate(family: Sequence[PLMap], n: int) -> PLMap:
    """
    Translate g meeting every member at least 2n times inside a window.

    Alternating sequences x_0 < ... < x_2n and y_0 < ... < y_2n are built
    with every member above (x_k, y_k) for even k and below it for odd k;
    g interpolates them, and outside [x_0, x_2n] it follows strict
    minorants so no member meets it near either endpoint.
    """
    if not family:
        raise PreconditionError("crossing_translate needs a nonempty family")
    if n < 0:
        raise PreconditionError(f"n must be non-negative, got {n}")
    lo, hi = min_envelope(family), max_envelope(family)
    xs = [Fraction(1, 8)]
    ys = [lo._value(xs[0]) / 2]
    for k in range(1, 2 * n + 1):
        if k % 2:
            y = (hi._value(xs[-1]) + 1) / 2
            x = (xs[-1] + hi._preimage(y)) / 2
        else:
            x = (lo._preimage(ys[-1]) + 1) / 2
            y = (ys[-1] + lo._value(x)) / 2
        xs.append(x)
        ys.append(y)
    left = strict_minorant(family, xs[0], ys[0])
    right = strict_minorant(family, xs[-1], ys[-1])
    points = [p for p in left.breakpoints if p[0] < xs[0]]
    points += list(zip(xs, ys))
    points += [p for p in right.breakpoints if p[0] > xs[-1]]
    logger.debug(f"Crossing window [{xs[0]}, {xs[-1]}] with {2 * n} alternations")
    return PLMap(tuple(points))


def drop_interior_fixed_point(f: PLMap) -> Tuple[PLMap, PLMap]:
    """
    Translate removing the first interior fixed point of f.

    With c1 the first interior fixed point and c2 the next fixed point,
    the window q < r inside (c1, c2) is fixed at the quarter points, h is
    the identity on [r, 1], affine on [m, r] for m = (q + r)/2, and a
    strict minorant (or majorant, when f − id is negative past c1) of f
    on [0, m]. Every fixed point of f in [r, 1] survives in h⁻¹f and c1
    disappears.

    Returns:
        Tuple[PLMap, PLMap]: (h, h⁻¹∘f)
    """
    label = classify(f)
    if not isinstance(label, NonHaarNull) or label.n < 1:
        raise PreconditionError("needs a non-Haar-null map with at least one interior fixed point")
    fs = fix_set(f)
    c1, c2 = fs.components[1].lo, fs.components[2].lo
    sign = fs.gap_signs[1]
    q, r = c1 + (c2 - c1) / 4, c1 + 3 * (c2 - c1) / 4
    m = (q + r) / 2
    if sign is Letter.POS:
        ym = m / 2
        outer = strict_minorant([f], m, ym)
    else:
        ym = (m + r) / 2
        outer = strict_majorant([f], m, ym)
    points = [p for p in outer.breakpoints if p[0] < m] + [(m, ym), (r, r), (ONE, ONE)]
    h = PLMap(tuple(points))
    return h, compose(invert(h), f)
