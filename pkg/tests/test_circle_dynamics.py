"""Tests for lifts, rotation numbers, circle classification and the ψ solver."""

import json
import math
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, strategies as st

from homeolab.core.circle_dynamics import (
    CircleHaarNull,
    CircleHaarNullReason,
    CircleLift,
    CircleNonHaarNull,
    CircleUndetermined,
    CircleVerdict,
    CyclicSignWord,
    FixedPointKind,
    RationalRotation,
    RotationInterval,
    classify_circle,
    compose_lifts,
    conjugate_decision_circle,
    conjugate_lift,
    count_periodic_orbits,
    emit_lift,
    identity_lift,
    lift_eval,
    lift_inverse,
    lift_power,
    orbit_collapse,
    parse_lift,
    periodic_structure,
    psi,
    psi_variation,
    representative_circle,
    rigid_rotation,
    rotation_enclosure,
    rotation_number,
    signature,
)
from homeolab.core.errors import (
    InvariantViolation,
    MapFormatError,
    NoPeriodicPoints,
    PieceCeilingExceeded,
    PreconditionError,
)
from homeolab.core.pl_core import Letter
from homeolab.core.random_lab import random_lift, trial_rng
from tests.strategies import lifts, rationals

POS, NEG, PT, SEG = Letter.POS, Letter.NEG, Letter.PT, Letter.SEG

ROTATIONS = [(0, 1), (1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (1, 5), (2, 5), (3, 5), (4, 5)]

_FRACTIONS_UP_TO_64 = sorted({F(j, d) for d in range(1, 65) for j in range(d)})
SAMPLED_RATIONALS = sorted(set(_FRACTIONS_UP_TO_64[:: len(_FRACTIONS_UP_TO_64) // 98]) | {F(1, 64), F(63, 64)})

# Lifts with F − id inside [−1, 1]
BOUNDED_LIFTS = [
    identity_lift(),
    rigid_rotation("2/5"),
    representative_circle(0, 1, 1),
    representative_circle(1, 3, 1),
    CircleLift(((F(0), F(1, 8)), (F(1, 3), F(1, 4)), (F(3, 4), F(1)), (F(1), F(9, 8)))),
]


def lift_payload(*points):
    return json.dumps({"kind": "lift", "breakpoints": [[x, y] for x, y in points]})


def iterate(G, alpha, x, n):
    for _ in range(n):
        x = lift_eval(G, x) + alpha
    return x


def assert_crossing_structure(struct):
    """Crossing periodic points come in attracting/repelling pairs of orbits, alternating around the circle."""
    flags = struct.flags
    assert len(struct.points) % (2 * struct.q) == 0
    assert all(flags[i] != flags[(i + 1) % len(flags)] for i in range(len(flags)))


class TestLiftAlgebra:
    def test_periodicity(self):
        G = representative_circle(1, 3, 1)
        assert G(F(7, 3)) == G(F(1, 3)) + 2
        assert G(F(-2, 3)) == G(F(1, 3)) - 1

    @given(lifts())
    def test_inverse(self, G):
        assert compose_lifts(G, lift_inverse(G)) == identity_lift()
        assert compose_lifts(lift_inverse(G), G) == identity_lift()

    @given(lifts(), lifts(), rationals(-1, 2))
    def test_compose_pointwise(self, G, H, x):
        assert lift_eval(compose_lifts(G, H), x) == lift_eval(G, lift_eval(H, x))

    def test_power_of_rotation(self):
        assert lift_power(rigid_rotation("2/5"), 5) == CircleLift(((F(0), F(2)), (F(1), F(3))))

    def test_lift_law_enforced(self):
        with pytest.raises(InvariantViolation) as exc:
            CircleLift(((F(0), F(0)), (F(1), F(3, 2))))
        assert exc.value.violation == "lift-period"

    def test_ceiling(self):
        with pytest.raises(PieceCeilingExceeded):
            lift_power(representative_circle(1, 3, 2), 3, ceiling=5)


class TestRotationNumber:
    def test_rigid_rational(self):
        rotation, struct = rotation_number(rigid_rotation("2/5"))
        assert rotation == RationalRotation(2, 5)
        assert struct.degenerate

    def test_rigid_beyond_q_max(self):
        rotation, struct = rotation_number(rigid_rotation("1/13"), q_max=12, n_iter=1000)
        assert struct is None
        assert isinstance(rotation, RotationInterval)
        assert rotation.contains(F(1, 13))
        assert rotation.width == F(2, 1000)

    @pytest.mark.parametrize("p, q", ROTATIONS)
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_representatives(self, p, q, k):
        rotation, struct = rotation_number(representative_circle(p, q, k))
        assert rotation == RationalRotation(p, q)
        assert len(struct.points) == 2 * k * q

    @pytest.mark.parametrize("alpha", SAMPLED_RATIONALS)
    def test_rigid_detection_and_enclosure(self, alpha):
        G = rigid_rotation(alpha)
        rotation, struct = rotation_number(G, q_max=64)
        assert rotation == RationalRotation(alpha.numerator, alpha.denominator)
        assert struct.degenerate
        enclosure = rotation_enclosure(G, 1000)
        assert enclosure.contains(alpha)
        assert enclosure.width <= F(2, 1000)

    @pytest.mark.parametrize("p, q", ROTATIONS)
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_representative_enclosures(self, p, q, k):
        enclosure = rotation_enclosure(representative_circle(p, q, k), 1000)
        assert enclosure.contains(F(p, q))
        assert enclosure.width <= F(2, 1000)

    def test_ceiling_reports_q(self):
        with pytest.raises(PieceCeilingExceeded) as exc:
            rotation_number(representative_circle(1, 5, 3), ceiling=40)
        assert exc.value.reached_q is not None

    def test_rejects_bad_limits(self):
        with pytest.raises(PreconditionError):
            rotation_number(identity_lift(), q_max=0)

    def test_reduced_fraction_enforced(self):
        with pytest.raises(InvariantViolation):
            RationalRotation(2, 4)

    @given(lifts(), st.integers(1, 60))
    def test_enclosure_soundness(self, G, n_iter):
        rotation, struct = rotation_number(G, q_max=4)
        assume(struct is not None)
        tau = F(struct.shift, struct.q)
        assert rotation_enclosure(G, n_iter).contains(tau)
        assert rotation.value == tau - math.floor(tau)

    @given(lifts())
    def test_enclosures_shrink(self, G):
        coarse, fine = rotation_enclosure(G, 10), rotation_enclosure(G, 40)
        assert coarse.lo <= fine.lo and fine.hi <= coarse.hi


class TestPeriodicStructure:
    def test_two_fixed_points(self):
        struct = periodic_structure(representative_circle(0, 1, 1), 1)
        assert struct.points == (F(0), F(1, 2))
        assert struct.flags == (FixedPointKind.REPULSIVE, FixedPointKind.ATTRACTIVE)

    @pytest.mark.parametrize("p, q", ROTATIONS[:6])
    def test_flags_alternate(self, p, q):
        struct = periodic_structure(representative_circle(p, q, 2), q)
        assert struct.all_crossing
        flags = struct.flags
        assert all(flags[i] != flags[(i + 1) % len(flags)] for i in range(len(flags)))
        assert struct.orbit_count == 4

    def test_no_periodic_points(self):
        with pytest.raises(NoPeriodicPoints):
            periodic_structure(rigid_rotation("1/2"), 1)

    def test_non_minimal_period(self):
        with pytest.raises(PreconditionError):
            periodic_structure(representative_circle(0, 1, 1), 2)


class TestClassifyCircle:
    def test_rigid_rotation(self):
        label = classify_circle(rigid_rotation("2/5"))
        assert label == CircleHaarNull(RationalRotation(2, 5), CircleHaarNullReason.INFINITE_PERIODIC)
        assert label.to_json() == {
            "rotation": "2/5",
            "orbit_count": None,
            "crossing": False,
            "verdict": "haar-null",
            "reason": "infinite-periodic",
        }

    def test_identity(self):
        assert classify_circle(identity_lift()).reason is CircleHaarNullReason.INFINITE_PERIODIC

    def test_undetermined(self):
        label = classify_circle(rigid_rotation("1/13"), q_max=12)
        assert isinstance(label, CircleUndetermined)
        assert label.to_json()["verdict"] == "undetermined"

    @pytest.mark.parametrize("p, q", ROTATIONS)
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_representatives(self, p, q, k):
        label = classify_circle(representative_circle(p, q, k))
        assert label == CircleNonHaarNull(RationalRotation(p, q), k)
        assert label.to_json()["orbit_count"] == 2 * k

    def test_tangent_fixed_point(self):
        G = CircleLift(((F(0), F(0)), (F(1, 4), F(1, 2)), (F(1), F(1))))
        label = classify_circle(G)
        assert label == CircleHaarNull(RationalRotation(0, 1), CircleHaarNullReason.NON_CROSSING, 1)

    @given(lifts())
    def test_crossing_orbits_come_in_pairs(self, G):
        _, struct = rotation_number(G, q_max=4, n_iter=20)
        if struct is not None and struct.all_crossing:
            assert_crossing_structure(struct)
            assert classify_circle(G, q_max=4, n_iter=20).to_json()["orbit_count"] == len(struct.points) // struct.q

    @pytest.mark.slow
    def test_random_lifts_alternate(self):
        crossing = 0
        for trial in range(1000):
            _, struct = rotation_number(random_lift(trial_rng(trial), 4), q_max=6, n_iter=20)
            if struct is not None and struct.all_crossing:
                assert_crossing_structure(struct)
                crossing += 1
        assert crossing > 0

    def test_count_periodic_orbits(self):
        assert count_periodic_orbits(representative_circle(1, 3, 2)) == 4
        assert count_periodic_orbits(rigid_rotation("1/3")) is None


class TestSignature:
    def test_representative(self):
        word = signature(representative_circle(0, 1, 1))
        assert word.to_json() == ["pt", "+", "pt", "-"]
        assert word == CyclicSignWord([PT, NEG, PT, POS])
        assert word != CyclicSignWord([PT, POS])

    def test_identity(self):
        assert signature(identity_lift()) == CyclicSignWord([SEG])

    def test_no_fixed_points(self):
        with pytest.raises(NoPeriodicPoints):
            signature(rigid_rotation("1/2"))

    def test_hash_follows_rotation(self):
        a, b = CyclicSignWord([PT, POS, PT, NEG]), CyclicSignWord([PT, NEG, PT, POS])
        assert hash(a) == hash(b)

    @pytest.mark.parametrize("base", [representative_circle(0, 1, 1), representative_circle(0, 1, 2)])
    @given(H=lifts(max_pieces=4))
    def test_conjugation_invariance(self, base, H):
        assert signature(conjugate_lift(base, H)) == signature(base)


class TestConjugacyDecision:
    @given(H=lifts(max_pieces=4))
    def test_conjugate_of_representative(self, H):
        G = representative_circle(0, 1, 1)
        decision = conjugate_decision_circle(G, conjugate_lift(G, H))
        assert decision.verdict is CircleVerdict.CONJUGATE

    def test_rotation_numbers_differ(self):
        decision = conjugate_decision_circle(representative_circle(1, 2, 1), representative_circle(1, 3, 1))
        assert decision.verdict is CircleVerdict.NOT_CONJUGATE
        assert decision.reason == "rotation numbers differ"

    def test_signatures_differ(self):
        decision = conjugate_decision_circle(representative_circle(0, 1, 1), representative_circle(0, 1, 2))
        assert decision.verdict is CircleVerdict.NOT_CONJUGATE
        assert decision.reason == "signatures differ"

    def test_rigid_against_representative(self):
        decision = conjugate_decision_circle(rigid_rotation("2/5"), representative_circle(2, 5, 1))
        assert decision.verdict is CircleVerdict.NOT_CONJUGATE
        assert decision.to_json()["word_f"] == ["seg"]

    def test_undetermined(self):
        decision = conjugate_decision_circle(rigid_rotation("1/13"), rigid_rotation("1/13"), q_max=12)
        assert decision.verdict is CircleVerdict.UNDETERMINED
        assert isinstance(decision.rotation_f, RotationInterval)
        assert decision.to_json()["word_f"] is None

    def test_disjoint_enclosures_differ(self):
        decision = conjugate_decision_circle(rigid_rotation("1/13"), rigid_rotation("7/13"), q_max=12, n_iter=1000)
        assert decision.verdict is CircleVerdict.NOT_CONJUGATE
        assert decision.reason == "rotation numbers differ"
        assert isinstance(decision.rotation_g, RotationInterval)

    def test_enclosures_compared_mod_one(self):
        near_zero = CircleLift(((F(0), F(1, 1000)), (F(1), F(1001, 1000))))
        near_one = CircleLift(((F(0), F(999, 1000)), (F(1), F(1999, 1000))))
        decision = conjugate_decision_circle(near_zero, near_one, q_max=3, n_iter=10)
        assert decision.verdict is CircleVerdict.UNDETERMINED

    def test_unresolved_against_resolved(self):
        decision = conjugate_decision_circle(rigid_rotation("1/13"), representative_circle(1, 3, 1), q_max=12)
        assert decision.verdict is CircleVerdict.NOT_CONJUGATE
        assert decision.reason == "rotation numbers differ"


class TestOrbitCollapse:
    def test_two_pairs_to_one(self):
        H, G = orbit_collapse(representative_circle(0, 1, 2))
        assert classify_circle(G) == CircleNonHaarNull(RationalRotation(0, 1), 1)
        assert len(periodic_structure(G, 1).points) == 2

    @pytest.mark.parametrize("p, q", ROTATIONS[:6])
    def test_representatives(self, p, q):
        _, G = orbit_collapse(representative_circle(p, q, 2))
        assert classify_circle(G) == CircleNonHaarNull(RationalRotation(p, q), 1)

    def test_three_pairs(self):
        _, G = orbit_collapse(representative_circle(0, 1, 3))
        assert classify_circle(G) == CircleNonHaarNull(RationalRotation(0, 1), 2)

    @pytest.mark.parametrize("p, q", ROTATIONS[:6])
    @pytest.mark.parametrize("k", [1, 2])
    def test_removes_exactly_one_pair(self, p, q, k):
        _, G = orbit_collapse(representative_circle(p, q, k + 1))
        rotation, struct = rotation_number(G)
        assert rotation == RationalRotation(p, q)
        assert len(struct.points) == 2 * k * q
        assert struct.all_crossing

    @pytest.mark.parametrize("p, q", ROTATIONS[:6])
    @pytest.mark.parametrize("k", [1, 2])
    def test_repeated_collapse_reaches_one_pair(self, p, q, k):
        G = representative_circle(p, q, k + 1)
        for _ in range(k):
            _, G = orbit_collapse(G)
        assert len(periodic_structure(G, q).points) == 2 * q
        assert classify_circle(G) == CircleNonHaarNull(RationalRotation(p, q), 1)

    def test_collapse_map_is_identity_near_repulsive_point(self):
        H, _ = orbit_collapse(representative_circle(0, 1, 2))
        assert H(F(0)) == 0

    def test_ceiling(self):
        with pytest.raises(PieceCeilingExceeded):
            orbit_collapse(representative_circle(0, 1, 2), ceiling=2)

    def test_needs_two_pairs(self):
        with pytest.raises(PreconditionError):
            orbit_collapse(representative_circle(0, 1, 1))

    def test_needs_crossing_points(self):
        with pytest.raises(PreconditionError):
            orbit_collapse(rigid_rotation("1/3"))


class TestPsi:
    @pytest.mark.parametrize("n, k", [(1, 0), (1, 1), (3, 2), (7, -1), (4, 9)])
    @pytest.mark.parametrize("x", [F(0), F(1, 3), F(5, 7)])
    def test_identity(self, n, k, x):
        assert psi(identity_lift(), n, k, x) == F(k, n)

    def test_rigid_rotation(self):
        assert psi(rigid_rotation("2/5"), 3, 1, F(1, 2)) == F(1, 3) - F(2, 5)

    @pytest.mark.parametrize("G", BOUNDED_LIFTS)
    @given(n=st.integers(1, 4), k=st.integers(-3, 6), x=rationals(0, 1))
    def test_solves_defining_equation(self, G, n, k, x):
        alpha = psi(G, n, k, x)
        assert iterate(G, alpha, x, n) == x + k
        assert F(k, n) - 1 - F(1, n) <= alpha <= F(k, n) + 1 + F(1, n)

    @given(G=lifts(), n=st.integers(1, 3), k=st.integers(0, 3), x=rationals(0, 1))
    def test_period_one(self, G, n, k, x):
        assert psi(G, n, k, x + 1) == psi(G, n, k, x)

    @pytest.mark.parametrize("G", BOUNDED_LIFTS)
    @given(n=st.integers(1, 4), k=st.integers(0, 4), a=rationals(0, 1), b=rationals(0, 1))
    def test_increments_bounded_by_distance(self, G, n, k, a, b):
        assume(a != b)
        x, y = min(a, b), max(a, b)
        assert psi(G, n, k, y) - psi(G, n, k, x) <= y - x

    @pytest.mark.parametrize("G", BOUNDED_LIFTS)
    def test_variation(self, G):
        v10, v100 = psi_variation(G, 3, 1, 10), psi_variation(G, 3, 1, 100)
        assert v10 <= v100 <= 2

    def test_variation_of_identity(self):
        assert psi_variation(identity_lift(), 5, 2, 50) == 0

    def test_rejects(self):
        with pytest.raises(PreconditionError):
            psi(identity_lift(), 0, 1, 0)
        with pytest.raises(PreconditionError):
            psi_variation(identity_lift(), 1, 1, 1)

    @pytest.mark.slow
    @pytest.mark.parametrize("G", BOUNDED_LIFTS)
    def test_variation_fine_grid(self, G):
        assert psi_variation(G, 3, 1, 100) <= psi_variation(G, 3, 1, 1000) <= 2


class TestWireFormat:
    def test_round_trip(self):
        G = representative_circle(1, 3, 1)
        assert parse_lift(emit_lift(G)) == G

    def test_interval_kind_rejected(self):
        with pytest.raises(MapFormatError):
            parse_lift(json.dumps({"kind": "interval", "breakpoints": [["0", "0"], ["1", "1"]]}))

    def test_lift_period(self):
        with pytest.raises(InvariantViolation) as exc:
            parse_lift(lift_payload(("0", "1/4"), ("1/2", "1/2"), ("1", "1")))
        assert exc.value.violation == "lift-period"

    def test_normalization(self):
        with pytest.raises(InvariantViolation) as exc:
            parse_lift(lift_payload(("0", "1"), ("1", "2")))
        assert exc.value.violation == "lift-normalization"
