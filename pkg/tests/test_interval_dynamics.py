"""Tests for interval classification, conjugacy and the constructions behind them."""

from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from homeolab.core.errors import PreconditionError
from homeolab.core.interval_dynamics import (
    Accumulation,
    Conjugate,
    HaarNull,
    HaarNullReason,
    NonHaarNull,
    NotConjugate,
    build_conjugator,
    certificate_json,
    classify,
    conjugate_decision,
    crossing_translate,
    drop_interior_fixed_point,
    representative,
    strict_majorant,
    strict_minorant,
    symbolic_classes,
)
from homeolab.core.pl_core import (
    Letter,
    PLMap,
    compose,
    conjugate,
    evaluate,
    fix_set,
    identity,
    invert,
    sign_word,
    tent_map,
)
from homeolab.core.random_lab import random_pl_map, trial_rng
from tests.strategies import pl_maps

POS, NEG = Letter.POS, Letter.NEG
GRID = [F(i, 97) for i in range(1, 97)]


class TestClassify:
    @pytest.mark.parametrize("a, sign", [("2/3", POS), ("1/3", NEG)])
    def test_tents(self, a, sign):
        assert classify(tent_map(a)) == NonHaarNull(0, sign)

    def test_identity(self):
        assert classify(identity()) == HaarNull(HaarNullReason.INTERIOR_SEGMENT)

    def test_tangent_fixed_point(self):
        f = PLMap.from_points([(0, 0), ("1/4", "3/8"), ("1/2", "1/2"), ("3/4", "7/8"), (1, 1)])
        assert classify(f) == HaarNull(HaarNullReason.NON_CROSSING_POINT)

    def test_to_json(self):
        assert classify(tent_map("2/3")).to_json() == {"verdict": "non-haar-null", "n": 0, "first_sign": "+"}
        assert classify(identity()).to_json() == {"verdict": "haar-null", "reason": "interior-segment"}

    @pytest.mark.parametrize("sign", [POS, NEG])
    @pytest.mark.parametrize("n", [0, 1, 2, 3, 7, 20, 50])
    def test_representatives(self, n, sign):
        assert classify(representative(n, sign)) == NonHaarNull(n, sign)

    @given(pl_maps(), pl_maps())
    def test_conjugation_invariance(self, f, h):
        assert classify(conjugate(f, h)) == classify(f)

    @given(pl_maps())
    def test_inverse(self, f):
        label, inverse_label = classify(f), classify(invert(f))
        if isinstance(label, NonHaarNull):
            assert inverse_label == NonHaarNull(label.n, label.first_sign.flipped())
        else:
            assert inverse_label == label


class TestRepresentative:
    def test_zero_positive_above_diagonal(self):
        f = representative(0, POS)
        assert all(evaluate(f, x) > x for x in GRID)

    def test_fixed_points_evenly_spaced(self):
        fs = fix_set(representative(3, NEG))
        assert [c.lo for c in fs.components] == [F(0), F(1, 4), F(1, 2), F(3, 4), F(1)]

    def test_rejects_negative_n(self):
        with pytest.raises(PreconditionError):
            representative(-1, POS)

    def test_rejects_non_sign_letter(self):
        with pytest.raises(PreconditionError):
            representative(1, Letter.PT)


class TestConjugacy:
    def test_same_class_tents(self):
        verdict = conjugate_decision(tent_map("1/3"), tent_map("5/12"))
        assert isinstance(verdict, Conjugate)
        assert verdict.conjugator.h == identity()
        assert verdict.conjugator.checked_points

    def test_opposite_tents(self):
        verdict = conjugate_decision(tent_map("1/3"), tent_map("2/3"))
        assert isinstance(verdict, NotConjugate)
        assert verdict.report.index == 0
        assert verdict.report.reason == "letters differ"

    def test_different_lengths(self):
        verdict = conjugate_decision(representative(1, POS), representative(2, POS))
        assert isinstance(verdict, NotConjugate)
        assert verdict.report.reason == "words have different lengths"

    def test_endpoint_mismatch(self):
        f = PLMap.from_points([(0, 0), ("1/4", "1/4"), ("3/4", "1/2"), (1, 1)])
        verdict = conjugate_decision(f, tent_map("1/3"))
        assert isinstance(verdict, NotConjugate)
        assert verdict.report.reason == "endpoint components differ"
        assert verdict.report.index is None

    def test_conjugator_matches_fixed_points(self):
        f = representative(2, POS)
        k = PLMap.from_points([(0, 0), ("1/2", "1/5"), (1, 1)])
        g = conjugate(f, k)
        h = build_conjugator(f, g).h
        for c_f, c_g in zip(fix_set(f).components, fix_set(g).components):
            assert evaluate(h, c_f.lo) == c_g.lo

    def test_build_rejects_different_words(self):
        with pytest.raises(PreconditionError):
            build_conjugator(tent_map("1/3"), tent_map("2/3"))

    @given(pl_maps(), pl_maps())
    def test_conjugates_are_recognized(self, f, h):
        assert isinstance(conjugate_decision(f, conjugate(f, h)), Conjugate)

    @given(pl_maps(), pl_maps())
    def test_verdict_follows_sign_words(self, f, g):
        verdict = conjugate_decision(f, g)
        assert isinstance(verdict, Conjugate) == (sign_word(f) == sign_word(g))

    @given(st.integers(0, 5), st.sampled_from([POS, NEG]), pl_maps())
    def test_every_class_conjugate_to_representative(self, n, sign, h):
        f = representative(n, sign)
        assert isinstance(conjugate_decision(f, conjugate(f, h)), Conjugate)

    def test_certificate_conjugate(self):
        body = certificate_json(conjugate_decision(tent_map("1/3"), tent_map("5/12")))
        assert body["verdict"] == "conjugate"
        assert body["conjugator"] == [["0/1", "0/1"], ["1/1", "1/1"]]
        assert body["word_f"] == {"word": ["-"], "endpoints": ["pt", "pt"]}

    def test_certificate_not_conjugate(self):
        body = certificate_json(conjugate_decision(tent_map("1/3"), tent_map("2/3")))
        assert body["verdict"] == "not-conjugate"
        assert body["mismatch_index"] == 0
        assert "conjugator" not in body


class TestMinorants:
    def test_below_identity(self):
        g = strict_minorant([identity()], "1/2", "1/4")
        assert evaluate(g, F(1, 2)) == F(1, 4)
        assert all(evaluate(g, x) < x for x in GRID)

    def test_below_family(self):
        family = [tent_map("3/4"), tent_map("1/3"), representative(2, POS)]
        g = strict_minorant(family, "1/2", "1/5")
        assert evaluate(g, F(1, 2)) == F(1, 5)
        for f in family:
            assert all(evaluate(g, x) < evaluate(f, x) for x in GRID)

    @pytest.mark.parametrize("x0, y0", [("1/2", "1/2"), ("1/2", "3/4"), ("0", "0"), ("1/2", "1")])
    def test_rejects(self, x0, y0):
        with pytest.raises(PreconditionError):
            strict_minorant([identity()], x0, y0)

    def test_majorant(self):
        family = [tent_map("1/3"), tent_map("2/3")]
        g = strict_majorant(family, "1/2", "7/8")
        assert evaluate(g, F(1, 2)) == F(7, 8)
        for f in family:
            assert all(evaluate(g, x) > evaluate(f, x) for x in GRID)

    @given(st.lists(pl_maps(), min_size=1, max_size=3))
    def test_random_families(self, family):
        g = strict_minorant(family, "1/2", min(evaluate(f, F(1, 2)) for f in family) / 2)
        for f in family:
            assert all(evaluate(g, x) < evaluate(f, x) for x in GRID)


class TestCrossingTranslate:
    def test_identity_family(self):
        g = crossing_translate([identity()], 1)
        assert g.breakpoints == (
            (F(0), F(0)),
            (F(1, 8), F(1, 16)),
            (F(11, 32), F(9, 16)),
            (F(25, 32), F(43, 64)),
            (F(1), F(1)),
        )
        assert len(fix_set(g).interior) == 2

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_crossings(self, n):
        family = [tent_map("1/3"), tent_map("2/3")]
        g = crossing_translate(family, n)
        for f in family:
            fs = fix_set(compose(invert(g), f))
            assert len(fs.interior) >= 2 * n
            assert all(c.lo > F(1, 8) for c in fs.interior)
            # g is a strict minorant near both endpoints
            assert fs.gap_signs[0] is POS
            assert fs.gap_signs[-1] is POS

    def test_no_crossing_translate(self):
        f = tent_map("1/3")
        g = crossing_translate([f], 0)
        assert classify(compose(invert(g), f)) == NonHaarNull(0, POS)

    def test_rejects(self):
        with pytest.raises(PreconditionError):
            crossing_translate([], 1)
        with pytest.raises(PreconditionError):
            crossing_translate([identity()], -1)


class TestDropInteriorFixedPoint:
    @pytest.mark.parametrize("sign", [POS, NEG])
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_representatives(self, n, sign):
        f = representative(n, sign)
        h, reduced = drop_interior_fixed_point(f)
        assert classify(reduced) == NonHaarNull(n - 1, sign.flipped())
        assert compose(h, reduced) == f
        survivors = {c.lo for c in fix_set(f).components[2:]}
        assert survivors <= {c.lo for c in fix_set(reduced).components}

    def test_rejects_without_interior_point(self):
        with pytest.raises(PreconditionError):
            drop_interior_fixed_point(tent_map("2/3"))
        with pytest.raises(PreconditionError):
            drop_interior_fixed_point(identity())


def test_symbolic_classes():
    classes = symbolic_classes()
    assert len(classes) == 5
    assert len(set(classes)) == 5
    assert classes[0].accumulation is Accumulation.BOTH_ENDPOINTS
    assert classes[0].describe() == "fixed points accumulate at both-endpoints"
    assert "sign +" in classes[1].describe()


CLASSES = [(n, s) for n in range(6) for s in (POS, NEG)]


def crossing_pattern(f):
    """Signs of f(x) − x at every breakpoint and piece midpoint, zeros dropped and repeats merged."""
    xs = f.xs
    samples = sorted(set(xs) | {(u + v) / 2 for u, v in zip(xs, xs[1:])})
    pattern = []
    for x in samples:
        s = (evaluate(f, x) > x) - (evaluate(f, x) < x)
        if s and (not pattern or pattern[-1] != s):
            pattern.append(s)
    return tuple(pattern)


def assert_matches_pattern(f, g):
    verdict = conjugate_decision(f, g)
    same = crossing_pattern(f) == crossing_pattern(g)
    assert isinstance(verdict, Conjugate) == same
    if same:
        h = verdict.conjugator.h
        assert verdict.conjugator.checked_points
        for x, s in verdict.conjugator.checked_points:
            hx = evaluate(h, x)
            assert (evaluate(f, x) > x) - (evaluate(f, x) < x) == s
            assert (evaluate(g, hx) > hx) - (evaluate(g, hx) < hx) == s
    else:
        assert verdict.report.reason in ("letters differ", "words have different lengths")


class TestConjugacyAgainstCrossingPattern:
    @given(st.sampled_from(CLASSES), st.sampled_from(CLASSES), pl_maps(), pl_maps())
    def test_random_pairs(self, cf, cg, h1, h2):
        assert_matches_pattern(conjugate(representative(*cf), h1), conjugate(representative(*cg), h2))

    @pytest.mark.slow
    @pytest.mark.parametrize("n, sign", CLASSES)
    def test_two_hundred_pairs_per_class(self, n, sign):
        rng = trial_rng(n * 2 + (sign is NEG))
        f0 = representative(n, sign)
        for i in range(200):
            h1, h2 = random_pl_map(rng, 6), random_pl_map(rng, 6)
            if i % 2:
                other = representative(*CLASSES[int(rng.integers(0, len(CLASSES)))])
            else:
                other = f0
            assert_matches_pattern(conjugate(f0, h1), conjugate(other, h2))
