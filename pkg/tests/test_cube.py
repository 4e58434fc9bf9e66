from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monocorr import cube
from monocorr.cube import FamilyDescriptor
from monocorr.errors import DescriptorError, DimensionError


def random_family(draw, n):
    members = draw(st.sets(st.integers(0, (1 << n) - 1)))
    return cube.make_family(n, sorted(members))


@st.composite
def families(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    return random_family(draw, n)


@st.composite
def family_pairs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    return random_family(draw, n), random_family(draw, n)


@st.composite
def increasing_families(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    w = draw(st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=n, max_size=n))
    t = draw(st.floats(-0.5, float(n), allow_nan=False))
    return cube.ltf(n, w, t)


def test_majority3_members_and_influences():
    M = cube.majority(3)
    assert M.members() == [3, 5, 6, 7]
    assert cube.influence_profile(M).per_coordinate == (Fraction(1, 2),) * 3
    assert cube.influence_profile(M).total == Fraction(3, 2)
    assert M.to_hex() == "e8"


def test_tribes_4_2():
    T = cube.tribes(4, 2)
    prof = cube.classify(T)
    assert prof.measure == Fraction(7, 16)
    assert prof.increasing and prof.regular and not prof.balanced
    assert cube.influence_profile(T).per_coordinate == (Fraction(3, 8),) * 4
    assert T.to_hex() == "88f8"


def test_majority_dictator_statistics():
    M, D = cube.majority(3), cube.dictator(3, 0)
    assert cube.covariance(M, D) == Fraction(1, 8)
    assert cube.agreement(M, D) == Fraction(3, 4)
    assert cube.w1(M, D) == Fraction(1, 2)


def test_dictator_is_zero_based():
    D = cube.dictator(3, 2)
    assert cube.influence_profile(D).per_coordinate == (0, 0, 1)
    assert D.members() == [4, 5, 6, 7]


def test_conditional_difference_equals_influence():
    # E[1_A | x_k = 1] - E[1_A | x_k = 0] = I_k for increasing A
    for F in (cube.majority(5), cube.tribes(6, 3), cube.threshold(4, 2)):
        assert cube.conditional_differences(F) == cube.influence_profile(F).per_coordinate


def test_threshold_and_ltf_agree():
    assert cube.threshold(5, 3) == cube.majority(5)
    assert cube.ltf(4, [1, 1, 1, 1], 1.5) == cube.threshold(4, 2)


def test_constant_families():
    full = cube.threshold(3, 0)
    empty = cube.threshold(3, 4)
    assert full.measure == 1 and empty.measure == 0
    assert cube.is_increasing(full) and cube.is_increasing(empty)
    assert cube.influence_profile(empty).total == 0


def test_non_monotone_detected():
    parity = cube.make_family(2, [1, 2])
    assert not cube.is_increasing(parity)


def test_dimension_limits():
    with pytest.raises(DimensionError):
        cube.majority(25)
    with pytest.raises(DimensionError):
        cube.covariance(cube.majority(3), cube.majority(5))


def test_random_monotone_is_balanced_and_seeded():
    F = cube.random_monotone(9, 4)
    assert cube.is_increasing(F)
    assert 2 * F.count == F.size
    assert F == cube.random_monotone(9, 4)


@pytest.mark.parametrize(
    "obj, message",
    [
        ({"kind": "tribes", "n": 5, "r": 2}, "tribes(n=5, r=2)"),
        ({"kind": "dictator", "n": 3, "i": 3}, "dictator(n=3, i=3)"),
        ({"kind": "nope", "n": 3}, "unknown family kind"),
        ({"kind": "ltf", "n": 2, "weights": [1.0], "t": 0.0}, "ltf(n=2)"),
        ({"kind": "majority"}, "needs 'kind' and 'n'"),
        ({"kind": "majority", "n": 40}, "majority"),
    ],
)
def test_descriptor_validation(obj, message):
    with pytest.raises(DescriptorError, match=message.replace("(", r"\(").replace(")", r"\)").replace("[", r"\[")):
        FamilyDescriptor.from_dict(obj)


def test_descriptor_round_trip():
    d = FamilyDescriptor("ltf", 3, {"weights": [1.0, 2.0, 3.0], "t": 2.5})
    assert FamilyDescriptor.from_dict(d.to_dict()) == d
    assert d.label == "ltf(n=3,w=[1,2,3],t=2.5)"
    assert FamilyDescriptor("majority", 5).label == "majority(n=5)"
    assert cube.generate(d) == cube.ltf(3, [1, 2, 3], 2.5)


@given(families())
def test_hex_round_trip(F):
    assert cube.BooleanFamily.from_hex(F.n, F.to_hex()) == F


@given(families())
def test_influence_matches_sensitivity(F):
    assert cube.influence_profile(F).per_coordinate == cube.sensitivity_profile(F)


@given(families())
def test_complement(F):
    C = F.complement()
    assert C.count == F.size - F.count
    assert cube.influence_profile(C) == cube.influence_profile(F)
    assert cube.covariance(F, C) == -F.measure * (1 - F.measure)


@given(family_pairs())
def test_covariance_symmetric_and_bounded(pair):
    F, G = pair
    c = cube.covariance(F, G)
    assert c == cube.covariance(G, F)
    assert abs(c) <= Fraction(1, 4)
    assert c.denominator & (c.denominator - 1) == 0


@settings(max_examples=60)
@given(increasing_families(), increasing_families())
def test_harris_for_random_ltfs(F, G):
    assert cube.is_increasing(F)
    if F.n == G.n:
        assert cube.covariance(F, G) >= 0


@given(increasing_families())
def test_first_level_equals_influence(F):
    assert cube.first_level_coefficients(F) == cube.influence_profile(F).per_coordinate


def test_members_are_little_endian():
    F = cube.make_family(3, [1])
    assert np.flatnonzero(F.bits).tolist() == [1]
    assert cube.influence_profile(F).per_coordinate == (Fraction(1, 4), Fraction(1, 4), Fraction(1, 4))
