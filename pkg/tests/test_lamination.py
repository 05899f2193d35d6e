from __future__ import annotations

import json
from collections import defaultdict
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cubicslice.angle import Arc, RationalAngle, circular_sorted, sigma
from cubicslice.lamination import (
    Chord,
    DegenerateGap,
    InvalidMajor,
    InvalidReason,
    MajorKind,
    NotInBasis,
    QuadGap,
    chord_image,
    classify_major,
    gap_basis_members,
    in_gap_basis,
    quadratic_argument_of_ray,
    tau,
)

from oracles import ALL_GAPS, CRITICAL_GAPS, all_angles, gap_id, make_gap, orbit_avoids, ternary_oracle

A = RationalAngle.parse


def major(a, b, h0, h1):
    return classify_major(Chord(A(a), A(b)), Arc(A(h0), A(h1)))


@pytest.fixture(scope="module")
def critical():
    return make_gap("1/3", "2/3", "1/3", "2/3")


def test_chord_image_examples():
    assert chord_image(Chord(A("1/3"), A("2/3"))) == A("0")
    assert chord_image(Chord(A("1/4"), A("3/4"))) == Chord(A("3/4"), A("1/4"))
    assert chord_image(Chord(A("7/26"), A("21/26"))) == Chord(A("21/26"), A("11/26"))


def test_chord_requires_distinct_endpoints():
    with pytest.raises(ValueError):
        Chord(A("1/3"), A("1/3"))
    assert Chord(A("2/3"), A("1/3")) == Chord(A("1/3"), A("2/3"))


def test_classify_examples():
    m = major("1/3", "2/3", "1/3", "2/3")
    assert m.kind is MajorKind.REGULAR_CRITICAL
    assert m.hole_length == Fraction(1, 3)
    m = major("7/26", "21/26", "21/26", "7/26")
    assert (m.kind, m.period, m.hole_length) == (MajorKind.PERIODIC, 3, Fraction(6, 13))
    with pytest.raises(InvalidMajor) as err:
        major("0", "1/10", "0", "1/10")
    assert err.value.reason is InvalidReason.HOLE_TOO_SHORT


def test_classify_rejections():
    with pytest.raises(InvalidMajor) as err:
        major("1/3", "2/3", "2/3", "1/3")
    assert err.value.reason is InvalidReason.HOLE_TOO_LONG
    # 1/5 is periodic but 5/9 is strictly preperiodic
    with pytest.raises(InvalidMajor) as err:
        major("1/5", "5/9", "1/5", "5/9")
    assert err.value.reason is InvalidReason.NOT_CRITICAL_NOT_PERIODIC
    with pytest.raises(ValueError):
        classify_major(Chord(A("1/3"), A("2/3")), Arc(A("0"), A("1/2")))


def test_half_length_tie_needs_explicit_hole():
    # both sides of {0,1/2} have length 1/2; the caller's choice is respected
    m1 = major("0", "1/2", "0", "1/2")
    m2 = major("0", "1/2", "1/2", "0")
    assert m1.hole != m2.hole
    assert not in_gap_basis(m1, A("1/3")) and in_gap_basis(m2, A("1/3"))


def test_basis_examples():
    m = major("1/3", "2/3", "1/3", "2/3")
    assert in_gap_basis(m, A("1/4"))
    assert not in_gap_basis(m, A("1/2"))
    assert in_gap_basis(m, A("1/3"))
    assert gap_basis_members(m, 4) == [A(x) for x in ("0", "1/4", "1/3", "2/3", "3/4")]
    assert gap_basis_members(m, 1) == [A("0")]
    p = major("7/26", "21/26", "21/26", "7/26")
    members = gap_basis_members(p, 26)
    assert {A("7/26"), A("21/26"), A("11/26")} <= set(members)


@pytest.mark.parametrize("g", ALL_GAPS, ids=gap_id)
def test_membership_matches_brute_force(g):
    m = make_gap(*g).major
    s, e = m.hole.start.fraction, m.hole.end.fraction
    for x in all_angles(60):
        assert in_gap_basis(m, RationalAngle.from_fraction(x)) == orbit_avoids(x, s, e), x


def test_critical_basis_is_ternary_cantor_set():
    m = major("1/3", "2/3", "1/3", "2/3")
    for x in all_angles(90):
        assert in_gap_basis(m, RationalAngle.from_fraction(x)) == (ternary_oracle(x) is not None)


def test_tau_examples(critical):
    assert tau(critical, A("0")) == A("0")
    assert tau(critical, A("1/4")) == A("1/3")
    assert tau(critical, A("2/3")) == A("1/2")
    assert tau(critical, A("1/3")) == A("1/2")
    assert quadratic_argument_of_ray(critical, A("3/4")) == A("2/3")
    assert quadratic_argument_of_ray(critical, A("0")) == A("0")
    with pytest.raises(NotInBasis):
        tau(critical, A("1/2"))


@pytest.mark.parametrize("g", ALL_GAPS, ids=gap_id)
def test_semiconjugacy_and_basis_invariance(g):
    gap = make_gap(*g)
    for a in gap.basis_members(81):
        image = sigma(3, a)
        assert gap.contains(image)
        assert gap.tau(image) == sigma(2, gap.tau(a))


@pytest.mark.parametrize("g", ALL_GAPS, ids=gap_id)
def test_tau_is_monotone(g):
    gap = make_gap(*g)
    pts = circular_sorted(gap.basis_members(81))
    values = [gap.tau(a).fraction for a in pts]
    descents = sum(values[i] > values[(i + 1) % len(values)] for i in range(len(values)))
    assert descents <= 1


@pytest.mark.parametrize("g", ALL_GAPS, ids=gap_id)
def test_edge_collapse_exhaustive(g):
    gap = make_gap(*g)
    fibres = defaultdict(list)
    for a in gap.basis_members(81):
        fibres[gap.tau(a)].append(a)
    edges = set(gap.edges(8))
    for pts in fibres.values():
        assert len(pts) <= 2
        if len(pts) == 2:
            assert Chord(*pts) in edges
    for e in gap.edges(4):
        assert gap.is_edge(e)
        assert gap.tau(e.a) == gap.tau(e.b)


def test_orbit_avoidance_fails_for_listed_periodic_major():
    # the image chord {11/26,21/26} separates 1/2 from the rest of the basis
    with pytest.raises(DegenerateGap) as err:
        QuadGap(major("7/26", "21/26", "21/26", "7/26"))
    assert err.value.reason == "NotQuadraticGap"


def test_critical_major_with_periodic_endpoints_rejected():
    with pytest.raises(DegenerateGap):
        QuadGap(major("1/4", "7/12", "1/4", "7/12"))


@pytest.mark.parametrize("g", CRITICAL_GAPS, ids=gap_id)
def test_critical_major_collapses_to_half_or_fixed(g):
    gap = make_gap(*g)
    c = gap.major.chord
    assert gap.tau(c.a) == gap.tau(c.b)
    assert sigma(2, gap.tau(c.a)) == gap.tau(sigma(3, c.a))


def test_tau_table_json(critical):
    data = critical.to_json(27)
    assert data["major"]["kind"] == "RegularCritical"
    assert data["basis"][0] == "0/1"
    assert ["1/4", "1/3"] in data["tau_table"]
    json.dumps(data)


hole_lengths = st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(999, 1000), max_denominator=1000)


@settings(max_examples=300)
@given(st.fractions(min_value=0, max_value=Fraction(499, 500), max_denominator=500), hole_lengths)
def test_hole_length_gate(start, length):
    a = RationalAngle.from_fraction(start)
    b = RationalAngle.from_fraction(start + length)
    if a == b:
        return
    hole = Arc(a, b)
    try:
        m = classify_major(Chord(a, b), hole)
    except InvalidMajor as exc:
        if hole.length < Fraction(1, 3):
            assert exc.reason is InvalidReason.HOLE_TOO_SHORT
        elif hole.length > Fraction(1, 2):
            assert exc.reason is InvalidReason.HOLE_TOO_LONG
        else:
            assert exc.reason is InvalidReason.NOT_CRITICAL_NOT_PERIODIC
    else:
        assert Fraction(1, 3) <= m.hole_length <= Fraction(1, 2)


def test_periodicity_matches_brute_force():
    pts = [RationalAngle.from_fraction(x) for x in all_angles(28)]
    for i, a in enumerate(pts):
        for b in pts[i + 1 :]:
            c = Chord(a, b)
            hole = Arc(a, b) if Arc(a, b).length <= Fraction(1, 2) else Arc(b, a)
            if hole.length < Fraction(1, 3):
                continue
            cur, period = c, None
            for k in range(1, 800):
                cur = chord_image(cur)
                if not isinstance(cur, Chord):
                    break
                if cur == c:
                    period = k
                    break
            try:
                m = classify_major(c, hole)
            except InvalidMajor:
                assert period is None and isinstance(chord_image(c), Chord)
                continue
            assert m.period == period
