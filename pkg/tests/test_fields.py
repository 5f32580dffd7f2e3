from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from voa.fields import (Field, FieldParseError, GeneratorDecl, GeneratorSet,
                        UnnormalizedFieldError, charge_of, derivative, grade,
                        is_pbw, monomial_field, parse_field, print_field,
                        vacuum_field, weight_of)
from voa.lab import enumerate_basis, named
from voa.scalars import ONE, parse_scalar, scalar


def test_generator_decl_validation():
    with pytest.raises(ValueError):
        GeneratorDecl("x", "evenish", Fraction(1))
    with pytest.raises(ValueError):
        GeneratorDecl("x", "even", Fraction(1, 3))
    with pytest.raises(ValueError):
        GeneratorDecl("x", "even", -1)
    with pytest.raises(ValueError):
        GeneratorSet([GeneratorDecl("x", "even", 1),
                      GeneratorDecl("x", "odd", 1)])


def test_pbw_ordering(n4):
    gens = n4.gens
    jp, jm = gens.lookup("Jp"), gens.lookup("Jm")
    qp = gens.lookup("Qp")
    assert is_pbw(gens, ((jp, 2), (jm, 0)))
    assert not is_pbw(gens, ((jm, 0), (jp, 2)))
    assert is_pbw(gens, ((jp, 1), (jp, 1)))  # even repeats allowed
    assert not is_pbw(gens, ((qp, 1), (qp, 1)))  # odd repeats forbidden
    assert is_pbw(gens, ((qp, 2), (qp, 1)))


def test_parse_examples(n4):
    u20 = parse_field("NO(d^2 Jp, Jm)", n4.gens)
    assert u20 == monomial_field(((n4.gens.lookup("Jp"), 2),
                                  (n4.gens.lookup("Jm"), 0)))
    assert parse_field("1", n4.gens) == vacuum_field()
    two_term = parse_field("(2*k+3)/(k+2) T + NO(Qp, Qm)", n4.gens)
    assert two_term.coefficient(((n4.gens.lookup("T"), 0),)) == \
        parse_scalar("(2*k+3)/(k+2)")
    assert two_term.coefficient(((n4.gens.lookup("Qp"), 0),
                                 (n4.gens.lookup("Qm"), 0))) == ONE


def test_parse_errors(n4):
    with pytest.raises(FieldParseError):
        parse_field("NO(Jp,", n4.gens)
    with pytest.raises(FieldParseError):
        parse_field("NO(Xx, Jm)", n4.gens)
    with pytest.raises(FieldParseError):
        parse_field("d^-1 Jp", n4.gens)


def test_unnormalized_needs_engine(n4):
    with pytest.raises(UnnormalizedFieldError):
        parse_field("NO(Jm, Jp)", n4.gens)
    # with the engine the same word is rewritten into PBW form
    f = parse_field("NO(Jm, Jp)", n4.gens, engine=n4)
    assert f == n4.parse("NO(Jp, Jm) - d J")


def test_print_examples(n4):
    assert print_field(vacuum_field(), n4.gens) == "1"
    u20 = n4.parse("NO(d^2 Jp, Jm)")
    assert print_field(u20, n4.gens) == "NO(d^2 Jp, Jm)"
    f = n4.parse("-1/2 d Jp")
    assert print_field(f, n4.gens) == "-1/2 d Jp"


def test_derivative_examples(n4):
    assert derivative(n4.gens, vacuum_field()).is_zero()
    j = n4.generator("J")
    assert derivative(n4.gens, j) == n4.generator("J", 1)
    du = derivative(n4.gens, named(n4, "U_0_0"))
    assert du == named(n4, "U_1_0") + named(n4, "U_0_1")


def test_derivative_adds_one_to_weight(n4):
    f = named(n4, "A_1_0")
    w = weight_of(n4.gens, f)
    assert weight_of(n4.gens, derivative(n4.gens, f)) == w + 1
    assert charge_of(n4.gens, derivative(n4.gens, f)) == charge_of(n4.gens, f)


def test_grade_examples(n4):
    u = named(n4, "U_0_0")
    assert set(grade(n4.gens, u)) == {(Fraction(2), 0)}
    sigma = named(n4, "S0p_0_0")
    assert set(grade(n4.gens, sigma)) == {(Fraction(2), 2)}
    a = named(n4, "A_0_0")
    assert set(grade(n4.gens, a)) == {(Fraction(5, 2), 0)}
    mixed = u + a
    parts = grade(n4.gens, mixed)
    assert len(parts) == 2
    total = Field()
    for p in parts.values():
        total = total + p
    assert total == mixed


@st.composite
def n4_fields(draw, ctx):
    monos = []
    for w in (1, Fraction(3, 2), 2, Fraction(5, 2)):
        monos.extend(enumerate_basis(ctx, w))
    chosen = draw(st.lists(st.sampled_from(monos), min_size=1, max_size=4))
    coeffs = draw(st.lists(
        st.builds(Fraction, st.integers(-9, 9), st.integers(1, 7)),
        min_size=len(chosen), max_size=len(chosen)))
    f = Field()
    for m, c in zip(chosen, coeffs):
        f = f + monomial_field(m).scale(scalar(c))
    return f


def test_reprint_is_canonical(n4):
    for text in ["NO(Jm, Jp)", "2 T + NO(J,J) - T", "k Qp - 1/2 d Qm",
                 "NO(J, J, U_0_0) + U_2_0"]:
        f = n4.parse(text)
        once = print_field(f, n4.gens)
        assert print_field(n4.parse(once), n4.gens) == once


def test_print_parse_roundtrip_random(n4):
    @settings(max_examples=80, deadline=None)
    @given(n4_fields(n4))
    def inner(f):
        assert parse_field(print_field(f, n4.gens), n4.gens) == f
    inner()
