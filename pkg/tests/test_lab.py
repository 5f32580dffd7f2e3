from fractions import Fraction

import pytest

from voa.fields import Field, monomial_field
from voa.lab import (ChargePredicate, Closure, alternating_u_coefficient,
                     central_charge, commutant_basis, decouple,
                     enumerate_basis, in_span, named, proportional,
                     reconstruct, sigma_word_count, singular_check,
                     singular_search, strong_gen_gf, verify_identity,
                     NotVirasoroError, graded_ideal_span)
from voa.library import limit_coset_context, sugawara_vector
from voa.lab import attach_names
from voa.scalars import K, ONE, parse_scalar, scalar


def brute_force_counts(ctx, max_weight):
    """Independent (weight, charge) dimension counts via generating-function
    convolution over single-generator towers."""
    from collections import Counter
    counts = Counter({(Fraction(0), 0): 1})
    for i, decl in enumerate(ctx.gens.decls):
        tower = Counter({(Fraction(0), 0): 1})
        if decl.parity == "odd":
            # distinct derivative orders: subsets of {0, 1, 2, ...}
            def extend(tower, d):
                out = Counter(tower)
                w = decl.weight + d
                for (ww, qq), c in tower.items():
                    if ww + w <= max_weight:
                        out[(ww + w, qq + decl.charge)] += c
                return out
            d = 0
            while decl.weight + d <= max_weight:
                tower = extend(tower, d)
                d += 1
        else:
            # unlimited multiplicity per derivative order
            d = 0
            while decl.weight + d <= max_weight:
                w = decl.weight + d
                out = Counter()
                for (ww, qq), c in tower.items():
                    m = 0
                    while ww + m * w <= max_weight:
                        out[(ww + m * w, qq + m * decl.charge)] += c
                        m += 1
                tower = out
                d += 1
        out = Counter()
        for (w1, q1), c1 in counts.items():
            for (w2, q2), c2 in tower.items():
                if w1 + w2 <= max_weight:
                    out[(w1 + w2, q1 + q2)] += c1 * c2
        counts = out
    return counts


def test_enumerate_examples(sl2):
    assert len(enumerate_basis(sl2, 1)) == 3
    wt2_q0 = enumerate_basis(sl2, 2, ChargePredicate.exact(0))
    assert len(wt2_q0) == 3
    texts = {sl2.print(monomial_field(m)) for m in wt2_q0}
    assert texts == {"d J", "NO(J, J)", "NO(Jp, Jm)"}
    # weight 0 is the vacuum alone
    assert enumerate_basis(sl2, 0) == [()]
    assert enumerate_basis(sl2, 0, include_vacuum=False) == []


def test_enumerate_counts_match_brute_force(n4):
    counts = brute_force_counts(n4, 6)
    w = Fraction(0)
    while w <= 6:
        for q in range(-8, 9):
            got = len(enumerate_basis(n4, w, ChargePredicate.exact(q)))
            assert got == counts.get((w, q), 0), (w, q)
        w += Fraction(1, 2)


def test_charge_predicates():
    p = ChargePredicate.exact(0)
    assert p.accepts(0) and not p.accepts(2)
    m = ChargePredicate.modulo(2, 0)
    assert m.accepts(0) and m.accepts(2) and m.accepts(-4)
    assert not m.accepts(1)
    with pytest.raises(ValueError):
        ChargePredicate.modulo(0)


def test_strong_gen_gf_examples():
    for l, expected in [(0, {Fraction(2 * n + 2): 1 for n in range(5)}),
                        (1, {Fraction(2 * n + 5, 2): 1 for n in range(8)}),
                        (2, {Fraction(2 * n + 4): 1 for n in range(4)})]:
        full, reduced = strong_gen_gf(2, l, 10)
        assert reduced == expected
        w = Fraction(0)
        while w <= 10:
            assert full.get(w, 0) == sigma_word_count(2, l, w)
            w += Fraction(1, 2)


def test_strong_gen_gf_n3_brute_force():
    for l in range(4):
        full, _ = strong_gen_gf(3, l, 10)
        w = Fraction(0)
        while w <= 10:
            assert full.get(w, 0) == sigma_word_count(3, l, w), (l, w)
            w += Fraction(1, 2)


def test_decouple_u40(sl2):
    target = named(sl2, "U_4_0")
    gens = [("J", sl2.generator("J"))] + \
        [(f"U_{m}_0", named(sl2, f"U_{m}_0")) for m in range(4)]
    sol = decouple(sl2, target, gens)
    assert sol is not None
    assert reconstruct(sl2, sol) == target
    assert {Fraction(q) for q in sol.exceptional_levels} == {Fraction(0)}


def test_decouple_rejects_inhomogeneous(sl2):
    bad = sl2.generator("J") + named(sl2, "U_0_0")
    with pytest.raises(ValueError):
        decouple(sl2, bad, [("J", sl2.generator("J"))])


def test_omega_coefficient_formula(sl2):
    for n in (1, 2):
        omega = (sl2.normal_order(named(sl2, "U_0_0"), named(sl2, f"U_1_{n}"))
                 - sl2.normal_order(named(sl2, f"U_0_{n}"),
                                    named(sl2, "U_1_0")))
        expected = scalar(Fraction((-1) ** (n + 1) * n * (n + 5),
                                   6 * (n + 2) * (n + 3))) * K
        assert alternating_u_coefficient(sl2, omega, n + 3) == expected


def test_verify_identity(n4):
    ok, residual = verify_identity(n4, "1 - 1")
    assert ok and residual.is_zero()
    ok, residual = verify_identity(n4, "NO(J, J) - NO(J, J) + k T - k T")
    assert ok


def test_singular_check_examples(n4):
    gens = [(x, named(n4, x)) for x in
            ["J", "Qp", "Qm", "T"] + [f"{c}_{i}_0" for c in "UABV"
                                      for i in range(3)]]
    v = n4.parse("4 U_0_0 - 2 T - 2 d J + NO(J, J)")
    ok, _ = singular_check(n4, v, gens, level=Fraction(-3, 2))
    assert ok
    ok, fails = singular_check(n4, v, gens, level=Fraction(2))
    assert not ok and fails
    # symbolic k: :JpJp: is not singular against the charge-graded set; the
    # detecting residual is (Jm)_(1) :JpJp: = 2(k-1) Jp
    z2 = gens[:4] + [(x, named(n4, x)) for x in
                     ("S0p_0_0", "S0m_0_0", "S1p_0_0", "S1m_0_0")]
    ok, fails = singular_check(n4, named(n4, "S0p_0_0"), z2)
    assert not ok
    assert n4.nth(n4.generator("Jm"), named(n4, "S0p_0_0"), 1) == \
        n4.generator("Jp").scale(scalar(2) * (K - ONE))
    ok, _ = singular_check(n4, named(n4, "S0p_0_0"), z2, level=Fraction(1))
    assert ok


def test_singular_search_weight2(n4):
    gens = [(x, named(n4, x)) for x in
            ["J", "Qp", "Qm", "T"] + [f"{c}_{i}_0" for c in "UABV"
                                      for i in range(3)]]
    report = singular_search(n4, 2, ChargePredicate.exact(0), gens)
    assert not report.generic_basis
    assert Fraction(-3, 2) in report.exceptional_levels
    expected = n4.parse("4 U_0_0 - 2 T - 2 d J + NO(J, J)")
    ctxq = n4.specialize(Fraction(-3, 2))
    assert any(proportional(ctxq, w, expected)
               for w in report.exceptional_levels[Fraction(-3, 2)])


def test_singular_search_weight0(n4):
    gens = [("J", n4.generator("J"))]
    report = singular_search(n4, 0, ChargePredicate.exact(0), gens)
    assert not report.generic_basis and not report.exceptional_levels


def test_graded_ideal_span(n4):
    ctxq = n4.specialize(Fraction(-3, 2))
    v1 = n4.parse("4 U_0_0 - 2 T - 2 d J + NO(J, J)").evaluate(Fraction(-3, 2))
    span = graded_ideal_span(ctxq, [v1], Fraction(3))
    # dJ-image of the singular field lies in its own ideal
    dv = ctxq.derivative(v1)
    assert in_span([Field(s.t, _raw=True) for s in span], dv)


def test_commutant_weights(n4):
    sub = [(x, n4.generator(x)) for x in ("J", "Jp", "Jm")]
    assert commutant_basis(n4, sub, 1) == []
    wt2 = commutant_basis(n4, sub, 2)
    tc = n4.generator("T") - sugawara_vector(n4)
    assert in_span(wt2, tc)
    wt3 = commutant_basis(n4, sub, 3)
    wtilde = (n4.normal_order(n4.generator("Gp"), n4.generator("Gm"))
              + n4.normal_order(n4.generator("Qp"), n4.generator("Qm"))
              - n4.derivative(n4.generator("T")))
    assert in_span(wt3, wtilde)


def test_central_charge(n4, sl2):
    assert central_charge(n4, n4.generator("T")) == parse_scalar("6*k")
    assert central_charge(sl2, sugawara_vector(sl2)) == \
        parse_scalar("3*k/(k+2)")
    tc = n4.generator("T") - sugawara_vector(n4)
    assert central_charge(n4, tc) == parse_scalar("3*k*(3+2*k)/(2+k)")
    with pytest.raises(NotVirasoroError):
        central_charge(n4, n4.generator("J"))


def test_closure_membership():
    ctx = limit_coset_context()
    attach_names(ctx)
    letters = [(f"w_{i}", named(ctx, f"w_{i}")) for i in range(6)]
    closure = Closure(ctx, letters, 9)
    assert closure.stable_on_words
    p0, m0 = named(ctx, "p_0"), named(ctx, "m_0")
    assert closure.contains(ctx.normal_order(p0, m0))
    assert not closure.contains(p0)


def test_proportional(n4):
    a = n4.parse("2 NO(J, J) + d J")
    b = n4.parse("-6 NO(J, J) - 3 d J")
    assert proportional(n4, a, b)
    assert not proportional(n4, a, n4.parse("NO(J, J)"))
    assert not proportional(n4, a, Field())
