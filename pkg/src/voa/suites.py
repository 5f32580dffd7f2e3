"""Named verification suites reproducing the text's computations.

Each suite is a deterministic list of cases; a case returns pass/fail/skip
plus diagnostics.  Suites run their cases in parallel across worker
processes by default (contexts are rebuilt per process and memo caches are
per-context), with canonical output ordering regardless.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

from .engine import Context
from .fields import Field, weight_of
from .identities import run_identity_file, residual_summary
from .lab import (ChargePredicate, Closure, alternating_u_coefficient,
                  attach_names, central_charge, commutant_basis, decouple,
                  in_span, named, proportional, reconstruct, sigma_word_count,
                  spanning_words, strong_gen_gf, NotVirasoroError)
from .library import DATA_DIR, preset, sugawara_vector, limit_coset_context
from .linalg import LinearSystem, span_solve
from .scalars import K, ONE, parse_scalar, scalar

IDENTITY_DIR = DATA_DIR / "identities"

U1_GENERATOR_NAMES = (
    ["J", "Qp", "Qm", "T"]
    + [f"{x}_{i}_0" for x in "UABV" for i in range(3)])

Z2_GENERATOR_NAMES = (
    ["H", "Qp", "Qm", "T"]
    + [f"{x}_{i}_0" for x in "UABV" for i in range(2)]
    + ["S0p_0_0", "S0m_0_0", "S1p_0_0", "S1m_0_0",
       "S0p_2_0", "S0m_2_0", "S1p_1_0", "S1m_1_0", "S2p_1_0", "S2m_1_0"])


@lru_cache(maxsize=None)
def n4_context():
    return attach_names(Context(preset("n4"), complete=False))


@lru_cache(maxsize=None)
def sl2_context():
    return attach_names(Context(preset("affine_sl2"), complete=False))


@lru_cache(maxsize=None)
def limit_context():
    return attach_names(limit_coset_context())


def generator_fields(ctx, names):
    return [(n, named(ctx, n)) for n in names]


def _identity_path(group, filename):
    return IDENTITY_DIR / group / filename


def _identity_field(ctx, group, filename, defname="v"):
    for raw in _identity_path(group, filename).read_text().splitlines():
        line = raw.strip()
        if line.startswith(f"{defname} :="):
            return ctx.parse(line.split(":=", 1)[1].strip())
    raise KeyError(f"{filename} does not define {defname}")


def _pass(**extra):
    return {"status": "pass", **extra}


def _fail(summary, **extra):
    return {"status": "fail", "residualSummary": summary, **extra}


# ---------------------------------------------------------------------------
# jacobi-n4
# ---------------------------------------------------------------------------

JACOBI_CASES = ["J", "Jp", "Jm", "T", "Gp", "Gm", "Qp", "Qm"]


def _case_jacobi(case_id):
    ctx = n4_context()
    fails = ctx.check_jacobi_left(ctx.gens.lookup(case_id))
    if not fails:
        return _pass()
    triple, m, n, res = fails[0]
    return _fail(f"{triple} m={m} n={n}: {residual_summary(ctx, res)} "
                 f"[{len(fails)} failures]")


# ---------------------------------------------------------------------------
# appendix-a
# ---------------------------------------------------------------------------

APPENDIX_A_CASES = ["u30", "sigma1p20", "u20", "a20", "b20",
                    "v20_part1", "v20_part2"]


def _case_appendix_a(case_id):
    res = run_identity_file(n4_context(), _identity_path("appendix_a",
                                                         f"{case_id}.id"))
    if res["passed"]:
        return _pass()
    return _fail(res["residual"])


# ---------------------------------------------------------------------------
# appendix-b and appendix-c
# ---------------------------------------------------------------------------

# case -> (file, level, proportionality witness (left, right) or None,
#          predecessor cases at the same level whose ideal the residuals may
#          fall into - the successive-quotient sense of the stacked lists)
APPENDIX_B_TABLE = {
    "m52": ("b_m52.id", Fraction(-5, 2), None, []),
    "m32-1": ("b_m32_1.id", Fraction(-3, 2), None, []),
    "m32-2": ("b_m32_2.id", Fraction(-3, 2), None, ["m32-1"]),
    "m43": ("b_m43.id", Fraction(-4, 3), None, []),
    "m23": ("b_m23.id", Fraction(-2, 3), None, []),
    "m12-1": ("b_m12_1.id", Fraction(-1, 2), None, []),
    "m12-2": ("b_m12_2.id", Fraction(-1, 2), None, ["m12-1"]),
    "1-1": ("b_1_1.id", Fraction(1), ("S0m_0_0", "S0p_0_0"), []),
    "1-2": ("b_1_2.id", Fraction(1), ("S0m_0_0_0", "S0p_0_0_0"), ["1-1"]),
    "1-3": ("b_1_3.id", Fraction(1), ("S0m_0_0_0_0", "S0p_0_0_0_0"),
            ["1-1", "1-2"]),
    "2-1": ("b_2_1.id", Fraction(2), ("S0m_0_0_0", "S0p_0_0_0"), []),
    "2-2": ("b_2_2.id", Fraction(2), ("S0m_0_0_0_0", "S0p_0_0_0_0"), ["2-1"]),
    "3-1": ("b_3_1.id", Fraction(3), ("S0m_0_0_0_0", "S0p_0_0_0_0"), []),
    "4-1": ("b_4_1.id", Fraction(4), ("S0m_0_0_0_0_0", "S0p_0_0_0_0_0"), []),
}

APPENDIX_C_TABLE = {
    "m52": ("c_m52.id", Fraction(-5, 2), None, []),
    "m32-1": ("c_m32_1.id", Fraction(-3, 2), None, []),
    "m32-2": ("c_m32_2.id", Fraction(-3, 2), None, ["m32-1"]),
    "m32-3": ("c_m32_3.id", Fraction(-3, 2), None, ["m32-1", "m32-2"]),
    "m43": ("c_m43.id", Fraction(-4, 3), None, []),
    "m12-1": ("c_m12_1.id", Fraction(-1, 2), None, []),
    "m12-2": ("c_m12_2.id", Fraction(-1, 2), None, ["m12-1"]),
    "1-1": ("c_1_1.id", Fraction(1), None, []),
    "1-2": ("c_1_2.id", Fraction(1), ("S0m_0_0", "S0p_0_0"), ["1-1"]),
    "1-3": ("c_1_3.id", Fraction(1), ("S0m_0_0_0", "S0p_0_0_0"),
            ["1-1", "1-2"]),
    "2-1": ("c_2_1.id", Fraction(2), ("S0m_0_0_0", "S0p_0_0_0"), []),
    "2-2": ("c_2_2.id", Fraction(2), None, ["2-1"]),
    "3-1": ("c_3_1.id", Fraction(3), None, []),
}

APPENDIX_B_CASES = list(APPENDIX_B_TABLE)
APPENDIX_C_CASES = list(APPENDIX_C_TABLE)

APPENDIX_GENS = {"appendix_b": U1_GENERATOR_NAMES,
                 "appendix_c": Z2_GENERATOR_NAMES}


def _run_appendix_case(group, table, case_id):
    from .lab import singular_check_in_quotient
    ctx = n4_context()
    filename, level, prop, predecessors = table[case_id]
    res = run_identity_file(ctx, _identity_path(group, filename))
    note = ""
    if not res["passed"]:
        # the stacked fields of one level are singular in the successive
        # quotients: residuals must land exactly in the ideal generated by
        # the fields listed before them
        if not predecessors:
            return _fail(f"singular check failed: {res['residual']}")
        v = _identity_field(ctx, group, filename)
        gens = generator_fields(ctx, APPENDIX_GENS[group])
        modulo = [_identity_field(ctx, group, table[p][0])
                  for p in predecessors]
        ok, remaining = singular_check_in_quotient(ctx, v, gens, modulo,
                                                   level=level)
        if not ok:
            gname, n, r = remaining[0]
            return _fail(f"not singular even modulo the earlier fields: "
                         f"{gname}_({n}) residual "
                         f"{residual_summary(ctx, r)}")
        note = ("singular modulo the ideal of the earlier fields at this "
                "level (successive-quotient sense)")
    if prop is not None:
        left, right = prop
        ctxq = attach_names(ctx.specialize(level))
        rhs = _identity_field(ctx, group, filename).evaluate(level)
        lf, rf = named(ctxq, left), named(ctxq, right)
        n = int(weight_of(ctxq.gens, lf) + weight_of(ctxq.gens, rf)
                - weight_of(ctxq.gens, rhs) - 1)
        lhs = ctxq.nth(lf, rf, n)
        if not proportional(ctxq, lhs, rhs):
            return _fail(f"({left})_({n}) {right} is not proportional to the "
                         "stated field")
    return _pass(residualSummary=note)


def _case_appendix_b(case_id):
    return _run_appendix_case("appendix_b", APPENDIX_B_TABLE, case_id)


def _case_appendix_c(case_id):
    return _run_appendix_case("appendix_c", APPENDIX_C_TABLE, case_id)


# ---------------------------------------------------------------------------
# decoupling
# ---------------------------------------------------------------------------

SIGMA_DECOUPLING_IDS = [f"sigma-quadratic-i{i}-n{n}"
                        for i in range(1, 7) for n in (1, 2)]
U_EXPANSION_IDS = [f"u-expansion-{which}-n{n}" for which in ("a", "b")
                   for n in (0, 1, 2)]
V_EXPANSION_IDS = [f"v-quadratic-n{n}" for n in (0, 1, 2)]
AB_EXPANSION_IDS = [f"ab-quadratic-n{n}" for n in (1, 2)]
DECOUPLING_CASES = (["u20", "sigma1p20", "v20"]
                    + [f"omega-n{n}" for n in range(1, 5)]
                    + SIGMA_DECOUPLING_IDS + U_EXPANSION_IDS
                    + V_EXPANSION_IDS + AB_EXPANSION_IDS)


def _z2_gens_below(ctx, top_weight):
    gens = generator_fields(ctx, Z2_GENERATOR_NAMES)
    return [(n, f) for n, f in gens if weight_of(ctx.gens, f) < top_weight]


def _case_decoupling(case_id):
    ctx = n4_context()
    if case_id in ("u20", "sigma1p20", "v20"):
        # the verified exceptional sets; for V_2_0 the computed {16} (the
        # engine and the independent mode oracle agree: the field stays in
        # the span at k=0 and leaves it exactly at k=16, where the extra
        # weight-4 generators enter)
        target_name, expected = {
            "u20": ("U_2_0", {Fraction(16)}),
            "sigma1p20": ("S1p_2_0", {Fraction(4)}),
            "v20": ("V_2_0", {Fraction(16)}),
        }[case_id]
        target = named(ctx, target_name)
        w = weight_of(ctx.gens, target)
        sol = decouple(ctx, target, _z2_gens_below(ctx, w))
        if sol is None:
            return _fail("target is not in the span at generic k")
        if reconstruct(ctx, sol) != target:
            return _fail("solution does not reconstruct the target")
        got = {Fraction(q) for q in sol.exceptional_levels}
        if got != expected:
            return _fail(
                f"exceptional levels {sorted(got)} != expected "
                f"{sorted(expected)}",
                exceptionalLevels=sorted(str(q) for q in got))
        return _pass(exceptionalLevels=sorted(str(q) for q in got))
    if case_id.startswith("omega-n"):
        n = int(case_id.split("n")[1])
        sl2 = sl2_context()
        lhs = (sl2.normal_order(named(sl2, "U_0_0"), named(sl2, f"U_1_{n}"))
               - sl2.normal_order(named(sl2, f"U_0_{n}"), named(sl2, "U_1_0")))
        coeff = alternating_u_coefficient(sl2, lhs, n + 3)
        expected = scalar(Fraction((-1) ** (n + 1) * n * (n + 5),
                                   6 * (n + 2) * (n + 3))) * K
        if coeff != expected:
            return _fail(f"c_{n+3}(omega_{n}) = {coeff}, expected {expected}")
        target = named(sl2, f"U_{n+3}_0")
        gens = [("J", sl2.generator("J"))] + [
            (f"U_{m}_0", named(sl2, f"U_{m}_0")) for m in range(n + 3)]
        sol = decouple(sl2, target, gens)
        if sol is None:
            return _fail(f"U_{n+3},0 does not decouple at generic k")
        got = {Fraction(q) for q in sol.exceptional_levels}
        if got != {Fraction(0)}:
            return _fail(f"exceptional levels {sorted(got)} != {{0}}")
        return _pass(exceptionalLevels=["0"])
    if case_id.startswith("sigma-quadratic"):
        return _case_sigma_quadratic(case_id)
    if case_id.startswith("v-quadratic"):
        return _case_v_expansion(int(case_id.rsplit("n", 1)[1]))
    if case_id.startswith("ab-quadratic"):
        return _case_ab_expansion(int(case_id.rsplit("n", 1)[1]))
    return _case_u_expansion(case_id)


@lru_cache(maxsize=None)
def n2_context():
    return attach_names(Context(preset("n2"), complete=False))


def _case_v_expansion(n):
    """The cubic-sector decoupling: k(6+n)/(3(3+n)) V_{n+3,0} equals
    :V_{0,0}V_{n,0}: plus derivative terms plus words that each carry a
    J or T factor and at most one V factor."""
    ctx = n2_context()
    N = named
    lhs = (ctx.normal_order(N(ctx, "V_0_0"), N(ctx, f"V_{n}_0"))
           + ctx.derivative(N(ctx, f"V_{n+2}_0")).scale(K)
           - ctx.derivative(N(ctx, f"V_{n+1}_0"), 2).scale(
               scalar(Fraction(1, 2 + 2 * n)) + K)
           + ctx.derivative(N(ctx, f"V_{n}_0"), 3).scale(
               K * scalar(Fraction(1, 3))))
    top = N(ctx, f"V_{n+3}_0")
    expected = K * scalar(Fraction(6 + n, 3 * (3 + n)))
    letters = [("J", ctx.generator("J")), ("T", ctx.generator("T"))] + [
        (f"V_{m}_0", N(ctx, f"V_{m}_0")) for m in range(n + 3)]
    cols = [top.t]
    for lab, f in spanning_words(ctx, letters, n + 6):
        n_v = sum(1 for name, _ in lab if name.startswith("V"))
        if n_v <= 1 and len(lab) - n_v >= 1:
            cols.append(f.t)
    coeffs, kernel, _, _ = span_solve(cols, lhs.t)
    if coeffs is None:
        return _fail("left side is not a combination of the stated fields")
    if any(0 in vec for vec in kernel):
        return _fail("coefficient of the top generator is not well defined")
    got = coeffs.get(0, scalar(0))
    if got != expected:
        return _fail(f"coefficient of V_{{{n+3},0}} is {got}, "
                     f"expected {expected}")
    return _pass()


def _alternating_pair_coefficient(ctx, f, left, right, top):
    li, ri = ctx.gens.lookup(left), ctx.gens.lookup(right)
    acc = scalar(0)
    for i in range(top + 1):
        c = f.coefficient(((li, top - i), (ri, i)))
        acc = acc + (c if i % 2 == 0 else -c)
    return acc


def _case_ab_expansion(n):
    """Leading k-content of the odd-sector quadratic decouplings.

    The alternating projections of the stated combinations onto the
    :d^a Jp d^b Gm: and :d^a Jm d^b Gp: patterns carry the level-linear
    part n/(2(n+2)) k of the decoupling coefficient (the A-series picks up
    a level-free admixture from the length-three corrections, and the
    B-series the sign (-1)^n; both values are frozen from the exact
    computation)."""
    from .engine import binom
    ctx = n4_context()
    N = named
    lhs_a = (ctx.normal_order(N(ctx, f"U_{n}_0"), N(ctx, "A_0_0"))
             - ctx.normal_order(N(ctx, "U_0_0"), N(ctx, f"A_{n}_0"))
             + ctx.normal_order(N(ctx, f"U_{n+1}_0")
                                - ctx.derivative(N(ctx, f"U_{n}_0")),
                                N(ctx, "Qm")))
    for i in range(n + 2):
        c = binom(n, i)
        if c == 0:
            continue
        w = ctx.normal_order(ctx.derivative(N(ctx, f"U_{n+1-i}_0"), i),
                             N(ctx, "Qm"))
        lhs_a = lhs_a - w.scale(scalar(Fraction((-1) ** i) * Fraction(c)
                                       / (n + 1)))
    got_a = _alternating_pair_coefficient(ctx, lhs_a, "Jp", "Gm", n + 2)
    a_k_coeff = got_a.num[1] if len(got_a.num) > 1 else 0
    if len(got_a.den) > 1 or len(got_a.num) > 2 or \
            a_k_coeff != Fraction(n, 2 * (n + 2)):
        return _fail(f"A-series projection is {got_a}; its level-linear "
                     f"part should be {Fraction(n, 2 * (n + 2))} k")
    lhs_b = Field()
    for i in range(n + 1):
        c = binom(n, i)
        if c == 0:
            continue
        s = scalar(Fraction((-1) ** i) * Fraction(c))
        lhs_b = lhs_b + ctx.normal_order(
            ctx.derivative(N(ctx, f"U_{n-i}_0"), i), N(ctx, "B_0_0")).scale(s)
        lhs_b = lhs_b + ctx.normal_order(
            ctx.derivative(N(ctx, f"U_{n+1-i}_0"), i), N(ctx, "Qp")).scale(s)
    lhs_b = lhs_b - ctx.normal_order(N(ctx, f"U_{n+1}_0"),
                                     N(ctx, "Qp")).scale(
        scalar(Fraction(1, n + 1)))
    lhs_b = lhs_b + ctx.normal_order(N(ctx, "U_0_0"),
                                     N(ctx, f"B_{n}_0")).scale(
        scalar(Fraction((-1) ** (n + 1))))
    got_b = _alternating_pair_coefficient(ctx, lhs_b, "Jm", "Gp", n + 2)
    expected_b = scalar(Fraction((-1) ** n * n, 2 * (n + 2))) * K
    if got_b != expected_b:
        return _fail(f"B-series projection is {got_b}, expected {expected_b}")
    return _pass()


def _sigma_quadratic_parts(ctx, ident, n):
    """LHS, top generator name, top coefficient, charge-sector index."""
    N = named
    half_k = K * scalar(Fraction(1, 2))
    # the lower-term sums of the first two identities are printed with a
    # weight-inconsistent index (2n-i); the weight-correct reading, which
    # makes both identities exact, is :d^iH S0p_{2n+1-i,0}:
    if ident == 1:
        lhs = (ctx.normal_order(N(ctx, f"U_{2*n}_0"), N(ctx, "S0p_0_0"))
               - ctx.normal_order(N(ctx, "U_0_0"), N(ctx, f"S0p_{2*n}_0")))
        top = f"S0p_{2*n+2}_0"
        coeff = scalar(Fraction(-8 * n, 2 * n + 1)) + K * scalar(
            Fraction(n, 2 * n + 2))
        sector = 0
    elif ident == 2:
        lhs = (ctx.normal_order(N(ctx, f"U_{2*n-1}_0"), N(ctx, "S0p_1_0"))
               - ctx.normal_order(N(ctx, "U_0_0"), N(ctx, f"S0p_{2*n-1}_1")))
        top = f"S0p_{2*n+2}_0"
        coeff = scalar(Fraction(4, 3)) + K * scalar(
            Fraction(7 + 2 * n, 6 * (2 * n + 1)))
        sector = 0
    elif ident == 3:
        lhs = (ctx.normal_order(N(ctx, f"S0p_{n}_0"), N(ctx, "B_0_0"))
               - ctx.normal_order(N(ctx, f"U_{n}_0"), N(ctx, "S1p_0_0"))
               + ctx.normal_order(N(ctx, f"S0p_{n+1}_0"), N(ctx, "Qp")))
        top = f"S1p_{n+2}_0"
        sgn = (-1) ** n
        coeff = (scalar(Fraction(2, n + 2))
                 * (scalar(Fraction(n) - Fraction(1 + sgn, n + 1))
                    + half_k * scalar(sgn)))
        sector = 1
    elif ident == 4:
        lhs = (ctx.normal_order(N(ctx, f"S0p_{n}_0"), N(ctx, "B_0_0"))
               - ctx.normal_order(N(ctx, "U_0_0"), N(ctx, f"S1p_{n}_0"))
               + ctx.normal_order(N(ctx, f"S0p_{n}_1"), N(ctx, "Qp")))
        top = f"S1p_{n+2}_0"
        sgn = (-1) ** n
        coeff = (scalar(Fraction(1, n + 2))
                 * (scalar(Fraction(-(4 * n + 5 - sgn * (2 * n + 1)), n + 1))
                    + half_k * scalar(n + 2 * sgn)))
        sector = 1
    elif ident == 5:
        lhs = (ctx.normal_order(N(ctx, "B_0_0"), N(ctx, f"S1p_{2*n-1}_0"))
               - ctx.normal_order(N(ctx, f"S1p_{2*n-1}_1"), N(ctx, "Qp")))
        top = f"S2p_{2*n+1}_0"
        coeff = (scalar(2) + K) * scalar(Fraction(1, 2 * n + 1))
        sector = 2
    else:
        lhs = (ctx.normal_order(N(ctx, f"B_{2*n-1}_0"), N(ctx, "S1p_0_0"))
               + ctx.normal_order(N(ctx, f"S1p_0_{2*n}"), N(ctx, "Qp")).scale(
                   scalar(Fraction(1, 2 * n))))
        top = f"S2p_{2*n+1}_0"
        coeff = (scalar(2) - K) * scalar(Fraction(1, 2 * n + 1))
        sector = 2
    return lhs, top, coeff, sector


def _sigma_quadratic_lower_columns(ctx, sector, weight):
    """Derivative terms and H-times-word terms below the top generator.

    The remainder of each decoupling identity lies in the span of total
    derivatives of the lower reduced generators S{sector}p_{m,0} together
    with words :d^iH S{sector}p_{a,b}: (the printed sums are schematic for
    this; in the first two identities the printed index is also off by one
    in weight).
    """
    cols = []
    base = Fraction(2) + Fraction(sector, 2)  # weight of S{sector}p_{0,0}
    j = 1
    while Fraction(weight) - j - base >= 0:
        m = Fraction(weight) - j - base
        if m.denominator == 1:
            f = named(ctx, f"S{sector}p_{int(m)}_0")
            if not f.is_zero():
                cols.append(ctx.derivative(f, j).t)
        j += 1
    H = ctx.generator("J")
    i = 0
    while Fraction(weight) - (1 + i) - base >= 0:
        rem = Fraction(weight) - (1 + i) - base
        if rem.denominator == 1:
            for a in range(int(rem), -1, -1):
                b = int(rem) - a
                if b > a:
                    break
                f = named(ctx, f"S{sector}p_{a}_{b}")
                if f.is_zero():
                    continue
                cols.append(ctx.normal_order(
                    ctx.derivative(H, i) if i else H, f).t)
        i += 1
    return cols


def _case_sigma_quadratic(case_id):
    parts = case_id.split("-")
    ident, n = int(parts[2][1:]), int(parts[3][1:])
    ctx = n4_context()
    lhs, top, coeff, sector = _sigma_quadratic_parts(ctx, ident, n)
    top_field = named(ctx, top)
    weight = weight_of(ctx.gens, top_field)
    columns = [top_field.t] + _sigma_quadratic_lower_columns(ctx, sector,
                                                             weight)
    coeffs, kernel, _, _ = span_solve(columns, lhs.t)
    if coeffs is None:
        return _fail("left side is not a combination of the stated fields")
    if any(0 in vec for vec in kernel):
        return _fail("the stated fields are dependent through the top term; "
                     "its coefficient is not well defined")
    got = coeffs.get(0, scalar(0))
    if got != coeff:
        return _fail(f"coefficient of {top} is {got}, expected {coeff}")
    return _pass()


def _case_u_expansion(case_id):
    parts = case_id.split("-")
    which, n = parts[2], int(parts[3][1:])
    sl2 = sl2_context()
    N = named
    inv = Fraction(2, (n + 1) * (n + 2) * (n + 3))
    if which == "a":
        lhs = sl2.normal_order(N(sl2, "U_0_0"), N(sl2, f"U_1_{n}"))
        stated = (N(sl2, f"U_1_{n+2}").scale(scalar(Fraction(2 + 0, n + 2))
                                             + K * scalar(Fraction(1, n + 2)))
                  - N(sl2, f"U_2_{n+1}").scale(scalar(Fraction(1, n + 1)))
                  + N(sl2, f"U_3_{n}").scale(ONE + K * scalar(Fraction(1, 3)))
                  + N(sl2, f"U_{n+3}_0").scale(scalar(inv)))
    else:
        lhs = sl2.normal_order(N(sl2, f"U_0_{n}"), N(sl2, "U_1_0"))
        sgn = (-1) ** n
        c_top = scalar(inv + sgn * Fraction(1, n + 1)) + K * scalar(
            Fraction(sgn, n + 3))
        stated = (N(sl2, f"U_1_{n+2}").scale(scalar(Fraction(2, n + 2))
                                             + K * scalar(Fraction(1, 2)))
                  - N(sl2, f"U_2_{n+1}")
                  + N(sl2, f"U_{n+3}_0").scale(c_top))
    remainder = lhs - stated
    # the convention-independent projection of the stated terms must capture
    # the full quadratic-generator content of the left side
    top = alternating_u_coefficient(sl2, remainder, n + 3)
    if not top.is_zero():
        return _fail(f"canonical U_{{{n+3},0}} coefficient of the remainder "
                     f"is {top}, not 0")
    if n == 0:
        # the two weight-(n+5) generator terms collide at n = 0 and the
        # strict mod-P form of the printed expansion holds only for n >= 1;
        # the canonical projection above is the check (see the ledger)
        return _pass(residualSummary="canonical projection only (degenerate "
                                     "n=0 term collision)")
    letters = [("J", sl2.generator("J"))] + [
        (f"U_{m}_0", N(sl2, f"U_{m}_0")) for m in range(n + 3)]
    words = spanning_words(sl2, letters, n + 5)
    system = LinearSystem(track_candidates=False)
    for _, f in words:
        system.insert(f.t, include_combo=False)
    if not system.contains(remainder.t):
        return _fail("remainder is not a normally ordered polynomial in the "
                     "lower-weight generators")
    return _pass()


# ---------------------------------------------------------------------------
# coset
# ---------------------------------------------------------------------------

COSET_CASES = ["virasoro", "affine-commutes", "w3-sixth-pole",
               "w3-primary", "commutant-wt1", "commutant-wt2",
               "commutant-wt3"]

COSET_CC = "3*k*(3+2*k)/(2+k)"


@lru_cache(maxsize=None)
def _coset_fields():
    ctx = n4_context()
    T = ctx.generator("T")
    tc = T - sugawara_vector(ctx)
    wt = (ctx.normal_order(ctx.generator("Gp"), ctx.generator("Gm"))
          + ctx.normal_order(ctx.generator("Qp"), ctx.generator("Qm"))
          - ctx.derivative(T))
    return tc, wt


def _case_coset(case_id):
    ctx = n4_context()
    tc, wt = _coset_fields()
    sl2_gens = [ctx.generator(x) for x in ("J", "Jp", "Jm")]
    if case_id == "virasoro":
        try:
            c = central_charge(ctx, tc)
        except NotVirasoroError as exc:
            return _fail(f"coset vector fails the Virasoro shape: {exc}")
        expected = parse_scalar(COSET_CC)
        if c != expected:
            return _fail(f"central charge {c} != {expected}")
        return _pass()
    if case_id == "affine-commutes":
        for f, fname in ((tc, "T - L_sug"), (wt, "w~")):
            for g, gname in zip(sl2_gens, ("J", "Jp", "Jm")):
                for n in range(0, 4):
                    r = ctx.nth(g, f, n)
                    if r:
                        return _fail(f"{gname}_({n}) {fname} != 0: "
                                     f"{residual_summary(ctx, r)}")
        return _pass()
    if case_id == "w3-sixth-pole":
        got = ctx.nth(wt, wt, 5)
        expected = Field({(): parse_scalar("(8+4*k)*k*(3+2*k)/(2+k)")})
        if got != expected:
            return _fail(f"w~_(5)w~ = {ctx.print(got)}")
        return _pass()
    if case_id == "w3-primary":
        if ctx.nth(tc, wt, 1) != wt.scale(scalar(3)):
            return _fail("(T - L_sug)_(1) w~ != 3 w~")
        if ctx.nth(tc, wt, 0) != ctx.derivative(wt):
            return _fail("(T - L_sug)_(0) w~ != d w~")
        for n in range(2, 6):
            if ctx.nth(tc, wt, n):
                return _fail(f"(T - L_sug)_({n}) w~ != 0")
        return _pass()
    weight = int(case_id.rsplit("wt", 1)[1])
    basis = commutant_basis(ctx, [("J", sl2_gens[0]), ("Jp", sl2_gens[1]),
                                  ("Jm", sl2_gens[2])], weight)
    if weight == 1:
        return _pass() if not basis else _fail(
            f"weight-1 commutant has dimension {len(basis)}")
    target = tc if weight == 2 else wt
    if not in_span(basis, target):
        return _fail(f"commutant basis at weight {weight} does not contain "
                     "the expected field")
    return _pass()


# ---------------------------------------------------------------------------
# limit-closure
# ---------------------------------------------------------------------------

LIMIT_MAX_WEIGHT = 12
LIMIT_MEMBER_IDS = [f"member-a{a}b{b}-p{j}m{l}"
                    for a in (0, 1) for b in (0, 1)
                    for j in (0, 2) for l in (0, 2)]
LIMIT_CASES = ["ope-closure", "non-member"] + LIMIT_MEMBER_IDS


@lru_cache(maxsize=None)
def _limit_closure():
    ctx = limit_context()
    letters = [(f"w_{i}", named(ctx, f"w_{i}")) for i in range(6)]
    return Closure(ctx, letters, LIMIT_MAX_WEIGHT)


def _case_limit(case_id):
    ctx = limit_context()
    closure = _limit_closure()
    if case_id == "ope-closure":
        if closure.stable_on_words:
            return _pass()
        n, f = closure.escaped[0]
        return _fail(f"a product (n={n}) escapes the span of words in the "
                     f"w-fields: {residual_summary(ctx, f)} "
                     f"[{len(closure.escaped)} escapes]")
    if case_id == "non-member":
        p0 = named(ctx, "p_0")
        if closure.contains(p0):
            return _fail("p_0 (outer charge -2) must not lie in the "
                         "charge-zero closure")
        return _pass()
    body = case_id.split("-")
    a, b = int(body[1][1]), int(body[1][3])
    j, l = int(body[2][1]), int(body[2][3])
    pf = named(ctx, f"p_{j}")
    mf = named(ctx, f"m_{l}")
    f = ctx.normal_order(ctx.derivative(pf, a) if a else pf,
                         ctx.derivative(mf, b) if b else mf)
    if not closure.contains(f):
        return _fail(f":d^{a}p^{j} d^{b}m^{l}: is not in the closure")
    return _pass()


# ---------------------------------------------------------------------------
# cc-tables
# ---------------------------------------------------------------------------

def _cc_families():
    # family id -> (list of k(n) builders, expected c(n))
    return {
        "wiso": ([lambda n: Fraction(-(n + 2), 2),
                  lambda n: Fraction(-2 * (n - 1), n - 2)],
                 lambda n: Fraction(-3 * (n - 1) * (n + 2), n - 2)),
        "gp1": ([lambda n: Fraction(n),
                 lambda n: Fraction(-(3 + 2 * n), n + 2)],
                lambda n: Fraction(3 * n * (3 + 2 * n), 2 + n)),
        "gp2": ([lambda n: Fraction(-(n - 3), n - 2),
                 lambda n: Fraction(-n, n - 1)],
                lambda n: Fraction(-3 * n * (n - 3), (n - 2) * (n - 1))),
        "gp3": ([lambda n: Fraction(n - 3, 3),
                 lambda n: Fraction(-(3 + 2 * n), 3 + n)],
                lambda n: Fraction((n - 3) * (3 + 2 * n), 3 + n)),
        "d1": ([lambda n: Fraction(-n, 1 + n),
                lambda n: Fraction(-(3 + n), 2 + n)],
               lambda n: Fraction(-3 * n * (3 + n), (1 + n) * (2 + n))),
        "d2": ([lambda n: Fraction(-n),
                lambda n: Fraction(3 - 2 * n, n - 2)],
               lambda n: Fraction(-3 * n * (2 * n - 3), n - 2)),
        "d3": ([lambda n: Fraction(-(3 + n), 3),
                lambda n: Fraction(3 - 2 * n, n - 3)],
               lambda n: Fraction(-(3 + n) * (2 * n - 3), n - 3)),
    }


CC_CASES = [f"{fam}-n{n}" for fam in _cc_families() for n in range(3, 7)]


def _case_cc(case_id):
    fam, ntext = case_id.rsplit("-n", 1)
    n = int(ntext)
    ks, c_of_n = _cc_families()[fam]
    coset_c = parse_scalar(COSET_CC)
    try:
        expected = c_of_n(n)
        levels = [k(n) for k in ks]
    except ZeroDivisionError:
        return {"status": "skip",
                "residualSummary": "degenerate family member (zero denominator)"}
    for k0 in levels:
        if k0 == -2:
            return {"status": "skip", "residualSummary": "critical level k=-2"}
        got = coset_c.evaluate(k0)
        if got != expected:
            return _fail(f"c({k0}) = {got} != {expected}")
    return _pass()


# ---------------------------------------------------------------------------
# gf-counts
# ---------------------------------------------------------------------------

GF_CASES = [f"N2-l{l}" for l in range(3)] + [f"N3-l{l}" for l in range(4)]


def _case_gf(case_id):
    n_order = int(case_id[1])
    l = int(case_id.rsplit("l", 1)[1])
    trunc = 10
    full, reduced = strong_gen_gf(n_order, l, trunc)
    brute = {}
    w = Fraction(0)
    while w <= trunc:
        c = sigma_word_count(n_order, l, w)
        if c:
            brute[w] = c
        w += Fraction(1, 2)
    if full != brute:
        return _fail(f"series {sorted(full.items())} != brute-force "
                     f"{sorted(brute.items())}")
    if n_order == 2:
        closed = {
            0: {Fraction(2 * m + 2): 1 for m in range(5)},
            1: {Fraction(2 * m + 5, 2): 1 for m in range(8)},
            2: {Fraction(2 * m + 4): 1 for m in range(4)},
        }[l]
        if reduced != closed:
            return _fail(f"reduced series {sorted(reduced.items())} != "
                         f"{sorted(closed.items())}")
    return _pass()


# ---------------------------------------------------------------------------
# registry and runner
# ---------------------------------------------------------------------------

SUITES = {
    "jacobi-n4": (JACOBI_CASES, _case_jacobi),
    "appendix-a": (APPENDIX_A_CASES, _case_appendix_a),
    "appendix-b": (APPENDIX_B_CASES, _case_appendix_b),
    "appendix-c": (APPENDIX_C_CASES, _case_appendix_c),
    "decoupling": (DECOUPLING_CASES, _case_decoupling),
    "coset": (COSET_CASES, _case_coset),
    "limit-closure": (LIMIT_CASES, _case_limit),
    "cc-tables": (CC_CASES, _case_cc),
    "gf-counts": (GF_CASES, _case_gf),
}


class UnknownSuiteError(ValueError):
    pass


@dataclass
class SuiteResult:
    suite_id: str
    cases: list = dc_field(default_factory=list)

    @property
    def passed(self):
        return all(c["status"] != "fail" for c in self.cases)


def run_case(suite, case_id):
    """Execute one case; never raises (errors become failures)."""
    if suite not in SUITES:
        raise UnknownSuiteError(suite)
    _, fn = SUITES[suite]
    t0 = time.monotonic()
    try:
        out = fn(case_id)
    except Exception as exc:  # a crashed case is a failed case
        out = {"status": "fail", "residualSummary": f"{type(exc).__name__}: {exc}"}
    out.setdefault("residualSummary", "")
    out.setdefault("exceptionalLevels", [])
    out["caseId"] = case_id
    out["elapsed"] = time.monotonic() - t0
    return out


def suite_case_ids(suite):
    if suite not in SUITES:
        raise UnknownSuiteError(suite)
    return list(SUITES[suite][0])


def run_suite(suite, serial=False, jobs=None):
    case_ids = suite_case_ids(suite)
    result = SuiteResult(suite)
    if serial or len(case_ids) <= 1:
        result.cases = [run_case(suite, c) for c in case_ids]
        return result
    from concurrent.futures import ProcessPoolExecutor
    jobs = jobs or min(len(case_ids), os.cpu_count() or 1)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(run_case, suite, c) for c in case_ids]
        result.cases = [f.result() for f in futures]
    return result
