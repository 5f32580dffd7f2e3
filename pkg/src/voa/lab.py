"""Orbifold and coset toolkit: graded basis enumeration, strong-generator
counting, the parametric decoupling solver, singular-vector checking and
search, commutants, and subalgebra closure.

All solvers work over Q(k) by parametric elimination; rational levels where
the generic answer degenerates are detected from pivot roots and then
confirmed or discarded by re-solving numerically at that level.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .fields import (Field, ODD, monomial_field, vacuum_field, weight_of,
                     charge_of, parity_of, mono_charge, mono_parity)
from .linalg import LinearSystem, span_solve, nullspace
from .scalars import ZERO, scalar


class NotVirasoroError(ValueError):
    pass


# ---------------------------------------------------------------------------
# charge predicates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChargePredicate:
    """exact(q): charge == q; modulo(N, r): charge == r mod N."""

    kind: str  # "exact" | "modulo"
    value: int
    modulus: int = 0

    @staticmethod
    def exact(q):
        return ChargePredicate("exact", q)

    @staticmethod
    def modulo(n, residue=0):
        if n < 1:
            raise ValueError("modulus must be >= 1")
        return ChargePredicate("modulo", residue, n)

    def accepts(self, charge):
        if self.kind == "exact":
            return charge == self.value
        return charge % self.modulus == self.value % self.modulus


# ---------------------------------------------------------------------------
# named composite fields
# ---------------------------------------------------------------------------

_UVAB = re.compile(r"^([UVAB])_(\d+)_(\d+)$")
_SIGMA = re.compile(r"^S(\d)([pm])((?:_\d+)+)$")
_WMP = re.compile(r"^([wmp])_(\d+)$")


class NameResolver:
    """Lazy dictionary of the named composite fields used in the text data.

    U_i_j = :d^i Jp d^j Jm:        V_a_b = :d^a Gp d^b Gm:
    A_n_m = :d^n Jp d^m Gm:        B_n_m = :d^n Jm d^m Gp:
    S{i}{p/m}_a1_..._aM = the charge +/- word with M-i J-factors and i
    G-factors at the given derivative orders; H is an alias of J; and the
    coset combinations w_j, m_j, p_j.
    """

    def __init__(self, ctx):
        self.ctx = ctx
        self.cache = {}

    def __contains__(self, name):
        return self.resolve(name) is not None

    def __getitem__(self, name):
        f = self.resolve(name)
        if f is None:
            raise KeyError(name)
        return f

    def _word(self, *factors):
        parts = [self.ctx.generator(name, d) for name, d in factors]
        return self.ctx.normal_order_word(parts)

    def resolve(self, name):
        if name in self.cache:
            return self.cache[name]
        f = self._build(name)
        if f is not None:
            self.cache[name] = f
        return f

    def _build(self, name):
        gi = self.ctx.gens.index
        if name in gi:
            return self.ctx.generator(name)
        if name == "H" and "J" in gi:
            return self.ctx.generator("J")
        m = _UVAB.match(name)
        if m:
            kind, a, b = m.group(1), int(m.group(2)), int(m.group(3))
            pair = {"U": ("Jp", "Jm"), "V": ("Gp", "Gm"),
                    "A": ("Jp", "Gm"), "B": ("Jm", "Gp")}[kind]
            if pair[0] not in gi or pair[1] not in gi:
                return None
            return self._word((pair[0], a), (pair[1], b))
        m = _SIGMA.match(name)
        if m:
            i = int(m.group(1))
            s = "p" if m.group(2) == "p" else "m"
            orders = [int(x) for x in m.group(3).split("_")[1:]]
            if i > len(orders):
                return None
            jname, gname = ("Jp", "Gp") if s == "p" else ("Jm", "Gm")
            if jname not in gi or (i > 0 and gname not in gi):
                return None
            count_j = len(orders) - i
            factors = [(jname, d) for d in orders[:count_j]]
            factors += [(gname, d) for d in orders[count_j:]]
            return self._word(*factors)
        m = _WMP.match(name)
        if m and "Gp" in gi:
            kind, j = m.group(1), int(m.group(2))
            c = self.ctx
            if kind == "w":
                return (c.normal_order(c.generator("Gp"), c.generator("Gm", j))
                        + c.normal_order(c.generator("Qp"), c.generator("Qm", j)))
            if kind == "m":
                return (c.normal_order(c.generator("Gp"), c.generator("Qp", j))
                        + c.normal_order(c.generator("Gp", j), c.generator("Qp")))
            return (c.normal_order(c.generator("Gm"), c.generator("Qm", j))
                    + c.normal_order(c.generator("Gm", j), c.generator("Qm")))
        return None


def attach_names(ctx):
    if not isinstance(getattr(ctx, "names", None), NameResolver):
        ctx.names = NameResolver(ctx)
    return ctx


def named(ctx, name):
    if not isinstance(getattr(ctx, "names", None), NameResolver):
        attach_names(ctx)
    return ctx.names[name]


def verify_identity(ctx, expr):
    """Normalize an expression asserted to vanish; (passed, residual)."""
    f = ctx.parse(expr) if isinstance(expr, str) else expr
    return f.is_zero(), f


# ---------------------------------------------------------------------------
# graded basis enumeration
# ---------------------------------------------------------------------------

def pbw_monomials(gens, weight):
    """All PBW monomials of the exact weight, deterministically ordered."""
    weight = Fraction(weight)
    out = []

    def per_gen(gi, remaining, acc):
        if gi == len(gens):
            if remaining == 0:
                out.append(tuple(acc))
            return
        per_factor(gi, None, remaining, acc)

    def per_factor(gi, maxd, remaining, acc):
        # either stop using generator gi, or append one more factor (gi, d)
        per_gen(gi + 1, remaining, acc)
        w = gens.weights[gi]
        odd = gens.parities[gi] == ODD
        top = remaining - w
        if top < 0:
            return
        top = math.floor(top)
        if maxd is not None:
            top = min(top, maxd - 1 if odd else maxd)
        for d in range(top, -1, -1):
            per_factor(gi, d, remaining - w - d, acc + [(gi, d)])

    per_gen(0, weight, [])
    return out


def enumerate_basis(ctx, weight, pred=None, parity=None, include_vacuum=True):
    """PBW monomials of the given weight filtered by charge predicate.

    The list is complete, duplicate-free, and deterministically ordered.
    """
    gens = ctx.gens
    out = []
    for m in pbw_monomials(gens, weight):
        if not include_vacuum and not m:
            continue
        if pred is not None and not pred.accepts(mono_charge(gens, m)):
            continue
        if parity is not None and mono_parity(gens, m) != parity:
            continue
        out.append(m)
    return out


# ---------------------------------------------------------------------------
# normally ordered words in composite generators
# ---------------------------------------------------------------------------

def spanning_words(ctx, letters, weight):
    """All normally ordered words in the given fields and their derivatives
    of the exact total weight.

    letters: list of (name, Field) with homogeneous fields.  Words are
    right-nested in letter order with derivative orders descending within a
    letter; repeated odd letters must have distinct orders.  Returns a list
    of (label, Field) where the label is the factor tuple
    ((name, deriv), ...); duplicates in the expanded fields are eliminated
    later by the linear algebra.
    """
    info = []
    gens = ctx.gens
    for name, f in letters:
        w = weight_of(gens, f)
        if w is None:
            raise ValueError(f"zero letter {name}")

        info.append((name, f, w, parity_of(gens, f)))
    weight = Fraction(weight)
    shapes = []

    def per_letter(li, remaining, acc):
        if li == len(info):
            if remaining == 0 and acc:
                shapes.append(tuple(acc))
            return
        per_factor(li, None, remaining, acc)

    def per_factor(li, maxd, remaining, acc):
        per_letter(li + 1, remaining, acc)
        _, _, w, p = info[li]
        top = remaining - w
        if top < 0:
            return
        top = math.floor(top)
        if maxd is not None:
            top = min(top, maxd - 1 if p == ODD else maxd)
        for d in range(top, -1, -1):
            per_factor(li, d, remaining - w - d, acc + [(li, d)])

    per_letter(0, weight, [])
    out = []
    for shape in shapes:
        parts = []
        label = []
        for li, d in shape:
            name, f, _, _ = info[li]
            label.append((name, d))
            parts.append(ctx.derivative(f, d) if d else f)
        out.append((tuple(label), ctx.normal_order_word(parts)))
    return out


def word_label_text(label):
    def one(name, d):
        if d == 0:
            return name
        if d == 1:
            return f"d {name}"
        return f"d^{d} {name}"

    if len(label) == 1:
        return one(*label[0])
    return "NO(" + ", ".join(one(n, d) for n, d in label) + ")"


# ---------------------------------------------------------------------------
# decoupling solver
# ---------------------------------------------------------------------------

@dataclass
class DecouplingSolution:
    coefficients: dict  # word label -> LevelScalar
    exceptional_levels: set
    residual_factors: list
    words: dict  # word label -> expanded Field


def decouple(ctx, target, gens, level=None):
    """Write target as a normally ordered polynomial in lower-weight fields.

    gens: list of (name, Field) homogeneous of weight < weight(target);
    their derivatives enter implicitly.  With level=None the system is
    solved over Q(k): the return value is None when the target is not in
    the span at generic k, else a DecouplingSolution whose exceptional
    levels are the rational k where the numeric re-solve fails.  With a
    rational level the solve happens over Q in the specialized algebra.
    """
    w = weight_of(ctx.gens, target)
    if w is None:
        raise ValueError("zero target")
    for name, g in gens:
        gw = weight_of(ctx.gens, g)  # raises on inhomogeneous input
        if gw is None or gw >= w:
            raise ValueError(f"generator {name} does not have weight < {w}")
    if level is not None:
        ctxq = ctx.specialize(level) if ctx.spec.level is None else ctx
        gensq = [(n, g.evaluate(level)) for n, g in gens]
        words = spanning_words(ctxq, gensq, w)
        coeffs, _, _, _ = span_solve([f.t for _, f in words],
                                     target.evaluate(level).t)
        if coeffs is None:
            return None
        labels = [lab for lab, _ in words]
        return DecouplingSolution({labels[i]: c for i, c in coeffs.items()},
                                  set(), [], dict(words))
    words = spanning_words(ctx, gens, w)
    labels = [lab for lab, _ in words]
    coeffs, _, candidates, residual_factors = span_solve(
        [f.t for _, f in words], target.t)
    if coeffs is None:
        return None
    exceptional = set()
    for q in sorted(candidates):
        if decouple(ctx, target, gens, level=q) is None:
            exceptional.add(q)
    return DecouplingSolution({labels[i]: c for i, c in coeffs.items()},
                              exceptional, residual_factors, dict(words))


def reconstruct(ctx, solution):
    """Substitute a DecouplingSolution back; the result should equal the
    target."""
    acc = Field()
    for label, c in solution.coefficients.items():
        acc = acc + solution.words[label].scale(c)
    return acc


# ---------------------------------------------------------------------------
# singular fields
# ---------------------------------------------------------------------------

def lowering_modes(gens, g, v_weight):
    """All integer n whose n-th product with g strictly lowers the weight."""
    w = weight_of(gens, g)
    n_min = math.floor(w - 1) + 1
    n_max = math.floor(w + v_weight - 1)
    return range(n_min, n_max + 1)


def singular_check(ctx, v, gens_list, level=None):
    """True iff every weight-lowering mode of every generator kills v.

    gens_list: list of (name, Field).  With level given, everything is
    specialized first.  Returns (ok, failures) with failing
    (name, n, residual) triples.
    """
    if level is not None and ctx.spec.level is None:
        ctx = ctx.specialize(level)
        v = v.evaluate(level)
        gens_list = [(n, g.evaluate(level)) for n, g in gens_list]
    wv = weight_of(ctx.gens, v)
    failures = []
    for name, g in gens_list:
        for n in lowering_modes(ctx.gens, g, wv):
            r = ctx.nth(g, v, n)
            if r:
                failures.append((name, n, r))
    return not failures, failures


@dataclass
class SingularReport:
    weight: Fraction
    generic_basis: list  # Fields singular at symbolic k
    exceptional_levels: dict  # level -> list of witness Fields
    candidates: set = dc_field(default_factory=set)


def _mode_columns(ctx, basis, gens_list, lowering_only, v_weight):
    cols = [dict() for _ in basis]
    for bi, (name, g) in enumerate(gens_list):
        wg = weight_of(ctx.gens, g)
        if lowering_only:
            modes = lowering_modes(ctx.gens, g, v_weight)
        else:
            modes = range(0, math.floor(wg + v_weight - 1) + 1)
        for n in modes:
            for ci, m in enumerate(basis):
                f = ctx.nth(g, monomial_field(m), n)
                for mono, c in f.t.items():
                    cols[ci][(bi, n, mono)] = c
    return cols


def singular_search(ctx, weight, pred, gens_list):
    """Level-dependent basis of singular fields at a fixed weight.

    Solves 'all weight-lowering modes of the generators annihilate v' over
    the graded monomial basis, parametrically in k; rational levels where
    the solution space jumps are confirmed by numeric re-solve and each
    witness is re-verified through singular_check.
    """
    weight = Fraction(weight)
    basis = enumerate_basis(ctx, weight, pred, include_vacuum=False)
    if not basis:
        return SingularReport(weight, [], {})
    cols = _mode_columns(ctx, basis, gens_list, True, weight)
    kernel, candidates = nullspace(cols)
    generic = [Field({basis[i]: c for i, c in vec.items()}) for vec in kernel]
    exceptional = {}
    for q in sorted(candidates):
        ctxq = ctx.specialize(q)
        gensq = [(n, g.evaluate(q)) for n, g in gens_list]
        colsq = _mode_columns(ctxq, basis, gensq, True, weight)
        kq, _ = nullspace(colsq)
        if len(kq) > len(kernel):
            witnesses = []
            for vec in kq:
                wfield = Field({basis[i]: c for i, c in vec.items()})
                ok, _ = singular_check(ctxq, wfield, gensq)
                if ok:
                    witnesses.append(wfield)
            if witnesses:
                exceptional[q] = witnesses
    return SingularReport(weight, generic, exceptional, candidates)


def proportional(ctx, a, b):
    """True iff the two fields are linearly dependent and both nonzero."""
    if a.is_zero() or b.is_zero():
        return False
    kernel, _ = nullspace([a.t, b.t])
    return len(kernel) == 1


def graded_ideal_span(ctx, fields, weight, sector=None, extra_modes=2):
    """A spanning set of the weight-graded piece of the ideal generated by
    the given singular fields.

    The ideal generated by s is span{ m_(n) s } over basis monomials m (the
    single-application span is already an ideal by the commutator and
    iterate identities); products with n <= -2 are covered by the n = -1
    applications of derivative-decorated monomials.  The n-range is
    truncated a little above the generators' weights, which is sound for
    membership tests (the span only grows with the bound).  sector, when
    given, restricts to applications landing in one (charge, parity) slot.
    """
    weight = Fraction(weight)
    gens = ctx.gens
    out = []
    for s in fields:
        ws = weight_of(gens, s)
        try:
            qs = charge_of(gens, s)
            ps = parity_of(gens, s)
        except ValueError:
            qs = ps = None
        top = math.floor(2 * ws) + extra_modes
        for j in range(top + 1):
            wm = weight - ws + j
            if wm < 0:
                continue
            for m in pbw_monomials(gens, wm):
                if sector is not None and qs is not None:
                    if (mono_charge(gens, m) + qs,
                            (mono_parity(gens, m) + ps) % 2) != sector:
                        continue
                f = ctx.nth(monomial_field(m), s, j - 1)
                if f:
                    out.append(f)
    return out


def singular_check_in_quotient(ctx, v, gens_list, modulo, level=None):
    """singular_check up to the ideal generated by the given fields.

    True iff every weight-lowering residual lies in the graded ideal span
    of `modulo` (exact linear containment); this is the sense in which the
    stacked singular fields of a successive simple-quotient construction
    are singular.
    """
    if level is not None and ctx.spec.level is None:
        ctx = ctx.specialize(level)
        v = v.evaluate(level)
        gens_list = [(n, g.evaluate(level)) for n, g in gens_list]
        modulo = [s.evaluate(level) for s in modulo]
    ok, failures = singular_check(ctx, v, gens_list)
    if ok:
        return True, []
    spans = {}
    remaining = []
    for name, n, r in failures:
        w = weight_of(ctx.gens, r)
        sector = (charge_of(ctx.gens, r), parity_of(ctx.gens, r))
        key = (w, sector)
        if key not in spans:
            sys = LinearSystem(track_candidates=False)
            for f in graded_ideal_span(ctx, modulo, w, sector):
                sys.insert(f.t, include_combo=False)
            spans[key] = sys
        if not spans[key].contains(r.t):
            remaining.append((name, n, r))
    return not remaining, remaining


# ---------------------------------------------------------------------------
# commutants
# ---------------------------------------------------------------------------

def commutant_basis(ctx, subgens, weight, pred=None):
    """Basis of weight-w fields killed by all nonnegative modes of subgens."""
    weight = Fraction(weight)
    basis = enumerate_basis(ctx, weight, pred, include_vacuum=False)
    if not basis:
        return []
    cols = _mode_columns(ctx, basis, subgens, False, weight)
    kernel, _ = nullspace(cols)
    return [Field({basis[i]: c for i, c in vec.items()}) for vec in kernel]


def in_span(fields, target):
    """True iff target lies in the linear span of the given fields."""
    sys = LinearSystem(track_candidates=False)
    for f in fields:
        sys.insert(f.t, include_combo=False)
    return sys.contains(target.t)


# ---------------------------------------------------------------------------
# subalgebra closure
# ---------------------------------------------------------------------------

class Closure:
    """Weight-truncated span of the subalgebra generated by the given fields.

    The span starts from all normally ordered words in the generators and
    their derivatives, then absorbs generator products a_(n)b until stable.
    Membership is a graded linear solve.
    """

    def __init__(self, ctx, gens_list, max_weight):
        self.ctx = ctx
        self.max_weight = Fraction(max_weight)
        self.gens_list = list(gens_list)
        self.systems = {}
        self.dims = {}
        self.escaped = []  # products that fell outside the word span
        self._build()

    def _try_add(self, f):
        w = weight_of(self.ctx.gens, f)
        if w is None:
            return False
        sys = self.systems.setdefault(w, LinearSystem(track_candidates=False))
        if sys.insert(f.t, include_combo=False) is None:
            self.dims[w] = self.dims.get(w, 0) + 1
            return True
        return False

    def _build(self):
        words = []
        top = self.max_weight
        w = Fraction(0)
        while w <= top:
            words.extend(spanning_words(self.ctx, self.gens_list, w))
            w += Fraction(1, 2)
        self.word_count = len(words)
        self._try_add(vacuum_field())  # the subalgebra contains the vacuum
        for _, f in words:
            self._try_add(f)
        # absorb generator x generator products; anything new is an escape
        # from the word span (the strong-generation test) and is iterated
        pending = [f for _, f in self.gens_list]
        elements = [f for _, f in self.gens_list]
        gens = self.ctx.gens
        while pending:
            nxt = []
            for a in pending:
                for b in elements:
                    wa, wb = weight_of(gens, a), weight_of(gens, b)
                    n_lo = math.ceil(wa + wb - self.max_weight - 1)
                    n_lo = max(-1, n_lo)
                    for n in range(n_lo, math.floor(wa + wb - 1) + 1):
                        f = self.ctx.nth(a, b, n)
                        if f and self._try_add(f):
                            self.escaped.append((n, f))
                            nxt.append(f)
            for f in nxt:
                elements.append(f)
            pending = nxt
        self.stable_on_words = not self.escaped

    def contains(self, f):
        if f.is_zero():
            return True
        w = weight_of(self.ctx.gens, f)
        sys = self.systems.get(w)
        return bool(sys) and sys.contains(f.t)


def subalgebra_closure(ctx, gens_list, max_weight):
    return Closure(ctx, gens_list, max_weight)


# ---------------------------------------------------------------------------
# central charge
# ---------------------------------------------------------------------------

def central_charge(ctx, L):
    """2 x (coefficient of the vacuum in L_(3)L), after shape validation."""
    l3 = ctx.nth(L, L, 3)
    if any(m for m in l3.t if m):
        raise NotVirasoroError("L_(3)L is not a multiple of the vacuum")
    if ctx.nth(L, L, 2):
        raise NotVirasoroError("L_(2)L != 0")
    if ctx.nth(L, L, 1) != L.scale(scalar(2)):
        raise NotVirasoroError("L_(1)L != 2L")
    return l3.coefficient(()) * scalar(2)


# ---------------------------------------------------------------------------
# strong-generator counting
# ---------------------------------------------------------------------------

def strong_gen_gf(n_order, l, trunc):
    """Weight-series coefficients of the charge-sector generating function
    q^(N + l^2/2) / prod_{i<=N-l}(1-q^i) / prod_{j<=l}(1-q^j), plus the
    (1-q)-reduced series that drops total derivatives.

    Returns (series, reduced): dicts weight -> count for weights <= trunc.
    """
    if not 0 <= l <= n_order:
        raise ValueError("need 0 <= l <= N")
    shift = Fraction(n_order) + Fraction(l * l, 2)
    budget = math.floor(Fraction(trunc) - shift)
    if budget < 0:
        return {}, {}
    series = {0: 1}
    for i in list(range(1, n_order - l + 1)) + list(range(1, l + 1)):
        geom = {e: 1 for e in range(0, budget + 1, i)}
        series = _series_mul(series, geom, budget)
    full = {shift + e: c for e, c in series.items()}
    reduced = {}
    for e, c in series.items():
        r = c - series.get(e - 1, 0)
        if r:
            reduced[shift + e] = r
    return full, reduced


def _series_mul(a, b, budget):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            if e <= budget:
                out[e] = out.get(e, 0) + ca * cb
    return out


def _partitions_at_most(n, parts):
    """Partitions of n into at most `parts` positive parts."""
    if n == 0:
        return 1
    if parts == 0:
        return 0
    count = 0
    def rec(remaining, max_part, slots):
        nonlocal count
        if remaining == 0:
            count += 1
            return
        if slots == 0:
            return
        for p in range(min(remaining, max_part), 0, -1):
            rec(remaining - p, p, slots - 1)
    rec(n, n, parts)
    return count


def _partitions_distinct(n, parts):
    """Partitions of n into exactly `parts` distinct positive parts."""
    count = 0
    def rec(remaining, max_part, slots):
        nonlocal count
        if slots == 0:
            if remaining == 0:
                count += 1
            return
        for p in range(min(remaining, max_part), 0, -1):
            rec(remaining - p, p - 1, slots - 1)
    rec(n, n, parts)
    return count


def sigma_word_count(n_order, l, weight):
    """Brute-force count of the charge-sector words at one weight: derivative
    orders of the N-l even factors form a partition with at most N-l parts,
    and of the l odd factors a set of distinct nonnegative integers."""
    c = Fraction(weight) - n_order - Fraction(l, 2)
    if c < 0 or c.denominator != 1:
        return 0
    c = int(c)
    total = 0
    for a in range(c + 1):
        b = c - a
        even_ways = _partitions_at_most(a, n_order - l)
        odd_ways = (_partitions_distinct(b, l)
                    + (_partitions_distinct(b, l - 1) if l >= 1 else 0))
        if l == 0:
            odd_ways = 1 if b == 0 else 0
        total += even_ways * odd_ways
    return total


# ---------------------------------------------------------------------------
# canonical top coefficient of weight-(N+2) length-two fields
# ---------------------------------------------------------------------------

def alternating_u_coefficient(ctx, f, n_top):
    """sum_i (-1)^i [coefficient of :d^(N-i)Jp d^i Jm:] of a PBW field.

    For fields expressible with words of length <= 2 this is the canonical
    coefficient of the top charge-zero quadratic generator: Leibniz rewrites
    U_{a+1,b} + U_{a,b+1} are total derivatives and cancel in the
    alternating sum.
    """
    jp, jm = ctx.gens.lookup("Jp"), ctx.gens.lookup("Jm")
    acc = ZERO
    for i in range(n_top + 1):
        mono = ((jp, n_top - i), (jm, i))
        c = f.coefficient(mono)
        acc = acc + (c if i % 2 == 0 else -c)
    return acc


def max_word_length(f):
    return max((len(m) for m in f.t), default=0)
