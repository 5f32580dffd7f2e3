"""The OPE engine: n-th products, canonical normal ordering, axiom checks.

All products reduce to the generator table through four rewriting rules:

  (i)   derivative shifts     (da)_(n) b = -n a_(n-1) b
                              a_(n) db   = d(a_(n) b) + n a_(n-1) b
  (ii)  right-composite       a_(n)(v_(-1)c) resolved by the commutator
        formula a_(m)(b_(n)c) - (-1)^{p(a)p(b)} b_(n)(a_(m)c)
                              = sum_j C(m,j) (a_(j)b)_(m+n-j) c
        (the integer-mode form of the noncommutative Wick formula)
  (iii) left-composite        (u_(-1)v)_(n) c
                              = sum_j ( u_(-1-j)(v_(n+j)c)
                                        + (-1)^{p(u)p(v)} v_(n-1-j)(u_(j)c) )
  (iv)  PBW reordering        u_(-1)(h_(-1)X) = (-1)^{p(u)p(h)} h_(-1)(u_(-1)X)
                              + sum_j (-1)^j (u_(j)h)_(-2-j) X
        with repeated odd factors resolved by the half-anticommutator.

Sign conventions are pinned down by the mode-expansion oracle tests, not by
any single literature source.  Every (monomial, monomial, n) product is
memoized per context; contexts are independent and immutable once built.
"""

from __future__ import annotations

import sys
from fractions import Fraction

from .fields import (Field, ZERO_FIELD, GeneratorSet, ODD, monomial_field,
                     field_add_into, factor_key, mono_weight, mono_charge,
                     mono_parity, is_pbw, derivative as naive_derivative,
                     parse_field, print_field)
from .scalars import scalar, rat

# deep recursions arise while normal ordering long words at high weight
if sys.getrecursionlimit() < 100_000:
    sys.setrecursionlimit(100_000)


class IncompleteTableError(KeyError):
    pass


class SkewSymmetryError(ValueError):
    pass


class TableShapeError(ValueError):
    pass


def binom(m, j):
    """Binomial coefficient C(m, j) for arbitrary integer m, j >= 0."""
    if j < 0:
        return 0
    num = 1
    for i in range(j):
        num *= (m - i)
    den = 1
    for i in range(1, j + 1):
        den *= i
    return Fraction(num, den)


class AlgebraSpec:
    """A presented vertex superalgebra: generators, OPE table, conformal vector.

    The table maps an ordered generator pair (i, j) to {n: field} giving the
    n-th products for n >= 0 (pole order n+1).  Omitted n are zero; pairs must
    all be present after completion.  `level` is None for the formal level k,
    or a rational when the algebra has been specialized.
    """

    def __init__(self, name, gens, table, conformal=None, level=None):
        self.name = name
        self.gens = gens if isinstance(gens, GeneratorSet) else GeneratorSet(gens)
        self.table = table
        self.conformal = (self.gens.lookup(conformal)
                          if isinstance(conformal, str) else conformal)
        self.level = level

    def pair_products(self, i, j):
        try:
            return self.table[(i, j)]
        except KeyError:
            raise IncompleteTableError(
                f"no OPE entry for generator pair "
                f"({self.gens[i].name}, {self.gens[j].name})") from None

    def specialize(self, q):
        """The same presentation with k := q substituted everywhere."""
        q = rat(q) if isinstance(q, int) else q
        table = {pair: {n: f.evaluate(q) for n, f in poles.items()}
                 for pair, poles in self.table.items()}
        return AlgebraSpec(f"{self.name}@k={q}", self.gens, table,
                           self.conformal, level=q)


def skew_products(gens, i, j, poles):
    """Derive all n-th products b_(n)a from the a_(n)b entries via
    [b_l a] = -(-1)^{p(a)p(b)} [a_{-l-d} b]."""
    sign = -1 if (gens.parities[i] and gens.parities[j]) else 1
    if not poles:
        return {}
    nmax = max(poles)
    out = {}
    for n in range(nmax + 1):
        acc = {}
        m = 0
        while n + m <= nmax:
            entry = poles.get(n + m)
            if entry is not None and entry:
                c = scalar(rat((-1) ** (n + m), _factorial(m)))
                field_add_into(acc, naive_derivative(gens, entry, m), c)
            m += 1
        f = Field(acc, _raw=True).scale(scalar(-sign))
        if f:
            out[n] = f
    return out


def _factorial(m):
    acc = 1
    for i in range(2, m + 1):
        acc *= i
    return acc


def complete_table(spec):
    """Fill missing orientations by skew-symmetry and validate the table.

    Checks per entry: PBW form, homogeneity with weight w_l + w_r - n - 1,
    parity and charge additivity.  Both-orientation pairs are cross-checked;
    inconsistency raises SkewSymmetryError naming the pair.
    """
    gens = spec.gens
    table = {}
    for (i, j), poles in spec.table.items():
        table[(i, j)] = {n: f for n, f in poles.items() if f}
    for (i, j), poles in table.items():
        for n, f in poles.items():
            if n < 0:
                raise TableShapeError(f"negative product index {n} in table")
            _validate_entry(gens, i, j, n, f)
    seen = list(table.items())
    for (i, j), poles in seen:
        expect = skew_products(gens, i, j, poles)
        rev = (j, i)
        if rev in table and not (rev == (i, j)):
            got = table[rev]
            if got != expect:
                raise SkewSymmetryError(
                    f"pair ({gens[j].name}, {gens[i].name}) is inconsistent "
                    f"with skew-symmetry of ({gens[i].name}, {gens[j].name})")
        elif rev == (i, j):
            if poles != expect:
                raise SkewSymmetryError(
                    f"self-pair ({gens[i].name}, {gens[i].name}) violates "
                    "skew-symmetry")
        else:
            for n, f in expect.items():
                _validate_entry(gens, j, i, n, f)
            table[rev] = expect
    for i in range(len(gens)):
        for j in range(len(gens)):
            table.setdefault((i, j), {})
    return AlgebraSpec(spec.name, gens, table, spec.conformal, spec.level)


def _validate_entry(gens, i, j, n, f):
    w = gens.weights[i] + gens.weights[j] - n - 1
    p = (gens.parities[i] + gens.parities[j]) % 2
    q = gens.charges[i] + gens.charges[j]
    for m in f.t:
        if not is_pbw(gens, m):
            raise TableShapeError(
                f"table entry ({gens[i].name},{gens[j].name})[{n}] contains "
                f"a non-PBW monomial {m}")
        if mono_weight(gens, m) != w:
            raise TableShapeError(
                f"table entry ({gens[i].name},{gens[j].name})[{n}] has weight "
                f"{mono_weight(gens, m)}, expected {w}")
        if mono_parity(gens, m) != p:
            raise TableShapeError(
                f"table entry ({gens[i].name},{gens[j].name})[{n}] has wrong "
                "parity")
        if mono_charge(gens, m) != q:
            raise TableShapeError(
                f"table entry ({gens[i].name},{gens[j].name})[{n}] has charge "
                f"{mono_charge(gens, m)}, expected {q}")


class Context:
    """An AlgebraSpec plus its memo cache; the unit of computation.

    All products are pure functions of the presentation, so independent
    contexts may run concurrently; within a context the memo table makes
    the repeated subproducts of large verifications cheap.
    """

    def __init__(self, spec, complete=True):
        self.spec = complete_table(spec) if complete else spec
        self.gens = self.spec.gens
        self._memo = {}
        self._table = self.spec.table
        self._weights = self.gens.weights
        self._parities = self.gens.parities
        self._specialized = {}
        self.names = {}  # optional named-field dictionary, filled by callers

    # -- public products -----------------------------------------------------

    def nth(self, a, b, n):
        """The n-th product of two Fields, in PBW normal form."""
        acc = {}
        for ma, ca in a.t.items():
            for mb, cb in b.t.items():
                f = self.nth_mono(ma, mb, n)
                if f:
                    field_add_into(acc, f, ca * cb)
        return Field(acc, _raw=True)

    def normal_order(self, a, b):
        """:ab: = a_(-1) b."""
        return self.nth(a, b, -1)

    def normal_order_word(self, fields):
        """Right-nested :f1 (f2 (... fr)...):."""
        out = fields[-1]
        for f in reversed(fields[:-1]):
            out = self.normal_order(f, out)
        return out

    def ope(self, a, b):
        """All nonnegative products {n: a_(n)b}, zero entries omitted."""
        nmax = -1
        for ma in a.t:
            for mb in b.t:
                bound = self._mono_w(ma) + self._mono_w(mb) - 1
                nmax = max(nmax, int(bound))
        out = {}
        for n in range(nmax + 1):
            f = self.nth(a, b, n)
            if f:
                out[n] = f
        return out

    def derivative(self, f, order=1):
        """Table-aware translation operator (handles repeated odd factors)."""
        for _ in range(order):
            acc = {}
            for m, c in f.t.items():
                field_add_into(acc, self._dmono(m), c)
            f = Field(acc, _raw=True)
        return f

    def _dmono(self, m):
        key = ("d", m)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if not m:
            out = ZERO_FIELD
        else:
            u, rest = m[0], m[1:]
            g, d = u
            out = self.nth_mono(((g, d + 1),), rest, -1)
            if rest:
                tail = self._dmono(rest)
                if tail:
                    out = out + self.nth(monomial_field((u,)), tail, -1)
        self._memo[key] = out
        return out

    # -- the monomial-level recursion -----------------------------------------

    def nth_mono(self, A, B, n):
        key = (A, B, n)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        out = self._nth_mono(A, B, n)
        self._memo[key] = out
        return out

    def _mono_w(self, m):
        w = Fraction(0)
        ws = self._weights
        for g, d in m:
            w += ws[g] + d
        return w

    def _nth_mono(self, A, B, n):
        if not A:
            return monomial_field(B) if n == -1 else ZERO_FIELD
        if n >= 0 and self._mono_w(A) + self._mono_w(B) - n - 1 < 0:
            return ZERO_FIELD
        if n <= -2:
            p = -n - 1
            da = self.derivative(monomial_field(A), p)
            return self.nth(da, monomial_field(B), -1).scale(
                scalar(rat(1, _factorial(p))))
        if len(A) == 1:
            g, d = A[0]
            if n >= 0:
                if d:
                    inner = self.nth_mono(((g, d - 1),), B, n - 1)
                    return inner.scale(scalar(-n)) if inner else ZERO_FIELD
                return self._gen_product(g, B, n)
            return self._prepend(A[0], B)
        # composite left word: (u_(-1) A')_(n) B
        u, Ap = A[0], A[1:]
        pu = self._parities[u[0]]
        pv = mono_parity(self.gens, Ap)
        sign = -1 if (pu and pv) else 1
        acc = {}
        wAp, wB = self._mono_w(Ap), self._mono_w(B)
        ufield = monomial_field((u,))
        j = 0
        while True:
            if n + j >= 0 and wAp + wB - (n + j) - 1 < 0:
                break
            inner = self.nth_mono(Ap, B, n + j)
            if inner:
                field_add_into(acc, self.nth(ufield, inner, -1 - j))
            j += 1
        wu = self._mono_w((u,))
        Apf = monomial_field(Ap)
        for j in range(int(wu + wB)):
            inner = self.nth_mono((u,), B, j)
            if inner:
                term = self.nth(Apf, inner, n - 1 - j)
                if term:
                    field_add_into(acc, term, scalar(sign))
        return Field(acc, _raw=True)

    def _gen_product(self, g, B, n):
        # a_(n) B for a plain generator a and n >= 0
        if not B:
            return ZERO_FIELD
        if len(B) == 1:
            h, e = B[0]
            if e:
                lower = self.nth_mono(((g, 0),), ((h, e - 1),), n)
                out = self.derivative(lower) if lower else ZERO_FIELD
                if n:
                    deeper = self.nth_mono(((g, 0),), ((h, e - 1),), n - 1)
                    if deeper:
                        out = out + deeper.scale(scalar(n))
                return out
            poles = self._table.get((g, h))
            if poles is None:
                raise IncompleteTableError(
                    f"no OPE entry for generator pair "
                    f"({self.gens[g].name}, {self.gens[h].name})")
            return poles.get(n, ZERO_FIELD)
        v, Bp = B[0], B[1:]
        pa = self._parities[g]
        pv = self._parities[v[0]]
        sign = -1 if (pa and pv) else 1
        inner = self.nth_mono(((g, 0),), Bp, n)
        acc = {}
        if inner:
            field_add_into(acc, self.nth(monomial_field((v,)), inner, -1),
                           scalar(sign))
        Bpf = monomial_field(Bp)
        for j in range(n + 1):
            f = self.nth_mono(((g, 0),), (v,), j)
            if f:
                c = binom(n, j)
                term = self.nth(f, Bpf, n - 1 - j)
                if term:
                    field_add_into(acc, term, scalar(c))
        return Field(acc, _raw=True)

    def _prepend(self, u, B):
        # u_(-1) B for a single factor u and a PBW word B
        if not B:
            return monomial_field((u,))
        h = B[0]
        ku, kh = factor_key(u), factor_key(h)
        odd_u = self._parities[u[0]] == ODD
        if ku < kh or (ku == kh and not odd_u):
            return monomial_field((u,) + B)
        Bp = B[1:]
        if ku == kh:  # repeated odd factor: u_(-1)u_(-1)X = 1/2 [u,u]_+ X
            acc = {}
            j = 0
            wu = self._mono_w((u,))
            while 2 * wu - j - 1 >= 0:
                f = self.nth_mono((u,), (u,), j)
                if f:
                    c = scalar(rat((-1) ** j, 2))
                    term = self.nth(f, monomial_field(Bp), -2 - j)
                    if term:
                        field_add_into(acc, term, c)
                j += 1
            return Field(acc, _raw=True)
        ph = self._parities[h[0]]
        sign = -1 if (odd_u and ph) else 1
        inner = self.nth_mono((u,), Bp, -1)
        acc = {}
        if inner:
            field_add_into(acc, self.nth(monomial_field((h,)), inner, -1),
                           scalar(sign))
        wu, wh = self._mono_w((u,)), self._mono_w((h,))
        Bpf = monomial_field(Bp)
        j = 0
        while wu + wh - j - 1 >= 0:
            f = self.nth_mono((u,), (h,), j)
            if f:
                term = self.nth(f, Bpf, -2 - j)
                if term:
                    field_add_into(acc, term, scalar((-1) ** j))
            j += 1
        return Field(acc, _raw=True)

    # -- conveniences ----------------------------------------------------------

    def parse(self, text, names=None):
        return parse_field(text, self.gens, names or self.names, engine=self)

    def print(self, f):
        return print_field(f, self.gens)

    def generator(self, name, deriv=0):
        return monomial_field(((self.gens.lookup(name), deriv),))

    def specialize(self, q):
        """The context at k := q; cached so repeated specializations share
        one memo table."""
        q = rat(q) if isinstance(q, (int, Fraction)) else q
        ctx = self._specialized.get(q)
        if ctx is None:
            ctx = Context(self.spec.specialize(q), complete=False)
            self._specialized[q] = ctx
        return ctx

    def conformal_field(self):
        if self.spec.conformal is None:
            raise ValueError(f"algebra {self.spec.name} has no conformal vector")
        return monomial_field(((self.spec.conformal, 0),))

    # -- axiom checks -----------------------------------------------------------

    def check_conformal(self):
        """T_(1)g = weight(g) g and T_(0)g = dg for every generator g."""
        failures = []
        T = self.conformal_field()
        for i, decl in enumerate(self.gens.decls):
            gfield = monomial_field(((i, 0),))
            r1 = self.nth(T, gfield, 1) - gfield.scale(scalar(decl.weight.numerator,
                                                              decl.weight.denominator))
            r0 = self.nth(T, gfield, 0) - monomial_field(((i, 1),))
            if r1 or r0:
                failures.append((decl.name, r1, r0))
        return failures

    def check_jacobi(self, max_weight=None):
        """The commutator identity on all generator triples and admissible m, n.

        a_(m)(b_(n)c) - (-1)^{p(a)p(b)} b_(n)(a_(m)c)
            = sum_j C(m,j) (a_(j)b)_(m+n-j) c

        m and n range over the weight bound (all products beyond it vanish
        identically); max_weight caps the bound when given.  Returns a list
        of failures (triple, m, n, residual); empty means pass.
        """
        failures = []
        ngen = len(self.gens)
        for ia in range(ngen):
            failures.extend(self.check_jacobi_left(ia, max_weight))
        return failures

    def check_jacobi_left(self, ia, max_weight=None):
        failures = []
        ngen = len(self.gens)
        ws = self.gens.weights
        for ib in range(ngen):
            for ic in range(ngen):
                wa, wb, wc = ws[ia], ws[ib], ws[ic]
                sign = -1 if (self._parities[ia] and self._parities[ib]) else 1
                a = monomial_field(((ia, 0),))
                b = monomial_field(((ib, 0),))
                c = monomial_field(((ic, 0),))
                mtop = int(wa + wb + wc)
                if max_weight is not None:
                    mtop = min(mtop, int(max_weight))
                for m in range(mtop + 1):
                    for n in range(mtop + 1):
                        if n > wb + wc - 1 and m > wa + wc - 1:
                            continue
                        lhs = self.nth(a, self.nth(b, c, n), m) - \
                            self.nth(b, self.nth(a, c, m), n).scale(scalar(sign))
                        rhs_acc = {}
                        for j in range(m + 1):
                            ab = self.nth_mono(((ia, 0),), ((ib, 0),), j)
                            if ab:
                                term = self.nth(ab, c, m + n - j)
                                if term:
                                    field_add_into(rhs_acc, term,
                                                   scalar(binom(m, j)))
                        residual = lhs - Field(rhs_acc, _raw=True)
                        if residual:
                            failures.append(((self.gens[ia].name,
                                              self.gens[ib].name,
                                              self.gens[ic].name),
                                             m, n, residual))
        return failures


def tensor(a, b, name=None):
    """Tensor product of two presentations: disjoint generators, cross pairs
    regular."""
    gens = GeneratorSet(a.gens.decls + b.gens.decls)
    off = len(a.gens)
    table = {}
    for (i, j), poles in a.table.items():
        table[(i, j)] = poles
    for (i, j), poles in b.table.items():
        table[(i + off, j + off)] = {
            n: Field({tuple((g + off, d) for g, d in m): c
                      for m, c in f.t.items()})
            for n, f in poles.items()}
    conformal = None
    return AlgebraSpec(name or f"{a.name}*{b.name}", gens, table, conformal,
                       a.level)
