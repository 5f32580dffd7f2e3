"""Generators, PBW normal form, graded Field values, and the field grammar.

A PBW monomial is a right-nested normally ordered word :a1(:a2(...ar):):
stored as a tuple of (generator index, derivative order) pairs.  Factors are
sorted ascending by generator index and, within one generator, descending by
derivative order; equal (index, order) pairs are forbidden for odd
generators.  The empty tuple is the vacuum.

A Field is a finite LevelScalar-linear combination of PBW monomials.
Fields may be inhomogeneous; the grading map splits them by (weight, charge).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import (LevelScalar, ZERO, ONE, K, scalar,
                      coefficient_text)

Monomial = tuple  # of (gen_index, deriv_order) pairs
VACUUM: Monomial = ()

EVEN, ODD = 0, 1


class UnknownGeneratorError(KeyError):
    pass


class FieldParseError(ValueError):
    def __init__(self, msg, text, pos):
        self.pos = pos
        super().__init__(f"{msg} at position {pos}: {text!r}")


class UnnormalizedFieldError(ValueError):
    """A parsed word is not in PBW order and no engine was supplied."""

    def __init__(self, word):
        self.word = word
        super().__init__(f"word {word} is not in PBW normal form; "
                         "rewriting requires the OPE engine")


@dataclass(frozen=True)
class GeneratorDecl:
    """A generating field: name, parity, conformal weight, U(1)-charge."""

    name: str
    parity: str  # "even" | "odd"
    weight: Fraction
    charge: int = 0

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        w = Fraction(self.weight)
        if w < 0 or (2 * w).denominator != 1:
            raise ValueError(f"weight must be a half-integer >= 0, got {self.weight}")
        object.__setattr__(self, "weight", w)

    @property
    def is_odd(self):
        return self.parity == "odd"


class GeneratorSet:
    """An ordered list of generator declarations with name lookup."""

    def __init__(self, decls):
        self.decls = tuple(decls)
        self.index = {}
        for i, d in enumerate(self.decls):
            if d.name in self.index:
                raise ValueError(f"duplicate generator name {d.name!r}")
            if d.name == "k":
                raise ValueError("'k' is reserved for the level symbol")
            self.index[d.name] = i
        self.weights = tuple(d.weight for d in self.decls)
        self.charges = tuple(d.charge for d in self.decls)
        self.parities = tuple(ODD if d.is_odd else EVEN for d in self.decls)

    def __len__(self):
        return len(self.decls)

    def __getitem__(self, i):
        return self.decls[i]

    def lookup(self, name):
        try:
            return self.index[name]
        except KeyError:
            raise UnknownGeneratorError(name) from None

    def names(self):
        return [d.name for d in self.decls]


# ---------------------------------------------------------------------------
# monomial bookkeeping
# ---------------------------------------------------------------------------

def mono_weight(gens, m):
    w = Fraction(0)
    for g, d in m:
        w += gens.weights[g] + d
    return w


def mono_charge(gens, m):
    return sum(gens.charges[g] for g, _ in m)


def mono_parity(gens, m):
    p = 0
    for g, _ in m:
        p ^= gens.parities[g]
    return p


def factor_key(f):
    # ascending generator index; within one generator, descending derivative
    return (f[0], -f[1])


def is_pbw(gens, word):
    prev = None
    for f in word:
        if prev is not None:
            kp, kf = factor_key(prev), factor_key(f)
            if kp > kf:
                return False
            if kp == kf and gens.parities[f[0]] == ODD:
                return False
        prev = f
    return True


def mono_sort_key(gens, m):
    return (mono_weight(gens, m), len(m), m)


# ---------------------------------------------------------------------------
# Field
# ---------------------------------------------------------------------------

class Field:
    """A finite LevelScalar-linear combination of PBW monomials."""

    __slots__ = ("t",)

    def __init__(self, terms=None, _raw=False):
        if _raw:
            self.t = terms
        elif terms is None:
            self.t = {}
        else:
            self.t = {m: c for m, c in dict(terms).items() if not c.is_zero()}

    def is_zero(self):
        return not self.t

    def __bool__(self):
        return bool(self.t)

    def __eq__(self, other):
        return isinstance(other, Field) and self.t == other.t

    def __hash__(self):
        return hash(frozenset(self.t.items()))

    def __add__(self, other):
        out = dict(self.t)
        for m, c in other.t.items():
            acc = out.get(m)
            s = c if acc is None else acc + c
            if s.is_zero():
                out.pop(m, None)
            else:
                out[m] = s
        return Field(out, _raw=True)

    def __sub__(self, other):
        out = dict(self.t)
        for m, c in other.t.items():
            acc = out.get(m)
            s = -c if acc is None else acc - c
            if s.is_zero():
                out.pop(m, None)
            else:
                out[m] = s
        return Field(out, _raw=True)

    def __neg__(self):
        return Field({m: -c for m, c in self.t.items()}, _raw=True)

    def scale(self, s):
        if not isinstance(s, LevelScalar):
            s = scalar(s)
        if s.is_zero():
            return Field()
        return Field({m: c * s for m, c in self.t.items()}, _raw=True)

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def items(self):
        return self.t.items()

    def coefficient(self, mono):
        return self.t.get(mono, ZERO)

    def evaluate(self, q):
        """Substitute k := q in every coefficient."""
        return Field({m: scalar(c.evaluate(q)) for m, c in self.t.items()})

    def support_sorted(self, gens):
        return sorted(self.t, key=lambda m: mono_sort_key(gens, m))


ZERO_FIELD = Field()


def field_add_into(acc, field, coeff=None):
    """acc += coeff * field on a plain dict accumulator."""
    if coeff is None:
        for m, c in field.t.items():
            prev = acc.get(m)
            s = c if prev is None else prev + c
            if s.is_zero():
                acc.pop(m, None)
            else:
                acc[m] = s
    else:
        if coeff.is_zero():
            return
        for m, c in field.t.items():
            cc = c * coeff
            prev = acc.get(m)
            s = cc if prev is None else prev + cc
            if s.is_zero():
                acc.pop(m, None)
            else:
                acc[m] = s


def monomial_field(word, coeff=ONE):
    return Field({tuple(word): coeff})


def vacuum_field(coeff=ONE):
    return Field({VACUUM: coeff})


def generator_field(gens, name, deriv=0):
    return Field({((gens.lookup(name), deriv),): ONE})


# ---------------------------------------------------------------------------
# derivative and grading
# ---------------------------------------------------------------------------

def derivative_monomial(gens, m):
    """Leibniz expansion of the translation operator on one monomial.

    Monomials acquiring a repeated odd (generator, order) pair are dropped;
    this is exact whenever odd generators have no self-poles (true of every
    shipped algebra).  The engine has a table-aware derivative for the
    general case.
    """
    out = {}
    for i in range(len(m)):
        g, d = m[i]
        bumped = m[:i] + ((g, d + 1),) + m[i + 1:]
        word = tuple(sorted(bumped, key=factor_key))
        if gens.parities[g] == ODD:
            clash = any(word[j] == word[j + 1] and gens.parities[word[j][0]] == ODD
                        for j in range(len(word) - 1))
            if clash:
                continue
        prev = out.get(word)
        out[word] = ONE if prev is None else prev + ONE
    return Field(out)


def derivative(gens, f, order=1):
    """The translation operator applied to a Field, order times."""
    for _ in range(order):
        acc = {}
        for m, c in f.t.items():
            field_add_into(acc, derivative_monomial(gens, m), c)
        f = Field(acc, _raw=True)
    return f


def grade(gens, f):
    """Decompose a Field into homogeneous (weight, charge) components."""
    out = {}
    for m, c in f.t.items():
        key = (mono_weight(gens, m), mono_charge(gens, m))
        out.setdefault(key, {})[m] = c
    return {key: Field(d, _raw=True) for key, d in out.items()}


def weight_of(gens, f):
    """The weight of a homogeneous Field; None for zero, error if mixed."""
    ws = {mono_weight(gens, m) for m in f.t}
    if not ws:
        return None
    if len(ws) > 1:
        raise ValueError(f"inhomogeneous field has weights {sorted(ws)}")
    return ws.pop()


def charge_of(gens, f):
    cs = {mono_charge(gens, m) for m in f.t}
    if not cs:
        return None
    if len(cs) > 1:
        raise ValueError(f"field has mixed charges {sorted(cs)}")
    return cs.pop()


def parity_of(gens, f):
    ps = {mono_parity(gens, m) for m in f.t}
    if not ps:
        return None
    if len(ps) > 1:
        raise ValueError("field has mixed parity")
    return ps.pop()


# ---------------------------------------------------------------------------
# expression grammar
#
#   field      := term (('+'|'-') term)*
#   term       := [coef ('*')?] factorExpr | coef
#   coef       := scalar literal (int, fraction, k-expression; parenthesized
#                 if composite)
#   factorExpr := 'NO(' factor (',' factor)* ')' | factor
#   factor     := ('d' ('^' uint)?)? name
#
# Whitespace is insignificant.  `d gen` is the derivative of gen.
# ---------------------------------------------------------------------------

def _tokenize_field(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", int(text[i:j]), i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("ident", text[i:j], i))
            i = j
        elif ch in "+-*/^(),":
            toks.append((ch, ch, i))
            i += 1
        else:
            raise FieldParseError("unexpected character", text, i)
    toks.append(("end", None, n))
    return toks


class _FieldParser:
    def __init__(self, text, gens, names=None, engine=None):
        self.text = text
        self.toks = _tokenize_field(text)
        self.i = 0
        self.gens = gens
        self.names = names or {}
        self.engine = engine

    def peek(self, ahead=0):
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise FieldParseError(f"expected {kind!r}, got {t[0]!r}", self.text, t[2])
        return t

    def error(self, msg):
        t = self.peek()
        raise FieldParseError(msg, self.text, t[2])

    # -- entry ---------------------------------------------------------------

    def parse(self):
        total = Field()
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.next()[0] == "-" else 1
        total = total + self.term(sign)
        while self.peek()[0] in ("+", "-"):
            sign = -1 if self.next()[0] == "-" else 1
            total = total + self.term(sign)
        t = self.next()
        if t[0] != "end":
            raise FieldParseError("trailing input", self.text, t[2])
        return total

    # -- pieces ---------------------------------------------------------------

    def term(self, sign):
        coef = self.maybe_coef()
        if coef is None:
            coef = ONE
        if self.peek()[0] == "*":
            self.next()
        if self.at_factor_start():
            body = self.factor_expr()
        else:
            body = vacuum_field()
        if sign < 0:
            coef = -coef
        return body.scale(coef)

    def at_factor_start(self):
        kind, val, _ = self.peek()
        return kind == "ident"

    def maybe_coef(self):
        kind, val, _ = self.peek()
        if kind == "int" or kind == "(" or (kind == "ident" and val == "k"):
            return self.scalar_product()
        return None

    def scalar_product(self):
        v = self.scalar_atom()
        while True:
            kind, val, _ = self.peek()
            if kind == "/":
                self.next()
                v = v / self.scalar_atom()
            elif kind == "*":
                # `2 * k`-style scalar chains; a '*' before a generator name
                # belongs to the term, so only consume scalar atoms
                nk, nv, _ = self.peek(1)
                if nk == "int" or nk == "(" or (nk == "ident" and nv == "k"):
                    self.next()
                    v = v * self.scalar_atom()
                else:
                    break
            else:
                break
        return v

    def scalar_atom(self):
        kind, val, pos = self.next()
        if kind == "int":
            v = scalar(val)
        elif kind == "ident" and val == "k":
            v = K
        elif kind == "(":
            v = self.scalar_sum()
            self.expect(")")
        else:
            raise FieldParseError("expected a scalar atom", self.text, pos)
        if self.peek()[0] == "^":
            self.next()
            t = self.expect("int")
            v = v ** t[1]
        return v

    def scalar_sum(self):
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.next()[0] == "-" else 1
        v = self.scalar_product()
        if sign < 0:
            v = -v
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            rhs = self.scalar_product()
            v = v + rhs if op == "+" else v - rhs
        return v

    def factor_expr(self):
        kind, val, pos = self.peek()
        if kind == "ident" and val == "NO" and self.peek(1)[0] == "(":
            self.next()
            self.next()
            factors = [self.factor()]
            while self.peek()[0] == ",":
                self.next()
                factors.append(self.factor())
            self.expect(")")
            return self.build_word(factors)
        return self.build_word([self.factor()])

    def factor(self):
        kind, val, pos = self.peek()
        deriv = 0
        if kind == "ident" and val == "d":
            self.next()
            deriv = 1
            if self.peek()[0] == "^":
                self.next()
                t = self.expect("int")
                deriv = t[1]
                if deriv < 0:
                    raise FieldParseError("negative derivative order", self.text, t[2])
        t = self.next()
        if t[0] != "ident":
            raise FieldParseError("expected a generator or field name", self.text, t[2])
        return (deriv, t[1], t[2])

    def resolve(self, name, pos):
        if name in self.gens.index:
            return self.gens.index[name]
        if name in self.names:
            return self.names[name]
        if callable(getattr(self.names, "resolve", None)):
            f = self.names.resolve(name)
            if f is not None:
                return f
        raise FieldParseError(f"unknown generator or field name {name!r}",
                              self.text, pos)

    def build_word(self, factors):
        resolved = [(d, self.resolve(name, pos)) for d, name, pos in factors]
        if all(isinstance(r, int) for _, r in resolved):
            word = tuple((g, d) for d, g in resolved)
            if is_pbw(self.gens, word):
                return monomial_field(word)
        if self.engine is None:
            raise UnnormalizedFieldError(
                [(d, r if isinstance(r, int) else "<field>") for d, r in resolved])
        parts = []
        for d, r in resolved:
            f = monomial_field(((r, d),)) if isinstance(r, int) else r
            if not isinstance(r, int) and d:
                f = self.engine.derivative(f, d)
            parts.append(f)
        out = parts[-1]
        for f in reversed(parts[:-1]):
            out = self.engine.normal_order(f, out)
        return out


def parse_field(text, gens, names=None, engine=None):
    """Parse the field grammar.

    Words already in PBW form (and plain generator factors) need no engine;
    any other word is rewritten through the supplied engine's normal_order,
    and UnnormalizedFieldError is raised when none is given.
    """
    return _FieldParser(text, gens, names, engine).parse()


def print_field(f, gens):
    """Deterministic text form; parse_field(print_field(f), gens) == f."""
    if f.is_zero():
        return "0"
    parts = []
    for m in f.support_sorted(gens):
        c = f.t[m]
        neg = c.num and c.num[-1] < 0
        if neg:
            c = -c
        body = _mono_text(m, gens)
        if body is None:  # vacuum
            text = coefficient_text(c)
        elif c.is_one():
            text = body
        else:
            text = f"{coefficient_text(c)} {body}"
        parts.append(("-" if neg else "+", text))
    sign0, text0 = parts[0]
    out = ("-" if sign0 == "-" else "") + text0
    for sign, text in parts[1:]:
        out += f" {sign} {text}"
    return out


def _mono_text(m, gens):
    if not m:
        return None
    factors = []
    for g, d in m:
        name = gens.decls[g].name
        if d == 0:
            factors.append(name)
        elif d == 1:
            factors.append(f"d {name}")
        else:
            factors.append(f"d^{d} {name}")
    if len(factors) == 1:
        return factors[0]
    return "NO(" + ", ".join(factors) + ")"
