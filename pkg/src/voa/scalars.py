"""Exact arithmetic over Q and over the rational-function field Q(k).

Every coefficient in the package is a LevelScalar: a reduced fraction of
polynomials in the formal level k, with arbitrary-precision rational
coefficients.  The canonical form (numerator and denominator coprime,
denominator monic) makes equality a structural comparison, which the whole
verification pipeline relies on.

Polynomials are stored as tuples of rationals indexed by degree, with no
trailing zeros; the zero polynomial is the empty tuple.  Rationals are
gmpy2.mpq when available (much faster), fractions.Fraction otherwise; the
two types compare and hash identically.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq

    def rat(a=0, b=1):
        return _mpq(a, b)

except ImportError:  # pragma: no cover - gmpy2 is normally present
    def rat(a=0, b=1):
        return Fraction(a, b)

Rational = Fraction  # public exchange type; rat() may build a faster equivalent

_R0 = rat(0)
_R1 = rat(1)


class PoleEvaluationError(ZeroDivisionError):
    """Raised when a LevelScalar is evaluated at a root of its denominator."""

    def __init__(self, point, factor_text):
        self.point = point
        self.factor_text = factor_text
        super().__init__(f"k = {point} is a pole (denominator factor {factor_text})")


# ---------------------------------------------------------------------------
# polynomial helpers on coefficient tuples (ascending degree, trimmed)
# ---------------------------------------------------------------------------

def _trim(c):
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    return tuple(c[:n])


def _padd(a, b):
    if not a:
        return b
    if not b:
        return a
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _trim(out)


def _pneg(a):
    return tuple(-x for x in a)


def _pmul(a, b):
    if not a or not b:
        return ()
    if len(a) == 1:
        s = a[0]
        return tuple(s * x for x in b)
    if len(b) == 1:
        s = b[0]
        return tuple(s * x for x in a)
    out = [_R0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _pscale(a, s):
    if s == 0:
        return ()
    return tuple(s * x for x in a)


def _pdivmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db, lb = len(b) - 1, b[-1]
    q = [_R0] * max(len(a) - db, 0)
    while len(r) > db and any(x != 0 for x in r):
        r = list(_trim(r))
        if len(r) - 1 < db:
            break
        c = r[-1] / lb
        q[len(r) - 1 - db] = c
        for i in range(db + 1):
            r[len(r) - db - 1 + i] -= c * b[i]
        r.pop()
    return _trim(q), _trim(r)


def _pgcd(a, b):
    while b:
        a, b = b, _pdivmod(a, b)[1]
    if not a:
        return ()
    lc = a[-1]
    return tuple(x / lc for x in a)  # monic


def _peval(a, q):
    acc = _R0
    for c in reversed(a):
        acc = acc * q + c
    return acc


def _pstr(a, var="k"):
    if not a:
        return "0"
    parts = []
    for d in range(len(a) - 1, -1, -1):
        c = a[d]
        if c == 0:
            continue
        if d == 0:
            body = _ratstr(abs(c))
        else:
            kpow = var if d == 1 else f"{var}^{d}"
            body = kpow if abs(c) == 1 else f"{_ratstr(abs(c))}*{kpow}"
        parts.append(("-" if c < 0 else "+", body))
    sign0, body0 = parts[0]
    text = ("-" if sign0 == "-" else "") + body0
    for sign, body in parts[1:]:
        text += sign + body
    return text


def _ratstr(q):
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class LevelPoly:
    """A polynomial in the formal level k with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        self.coeffs = _trim(tuple(rat(c) if isinstance(c, int) else c for c in coeffs))

    @property
    def degree(self):
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, LevelPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, q):
        return _peval(self.coeffs, rat(q))

    def __str__(self):
        return _pstr(self.coeffs)

    def __repr__(self):
        return f"LevelPoly({_pstr(self.coeffs)})"


# ---------------------------------------------------------------------------
# LevelScalar
# ---------------------------------------------------------------------------

class LevelScalar:
    """An element of Q(k) in canonical form.

    Canonical form: numerator/denominator coprime, denominator monic, zero
    stored as ()/( 1 ).  Values are immutable and hashable; equality is
    structural.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=(_R1,), _reduced=False):
        if not den:
            raise ZeroDivisionError("LevelScalar with zero denominator")
        if not _reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rational(q):
        q = rat(q) if isinstance(q, int) else q
        if q == 0:
            return ZERO
        return LevelScalar((q,), (_R1,), _reduced=True)

    @staticmethod
    def from_poly(coeffs):
        return LevelScalar(_trim(tuple(rat(c) if isinstance(c, int) else c
                                       for c in coeffs)), (_R1,))

    # -- predicates --------------------------------------------------------

    def is_zero(self):
        return not self.num

    def is_one(self):
        return self.num == (_R1,) and self.den == (_R1,)

    def is_constant(self):
        return len(self.num) <= 1 and len(self.den) == 1

    def as_rational(self):
        """The value as a rational; only valid when is_constant()."""
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return (self.num[0] / self.den[0]) if self.num else _R0

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if other.__class__ is not LevelScalar:
            return NotImplemented
        if not self.num:
            return other
        if not other.num:
            return self
        if self.den == other.den:
            num = _padd(self.num, other.num)
            if not num:
                return ZERO
            if len(self.den) == 1:
                return LevelScalar(num, self.den, _reduced=True)
            return LevelScalar(num, self.den)
        return LevelScalar(
            _padd(_pmul(self.num, other.den), _pmul(other.num, self.den)),
            _pmul(self.den, other.den))

    def __sub__(self, other):
        if other.__class__ is not LevelScalar:
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        if not self.num:
            return self
        return LevelScalar(_pneg(self.num), self.den, _reduced=True)

    def __mul__(self, other):
        if other.__class__ is LevelScalar:
            if not self.num or not other.num:
                return ZERO
            if len(self.den) == 1 and len(other.den) == 1:
                return LevelScalar(_pmul(self.num, other.num),
                                   (self.den[0] * other.den[0],))
            return LevelScalar(_pmul(self.num, other.num),
                               _pmul(self.den, other.den))
        if isinstance(other, (int, Fraction)) or other.__class__.__name__ == "mpq":
            if other == 0 or not self.num:
                return ZERO
            q = rat(other) if isinstance(other, int) else other
            return LevelScalar(_pscale(self.num, q), self.den)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if other.__class__ is LevelScalar:
            if not other.num:
                raise ZeroDivisionError("division by zero LevelScalar")
            if not self.num:
                return ZERO
            return LevelScalar(_pmul(self.num, other.den),
                               _pmul(self.den, other.num))
        if isinstance(other, (int, Fraction)) or other.__class__.__name__ == "mpq":
            if other == 0:
                raise ZeroDivisionError("division by zero")
            if not self.num:
                return ZERO
            q = rat(1) / (rat(other) if isinstance(other, int) else other)
            return LevelScalar(_pscale(self.num, q), self.den)
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if other.__class__ is LevelScalar:
            return self.num == other.num and self.den == other.den
        if isinstance(other, int):
            if other == 0:
                return not self.num
            return self.den == (_R1,) and self.num == (rat(other),)
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((self.num, self.den))
        return h

    # -- evaluation and inspection ------------------------------------------

    def evaluate(self, q):
        """Exact substitution k := q; raises PoleEvaluationError at poles."""
        q = rat(q) if isinstance(q, int) else q
        d = _peval(self.den, q)
        if d == 0:
            factor = _pstr((-q, _R1))
            raise PoleEvaluationError(q, factor)
        return _peval(self.num, q) / d

    @property
    def numerator(self):
        return LevelPoly(self.num)

    @property
    def denominator(self):
        return LevelPoly(self.den)

    def __str__(self):
        return scalar_to_str(self)

    def __repr__(self):
        return f"LevelScalar({scalar_to_str(self)})"


def _reduce(num, den):
    num = _trim(num)
    den = _trim(den)
    if not den:
        raise ZeroDivisionError("LevelScalar with zero denominator")
    if not num:
        return (), (_R1,)
    if len(den) > 1 or (len(num) > 1 and den[0] != 1):
        g = _pgcd(num, den)
        if len(g) > 1:
            num = _pdivmod(num, g)[0]
            den = _pdivmod(den, g)[0]
    lc = den[-1]
    if lc != 1:
        inv = _R1 / lc
        num = _pscale(num, inv)
        den = _pscale(den, inv)
    return num, den


ZERO = LevelScalar((), (_R1,), _reduced=True)
ONE = LevelScalar((_R1,), (_R1,), _reduced=True)
MINUS_ONE = LevelScalar((-_R1,), (_R1,), _reduced=True)
K = LevelScalar((_R0, _R1), (_R1,), _reduced=True)


def scalar(value, den=1):
    """Build a LevelScalar from an int, rational, or rational pair."""
    if isinstance(value, LevelScalar):
        return value
    if den != 1:
        return LevelScalar.from_rational(rat(value, den))
    return LevelScalar.from_rational(value)


def normalize(num, den):
    """Canonicalize an unreduced fraction of polynomials (idempotent)."""
    ncoeffs = num.coeffs if isinstance(num, LevelPoly) else LevelPoly(num).coeffs
    dcoeffs = den.coeffs if isinstance(den, LevelPoly) else LevelPoly(den).coeffs
    return LevelScalar(ncoeffs, dcoeffs)


def evaluate_at(s, q):
    """Exact substitution k := q into a LevelScalar."""
    return s.evaluate(q)


# ---------------------------------------------------------------------------
# rational roots
# ---------------------------------------------------------------------------

def _int_divisors(n):
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def rational_roots(p):
    """All rational roots of p with multiplicity, plus the residual factor.

    Returns (roots, residual) where roots maps each rational root to its
    multiplicity and residual is a list of content-free non-linear factors
    (empty when p splits over Q).  The product of the reported linear factors
    and the residual equals p up to a rational constant.
    """
    coeffs = p.coeffs if isinstance(p, LevelPoly) else LevelPoly(p).coeffs
    if not coeffs:
        raise ZeroDivisionError("zero polynomial: every k is a root")
    roots = {}
    # factor out k^m
    m = 0
    while coeffs[m] == 0:
        m += 1
    if m:
        roots[rat(0)] = m
        coeffs = coeffs[m:]
    if len(coeffs) > 1:
        # integer primitive form
        denlcm = 1
        for c in coeffs:
            denlcm = denlcm * c.denominator // _gcd_int(denlcm, c.denominator)
        ints = [int(c * denlcm) for c in coeffs]
        g = 0
        for v in ints:
            g = _gcd_int(g, v)
        ints = [v // g for v in ints]
        for pnum in _int_divisors(ints[0]):
            for qden in _int_divisors(ints[-1]):
                if _gcd_int(pnum, qden) != 1:
                    continue
                for sign in (1, -1):
                    r = rat(sign * pnum, qden)
                    mult = 0
                    while len(ints) > 1 and _poly_root_int(ints, r):
                        ints = _deflate_int(ints, r)
                        mult += 1
                    if mult:
                        roots[r] = roots.get(r, 0) + mult
        coeffs = tuple(rat(v) for v in ints)
    residual = []
    if len(coeffs) > 2:
        residual.append(LevelPoly(coeffs))
    return roots, residual


def _gcd_int(a, b):
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


def _poly_root_int(ints, r):
    acc = rat(0)
    for c in reversed(ints):
        acc = acc * r + c
    return acc == 0


def _deflate_int(ints, r):
    # synthetic division of the rational-coefficient poly by (k - r),
    # rescaled back to integer primitive form
    out = [rat(c) for c in ints]
    quot = []
    acc = rat(0)
    for c in reversed(out):
        acc = acc * r + c
        quot.append(acc)
    quot.pop()  # remainder, zero by assumption
    quot.reverse()
    denlcm = 1
    for c in quot:
        denlcm = denlcm * c.denominator // _gcd_int(denlcm, c.denominator)
    ints2 = [int(c * denlcm) for c in quot]
    g = 0
    for v in ints2:
        g = _gcd_int(g, v)
    return [v // g for v in ints2]


# ---------------------------------------------------------------------------
# text syntax: integer and fraction literals, the symbol k, + - * / ^, parens
# ---------------------------------------------------------------------------

class ScalarParseError(ValueError):
    def __init__(self, msg, text, pos):
        self.pos = pos
        super().__init__(f"{msg} at position {pos}: {text!r}")


def _tokenize_scalar(text):
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
        elif ch in "+-*/^()":
            toks.append((ch, ch, i))
            i += 1
        elif ch == "k" and (i + 1 == n or not (text[i + 1].isalnum() or text[i + 1] == "_")):
            toks.append(("k", "k", i))
            i += 1
        else:
            raise ScalarParseError("unexpected character", text, i)
    toks.append(("end", None, n))
    return toks


class _ScalarParser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize_scalar(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise ScalarParseError(f"expected {kind!r}, got {t[0]!r}", self.text, t[2])
        return t

    def parse(self):
        v = self.sum()
        t = self.next()
        if t[0] != "end":
            raise ScalarParseError("trailing input", self.text, t[2])
        return v

    def sum(self):
        v = self.product()
        while self.peek() in ("+", "-"):
            op = self.next()[0]
            rhs = self.product()
            v = v + rhs if op == "+" else v - rhs
        return v

    def product(self):
        v = self.unary()
        while self.peek() in ("*", "/"):
            op = self.next()[0]
            rhs = self.unary()
            v = v * rhs if op == "*" else v / rhs
        return v

    def unary(self):
        if self.peek() == "-":
            self.next()
            return -self.unary()
        if self.peek() == "+":
            self.next()
            return self.unary()
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek() == "^":
            self.next()
            t = self.expect("int")
            v = v ** t[1]
        return v

    def atom(self):
        t = self.next()
        if t[0] == "int":
            return LevelScalar.from_rational(t[1])
        if t[0] == "k":
            return K
        if t[0] == "(":
            v = self.sum()
            self.expect(")")
            return v
        raise ScalarParseError("expected a scalar atom", self.text, t[2])


def parse_scalar(text):
    """Parse the scalar text syntax into a LevelScalar."""
    return _ScalarParser(text).parse()


def scalar_to_str(s):
    """Canonical text form; parse_scalar(scalar_to_str(s)) == s."""
    if not s.num:
        return "0"
    num = _pstr(s.num)
    if s.den == (_R1,):
        return num
    den = _pstr(s.den)
    if _needs_parens(s.num):
        num = f"({num})"
    if _needs_parens(s.den) or len(s.den) > 1:
        den = f"({den})"
    return f"{num}/{den}"


def _needs_parens(coeffs):
    terms = sum(1 for c in coeffs if c != 0)
    return terms > 1


def coefficient_text(s):
    """Text of s for use as a term coefficient (parenthesized if composite)."""
    text = scalar_to_str(s)
    if s.den != (_R1,) or _needs_parens(s.num):
        if not (text.startswith("(") and text.endswith(")")):
            # a/b with both atoms parse fine as a coefficient prefix
            if "/" not in text:
                text = f"({text})"
    return text
