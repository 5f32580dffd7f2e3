"""Brute-force mode-expansion oracle.

States are represented as words of negative modes g_(m) (m <= -1) applied to
the vacuum, kept in the same canonical order as PBW monomials.  Products are
computed directly from the mode commutation relations

    [a_(m), b_(l)]_{+/-} = sum_j C(m,j) (a_(j)b)_(m+l-j)

and the iterate formula, never through the engine's Wick or
quasi-commutativity rules, so the two paths are independent cross-checks.
Only tables whose positive poles are linear in the generators are supported;
that covers every shipped algebra.
"""

from __future__ import annotations

from fractions import Fraction

from .engine import binom
from .fields import Field, ODD
from .scalars import ONE, ZERO, scalar, rat


class OracleUnsupported(ValueError):
    pass


def _factorial(n):
    acc = 1
    for i in range(2, n + 1):
        acc *= i
    return acc


class ModeOracle:
    """Mode-level model of an algebra with a linear generator table."""

    def __init__(self, spec):
        self.spec = spec
        self.gens = spec.gens
        self.parities = spec.gens.parities
        self.weights = spec.gens.weights
        # brackets[(g,h)][j] = (vacuum coefficient, [(coeff, gen, deriv)...])
        self.brackets = {}
        for (i, j), poles in spec.table.items():
            entry = {}
            for n, f in poles.items():
                vac = ZERO
                lin = []
                for m, c in f.t.items():
                    if len(m) == 0:
                        vac = c
                    elif len(m) == 1:
                        lin.append((c, m[0][0], m[0][1]))
                    else:
                        raise OracleUnsupported(
                            f"table entry ({i},{j})[{n}] is not linear in the "
                            "generators; the mode oracle does not apply")
                entry[n] = (vac, lin)
            self.brackets[(i, j)] = entry
        self._memo = {}

    # -- state words ----------------------------------------------------------

    def word_weight(self, word):
        w = Fraction(0)
        for g, m in word:
            w += self.weights[g] - m - 1
        return w

    def word_parity(self, word):
        p = 0
        for g, _ in word:
            p ^= self.parities[g]
        return p

    def apply_mode(self, g, m, state):
        """g_(m) applied to a state (dict word -> coefficient)."""
        out = {}
        for word, c in state.items():
            for w2, c2 in self._apply_word(g, m, word).items():
                acc = out.get(w2)
                s = c * c2 if acc is None else acc + c * c2
                if s.is_zero():
                    out.pop(w2, None)
                else:
                    out[w2] = s
        return out

    def _apply_word(self, g, m, word):
        key = (g, m, word)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        out = self._apply_word_raw(g, m, word)
        self._memo[key] = out
        return out

    def _apply_word_raw(self, g, m, word):
        if not word:
            if m <= -1:
                return {((g, m),): ONE}
            return {}
        h, l = word[0]
        rest = word[1:]
        if m <= -1 and (g, m) < (h, l):
            return {((g, m),) + word: ONE}
        if m <= -1 and (g, m) == (h, l) and self.parities[g] != ODD:
            return {((g, m),) + word: ONE}
        if (g, m) == (h, l) and self.parities[g] == ODD:
            # g_m g_m = 1/2 [g_m, g_m]_+
            out = {}
            for j, coeff, x, p in self._bracket_modes(g, g, m, m):
                half = coeff * scalar(rat(1, 2))
                self._add_scaled(out, self._mode_on_word(x, p, rest), half)
            return out
        # move g_(m) past h_(l)
        sign = -1 if (self.parities[g] and self.parities[h]) else 1
        out = {}
        inner = self._apply_word(g, m, rest)
        for w2, c2 in inner.items():
            moved = self._apply_word(h, l, w2)
            self._add_scaled(out, moved, c2 * scalar(sign))
        for j, coeff, x, p in self._bracket_modes(g, h, m, l):
            self._add_scaled(out, self._mode_on_word(x, p, rest), coeff)
        return out

    def _bracket_modes(self, g, h, m, l):
        """[g_(m), h_(l)] as a list of (j, coeff, generator-or-None, mode)."""
        entry = self.brackets.get((g, h))
        if entry is None:
            return []
        terms = []
        for j, (vac, lin) in entry.items():
            cmj = binom(m, j)
            if cmj == 0:
                continue
            base = scalar(Fraction(cmj))
            p = m + l - j
            if not vac.is_zero() and p == -1:
                terms.append((j, base * vac, None, None))
            for c, x, d in lin:
                # (d^d x)_(p) = (-1)^d d! C(p, d) x_(p-d)
                cpd = binom(p, d)
                if cpd == 0:
                    continue
                cc = base * c * scalar(Fraction((-1) ** d * _factorial(d) * cpd))
                terms.append((j, cc, x, p - d))
        return terms

    def _mode_on_word(self, x, p, word):
        if x is None:  # central term: multiple of the identity operator
            return {word: ONE}
        return self._apply_word(x, p, word)

    @staticmethod
    def _add_scaled(acc, state, coeff):
        if coeff.is_zero():
            return
        for w, c in state.items():
            cc = c * coeff
            prev = acc.get(w)
            s = cc if prev is None else prev + cc
            if s.is_zero():
                acc.pop(w, None)
            else:
                acc[w] = s

    # -- products ---------------------------------------------------------------

    def word_product(self, wa, wb, n):
        """(state wa)_(n) (state wb), both canonical words."""
        key = (wa, wb, n)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        out = self._word_product_raw(wa, wb, n)
        self._memo[key] = out
        return out

    def _word_product_raw(self, wa, wb, n):
        if not wa:
            return {wb: ONE} if n == -1 else {}
        g, m = wa[0]
        v = wa[1:]
        pg = self.parities[g]
        pv = self.word_parity(v)
        tail_sign = -(1 if (m % 2 == 0) else -1) * (-1 if (pg and pv) else 1)
        wv, wc = self.word_weight(v), self.word_weight(wb)
        out = {}
        j = 0
        while True:
            if n + j >= 0 and wv + wc - (n + j) - 1 < 0:
                break
            cmj = binom(m, j)
            if cmj != 0:
                inner = self.word_product(v, wb, n + j)
                if inner:
                    c = scalar(Fraction((-1) ** j * cmj))
                    for w2, c2 in inner.items():
                        self._add_scaled(out, self._apply_word(g, m - j, w2),
                                         c * c2)
            j += 1
        wg = self.weights[g]
        for j in range(int(wg + wc)):
            cmj = binom(m, j)
            if cmj == 0:
                continue
            inner = self._apply_word(g, j, wb)
            if inner:
                c = scalar(Fraction((-1) ** j * cmj * tail_sign))
                for w2, c2 in inner.items():
                    deeper = self.word_product(v, w2, m + n - j)
                    self._add_scaled(out, deeper, c * c2)
        return out

    # -- conversions to and from PBW fields ---------------------------------------

    def state_of_monomial(self, mono):
        word = tuple((g, -d - 1) for g, d in mono)
        c = 1
        for _, d in mono:
            c *= _factorial(d)
        return {word: scalar(c)}

    def state_of_field(self, f):
        out = {}
        for mono, c in f.t.items():
            self._add_scaled(out, self.state_of_monomial(mono), c)
        return out

    def field_of_state(self, state):
        terms = {}
        for word, c in state.items():
            mono = tuple((g, -m - 1) for g, m in word)
            fac = 1
            for _, d in mono:
                fac *= _factorial(d)
            terms[mono] = c * scalar(rat(1, fac))
        return Field(terms)

    def nth(self, a, b, n):
        """The n-th product of two Fields, computed purely at the mode level."""
        sa, sb = self.state_of_field(a), self.state_of_field(b)
        out = {}
        for wa, ca in sa.items():
            for wb, cb in sb.items():
                self._add_scaled(out, self.word_product(wa, wb, n), ca * cb)
        return self.field_of_state(out)
