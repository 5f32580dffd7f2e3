"""Sparse parametric linear algebra over Q(k).

Columns are sparse vectors (dict row-key -> LevelScalar).  Elimination keeps
an echelon list of pivots; pivot entries are chosen to minimize denominator
and numerator degree growth.  The rational roots of every pivot's numerator
and denominator are accumulated as candidate exceptional levels; callers
confirm or discard each candidate by re-solving numerically at that level
(generic rank statements over Q(k) can fail at finitely many k, which is
exactly the exceptional-level phenomenon).
"""

from __future__ import annotations

from .scalars import LevelPoly, ZERO, rational_roots


class LinearSystem:
    """Incremental column echelon form with representation tracking."""

    def __init__(self, track_candidates=True):
        self.pivots = []  # (row_key, vector, combo)
        self.candidates = set()
        self.residual_factors = []
        self.track_candidates = track_candidates
        self.n_inserted = 0

    def _reduce(self, vec, combo):
        vec = dict(vec)
        for row, pvec, pcombo in self.pivots:
            c = vec.get(row)
            if c is None or c.is_zero():
                continue
            f = c / pvec[row]
            for r, s in pvec.items():
                t = vec.get(r)
                u = (ZERO - f * s) if t is None else t - f * s
                if u.is_zero():
                    vec.pop(r, None)
                else:
                    vec[r] = u
            if pcombo is not None and combo is not None:
                for idx, s in pcombo.items():
                    t = combo.get(idx)
                    u = (ZERO - f * s) if t is None else t - f * s
                    if u.is_zero():
                        combo.pop(idx, None)
                    else:
                        combo[idx] = u
        return vec, combo

    def _note_candidates(self, entry):
        if not self.track_candidates:
            return
        for poly in (entry.num, entry.den):
            if len(poly) > 1:
                roots, residual = rational_roots(LevelPoly(poly))
                self.candidates.update(roots)
                self.residual_factors.extend(residual)

    @staticmethod
    def _pivot_row(vec):
        best = None
        best_key = None
        for row, s in vec.items():
            key = (len(s.den), len(s.num), row)
            if best_key is None or key < best_key:
                best, best_key = row, key
        return best

    def insert(self, vec, include_combo=True):
        """Add a column.  Returns None if it was independent, else the kernel
        combination expressing it in terms of earlier columns (idx -> coeff,
        including this column with coefficient 1)."""
        from .scalars import ONE
        idx = self.n_inserted
        self.n_inserted += 1
        combo = {idx: ONE} if include_combo else None
        vec, combo = self._reduce(vec, combo)
        if not vec:
            return combo if combo is not None else {}
        row = self._pivot_row(vec)
        self._note_candidates(vec[row])
        self.pivots.append((row, vec, combo))
        return None

    def express(self, target):
        """Write target as a combination of inserted columns.

        Returns (coeffs, residual): coeffs maps column index -> coefficient
        and residual is the unreachable remainder (empty on success).
        """
        vec = dict(target)
        coeffs = {}
        for row, pvec, pcombo in self.pivots:
            c = vec.get(row)
            if c is None or c.is_zero():
                continue
            f = c / pvec[row]
            for r, s in pvec.items():
                t = vec.get(r)
                u = (ZERO - f * s) if t is None else t - f * s
                if u.is_zero():
                    vec.pop(r, None)
                else:
                    vec[r] = u
            if pcombo:
                for idx, s in pcombo.items():
                    t = coeffs.get(idx)
                    u = f * s if t is None else t + f * s
                    if u.is_zero():
                        coeffs.pop(idx, None)
                    else:
                        coeffs[idx] = u
        return coeffs, vec

    def contains(self, target):
        _, residual = self.express(target)
        return not residual

    @property
    def rank(self):
        return len(self.pivots)


def span_solve(columns, target):
    """One-shot: express target in the span of columns.

    Returns (coeffs | None, kernel, candidates, residual_factors) where
    coeffs maps column index -> LevelScalar (None when target is outside the
    span at generic k) and kernel lists the linear dependencies among the
    columns themselves.
    """
    sys = LinearSystem()
    kernel = []
    for col in columns:
        dep = sys.insert(col)
        if dep is not None:
            kernel.append(dep)
    coeffs, residual = sys.express(target)
    if residual:
        return None, kernel, set(sys.candidates), list(sys.residual_factors)
    for s in coeffs.values():
        if len(s.den) > 1:
            roots, resid = rational_roots(LevelPoly(s.den))
            sys.candidates.update(roots)
            sys.residual_factors.extend(resid)
    return coeffs, kernel, set(sys.candidates), list(sys.residual_factors)


def nullspace(columns):
    """Kernel vectors among the columns, plus pivot-root candidates."""
    sys = LinearSystem()
    kernel = []
    for col in columns:
        dep = sys.insert(col)
        if dep is not None:
            kernel.append(dep)
    return kernel, set(sys.candidates)
