"""Built-in algebra presets, algebra-document loading, the Sugawara
construction, and automorphism verification.

Presets cover every algebra the verification suites use: the free-field
families, affine sl2, the N=2 and small N=4 superconformal algebras at
formal level k, and the two k-free large-level limit algebras.  Affine
presets are limited to sl2 with hard-coded structure constants; anything
else comes in through algebra documents.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .engine import AlgebraSpec, Context, complete_table, tensor
from .fields import (Field, GeneratorDecl, GeneratorSet, monomial_field,
                     parse_field, weight_of, parity_of)
from .scalars import K, ONE, scalar

DATA_DIR = Path(__file__).parent / "data"


class UnknownPresetError(ValueError):
    pass


class AlgebraDocumentError(ValueError):
    pass


def _gen(name, parity, weight, charge=0):
    return GeneratorDecl(name, parity, Fraction(weight), charge)


def _field(gens, word):
    return monomial_field(tuple((gens.lookup(n), d) for n, d in word))


def _n4_generators():
    return GeneratorSet([
        _gen("J", "even", 1, 0),
        _gen("Jp", "even", 1, +1),
        _gen("Jm", "even", 1, -1),
        _gen("T", "even", 2, 0),
        _gen("Gp", "odd", Fraction(3, 2), +1),
        _gen("Gm", "odd", Fraction(3, 2), -1),
        _gen("Qp", "odd", Fraction(3, 2), 0),
        _gen("Qm", "odd", Fraction(3, 2), 0),
    ])


def _virasoro_rows(gens, c_over_2):
    """The T(z)X(w) rows: every generator is primary except T itself."""
    t = gens.lookup("T")
    rows = {(t, t): {3: Field({(): c_over_2}),
                     1: monomial_field(((t, 0),)).scale(scalar(2)),
                     0: monomial_field(((t, 1),))}}
    for i, decl in enumerate(gens.decls):
        if i == t:
            continue
        w = decl.weight
        rows[(t, i)] = {1: monomial_field(((i, 0),)).scale(scalar(w.numerator,
                                                                 w.denominator)),
                        0: monomial_field(((i, 1),))}
    return rows


def _n4_spec():
    gens = _n4_generators()
    g = gens.lookup
    one = Field({(): ONE})

    def f(*word):
        return _field(gens, word)

    table = _virasoro_rows(gens, scalar(3) * K)  # c = 6k
    table.update({
        (g("J"), g("J")): {1: one.scale(scalar(2) * K)},
        (g("J"), g("Jp")): {0: f(("Jp", 0)).scale(scalar(2))},
        (g("J"), g("Jm")): {0: f(("Jm", 0)).scale(scalar(-2))},
        (g("Jp"), g("Jm")): {1: one.scale(K), 0: f(("J", 0))},
        (g("J"), g("Gp")): {0: f(("Gp", 0))},
        (g("J"), g("Gm")): {0: f(("Gm", 0)).scale(scalar(-1))},
        (g("J"), g("Qp")): {0: f(("Qp", 0)).scale(scalar(-1))},
        (g("J"), g("Qm")): {0: f(("Qm", 0))},
        (g("Jp"), g("Gm")): {0: f(("Qm", 0)).scale(scalar(-1))},
        (g("Jp"), g("Qp")): {0: f(("Gp", 0))},
        (g("Jm"), g("Qm")): {0: f(("Gm", 0)).scale(scalar(-1))},
        (g("Jm"), g("Gp")): {0: f(("Qp", 0))},
        (g("Gp"), g("Qm")): {1: f(("Jp", 0)).scale(scalar(2)),
                             0: f(("Jp", 1))},
        (g("Qp"), g("Gm")): {1: f(("Jm", 0)).scale(scalar(2)),
                             0: f(("Jm", 1))},
        (g("Qp"), g("Qm")): {2: one.scale(scalar(2) * K),
                             1: f(("J", 0)).scale(scalar(-1)),
                             0: f(("T", 0)) - f(("J", 1)).scale(scalar(1, 2))},
        (g("Gp"), g("Gm")): {2: one.scale(scalar(2) * K),
                             1: f(("J", 0)),
                             0: f(("T", 0)) + f(("J", 1)).scale(scalar(1, 2))},
    })
    return AlgebraSpec("n4", gens, table, conformal="T")


def _n2_spec():
    gens = GeneratorSet([
        _gen("J", "even", 1, 0),
        _gen("T", "even", 2, 0),
        _gen("Gp", "odd", Fraction(3, 2), +1),
        _gen("Gm", "odd", Fraction(3, 2), -1),
    ])
    g = gens.lookup
    one = Field({(): ONE})

    def f(*word):
        return _field(gens, word)

    table = _virasoro_rows(gens, scalar(3) * K)
    table.update({
        (g("J"), g("J")): {1: one.scale(scalar(2) * K)},
        (g("J"), g("Gp")): {0: f(("Gp", 0))},
        (g("J"), g("Gm")): {0: f(("Gm", 0)).scale(scalar(-1))},
        (g("Gp"), g("Gm")): {2: one.scale(scalar(2) * K),
                             1: f(("J", 0)),
                             0: f(("T", 0)) + f(("J", 1)).scale(scalar(1, 2))},
    })
    return AlgebraSpec("n2", gens, table, conformal="T")


def _affine_sl2_spec():
    gens = GeneratorSet([
        _gen("J", "even", 1, 0),
        _gen("Jp", "even", 1, +1),
        _gen("Jm", "even", 1, -1),
    ])
    g = gens.lookup
    one = Field({(): ONE})

    def f(*word):
        return _field(gens, word)

    table = {
        (g("J"), g("J")): {1: one.scale(scalar(2) * K)},
        (g("J"), g("Jp")): {0: f(("Jp", 0)).scale(scalar(2))},
        (g("J"), g("Jm")): {0: f(("Jm", 0)).scale(scalar(-2))},
        (g("Jp"), g("Jm")): {1: one.scale(K), 0: f(("J", 0))},
    }
    return AlgebraSpec("affine_sl2", gens, table)


def _limit_T_spec():
    gens = GeneratorSet([_gen("T", "even", 2, 0)])
    one = Field({(): ONE})
    table = {(0, 0): {3: one.scale(scalar(6))}}
    return AlgebraSpec("limit_T", gens, table)


def _limit_godd4_spec():
    # charges are the outer-torus eigenvalues: Gp, Qp carry +1; Gm, Qm carry -1
    gens = GeneratorSet([
        _gen("Gp", "odd", Fraction(3, 2), +1),
        _gen("Gm", "odd", Fraction(3, 2), -1),
        _gen("Qp", "odd", Fraction(3, 2), +1),
        _gen("Qm", "odd", Fraction(3, 2), -1),
    ])
    g = gens.lookup
    one = Field({(): ONE})
    table = {
        (g("Gp"), g("Gm")): {2: one.scale(scalar(2))},
        (g("Qp"), g("Qm")): {2: one.scale(scalar(2))},
    }
    return AlgebraSpec("limit_godd4", gens, table)


def _names(base, n):
    if n == 1:
        return [base]
    return [f"{base}{i}" for i in range(1, n + 1)]


def _pairwise_spec(name, anames, bnames, parity, weight, pole, bcoef, ccoef):
    """A free-field family: a_i(z)b_j(w) ~ bcoef d_ij/(z-w)^pole and
    b_i(z)a_j(w) ~ ccoef d_ij/(z-w)^pole."""
    decls = ([_gen(a, parity, weight) for a in anames]
             + [_gen(b, parity, weight) for b in bnames])
    gens = GeneratorSet(decls)
    n = len(anames)
    one = Field({(): ONE})
    table = {}
    for i in range(n):
        table[(i, n + i)] = {pole - 1: one.scale(scalar(bcoef))}
        table[(n + i, i)] = {pole - 1: one.scale(scalar(ccoef))}
    return AlgebraSpec(name, gens, table)


def preset(name, *args):
    """A completed AlgebraSpec for a named built-in algebra.

    Accepts either preset("bc", 1) or the call-style string preset("bc(1)").
    """
    if "(" in name:
        base, rest = name.split("(", 1)
        if not rest.endswith(")"):
            raise UnknownPresetError(name)
        args = tuple(int(x) for x in rest[:-1].split(",") if x.strip())
        name = base
    name = name.strip()
    if name == "heisenberg":
        n = args[0] if args else 1
        hs = _names("h", n)
        decls = [_gen(h, "even", 1) for h in hs]
        gens = GeneratorSet(decls)
        one = Field({(): ONE})
        table = {(i, i): {1: one} for i in range(n)}
        spec = AlgebraSpec(f"heisenberg{n}", gens, table)
    elif name == "symplectic_fermion":
        n = args[0] if args else 1
        spec = _pairwise_spec(f"symplectic_fermion{n}", _names("e", n),
                              _names("f", n), "odd", 1, 2, 1, -1)
    elif name == "beta_gamma":
        n = args[0] if args else 1
        spec = _pairwise_spec(f"beta_gamma{n}", _names("beta", n),
                              _names("gamma", n), "even", Fraction(1, 2),
                              1, 1, -1)
    elif name == "bc":
        n = args[0] if args else 1
        spec = _pairwise_spec(f"bc{n}", _names("b", n), _names("c", n),
                              "odd", Fraction(1, 2), 1, 1, 1)
    elif name == "affine_sl2":
        spec = _affine_sl2_spec()
    elif name == "n2":
        spec = _n2_spec()
    elif name == "n4":
        spec = _n4_spec()
    elif name == "limit_T":
        spec = _limit_T_spec()
    elif name == "limit_Godd4" or name == "limit_godd4":
        spec = _limit_godd4_spec()
    else:
        raise UnknownPresetError(name)
    return complete_table(spec)


def preset_context(name, *args):
    return Context(preset(name, *args), complete=False)


def limit_coset_context():
    """limit_T (x) limit_Godd4, the large-level limit of the affine coset."""
    spec = tensor(preset("limit_T"), preset("limit_Godd4"), name="limit_coset")
    return Context(spec)


# ---------------------------------------------------------------------------
# algebra documents
# ---------------------------------------------------------------------------

def load_algebra(source):
    """Load an algebra document (JSON) into a completed AlgebraSpec.

    The document has keys: name, parameters (only ["k"] supported),
    generators (name/parity/weight/charge records), conformal (name or
    null), opes (left/right/poles with pole order -> field expression).
    Omitted pairs are regular; omitted orientations are completed by
    skew-symmetry.
    """
    if isinstance(source, (str, Path)):
        path = resolve_algebra_path(source)
        doc = json.loads(Path(path).read_text())
    else:
        doc = source
    for key in ("name", "generators", "opes"):
        if key not in doc:
            raise AlgebraDocumentError(f"missing key {key!r}")
    params = doc.get("parameters", [])
    if any(p != "k" for p in params):
        raise AlgebraDocumentError(f"unsupported parameters {params!r}")
    decls = []
    for g in doc["generators"]:
        try:
            decls.append(GeneratorDecl(g["name"], g["parity"],
                                       Fraction(str(g["weight"])),
                                       int(g.get("charge", 0))))
        except (KeyError, ValueError) as exc:
            raise AlgebraDocumentError(f"bad generator record {g!r}: {exc}")
    gens = GeneratorSet(decls)
    table = {}
    for rec in doc["opes"]:
        i = gens.lookup(rec["left"])
        j = gens.lookup(rec["right"])
        if (i, j) in table:
            raise AlgebraDocumentError(
                f"duplicate OPE entry for ({rec['left']}, {rec['right']})")
        poles = {}
        for order_text, expr in rec.get("poles", {}).items():
            order = int(order_text)
            if order < 1:
                raise AlgebraDocumentError(f"pole order {order} < 1")
            poles[order - 1] = parse_field(expr, gens)
        table[(i, j)] = poles
    spec = AlgebraSpec(doc["name"], gens, table, doc.get("conformal"))
    return complete_table(spec)


def resolve_algebra_path(source):
    """A document path; bare names fall back to the shipped data directory."""
    p = Path(source)
    if p.exists():
        return p
    shipped = DATA_DIR / "algebras" / p.name
    if shipped.exists():
        return shipped
    raise FileNotFoundError(f"algebra document {source!r} not found")


# ---------------------------------------------------------------------------
# Sugawara construction
# ---------------------------------------------------------------------------

def sugawara_vector(ctx):
    """The canonical Virasoro field of affine sl2 at non-critical level.

    With the normalized form (J,J)=2, (Jp,Jm)=1 the dual bases give
    L = 1/(2(k+2)) ( 1/2 :JJ: + :JpJm: + :JmJp: ); central charge 3k/(k+2).
    """
    gens = ctx.gens
    for name in ("J", "Jp", "Jm"):
        gens.lookup(name)
    level = K if ctx.spec.level is None else scalar(ctx.spec.level)
    denom = (level + scalar(2)) * scalar(2)
    if denom.is_zero():
        raise ZeroDivisionError("critical level k = -2 has no Sugawara vector")
    pref = ONE / denom
    J = ctx.generator("J")
    Jp = ctx.generator("Jp")
    Jm = ctx.generator("Jm")
    quad = (ctx.normal_order(J, J).scale(scalar(1, 2))
            + ctx.normal_order(Jp, Jm) + ctx.normal_order(Jm, Jp))
    return quad.scale(pref)


# ---------------------------------------------------------------------------
# automorphism verification
# ---------------------------------------------------------------------------

def apply_generator_map(ctx, phi, f):
    """Extend a generator map multiplicatively to a Field."""
    out = Field()
    for mono, c in f.t.items():
        if not mono:
            out = out + Field({(): c})
            continue
        parts = []
        for g, d in mono:
            img = phi[g]
            parts.append(ctx.derivative(img, d) if d else img)
        word = ctx.normal_order_word(parts)
        out = out + word.scale(c)
    return out


def check_automorphism(ctx, phi):
    """True iff phi(a)_(n) phi(b) = phi(a_(n) b) for all generator pairs.

    phi maps generator names (or indices) to Fields and must be defined on
    every generator.  Returns (ok, residuals) where residuals lists
    (left, right, n, residual Field) for every failing product.
    """
    gens = ctx.gens
    images = {}
    for key, f in phi.items():
        idx = gens.lookup(key) if isinstance(key, str) else key
        images[idx] = f
    for i, decl in enumerate(gens.decls):
        if i not in images:
            raise ValueError(f"map not defined on generator {decl.name}")
        img = images[i]
        if img and weight_of(gens, img) != decl.weight:
            raise ValueError(f"image of {decl.name} has wrong weight")
        if img and parity_of(gens, img) != gens.parities[i]:
            raise ValueError(f"image of {decl.name} has wrong parity")
    residuals = []
    ws = gens.weights
    for i in range(len(gens)):
        for j in range(len(gens)):
            a = monomial_field(((i, 0),))
            b = monomial_field(((j, 0),))
            for n in range(int(ws[i] + ws[j])):
                lhs = ctx.nth(images[i], images[j], n)
                rhs = apply_generator_map(ctx, images,
                                          ctx.nth_mono(((i, 0),), ((j, 0),), n))
                res = lhs - rhs
                if res:
                    residuals.append((gens[i].name, gens[j].name, n, res))
    return not residuals, residuals


def theta_map(ctx):
    """The involution J -> -J, Jp <-> Jm, Gp <-> Gm (and Qp -> -Qm, Qm -> -Qp,
    the action induced on the remaining generators)."""
    g = ctx.generator
    return {
        "J": g("J").scale(scalar(-1)),
        "Jp": g("Jm"),
        "Jm": g("Jp"),
        "T": g("T"),
        "Gp": g("Gm"),
        "Gm": g("Gp"),
        "Qp": g("Qm").scale(scalar(-1)),
        "Qm": g("Qp").scale(scalar(-1)),
    }


def omega_map(ctx, a0, a1, b0, b1):
    """The outer map with matrix rows (a0, a1; b0, b1) on the weight-3/2
    doublets, fixing J, Jp, Jm, T pointwise."""
    g = ctx.generator
    a0, a1 = scalar(a0), scalar(a1)
    b0, b1 = scalar(b0), scalar(b1)
    return {
        "J": g("J"), "Jp": g("Jp"), "Jm": g("Jm"), "T": g("T"),
        "Gp": g("Gp").scale(a0) + g("Qm").scale(a1),
        "Qm": g("Gp").scale(b0) + g("Qm").scale(b1),
        "Qp": g("Qp").scale(a0) - g("Gm").scale(a1),
        "Gm": g("Qp").scale(-b0) + g("Gm").scale(b1),
    }
