from fractions import Fraction

import pytest

from voa.engine import Context
from voa.fields import vacuum_field
from voa.lab import central_charge
from voa.library import (AlgebraDocumentError, UnknownPresetError,
                         check_automorphism, load_algebra, omega_map, preset,
                         preset_context, sugawara_vector, theta_map,
                         limit_coset_context, DATA_DIR)
from voa.scalars import K, parse_scalar, scalar


def test_n4_preset_shape(n4):
    decls = n4.gens.decls
    assert [d.name for d in decls] == ["J", "Jp", "Jm", "T",
                                       "Gp", "Gm", "Qp", "Qm"]
    assert [d.charge for d in decls] == [0, 1, -1, 0, 1, -1, 0, 0]
    assert [d.parity for d in decls] == ["even"] * 4 + ["odd"] * 4
    assert decls[4].weight == Fraction(3, 2)


def test_bc_preset():
    ctx = preset_context("bc", 1)
    b, c = ctx.generator("b"), ctx.generator("c")
    assert ctx.nth(b, c, 0) == vacuum_field()
    assert ctx.nth(c, b, 0) == vacuum_field()
    assert not ctx.check_jacobi()


def test_limit_godd4_preset():
    ctx = preset_context("limit_Godd4")
    gp, gm = ctx.generator("Gp"), ctx.generator("Gm")
    qp, qm = ctx.generator("Qp"), ctx.generator("Qm")
    assert ctx.nth(gp, gm, 2) == vacuum_field(scalar(2))
    assert ctx.nth(qp, qm, 2) == vacuum_field(scalar(2))
    for n in (0, 1):
        assert ctx.nth(gp, gm, n).is_zero()
        assert ctx.nth(gp, qp, n).is_zero()


def test_unknown_preset():
    with pytest.raises(UnknownPresetError):
        preset("nosuch")


def test_call_style_preset_names():
    assert len(preset("heisenberg(2)").gens) == 2
    assert len(preset("bc(3)").gens) == 6


@pytest.mark.parametrize("name", ["heisenberg", "symplectic_fermion",
                                  "beta_gamma", "bc", "affine_sl2", "n2",
                                  "n4", "limit_T", "limit_Godd4"])
def test_every_preset_passes_jacobi(name):
    ctx = Context(preset(name), complete=False)
    assert not ctx.check_jacobi()


def test_shipped_documents_match_presets():
    for doc, pname in [("n4.alg", "n4"), ("n2.alg", "n2"),
                       ("sl2.alg", "affine_sl2"), ("limit_T.alg", "limit_T"),
                       ("limit_godd4.alg", "limit_Godd4"),
                       ("heisenberg1.alg", "heisenberg"),
                       ("bc1.alg", "bc"),
                       ("symplectic_fermion1.alg", "symplectic_fermion")]:
        loaded = load_algebra(DATA_DIR / "algebras" / doc)
        built = preset(pname)
        assert loaded.table == built.table, doc
        assert loaded.conformal == built.conformal


def test_document_errors():
    with pytest.raises(AlgebraDocumentError):
        load_algebra({"name": "x", "generators": []})  # no opes
    with pytest.raises(Exception, match="unknown generator|Xx"):
        load_algebra({
            "name": "x", "generators": [
                {"name": "a", "parity": "even", "weight": "1"}],
            "opes": [{"left": "a", "right": "a", "poles": {"2": "Xx"}}]})
    with pytest.raises(AlgebraDocumentError):
        load_algebra({"name": "x", "parameters": ["q"], "generators": [],
                      "opes": []})


def test_n4_restricts_to_sl2(n4):
    sl2 = preset("affine_sl2")
    names = ["J", "Jp", "Jm"]
    lut = {n4.gens.lookup(n): sl2.gens.lookup(n) for n in names}
    for (i, j), poles in n4.spec.table.items():
        if i in lut and j in lut:
            expect = sl2.table[(lut[i], lut[j])]
            got = {n: {tuple((lut[g], d) for g, d in m): c
                       for m, c in f.t.items()}
                   for n, f in poles.items()}
            assert got == {n: dict(f.t) for n, f in expect.items()}


def test_n4_restricts_to_n2(n4):
    n2 = preset("n2")
    names = ["J", "T", "Gp", "Gm"]
    lut = {n4.gens.lookup(n): n2.gens.lookup(n) for n in names}
    for (i, j), poles in n4.spec.table.items():
        if i in lut and j in lut:
            expect = n2.table[(lut[i], lut[j])]
            got = {n: {tuple((lut[g], d) for g, d in m): c
                       for m, c in f.t.items()}
                   for n, f in poles.items()}
            assert got == {n: dict(f.t) for n, f in expect.items()}


def test_sugawara(sl2):
    L = sugawara_vector(sl2)
    assert central_charge(sl2, L) == parse_scalar("3*k/(k+2)")
    assert central_charge(sl2, L).evaluate(1) == 1
    for name in ("J", "Jp", "Jm"):
        g = sl2.generator(name)
        assert sl2.nth(L, g, 1) == g
        assert sl2.nth(L, g, 0) == sl2.derivative(g)


def test_sugawara_critical_level(sl2):
    with pytest.raises(ZeroDivisionError):
        sugawara_vector(sl2.specialize(Fraction(-2)))


def test_theta_automorphism(n4):
    ok, residuals = check_automorphism(n4, theta_map(n4))
    assert ok, residuals


def test_omega_identity(n4):
    ok, _ = check_automorphism(n4, omega_map(n4, 1, 0, 0, 1))
    assert ok


def test_omega_random_det_one(n4):
    import random
    rng = random.Random(41)
    count = 0
    while count < 5:
        a0 = Fraction(rng.randrange(-6, 7), rng.randrange(1, 4))
        a1 = Fraction(rng.randrange(-6, 7), rng.randrange(1, 4))
        b0 = Fraction(rng.randrange(-6, 7), rng.randrange(1, 4))
        if a0 == 0:
            continue
        b1 = (1 + a1 * b0) / a0
        ok, residuals = check_automorphism(n4, omega_map(n4, a0, a1, b0, b1))
        assert ok, (a0, a1, b0, b1, residuals[:2])
        count += 1


def test_omega_determinant_two_fails(n4):
    # a0 b1 - a1 b0 = 2 must break the weight-3/2 OPEs
    ok, residuals = check_automorphism(n4, omega_map(n4, 2, 0, 0, 1))
    assert not ok and residuals


def test_identity_map_every_preset():
    for name in ("heisenberg", "bc", "affine_sl2", "n2", "n4"):
        ctx = preset_context(name)
        phi = {d.name: ctx.generator(d.name) for d in ctx.gens.decls}
        ok, _ = check_automorphism(ctx, phi)
        assert ok, name


def test_limit_coset_tensor():
    ctx = limit_coset_context()
    assert ctx.gens.names() == ["T", "Gp", "Gm", "Qp", "Qm"]
    # cross pairs are regular
    assert ctx.nth(ctx.generator("T"), ctx.generator("Gp"), 0).is_zero()
    assert ctx.nth(ctx.generator("T"), ctx.generator("T"), 3) == \
        vacuum_field(scalar(6))
    assert not ctx.check_jacobi()
