import numpy as np
import pytest

from phimod import linalg as la
from phimod.field import fq_make
from phimod.flmod import ModuleMap, cyclic_module, mon_ideal, random_module, submodule_from_columns
from phimod.koszul import tor_dims, tor_semilinear
from phimod.phi import (
    cyclic_pullback_iso,
    pullback,
    pullback_map,
    qpow,
    ram_twist,
    twist_c_matrix,
    twist_ideal,
    unit_map_matrix,
    unram_twist,
)

F2 = fq_make(2, 1)
F3 = fq_make(3, 1)
F4 = fq_make(2, 2)


def test_twist_ideal_ram_square():
    # applying the ramified twist twice to (X^{r+1}, Y) gives (X^{p(r+1)}, Y^p)
    for p, F in [(2, F2), (3, F3)]:
        for r in range(p):
            t = ram_twist(F, p)
            I = mon_ideal(2, (r + 1, 0), (0, 1))
            J = twist_ideal(t, twist_ideal(t, I))
            exps = sorted(J.exponents())
            assert exps == sorted([(p * (r + 1), 0), (0, p)])


def test_twist_ideal_unram():
    F9 = fq_make(3, 2)
    t = unram_twist(F9, 3)
    I = mon_ideal(2, (2, 0), (0, 3))  # (X^{r0+1}, Y^{r1+1}) with r0=1, r1=2
    J = twist_ideal(t, I)
    assert sorted(J.exponents()) == sorted([(0, 3 * 2), (3 * 3, 0)])


def test_twist_ideal_qpow():
    t = qpow(F2, 2, 2)
    J = twist_ideal(t, mon_ideal(2, (1, 0), (0, 1)))
    assert sorted(J.exponents()) == [(0, 2), (2, 0)]


def test_square_composition():
    t = ram_twist(F3, 3, u=2)
    t2 = t.square()
    I = mon_ideal(2, (2, 0), (0, 1))
    a = twist_ideal(t, twist_ideal(t, I))
    b = twist_ideal(t2, I)
    assert sorted(a.gens) == sorted(b.gens)


def test_pullback_dimension_and_rank():
    k = cyclic_module(F4, mon_ideal(2, (1, 0), (0, 1)))
    t = unram_twist(F4, 2)
    P = pullback(t, k)
    assert P.dim == 4  # rank p^2
    kr = cyclic_module(F3, mon_ideal(2, (1, 0), (0, 1)))
    tr = ram_twist(F3, 3)
    assert pullback(tr, kr).dim == 3
    M = random_module(F2, 2, 3, 5)
    tq = qpow(F2, 2, 2)
    assert pullback(tq, M).dim == 4 * 3


def test_pullback_of_residue_field_is_cyclic_quotient():
    k = cyclic_module(F4, mon_ideal(2, (1, 0), (0, 1)))
    t = unram_twist(F4, 2)
    P = pullback(t, k)
    iso = cyclic_pullback_iso(t, mon_ideal(2, (1, 0), (0, 1)), src=P)
    assert la.rank(F4, iso.mat) == P.dim == 4


def test_pullback_invariants_checked():
    # pullback output satisfies module invariants
    M = random_module(F3, 2, 4, 11)
    t = ram_twist(F3, 3)
    P = pullback(t, M)
    P._check_invariants()


def test_pullback_map_exactness():
    rng = np.random.default_rng(8)
    t = qpow(F3, 2, 3)
    for seed in range(10):
        M = random_module(F3, 2, 5, seed)
        f = ModuleMap(M, M, M.monomial_op((1, 0)))
        pf = pullback_map(t, f)
        r = t.rank
        assert la.rank(F3, pf.mat) == r * la.rank(F3, f.mat)
        # kernel dim also scales by the rank
        assert pf.mat.shape[0] - la.rank(F3, pf.mat) == r * (M.dim - la.rank(F3, f.mat))


def test_pullback_preserves_tor_dims():
    for seed in range(6):
        M = random_module(F2, 2, 3, seed)
        t = ram_twist(F2, 2)
        P = pullback(t, M)
        assert tor_dims(P) == tor_dims(M)


def test_unit_map_is_semilinear_and_tor_iso():
    for F, t in [(F2, ram_twist(F2, 2)), (F4, unram_twist(F4, 2)), (F3, qpow(F3, 2, 3))]:
        M = cyclic_module(F, mon_ideal(2, (2, 0), (0, 1)))
        P = pullback(t, M)
        g = unit_map_matrix(t, M)
        C = twist_c_matrix(t, P)
        for i in range(3):
            U = tor_semilinear(C, g, M, P, i)
            assert U.shape[0] == U.shape[1]
            assert la.rank(F, U) == U.shape[0]


def test_cyclic_pullback_iso_examples():
    # ramified: (X^{r+1}, Y) pulls back to (X^p, Y^{r+1})
    for p, F in [(2, F2), (3, F3)]:
        t = ram_twist(F, p, u=1)
        for r in range(p):
            I = mon_ideal(2, (r + 1, 0), (0, 1))
            iso = cyclic_pullback_iso(t, I)
            J = twist_ideal(t, I)
            assert sorted(J.exponents()) == sorted([(p, 0), (0, r + 1)])
            assert la.rank(F, iso.mat) == iso.target.dim
    # qpow: (X^a, Y^b) -> (X^qa, Y^qb)
    t = qpow(F2, 2, 2)
    I = mon_ideal(2, (2, 0), (0, 1))
    iso = cyclic_pullback_iso(t, I)
    assert iso.target.dim == 4 * 2


def test_pullback_respects_short_exact_sequences():
    rng = np.random.default_rng(3)
    t = ram_twist(F3, 3)
    for seed in range(8):
        M = random_module(F3, 2, 5, seed)
        v = la.rand_mat(F3, rng, M.dim, 1)
        S, incl = submodule_from_columns(M, v)
        if S.dim in (0, M.dim):
            continue
        pincl = pullback_map(t, ModuleMap(S, M, incl.mat))
        assert la.rank(F3, pincl.mat) == t.rank * S.dim
