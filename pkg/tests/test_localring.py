import itertools

import pytest

from phimod.field import fq_make
from phimod.localring import coset_reps, digit_decompose, make_ring


@pytest.mark.parametrize(
    "case,p,m", [("unram", 2, 1), ("unram", 2, 2), ("unram", 3, 2), ("ram", 2, 3), ("ram", 3, 2), ("ram", 3, 4)]
)
def test_ring_size_and_nilpotence(case, p, m):
    R = make_ring(case, p, m)
    reps = coset_reps(R)
    assert len(reps) == R.q**m
    assert len(set(reps)) == len(reps)
    w = R.uniformizer()
    assert R.pow(w, m) == R.zero()
    if m >= 1:
        assert R.pow(w, m - 1) != R.zero()


def test_ramified_uniformizer_squares_to_up():
    for p, u in [(2, 1), (3, 1), (3, 2)]:
        R = make_ring("ram", p, 4, u)
        w = R.uniformizer()
        assert R.mul(w, w) == R.element(u * p, 0)


def test_unramified_uniformizer_is_p():
    R = make_ring("unram", 3, 3)
    assert R.uniformizer() == R.element(3, 0)


def test_teichmuller_idempotents():
    for case, p in [("unram", 2), ("unram", 3), ("ram", 2), ("ram", 3)]:
        R = make_ring(case, p, 3)
        assert R.teichmuller(0) == R.zero()
        assert R.teichmuller(1) == R.one()


def test_teichmuller_z9_example():
    # t in Z/9 with t^3 = t and t = 2 mod 3 is t = 8
    R = make_ring("ram", 3, 4)  # a-component lives mod 3^2 = 9
    t = R.teichmuller(2)
    assert t == R.element(8, 0)


def test_teichmuller_f4_level2_fixed_point():
    R = make_ring("unram", 2, 2)
    g = 2  # generator code of F_4
    t = R.teichmuller(g)
    assert R.pow(t, 4) == t
    assert R.residue(t) == g


@pytest.mark.parametrize("case,p", [("unram", 2), ("unram", 3), ("ram", 2), ("ram", 3)])
def test_teichmuller_is_multiplicative(case, p):
    R = make_ring(case, p, 3)
    F = R.residue_field
    for lam, mu in itertools.product(F.elements(), F.elements()):
        assert R.mul(R.teichmuller(lam), R.teichmuller(mu)) == R.teichmuller(F.mul(lam, mu))


def test_coset_reps_level_zero():
    R = make_ring("unram", 2, 0)
    assert coset_reps(R) == [R.zero()]


def test_coset_reps_unram_level_one_are_teichmullers():
    R = make_ring("unram", 2, 1)
    reps = coset_reps(R)
    assert reps == [R.teichmuller(lam) for lam in range(4)]


def test_digit_roundtrip_exhaustive():
    for case, p, m in [("unram", 2, 2), ("ram", 3, 3), ("unram", 3, 2), ("ram", 2, 4)]:
        R = make_ring(case, p, m)
        for i in range(R.size):
            digits = R.index_digits(i)
            assert R.to_digits(R.from_digits(digits)) == digits


def test_digit_decompose_examples():
    # canonical element at level m decomposes with zero carry
    R2 = make_ring("unram", 3, 2)
    z = R2.from_digits([1, 0])
    idx, carry = digit_decompose(R2, z, 1)
    assert (idx, carry) == (1, 0)

    # ramified p=2: z = 1 + ϖ at m=1 -> (rep 1, carry 1)
    R = make_ring("ram", 2, 2)
    z = R.add(R.one(), R.uniformizer())
    idx, carry = digit_decompose(R, z, 1)
    assert (idx, carry) == (1, 1)

    # unramified p=3: z = τ(1) + τ(1)p at m=1 -> (rep 1, carry 1)
    R = make_ring("unram", 3, 2)
    z = R.add(R.one(), R.element(3, 0))
    idx, carry = digit_decompose(R, z, 1)
    assert (idx, carry) == (1, 1)


def test_digit_decompose_is_bijective_bookkeeping():
    # every level-(m+1) element = unique (level-m rep, carry) pair
    for case, p, m in [("unram", 2, 1), ("ram", 3, 2)]:
        upper = make_ring(case, p, m + 1)
        seen = set()
        for i in range(upper.size):
            z = upper.from_digits(upper.index_digits(i))
            seen.add(digit_decompose(upper, z, m))
        assert len(seen) == upper.size
