import numpy as np
import pytest

from phimod import linalg as la
from phimod.field import fq_make

FIELDS = [fq_make(2, 1), fq_make(3, 1), fq_make(2, 2), fq_make(3, 2)]


@pytest.mark.parametrize("F", FIELDS)
def test_matmul_agrees_with_scalar_arithmetic(F):
    rng = np.random.default_rng(7)
    A = la.rand_mat(F, rng, 4, 3)
    B = la.rand_mat(F, rng, 3, 5)
    C = la.matmul(F, A, B)
    for i in range(4):
        for j in range(5):
            acc = 0
            for k in range(3):
                acc = F.add(acc, F.mul(int(A[i, k]), int(B[k, j])))
            assert acc == int(C[i, j])


@pytest.mark.parametrize("F", FIELDS)
def test_rref_solve_nullspace_roundtrip(F):
    rng = np.random.default_rng(11)
    for trial in range(20):
        n, m = int(rng.integers(1, 8)), int(rng.integers(1, 8))
        A = la.rand_mat(F, rng, n, m)
        R, piv = la.rref(F, A)
        assert la.rank(F, A) == len(piv)
        K = la.nullspace(F, A)
        assert K.shape[1] == m - len(piv)
        if K.size:
            assert not la.matmul(F, A, K).any()
        # A @ solve(A, A@x) == A@x for random x
        x = la.rand_mat(F, rng, m, 1)
        b = la.matmul(F, A, x)
        y = la.solve(F, A, b)
        assert (la.matmul(F, A, y) == b).all()


@pytest.mark.parametrize("F", FIELDS)
def test_inverse(F):
    rng = np.random.default_rng(3)
    A = la.rand_invertible(F, rng, 5)
    Ai = la.inv(F, A)
    assert (la.matmul(F, A, Ai) == la.eye(F, 5)).all()
    assert (la.matmul(F, Ai, A) == la.eye(F, 5)).all()


def test_solve_raises_on_inconsistent():
    F = fq_make(3, 1)
    A = np.array([[1, 0], [1, 0]], dtype=np.int16)
    b = np.array([1, 2], dtype=np.int16)
    with pytest.raises(ValueError):
        la.solve(F, A, b)


@pytest.mark.parametrize("F", FIELDS)
def test_kron_matches_blockwise_product(F):
    rng = np.random.default_rng(5)
    A = la.rand_mat(F, rng, 2, 3)
    B = la.rand_mat(F, rng, 3, 2)
    K = la.kron(F, A, B)
    for i in range(2):
        for j in range(3):
            blk = K[i * 3 : (i + 1) * 3, j * 2 : (j + 1) * 2]
            assert (blk == la.smul(F, int(A[i, j]), B)).all()


@pytest.mark.parametrize("F", FIELDS)
def test_extend_to_basis(F):
    rng = np.random.default_rng(9)
    S = la.rand_mat(F, rng, 6, 2)
    T, s = la.extend_to_basis(F, S)
    assert T.shape == (6, 6)
    assert la.rank(F, T) == 6
    assert s == la.rank(F, S)
