"""Exact dense linear algebra over the small fields.

Matrices are numpy int16 arrays of element codes.  For f = 2 arithmetic is
done on the (c0, c1) coordinate pair, so a product costs four integer
matmuls; for f = 1 it is a single integer matmul mod p.  Everything is
deterministic: eliminations pick the first nonzero pivot, bases come out
in echelon order.
"""
from __future__ import annotations

import numpy as np

from .field import Fq


def _split(F: Fq, A: np.ndarray):
    A = np.asarray(A, dtype=np.int64)
    return A % F.p, A // F.p


def _join(F: Fq, A0: np.ndarray, A1: np.ndarray) -> np.ndarray:
    return (A0 % F.p + F.p * (A1 % F.p)).astype(np.int16)


def zeros(F: Fq, n: int, m: int) -> np.ndarray:
    return np.zeros((n, m), dtype=np.int16)


def eye(F: Fq, n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int16)


def madd(F: Fq, A, B) -> np.ndarray:
    return F.ADD[A, B]


def msub(F: Fq, A, B) -> np.ndarray:
    return F.ADD[A, F.NEG[B]]


def mneg(F: Fq, A) -> np.ndarray:
    return F.NEG[A]


def smul(F: Fq, s: int, A) -> np.ndarray:
    return F.MUL[s, A]


def matmul(F: Fq, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim != 2 or B.ndim != 2:
        raise ValueError("matmul expects 2-D code arrays")
    if F.f == 1:
        return ((A.astype(np.int64) @ B.astype(np.int64)) % F.p).astype(np.int16)
    A0, A1 = _split(F, A)
    B0, B1 = _split(F, B)
    c0, c1 = F.g2
    P00 = A0 @ B0
    P11 = A1 @ B1
    P01 = A0 @ B1 + A1 @ B0
    return _join(F, P00 + c0 * P11, P01 + c1 * P11)


def matvec(F: Fq, A: np.ndarray, v: np.ndarray) -> np.ndarray:
    return matmul(F, A, np.asarray(v).reshape(-1, 1))[:, 0]


def rref(F: Fq, A: np.ndarray):
    """Reduced row echelon form.  Returns (R, pivot_columns)."""
    A = np.asarray(A)
    R0, R1 = _split(F, A)
    n, m = R0.shape
    c0g, c1g = F.g2
    p = F.p
    pivots: list[int] = []
    r = 0
    for c in range(m):
        if r == n:
            break
        nz = np.nonzero((R0[r:, c] != 0) | (R1[r:, c] != 0))[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R0[[r, i]] = R0[[i, r]]
            R1[[r, i]] = R1[[i, r]]
        piv = int(R0[r, c] + p * R1[r, c])
        inv = int(F.INV[piv])
        i0, i1 = inv % p, inv // p
        row0, row1 = R0[r], R1[r]
        n0 = (i0 * row0 + c0g * (i1 * row1)) % p
        n1 = (i0 * row1 + i1 * row0 + c1g * (i1 * row1)) % p
        R0[r], R1[r] = n0, n1
        # eliminate the pivot column from every other row at once
        f0 = R0[:, c].copy()
        f1 = R1[:, c].copy()
        f0[r] = 0
        f1[r] = 0
        rows = np.nonzero((f0 != 0) | (f1 != 0))[0]
        if rows.size:
            f0 = f0[rows, None]
            f1 = f1[rows, None]
            pr0 = R0[r][None, :]
            pr1 = R1[r][None, :]
            q0 = f0 * pr0 + c0g * (f1 * pr1)
            q1 = f0 * pr1 + f1 * pr0 + c1g * (f1 * pr1)
            R0[rows] = (R0[rows] - q0) % p
            R1[rows] = (R1[rows] - q1) % p
        pivots.append(c)
        r += 1
    return _join(F, R0, R1), pivots


def rank(F: Fq, A: np.ndarray) -> int:
    return len(rref(F, A)[1])


def nullspace(F: Fq, A: np.ndarray) -> np.ndarray:
    """Columns form the echelon kernel basis of A (one per free column)."""
    A = np.asarray(A)
    R, piv = rref(F, A)
    m = A.shape[1]
    free = [c for c in range(m) if c not in piv]
    K = zeros(F, m, len(free))
    for k, fc in enumerate(free):
        K[fc, k] = 1
        for i, c in enumerate(piv):
            K[c, k] = F.NEG[R[i, fc]]
    return K


def solve(F: Fq, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """One exact solution X of A X = B (free variables set to 0).

    Raises ValueError when the system is inconsistent.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    single = B.ndim == 1
    if single:
        B = B.reshape(-1, 1)
    nA = A.shape[1]
    R, piv = rref(F, np.hstack([A, B]))
    if any(c >= nA for c in piv):
        raise ValueError("inconsistent linear system")
    X = zeros(F, nA, B.shape[1])
    for i, c in enumerate(piv):
        X[c, :] = R[i, nA:]
    return X[:, 0] if single else X


def inv(F: Fq, A: np.ndarray) -> np.ndarray:
    A = np.asarray(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("inverse of a non-square matrix")
    R, piv = rref(F, np.hstack([A, eye(F, n)]))
    if len(piv) != n or any(c >= n for c in piv[:n]):
        raise ValueError("matrix is singular")
    return R[:, n:]


def col_basis(F: Fq, A: np.ndarray):
    """Independent columns of A in echelon order.  Returns (basis, indices)."""
    A = np.asarray(A)
    _, piv = rref(F, A)
    return A[:, piv].astype(np.int16), piv


def extend_to_basis(F: Fq, S: np.ndarray):
    """Complete the independent columns of S to a basis of k^n with unit vectors.

    Returns (T, s) where T = [S-basis | unit-complement] is invertible and the
    first s columns span the column space of S.
    """
    S = np.asarray(S)
    n = S.shape[0]
    aug = np.hstack([S, eye(F, n)]) if S.size else eye(F, n)
    _, piv = rref(F, aug)
    s_cols = [c for c in piv if c < S.shape[1]]
    u_cols = [c - S.shape[1] for c in piv if c >= S.shape[1]]
    T = np.hstack([S[:, s_cols], eye(F, n)[:, u_cols]]).astype(np.int16)
    return T, len(s_cols)


def kron(F: Fq, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = np.asarray(A)
    B = np.asarray(B)
    if F.f == 1:
        return ((np.kron(A.astype(np.int64), B.astype(np.int64))) % F.p).astype(np.int16)
    A0, A1 = _split(F, A)
    B0, B1 = _split(F, B)
    c0, c1 = F.g2
    K0 = np.kron(A0, B0) + c0 * np.kron(A1, B1)
    K1 = np.kron(A0, B1) + np.kron(A1, B0) + c1 * np.kron(A1, B1)
    return _join(F, K0, K1)


def block_diag(F: Fq, blocks) -> np.ndarray:
    blocks = [np.asarray(b) for b in blocks]
    n = sum(b.shape[0] for b in blocks)
    m = sum(b.shape[1] for b in blocks)
    out = zeros(F, n, m)
    i = j = 0
    for b in blocks:
        out[i : i + b.shape[0], j : j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


def mat_pow(F: Fq, A: np.ndarray, n: int) -> np.ndarray:
    out = eye(F, A.shape[0])
    base = np.asarray(A)
    while n:
        if n & 1:
            out = matmul(F, out, base)
        base = matmul(F, base, base)
        n >>= 1
    return out


def rand_mat(F: Fq, rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    return rng.integers(0, F.q, size=(n, m), dtype=np.int64).astype(np.int16)


def rand_invertible(F: Fq, rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        A = rand_mat(F, rng, n, n)
        if rank(F, A) == n:
            return A


def in_span(F: Fq, S: np.ndarray, v: np.ndarray) -> bool:
    try:
        solve(F, S, v)
        return True
    except ValueError:
        return False
