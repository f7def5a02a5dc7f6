"""Small finite fields F_{p^f} (p <= 7, f <= 2) with table-driven exact arithmetic.

Elements are integer codes 0..q-1.  For f = 2 the code c0 + p*c1 stands for
c0 + c1*g where g is a root of the fixed degree-2 modulus; for f = 1 codes
are plain residues mod p.  All tables are numpy arrays so elementwise field
operations on whole matrices are a single fancy-indexing call.
"""
from __future__ import annotations

import functools

import numpy as np

SUPPORTED_PRIMES = (2, 3, 5, 7)


def _lowest_irreducible_quadratic(p: int) -> tuple[int, int]:
    # lex-smallest (m1, m0) with x^2 + m1*x + m0 irreducible over F_p.
    # Degree 2, so irreducibility is exactly the absence of a root.
    for m1 in range(p):
        for m0 in range(p):
            if all((t * t + m1 * t + m0) % p for t in range(p)):
                return m1, m0
    raise AssertionError("no irreducible quadratic over F_%d" % p)


class Fq:
    """The field F_{p^f}, q = p^f <= 49, with precomputed operation tables."""

    def __init__(self, p: int, f: int):
        if p not in SUPPORTED_PRIMES:
            raise ValueError(f"p must be a prime in {SUPPORTED_PRIMES}, got {p}")
        if f not in (1, 2):
            raise ValueError(f"extension degree f must be 1 or 2, got {f}")
        self.p = p
        self.f = f
        self.q = p**f
        if f == 1:
            self.modulus = None
            # g is absent; a zero g^2-rule keeps the generic code paths valid.
            self.g2 = (0, 0)
        else:
            m1, m0 = _lowest_irreducible_quadratic(p)
            self.modulus = (m1, m0)
            self.g2 = ((-m0) % p, (-m1) % p)  # g^2 = g2[0] + g2[1]*g
        self._build_tables()

    def _build_tables(self) -> None:
        p, q = self.p, self.q
        codes = np.arange(q, dtype=np.int64)
        a0, a1 = codes % p, codes // p
        b0, b1 = a0[None, :], a1[None, :]
        a0, a1 = a0[:, None], a1[:, None]
        c0, c1 = self.g2
        self.ADD = ((a0 + b0) % p + p * ((a1 + b1) % p)).astype(np.int16)
        self.NEG = ((-codes % p) + p * (-(codes // p) % p)).astype(np.int16)
        m0 = a0 * b0 + c0 * (a1 * b1)
        m1 = a0 * b1 + a1 * b0 + c1 * (a1 * b1)
        self.MUL = (m0 % p + p * (m1 % p)).astype(np.int16)
        inv = np.zeros(q, dtype=np.int16)
        for a in range(1, q):
            hits = np.nonzero(self.MUL[a] == 1)[0]
            assert hits.size == 1
            inv[a] = hits[0]
        self.INV = inv
        frob = np.arange(q, dtype=np.int16)
        for _ in range(p - 1):
            frob = self.MUL[frob, np.arange(q)]
        self.FROB = frob

    # scalar helpers -----------------------------------------------------
    def add(self, a: int, b: int) -> int:
        return int(self.ADD[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.ADD[a, self.NEG[b]])

    def neg(self, a: int) -> int:
        return int(self.NEG[a])

    def mul(self, a: int, b: int) -> int:
        return int(self.MUL[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return int(self.INV[a])

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inv(a), -n
        out = 1
        while n:
            if n & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            n >>= 1
        return out

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> range:
        return range(1, self.q)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Fq(p={self.p}, f={self.f})"


@functools.lru_cache(maxsize=None)
def fq_make(p: int, f: int) -> Fq:
    """Field constructor with a deterministic modulus; cached so field objects
    can be compared by identity."""
    return Fq(p, f)


def frobenius(field: Fq, x: int) -> int:
    """x -> x^p, the arithmetic Frobenius of F_{p^f}."""
    return int(field.FROB[x])
