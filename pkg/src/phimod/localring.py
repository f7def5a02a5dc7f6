"""Finite quotients O/ϖ^m of the quadratic local integer rings.

Two cases: unramified, realized as (Z/p^m)[x]/(h) for the fixed degree-2
lift h of the residue-field modulus, and ramified, realized as a + b*y with
y^2 = u*p for a configurable unit u.  Elements are plain (a, b) integer
tuples; the ring object carries its truncation level m and knows how to
produce Teichmüller lifts and the canonical digit coset representatives.
"""
from __future__ import annotations

import functools

from .field import Fq, fq_make

UNRAMIFIED = "unram"
RAMIFIED = "ram"
CASES = (UNRAMIFIED, RAMIFIED)


class LocalQuot:
    """O/ϖ^m with exact arithmetic on (a, b) component pairs."""

    def __init__(self, case: str, p: int, m: int, u: int = 1):
        if case not in CASES:
            raise ValueError(f"case must be one of {CASES}")
        if m < 0:
            raise ValueError("level m must be >= 0")
        if u % p == 0:
            raise ValueError("ramified unit u must be a p-adic unit")
        self.case = case
        self.p = p
        self.m = m
        self.u = u
        if case == UNRAMIFIED:
            self.residue_field: Fq = fq_make(p, 2)
            self.h = self.residue_field.modulus  # (m1, m0), lifted to Z
            self.mod_a = p**m
            self.mod_b = p**m
        else:
            self.residue_field = fq_make(p, 1)
            self.h = None
            self.mod_a = p ** ((m + 1) // 2)
            self.mod_b = p ** (m // 2)
        self.q = self.residue_field.q
        self.size = self.q**m

    # element creation ---------------------------------------------------
    def zero(self):
        return (0, 0)

    def one(self):
        return (1 % self.mod_a if self.m > 0 else 0, 0)

    def element(self, a: int, b: int = 0):
        return (a % self.mod_a if self.mod_a > 1 else 0, b % self.mod_b if self.mod_b > 1 else 0)

    def uniformizer(self):
        if self.case == UNRAMIFIED:
            return self.element(self.p, 0)
        return self.element(0, 1)

    # arithmetic ---------------------------------------------------------
    def add(self, x, y):
        return self.element(x[0] + y[0], x[1] + y[1])

    def neg(self, x):
        return self.element(-x[0], -x[1])

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        a, b = x
        c, d = y
        if self.case == UNRAMIFIED:
            m1, m0 = self.h
            # (a + b x)(c + d x) with x^2 = -m1 x - m0
            bd = b * d
            return self.element(a * c - m0 * bd, a * d + b * c - m1 * bd)
        # (a + b y)(c + d y) with y^2 = u p
        return self.element(a * c + b * d * self.u * self.p, a * d + b * c)

    def pow(self, x, n: int):
        out = self.one()
        while n:
            if n & 1:
                out = self.mul(out, x)
            x = self.mul(x, x)
            n >>= 1
        return out

    # residue / reduction ------------------------------------------------
    def residue(self, x) -> int:
        """Image in the residue field k_F, as an Fq code."""
        if self.case == UNRAMIFIED:
            return (x[0] % self.p) + self.p * (x[1] % self.p)
        return x[0] % self.p

    def reduce_to(self, other: "LocalQuot", x):
        assert other.case == self.case and other.p == self.p and other.m <= self.m
        return other.element(x[0], x[1])

    def shift_down(self, x):
        """Exact division by ϖ, landing in the level m-1 ring."""
        lower = make_ring(self.case, self.p, self.m - 1, self.u)
        if self.case == UNRAMIFIED:
            assert x[0] % self.p == 0 and x[1] % self.p == 0, "not divisible by ϖ"
            return lower.element(x[0] // self.p, x[1] // self.p)
        # (a + b y)/y = b + (a/(u p)) y
        assert x[0] % self.p == 0, "not divisible by ϖ"
        uinv = pow(self.u, -1, self.mod_a) if self.mod_a > 1 else 0
        return lower.element(x[1], (x[0] // self.p) * uinv)

    # Teichmüller and digits ----------------------------------------------
    def teichmuller(self, lam: int):
        """The unique lift t of lam in k_F with t^q = t."""
        cache = getattr(self, "_teich_cache", None)
        if cache is None:
            cache = {}
            self._teich_cache = cache
        if lam in cache:
            return cache[lam]
        out = self._teichmuller_raw(lam)
        cache[lam] = out
        return out

    def _teichmuller_raw(self, lam: int):
        if self.m == 0:
            return self.zero()
        if self.case == UNRAMIFIED:
            t = self.element(lam % self.p, lam // self.p)
        else:
            t = self.element(lam % self.p, 0)
        for _ in range(2 * self.m + 2):
            t = self.pow(t, self.q)
        assert self.pow(t, self.q) == t, "Teichmüller iteration did not converge"
        assert self.residue(t) == lam % self.q
        return t

    def to_digits(self, x) -> list[int]:
        """The m Teichmüller digits of x, least significant first."""
        digits = []
        ring = self
        z = x
        for _ in range(self.m):
            d = ring.residue(z)
            digits.append(d)
            z = ring.shift_down(ring.sub(z, ring.teichmuller(d)))
            ring = make_ring(self.case, self.p, ring.m - 1, self.u)
        return digits

    def from_digits(self, digits) -> tuple:
        assert len(digits) == self.m
        out = self.zero()
        pw = self.one()
        w = self.uniformizer()
        for d in digits:
            out = self.add(out, self.mul(self.teichmuller(d), pw))
            pw = self.mul(pw, w)
        return out

    def rep_index(self, digits) -> int:
        idx = 0
        for i, d in enumerate(digits):
            idx += d * self.q**i
        return idx

    def index_digits(self, idx: int) -> list[int]:
        return [(idx // self.q**i) % self.q for i in range(self.m)]


@functools.lru_cache(maxsize=None)
def make_ring(case: str, p: int, m: int, u: int = 1) -> LocalQuot:
    return LocalQuot(case, p, m, u)


def teichmuller(ring: LocalQuot, lam: int):
    return ring.teichmuller(lam)


def coset_reps(ring: LocalQuot) -> list:
    """The q^m canonical digit representatives, in digit-radix order
    (digit 0 least significant)."""
    return [ring.from_digits(ring.index_digits(i)) for i in range(ring.size)]


def digit_decompose(upper: LocalQuot, z, m: int):
    """For z at level m+1: the canonical level-m representative index and the
    carry digit delta with z = rep + τ(delta)·ϖ^m (mod ϖ^{m+1})."""
    assert upper.m == m + 1
    digits = upper.to_digits(z)
    lower = make_ring(upper.case, upper.p, m, upper.u)
    return lower.rep_index(digits[:m]), digits[m]
