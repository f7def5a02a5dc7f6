"""Monomial-type flat twists of k[[X_1..X_d]] and the pullback functor.

A twist sends X_j to u_j * X_{π(j)}^{e_j} for a permutation π, so the ring
is free over the twist image with the reduced-monomial basis; pullbacks of
modules and maps are completely explicit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .field import Fq
from .flmod import FLModule, ModuleMap, MonIdeal, cyclic_module, mon_ideal, staircase


@dataclass(frozen=True)
class TwistSpec:
    field: Fq
    d: int
    targets: tuple  # π(j)
    exps: tuple  # e_j >= 1
    units: tuple  # unit codes u_j

    def __post_init__(self):
        if sorted(self.targets) != list(range(self.d)):
            raise ValueError("twist variable assignment must be a permutation")
        if any(e < 1 for e in self.exps):
            raise ValueError("twist exponents must be >= 1")
        if any(u == 0 for u in self.units):
            raise ValueError("twist units must be nonzero")

    @property
    def rank(self) -> int:
        out = 1
        for e in self.exps:
            out *= e
        return out

    def caps(self) -> list[int]:
        """Exponent bound per variable in the reduced-monomial basis."""
        inv = [0] * self.d
        for j, t in enumerate(self.targets):
            inv[t] = j
        return [self.exps[inv[i]] for i in range(self.d)]

    def square(self) -> "TwistSpec":
        F = self.field
        targets = tuple(self.targets[self.targets[j]] for j in range(self.d))
        exps = tuple(self.exps[j] * self.exps[self.targets[j]] for j in range(self.d))
        units = tuple(
            F.mul(self.units[j], F.pow(self.units[self.targets[j]], self.exps[j])) for j in range(self.d)
        )
        return TwistSpec(F, self.d, targets, exps, units)

    def to_json(self) -> dict:
        return {"targets": list(self.targets), "exps": list(self.exps), "units": [int(u) for u in self.units]}


def qpow(field: Fq, d: int, q: int) -> TwistSpec:
    return TwistSpec(field, d, tuple(range(d)), tuple([q] * d), tuple([1] * d))


def unram_twist(field: Fq, p: int) -> TwistSpec:
    return TwistSpec(field, 2, (1, 0), (p, p), (1, 1))


def ram_twist(field: Fq, p: int, u: int = 1) -> TwistSpec:
    return TwistSpec(field, 2, (1, 0), (1, p), (1, u))


def twist_ideal(t: TwistSpec, I: MonIdeal) -> MonIdeal:
    F = t.field
    gens = []
    for u0, a in I.gens:
        unit = u0
        img = [0] * t.d
        for j, e in enumerate(a):
            if e:
                img[t.targets[j]] += t.exps[j] * e
                unit = F.mul(unit, F.pow(t.units[j], e))
        gens.append((unit, tuple(img)))
    return mon_ideal(t.d, *gens)


def reduced_monomials(t: TwistSpec) -> list[tuple]:
    """Basis monomials of the ring over its twist image, in degree-lex order."""
    caps = t.caps()
    mons: list[tuple] = []

    def rec(prefix):
        if len(prefix) == t.d:
            mons.append(tuple(prefix))
            return
        for e in range(caps[len(prefix)]):
            rec(prefix + [e])

    rec([])
    mons.sort(key=lambda m: (sum(m), m))
    return mons


def pullback(t: TwistSpec, M: FLModule) -> FLModule:
    """The pullback module on basis (reduced monomial, basis vector of M),
    monomial-major ordering."""
    F = t.field
    mons = reduced_monomials(t)
    index = {m: k for k, m in enumerate(mons)}
    r = len(mons)
    n = M.dim
    dim = r * n
    caps = t.caps()
    inv = [0] * t.d
    for j, tgt in enumerate(t.targets):
        inv[tgt] = j
    acts = []
    for i in range(t.d):
        A = la.zeros(F, dim, dim)
        j = inv[i]  # the variable whose twist image is a power of X_i
        uinv = F.inv(t.units[j])
        for k, m in enumerate(mons):
            if m[i] + 1 < caps[i]:
                m2 = tuple(e + (1 if l == i else 0) for l, e in enumerate(m))
                k2 = index[m2]
                A[k2 * n : (k2 + 1) * n, k * n : (k + 1) * n] = la.eye(F, n)
            else:
                # X_i^{e_j} = u_j^{-1} * (twist image of X_j): push X_j into M
                m2 = tuple(0 if l == i else e for l, e in enumerate(m))
                k2 = index[m2]
                A[k2 * n : (k2 + 1) * n, k * n : (k + 1) * n] = la.smul(F, uinv, M.acts[j])
        acts.append(A)
    return FLModule(F, acts, check=False)


def unit_map_matrix(t: TwistSpec, M: FLModule) -> np.ndarray:
    """Matrix of the canonical semilinear map M -> pullback(M), v -> 1 ⊗ v."""
    F = t.field
    r = t.rank
    E = la.zeros(F, r * M.dim, M.dim)
    # the zero monomial is first in degree-lex order
    E[: M.dim, :] = la.eye(F, M.dim)
    return E


def twist_c_matrix(t: TwistSpec, N: FLModule):
    """Operator matrix C with C[j][l] the multiplier writing the twist image
    of X_j as (multiplier) * X_l on the module N."""
    F = t.field
    C = [[None] * t.d for _ in range(t.d)]
    for j in range(t.d):
        tgt = t.targets[j]
        op = la.smul(F, t.units[j], la.mat_pow(F, N.acts[tgt], t.exps[j] - 1))
        C[j][tgt] = op
    return C


def pullback_map(t: TwistSpec, f: ModuleMap) -> ModuleMap:
    """id-on-monomials ⊗ f, in monomial-major coordinates."""
    F = t.field
    r = t.rank
    mat = la.kron(F, la.eye(F, r), f.mat)
    return ModuleMap(pullback(t, f.source), pullback(t, f.target), mat, check=False)


def pullback_map_matrix(t: TwistSpec, mat: np.ndarray) -> np.ndarray:
    return la.kron(t.field, la.eye(t.field, t.rank), mat)


def cyclic_pullback_iso(t: TwistSpec, I: MonIdeal, src: FLModule | None = None) -> ModuleMap:
    """The canonical isomorphism pullback(A/I) -> A/twist(I) sending
    1 ⊗ generator to the generator.  Monomial-to-monomial with units."""
    F = t.field
    M = cyclic_module(F, I)
    P = src if src is not None else pullback(t, M)
    J = twist_ideal(t, I)
    N = cyclic_module(F, J)
    mons_red = reduced_monomials(t)
    mons_M = M.cyclic[1]
    index_N = N.cyclic[2]
    mat = la.zeros(F, N.dim, P.dim)
    n = M.dim
    hit = set()
    for kb, b in enumerate(mons_red):
        for kc, c in enumerate(mons_M):
            img = list(b)
            unit = 1
            for j, e in enumerate(c):
                if e:
                    img[t.targets[j]] += t.exps[j] * e
                    unit = F.mul(unit, F.pow(t.units[j], e))
            img_t = tuple(img)
            col = kb * n + kc
            if img_t in index_N:
                row = index_N[img_t]
                assert row not in hit, "pullback comparison is not monomial-bijective"
                hit.add(row)
                mat[row, col] = unit
    assert len(hit) == N.dim and P.dim == N.dim, "pullback comparison is not bijective"
    return ModuleMap(P, N, mat)
