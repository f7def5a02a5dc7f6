"""Finite-length modules over k[[X_1..X_d]] as commuting nilpotent matrices.

A module is a tuple of d commuting nilpotent dim x dim matrices over the
coefficient field.  Cyclic quotients by monomial-type ideals carry their
staircase basis so annihilator and socle questions reduce to counting;
everything else is exact linear algebra.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import linalg as la
from .field import Fq

CHECK_DIM_CAP = 2500  # constructor invariants are verified below this size


@dataclass(frozen=True)
class MonIdeal:
    """Ideal generated by unit * monomial elements; units never change the
    quotient but are tracked so twist images stay faithful."""

    d: int
    gens: tuple  # tuple of (unit_code, exponent tuple)

    def __post_init__(self):
        for u, a in self.gens:
            if len(a) != self.d:
                raise ValueError("exponent vector length mismatch")
            if u == 0:
                raise ValueError("ideal generator unit must be nonzero")

    def exponents(self):
        return [a for _, a in self.gens]


def mon_ideal(d: int, *gens) -> MonIdeal:
    """gens: exponent tuples or (unit, exponent tuple) pairs."""
    norm = []
    for g in gens:
        if len(g) == 2 and isinstance(g[1], tuple):
            norm.append((int(g[0]), tuple(g[1])))
        else:
            norm.append((1, tuple(g)))
    return MonIdeal(d, tuple(norm))


def _divisible(a, b) -> bool:
    return all(x >= y for x, y in zip(a, b))


def staircase(I: MonIdeal) -> list[tuple]:
    """Monomials outside I, in degree-lex order.  Raises if infinite."""
    exps = I.exponents()
    bounds = []
    for i in range(I.d):
        pure = [a[i] for a in exps if all(a[j] == 0 for j in range(I.d) if j != i)]
        if not pure:
            raise ValueError("quotient by ideal is infinite dimensional")
        bounds.append(min(pure))
    box = []

    def rec(prefix):
        if len(prefix) == I.d:
            box.append(tuple(prefix))
            return
        for t in range(bounds[len(prefix)]):
            rec(prefix + [t])

    rec([])
    mons = [m for m in box if not any(_divisible(m, a) for a in exps)]
    mons.sort(key=lambda m: (sum(m), m))
    return mons


class FLModule:
    """d commuting nilpotent operators on k^dim."""

    def __init__(self, field: Fq, acts, check: bool = True, cyclic: tuple | None = None):
        self.field = field
        self.acts = [np.ascontiguousarray(np.asarray(A, dtype=np.int16)) for A in acts]
        self.d = len(self.acts)
        self.dim = self.acts[0].shape[0] if self.acts else 0
        for A in self.acts:
            if A.shape != (self.dim, self.dim):
                raise ValueError("action matrices must be square of equal size")
        # (ideal, monomial list, index dict, generator index) for cyclic quotients
        self.cyclic = cyclic
        self._tor_cache: dict = {}
        if check and 0 < self.dim <= CHECK_DIM_CAP:
            self._check_invariants()

    def _check_invariants(self):
        F = self.field
        for i in range(self.d):
            for j in range(i + 1, self.d):
                if not (la.matmul(F, self.acts[i], self.acts[j]) == la.matmul(F, self.acts[j], self.acts[i])).all():
                    raise ValueError("action matrices do not commute")
        for A in self.acts:
            if la.mat_pow(F, A, self.dim).any():
                raise ValueError("action matrix is not nilpotent")

    def monomial_op(self, exps) -> np.ndarray:
        out = la.eye(self.field, self.dim)
        for i, e in enumerate(exps):
            if e:
                out = la.matmul(self.field, la.mat_pow(self.field, self.acts[i], e), out)
        return out

    def stacked_acts(self) -> np.ndarray:
        return np.vstack(self.acts) if self.d else la.zeros(self.field, 0, self.dim)

    def socle_basis(self) -> np.ndarray:
        """Columns spanning the common kernel of all variables."""
        return la.nullspace(self.field, self.stacked_acts())

    def to_json(self) -> dict:
        return {
            "field": {"p": self.field.p, "f": self.field.f},
            "d": self.d,
            "dim": self.dim,
            "act": [[int(x) for x in A.reshape(-1)] for A in self.acts],
        }

    def __repr__(self):  # pragma: no cover
        return f"FLModule(d={self.d}, dim={self.dim})"


def module_from_json(obj: dict) -> FLModule:
    from .field import fq_make

    F = fq_make(obj["field"]["p"], obj["field"]["f"])
    dim = obj["dim"]
    acts = [np.array(flat, dtype=np.int16).reshape(dim, dim) for flat in obj["act"]]
    return FLModule(F, acts)


def zero_module(field: Fq, d: int) -> FLModule:
    return FLModule(field, [la.zeros(field, 0, 0) for _ in range(d)], check=False)


@dataclass
class ModuleMap:
    source: FLModule
    target: FLModule
    mat: np.ndarray
    check: bool = dc_field(default=True, repr=False)

    def __post_init__(self):
        self.mat = np.asarray(self.mat, dtype=np.int16)
        if self.mat.shape != (self.target.dim, self.source.dim):
            raise ValueError("map matrix has wrong shape")
        if self.check and max(self.source.dim, self.target.dim) <= CHECK_DIM_CAP:
            F = self.source.field
            for As, At in zip(self.source.acts, self.target.acts):
                if not (la.matmul(F, self.mat, As) == la.matmul(F, At, self.mat)).all():
                    raise ValueError("matrix is not A-linear")


def identity_map(M: FLModule) -> ModuleMap:
    return ModuleMap(M, M, la.eye(M.field, M.dim), check=False)


def compose(g: ModuleMap, f: ModuleMap) -> ModuleMap:
    assert f.target is g.source or f.target.dim == g.source.dim
    return ModuleMap(f.source, g.target, la.matmul(f.source.field, g.mat, f.mat), check=False)


def cyclic_module(field: Fq, I: MonIdeal) -> FLModule:
    """A/I on its staircase basis; multiplication matrices are 0/1 shifts."""
    mons = staircase(I)
    index = {m: k for k, m in enumerate(mons)}
    dim = len(mons)
    acts = []
    for i in range(I.d):
        A = la.zeros(field, dim, dim)
        for k, m in enumerate(mons):
            m2 = tuple(e + (1 if j == i else 0) for j, e in enumerate(m))
            if m2 in index:
                A[index[m2], k] = 1
        acts.append(A)
    gen = index.get(tuple([0] * I.d))
    return FLModule(field, acts, check=False, cyclic=(I, mons, index, gen))


def submodule_from_columns(M: FLModule, cols: np.ndarray):
    """Closure of the given column vectors under all variables.

    Returns (S, incl) with incl: S -> M the inclusion."""
    F = M.field
    cols = np.asarray(cols, dtype=np.int16)
    if cols.ndim == 1:
        cols = cols.reshape(-1, 1)
    basis, _ = la.col_basis(F, cols)
    frontier = [basis[:, k] for k in range(basis.shape[1])]
    span = basis
    while frontier:
        new = []
        for v in frontier:
            for A in M.acts:
                w = la.matvec(F, A, v)
                if w.any() and not la.in_span(F, span, w):
                    span = np.hstack([span, w.reshape(-1, 1)])
                    new.append(w)
        frontier = new
    span, _ = la.col_basis(F, span) if span.size else (span, [])
    acts = [la.solve(F, span, la.matmul(F, A, span)) if span.size else la.zeros(F, 0, 0) for A in M.acts]
    S = FLModule(F, acts, check=False)
    return S, ModuleMap(S, M, span, check=False)


def submodule_generated(M: FLModule, vectors) -> tuple:
    cols = np.stack([np.asarray(v, dtype=np.int16) for v in vectors], axis=1) if vectors else la.zeros(M.field, M.dim, 0)
    return submodule_from_columns(M, cols)


def quotient_by_columns(M: FLModule, cols: np.ndarray):
    """Quotient of M by the submodule spanned by cols (must be act-invariant).

    Returns (Q, proj map, section matrix) with proj . section = id."""
    F = M.field
    cols = np.asarray(cols, dtype=np.int16)
    if cols.size == 0:
        return M, identity_map(M), la.eye(F, M.dim)
    T, s = la.extend_to_basis(F, cols)
    Tinv = la.inv(F, T)
    acts = []
    for A in M.acts:
        Afull = la.matmul(F, Tinv, la.matmul(F, A, T))
        if Afull[s:, :s].any():
            raise ValueError("subspace is not stable under the module action")
        acts.append(Afull[s:, s:])
    Q = FLModule(F, acts, check=False)
    proj = ModuleMap(M, Q, Tinv[s:, :], check=False)
    section = T[:, s:]
    return Q, proj, section


def map_factor(f: ModuleMap):
    """Kernel, image and cokernel of an A-linear map, with structure maps.

    Returns dict with keys kernel=(K, incl), image=(Im, incl), cokernel=(C, proj).
    """
    F = f.source.field
    K = la.nullspace(F, f.mat)
    ker_mod, acts_ok = _sub_on_basis(f.source, K)
    B, _ = la.col_basis(F, f.mat)
    im_mod, _ = _sub_on_basis(f.target, B)
    Q, proj, _ = quotient_by_columns(f.target, B)
    return {
        "kernel": (ker_mod, ModuleMap(ker_mod, f.source, K, check=False)),
        "image": (im_mod, ModuleMap(im_mod, f.target, B, check=False)),
        "cokernel": (Q, proj),
    }


def _sub_on_basis(M: FLModule, basis: np.ndarray):
    """Module structure on an act-invariant independent column set."""
    F = M.field
    if basis.size == 0:
        return zero_module(F, M.d), None
    acts = [la.solve(F, basis, la.matmul(F, A, basis)) for A in M.acts]
    return FLModule(F, acts, check=False), basis


def dual_module(M: FLModule) -> FLModule:
    return FLModule(M.field, [A.T.copy() for A in M.acts], check=False)


def dual_map(f: ModuleMap) -> ModuleMap:
    return ModuleMap(dual_module(f.target), dual_module(f.source), f.mat.T.copy(), check=False)


def hom_basis(M: FLModule, N: FLModule) -> list[ModuleMap]:
    """A k-basis of Hom_A(M, N) in deterministic echelon order.

    Cyclic sources use the annihilator shortcut: a map is determined by a
    target vector killed by the defining ideal.
    """
    F = M.field
    if M.dim == 0 or N.dim == 0:
        return []
    if M.cyclic is not None:
        I, mons, _, gen = M.cyclic
        stacked = [N.monomial_op(a) for a in I.exponents()]
        cand = la.nullspace(F, np.vstack(stacked)) if stacked else la.eye(F, N.dim)
        maps = []
        ops = [N.monomial_op(m) for m in mons]
        for k in range(cand.shape[1]):
            v = cand[:, k]
            mat = la.zeros(F, N.dim, M.dim)
            for j, op in enumerate(ops):
                mat[:, j] = la.matvec(F, op, v)
            maps.append(ModuleMap(M, N, mat))
        return maps
    # generic path: solve the commutation system on vec(H)
    n, m = N.dim, M.dim
    rows = []
    for As, At in zip(M.acts, N.acts):
        rows.append(la.msub(F, la.kron(F, As.T, la.eye(F, n)), la.kron(F, la.eye(F, m), At)))
    K = la.nullspace(F, np.vstack(rows))
    return [ModuleMap(M, N, K[:, k].reshape(m, n).T.copy()) for k in range(K.shape[1])]


def ann_check(M: FLModule, v: np.ndarray, I: MonIdeal) -> bool:
    """True iff ann(v) equals I exactly: every generator kills v and the
    cyclic submodule A·v has the dimension of A/I."""
    F = M.field
    v = np.asarray(v, dtype=np.int16)
    for _, a in I.gens:
        if la.matvec(F, M.monomial_op(a), v).any():
            return False
    S, _ = submodule_generated(M, [v])
    return S.dim == len(staircase(I))


def direct_sum(mods: list[FLModule]) -> FLModule:
    F = mods[0].field
    d = mods[0].d
    acts = [la.block_diag(F, [M.acts[i] for M in mods]) for i in range(d)]
    return FLModule(F, acts, check=False)


def random_module(field: Fq, d: int, dim: int, seed: int) -> FLModule:
    """Deterministic pseudo-random module of the exact requested dimension:
    a direct sum of random cyclic staircase quotients and random submodules
    of such, conjugated by a random basis change."""
    if dim > 20:
        raise ValueError("random_module caps at dim 20")
    rng = np.random.default_rng(seed)
    pieces: list[FLModule] = []
    remaining = dim
    while remaining > 0:
        piece = _random_piece(field, d, remaining, rng)
        pieces.append(piece)
        remaining -= piece.dim
    M = direct_sum(pieces) if pieces else zero_module(field, d)
    T = la.rand_invertible(field, rng, dim)
    Tinv = la.inv(field, T)
    acts = [la.matmul(field, T, la.matmul(field, A, Tinv)) for A in M.acts]
    return FLModule(field, acts, check=True)


def _random_piece(field: Fq, d: int, cap: int, rng: np.random.Generator) -> FLModule:
    for _ in range(40):
        exps = []
        for i in range(d):
            e = [0] * d
            e[i] = int(rng.integers(1, 4))
            exps.append(tuple(e))
        extra = int(rng.integers(0, 2))
        for _ in range(extra):
            e = tuple(int(rng.integers(0, 3)) for _ in range(d))
            if any(e):
                exps.append(e)
        try:
            I = mon_ideal(d, *exps)
            C = cyclic_module(field, I)
        except ValueError:
            continue
        if C.dim == 0:
            continue
        if rng.integers(0, 3) == 0 and C.dim > 1:
            v = la.rand_mat(field, rng, C.dim, 1)[:, 0]
            S, _ = submodule_generated(C, [v])
            if 0 < S.dim <= cap:
                return S
        if C.dim <= cap:
            return C
    # fall back to a 1-dimensional piece
    return cyclic_module(field, mon_ideal(d, *[tuple(1 if j == i else 0 for j in range(d)) for i in range(d)]))
