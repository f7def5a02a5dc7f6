"""Koszul homology Tor_i(k, M), induced maps, semilinear chain maps, and
long-exact-sequence verification.

Chain spaces are Λ^i(k^d) ⊗ M with subset-major coordinates: the chain
vector for (S, m) sits in block index(S) of size dim M.  Homology
representatives are chosen in echelon order, so every induced matrix is
reproducible.
"""
from __future__ import annotations

from itertools import combinations, permutations

import numpy as np

from . import linalg as la
from .flmod import FLModule, ModuleMap, map_factor


def subsets(d: int, i: int) -> list[tuple]:
    return list(combinations(range(d), i))


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def diff_matrix(M: FLModule, i: int) -> np.ndarray:
    """The Koszul differential K_i -> K_{i-1}."""
    F = M.field
    d, n = M.d, M.dim
    si, st = subsets(d, i), subsets(d, i - 1)
    tgt_index = {S: k for k, S in enumerate(st)}
    D = la.zeros(F, len(st) * n, len(si) * n)
    minus_one = int(F.NEG[1])
    for k, S in enumerate(si):
        for pos, j in enumerate(S):
            T = tuple(x for x in S if x != j)
            t = tgt_index[T]
            coeff = 1 if pos % 2 == 0 else minus_one
            blk = la.smul(F, coeff, M.acts[j])
            D[t * n : (t + 1) * n, k * n : (k + 1) * n] = la.madd(F, D[t * n : (t + 1) * n, k * n : (k + 1) * n], blk)
    return D


class TorSpace:
    """Chosen model of Tor_i(k, M): cycle and boundary bases plus echelon
    homology representatives, with coordinate extraction by exact solve."""

    def __init__(self, module: FLModule, degree: int):
        F = module.field
        self.module = module
        self.degree = degree
        d, n = module.d, module.dim
        nsub = len(subsets(d, degree))
        self.chain_dim = nsub * n
        if degree < 0 or degree > d or n == 0:
            self.cycles = la.zeros(F, max(self.chain_dim, 0), 0)
            self.boundaries = la.zeros(F, max(self.chain_dim, 0), 0)
            self.reps = la.zeros(F, max(self.chain_dim, 0), 0)
            self._br = self.reps
            return
        if degree == 0:
            cycles = la.eye(F, self.chain_dim)
        else:
            cycles = la.nullspace(F, diff_matrix(module, degree))
        if degree < d:
            bnd, _ = la.col_basis(F, diff_matrix(module, degree + 1))
        else:
            bnd = la.zeros(F, self.chain_dim, 0)
        aug = np.hstack([bnd, cycles])
        _, piv = la.rref(F, aug)
        nb = bnd.shape[1]
        assert all(c in piv for c in range(nb)), "boundary basis not independent"
        rep_cols = [c - nb for c in piv if c >= nb]
        self.cycles = cycles
        self.boundaries = bnd
        self.reps = cycles[:, rep_cols].astype(np.int16)
        self._br = np.hstack([self.boundaries, self.reps])

    @property
    def dim(self) -> int:
        return self.reps.shape[1]

    def coords(self, chains: np.ndarray) -> np.ndarray:
        """Homology coordinates of cycle columns (raises if not cycles)."""
        chains = np.asarray(chains, dtype=np.int16)
        if chains.ndim == 1:
            chains = chains.reshape(-1, 1)
        if self.dim == 0:
            return la.zeros(self.module.field, 0, chains.shape[1])
        X = la.solve(self.module.field, self._br, chains)
        return X[self.boundaries.shape[1] :, :]


def tor(M: FLModule, i: int) -> TorSpace:
    key = ("tor", i)
    if key not in M._tor_cache:
        M._tor_cache[key] = TorSpace(M, i)
    return M._tor_cache[key]


def tor_dims(M: FLModule) -> list[int]:
    return [tor(M, i).dim for i in range(M.d + 1)]


def _chain_block_apply(F, nsub: int, mat: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Apply the block-diagonal chain map id_{Λ} ⊗ mat to chain columns."""
    n_src = mat.shape[1]
    n_tgt = mat.shape[0]
    k = vecs.shape[1]
    out = la.zeros(F, nsub * n_tgt, k)
    for s in range(nsub):
        out[s * n_tgt : (s + 1) * n_tgt, :] = la.matmul(F, mat, vecs[s * n_src : (s + 1) * n_src, :])
    return out


def tor_map(f: ModuleMap, i: int) -> np.ndarray:
    """Matrix of Tor_i(f) in the chosen representative bases."""
    F = f.source.field
    ts, tt = tor(f.source, i), tor(f.target, i)
    if ts.dim == 0 or tt.dim == 0:
        return la.zeros(F, tt.dim, ts.dim)
    nsub = len(subsets(f.source.d, i))
    images = _chain_block_apply(F, nsub, f.mat, ts.reps)
    return tt.coords(images)


def semilinear_chain_matrix(C, g_mat: np.ndarray, src: FLModule, tgt: FLModule, i: int) -> np.ndarray:
    """The chain map Λ^i(C) ⊗ g in chain coordinates.

    C is a d x d array of operator matrices on the target (None for zero),
    expressing the twist images of the variables in terms of the variables.
    """
    F = src.field
    d = src.d
    si = subsets(d, i)
    n_s, n_t = src.dim, tgt.dim
    out = la.zeros(F, len(si) * n_t, len(si) * n_s)
    minus_one = int(F.NEG[1])
    for ks, S in enumerate(si):
        for kt, T in enumerate(si):
            # minor: sum over bijections S -> T of sign * product of C entries
            acc = None
            for perm in permutations(T):
                prod = None
                ok = True
                for s_var, t_var in zip(S, perm):
                    entry = C[s_var][t_var]
                    if entry is None:
                        ok = False
                        break
                    prod = entry if prod is None else la.matmul(F, prod, entry)
                if not ok:
                    continue
                if prod is None:  # i == 0
                    prod = la.eye(F, n_t)
                sgn = _perm_sign([T.index(x) for x in perm])
                term = prod if sgn == 1 else la.smul(F, minus_one, prod)
                acc = term if acc is None else la.madd(F, acc, term)
            if acc is None:
                continue
            blk = la.matmul(F, acc, g_mat)
            out[kt * n_t : (kt + 1) * n_t, ks * n_s : (ks + 1) * n_s] = la.madd(
                F, out[kt * n_t : (kt + 1) * n_t, ks * n_s : (ks + 1) * n_s], blk
            )
    return out


def check_semilinear(C, g_mat, src: FLModule, tgt: FLModule) -> None:
    """Verify g(x_j m) = phi(x_j) g(m) for the twist operators encoded by C."""
    F = src.field
    for j in range(src.d):
        op = None
        for l in range(tgt.d):
            if C[j][l] is not None:
                term = la.matmul(F, C[j][l], tgt.acts[l])
                op = term if op is None else la.madd(F, op, term)
        lhs = la.matmul(F, g_mat, src.acts[j])
        rhs = la.matmul(F, op, g_mat) if op is not None else la.zeros(F, tgt.dim, src.dim)
        if not (lhs == rhs).all():
            raise ValueError(f"map is not semilinear for variable {j}")


def tor_semilinear(C, g_mat: np.ndarray, src: FLModule, tgt: FLModule, i: int, verify: bool = True) -> np.ndarray:
    """Induced map Tor_i(k, src) -> Tor_i(k, tgt) of a semilinear map."""
    F = src.field
    if verify:
        check_semilinear(C, g_mat, src, tgt)
    ts, tt = tor(src, i), tor(tgt, i)
    if ts.dim == 0 or tt.dim == 0:
        return la.zeros(F, tt.dim, ts.dim)
    Fi = semilinear_chain_matrix(C, g_mat, src, tgt, i)
    if verify and i >= 1:
        Fim1 = semilinear_chain_matrix(C, g_mat, src, tgt, i - 1)
        dN, dM = diff_matrix(tgt, i), diff_matrix(src, i)
        if Fi.shape[1] <= 600:
            probes = la.eye(F, Fi.shape[1])
        else:
            rng = np.random.default_rng(0)
            probes = np.hstack([ts.reps, la.rand_mat(F, rng, Fi.shape[1], 16)])
        lhs = la.matmul(F, dN, la.matmul(F, Fi, probes))
        rhs = la.matmul(F, Fim1, la.matmul(F, dM, probes))
        assert (lhs == rhs).all(), "semilinear lift is not a chain map"
    return tt.coords(la.matmul(F, Fi, ts.reps))


def connecting_map(incl: ModuleMap, proj: ModuleMap, i: int) -> np.ndarray:
    """Connecting map Tor_i(M'') -> Tor_{i-1}(M') of 0 -> M' -> M -> M'' -> 0,
    computed by the zig-zag on explicit chains."""
    F = incl.source.field
    Mp, M, Mpp = incl.source, incl.target, proj.target
    ts = tor(Mpp, i)
    tt = tor(Mp, i - 1)
    if ts.dim == 0 or tt.dim == 0:
        return la.zeros(F, tt.dim, ts.dim)
    nsub = len(subsets(M.d, i))
    nsub1 = len(subsets(M.d, i - 1))
    proj_chain = la.kron(F, la.eye(F, nsub), proj.mat)
    incl_chain = la.kron(F, la.eye(F, nsub1), incl.mat)
    lifts = la.solve(F, proj_chain, ts.reps)
    z = la.matmul(F, diff_matrix(M, i), lifts)
    w = la.solve(F, incl_chain, z)
    return tt.coords(w)


def les_check(f: ModuleMap) -> dict:
    """Exactness report for the long exact Tor sequence of an injection f."""
    F = f.source.field
    if la.rank(F, f.mat) != f.source.dim:
        raise ValueError("les_check requires an injective map")
    parts = map_factor(f)
    Q, proj = parts["cokernel"]
    d = f.source.d
    segs = []
    # sequence ... -> Tor_i(M') -a-> Tor_i(M) -b-> Tor_i(M'') -δ-> Tor_{i-1}(M') -> ...
    maps = []
    dims = []
    for i in range(d, -1, -1):
        a = tor_map(f, i)
        b = tor_map(proj, i)
        maps.append(("a", i, a))
        maps.append(("b", i, b))
        dims.extend([(i, "M'", tor(f.source, i).dim), (i, "M", tor(f.target, i).dim), (i, "M''", tor(Q, i).dim)])
        if i > 0:
            maps.append(("delta", i, connecting_map(f, proj, i)))
    # walk consecutive pairs and check exactness at the shared node
    ok = True
    for (n1, i1, m1), (n2, i2, m2) in zip(maps, maps[1:]):
        comp = la.matmul(F, m2, m1)
        mid_dim = m1.shape[0]
        exact_here = (not comp.any()) and (la.rank(F, m1) + la.rank(F, m2) == mid_dim)
        segs.append({"after": (n1, i1), "before": (n2, i2), "exact": bool(exact_here), "mid_dim": mid_dim})
        ok = ok and exact_here
    # leading injectivity at Tor_d(M') and trailing surjectivity at Tor_0(M'')
    lead = la.rank(F, maps[0][2]) == tor(f.source, d).dim
    tail = la.rank(F, maps[-1][2]) == tor(Q, 0).dim
    segs.append({"after": ("start", d), "before": ("a", d), "exact": bool(lead), "mid_dim": tor(f.source, d).dim})
    segs.append({"after": ("b", 0), "before": ("end", 0), "exact": bool(tail), "mid_dim": tor(Q, 0).dim})
    ok = ok and lead and tail
    return {"exact": bool(ok), "positions": segs, "dims": dims}
