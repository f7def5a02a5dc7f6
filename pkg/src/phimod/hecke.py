"""Serre weights, the spherical Hecke kernel, and the coset model of the
graded pieces of the compact induction.

The weight acts through GL_2 of the residue field; the two Iwasawa variables
act through unipotent translations weighted by inverse Teichmüller characters.
R_m lives on the basis (digit coset, weight vector); the two halves of the
Hecke operator are a one-digit spread (degree +1) and a top-digit fold
(degree -1) twisted by the rank-one kernel P.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import linalg as la
from .field import Fq, fq_make, frobenius
from .flmod import FLModule, ModuleMap, cyclic_module, hom_basis, mon_ideal, staircase
from .koszul import tor, tor_map
from .localring import RAMIFIED, UNRAMIFIED, digit_decompose, make_ring
from .phi import (
    TwistSpec,
    pullback,
    ram_twist,
    reduced_monomials,
    twist_ideal,
    unram_twist,
)
from .skewmod import SkewPresentation

FL_DIM_CAP = 1600  # explicit FLModule / Tor route above this falls back to transport


@dataclass(frozen=True)
class SerreWeight:
    case: str
    p: int
    params: tuple

    def __post_init__(self):
        if self.case not in (UNRAMIFIED, RAMIFIED):
            raise ValueError("weight case must be 'unram' or 'ram'")
        rs = self.params
        if self.case == UNRAMIFIED and len(rs) != 2:
            raise ValueError("unramified weight takes (r0, r1)")
        if self.case == RAMIFIED and len(rs) != 1:
            raise ValueError("ramified weight takes (r,)")
        if any(not (0 <= r <= self.p - 1) for r in rs):
            raise ValueError("weight parameters must lie in [0, p-1]")

    @property
    def field(self) -> Fq:
        return fq_make(self.p, 2 if self.case == UNRAMIFIED else 1)

    @property
    def dim(self) -> int:
        if self.case == UNRAMIFIED:
            return (self.params[0] + 1) * (self.params[1] + 1)
        return self.params[0] + 1

    def ann_ideal(self):
        if self.case == UNRAMIFIED:
            r0, r1 = self.params
            return mon_ideal(2, (r0 + 1, 0), (0, r1 + 1))
        (r,) = self.params
        return mon_ideal(2, (r + 1, 0), (0, 1))

    def label(self) -> str:
        if self.case == UNRAMIFIED:
            return f"({self.params[0]},{self.params[1]})"
        return f"{self.params[0]}"


def all_weights(p: int, case: str) -> list[SerreWeight]:
    if case == UNRAMIFIED:
        return [SerreWeight(case, p, (r0, r1)) for r0 in range(p) for r1 in range(p)]
    return [SerreWeight(case, p, (r,)) for r in range(p)]


# --------------------------------------------------------------------------
# symmetric-power matrices
# --------------------------------------------------------------------------


def _binom_expand(F: Fq, s: int, t: int, m: int) -> list[int]:
    """Coefficients of (s·x + t·y)^m on the basis x^{m-k} y^k."""
    return [F.mul(F.mul(math.comb(m, k) % F.p, F.pow(s, m - k)), F.pow(t, k)) for k in range(m + 1)]


def _poly_mul(F: Fq, a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return out


def sym_matrix(F: Fq, g, r: int) -> np.ndarray:
    """Action of g = [[a, b], [c, d]] on Sym^r of the standard plane,
    basis x^{r-i} y^i with x -> a x + c y, y -> b x + d y."""
    a, b, c, d = g
    M = la.zeros(F, r + 1, r + 1)
    for i in range(r + 1):
        col = _poly_mul(F, _binom_expand(F, a, c, r - i), _binom_expand(F, b, d, i))
        for j in range(r + 1):
            M[j, i] = col[j]
    return M


def weight_rep(wt: SerreWeight, g) -> np.ndarray:
    """Matrix of the weight at a residue GL_2 element g = (a, b, c, d)."""
    F = wt.field
    if wt.case == RAMIFIED:
        return sym_matrix(F, g, wt.params[0])
    r0, r1 = wt.params
    gfr = tuple(frobenius(F, x) for x in g)
    return la.kron(F, sym_matrix(F, g, r0), sym_matrix(F, gfr, r1))


def _u_upper(lam):
    return (1, lam, 0, 1)


def _l_lower(c):
    return (1, 0, c, 1)


def _w_elt():
    return (0, 1, 1, 0)


# --------------------------------------------------------------------------
# the weight as a module over the two Iwasawa variables
# --------------------------------------------------------------------------


def weight_module(wt: SerreWeight) -> FLModule:
    """The weight as a module for the two variables, with the line of
    upper-unipotent invariants and its Weyl translate marked."""
    F = wt.field
    n = wt.dim
    sig_u = {lam: weight_rep(wt, _u_upper(lam)) for lam in F.elements()}
    X = la.zeros(F, n, n)
    for lam in F.units():
        X = la.madd(F, X, la.smul(F, F.inv(lam), la.msub(F, sig_u[lam], la.eye(F, n))))
    Y = la.zeros(F, n, n)
    if wt.case == UNRAMIFIED:
        for lam in F.units():
            coeff = frobenius(F, F.inv(lam))  # lam^{-p}
            Y = la.madd(F, Y, la.smul(F, coeff, la.msub(F, sig_u[lam], la.eye(F, n))))
    # ramified: the second variable translates by uniformizer multiples, which
    # act trivially on the inflated weight, so Y stays the zero matrix.
    M = FLModule(F, [X, Y], check=True)
    inv_stack = np.vstack([la.msub(F, sig_u[lam], la.eye(F, n)) for lam in F.units()])
    v0s = la.nullspace(F, inv_stack)
    if v0s.shape[1] != 1:
        raise RuntimeError("upper-unipotent invariants are not a line")
    coinv_rank = la.rank(F, np.hstack([la.msub(F, sig_u[lam], la.eye(F, n)) for lam in F.units()]))
    if n - coinv_rank != 1:
        raise RuntimeError("upper-unipotent coinvariants are not a line")
    v0 = v0s[:, 0]
    w_v0 = la.matvec(F, weight_rep(wt, _w_elt()), v0)
    M.marked = {"v0": v0, "w_v0": w_v0}
    M.weight = wt
    return M


def hecke_kernel(wt: SerreWeight) -> np.ndarray:
    """The rank-one kernel P: unique solution of the coset-stabilizer
    constraints, normalized by P(w v0) = w v0."""
    F = wt.field
    n = wt.dim
    eqs = []
    I_vec = la.eye(F, n * n)
    for lam in F.units():
        A = weight_rep(wt, _u_upper(lam))
        eqs.append(la.msub(F, la.kron(F, la.eye(F, n), A.T), I_vec))
        B = weight_rep(wt, _l_lower(lam))
        eqs.append(la.msub(F, la.kron(F, B, la.eye(F, n)), I_vec))
    for a in F.units():
        for d in F.units():
            H = weight_rep(wt, (a, 0, 0, d))
            eqs.append(la.msub(F, la.kron(F, H, la.eye(F, n)), la.kron(F, la.eye(F, n), H.T)))
    K = la.nullspace(F, np.vstack(eqs))
    if K.shape[1] != 1:
        raise RuntimeError(f"Hecke kernel space has dimension {K.shape[1]}, expected 1")
    P0 = K[:, 0].reshape(n, n)
    sig = weight_module(wt)
    w_v0 = sig.marked["w_v0"]
    y = la.matvec(F, P0, w_v0)
    idx = int(np.nonzero(w_v0)[0][0])
    if y[idx] == 0:
        raise RuntimeError("kernel does not fix the Weyl-translated invariant line")
    c = F.mul(int(y[idx]), F.inv(int(w_v0[idx])))
    P = la.smul(F, F.inv(c), P0)
    if not (la.matvec(F, P, w_v0) == w_v0).all():
        raise RuntimeError("kernel normalization failed")
    if la.rank(F, P) != 1:
        raise RuntimeError("Hecke kernel is not rank one")
    return P


# --------------------------------------------------------------------------
# sparse pair helper for large coset modules
# --------------------------------------------------------------------------


class SparsePair:
    """A code matrix over F_{p^f} stored as two integer sparse components."""

    def __init__(self, F: Fq, S0, S1):
        self.F = F
        self.S0 = S0.tocsr()
        self.S1 = S1.tocsr()
        self.shape = S0.shape

    def apply_dense(self, D: np.ndarray) -> np.ndarray:
        F = self.F
        D = np.asarray(D, dtype=np.int64)
        D0, D1 = D % F.p, D // F.p
        c0, c1 = F.g2
        P00 = self.S0 @ D0
        P11 = self.S1 @ D1
        P01 = self.S0 @ D1 + self.S1 @ D0
        R0 = P00 + c0 * P11
        R1 = P01 + c1 * P11
        return ((R0 % F.p) + F.p * (R1 % F.p)).astype(np.int16)


class DenseOp:
    def __init__(self, F: Fq, M: np.ndarray):
        self.F = F
        self.M = M
        self.shape = M.shape

    def apply_dense(self, D: np.ndarray) -> np.ndarray:
        return la.matmul(self.F, self.M, D)


# --------------------------------------------------------------------------
# the coset model
# --------------------------------------------------------------------------


class HeckeModel:
    """All per-weight data: the weight module, kernel, coset modules R_m,
    the two Hecke halves, the degree-shift isomorphisms, and the two
    twisted-module presentations."""

    def __init__(self, wt: SerreWeight, u: int = 1, fl_cap: int = FL_DIM_CAP):
        self.wt = wt
        self.u = u
        self.fl_cap = fl_cap
        F = wt.field
        self.field = F
        self.case = wt.case
        self.p = wt.p
        self.q = F.q
        self.sigma = weight_module(wt)
        self.P = hecke_kernel(wt)
        self.twist = unram_twist(F, wt.p) if wt.case == UNRAMIFIED else ram_twist(F, wt.p, u % wt.p)
        self.sig_u = {lam: weight_rep(wt, _u_upper(lam)) for lam in F.elements()}
        self.sig_w = weight_rep(wt, _w_elt())
        self._acts: dict = {}
        self._R: dict = {0: self.sigma}
        self._iso: dict = {}
        self._chain: dict = {}

    # -- translation bookkeeping ------------------------------------------
    def _translation(self, m: int, elt) -> tuple:
        """Target coset indices and carry digits for translation by elt on
        level-m cosets (elt given at level m+1)."""
        ring = make_ring(self.case, self.p, m + 1, self.u)
        q = self.q
        tgt = np.empty(q**m, dtype=np.int64)
        dlt = np.empty(q**m, dtype=np.int64)
        for c in range(q**m):
            digits = [(c // q**i) % q for i in range(m)] + [0]
            z = ring.add(elt, ring.from_digits(digits))
            tgt[c], dlt[c] = digit_decompose(ring, z, m)
        return tgt, dlt

    def _rho_terms(self, m: int):
        """Per-variable list of (coefficient, tgt, delta) translation data."""
        F = self.field
        ring = make_ring(self.case, self.p, m + 1, self.u)
        terms_x, terms_y = [], []
        for lam in F.units():
            data = self._translation(m, ring.teichmuller(lam))
            terms_x.append((F.inv(lam), data))
            if self.case == UNRAMIFIED:
                terms_y.append((frobenius(F, F.inv(lam)), data))
        if self.case == RAMIFIED:
            w = ring.uniformizer()
            for lam in F.units():
                data = self._translation(m, ring.mul(w, ring.teichmuller(lam)))
                terms_y.append((F.inv(lam), data))
        return terms_x, terms_y

    def r_dim(self, m: int) -> int:
        return self.q**m * self.wt.dim

    def _build_act(self, m: int):
        """Action matrices of the two variables on R_m (dense or sparse)."""
        if m in self._acts:
            return self._acts[m]
        F = self.field
        n = self.wt.dim
        dim = self.r_dim(m)
        terms_x, terms_y = self._rho_terms(m)
        dense = dim <= max(self.fl_cap, 2000)
        ops = []
        for terms in (terms_x, terms_y):
            if dense:
                acc0 = np.zeros((dim, dim), dtype=np.int64)
                acc1 = np.zeros((dim, dim), dtype=np.int64)
            else:
                rows, cols, v0, v1 = [], [], [], []
            diag_coeff0 = 0
            diag_coeff1 = 0
            for coeff, (tgt, dlt) in terms:
                diag_coeff0 = (diag_coeff0 + coeff % F.p) % F.p
                diag_coeff1 = (diag_coeff1 + coeff // F.p) % F.p
                for c in range(self.q**m):
                    blk = la.smul(F, coeff, self.sig_u[int(dlt[c])])
                    b0, b1 = np.asarray(blk, dtype=np.int64) % F.p, np.asarray(blk, dtype=np.int64) // F.p
                    r0 = int(tgt[c]) * n
                    c0 = c * n
                    if dense:
                        acc0[r0 : r0 + n, c0 : c0 + n] += b0
                        acc1[r0 : r0 + n, c0 : c0 + n] += b1
                    else:
                        rr, cc = np.meshgrid(np.arange(r0, r0 + n), np.arange(c0, c0 + n), indexing="ij")
                        rows.append(rr.reshape(-1))
                        cols.append(cc.reshape(-1))
                        v0.append(b0.reshape(-1))
                        v1.append(b1.reshape(-1))
            # subtract (sum of coefficients) * identity
            dd = np.arange(dim)
            if dense:
                acc0[dd, dd] -= diag_coeff0
                acc1[dd, dd] -= diag_coeff1
                op = DenseOp(F, ((acc0 % F.p) + F.p * (acc1 % F.p)).astype(np.int16))
            else:
                rows.append(dd)
                cols.append(dd)
                v0.append(np.full(dim, -diag_coeff0, dtype=np.int64))
                v1.append(np.full(dim, -diag_coeff1, dtype=np.int64))
                R = np.concatenate(rows)
                C = np.concatenate(cols)
                S0 = sp.coo_matrix((np.concatenate(v0), (R, C)), shape=(dim, dim)).tocsr()
                S1 = sp.coo_matrix((np.concatenate(v1), (R, C)), shape=(dim, dim)).tocsr()
                S0.data %= F.p
                S1.data %= F.p
                op = SparsePair(F, S0, S1)
            ops.append(op)
        self._acts[m] = tuple(ops)
        return self._acts[m]

    def R(self, m: int) -> FLModule:
        """R_m as an explicit module (raises SizeLimit above the cap)."""
        if m in self._R:
            return self._R[m]
        if self.r_dim(m) > self.fl_cap:
            from .skewmod import SizeLimit

            raise SizeLimit(f"R_{m} has dimension {self.r_dim(m)}")
        ops = self._build_act(m)
        M = FLModule(self.field, [ops[0].M, ops[1].M], check=True)
        M.marked = {}
        self._R[m] = M
        return M

    # -- Hecke halves ------------------------------------------------------
    def t_plus(self, m: int) -> np.ndarray:
        """T_+ : R_m -> R_{m+1}, the one-digit spread by the kernel.

        The digit blocks are w P l(-λ) w: their left unipotent invariance is
        what absorbs the Teichmüller carry digits of the group action.
        """
        F = self.field
        n = self.wt.dim
        src, tgt = self.r_dim(m), self.r_dim(m + 1)
        out = la.zeros(F, tgt, src)
        for lam in F.elements():
            low = weight_rep(self.wt, _l_lower(int(F.NEG[lam])))
            blk = la.matmul(F, self.sig_w, la.matmul(F, self.P, la.matmul(F, low, self.sig_w)))
            for c in range(self.q**m):
                r0 = (c + lam * self.q**m) * n
                out[r0 : r0 + n, c * n : (c + 1) * n] = blk
        return out

    def t_minus(self, m: int) -> np.ndarray:
        """T_- : R_m -> R_{m-1}, the top-digit fold through the kernel."""
        F = self.field
        n = self.wt.dim
        assert m >= 1
        src, tgt = self.r_dim(m), self.r_dim(m - 1)
        out = la.zeros(F, tgt, src)
        for c in range(self.q**m):
            delta = c // self.q ** (m - 1)
            base = c % self.q ** (m - 1)
            blk = la.matmul(F, self.sig_u[delta], self.P)
            out[base * n : (base + 1) * n, c * n : (c + 1) * n] = blk
        return out

    # -- degree-shift isomorphisms ----------------------------------------
    def chain(self, j: int) -> FLModule:
        """j-fold pullback of the weight module along the twist."""
        if j not in self._chain:
            if j == 0:
                self._chain[0] = self.sigma
            else:
                self._chain[j] = pullback(self.twist, self.chain(j - 1))
        return self._chain[j]

    def _alpha_push(self, m: int) -> np.ndarray:
        """R_{m-1} -> R_m, the digit shift [c, v] -> [ϖc, v]."""
        F = self.field
        n = self.wt.dim
        out = la.zeros(F, self.r_dim(m), self.r_dim(m - 1))
        for c in range(self.q ** (m - 1)):
            out[(c * self.q) * n : (c * self.q) * n + n, c * n : (c + 1) * n] = la.eye(F, n)
        return out

    def iso(self, m: int, twist: TwistSpec | None = None) -> np.ndarray:
        """Matrix of pullback^m(sigma) -> R_m sending a ⊗ v to a·[α^m, v].

        With the square twist this is the even-graded comparison onto R_2m.
        """
        key = (m, twist.exps if twist else None)
        if key in self._iso:
            return self._iso[key]
        F = self.field
        t = twist or self.twist
        steps = 1 if twist is None else 2  # α-pushes per degree of the twist
        if m == 0:
            out = la.eye(F, self.sigma.dim)
        else:
            prev = self.iso(m - 1, twist)
            emb = prev
            for _ in range(steps):
                lvl = _push_level(emb.shape[0], self.wt.dim, self.q)
                emb = la.matmul(F, self._alpha_push(lvl + 1), emb)
            target_level = _push_level(emb.shape[0], self.wt.dim, self.q)
            ops = self._build_act(target_level)
            mons = reduced_monomials(t)
            blocks = {(0,) * 2: emb}
            order = []
            for mon in mons:
                order.append(mon)
                if mon == (0, 0):
                    continue
                if mon[0] > 0:
                    prev_mon = (mon[0] - 1, mon[1])
                    op = ops[0]
                else:
                    prev_mon = (mon[0], mon[1] - 1)
                    op = ops[1]
                blocks[mon] = op.apply_dense(blocks[prev_mon])
            out = np.hstack([blocks[mon] for mon in mons]).astype(np.int16)
        self._iso[key] = out
        return out

    def iso_checked(self, m: int) -> np.ndarray:
        """iso(m) with A-linearity and bijectivity certified (small m)."""
        mat = self.iso(m)
        F = self.field
        Rm = self.R(m)
        Pm = self.chain(m)
        for As, At in zip(Pm.acts, Rm.acts):
            assert (la.matmul(F, mat, As) == la.matmul(F, At, mat)).all(), "comparison map not A-linear"
        assert la.rank(F, mat) == Rm.dim, "comparison map not bijective"
        return mat

    # -- presentations ------------------------------------------------------
    def transported_components(self):
        """(rho_minus, rho_plus): the two Hecke halves on R_1 pulled back to
        the degree-zero coordinates."""
        F = self.field
        iso1 = self.iso_checked(1)
        iso2 = self.iso_checked(2) if self.r_dim(2) <= self.fl_cap else self.iso(2)
        rho_minus = la.matmul(F, self.t_minus(1), iso1)
        rho_plus = la.solve(F, iso2, la.matmul(F, self.t_plus(1), iso1))
        return rho_minus, rho_plus

    def coker_presentation(self) -> SkewPresentation:
        """Presentation of the cokernel of the Hecke operator on the
        non-negative part of the induction."""
        F = self.field
        V = self.chain(1)
        rho_minus, rho_plus = self.transported_components()
        r0 = ModuleMap(V, self.sigma, rho_minus)
        r2 = ModuleMap(V, self.chain(2), rho_plus)
        return SkewPresentation(
            self.twist,
            self.sigma,
            V,
            {0: r0, 2: r2},
            offset=1,
            relations_injective=True,
            name=f"coker-T[{self.case} p={self.p} {self.wt.label()}]",
            chain=[self.sigma, self.chain(1), self.chain(2)],
        )

    def even_presentation(self) -> SkewPresentation:
        """Presentation of the even part: even-degree copies modulo the
        Hecke images of the odd ones, over the squared twist."""
        F = self.field
        V = self.chain(1)
        t2 = self.twist.square()
        W2 = pullback(t2, self.sigma)
        iso1 = self.iso_checked(1)
        iso2_1 = self.iso(1, twist=t2)
        # certify the square-twist comparison where affordable
        if self.r_dim(2) <= self.fl_cap:
            R2 = self.R(2)
            for As, At in zip(W2.acts, R2.acts):
                assert (la.matmul(F, iso2_1, As) == la.matmul(F, At, iso2_1)).all()
            assert la.rank(F, iso2_1) == R2.dim
        rho_minus = la.matmul(F, self.t_minus(1), iso1)
        rho_plus = la.solve(F, iso2_1, la.matmul(F, self.t_plus(1), iso1))
        r0 = ModuleMap(V, self.sigma, rho_minus)
        r1 = ModuleMap(V, W2, rho_plus)
        return SkewPresentation(
            t2,
            self.sigma,
            V,
            {0: r0, 1: r1},
            offset=1,
            relations_injective=True,
            name=f"even-part[{self.case} p={self.p} {self.wt.label()}]",
            chain=[self.sigma, W2],
        )


def _push_level(dim: int, n: int, q: int) -> int:
    m = 0
    d = dim // n
    while d > 1:
        d //= q
        m += 1
    return m


_MODEL_CACHE: dict = {}


def hecke_model(wt: SerreWeight, u: int = 1) -> HeckeModel:
    key = (wt, u)
    if key not in _MODEL_CACHE:
        _MODEL_CACHE[key] = HeckeModel(wt, u)
    return _MODEL_CACHE[key]


def rm_module(wt: SerreWeight, m: int, u: int = 1) -> FLModule:
    return hecke_model(wt, u).R(m)


def hecke_t(wt: SerreWeight, m: int, u: int = 1) -> tuple:
    """(T_+ : R_m -> R_{m+1}, T_- : R_m -> R_{m-1}) as module maps."""
    model = hecke_model(wt, u)
    Tp = ModuleMap(model.R(m), model.R(m + 1), model.t_plus(m))
    Tm = ModuleMap(model.R(m), model.R(m - 1), model.t_minus(m)) if m >= 1 else None
    return Tp, Tm


def rm_iso(wt: SerreWeight, m: int, u: int = 1) -> ModuleMap:
    model = hecke_model(wt, u)
    return ModuleMap(model.chain(m), model.R(m), model.iso_checked(m))


def coker_presentation(wt: SerreWeight, u: int = 1) -> SkewPresentation:
    return hecke_model(wt, u).coker_presentation()


def even_presentation(wt: SerreWeight, u: int = 1) -> SkewPresentation:
    return hecke_model(wt, u).even_presentation()


# --------------------------------------------------------------------------
# parameter system check
# --------------------------------------------------------------------------


def parameter_system_check(p: int, case: str, u: int = 1) -> dict:
    """The two variables generate the square-free part of the augmentation
    ideal of the level-2 coset group algebra: rank-2 image in m/m^2."""
    F = fq_make(p, 2 if case == UNRAMIFIED else 1)
    ring = make_ring(case, p, 2, u)
    size = ring.size
    index = {}
    for i in range(size):
        index[ring.from_digits(ring.index_digits(i))] = i

    def delta(elt):
        v = la.zeros(F, size, 1)[:, 0]
        v[index[elt]] = 1
        return v

    zero = ring.zero()
    Xv = la.zeros(F, size, 1)[:, 0]
    Yv = la.zeros(F, size, 1)[:, 0]
    for lam in F.units():
        Xv = la.madd(F, Xv, la.smul(F, F.inv(lam), la.msub(F, delta(ring.teichmuller(lam)), delta(zero))))
        if case == UNRAMIFIED:
            Yv = la.madd(
                F, Yv, la.smul(F, frobenius(F, F.inv(lam)), la.msub(F, delta(ring.teichmuller(lam)), delta(zero)))
            )
        else:
            elt = ring.mul(ring.uniformizer(), ring.teichmuller(lam))
            Yv = la.madd(F, Yv, la.smul(F, F.inv(lam), la.msub(F, delta(elt), delta(zero))))
    # augmentation ideal basis and its square
    elts = [ring.from_digits(ring.index_digits(i)) for i in range(size)]
    m_basis = [la.msub(F, delta(e), delta(zero)) for e in elts if e != zero]
    sq_cols = []
    for a_elt in elts:
        if a_elt == zero:
            continue
        for b_elt in elts:
            if b_elt == zero:
                continue
            s = ring.add(a_elt, b_elt)
            v = delta(s)
            v = la.msub(F, v, delta(a_elt))
            v = la.msub(F, v, delta(b_elt))
            v = la.madd(F, v, delta(zero))
            sq_cols.append(v)
    M2 = np.stack(sq_cols, axis=1)
    M2b, _ = la.col_basis(F, M2)
    r2 = M2b.shape[1]
    mm2_dim = len(m_basis) - r2
    full = np.hstack([M2b, Xv.reshape(-1, 1), Yv.reshape(-1, 1)])
    indep = la.rank(F, full) == r2 + 2
    return {"ok": bool(indep and mm2_dim == 2), "mm2_dim": int(mm2_dim), "independent": bool(indep)}


# --------------------------------------------------------------------------
# kernel intersection (the degree-one Tor obstruction)
# --------------------------------------------------------------------------


def _koszul_generator_class(space, mod: FLModule, which: int, exponent: int) -> np.ndarray:
    """Homology coordinates of the degree-1 cycle attached to a pure-power
    ideal generator: the basis monomial X_which^{exponent-1} placed in the
    e_which slot of the chain space."""
    F = mod.field
    mons = mod.cyclic[1]
    idx = mod.cyclic[2]
    mono = tuple(exponent - 1 if j == which else 0 for j in range(2))
    v = la.zeros(F, 2 * mod.dim, 1)[:, 0]
    v[which * mod.dim + idx[mono]] = 1
    return space.coords(v)[:, 0]


def kernel_intersection_check(wt: SerreWeight, u: int = 1) -> dict:
    """Common kernel of the degree-one Tor maps of homomorphisms out of the
    twisted cyclic quotient, with the boundary-case classification."""
    F = wt.field
    model = hecke_model(wt, u)
    t = model.twist
    I = wt.ann_ideal()
    phiI = twist_ideal(t, I)
    phi2I = twist_ideal(t, phiI)
    A_I = cyclic_module(F, I)
    A_phiI = cyclic_module(F, phiI)
    A_phi2I = cyclic_module(F, phi2I)
    homs1 = hom_basis(A_phiI, A_I)
    homs2 = hom_basis(A_phiI, A_phi2I)
    G1 = [tor_map(h, 1) for h in homs1]
    G2 = [tor_map(h, 1) for h in homs2]
    t1 = tor(A_phiI, 1)
    span1 = np.stack([g.reshape(-1) for g in G1], axis=1) if G1 else la.zeros(F, 1, 0)
    span2 = np.stack([g.reshape(-1) for g in G2], axis=1) if G2 else la.zeros(F, 1, 0)
    dim1 = la.rank(F, span1) if span1.size else 0
    dim2 = la.rank(F, span2) if span2.size else 0
    if wt.case == UNRAMIFIED:
        r0, r1 = wt.params
        boundary = (r0, r1) in ((wt.p - 1, 0), (0, wt.p - 1))
    else:
        (r,) = wt.params
        boundary = r in (0, wt.p - 1)
    report = {
        "weight": wt.label(),
        "boundary": bool(boundary),
        "span_s1_dim": int(dim1),
        "span_s2_dim": int(dim2),
        "tor1_dim": int(t1.dim),
    }
    assert dim2 <= 1, "degree-one Tor image of the second hom space is not a line"
    report["refined_vanishing_ok"] = bool((dim2 == 1) == boundary and (boundary or dim1 == 0))
    # the common kernel statement, covering all s2 at once:
    # every Tor_1(s2) is a multiple of the span generator E, so any injective
    # s2 has kernel containing ker(E); off the boundary E = 0 and everything
    # is in every kernel.
    if dim2 == 0:
        report["pairwise_ok"] = t1.dim > 0
        report["common_all_ok"] = t1.dim > 0
    else:
        Egen = None
        for g in G2:
            if g.any():
                Egen = g
                break
        kerE = la.nullspace(F, Egen)
        pairwise = all(
            la.nullspace(F, np.vstack([g, Egen])).shape[1] > 0 for g in G1
        ) if G1 else kerE.shape[1] > 0
        stacked = np.vstack(G1 + [Egen]) if G1 else Egen
        common = la.nullspace(F, stacked)
        report["pairwise_ok"] = bool(pairwise)
        report["common_all_ok"] = common.shape[1] > 0
    # injective witness with the distinguished monomial multiplier
    if wt.case == UNRAMIFIED:
        r0, r1 = wt.params
        p = wt.p
        a2 = (p * p * (r0 + 1) - p * (r1 + 1), p * p * (r1 + 1) - p * (r0 + 1))
    else:
        (r,) = wt.params
        p = wt.p
        a2 = (p * r, p - 1 - r)
    wit = _multiplication_map(A_phiI, A_phi2I, a2)
    report["witness_injective"] = la.rank(F, wit.mat) == A_phiI.dim
    Gw = tor_map(wit, 1)
    if dim2 == 1:
        report["witness_realizes_line"] = bool(Gw.any()) and la.rank(F, np.hstack([span2, Gw.reshape(-1, 1)])) == 1
    else:
        report["witness_realizes_line"] = not Gw.any()
    # the predicted generator class lies in every kernel
    pred = []
    xgen = next(a for _, a in phiI.gens if a[1] == 0)
    ygen = next(a for _, a in phiI.gens if a[0] == 0)
    if wt.case == UNRAMIFIED:
        if (r0, r1) == (wt.p - 1, 0):
            pred.append(("y", 1, ygen[1]))
        elif (r0, r1) == (0, wt.p - 1):
            pred.append(("x", 0, xgen[0]))
    else:
        (r,) = wt.params
        if r < wt.p - 1:
            pred.append(("x", 0, xgen[0]))
        if r > 0:
            pred.append(("y", 1, ygen[1]))
    pred_ok = True
    for _, which, expn in pred:
        z = _koszul_generator_class(t1, A_phiI, which, expn)
        assert z.any(), "predicted generator class is a boundary"
        for g in G1 + G2:
            if la.matvec(F, g, z).any():
                pred_ok = False
        if la.matvec(F, Gw, z).any():
            pred_ok = False
    report["predicted_class_ok"] = bool(pred_ok)
    report["ok"] = bool(
        report["refined_vanishing_ok"]
        and report["pairwise_ok"]
        and report["common_all_ok"]
        and report["witness_injective"]
        and report["witness_realizes_line"]
        and report["predicted_class_ok"]
    )
    return report


def _multiplication_map(src: FLModule, tgt: FLModule, exps: tuple) -> ModuleMap:
    """Multiplication by a monomial, between cyclic staircase quotients."""
    F = src.field
    mons_s = src.cyclic[1]
    idx_t = tgt.cyclic[2]
    mat = la.zeros(F, tgt.dim, src.dim)
    for k, m in enumerate(mons_s):
        target = tuple(a + b for a, b in zip(m, exps))
        if target in idx_t:
            mat[idx_t[target], k] = 1
    return ModuleMap(src, tgt, mat)
