"""Balanced objects, silent objects, centers as idempotent images.

A node of a defect surface carries a cyclic list of bimodule-category
factors (incoming lines plainly, outgoing lines through their opposites).
A :class:`BalancedObject` is an object of the plain Deligne product of the
factors together with, for each cyclic slot, a balancing isomorphism

    ``z_c :  c . U(x)  ->  U(x) . c``    (c simple in the slot category),

where ``c`` acts on the left of the factor right of the slot and on the
right of the factor left of it.  Relative Deligne products / centers are
never materialized as categories: their Hom-spaces are images of the
canonical retraction built from the balancings, and their objects are
balanced objects.

Balancing data is stored as matrices over *decorated bases*: the basis of
the decomposition of ``U(x)`` with one factor replaced by a word extension
(see :func:`dec_basis`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import homcalc, linalg
from .bimodule import BimoduleCategoryData, catdim, opposite_bimodule
from .fusion import global_dimension
from .homcalc import Mor, module_word, pure_word
from .report import Report
from .scalars import RunConfig

__all__ = [
    "NodeDescriptor", "BalancedObject", "NodeMor", "dec_basis",
    "silent_object", "validate_balancing", "braided_ev", "braided_coev",
    "center_retraction", "center_hom_basis", "center_trace", "induce",
    "induction_adjoint_maps", "contract", "tuple_pdim",
]


@dataclass(frozen=True)
class NodeDescriptor:
    """Cyclic list of bimodule factors around a node.  Slot ``i`` sits
    between factor ``i`` and factor ``(i+1) % R``; its acting category is
    ``right_cat(factor_i) == left_cat(factor_{i+1})``."""

    factors: tuple

    def __post_init__(self):
        r = len(self.factors)
        if r == 0:
            raise ValueError("empty node descriptor")
        for i in range(r):
            j = (i + 1) % r
            if self.factors[i].right_cat is not self.factors[j].left_cat:
                raise ValueError(
                    f"slot {i}: factor categories do not match "
                    f"({self.factors[i].name} | {self.factors[j].name})")

    @property
    def nslots(self):
        return len(self.factors)

    def slot_cat(self, i):
        return self.factors[i].right_cat

    def sectors(self, pos):
        return self.factors[pos].mlabels


@dataclass(eq=False)
class BalancedObject:
    """Underlying multiplicities plus one balancing matrix per (slot, simple
    of the slot category).  ``balanced_slots`` lists the slots that carry
    balancing data (ray labels have all of them; chain-line objects only
    their interior slots)."""

    desc: NodeDescriptor
    underlying: dict            # tuple(labels) -> mult
    balancing: dict             # (slot, label) -> ndarray over decorated bases
    cfg: RunConfig
    balanced_slots: tuple = ()
    name: str = "x"
    _cache: dict = field(default_factory=dict, repr=False)

    def support(self):
        return sorted(t for t, m in self.underlying.items() if m)

    def mult(self, t) -> int:
        return self.underlying.get(t, 0)

    def dim_u(self) -> int:
        return sum(self.underlying.values())

    def z(self, slot, c):
        return self.balancing[(slot, c)]

    def z_inv(self, slot, c):
        key = ("zinv", slot, c)
        if key not in self._cache:
            self._cache[key] = linalg.inv(self.z(slot, c), self.cfg)
        return self._cache[key]


def tuple_pdim(desc: NodeDescriptor, t, cfg):
    v = cfg.one
    for fac, s in zip(desc.factors, t):
        v = v * cfg.coerce(fac.p[s])
    return v


# ---------------------------------------------------------------------------
# decorated bases


def dec_basis(x: BalancedObject, pos=None, side=None, labels=()):
    """Decomposition basis of ``U(x)`` with factor ``pos`` decorated by the
    pure word ``labels`` on the given side.

    Returns a list of ``(t, q)`` for the plain basis, or ``(t, q, v, r)``
    with ``v`` the sector of the decorated word and ``r`` the fusion-path
    index; the represented simple summand is ``t`` with position ``pos``
    replaced by ``v``.
    """
    if pos is None:
        return [(t, q) for t in x.support() for q in range(x.mult(t))]
    fac = x.desc.factors[pos]
    out = []
    for t in x.support():
        w = _dec_word(fac, t[pos], side, labels)
        mults = homcalc.lc_mult(w)
        for q in range(x.mult(t)):
            for v in fac.mlabels:
                for r in range(mults.get(v, 0)):
                    out.append((t, q, v, r))
    return out


def _dec_word(fac, core, side, labels):
    if side == "L":
        return module_word(fac, tuple(labels), core, ())
    if side == "R":
        return module_word(fac, (), core, tuple(labels))
    raise ValueError(side)


def _index(basis):
    return {e: i for i, e in enumerate(basis)}


# ---------------------------------------------------------------------------
# node morphisms (between underlying objects of balanced objects)


@dataclass
class NodeMor:
    """Morphism ``U(x) -> U(y)`` in the plain Deligne product: one block per
    simple tuple (morphisms are tuple-diagonal)."""

    x: BalancedObject
    y: BalancedObject
    blocks: dict   # tuple -> ndarray (mult_y x mult_x)

    def block(self, t, cfg):
        if t in self.blocks:
            return self.blocks[t]
        return linalg.zeros(cfg, (self.y.mult(t), self.x.mult(t)))

    def compose(self, other):
        out = {}
        for t, b in self.blocks.items():
            if t in other.blocks:
                out[t] = b @ other.blocks[t]
        return NodeMor(other.x, self.y, out)

    def __add__(self, other):
        out = dict(self.blocks)
        for t, b in other.blocks.items():
            out[t] = out[t] + b if t in out else b
        return NodeMor(self.x, self.y, out)

    def scale(self, c):
        return NodeMor(self.x, self.y, {t: b * c for t, b in self.blocks.items()})

    def to_vector(self, cfg):
        """Flatten over the canonical enumeration [(t, q_y, q_x)]."""
        entries = []
        for t in sorted(set(self.x.support()) | set(self.y.support())):
            b = self.block(t, cfg)
            entries.extend(b.reshape(-1))
        v = linalg.zeros(cfg, (len(entries),))
        for i, e in enumerate(entries):
            v[i] = e
        return v

    @staticmethod
    def vector_space(x, y):
        dims = []
        for t in sorted(set(x.support()) | set(y.support())):
            dims.append((t, y.mult(t), x.mult(t)))
        return dims

    @staticmethod
    def from_vector(x, y, vec, cfg):
        blocks = {}
        ofs = 0
        for t, my, mx in NodeMor.vector_space(x, y):
            n = my * mx
            if n:
                blocks[t] = np.array(vec[ofs:ofs + n]).reshape(my, mx)
            ofs += n
        return NodeMor(x, y, blocks)


def identity_node_mor(x: BalancedObject, cfg) -> NodeMor:
    return NodeMor(x, x, {t: linalg.eye(cfg, x.mult(t)) for t in x.support()})


def random_node_mor(x, y, cfg, rng) -> NodeMor:
    blocks = {}
    for t in sorted(set(x.support()) & set(y.support())):
        blocks[t] = linalg.asmatrix(
            cfg, rng.integers(-3, 4, size=(y.mult(t), x.mult(t))).tolist())
    return NodeMor(x, y, blocks)


def node_trace(f: NodeMor, cfg):
    total = cfg.zero
    for t, b in f.blocks.items():
        tr = cfg.zero
        for i in range(min(b.shape)):
            tr = tr + b[i, i]
        total = total + tuple_pdim(f.x.desc, t, cfg) * tr
    return total


# ---------------------------------------------------------------------------
# the silent object


def silent_object(m: BimoduleCategoryData, cfg: RunConfig,
                  op_first: bool = True, name=None) -> BalancedObject:
    """The canonical transparent ray label of a line carrying ``m``:
    underlying ``sum_s  sbar (x) s`` (or ``s (x) sbar``), with the balancing
    whose matrix elements pair dual bases across the diagonal sum."""
    mbar = opposite_bimodule(m, cfg)
    if op_first:
        desc = NodeDescriptor((mbar, m))
        pos_opp, pos_plain = 0, 1
    else:
        desc = NodeDescriptor((m, mbar))
        pos_opp, pos_plain = 1, 0
    underlying = {}
    for s in m.mlabels:
        t = [None, None]
        t[pos_opp] = s
        t[pos_plain] = s
        underlying[tuple(t)] = 1
    x = BalancedObject(desc, underlying, {}, cfg,
                       balanced_slots=(0, 1) if len(desc.factors) == 2 else (0,),
                       name=name or f"silent({m.name})")
    # slot indices: slot i sits between factor i and factor i+1 (mod 2).
    # The A-slot (acting cat = left_cat(m)) has the plain factor on its
    # right; the B-slot has the opposite factor on its right.
    for slot in (0, 1):
        j = (slot + 1) % 2
        if j == pos_plain:
            _silent_fill_a_slot(x, m, mbar, slot, pos_opp, pos_plain, cfg)
        else:
            _silent_fill_b_slot(x, m, mbar, slot, pos_opp, pos_plain, cfg)
    x.balanced_slots = (0, 1)
    return x


def _diag_tuple(x, pos_opp, pos_plain, s):
    t = [None, None]
    t[pos_opp] = s
    t[pos_plain] = s
    return tuple(t)


def line_components_a(m: BimoduleCategoryData, a, cfg):
    """Component matrices of the transparent crossing of ``a`` (simple in
    ``left_cat(m)``) over a line labeled ``m``: from a left-attached on the
    plain M-object ``n`` to a right-attached on the opposite object ``kbar``.
    Returns dict ``(n, k) -> E`` with ``E[lam, phi]``,
    ``lam`` in paths_Mbar((kbar; a) -> nbar), ``phi`` in paths_M((a; n) -> k).
    """
    key = ("lineA", cfg.scalar_mode, a)
    cache = m._extra.setdefault("line_components", {})
    if key in cache:
        return cache[key]
    from .bimodule import _psi_left
    A = m.left_cat
    astar = A.dual[a]
    mbar = opposite_bimodule(m, cfg)
    out = {}
    for n in m.mlabels:
        for k in m.mlabels:
            w_ak = module_word(m, (astar,), k, ())
            dmu = homcalc.lc_mult(w_ak).get(n, 0)
            dphi = homcalc.lc_mult(module_word(m, (a,), n, ())).get(k, 0)
            nus = homcalc.lc_mult(module_word(mbar, (), k, (a,))).get(n, 0)
            if dmu == 0 or dphi == 0 or nus == 0:
                continue
            C = linalg.zeros(cfg, (nus, dmu))
            Z = linalg.zeros(cfg, (dmu, dphi))
            for mu in range(dmu):
                eps_pi = homcalc.pi(w_ak, n, mu, cfg)
                for nu in range(nus):
                    real = _psi_left(m, cfg, a, n, k, nu)
                    C[nu, mu] = eps_pi.compose(real).block(n, cfg)[0, 0]
                zeta = homcalc.tensor(
                    homcalc.ev_mor(A, a, cfg),
                    homcalc.identity(module_word(m, (), k, ()), cfg),
                    cfg).compose(homcalc.tensor(
                        homcalc.identity(pure_word(A, (a,)), cfg),
                        homcalc.iota(w_ak, n, mu, cfg), cfg))
                row = zeta.block(k, cfg)
                for phi in range(dphi):
                    Z[mu, phi] = row[0, phi]
            out[(n, k)] = C @ Z
    cache[key] = out
    return out


def line_components_b(m: BimoduleCategoryData, b, cfg):
    """Component matrices of the transparent crossing of ``b`` (simple in
    ``right_cat(m)``): from b left-attached on the opposite object ``nbar``
    to b right-attached on the plain object ``k``.  Returns dict
    ``(n, k) -> E`` with ``E[lam, phi]``, ``lam`` in paths_M((k; b) -> n),
    ``phi`` in paths_Mbar((b; nbar) -> kbar)."""
    key = ("lineB", cfg.scalar_mode, b)
    cache = m._extra.setdefault("line_components", {})
    if key in cache:
        return cache[key]
    from .bimodule import _phi_right
    B = m.right_cat
    bstar = B.dual[b]
    mbar = opposite_bimodule(m, cfg)
    out = {}
    for n in m.mlabels:
        for k in m.mlabels:
            w_bk = module_word(mbar, (bstar,), k, ())
            dmu = homcalc.lc_mult(w_bk).get(n, 0)
            dphi = homcalc.lc_mult(module_word(mbar, (b,), n, ())).get(k, 0)
            w_dst = module_word(m, (), k, (b,))
            nls = homcalc.lc_mult(w_dst).get(n, 0)
            if dmu == 0 or dphi == 0 or nls == 0:
                continue
            C = linalg.zeros(cfg, (nls, dmu))
            Z = linalg.zeros(cfg, (dmu, dphi))
            for mu in range(dmu):
                real = _phi_right(m, cfg, n, bstar, k, mu)
                for lam in range(nls):
                    C[lam, mu] = homcalc.pi(w_dst, n, lam, cfg).compose(
                        real).block(n, cfg)[0, 0]
                zeta = homcalc.tensor(
                    homcalc.ev_mor(B, b, cfg),
                    homcalc.identity(module_word(mbar, (), k, ()), cfg),
                    cfg).compose(homcalc.tensor(
                        homcalc.identity(pure_word(B, (b,)), cfg),
                        homcalc.iota(w_bk, n, mu, cfg), cfg))
                row = zeta.block(k, cfg)
                for phi in range(dphi):
                    Z[mu, phi] = row[0, phi]
            out[(n, k)] = C @ Z
    cache[key] = out
    return out


def _silent_fill_a_slot(x, m, mbar, slot, pos_opp, pos_plain, cfg):
    A = m.left_cat
    for a in A.labels:
        comps = line_components_a(m, a, cfg)
        src = dec_basis(x, pos_plain, "L", (a,))
        dst = dec_basis(x, pos_opp, "R", (a,))
        mat = linalg.zeros(cfg, (len(dst), len(src)))
        sidx, didx = _index(src), _index(dst)
        for (n, k), E in comps.items():
            tn = _diag_tuple(x, pos_opp, pos_plain, n)
            tk = _diag_tuple(x, pos_opp, pos_plain, k)
            for nu in range(E.shape[0]):
                for phi in range(E.shape[1]):
                    mat[didx[(tk, 0, n, nu)], sidx[(tn, 0, k, phi)]] = E[nu, phi]
        x.balancing[(slot, a)] = mat


def _silent_fill_b_slot(x, m, mbar, slot, pos_opp, pos_plain, cfg):
    B = m.right_cat
    for b in B.labels:
        comps = line_components_b(m, b, cfg)
        src = dec_basis(x, pos_opp, "L", (b,))
        dst = dec_basis(x, pos_plain, "R", (b,))
        mat = linalg.zeros(cfg, (len(dst), len(src)))
        sidx, didx = _index(src), _index(dst)
        for (n, k), E in comps.items():
            tn = _diag_tuple(x, pos_opp, pos_plain, n)
            tk = _diag_tuple(x, pos_opp, pos_plain, k)
            for lam in range(E.shape[0]):
                for phi in range(E.shape[1]):
                    mat[didx[(tk, 0, n, lam)], sidx[(tn, 0, k, phi)]] = E[lam, phi]
        x.balancing[(slot, b)] = mat


# ---------------------------------------------------------------------------
# balancing crossings with spectators
#
# The general transport used by holonomy walks, braided (co)evaluations and
# the retraction: apply z_c (or its inverse) while an additional single
# spectator label sits outside the crossing strand on either end.


def _dec2_basis(x, slot, j_word, i_word):
    """Doubly decorated basis: factor j carries the pure word ``j_word``
    attached on the left, factor i the word ``i_word`` attached on the
    right.  Elements: (t, q, v, pj, u, pi) (path indices 0 when the word is
    empty)."""
    i = slot
    j = (slot + 1) % x.desc.nslots
    out = []
    for t in x.support():
        for q in range(x.mult(t)):
            if j_word:
                wj = _dec_word(x.desc.factors[j], t[j], "L", j_word)
                mj = homcalc.lc_mult(wj)
                j_opts = [(v, r) for v in x.desc.factors[j].mlabels
                          for r in range(mj.get(v, 0))]
            else:
                j_opts = [(t[j], 0)]
            if i_word:
                wi = _dec_word(x.desc.factors[i], t[i], "R", i_word)
                mi = homcalc.lc_mult(wi)
                i_opts = [(u, r) for u in x.desc.factors[i].mlabels
                          for r in range(mi.get(u, 0))]
            else:
                i_opts = [(t[i], 0)]
            for v, pj in j_opts:
                for u, pi in i_opts:
                    out.append((t, q, v, pj, u, pi))
    return out


def z_cross_spectated(x: BalancedObject, slot, c, cfg,
                      spect_j=None, spect_i=None):
    """Matrix of ``z_c`` from the state with word ``(spect_j, c)`` attached
    left at factor j and ``(spect_i,)`` attached right at factor i, to the
    state with ``(spect_j,)`` at j and ``(c, spect_i)`` at i (the walking
    label lands inside the spectator).  Returns (src, dst, matrix)."""
    i = slot
    j = (slot + 1) % x.desc.nslots
    facj, faci = x.desc.factors[j], x.desc.factors[i]
    jw_src = ((spect_j, c) if spect_j else (c,))
    iw_src = ((spect_i,) if spect_i else ())
    jw_dst = ((spect_j,) if spect_j else ())
    iw_dst = ((c,) + ((spect_i,) if spect_i else ()))
    src = _dec2_basis(x, slot, jw_src, iw_src)
    dst = _dec2_basis(x, slot, jw_dst, iw_dst)
    didx = _index(dst)
    mat = linalg.zeros(cfg, (len(dst), len(src)))
    zl = dec_basis(x, j, "L", (c,))
    zr = dec_basis(x, i, "R", (c,))
    zli, zri = _index(zl), _index(zr)
    zmat = x.z(slot, c)

    for col, (t, q, v, pj, u, pi) in enumerate(src):
        # decompose the j-side paths through the inner (c; t_j) part
        if spect_j:
            wsrc = _dec_word(facj, t[j], "L", jw_src)
            iso = homcalc.split_iso(wsrc, 1, v, cfg)
            enum = homcalc.split_enum(wsrc, 1, v)
            jcomps = []
            for row_i, (tl, tr, il, ir, mu) in enumerate(enum):
                jcomps.append(((tr, ir, mu), iso[row_i, pj]))
        else:
            jcomps = [((v, pj, 0), cfg.one)]
        for (w_in, pin, specvert), coeff in jcomps:
            if not coeff:
                continue
            zcol = zli.get((t, q, w_in, pin))
            if zcol is None:
                continue
            for (t2, q2, u2, lam2), rowidx in zri.items():
                val = zmat[rowidx, zcol]
                if not val:
                    continue
                # t2: new tuple; u2 must equal old t[i]; t2[j] == w_in
                if u2 != t[i]:
                    continue
                # reassemble the i-side word (t2_i, c, spect_i)
                if spect_i:
                    wdst = _dec_word(faci, t2[i], "R", iw_dst)
                    iso2 = homcalc.split_iso(wdst, 2, u, cfg)
                    enum2 = homcalc.split_enum(wdst, 2, u)
                    ipaths = []
                    for r2, (tl2, tr2, il2, ir2, mu2) in enumerate(enum2):
                        if tl2 == u2 and il2 == lam2 and ir2 == 0 and mu2 == pi:
                            ipaths.append((r2, cfg.one))
                    iso2inv = linalg.inv(iso2, cfg)
                    icomps = []
                    for r2, w2 in ipaths:
                        for pdst in range(iso2inv.shape[0]):
                            vv = iso2inv[pdst, r2] * w2
                            if vv:
                                icomps.append((u, pdst, vv))
                else:
                    if u != u2:
                        continue
                    icomps = [(u2, lam2, cfg.one)]
                # reassemble the j-side word (spect_j; t2_j)
                if spect_j:
                    jdst = [(v, specvert_p, cc) for (specvert_p, cc) in
                            [(specvert, cfg.one)]]
                else:
                    jdst = [(t2[j], 0, cfg.one)]
                for (uu, pdst, vv) in icomps:
                    for (vdst, pjd, cc) in jdst:
                        key = (t2, q2, vdst, pjd, uu, pdst)
                        mat[didx[key], col] += coeff * val * vv * cc
    return src, dst, mat


def z_cross_spectated_inv(x: BalancedObject, slot, c, cfg,
                          spect_j=None, spect_i=None):
    """Inverse crossing: from ``(spect_j,)`` at j and ``(c, spect_i)`` at i
    back to ``(spect_j, c)`` at j and ``(spect_i,)`` at i."""
    src, dst, mat = z_cross_spectated(x, slot, c, cfg, spect_j, spect_i)
    return dst, src, linalg.inv(mat, cfg)


# ---------------------------------------------------------------------------
# braided (co)evaluations and the retraction


def braided_coev(x: BalancedObject, slot, c, cfg, check=False):
    """``cobrev_{x,c} : U(x) -> c* U(x) c`` at the given slot: returns
    (src, dst, matrix) over (plain, doubly decorated [c* at j | c at i])
    bases.  With ``check=True`` both defining expressions are computed and
    compared."""
    C = x.desc.slot_cat(slot)
    cstar = C.dual[c]
    i = slot
    j = (slot + 1) % x.desc.nslots
    facj, faci = x.desc.factors[j], x.desc.factors[i]
    plain = dec_basis(x)
    pidx = _index(plain)

    # form 1: (c* . z_c) o (coev_c . U): insert (c*, c) left at j, cross c
    mid = _dec2_basis(x, slot, (cstar, c), ())
    midx = _index(mid)
    e1 = linalg.zeros(cfg, (len(mid), len(plain)))
    for t in x.support():
        w = _dec_word(facj, t[j], "L", (cstar, c))
        ins = homcalc.tensor(homcalc.coev_mor(C, c, cfg),
                             homcalc.identity(module_word(facj, (), t[j], ()), cfg),
                             cfg)
        colv = ins.block(t[j], cfg)      # (paths at sector t_j) x 1
        for q in range(x.mult(t)):
            for r in range(colv.shape[0]):
                if colv[r, 0]:
                    e1[midx[(t, q, t[j], r, t[i], 0)], pidx[(t, q)]] += colv[r, 0]
    src2, dst2, zc = z_cross_spectated(x, slot, c, cfg, spect_j=cstar)
    assert src2 == mid
    m1 = zc @ e1

    if check:
        # form 2: (z_{c*}^{-1} . c) o (U . coev_{c*-dual}): insert (c*, c)
        # right at i (coev_c: 1 -> c* c), cross the inner c* backwards
        mid2 = _dec2_basis(x, slot, (), (cstar, c))
        m2idx = _index(mid2)
        e2 = linalg.zeros(cfg, (len(mid2), len(plain)))
        for t in x.support():
            w = _dec_word(faci, t[i], "R", (cstar, c))
            ins = homcalc.tensor(homcalc.identity(module_word(faci, (), t[i], ()), cfg),
                                 homcalc.coev_mor(C, c, cfg), cfg)
            colv = ins.block(t[i], cfg)
            for q in range(x.mult(t)):
                for r in range(colv.shape[0]):
                    if colv[r, 0]:
                        e2[m2idx[(t, q, t[j], 0, t[i], r)], pidx[(t, q)]] += colv[r, 0]
        sF, dF, zF = z_cross_spectated(x, slot, cstar, cfg, spect_i=c)
        assert dF == mid2 and sF == _dec2_basis(x, slot, (cstar,), (c,))
        m2 = linalg.inv(zF, cfg) @ e2
        res = linalg.matnorm(m1 - m2)
        if res > 1e3 * cfg.tol.eq_tol:
            raise ArithmeticError(f"braided coevaluation forms disagree: {res}")
    return plain, dst2, m1


def braided_ev(x: BalancedObject, slot, c, cfg, check=False):
    """``brev_{x,c} : c U(x) c* -> U(x)``: returns (src, dst, matrix) over
    (doubly decorated [c at j | c* at i], plain) bases."""
    C = x.desc.slot_cat(slot)
    cstar = C.dual[c]
    i = slot
    faci = x.desc.factors[i]
    plain = dec_basis(x)
    pidx = _index(plain)

    # form 1: (U . ev_c) o (z_c . c*): cross c, then contract (c, c*) at i
    src, mid, zc = z_cross_spectated(x, slot, c, cfg, spect_i=cstar)
    mididx = _index(mid)
    e = linalg.zeros(cfg, (len(plain), len(mid)))
    j0 = (slot + 1) % x.desc.nslots
    for t in x.support():
        contract = homcalc.tensor(
            homcalc.identity(module_word(faci, (), t[i], ()), cfg),
            homcalc.ev_mor(C, c, cfg), cfg)
        row = contract.block(t[i], cfg)   # 1 x paths
        for q in range(x.mult(t)):
            for r in range(row.shape[1]):
                if row[0, r]:
                    e[pidx[(t, q)], mididx[(t, q, t[j0], 0, t[i], r)]] += row[0, r]
    m1 = e @ zc

    if check:
        # form 2: (ev_c . U) o (c . z_{c*}^{-1}): cross the c* backwards to
        # the j side, contract (c, c*) there
        j = (slot + 1) % x.desc.nslots
        facj = x.desc.factors[j]
        sB, dB, zB = z_cross_spectated(x, slot, cstar, cfg, spect_j=c)
        # zB : [(c, c*) at j] -> [(c) at j, (c*) at i];  inverse goes back
        assert dB == src
        e2 = linalg.zeros(cfg, (len(plain), len(sB)))
        sBidx = _index(sB)
        for t in x.support():
            contract = homcalc.tensor(
                homcalc.ev_mor(C, c, cfg),
                homcalc.identity(module_word(facj, (), t[j], ()), cfg), cfg)
            row = contract.block(t[j], cfg)
            for q in range(x.mult(t)):
                for r in range(row.shape[1]):
                    if row[0, r]:
                        e2[pidx[(t, q)], sBidx[(t, q, t[j], r, t[i], 0)]] += row[0, r]
        m2 = e2 @ linalg.inv(zB, cfg)
        res = linalg.matnorm(m1 - m2)
        if res > 1e3 * cfg.tol.eq_tol:
            raise ArithmeticError(f"braided evaluation forms disagree: {res}")
    return src, plain, m1


# ---------------------------------------------------------------------------
# retraction onto center Hom-spaces, and center traces


def _dec2_conjugate(f: NodeMor, dec_x, dec_y, cfg):
    """Matrix of ``c . f . c'`` on doubly decorated bases: f is tuple-diagonal
    so decorations pass through unchanged."""
    didx_x = _index(dec_x)
    mat = linalg.zeros(cfg, (len(dec_y), len(dec_x)))
    yidx = _index(dec_y)
    for t, q, v, pj, u, pi in dec_x:
        b = f.block(t, cfg)
        for qy in range(b.shape[0]):
            val = b[qy, q]
            if val:
                key = (t, qy, v, pj, u, pi)
                mat[yidx[key], didx_x[(t, q, v, pj, u, pi)]] += val
    return mat


def retract_slot(f: NodeMor, slot, cfg) -> NodeMor:
    """The canonical retraction at one slot:
    ``r(f) = (1/dim C) sum_c d_c  brev_{y,c} o (c f c*) o cobrev_{x,c}``."""
    x, y = f.x, f.y
    C = x.desc.slot_cat(slot)
    D = global_dimension(C, cfg)
    plain_x, plain_y = dec_basis(x), dec_basis(y)
    out_vec = linalg.zeros(cfg, (len(plain_y), len(plain_x)))
    for c in C.labels:
        cstar = C.dual[c]
        _, dst_x, cob = braided_coev(x, slot, c, cfg)
        dec_x = dst_x
        dec_y = _dec2_basis(y, slot, (cstar,), (c,))
        conj = _dec2_conjugate(f, dec_x, dec_y, cfg)
        src_y, _, brv = braided_ev(y, slot, cstar, cfg)
        # brev_{y,c*}? the coevaluation produced [c* at j | c at i]; the
        # matching evaluation contracts that pair: walking label c*.
        assert src_y == dec_y
        total = brv @ conj @ cob
        out_vec = out_vec + total * (cfg.coerce(C.dims[c]) / D)
    pidx_x, pidx_y = _index(plain_x), _index(plain_y)
    blocks = {}
    for t in sorted(set(x.support()) & set(y.support())):
        b = linalg.zeros(cfg, (y.mult(t), x.mult(t)))
        for qy in range(y.mult(t)):
            for qx in range(x.mult(t)):
                b[qy, qx] = out_vec[pidx_y[(t, qy)], pidx_x[(t, qx)]]
        blocks[t] = b
    return NodeMor(x, y, blocks)


def center_retraction(x, y, f: NodeMor, cfg, slots=None) -> NodeMor:
    """Retraction onto the Hom-space of the center over all (or the given)
    balanced slots; idempotent, trace-preserving, identity on central
    morphisms."""
    out = f
    use = slots if slots is not None else x.balanced_slots
    for slot in use:
        out = retract_slot(out, slot, cfg)
    return out


def _nodemor_basis(x, y):
    out = []
    for t in sorted(set(x.support()) & set(y.support())):
        for qy in range(y.mult(t)):
            for qx in range(x.mult(t)):
                out.append((t, qy, qx))
    return out


def retraction_matrix(x, y, cfg, slots=None):
    basis = _nodemor_basis(x, y)
    mat = linalg.zeros(cfg, (len(basis), len(basis)))
    for col, (t, qy, qx) in enumerate(basis):
        f = NodeMor(x, y, {t: linalg.zeros(cfg, (y.mult(t), x.mult(t)))})
        f.blocks[t][qy, qx] = cfg.one
        rf = center_retraction(x, y, f, cfg, slots)
        for row, (t2, qy2, qx2) in enumerate(basis):
            if t2 in rf.blocks:
                mat[row, col] = rf.blocks[t2][qy2, qx2]
    return basis, mat


def center_hom_basis(x, y, cfg, slots=None):
    """Basis of the center Hom-space inside Hom(U(x), U(y)) as the image of
    the retraction idempotent.  Returns (list of NodeMor, projection
    coordinates matrix)."""
    basis, mat = retraction_matrix(x, y, cfg, slots)
    res = linalg.idempotency_residual(mat)
    if res > max(1e3 * cfg.tol.eq_tol, 0.0 if cfg.exact else 0.0):
        raise ArithmeticError(f"retraction not idempotent: residual {res}")
    bas, coords = linalg.image_basis(mat, cfg)
    mors = []
    for kcol in range(bas.shape[1]):
        vec = bas[:, kcol]
        blocks = {}
        for idx, (t, qy, qx) in enumerate(basis):
            if vec[idx]:
                if t not in blocks:
                    blocks[t] = linalg.zeros(cfg, (y.mult(t), x.mult(t)))
                blocks[t][qy, qx] = vec[idx]
        mors.append(NodeMor(x, y, blocks))
    return mors, coords


def centrality_kernel_dim(x, y, cfg) -> int:
    """Independent computation of dim Hom in the center: solve the linear
    system  z_y,c o (c . f) = (f . c) o z_x,c  over all slots and simples."""
    basis = _nodemor_basis(x, y)
    bidx = {e: i for i, e in enumerate(basis)}
    rows = []
    for slot in x.balanced_slots:
        C = x.desc.slot_cat(slot)
        i = slot
        j = (slot + 1) % x.desc.nslots
        for c in C.labels:
            lx = dec_basis(x, j, "L", (c,))
            ly = dec_basis(y, j, "L", (c,))
            rx = dec_basis(x, i, "R", (c,))
            ry = dec_basis(y, i, "R", (c,))
            lyidx, rxidx = _index(ly), _index(rx)
            zx, zy = x.z(slot, c), y.z(slot, c)
            for a_i, (t2, q2, u2, p2) in enumerate(ry):
                for b_i, (t, q, v, p) in enumerate(lx):
                    row = linalg.zeros(cfg, (len(basis),))
                    nonzero = False
                    for qy in range(y.mult(t)):
                        idx = lyidx.get((t, qy, v, p))
                        if idx is not None and (t, qy, q) in bidx:
                            val = zy[a_i, idx]
                            if val:
                                row[bidx[(t, qy, q)]] += val
                                nonzero = True
                    for qx in range(x.mult(t2)):
                        idx = rxidx.get((t2, qx, u2, p2))
                        if idx is not None and (t2, q2, qx) in bidx:
                            val = zx[idx, b_i]
                            if val:
                                row[bidx[(t2, q2, qx)]] -= val
                                nonzero = True
                    if nonzero:
                        rows.append(row)
    if not rows:
        return len(basis)
    matrix = np.stack(rows, axis=0)
    return linalg.kernel_basis(matrix, cfg).shape[1]


def center_trace(x: BalancedObject, f: NodeMor, cfg):
    """Trace of a central endomorphism in the center Calabi-Yau structure:
    the plain trace divided by one global dimension per balanced slot."""
    total = node_trace(f, cfg)
    for slot in x.balanced_slots:
        total = total / global_dimension(x.desc.slot_cat(slot), cfg)
    return total


# ---------------------------------------------------------------------------
# validation


def validate_balancing(x: BalancedObject, cfg: RunConfig) -> Report:
    rep = Report(f"balanced object {x.name}")
    tol = 1e3 * cfg.tol.eq_tol

    for slot in x.balanced_slots:
        C = x.desc.slot_cat(slot)
        i = slot
        j = (slot + 1) % x.desc.nslots

        # unit balancing is the canonical identification
        zu = x.z(slot, C.unit)
        bsrc = dec_basis(x, j, "L", (C.unit,))
        bdst = dec_basis(x, i, "R", (C.unit,))
        res_u = float("inf")
        if zu.shape == (len(bdst), len(bsrc)):
            expect = linalg.zeros(cfg, zu.shape)
            didx = _index(bdst)
            for colv, (t, q, v, p) in enumerate(bsrc):
                expect[didx[(t, q, t[i], 0)], colv] = cfg.one
            res_u = linalg.matnorm(zu - expect)
        rep.add_residual(f"slot {slot} unit balancing is the identity", res_u, tol)

        inv_ok = True
        for c in C.labels:
            z = x.z(slot, c)
            if z.shape[0] != z.shape[1] or linalg.rank(z, cfg) != z.shape[0]:
                inv_ok = False
        rep.add(f"slot {slot} balancings invertible", inv_ok)

        worst = 0.0
        for a in C.labels:
            for b in C.labels:
                worst = max(worst, _multiplicativity_residual(x, slot, a, b, cfg))
        rep.add_residual(f"slot {slot} multiplicativity", worst, tol)
    return rep


def _multiplicativity_residual(x, slot, a, b, cfg) -> float:
    """Residual of z_{ab-channels} against (z_a . b) o (a . z_b)."""
    C = x.desc.slot_cat(slot)
    i = slot
    j = (slot + 1) % x.desc.nslots
    facj, faci = x.desc.factors[j], x.desc.factors[i]

    # composite: step 1 crosses b with spectator a at j; step 2 crosses a
    # with spectator b at i
    s1_src, s1_dst, s1 = z_cross_spectated(x, slot, b, cfg, spect_j=a)
    s2_src, s2_dst, s2 = z_cross_spectated(x, slot, a, cfg, spect_i=b)
    assert s1_dst == s2_src
    comp = s2 @ s1

    worst = 0.0
    for c in C.labels:
        nch = C.N.get((a, b, c), 0)
        if nch == 0:
            continue
        zl = dec_basis(x, j, "L", (c,))
        zr = dec_basis(x, i, "R", (c,))
        zmat = x.z(slot, c)
        for mu in range(nch):
            il = _channel_embedding(x, slot, "L", (a, b), c, mu, zl, s1_src, cfg)
            ir = _channel_embedding(x, slot, "R", (a, b), c, mu, zr, s2_dst, cfg)
            worst = max(worst, linalg.matnorm(comp @ il - ir @ zmat))
    return worst


def _channel_embedding(x, slot, side, labels, c, mu, small_basis, big_basis, cfg):
    """Embedding of the (c, mu)-fusion channel into the two-letter decorated
    state: coordinates of decorated paths factored through the vertex
    ``labels -> c``.  ``side`` "L" embeds z-source bases into the
    [(labels) at j | plain] state, "R" embeds z-target bases into the
    [plain | (labels) at i] state."""
    i = slot
    j = (slot + 1) % x.desc.nslots
    pos = j if side == "L" else i
    fac = x.desc.factors[pos]
    C = fac.left_cat if side == "L" else fac.right_cat
    vertex = homcalc.iota(pure_word(C, labels), c, mu, cfg)
    bigidx = _index(big_basis)
    mat = linalg.zeros(cfg, (len(big_basis), len(small_basis)))
    for col, (t, q, v, p) in enumerate(small_basis):
        wsmall = _dec_word(fac, t[pos], side, (c,))
        path = homcalc.iota(wsmall, v, p, cfg)
        idm = homcalc.identity(module_word(fac, (), t[pos], ()), cfg)
        if side == "L":
            emb = homcalc.tensor(vertex, idm, cfg).compose(path)
        else:
            emb = homcalc.tensor(idm, vertex, cfg).compose(path)
        colvec = emb.block(v, cfg)
        for r in range(colvec.shape[0]):
            val = colvec[r, 0]
            if not val:
                continue
            if side == "L":
                key = (t, q, v, r, t[i], 0)
            else:
                key = (t, q, t[j], 0, v, r)
            mat[bigidx[key], col] += val
    return mat
