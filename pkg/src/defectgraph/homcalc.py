"""The string-diagram engine.

Every Hom-space between tensor words is realized as a family of per-simple-
sector matrices with respect to canonical fusion-path bases.  Conventions:

* Words are interpreted left-comb: ``(((x1 x2) x3) ...)``.  A module word has
  the shape ``a_1 ... a_p  m  b_1 ... b_q`` with ``a_i`` in the left acting
  category, ``m`` a simple of the bimodule category and ``b_j`` in the right
  acting category.  Pure fusion words live in a single fusion category.
* ``Hom(w, s)`` has the fusion-path basis; ``Hom(s, w)`` carries the
  composition-dual splitting basis (``path_fuse o path_split = delta``).
  With this normalization the trace pairing is automatically
  ``tr(iota_i o pi_j) = delta_ij * p_s``.
* Reassociation of trees is generated by a single primitive rotation
  ``((X Y) Z) -> (X (Y Z))`` whose matrix is the appropriate associator block
  (F of either fusion category, or one of the three mixed module
  associators), dispatched on the sorts of the three subtrees.

A morphism (:class:`Mor`) stores one ``mult_cod x mult_dom`` block per
sector; composition is per-sector matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .scalars import RunConfig

__all__ = [
    "Word", "SumObject", "Mor", "pure_word", "module_word", "decompose_object",
    "identity", "iota", "pi", "tensor", "trace", "partial_trace",
    "ev_mor", "coev_mor", "sil_components", "sil_inv_components",
    "sum_morphism", "random_endo",
]


# ---------------------------------------------------------------------------
# words


def _is_fusion(ctx) -> bool:
    return hasattr(ctx, "labels")


@dataclass(frozen=True)
class Word:
    """A tensor word. ``core is None`` marks a pure fusion word (then all
    letters sit in ``left`` and ``ctx`` is the fusion category)."""

    ctx: object
    left: tuple
    core: Optional[str]
    right: tuple

    def __post_init__(self):
        if self.core is None and self.right:
            raise ValueError("pure fusion word cannot have right letters")

    @property
    def letters(self):
        if self.core is None:
            return tuple(("A", a) for a in self.left)
        return (tuple(("A", a) for a in self.left) + (("M", self.core),)
                + tuple(("B", b) for b in self.right))

    def __len__(self):
        return len(self.letters)

    @property
    def total_sort(self):
        return "A" if self.core is None else "M"

    def key(self):
        return (id(self.ctx), self.left, self.core, self.right)


def pure_word(cat, labels) -> Word:
    return Word(cat, tuple(labels), None, ())


def module_word(mod, left, core, right) -> Word:
    return Word(mod, tuple(left), core, tuple(right))


@dataclass(frozen=True)
class SumObject:
    """A formal direct sum of simples with multiplicities, with a fixed
    ordering of summand slots (the coordinate basis used by all morphisms)."""

    ctx: object
    mult: tuple  # tuple of (label, int), sorted by category label order

    @staticmethod
    def make(ctx, mult_map) -> "SumObject":
        order = ctx.mlabels if not _is_fusion(ctx) else ctx.labels
        items = tuple((s, int(mult_map[s])) for s in order if mult_map.get(s, 0))
        return SumObject(ctx, items)

    def as_dict(self):
        return dict(self.mult)

    def key(self):
        return (id(self.ctx), self.mult)


def _obj_mult(obj) -> dict:
    if isinstance(obj, Word):
        return lc_mult(obj)
    return obj.as_dict()


# ---------------------------------------------------------------------------
# category-data dispatch


def _sectors(ctx, sort):
    if sort == "M":
        return ctx.mlabels
    if sort == "A":
        return ctx.labels if _is_fusion(ctx) else ctx.left_cat.labels
    if sort == "B":
        return ctx.right_cat.labels
    raise ValueError(sort)


def _target_sort(sx, sy):
    table = {("A", "A"): "A", ("A", "M"): "M", ("M", "B"): "M", ("B", "B"): "B"}
    if (sx, sy) not in table:
        raise ValueError(f"invalid sort pair {(sx, sy)}")
    return table[(sx, sy)]


def _vdim(ctx, sx, x, sy, y, s) -> int:
    if (sx, sy) == ("A", "A"):
        cat = ctx if _is_fusion(ctx) else ctx.left_cat
        return cat.N.get((x, y, s), 0)
    if (sx, sy) == ("A", "M"):
        return ctx.NL.get((x, y, s), 0)
    if (sx, sy) == ("M", "B"):
        return ctx.NR.get((x, y, s), 0)
    if (sx, sy) == ("B", "B"):
        return ctx.right_cat.N.get((x, y, s), 0)
    raise ValueError((sx, sy))


def _cache(ctx) -> dict:
    if not hasattr(ctx, "_hc_cache"):
        object.__setattr__(ctx, "_hc_cache", {})
    return ctx._hc_cache


def _raw_assoc(ctx, sx, x, sy, y, sz, z, s):
    """The stored associator block for ``((x y) z) -> (x (y z))`` at total
    sector ``s``: list-of-lists over rows ``(e, mu, nu)``, cols ``(f, rho,
    sigma)`` in canonical enumeration order."""
    sorts = (sx, sy, sz)
    if sorts == ("A", "A", "A"):
        cat = ctx if _is_fusion(ctx) else ctx.left_cat
        return cat.F[(x, y, z, s)]
    if sorts == ("B", "B", "B"):
        return ctx.right_cat.F[(x, y, z, s)]
    if sorts == ("A", "A", "M"):
        return ctx.FLL[(x, y, z, s)]
    if sorts == ("A", "M", "B"):
        return ctx.FLR[(x, y, z, s)]
    if sorts == ("M", "B", "B"):
        return ctx.FRR[(x, y, z, s)]
    raise ValueError(f"invalid rotation sorts {sorts}")


def assoc_row_enum(ctx, sx, x, sy, y, sz, z, s):
    """Row labels ``(e, mu, nu)`` of an associator block, canonical order."""
    se = _target_sort(sx, sy)
    out = []
    for e in _sectors(ctx, se):
        d1 = _vdim(ctx, sx, x, sy, y, e)
        d2 = _vdim(ctx, se, e, sz, z, s)
        for mu in range(d1):
            for nu in range(d2):
                out.append((e, mu, nu))
    return out


def assoc_col_enum(ctx, sx, x, sy, y, sz, z, s):
    """Column labels ``(f, rho, sigma)``, canonical order."""
    sf = _target_sort(sy, sz)
    out = []
    for f in _sectors(ctx, sf):
        d1 = _vdim(ctx, sy, y, sz, z, f)
        d2 = _vdim(ctx, sx, x, sf, f, s)
        for rho in range(d1):
            for sigma in range(d2):
                out.append((f, rho, sigma))
    return out


def _assoc_block(ctx, cfg, sx, x, sy, y, sz, z, s):
    key = ("assoc", cfg.scalar_mode, sx, x, sy, y, sz, z, s)
    cache = _cache(ctx)
    if key not in cache:
        raw = _raw_assoc(ctx, sx, x, sy, y, sz, z, s)
        cache[key] = linalg.asmatrix(cfg, raw)
    return cache[key]


# ---------------------------------------------------------------------------
# trees and path bases


def left_comb(n: int):
    t = 0
    for i in range(1, n):
        t = (t, i)
    return t


def _leaf_sortlabel(word, i):
    return word.letters[i]


def tree_sort(word, tree):
    if isinstance(tree, int):
        return _leaf_sortlabel(word, tree)[0]
    sl = tree_sort(word, tree[0])
    sr = tree_sort(word, tree[1])
    return _target_sort(sl, sr)


def enumerate_basis(word, tree, sector):
    """All fusion-path basis elements of ``Hom(tree-bracketed word, sector)``.

    A leaf element is its label; a node element is the hashable tuple
    ``(sec_left, sec_right, elem_left, elem_right, vertex_index)``.
    """
    ctx = word.ctx
    if isinstance(tree, int):
        sort, lab = _leaf_sortlabel(word, tree)
        return [lab] if lab == sector else []
    tl, tr = tree
    sl_sort = tree_sort(word, tl)
    sr_sort = tree_sort(word, tr)
    out = []
    for secl in _sectors(ctx, sl_sort):
        bl = enumerate_basis(word, tl, secl)
        if not bl:
            continue
        for secr in _sectors(ctx, sr_sort):
            v = _vdim(ctx, sl_sort, secl, sr_sort, secr, sector)
            if v == 0:
                continue
            br = enumerate_basis(word, tr, secr)
            for el in bl:
                for er in br:
                    for mu in range(v):
                        out.append((secl, secr, el, er, mu))
    return out


def lc_mult(word: Word) -> dict:
    """Multiplicity of each simple sector in the left-comb decomposition."""
    ctx = word.ctx
    cache = _cache(ctx)
    key = ("mult", word.key())
    if key in cache:
        return cache[key]
    n = len(word)
    res = {}
    if n == 0:
        res = {ctx.unit: 1}
    else:
        tree = left_comb(n)
        for s in _sectors(ctx, word.total_sort):
            cnt = len(enumerate_basis(word, tree, s))
            if cnt:
                res[s] = cnt
    cache[key] = res
    return res


def _rotate_tree(tree, addr):
    if not addr:
        (x, y), z = tree
        return (x, (y, z))
    head, rest = addr[0], addr[1:]
    if head == "L":
        return (_rotate_tree(tree[0], rest), tree[1])
    return (tree[0], _rotate_tree(tree[1], rest))


def _find_left_internal(tree, addr=()):
    """DFS address of the first node whose left child is internal."""
    if isinstance(tree, int):
        return None
    if isinstance(tree[0], tuple):
        return addr
    return _find_left_internal(tree[1], addr + ("R",))


def _rotation_matrix(word, tree, sector, addr, cfg):
    """Matrix of the rotation at ``addr`` : coordinates w.r.t. the rotated
    tree basis of elements of the original tree basis. ``new = R @ old``."""
    ctx = word.ctx
    old = enumerate_basis(word, tree, sector)
    new_tree = _rotate_tree(tree, addr)
    new = enumerate_basis(word, new_tree, sector)
    index = {e: i for i, e in enumerate(new)}
    R = linalg.zeros(cfg, (len(new), len(old)))

    def localize(elem, a, sec):
        # returns (rebuild, local_elem, local_sector)
        if not a:
            return (lambda x: x), elem, sec
        secl, secr, el, er, mu = elem
        if a[0] == "L":
            rb, le, ls = localize(el, a[1:], secl)
            return (lambda x: (secl, secr, rb(x), er, mu)), le, ls
        rb, le, ls = localize(er, a[1:], secr)
        return (lambda x: (secl, secr, el, rb(x), mu)), le, ls

    sub = tree
    for step in addr:
        sub = sub[0] if step == "L" else sub[1]
    (txy, tz) = sub
    (tx, ty) = txy
    wx, wy, wz = (tree_sort(word, t) for t in (tx, ty, tz))

    for i, elem in enumerate(old):
        rebuild, le, ls = localize(elem, addr, sector)
        sxy, sz, exy, ez, nu = le
        sx, sy, ex, ey, mu = exy
        F = _assoc_block(ctx, cfg, wx, sx, wy, sy, wz, sz, ls)
        rows = assoc_row_enum(ctx, wx, sx, wy, sy, wz, sz, ls)
        cols = assoc_col_enum(ctx, wx, sx, wy, sy, wz, sz, ls)
        ri = rows.index((sxy, mu, nu))
        for ci, (f, rho, sigma) in enumerate(cols):
            val = F[ri, ci]
            if not val:
                continue
            new_elem = rebuild((sx, f, ex, (sy, sz, ey, ez, rho), sigma))
            R[index[new_elem], i] += val
    return R


def _to_rightcomb(word, tree, sector, cfg):
    """(rc_tree, matrix) with ``rc_coords = M @ tree_coords``."""
    n = len(word)
    cur = tree
    mats = []
    while True:
        addr = _find_left_internal(cur)
        if addr is None:
            break
        mats.append(_rotation_matrix(word, cur, sector, addr, cfg))
        cur = _rotate_tree(cur, addr)
    dim = len(enumerate_basis(word, tree, sector))
    M = linalg.eye(cfg, dim)
    for R in mats:
        M = R @ M
    return cur, M


def reassoc(word, tree_from, tree_to, sector, cfg):
    """Basis-change matrix: coordinates in ``tree_from``-basis expressed in
    the ``tree_to``-basis (``to = R @ from``)."""
    key = ("reassoc", cfg.scalar_mode, word.key(), tree_from, tree_to, sector)
    cache = _cache(word.ctx)
    if key in cache:
        return cache[key]
    _, m_from = _to_rightcomb(word, tree_from, sector, cfg)
    _, m_to = _to_rightcomb(word, tree_to, sector, cfg)
    R = linalg.solve(m_to, m_from, cfg)
    cache[key] = R
    return R


def split_tree(n: int, k: int):
    """Tree grouping the first ``k`` letters (each side left-comb)."""
    if k == 0 or k == n:
        return left_comb(n)
    tl = 0
    for i in range(1, k):
        tl = (tl, i)
    tr = k
    for i in range(k + 1, n):
        tr = (tr, i)
    return (tl, tr)


def split_enum(word, k, sector):
    """Enumeration of the two-part basis as ``(tL, tR, iL, iR, mu)`` with
    integer part-basis indices, flattened in the same order as the split-tree
    basis (the coordinate order produced by :func:`split_iso`)."""
    tree = split_tree(len(word), k)
    if k == 0 or k == len(word):
        raise ValueError("use trivial split handling")
    tl_tree, tr_tree = tree
    left_index, right_index = {}, {}
    out = []
    for secl, secr, el, er, mu in enumerate_basis(word, tree, sector):
        if (secl,) not in left_index:
            basis = enumerate_basis(word, tl_tree, secl)
            left_index[(secl,)] = {e: i for i, e in enumerate(basis)}
        if (secr,) not in right_index:
            basis = enumerate_basis(word, tr_tree, secr)
            right_index[(secr,)] = {e: i for i, e in enumerate(basis)}
        out.append((secl, secr, left_index[(secl,)][el],
                    right_index[(secr,)][er], mu))
    return out


def split_iso(word, k, sector, cfg):
    """Matrix expressing left-comb coordinates in the split-tree basis."""
    n = len(word)
    tree = split_tree(n, k)
    return reassoc(word, left_comb(n), tree, sector, cfg)


# ---------------------------------------------------------------------------
# morphisms


@dataclass
class Mor:
    """A morphism stored as per-sector blocks ``mult_cod(s) x mult_dom(s)``
    with respect to the canonical (left-comb or summand) bases."""

    ctx: object
    dom: object  # Word or SumObject
    cod: object
    blocks: dict

    def block(self, s, cfg):
        if s in self.blocks:
            return self.blocks[s]
        return linalg.zeros(cfg, (_obj_mult(self.cod).get(s, 0),
                                  _obj_mult(self.dom).get(s, 0)))

    def compose(self, other: "Mor") -> "Mor":
        """self o other."""
        if _obj_mult(self.dom) != _obj_mult(other.cod):
            raise ValueError("composition mismatch")
        blocks = {}
        for s, b in self.blocks.items():
            if s in other.blocks:
                blocks[s] = b @ other.blocks[s]
        return Mor(self.ctx, other.dom, self.cod, blocks)

    def __add__(self, other: "Mor") -> "Mor":
        blocks = dict(self.blocks)
        for s, b in other.blocks.items():
            blocks[s] = blocks[s] + b if s in blocks else b
        return Mor(self.ctx, self.dom, self.cod, blocks)

    def scale(self, c) -> "Mor":
        return Mor(self.ctx, self.dom, self.cod,
                   {s: b * c for s, b in self.blocks.items()})

    def as_sum(self) -> "Mor":
        """Reinterpret word endpoints through their canonical decompositions."""
        dom = self.dom if isinstance(self.dom, SumObject) else \
            SumObject.make(self.ctx, lc_mult(self.dom))
        cod = self.cod if isinstance(self.cod, SumObject) else \
            SumObject.make(self.ctx, lc_mult(self.cod))
        return Mor(self.ctx, dom, cod, self.blocks)

    def retarget(self, dom, cod) -> "Mor":
        if _obj_mult(dom) != _obj_mult(self.dom) or _obj_mult(cod) != _obj_mult(self.cod):
            raise ValueError("retarget mismatch")
        return Mor(self.ctx, dom, cod, self.blocks)


def identity(obj, cfg) -> Mor:
    mult = _obj_mult(obj)
    ctx = obj.ctx
    return Mor(ctx, obj, obj, {s: linalg.eye(cfg, m) for s, m in mult.items() if m})


def zero_mor(dom, cod) -> Mor:
    return Mor(dom.ctx, dom, cod, {})


def iota(word: Word, s, i, cfg) -> Mor:
    """Splitting basis element ``s -> word`` (the ``i``-th path)."""
    m = lc_mult(word).get(s, 0)
    if not (0 <= i < m):
        raise IndexError("splitting index out of range")
    col = linalg.zeros(cfg, (m, 1))
    col[i, 0] = cfg.one
    src = _single_word(word.ctx, s)
    return Mor(word.ctx, src, word, {s: col})


def pi(word: Word, s, i, cfg) -> Mor:
    """Fusion basis element ``word -> s``, dual to :func:`iota` under
    composition."""
    m = lc_mult(word).get(s, 0)
    if not (0 <= i < m):
        raise IndexError("fusion index out of range")
    row = linalg.zeros(cfg, (1, m))
    row[0, i] = cfg.one
    tgt = _single_word(word.ctx, s)
    return Mor(word.ctx, word, tgt, {s: row})


def _single_word(ctx, s) -> Word:
    if _is_fusion(ctx):
        return pure_word(ctx, (s,))
    return module_word(ctx, (), s, ())


def decompose_object(word: Word):
    """Sector multiplicities of a word (the SplittingBasis handle; actual
    basis vectors come from :func:`iota` / :func:`pi`)."""
    return dict(lc_mult(word))


# ---------------------------------------------------------------------------
# tensoring


def _combine_words(wf: Word, wg: Word) -> Word:
    cf, cg = wf.ctx, wg.ctx
    if _is_fusion(cf) and _is_fusion(cg):
        if cf is not cg:
            raise ValueError("tensor of words in different fusion categories")
        return pure_word(cf, wf.left + wg.left)
    if _is_fusion(cf):
        if cg.left_cat is not cf:
            raise ValueError("left tensor factor must live in the left acting category")
        return module_word(cg, wf.left + wg.left, wg.core, wg.right)
    if _is_fusion(cg):
        if cf.right_cat is not cg:
            raise ValueError("right tensor factor must live in the right acting category")
        return module_word(cf, wf.left, wf.core, wf.right + wg.left)
    raise ValueError("cannot tensor two module words")


def _as_word(obj):
    if isinstance(obj, Word):
        return obj
    raise ValueError("tensor needs word endpoints")


def tensor(f: Mor, g: Mor, cfg) -> Mor:
    """Horizontal composition ``f (x) g`` of word morphisms.

    Both endpoint words are split into the f-part and the g-part; in the
    split bases the tensor acts per factor, and the split isomorphisms
    (reassociations to/from left-comb) conjugate it back.
    """
    fd, fc = _as_word(f.dom), _as_word(f.cod)
    gd, gc = _as_word(g.dom), _as_word(g.cod)
    dom = _combine_words(fd, gd)
    cod = _combine_words(fc, gc)
    kd, kc = len(fd), len(fc)
    blocks = {}
    for s in _sectors(dom.ctx, dom.total_sort):
        md, mc = lc_mult(dom).get(s, 0), lc_mult(cod).get(s, 0)
        if md == 0 or mc == 0:
            continue
        enum_d, iso_d = _split_data(dom, kd, s, cfg)
        enum_c, iso_c = _split_data(cod, kc, s, cfg)
        index_c = {}
        for idx, (tl, tr, il, ir, mu) in enumerate(enum_c):
            index_c.setdefault((tl, tr, mu), {})[(il, ir)] = idx
        act = linalg.zeros(cfg, (len(enum_c), len(enum_d)))
        for j, (tl, tr, il, ir, mu) in enumerate(enum_d):
            bl = f.block(tl, cfg)
            br = g.block(tr, cfg)
            if bl.shape[0] == 0 or br.shape[0] == 0:
                continue
            slots = index_c.get((tl, tr, mu))
            if not slots:
                continue
            for (ol, orr), idx in slots.items():
                v = bl[ol, il] * br[orr, ir]
                if v:
                    act[idx, j] += v
        blk = linalg.inv(iso_c, cfg) @ act @ iso_d
        if np.any(linalg.to_float(blk)):
            blocks[s] = blk
    return Mor(dom.ctx, dom, cod, blocks)


def _trivial_split(word, k):
    return k == 0 or k == len(word)


def _split_data(word, k, s, cfg):
    """(enum, iso) for the split of ``word`` at ``k``; handles k=0 / k=n by a
    unit-sector pseudo-split."""
    ctx = word.ctx
    n = len(word)
    if k == 0:
        unit = _unit_label_left(word)
        enum = [(unit, s, 0, i, 0) for i in range(lc_mult(word).get(s, 0))]
        return enum, linalg.eye(cfg, len(enum))
    if k == n:
        unit = _unit_label_right(word)
        enum = [(s, unit, i, 0, 0) for i in range(lc_mult(word).get(s, 0))]
        return enum, linalg.eye(cfg, len(enum))
    enum = split_enum(word, k, s)
    iso = split_iso(word, k, s, cfg)
    return enum, iso


def _unit_label_left(word):
    ctx = word.ctx
    if _is_fusion(ctx):
        return ctx.unit
    return ctx.left_cat.unit


def _unit_label_right(word):
    ctx = word.ctx
    if _is_fusion(ctx):
        return ctx.unit
    return ctx.right_cat.unit


# ---------------------------------------------------------------------------
# traces and duality


def _pdim(ctx, s):
    if _is_fusion(ctx):
        return ctx.dims[s]
    return ctx.p[s]


def trace(f: Mor, cfg):
    """Calabi-Yau trace ``sum_s p_s tr(block_s)``."""
    if _obj_mult(f.dom) != _obj_mult(f.cod):
        raise ValueError("trace needs an endomorphism")
    total = cfg.zero
    for s, b in f.blocks.items():
        t = cfg.zero
        for i in range(min(b.shape)):
            t = t + b[i, i]
        total = total + cfg.coerce(_pdim(f.ctx, s)) * t
    return total


def ev_mor(cat, a, cfg) -> Mor:
    """``ev_a : a a* -> 1`` with the run-wide spherical normalization
    (zig-zags hold, both loop values equal ``d_a``)."""
    return _evcoev(cat, cfg)[a][0]


def coev_mor(cat, a, cfg) -> Mor:
    """``coev_a : 1 -> a* a``."""
    return _evcoev(cat, cfg)[a][1]


def _evcoev(cat, cfg):
    cache = _cache(cat)
    key = ("evcoev", cfg.scalar_mode)
    if key in cache:
        return cache[key]
    table = {}
    done = set()
    for a in cat.labels:
        if a in done:
            continue
        c = cat.dual[a]
        z1a = _zigzag_base(cat, a, cfg)
        d_a = cfg.coerce(cat.dims[a])
        if a == c:
            # self-dual: ev_a = alpha * basis, coev_a = delta * dual basis
            # with alpha*delta*z1 = 1 and alpha*delta = d_a
            prod = d_a * z1a
            if not _is_one(prod, cfg):
                raise ValueError(
                    f"label {a}: zig-zag value {z1a} inconsistent with dimension {d_a}")
            alpha, delta = cfg.one, d_a
            table[a] = (_scaled_pair(cat, a, alpha, delta, cfg))
            done.add(a)
        else:
            z1c = _zigzag_base(cat, c, cfg)
            prod = d_a * d_a * z1a * z1c
            if not _is_one(prod, cfg):
                raise ValueError(
                    f"dual pair ({a},{c}): zig-zag values inconsistent with dimension")
            alpha_a = cfg.one
            delta_a = cfg.one / z1a
            alpha_c = d_a * z1a
            delta_c = d_a
            table[a] = _scaled_pair(cat, a, alpha_a, delta_a, cfg)
            table[c] = _scaled_pair(cat, c, alpha_c, delta_c, cfg)
            done.update((a, c))
    cache[key] = table
    return table


def _is_one(x, cfg):
    from .scalars import approx_eq
    return approx_eq(x, cfg.one, cfg)


def _scaled_pair(cat, a, alpha, delta, cfg):
    c = cat.dual[a]
    w_ev = pure_word(cat, (a, c))
    w_coev = pure_word(cat, (c, a))
    empty = pure_word(cat, ())
    ev = Mor(cat, w_ev, empty, {cat.unit: linalg.asmatrix(cfg, [[alpha]])})
    coev = Mor(cat, empty, w_coev, {cat.unit: linalg.asmatrix(cfg, [[delta]])})
    return ev, coev


def _zigzag_base(cat, a, cfg):
    """Scalar of ``(basis_ev . a) o (a . basis_coev)`` with unnormalized
    basis vectors; fixes the ev/coev scaling."""
    c = cat.dual[a]
    if cat.N.get((a, c, cat.unit), 0) != 1 or cat.N.get((c, a, cat.unit), 0) != 1:
        raise ValueError(f"duality multiplicities for {a} are not 1")
    empty = pure_word(cat, ())
    ev0 = Mor(cat, pure_word(cat, (a, c)), empty,
              {cat.unit: linalg.asmatrix(cfg, [[1]])})
    coev0 = Mor(cat, empty, pure_word(cat, (c, a)),
                {cat.unit: linalg.asmatrix(cfg, [[1]])})
    ida = identity(pure_word(cat, (a,)), cfg)
    comp = tensor(ev0, ida, cfg).compose(tensor(ida, coev0, cfg))
    blk = comp.block(a, cfg)
    return blk[0, 0]


def partial_trace(f: Mor, cfg, n_left=None, n_right=None) -> Mor:
    """Close the outermost left / right acting labels of an endomorphism of a
    module word with evaluations and coevaluations (iterated)."""
    w = _as_word(f.dom)
    if _obj_mult(f.dom) != _obj_mult(f.cod) or w != _as_word(f.cod):
        raise ValueError("partial trace needs a word endomorphism")
    nl = len(w.left) if n_left is None else n_left
    nr = len(w.right) if n_right is None else n_right
    out = f
    for _ in range(nl):
        out = _ptr_left(out, cfg)
    for _ in range(nr):
        out = _ptr_right(out, cfg)
    return out


def _ptr_left(f: Mor, cfg) -> Mor:
    w = _as_word(f.dom)
    a = w.left[0]
    acat = w.ctx.left_cat
    astar = acat.dual[a]
    rest = module_word(w.ctx, w.left[1:], w.core, w.right)
    idr = identity(rest, cfg)
    up = tensor(coev_mor(acat, a, cfg), idr, cfg)            # rest -> a* a rest
    mid = tensor(identity(pure_word(acat, (astar,)), cfg), f, cfg)
    down = tensor(ev_mor(acat, astar, cfg), idr, cfg)        # a* a rest -> rest
    return down.compose(mid).compose(up)


def _ptr_right(f: Mor, cfg) -> Mor:
    w = _as_word(f.dom)
    b = w.right[-1]
    bcat = w.ctx.right_cat
    bstar = bcat.dual[b]
    rest = module_word(w.ctx, w.left, w.core, w.right[:-1])
    idr = identity(rest, cfg)
    up = tensor(idr, coev_mor(bcat, bstar, cfg), cfg)        # rest -> rest b b*
    mid = tensor(f, identity(pure_word(bcat, (bstar,)), cfg), cfg)
    down = tensor(idr, ev_mor(bcat, b, cfg), cfg)            # rest b b* -> rest
    return down.compose(mid).compose(up)


# ---------------------------------------------------------------------------
# the sil isomorphism (between objects and their silent pairings)


def sil_components(f: Mor):
    """``sil`` of a morphism ``f: m -> m'`` between sum objects of a module
    category: components over simple ``y`` as matrices indexed by
    (coordinate in <m,y>, coordinate in <y,m'>).  In the canonical summand
    bases this is simply the transpose of each block of ``f``."""
    return {y: b.T.copy() for y, b in f.blocks.items()}


def sil_inv_components(ctx, dom, cod, comps) -> Mor:
    """Inverse of :func:`sil_components`."""
    return Mor(ctx, dom, cod, {y: c.T.copy() for y, c in comps.items()})


# ---------------------------------------------------------------------------
# utilities


def sum_morphism(ctx, dom: SumObject, cod: SumObject, blocks) -> Mor:
    return Mor(ctx, dom, cod, blocks)


def random_endo(obj, cfg, rng) -> Mor:
    """Seeded random endomorphism of a sum object or word (integer entries,
    valid in both scalar modes)."""
    mult = _obj_mult(obj)
    blocks = {}
    for s, m in mult.items():
        raw = rng.integers(-3, 4, size=(m, m))
        blocks[s] = linalg.asmatrix(cfg, raw.tolist())
    return Mor(obj.ctx, obj, obj, blocks)
