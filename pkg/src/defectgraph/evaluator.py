"""The evaluation pipeline: pre-block space, delta, holonomy idempotents,
block space, evaluation and the closed-form loop/lasso oracles.

The pre-block space of a labeled graph has basis elements
``(assignment, q)``: one simple (tuple of chain simples) per line and one
multiplicity index per node (of the flattened simple tuple inside the node
label's underlying object).

The holonomy idempotent of a domain is ``(1/dim A) sum_c d_c W_c`` where
``W_c`` lays a ``c``-loop along the domain boundary and absorbs it: the
loop is opened on an anchor line (pair creation through the line's silent
pairing), the free end is carried around the face -- entering each node
through a port (duality transport), crossing the corner through the node
label's balancing, exiting through the next port, and crossing each further
line through its transparent-crossing components -- and finally closed
against the parked end.  All elementary steps are small cached matrices
computed by the string-diagram engine; the walk itself is pure bookkeeping
on sparse state vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import graph as graphmod
from . import homcalc, linalg
from .center import (BalancedObject, dec_basis, line_components_a,
                     line_components_b, tuple_pdim)
from .fusion import global_dimension
from .homcalc import Mor, module_word, pure_word
from .scalars import RunConfig

__all__ = ["PreBlock", "delta_matrix", "holonomy_idempotent", "total_holonomy",
           "BlockSpace", "block_space", "evaluate_matrix", "theta_form",
           "scalar_evaluate", "loop_component_oracle", "lasso_closed_form"]


# ---------------------------------------------------------------------------
# pre-block space


@dataclass
class PreBlock:
    g: object
    cfg: RunConfig
    basis: list = field(default_factory=list)
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        lids = self.g.line_ids()
        per_line = []
        for lid in lids:
            line = self.g.lines[lid]
            opts = list(itertools.product(*[m.mlabels for m in line.chain]))
            per_line.append(opts)
        nodes = self.g.node_ids()
        for combo in itertools.product(*per_line):
            assign = dict(zip(lids, combo))
            ranges = []
            ok = True
            for n in nodes:
                t = node_tuple(self.g, n, assign, self.cfg)
                mult = self.g.node_labels[n].mult(t)
                if mult == 0:
                    ok = False
                    break
                ranges.append(range(mult))
            if not ok:
                continue
            for qs in itertools.product(*ranges):
                key = (tuple(combo), tuple(qs))
                self.index[key] = len(self.basis)
                self.basis.append(key)

    @property
    def dim(self):
        return len(self.basis)

    def line_labels(self, key):
        return dict(zip(self.g.line_ids(), key[0]))


def node_tuple(g, node, assign, cfg):
    """Flattened simple tuple at a node for a given line assignment."""
    vals = []
    for end in g.nodes[node]:
        t = assign[end[0]]
        if end[1] == 1:
            vals.extend(t)
        else:
            vals.extend(reversed(t))
    return tuple(vals)


# ---------------------------------------------------------------------------
# delta


def delta_matrix(g, cfg, pre: PreBlock = None):
    """Matrix of delta from the total node space to the pre-block space.

    A total-node-space basis vector chooses a summand (simple, index) of the
    line object at every port; delta pairs the two ends of each line through
    the object's summand bases (the end-structure morphisms of the silent
    pairing), which in canonical coordinates matches summand labels and
    indices on the nose.
    """
    pre = pre or PreBlock(g, cfg)
    nbasis = graphmod.total_node_space_basis(g, cfg)
    mat = linalg.zeros(cfg, (pre.dim, len(nbasis)))
    nodes = g.node_ids()
    for col, elem in enumerate(nbasis):
        # elem: per node (port_choices, q); port choice: (tuple, alpha)
        line_pick = {}
        ok = True
        for node, (choices, q) in zip(nodes, elem):
            for end, (t, alpha) in zip(g.nodes[node], choices):
                lid, which = end
                tt = t if which == 1 else tuple(reversed(t))
                prev = line_pick.get(lid)
                if prev is None:
                    line_pick[lid] = (tt, alpha)
                elif prev != (tt, alpha):
                    ok = False
        if not ok:
            continue
        assign = tuple(line_pick[lid][0] for lid in g.line_ids())
        qs = tuple(q for (_, q) in elem)
        row = pre.index.get((assign, qs))
        if row is not None:
            mat[row, col] += cfg.one
    return mat


# ---------------------------------------------------------------------------
# walk steps (cached per category)


def _chi_in_matrix(fac, s, c, v, side, cfg):
    """Duality transport absorbing a port extension into the node target.

    side "R": Hom((s ; c), v) -> Hom(s, (v ; c*)): returns matrix[nu, lam].
    side "L": Hom((c ; s), v) -> Hom(s, (c* ; v)).
    """
    cache = fac._extra.setdefault("chi", {})
    key = ("in", cfg.scalar_mode, s, c, v, side)
    if key in cache:
        return cache[key]
    if side == "R":
        acat = fac.right_cat
        cstar = acat.dual[c]
        wsrc = module_word(fac, (), s, (c,))
        wdst = module_word(fac, (), v, (cstar,))
        nsrc = homcalc.lc_mult(wsrc).get(v, 0)
        ndst = homcalc.lc_mult(wdst).get(s, 0)
        out = linalg.zeros(cfg, (ndst, nsrc))
        for lam in range(nsrc):
            m1 = homcalc.tensor(homcalc.identity(module_word(fac, (), s, ()), cfg),
                                homcalc.coev_mor(acat, cstar, cfg), cfg)
            m2 = homcalc.tensor(homcalc.pi(wsrc, v, lam, cfg),
                                homcalc.identity(pure_word(acat, (cstar,)), cfg), cfg)
            col = m2.compose(m1).block(s, cfg)
            for nu in range(ndst):
                out[nu, lam] = col[nu, 0]
    else:
        acat = fac.left_cat
        cstar = acat.dual[c]
        wsrc = module_word(fac, (c,), s, ())
        wdst = module_word(fac, (cstar,), v, ())
        nsrc = homcalc.lc_mult(wsrc).get(v, 0)
        ndst = homcalc.lc_mult(wdst).get(s, 0)
        out = linalg.zeros(cfg, (ndst, nsrc))
        for lam in range(nsrc):
            m1 = homcalc.tensor(homcalc.coev_mor(acat, c, cfg),
                                homcalc.identity(module_word(fac, (), s, ()), cfg), cfg)
            m2 = homcalc.tensor(homcalc.identity(pure_word(acat, (cstar,)), cfg),
                                homcalc.pi(wsrc, v, lam, cfg), cfg)
            col = m2.compose(m1).block(s, cfg)
            for nu in range(ndst):
                out[nu, lam] = col[nu, 0]
    cache[key] = out
    return out


def _chi_out_matrix(fac, s, c, v, side, cfg):
    """Inverse transport emitting the label back onto a port.

    side "L": Hom(s, (c ; v)) -> Hom((c* ; s), v): matrix[lam, nu].
    side "R": Hom(s, (v ; c)) -> Hom((s ; c*), v).
    """
    cache = fac._extra.setdefault("chi", {})
    key = ("out", cfg.scalar_mode, s, c, v, side)
    if key in cache:
        return cache[key]
    if side == "L":
        acat = fac.left_cat
        cstar = acat.dual[c]
        wsrc = module_word(fac, (c,), v, ())
        wdst = module_word(fac, (cstar,), s, ())
        nsrc = homcalc.lc_mult(wsrc).get(s, 0)
        ndst = homcalc.lc_mult(wdst).get(v, 0)
        out = linalg.zeros(cfg, (ndst, nsrc))
        for nu in range(nsrc):
            m1 = homcalc.tensor(homcalc.identity(pure_word(acat, (cstar,)), cfg),
                                homcalc.iota(wsrc, s, nu, cfg), cfg)
            m2 = homcalc.tensor(homcalc.ev_mor(acat, cstar, cfg),
                                homcalc.identity(module_word(fac, (), v, ()), cfg), cfg)
            row = m2.compose(m1).block(v, cfg)
            for lam in range(ndst):
                out[lam, nu] = row_entry(row, lam)
    else:
        acat = fac.right_cat
        cstar = acat.dual[c]
        wsrc = module_word(fac, (), v, (c,))
        wdst = module_word(fac, (), s, (cstar,))
        nsrc = homcalc.lc_mult(wsrc).get(s, 0)
        ndst = homcalc.lc_mult(wdst).get(v, 0)
        out = linalg.zeros(cfg, (ndst, nsrc))
        for nu in range(nsrc):
            m1 = homcalc.tensor(homcalc.iota(wsrc, s, nu, cfg),
                                homcalc.identity(pure_word(acat, (cstar,)), cfg), cfg)
            m2 = homcalc.tensor(homcalc.identity(module_word(fac, (), v, ()), cfg),
                                homcalc.ev_mor(acat, c, cfg), cfg)
            row = m2.compose(m1).block(v, cfg)
            for lam in range(ndst):
                out[lam, nu] = row_entry(row, lam)
    cache[key] = out
    return out


def row_entry(block, lam):
    """Entry of a 1 x n or n x 1 block."""
    if block.shape[0] == 1:
        return block[0, lam]
    return block[lam, 0]


# ---------------------------------------------------------------------------
# the holonomy walk


def _face_steps(g, face_key):
    """The cyclic step sequence of a face: list of
    (dep_end, arr_end, node, arr_port_index, dep_port_index)."""
    orbit = graphmod.faces(g)[face_key]
    steps = []
    for k, e in enumerate(orbit):
        a = (e[0], 1 - e[1])
        node = g.end_node(a)
        rot = g.nodes[node]
        pi_arr = rot.index(a)
        e_next = orbit[(k + 1) % len(orbit)]
        assert rot[(pi_arr + 1) % len(rot)] == e_next, "face traversal broken"
        steps.append((e, a, node, pi_arr, (pi_arr + 1) % len(rot)))
    return steps


def _port_position(g, node, port_index, cfg, last=True):
    positions = graphmod.node_positions(g, node, cfg)[port_index]
    return positions[-1] if last else positions[0]


def holonomy_idempotent(g, face_key, cfg, pre: PreBlock = None):
    """The holonomy idempotent of one domain as a matrix on the pre-block
    space."""
    pre = pre or PreBlock(g, cfg)
    A = g.domains[face_key]
    D = global_dimension(A, cfg)
    total = linalg.zeros(cfg, (pre.dim, pre.dim))
    for c in A.labels:
        w = _walk_matrix(g, face_key, c, cfg, pre)
        total = total + w * (cfg.coerce(A.dims[c]) / D)
    return total


def _line_cross_data(line, dep_end, c, cfg):
    """(components, parked_word_fn, free_word_fn) for crossing an elementary
    line from the side of ``dep_end``.  Components map (old label n -> new
    label k) with matrix E[lam_new, phi_old]; the C factor alone gives the
    pair-creation legs used at the anchor."""
    m = line.chain[0]
    if dep_end[1] == 1:
        # departure through the incoming end: the domain is left of the
        # line, transparent crossing of c in left_cat(m)
        per = line_components_a(m, c, cfg)
    else:
        per = line_components_b(m, c, cfg)
    return per


def _open_components(line, anchor_end, c, cfg):
    """Pair-creation legs on the anchor line: dict (n, k) -> C with
    C[lam_free, mu_parked]."""
    m = line.chain[0]
    key = ("openC", cfg.scalar_mode, anchor_end[1], c)
    cache = m._extra.setdefault("line_open", {})
    if key in cache:
        return cache[key]
    out = {}
    if anchor_end[1] == 1:
        # parked at the incoming port: word (c*, k); free at outgoing port
        from .center import line_components_a as _lca  # noqa: F401
        comps = _open_raw_a(m, c, cfg)
    else:
        comps = _open_raw_b(m, c, cfg)
    cache[key] = comps
    return comps


def _open_raw_a(m, c, cfg):
    """C-matrices of line_components_a (the coevaluation half)."""
    from .bimodule import _psi_left, opposite_bimodule
    A = m.left_cat
    cstar = A.dual[c]
    mbar = opposite_bimodule(m, cfg)
    out = {}
    for n in m.mlabels:
        for k in m.mlabels:
            w_ck = module_word(m, (cstar,), k, ())
            dmu = homcalc.lc_mult(w_ck).get(n, 0)
            nus = homcalc.lc_mult(module_word(mbar, (), k, (c,))).get(n, 0)
            if dmu == 0 or nus == 0:
                continue
            C = linalg.zeros(cfg, (nus, dmu))
            for mu in range(dmu):
                eps_pi = homcalc.pi(w_ck, n, mu, cfg)
                for nu in range(nus):
                    real = _psi_left(m, cfg, c, n, k, nu)
                    C[nu, mu] = eps_pi.compose(real).block(n, cfg)[0, 0]
            out[(n, k)] = C
    return out


def _open_raw_b(m, c, cfg):
    from .bimodule import _phi_right, opposite_bimodule
    B = m.right_cat
    cstar = B.dual[c]
    mbar = opposite_bimodule(m, cfg)
    out = {}
    for n in m.mlabels:
        for k in m.mlabels:
            w_ck = module_word(mbar, (cstar,), k, ())
            dmu = homcalc.lc_mult(w_ck).get(n, 0)
            w_dst = module_word(m, (), k, (c,))
            nls = homcalc.lc_mult(w_dst).get(n, 0)
            if dmu == 0 or nls == 0:
                continue
            C = linalg.zeros(cfg, (nls, dmu))
            for mu in range(dmu):
                real = _phi_right(m, cfg, n, cstar, k, mu)
                for lam in range(nls):
                    C[lam, mu] = homcalc.pi(w_dst, n, lam, cfg).compose(
                        real).block(n, cfg)[0, 0]
            out[(n, k)] = C
    return out


def _walk_matrix(g, face_key, c, cfg, pre: PreBlock):
    """Matrix of one walking label around the face."""
    steps = _face_steps(g, face_key)
    anchor_dep, anchor_arr, n0, p_arr0, p_dep0 = steps[0]
    lids = g.line_ids()
    lpos = {lid: i for i, lid in enumerate(lids)}
    anchor_line = g.lines[anchor_dep[0]]
    if len(anchor_line.chain) != 1 or any(len(g.lines[e[0]].chain) != 1
                                          for e, *_ in steps):
        raise NotImplementedError("holonomy over fused lines not supported here")
    doubled = [e0[0] for e0, *_ in steps]
    if doubled.count(anchor_dep[0]) > 1:
        # choose an anchor line traversed once by this face
        once = [e for e, *_ in steps if doubled.count(e[0]) == 1]
        if not once:
            raise NotImplementedError("face with every line doubled")
        start = next(i for i, st in enumerate(steps) if st[0] == once[0])
        steps = steps[start:] + steps[:start]
        anchor_dep, anchor_arr, n0, p_arr0, p_dep0 = steps[0]
        anchor_line = g.lines[anchor_dep[0]]

    # state: dict key -> coeff; key = (assign, qs, parked=(n, mu), free)
    # free = ("port", end, sector, path) or ("slot", node, kind, data...)
    out = linalg.zeros(cfg, (pre.dim, pre.dim))
    open_comps = _open_components(anchor_line, anchor_dep, c, cfg)

    for col, key0 in enumerate(pre.basis):
        assign0, qs0 = key0
        state = {}
        # ---- open the pair on the anchor line
        lid0 = anchor_dep[0]
        n_old = assign0[lpos[lid0]][0]
        for (n, k), C in open_comps.items():
            if n != n_old:
                continue
            new_assign = list(assign0)
            new_assign[lpos[lid0]] = (k,)
            for lam in range(C.shape[0]):
                for mu in range(C.shape[1]):
                    if C[lam, mu]:
                        fkey = (tuple(new_assign), qs0, (n, mu),
                                ("port", anchor_arr, n, lam))
                        state[fkey] = state.get(fkey, cfg.zero) + C[lam, mu]
        # ---- walk the free end around the face
        for si, (dep, arr, node, p_arr, p_dep) in enumerate(steps):
            if si > 0:
                state = _step_line(g, state, dep, arr, c, cfg, lpos)
            state = _step_node(g, state, node, p_arr, p_dep, c, cfg,
                               anchor_dep, lpos)
        # ---- close against the parked end
        state = _step_close(g, state, anchor_dep, c, cfg, lpos)
        for key, coeff in state.items():
            assign, qs, parked, free = key
            assert parked is None and free is None
            row = pre.index.get((assign, qs))
            if row is not None:
                out[row, col] += coeff
    return out


def _node_tuple_ext(g, node, assign, lpos, overrides, cfg):
    """Node tuple with positional overrides (extended positions)."""
    vals = []
    pos = 0
    for end in g.nodes[node]:
        t = assign[lpos[end[0]]]
        seq = t if end[1] == 1 else tuple(reversed(t))
        for s in seq:
            vals.append(overrides.get(pos, s))
            pos += 1
    return tuple(vals)


def _step_line(g, state, dep, arr, c, cfg, lpos):
    """Transparent line crossing: move the free extension from the departure
    port to the arrival port, re-summing the line label."""
    line = g.lines[dep[0]]
    comps = _line_cross_data(line, dep, c, cfg)
    new_state = {}
    for key, coeff in state.items():
        assign, qs, parked, free = key
        tag, end, sector, path = free
        assert tag == "port" and end == dep
        n_old = assign[lpos[dep[0]]][0]
        for (n, k), E in comps.items():
            if n != n_old:
                continue
            # the departure-port path axis phi lives at sector = new label k
            if sector != k:
                continue
            new_assign = list(assign)
            new_assign[lpos[dep[0]]] = (k,)
            for lam in range(E.shape[0]):
                val = E[lam, path]
                if val:
                    fkey = (tuple(new_assign), qs, parked,
                            ("port", arr, n, lam))
                    new_state[fkey] = new_state.get(fkey, cfg.zero) + coeff * val
    return new_state


def _port_word_for(g, end, label, c, cfg, incoming_ext_side):
    line = g.lines[end[0]]
    m = line.chain[0]
    if end[1] == 0:
        from .bimodule import opposite_bimodule
        m = opposite_bimodule(m, cfg)
    if incoming_ext_side == "R":
        return module_word(m, (), label, (c,))
    return module_word(m, (c,), label, ())


def _step_node(g, state, node, p_arr, p_dep, c, cfg, anchor_dep, lpos):
    """Cross one node: absorb at the arrival port, cross the corner slot via
    the node label's balancing, emit at the departure port."""
    x = g.node_labels[node]
    slot = graphmod.corner_slot(g, node, p_arr, cfg)
    i = slot
    j = (slot + 1) % x.desc.nslots
    fac_i = x.desc.factors[i]
    fac_j = x.desc.factors[j]
    C_slot = x.desc.slot_cat(slot)
    cstar = C_slot.dual[c]
    arr_end = g.nodes[node][p_arr]
    dep_end = g.nodes[node][p_dep]

    # -- chi in: port ext (s ; c)R -> target ext (t_i, c*)R
    mid = {}
    for key, coeff in state.items():
        assign, qs, parked, free = key
        tag, end, sector, path = free
        assert tag == "port" and end == arr_end
        s_lab = assign[lpos[arr_end[0]]][0]
        if arr_end == anchor_dep:
            raise AssertionError("anchor port crossed mid-walk")
        v = sector
        X = _chi_in_matrix(fac_i, s_lab, c, v, "R", cfg)
        for nu in range(X.shape[0]):
            val = X[nu, path]
            if val:
                fkey = (assign, qs, parked, ("ti", node, v, nu))
                mid[fkey] = mid.get(fkey, cfg.zero) + coeff * val

    # -- z crossing: (t_i, c*)-attach -> (c*, t_j)-attach via z_{c*}^{-1}
    zstate = {}
    src_basis = dec_basis(x, i, "R", (cstar,))
    dst_basis = dec_basis(x, j, "L", (cstar,))
    sidx = {e: ii for ii, e in enumerate(src_basis)}
    zinv = x.z_inv(slot, cstar)
    for key, coeff in mid.items():
        assign, qs, parked, free = key
        _, _, v, nu = free
        t = _node_tuple_ext(g, node, assign, lpos, {i: v}, cfg)
        t = _apply_parked_override(g, node, t, parked, anchor_dep, assign,
                                   lpos, cfg)
        s_lab = assign[lpos[arr_end[0]]][0]
        colidx = sidx.get((t, _q_of(qs, g, node), s_lab, nu))
        if colidx is None:
            continue
        for ii, (t2, q2, u2, p2) in enumerate(dst_basis):
            val = zinv[ii, colidx]
            if not val:
                continue
            new_qs = _set_q(qs, g, node, q2)
            fkey = (assign, new_qs, parked, ("tj", node, t2, u2, p2))
            zstate[fkey] = zstate.get(fkey, cfg.zero) + coeff * val

    # -- chi out: target ext (c*, t_j)L -> port ext (c ; s')L at departure
    out_state = {}
    for key, coeff in zstate.items():
        assign, qs, parked, free = key
        _, _, t2, u2, p2 = free
        if dep_end == anchor_dep:
            fkey = (assign, qs, parked, ("preclose", node, t2, u2, p2))
            out_state[fkey] = out_state.get(fkey, cfg.zero) + coeff
            continue
        s_lab = assign[lpos[dep_end[0]]][0]
        v2 = t2[j]
        Y = _chi_out_matrix(fac_j, s_lab, cstar, v2, "L", cfg)
        for lam in range(Y.shape[0]):
            val = Y[lam, p2]
            if val:
                fkey = (assign, qs, parked, ("port", dep_end, v2, lam))
                out_state[fkey] = out_state.get(fkey, cfg.zero) + coeff * val
    return out_state


def _q_of(qs, g, node):
    return qs[g.node_ids().index(node)]


def _set_q(qs, g, node, q):
    idx = g.node_ids().index(node)
    out = list(qs)
    out[idx] = q
    return tuple(out)


def _apply_parked_override(g, node, t, parked, anchor_dep, assign, lpos, cfg):
    if parked is None:
        return t
    anchor_node = g.end_node(anchor_dep)
    if anchor_node != node:
        return t
    p_idx = g.nodes[node].index(anchor_dep)
    pos = graphmod.node_positions(g, node, cfg)[p_idx][0]
    out = list(t)
    out[pos] = parked[0]
    return tuple(out)


def _step_close(g, state, anchor_dep, c, cfg, lpos):
    """Contract the arriving free end against the parked end on the anchor
    port, returning plain pre-block states."""
    node = g.end_node(anchor_dep)
    p_idx = g.nodes[node].index(anchor_dep)
    pos = graphmod.node_positions(g, node, cfg)[p_idx][0]
    line = g.lines[anchor_dep[0]]
    m = line.chain[0]
    if anchor_dep[1] == 0:
        from .bimodule import opposite_bimodule
        m = opposite_bimodule(m, cfg)
    acat = m.left_cat
    cstar = acat.dual[c]
    new_state = {}
    close_cache = {}
    for key, coeff in state.items():
        assign, qs, parked, free = key
        tag, fnode, t2, u2, p2 = free
        assert tag == "preclose" and fnode == node
        n_sect, mu = parked
        if u2 != n_sect:
            continue
        k_lab = assign[lpos[anchor_dep[0]]][0]
        w = t2[pos]
        if w != k_lab:
            continue
        ck = (n_sect, mu, w, p2, k_lab)
        if ck not in close_cache:
            close_cache[ck] = _close_scalar(m, acat, c, cstar, n_sect, mu,
                                            w, p2, k_lab, cfg)
        val = close_cache[ck]
        if not val:
            continue
        if t2 != _node_tuple_ext(g, node, assign, lpos, {}, cfg):
            continue
        fkey = (assign, qs, None, None)
        new_state[fkey] = new_state.get(fkey, cfg.zero) + coeff * val
    return new_state


def _close_scalar(m, acat, c, cstar, n_sect, mu, w, p2, k_lab, cfg):
    """Scalar of the closing contraction: wrap c around the parked word
    (c*, k), pair with the arriving path, annihilate the (c, c*) pair."""
    w_parked = module_word(m, (cstar,), k_lab, ())
    w_tgt = module_word(m, (cstar,), w, ())
    elem = homcalc.iota(w_tgt, n_sect, p2, cfg).compose(
        homcalc.pi(w_parked, n_sect, mu, cfg))
    wrapped = homcalc.tensor(homcalc.identity(pure_word(acat, (c,)), cfg),
                             elem, cfg)
    down = homcalc.tensor(homcalc.ev_mor(acat, c, cfg),
                          homcalc.identity(module_word(m, (), w, ()), cfg), cfg)
    up = homcalc.tensor(homcalc.coev_mor(acat, cstar, cfg),
                        homcalc.identity(module_word(m, (), k_lab, ()), cfg), cfg)
    total = down.compose(wrapped).compose(up)    # (k) -> (w)
    blk = total.block(k_lab, cfg)
    return blk[0, 0] if blk.size else cfg.zero


# ---------------------------------------------------------------------------
# block spaces and evaluation


def total_holonomy(g, cfg, pre: PreBlock = None):
    """Ordered product of the per-domain idempotents (they commute)."""
    pre = pre or PreBlock(g, cfg)
    total = linalg.eye(cfg, pre.dim)
    for fk in sorted(graphmod.faces(g)):
        total = holonomy_idempotent(g, fk, cfg, pre) @ total
    return total


@dataclass
class BlockSpace:
    pre: PreBlock
    h: object         # total holonomy matrix
    iota: object      # basis of the image, columns
    pi: object        # coordinates: pi @ iota = 1, iota @ pi = h

    @property
    def dim(self):
        return self.iota.shape[1]


def block_space(g, cfg, pre: PreBlock = None) -> BlockSpace:
    pre = pre or PreBlock(g, cfg)
    h = total_holonomy(g, cfg, pre)
    res = linalg.idempotency_residual(h)
    scale = max(1.0, linalg.matnorm(h))
    if res > 1e3 * cfg.tol.eq_tol * scale:
        raise ArithmeticError(f"total holonomy not idempotent: residual {res}")
    iota, pi = linalg.image_basis(h, cfg)
    return BlockSpace(pre, h, iota, pi)


def evaluate_matrix(g, cfg, blk: BlockSpace = None):
    """Matrix of the evaluation (pi o delta) from the total node space to
    block coordinates; returns (matrix, block_space, node_basis)."""
    blk = blk or block_space(g, cfg)
    nbasis = graphmod.total_node_space_basis(g, cfg)
    d = delta_matrix(g, cfg, blk.pre)
    return blk.pi @ d, blk, nbasis


def theta_form(g, cfg, blk: BlockSpace):
    """The transparent functional on the block space of a loop graph:
    ``dim A * dim B`` times the ray-category trace, evaluated in pre-block
    coordinates (one p-squared weight per diagonal basis element)."""
    pre = blk.pre
    weights = linalg.zeros(cfg, (1, pre.dim))
    for idx, (assign, qs) in enumerate(pre.basis):
        node = g.node_ids()[0]
        t = node_tuple(g, node, dict(zip(g.line_ids(), assign)), cfg)
        x = g.node_labels[node]
        weights[0, idx] = tuple_pdim(x.desc, t, cfg)
    return weights @ blk.iota


def scalar_evaluate(g, cfg, f_vec, functional, blk: BlockSpace = None):
    """Pair a block-space functional with the evaluation of a node vector."""
    ev, blk, _ = evaluate_matrix(g, cfg, blk)
    out = functional @ (ev @ f_vec)
    return out[0] if hasattr(out, "__len__") else out


# ---------------------------------------------------------------------------
# closed-form oracles for loop and lasso graphs


def lasso_closed_form(g, cfg, pre: PreBlock = None):
    """The holonomy idempotent of a lasso graph computed by the closed
    formula: conjugation by braided (co)evaluations of the node label at the
    two slots, with one d/D weight per domain.  Independent of the walk
    compiler (uses only the balancing matrices of the node label)."""
    from .center import braided_coev, braided_ev, _dec2_basis, _index
    pre = pre or PreBlock(g, cfg)
    node = g.node_ids()[0]
    x = g.node_labels[node]
    lids = g.line_ids()
    if len(lids) != 1 or len(g.nodes[node]) != 2:
        raise ValueError("lasso closed form needs one node, one line")
    # map pre-block basis to plain dec basis of x
    plain = dec_basis(x)
    pidx = _index(plain)

    def to_plain(vec):
        out = linalg.zeros(cfg, (len(plain),))
        for idx, (assign, qs) in enumerate(pre.basis):
            t = node_tuple(g, node, dict(zip(lids, assign)), cfg)
            out[pidx[(t, qs[0])]] = vec[idx]
        return out

    def from_plain(vec):
        out = linalg.zeros(cfg, (pre.dim,))
        for idx, (assign, qs) in enumerate(pre.basis):
            t = node_tuple(g, node, dict(zip(lids, assign)), cfg)
            out[idx] = vec[pidx[(t, qs[0])]]
        return out

    total = linalg.zeros(cfg, (pre.dim, pre.dim))
    for slot in (0, 1):
        pass
    # conjugate over both slots successively: h = h_B o h_A
    mat = linalg.eye(cfg, len(plain))
    for slot in (0, 1):
        C = x.desc.slot_cat(slot)
        D = global_dimension(C, cfg)
        hslot = linalg.zeros(cfg, (len(plain), len(plain)))
        for c in C.labels:
            cstar = C.dual[c]
            _, dst, cob = braided_coev(x, slot, c, cfg)
            src, _, brv = braided_ev(x, slot, cstar, cfg)
            assert src == dst
            hslot = hslot + (brv @ cob) * (cfg.coerce(C.dims[c]) / D)
        mat = hslot @ mat
    out = linalg.zeros(cfg, (pre.dim, pre.dim))
    for colidx in range(pre.dim):
        unit = linalg.zeros(cfg, (pre.dim,))
        unit[colidx] = cfg.one
        res = from_plain(mat @ to_plain(unit))
        for r in range(pre.dim):
            out[r, colidx] = res[r]
    return out


def loop_component_oracle(g, cfg, f: Mor):
    """Compute ``pi o delta o sil(f)`` on a loop graph by the closed
    component formula (independently of the walk pipeline):

    ``out[n] = sum_{a,b} d_a d_b / (D_A D_B p_n) *
               sum_mu <path_mu | a* f b* | path_mu>``
    with ``mu`` running over fusion paths of ``(a*; m; b*) -> n``.
    """
    line = g.lines[g.line_ids()[0]]
    m = line.chain[0]
    A, B = m.left_cat, m.right_cat
    DA, DB = global_dimension(A, cfg), global_dimension(B, cfg)
    pre = PreBlock(g, cfg)
    out = linalg.zeros(cfg, (pre.dim,))
    # realize f as a word morphism on the object's summands
    for idx, (assign, qs) in enumerate(pre.basis):
        n = assign[0][0]
        total = cfg.zero
        for a in A.labels:
            astar = A.dual[a]
            for b in B.labels:
                bstar = B.dual[b]
                ida = homcalc.identity(pure_word(A, (astar,)), cfg)
                idb = homcalc.identity(pure_word(B, (bstar,)), cfg)
                fw = _obj_mor_as_word(m, f, cfg)
                conj = homcalc.tensor(homcalc.tensor(ida, fw, cfg), idb, cfg)
                blkn = conj.block(n, cfg)
                tr = cfg.zero
                for i in range(min(blkn.shape)):
                    tr = tr + blkn[i, i]
                total = total + tr * (cfg.coerce(A.dims[a]) * cfg.coerce(B.dims[b]))
        out[idx] = total / (DA * DB * cfg.coerce(m.p[n]))
    return out


def _obj_mor_as_word(m, f: Mor, cfg):
    """A sum-object endomorphism does not directly tensor with words; build
    the corresponding single-summand word morphism family as a block
    morphism between identical words via a formal direct-sum trick."""
    # f acts per sector; for the conjugation we only need its blocks, so we
    # present it as a morphism of the word consisting of the object's
    # summands expanded -- blocks are identical.
    class _W:
        pass
    # the conjugated blocks only use per-sector matrices; reuse f with dom
    # and cod as single-core words is impossible for sums, so embed: the
    # trace over paths((a*; s; b*) -> n) contracted against f's blocks is
    # computed per summand pair below.
    raise NotImplementedError
