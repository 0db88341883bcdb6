"""Skeletal spherical fusion categories: data model, validation, fixtures.

The associator tensor ``F[(a, b, c, d)]`` is a matrix between the two
fusion-path bases of the total space ``Hom((a b) c, d)``:

* rows ``(e, mu, nu)``: ``mu`` in ``V(a b -> e)``, ``nu`` in ``V(e c -> d)``,
  enumerated with ``e`` ascending in label order, then ``mu``, ``nu``
  row-major;
* columns ``(f, rho, sigma)``: ``rho`` in ``V(b c -> f)``, ``sigma`` in
  ``V(a f -> d)``, enumerated the same way;
* the left-comb basis element ``(e, mu, nu)`` equals
  ``sum_f F[(e,mu,nu),(f,rho,sigma)] * (f, rho, sigma)`` after
  reassociating ``(a b) c -> a (b c)``.

Strict-unit convention: every block with ``a``, ``b``, ``c`` or ``d`` equal
to the unit is the identity matrix and may be omitted from input data.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import homcalc, linalg
from .report import Report
from .scalars import RunConfig, approx_eq

__all__ = [
    "FusionCategoryData", "validate_fusion_category", "global_dimension",
    "fusion_mult", "dual_label", "vec", "vec_z2", "fibonacci",
    "fusion_from_json", "fusion_to_json",
]


@dataclass(eq=False)
class FusionCategoryData:
    """Skeletal data of a spherical fusion category. Instances are treated
    as immutable after construction and compared by identity."""

    name: str
    labels: list
    unit: str
    dual: dict
    N: dict          # (a, b, c) -> nonnegative int
    F: dict          # (a, b, c, d) -> matrix (nested lists or ndarray)
    dims: dict       # label -> Fraction / int / float
    _extra: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        _fill_trivial_blocks(self)

    def index(self, a) -> int:
        return self.labels.index(a)


def fusion_mult(cat: FusionCategoryData, a, b, out) -> int:
    for x in (a, b, out):
        if x not in cat.labels:
            raise KeyError(f"unknown label {x!r}")
    return cat.N.get((a, b, out), 0)


def dual_label(cat: FusionCategoryData, a) -> str:
    if a not in cat.labels:
        raise KeyError(f"unknown label {a!r}")
    return cat.dual[a]


def global_dimension(cat: FusionCategoryData, cfg: RunConfig):
    total = cfg.zero
    for a in cat.labels:
        d = cfg.coerce(cat.dims[a])
        total = total + d * d
    return total


def _row_dim(cat, a, b, c, d):
    return sum(cat.N.get((a, b, e), 0) * cat.N.get((e, c, d), 0) for e in cat.labels)


def _col_dim(cat, a, b, c, d):
    return sum(cat.N.get((b, c, f), 0) * cat.N.get((a, f, d), 0) for f in cat.labels)


def _fill_trivial_blocks(cat):
    """Insert identity matrices for admissible blocks touching the unit."""
    for a in cat.labels:
        for b in cat.labels:
            for c in cat.labels:
                for d in cat.labels:
                    key = (a, b, c, d)
                    if key in cat.F:
                        continue
                    r = _row_dim(cat, a, b, c, d)
                    if r == 0:
                        continue
                    if cat.unit in key:
                        cat.F[key] = [[1 if i == j else 0 for j in range(r)]
                                      for i in range(r)]


# ---------------------------------------------------------------------------
# validation


def _pentagon_residual(cat, cfg: RunConfig) -> float:
    """Compare the two reassociation paths around the associahedron for every
    four-letter word; coherent data gives equal matrices."""
    worst = 0.0
    lc = homcalc.left_comb(4)
    for a in cat.labels:
        for b in cat.labels:
            for c in cat.labels:
                for d in cat.labels:
                    w = homcalc.pure_word(cat, (a, b, c, d))
                    for s in cat.labels:
                        dim = len(homcalc.enumerate_basis(w, lc, s))
                        if dim == 0:
                            continue
                        worst = max(worst, _two_path_residual(w, s, cfg))
    return worst


def _two_path_residual(word, sector, cfg) -> float:
    """max |path_A - path_B| for the two rotation routes from the left comb
    ``((xy)z)w`` to the right comb ``x(y(zw))``."""
    lc = homcalc.left_comb(len(word))

    def chain(addrs):
        tree = lc
        dim = len(homcalc.enumerate_basis(word, tree, sector))
        m = linalg.eye(cfg, dim)
        for addr in addrs:
            r = homcalc._rotation_matrix(word, tree, sector, addr, cfg)
            tree = homcalc._rotate_tree(tree, addr)
            m = r @ m
        return tree, m

    t1, m1 = chain([(), ()])
    t2, m2 = chain([("L",), (), ("R",)])
    if t1 != t2:
        raise AssertionError("pentagon paths ended at different trees")
    return linalg.matnorm(m1 - m2)


def validate_fusion_category(cat: FusionCategoryData, cfg: RunConfig) -> Report:
    rep = Report(f"fusion category {cat.name}")
    tol = cfg.tol.eq_tol

    ok = (len(set(cat.labels)) == len(cat.labels) and cat.unit in cat.labels)
    rep.add("labels and unit well formed", ok)
    if not ok:
        return rep

    invol = all(cat.dual.get(cat.dual.get(a)) == a for a in cat.labels)
    rep.add("dual is an involution", invol and cat.dual[cat.unit] == cat.unit)

    unit_ok = True
    for a in cat.labels:
        for b in cat.labels:
            if cat.N.get((cat.unit, a, b), 0) != (1 if a == b else 0):
                unit_ok = False
            if cat.N.get((a, cat.unit, b), 0) != (1 if a == b else 0):
                unit_ok = False
            if cat.N.get((a, b, cat.unit), 0) != (1 if b == cat.dual[a] else 0):
                unit_ok = False
    rep.add("unit fusion rules", unit_ok)

    assoc_ok = True
    for a in cat.labels:
        for b in cat.labels:
            for c in cat.labels:
                for d in cat.labels:
                    if _row_dim(cat, a, b, c, d) != _col_dim(cat, a, b, c, d):
                        assoc_ok = False
    rep.add("fusion ring associative", assoc_ok)
    if not (unit_ok and assoc_ok and invol):
        return rep

    shapes_ok, unit_blocks_ok = True, True
    for key, block in cat.F.items():
        a, b, c, d = key
        r = _row_dim(cat, a, b, c, d)
        m = linalg.asmatrix(cfg, block)
        if m.shape != (r, r):
            shapes_ok = False
            continue
        if cat.unit in key:
            if linalg.matnorm(m - linalg.eye(cfg, r)) > tol:
                unit_blocks_ok = False
    rep.add("F block shapes", shapes_ok)
    rep.add("unit F blocks are identity", unit_blocks_ok)
    missing = [k for k in _admissible_keys(cat) if k not in cat.F]
    rep.add("all admissible F blocks present", not missing,
            detail=f"missing {missing[:3]}" if missing else "")
    if not (shapes_ok and not missing):
        return rep

    try:
        pent = _pentagon_residual(cat, cfg)
        rep.add_residual("pentagon identity", pent, tol)
    except Exception as exc:  # malformed shapes surface here
        rep.add("pentagon identity", False, detail=str(exc))

    dims_ok = True
    worst = 0.0
    for a in cat.labels:
        da = cfg.coerce(cat.dims[a])
        if not da:
            dims_ok = False
        if not approx_eq(da, cfg.coerce(cat.dims[cat.dual[a]]), cfg):
            dims_ok = False
        for b in cat.labels:
            lhs = da * cfg.coerce(cat.dims[b])
            rhs = cfg.zero
            for c in cat.labels:
                rhs = rhs + cfg.coerce(cat.N.get((a, b, c), 0)) * cfg.coerce(cat.dims[c])
            worst = max(worst, abs(complex(lhs - rhs)))
    rep.add("dimensions nonzero and dual-symmetric", dims_ok)
    rep.add_residual("dimension consistency d_a d_b = sum N d_c", worst, tol)
    rep.add("global dimension nonzero",
            bool(abs(complex(global_dimension(cat, cfg))) > 0))

    try:
        homcalc._evcoev(cat, cfg)
        rep.add("spherical ev/coev normalization solvable", True)
    except Exception as exc:
        rep.add("spherical ev/coev normalization solvable", False, detail=str(exc))
    return rep


def _admissible_keys(cat):
    for a in cat.labels:
        for b in cat.labels:
            for c in cat.labels:
                for d in cat.labels:
                    if _row_dim(cat, a, b, c, d) > 0:
                        yield (a, b, c, d)


# ---------------------------------------------------------------------------
# fixtures


def vec(name="vec") -> FusionCategoryData:
    """The trivial category: one simple, trivial F."""
    return FusionCategoryData(
        name=name, labels=["1"], unit="1", dual={"1": "1"},
        N={("1", "1", "1"): 1}, F={}, dims={"1": 1})


def vec_z2(name="vec_z2") -> FusionCategoryData:
    """Pointed category of Z/2 with trivial cocycle."""
    labels = ["1", "g"]
    mul = lambda a, b: "1" if a == b else "g"
    N = {(a, b, mul(a, b)): 1 for a in labels for b in labels}
    F = {(a, b, c, mul(mul(a, b), c)): [[1]]
         for a in labels for b in labels for c in labels}
    return FusionCategoryData(
        name=name, labels=labels, unit="1", dual={"1": "1", "g": "g"},
        N=N, F=F, dims={"1": 1, "g": 1})


def fibonacci(name="fibonacci") -> FusionCategoryData:
    """Fibonacci category: simples 1, t with t t = 1 + t, d_t the golden
    ratio.  Only the (t,t,t,t) block is nontrivial."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    labels = ["1", "t"]
    N = {("1", "1", "1"): 1, ("1", "t", "t"): 1, ("t", "1", "t"): 1,
         ("t", "t", "1"): 1, ("t", "t", "t"): 1}
    s = 1.0 / math.sqrt(phi)
    f_tttt = [[1.0 / phi, s], [s, -1.0 / phi]]  # rows (e=1),(e=t)
    # remaining non-unit admissible blocks are 1x1 identities in this gauge
    F = {("t", "t", "t", "t"): f_tttt,
         ("t", "t", "t", "1"): [[1.0]], ("t", "t", "1", "t"): [[1.0]],
         ("t", "1", "t", "t"): [[1.0]], ("1", "t", "t", "t"): [[1.0]]}
    return FusionCategoryData(
        name=name, labels=labels, unit="1", dual={"1": "1", "t": "t"},
        N=N, F=F, dims={"1": 1, "t": phi})


# ---------------------------------------------------------------------------
# JSON interface
#
# {"labels": [...], "unit": ..., "dual": {...},
#  "N": [[a, b, c, n], ...],
#  "F": [[a, b, c, d, e, f, mu, nu, rho, sigma, re, im], ...],
#  "dims": {label: number | [re, im] | "p/q"}}
#
# Omitted F entries are zero; blocks touching the unit default to identity.


def _num_from_json(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (list, tuple)):
        re, im = v
        if im:
            return complex(re, im)
        return re
    return v


def _num_to_json(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    try:
        from .scalars import QQc
        if isinstance(v, QQc):
            return [str(v.re), str(v.im)] if v.im else str(v.re)
    except ImportError:
        pass
    return v


def fusion_from_json(data, name=None) -> FusionCategoryData:
    if isinstance(data, str):
        data = json.loads(data)
    labels = list(data["labels"])
    cat = FusionCategoryData(
        name=name or data.get("name", "category"),
        labels=labels, unit=data["unit"], dual=dict(data["dual"]),
        N={(a, b, c): int(n) for a, b, c, n in data["N"]},
        F={}, dims={k: _num_from_json(v) for k, v in data["dims"].items()})
    blocks = {}
    for a, b, c, d, e, f, mu, nu, rho, sigma, re, im in data.get("F", []):
        key = (a, b, c, d)
        if key not in blocks:
            r = _row_dim(cat, *key)
            blocks[key] = [[0] * r for _ in range(r)]
        rows = homcalc.assoc_row_enum(cat, "A", a, "A", b, "A", c, d)
        cols = homcalc.assoc_col_enum(cat, "A", a, "A", b, "A", c, d)
        ri = rows.index((e, mu, nu))
        ci = cols.index((f, rho, sigma))
        blocks[key][ri][ci] = _num_from_json(re if not im else [re, im])
    cat.F.update(blocks)
    _fill_trivial_blocks(cat)
    return cat


def fusion_to_json(cat: FusionCategoryData) -> dict:
    entries = []
    for key, block in sorted(cat.F.items()):
        a, b, c, d = key
        if cat.unit in key:
            continue
        rows = homcalc.assoc_row_enum(cat, "A", a, "A", b, "A", c, d)
        cols = homcalc.assoc_col_enum(cat, "A", a, "A", b, "A", c, d)
        for ri, (e, mu, nu) in enumerate(rows):
            for ci, (f, rho, sigma) in enumerate(cols):
                v = block[ri][ci] if not hasattr(block, "shape") else block[ri, ci]
                if v:
                    entries.append([a, b, c, d, e, f, mu, nu, rho, sigma,
                                    _num_to_json(v), 0])
    return {
        "name": cat.name, "labels": list(cat.labels), "unit": cat.unit,
        "dual": dict(cat.dual),
        "N": [[a, b, c, n] for (a, b, c), n in sorted(cat.N.items()) if n],
        "F": entries,
        "dims": {k: _num_to_json(v) for k, v in cat.dims.items()},
    }
