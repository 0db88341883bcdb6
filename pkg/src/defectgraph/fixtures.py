"""Shared fixture categories, modules and graphs used by tests and the CLI.

Graph builders fix rotation systems explicitly; all shipped graphs are
spheres (Euler characteristic 2).
"""

from __future__ import annotations

from . import bimodule, fusion
from .center import silent_object
from .graph import ExtrudedGraph, Line, faces, face_of_end
from .scalars import RunConfig

__all__ = ["FIXTURE_CATEGORIES", "fixture_category", "fixture_module",
           "loop_graph", "lasso_graph", "bigon_graph", "theta_graph",
           "bouquet_graph", "tetrahedron_graph"]

_cats = {}
_mods = {}


def fixture_category(name: str):
    if name not in _cats:
        builders = {"vec": fusion.vec, "vec_z2": fusion.vec_z2,
                    "fibonacci": fusion.fibonacci}
        if name not in builders:
            raise KeyError(f"unknown fixture category {name!r}")
        _cats[name] = builders[name]()
    return _cats[name]


FIXTURE_CATEGORIES = ("vec", "vec_z2", "fibonacci")


def fixture_module(name: str):
    """Shipped traced bimodule fixtures: regular bimodules and the trivial
    module of vec_z2."""
    if name not in _mods:
        if name.endswith("_regular"):
            _mods[name] = bimodule.regular_bimodule(fixture_category(name[:-8]))
        elif name == "vec_over_vec_z2":
            _mods[name] = bimodule.trivial_module(
                fixture_category("vec_z2"), fixture_category("vec"))
        else:
            raise KeyError(f"unknown fixture module {name!r}")
    return _mods[name]


def _assign_domains(g: ExtrudedGraph):
    """Derive domain labels from line sides (consistent for fixtures)."""
    domains = {}
    for lid, line in g.lines.items():
        lf = face_of_end(g, (lid, 1))
        rf = face_of_end(g, (lid, 0))
        domains.setdefault(lf, line.left_cat)
        domains.setdefault(rf, line.right_cat)
        if domains[lf] is not line.left_cat or domains[rf] is not line.right_cat:
            raise ValueError("inconsistent domain labels")
    g.domains = domains
    return g


def loop_graph(m, cfg: RunConfig, obj=None, x=None, name=None) -> ExtrudedGraph:
    """Sphere with one node and one line from the node to itself; node label
    defaults to the silent object (a loop graph in the strict sense)."""
    obj = obj or {s: 1 for s in m.mlabels}
    x = x or silent_object(m, cfg, op_first=False,
                           name=f"silent({m.name})")
    g = ExtrudedGraph(
        nodes={0: [(0, 1), (0, 0)]},
        lines={0: Line(0, 0, 0, (m,), obj)},
        domains={}, node_labels={0: x},
        name=name or f"loop({m.name})")
    return _assign_domains(g)


def lasso_graph(m, cfg, x, obj=None, name=None) -> ExtrudedGraph:
    return loop_graph(m, cfg, obj=obj, x=x, name=name or f"lasso({m.name})")


def bigon_graph(m, n, cfg, x0, x1, obj_m=None, obj_n=None, name=None):
    """Two nodes joined by two parallel lines: line 0 labeled ``m`` from
    node 0 to node 1, line 1 labeled ``n`` from node 1 to node 0.
    Node 0 descriptor: (opposite(m), n); node 1: (m, opposite(n))."""
    obj_m = obj_m or {s: 1 for s in m.mlabels}
    obj_n = obj_n or {s: 1 for s in n.mlabels}
    g = ExtrudedGraph(
        nodes={0: [(0, 0), (1, 1)], 1: [(1, 0), (0, 1)]},
        lines={0: Line(0, 0, 1, (m,), obj_m), 1: Line(1, 1, 0, (n,), obj_n)},
        domains={}, node_labels={0: x0, 1: x1},
        name=name or f"bigon({m.name},{n.name})")
    return _assign_domains(g)


def theta_graph(m1, m2, m3, cfg, x0, x1, objs=None, name=None):
    """Two nodes, three parallel lines (all node 0 -> node 1).
    Node 0 descriptor: (op(m1), op(m2), op(m3)); node 1: (m3, m2, m1)."""
    objs = objs or [{s: 1 for s in mm.mlabels} for mm in (m1, m2, m3)]
    g = ExtrudedGraph(
        nodes={0: [(0, 0), (1, 0), (2, 0)], 1: [(2, 1), (1, 1), (0, 1)]},
        lines={0: Line(0, 0, 1, (m1,), objs[0]),
               1: Line(1, 0, 1, (m2,), objs[1]),
               2: Line(2, 0, 1, (m3,), objs[2])},
        domains={}, node_labels={0: x0, 1: x1},
        name=name or "theta")
    return _assign_domains(g)


def bouquet_graph(m1, m2, cfg, x, objs=None, name=None):
    """One node with two side-by-side loops: rotation
    (l0-out, l0-in, l1-out, l1-in); descriptor
    (op(m1), m1, op(m2), m2)."""
    objs = objs or [{s: 1 for s in mm.mlabels} for mm in (m1, m2)]
    g = ExtrudedGraph(
        nodes={0: [(0, 0), (0, 1), (1, 0), (1, 1)]},
        lines={0: Line(0, 0, 0, (m1,), objs[0]),
               1: Line(1, 0, 0, (m2,), objs[1])},
        domains={}, node_labels={0: x},
        name=name or "bouquet2")
    return _assign_domains(g)


def tetrahedron_graph(mods, cfg, node_labels, objs=None, name=None):
    """The 1-skeleton of a tetrahedron on the sphere.

    Vertices 0..3; lines (id: start -> end):
      0: 0->1, 1: 0->2, 2: 0->3, 3: 1->2, 4: 2->3, 5: 3->1.
    Rotations (counterclockwise, planar embedding with vertex 3 outside the
    triangle 0-1-2):
      node0: (0,0) (1,0) (2,0)
      node1: (0,1) (5,1) (3,0)
      node2: (1,1) (3,1) (4,0)
      node3: (2,1) (4,1) (5,0)
    ``mods`` maps line id -> bimodule category.
    """
    objs = objs or {lid: {s: 1 for s in mods[lid].mlabels} for lid in range(6)}
    ends = {0: (0, 1), 1: (0, 2), 2: (0, 3), 3: (1, 2), 4: (2, 3), 5: (3, 1)}
    lines = {lid: Line(lid, ends[lid][0], ends[lid][1], (mods[lid],), objs[lid])
             for lid in range(6)}
    g = ExtrudedGraph(
        nodes={0: [(0, 0), (1, 0), (2, 0)],
               1: [(0, 1), (5, 1), (3, 0)],
               2: [(1, 1), (3, 1), (4, 0)],
               3: [(2, 1), (4, 1), (5, 0)]},
        lines=lines, domains={}, node_labels=dict(node_labels),
        name=name or "tetrahedron")
    return _assign_domains(g)
