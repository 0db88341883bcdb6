"""Combinatorial model of fine defect surfaces and their labels.

A closed surface with an embedded defect graph is stored as a rotation
system: every line has two ends, ``(line_id, 0)`` at its start node and
``(line_id, 1)`` at its end node, and every node carries the
counterclockwise cyclic order of its incident ends.  Domains are the faces
of the embedding, recovered as orbits of ``end -> rotation_next(other_end)``;
fineness (every domain a disk) is the statement that Euler characteristic
``V - E + F`` matches the surface.

Labels: domains carry spherical fusion categories, lines carry bimodule
categories (a chain of factors for fused lines) plus an object, nodes carry
balanced objects over the node descriptor obtained by flattening the port
factors in rotation order (incoming ends contribute the plain categories,
outgoing ends their opposites in reversed order).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import homcalc, linalg
from .bimodule import BimoduleCategoryData, opposite_bimodule
from .center import BalancedObject, NodeDescriptor, dec_basis
from .report import Report
from .scalars import RunConfig

__all__ = ["Line", "ExtrudedGraph", "validate_surface", "node_descriptor",
           "node_space_basis", "total_node_space_basis", "faces", "face_of_end",
           "euler_characteristic", "line_side_domains"]


@dataclass
class Line:
    """A defect line.  ``chain`` lists the bimodule factors of a (possibly
    fused) line from left to right; ``obj`` is a dict ``simple tuple ->
    multiplicity`` over chain-factor simples (plain dict ``label -> mult``
    is accepted for elementary lines).  ``inner`` optionally carries the
    balancings of the object at the chain's interior slots."""

    id: int
    start: object
    end: object
    chain: tuple
    obj: dict
    inner: object = None

    def __post_init__(self):
        self.chain = tuple(self.chain)
        norm = {}
        for k, v in self.obj.items():
            key = (k,) if not isinstance(k, tuple) else k
            norm[key] = int(v)
        self.obj = norm

    @property
    def left_cat(self):
        return self.chain[0].left_cat

    @property
    def right_cat(self):
        return self.chain[-1].right_cat

    def obj_simples(self):
        return sorted(t for t, v in self.obj.items() if v)


@dataclass
class ExtrudedGraph:
    """A labeled fine defect surface (closed, oriented)."""

    nodes: dict          # node_id -> list of ends (line_id, which) ccw
    lines: dict          # line_id -> Line
    domains: dict        # face_key -> FusionCategoryData
    node_labels: dict    # node_id -> BalancedObject
    name: str = "graph"
    _cache: dict = field(default_factory=dict, repr=False)

    def node_ids(self):
        return sorted(self.nodes)

    def line_ids(self):
        return sorted(self.lines)

    def end_node(self, end):
        line = self.lines[end[0]]
        return line.start if end[1] == 0 else line.end


# ---------------------------------------------------------------------------
# rotation-system combinatorics


def _other(end):
    return (end[0], 1 - end[1])


def _rot_next(g: ExtrudedGraph, end):
    node = g.end_node(end)
    rot = g.nodes[node]
    i = rot.index(end)
    return rot[(i + 1) % len(rot)]


def faces(g: ExtrudedGraph):
    """Faces as orbits of ``e -> rot_next(other(e))``; each face is the list
    of ends traversed (the face lies on a fixed side of each directed
    line-run).  Returned as a dict keyed by the minimal end in the orbit."""
    if "faces" in g._cache:
        return g._cache["faces"]
    all_ends = []
    for lid in g.line_ids():
        all_ends.extend([(lid, 0), (lid, 1)])
    seen = set()
    out = {}
    for e0 in all_ends:
        if e0 in seen:
            continue
        orbit = []
        e = e0
        while True:
            orbit.append(e)
            seen.add(e)
            e = _rot_next(g, _other(e))
            if e == e0:
                break
        out[min(orbit)] = orbit
    g._cache["faces"] = out
    return out


def face_of_end(g: ExtrudedGraph, end):
    """The face whose traversal leaves through this end."""
    for key, orbit in faces(g).items():
        if end in orbit:
            return key
    raise KeyError(end)


def euler_characteristic(g: ExtrudedGraph) -> int:
    v = len(g.nodes)
    e = len(g.lines)
    f = len(faces(g))
    return v - e + f


def line_side_domains(g: ExtrudedGraph, lid):
    """(left_face, right_face) of a line with respect to its orientation.

    A face's traversal contains the end through which it *leaves*; the face
    containing end ``(l, 0)`` runs along the line from start to end, which
    by the counterclockwise rotation convention puts it on the line's left.
    """
    return face_of_end(g, (lid, 0)), face_of_end(g, (lid, 1))


# ---------------------------------------------------------------------------
# node descriptors and validation


def port_factors(g: ExtrudedGraph, end, cfg: RunConfig):
    """Chain factors contributed by a line end: incoming ends (which == 1)
    give the chain itself, outgoing ends the reversed opposites."""
    line = g.lines[end[0]]
    if end[1] == 1:
        return tuple(line.chain)
    return tuple(opposite_bimodule(m, cfg) for m in reversed(line.chain))


def node_descriptor(g: ExtrudedGraph, node, cfg: RunConfig) -> NodeDescriptor:
    factors = []
    for end in g.nodes[node]:
        factors.extend(port_factors(g, end, cfg))
    return NodeDescriptor(tuple(factors))


def node_positions(g: ExtrudedGraph, node, cfg: RunConfig):
    """For each port (index into the rotation list): the tuple positions of
    its factors inside the node descriptor."""
    out = []
    pos = 0
    for end in g.nodes[node]:
        k = len(port_factors(g, end, cfg))
        out.append(tuple(range(pos, pos + k)))
        pos += k
    return out


def corner_slot(g: ExtrudedGraph, node, port_index, cfg: RunConfig) -> int:
    """The descriptor slot of the corner after the given port (between it
    and the next port counterclockwise)."""
    return node_positions(g, node, cfg)[port_index][-1]


def validate_surface(g: ExtrudedGraph, cfg: RunConfig) -> Report:
    rep = Report(f"surface of {g.name}")
    ok = True
    for node, rot in g.nodes.items():
        if len(rot) < 1:
            ok = False
        for end in rot:
            if end[0] not in g.lines or g.end_node(end) != node:
                ok = False
    for lid, line in g.lines.items():
        if (lid, 0) not in g.nodes.get(line.start, []) or \
           (lid, 1) not in g.nodes.get(line.end, []):
            ok = False
    rep.add("rotation system well formed (no circular lines, nodes nonempty)", ok)
    if not ok:
        return rep

    chi = euler_characteristic(g)
    rep.add("fineness: all domains disks (Euler characteristic 2)",
            chi == 2, detail=f"V-E+F = {chi}")

    labeled = all(k in g.domains for k in faces(g))
    rep.add("every domain labeled", labeled)
    if not labeled:
        return rep

    side_ok = True
    for lid, line in g.lines.items():
        lf, rf = line_side_domains(g, lid)
        if g.domains[lf] is not line.left_cat or g.domains[rf] is not line.right_cat:
            side_ok = False
    rep.add("line categories match adjacent domains", side_ok)

    desc_ok = True
    for node in g.node_ids():
        x = g.node_labels.get(node)
        if x is None:
            desc_ok = False
            continue
        want = node_descriptor(g, node, cfg)
        if tuple(x.desc.factors) != tuple(want.factors):
            desc_ok = False
    rep.add("node labels match ray descriptors", desc_ok)

    twice_ok = True
    for lid, line in g.lines.items():
        for m in line.chain:
            count_plain = count_op = 0
            for node in g.node_ids():
                for fac in node_descriptor(g, node, cfg).factors:
                    if fac is m:
                        count_plain += 1
                    elif fac.op_of is m or (m.op_of is not None and fac is m.op_of):
                        count_op += 1
            if not (count_plain >= 1 and count_op >= 1):
                twice_ok = False
    rep.add("each line category appears once plainly and once opposed", twice_ok)
    return rep


# ---------------------------------------------------------------------------
# node spaces


def port_object(g: ExtrudedGraph, end):
    """Multiplicity dict of the port object at a line end (tuples over the
    port's factors; reversed for outgoing ends)."""
    line = g.lines[end[0]]
    if end[1] == 1:
        return dict(line.obj)
    return {tuple(reversed(t)): v for t, v in line.obj.items()}


def node_space_basis(g: ExtrudedGraph, node, cfg: RunConfig):
    """Basis of ``Hom(boxtimes port objects, U(x))`` for simple-summand port
    choices: elements ``(port_choice, q)`` where ``port_choice`` assigns to
    each port a pair (simple tuple over its factors, summand index) and
    ``q`` indexes the multiplicity of the matching tuple in ``U(x)``.

    When ports carry interior-slot balancings (fused lines), the node space
    is additionally cut by the interior centrality; callers handle the cut
    through the pre-block machinery, the raw basis here is the ambient one.
    """
    x = g.node_labels[node]
    ends = g.nodes[node]
    per_port = []
    for end in ends:
        obj = port_object(g, end)
        opts = []
        for t in sorted(obj):
            for alpha in range(obj[t]):
                opts.append((t, alpha))
        per_port.append(opts)
    out = []

    def rec(i, chosen):
        if i == len(per_port):
            flat = tuple(s for t, _ in chosen for s in t)
            for q in range(x.mult(flat)):
                out.append((tuple(chosen), q))
            return
        for opt in per_port[i]:
            rec(i + 1, chosen + [opt])

    rec(0, [])
    return out


def total_node_space_basis(g: ExtrudedGraph, cfg: RunConfig):
    """Ordered tensor product over nodes (ascending node id): basis elements
    are tuples of per-node basis elements."""
    per_node = [node_space_basis(g, n, cfg) for n in g.node_ids()]
    import itertools
    return list(itertools.product(*per_node))
