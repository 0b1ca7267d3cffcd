"""Pictures as labelled combinatorial maps.

A picture is stored as a rotation system: every vertex lists its darts
(half-edges) counter-clockwise, and the disc boundary lists the darts that
end on it, also counter-clockwise.  Internally the boundary becomes a node
whose rotation is the reversed boundary order, so that a disc picture is a
sphere map with one marked node.

Disconnected pictures need to say where each component sits.  A *face
reference* names the sector just before a dart (clockwise of it) at the
dart's node:

* ``{"dart": d}``: the sector before ``d``;
* ``{"vertex": v}``: the only sector of a vertex without darts;
* ``{"boundary": true}``: the only sector of a boundary without darts;
* ``{"loop": L, "side": "in" | "out"}``: one side of a free loop.

Each non-root component has a ``nesting`` entry ``{"component": id,
"host": faceref, "outer": faceref}``; free loops carry their host in
``face``.  Internally every nesting relation becomes a *ghost* edge, which
keeps the map connected so faces can be traced with one permutation.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import count
from typing import Iterable, Mapping, Sequence

from .hypergraph import EPS, GeneralizedMorphism, Hypergraph, Subhypergraph, is_closed, restriction_morphism, validate_morphism
from .wagonwheel import is_cycle
from .presentation import InvPresentation, InvWord, PresentationError, parse_inv_word

__all__ = [
    "Picture",
    "PVertex",
    "PEdge",
    "FreeLoop",
    "PictureError",
    "PictureReport",
    "CycleClass",
    "validate",
    "validate_g_labels",
    "validate_h_labels",
    "boundary_word",
    "sign",
    "character",
    "certifies",
    "apply_morphism",
    "delete_free_loops",
    "restrict_to_closed",
    "classify_cycles",
    "wagon_relation_picture",
    "collapse_facial_components",
    "picture_from_drawing",
    "faces",
]


class PictureError(ValueError):
    """A picture is malformed or a precondition on it fails."""

    def __init__(self, message: str, violation: dict | None = None):
        super().__init__(message)
        self.violation = violation or {"message": message}


@dataclass(frozen=True)
class PVertex:
    id: str
    label: str
    rot: tuple[str, ...]


@dataclass(frozen=True)
class PEdge:
    id: str
    label: str
    darts: tuple[str, str]


@dataclass(frozen=True)
class FreeLoop:
    id: str
    label: str
    face: dict | None = None


@dataclass(frozen=True)
class Picture:
    closed: bool
    vertices: tuple[PVertex, ...] = ()
    edges: tuple[PEdge, ...] = ()
    boundary: tuple[str, ...] = ()
    free_loops: tuple[FreeLoop, ...] = ()
    nesting: tuple[dict, ...] = ()

    @property
    def size(self) -> int:
        return len(self.vertices)

    def to_json(self) -> dict:
        return {
            "closed": self.closed,
            "vertices": [{"id": v.id, "label": v.label, "rot": list(v.rot)} for v in self.vertices],
            "edges": [{"id": e.id, "label": e.label, "darts": list(e.darts)} for e in self.edges],
            "boundary": list(self.boundary),
            "free_loops": [{"id": l.id, "label": l.label, "face": l.face} for l in self.free_loops],
            "nesting": [dict(n) for n in self.nesting],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Picture":
        try:
            edges = []
            for e in data.get("edges", []):
                darts = tuple(e["darts"])
                if len(darts) != 2:
                    raise PictureError(f"edge {e['id']!r} has {len(darts)} darts, expected 2",
                                       {"kind": "edge-darts", "edge": e["id"]})
                edges.append(PEdge(str(e["id"]), str(e.get("label", "")), darts))
            return cls(
                closed=bool(data.get("closed", False)),
                vertices=tuple(PVertex(str(v["id"]), str(v.get("label", "")), tuple(v.get("rot", [])))
                               for v in data.get("vertices", [])),
                edges=tuple(edges),
                boundary=tuple(data.get("boundary", [])),
                free_loops=tuple(FreeLoop(str(l["id"]), str(l.get("label", "")), l.get("face"))
                                 for l in data.get("free_loops", [])),
                nesting=tuple(dict(n) for n in data.get("nesting", [])),
            )
        except KeyError as exc:
            raise PictureError(f"picture JSON is missing field {exc.args[0]!r}") from None

    def edge_by_dart(self) -> dict[str, PEdge]:
        return {d: e for e in self.edges for d in e.darts}


# ---------------------------------------------------------------------------
# face tracing


def _trace(rot: Mapping, twin: Mapping) -> list[list]:
    """Orbits of ``x -> sigma(twin(x))``; the sector before ``x`` lies in the orbit of ``x``."""
    pos = {}
    for node, darts in rot.items():
        for i, d in enumerate(darts):
            pos[d] = (node, i)
    seen: set = set()
    orbits = []
    for darts in rot.values():
        for d in darts:
            if d in seen:
                continue
            orbit, x = [], d
            while x not in seen:
                seen.add(x)
                orbit.append(x)
                node, i = pos[twin[x]]
                ring = rot[node]
                x = ring[(i + 1) % len(ring)]
            orbits.append(orbit)
    return orbits


class _UnionFind:
    def __init__(self, items: Iterable = ()):
        self.parent = {x: x for x in items}

    def add(self, x) -> None:
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


BOUNDARY = ("bd",)


class _Map:
    """Mutable rotation system with ghost edges.  Nodes are tuples tagged by
    kind; ``kind`` tracks vertices, the boundary, loop nodes and temporary
    hub/chord nodes."""

    def __init__(self, closed: bool):
        self.closed = closed
        self.rot: dict[tuple, list] = {}
        self.kind: dict[tuple, str] = {}
        self.label: dict[tuple, str] = {}
        self.node_of: dict = {}
        self.twin: dict = {}
        self.edge_of: dict = {}
        self.edges: dict = {}  # key -> {"id", "label", "kind": real|loop|ghost, "darts": [d0, d1]}
        self.loop_darts: dict[tuple, list] = {}  # loop node -> [l1, l2]
        self.order: list[tuple] = []  # vertex and loop nodes in output order
        self.root_pref: list[tuple] = []
        self._fresh = count()

    # -- construction ------------------------------------------------------
    def add_node(self, node: tuple, kind: str, label: str = "") -> None:
        self.rot[node] = []
        self.kind[node] = kind
        self.label[node] = label
        if kind in ("vertex", "loop"):
            self.order.append(node)

    def place(self, node: tuple, dart, before=None) -> None:
        ring = self.rot[node]
        if before is None:
            ring.append(dart)
        else:
            ring.insert(ring.index(before), dart)
        self.node_of[dart] = node

    def link(self, key, d0, d1, kind: str, ident: str = "", label: str = "") -> None:
        self.twin[d0], self.twin[d1] = d1, d0
        self.edge_of[d0] = self.edge_of[d1] = key
        self.edges[key] = {"id": ident, "label": label, "kind": kind, "darts": [d0, d1]}

    def add_ghost(self, at0: tuple[tuple, object], at1: tuple[tuple, object]) -> tuple:
        n = next(self._fresh)
        key = ("g", n)
        d0, d1 = ("g", n, 0), ("g", n, 1)
        self.place(at0[0], d0, at0[1])
        self.place(at1[0], d1, at1[1])
        self.link(key, d0, d1, "ghost")
        return key

    def add_loop(self, ident: str, label: str) -> tuple:
        node = ("loop", ident)
        self.add_node(node, "loop", label)
        l1, l2 = ("l", ident, 0), ("l", ident, 1)
        self.place(node, l1)
        self.place(node, l2)
        self.link(("l", ident), l1, l2, "loop", ident, label)
        self.loop_darts[node] = [l1, l2]
        return node

    # -- queries -------------------------------------------------------------
    def is_ghost(self, d) -> bool:
        return self.edges[self.edge_of[d]]["kind"] == "ghost"

    def real_darts(self, node: tuple) -> list:
        return [d for d in self.rot[node] if not self.is_ghost(d)]

    def real_components(self) -> _UnionFind:
        uf = _UnionFind(self.rot)
        for e in self.edges.values():
            if e["kind"] != "ghost":
                d0, d1 = e["darts"]
                uf.union(self.node_of[d0], self.node_of[d1])
        return uf

    def faces(self) -> list[list]:
        return _trace(self.rot, self.twin)

    def face_index(self) -> dict:
        out = {}
        for k, orbit in enumerate(self.faces()):
            for d in orbit:
                out[d] = k
        return out

    def sector_anchor(self, node: tuple, dart) -> object | None:
        """First real dart at or after ``dart`` going counter-clockwise."""
        ring = self.rot[node]
        i = ring.index(dart)
        for k in range(len(ring)):
            d = ring[(i + k) % len(ring)]
            if not self.is_ghost(d):
                return d
        return None

    # -- surgery -----------------------------------------------------------
    def remove_edge(self, key) -> None:
        e = self.edges.pop(key)
        for d in e["darts"]:
            self.rot[self.node_of[d]].remove(d)
            del self.node_of[d], self.twin[d], self.edge_of[d]

    def remove_node(self, node: tuple) -> None:
        assert not self.rot[node], node
        del self.rot[node], self.kind[node], self.label[node]
        self.loop_darts.pop(node, None)
        if node in self.order:
            self.order.remove(node)

    def ghostify(self, key) -> None:
        e = self.edges[key]
        e["kind"] = "ghost"
        node = self.node_of[e["darts"][0]]
        if self.kind.get(node) == "loop":
            self.kind[node] = "hub"
            self.loop_darts.pop(node, None)
            self.order.remove(node)

    def delete_vertex(self, node: tuple, rank: Mapping) -> None:
        """Remove ``node``, joining its real darts in non-crossing pairs."""
        ring = self.rot[node]
        real = [d for d in ring if not self.is_ghost(d)]
        self.order.remove(node)
        if not real:
            self.kind[node] = "hub"
            return
        if len(real) % 2:
            raise PictureError(f"cannot delete a vertex with {len(real)} surviving edges")
        lowest = real.index(min(real, key=lambda d: rank[d]))
        start = (lowest + 1) % len(real)
        order = real[start:] + real[:start]
        i0 = ring.index(order[0])
        full = ring[i0:] + ring[:i0]
        pos = {d: full.index(d) for d in order}
        hub = ("hub", next(self._fresh))
        self.add_node(hub, "hub")
        chords = []
        hub_ring: list = []
        for k in range(0, len(order), 2):
            r1, r2 = order[k], order[k + 1]
            gap = full[pos[r1] + 1:pos[r2]]
            end = pos[order[k + 2]] if k + 2 < len(order) else len(full)
            main = full[pos[r2] + 1:end]
            chord = ("chord", next(self._fresh))
            self.add_node(chord, "chord")
            for d in (r1, *gap, r2):
                self.place(chord, d)
            n = next(self._fresh)
            key = ("g", n)
            to_hub, to_chord = ("g", n, 0), ("g", n, 1)
            self.place(chord, to_chord)
            self.link(key, to_hub, to_chord, "ghost")
            hub_ring.append(to_hub)
            hub_ring += main
            chords.append(chord)
        for d in hub_ring:
            self.node_of[d] = hub
        self.rot[hub] = hub_ring
        self.rot[node] = []
        self.remove_node(node)
        for chord in chords:
            self._smooth(chord)

    def _smooth(self, chord: tuple) -> None:
        ring = self.rot[chord]
        r1, r2 = [d for d in ring if not self.is_ghost(d)]
        i1, i2 = ring.index(r1), ring.index(r2)
        if i2 < i1:
            r1, r2, i1, i2 = r2, r1, i2, i1
            ring = ring[i1:] + ring[:i1]
            i1, i2 = 0, ring.index(r2)
        inside = ring[i1 + 1:i2]
        outside = ring[i2 + 1:] + ring[:i1]
        e1, e2 = self.edge_of[r1], self.edge_of[r2]
        if e1 == e2:
            info = self.edges[e1]
            ident = self._loop_id(info["id"])
            self.kind[chord] = "loop"
            self.label[chord] = info["label"]
            info.update(kind="loop", id=ident)
            self.rot[chord] = [r1, *inside, r2, *outside]
            self.loop_darts[chord] = [r1, r2]
            self.order.append(chord)
            return
        a, c = self.twin[r1], self.twin[r2]
        target = self.node_of[c]
        info = self.edges[e1]
        info["darts"] = [c if d == r1 else d for d in info["darts"]]
        del self.edges[e2]
        for d in (r1, r2):
            del self.node_of[d], self.twin[d], self.edge_of[d]
        self.twin[a], self.twin[c] = c, a
        self.edge_of[c] = e1
        self.rot[chord] = []
        self.remove_node(chord)
        tring = self.rot[target]
        at = tring.index(c)
        tring[at:at + 1] = [*outside, c, *inside]
        for d in (*outside, *inside):
            self.node_of[d] = target

    def _loop_id(self, ident: str) -> str:
        taken = {self.label_id(n) for n in self.order}
        if ident not in taken:
            return ident
        k = 1
        while f"{ident}~{k}" in taken:
            k += 1
        return f"{ident}~{k}"

    def label_id(self, node: tuple) -> str:
        if self.kind[node] == "loop":
            return self.edges[self.edge_of[self.loop_darts[node][0]]]["id"]
        return node[1]

    # -- normal form ---------------------------------------------------------
    def root(self) -> tuple | None:
        if BOUNDARY in self.rot:
            return BOUNDARY
        for node in self.root_pref + self.order:
            if node in self.rot and self.kind[node] in ("vertex", "loop"):
                return node
        return None

    def normalize(self) -> None:
        uf = self.real_components()
        for key in [k for k, e in self.edges.items() if e["kind"] == "ghost"]:
            d0, d1 = self.edges[key]["darts"]
            if not uf.union(self.node_of[d0], self.node_of[d1]):
                self.remove_edge(key)
        while True:
            hubs = [n for n, k in self.kind.items() if k == "hub"]
            if not hubs:
                break
            toward_root = self._parents()
            for hub in hubs:
                ring = self.rot[hub]
                if len(ring) == 0:
                    self.remove_node(hub)
                elif len(ring) == 1:
                    self.remove_edge(self.edge_of[ring[0]])
                    self.remove_node(hub)
                else:
                    g0 = toward_root.get(hub)
                    if g0 is None or g0 not in ring:
                        g0 = ring[0]
                    self._contract(hub, g0)
                break

    def _parents(self) -> dict:
        root = self.root()
        if root is None:
            return {}
        parent, frontier = {root: None}, [root]
        while frontier:
            nxt = []
            for node in frontier:
                for d in self.rot[node]:
                    other = self.node_of[self.twin[d]]
                    if other not in parent:
                        parent[other] = self.twin[d]
                        nxt.append(other)
            frontier = nxt
        return {n: d for n, d in parent.items() if d is not None}

    def _contract(self, hub: tuple, g0) -> None:
        ring = self.rot[hub]
        i = ring.index(g0)
        rest = ring[i + 1:] + ring[:i]
        t0 = self.twin[g0]
        w = self.node_of[t0]
        wring = self.rot[w]
        at = wring.index(t0)
        wring[at:at + 1] = [t0]  # placeholder kept until the edge is removed
        wring[at + 1:at + 1] = rest
        for d in rest:
            self.node_of[d] = w
        self.rot[hub] = [g0]
        self.remove_edge(self.edge_of[g0])
        self.remove_node(hub)

    # -- export ----------------------------------------------------------------
    def faceref(self, node: tuple, dart, flipped: Mapping[tuple, bool]) -> dict:
        anchor = self.sector_anchor(node, dart)
        kind = self.kind[node]
        if kind == "loop":
            l1, l2 = self.loop_darts[node]
            side = "in" if anchor == l2 else "out"
            if flipped.get(node):
                side = "out" if side == "in" else "in"
            return {"loop": self.label_id(node), "side": side}
        if anchor is None:
            return {"boundary": True} if kind == "boundary" else {"vertex": node[1]}
        return {"dart": anchor}

    def to_picture(self) -> Picture:
        self.normalize()
        root = self.root()
        uf = self.real_components()
        flipped: dict[tuple, bool] = {}
        hosts: dict[tuple, tuple] = {}  # child node -> (parent node, parent dart, child dart)
        if root is not None:
            seen_comp = {uf.find(root)}
            frontier = [root]
            visited = {root}
            while frontier:
                nxt = []
                for node in frontier:
                    for d in self.rot[node]:
                        other_d = self.twin[d]
                        other = self.node_of[other_d]
                        if other in visited:
                            continue
                        visited.add(other)
                        nxt.append(other)
                        comp = uf.find(other)
                        if self.is_ghost(d) and comp not in seen_comp:
                            seen_comp.add(comp)
                            hosts[other] = (node, d, other_d)
                            if self.kind[other] == "loop":
                                l1, l2 = self.loop_darts[other]
                                flipped[other] = self.sector_anchor(other, other_d) == l2
                frontier = nxt
        vertices, loops, nesting = [], [], []
        for node in self.order:
            if self.kind[node] == "vertex":
                vertices.append(PVertex(node[1], self.label[node],
                                        tuple(self.real_darts(node))))
        loop_faces = {}
        for child, (parent, pd, cd) in hosts.items():
            host = self.faceref(parent, pd, flipped)
            if self.kind[child] == "loop":
                loop_faces[child] = host
            else:
                entry = {"component": child[1], "host": host}
                if self.real_darts(child):
                    entry["outer"] = self.faceref(child, cd, flipped)
                nesting.append(entry)
        for node in self.order:
            if self.kind[node] == "loop":
                loops.append(FreeLoop(self.label_id(node), self.label[node], loop_faces.get(node)))
        edges = [PEdge(e["id"], e["label"], tuple(e["darts"]))
                 for e in self.edges.values() if e["kind"] == "real"]
        boundary = tuple(reversed(self.real_darts(BOUNDARY))) if BOUNDARY in self.rot else ()
        nesting.sort(key=lambda n: [v.id for v in vertices].index(n["component"]))
        return Picture(self.closed, tuple(vertices), tuple(edges), boundary, tuple(loops), tuple(nesting))

# ---------------------------------------------------------------------------
# import and validation


@dataclass
class PictureReport:
    ok: bool
    violations: list[dict] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    @property
    def first(self) -> dict | None:
        return self.violations[0] if self.violations else None

    def as_dict(self) -> dict:
        return {"ok": self.ok, "violations": self.violations}


def _euler_violations(rot: Mapping, twin: Mapping, node_of: Mapping, names: Mapping) -> list[dict]:
    uf = _UnionFind(rot)
    for d, t in twin.items():
        uf.union(node_of[d], node_of[t])
    nodes: Counter = Counter(uf.find(n) for n in rot)
    edges: Counter = Counter(uf.find(node_of[d]) for d in twin)
    faces: Counter = Counter()
    for orbit in _trace(rot, twin):
        faces[uf.find(node_of[orbit[0]])] += 1
    for n, darts in rot.items():
        if not darts:
            faces[uf.find(n)] += 1
    out = []
    for comp, v in nodes.items():
        e = edges[comp] // 2
        f = faces[comp]
        if v - e + f != 2:
            out.append({"kind": "euler", "component": names.get(comp, str(comp)),
                        "message": f"component {names.get(comp, comp)} has V-E+F = {v}-{e}+{f} = {v - e + f}, expected 2"})
    return out


def _build(P: Picture) -> tuple[_Map, list[dict]]:
    """Build the internal map.  Returns the map (possibly partial) and violations."""
    m = _Map(P.closed)
    bad: list[dict] = []
    ids = Counter([v.id for v in P.vertices] + [l.id for l in P.free_loops])
    for ident, k in ids.items():
        if k > 1:
            bad.append({"kind": "duplicate-id", "id": ident,
                        "message": f"vertex/loop id {ident!r} is used {k} times"})
    eids = Counter(e.id for e in P.edges)
    for ident, k in eids.items():
        if k > 1:
            bad.append({"kind": "duplicate-id", "id": ident, "message": f"edge id {ident!r} is used {k} times"})
    if P.closed and P.boundary:
        bad.append({"kind": "closed-boundary", "message": "a closed picture cannot have boundary darts"})
    owner: dict = {}
    for e in P.edges:
        if e.darts[0] == e.darts[1]:
            bad.append({"kind": "edge-darts", "edge": e.id, "message": f"edge {e.id!r} repeats its dart"})
        for d in e.darts:
            if d in owner:
                bad.append({"kind": "dart-reuse", "dart": d,
                            "message": f"dart {d!r} belongs to edges {owner[d]!r} and {e.id!r}"})
            owner[d] = e.id
    placed: dict = {}
    for v in P.vertices:
        node = ("v", v.id)
        m.add_node(node, "vertex", v.label)
        for d in v.rot:
            if d in placed:
                bad.append({"kind": "dart-reuse", "dart": d, "message": f"dart {d!r} occurs twice in rotations"})
                continue
            placed[d] = node
            m.place(node, d)
    if not P.closed:
        m.add_node(BOUNDARY, "boundary")
        for d in reversed(P.boundary):
            if d in placed:
                bad.append({"kind": "dart-reuse", "dart": d, "message": f"dart {d!r} occurs twice"})
                continue
            placed[d] = BOUNDARY
            m.place(BOUNDARY, d)
    for d in placed:
        if d not in owner:
            bad.append({"kind": "orphan-dart", "dart": d, "message": f"dart {d!r} belongs to no edge"})
    for d, e in owner.items():
        if d not in placed:
            bad.append({"kind": "orphan-dart", "dart": d, "message": f"dart {d!r} of edge {e!r} is not placed"})
    for l in P.free_loops:
        m.add_loop(l.id, l.label)
    if bad:
        return m, bad
    for e in P.edges:
        m.link(("e", e.id), e.darts[0], e.darts[1], "real", e.id, e.label)

    names = {}
    for node in m.rot:
        names.setdefault(node, node[1] if len(node) > 1 else "boundary")
    uf0 = m.real_components()
    comp_names = {}
    for node in m.rot:
        comp_names.setdefault(uf0.find(node), names[node])
    bad += _euler_violations({n: list(r) for n, r in m.rot.items()}, m.twin, m.node_of,
                             {c: comp_names[c] for c in comp_names})
    if bad:
        return m, bad

    def resolve(ref, role: str) -> tuple[tuple, object] | None:
        if not isinstance(ref, Mapping):
            bad.append({"kind": "faceref", "message": f"{role}: malformed face reference {ref!r}"})
            return None
        if "dart" in ref:
            d = ref["dart"]
            if d not in m.node_of:
                bad.append({"kind": "faceref", "message": f"{role}: unknown dart {d!r}"})
                return None
            return m.node_of[d], d
        if "vertex" in ref:
            node = ("v", ref["vertex"])
            if node not in m.rot:
                bad.append({"kind": "faceref", "message": f"{role}: unknown vertex {ref['vertex']!r}"})
                return None
            real = m.real_darts(node)
            return node, real[0] if real else None
        if "boundary" in ref:
            if BOUNDARY not in m.rot:
                bad.append({"kind": "faceref", "message": f"{role}: closed pictures have no boundary"})
                return None
            real = m.real_darts(BOUNDARY)
            return BOUNDARY, real[0] if real else None
        if "loop" in ref:
            node = ("loop", ref["loop"])
            if node not in m.loop_darts:
                bad.append({"kind": "faceref", "message": f"{role}: unknown loop {ref['loop']!r}"})
                return None
            side = ref.get("side", "out")
            if side not in ("in", "out"):
                bad.append({"kind": "faceref", "message": f"{role}: loop side must be 'in' or 'out'"})
                return None
            l1, l2 = m.loop_darts[node]
            return node, l2 if side == "in" else l1
        bad.append({"kind": "faceref", "message": f"{role}: malformed face reference {ref!r}"})
        return None

    requests = []  # (child node, child anchor, host ref, description)
    for entry in P.nesting:
        ident = entry.get("component")
        node = ("v", ident) if ("v", ident) in m.rot else ("loop", ident)
        if node not in m.rot:
            bad.append({"kind": "nesting", "message": f"nesting names unknown component {ident!r}"})
            continue
        if node[0] == "loop":
            bad.append({"kind": "nesting", "message": f"loop {ident!r} is placed by its 'face' field"})
            continue
        if "outer" in entry:
            at = resolve(entry["outer"], f"outer of {ident}")
            if at is None:
                continue
        else:
            real = m.real_darts(node)
            at = (node, real[0] if real else None)
        requests.append((at, entry.get("host"), f"component {ident}"))
    for l in P.free_loops:
        if l.face is not None:
            node = ("loop", l.id)
            requests.append(((node, m.loop_darts[node][0]), l.face, f"loop {l.id}"))
    uf = m.real_components()
    real = m.real_components()  # stays fixed while uf absorbs nesting links
    hosted: set = set()
    for (cnode, canchor), host_ref, what in requests:
        host = resolve(host_ref, f"host of {what}")
        if host is None:
            continue
        ccomp = uf.find(cnode)
        if ccomp in hosted:
            bad.append({"kind": "nesting", "message": f"{what}: its component already has a host"})
            continue
        if host[0] in m.rot and real.find(host[0]) == real.find(cnode):
            bad.append({"kind": "nesting", "message": f"{what}: hosted inside itself"})
            continue
        hosted.add(ccomp)
        if not uf.union(host[0], cnode):
            bad.append({"kind": "nesting", "message": f"{what}: nesting forms a cycle"})
            continue
        m.add_ghost((host[0], host[1]), (cnode, canchor))
    if bad:
        return m, bad
    base = m.real_components()
    roots = {base.find(n) for n in m.rot} - hosted
    if BOUNDARY in m.rot:
        stray = roots - {base.find(BOUNDARY)}
    else:
        stray = set(sorted(roots, key=lambda c: _first_node_index(m, base, c))[1:])
    for comp in sorted(stray, key=lambda c: _first_node_index(m, base, c)):
        bad.append({"kind": "nesting", "component": comp_names.get(comp),
                    "message": f"component {comp_names.get(comp)} has no host face"})
    if P.closed and roots:
        first = min(roots, key=lambda c: _first_node_index(m, base, c))
        m.root_pref = [n for n in m.order if base.find(n) == first][:1]
    return m, bad


def _first_node_index(m: _Map, uf: _UnionFind, comp) -> int:
    for k, node in enumerate(m.order):
        if uf.find(node) == comp:
            return k
    return -1


def _map_of(P: Picture) -> _Map:
    m, bad = _build(P)
    if bad:
        raise PictureError(bad[0]["message"], bad[0])
    return m


def validate(P: Picture) -> PictureReport:
    """Dart consistency, genus-0 check per component, and nesting consistency."""
    _, bad = _build(P)
    return PictureReport(not bad, bad)


def faces(P: Picture) -> list[list]:
    """Face orbits of the picture with nesting ghosts included."""
    return _map_of(P).faces()


# ---------------------------------------------------------------------------
# labels


def _dart_labels(P: Picture) -> dict[str, str]:
    return {d: e.label for e in P.edges for d in e.darts}


def _cyclic_equal(a: Sequence, b: Sequence) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    doubled = list(a) + list(a)
    n = len(a)
    return any(doubled[k:k + n] == list(b) for k in range(n))


def _relation_of(label: str, P: InvPresentation) -> InvWord | None:
    try:
        w = InvWord(0, ()) if label.strip() == "1" else parse_inv_word(label, P.generators)
    except PresentationError:
        return None
    return w if w in P.relations else None


def validate_g_labels(P: Picture, presentation: InvPresentation) -> PictureReport:
    """Every vertex reads (counter-clockwise, any start, either direction) its relation."""
    report = validate(P)
    if not report.ok:
        return report
    bad = []
    gens = set(presentation.generators)
    for e in P.edges:
        if e.label not in gens:
            bad.append({"kind": "label", "edge": e.id, "message": f"edge {e.id!r} label {e.label!r} is not a generator"})
    for l in P.free_loops:
        if l.label not in gens:
            bad.append({"kind": "label", "loop": l.id, "message": f"loop {l.id!r} label {l.label!r} is not a generator"})
    labels = _dart_labels(P)
    for v in P.vertices:
        r = _relation_of(v.label, presentation)
        if r is None:
            bad.append({"kind": "label", "vertex": v.id, "message": f"vertex {v.id!r} label {v.label!r} is not a relation"})
            continue
        word = [labels[d] for d in v.rot]
        if not (_cyclic_equal(word, r.letters) or _cyclic_equal(word[::-1], r.letters)):
            bad.append({"kind": "label", "vertex": v.id,
                        "message": f"vertex {v.id!r} reads {' '.join(word) or '1'}, not a rotation or "
                                   f"reversal of {' '.join(r.letters) or '1'}"})
    return PictureReport(not bad, bad)


def validate_h_labels(P: Picture, H: Hypergraph) -> PictureReport:
    """Each picture vertex labelled ``v`` meets exactly ``A[v, e]`` darts labelled ``e``."""
    report = validate(P)
    if not report.ok:
        return report
    bad = []
    for e in P.edges:
        if not H.has_edge(e.label):
            bad.append({"kind": "label", "edge": e.id, "message": f"edge {e.id!r} label {e.label!r} is not a hypergraph edge"})
    for l in P.free_loops:
        if not H.has_edge(l.label):
            bad.append({"kind": "label", "loop": l.id, "message": f"loop {l.id!r} label {l.label!r} is not a hypergraph edge"})
    labels = _dart_labels(P)
    for v in P.vertices:
        if not H.has_vertex(v.label):
            bad.append({"kind": "label", "vertex": v.id, "message": f"vertex {v.id!r} label {v.label!r} is not a hypergraph vertex"})
            continue
        seen = Counter(labels[d] for d in v.rot)
        want = Counter(H.edges_at(v.label))
        if seen != want:
            bad.append({"kind": "label", "vertex": v.id,
                        "message": f"vertex {v.id!r} meets {dict(seen)} but {v.label!r} has incidences {dict(want)}"})
    return PictureReport(not bad, bad)


def boundary_word(P: Picture) -> tuple[str, ...]:
    """Edge labels met counter-clockwise around the boundary."""
    labels = _dart_labels(P)
    return tuple(labels[d] for d in P.boundary)


def sign(P: Picture, presentation: InvPresentation) -> int:
    total = 0
    for v in P.vertices:
        r = _relation_of(v.label, presentation)
        if r is None:
            raise PictureError(f"vertex {v.id!r} label {v.label!r} is not a relation")
        total += r.parity
    return total % 2


def character(P: Picture, H: Hypergraph) -> dict[str, int]:
    counts = Counter(v.label for v in P.vertices)
    return {v: counts[v] % 2 for v in H.vertices}


def certifies(P: Picture, word: InvWord, context: InvPresentation | Hypergraph,
              b: Mapping[str, int] | None = None) -> bool:
    """Does ``P`` prove ``word = 1`` (word carries its J-parity)?"""
    if isinstance(context, InvPresentation):
        report = validate_g_labels(P, context)
        if not report.ok:
            raise PictureError(report.first["message"], report.first)
        parity = sign(P, context)
    else:
        report = validate_h_labels(P, context)
        if not report.ok:
            raise PictureError(report.first["message"], report.first)
        ch = character(P, context)
        b = b or {}
        parity = sum(ch[v] * int(b.get(v, 0)) for v in context.vertices) % 2
    return _cyclic_equal(boundary_word(P), word.letters) and parity == word.parity


# ---------------------------------------------------------------------------
# morphisms


def _dart_rank(P: Picture) -> dict:
    rank = {}
    for e in P.edges:
        for d in e.darts:
            rank[d] = len(rank)
    return rank


def apply_morphism(phi: GeneralizedMorphism, P: Picture) -> Picture:
    """Delete edges sent to EPS, relabel, delete vertices sent to EPS joining
    their remaining edges in non-crossing pairs, relabel vertices."""
    report = validate_morphism(phi)
    if not report.ok:
        raise PictureError(f"not a generalized morphism: {report.first}")
    hp = validate_h_labels(P, phi.source)
    if not hp.ok:
        raise PictureError(hp.first["message"], hp.first)
    m = _map_of(P)
    rank = _dart_rank(P)
    for key, e in list(m.edges.items()):
        if e["kind"] == "ghost":
            continue
        image = phi.emap[e["label"]]
        if image is EPS:
            m.ghostify(key)
        else:
            e["label"] = image
            if e["kind"] == "loop":
                m.label[m.node_of[e["darts"][0]]] = image
    for node in [n for n in m.order if m.kind[n] == "vertex"]:
        if phi.vmap[m.label[node]] is EPS:
            labels = {m.edges[m.edge_of[d]]["label"] for d in m.real_darts(node)}
            if len(labels) > 1:
                raise PictureError(f"vertex {node[1]!r} is deleted but its edges map to {sorted(labels)}")
            m.delete_vertex(node, rank)
        else:
            m.label[node] = phi.vmap[m.label[node]]
    return m.to_picture()


def delete_free_loops(P: Picture) -> Picture:
    m = _map_of(P)
    for key, e in list(m.edges.items()):
        if e["kind"] == "loop":
            m.ghostify(key)
    return m.to_picture()


def restrict_to_closed(P: Picture, H: Hypergraph, sub: Subhypergraph) -> Picture:
    """``P[sub]``: apply the restriction morphism onto a closed subhypergraph."""
    if not is_closed(sub):
        raise PictureError("restriction needs a closed subhypergraph")
    out = apply_morphism(restriction_morphism(H, sub), P)
    if is_cycle(sub) and not set(boundary_word(P)) & set(sub.edges):
        for comp in _components(out):
            if comp.loop is None and not comp.is_cycle:
                raise PictureError(f"restriction to a cycle left a non-cycle component at {comp.vertices[0]!r}")
    return out


# ---------------------------------------------------------------------------
# cycles in pictures


@dataclass(frozen=True)
class CycleClass:
    vertices: tuple[str, ...]
    edges: tuple[str, ...]
    loop: str | None
    is_cycle: bool
    facial: bool
    cover: bool
    copy: bool

    def as_dict(self) -> dict:
        return {"vertices": list(self.vertices), "edges": list(self.edges), "loop": self.loop,
                "cycle": self.is_cycle, "facial": self.facial, "cover": self.cover, "copy": self.copy}


def _components(P: Picture) -> list[CycleClass]:
    """Free loops, then connected vertex components, with only ``is_cycle`` filled in."""
    out = [CycleClass((), (), l.id, True, False, False, False) for l in P.free_loops]
    owner = {d: v.id for v in P.vertices for d in v.rot}
    uf = _UnionFind(v.id for v in P.vertices)
    for e in P.edges:
        ends = [owner.get(d) for d in e.darts]
        if None not in ends:
            uf.union(*ends)
    groups: dict[str, list[PVertex]] = {}
    for v in P.vertices:
        groups.setdefault(uf.find(v.id), []).append(v)
    edges_of: dict[str, list[str]] = {}
    for e in P.edges:
        root = next((uf.find(owner[d]) for d in e.darts if d in owner), None)
        if root is not None:
            edges_of.setdefault(root, []).append(e.id)
    twin = _twin_map(P)
    for root, members in groups.items():
        cycle = all(len(v.rot) == 2 for v in members) and all(twin[d] in owner for v in members for d in v.rot)
        out.append(CycleClass(tuple(v.id for v in members), tuple(edges_of.get(root, [])),
                              None, cycle, False, False, False))
    return out


def _twin_map(P: Picture) -> dict[str, str]:
    return {d: e.darts[1 - i] for e in P.edges for i, d in enumerate(e.darts)}


def classify_cycles(P: Picture, H: Hypergraph, C: Subhypergraph) -> list[CycleClass]:
    """Components of ``P[C]`` flagged facial / cover / copy.

    A component is facial when one face of ``P`` (nesting included) is
    bounded by exactly its edges, each met once.
    """
    restricted = restrict_to_closed(P, H, C)
    full = _map_of(P)
    orbit_of = {d: orbit for orbit in full.faces() for d in orbit}
    labels = {v.id: v.label for v in restricted.vertices}
    dart_of = {e.id: e.darts for e in restricted.edges}
    out = []
    for comp in _components(restricted):
        if comp.loop is not None:
            node = ("loop", comp.loop)
            facial = any(len(orbit_of[d]) == 1 for d in full.loop_darts[node])
            out.append(CycleClass((), (), comp.loop, True, facial, False, False))
            continue
        facial = False
        if comp.is_cycle:
            edges = set(comp.edges)
            for d in dart_of[comp.edges[0]]:
                orbit = orbit_of[d]
                if len(orbit) == len(edges) and all(
                        not full.is_ghost(x) and full.edges[full.edge_of[x]]["id"] in edges for x in orbit) \
                        and len({full.edge_of[x] for x in orbit}) == len(edges):
                    facial = True
        names = [labels[v] for v in comp.vertices]
        copy = comp.is_cycle and len(names) == len(C.vertices) and set(names) == set(C.vertices)
        out.append(CycleClass(comp.vertices, comp.edges, None, comp.is_cycle, facial, comp.is_cycle, copy))
    return out


# ---------------------------------------------------------------------------
# wagon wheels


def wagon_relation_picture(W, b: Mapping[str, int] | None, i: int) -> Picture:
    """One picture vertex per wheel vertex, boundary reading the relation.

    Positions increase counter-clockwise; layer 1 is nearest the boundary.
    """
    n = W.n(i)
    ids = {kind: [f"{kind}{j}" for j in range(n)] for kind in "abcds"}

    def dart(kind: str, j: int, end: int) -> str:
        return f"{ids[kind][j % n]}:{end}"

    vertices = []
    for j in range(n):
        vertices.append(PVertex(f"p{j}.1", W.v(i, j, 1), (dart("s", j, 0), dart("b", j, 0), dart("a", j, 1))))
        vertices.append(PVertex(f"p{j}.2", W.v(i, j, 2), (dart("a", j + 1, 0), dart("c", j, 0), dart("b", j, 1))))
        vertices.append(PVertex(f"p{j}.3", W.v(i, j, 3), (dart("c", j, 1), dart("d", j + 1, 0), dart("d", j, 1))))
    edges = []
    for j in range(n):
        for kind in "abcd":
            edges.append(PEdge(ids[kind][j], W.e(kind, i, j), (dart(kind, j, 0), dart(kind, j, 1))))
        edges.append(PEdge(ids["s"][j], W.letter(i, j), (dart("s", j, 0), dart("s", j, 1))))
    boundary = tuple(dart("s", j, 1) for j in range(n))
    return Picture(False, tuple(vertices), tuple(edges), boundary)


class CollapseError(PictureError):
    pass


def collapse_facial_components(P: Picture, W, b: Mapping[str, int] | None = None) -> Picture:
    """Shrink every wheel copy of ``P`` to one vertex labelled by its relation."""
    from .wagonwheel import standard_cycles

    H = W.hypergraph
    report = validate_h_labels(P, H)
    if not report.ok:
        raise CollapseError(report.first["message"], report.first)
    S = set(W.source.generators)
    stray = [x for x in boundary_word(P) if x not in S]
    if stray:
        raise CollapseError(f"boundary uses non-generator edge {stray[0]!r}")
    cycles = standard_cycles(W)
    used = {v.label for v in P.vertices} | {e.label for e in P.edges} | {l.label for l in P.free_loops}
    for label, C in zip(cycles.phi_labels(), cycles.phi):
        if used.isdisjoint(C.vertices) and used.isdisjoint(C.edges):
            continue  # P[C] is empty
        for cls in classify_cycles(P, H, C):
            if not (cls.facial and cls.copy):
                name = "".join(str(x) for x in label[:1]) + ",".join(str(x) for x in label[1:])
                raise CollapseError(
                    f"cycle {name} appears in the picture as a component that is not a facial copy "
                    f"(vertices {list(cls.vertices) or cls.loop})",
                    {"kind": "not-facial-copy", "cycle": list(label), "component": cls.as_dict()})

    m = _map_of(P)
    uf = _UnionFind(n for n in m.rot if m.kind[n] == "vertex")
    internal_edges = []
    for key, e in m.edges.items():
        if e["kind"] == "real" and e["label"] not in S:
            d0, d1 = e["darts"]
            uf.union(m.node_of[d0], m.node_of[d1])
            internal_edges.append(key)
    comps: dict = {}
    for node in m.order:
        if m.kind[node] == "vertex":
            comps.setdefault(uf.find(node), []).append(node)
    internal_set = set(internal_edges)
    for nodes in comps.values():
        labels = [m.label[n] for n in nodes]
        wheels = {W.vertex_index[x][0] for x in labels}
        if len(wheels) != 1:
            raise CollapseError(f"component at {nodes[0][1]!r} mixes wheels {sorted(wheels)}")
        i = wheels.pop()
        expected = set(W.wheel_vertices(i))
        if len(labels) != len(expected) or set(labels) != expected:
            raise CollapseError(f"component at {nodes[0][1]!r} is not one copy of wheel {i}")
        rot = {n: [d for d in m.rot[n] if m.edge_of[d] in internal_set] for n in nodes}
        twin = {d: m.twin[d] for ds in rot.values() for d in ds}
        orbits = _trace(rot, twin)
        v_count, e_count = len(nodes), sum(len(ds) for ds in rot.values()) // 2
        if v_count - e_count + len(orbits) != 2 or len(orbits) != W.n(i) + 2:
            raise CollapseError(f"component for wheel {i} is not embedded as a wheel")

        def foreign_before(x):
            ring = m.rot[m.node_of[x]]
            k = ring.index(x)
            out = []
            for step in range(1, len(ring)):
                y = ring[(k - step) % len(ring)]
                if m.edge_of[y] in internal_set:
                    break
                out.append(y)
            return out[::-1]

        outer = None
        for orbit in orbits:
            foreign = [y for x in orbit for y in foreign_before(x)]
            if foreign:
                if outer is not None:
                    raise CollapseError(f"wheel {i} copy has picture elements inside an inner face")
                outer = (orbit, foreign)
        rim = {W.e(k, i, j) for j in range(W.n(i)) for k in "ab"}
        if outer is None or {m.edges[m.edge_of[x]]["label"] for x in outer[0]} != rim \
                or len(outer[0]) != len(rim):
            raise CollapseError(f"wheel {i} copy does not have its generator edges on the outer rim")
        new_ring = outer[1]
        for key in {m.edge_of[d] for ds in rot.values() for d in ds}:
            for d in m.edges[key]["darts"]:
                del m.node_of[d], m.twin[d], m.edge_of[d]
            del m.edges[key]
        keep = nodes[0]
        for n in nodes:
            m.rot[n] = []
            if n != keep:
                m.remove_node(n)
        m.rot[keep] = list(new_ring)
        for d in new_ring:
            m.node_of[d] = keep
        m.label[keep] = W.source.relations[i].text() or "1"
    return m.to_picture()


# ---------------------------------------------------------------------------
# straight-line drawings


def picture_from_drawing(vertices: Mapping[str, tuple[float, float]],
                         labels: Mapping[str, str],
                         edges: Sequence[tuple],
                         boundary_points: Mapping[str, tuple[float, float]] | None = None,
                         centre: tuple[float, float] = (0.0, 0.0),
                         closed: bool | None = None,
                         free_loops: Sequence[FreeLoop] = (),
                         nesting: Sequence[dict] = ()) -> Picture:
    """Rotation system of a drawing given by coordinates.

    ``edges`` holds ``(id, label, end0, end1)`` or ``(id, label, end0, end1,
    via)`` where ``via`` lists bend points; each end is a vertex id or a
    boundary point id.  Darts are named ``"<edge id>:0"`` and ``"<edge id>:1"``.
    """
    boundary_points = dict(boundary_points or {})
    clash = set(vertices) & set(boundary_points)
    if clash:
        raise PictureError(f"id {sorted(clash)[0]!r} is both a vertex and a boundary point")
    at = {**vertices, **boundary_points}
    around: dict[str, list[tuple[float, str]]] = {v: [] for v in vertices}
    on_boundary: list[tuple[float, str]] = []
    out_edges = []
    for item in edges:
        ident, label, u, w = item[:4]
        via = list(item[4]) if len(item) > 4 else []
        path = [at[u], *via, at[w]]
        for end, node, towards in ((0, u, path[1]), (1, w, path[-2])):
            dart = f"{ident}:{end}"
            if node in vertices:
                x, y = vertices[node]
                around[node].append((math.atan2(towards[1] - y, towards[0] - x), dart))
            else:
                x, y = boundary_points[node]
                on_boundary.append((math.atan2(y - centre[1], x - centre[0]), dart))
        out_edges.append(PEdge(ident, label, (f"{ident}:0", f"{ident}:1")))
    pv = tuple(PVertex(v, labels.get(v, ""), tuple(d for _, d in sorted(around[v])))
               for v in vertices)
    boundary = tuple(d for _, d in sorted(on_boundary))
    if closed is None:
        closed = not boundary_points
    return Picture(closed, pv, tuple(out_edges), boundary, tuple(free_loops), tuple(nesting))
