"""Hypergraphs with incidence multiplicities, their open/closed topology,
generalized morphisms, and solution-group presentations.

A generalized morphism may send vertices and edges to ``EPS`` (deletion).
Throughout, ``EPS`` is ``None`` in Python and ``"eps"`` in JSON.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

__all__ = [
    "EPS",
    "Hypergraph",
    "Subhypergraph",
    "GeneralizedMorphism",
    "MorphismReport",
    "RetractionResult",
    "SolutionGroupPresentation",
    "MorphismError",
    "neighbourhood",
    "closure",
    "is_open",
    "is_closed",
    "validate_morphism",
    "identity_morphism",
    "compose",
    "restriction_morphism",
    "inclusion_morphism",
    "glue",
    "find_retraction",
    "is_identity_on",
    "solution_group_presentation",
    "induced_generator_map",
    "hypergraph_from_json",
    "morphism_from_json",
]

EPS = None
VertexLabelling = dict  # vertex-id -> 0 | 1


class MorphismError(ValueError):
    """Raised when morphisms cannot be combined as requested."""


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """``(V, E, A)`` with ``A`` stored sparsely as ``{(v, e): multiplicity}``."""

    vertices: tuple[str, ...]
    edges: tuple[str, ...]
    incidence: Mapping[tuple[str, str], int] = field(default_factory=dict)

    def __post_init__(self):
        vertices = tuple(str(v) for v in self.vertices)
        edges = tuple(str(e) for e in self.edges)
        if len(set(vertices)) != len(vertices):
            raise ValueError("duplicate vertex id")
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edge id")
        vset, eset = set(vertices), set(edges)
        inc: dict[tuple[str, str], int] = {}
        for (v, e), m in dict(self.incidence).items():
            if v not in vset:
                raise ValueError(f"incidence names undeclared vertex {v!r}")
            if e not in eset:
                raise ValueError(f"incidence names undeclared edge {e!r}")
            m = int(m)
            if m < 0:
                raise ValueError(f"negative multiplicity at ({v!r}, {e!r})")
            if m:
                inc[(v, e)] = m
        by_vertex: dict[str, dict[str, int]] = {v: {} for v in vertices}
        by_edge: dict[str, dict[str, int]] = {e: {} for e in edges}
        vpos = {v: i for i, v in enumerate(vertices)}
        epos = {e: i for i, e in enumerate(edges)}
        for (v, e) in sorted(inc, key=lambda k: (vpos[k[0]], epos[k[1]])):
            by_vertex[v][e] = inc[(v, e)]
        for (v, e) in sorted(inc, key=lambda k: (epos[k[1]], vpos[k[0]])):
            by_edge[e][v] = inc[(v, e)]
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "incidence", inc)
        object.__setattr__(self, "_by_vertex", by_vertex)
        object.__setattr__(self, "_by_edge", by_edge)
        object.__setattr__(self, "_vpos", vpos)
        object.__setattr__(self, "_epos", epos)

    # -- basic queries ----------------------------------------------------
    def A(self, v: str, e: str) -> int:
        return self.incidence.get((v, e), 0)

    def edges_at(self, v: str) -> dict[str, int]:
        """Incident edges of ``v`` with multiplicities, in edge declaration order."""
        return self._by_vertex[v]

    def vertices_of(self, e: str) -> dict[str, int]:
        return self._by_edge[e]

    def degree(self, v: str) -> int:
        return sum(self._by_vertex[v].values())

    def edge_size(self, e: str) -> int:
        return sum(self._by_edge[e].values())

    def has_vertex(self, v) -> bool:
        return v in self._vpos

    def has_edge(self, e) -> bool:
        return e in self._epos

    def vertex_index(self, v: str) -> int:
        return self._vpos[v]

    def edge_index(self, e: str) -> int:
        return self._epos[e]

    def is_simple(self) -> bool:
        return all(m <= 1 for m in self.incidence.values())

    def is_graph(self) -> bool:
        return all(self.edge_size(e) == 2 for e in self.edges)

    def is_regular(self, k: int) -> bool:
        return all(self.degree(v) == k for v in self.vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.vertices == other.vertices and self.edges == other.edges
                and self.incidence == other.incidence)

    def __hash__(self):
        return hash((self.vertices, self.edges, frozenset(self.incidence.items())))

    def __repr__(self) -> str:
        return f"Hypergraph(|V|={len(self.vertices)}, |E|={len(self.edges)})"

    # -- subhypergraphs ---------------------------------------------------
    def sub(self, vertices: Iterable[str] = (), edges: Iterable[str] = ()) -> "Subhypergraph":
        return Subhypergraph(self, frozenset(vertices), frozenset(edges))

    def whole(self) -> "Subhypergraph":
        return self.sub(self.vertices, self.edges)

    # -- JSON -------------------------------------------------------------
    def to_json(self, b: Mapping[str, int] | None = None) -> dict:
        b = b or {}
        return {
            "vertices": [{"id": v, "b": int(b.get(v, 0))} for v in self.vertices],
            "edges": list(self.edges),
            "incidence": [[v, e, m] for v in self.vertices for e, m in self._by_vertex[v].items()],
        }


def hypergraph_from_json(data: Mapping) -> tuple[Hypergraph, dict[str, int]]:
    vertices, labels = [], {}
    for item in data["vertices"]:
        if isinstance(item, str):
            vid, bv = item, 0
        else:
            vid, bv = item["id"], item.get("b", 0)
        if bv not in (0, 1):
            raise ValueError(f"vertex {vid!r} has label {bv!r}, expected 0 or 1")
        vertices.append(vid)
        labels[vid] = int(bv)
    incidence: dict[tuple[str, str], int] = {}
    for v, e, m in data.get("incidence", []):
        incidence[(v, e)] = incidence.get((v, e), 0) + int(m)
    return Hypergraph(tuple(vertices), tuple(data["edges"]), incidence), labels


@dataclass(frozen=True, eq=False)
class Subhypergraph:
    """A subset of ``V(H) | E(H)`` with inherited incidence."""

    parent: Hypergraph
    vertices: frozenset[str]
    edges: frozenset[str]

    def __post_init__(self):
        vs, es = frozenset(self.vertices), frozenset(self.edges)
        for v in vs:
            if not self.parent.has_vertex(v):
                raise ValueError(f"unknown vertex {v!r}")
        for e in es:
            if not self.parent.has_edge(e):
                raise ValueError(f"unknown edge {e!r}")
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", es)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subhypergraph):
            return NotImplemented
        return (self.vertices == other.vertices and self.edges == other.edges
                and (self.parent is other.parent or self.parent == other.parent))

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __or__(self, other: "Subhypergraph") -> "Subhypergraph":
        return Subhypergraph(self.parent, self.vertices | other.vertices, self.edges | other.edges)

    def __and__(self, other: "Subhypergraph") -> "Subhypergraph":
        return Subhypergraph(self.parent, self.vertices & other.vertices, self.edges & other.edges)

    def __contains__(self, x) -> bool:
        return x in self.vertices or x in self.edges

    def ordered_vertices(self) -> list[str]:
        return [v for v in self.parent.vertices if v in self.vertices]

    def ordered_edges(self) -> list[str]:
        return [e for e in self.parent.edges if e in self.edges]

    def as_hypergraph(self) -> Hypergraph:
        vs, es = self.ordered_vertices(), self.ordered_edges()
        inc = {(v, e): m for v in vs for e, m in self.parent.edges_at(v).items() if e in self.edges}
        return Hypergraph(tuple(vs), tuple(es), inc)


def neighbourhood(S: Subhypergraph) -> Subhypergraph:
    extra = {e for v in S.vertices for e in S.parent.edges_at(v)}
    return Subhypergraph(S.parent, S.vertices, S.edges | extra)


def closure(S: Subhypergraph) -> Subhypergraph:
    extra = {v for e in S.edges for v in S.parent.vertices_of(e)}
    return Subhypergraph(S.parent, S.vertices | extra, S.edges)


def is_open(S: Subhypergraph) -> bool:
    return all(e in S.edges for v in S.vertices for e in S.parent.edges_at(v))


def is_closed(S: Subhypergraph) -> bool:
    return all(v in S.vertices for e in S.edges for v in S.parent.vertices_of(e))


# ---------------------------------------------------------------------------
# generalized morphisms


@dataclass(frozen=True, eq=False)
class GeneralizedMorphism:
    source: Hypergraph
    target: Hypergraph
    vmap: Mapping[str, str | None]
    emap: Mapping[str, str | None]

    def __post_init__(self):
        object.__setattr__(self, "vmap", dict(self.vmap))
        object.__setattr__(self, "emap", dict(self.emap))

    def __call__(self, x: str | None) -> str | None:
        if x is EPS:
            return EPS
        if x in self.vmap:
            return self.vmap[x]
        return self.emap[x]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeneralizedMorphism):
            return NotImplemented
        return (self.vmap == other.vmap and self.emap == other.emap
                and self.source == other.source and self.target == other.target)

    def to_json(self) -> dict:
        enc = lambda x: "eps" if x is EPS else x  # noqa: E731
        return {
            "vmap": {v: enc(self.vmap[v]) for v in self.source.vertices if v in self.vmap},
            "emap": {e: enc(self.emap[e]) for e in self.source.edges if e in self.emap},
        }


def morphism_from_json(data: Mapping, source: Hypergraph, target: Hypergraph) -> GeneralizedMorphism:
    dec = lambda x: EPS if x in ("eps", None) else x  # noqa: E731
    return GeneralizedMorphism(
        source, target,
        {v: dec(x) for v, x in data.get("vmap", {}).items()},
        {e: dec(x) for e, x in data.get("emap", {}).items()},
    )


@dataclass(frozen=True)
class MorphismReport:
    ok: bool
    violations: tuple[dict, ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    @property
    def first(self) -> dict | None:
        return self.violations[0] if self.violations else None

    def as_dict(self) -> dict:
        return {"ok": self.ok, "violations": list(self.violations)}


def _vertex_violation(phi: GeneralizedMorphism, v: str) -> dict | None:
    """The first failure of the morphism conditions at vertex ``v``, if any."""
    H1, H2 = phi.source, phi.target
    w = phi.vmap[v]
    if w is not EPS:
        sums: Counter = Counter()
        for e, m in H1.edges_at(v).items():
            image = phi.emap[e]
            if image is not EPS:
                sums[image] += m
        for e2 in H2.edges:
            want = H2.A(w, e2)
            if sums.get(e2, 0) != want:
                return {"condition": 1, "vertex": v, "edge": e2, "image": w,
                        "preimage_sum": sums.get(e2, 0), "expected": want}
        return None
    total, images = 0, []
    for e, m in H1.edges_at(v).items():
        image = phi.emap[e]
        if image is not EPS:
            total += m
            if image not in images:
                images.append(image)
    if len(images) > 1:
        return {"condition": 2, "vertex": v, "edge": images[1], "reason": "surviving edges disagree",
                "images": images}
    if total % 2:
        return {"condition": 2, "vertex": v, "edge": images[0] if images else None,
                "reason": "odd surviving degree", "surviving_degree": total}
    return None


def validate_morphism(phi: GeneralizedMorphism, *, all_violations: bool = False) -> MorphismReport:
    """Check both morphism conditions at every source vertex."""
    H1, H2 = phi.source, phi.target
    problems: list[dict] = []
    for v in H1.vertices:
        if v not in phi.vmap:
            problems.append({"condition": "total", "vertex": v, "reason": "vertex not mapped"})
        elif phi.vmap[v] is not EPS and not H2.has_vertex(phi.vmap[v]):
            problems.append({"condition": "total", "vertex": v, "reason": "image not a target vertex"})
    for e in H1.edges:
        if e not in phi.emap:
            problems.append({"condition": "total", "edge": e, "reason": "edge not mapped"})
        elif phi.emap[e] is not EPS and not H2.has_edge(phi.emap[e]):
            problems.append({"condition": "total", "edge": e, "reason": "image not a target edge"})
    if problems:
        return MorphismReport(False, tuple(problems if all_violations else problems[:1]))
    for v in H1.vertices:
        bad = _vertex_violation(phi, v)
        if bad is not None:
            problems.append(bad)
            if not all_violations:
                break
    if not problems:
        # incidence is preserved wherever both ends survive
        for (v, e) in H1.incidence:
            w, f = phi.vmap[v], phi.emap[e]
            assert w is EPS or f is EPS or H2.A(w, f) > 0, (v, e)
    return MorphismReport(not problems, tuple(problems))


def identity_morphism(H: Hypergraph) -> GeneralizedMorphism:
    return GeneralizedMorphism(H, H, {v: v for v in H.vertices}, {e: e for e in H.edges})


def compose(phi2: GeneralizedMorphism, phi1: GeneralizedMorphism) -> GeneralizedMorphism:
    """``phi2 after phi1``, with ``phi2(EPS) = EPS``."""
    if not (phi1.target is phi2.source or phi1.target == phi2.source):
        raise MorphismError("target of the first morphism is not the source of the second")
    return GeneralizedMorphism(
        phi1.source, phi2.target,
        {v: phi2(w) for v, w in phi1.vmap.items()},
        {e: phi2(f) for e, f in phi1.emap.items()},
    )


def restriction_morphism(H: Hypergraph, sub: Subhypergraph) -> GeneralizedMorphism:
    """``x -> x`` on a closed subhypergraph, ``EPS`` elsewhere."""
    if not is_closed(sub):
        bad = next(e for e in sub.ordered_edges()
                   if any(v not in sub.vertices for v in H.vertices_of(e)))
        raise MorphismError(f"subhypergraph is not closed: edge {bad!r} leaves it")
    return GeneralizedMorphism(
        H, sub.as_hypergraph(),
        {v: (v if v in sub.vertices else EPS) for v in H.vertices},
        {e: (e if e in sub.edges else EPS) for e in H.edges},
    )


def inclusion_morphism(sub: Subhypergraph, H: Hypergraph) -> GeneralizedMorphism:
    if not is_open(sub):
        bad = next(v for v in sub.ordered_vertices()
                   if any(e not in sub.edges for e in H.edges_at(v)))
        raise MorphismError(f"subhypergraph is not open: vertex {bad!r} has an outside edge")
    inner = sub.as_hypergraph()
    return GeneralizedMorphism(inner, H, {v: v for v in inner.vertices}, {e: e for e in inner.edges})


def glue(pieces: Sequence[tuple[Subhypergraph, GeneralizedMorphism]]) -> GeneralizedMorphism:
    """Extend morphisms defined on an open cover to the whole hypergraph."""
    if not pieces:
        raise MorphismError("nothing to glue")
    H = pieces[0][0].parent
    target = pieces[0][1].target
    vmap: dict[str, str | None] = {}
    emap: dict[str, str | None] = {}
    owner: dict[str, int] = {}
    for idx, (sub, phi) in enumerate(pieces):
        if not is_open(sub):
            raise MorphismError(f"piece {idx} is not open")
        if phi.target != target:
            raise MorphismError(f"piece {idx} maps to a different target")
        for table, names, kind in ((vmap, sub.vertices, "vertex"), (emap, sub.edges, "edge")):
            source_map = phi.vmap if kind == "vertex" else phi.emap
            for x in names:
                if x not in source_map:
                    raise MorphismError(f"piece {idx} does not map {kind} {x!r}")
                image = source_map[x]
                if x in table and table[x] != image:
                    raise MorphismError(
                        f"pieces {owner[x]} and {idx} disagree on {kind} {x!r}: "
                        f"{table[x]!r} vs {image!r}")
                table[x] = image
                owner.setdefault(x, idx)
    gaps = [v for v in H.vertices if v not in vmap] + [e for e in H.edges if e not in emap]
    if gaps:
        raise MorphismError(f"pieces do not cover {gaps[0]!r}")
    return GeneralizedMorphism(H, target, vmap, emap)


def is_identity_on(phi: GeneralizedMorphism, sub: Subhypergraph) -> bool:
    return (all(phi.vmap.get(v) == v for v in sub.vertices)
            and all(phi.emap.get(e) == e for e in sub.edges))


# ---------------------------------------------------------------------------
# retraction search


@dataclass(frozen=True)
class RetractionResult:
    status: str  # "found" | "none" | "budget-exhausted"
    morphism: GeneralizedMorphism | None = None
    nodes: int = 0

    def __bool__(self) -> bool:
        return self.status == "found"


class _BudgetExhausted(Exception):
    pass


def find_retraction(H: Hypergraph, sub: Subhypergraph, budget: int = 1_000_000) -> RetractionResult:
    """Backtracking search for a morphism ``H -> sub`` fixing ``sub`` pointwise.

    Free vertices are assigned first, in decreasing degree, then free edges.
    Partial preimage sums are pruned against the target incidence; ``EPS`` is
    always the last candidate, so the returned witness is deterministic.
    """
    target = sub.as_hypergraph()
    vmap: dict[str, str | None] = {v: v for v in sub.vertices}
    emap: dict[str, str | None] = {e: e for e in sub.edges}
    free_v = sorted((v for v in H.vertices if v not in sub.vertices),
                    key=lambda v: (-H.degree(v), H.vertex_index(v)))
    vertex_candidates = list(target.vertices) + [EPS]
    nodes = 0

    def tick():
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise _BudgetExhausted

    # Running per-vertex state during the edge phase.
    sums: dict[str, Counter] = {}
    remaining: dict[str, int] = {}
    eps_image: dict[str, list] = {}

    def fixed_edge_ok(v: str, w: str | None) -> bool:
        """Cheap test of a vertex choice against edges whose image is already fixed."""
        if w is not EPS:
            if H.degree(v) < target.degree(w):
                return False
            partial: Counter = Counter()
            for e, m in H.edges_at(v).items():
                if e in emap and emap[e] is not EPS:
                    partial[emap[e]] += m
            return all(target.A(w, f) >= c for f, c in partial.items())
        images = {emap[e] for e in H.edges_at(v) if e in emap and emap[e] is not EPS}
        return len(images) <= 1

    def deficit_ok(v: str) -> bool:
        w = vmap[v]
        if w is EPS:
            return True
        need = sum(target.A(w, f) - sums[v].get(f, 0) for f in target.edges_at(w))
        return need <= remaining[v]

    def assign_vertices(k: int) -> bool:
        if k == len(free_v):
            return start_edges()
        v = free_v[k]
        for w in vertex_candidates:
            tick()
            if not fixed_edge_ok(v, w):
                continue
            vmap[v] = w
            if assign_vertices(k + 1):
                return True
            del vmap[v]
        return False

    free_e: list[str] = []
    domains: dict[str, list] = {}

    def start_edges() -> bool:
        free_e.clear()
        domains.clear()
        order = {v: i for i, v in enumerate(list(sub.ordered_vertices()) + free_v)}
        pending = [e for e in H.edges if e not in sub.edges]
        pending.sort(key=lambda e: (min((order[v] for v in H.vertices_of(e)), default=len(order)),
                                    H.edge_index(e)))
        for e in pending:
            cands = list(target.edges)
            for v in H.vertices_of(e):
                w = vmap[v]
                if w is not EPS:
                    cands = [f for f in cands if target.A(w, f) > 0]
            domains[e] = cands + [EPS]
            free_e.append(e)
        for v in H.vertices:
            sums[v] = Counter()
            remaining[v] = 0
            eps_image[v] = []
            for e, m in H.edges_at(v).items():
                if e in emap:
                    if emap[e] is not EPS:
                        sums[v][emap[e]] += m
                        if emap[e] not in eps_image[v]:
                            eps_image[v].append(emap[e])
                else:
                    remaining[v] += m
            if vmap[v] is not EPS:
                w = vmap[v]
                if any(target.A(w, f) < c for f, c in sums[v].items()):
                    return False
                if not deficit_ok(v):
                    return False
            elif len(eps_image[v]) > 1:
                return False
        ok = assign_edges(0)
        if not ok:
            for e in free_e:
                emap.pop(e, None)
        return ok

    def assign_edges(k: int) -> bool:
        if k == len(free_e):
            return all(vmap[v] is not EPS or sum(sums[v].values()) % 2 == 0 for v in H.vertices)
        e = free_e[k]
        touched = H.vertices_of(e)
        for f in domains[e]:
            tick()
            good = True
            for v, m in touched.items():
                remaining[v] -= m
                if f is not EPS:
                    sums[v][f] += m
            for v in touched:
                w = vmap[v]
                if w is not EPS:
                    if f is not EPS and sums[v][f] > target.A(w, f):
                        good = False
                    elif not deficit_ok(v):
                        good = False
                elif len(sums[v]) > 1:
                    good = False
                elif remaining[v] == 0 and sum(sums[v].values()) % 2:
                    good = False
                if not good:
                    break
            if good:
                emap[e] = f
                if assign_edges(k + 1):
                    return True
                del emap[e]
            for v, m in touched.items():
                remaining[v] += m
                if f is not EPS:
                    sums[v][f] -= m
                    if sums[v][f] == 0:
                        del sums[v][f]
        return False

    try:
        found = assign_vertices(0)
    except _BudgetExhausted:
        return RetractionResult("budget-exhausted", None, nodes)
    if not found:
        return RetractionResult("none", None, nodes)
    phi = GeneralizedMorphism(H, target, dict(vmap), dict(emap))
    assert validate_morphism(phi).ok and is_identity_on(phi, sub)
    return RetractionResult("found", phi, nodes)


# ---------------------------------------------------------------------------
# solution groups


@dataclass(frozen=True)
class SolutionGroupPresentation:
    """Generators ``x_e``, central ``J``, one linear relation per vertex and
    commuting relations for edges sharing a vertex."""

    generators: tuple[str, ...]
    linear_relations: tuple[tuple[str, tuple[tuple[str, int], ...], int], ...]
    commuting_pairs: tuple[tuple[str, str], ...]

    def is_vertex_relation(self, word: Sequence[str], parity: int) -> bool:
        """Is ``x_{e_1} ... x_{e_n} = J^parity`` one of the all-orderings vertex relations?"""
        counts = Counter(word)
        for _, exps, b in self.linear_relations:
            if b == parity % 2 and counts == Counter({e: k for e, k in exps}):
                return True
        return False

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "involutions": True,
            "linear": [{"vertex": v, "word": [[e, k] for e, k in exps], "J": b}
                       for v, exps, b in self.linear_relations],
            "commuting": [list(p) for p in self.commuting_pairs],
        }


def solution_group_presentation(H: Hypergraph, b: Mapping[str, int] | None = None) -> SolutionGroupPresentation:
    b = b or {}
    linear = tuple((v, tuple(H.edges_at(v).items()), int(b.get(v, 0)) % 2) for v in H.vertices)
    pairs: set[tuple[str, str]] = set()
    for v in H.vertices:
        for e1, e2 in combinations(H.edges_at(v), 2):
            pairs.add((e1, e2))
    ordered = tuple(sorted(pairs, key=lambda p: (H.edge_index(p[0]), H.edge_index(p[1]))))
    return SolutionGroupPresentation(H.edges, linear, ordered)


def induced_generator_map(phi: GeneralizedMorphism) -> dict[str, str | None]:
    """``x_e -> x_{phi(e)}``, or ``None`` (the identity) when ``e`` is deleted."""
    return {e: phi.emap[e] for e in phi.source.edges}
