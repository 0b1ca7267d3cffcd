"""The wagon-wheel hypergraph of an involutive presentation.

Relation ``r_i = J^{a_i} s_{i0} ... s_{i,n_i-1}`` contributes a wheel of
``3 n_i`` vertices ``(i, j, k)`` (``k`` = 1 outer rim, 2 middle, 3 hub ring)
and ``4 n_i`` edges ``a, b, c, d``.  Generator edges are shared by all
wheels: ``s`` touches ``(i, j, 1)`` whenever ``s_ij = s``.

Ids: vertices ``v.i.j.k``, edges ``a.i.j`` (and ``b``, ``c``, ``d``),
generator edges keep the generator's name.  ``i`` and ``j`` are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .hypergraph import (
    EPS,
    GeneralizedMorphism,
    Hypergraph,
    Subhypergraph,
    find_retraction,
    glue,
    is_identity_on,
    neighbourhood,
    validate_morphism,
)
from .presentation import InvPresentation, multiplicity

__all__ = [
    "WagonWheel",
    "StandardCycles",
    "StellarVerdict",
    "ConstellationReport",
    "LabellingError",
    "RetractError",
    "build_wagon_wheel",
    "choose_labelling",
    "is_ilabelling",
    "constellation_rule_violations",
    "toggle",
    "labelling_path",
    "standard_cycles",
    "is_cycle",
    "cycle_edge_order",
    "retract_to_B",
    "retract_to_C",
    "is_sun",
    "stellar_verdict",
    "is_stellar",
    "is_constellation",
    "standard_witnesses",
    "max_cycles_per_edge",
]

RIM_KINDS = ("a", "b", "c", "d")


class LabellingError(ValueError):
    pass


class RetractError(ValueError):
    pass


def vid(i: int, j: int, k: int) -> str:
    return f"v.{i}.{j}.{k}"


def eid(kind: str, i: int, j: int) -> str:
    return f"{kind}.{i}.{j}"


@dataclass(frozen=True, eq=False)
class WagonWheel:
    hypergraph: Hypergraph
    source: InvPresentation

    @property
    def m(self) -> int:
        return len(self.source.relations)

    def n(self, i: int) -> int:
        return len(self.source.relations[i])

    def letter(self, i: int, j: int) -> str:
        r = self.source.relations[i]
        return r.letters[j % len(r)]

    def v(self, i: int, j: int, k: int) -> str:
        return vid(i, j % self.n(i), k)

    def e(self, kind: str, i: int, j: int) -> str:
        return eid(kind, i, j % self.n(i))

    @property
    def M(self) -> int:
        return self.source.total_length

    @cached_property
    def vertex_index(self) -> dict[str, tuple[int, int, int]]:
        return {vid(i, j, k): (i, j, k) for i in range(self.m)
                for j in range(self.n(i)) for k in (1, 2, 3)}

    @cached_property
    def edge_index(self) -> dict[str, tuple]:
        out: dict[str, tuple] = {s: ("s", s) for s in self.source.generators}
        for i in range(self.m):
            for j in range(self.n(i)):
                for kind in RIM_KINDS:
                    out[eid(kind, i, j)] = (kind, i, j)
        return out

    def wheel_vertices(self, i: int) -> list[str]:
        return [vid(i, j, k) for j in range(self.n(i)) for k in (1, 2, 3)]

    def wheel_edges(self, i: int) -> list[str]:
        return [eid(kind, i, j) for j in range(self.n(i)) for kind in RIM_KINDS]

    def wheel(self, i: int) -> Subhypergraph:
        """The closed subhypergraph ``W_i``: one wheel without generator edges."""
        return self.hypergraph.sub(self.wheel_vertices(i), self.wheel_edges(i))

    def wheel_neighbourhood(self, i: int) -> Subhypergraph:
        return self._pieces[i]

    @cached_property
    def _pieces(self) -> list[Subhypergraph]:
        return [neighbourhood(self.wheel(i)) for i in range(self.m)]

    @cached_property
    def _orphan_generators(self) -> list[str]:
        used = {s for r in self.source.relations for s in r.letters}
        return [s for s in self.source.generators if s not in used]

    def index_json(self) -> dict:
        return {
            "wheels": [{"relation": r.text(), "parity": r.parity, "length": len(r)}
                       for r in self.source.relations],
            "generators": list(self.source.generators),
            "vertices": {v: list(t) for v, t in self.vertex_index.items()},
            "edges": {e: list(t) for e, t in self.edge_index.items()},
        }

    def to_json(self, b: Mapping[str, int] | None = None) -> dict:
        data = self.hypergraph.to_json(b)
        data["index"] = self.index_json()
        return data


def build_wagon_wheel(P: InvPresentation) -> WagonWheel:
    structural = {vid(i, j, k) for i, r in enumerate(P.relations)
                  for j in range(len(r)) for k in (1, 2, 3)}
    structural |= {eid(kind, i, j) for i, r in enumerate(P.relations)
                   for j in range(len(r)) for kind in RIM_KINDS}
    clash = [s for s in P.generators if s in structural]
    if clash:
        raise ValueError(f"generator name {clash[0]!r} collides with a wagon-wheel id")

    vertices: list[str] = []
    edges: list[str] = list(P.generators)
    inc: dict[tuple[str, str], int] = {}

    def add(v, e):
        inc[(v, e)] = inc.get((v, e), 0) + 1

    for i, r in enumerate(P.relations):
        n = len(r)
        if n == 0:
            raise ValueError(f"relation {i} is empty")
        for j in range(n):
            vertices += [vid(i, j, 1), vid(i, j, 2), vid(i, j, 3)]
            edges += [eid(kind, i, j) for kind in RIM_KINDS]
        for j, s in enumerate(r.letters):
            prev = (j - 1) % n
            add(vid(i, j, 1), s)
            add(vid(i, prev, 2), eid("a", i, j))
            add(vid(i, j, 1), eid("a", i, j))
            add(vid(i, j, 1), eid("b", i, j))
            add(vid(i, j, 2), eid("b", i, j))
            add(vid(i, j, 2), eid("c", i, j))
            add(vid(i, j, 3), eid("c", i, j))
            add(vid(i, prev, 3), eid("d", i, j))
            add(vid(i, j, 3), eid("d", i, j))
    return WagonWheel(Hypergraph(tuple(vertices), tuple(edges), inc), P)


# ---------------------------------------------------------------------------
# labellings


def is_ilabelling(W: WagonWheel, b: Mapping[str, int]) -> bool:
    """Per-wheel parity of ones matches the relation's power of J."""
    return all(sum(b.get(v, 0) for v in W.wheel_vertices(i)) % 2 == r.parity
               for i, r in enumerate(W.source.relations))


def _odd_somewhere(P: InvPresentation, s: str) -> bool:
    return any(multiplicity(s, r) % 2 for r in P.relations)


def _placement_allowed(W: WagonWheel, i: int, j: int) -> bool:
    P = W.source
    if _odd_somewhere(P, W.letter(i, j)):
        return True
    return not any(_odd_somewhere(P, s) for s in P.relations[i].letters)


def choose_labelling(W: WagonWheel, mode: str = "constellation") -> dict[str, int]:
    """An I-labelling.  ``constellation`` mode keeps layers 2 and 3 at zero,
    puts at most one 1 per wheel, and places it where the generator edge is
    odd somewhere (or anywhere if the whole relation is everywhere-even)."""
    if mode not in ("any", "constellation"):
        raise ValueError(f"unknown labelling mode {mode!r}")
    b = {v: 0 for v in W.hypergraph.vertices}
    for i, r in enumerate(W.source.relations):
        if not r.parity:
            continue
        if mode == "any":
            b[vid(i, 0, 1)] = 1
            continue
        spot = next((j for j in range(W.n(i)) if _placement_allowed(W, i, j)), None)
        if spot is None:
            raise LabellingError(f"no admissible position for the odd relation {i} ({r})")
        b[vid(i, spot, 1)] = 1
    return b


def constellation_rule_violations(W: WagonWheel, b: Mapping[str, int]) -> list[str]:
    out = []
    for i in range(W.m):
        ones = [v for v in W.wheel_vertices(i) if b.get(v, 0)]
        if len(ones) > 1:
            out.append(f"wheel {i} has {len(ones)} vertices labelled 1")
        for v in ones:
            _, j, k = W.vertex_index[v]
            if k != 1:
                out.append(f"{v} is labelled 1 but is not on the outer layer")
            elif not _placement_allowed(W, i, j):
                out.append(f"{v} is labelled 1 but generator {W.letter(i, j)} is even "
                           f"everywhere while relation {i} has an odd generator")
    return out


def toggle(H: Hypergraph, b: Mapping[str, int], e: str) -> dict[str, int]:
    out = dict(b)
    for v, m in H.vertices_of(e).items():
        out[v] = (out.get(v, 0) + m) % 2
    return out


def _solve_gf2(columns: list[int], target: int) -> int | None:
    """A subset (bitmask over ``columns``) XOR-ing to ``target``, or None."""
    basis: list[tuple[int, int]] = []  # (vector, combination)
    for idx, col in enumerate(columns):
        combo = 1 << idx
        for vec, c in basis:
            if col ^ vec < col:
                col ^= vec
                combo ^= c
        if col:
            basis.append((col, combo))
            basis.sort(reverse=True)
    combo = 0
    for vec, c in basis:
        if target ^ vec < target:
            target ^= vec
            combo ^= c
    return combo if target == 0 else None


def labelling_path(W: WagonWheel, b: Mapping[str, int], b2: Mapping[str, int]) -> list[str] | None:
    """Edge toggles, each inside a single wheel, turning ``b`` into ``b2``."""
    if not (is_ilabelling(W, b) and is_ilabelling(W, b2)):
        return None
    H = W.hypergraph
    path: list[str] = []
    for i in range(W.m):
        verts = W.wheel_vertices(i)
        pos = {v: t for t, v in enumerate(verts)}
        target = sum(1 << pos[v] for v in verts if (b.get(v, 0) + b2.get(v, 0)) % 2)
        if not target:
            continue
        edges = W.wheel_edges(i)
        cols = []
        for e in edges:
            mask = 0
            for v, m in H.vertices_of(e).items():
                if m % 2:
                    mask ^= 1 << pos[v]
            cols.append(mask)
        combo = _solve_gf2(cols, target)
        if combo is None:
            return None
        path += [e for t, e in enumerate(edges) if combo >> t & 1]
    return path


# ---------------------------------------------------------------------------
# standard cycles


@dataclass(frozen=True)
class StandardCycles:
    A: tuple[Subhypergraph, ...]
    B: tuple[Subhypergraph, ...]
    C: tuple[tuple[Subhypergraph, ...], ...]

    @property
    def phi(self) -> list[Subhypergraph]:
        """All ``C_ij`` (wheel by wheel) followed by all ``B_i``."""
        return [c for row in self.C for c in row] + list(self.B)

    def phi_labels(self) -> list[tuple]:
        return ([("C", i, j) for i, row in enumerate(self.C) for j in range(len(row))]
                + [("B", i) for i in range(len(self.B))])


def is_cycle(S: Subhypergraph | Hypergraph) -> bool:
    """Simple, connected, 2-regular graph (as its own hypergraph)."""
    H = S.as_hypergraph() if isinstance(S, Subhypergraph) else S
    if not H.vertices or not H.is_simple() or not H.is_graph() or not H.is_regular(2):
        return False
    seen, stack = {H.vertices[0]}, [H.vertices[0]]
    while stack:
        v = stack.pop()
        for e in H.edges_at(v):
            for u in H.vertices_of(e):
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
    return len(seen) == len(H.vertices)


def cycle_edge_order(S: Subhypergraph | Hypergraph) -> tuple[list[str], list[str]]:
    """Vertices and edges of a cycle in traversal order: edge t joins vertex t and t+1."""
    H = S.as_hypergraph() if isinstance(S, Subhypergraph) else S
    start = H.vertices[0]
    verts, edges = [start], []
    prev_edge, v = None, start
    while True:
        nxt = next(e for e in H.edges_at(v) if e != prev_edge)
        edges.append(nxt)
        u = next(x for x in H.vertices_of(nxt) if x != v)
        if u == start:
            break
        verts.append(u)
        prev_edge, v = nxt, u
    return verts, edges


def standard_cycles(W: WagonWheel) -> StandardCycles:
    H = W.hypergraph
    A, B, C = [], [], []
    for i in range(W.m):
        n = W.n(i)
        A.append(H.sub([W.v(i, j, k) for j in range(n) for k in (1, 2)],
                       [W.e(x, i, j) for j in range(n) for x in "ab"]))
        B.append(H.sub([W.v(i, j, 3) for j in range(n)], [W.e("d", i, j) for j in range(n)]))
        C.append(tuple(
            H.sub([W.v(i, j, 1), W.v(i, j, 2), W.v(i, j, 3), W.v(i, j - 1, 2), W.v(i, j - 1, 3)],
                  [W.e("a", i, j), W.e("b", i, j), W.e("c", i, j), W.e("d", i, j),
                   W.e("c", i, j - 1)])
            for j in range(n)))
    cycles = StandardCycles(tuple(A), tuple(B), tuple(C))
    for cyc in list(cycles.A) + cycles.phi:
        if not is_cycle(cyc):
            raise AssertionError("standard cycle is not a cycle; relations must have length >= 3")
    return cycles


# ---------------------------------------------------------------------------
# explicit retracts


def _pieces_for(W: WagonWheel, wheel_maps: dict[int, tuple[dict, dict]],
                target: Hypergraph, generator_image) -> GeneralizedMorphism:
    """Glue per-wheel maps (missing wheels go to EPS) plus orphan generator edges."""
    pieces = []
    for i in range(W.m):
        piece = W.wheel_neighbourhood(i)
        vmap, emap = wheel_maps.get(i, ({}, {}))
        full_v = {v: vmap.get(v, EPS) for v in piece.vertices}
        full_e = {e: emap.get(e, EPS) for e in piece.edges}
        for s in W.source.relations[i].letters:
            full_e[s] = generator_image(s)
        pieces.append((piece, GeneralizedMorphism(piece.as_hypergraph(), target, full_v, full_e)))
    for s in W._orphan_generators:
        piece = W.hypergraph.sub((), [s])
        pieces.append((piece, GeneralizedMorphism(piece.as_hypergraph(), target, {},
                                                  {s: generator_image(s)})))
    return glue(pieces)


def _checked_retract(phi: GeneralizedMorphism, sub: Subhypergraph) -> GeneralizedMorphism:
    report = validate_morphism(phi)
    assert report.ok, report.first
    assert is_identity_on(phi, sub)
    return phi


def retract_to_B(W: WagonWheel, i: int) -> GeneralizedMorphism:
    """Collapse wheel ``i`` onto ``N(B_i)``; every other wheel goes to EPS."""
    cycles_B = W.hypergraph.sub([W.v(i, j, 3) for j in range(W.n(i))],
                                [W.e("d", i, j) for j in range(W.n(i))])
    target_sub = neighbourhood(cycles_B)
    target = target_sub.as_hypergraph()
    vmap, emap = {}, {}
    for j in range(W.n(i)):
        vmap[W.v(i, j, 1)] = EPS
        vmap[W.v(i, j, 2)] = W.v(i, j, 3)
        vmap[W.v(i, j, 3)] = W.v(i, j, 3)
        emap[W.e("c", i, j)] = W.e("c", i, j)
        for kind in "abd":
            emap[W.e(kind, i, j)] = W.e("d", i, j)
    phi = _pieces_for(W, {i: (vmap, emap)}, target, lambda s: EPS)
    return _checked_retract(phi, target_sub)


def _fold(W: WagonWheel, i: int, j0: int) -> tuple[dict, dict]:
    """Fold wheel ``i`` onto ``N(C_{i,j0})`` where ``s = s_{i,j0}`` has even multiplicity.

    Positions are renumbered ``p = 1..n`` starting at ``j0``; ``p = n`` doubles
    as position 0.  The occurrences ``j_1 = 1 < j_2 < ... < j_{2k}`` of ``s``
    split the wheel into runs that alternate between the two sides of the fold.
    """
    n = W.n(i)
    s = W.letter(i, j0)
    actual = lambda p: (j0 + p - 1) % n  # noqa: E731
    occ = [p for p in range(1, n + 1) if W.letter(i, actual(p)) == s]
    assert occ[0] == 1 and len(occ) % 2 == 0
    right_odd = set(occ[0::2])
    right_even = set(occ[1::2])
    right = right_odd | right_even
    wrap = lambda p: n if p == 0 else p  # noqa: E731
    left_odd = {wrap(p - 1) for p in right_odd}
    left_even = {wrap(p - 1) for p in right_even}
    gap_right, gap_left = set(), set()
    bounds = occ + [n + 1]
    for t in range(len(occ)):
        run = set(range(bounds[t] + 1, bounds[t + 1]))
        (gap_right if t % 2 == 0 else gap_left).update(run)

    V = lambda off, k: W.v(i, j0 + off, k)  # noqa: E731
    E = lambda kind, off: W.e(kind, i, j0 + off)  # noqa: E731
    vmap, emap = {}, {}
    for p in range(1, n + 1):
        j = actual(p)
        vmap[W.v(i, j, 1)] = V(0, 1) if p in right else EPS
        for k in (2, 3):
            if p in left_odd or p in right_even:
                vmap[W.v(i, j, k)] = V(-1, k)
            elif p in right_odd or p in left_even:
                vmap[W.v(i, j, k)] = V(0, k)
            else:
                vmap[W.v(i, j, k)] = EPS
        if p in right_odd:
            emap[W.e("a", i, j)], emap[W.e("b", i, j)] = E("a", 0), E("b", 0)
        elif p in right_even:
            emap[W.e("a", i, j)], emap[W.e("b", i, j)] = E("b", 0), E("a", 0)
        elif p in gap_left:
            emap[W.e("a", i, j)] = emap[W.e("b", i, j)] = E("b", -1)
        else:
            emap[W.e("a", i, j)] = emap[W.e("b", i, j)] = E("a", 1)
        if p in left_odd or p in right_even:
            emap[W.e("c", i, j)] = E("c", -1)
        elif p in right_odd or p in left_even:
            emap[W.e("c", i, j)] = E("c", 0)
        else:
            emap[W.e("c", i, j)] = EPS
        if p in right:
            emap[W.e("d", i, j)] = E("d", 0)
        elif p in gap_left:
            emap[W.e("d", i, j)] = E("d", -1)
        else:
            emap[W.e("d", i, j)] = E("d", 1)
    return vmap, emap


def _relocate(W: WagonWheel, maps: tuple[dict, dict], src: tuple[int, int],
              dst: tuple[int, int]) -> tuple[dict, dict]:
    """Compose a fold onto ``N(C_src)`` with the sun isomorphism onto ``N(C_dst)``."""
    (i1, j1), (i2, j2) = src, dst
    rename: dict[str, str] = {}
    for off in (-1, 0, 1):
        for k in (1, 2, 3):
            rename[W.v(i1, j1 + off, k)] = W.v(i2, j2 + off, k)
        for kind in RIM_KINDS:
            rename[W.e(kind, i1, j1 + off)] = W.e(kind, i2, j2 + off)
    vmap, emap = maps
    move = lambda x: EPS if x is EPS else rename.get(x, x)  # noqa: E731
    return ({v: move(w) for v, w in vmap.items()}, {e: move(f) for e, f in emap.items()})


def retract_to_C(W: WagonWheel, i: int, j: int) -> GeneralizedMorphism:
    """Fold every wheel containing ``s = s_ij`` onto ``N(C_ij)``."""
    P = W.source
    j = j % W.n(i)
    s = W.letter(i, j)
    for idx, r in enumerate(P.relations):
        if not r.is_cyclically_reduced():
            raise RetractError(f"relation {idx} ({r}) is not cyclically reduced")
        if multiplicity(s, r) % 2:
            raise RetractError(f"generator {s} has odd multiplicity {multiplicity(s, r)} "
                               f"in relation {idx} ({r})")
    C = standard_cycles_C(W, i, j)
    target_sub = neighbourhood(C)
    target = target_sub.as_hypergraph()
    maps = {}
    for i2, r in enumerate(P.relations):
        if s not in r.letters:
            continue
        j2 = j if i2 == i else r.letters.index(s)
        folded = _fold(W, i2, j2)
        maps[i2] = folded if i2 == i else _relocate(W, folded, (i2, j2), (i, j))
    phi = _pieces_for(W, maps, target, lambda g: g if g == s else EPS)
    return _checked_retract(phi, target_sub)


def standard_cycles_C(W: WagonWheel, i: int, j: int) -> Subhypergraph:
    return W.hypergraph.sub(
        [W.v(i, j, 1), W.v(i, j, 2), W.v(i, j, 3), W.v(i, j - 1, 2), W.v(i, j - 1, 3)],
        [W.e("a", i, j), W.e("b", i, j), W.e("c", i, j), W.e("d", i, j), W.e("c", i, j - 1)])


# ---------------------------------------------------------------------------
# suns, stellar cycles, constellations


def is_sun(H: Hypergraph) -> dict | None:
    """An isomorphism onto the sun of size n, or None.

    Returns ``{"vertices": [v_1..v_n], "cycle": [e_1..e_n], "rays": [f_1..f_n]}``
    with ``e_t`` joining ``v_t`` and ``v_{t+1}`` and ``f_t`` hanging off ``v_t``.
    """
    n = len(H.vertices)
    if n < 2 or len(H.edges) != 2 * n or not H.is_simple():
        return None
    rays: dict[str, str] = {}
    links: dict[str, list[str]] = {v: [] for v in H.vertices}
    for e in H.edges:
        ends = list(H.vertices_of(e))
        if len(ends) == 1:
            if ends[0] in rays:
                return None
            rays[ends[0]] = e
        elif len(ends) == 2:
            for v in ends:
                links[v].append(e)
        else:
            return None
    if len(rays) != n or any(len(x) != 2 for x in links.values()):
        return None
    order, cycle = [H.vertices[0]], []
    prev, v = None, H.vertices[0]
    while True:
        e = links[v][0] if links[v][0] != prev else links[v][1]
        cycle.append(e)
        u = next(x for x in H.vertices_of(e) if x != v)
        if u == order[0]:
            break
        if u in order:
            return None
        order.append(u)
        prev, v = e, u
    if len(order) != n:
        return None
    return {"vertices": order, "cycle": cycle, "rays": [rays[v] for v in order]}


@dataclass(frozen=True)
class StellarVerdict:
    """``stellar`` is None when the retraction search ran out of budget."""

    stellar: bool | None
    reason: str
    sun: bool = False
    retraction: GeneralizedMorphism | None = field(default=None, compare=False)


def stellar_verdict(H: Hypergraph, b: Mapping[str, int], C: Subhypergraph,
                    witness: GeneralizedMorphism | None = None,
                    budget: int = 200_000) -> StellarVerdict:
    if not is_cycle(C):
        return StellarVerdict(False, "not a cycle")
    N = neighbourhood(C)
    target = N.as_hypergraph()
    if is_sun(target) is None:
        return StellarVerdict(False, "neighbourhood is not a sun")
    labelled = [v for v in C.ordered_vertices() if b.get(v, 0)]
    if labelled:
        return StellarVerdict(False, f"vertex {labelled[0]} is labelled 1", sun=True)
    if witness is not None:
        if witness.source != H or witness.target != target:
            return StellarVerdict(False, "witness has the wrong source or target", sun=True)
        report = validate_morphism(witness)
        if not report.ok:
            return StellarVerdict(False, f"witness is not a morphism: {report.first}", sun=True)
        if not is_identity_on(witness, N):
            return StellarVerdict(False, "witness does not fix the neighbourhood", sun=True)
        return StellarVerdict(True, "retraction witness verified", True, witness)
    found = find_retraction(H, N, budget)
    if found.status == "found":
        return StellarVerdict(True, "retraction found by search", True, found.morphism)
    if found.status == "none":
        return StellarVerdict(False, "neighbourhood is not a retract", sun=True)
    return StellarVerdict(None, f"retraction search exhausted {budget} nodes", sun=True)


def is_stellar(H: Hypergraph, b: Mapping[str, int], C: Subhypergraph,
               witness: GeneralizedMorphism | None = None, budget: int = 200_000) -> bool:
    return stellar_verdict(H, b, C, witness, budget).stellar is True


@dataclass(frozen=True)
class ConstellationReport:
    ok: bool
    verdicts: tuple[StellarVerdict, ...]
    violations: tuple[dict, ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "stellar": [v.stellar for v in self.verdicts],
            "reasons": [v.reason for v in self.verdicts],
            "violations": list(self.violations),
        }


def _tail_covered(edges: list[str], covered: set[str]) -> bool:
    """Some rotation or reflection ``e_1 ... e_n`` has ``e_3..e_n`` covered."""
    n = len(edges)
    if n < 3:
        return False
    for seq in (edges, edges[::-1]):
        for start in range(n):
            rot = seq[start:] + seq[:start]
            if all(e in covered for e in rot[2:]):
                return True
    return False


def is_constellation(H: Hypergraph, b: Mapping[str, int], phi: Sequence[Subhypergraph],
                     witnesses: Mapping[int, GeneralizedMorphism] | None = None,
                     budget: int = 200_000) -> ConstellationReport:
    """Check the three constellation conditions.

    A cycle only counts as stellar when that is proven (by witness or by an
    exhaustive search); an exhausted search is treated as not stellar.
    """
    witnesses = witnesses or {}
    verdicts = tuple(stellar_verdict(H, b, C, witnesses.get(t), budget) for t, C in enumerate(phi))
    stellar = [v.stellar is True for v in verdicts]
    violations: list[dict] = []

    covered = {e for t, C in enumerate(phi) if stellar[t] for e in C.edges}
    for t, C in enumerate(phi):
        v = verdicts[t]
        if not is_cycle(C):
            violations.append({"condition": "a", "cycle": t, "message": "not a cycle"})
            continue
        if not v.sun:
            violations.append({"condition": "a", "cycle": t, "message": v.reason})
            continue
        if stellar[t]:
            continue
        _, order = cycle_edge_order(C)
        if not _tail_covered(order, covered):
            violations.append({"condition": "a", "cycle": t,
                               "message": f"not stellar ({v.reason}) and its tail is not "
                                          f"covered by stellar cycles"})

    count: dict[str, int] = {}
    for C in phi:
        for e in C.edges:
            count[e] = count.get(e, 0) + 1
    private = [any(count[e] == 1 for e in C.edges) for C in phi]
    for t, C in enumerate(phi):
        if private[t]:
            continue
        if not any(u != t and private[u] and C.edges & D.edges for u, D in enumerate(phi)):
            violations.append({"condition": "b", "cycle": t,
                               "message": "no private edge here or on a neighbouring cycle"})

    for t in range(len(phi)):
        for u in range(t + 1, len(phi)):
            shared = phi[t].edges & phi[u].edges
            if len(shared) > 1:
                violations.append({"condition": "c", "cycles": [t, u], "edges": sorted(shared),
                                   "message": f"cycles share {len(shared)} edges"})
            elif shared and not stellar[t] and not stellar[u]:
                violations.append({"condition": "c", "cycles": [t, u], "edges": sorted(shared),
                                   "message": "two non-stellar cycles share an edge"})
    return ConstellationReport(not violations, verdicts, tuple(violations))


def max_cycles_per_edge(phi: Sequence[Subhypergraph]) -> int:
    count: dict[str, int] = {}
    for C in phi:
        for e in C.edges:
            count[e] = count.get(e, 0) + 1
    return max(count.values(), default=0)


def standard_witnesses(W: WagonWheel, cycles: StandardCycles | None = None
                       ) -> dict[int, GeneralizedMorphism]:
    """Explicit retractions for the members of ``Phi``, keyed by position.

    ``C_ij`` gets no witness when ``s_ij`` has odd multiplicity in some relation.
    """
    cycles = cycles or standard_cycles(W)
    out: dict[int, GeneralizedMorphism] = {}
    for t, label in enumerate(cycles.phi_labels()):
        if label[0] == "B":
            out[t] = retract_to_B(W, label[1])
        else:
            try:
                out[t] = retract_to_C(W, label[1], label[2])
            except RetractError:
                pass
    return out
