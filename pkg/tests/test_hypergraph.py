import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from smallhg import (
    all_maps,
    classes,
    composition_failures,
    local_composition_failures,
    compose_tuples,
    open_masks,
    oracle_valid,
    to_hypergraph,
    to_morphism,
    topology_failures,
)
from wheelwright.fixtures import cube, deletion_morphism, hypergraph_from_edges, subdivided_cube
from wheelwright.hypergraph import (
    EPS,
    GeneralizedMorphism,
    Hypergraph,
    MorphismError,
    closure,
    compose,
    find_retraction,
    glue,
    hypergraph_from_json,
    identity_morphism,
    inclusion_morphism,
    induced_generator_map,
    is_closed,
    is_identity_on,
    is_open,
    morphism_from_json,
    neighbourhood,
    restriction_morphism,
    solution_group_presentation,
    validate_morphism,
)

# -- basics ------------------------------------------------------------------------------


def test_degrees_and_predicates():
    H = hypergraph_from_edges("abc", {"x": ("a", "a", "b"), "y": ("b", "c")})
    assert H.A("a", "x") == 2 and H.A("c", "x") == 0
    assert H.degree("a") == 2 and H.edge_size("x") == 3
    assert not H.is_simple() and not H.is_graph()
    assert cube().is_graph() and cube().is_simple() and cube().is_regular(3)


def test_rejects_bad_incidence():
    with pytest.raises(ValueError):
        Hypergraph(("a",), ("x",), {("b", "x"): 1})
    with pytest.raises(ValueError):
        Hypergraph(("a",), ("x",), {("a", "x"): -1})


def test_json_round_trip():
    H = hypergraph_from_edges("abc", {"x": ("a", "a", "b"), "y": ("b", "c")})
    b = {"a": 1, "b": 0, "c": 1}
    H2, b2 = hypergraph_from_json(H.to_json(b))
    assert H2 == H and b2 == b
    assert hypergraph_from_json({"vertices": [{"id": "p"}], "edges": []})[1] == {"p": 0}


# -- topology --------------------------------------------------------------------------------


def test_cube_bottom_face_neighbourhood():
    G = cube()
    N = neighbourhood(G.sub("1234"))
    assert N.edges == {"12", "23", "34", "14", "15", "26", "37", "48"}
    assert is_open(N) and not is_closed(N)


def test_whole_is_clopen_and_isolated_edge_is_closed():
    G = cube()
    assert is_open(G.whole()) and is_closed(G.whole())
    H = Hypergraph(("a",), ("x",), {})
    S = H.sub(edges=["x"])
    assert is_closed(S) and closure(S) == S


@pytest.mark.slow
def test_open_sets_form_topology_exhaustive():
    # openness only sees which incidences are nonzero, so multiplicity 1 covers A <= 2
    reps = classes(4, 5, 1)
    assert len(reps) == 1923
    assert topology_failures(reps) == []


def test_library_open_matches_mask_oracle():
    for hg in classes(3, 3, 2)[::7]:
        H = to_hypergraph(hg)
        n, cols = hg
        opens = set(open_masks(hg))
        for mask in range(1 << (n + len(cols))):
            S = H.sub([f"v{v}" for v in range(n) if mask >> v & 1],
                      [f"e{e}" for e in range(len(cols)) if mask >> (n + e) & 1])
            assert is_open(S) == (mask in opens)
            assert is_open(neighbourhood(S)) and is_closed(closure(S))


# -- morphisms ---------------------------------------------------------------------------------


def test_deletion_morphism_is_valid():
    phi = deletion_morphism()
    assert validate_morphism(phi).ok
    gens = induced_generator_map(phi)
    assert gens["i"] is None
    assert gens["d"] == gens["f"] == gens["h"] == "c'"


def test_identity_and_parity_violation():
    G = cube()
    assert validate_morphism(identity_morphism(G)).ok
    assert induced_generator_map(identity_morphism(G)) == {e: e for e in G.edges}
    vmap = {v: v for v in G.vertices} | {"1": EPS}
    phi = GeneralizedMorphism(G, G, vmap, {e: e for e in G.edges})
    report = validate_morphism(phi, all_violations=True)
    assert not report.ok
    assert any(p["condition"] == 2 and p["vertex"] == "1" for p in report.violations)


@pytest.mark.slow
def test_validate_matches_oracle_on_all_small_maps():
    reps = classes(2, 2, 2)
    hgs = {hg: to_hypergraph(hg) for hg in reps}
    for src, dst in itertools.product(reps, repeat=2):
        for vmap, emap in all_maps(src, dst):
            phi = GeneralizedMorphism(
                hgs[src], hgs[dst],
                {f"v{v}": (EPS if w < 0 else f"v{w}") for v, w in enumerate(vmap)},
                {f"e{e}": (EPS if f < 0 else f"e{f}") for e, f in enumerate(emap)})
            assert validate_morphism(phi).ok == oracle_valid(src, dst, vmap, emap)


@pytest.mark.slow
def test_composition_preserves_validity_exhaustive():
    count, failures = composition_failures(classes(2, 2, 2))
    assert count > 10_000
    assert failures == []


def test_composition_preserves_validity_on_all_vertex_stars():
    # every single-vertex condition reachable with <= 5 edges and multiplicities <= 2
    count, failures = local_composition_failures(max_edges=5, max_mult=2)
    assert count > 20_000
    assert failures == []


def test_library_compose_agrees_with_tuple_composition():
    reps = classes(2, 2, 2)
    rng = random.Random(7)
    for _ in range(200):
        a, b, c = (rng.choice(reps) for _ in range(3))
        first = [m for m in all_maps(a, b) if oracle_valid(a, b, *m)]
        second = [m for m in all_maps(b, c) if oracle_valid(b, c, *m)]
        if not first or not second:
            continue
        m1, m2 = rng.choice(first), rng.choice(second)
        got = compose(to_morphism(b, c, *m2), to_morphism(a, b, *m1))
        assert got == to_morphism(a, c, *compose_tuples(m2, m1))
        assert validate_morphism(got).ok


def test_compose_with_identity_and_mismatch():
    phi = deletion_morphism()
    assert compose(identity_morphism(phi.target), phi) == phi
    assert compose(phi, identity_morphism(phi.source)) == phi
    with pytest.raises(MorphismError):
        compose(phi, phi)


def test_morphism_json_round_trip():
    phi = deletion_morphism()
    again = morphism_from_json(phi.to_json(), phi.source, phi.target)
    assert again == phi
    assert phi.to_json()["vmap"]["2"] == "eps"


# -- restriction, inclusion, gluing ----------------------------------------------------------------


def test_restriction_then_inclusion_is_identity_on_clopen_piece():
    H = hypergraph_from_edges("abcd", {"x": ("a", "b"), "y": ("b", "a"), "z": ("c", "d")})
    piece = H.sub("ab", "xy")
    assert is_open(piece) and is_closed(piece)
    r = restriction_morphism(H, piece)
    i = inclusion_morphism(piece, H)
    assert validate_morphism(r).ok and validate_morphism(i).ok
    assert compose(r, i) == identity_morphism(piece.as_hypergraph())


def test_restriction_and_inclusion_preconditions():
    G = cube()
    with pytest.raises(MorphismError):
        restriction_morphism(G, G.sub(edges=["12"]))
    with pytest.raises(MorphismError):
        inclusion_morphism(G.sub("1"), G)


def test_restriction_to_empty_deletes_everything_and_is_valid():
    # with every edge deleted the surviving degree at each vertex is 0
    G = cube()
    r = restriction_morphism(G, G.sub())
    assert set(r.vmap.values()) == {EPS} and set(r.emap.values()) == {EPS}
    assert validate_morphism(r).ok


def test_deleting_a_vertex_but_keeping_odd_edges_fails():
    G = cube()
    sub = G.sub(set(G.vertices) - {"1"}, [e for e in G.edges if "1" not in e] + ["12"])
    phi = GeneralizedMorphism(G, G, {v: v for v in G.vertices} | {"1": EPS},
                              {e: (e if e in sub.edges else EPS) for e in G.edges})
    report = validate_morphism(phi)
    assert not report.ok and report.first["reason"] == "odd surviving degree"


def test_inclusion_of_neighbourhood():
    G = cube()
    N = neighbourhood(G.sub("1234"))
    assert validate_morphism(inclusion_morphism(N, G)).ok


def test_glue_single_piece_and_disagreement():
    G = cube()
    ident = identity_morphism(G)
    assert glue([(G.whole(), ident)]) == ident
    other = GeneralizedMorphism(G, G, ident.vmap, ident.emap | {"12": "34"})
    with pytest.raises(MorphismError, match="'12'"):
        glue([(G.whole(), ident), (neighbourhood(G.sub("1")), other)])
    with pytest.raises(MorphismError, match="do not cover"):
        glue([(neighbourhood(G.sub("1")), ident)])


def test_glue_two_pieces_restricts_correctly():
    H = hypergraph_from_edges("abcd", {"x": ("a", "b"), "y": ("b", "a"), "z": ("c", "d")})
    ident = identity_morphism(H)
    left = neighbourhood(H.sub("ab"))
    right = neighbourhood(H.sub("cd"))
    glued = glue([(left, ident), (right, ident)])
    assert glued == ident


# -- retractions ------------------------------------------------------------------------------------


def test_cube_retract():
    G = cube()
    sub = neighbourhood(G.sub("1234"))
    res = find_retraction(G, sub)
    assert res.status == "found"
    phi = res.morphism
    assert validate_morphism(phi).ok and is_identity_on(phi, sub)


def test_subdivided_cube_retracts():
    G = subdivided_cube()
    assert find_retraction(G, neighbourhood(G.sub("12349"))).status == "none"
    res = find_retraction(G, neighbourhood(G.sub("5678")))
    assert res.status == "found"
    assert validate_morphism(res.morphism).ok


def test_budget_exhaustion_is_reported():
    G = subdivided_cube()
    assert find_retraction(G, neighbourhood(G.sub("12349")), budget=3).status == "budget-exhausted"


def brute_retract_exists(H: Hypergraph, sub) -> bool:
    target = sub.as_hypergraph()
    free_v = [v for v in H.vertices if v not in sub.vertices]
    free_e = [e for e in H.edges if e not in sub.edges]
    vchoices = list(target.vertices) + [EPS]
    echoices = list(target.edges) + [EPS]
    for vs in itertools.product(vchoices, repeat=len(free_v)):
        for es in itertools.product(echoices, repeat=len(free_e)):
            vmap = {v: v for v in sub.vertices} | dict(zip(free_v, vs))
            emap = {e: e for e in sub.edges} | dict(zip(free_e, es))
            if validate_morphism(GeneralizedMorphism(H, target, vmap, emap)).ok:
                return True
    return False


def test_find_retraction_matches_brute_force():
    rng = random.Random(2024)
    reps = [hg for hg in classes(3, 3, 2) if hg[0] >= 2]
    checked = found = 0
    while checked < 150:
        H = to_hypergraph(rng.choice(reps))
        vs = [v for v in H.vertices if rng.random() < 0.5]
        es = [e for e in H.edges if rng.random() < 0.5]
        sub = H.sub(vs, es)
        free = len(H.vertices) - len(vs) + len(H.edges) - len(es)
        if free > 10:
            continue
        res = find_retraction(H, sub)
        expected = brute_retract_exists(H, sub)
        assert res.status == ("found" if expected else "none")
        if res:
            assert validate_morphism(res.morphism).ok and is_identity_on(res.morphism, sub)
            found += 1
        checked += 1
    assert 0 < found < checked


# -- solution groups ---------------------------------------------------------------------------------


def test_solution_group_three_parallel_edges():
    H = hypergraph_from_edges(["1", "2"], {"x": ("1", "2"), "y": ("1", "2"), "z": ("1", "2")})
    sg = solution_group_presentation(H, {"1": 1, "2": 0})
    assert sg.linear_relations == (("1", (("x", 1), ("y", 1), ("z", 1)), 1),
                                   ("2", (("x", 1), ("y", 1), ("z", 1)), 0))
    assert set(sg.commuting_pairs) == {("x", "y"), ("x", "z"), ("y", "z")}
    assert sg.is_vertex_relation(["z", "x", "y"], 1)
    assert not sg.is_vertex_relation(["z", "x"], 1)


def test_solution_group_edgeless_and_magic_square():
    H = Hypergraph(("p", "q"), (), {})
    sg = solution_group_presentation(H, {"p": 1})
    assert [(v, w, b) for v, w, b in sg.linear_relations] == [("p", (), 1), ("q", (), 0)]
    cells = {f"c{r}{c}": (f"r{r}", f"k{c}") for r in range(3) for c in range(3)}
    M = hypergraph_from_edges([f"r{i}" for i in range(3)] + [f"k{i}" for i in range(3)], cells)
    sg = solution_group_presentation(M)
    assert len(sg.generators) == 9 and len(sg.linear_relations) == 6
    assert len(sg.commuting_pairs) == 18


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_incidence_preserved_by_valid_morphisms(nv, ne, data):
    # random source, then a random valid morphism found by search into a random target
    cols = tuple(tuple(data.draw(st.integers(0, 2)) for _ in range(nv)) for _ in range(ne))
    src = (nv, cols)
    dst = data.draw(st.sampled_from(classes(2, 2, 2)))
    maps = [m for m in itertools.islice(all_maps(src, dst), 4000) if oracle_valid(src, dst, *m)]
    for vmap, emap in maps[:20]:
        phi = to_morphism(src, dst, vmap, emap)
        assert validate_morphism(phi).ok
        for (v, e) in phi.source.incidence:
            w, f = phi.vmap[v], phi.emap[e]
            if w is not EPS and f is not EPS:
                assert phi.target.A(w, f) > 0


hypergraphs = st.integers(0, 4).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.tuples(*[st.integers(0, 2)] * n), max_size=5).map(tuple)))


def _random_valid_maps(rng, src, dst, tries=300):
    n1, cols1 = src
    n2, cols2 = dst
    found = {(tuple([-1] * n1), tuple([-1] * len(cols1)))}
    for _ in range(tries):
        m = (tuple(rng.randrange(-1, n2) for _ in range(n1)),
             tuple(rng.randrange(-1, len(cols2)) for _ in range(len(cols1))))
        if oracle_valid(src, dst, *m):
            found.add(m)
    return sorted(found)


@pytest.mark.slow
@settings(max_examples=60, deadline=None)
@given(hypergraphs, hypergraphs, hypergraphs, st.randoms(use_true_random=False))
def test_composition_preserves_validity_at_full_bounds(a, b, c, rng):
    second = _random_valid_maps(rng, b, c)[-6:]
    for m1 in _random_valid_maps(rng, a, b)[-6:]:
        for m2 in second:
            composite = compose_tuples(m2, m1)
            assert oracle_valid(a, c, *composite)
            got = compose(to_morphism(b, c, *m2), to_morphism(a, b, *m1))
            assert validate_morphism(got).ok
