import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from wheelwright.fixtures import cube_tail_cycles, cube_with_tail, s4_presentation
from wheelwright.hypergraph import EPS, is_identity_on, neighbourhood, validate_morphism
from wheelwright.passes import make_collegial
from wheelwright.presentation import FreeWord, InvPresentation, InvWord, Presentation, is_collegial
from wheelwright.wagonwheel import (
    RetractError,
    build_wagon_wheel,
    choose_labelling,
    constellation_rule_violations,
    is_constellation,
    is_cycle,
    is_ilabelling,
    is_stellar,
    is_sun,
    labelling_path,
    max_cycles_per_edge,
    retract_to_B,
    retract_to_C,
    standard_cycles,
    standard_witnesses,
    stellar_verdict,
    toggle,
)

SHARED_X = InvPresentation(("x", "y", "z", "u", "v"),
                           (InvWord.of("x", "y", "x", "z"), InvWord.of("x", "u", "v", "u")))
XYXY = InvPresentation(("x", "y"), (InvWord.of("x", "y", "x", "y"),))


# -- construction ----------------------------------------------------------------------------


def test_shared_x_counts_and_generator_incidence():
    W = build_wagon_wheel(SHARED_X)
    H = W.hypergraph
    assert (len(H.vertices), len(H.edges)) == (24, 37)
    assert set(H.vertices_of("x")) == {"v.0.0.1", "v.0.2.1", "v.1.0.1"}
    assert H.is_simple()


def test_single_relation_of_length_four():
    P = InvPresentation(("a", "b", "c"), (InvWord.of("a", "b", "c", "b"),))
    H = build_wagon_wheel(P).hypergraph
    assert (len(H.vertices), len(H.edges)) == (12, 16 + 3)


relations = st.lists(st.lists(st.sampled_from("pqrst"), min_size=4, max_size=8).map(
    lambda ls: InvWord(0, tuple(ls))), min_size=1, max_size=4)


@settings(max_examples=100)
@given(relations, st.lists(st.integers(0, 1), min_size=4, max_size=4))
def test_counts_match_formula(rels, parities):
    rels = [InvWord(p, r.letters) for r, p in zip(rels, parities)]
    P = InvPresentation(tuple("pqrst"), tuple(rels))
    H = build_wagon_wheel(P).hypergraph
    M = sum(len(r.letters) for r in P.relations)
    assert len(H.vertices) == 3 * M
    assert len(H.edges) == 4 * M + 5


@settings(max_examples=50)
@given(relations)
def test_local_structure(rels):
    P = InvPresentation(tuple("pqrst"), tuple(rels))
    W = build_wagon_wheel(P)
    H = W.hypergraph
    assert H.is_simple()
    assert all(H.degree(v) == 3 for v in H.vertices)
    for i, r in enumerate(P.relations):
        for j in range(len(r)):
            for kind in "abcd":
                assert H.edge_size(W.e(kind, i, j)) == 2
    for s in P.generators:
        assert H.edge_size(s) == sum(r.letters.count(s) for r in P.relations)
    assert max_cycles_per_edge(standard_cycles(W).phi) <= 2


# -- labellings ---------------------------------------------------------------------------------


def test_even_relations_get_zero_labelling():
    W = build_wagon_wheel(XYXY)
    for mode in ("any", "constellation"):
        b = choose_labelling(W, mode)
        assert not any(b.values()) and is_ilabelling(W, b)


def test_odd_relation_places_single_one_on_outer_layer():
    P = InvPresentation(("x", "y", "z"), (InvWord(1, ("x", "y", "x", "z")), InvWord(0, ("y", "z", "y", "z"))))
    W = build_wagon_wheel(P)
    b = choose_labelling(W, "constellation")
    ones = [v for v, x in b.items() if x]
    assert len(ones) == 1 and ones[0].endswith(".1") and ones[0].startswith("v.0.")
    assert is_ilabelling(W, b)
    assert constellation_rule_violations(W, b) == []
    for i, r in enumerate(P.relations):
        assert sum(b[v] for v in W.wheel_vertices(i)) % 2 == r.parity


def test_toggle_is_an_involution():
    W = build_wagon_wheel(SHARED_X)
    b = choose_labelling(W, "any")
    for e in W.hypergraph.edges:
        assert toggle(W.hypergraph, toggle(W.hypergraph, b, e), e) == b


def test_labelling_path_matches_reachability_oracle():
    # one wheel of length 4: brute-force every state reachable by rim-edge toggles
    P = InvPresentation(("x", "y"), (InvWord(1, ("x", "y", "x", "y")),))
    W = build_wagon_wheel(P)
    H = W.hypergraph
    verts = W.wheel_vertices(0)
    rim = [e for e in W.wheel_edges(0) if e not in P.generators]
    start = choose_labelling(W, "any")
    key = lambda b: tuple(b[v] for v in verts)  # noqa: E731
    seen, stack = {key(start)}, [start]
    while stack:
        b = stack.pop()
        for e in rim:
            nb = toggle(H, b, e)
            if key(nb) not in seen:
                seen.add(key(nb))
                stack.append(nb)
    for bits in itertools.product((0, 1), repeat=len(verts)):
        target = dict(zip(verts, bits))
        path = labelling_path(W, start, target)
        assert (path is not None) == (bits in seen) == (sum(bits) % 2 == 1)
        if path is not None:
            b = start
            for e in path:
                b = toggle(H, b, e)
            assert b == target


def test_labelling_path_between_random_ilabellings():
    W = build_wagon_wheel(s4_presentation())
    H = W.hypergraph
    rng = random.Random(5)
    for _ in range(20):
        pair = []
        for _ in range(2):
            b = {v: rng.randint(0, 1) for v in H.vertices}
            for i, r in enumerate(W.source.relations):
                if sum(b[v] for v in W.wheel_vertices(i)) % 2 != r.parity:
                    b[W.v(i, 0, 1)] ^= 1
            pair.append(b)
        path = labelling_path(W, *pair)
        b = pair[0]
        for e in path:
            b = toggle(H, b, e)
        assert b == pair[1]


# -- standard cycles and retracts -----------------------------------------------------------------


def test_standard_cycle_shapes():
    W = build_wagon_wheel(SHARED_X)
    cycles = standard_cycles(W)
    H = W.hypergraph
    for i in range(W.m):
        n = W.n(i)
        assert len(cycles.B[i].vertices) == n and len(cycles.B[i].edges) == n
        assert {e.split(".")[0] for e in cycles.B[i].edges} == {"d"}
        assert len(cycles.A[i].edges) == 2 * n
        assert is_sun(neighbourhood(cycles.B[i]).as_hypergraph()) is not None
        assert len(is_sun(neighbourhood(cycles.B[i]).as_hypergraph())["vertices"]) == n
        for C in cycles.C[i]:
            assert len(C.vertices) == len(C.edges) == 5 and is_cycle(C)
            assert len(is_sun(neighbourhood(C).as_hypergraph())["vertices"]) == 5
    assert len(cycles.phi) == W.M + W.m
    assert H is W.hypergraph


def test_retract_to_B_shared_x():
    W = build_wagon_wheel(SHARED_X)
    r = retract_to_B(W, 0)
    assert validate_morphism(r).ok
    for j in range(W.n(0)):
        assert r.vmap[W.v(0, j, 1)] is EPS
        assert r.emap[W.e("d", 0, j)] == W.e("d", 0, j)
        assert r.emap[W.e("a", 0, j)] == r.emap[W.e("b", 0, j)] == W.e("d", 0, j)


def test_retract_to_C_single_fold():
    W = build_wagon_wheel(XYXY)
    for j in range(4):
        r = retract_to_C(W, 0, j)
        C = standard_cycles(W).C[0][j]
        assert validate_morphism(r).ok and is_identity_on(r, neighbourhood(C))


def test_retract_to_C_rejects_odd_multiplicity():
    W = build_wagon_wheel(SHARED_X)
    with pytest.raises(RetractError, match="odd multiplicity"):
        retract_to_C(W, 0, 0)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(st.tuples(st.sampled_from("ab"), st.sampled_from([1, -1])),
                         min_size=1, max_size=3), min_size=1, max_size=2))
def test_collegial_outputs_are_constellations(rels):
    P = Presentation(("a", "b"), tuple(FreeWord(tuple(r)).cyclically_reduce() for r in rels
                                       if len(FreeWord(tuple(r)).cyclically_reduce())),
                     FreeWord.of("a"))
    K, _, _ = make_collegial(P, [])
    assert is_collegial(K).ok
    W = build_wagon_wheel(K)
    b = choose_labelling(W, "constellation")
    cycles = standard_cycles(W)
    report = is_constellation(W.hypergraph, b, cycles.phi, standard_witnesses(W, cycles))
    assert report.ok, report.violations[:3]
    assert max_cycles_per_edge(cycles.phi) <= 2


def test_witnesses_exist_exactly_for_even_generators():
    # (s1 s2)^3 has odd multiplicities, so only the s1 s3 wheel's C cycles fold
    P = s4_presentation()
    assert not is_collegial(P).ok
    W = build_wagon_wheel(P)
    cycles = standard_cycles(W)
    witnesses = standard_witnesses(W, cycles)
    for t, label in enumerate(cycles.phi_labels()):
        if label[0] == "B":
            assert t in witnesses
        else:
            s = W.letter(label[1], label[2])
            even = all(r.letters.count(s) % 2 == 0 for r in P.relations)
            assert (t in witnesses) == even


def test_xyxy_is_a_constellation():
    W = build_wagon_wheel(XYXY)
    b = choose_labelling(W, "constellation")
    cycles = standard_cycles(W)
    witnesses = standard_witnesses(W, cycles)
    assert len(witnesses) == len(cycles.phi)
    assert is_constellation(W.hypergraph, b, cycles.phi, witnesses).ok


def test_shared_x_layer_two_label_breaks_stellar():
    W = build_wagon_wheel(SHARED_X)
    cycles = standard_cycles(W)
    b = {v: 0 for v in W.hypergraph.vertices}
    b[W.v(0, 1, 2)] = 1
    hit = [C for C in cycles.phi if W.v(0, 1, 2) in C.vertices]
    assert hit
    for C in hit:
        assert not is_stellar(W.hypergraph, b, C, budget=1000)


# -- suns -----------------------------------------------------------------------------------------


def test_is_sun_negative_cases():
    from wheelwright.fixtures import hypergraph_from_edges

    assert is_sun(hypergraph_from_edges("ab", {"x": ("a", "b"), "y": ("a",)})) is None
    two_triangles = hypergraph_from_edges("abcdef", {
        **{f"e{t}": pair for t, pair in enumerate(["ab", "bc", "ca", "de", "ef", "fd"])},
        **{f"r{v}": (v,) for v in "abcdef"}})
    assert is_sun(two_triangles) is None
    sun3 = hypergraph_from_edges("abc", {"ab": "ab", "bc": "bc", "ca": "ca",
                                         "ra": "a", "rb": "b", "rc": "c"})
    iso = is_sun(sun3)
    assert iso is not None and len(iso["cycle"]) == 3


# -- the cube with a tail ------------------------------------------------------------------------


def _cycles(H, extra):
    return [H.sub(c["vertices"], c["edges"]) for c in cube_tail_cycles(extra)]


def test_cube_with_tail_constellation():
    H, b = cube_with_tail()
    report = is_constellation(H, b, _cycles(H, False))
    assert report.ok, report.violations


def test_cube_with_tail_extra_cycle_fails_condition_c():
    H, b = cube_with_tail()
    report = is_constellation(H, b, _cycles(H, True))
    assert not report.ok
    assert any(v["condition"] == "c" for v in report.violations)
    verdict = stellar_verdict(H, b, _cycles(H, True)[4])
    assert verdict.stellar is False
