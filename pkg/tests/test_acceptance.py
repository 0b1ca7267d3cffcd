"""Acceptance criteria, one test each.

Run under pytest to get a PASS/FAIL line per criterion in the terminal
summary, or directly with ``python tests/test_acceptance.py``.  Timing limits
are wall-clock and measured around the computation only.
"""

import json
import random
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from randpics import hypergraph_of, predicted_boundary, random_morphism, random_picture
from smallhg import (
    classes,
    composition_failures,
    local_composition_failures,
    topology_failures,
)
from wheelwright.fixtures import (
    build,
    coxeter_picture,
    cube,
    cube_tail_cycles,
    cube_with_tail,
    parallel_hypergraph,
    parallel_picture,
    s4_presentation,
    shipped,
    subdivided_cube,
    FIXTURES,
)
from wheelwright.game import (
    builtin,
    classical_perfect_strategy,
    classical_value,
    inconsistency_certificate,
    pauli_magic_square_solution,
    to_game,
    to_linear_system,
    verify_operator_solution,
)
from wheelwright.hypergraph import (
    find_retraction,
    hypergraph_from_json,
    is_identity_on,
    morphism_from_json,
    neighbourhood,
    validate_morphism,
)
from wheelwright.passes import compile, make_collegial
from wheelwright.picture import (
    Picture,
    apply_morphism,
    boundary_word,
    certifies,
    collapse_facial_components,
    validate,
    validate_g_labels,
    validate_h_labels,
    wagon_relation_picture,
)
from wheelwright.presentation import InvPresentation, InvWord, is_collegial, parse, serialize
from wheelwright.wagonwheel import build_wagon_wheel, is_constellation, standard_cycles, standard_witnesses

SHARED_X = InvPresentation(("x", "y", "z", "u", "v"),
                           (InvWord.of("x", "y", "x", "z"), InvWord.of("x", "u", "v", "u")))
COXETER_WORD = ("s1", "s2", "s3", "s2", "s1", "s3", "s2", "s1", "s2", "s3")


class Stopwatch:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def cyclic_equal(a, b):
    a, b = list(a), list(b)
    return len(a) == len(b) and (not a or any(a[k:] + a[:k] == b for k in range(len(a))))


def random_invpresentation(rng):
    gens = tuple(f"g{i}" for i in range(rng.randint(1, 6)))
    rels = tuple(InvWord(rng.randint(0, 1), tuple(rng.choice(gens) for _ in range(rng.randint(1, 10))))
                 for _ in range(rng.randint(1, 6)))
    return InvPresentation(gens, rels)


@pytest.fixture(scope="module")
def higman():
    return compile(builtin("higman_hnn_presentation"))


@pytest.mark.criterion(1, "wagon-wheel counts 3M / 4M+|S|")
def test_criterion_1_wagon_wheel_counts(record_property):
    with Stopwatch() as clock:
        H = build_wagon_wheel(SHARED_X).hypergraph
        rng = random.Random(1)
        mismatches = 0
        for _ in range(100):
            P = random_invpresentation(rng)
            G = build_wagon_wheel(P).hypergraph
            M = sum(len(r.letters) for r in P.relations)
            mismatches += (len(G.vertices), len(G.edges)) != (3 * M, 4 * M + len(P.generators))
    record_property("shared_x", f"{len(H.vertices)}v/{len(H.edges)}e")
    record_property("random_mismatches", mismatches)
    record_property("seconds", f"{clock.seconds:.3f}")
    assert (len(H.vertices), len(H.edges)) == (24, 37)
    assert mismatches == 0
    assert clock.seconds < 1


@pytest.mark.criterion(2, "collegiality check and make_collegial")
def test_criterion_2_collegiality(record_property):
    with Stopwatch() as clock:
        rejected = is_collegial(SHARED_X)
        K, _, _ = make_collegial(builtin("higman_hnn_presentation"), [])
        accepted = is_collegial(K)
    record_property("witness", json.dumps(rejected.witness, sort_keys=True, default=str))
    record_property("seconds", f"{clock.seconds:.3f}")
    assert not rejected.ok and rejected.witness
    assert accepted.ok
    assert clock.seconds < 1


@pytest.mark.criterion(3, "Higman group end to end")
def test_criterion_3_higman_end_to_end(record_property):
    with Stopwatch() as clock:
        result = compile(builtin("higman_hnn_presentation"))
        W, b = result.wagonwheel, result.labelling
        H = W.hypergraph
        cycles = standard_cycles(W)
        report = is_constellation(H, b, cycles.phi, standard_witnesses(W, cycles))
        pictures_ok = True
        for i, r in enumerate(result.final.relations):
            P = wagon_relation_picture(W, b, i)
            pictures_ok &= validate(P).ok and validate_h_labels(P, H).ok and certifies(P, r, H, b)
    s = result.stats
    record_property("M", s["M"])
    record_property("S", s["S"])
    record_property("vertices", s["vertices"])
    record_property("edges", s["edges"])
    record_property("seconds", f"{clock.seconds:.3f}")
    assert s["vertices"] == len(H.vertices) == 3 * s["M"]
    assert s["edges"] == len(H.edges) == 4 * s["M"] + s["S"]
    assert report.ok, report.violations[:3]
    assert pictures_ok
    assert 300 <= s["edges"] <= 2000
    assert clock.seconds < 10


@pytest.mark.criterion(4, "retracts of the cube and the subdivided cube")
def test_criterion_4_retracts(record_property):
    times = []
    G = cube()
    with Stopwatch() as clock:
        sub = neighbourhood(G.sub("1234"))
        cube_res = find_retraction(G, sub)
    times.append(clock.seconds)
    S = subdivided_cube()
    with Stopwatch() as clock:
        none_res = find_retraction(S, neighbourhood(S.sub("12349")))
    times.append(clock.seconds)
    with Stopwatch() as clock:
        top_res = find_retraction(S, neighbourhood(S.sub("5678")))
    times.append(clock.seconds)
    record_property("statuses", f"{cube_res.status},{none_res.status},{top_res.status}")
    record_property("seconds", ",".join(f"{t:.3f}" for t in times))
    assert cube_res.status == "found"
    assert validate_morphism(cube_res.morphism).ok and is_identity_on(cube_res.morphism, sub)
    assert none_res.status == "none"
    assert top_res.status == "found" and validate_morphism(top_res.morphism).ok
    assert max(times) < 5


@pytest.mark.criterion(5, "cube with a tail: constellation verdicts")
def test_criterion_5_cube_with_tail(record_property):
    H, b = cube_with_tail()
    good = is_constellation(H, b, [H.sub(c["vertices"], c["edges"]) for c in cube_tail_cycles(False)])
    bad = is_constellation(H, b, [H.sub(c["vertices"], c["edges"]) for c in cube_tail_cycles(True)])
    conditions = sorted({v["condition"] for v in bad.violations})
    record_property("extra_cycle_fails", ",".join(conditions))
    assert good.ok, good.violations
    assert not bad.ok and "c" in conditions


@pytest.mark.criterion(6, "picture calculus")
def test_criterion_6_pictures(record_property, higman):
    assert certifies(coxeter_picture(), InvWord(0, COXETER_WORD), s4_presentation())
    H, b = parallel_hypergraph()
    assert certifies(parallel_picture(), InvWord(1, ()), H, b)

    rng = random.Random(20240601)
    failures = 0
    for _ in range(500):
        P = random_picture(rng)
        phi = random_morphism(rng, hypergraph_of(P), steps=rng.randint(1, 6))
        out = apply_morphism(phi, P)
        failures += not (validate(out).ok and validate_h_labels(out, phi.target).ok
                         and out.size <= P.size
                         and cyclic_equal(boundary_word(out), predicted_boundary(phi, P)))
    record_property("random_pair_failures", failures)

    W, lab = higman.wagonwheel, higman.labelling
    single = 0
    for i, r in enumerate(higman.final.relations):
        out = collapse_facial_components(wagon_relation_picture(W, lab, i), W, lab)
        single += out.size == 1 and validate_g_labels(out, higman.final).ok and certifies(out, r, higman.final)
    record_property("collapsed_to_one_vertex", f"{single}/{len(higman.final.relations)}")
    assert failures == 0
    assert single == len(higman.final.relations)


@pytest.mark.criterion(7, "magic square game analysis")
def test_criterion_7_magic_square(record_property):
    H, b = builtin("magic_square")
    ls = to_linear_system(H, b)
    assert classical_perfect_strategy(ls) is None
    cert = inconsistency_certificate(ls)
    rows = {v: (s, rhs) for v, s, rhs in ls.rows}
    parity = {}
    for v in cert:
        for e in rows[v][0]:
            parity[e] = parity.get(e, 0) ^ 1
    assert not any(parity.values()) and sum(rows[v][1] for v in cert) % 2 == 1
    with Stopwatch() as clock:
        value = classical_value(to_game(ls))
    report = verify_operator_solution(H, b, pauli_magic_square_solution())
    sol = pauli_magic_square_solution()
    column = sol.operators["x13"] @ sol.operators["x23"] @ sol.operators["x33"]
    residual = max(report.max_residual.values())
    record_property("value", str(value))
    record_property("max_residual", f"{residual:.2e}")
    record_property("seconds", f"{clock.seconds:.3f}")
    assert value == Fraction(17, 18)
    assert report.ok and sol.dimension == 4 and residual < 1e-9
    assert report.vertex_signs["c3"] == -1 and np.allclose(column, -np.eye(4), atol=1e-9)
    assert clock.seconds < 30


@pytest.mark.criterion(8, "topology and composition laws on small instances")
def test_criterion_8_laws(record_property):
    reps = classes(4, 5, 1)
    top_bad = topology_failures(reps)
    local_count, local_bad = local_composition_failures(max_edges=5, max_mult=2)
    global_count, global_bad = composition_failures(classes(2, 2, 2))
    record_property("topology_instances", len(reps))
    record_property("vertex_star_configurations", local_count)
    record_property("global_composites", global_count)
    assert top_bad == []
    assert local_bad == []
    assert global_bad == []


@pytest.mark.criterion(9, "serialization round trips")
def test_criterion_9_serialization(record_property):
    checked = 0
    for name, fx in FIXTURES.items():
        text = shipped(name)
        assert text == build(name), name
        if fx.filename.endswith(".grp"):
            if name == "bad":
                continue
            P = parse(text)
            assert parse(serialize(P)) == P and serialize(parse(serialize(P))) == serialize(P)
        else:
            data = json.loads(text)
            assert json.dumps(data, indent=2) + "\n" == text
            if "darts" in text and "boundary" in data:
                assert json.dumps(Picture.from_json(data).to_json(), indent=2) + "\n" == text
        checked += 1
    H1, _ = hypergraph_from_json(json.loads(shipped("h1")))
    H2, _ = hypergraph_from_json(json.loads(shipped("h2")))
    phi = morphism_from_json(json.loads(shipped("fig10")), H1, H2)
    assert json.dumps(phi.to_json(), indent=2) + "\n" == shipped("fig10")
    record_property("fixtures", checked)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
