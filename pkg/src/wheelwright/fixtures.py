"""Worked examples, built in code and shipped serialized under ``data/``.

``build(name)`` returns the file text; the shipped copy must match it
byte for byte, which the test suite checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Callable

from .game import builtin, operator_solution_to_json, pauli_magic_square_solution, to_linear_system
from .hypergraph import EPS, GeneralizedMorphism, Hypergraph
from .picture import Picture, picture_from_drawing
from .presentation import InvPresentation, InvWord, serialize

__all__ = ["Fixture", "FIXTURES", "build", "shipped", "load_json", "hypergraph_from_edges",
           "cube", "subdivided_cube", "cube_with_tail", "deletion_source", "deletion_target", "deletion_morphism",
           "deletion_picture", "coxeter_picture", "parallel_hypergraph", "parallel_picture",
           "seven_vertex_disc_picture", "s4_presentation", "cube_tail_cycles"]


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def hypergraph_from_edges(vertices, edges: dict[str, tuple[str, ...]]) -> Hypergraph:
    """Edges given as vertex tuples; a repeated vertex raises the multiplicity."""
    inc: dict[tuple[str, str], int] = {}
    for e, ends in edges.items():
        for v in ends:
            inc[(v, e)] = inc.get((v, e), 0) + 1
    return Hypergraph(tuple(vertices), tuple(edges), inc)


# -- presentations -------------------------------------------------------------

SHARED_X_GRP = """\
# two relations sharing the generator x
invpresentation
gens: x y z u v
rel: x y x z
rel: x u v u
"""

BAD_GRP = """\
presentation
gens: a b
rel: a b c
"""


def s4_presentation() -> InvPresentation:
    w = InvWord.of
    return InvPresentation(("s1", "s2", "s3"), (
        w("s1", "s2", "s1", "s2", "s1", "s2"),
        w("s2", "s3", "s2", "s3", "s2", "s3"),
        w("s1", "s3", "s1", "s3"),
    ))


# -- cubes -----------------------------------------------------------------------

_CUBE_EDGES = ("12", "14", "15", "23", "26", "34", "37", "48", "56", "58", "67", "78")


def cube() -> Hypergraph:
    return hypergraph_from_edges("12345678", {e: (e[0], e[1]) for e in _CUBE_EDGES})


def subdivided_cube() -> Hypergraph:
    """Vertex 9 splits edge 23 into 29 and 39."""
    edges = {e: (e[0], e[1]) for e in _CUBE_EDGES if e != "23"}
    edges["29"] = ("2", "9")
    edges["39"] = ("3", "9")
    return hypergraph_from_edges("123456789", edges)


def cube_with_tail() -> tuple[Hypergraph, dict[str, int]]:
    H = subdivided_cube()
    H = Hypergraph(H.vertices, H.edges + ("9t",), {**H.incidence, ("9", "9t"): 1})
    b = {v: 0 for v in H.vertices}
    b["9"] = 1
    return H, b


def cube_tail_cycles(extra: bool = False) -> list[dict]:
    cycles = [
        {"name": "C1", "vertices": ["1", "2", "5", "6"], "edges": ["12", "26", "56", "15"]},
        {"name": "C2", "vertices": ["1", "4", "5", "8"], "edges": ["14", "48", "58", "15"]},
        {"name": "C3", "vertices": ["3", "4", "7", "8"], "edges": ["34", "48", "78", "37"]},
        {"name": "C4", "vertices": ["1", "2", "9", "3", "4"], "edges": ["12", "29", "39", "34", "14"]},
    ]
    if extra:
        cycles.append({"name": "C5", "vertices": ["2", "3", "6", "7", "9"],
                       "edges": ["29", "39", "37", "67", "26"]})
    return cycles


# -- morphism and picture of the deletion example --------------------------------


def deletion_source() -> Hypergraph:
    return hypergraph_from_edges("12345678", {
        "a": ("1", "2"), "b": ("2", "3"), "c": ("1", "4"), "d": ("3", "4"),
        "e": ("1", "5"), "f": ("4", "5"), "g": ("3", "7"), "h": ("4", "7"),
        "i": ("2",), "j": ("5", "6", "8"), "k": ("7", "6", "8"),
    })


def deletion_target() -> Hypergraph:
    return hypergraph_from_edges(["1'", "3'", "5'", "6'", "7'"], {
        "a'": ("1'", "3'"), "c'": ("1'", "3'", "7'", "5'"), "e'": ("1'", "5'"),
        "g'": ("3'", "7'"), "j'": ("5'", "6'"), "k'": ("6'", "7'"),
    })


def deletion_morphism() -> GeneralizedMorphism:
    vmap = {v: v + "'" for v in "13567"}
    vmap.update({"2": EPS, "4": EPS, "8": "6'"})
    emap = {e: e + "'" for e in "acegjk"}
    emap.update({"i": EPS, "b": "a'", "d": "c'", "f": "c'", "h": "c'"})
    return GeneralizedMorphism(deletion_source(), deletion_target(), vmap, emap)


def deletion_picture() -> Picture:
    at = {"2": (1.75, 6), "3": (3, 7.5), "1": (3, 4.5), "4": (4.25, 6), "7": (6.5, 8.5),
          "5": (6, 5), "6": (8.5, 4), "8": (6, 3), "5b": (4.25, 2)}
    labels = {v: v for v in at}
    labels["5b"] = "5"
    rim = {"bi": (0, 7), "bk": (10, 10), "be": (0, 0), "bf": (4.25, 0)}
    edges = [("i", "i", "2", "bi"), ("a", "a", "2", "1"), ("c", "c", "1", "4"), ("d", "d", "4", "3"),
             ("b", "b", "3", "2"), ("h", "h", "4", "7"), ("g", "g", "7", "3"), ("k", "k", "7", "bk"),
             ("e", "e", "1", "5", [(4.5, 4)]), ("f", "f", "5", "4"), ("j", "j", "5", "6"),
             ("k2", "k", "6", "8"), ("j2", "j", "8", "5b"), ("e2", "e", "5b", "be"),
             ("f2", "f", "5b", "bf")]
    return picture_from_drawing(at, labels, edges, rim, centre=(5, 5))


# -- other pictures -------------------------------------------------------------


def coxeter_picture() -> Picture:
    at = {"1": (5, 8), "2": (2, 5), "3": (8, 5), "4": (5, 2)}
    relation = {"1": "s2 s3 s2 s3 s2 s3", "2": "s1 s3 s1 s3", "3": "s1 s3 s1 s3",
                "4": "s1 s2 s1 s2 s1 s2"}
    rim = {f"t{k}": (x, 10) for k, x in enumerate((1, 3.5, 5, 6.5, 9), start=1)}
    rim.update({f"b{k}": (x, 0) for k, x in enumerate((1, 3.5, 5, 6.5, 9), start=1)})
    edges = [("e1", "s1", "t1", "2"), ("e2", "s2", "t2", "1"), ("e3", "s3", "t3", "1"),
             ("e4", "s2", "t4", "1"), ("e5", "s1", "t5", "3"), ("e6", "s3", "1", "2"),
             ("e7", "s2", "1", "4"), ("e8", "s3", "1", "3"), ("e9", "s3", "2", "b1"),
             ("e10", "s1", "2", "4"), ("e11", "s1", "3", "4"), ("e12", "s3", "3", "b5"),
             ("e13", "s2", "4", "b2"), ("e14", "s1", "4", "b3"), ("e15", "s2", "4", "b4")]
    return picture_from_drawing(at, relation, edges, rim, centre=(5, 5))


def parallel_hypergraph() -> tuple[Hypergraph, dict[str, int]]:
    H = hypergraph_from_edges("12", {"x": ("1", "2"), "y": ("1", "2"), "z": ("1", "2")})
    return H, {"1": 1, "2": 0}


def parallel_picture() -> Picture:
    at = {"p1": (0, 0), "p2": (3, 0)}
    edges = [("x", "x", "p2", "p1", [(1.5, -1)]), ("y", "y", "p2", "p1"),
             ("z", "z", "p2", "p1", [(1.5, 1)])]
    return picture_from_drawing(at, {"p1": "1", "p2": "2"}, edges, closed=True)


def seven_vertex_disc_picture() -> Picture:
    at = {"A": (2, 7), "B": (3, 5), "C": (2, 3), "D": (4, 3), "E": (4, 7), "F": (7, 6.5),
          "G": (7, 3.5)}
    rim = {"qA": (1, 8), "qE": (4.5, 10), "qD": (4.5, 0), "qC": (1, 2), "qF": (8, 9),
           "qG": (8, 1)}
    edges = [("e1", "", "qA", "A"), ("e2", "", "A", "B"), ("e3", "", "B", "C"),
             ("e4", "", "C", "D"), ("e5", "", "D", "B"), ("e6", "", "B", "E"), ("e7", "", "E", "A"),
             ("e8", "", "E", "qE"), ("e9", "", "D", "qD"), ("e10", "", "C", "qC"),
             ("e11", "", "qF", "F"), ("e12", "", "G", "qG"),
             ("e13", "", "F", "G", [(6.3, 5)]), ("e14", "", "F", "G", [(7.7, 5)])]
    return picture_from_drawing(at, {}, edges, rim, centre=(5, 5))


# -- registry ------------------------------------------------------------------


@dataclass(frozen=True)
class Fixture:
    name: str
    filename: str
    description: str
    make: Callable[[], str]


def _hg(pair) -> str:
    H, b = pair
    return dumps(H.to_json(b))


def _trivial_system() -> str:
    H = hypergraph_from_edges(["r1", "r2"], {"x": ("r1", "r2"), "y": ("r1",), "w": ("r2",)})
    return dumps(to_linear_system(H, {"r1": 1, "r2": 0}).to_json())


FIXTURES: dict[str, Fixture] = {f.name: f for f in [
    Fixture("fig3", "fig3.grp", "two-relation involutive presentation (not collegial)", lambda: SHARED_X_GRP),
    Fixture("higman", "higman.grp", "HNN extension of Higman's group, free-group mode",
            lambda: serialize(builtin("higman_hnn_presentation"))),
    Fixture("s4", "s4.grp", "Coxeter presentation of S4 with central J",
            lambda: serialize(s4_presentation())),
    Fixture("bad", "bad.grp", "uses an undeclared generator", lambda: BAD_GRP),
    Fixture("coxeter", "coxeter.json", "picture proving s1s2s3s2s1 = s3s2s1s2s3",
            lambda: dumps(coxeter_picture().to_json())),
    Fixture("parallel_h", "parallel_h.json", "x+y+z=1, x+y+z=0 as a hypergraph, b=(1,0)",
            lambda: _hg(parallel_hypergraph())),
    Fixture("parallel", "parallel.json", "closed picture with three parallel edges",
            lambda: dumps(parallel_picture().to_json())),
    Fixture("h1", "h1.json", "source hypergraph of the deletion example",
            lambda: dumps(deletion_source().to_json())),
    Fixture("h2", "h2.json", "target hypergraph of the deletion example",
            lambda: dumps(deletion_target().to_json())),
    Fixture("fig10", "fig10.json", "generalized morphism h1 -> h2",
            lambda: dumps(deletion_morphism().to_json())),
    Fixture("deletion_picture", "deletion_picture.json", "h1-picture for the fig10 morphism",
            lambda: dumps(deletion_picture().to_json())),
    Fixture("seven_vertex_disc", "seven_vertex_disc.json", "unlabelled disc picture with seven vertices",
            lambda: dumps(seven_vertex_disc_picture().to_json())),
    Fixture("cube", "cube.json", "graph of the cube", lambda: dumps(cube().to_json())),
    Fixture("cube_subdivided", "cube_subdivided.json", "cube with edge 23 subdivided by 9",
            lambda: dumps(subdivided_cube().to_json())),
    Fixture("cube_tail", "cube_tail.json", "subdivided cube with a size-one edge at 9, b9=1",
            lambda: _hg(cube_with_tail())),
    Fixture("cube_tail_phi", "cube_tail_phi.json", "cycles C1..C4 of cube_tail",
            lambda: dumps({"cycles": cube_tail_cycles()})),
    Fixture("cube_tail_phi_bad", "cube_tail_phi_bad.json", "C1..C4 plus the cycle through 2,3,6,7,9",
            lambda: dumps({"cycles": cube_tail_cycles(extra=True)})),
    Fixture("magic_square", "magic_square.json", "magic square system (one odd column)",
            lambda: _hg(builtin("magic_square"))),
    Fixture("pauli", "pauli.json", "4x4 Pauli operator solution of the magic square",
            lambda: dumps(operator_solution_to_json(pauli_magic_square_solution()))),
    Fixture("trivial", "trivial.json", "a consistent three-variable system", _trivial_system),
]}


def build(name: str) -> str:
    try:
        return FIXTURES[name].make()
    except KeyError:
        raise KeyError(f"unknown example {name!r}") from None


def shipped(name: str) -> str:
    return resources.files("wheelwright").joinpath("data", FIXTURES[name].filename).read_text()


def load_json(name: str):
    return json.loads(shipped(name))
