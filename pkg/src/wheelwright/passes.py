"""Compiler passes: free presentation -> collegial involutive presentation ->
wagon wheel -> vertex labelling.

Every intermediate presentation is kept in :class:`CompilationResult.stages`
so a run can be audited stage by stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .presentation import (
    FreeWord,
    InvPresentation,
    InvWord,
    Presentation,
    PresentationError,
    is_collegial,
    reduce,
)
from .wagonwheel import LabellingError, WagonWheel, build_wagon_wheel, choose_labelling

__all__ = [
    "GeneratorMap",
    "CompilationResult",
    "CompileError",
    "involution_embed",
    "normalize_for_embedding",
    "make_collegial",
    "compile",
    "z_name",
]


class CompileError(RuntimeError):
    """A pipeline self-check failed."""


def z_name(s: str, which: int) -> str:
    return f"{s}.z{which}"


@dataclass(frozen=True)
class GeneratorMap:
    """Images of source generators as involutive words over the target."""

    images: Mapping[str, InvWord]
    j_image: InvWord = InvWord(1, ())

    def apply(self, w: FreeWord) -> InvWord:
        letters: list[str] = []
        parity = 0
        for g, e in w.letters:
            image = self.images[g]
            parity += image.parity
            letters += image.letters if e == 1 else list(reversed(image.letters))
        return reduce(InvWord(parity, tuple(letters)))

    def to_json(self) -> dict:
        return {"images": {g: w.text() for g, w in self.images.items()},
                "J": self.j_image.text() or "1"}


def _phi(letter: tuple[str, int], k: int) -> tuple[str, ...]:
    g, e = letter
    pair = (z_name(g, 1), z_name(g, 2)) if e == 1 else (z_name(g, 2), z_name(g, 1))
    return pair * k


def involution_embed(P: Presentation, k: Mapping[str, int] | None = None
                     ) -> tuple[InvPresentation, GeneratorMap]:
    """Replace each generator ``s`` by the product ``(s.z1 s.z2)^{k_s}``.

    The output relations are the images of the input relations followed by
    ``J * image(J-word)``.
    """
    k = {s: 2 for s in P.generators} | dict(k or {})
    for s in P.generators:
        if k[s] < 1:
            raise ValueError(f"k[{s!r}] = {k[s]} must be positive")
    for r in (*P.relations, P.j_word):
        if not r.is_reduced():
            raise PresentationError(f"relation {r} is not reduced")

    def image(w: FreeWord) -> tuple[str, ...]:
        return tuple(z for letter in w.letters for z in _phi(letter, k[letter[0]]))

    generators = tuple(z for s in P.generators for z in (z_name(s, 1), z_name(s, 2)))
    relations = [InvWord(0, image(r)) for r in P.relations]
    relations.append(InvWord(1, image(P.j_word)))
    gmap = GeneratorMap({s: InvWord(0, _phi((s, 1), k[s])) for s in P.generators},
                        InvWord(0, image(P.j_word)))
    return InvPresentation(generators, tuple(relations)), gmap


def _fresh(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    t = 1
    while f"{base}.{t}" in taken:
        t += 1
    return f"{base}.{t}"


@dataclass(frozen=True)
class Normalized:
    presentation: Presentation
    involution_reps: tuple[FreeWord, ...]
    notes: tuple[str, ...] = ()


def normalize_for_embedding(P: Presentation, involutions: Sequence[FreeWord] = ()) -> Normalized:
    """Make relations cyclically reduced and nonempty, make J a generator,
    and pick a nonempty representative for every involution."""
    generators = list(P.generators)
    taken = set(generators)
    notes: list[str] = []
    relations: list[FreeWord] = []
    for r in P.relations:
        c = r.cyclically_reduce()
        if c != r:
            notes.append(f"cyclically reduced {r} to {c}")
        if len(c):
            relations.append(c)
        else:
            notes.append(f"dropped trivial relation {r}")

    identity_rep: list[str] = []

    def identity() -> FreeWord:
        if not identity_rep:
            z = _fresh("z", taken)
            taken.add(z)
            generators.append(z)
            relations.append(FreeWord(((z, 1),)))
            identity_rep.append(z)
            notes.append(f"added generator {z} with relation {z} as an identity representative")
        return FreeWord(((identity_rep[0], 1),))

    j = P.j_word.cyclically_reduce()
    if len(j) == 0:
        j_word = identity()
    elif len(j) == 1 and j.letters[0][1] == 1:
        j_word = j
    else:
        jg = _fresh("Jg", taken)
        taken.add(jg)
        generators.append(jg)
        relations.append((FreeWord(((jg, 1),)) * j.inverse()).cyclically_reduce())
        j_word = FreeWord(((jg, 1),))
        notes.append(f"added generator {jg} equal to {j}")

    reps = []
    for w in involutions:
        r = w.reduce()
        reps.append(r if len(r) else identity())
    return Normalized(Presentation(tuple(generators), tuple(relations), j_word),
                      tuple(reps), tuple(notes))


def make_collegial(P: Presentation, involutions: Sequence[FreeWord] = (), k: int = 2
                   ) -> tuple[InvPresentation, GeneratorMap, list[str]]:
    """A collegial presentation containing ``P``'s group, with every listed
    involution sent to a single generator.  Returns the presentation, the
    generator map from ``P``'s generators and the ids of those generators."""
    result, gmap, bars, _ = _make_collegial(P, involutions, k)
    return result, gmap, bars


def _make_collegial(P: Presentation, involutions: Sequence[FreeWord], k: int):
    if k < 2 or k % 2:
        raise ValueError("k must be a positive even number")
    norm = normalize_for_embedding(P, involutions)
    embedded, gmap = involution_embed(norm.presentation, {s: k for s in norm.presentation.generators})
    taken = set(embedded.generators)
    bars, extra = [], []
    for idx, rep in enumerate(norm.involution_reps):
        name = f"w.{idx}"
        if name in taken:
            raise CompileError(f"fresh generator {name} collides with an existing generator")
        taken.add(name)
        bars.append(name)
        image = gmap.apply(rep)
        extra.append(InvWord(image.parity, (name,) + image.letters))
    result = InvPresentation(embedded.generators + tuple(bars), embedded.relations + tuple(extra))
    report = is_collegial(result)
    if not report.ok:
        raise CompileError(f"make_collegial produced a non-collegial presentation: {report.message}")
    images = {s: gmap.images[s] for s in P.generators}
    return result, GeneratorMap(images, gmap.j_image), bars, (norm, embedded)


@dataclass
class CompilationResult:
    stages: list[tuple[str, Presentation | InvPresentation]]
    wagonwheel: WagonWheel
    labelling: dict[str, int]
    generator_trace: GeneratorMap | None
    involution_edges: dict[str, str]
    stats: dict
    notes: list[str] = field(default_factory=list)
    collegial: dict | None = None

    @property
    def final(self) -> InvPresentation:
        return self.wagonwheel.source


def compile(P: Presentation | InvPresentation, involutions: Sequence[FreeWord] = (), *,
            already_involutive: bool = False, skip_collegial_check: bool = False,
            k: int = 2) -> CompilationResult:
    """Run the whole pipeline and check the size formulas of the output."""
    notes: list[str] = []
    if already_involutive:
        if not isinstance(P, InvPresentation):
            raise PresentationError("--already-involutive expects an involutive presentation")
        if involutions:
            raise PresentationError("involutions cannot be designated for an involutive input")
        final = P
        stages: list = [("input", P)]
        trace = None
        bars: list[str] = []
        report = is_collegial(final)
        if not report.ok and not skip_collegial_check:
            raise CompileError(f"input is not collegial: {report.message}")
    else:
        if not isinstance(P, Presentation):
            raise PresentationError("expected a free-group presentation; "
                                    "use already_involutive for involutive input")
        final, trace, bars, (norm, embedded) = _make_collegial(P, involutions, k)
        notes += list(norm.notes)
        stages = [("input", P), ("normalized", norm.presentation), ("embedded", embedded),
                  ("collegial", final)]
        report = is_collegial(final)

    W = build_wagon_wheel(final)
    try:
        b = choose_labelling(W, "constellation")
    except LabellingError:
        if report.ok:
            raise
        b = choose_labelling(W, "any")
        notes.append("constellation labelling unavailable for a non-collegial input; used 'any'")

    H = W.hypergraph
    M = final.total_length
    S = len(final.generators)
    stats = {
        "relations": len(final.relations),
        "M": M,
        "S": S,
        "vertices": len(H.vertices),
        "edges": len(H.edges),
        "linear_relations": len(H.vertices),
        "expected_vertices": 3 * M,
        "expected_edges": 4 * M + S,
    }
    if stats["vertices"] != stats["expected_vertices"] or stats["edges"] != stats["expected_edges"]:
        raise CompileError(f"size formulas violated: {stats}")
    involution_edges = {str(w): bars[t] for t, w in enumerate(involutions)} if bars else {}
    for e in involution_edges.values():
        if not H.has_edge(e):
            raise CompileError(f"involution generator {e} is not a wagon-wheel edge")
    return CompilationResult(stages, W, b, trace, involution_edges, stats, notes, report.as_dict())
