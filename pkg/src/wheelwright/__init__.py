"""Compile finitely presented groups into hypergraphs, linear systems and
nonlocal games, and manipulate pictures (diagrammatic proofs) over them."""

from .presentation import (
    FreeWord,
    InvPresentation,
    InvWord,
    Presentation,
    PresentationError,
    is_collegial,
    parse,
    serialize,
)
from .hypergraph import EPS, GeneralizedMorphism, Hypergraph, Subhypergraph
from .wagonwheel import WagonWheel, build_wagon_wheel, standard_cycles
from .passes import CompilationResult, compile
from .picture import Picture, apply_morphism, certifies
from .game import LinearSystem, NonlocalGame, classical_value, to_game, to_linear_system

__version__ = "0.1.0"

__all__ = [
    "EPS",
    "CompilationResult",
    "FreeWord",
    "GeneralizedMorphism",
    "Hypergraph",
    "InvPresentation",
    "InvWord",
    "LinearSystem",
    "NonlocalGame",
    "Picture",
    "Presentation",
    "PresentationError",
    "Subhypergraph",
    "WagonWheel",
    "apply_morphism",
    "build_wagon_wheel",
    "certifies",
    "classical_value",
    "compile",
    "is_collegial",
    "parse",
    "serialize",
    "standard_cycles",
    "to_game",
    "to_linear_system",
]
