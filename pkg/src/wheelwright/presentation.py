"""Words and presentations over Z2.

Two flavours of presentation live here.  A :class:`Presentation` is an
ordinary finite presentation whose relations are free-group words, together
with a word naming the central element J.  An :class:`InvPresentation` is a
presentation by involutions: every generator squares to the identity and
relations carry an explicit power of the central involution J.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

__all__ = [
    "FreeWord",
    "InvWord",
    "Presentation",
    "InvPresentation",
    "PresentationError",
    "PresentationSyntaxError",
    "CollegialReport",
    "reduce",
    "cyclically_reduce",
    "symmetrize",
    "multiplicity",
    "adjacency_pairs",
    "is_cyclically_reduced",
    "is_collegial",
    "even_part",
    "parse",
    "serialize",
    "parse_free_word",
    "parse_inv_word",
]

RESERVED_J = "J"
_FORBIDDEN_IN_NAME = re.compile(r"[\s#^:]")


class PresentationError(ValueError):
    """A presentation or word is structurally invalid."""


class PresentationSyntaxError(PresentationError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class FreeWord:
    """A word in the free group: a tuple of ``(generator, sign)`` pairs."""

    letters: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        letters = tuple((str(g), int(e)) for g, e in self.letters)
        for g, e in letters:
            if e not in (1, -1):
                raise PresentationError(f"letter {g!r} has exponent {e}, expected +1 or -1")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def of(cls, *tokens: str) -> "FreeWord":
        """Build from tokens such as ``"a"`` and ``"a^-"``."""
        return cls(tuple(_free_token(t) for t in tokens))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[tuple[str, int]]:
        return iter(self.letters)

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def reduce(self) -> "FreeWord":
        out: list[tuple[str, int]] = []
        for g, e in self.letters:
            if out and out[-1] == (g, -e):
                out.pop()
            else:
                out.append((g, e))
        return FreeWord(tuple(out))

    def is_reduced(self) -> bool:
        return all(a != (b[0], -b[1]) for a, b in zip(self.letters, self.letters[1:]))

    def is_cyclically_reduced(self) -> bool:
        if not self.is_reduced():
            return False
        if len(self.letters) < 2:
            return True
        g, e = self.letters[0]
        return self.letters[-1] != (g, -e)

    def cyclically_reduce(self) -> "FreeWord":
        """Reduce, then peel inverse pairs off the two ends."""
        letters = list(self.reduce().letters)
        lo, hi = 0, len(letters)
        while hi - lo >= 2 and letters[hi - 1] == (letters[lo][0], -letters[lo][1]):
            lo += 1
            hi -= 1
        return FreeWord(tuple(letters[lo:hi]))

    def generators(self) -> set[str]:
        return {g for g, _ in self.letters}

    def text(self) -> str:
        return " ".join(g if e == 1 else f"{g}^-" for g, e in self.letters)

    def __str__(self) -> str:
        return self.text() or "1"


@dataclass(frozen=True)
class InvWord:
    """An element ``J^parity s_1 ... s_n`` of the free product of Z2's times Z2."""

    parity: int = 0
    letters: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parity", int(self.parity) % 2)
        object.__setattr__(self, "letters", tuple(str(s) for s in self.letters))

    @classmethod
    def of(cls, *letters: str, parity: int = 0) -> "InvWord":
        return cls(parity, tuple(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[str]:
        return iter(self.letters)

    def __mul__(self, other: "InvWord") -> "InvWord":
        return InvWord(self.parity + other.parity, self.letters + other.letters)

    def is_reduced(self) -> bool:
        return all(a != b for a, b in zip(self.letters, self.letters[1:]))

    def is_cyclically_reduced(self) -> bool:
        if not self.is_reduced():
            return False
        return len(self.letters) < 2 or self.letters[0] != self.letters[-1]

    def even(self) -> "InvWord":
        return InvWord(0, self.letters)

    def rotate(self, k: int) -> "InvWord":
        n = len(self.letters)
        if n == 0:
            return self
        k %= n
        return InvWord(self.parity, self.letters[k:] + self.letters[:k])

    def reversed(self) -> "InvWord":
        return InvWord(self.parity, tuple(reversed(self.letters)))

    def text(self) -> str:
        parts = ([RESERVED_J] if self.parity else []) + list(self.letters)
        return " ".join(parts)

    def __str__(self) -> str:
        return self.text() or "1"


def _dedupe(items: Iterable) -> tuple:
    seen = set()
    out = []
    for item in items:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return tuple(out)


def _check_generator_names(generators: Sequence[str], involutive: bool) -> None:
    seen = set()
    for g in generators:
        if not g or _FORBIDDEN_IN_NAME.search(g):
            raise PresentationError(f"invalid generator name {g!r}")
        if involutive and g == RESERVED_J:
            raise PresentationError("J is reserved and cannot be declared as a generator")
        if g in seen:
            raise PresentationError(f"duplicate generator {g!r}")
        seen.add(g)


@dataclass(frozen=True)
class Presentation:
    """A finite presentation ``<S : R>`` plus a word representing J."""

    generators: tuple[str, ...]
    relations: tuple[FreeWord, ...] = ()
    j_word: FreeWord = field(default_factory=FreeWord)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relations", _dedupe(self.relations))
        _check_generator_names(self.generators, involutive=False)
        declared = set(self.generators)
        for word in (*self.relations, self.j_word):
            missing = word.generators() - declared
            if missing:
                raise PresentationError(f"undeclared generator {sorted(missing)[0]!r} in {word}")


@dataclass(frozen=True)
class InvPresentation:
    """A presentation by involutions over Z2, written ``Inv<S : R>``."""

    generators: tuple[str, ...]
    relations: tuple[InvWord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relations", _dedupe(self.relations))
        _check_generator_names(self.generators, involutive=True)
        declared = set(self.generators)
        for word in self.relations:
            missing = set(word.letters) - declared
            if missing:
                raise PresentationError(f"undeclared generator {sorted(missing)[0]!r} in {word}")

    @property
    def total_length(self) -> int:
        return sum(len(r) for r in self.relations)


def reduce(w: InvWord) -> InvWord:
    """Cancel adjacent equal letters until none remain.  Parity is untouched."""
    out: list[str] = []
    for s in w.letters:
        if out and out[-1] == s:
            out.pop()
        else:
            out.append(s)
    return InvWord(w.parity, tuple(out))


def cyclically_reduce(w: InvWord) -> InvWord:
    letters = reduce(w).letters
    lo, hi = 0, len(letters)
    while hi - lo >= 2 and letters[lo] == letters[hi - 1]:
        lo += 1
        hi -= 1
    return InvWord(w.parity, letters[lo:hi])


def is_cyclically_reduced(w: InvWord) -> bool:
    return w.is_cyclically_reduced()


def symmetrize(relations: Iterable[InvWord]) -> frozenset[InvWord]:
    """All rotations and reversed rotations of every relation."""
    out = set()
    for r in relations:
        n = max(len(r), 1)
        backwards = r.reversed()
        for k in range(n):
            out.add(r.rotate(k))
            out.add(backwards.rotate(k))
    return frozenset(out)


def multiplicity(s: str, r: InvWord) -> int:
    return sum(1 for x in r.letters if x == s)


def adjacency_pairs(r: InvWord) -> set[frozenset[str]]:
    letters = r.letters
    pairs = {frozenset((a, b)) for a, b in zip(letters, letters[1:]) if a != b}
    if len(letters) >= 2 and letters[0] != letters[-1]:
        pairs.add(frozenset((letters[0], letters[-1])))
    return pairs


def _neighbours(s: str, r: InvWord) -> list[str]:
    """Letters adjacent to occurrences of ``s``, cyclically, in position order."""
    letters = r.letters
    n = len(letters)
    out = []
    for i, x in enumerate(letters):
        if x != s:
            continue
        for j in ((i - 1) % n, (i + 1) % n):
            t = letters[j]
            if t != s and t not in out:
                out.append(t)
    return out


@dataclass(frozen=True)
class CollegialReport:
    ok: bool
    condition: str | None = None
    message: str = ""
    witness: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def as_dict(self) -> dict:
        return {"ok": self.ok, "condition": self.condition, "message": self.message,
                "witness": self.witness}


def is_collegial(P: InvPresentation) -> CollegialReport:
    """Check the three collegial conditions, reporting the first failure."""
    for idx, r in enumerate(P.relations):
        if not r.is_cyclically_reduced():
            return CollegialReport(False, "a", f"relation {idx} ({r}) is not cyclically reduced",
                                   {"relation": idx, "word": r.text()})
    for idx, r in enumerate(P.relations):
        if len(r) <= 1:
            return CollegialReport(False, "b", f"relation {idx} ({r}) has length {len(r)}",
                                   {"relation": idx, "word": r.text()})

    odd_in: dict[str, int] = {}
    for idx, r in enumerate(P.relations):
        for s in r.letters:
            if s not in odd_in and multiplicity(s, r) % 2 == 1:
                odd_in[s] = idx

    for i0, r0 in enumerate(P.relations):
        odd_here = [s for s in _dedupe(r0.letters) if multiplicity(s, r0) % 2 == 1]
        for s in odd_here:
            for i1, r1 in enumerate(P.relations):
                for t in _neighbours(s, r1):
                    if t in odd_in:
                        i2 = odd_in[t]
                        witness = {
                            "s": s, "t": t,
                            "r0": i0, "r1": i1, "r_prime": i2,
                            "mult_s_r0": multiplicity(s, r0),
                            "mult_t_r_prime": multiplicity(t, P.relations[i2]),
                        }
                        msg = (f"{s} is odd in {r0}, {t} is adjacent to it in {r1}, "
                               f"and {t} has odd multiplicity {witness['mult_t_r_prime']} "
                               f"in {P.relations[i2]}")
                        return CollegialReport(False, "c", msg, witness)
    return CollegialReport(True)


def even_part(P: InvPresentation) -> InvPresentation:
    return InvPresentation(P.generators, tuple(r.even() for r in P.relations))


# ---------------------------------------------------------------------------
# text format


def _free_token(tok: str) -> tuple[str, int]:
    if tok.endswith("^-"):
        return tok[:-2], -1
    return tok, 1


def _tokens(text: str, start_col: int) -> list[tuple[str, int]]:
    return [(m.group(0), start_col + m.start()) for m in re.finditer(r"\S+", text)]


def parse(text: str) -> Presentation | InvPresentation:
    """Parse the line-oriented presentation format.

    Raises :class:`PresentationSyntaxError` with a 1-based line and column.
    """
    header = None
    gens: list[str] | None = None
    gens_pos: dict[str, tuple[int, int]] = {}
    j_tokens: list[tuple[str, int, int]] | None = None
    rels: list[list[tuple[str, int, int]]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if header is None:
            word = line.strip()
            if word not in ("presentation", "invpresentation"):
                col = len(line) - len(line.lstrip()) + 1
                raise PresentationSyntaxError(
                    "expected 'presentation' or 'invpresentation'", lineno, col)
            header = word
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            col = len(line) - len(line.lstrip()) + 1
            raise PresentationSyntaxError("expected 'gens:', 'J:' or 'rel:'", lineno, col)
        key_stripped = key.strip()
        offset = len(key) + 2
        toks = [(t, lineno, c) for t, c in _tokens(rest, offset)]
        if key_stripped == "gens":
            if gens is not None:
                raise PresentationSyntaxError("generators declared twice", lineno, 1)
            gens = []
            for t, ln, c in toks:
                if _FORBIDDEN_IN_NAME.search(t):
                    raise PresentationSyntaxError(f"invalid generator name {t!r}", ln, c)
                if header == "invpresentation" and t == RESERVED_J:
                    raise PresentationSyntaxError("J is reserved and cannot be a generator", ln, c)
                if t in gens_pos:
                    raise PresentationSyntaxError(f"duplicate generator {t!r}", ln, c)
                gens_pos[t] = (ln, c)
                gens.append(t)
        elif key_stripped == "J":
            if header != "presentation":
                raise PresentationSyntaxError("'J:' lines only appear in free-group mode", lineno, 1)
            if j_tokens is not None:
                raise PresentationSyntaxError("J word declared twice", lineno, 1)
            j_tokens = toks
        elif key_stripped == "rel":
            rels.append(toks)
        else:
            col = len(key) - len(key.lstrip()) + 1
            raise PresentationSyntaxError(f"unknown key {key_stripped!r}", lineno, col)

    if header is None:
        raise PresentationSyntaxError("empty input", 1, 1)
    if gens is None:
        raise PresentationSyntaxError("missing 'gens:' line", len(text.splitlines()) or 1, 1)

    declared = set(gens)

    def check(name: str, ln: int, c: int) -> None:
        if name not in declared:
            raise PresentationSyntaxError(f"undeclared generator {name!r}", ln, c)

    if header == "presentation":
        def free(toks):
            letters = []
            for t, ln, c in toks:
                g, e = _free_token(t)
                check(g, ln, c)
                letters.append((g, e))
            return FreeWord(tuple(letters))

        return Presentation(tuple(gens), tuple(free(r) for r in rels),
                            free(j_tokens or []))

    words = []
    for toks in rels:
        parity = 0
        if toks and toks[0][0] == RESERVED_J:
            parity = 1
            toks = toks[1:]
        letters = []
        for t, ln, c in toks:
            if t == RESERVED_J:
                raise PresentationSyntaxError("J may only lead a relation", ln, c)
            check(t, ln, c)
            letters.append(t)
        words.append(InvWord(parity, tuple(letters)))
    return InvPresentation(tuple(gens), tuple(words))


def serialize(P: Presentation | InvPresentation) -> str:
    if isinstance(P, InvPresentation):
        lines = ["invpresentation", "gens: " + " ".join(P.generators)]
        lines += [("rel: " + r.text()).rstrip() for r in P.relations]
    else:
        lines = ["presentation", "gens: " + " ".join(P.generators),
                 ("J: " + P.j_word.text()).rstrip()]
        lines += [("rel: " + r.text()).rstrip() for r in P.relations]
    return "\n".join(line.rstrip() for line in lines) + "\n"


def parse_free_word(text: str, generators: Iterable[str] | None = None) -> FreeWord:
    word = FreeWord(tuple(_free_token(t) for t in text.split()))
    if generators is not None:
        missing = word.generators() - set(generators)
        if missing:
            raise PresentationError(f"undeclared generator {sorted(missing)[0]!r}")
    return word


def parse_inv_word(text: str, generators: Iterable[str] | None = None) -> InvWord:
    toks = text.split()
    parity = 0
    if toks and toks[0] == RESERVED_J:
        parity, toks = 1, toks[1:]
    if RESERVED_J in toks:
        raise PresentationError("J may only lead a word")
    word = InvWord(parity, tuple(toks))
    if generators is not None:
        missing = set(toks) - set(generators)
        if missing:
            raise PresentationError(f"undeclared generator {sorted(missing)[0]!r}")
    return word
