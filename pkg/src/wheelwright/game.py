"""Linear systems over GF(2), their non-local games, and operator solutions.

Game convention: a referee picks a constraint ``v`` and a variable ``e`` in
its support, uniformly among such pairs.  Alice answers an assignment to the
support of ``v`` satisfying the constraint, Bob answers a bit for ``e``, and
they win when the two agree on ``e``.  A constraint with empty support is
asked with a null question to Bob and is won exactly when it has a valid
answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Mapping

import numpy as np

from .hypergraph import Hypergraph, hypergraph_from_json
from .presentation import FreeWord, InvPresentation, InvWord, Presentation

__all__ = [
    "LinearSystem",
    "NonlocalGame",
    "OperatorSolution",
    "OperatorReport",
    "CapExceeded",
    "to_linear_system",
    "linear_system_from_json",
    "solve_gf2",
    "classical_perfect_strategy",
    "inconsistency_certificate",
    "to_game",
    "classical_value",
    "verify_operator_solution",
    "operator_solution_from_json",
    "pauli_magic_square_solution",
    "builtin",
    "BUILTINS",
]


@dataclass(frozen=True)
class LinearSystem:
    """``Ax = b`` over GF(2).  Row ``v`` lists the variables with odd
    multiplicity; ``reduced`` records incidences dropped for being even."""

    variables: tuple[str, ...]
    rows: tuple[tuple[str, tuple[str, ...], int], ...]
    reduced: tuple[tuple[str, str, int], ...] = ()

    def matrix(self) -> np.ndarray:
        col = {e: i for i, e in enumerate(self.variables)}
        A = np.zeros((len(self.rows), len(self.variables)), dtype=np.uint8)
        for r, (_, support, _) in enumerate(self.rows):
            for e in support:
                A[r, col[e]] = 1
        return A

    def rhs(self) -> np.ndarray:
        return np.array([b for _, _, b in self.rows], dtype=np.uint8)

    def satisfied_by(self, x: Mapping[str, int]) -> bool:
        return all(sum(x[e] for e in support) % 2 == b for _, support, b in self.rows)

    def to_json(self) -> dict:
        data = {"vars": list(self.variables),
                "rows": [{"v": v, "support": list(s), "b": b} for v, s, b in self.rows]}
        if self.reduced:
            data["reduced"] = [{"v": v, "e": e, "multiplicity": m} for v, e, m in self.reduced]
        return data


def to_linear_system(H: Hypergraph, b: Mapping[str, int] | None = None) -> LinearSystem:
    b = b or {}
    rows, reduced = [], []
    for v in H.vertices:
        support = []
        for e, m in H.edges_at(v).items():
            if m % 2:
                support.append(e)
            if m > 1:
                reduced.append((v, e, m))
        rows.append((v, tuple(support), int(b.get(v, 0)) % 2))
    return LinearSystem(H.edges, tuple(rows), tuple(reduced))


def linear_system_from_json(data: Mapping) -> LinearSystem:
    """Accepts the linear-system format or a labelled hypergraph."""
    if "rows" not in data:
        return to_linear_system(*hypergraph_from_json(data))
    variables = tuple(data["vars"])
    known = set(variables)
    rows = []
    for row in data["rows"]:
        support = tuple(row["support"])
        unknown = set(support) - known
        if unknown:
            raise ValueError(f"row {row['v']!r} uses undeclared variable {sorted(unknown)[0]!r}")
        parity = {}
        for e in support:
            parity[e] = parity.get(e, 0) ^ 1
        rows.append((str(row["v"]), tuple(e for e in dict.fromkeys(support) if parity[e]),
                     int(row.get("b", 0)) % 2))
    return LinearSystem(variables, tuple(rows))


# -- GF(2) elimination ------------------------------------------------------

@dataclass(frozen=True)
class GF2Solution:
    rank: int
    assignment: dict[str, int] | None
    certificate: tuple[str, ...] | None  # rows summing to 0 = 1 when inconsistent


def solve_gf2(ls: LinearSystem) -> GF2Solution:
    """Gaussian elimination with rows as bitmasks; each reduced row also
    carries the set of original rows it was built from."""
    col = {e: i for i, e in enumerate(ls.variables)}
    pivots: dict[int, tuple[int, int, int]] = {}  # pivot column -> (mask, rhs, origin)
    certificate = None
    for r, (_, support, rhs) in enumerate(ls.rows):
        mask = 0
        for e in support:
            mask ^= 1 << col[e]
        origin = 1 << r
        while mask:
            top = mask.bit_length() - 1
            if top not in pivots:
                break
            pmask, prhs, porigin = pivots[top]
            mask ^= pmask
            rhs ^= prhs
            origin ^= porigin
        if mask:
            pivots[mask.bit_length() - 1] = (mask, rhs, origin)
        elif rhs and certificate is None:
            certificate = tuple(ls.rows[i][0] for i in range(len(ls.rows)) if origin >> i & 1)
    if certificate is not None:
        return GF2Solution(len(pivots), None, certificate)
    value = 0
    for top in sorted(pivots):
        mask, rhs, _ = pivots[top]
        lower = mask & ~(1 << top)
        if bin(lower & value).count("1") % 2 != rhs:
            value |= 1 << top
    x = {e: value >> col[e] & 1 for e in ls.variables}
    return GF2Solution(len(pivots), x, None)


def classical_perfect_strategy(ls: LinearSystem) -> dict[str, int] | None:
    """A solution of ``Ax = b`` over GF(2), or ``None``."""
    return solve_gf2(ls).assignment


def inconsistency_certificate(ls: LinearSystem) -> tuple[str, ...] | None:
    """Rows whose GF(2) sum reads ``0 = 1``, or ``None`` if solvable."""
    return solve_gf2(ls).certificate


# -- games --------------------------------------------------------------------

@dataclass(frozen=True)
class NonlocalGame:
    system: LinearSystem
    alice_questions: tuple[str, ...]
    bob_questions: tuple[str, ...]
    alice_answers: Mapping[str, tuple[tuple[int, ...], ...]]
    question_pairs: tuple[tuple[str, str | None], ...]

    def support(self, v: str) -> tuple[str, ...]:
        return self._support[v]

    def __post_init__(self):
        object.__setattr__(self, "_support", {v: s for v, s, _ in self.system.rows})

    def wins(self, v: str, e: str | None, alice: tuple[int, ...] | None, bob: int | None) -> bool:
        if alice is None:
            return False
        if e is None:
            return True
        return alice[self._support[v].index(e)] == bob

    def to_json(self) -> dict:
        return {
            "distribution": "uniform over question pairs",
            "alice_questions": list(self.alice_questions),
            "bob_questions": list(self.bob_questions),
            "bob_answers": [0, 1],
            "alice_answers": {v: {"variables": list(self._support[v]),
                                  "answers": [list(a) for a in self.alice_answers[v]]}
                              for v in self.alice_questions},
            "question_pairs": [[v, e] for v, e in self.question_pairs],
            "win": "alice's value for bob's variable equals bob's bit",
        }


def to_game(ls: LinearSystem) -> NonlocalGame:
    answers = {}
    pairs: list[tuple[str, str | None]] = []
    for v, support, rhs in ls.rows:
        answers[v] = tuple(a for a in product((0, 1), repeat=len(support)) if sum(a) % 2 == rhs)
        pairs += [(v, e) for e in support] if support else [(v, None)]
    return NonlocalGame(ls, tuple(v for v, _, _ in ls.rows), ls.variables, answers, tuple(pairs))


class CapExceeded(RuntimeError):
    def __init__(self, needed: int, cap: int):
        super().__init__(f"{needed} alice strategies exceed the cap of {cap}")
        self.needed = needed
        self.cap = cap


def classical_value(game: NonlocalGame, cap: int = 1_000_000) -> Fraction:
    """Best deterministic winning probability.

    Alice's deterministic strategies are enumerated; for each one Bob's best
    response is computed variable by variable, which is exact because Bob's
    payoff is a sum of independent per-variable terms.  ``cap`` bounds the
    number of Alice strategies enumerated.
    """
    rows = list(game.alice_questions)
    options = [game.alice_answers[v] or (None,) for v in rows]
    needed = 1
    for o in options:
        needed *= len(o)
    if needed > cap:
        raise CapExceeded(needed, cap)
    total = len(game.question_pairs)
    if total == 0:
        return Fraction(1)
    pairs_by_row: dict[str, list[str | None]] = {v: [] for v in rows}
    for v, e in game.question_pairs:
        pairs_by_row[v].append(e)
    best = -1
    for choice in product(*options):
        null_wins = 0
        ones: dict[str, int] = {}
        zeros: dict[str, int] = {}
        for v, answer in zip(rows, choice):
            for e in pairs_by_row[v]:
                if answer is None:
                    continue
                if e is None:
                    null_wins += 1
                elif answer[game.support(v).index(e)]:
                    ones[e] = ones.get(e, 0) + 1
                else:
                    zeros[e] = zeros.get(e, 0) + 1
        score = null_wins + sum(max(ones.get(e, 0), zeros.get(e, 0)) for e in set(ones) | set(zeros))
        best = max(best, score)
        if best == total:
            break
    return Fraction(best, total)


# -- operator solutions ---------------------------------------------------------

@dataclass
class OperatorSolution:
    dimension: int
    operators: dict[str, np.ndarray]
    tolerance: float = 1e-9


@dataclass
class OperatorReport:
    ok: bool
    dimension: int
    tolerance: float
    max_residual: dict[str, float]
    failures: list[dict] = field(default_factory=list)
    vertex_signs: dict[str, int] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "dimension": self.dimension, "tolerance": self.tolerance,
                "max_residual": self.max_residual, "vertex_signs": self.vertex_signs,
                "failures": self.failures}


def _residual(M: np.ndarray) -> float:
    return float(np.max(np.abs(M))) if M.size else 0.0


def verify_operator_solution(H: Hypergraph, b: Mapping[str, int] | None, sol: OperatorSolution
                             ) -> OperatorReport:
    """Check the solution-group relations on explicit matrices.

    ``vertex_signs`` records ``+1``/``-1`` when a vertex product is close to
    ``+I``/``-I`` and ``0`` otherwise.
    """
    b = b or {}
    d = sol.dimension
    missing = [e for e in H.edges if e not in sol.operators]
    if missing:
        raise ValueError(f"no operator given for edge {missing[0]!r}")
    for e in H.edges:
        if sol.operators[e].shape != (d, d):
            raise ValueError(f"operator for {e!r} has shape {sol.operators[e].shape}, expected {(d, d)}")
    X = {e: np.asarray(sol.operators[e], dtype=complex) for e in H.edges}
    eye = np.eye(d, dtype=complex)
    tol = sol.tolerance
    failures: list[dict] = []
    worst = {"involution": 0.0, "self_adjoint": 0.0, "commutation": 0.0, "vertex_product": 0.0}

    def record(check: str, where, r: float) -> None:
        worst[check] = max(worst[check], r)
        if r > tol:
            failures.append({"check": check, "at": where, "residual": r})

    for e in H.edges:
        record("involution", e, _residual(X[e] @ X[e] - eye))
        record("self_adjoint", e, _residual(X[e] - X[e].conj().T))
    seen: set[tuple[str, str]] = set()
    for v in H.vertices:
        for e1, e2 in combinations(H.edges_at(v), 2):
            if (e1, e2) not in seen:
                seen.add((e1, e2))
                record("commutation", [e1, e2], _residual(X[e1] @ X[e2] - X[e2] @ X[e1]))
    signs = {}
    for v in H.vertices:
        P = eye.copy()
        for e, m in H.edges_at(v).items():
            for _ in range(m):
                P = P @ X[e]
        target = -eye if int(b.get(v, 0)) % 2 else eye
        record("vertex_product", v, _residual(P - target))
        signs[v] = 1 if _residual(P - eye) <= tol else -1 if _residual(P + eye) <= tol else 0
    return OperatorReport(not failures, d, tol, worst, failures, signs)


def _matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def operator_solution_from_json(data: Mapping) -> OperatorSolution:
    ops = {e: _matrix_from_json(m) for e, m in data["operators"].items()}
    d = int(data.get("dimension", next(iter(ops.values())).shape[0] if ops else 1))
    for e, m in ops.items():
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator for {e!r} is not square")
    return OperatorSolution(d, ops, float(data.get("tolerance", 1e-9)))


def operator_solution_to_json(sol: OperatorSolution) -> dict:
    return {"dimension": sol.dimension, "tolerance": sol.tolerance,
            "operators": {e: [[[float(z.real), float(z.imag)] for z in row] for row in m]
                          for e, m in sol.operators.items()}}


# -- built-ins ------------------------------------------------------------------

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_MAGIC_TABLE = (("XI", "IX", "XX"), ("IZ", "ZI", "ZZ"), ("XZ", "ZX", "YY"))


def _magic_square() -> tuple[Hypergraph, dict[str, int]]:
    edges = tuple(f"x{i}{j}" for i in range(1, 4) for j in range(1, 4))
    rows = [f"r{i}" for i in range(1, 4)]
    cols = [f"c{j}" for j in range(1, 4)]
    incidence = {}
    for i in range(1, 4):
        for j in range(1, 4):
            incidence[(f"r{i}", f"x{i}{j}")] = 1
            incidence[(f"c{j}", f"x{i}{j}")] = 1
    b = {v: 0 for v in rows + cols}
    b["c3"] = 1
    return Hypergraph(tuple(rows + cols), edges, incidence), b


def pauli_magic_square_solution() -> OperatorSolution:
    ops = {}
    for i, row in enumerate(_MAGIC_TABLE, start=1):
        for j, label in enumerate(row, start=1):
            ops[f"x{i}{j}"] = np.kron(_PAULI[label[0]], _PAULI[label[1]])
    return OperatorSolution(4, ops)


def _higman_hnn() -> Presentation:
    w = FreeWord.of
    cycle = ["a", "b", "c", "d"]
    relations = [w(g, h, f"{g}^-", f"{h}^-", f"{h}^-") for g, h in zip(cycle, cycle[1:] + cycle[:1])]
    relations.append(w("J", "J"))
    relations += [w("J", g, "J^-", f"{g}^-") for g in ("a", "b", "c", "d", "x")]
    relations.append(w("x", "a", "x^-", "a^-", "J^-"))
    return Presentation(("a", "b", "c", "d", "J", "x"), tuple(relations), w("J"))


def _shared_x_presentation() -> InvPresentation:
    return InvPresentation(("x", "y", "z", "u", "v"),
                           (InvWord.of("x", "y", "x", "z"), InvWord.of("x", "u", "v", "u")))


BUILTINS = {
    "magic_square": _magic_square,
    "higman_hnn_presentation": _higman_hnn,
    "figure3_invpresentation": _shared_x_presentation,
}


def builtin(name: str):
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown built-in {name!r}; choose from {', '.join(BUILTINS)}") from None
