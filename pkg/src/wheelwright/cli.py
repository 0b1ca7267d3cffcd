"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 bad input.  Every command prints
a JSON run report on stdout; the report is byte-stable for identical inputs
unless ``--timestamps`` is given.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Sequence

from . import fixtures, render
from .game import (
    CapExceeded,
    builtin,
    classical_perfect_strategy,
    classical_value,
    inconsistency_certificate,
    linear_system_from_json,
    operator_solution_from_json,
    to_game,
    to_linear_system,
    verify_operator_solution,
)
from .hypergraph import (
    MorphismError,
    hypergraph_from_json,
    morphism_from_json,
    solution_group_presentation,
    validate_morphism,
)
from .passes import CompileError, compile as compile_presentation
from .picture import (
    Picture,
    PictureError,
    apply_morphism,
    boundary_word,
    certifies,
    character,
    sign,
    validate,
    validate_g_labels,
    validate_h_labels,
)
from .presentation import (
    InvPresentation,
    Presentation,
    PresentationError,
    PresentationSyntaxError,
    is_collegial,
    parse,
    parse_free_word,
    parse_inv_word,
)
from .wagonwheel import (
    build_wagon_wheel,
    constellation_rule_violations,
    is_constellation,
    is_ilabelling,
    standard_cycles,
    standard_witnesses,
)

OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    """Unreadable or malformed input; maps to exit code 2."""


# -- helpers -------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def _json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _digest(path: str) -> str:
    try:
        return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def _presentation(path: str) -> Presentation | InvPresentation:
    try:
        return parse(_read(path))
    except PresentationSyntaxError as exc:
        raise InputError(f"{path}:{exc}") from None
    except PresentationError as exc:
        raise InputError(f"{path}: {exc}") from None


def _hypergraph(path: str):
    try:
        return hypergraph_from_json(_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a hypergraph: {exc}") from None


def _picture(path: str) -> Picture:
    try:
        return Picture.from_json(_json(path))
    except PictureError as exc:
        raise InputError(f"{path}: {exc}") from None


def _write_json(path: Path, data) -> str:
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return str(path)


class Report:
    def __init__(self, command: str, timestamps: bool = False):
        self.data: dict = {"command": command, "inputs": {}}
        self.timestamps = timestamps
        self.started = time.time()

    def input(self, path: str) -> None:
        self.data["inputs"][path] = _digest(path)

    def __setitem__(self, key, value) -> None:
        self.data[key] = value

    def emit(self, ok: bool, out: Path | None = None) -> int:
        self.data["ok"] = ok
        if self.timestamps:
            self.data["timestamps"] = {"started": self.started, "finished": time.time()}
        text = json.dumps(self.data, indent=2) + "\n"
        if out is not None:
            out.write_text(text, encoding="utf-8")
        sys.stdout.write(text)
        return OK if ok else FAILED


def _involutions(text: str | None, P) -> list:
    if not text:
        return []
    return [parse_free_word(w.strip(), P.generators) for w in text.split(",") if w.strip()]


# -- compile -------------------------------------------------------------------


def cmd_compile(args) -> int:
    report = Report("compile", args.timestamps)
    report.input(args.presentation)
    P = _presentation(args.presentation)
    try:
        involutions = _involutions(args.involutions, P)
    except PresentationError as exc:
        raise InputError(f"--involutions: {exc}") from None
    if args.already_involutive and not isinstance(P, InvPresentation):
        raise InputError("--already-involutive needs an 'invpresentation' input")
    if not args.already_involutive and isinstance(P, InvPresentation):
        raise InputError("input is an involutive presentation; pass --already-involutive")
    try:
        result = compile_presentation(P, involutions, already_involutive=args.already_involutive,
                                      skip_collegial_check=args.skip_collegial_check)
    except CompileError as exc:
        report["error"] = str(exc)
        return report.emit(False)
    except PresentationError as exc:
        raise InputError(str(exc)) from None

    out = Path(args.output or Path(args.presentation).with_suffix("").name + ".out")
    out.mkdir(parents=True, exist_ok=True)
    W, b = result.wagonwheel, result.labelling
    H = W.hypergraph
    ls = to_linear_system(H, b)
    artifacts = {
        "hypergraph": _write_json(out / "hypergraph.json", W.to_json(b)),
        "labelling": _write_json(out / "labelling.json", {v: b.get(v, 0) for v in H.vertices}),
        "linear_system": _write_json(out / "linear_system.json", ls.to_json()),
        "game": _write_json(out / "game.json", to_game(ls).to_json()),
        "solution_group": _write_json(out / "solution_group.json",
                                      solution_group_presentation(H, b).to_json()),
        "trace": _write_json(out / "trace.json", {
            "stages": [{"name": name, "relations": [str(r) for r in S.relations],
                        "generators": list(S.generators)} for name, S in result.stages],
            "generator_map": result.generator_trace.to_json() if result.generator_trace else None,
            "involution_edges": result.involution_edges,
            "notes": result.notes,
        }),
    }
    stats_path = out / "stats.tsv"
    with stats_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(["stage", "generators", "relations", "total_length"])
        for name, S in result.stages:
            writer.writerow([name, len(S.generators), len(S.relations), sum(len(r) for r in S.relations)])
        writer.writerow([])
        writer.writerow(["quantity", "value"])
        for key, value in result.stats.items():
            writer.writerow([key, value])
    artifacts["stats"] = str(stats_path)
    if args.emit == "dot":
        path = out / "wagonwheel.dot"
        path.write_text(render.wagonwheel_dot(W, b), encoding="utf-8")
        artifacts["dot"] = str(path)
    if args.figures:
        artifacts["figure_wheels"] = str(render.plot_wheels(W, b, out / "wheels.png"))
        artifacts["figure_stages"] = str(render.plot_stage_sizes(result.stages, out / "stages.png"))
    report["stats"] = result.stats
    report["collegial"] = result.collegial
    report["notes"] = result.notes
    report["artifacts"] = artifacts
    return report.emit(True, out / "report.json")


# -- check ---------------------------------------------------------------------


def cmd_check_picture(args) -> int:
    report = Report("check picture", args.timestamps)
    report.input(args.file)
    P = _picture(args.file)
    structural = validate(P)
    report["valid"] = structural.as_dict()
    ok = structural.ok
    if ok and args.presentation:
        report.input(args.presentation)
        G = _presentation(args.presentation)
        if not isinstance(G, InvPresentation):
            raise InputError("--presentation must be an 'invpresentation'")
        labels = validate_g_labels(P, G)
        report["labels"] = labels.as_dict()
        ok = labels.ok
        if ok:
            report["boundary"] = list(boundary_word(P))
            report["sign"] = sign(P, G)
            if args.certifies is not None:
                word = _word(args.certifies, G.generators)
                report["certifies"] = certifies(P, word, G)
                ok = report.data["certifies"]
    elif ok and args.hypergraph:
        report.input(args.hypergraph)
        H, b = _hypergraph(args.hypergraph)
        labels = validate_h_labels(P, H)
        report["labels"] = labels.as_dict()
        ok = labels.ok
        if ok:
            report["boundary"] = list(boundary_word(P))
            report["character"] = character(P, H)
            if args.certifies is not None:
                word = _word(args.certifies, H.edges)
                report["certifies"] = certifies(P, word, H, b)
                ok = report.data["certifies"]
    elif args.certifies is not None and ok:
        raise InputError("--certifies needs --presentation or --hypergraph")
    if ok and args.emit == "dot":
        sys.stderr.write(render.picture_dot(P))
    return report.emit(ok)


def _word(text: str, generators):
    try:
        return parse_inv_word(text, generators)
    except PresentationError as exc:
        raise InputError(f"--certifies: {exc}") from None


def cmd_check_morphism(args) -> int:
    report = Report("check morphism", args.timestamps)
    for path in (args.file, args.src, args.dst):
        report.input(path)
    H1, _ = _hypergraph(args.src)
    H2, _ = _hypergraph(args.dst)
    try:
        phi = morphism_from_json(_json(args.file), H1, H2)
    except (MorphismError, KeyError) as exc:
        raise InputError(f"{args.file}: {exc}") from None
    result = validate_morphism(phi, all_violations=True)
    report["morphism"] = result.as_dict()
    ok = result.ok
    if ok and args.apply:
        report.input(args.apply)
        P = _picture(args.apply)
        try:
            image = apply_morphism(phi, P)
        except PictureError as exc:
            report["apply"] = {"ok": False, "error": str(exc)}
            return report.emit(False)
        summary = {"ok": True, "size_before": P.size, "size_after": image.size,
                   "boundary": list(boundary_word(image))}
        if args.out:
            summary["written"] = _write_json(Path(args.out), image.to_json())
        report["apply"] = summary
    return report.emit(ok)


def cmd_check_constellation(args) -> int:
    report = Report("check constellation", args.timestamps)
    report.input(args.file)
    H, b = _hypergraph(args.file)
    witnesses = None
    if args.cycles:
        report.input(args.cycles)
        entries = _json(args.cycles).get("cycles", [])
        try:
            phi = [H.sub(c["vertices"], c["edges"]) for c in entries]
        except (KeyError, ValueError) as exc:
            raise InputError(f"{args.cycles}: {exc}") from None
        names = [c.get("name", str(t)) for t, c in enumerate(entries)]
    else:
        W = _wheel_from_index(_json(args.file), H)
        cycles = standard_cycles(W)
        phi = cycles.phi
        names = ["".join(str(x) for x in label) for label in cycles.phi_labels()]
        witnesses = standard_witnesses(W, cycles)
    result = is_constellation(H, b, phi, witnesses, budget=args.budget)
    data = result.as_dict()
    data["cycles"] = names
    report["constellation"] = data
    return report.emit(result.ok)


def _wheel_from_index(data: dict, H):
    index = data.get("index")
    if not index:
        raise InputError("hypergraph has no 'index' block; pass --cycles or use a compile output")
    text = "invpresentation\ngens: " + " ".join(index["generators"]) + "\n"
    text += "".join(f"rel: {w['relation']}\n" for w in index["wheels"])
    W = build_wagon_wheel(parse(text))
    if W.hypergraph != H:
        raise InputError("the 'index' block does not describe this hypergraph")
    return W


def cmd_check_collegial(args) -> int:
    report = Report("check collegial", args.timestamps)
    report.input(args.file)
    P = _presentation(args.file)
    if not isinstance(P, InvPresentation):
        raise InputError("collegiality is defined for 'invpresentation' inputs")
    result = is_collegial(P)
    report["collegial"] = result.as_dict()
    return report.emit(result.ok)


def cmd_check_labelling(args) -> int:
    report = Report("check labelling", args.timestamps)
    report.input(args.file)
    data = _json(args.file)
    H, b = _hypergraph(args.file)
    W = _wheel_from_index(data, H)
    ilabelling = is_ilabelling(W, b)
    rules = constellation_rule_violations(W, b)
    report["ilabelling"] = ilabelling
    report["constellation_rules"] = rules
    return report.emit(ilabelling and not rules)


# -- analyze ---------------------------------------------------------------------


def cmd_analyze(args) -> int:
    report = Report("analyze", args.timestamps)
    if args.builtin:
        try:
            value = builtin(args.builtin)
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
        if not isinstance(value, tuple):
            raise InputError(f"built-in {args.builtin!r} is a presentation, not a system")
        H, b = value
        report["builtin"] = args.builtin
    elif args.system:
        report.input(args.system)
        data = _json(args.system)
        if "incidence" in data:
            H, b = _hypergraph(args.system)
        else:
            H, b = None, None
            try:
                ls = linear_system_from_json(data)
            except (KeyError, TypeError, ValueError) as exc:
                raise InputError(f"{args.system}: not a linear system: {exc}") from None
    else:
        raise InputError("give a system file or --builtin")
    if H is not None:
        ls = to_linear_system(H, b)
    strategy = classical_perfect_strategy(ls)
    report["variables"] = len(ls.variables)
    report["constraints"] = len(ls.rows)
    report["perfect_classical_strategy"] = strategy
    if strategy is None:
        report["certificate"] = list(inconsistency_certificate(ls))
    ok = True
    if args.classical_value:
        try:
            value = classical_value(to_game(ls), cap=args.cap)
            report["classical_value"] = f"{value.numerator}/{value.denominator}"
        except CapExceeded as exc:
            report["classical_value"] = None
            report["cap_exceeded"] = str(exc)
    if args.verify_ops:
        if H is None:
            raise InputError("--verify-ops needs a hypergraph (with incidence) or a built-in")
        report.input(args.verify_ops)
        try:
            sol = operator_solution_from_json(_json(args.verify_ops))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{args.verify_ops}: {exc}") from None
        try:
            ops = verify_operator_solution(H, b, sol)
        except ValueError as exc:
            raise InputError(f"{args.verify_ops}: {exc}") from None
        report["operators"] = ops.as_dict()
        ok = ops.ok
    return report.emit(ok)


# -- examples --------------------------------------------------------------------


def cmd_examples(args) -> int:
    if args.action == "list":
        for f in fixtures.FIXTURES.values():
            sys.stdout.write(f"{f.name}\t{f.filename}\t{f.description}\n")
        return OK
    names = list(fixtures.FIXTURES) if args.name == "all" else [args.name]
    for name in names:
        if name not in fixtures.FIXTURES:
            raise InputError(f"unknown example {name!r}; see 'examples list'")
    if args.output:
        target = Path(args.output)
        if len(names) > 1 or target.is_dir():
            target.mkdir(parents=True, exist_ok=True)
            for name in names:
                (target / fixtures.FIXTURES[name].filename).write_text(fixtures.shipped(name), encoding="utf-8")
                sys.stdout.write(str(target / fixtures.FIXTURES[name].filename) + "\n")
        else:
            target.write_text(fixtures.shipped(names[0]), encoding="utf-8")
            sys.stdout.write(str(target) + "\n")
    else:
        for name in names:
            sys.stdout.write(fixtures.shipped(name))
    return OK


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wheelwright", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--timestamps", action="store_true", help="add wall-clock times to the report")

    p = sub.add_parser("compile", help="presentation -> wagon wheel, linear system and game")
    p.add_argument("presentation")
    p.add_argument("-o", "--output", help="output directory (default: <input stem>.out)")
    p.add_argument("--involutions", default="",
                   help="comma-separated words to send to involution generators")
    p.add_argument("--already-involutive", action="store_true")
    p.add_argument("--skip-collegial-check", action="store_true")
    p.add_argument("--emit", choices=["dot"])
    p.add_argument("--figures", action="store_true", help="also write PNG figures (matplotlib)")
    common(p)
    p.set_defaults(func=cmd_compile)

    check = sub.add_parser("check", help="run a validator").add_subparsers(dest="kind", required=True)
    p = check.add_parser("picture")
    p.add_argument("file")
    labels = p.add_mutually_exclusive_group()
    labels.add_argument("--presentation", help="check as a G-picture over this presentation")
    labels.add_argument("--hypergraph", help="check as an H-picture over this hypergraph")
    p.add_argument("--certifies", help="word (leading J for odd parity) the picture should prove")
    p.add_argument("--emit", choices=["dot"], help="write DOT to stderr")
    common(p)
    p.set_defaults(func=cmd_check_picture)

    p = check.add_parser("morphism")
    p.add_argument("file")
    p.add_argument("--src", required=True)
    p.add_argument("--dst", required=True)
    p.add_argument("--apply", help="picture over --src to push forward")
    p.add_argument("--out", help="where to write the pushed-forward picture")
    common(p)
    p.set_defaults(func=cmd_check_morphism)

    p = check.add_parser("constellation")
    p.add_argument("file", help="hypergraph JSON (with b); a compile output needs no --cycles")
    p.add_argument("--cycles", help='JSON {"cycles": [{"vertices": [...], "edges": [...]}]}')
    p.add_argument("--budget", type=int, default=200_000, help="retraction search node budget")
    common(p)
    p.set_defaults(func=cmd_check_constellation)

    p = check.add_parser("collegial")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_check_collegial)

    p = check.add_parser("labelling")
    p.add_argument("file", help="compile output hypergraph.json")
    common(p)
    p.set_defaults(func=cmd_check_labelling)

    p = sub.add_parser("analyze", help="classical and operator analysis of a linear system")
    p.add_argument("system", nargs="?")
    p.add_argument("--builtin")
    p.add_argument("--classical-value", action="store_true")
    p.add_argument("--cap", type=int, default=1_000_000, help="maximum number of Alice strategies")
    p.add_argument("--verify-ops", metavar="FILE")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("examples", help="list or write the bundled examples")
    p.add_argument("action", choices=["list", "emit"])
    p.add_argument("name", nargs="?", default="all")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return BAD_INPUT
    except (CompileError, AssertionError) as exc:
        sys.stderr.write(f"check failed: {exc}\n")
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
