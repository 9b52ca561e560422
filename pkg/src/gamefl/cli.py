"""Command-line entry point.

Games, morphisms and reports share one JSON record syntax.  A game record
is ``{"runs": [{"stem": [...], "tail": n}, ...], "alice": [...], "name": ...}``
and a morphism record is ``{"source": name, "target": name, "map": [...]}``.
An embedding into G_FL is ``{"source": name, "image": [run, ...]}``.

Exit codes: 0 success or property holds, 1 property fails, 2 usage or
parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Iterable

from .constructions import Span, coproduct, pushout
from .core import FiniteGame, RunSpec, validate_game
from .enumeration import canonical_games
from .errors import GameError
from .fraisse import GflEmbedding, back_and_forth, extend_embedding, fraisse_sequence, verify_fraisse
from .limits import GflView, colimit, example_chain, new_branches
from .metric import met_of_game
from .morphisms import GameMorphism, are_isomorphic, enumerate_embeddings
from .smallness import SETTINGS, wfs_verdict

GAME_KEYS = {"runs", "alice", "name"}
RUN_KEYS = {"stem", "tail"}
MORPH_KEYS = {"source", "target", "map"}
IMAGE_KEYS = {"source", "image"}


class ParseError(Exception):
    pass


# records


def _nat(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"{what} must be an integer, got {x!r}")
    return x


def _keys(obj, allowed: set, required: set, what: str) -> None:
    if not isinstance(obj, dict):
        raise ParseError(f"{what} must be an object")
    extra = set(obj) - allowed
    if extra:
        raise ParseError(f"{what} has unknown keys {sorted(extra)}")
    missing = required - set(obj)
    if missing:
        raise ParseError(f"{what} lacks keys {sorted(missing)}")


def run_from_record(obj) -> RunSpec:
    _keys(obj, RUN_KEYS, RUN_KEYS, "run")
    if not isinstance(obj["stem"], list):
        raise ParseError("stem must be a list")
    # Built raw so that a non-canonical stem reaches validation instead of being normalized.
    return RunSpec(tuple(_nat(x, "move") for x in obj["stem"]), _nat(obj["tail"], "tail"))


def run_to_record(r: RunSpec) -> dict:
    return {"stem": list(r.stem), "tail": r.tail}


def game_from_record(obj) -> FiniteGame:
    """Parse without validating; :func:`validate_game` reports violations."""
    _keys(obj, GAME_KEYS, {"runs", "alice"}, "game")
    if not isinstance(obj["runs"], list) or not isinstance(obj["alice"], list):
        raise ParseError("runs and alice must be lists")
    runs = tuple(run_from_record(r) for r in obj["runs"])
    alice = frozenset(_nat(a, "alice index") for a in obj["alice"])
    name = obj.get("name")
    if name is not None and not isinstance(name, str):
        raise ParseError("name must be a string")
    return FiniteGame(runs, alice, name)


def game_to_record(g: FiniteGame) -> dict:
    out: dict[str, Any] = {"runs": [run_to_record(r) for r in g.runs], "alice": sorted(g.alice)}
    if g.name is not None:
        out["name"] = g.name
    return out


def morph_to_record(m: GameMorphism) -> dict:
    return {"source": m.source.name, "target": m.target.name, "map": list(m.run_map)}


def morph_from_record(obj, source: FiniteGame, target: FiniteGame) -> GameMorphism:
    _keys(obj, MORPH_KEYS, {"map"}, "morphism")
    for key, g in (("source", source), ("target", target)):
        if obj.get(key) is not None and g.name is not None and obj[key] != g.name:
            raise ParseError(f"morphism {key} {obj[key]!r} does not name {g.name!r}")
    if not isinstance(obj["map"], list):
        raise ParseError("map must be a list")
    run_map = tuple(_nat(x, "map entry") for x in obj["map"])
    if len(run_map) != len(source.runs) or any(not 0 <= x < len(target.runs) for x in run_map):
        raise ParseError("map indices out of range")
    return GameMorphism(source, target, run_map)


def image_from_record(obj, source: FiniteGame) -> GflEmbedding:
    _keys(obj, IMAGE_KEYS, {"image"}, "embedding")
    if not isinstance(obj["image"], list):
        raise ParseError("image must be a list")
    return GflEmbedding(source, tuple(RunSpec.make(r.stem, r.tail) for r in map(run_from_record, obj["image"])))


def image_to_record(f: GflEmbedding) -> dict:
    return {"source": f.source.name, "image": [run_to_record(r) for r in f.image]}


def load_records(path: str) -> list:
    """One JSON value (an object or a list of objects) or JSON Lines."""
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        try:
            return [json.loads(line) for line in text.splitlines() if line.strip()]
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None
    return value if isinstance(value, list) else [value]


def load_one(path: str) -> Any:
    records = load_records(path)
    if len(records) != 1:
        raise ParseError(f"{path}: expected one record, found {len(records)}")
    return records[0]


def load_game(path: str) -> FiniteGame:
    g = game_from_record(load_one(path))
    report = validate_game(g)
    if not report.ok:
        raise report.errors[0]
    return g


# output


class Out:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def emit(self, record: dict, text: str | Iterable[str]) -> None:
        if self.fmt == "records":
            print(json.dumps(record, sort_keys=True), file=self.stream)
        else:
            for line in [text] if isinstance(text, str) else text:
                print(line, file=self.stream)


def _moment(t) -> str:
    return "⟨" + ",".join(map(str, t)) + "⟩"


# commands


def cmd_validate(args, out: Out) -> int:
    status = 0
    for path in args.paths:
        for k, obj in enumerate(load_records(path)):
            g = game_from_record(obj)
            report = validate_game(g)
            label = g.name or f"{path}#{k}"
            if report.ok:
                out.emit({"kind": "valid", "game": label}, f"{label}: ok")
                continue
            status = 1
            for e in report.errors:
                out.emit(
                    {"kind": "diagnostic", "game": label, "error": type(e).__name__, "message": str(e)},
                    f"{label}: {type(e).__name__}: {e}",
                )
    return status


def cmd_enumerate(args, out: Out) -> int:
    if args.max_runs < 1 or args.max_delta < 0:
        raise ParseError("need --max-runs >= 1 and --max-delta >= 0")
    for g in canonical_games(args.max_runs, args.max_delta):
        out.emit(game_to_record(g), str(g))
    return 0


def cmd_embed(args, out: Out) -> int:
    a, b = load_game(args.source), load_game(args.target)
    maps = enumerate_embeddings(a, b)
    out.emit(
        {"kind": "embeddings", "count": len(maps), "maps": [list(m.run_map) for m in maps]},
        [f"{len(maps)} embeddings"] + [str(list(m.run_map)) for m in maps],
    )
    return 0 if maps else 1


def cmd_iso(args, out: Out) -> int:
    a, b = load_game(args.left), load_game(args.right)
    iso = are_isomorphic(a, b)
    out.emit(
        {"kind": "isomorphism", "isomorphic": iso is not None, "map": list(iso.run_map) if iso else None},
        f"isomorphic via {list(iso.run_map)}" if iso else "not isomorphic",
    )
    return 0 if iso else 1


def cmd_coprod(args, out: Out) -> int:
    games = [load_game(p) for p in args.games]
    target, injections = coproduct(games)
    out.emit(
        {"kind": "coproduct", "game": game_to_record(target), "injections": [list(m.run_map) for m in injections]},
        [str(target)] + [f"injection {k}: {list(m.run_map)}" for k, m in enumerate(injections)],
    )
    return 0


def cmd_pushout(args, out: Out) -> int:
    apex, a, b = load_game(args.apex), load_game(args.left_game), load_game(args.right_game)
    left = morph_from_record(load_one(args.left), apex, a)
    right = morph_from_record(load_one(args.right), apex, b)
    cp = pushout(Span(apex, left, right))
    out.emit(
        {
            "kind": "pushout",
            "game": game_to_record(cp.target),
            "left_inj": list(cp.left_inj.run_map),
            "right_inj": list(cp.right_inj.run_map),
        },
        [str(cp.target), f"left: {list(cp.left_inj.run_map)}", f"right: {list(cp.right_inj.run_map)}"],
    )
    return 0


def cmd_extend(args, out: Out) -> int:
    g, g_sup = load_game(args.game), load_game(args.larger)
    f = image_from_record(load_one(args.image), g)
    ext = extend_embedding(g, g_sup, f)
    out.emit(
        {"kind": "extension", "embedding": image_to_record(ext)},
        [f"{r} -> {s}" for r, s in zip(g_sup.runs, ext.image)],
    )
    return 0


def cmd_gfl(args, out: Out) -> int:
    moments = GflView(args.depth, args.width).moments()
    out.emit(
        {"kind": "gfl", "depth": args.depth, "width": args.width, "count": len(moments), "moments": [list(t) for t in moments]},
        [f"{len(moments)} moments"] + [_moment(t) for t in moments],
    )
    return 0


def cmd_colim(args, out: Out) -> int:
    seq = example_chain(args.stages)
    view = colimit(seq, args.depth)
    moments = sorted(view.moments, key=lambda t: (len(t), t))
    fresh = new_branches(seq, args.depth)
    out.emit(
        {"kind": "colimit", "moments": [list(t) for t in moments], "new_branches": [list(t) for t in fresh]},
        [f"{len(moments)} moments"] + [_moment(t) for t in moments] + [f"new branch {_moment(t)}" for t in fresh],
    )
    return 0


def cmd_fraisse(args, out: Out) -> int:
    seq = fraisse_sequence(args.stages, args.max_runs, trivial_for_alice=args.trivial)
    report = verify_fraisse(seq, args.max_runs, args.max_runs, trivial_for_alice=args.trivial)
    out.emit(
        {
            "kind": "fraisse",
            "ok": report.ok,
            "u_failures": [game_to_record(g) for g in report.u_failures],
            "a_failures": len(report.a_failures),
            "a_checked": report.a_checked,
        },
        [
            f"(U) {'ok' if not report.u_failures else f'{len(report.u_failures)} missing games'}",
            f"(A) {report.a_checked} checked, {len(report.a_failures)} failures",
        ],
    )
    return 0 if report.ok else 1


def cmd_homog(args, out: Out) -> int:
    a = load_game(args.game)
    f = image_from_record(load_one(args.f), a)
    g = image_from_record(load_one(args.g), a)
    u = back_and_forth(a, f, g, args.depth, args.width)
    table = [(t, u.forward[t]) for t in GflView(args.depth, args.width).moments()]
    out.emit(
        {"kind": "automorphism", "depth": args.depth, "width": args.width, "table": [[list(t), list(s)] for t, s in table]},
        [f"{_moment(t)} -> {_moment(s)}" for t, s in table],
    )
    return 0


def cmd_small(args, out: Out) -> int:
    g = load_game(args.game)
    verdict = wfs_verdict(g, args.setting, stages=args.stages, seed=args.seed)
    record: dict[str, Any] = {"kind": "smallness", "setting": verdict.setting, "wfs": verdict.is_wfs}
    lines = [f"{verdict.setting}: {'weakly finitely small' if verdict.is_wfs else 'not weakly finitely small'}"]
    cert = verdict.certificate
    if verdict.is_wfs:
        record["certificates"] = [
            {"stages": c["stages"], "stage": c["stage"], "map": list(c["map"])} for c in cert.get("certificates", [])
        ]
        lines += [f"factors through stage {c['stage']} of {c['stages']}" for c in record["certificates"]]
    else:
        ce = cert["counterexample"]
        record.update(
            run=cert["run"],
            factors=cert["factors"],
            stages=[game_to_record(s) for s in ce.sequence.games],
            target=game_to_record(ce.target),
        )
        lines += [f"stage {n}: {str(s)}" for n, s in enumerate(ce.sequence.games)]
        lines.append(f"inclusion factors through a stage: {cert['factors']}")
    out.emit(record, lines)
    return 0 if verdict.is_wfs else 1


def cmd_met(args, out: Out) -> int:
    m = met_of_game(load_game(args.game))
    rows = [[str(x) for x in row] for row in m.dist]
    out.emit(
        {"kind": "ultrametric", "size": m.size, "dist": rows, "marked": sorted(m.marked)},
        [" ".join(f"{x:>5}" for x in row) for row in rows] + [f"marked {sorted(m.marked)}"],
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "records"), default="records")
    common.add_argument("--depth", type=int, default=4)
    common.add_argument("--width", type=int, default=2)
    common.add_argument("--max-runs", type=int, default=2)
    common.add_argument("--max-delta", type=int, default=2)
    common.add_argument("--stages", type=int, default=5)
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="gamefl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *positionals):
        p = sub.add_parser(name, parents=[common], help=help_text)
        for pos in positionals:
            p.add_argument(pos)
        p.set_defaults(func=func)
        return p

    p = sub.add_parser("validate", parents=[common], help="validate game files ('-' reads stdin)")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_validate)
    add("enumerate", cmd_enumerate, "list canonical games within bounds")
    add("embed", cmd_embed, "all embeddings between two games", "source", "target")
    add("iso", cmd_iso, "isomorphism test", "left", "right")
    p = sub.add_parser("coprod", parents=[common], help="coproduct of games")
    p.add_argument("games", nargs="+")
    p.set_defaults(func=cmd_coprod)
    p = add("pushout", cmd_pushout, "pushout of a span of embeddings", "apex", "left_game", "right_game")
    p.add_argument("--left", required=True, help="morphism record apex -> left game")
    p.add_argument("--right", required=True, help="morphism record apex -> right game")
    p = add("extend", cmd_extend, "extend an embedding into G_FL to a larger game", "game", "larger")
    p.add_argument("--image", required=True, help="embedding record of the smaller game")
    add("gfl", cmd_gfl, "moments of the G_FL window")
    add("colim", cmd_colim, "colimit window of the eventually-zero chain")
    p = add("fraisse", cmd_fraisse, "build and check a Fraisse sequence (--max-runs is the game bound)")
    p.add_argument("--trivial", action="store_true", help="only games Alice wins outright")
    p = add("homog", cmd_homog, "partial automorphism of G_FL carrying f to g", "game")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p = add("small", cmd_small, "weak finite smallness verdict", "game")
    p.add_argument("--setting", choices=SETTINGS, default="Games_A")
    add("met", cmd_met, "ultrametric space of a game", "game")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    out = Out(args.format)
    try:
        return args.func(args, out)
    except (ParseError, OSError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except GameError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
