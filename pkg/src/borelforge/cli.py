"""Command-line entry point.

Exit status: 0 when every check passes, 1 on a failed check, 2 on usage
errors (including guardrail violations), 3 on I/O failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import exact_arith
from .config import ConfigError, RunConfig, load_config
from .exact_arith import encode_exact, normalize
from .hull import HullCode, WindowUnfit, hull_distinguish, hull_encode
from .persist import TreeDocument, dump_lines, dumps, export_tree
from .thick_family import containing_index, thick_member, xi
from .tree import Branch, eval_coordinate
from .verifier import (
    CombinationSpec,
    RangeTooLow,
    claim2_check,
    lemma1_fuzz,
    smallest_window,
    verify_tree,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_range(text: str) -> range:
    """``"0..K"`` (inclusive) or a single integer."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return range(int(lo), int(hi) + 1)
    return range(int(text), int(text) + 1)


def parse_path(text: str) -> tuple[int, ...]:
    text = text.strip()
    return tuple(int(x) for x in text.split(",")) if text else ()


def parse_stems(text: str) -> list[tuple[int, ...]]:
    return [parse_path(part) for part in text.split("|")]


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        try:
            Path(out_path).write_text(text)
        except OSError as exc:
            raise IOError(str(exc)) from exc
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="borelforge", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="key=value config file (default: $BORELFORGE_CONFIG)")
    p.add_argument("--bit-budget", type=int, help="max bits when expanding a tower")
    p.add_argument("--seed", dest="global_seed", type=int, help="RNG seed for sampling checks")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("xi", help="threshold xi_m and Xi_m")
    s.add_argument("--m", type=int, required=True)

    s = sub.add_parser("thick", help="membership in a thick set")
    s.add_argument("--j", type=int, required=True)
    s.add_argument("--probe", required=True, help="rational p/q")

    tree = sub.add_parser("tree").add_subparsers(dest="action", required=True)
    s = tree.add_parser("build")
    s.add_argument("--depth", type=int)
    s.add_argument("--fanout", type=int)
    s.add_argument("--out")

    point = sub.add_parser("point").add_subparsers(dest="action", required=True)
    s = point.add_parser("eval")
    s.add_argument("--path", default="")
    s.add_argument("--coords", required=True, help="K or A..K")

    verify = sub.add_parser("verify").add_subparsers(dest="action", required=True)
    s = verify.add_parser("lemma1")
    s.add_argument("--trials", type=int)
    s.add_argument("--m-max", type=int)
    s.add_argument("--a-max", type=int, default=12)
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s = verify.add_parser("claim2")
    s.add_argument("--stems", required=True, help='e.g. "0|1"; entries comma separated')
    s.add_argument("--lambda", dest="lambdas", required=True, help='e.g. "2,-2"')
    s.add_argument("--m", type=int)
    s.add_argument("--k-from", type=int, required=True)
    s.add_argument("--k-count", type=int, required=True)
    s.add_argument("--out")
    s = verify.add_parser("tree")
    s.add_argument("--depth", type=int)
    s.add_argument("--fanout", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--out")

    hull = sub.add_parser("hull").add_subparsers(dest="action", required=True)
    s = hull.add_parser("encode")
    s.add_argument("--code", required=True)
    s.add_argument("--coords", required=True)
    s = hull.add_parser("distinguish")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--m-max", type=int)
    s.add_argument("--horizon", type=int)

    s = sub.add_parser("export", help="write a tree document, or re-export one")
    s.add_argument("--depth", type=int)
    s.add_argument("--fanout", type=int)
    s.add_argument("--from", dest="source", help="re-import this document and write it back")
    s.add_argument("--out")
    return p


def _first(*values):
    return next((v for v in values if v is not None), None)


def _config(args) -> RunConfig:
    return load_config(args.config,
                       depth=getattr(args, "depth", None),
                       fanout=getattr(args, "fanout", None),
                       seed=_first(getattr(args, "seed", None), args.global_seed),
                       trials=getattr(args, "trials", None),
                       m_max=getattr(args, "m_max", None),
                       horizon=getattr(args, "horizon", None),
                       bit_budget=args.bit_budget,
                       out_path=getattr(args, "out", None))


def _read_code(path: str) -> HullCode:
    try:
        return HullCode.from_json(json.loads(Path(path).read_text()))
    except OSError as exc:
        raise IOError(str(exc)) from exc
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad code file {path}: {exc}") from exc


def dispatch(args) -> int:
    cfg = _config(args)
    exact_arith.set_bit_budget(cfg.bit_budget)
    cmd = args.command

    if cmd == "xi":
        if args.m < 1:
            raise UsageError("--m must be positive")
        # documented field order, not sorted
        _emit(json.dumps(xi(args.m).to_json(), separators=(",", ":")) + "\n", None)
        return EXIT_OK

    if cmd == "thick":
        q = Fraction(args.probe)
        a = containing_index(q)
        _emit(dumps({"j": args.j, "probe": str(q), "member": thick_member(args.j, q),
                     "interval": a}) + "\n", None)
        return EXIT_OK

    if cmd in ("tree", "export"):
        if cmd == "export" and args.source:
            try:
                text = Path(args.source).read_text()
            except OSError as exc:
                raise IOError(str(exc)) from exc
            doc = TreeDocument.loads(text)
        else:
            doc = export_tree(cfg)
        _emit(doc.dumps(), cfg.out_path or None)
        return EXIT_OK

    if cmd == "point":
        branch = Branch(parse_path(args.path))
        coords = {str(k): encode_exact(eval_coordinate(branch, k)) for k in parse_range(args.coords)}
        _emit(dumps({"stem": branch.to_json(), "coords": coords}) + "\n", None)
        return EXIT_OK

    if cmd == "verify":
        if args.action == "lemma1":
            report = lemma1_fuzz(cfg.trials, cfg.m_max, args.a_max, cfg.seed)
            rows = report.lines()
        elif args.action == "claim2":
            stems = parse_stems(args.stems)
            lambdas = [Fraction(x) for x in args.lambdas.split(",")]
            m = args.m or smallest_window(lambdas, 6)
            if m is None:
                raise UsageError("coefficients fit no m <= 6 window")
            try:
                spec = CombinationSpec.build(m, stems, lambdas)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            ks = range(args.k_from, args.k_from + args.k_count)
            try:
                report = claim2_check(spec, ks)
            except RangeTooLow as exc:
                _emit(dumps({"error": "RangeTooLow", "k": exc.k, "threshold": exc.threshold}) + "\n", None)
                return EXIT_FAIL
            rows = report.lines()
        else:
            report = verify_tree(cfg.depth, cfg.fanout, seed=cfg.seed)
            rows = report.lines()
        rows[0]["config"] = cfg.to_json()
        _emit(dump_lines(rows), cfg.out_path or None)
        return EXIT_OK if report.ok else EXIT_FAIL

    if cmd == "hull":
        if args.action == "encode":
            code = _read_code(args.code)
            point = hull_encode(code)
            coords = {str(k): encode_exact(normalize(point(k))) for k in parse_range(args.coords)}
            _emit(dumps({"code": code.to_json(), "coords": coords}) + "\n", None)
            return EXIT_OK
        a, b = _read_code(args.a), _read_code(args.b)
        try:
            result = hull_distinguish(a, b, cfg.m_max, cfg.horizon)
        except WindowUnfit as exc:
            _emit(dumps({"error": "WindowUnfit", "detail": str(exc)}) + "\n", None)
            return EXIT_FAIL
        body = {"result": result} if isinstance(result, str) else result.to_json()
        _emit(dumps({"config": cfg.to_json(), **body}) + "\n", None)
        return EXIT_OK

    raise UsageError(f"unknown command {cmd}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return dispatch(args)
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"borelforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IOError as exc:
        print(f"borelforge: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
