"""Command-line front end: count boards, search maxima, build tables,
run the greedy heuristic, and verify the shipped reference boards.

Card syntax everywhere is 0-based digits, e.g. `0,1,2,0`.  Exit codes:
0 success, 2 parse failure, 3 verification mismatch, 4 budget exceeded,
5 checkpoint corruption.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import catalog, geometry, heuristics, search
from .counting import Board, count_sets, count_sets_bruteforce, list_sets

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VERIFY = 3
EXIT_BUDGET = 4
EXIT_CHECKPOINT = 5

THREADS_ENV = "SET_SEARCH_THREADS"


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        value = int(raw)
        if value < 1:
            raise ValueError
    except ValueError:
        raise SystemExit(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def _card_text(card: int, dim: int) -> str:
    return ",".join(str(v) for v in geometry.decode_card(card, dim))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setmax",
        description="Maximum-set solvers for boards of cards with 2-8 ternary properties.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="count the sets in a board file")
    p.add_argument("board_file", help="board text file (one card per line, digits 0-2)")
    p.add_argument("--props", type=int, default=None, help="number of properties (inferred by default)")
    p.add_argument("--list-lines", action="store_true", help="also print each set, three cards per stanza")
    p.add_argument("--oracle", action="store_true", help="use the brute-force triple counter")

    p = sub.add_parser("search", help="maximum sets over all boards of a given size")
    p.add_argument("--props", type=int, required=True)
    p.add_argument("--cards", type=int, required=True)
    p.add_argument("--mode", choices=("naive", "pruned"), default="pruned")
    p.add_argument("--symmetry", action=argparse.BooleanOptionalAction, default=True,
                   help="fix the first two cards via affine equivalence (pruned mode)")
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker count (default ${THREADS_ENV} or 1)")
    p.add_argument("--checkpoint", default=None, help="checkpoint file to write/resume")
    p.add_argument("--resume", action="store_true", help="resume from --checkpoint")
    p.add_argument("--stop-after-nodes", type=int, default=None,
                   help="stop (checkpointing) after visiting this many nodes")
    p.add_argument("--report-interval", type=float, default=60.0,
                   help="seconds between periodic checkpoints")
    p.add_argument("--budget", type=int, default=search.DEFAULT_NAIVE_BUDGET,
                   help="naive-mode triple-check budget")

    p = sub.add_parser("table", help="maximum sets for a range of board sizes (CSV)")
    p.add_argument("--props", type=int, required=True)
    p.add_argument("--from", dest="n_from", type=int, required=True)
    p.add_argument("--to", dest="n_to", type=int, required=True)
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--pretty", action="store_true", help="aligned table instead of CSV")

    p = sub.add_parser("cmm", help="greedy consecutive-maximization trace (CSV)")
    p.add_argument("--props", type=int, required=True)
    p.add_argument("--upto", type=int, default=None, help="stop after this many turns")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.add_argument("--board-out", default=None, help="write the final board here")

    p = sub.add_parser("verify", help="recount every reference board and check the constructions")
    p.add_argument("--json", dest="json_out", default=None,
                   help="write a machine-readable report to this path ('-' for stdout)")

    p = sub.add_parser("fixtures", help="list, show or export the reference boards")
    p.add_argument("--show", metavar="NAME", default=None, help="print one board")
    p.add_argument("--export", metavar="DIR", default=None, help="write all boards to a directory")

    return parser


def _cmd_count(args) -> int:
    try:
        board = Board.parse_file(args.board_file, dim=args.props)
    except (ValueError, OSError) as exc:
        print(exc, file=sys.stderr)
        return EXIT_PARSE
    count = count_sets_bruteforce(board) if args.oracle else count_sets(board)
    print(count)
    if args.list_lines:
        for line in list_sets(board):
            print()
            for card in line:
                print(_card_text(card, board.dim))
    return EXIT_OK


def _print_search_result(result: search.SearchResult, symmetry: bool) -> None:
    print(result.max_sets)
    if result.witness is None:
        print("witness: none")
    else:
        print("witness (canonical orbit):" if symmetry else "witness:")
        sys.stdout.write(result.witness.to_text())
    print(f"nodes_visited: {result.nodes_visited}")
    print(f"configs_pruned: {result.configs_pruned}")
    print(f"elapsed_seconds: {result.elapsed:.3f}")
    print(f"complete: {'true' if result.complete else 'false'}")


def _cmd_search(args) -> int:
    threads = args.threads if args.threads is not None else _default_threads()
    try:
        if args.resume:
            if args.checkpoint is None:
                print("--resume requires --checkpoint", file=sys.stderr)
                return EXIT_PARSE
            cp = search.checkpoint_load(args.checkpoint)
            result = search.resume_search(
                args.checkpoint,
                threads=threads,
                stop_after_nodes=args.stop_after_nodes,
                report_interval=args.report_interval,
            )
            symmetry = cp.mode == "pruned" and cp.symmetry
        else:
            config = search.SearchConfig(
                dim=args.props,
                n=args.cards,
                mode=args.mode,
                symmetry=args.symmetry,
                threads=threads,
                checkpoint_path=args.checkpoint,
                report_interval=args.report_interval,
                naive_budget=args.budget,
                stop_after_nodes=args.stop_after_nodes,
            )
            result = search.run_search(config)
            symmetry = config.mode == "pruned" and config.symmetry
    except search.BudgetExceededError as exc:
        print(exc, file=sys.stderr)
        return EXIT_BUDGET
    except search.CheckpointError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CHECKPOINT
    except ValueError as exc:
        print(exc, file=sys.stderr)
        return EXIT_PARSE
    _print_search_result(result, symmetry)
    return EXIT_OK


def _cmd_table(args) -> int:
    threads = args.threads if args.threads is not None else _default_threads()
    try:
        if args.pretty:
            rows = search.run_table(args.props, args.n_from, args.n_to, None, threads=threads)
            header = ("n", "max_sets", "search_space", "nodes", "elapsed_s", "complete")
            fmt = "{:>3} {:>9} {:>14} {:>12} {:>10} {:>9}"
            print(fmt.format(*header))
            for r in rows:
                print(
                    fmt.format(
                        r.n,
                        r.max_sets,
                        r.search_space,
                        r.nodes_visited,
                        f"{r.elapsed_seconds:.2f}",
                        "true" if r.complete else "false",
                    )
                )
        elif args.out is None:
            search.run_table(args.props, args.n_from, args.n_to, sys.stdout, threads=threads)
        else:
            with open(args.out, "w", encoding="utf-8", newline="") as f:
                search.run_table(args.props, args.n_from, args.n_to, f, threads=threads)
    except ValueError as exc:
        print(exc, file=sys.stderr)
        return EXIT_PARSE
    return EXIT_OK


def _cmd_cmm(args) -> int:
    try:
        trace = heuristics.cmm_run(args.props, args.upto)
    except ValueError as exc:
        print(exc, file=sys.stderr)
        return EXIT_PARSE
    if args.out is None:
        trace.write_csv(sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            trace.write_csv(f)
    if args.board_out is not None:
        with open(args.board_out, "w", encoding="utf-8") as f:
            f.write(trace.final_board.to_text())
    return EXIT_OK


def _cmd_verify(args) -> int:
    report = catalog.verify_all()
    for r in report.fixtures:
        status = "ok  " if r.ok else "FAIL"
        print(f"{status} {r.fixture}: expected={r.expected} got={r.got}")
    for c in report.checks:
        status = "ok  " if c.ok else "FAIL"
        print(f"{status} {c.check}: {c.detail}")
    if args.json_out is not None:
        payload = json.dumps(report.to_json_obj(), indent=2)
        if args.json_out == "-":
            print(payload)
        else:
            with open(args.json_out, "w", encoding="utf-8") as f:
                f.write(payload + "\n")
    if not report.ok:
        return EXIT_VERIFY
    print("all reference boards verified")
    return EXIT_OK


def _cmd_fixtures(args) -> int:
    if args.show is not None:
        try:
            f = catalog.fixture(args.show)
        except KeyError as exc:
            print(exc.args[0], file=sys.stderr)
            return EXIT_PARSE
        sys.stdout.write(f.board.to_text())
        return EXIT_OK
    if args.export is not None:
        os.makedirs(args.export, exist_ok=True)
        for f in catalog.fixtures():
            path = os.path.join(args.export, f"{f.name}.board")
            with open(path, "w", encoding="utf-8") as fp:
                fp.write(f"# {f.description}\n")
                fp.write(f.board.to_text())
            print(path)
        return EXIT_OK
    for f in catalog.fixtures():
        print(f"{f.name:20s} {len(f.board):3d} cards  {f.expected_sets:3d} sets  {f.description}")
    return EXIT_OK


_HANDLERS = {
    "count": _cmd_count,
    "search": _cmd_search,
    "table": _cmd_table,
    "cmm": _cmd_cmm,
    "verify": _cmd_verify,
    "fixtures": _cmd_fixtures,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return _HANDLERS[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
