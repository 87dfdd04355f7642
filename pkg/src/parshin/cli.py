"""Command-line interface.

    parshin compute     --deck smooth.deck [--engine both]
    parshin points      --deck umbrella.deck
    parshin reciprocity --deck three_lines.deck
    parshin vanish      --deck smooth_off_diagonal.deck
    parshin convergence --deck fig8.deck --csv history.csv

Exit codes: 0 when every verdict is PASS, 1 on any FAIL, 2 on a
configuration error (bad arguments, deck parse errors, invalid flags).
"""

from __future__ import annotations

import argparse
import sys

from .deck import ENGINES, DeckError, load_deck
from .flag import FlagError
from .harness import ConfigError, RunOptions, compute, parshin_points, vanishing_check, verify_reciprocity
from .report import exact_text, history_csv

__all__ = ["run_cli", "main", "build_parser"]

COMMANDS = ("compute", "points", "reciprocity", "vanish", "convergence")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid value {text!r}") from None
        if v <= 0:
            raise argparse.ArgumentTypeError(f"{text!r} must be positive")
        return v

    return conv


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="parshin", description="Parshin residues at flags: exact and numeric engines.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--deck", required=True, help="problem deck file")
    ap.add_argument("--engine", choices=ENGINES, default=None, help="default: the deck's, else both")
    ap.add_argument("--delta1", type=_positive(float))
    ap.add_argument("--delta2", type=_positive(float))
    ap.add_argument("--grid", type=_positive(int), default=None, help="initial trapezoid grid (default 64)")
    ap.add_argument("--tol", type=_positive(float), default=None, help="quadrature tolerance (default 1e-10)")
    ap.add_argument("--json", metavar="PATH", help="write the JSON report here")
    ap.add_argument("--csv", metavar="PATH", help="write convergence histories here")
    return ap


def _options(args, deck) -> RunOptions:
    n = deck.problem.n
    d1 = args.delta1 if args.delta1 is not None else deck.numeric.delta1
    d2 = args.delta2 if args.delta2 is not None else deck.numeric.delta2
    if n == 1:
        if args.delta2 is not None:
            raise ConfigError("--delta2 is meaningless for n = 1")
        radii = None if d1 is None else (d1,)
    else:
        if (d1 is None) != (d2 is None):
            raise ConfigError("give both --delta1 and --delta2, or neither")
        radii = None if d1 is None else (d1, d2)
    return RunOptions(
        engine=args.engine or deck.engine,
        radii=radii,
        grid=args.grid or deck.numeric.grid,
        tol=args.tol or deck.numeric.tol,
    )


def _print_sum(rep, out):
    if rep.total is None:
        print("sum: unavailable", file=out)
    elif isinstance(rep.total, complex):
        print(f"sum: {rep.total.real!r}{rep.total.imag:+.17g}i", file=out)
    else:
        print(f"sum: {exact_text(rep.total)}", file=out)


def _dispatch(args, out):
    deck = load_deck(args.deck)
    opts = _options(args, deck)
    if args.command == "points":
        rep, line = parshin_points(deck, opts)
        print(line, file=out)
    elif args.command == "compute":
        rep = compute(deck, opts)
        for f in rep.flags:
            print(f.summary(), file=out)
    elif args.command == "reciprocity":
        rep = verify_reciprocity(deck, opts)
        for f in rep.flags:
            print(f.summary(), file=out)
        _print_sum(rep, out)
    elif args.command == "vanish":
        rep = vanishing_check(deck, opts)
        for f in rep.flags:
            print(f.summary(), file=out)
    else:
        opts.engine = "numeric"
        opts.min_levels = 2
        rep = compute(deck, opts)
        rep.command = "convergence"
        table = history_csv(rep.flags)
        if args.csv is None:
            out.write(table)
        for f in rep.flags:
            if f.numeric_error:
                print(f.summary(), file=out)
    if args.csv is not None:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(history_csv(rep.flags))
    if args.json is not None:
        rep.write_json(args.json)
    print(f"verdict: {rep.verdict}", file=out)
    return 0 if rep.verdict == "PASS" else 1


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return _dispatch(args, out)
    except (ConfigError, DeckError, FlagError) as exc:
        print(f"configuration error: {exc}", file=err)
        return 2
    except OSError as exc:
        print(f"configuration error: {exc}", file=err)
        return 2


def main() -> None:
    sys.exit(run_cli())
