"""Command-line front end: ``sweep``, ``verify``, ``gen`` and ``chart``."""
from __future__ import annotations

import argparse
import logging
import sys

from .centrality import centrality
from .exceptions import ConfigError, EdgeListParseError, EmptyGraphError, InvalidParameterError
from .experiments import (
    OUTPUT_DIR_ENV,
    default_output_path,
    emit_chart,
    load_config,
    read_rows,
    rows_to_csv,
    run_sweep,
    write_atomic,
)
from .placement import algorithm1, place_by_centrality, place_greedy
from .topology import boundary_midpoint_user, build_lattice, build_regular_tree, leaf_user
from .verify import FAIL, verify_published_numbers

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def _parse_overrides(pairs):
    out = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError(f"override {pair!r} is not key=value", "--set")
        out[key.strip()] = value.strip()
    return out


def cmd_sweep(args) -> int:
    overrides = _parse_overrides(args.set)
    for name in ("h", "psi", "policies", "evaluator", "seed", "workers", "output"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = str(value)
    config = load_config(args.config, overrides)
    rows = run_sweep(config)
    text = rows_to_csv(rows)
    out = config.output or default_output_path("sweep.csv")
    if str(out) == "-":
        sys.stdout.write(text)
    else:
        path = write_atomic(out, text)
        print(f"wrote {len(rows)} rows to {path}")
    if args.chart:
        emit_chart(rows, args.chart)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = verify_published_numbers(include_properties=not args.quick)
    for check in checks:
        print(check.line())
    failed = [c for c in checks if c.status == FAIL]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks without failure, {len(failed)} failed")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "lattice":
        t = build_lattice(args.n)
    else:
        t = build_regular_tree(args.arity, args.depth)
    if args.centrality:
        text = centrality(t, args.centrality, h=args.h).to_csv()
    elif args.placement:
        if args.placement == "greedy":
            user = boundary_midpoint_user(t) if args.kind == "lattice" else leaf_user(t)
            pl = place_greedy(t, user, args.N, args.h)
        elif args.placement == "algorithm1":
            pl = algorithm1(t, args.N, args.h)
        else:
            order = "ascending" if args.placement == "LCHP" else "descending"
            pl = place_by_centrality(t, args.N, args.h, order)
        text = pl.to_csv()
    else:
        lines = [f"# {t.kind} {t.params}"]
        lines += [f"{u} {v}" for u, v in t.edges()]
        text = "\n".join(lines) + "\n"
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_chart(args) -> int:
    with open(args.csv) as fh:
        rows = read_rows(fh)
    path = emit_chart(rows, args.out, title=args.title)
    print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lchp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a policy sweep described by a config file",
                       epilog=f"Default output directory comes from ${OUTPUT_DIR_ENV}.")
    p.add_argument("config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    p.add_argument("--h")
    p.add_argument("--psi")
    p.add_argument("--policies")
    p.add_argument("--evaluator")
    p.add_argument("--seed")
    p.add_argument("--workers")
    p.add_argument("--output", help="CSV path, or - for stdout")
    p.add_argument("--chart", help="also write a chart to this path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="reproduce the published numbers")
    p.add_argument("--quick", action="store_true", help="skip the randomized property checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a topology (edge list), centrality table or placement")
    p.add_argument("kind", choices=("lattice", "tree"))
    p.add_argument("--n", type=int, default=7)
    p.add_argument("--arity", type=int, default=2)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--h", type=int, default=2)
    p.add_argument("--N", type=int, default=100)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--centrality", choices=("ccc", "degree", "closeness", "betweenness"))
    group.add_argument("--placement", choices=("LCHP", "HCHP", "greedy", "algorithm1"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("chart", help="plot a sweep CSV")
    p.add_argument("csv")
    p.add_argument("out")
    p.add_argument("--title")
    p.set_defaults(func=cmd_chart)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, EdgeListParseError, EmptyGraphError, InvalidParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
