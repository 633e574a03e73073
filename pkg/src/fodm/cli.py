"""Command-line entry point: ``fodm pipeline|query|cluster|lattice``.

Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 internal
invariant violation. ``FODM_LOG`` selects the log level (default WARNING).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .errors import FodmError, InvariantError
from .fcm import memberships_to_csv
from .pipeline import CONTEXT_FILE, build, load_inputs, run_pipeline, sanitize_iri
from .query import evaluate_query, parse_query
from .scaling import read_context_csv

log = logging.getLogger("fodm")

EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fodm", description="Fuzzy ontology generation from numeric tables.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def inputs(p, memberships=True):
        p.add_argument("--config", required=True, type=Path, help="TOML or JSON pipeline config")
        p.add_argument("--input", required=True, type=Path, help="dataset CSV")
        if memberships:
            p.add_argument("--memberships", type=Path,
                           help="fixture CSV of pre-cut memberships (skips clustering)")

    p = sub.add_parser("pipeline", help="run every stage and write all artifacts")
    inputs(p)
    p.add_argument("--out", required=True, type=Path, help="output directory")

    p = sub.add_parser("query", help="evaluate a conjunctive label query")
    p.add_argument("path", type=Path, help="pipeline output directory or scale CSV")
    p.add_argument("--where", required=True, help="comma-separated Attribute=Label terms")
    p.add_argument("--alpha", type=float, help="minimum degree of returned objects")
    p.add_argument("--top", type=int, help="return at most this many objects")

    p = sub.add_parser("cluster", help="cluster each attribute and dump memberships")
    inputs(p, memberships=False)
    p.add_argument("--out", type=Path, help="directory for per-attribute CSVs (default: stdout)")

    p = sub.add_parser("lattice", help="print the concepts of the combined lattice")
    inputs(p)
    p.add_argument("--alpha", type=float, help="override every attribute's alpha-cut")
    return parser


def _cmd_pipeline(args) -> int:
    artifacts = run_pipeline(args.config, args.input, args.out, args.memberships)
    for path in artifacts:
        print(path)
    return 0


def _cmd_query(args) -> int:
    path = args.path / CONTEXT_FILE if args.path.is_dir() else args.path
    context = read_context_csv(path.read_text(encoding="utf-8"))
    result = evaluate_query(context, parse_query(args.where, args.alpha, args.top))
    sys.stdout.write(result.format(4))
    return 0


def _cmd_cluster(args) -> int:
    dataset, config, _ = load_inputs(args.config, args.input)
    result = build(dataset, config)
    for spec in config.specs:
        text = memberships_to_csv(result.models[spec.attribute].memberships)
        if args.out is None:
            print(f"# {spec.attribute}")
            sys.stdout.write(text)
        else:
            args.out.mkdir(parents=True, exist_ok=True)
            target = args.out / f"memberships_{sanitize_iri(spec.attribute)}.csv"
            target.write_text(text, encoding="utf-8")
            print(target)
    return 0


def _cmd_lattice(args) -> int:
    from dataclasses import replace

    from .ingest import validate_config

    dataset, config, fixture = load_inputs(args.config, args.input, args.memberships)
    if args.alpha is not None:
        specs = tuple(replace(s, alpha=args.alpha) for s in config.specs)
        config = validate_config(dataset, replace(config.config, specs=specs))
    result = build(dataset, config, fixture)
    for attr, tah in result.tahs.items():
        print(f"# TAH {attr}: {len(tah)} concepts, {len(tah.covers)} covers")
    print(f"# MTAH: {len(result.mtah)} concepts, {len(result.mtah.covers)} covers")
    for c in result.hierarchy.concepts:
        ext = " ".join(f"{o}:{d:g}" for o, d in sorted(c.instances.items()))
        print(f"{c.name}\t{{{ext}}}")
    return 0


COMMANDS = {
    "pipeline": _cmd_pipeline,
    "query": _cmd_query,
    "cluster": _cmd_cluster,
    "lattice": _cmd_lattice,
}


def main(argv=None) -> int:
    level = os.environ.get("FODM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = _parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except FodmError as exc:
        print(f"fodm {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"fodm {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"fodm {args.command}: internal error: {exc}", file=sys.stderr)
        return InvariantError.exit_code


if __name__ == "__main__":
    sys.exit(main())
