"""Command-line driver."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .codegen import dump_tables, export_dot
from .core import InternalError
from .domains import DOMAINS, DomainError
from .engines import ENGINES
from .frontend import ParseError, parse_exec_table, parse_program
from .globalctl import GENERALIZERS
from .oracle import check_run
from .pipeline import PRESETS, RunConfig, specialize
from .unfold import STRATEGIES

EXIT_PARSE, EXIT_INTERNAL, EXIT_ORACLE = 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="specdef",
        description="Analyze and specialize a definite logic program w.r.t. its entry declarations.")
    p.add_argument("input", nargs="?", help="program file (Prolog subset)")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--domain", choices=sorted(DOMAINS))
    p.add_argument("--unfold", choices=STRATEGIES)
    p.add_argument("--generalize", choices=GENERALIZERS)
    p.add_argument("--widen", choices=("id",))
    p.add_argument("--engine", choices=sorted(ENGINES))
    p.add_argument("--non-leftmost", action="store_true",
                   help="allow unfolding past a blocked leftmost atom")
    p.add_argument("--exec-table", metavar="FILE", help="extra abstract executability entries")
    p.add_argument("-o", "--output", metavar="FILE", help="write the residual program here")
    p.add_argument("--dot", metavar="FILE", help="write the analysis graph (DOT)")
    p.add_argument("--json", metavar="FILE", help="write the tables (JSON)")
    p.add_argument("--check", type=int, default=0, metavar="N",
                   help="compare original and residual on N sampled queries per entry")
    p.add_argument("--depth", type=int, default=400, metavar="D", help="interpreter depth bound")
    p.add_argument("--seed", type=int, default=0, metavar="S", help="sampling seed")
    p.add_argument("--trace", action="store_true", help="print unfolding events to stderr")
    p.add_argument("--print-config", action="store_true",
                   help="print the resolved configuration as JSON and exit")
    return p


def resolve_config(args) -> RunConfig:
    base = RunConfig.from_preset(args.preset) if args.preset else RunConfig()
    for name in ("domain", "unfold", "generalize", "widen", "engine"):
        val = getattr(args, name)
        if val is not None and val != getattr(base, name):
            setattr(base, name, val)
            base.preset = None
    base.input = args.input
    base.output, base.dot, base.json = args.output, args.dot, args.json
    base.exec_table = args.exec_table
    base.check, base.depth, base.seed = args.check, args.depth, args.seed
    base.trace, base.non_leftmost = args.trace, args.non_leftmost
    return base


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = resolve_config(args)
    if args.print_config:
        print(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))
        return 0
    if not cfg.input:
        print("specdef: an input file is required", file=sys.stderr)
        return EXIT_PARSE
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        unit = parse_program(Path(cfg.input).read_text(encoding="utf-8"))
        table = parse_exec_table(Path(cfg.exec_table).read_text()) if cfg.exec_table else None
    except (OSError, ParseError) as e:
        print(f"specdef: {cfg.input}: {e}", file=sys.stderr)
        return EXIT_PARSE
    trace = (lambda line: print(line, file=sys.stderr)) if cfg.trace else None
    t0 = time.perf_counter()
    try:
        run = specialize(unit, cfg, trace, table)
    except DomainError as e:
        print(f"specdef: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (InternalError, RecursionError) as e:
        print(f"specdef: internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    elapsed = time.perf_counter() - t0
    res = run.result
    text = run.residual.text()
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    if cfg.dot:
        Path(cfg.dot).write_text(export_dot(res))
    if cfg.json:
        Path(cfg.json).write_text(dump_tables(res))
    print(f"answers: {len(res.at)}  specializations: {len(res.st)}  "
          f"generalizations: {len(res.gt)}  updates: {res.updates}  "
          f"time: {elapsed:.3f}s", file=sys.stderr)
    for w in unit.warnings + run.residual.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if cfg.check:
        bad = False
        for j, e in enumerate(unit.entries):
            rep = check_run(unit.program, e, run.residual, res, j, cfg.check, cfg.depth, cfg.seed)
            print(f"check entry {j + 1}: {rep.summary()}", file=sys.stderr)
            bad = bad or not rep.ok
        if bad:
            return EXIT_ORACLE
    return 0


if __name__ == "__main__":
    sys.exit(main())
