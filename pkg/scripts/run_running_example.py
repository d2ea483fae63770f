"""Specialize the running example and dump residual code, tables and graph."""
import argparse
from pathlib import Path

from specdef.codegen import dump_tables, export_dot
from specdef.frontend import format_term, parse_program, var_names
from specdef.pipeline import PRESETS, RunConfig, specialize

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="full", choices=sorted(PRESETS))
    ap.add_argument("--out", default="out", help="directory for the .dot and .json files")
    args = ap.parse_args()

    unit = parse_program((ROOT / "corpus" / "running.pl").read_text())
    run = specialize(unit, RunConfig.from_preset(args.preset))
    res = run.result
    print(run.residual.text())
    print("answer table:")
    for node, ans in res.at.items():
        n = var_names(node.atom)
        print(f"  {format_term(node.atom, n):28} {res.domain.render(node.cp, n):14} "
              f"-> {res.domain.render(ans, n)}")
    out = Path(args.out)
    out.mkdir(exist_ok=True)
    (out / f"running-{args.preset}.dot").write_text(export_dot(res))
    (out / f"running-{args.preset}.json").write_text(dump_tables(res))
    print(f"wrote {out}/running-{args.preset}.{{dot,json}}")


if __name__ == "__main__":
    main()
