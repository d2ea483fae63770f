"""Run every preset over the corpus and compare residuals against the
reference interpreter."""
import argparse
import time
from pathlib import Path

from specdef.core import InternalError
from specdef.frontend import parse_program
from specdef.oracle import check_run
from specdef.pipeline import PRESETS, RunConfig, specialize, with_params

ROOT = Path(__file__).resolve().parent.parent


def configs():
    for name in sorted(PRESETS):
        yield name, RunConfig.from_preset(name)
    yield "full+msg", with_params(RunConfig.from_preset("full"), generalize="hom-emb-msg")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--queries", type=int, default=100)
    ap.add_argument("--depth", type=int, default=400)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'program':10} {'config':16} {'AT':>4} {'ST':>4} {'clauses':>7} {'time':>7}  check")
    for path in sorted((ROOT / "corpus").glob("*.pl")):
        unit = parse_program(path.read_text())
        for name, cfg in configs():
            t0 = time.perf_counter()
            try:
                run = specialize(unit, cfg)
            except (InternalError, RecursionError) as e:
                print(f"{path.stem:10} {name:16} {'-':>4} {'-':>4} {'-':>7} {'-':>7}  gave up: {e}")
                continue
            dt = time.perf_counter() - t0
            reps = [check_run(unit.program, e, run.residual, run.result, j, args.queries,
                              args.depth, args.seed) for j, e in enumerate(unit.entries)]
            res = run.result
            print(f"{path.stem:10} {name:16} {len(res.at):4} {len(res.st):4} "
                  f"{len(run.residual.program):7} {dt:6.3f}s  "
                  + "; ".join(r.summary() for r in reps))


if __name__ == "__main__":
    main()
