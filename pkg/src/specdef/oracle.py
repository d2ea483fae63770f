"""Semantic checks of a run against the reference interpreter."""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import Program, apply, match
from .interp import sample_queries, solve


@dataclass
class CheckReport:
    queries: int = 0
    compared: int = 0
    skipped: int = 0  # a depth bound was hit on either side
    mismatches: list = field(default_factory=list)
    unsound: list = field(default_factory=list)
    uncovered: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.mismatches or self.unsound or self.uncovered)

    def summary(self) -> str:
        return (f"queries {self.queries}, compared {self.compared}, skipped {self.skipped}, "
                f"mismatches {len(self.mismatches)}, unsound {len(self.unsound)}, "
                f"uncovered {len(self.uncovered)}")


def check_run(original: Program, entry, residual, result=None, j: int = 0, n: int = 100,
              depth: int = 400, seed: int = 0, queries=None) -> CheckReport:
    """Compare answers of original and residual programs on sampled calls of
    entry ``j``; with an analysis ``result`` also check the answer pattern."""
    rep = CheckReport()
    queries = queries if queries is not None else sample_queries(entry, original, n, seed)
    ap = None
    if result is not None and result.engine == "analyze":
        aa, node = result.entries[j]
        canon, m = aa.canonical()
        ap = result.at[node].rename({c: v for v, c in m.items()})
        entry_atom = aa.atom
    for q in queries:
        rep.queries += 1
        a = solve(original, q, depth)
        b = solve(residual.program, residual.rename_query(q, j), depth)
        if b.undefined:
            rep.uncovered.append((q, sorted(b.undefined)))
        if a.truncated or b.truncated:
            rep.skipped += 1
        else:
            rep.compared += 1
            if a.answers != b.answers:
                rep.mismatches.append((q, a.answers, b.answers))
        if ap is not None:
            mu = match(entry_atom, q)
            for s in a.substitutions:
                sigma = {v: apply(s, t) for v, t in mu.items()}
                if not result.domain.concrete_satisfies(ap, sigma):
                    rep.unsound.append((q, s))
    return rep
