"""Acceptance criteria, one test and one PASS/FAIL line each.

Run ``python3 tests/test_acceptance.py`` for just the summary lines.
"""
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))
from conftest import CORPUS_FILES, alpha, load, random_sigma, random_term  # noqa: E402
from specdef import globalctl, unfold  # noqa: E402
from specdef.core import Struct, apply, fresh_var, is_variant, mgu, term_vars  # noqa: E402
from specdef.domains import SHFR, Shfr  # noqa: E402
from specdef.engines import Analyzer  # noqa: E402
from specdef.frontend import (EntryDecl, default_exec_table, entry_to_abstract_atom,  # noqa: E402
                              format_term, parse_atom, parse_program, var_names)
from specdef.oracle import check_run  # noqa: E402
from specdef.pipeline import RunConfig, specialize, with_params  # noqa: E402

N_QUERIES = 100  # criteria 6 and 7
DEPTH = 400
N_DOMAIN = 10_000  # criterion 8
TIME_LIMIT = 1.0  # seconds, criteria 1 and 9

EXPECTED_RESIDUAL = """\
sp_main(s(s(s(0))),0).
sp_main(s(s(s(s(A)))),B) :- sp_tw(A,C), sp_formula(C,B).
sp_tw(0,0).
sp_tw(s(A),s(s(B))) :- sp_tw(A,B).
sp_formula(0,s(s(s(s(0))))).
sp_formula(s(A),s(s(s(s(s(s(B))))))) :- sp_tw(A,B).
"""

# configurations checked semantically; full with the id generalizer diverges
# on accumulating parameters, so it is paired with hom-emb-msg there
SEMANTIC_CONFIGS = {
    "full": RunConfig.from_preset("full"),
    "full/hom-emb-msg": with_params(RunConfig.from_preset("full"), generalize="hom-emb-msg"),
    "polyvariant-ai": RunConfig.from_preset("polyvariant-ai"),
    "abstract-spec": RunConfig.from_preset("abstract-spec"),
    "classical-pd": RunConfig.from_preset("classical-pd"),
}
ID_DIVERGES = {"rev", "peano"}


REPORT = []  # summary lines, echoed by the terminal summary hook in conftest


def report(n, ok, detail):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    REPORT.append(line)
    print(line)
    return ok


def _clauses(program):
    return [(c.head, c.body) for c in program]


def _same_program(p1, p2) -> bool:
    """Equal up to variable names and a bijective predicate renaming."""
    c1, c2 = _clauses(p1), _clauses(p2)
    if len(c1) != len(c2):
        return False
    names = {}
    for (h1, b1), (h2, b2) in zip(c1, c2):
        for a, b in zip((h1,) + b1, (h2,) + b2):
            if a.indicator[1] != b.indicator[1] or names.setdefault(a.functor, b.functor) != b.functor:
                return False
        rn = lambda a: Struct(names[a.functor], a.args)  # noqa: E731
        if not is_variant((rn(h1),) + tuple(map(rn, b1)), (h2,) + b2):
            return False
    return len(set(names.values())) == len(names)


# ---------------------------------------------------------------- criteria

def criterion_1():
    unit = load("running.pl")
    t0 = time.perf_counter()
    run = specialize(unit, RunConfig.from_preset("full"))
    dt = time.perf_counter() - t0
    ok = _same_program(run.residual.program, parse_program(EXPECTED_RESIDUAL).program) and dt < TIME_LIMIT
    return ok, f"residual matches the six expected clauses: {ok}, time {dt:.3f}s"


def criterion_2():
    run = specialize(load("running.pl"), RunConfig.from_preset("full"))
    res = run.result
    at = set()
    for n, ap in res.at.items():
        nm = var_names(n.atom)
        at.add((format_term(n.atom, nm), res.domain.render(n.cp, nm), res.domain.render(ap, nm)))
    want = {("main(s(s(s(A))),B)", "{A/G,B/V}", "{A/G,B/G}"),
            ("tw(A,B)", "{A/G,B/V}", "{A/G,B/G}"),
            ("formula(s(s(s(s(A)))),B)", "{A/G,B/V}", "{A/G,B/G}")}
    (formula,) = [n for n in res.at if n.atom.functor == "formula"]
    arcs = [(d.def_index, d.i) for d in res.dt[formula] if not d.entry]
    ok = at == want and arcs == [(2, 2)]
    return ok, f"answer table {'=' if at == want else '!='} expected, formula arcs {arcs}"


def _reachable(program, entries):
    seen, todo = set(), [e.atom.indicator for e in entries]
    while todo:
        ind = todo.pop()
        if ind in seen or not program.defines(ind):
            continue
        seen.add(ind)
        todo += [b.indicator for c in program.clauses_for(ind) for b in c.body]
    return seen


def criterion_3():
    bad = []
    for path in CORPUS_FILES:
        unit = load(path.name)
        r = specialize(unit, RunConfig.from_preset("polyvariant-ai")).residual
        back = lambda a: Struct(r.origin.get(a.indicator, a.indicator)[0], a.args)  # noqa: E731
        origins = set()
        for ind in r.program.predicates():
            o = r.origin[ind]
            origins.add(o)
            rc, oc = r.program.clauses_for(ind), unit.program.clauses_for(o)
            same = len(rc) == len(oc) and all(
                is_variant((back(a.head),) + tuple(map(back, a.body)), (b.head,) + b.body)
                for a, b in zip(rc, oc))
            if not same:
                bad.append(f"{path.stem}:{ind[0]}")
        if origins != _reachable(unit.program, unit.entries):
            bad.append(f"{path.stem}:coverage")
    ok = not bad and len(CORPUS_FILES) >= 5
    return ok, f"{len(CORPUS_FILES)} programs, differing: {bad or 'none'}"


def criterion_4():
    unit = load("running.pl")
    run = specialize(unit, RunConfig.from_preset("classical-pd"))
    lits = {b.functor for c in run.residual.program for b in c.body}
    kept = {"ground", "var"} <= lits
    names = {}
    static = EntryDecl(parse_atom("main(s(s(s(s(s(0))))),R)", names))
    unit.entries = [static]
    run2 = specialize(unit, RunConfig.from_preset("classical-pd"))
    facts = all(not c.body for c in run2.residual.program)
    body = [format_term(b, var_names(c)) for c in run2.residual.program for b in c.body]
    return kept and facts, (f"guards kept on the running entry: {kept}; static query "
                            f"unfolds to facts: {facts} (residual body literals: {body[:3]}...)")


def criterion_5():
    cfg = with_params(RunConfig.from_preset("full"), engine="apd")
    apd_gt = specialize(load("running.pl"), cfg).result.gt
    ana_gt = specialize(load("running.pl"), RunConfig.from_preset("full")).result.gt

    def ground_formula(gt):
        return any(v.atom.functor == "formula" and set(term_vars(v.atom.args[0])) <= v.cp.ground_vars()
                   for v in gt.values())
    a, b = ground_formula(apd_gt), ground_formula(ana_gt)
    return (not a) and b, f"ground formula key: apd {a}, analysis {b}"


def _semantic(check_soundness: bool):
    lines, ok = [], True
    for name, cfg in SEMANTIC_CONFIGS.items():
        if check_soundness and cfg.engine != "analyze":
            continue
        for path in CORPUS_FILES:
            if name == "full" and path.stem in ID_DIVERGES:
                continue
            unit = load(path.name)
            run = specialize(unit, cfg)
            for j, e in enumerate(unit.entries):
                rep = check_run(unit.program, e, run.residual, run.result, j, N_QUERIES, DEPTH)
                bad = rep.unsound if check_soundness else rep.mismatches + rep.uncovered
                if bad or rep.compared < N_QUERIES // 2:
                    ok = False
                    lines.append(f"{name}/{path.stem}: {rep.summary()}")
    return ok, lines


def criterion_6():
    ok, lines = _semantic(False)
    return ok, "answer multisets equal on all runs" if ok else "; ".join(lines)


def criterion_7():
    ok, lines = _semantic(True)
    return ok, "all success substitutions described" if ok else "; ".join(lines)


def criterion_8():
    rng = random.Random(8)
    scope_all = tuple(parse_atom("v(X,Y,Z,W)").args)
    violations = checked = 0
    for _ in range(N_DOMAIN):
        scope = scope_all[:rng.randint(1, 4)]
        sigmas = [random_sigma(rng, scope) for _ in range(3)]
        lam = SHFR.bottom(scope)
        for s in sigmas:
            sh, fr = alpha(s, scope)
            lam = SHFR.lub(lam, Shfr(frozenset(scope), sh, fr))
        other = Shfr(frozenset(scope), *alpha(random_sigma(rng, scope), scope))
        t1, t2 = random_term(rng, list(scope)), random_term(rng, list(scope))
        sub = scope[:max(1, len(scope) - 1)]
        for s in sigmas:
            checked += 1
            tests = [SHFR.concrete_satisfies(SHFR.restrict(lam, sub), {x: s[x] for x in sub}),
                     SHFR.concrete_satisfies(SHFR.extend(lam, scope_all),
                                             {**s, **{x: fresh_var() for x in scope_all if x not in s}}),
                     SHFR.concrete_satisfies(SHFR.lub(lam, other), s)]
            if SHFR.concrete_satisfies(other, s):
                tests.append(SHFR.concrete_satisfies(SHFR.conj(lam, other), s))
            theta = mgu(apply(s, t1), apply(s, t2))
            if theta is not None:
                tests.append(SHFR.concrete_satisfies(SHFR.unify(t1, t2, lam),
                                                     {x: apply(theta, s[x]) for x in scope}))
            violations += tests.count(False)
    return violations == 0, f"{N_DOMAIN} random values, {checked} concrete samples, {violations} violations"


class _Recording(Analyzer):
    def _finish(self, node, head, cp3):
        old = self.at[node]
        super()._finish(node, head, cp3)
        self.history.append((old, self.at[node]))


def criterion_9():
    acc = parse_program(":- entry rev(L,[],R) : (ground(L),var(R)).\n"
                        "rev([],A,A).\nrev([X|Xs],A,R) :- rev(Xs,[X|A],R).\n")
    cfg = with_params(RunConfig.from_preset("full"), generalize="hom-emb-msg")
    notes, ok = [], True
    for name, unit in (("rev-acc", acc), ("running", load("running.pl"))):
        eng = _Recording(unit.program, SHFR, cfg.engine_config(), default_exec_table())
        eng.history = []
        t0 = time.perf_counter()
        res = eng.run([entry_to_abstract_atom(e, SHFR) for e in unit.entries])
        dt = time.perf_counter() - t0
        mono = all(SHFR.leq(a, b) for a, b in eng.history)
        fuses = len(res.st) < globalctl.MAX_ST and eng.gc.unfolder.steps < unfold.MAX_STEPS
        ok = ok and mono and fuses and dt < TIME_LIMIT
        if name == "running":
            ok = ok and res.updates == 0
        notes.append(f"{name}: ST {len(res.st)}, updates {res.updates}, monotone {mono}, {dt:.3f}s")
    return ok, "; ".join(notes)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("n", range(1, 10))
def test_criterion(n):
    ok, detail = CRITERIA[n - 1]()
    assert report(n, ok, detail), detail


if __name__ == "__main__":
    for i, c in enumerate(CRITERIA, 1):
        report(i, *c())
