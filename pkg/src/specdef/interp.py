"""Depth-bounded reference SLD interpreter and query sampling, used as the
oracle for semantic checks."""
from __future__ import annotations

import random
import sys
from collections import Counter
from dataclasses import dataclass, field

from .core import (Atom, Program, Struct, Var, apply, fresh_var, is_ground, rename_apart,
                   term_vars, variant_key)
from .frontend import EntryDecl

MAX_STEPS = 200_000


@dataclass
class Answers:
    answers: Counter = field(default_factory=Counter)  # canonical answer tuples
    substitutions: list = field(default_factory=list)  # query var -> term, per answer
    truncated: bool = False
    undefined: set = field(default_factory=set)  # called predicates with no clauses
    steps: int = 0


def solve(program: Program, query: Atom, depth: int = 400, max_steps: int = MAX_STEPS,
          externals=frozenset({("true", 0), ("ground", 1), ("var", 1)})) -> Answers:
    """Leftmost SLD resolution, clauses in textual order, per-branch depth bound.

    Bindings live in one store with a trail, so backtracking is undo rather
    than copying.
    """
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))  # deep answer terms
    qvars = tuple(term_vars(query))
    out = Answers()
    bind: dict = {}
    trail: list = []

    def walk(t):
        while isinstance(t, Var) and t in bind:
            t = bind[t]
        return t

    def resolve(t):
        t = walk(t)
        if isinstance(t, Struct) and t.args:
            return Struct(t.functor, tuple(resolve(x) for x in t.args))
        return t

    def occurs(v, t) -> bool:
        stack = [t]
        while stack:
            x = walk(stack.pop())
            if x == v:
                return True
            if isinstance(x, Struct):
                stack.extend(x.args)
        return False

    def unify(a, b) -> bool:
        stack = [(a, b)]
        while stack:
            x, y = stack.pop()
            x, y = walk(x), walk(y)
            if x == y:
                continue
            if isinstance(y, Var) and not isinstance(x, Var):
                x, y = y, x
            if isinstance(x, Var):
                if occurs(x, y):
                    return False
                bind[x] = y
                trail.append(x)
            elif x.functor != y.functor or len(x.args) != len(y.args):
                return False
            else:
                stack.extend(zip(x.args, y.args))
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            del bind[trail.pop()]

    choices: list = []  # (goal, depth, clauses, next index, trail mark)

    def try_clauses(a, rest, d, clauses, i):
        while i < len(clauses):
            mark = len(trail)
            head, body = rename_apart((clauses[i].head, clauses[i].body))
            if unify(a, head):
                if i + 1 < len(clauses):
                    choices.append(((a, rest), d, clauses, i + 1, mark))
                goal = rest
                for b in reversed(body):
                    goal = (b, goal)
                return goal, d + 1
            undo(mark)
            i += 1
        return backtrack()

    def backtrack():
        if not choices:
            return "done", 0
        (a, rest), d, clauses, i, mark = choices.pop()
        undo(mark)
        return try_clauses(a, rest, d, clauses, i)

    goal, d = (query, None), 0
    while goal != "done":
        out.steps += 1
        if out.steps > max_steps:
            out.truncated = True
            break
        if goal is None:
            qv = tuple(resolve(v) for v in qvars)
            out.answers[variant_key(qv)] += 1
            out.substitutions.append(dict(zip(qvars, qv)))
            goal, d = backtrack()
            continue
        a, rest = goal
        ind = a.indicator
        if not program.defines(ind):
            ok = False
            if ind == ("true", 0):
                ok = True
            elif ind == ("ground", 1):
                ok = is_ground(resolve(a.args[0]))
            elif ind == ("var", 1):
                ok = isinstance(walk(a.args[0]), Var)
            elif ind not in externals:
                out.undefined.add(ind)
            if ok:
                goal = rest
            else:
                goal, d = backtrack()
            continue
        if d >= depth:
            out.truncated = True
            goal, d = backtrack()
            continue
        goal, d = try_clauses(a, rest, d, program.clauses_for(ind), 0)
    return out


# ---------------------------------------------------------------- sampling

def signature(program: Program) -> tuple[list, list]:
    """Constants and proper function symbols occurring in clause arguments."""
    consts, funcs = set(), set()
    for c in program:
        for a in (c.head,) + c.body:
            stack = list(a.args)
            while stack:
                t = stack.pop()
                if isinstance(t, Struct):
                    (funcs if t.args else consts).add(t.indicator)
                    stack.extend(t.args)
    if not consts:
        consts.add(("a", 0))
    return sorted(consts), sorted(funcs)


def random_ground(rng: random.Random, consts, funcs, depth: int):
    if depth <= 0 or not funcs or rng.random() < 0.3:
        return Struct(rng.choice(consts)[0])
    f, n = rng.choice(funcs)
    return Struct(f, tuple(random_ground(rng, consts, funcs, depth - 1) for _ in range(n)))


def _random_open(rng, consts, funcs, depth, pool):
    r = rng.random()
    if r < 0.4:
        if pool and rng.random() < 0.3:
            return rng.choice(pool)
        v = fresh_var("U")
        pool.append(v)
        return v
    if r < 0.7 or not funcs:
        return random_ground(rng, consts, funcs, depth)
    f, n = rng.choice(funcs)
    return Struct(f, tuple(_random_open(rng, consts, funcs, depth - 1, pool) for _ in range(n)))


def sample_queries(entry: EntryDecl, program: Program, n: int = 100, seed: int = 0,
                   depth: int = 5) -> list[Atom]:
    """Concrete calls described by the entry: ground-declared variables get
    ground terms, var-declared ones distinct fresh variables, and the others
    arbitrary terms that may share variables."""
    rng = random.Random(seed)
    consts, funcs = signature(program)
    ground, free = entry.vars_with("ground"), entry.vars_with("var")
    out = []
    for _ in range(n):
        pool: list = []
        s = {}
        for v in term_vars(entry.atom):
            if v in ground:
                s[v] = random_ground(rng, consts, funcs, depth)
            elif v in free:
                s[v] = fresh_var(v.name)
            else:
                s[v] = _random_open(rng, consts, funcs, depth, pool)
        out.append(apply(s, entry.atom))
    return out
