import itertools
import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings

from specdef.core import Struct, Var, fresh_var, term_vars
from specdef.frontend import parse_program

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
CORPUS_FILES = sorted(CORPUS.glob("*.pl"))


def load(name: str):
    return parse_program((CORPUS / name).read_text())


@pytest.fixture
def running():
    return load("running.pl")


# ---------------------------------------------------------------- shfr oracle

CONSTS = ("a", "b", "c")


def alpha(sigma: dict, scope) -> tuple:
    """Exact sharing groups and free set of a concrete binding."""
    occ = {}
    for x in scope:
        for v in term_vars(sigma.get(x, x)):
            occ.setdefault(v, set()).add(x)
    sh = frozenset(frozenset(g) for g in occ.values())
    fr = frozenset(x for x in scope if isinstance(sigma.get(x, x), Var))
    return sh, fr


def random_term(rng: random.Random, pool, depth=2):
    """Term over a/b/c, f/1 and the variables in ``pool``."""
    r = rng.random()
    if pool and r < 0.35:
        return rng.choice(pool)
    if depth <= 0 or r < 0.65:
        return Struct(rng.choice(CONSTS))
    return Struct("f", (random_term(rng, pool, depth - 1),))


def random_sigma(rng: random.Random, scope, n_pool=3):
    pool = [fresh_var("U") for _ in range(n_pool)]
    return {x: random_term(rng, pool) for x in scope}


def nonempty_subsets(vs):
    vs = list(vs)
    return [frozenset(c) for r in range(1, len(vs) + 1) for c in itertools.combinations(vs, r)]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.REPORT, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
