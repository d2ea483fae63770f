"""Abstract SLD derivations and the local-control unfolder."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .core import (Atom, Clause, InternalError, Program, Var, apply, atom_embeds, compose,
                   is_ground, match, mgu, rename_apart, renaming, term_vars, var_set)
from .domains import Domain
from .frontend import ExecEntry, default_exec_table

STRATEGIES = ("hom-emb", "one-step", "derive-then-aexec")
MAX_STEPS = 10_000


class ControlError(InternalError):
    """A termination fuse tripped: the control strategy failed to terminate."""


@dataclass(frozen=True)
class GoalAtom:
    atom: Atom
    ancestors: tuple = ()  # atoms selected on the way to this one


@dataclass(frozen=True)
class AbstractGoal:
    atoms: tuple  # of GoalAtom
    cp: object
    theta: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def goal(self) -> tuple:
        return tuple(g.atom for g in self.atoms)


@dataclass(frozen=True)
class Resultant:
    head: Atom
    body: tuple
    cp: object

    def as_clause(self) -> tuple:
        return self.head, self.body


@dataclass(frozen=True)
class UnfoldConfig:
    strategy: str = "hom-emb"
    non_leftmost: bool = False
    downwards_closed: bool | None = None  # None: ask the domain

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown unfolding strategy {self.strategy!r}")


@dataclass
class Unfolder:
    program: Program
    domain: Domain
    config: UnfoldConfig = field(default_factory=UnfoldConfig)
    exec_table: list = field(default_factory=default_exec_table)
    trace: Callable[[str], None] | None = None
    steps: int = 0

    @property
    def downwards_closed(self) -> bool:
        dc = self.config.downwards_closed
        return self.domain.downwards_closed if dc is None else dc

    def _log(self, kind: str, pos, atom, cp) -> None:
        if self.trace is not None:
            self.trace(f"{kind} {pos} {atom!r} {self.domain.render(cp, {})}")

    # ------------------------------------------------------------ steps

    def derive_step(self, g: AbstractGoal, r: int, c: Clause) -> AbstractGoal | None:
        """Resolve the atom at 0-based index ``r`` with clause ``c``; None if blocked."""
        c = rename_apart(c)
        sel = g.atoms[r]
        theta = mgu(sel.atom, c.head)
        if theta is None:
            return None
        lam = self.domain.extend(g.cp, var_set(c))
        lam = self.domain.unify(sel.atom, c.head, lam)
        if self.domain.is_bottom(lam):
            return None
        anc = sel.ancestors + (sel.atom,)
        new = g.atoms[:r] + tuple(GoalAtom(b, anc) for b in c.body) + g.atoms[r + 1:]
        new = tuple(GoalAtom(apply(theta, x.atom), x.ancestors) for x in new)
        cp = self.domain.restrict(lam, var_set([x.atom for x in new]))
        return AbstractGoal(new, cp, compose(g.theta, theta))

    def abstract_execute(self, g: AbstractGoal, r: int):
        """Apply the first exec-table entry whose pattern and guard fit.

        Returns the new goal, the string "fail" when the atom is replaced
        by false, or None when no entry applies.
        """
        a = g.atoms[r].atom
        for e in self.exec_table:
            e = _rename_entry(e)
            theta = match(e.pattern, a)
            if theta is None:
                continue
            cp_a = self.domain.translate(a, self.domain.restrict(g.cp, var_set(a)),
                                         (e.pattern, ()))
            if any(not isinstance(theta.get(x, x), Var) for x in e.free):
                continue
            # a guard on a variable matched to a ground term holds syntactically
            ground = {x for x in e.ground if not is_ground(theta.get(x, x))}
            if not self.domain.guard_holds(cp_a, ground=ground, free=e.free):
                continue
            if e.replacement == "false":
                return "fail"
            repl = () if e.replacement == "true" else (
                GoalAtom(apply(theta, e.replacement), g.atoms[r].ancestors),)
            new = g.atoms[:r] + repl + g.atoms[r + 1:]
            cp = self.domain.restrict(g.cp, var_set([x.atom for x in new]))
            return AbstractGoal(new, cp, g.theta)
        return None

    def stop_criterion(self, ancestors, atom: Atom) -> bool:
        """Stop when an ancestor of the same predicate embeds into ``atom``."""
        return any(atom_embeds(a, atom) for a in ancestors)

    def is_external(self, atom: Atom) -> bool:
        if self.program.defines(atom.indicator):
            return False
        return any(e.pattern.indicator == atom.indicator for e in self.exec_table)

    def _blocked(self, g: AbstractGoal, r: int) -> bool:
        x = g.atoms[r]
        if self.is_external(x.atom):
            return True
        return self.stop_criterion(x.ancestors, x.atom)

    def select_atom(self, g: AbstractGoal) -> int | None:
        if not g.atoms:
            return None
        if not self._blocked(g, 0):
            return 0
        if not self.config.non_leftmost:
            return None
        for r in range(1, len(g.atoms)):
            if self.is_external(g.atoms[r - 1].atom):
                return None  # only pure atoms may be jumped over
            if not self._blocked(g, r):
                return r
        return None

    def _exec_candidates(self, g: AbstractGoal):
        n = len(g.atoms) if self.downwards_closed else min(1, len(g.atoms))
        return range(n)

    # ------------------------------------------------------------ trees

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > MAX_STEPS:
            raise ControlError(f"unfolding exceeded {MAX_STEPS} steps")

    def _exec_all(self, g: AbstractGoal):
        """Exhaustive abstract execution; returns the goal or None on failure."""
        progress = True
        while progress:
            progress = False
            for r in self._exec_candidates(g):
                res = self.abstract_execute(g, r)
                if res is None:
                    continue
                self._tick()
                self._log("exec", r + 1, g.atoms[r].atom, g.cp)
                if res == "fail":
                    return None
                g, progress = res, True
                break
        return g

    def root(self, atom: Atom, cp) -> AbstractGoal:
        return AbstractGoal((GoalAtom(atom),), cp, {})

    def _resultant(self, root: Atom, g: AbstractGoal) -> Resultant:
        return Resultant(apply(g.theta, root), g.goal, g.cp)

    def aunfold(self, atom: Atom, cp) -> list[Resultant]:
        self.steps = 0
        if self.domain.is_bottom(cp):
            return []
        start = self.root(atom, cp)
        strategy = self.config.strategy
        if strategy == "hom-emb":
            return self._hom_emb(atom, start)
        out = []
        for c in self.program.clauses_for(atom.indicator):
            self._tick()
            g = self.derive_step(start, 0, c)
            self._log("derive" if g else "blocked", (c.k, 0), atom, cp)
            if g is None:
                continue
            if strategy == "derive-then-aexec":
                g = self._exec_leftmost(g)
                if g is None:
                    continue
            out.append(self._resultant(atom, g))
        return out

    def _exec_leftmost(self, g: AbstractGoal):
        while g.atoms:
            res = self.abstract_execute(g, 0)
            if res is None:
                break
            self._tick()
            self._log("exec", 1, g.atoms[0].atom, g.cp)
            if res == "fail":
                return None
            g = res
        return g

    def _hom_emb(self, root: Atom, start: AbstractGoal) -> list[Resultant]:
        out = []
        stack = [start]
        while stack:
            g = self._exec_all(stack.pop())
            if g is None:
                continue
            r = self.select_atom(g)
            if r is None:
                if g.atoms:
                    self._log("stop", 1, g.atoms[0].atom, g.cp)
                out.append(self._resultant(root, g))
                continue
            children = []
            for c in self.program.clauses_for(g.atoms[r].atom.indicator):
                self._tick()
                child = self.derive_step(g, r, c)
                self._log("derive" if child else "blocked", (c.k, r + 1), g.atoms[r].atom, g.cp)
                if child is not None:
                    children.append(child)
            stack.extend(reversed(children))
        return out


def _rename_entry(e: ExecEntry) -> ExecEntry:
    m = renaming(term_vars(e.pattern))
    rep = e.replacement if isinstance(e.replacement, str) else apply(m, e.replacement)
    return ExecEntry(apply(m, e.pattern), frozenset(m[v] for v in e.ground),
                     frozenset(m[v] for v in e.free), rep)


def aunfold(program: Program, atom: Atom, cp, domain: Domain, config: UnfoldConfig | None = None,
            exec_table=None, trace=None) -> list[Resultant]:
    u = Unfolder(program, domain, config or UnfoldConfig(),
                 exec_table if exec_table is not None else default_exec_table(), trace)
    return u.aunfold(atom, cp)
