"""Fixpoint engines: abstract partial deduction without success propagation,
and abstract interpretation over specialized definitions."""
from __future__ import annotations

import logging
import sys
from dataclasses import dataclass, field

from .core import Atom, Clause, InternalError, Program, get_body, mgu, var_set
from .domains import AbstractAtom, Domain
from .frontend import BUILTINS, default_exec_table
from .globalctl import GeneralizeConfig, GlobalControl, VariantTable, ren
from .unfold import ControlError, UnfoldConfig, Unfolder

log = logging.getLogger(__name__)

MAX_UPDATES = 1_000_000
EXTERNAL = "external"


@dataclass(frozen=True)
class DependencyEntry:
    """Backward arc: ``node`` used the answer of a call made at (k, i)."""

    node: AbstractAtom
    head: Atom  # H_k, head of the clause instance being processed
    cp: object  # description over vars(clause k) just before literal i
    k: int
    i: int
    entry: bool = False
    def_index: int = 0  # 1-based position of clause k within its definition


@dataclass(frozen=True)
class EngineConfig:
    unfold: UnfoldConfig = field(default_factory=UnfoldConfig)
    generalize: GeneralizeConfig = field(default_factory=GeneralizeConfig)
    widen: str = "id"
    pointwise_lub: bool = True  # one call pattern per program point


@dataclass
class EngineResult:
    program: Program
    domain: Domain
    control: GlobalControl
    at: VariantTable
    dt: VariantTable
    resolution: dict  # (k, i) -> canonical call key or EXTERNAL
    entries: list  # (entry AbstractAtom, node key or None)
    heads: VariantTable  # node -> A''' (renamed call over node variables)
    node_clauses: VariantTable  # node -> rule numbers processed for it
    dead: set  # program points reached with bottom
    processed: set  # rule numbers processed at least once
    updates: int = 0
    engine: str = "analyze"

    @property
    def gt(self) -> VariantTable:
        return self.control.gt

    @property
    def st(self) -> VariantTable:
        return self.control.st


class _Engine:
    name = "engine"

    def __init__(self, program: Program, domain: Domain, config: EngineConfig | None = None,
                 exec_table=None, trace=None):
        self.config = config or EngineConfig()
        if self.config.widen != "id":
            raise ValueError(f"unknown call widening {self.config.widen!r}")
        self.program = program.copy()
        self.domain = domain
        self.exec_table = exec_table if exec_table is not None else default_exec_table()
        unfolder = Unfolder(self.program, domain, self.config.unfold, self.exec_table, trace)
        self.gc = GlobalControl(self.program, domain, unfolder, self.config.generalize)
        self.at = VariantTable()
        self.dt = VariantTable()
        self.heads = VariantTable()
        self.node_clauses = VariantTable()
        self.resolution: dict = {}
        self.dead: set = set()
        self.processed: set = set()
        self.updates = 0
        self.def_pos: dict = {}

    # ------------------------------------------------------------ helpers

    def is_builtin(self, atom: Atom) -> bool:
        if self.program.defines(atom.indicator):
            return False
        return atom.indicator in BUILTINS or any(
            e.pattern.indicator == atom.indicator for e in self.exec_table)

    def _position(self, k: int) -> int:
        if k not in self.def_pos:
            for ks in self.gc.definitions.values():
                for n, kk in enumerate(ks, 1):
                    self.def_pos[kk] = n
        return self.def_pos.get(k, 0)

    def _point_pattern(self, k: int, i: int, atom: Atom, cp):
        """Call pattern for literal (k, i), joined with earlier ones there."""
        prev = self.resolution.get((k, i))
        if not self.config.pointwise_lub or prev is None or prev == EXTERNAL:
            return cp
        canon, m = AbstractAtom(atom, cp).canonical()
        if canon.atom != prev.atom:
            raise InternalError(f"program point ({k},{i}) changed its literal")
        inv = {c: v for v, c in m.items()}
        return self.domain.lub(cp, prev.cp.rename(inv))

    def _definition_clauses(self, a3: Atom):
        for c in self.program.clauses_for(a3.indicator):
            if mgu(c.head, a3) is not None:
                yield c

    def _recursion(self):
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 100_000))

    def result(self, entries) -> EngineResult:
        return EngineResult(self.program, self.domain, self.gc, self.at, self.dt,
                            self.resolution, entries, self.heads, self.node_clauses,
                            self.dead, self.processed, self.updates, self.name)


class Analyzer(_Engine):
    """Success-propagating fixpoint over specialized definitions."""

    name = "analyze"

    def run(self, entries) -> EngineResult:
        self._recursion()
        out = []
        for j, aa in enumerate(entries, 1):
            canon = aa.canonical()[0]
            parent = DependencyEntry(canon, canon.atom, canon.cp, j, 0, entry=True)
            self.process_call_pattern(aa.atom, aa.cp, parent, entry=True)
            node = AbstractAtom(canon.atom, self.domain.widen_call(self.at, canon.atom, canon.cp))
            out.append((aa, node.canonical()[0]))
        return self.result(out)

    def process_call_pattern(self, atom: Atom, cp, parent: DependencyEntry, entry=False):
        canon, m = AbstractAtom(atom, cp).canonical()
        cp1 = self.domain.widen_call(self.at, canon.atom, canon.cp)
        node = AbstractAtom(canon.atom, cp1)
        if node not in self.at:
            self.at[node] = self.domain.bottom(var_set(node.atom))
            self.dt[node] = {}
            a1, a1p = self.gc.specialized_definition(node, keep_args=entry)
            a3 = ren(node.atom, a1, a1p)
            self.heads[node] = a3
            self.node_clauses[node] = []
            for c in self._definition_clauses(a3):
                self.node_clauses[node].append(c.k)
                cpk = self.domain.translate(a3, cp1, c)
                self.process_clause(node, c.head, cpk, c.k, 1)
        self.dt[node][parent] = None
        inv = {c: v for v, c in m.items()}
        return self.at[node].rename(inv)

    def process_clause(self, node: AbstractAtom, head: Atom, cp1, k: int, i: int) -> None:
        while True:
            if self.domain.is_bottom(cp1):
                self.dead.add((k, i))
                return
            self.processed.add(k)
            body = get_body(self.program, k, i)
            if not body:
                return self._finish(node, head, cp1)
            lit = body[0]
            cp2 = self.domain.restrict(cp1, var_set(lit))
            if self.is_builtin(lit):
                self.resolution[(k, i)] = EXTERNAL
                ap0 = self.domain.builtin_success(lit, cp2)
            else:
                cp2 = self._point_pattern(k, i, lit, cp2)
                dep = DependencyEntry(node, head, cp1, k, i, def_index=self._position(k))
                ap0 = self.process_call_pattern(lit, cp2, dep)
                key = AbstractAtom(lit, cp2).canonical()[0]
                self.resolution[(k, i)] = AbstractAtom(
                    key.atom, self.domain.widen_call(self.at, key.atom, key.cp))
            cp3 = self.domain.combine(cp1, ap0)
            if len(body) == 1:
                return self._finish(node, head, cp3)
            cp1, i = cp3, i + 1

    def _finish(self, node: AbstractAtom, head: Atom, cp3) -> None:
        ap1 = self.domain.translate(head, cp3, (self.heads[node], ()))
        ap2 = self.at[node]
        ap3 = self.domain.lub(ap1, ap2)
        if not self.domain.leq(ap2, ap3):
            raise InternalError("answer table entry decreased")
        if not self.domain.leq(ap3, ap2):
            self.at[node] = ap3
            self.process_update(list(self.dt[node]))

    def process_update(self, deps) -> None:
        for d in deps:
            if d.entry:
                continue
            self.updates += 1
            if self.updates > MAX_UPDATES:
                raise ControlError(f"more than {MAX_UPDATES} answer updates")
            self.remove_previous_deps(d.node, d.k, d.i)
            self.process_clause(d.node, d.head, d.cp, d.k, d.i)

    def remove_previous_deps(self, node: AbstractAtom, k: int, i: int) -> None:
        for deps in self.dt.values():
            for d in [d for d in deps if not d.entry and d.node == node
                      and d.k == k and d.i >= i]:
                del deps[d]


class PartialDeducer(_Engine):
    """Specialization without success propagation: every literal of a clause
    is called with the description known at clause entry."""

    name = "apd"

    def run(self, entries) -> EngineResult:
        self._recursion()
        out = []
        for aa in entries:
            self.process_call_pattern(aa.atom, aa.cp, entry=True)
            out.append((aa, None))
        return self.result(out)

    def process_call_pattern(self, atom: Atom, cp, entry=False) -> None:
        aa = AbstractAtom(atom, cp)
        if aa in self.gc.gt:
            return
        _, a1p = self.gc.specialized_definition(aa, keep_args=entry)
        gen = self.gc.gt[aa]
        for c in self._definition_clauses(a1p):
            cpk = self.domain.translate(a1p, gen.cp, c)
            self.process_clause(cpk, c.k)

    def process_clause(self, cp, k: int) -> None:
        if self.domain.is_bottom(cp):
            self.dead.add((k, 1))
            return
        self.processed.add(k)
        for i, lit in enumerate(self.program.clauses[k].body, 1):
            cpl = self.domain.restrict(cp, var_set(lit))
            if self.is_builtin(lit):
                self.resolution[(k, i)] = EXTERNAL
                continue
            cpl = self._point_pattern(k, i, lit, cpl)
            self.resolution[(k, i)] = AbstractAtom(lit, cpl).canonical()[0]
            self.process_call_pattern(lit, cpl)


def analyze(program: Program, entries, domain: Domain, config: EngineConfig | None = None,
            exec_table=None, trace=None) -> EngineResult:
    return Analyzer(program, domain, config, exec_table, trace).run(entries)


def apd(program: Program, entries, domain: Domain, config: EngineConfig | None = None,
        exec_table=None, trace=None) -> EngineResult:
    return PartialDeducer(program, domain, config, exec_table, trace).run(entries)


ENGINES = {"analyze": analyze, "apd": apd}
