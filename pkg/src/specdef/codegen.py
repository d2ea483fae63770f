"""Residual program generation and table/graph export."""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field

from .core import Atom, InternalError, Program, Struct, apply, mgu, rename_apart, term_vars
from .domains import AbstractAtom
from .engines import EXTERNAL, EngineResult
from .frontend import EntryDecl, format_clause, format_entry, format_term, parse_atom, var_names
from .globalctl import ren

log = logging.getLogger(__name__)


@dataclass
class ResidualProgram:
    program: Program
    entries: list = field(default_factory=list)  # EntryDecl over renamed atoms
    entry_map: list = field(default_factory=list)  # (original atom, generalized atom, renamed)
    origin: dict = field(default_factory=dict)  # residual indicator -> original indicator
    warnings: list = field(default_factory=list)

    def rename_query(self, query: Atom, j: int = 0) -> Atom:
        """Call of the residual program corresponding to ``query`` on entry j."""
        _, gen, renamed = self.entry_map[j]
        return ren(query, gen, renamed)

    def text(self) -> str:
        lines = [format_entry(e) for e in self.entries]
        lines += [format_clause(c.head, c.body) for c in self.program]
        return "\n".join(lines) + ("\n" if lines else "")


def _display_names(preds) -> dict:
    """Drop the numeric suffix of fresh names when no other name clashes."""
    base = {}
    for name in preds:
        m = re.fullmatch(r"(sp_.*)_\d+", name)
        base[name] = m.group(1) if m else name
    counts: dict = {}
    for b in base.values():
        counts[b] = counts.get(b, 0) + 1
    taken = set(preds)
    out = {}
    for name, b in base.items():
        ok = counts[b] == 1 and (b == name or b not in taken)
        out[name] = b if ok else name
    return out


def generate(res: EngineResult) -> ResidualProgram:
    gc = res.control
    warnings = []
    entry_map, roots = [], []
    for aa, node in res.entries:
        key = node if node is not None else aa
        resolved = gc.resolve(key)
        if resolved is None:
            raise InternalError(f"entry {aa.atom!r} has no specialized definition")
        a1, a2 = resolved
        entry_map.append((aa.atom, a1, a2))
        roots.append(a2.indicator)

    origin = {st_val.indicator: key.atom.indicator for key, st_val in gc.st.items()}
    emitted: dict = {}  # rule number -> (head, body)
    seen, queue = set(roots), list(roots)
    while queue:
        ind = queue.pop(0)
        for k in gc.definitions.get(ind, ()):
            c = res.program.clauses[k]
            if k not in res.processed:
                warnings.append(f"clause {k} of {ind[0]}/{ind[1]} never analyzed; dropped")
                continue
            body, ok = [], True
            for i, lit in enumerate(c.body, 1):
                r = res.resolution.get((k, i))
                if r == EXTERNAL:
                    body.append(lit)
                    continue
                if r is None:
                    if not any((k, j) in res.dead for j in range(1, i + 1)):
                        raise InternalError(f"no call pattern recorded for literal ({k},{i})")
                    # unreachable: any version of the predicate keeps the clause closed
                    pair = _any_version(gc, lit)
                    if pair is None:
                        ok = False
                        break
                    a1, a2 = pair
                else:
                    a1, a2 = gc.resolve(r)
                new = ren(lit, a1, a2)
                body.append(new)
                if new.indicator not in seen:
                    seen.add(new.indicator)
                    queue.append(new.indicator)
            if ok:
                emitted[k] = (c.head, tuple(body))
    if not emitted:
        warnings.append("no clause is reachable from the entries")

    names = _display_names(sorted({h.functor for h, _ in emitted.values()}
                                  | {a2.functor for _, _, a2 in entry_map}))
    ext = {lit.functor for _, b in emitted.values() for lit in b}
    names.update({f: f for f in ext if f not in names})

    def rn(a: Atom) -> Atom:
        return Struct(names.get(a.functor, a.functor), a.args)

    out = Program()
    for k in sorted(emitted):
        h, b = emitted[k]
        out.add(rn(h), [rn(x) for x in b])
    entries, emap = [], []
    for (atom, a1, a2), (aa, _) in zip(entry_map, res.entries):
        renamed = ren(aa.atom, a1, a2)
        entries.append(EntryDecl(rn(renamed), _carry_props(aa, renamed, res)))
        emap.append((atom, a1, rn(a2)))
    orig = {(names.get(i[0], i[0]), i[1]): o for i, o in origin.items()}
    for w in warnings:
        log.warning(w)
    return ResidualProgram(out, entries, emap, orig, warnings)


def _any_version(gc, lit: Atom):
    """First specialized definition whose atom unifies with ``lit``."""
    for key, a2 in gc.st.items():
        if key.atom.indicator == lit.indicator and mgu(lit, rename_apart(key.atom)) is not None:
            return key.atom, a2
    return None


def _carry_props(aa: AbstractAtom, renamed: Atom, res: EngineResult) -> tuple:
    """Entry properties that still talk about variables of the renamed call."""
    vs = set(term_vars(renamed))
    if res.domain.name != "shfr" or aa.cp.bottom:
        return ()
    ground, free = aa.cp.ground_vars(), aa.cp.fr
    props = []
    for v in term_vars(aa.atom):
        if v not in vs:
            continue
        if v in ground:
            props.append(("ground", v))
        elif v in free:
            props.append(("var", v))
    return tuple(props)


# ---------------------------------------------------------------- export

def _label(res: EngineResult, atom, cp, ap=None) -> str:
    n = var_names(atom)
    d = res.domain
    text = f"^{d.render(cp, n)} {format_term(atom, n)}"
    if ap is not None:
        text += f" ^{d.render(ap, n)}"
    return text


def _esc(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(res: EngineResult) -> str:
    """Analysis graph: OR-nodes (call and answer), AND-boxes per clause,
    solid arcs to the first use of a node and dashed share arcs after."""
    lines = ["digraph analysis {", "  rankdir=TB;", "  node [fontname=\"monospace\"];"]
    ids = {}
    for n, (node, ap) in enumerate(res.at.items()):
        ids[node] = f"or{n}"
        lines.append(f'  or{n} [shape=ellipse,label="{_esc(_label(res, node.atom, node.cp, ap))}"];')
    expanded = {entry_node for _, entry_node in res.entries if entry_node is not None}
    for node in res.at:
        for k in res.node_clauses.get(node, ()):
            c = res.program.clauses[k]
            box = f"and_{ids[node]}_{k}"
            cl = format_clause(c.head, c.body)
            lines.append(f'  {box} [shape=box,label="{_esc(cl)}"];')
            lines.append(f"  {ids[node]} -> {box};")
            prev = None
            for i in range(1, len(c.body) + 1):
                r = res.resolution.get((k, i))
                if r is None or r == EXTERNAL or r not in ids:
                    continue
                target = ids[r.canonical()[0]]
                key = r.canonical()[0]
                if key in expanded:
                    lines.append(f'  {box} -> {target} [style=dashed,label="share ({k},{i})"];')
                else:
                    expanded.add(key)
                    lines.append(f'  {box} -> {target} [label="({k},{i})"];')
                if prev is not None:
                    lines.append(f'  {prev} -> {target} [style=dotted,arrowhead=open,'
                                 f'label="success"];')
                prev = target
    lines.append("}")
    return "\n".join(lines) + "\n"


def _aa_json(res, atom, cp, extra=()):
    n = var_names((atom,) + tuple(extra))
    return n, {"atom": format_term(atom, n), "cp": res.domain.to_json(cp, n)}


def dump_tables(res: EngineResult) -> str:
    d = res.domain
    answers, deps, gen, spec = [], [], [], []
    for node, ap in res.at.items():
        n, obj = _aa_json(res, node.atom, node.cp)
        obj["ap"] = d.to_json(ap, n)
        answers.append(obj)
    for node, arcs in res.dt.items():
        for a in arcs:
            n, obj = _aa_json(res, node.atom, node.cp)
            ctx = res.program.clauses[a.k] if not a.entry else None
            cn = var_names(ctx) if ctx is not None else var_names(a.node.atom)
            obj["from"] = {"atom": format_term(a.node.atom, var_names(a.node.atom)),
                           "cp": d.to_json(a.node.cp, var_names(a.node.atom))}
            obj.update({"k": a.k, "i": "entry" if a.entry else a.i, "def_index": a.def_index,
                        "head": format_term(a.head, cn), "clause_cp": d.to_json(a.cp, cn)})
            deps.append(obj)
    for key, value in res.gt.items():
        n, obj = _aa_json(res, key.atom, key.cp)
        m = var_names(value.atom)
        obj["gen"] = {"atom": format_term(value.atom, m), "cp": d.to_json(value.cp, m)}
        gen.append(obj)
    for key, a2 in res.st.items():
        n, obj = _aa_json(res, key.atom, key.cp, (a2,))
        obj["spec"] = format_term(a2, n)
        spec.append(obj)
    return json.dumps({"answers": answers, "deps": deps, "gen": gen, "spec": spec},
                      indent=2, sort_keys=True)


def load_tables(text: str, domain) -> dict:
    """Rebuild the answer, generalization and specialization tables from a
    dump; keys are canonical abstract atoms."""
    obj = json.loads(text)

    def aa(o, names=None):
        names = {} if names is None else names
        atom = parse_atom(o["atom"], names)
        cp = domain.from_json(o["cp"], names, term_vars(atom))
        return AbstractAtom(atom, cp), names

    out = {"answers": {}, "gen": {}, "spec": {}, "deps": []}
    for o in obj["answers"]:
        a, names = aa(o)
        ap = domain.from_json(o["ap"], names, term_vars(a.atom))
        canon, m = a.canonical()
        out["answers"][canon] = ap.rename(m)
    for o in obj["gen"]:
        a, _ = aa(o)
        g, _ = aa(o["gen"])
        out["gen"][a.canonical()[0]] = g.canonical()[0]
    for o in obj["spec"]:
        a, names = aa(o)
        a2 = parse_atom(o["spec"], names)
        canon, m = a.canonical()
        out["spec"][canon] = apply(m, a2)
    for o in obj["deps"]:
        a, _ = aa(o)
        out["deps"].append((a.canonical()[0], o["k"], o["i"]))
    return out
