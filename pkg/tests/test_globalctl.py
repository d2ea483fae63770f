import pytest
from hypothesis import given, strategies as st

from specdef.core import InternalError, Program, Struct, fresh_var, is_variant, peano, term_vars
from specdef.domains import PD, SHFR, AbstractAtom
from specdef.frontend import default_exec_table, parse_atom, parse_program
from specdef.globalctl import GeneralizeConfig, GlobalControl, VariantTable, new_filter, ren
from specdef.unfold import UnfoldConfig, Unfolder


def _gc(program, strategy, domain=SHFR):
    u = Unfolder(program, domain, UnfoldConfig(), default_exec_table())
    return GlobalControl(program, domain, u, GeneralizeConfig(strategy))


def _aa(text, ground=(), free=(), domain=SHFR):
    names = {}
    a = parse_atom(text, names)
    return AbstractAtom(a, domain.from_props(a, [names[v] for v in ground], [names[v] for v in free]))


def test_variant_table_ignores_renaming():
    t = VariantTable()
    aa = _aa("p(X,f(Y),X)", ["Y"])
    t[aa] = 1
    assert aa.rename_apart() in t and t[aa.rename_apart()] == 1
    assert _aa("p(X,f(Y),Y)", ["Y"]) not in t
    assert _aa("p(X,f(Y),X)") not in t  # same atom, other description


def test_new_filter_keeps_only_variables():
    p = parse_program("p(a).\n").program
    a = parse_atom("p(f(X),Y,X)")
    b = new_filter(a, p)
    assert b.functor.startswith("sp_p") and b.args == tuple(term_vars(a))
    assert new_filter(a, p, keep_args=True).args == a.args
    assert not p.defines(b.indicator)


def test_ren_renames_instances():
    b = parse_atom("p(f(X),Y)")
    b2 = Struct("sp_p", tuple(term_vars(b)))
    out = ren(parse_atom("p(f(g(Z)),a)"), b, b2)
    assert out.args[0].functor == "g" and out.args[1] == Struct("a")
    with pytest.raises(InternalError):
        ren(parse_atom("p(a,b)"), b, b2)


def test_base_form_keeps_groundness():
    gc = _gc(Program(), "base-form")
    g = gc.ageneralize(_aa("p(s(X),Y)", ["X"], ["Y"]))
    assert all(v.__class__.__name__ == "Var" for v in g.atom.args)
    v1, v2 = g.atom.args
    assert v1 in g.cp.ground_vars()


def test_hom_emb_msg_generalizes_growing_calls():
    prog = parse_program("n(0).\nn(s(X)) :- n(X).\n").program
    gc = _gc(prog, "hom-emb-msg")
    gc.specialized_definition(_aa("n(s(0))"))
    g = gc.ageneralize(_aa("n(s(s(0)))"))
    assert is_variant(g.atom, parse_atom("n(s(X))"))


@given(st.integers(0, 6), st.sampled_from(["id", "base-form", "hom-emb-msg"]))
def test_generalization_covers_the_call(n, strategy):
    prog = parse_program("n(0).\nn(s(X)) :- n(X).\n").program
    gc = _gc(prog, strategy)
    for i in range(n):
        gc.specialized_definition(AbstractAtom(Struct("n", (peano(i),)), SHFR.top(())))
    aa = AbstractAtom(Struct("n", (peano(n, fresh_var("T")),)), SHFR.top(()))
    aa = AbstractAtom(aa.atom, SHFR.top(aa.atom))
    g = gc.ageneralize(aa)
    assert SHFR.abstract_atom_leq(aa.atom, aa.cp, g.atom, g.cp)


def test_hom_emb_msg_bounds_the_number_of_definitions():
    prog = parse_program("n(0).\nn(s(X)) :- n(X).\n").program
    gc = _gc(prog, "hom-emb-msg")
    for i in range(30):
        gc.specialized_definition(AbstractAtom(Struct("n", (peano(i),)), SHFR.top(())))
    assert len(gc.st) <= 3


def test_specialized_definition_is_memoized(running):
    gc = _gc(running.program.copy(), "id")
    aa = _aa("twice(X,Y)", ["X"], ["Y"])
    a1, a2 = gc.specialized_definition(aa)
    b1, b2 = gc.specialized_definition(aa.rename_apart())
    assert a2 == b2 and len(gc.st) == 1
    ks = gc.definitions[a2.indicator]
    assert ks and all(gc.program.clauses[k].head.functor == a2.functor for k in ks)
    assert gc.resolve(aa.canonical()[0]) == (a1, a2)


def test_pd_specialization(running):
    gc = _gc(running.program.copy(), "hom-emb-msg", PD)
    _, a2 = gc.specialized_definition(_aa("tw(X,Y)", domain=PD))
    assert gc.definitions[a2.indicator]
