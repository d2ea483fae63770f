from specdef.codegen import _display_names, dump_tables, export_dot, load_tables
from specdef.domains import SHFR
from specdef.frontend import parse_program
from specdef.pipeline import RunConfig, specialize

RUNNING_SP = """\
:- entry sp_main(s(s(s(A))),B) : (ground(A),var(B)).
sp_main(s(s(s(0))),0).
sp_main(s(s(s(s(A)))),B) :- sp_tw(A,C), sp_formula(C,B).
sp_tw(0,0).
sp_tw(s(A),s(s(B))) :- sp_tw(A,B).
sp_formula(0,s(s(s(s(0))))).
sp_formula(s(A),s(s(s(s(s(s(B))))))) :- sp_tw(A,B).
"""


def test_running_residual_text(running):
    assert specialize(running).residual.text() == RUNNING_SP


def test_residual_reparses(running):
    unit = parse_program(specialize(running).residual.text())
    assert len(unit.program) == 6 and len(unit.entries) == 1


def test_rename_query(running):
    run = specialize(running)
    q = running.entries[0].atom
    assert run.residual.rename_query(q).functor == "sp_main"


def test_origin_maps_back(running):
    res = specialize(running).residual
    assert res.origin[("sp_tw", 2)] == ("tw", 2)
    assert res.origin[("sp_main", 2)] == ("main", 2)


def test_display_names():
    assert _display_names(["sp_p_1", "sp_q_2", "sp_q_3"]) == {
        "sp_p_1": "sp_p", "sp_q_2": "sp_q_2", "sp_q_3": "sp_q_3"}
    assert _display_names(["sp_p_1", "sp_p"]) == {"sp_p_1": "sp_p_1", "sp_p": "sp_p"}


def test_dead_clauses_are_dropped():
    src = ":- entry p(X) : ground(X).\np(X) :- var(X), q(X).\np(a).\nq(b).\n"
    run = specialize(src)
    assert run.residual.text().splitlines()[1:] == ["sp_p(a)."]


def test_dot_export(running):
    dot = export_dot(specialize(running).result)
    assert dot.startswith("digraph")
    assert dot.count("shape=ellipse") == 3
    assert dot.count("style=dashed") == 2
    assert "^{A/G,B/V} tw(A,B) ^{A/G,B/G}" in dot


def test_tables_roundtrip(running):
    res = specialize(running).result
    back = load_tables(dump_tables(res), SHFR)
    assert len(back["answers"]) == len(res.at) == 3
    assert len(back["gen"]) == len(res.gt)
    assert len(back["spec"]) == len(res.st)
    for k, ap in res.at.items():
        assert back["answers"][k] == ap
    assert {k for k in back["gen"]} == set(res.gt.keys())


def test_pd_residual_has_no_entry_props(running):
    run = specialize(running, RunConfig.from_preset("classical-pd"))
    assert run.residual.text().startswith(":- entry sp_main(s(s(s(A))),B).\n")
