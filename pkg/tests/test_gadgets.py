import pytest

from heptaca import datafiles
from heptaca.engine import step
from heptaca.gadgets import (
    BLUE,
    EXACT_TRACES,
    ENTRY_ONLY_TRACES,
    KINDS,
    MAUVE,
    PRINTED_TRACES,
    TRACE_CASES,
    GadgetError,
    LocomotiveSpec,
    build_gadget,
    check_filter_flip,
    check_filter_semantics,
    compare_trace,
    extend_track,
    fork_copies,
    format_gadget,
    golden_suite,
    inject,
    injection_choices,
    load_errata,
    load_gadget,
    locomotives,
    parse_gadget,
    simulate_case,
    transit,
    unexplained,
)
from heptaca.heptagrid import CENTER, TileAddress, parse_address
from heptaca.table import CellState

W, Y, B, R, M, V = CellState


def T(text):
    return parse_address(text)


@pytest.mark.parametrize("kind", KINDS)
def test_layout_is_idle_fixpoint(kind, sim_table):
    g = build_gadget(kind)
    c = g.idle()
    assert step(c, sim_table).same_cells(c)


@pytest.mark.parametrize("kind", KINDS)
def test_shipped_file_matches_builder(kind):
    assert datafiles.gadget_path(kind).read_text(encoding="utf-8") == format_gadget(build_gadget(kind))


@pytest.mark.parametrize("kind", KINDS)
def test_format_roundtrip(kind):
    g = build_gadget(kind)
    h = parse_gadget(format_gadget(g))
    assert h.cells == g.cells
    assert h.injection_points == g.injection_points
    assert h.observation_cell == g.observation_cell
    assert h.expected_traces == g.expected_traces


def test_transcribed_cells():
    jp = build_gadget("joined-path").cell_map()
    for t in "2,2 1,1 7,1 7,2 7,5 7,13 5,2 5,7 5,20 5,54".split():
        assert jp[T(t)] == Y
    conv = build_gadget("converter-b2m").cell_map()
    assert conv[T("3,1")] == conv[T("7,1")] == V
    assert conv[T("1,1")] == conv[T("2,1")] == M
    assert build_gadget("converter-m2b").cell_map()[T("1,1")] == B
    flt = build_gadget("filter-blue").cell_map()
    assert flt[T("1,1")] == B and build_gadget("filter-mauve").cell_map()[T("1,1")] == M
    assert all(flt[T(t)] == V for t in "1,3 1,4 7,2 7,3".split())
    assert flt[T("5,2")] == flt[T("5,4")] == M
    assert flt[T("1,2")] == Y and flt[CENTER] == Y
    fx = build_gadget("fixed-switch").cell_map()
    for t in "3,55 3,21 3,8 3,3 6,54 6,20 6,7 6,2 4,1 4,4 5,5 5,6 5,18".split():
        assert fx[T(t)] == Y
    fork = build_gadget("fork").cell_map()
    assert all(fork[T(t)] == Y for t in "5,40 5,15 5,5 4,1".split())


def test_unknown_kind():
    with pytest.raises(GadgetError):
        build_gadget("turntable")
    with pytest.raises(GadgetError):
        load_gadget("turntable")


def test_bad_gadget_file():
    with pytest.raises(GadgetError):
        parse_gadget("name x\nframe 8\ncell 1,1 Q\n")


def test_locomotive_spec():
    assert LocomotiveSpec.parse("mauve") == MAUVE
    assert BLUE.rear == R and BLUE.front == B
    with pytest.raises(GadgetError):
        LocomotiveSpec(R)
    with pytest.raises(GadgetError):
        LocomotiveSpec.parse("green")


def test_inject_needs_known_point():
    g = build_gadget("fork")
    with pytest.raises(GadgetError):
        inject(g, "side", BLUE)
    c = inject(g, "main", MAUVE)
    rear, front = g.injection_points["main"]
    assert c.state(rear) == R and c.state(front) == M


@pytest.mark.parametrize("name", EXACT_TRACES)
def test_exact_traces(name, sim_table):
    rep = compare_trace(simulate_case(TRACE_CASES[name], table=sim_table), PRINTED_TRACES[name])
    listed = {e.trace for e in load_errata()}
    if name in listed:
        assert rep.diffs and unexplained(name, rep, load_errata()) == []
    else:
        assert rep.ok, rep.diffs


@pytest.mark.parametrize("name", ENTRY_ONLY_TRACES)
def test_entry_rows_match(name, sim_table):
    rep = compare_trace(simulate_case(TRACE_CASES[name], table=sim_table), PRINTED_TRACES[name])
    assert rep.fields("entry_id") == []
    assert rep.diffs  # the state or sum rows disagree and are listed as errata


def test_golden_suite_all_explained():
    res = golden_suite()
    assert [r.trace for r in res] == list(PRINTED_TRACES)
    assert all(r.ok for r in res), [(r.trace, r.unexplained, r.error) for r in res if not r.ok]


def test_errata_file():
    errata = load_errata()
    assert {e.trace for e in errata} == {"fx-b", "fx-m", "ch-b", "ch-m", "ch-b.f."}


def test_fork_duplicates():
    for loco in (BLUE, MAUVE):
        copies = fork_copies(8, loco)
        assert len(copies) == 2
        assert all(len(rears) == 1 for _, rears in copies)


@pytest.mark.parametrize("kind,loco,out", [("converter-b2m", BLUE, M), ("converter-m2b", MAUVE, B)])
def test_converters(kind, loco, out):
    hist = transit(kind, "main", loco, 14)
    g = build_gadget(kind)
    fronts = {c.state(T("4,33")) for c in hist}
    assert out in fronts and loco.front not in fronts
    idle = g.idle(hist[-1].window)
    near = [t for t in idle.states if hist[-1].window.dist[t] <= 3]
    assert all(hist[-1].state(t) == idle.state(t) for t in near)


@pytest.mark.parametrize("color", [B, M])
@pytest.mark.parametrize("loco", [BLUE, MAUVE])
def test_filter_matrix(color, loco):
    v = check_filter_semantics(color, loco)
    assert v.passed == (color == loco.front)
    assert v.restored and v.steps <= 20


def test_filter_flip():
    v = check_filter_flip()
    assert v.colors == (B, M, B)
    assert 134 in v.entries[0] and 129 in v.entries[1]
    assert v.toggles and v.restored and all(v.idle_after)


def test_injection_choices():
    ch = injection_choices()
    assert ("converter-b2m", "main", MAUVE) not in ch
    assert ("fixed-switch", "left", MAUVE) in ch
    assert len(ch) == 21


def test_extend_track_stays_clear(w8):
    occupied = {CENTER, T("1,1")}
    path = extend_track(w8, occupied, T("1,1"), CENTER, reach=5)
    assert w8.dist[path[-1]] == 5
    prev = T("1,1")
    for t in path:
        assert prev in w8.adjacency[t]
        prev = t


def test_locomotives_pairs(w8):
    c = inject(build_gadget("track-line"), "main", BLUE, w8)
    (front, rears), = locomotives(c)
    assert c.state(front) == B and len(rears) == 1
