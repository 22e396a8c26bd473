import pytest

from heptaca import datafiles
from heptaca.table import (
    ADOPTED_WEIGHTS,
    CellState,
    TableError,
    TransitionTable,
    derive_weights,
    find_sigma_collisions,
    load_table,
    lookup,
    merge_tables,
    parse_table,
    parse_state,
    state_counts,
    validate_table,
)

B, M, V, W, Y, R = CellState.B, CellState.M, CellState.V, CellState.W, CellState.Y, CellState.R


def test_published_shape(published):
    assert len(published) == 137
    assert max(e.sigma for e in published) == 156
    assert sorted(e.id for e in published) == list(range(137))


def test_known_rows(published):
    e = published.by_id(75)
    assert e.code() == "2-20003:2" and e.sigma == 104
    assert published.by_id(3).line() == "3 1-11000:2 5"
    assert lookup(published, Y, 5) == B
    assert lookup(published, Y, 999) is None


def test_report(published):
    rep = validate_table(published)
    assert rep.ok
    assert rep.distinct_sigmas == 73
    assert rep.max_counts == {"Y": 3, "B": 3, "R": 2, "M": 3, "V": 3}
    joined = "\n".join(rep.findings)
    assert "not the stated 69" in joined
    assert "(1, 4, 14, 30)" in joined
    assert "entries 22 and 49" in joined


def test_shared_key_picks_literal_profile(published):
    assert published.entry(V, 34, (0, 0, 0, 0, 1)).id == 22
    assert published.entry(V, 34, (1, 1, 0, 1, 0)).id == 49


def test_state_counts(published):
    c = state_counts(published)
    assert sum(c.values()) == 137
    assert set(c) == {"W", "Y", "B", "R", "M", "V"}


def test_parse_state():
    assert parse_state("m") == M
    assert parse_state("3") == R
    with pytest.raises(KeyError):
        parse_state("Q")


def test_malformed_line():
    with pytest.raises(TableError) as e:
        parse_table("0 0-00000:0 0\n1 1-2000:1 2\n")
    assert e.value.line == 2


def test_sigma_mismatch_strict_and_lenient():
    text = "0 1-11000:2 6\n"
    with pytest.raises(TableError, match="entry 0"):
        parse_table(text)
    t = parse_table(text, strict=False)
    assert t.problems and not validate_table(t).ok


def test_determinism_conflict():
    text = "0 1-11000:2 5\n1 1-11000:3 5\n"
    with pytest.raises(TableError, match="entry 0 maps it to B"):
        parse_table(text)
    rep = validate_table(parse_table(text, strict=False))
    assert rep.determinism_conflicts == [(0, 1)]


def test_too_many_neighbours():
    with pytest.raises(TableError):
        parse_table("0 1-44000:1 20\n")


def test_duplicate_id():
    with pytest.raises(TableError, match="duplicate"):
        parse_table("0 0-00000:0 0\n0 1-10000:1 1\n")


def test_comments_and_blanks():
    t = parse_table("# head\n\n0 0-00000:0 0  # blank stays blank\n")
    assert len(t) == 1


def test_merge(published):
    extra = parse_table("137 1-01012:0 101\n")
    m = merge_tables(published, extra)
    assert len(m) == 138 and m.entry(Y, 101).new == W
    with pytest.raises(TableError):
        merge_tables(published, parse_table("3 1-10000:1 1\n"))
    with pytest.raises(TableError):
        merge_tables(published, parse_table("200 1-11000:2 5\n"))


def test_supplement_is_disjoint(published):
    sup = load_table(datafiles.supplement_path())
    assert {e.id for e in sup} == {137, 138}
    for e in sup:
        assert published.entry(e.current, e.sigma) is None


def test_derive_weights():
    assert derive_weights((3, 3, 2, 3)) == (0, 1, 4, 16, 48)
    assert derive_weights((3, 3, 2, 3), top=2) == (0, 1, 4)
    with pytest.raises(ValueError):
        derive_weights((3,), top=4)


def test_collision_34():
    found = [(s, a, b) for s, a, b in find_sigma_collisions(ADOPTED_WEIGHTS) if s == 34]
    assert (34, (0, 0, 0, 0, 1), (1, 1, 0, 1, 0)) in found


def test_no_collisions_under_derived_weights():
    w = (0,) + derive_weights((3, 3, 2, 3, 3), top=5)[1:]
    assert find_sigma_collisions(w, (3, 3, 2, 3, 3)) == []


def test_raw_weights_need_caps():
    with pytest.raises(ValueError):
        find_sigma_collisions((0, 1, 4, 12, 29, 34))


def test_empty_table():
    rep = validate_table(TransitionTable([]))
    assert rep.entry_count == 0 and rep.ok
