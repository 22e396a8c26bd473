"""Tile-exact idle configurations, locomotive injection and trace comparison.

Every layout below starts from the coordinates printed next to the figures.
Tracks continue beyond what the figures show, so each track end is prolonged
outward with fresh Y-cells: arrival ends a few tiles (room for the rear of an
injected locomotive), exit ends far enough that a locomotive can run for
several dozen steps before meeting the dead end of its track.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import datafiles
from .engine import Configuration, TraceRow, run_trace, simulation_table, step, transition
from .heptagrid import CENTER, DiscWindow, TileAddress, build_window, parse_address
from .table import B, M, R, V, W, Y, CellState, parse_state

FRAME = 8
# arrival tracks are prolonged up to this distance from the centre
ENTRY_REACH = 6
# exit tracks go out to this circle and then follow it
EXIT_RING = 6
EXIT_WALK = 40
HORIZON = 20

KINDS = (
    "track-line",
    "track-arc",
    "joined-path",
    "fork",
    "converter-b2m",
    "converter-m2b",
    "filter-blue",
    "filter-mauve",
    "fixed-switch",
    "filter-flip",
)


class GadgetError(ValueError):
    pass


@dataclass(frozen=True)
class LocomotiveSpec:
    color: CellState

    def __post_init__(self):
        c = parse_state(self.color) if isinstance(self.color, str) else CellState(self.color)
        if c not in (B, M):
            raise GadgetError(f"a locomotive front is B or M, not {c}")
        object.__setattr__(self, "color", c)

    @property
    def front(self) -> CellState:
        return self.color

    @property
    def rear(self) -> CellState:
        return R

    @classmethod
    def parse(cls, text: str) -> "LocomotiveSpec":
        t = text.strip().lower()
        names = {"blue": B, "b": B, "mauve": M, "m": M}
        if t not in names:
            raise GadgetError(f"unknown locomotive colour {text!r}")
        return cls(names[t])


BLUE = LocomotiveSpec(B)
MAUVE = LocomotiveSpec(M)


@dataclass(frozen=True)
class GadgetLayout:
    name: str
    frame: int
    cells: tuple  # ((TileAddress, CellState), ...) non-blank cells
    injection_points: dict  # name -> (rear, front)
    observation_cell: TileAddress
    expected_traces: dict = field(default_factory=dict)  # name -> [TraceRow]

    def cell_map(self) -> dict:
        return dict(self.cells)

    def window(self) -> DiscWindow:
        return build_window(self.frame)

    def idle(self, window: DiscWindow | None = None) -> Configuration:
        return Configuration.from_cells(window or self.window(), self.cells)

    def with_cells(self, overrides: dict) -> "GadgetLayout":
        m = self.cell_map()
        for t, s in overrides.items():
            if s == W:
                m.pop(t, None)
            else:
                m[t] = CellState(s)
        return GadgetLayout(self.name, self.frame, _sorted_cells(m), self.injection_points,
                            self.observation_cell, self.expected_traces)

    def validate(self):
        """Raise GadgetError unless the layout satisfies its structural invariants."""
        w = self.window()
        m = self.cell_map()
        for t, _ in self.cells:
            if t not in w:
                raise GadgetError(f"{self.name}: {t} lies outside frame {self.frame}")
        if self.observation_cell not in w:
            raise GadgetError(f"{self.name}: observation cell outside the frame")
        for name, (rear, front) in self.injection_points.items():
            if m.get(rear) != Y or m.get(front) != Y:
                raise GadgetError(f"{self.name}: injection point {name} is not on Y-cells")
            if front not in w.adjacency[rear]:
                raise GadgetError(f"{self.name}: injection point {name} is not two adjacent cells")


def _sorted_cells(m: dict) -> tuple:
    return tuple(sorted(m.items(), key=lambda kv: (kv[0].sector, kv[0].index)))


# ---------------------------------------------------------------------------
# file format


def parse_gadget(source) -> GadgetLayout:
    if isinstance(source, str):
        source = io.StringIO(source)
    name = None
    frame = None
    cells = {}
    inject = {}
    observe = None
    expected = {}
    for lineno, raw in enumerate(source, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        try:
            if key == "gadget" and len(parts) == 2:
                name = parts[1]
            elif key == "radius" and len(parts) == 2:
                frame = int(parts[1])
            elif key == "cell" and len(parts) == 3:
                t = parse_address(parts[1])
                if t in cells:
                    raise GadgetError(f"cell {t} listed twice")
                cells[t] = parse_state(parts[2])
            elif key == "inject" and len(parts) == 4:
                inject[parts[1]] = (parse_address(parts[2]), parse_address(parts[3]))
            elif key == "observe" and len(parts) == 2:
                observe = parse_address(parts[1])
            elif key == "expect" and len(parts) == 3:
                time, state, sigma, entry = parts[2].split(":")
                eid = None if entry in ("-", "") else int(entry)
                expected.setdefault(parts[1], []).append(TraceRow(int(time), parse_state(state), int(sigma), eid))
            else:
                raise GadgetError(f"unrecognised line {raw.strip()!r}")
        except (ValueError, KeyError) as exc:
            raise GadgetError(f"line {lineno}: {exc}") from None
    if name is None or frame is None or observe is None:
        raise GadgetError("a gadget needs 'gadget', 'radius' and 'observe' lines")
    for rows in expected.values():
        rows.sort(key=lambda r: r.time)
    cells = {t: s for t, s in cells.items() if s != W}
    return GadgetLayout(name, frame, _sorted_cells(cells), inject, observe, expected)


def load_gadget(name_or_path) -> GadgetLayout:
    path = datafiles.gadget_path(str(name_or_path))
    if not path.exists():
        raise GadgetError(f"no gadget file for {name_or_path!r} ({path})")
    with open(path, encoding="utf-8") as fh:
        return parse_gadget(fh)


def _addr(t: TileAddress) -> str:
    return "0" if t.is_center else f"{t.sector},{t.index}"


def format_gadget(g: GadgetLayout) -> str:
    out = [f"gadget {g.name}", f"radius {g.frame}", f"observe {_addr(g.observation_cell)}"]
    for name, (rear, front) in g.injection_points.items():
        out.append(f"inject {name} {_addr(rear)} {_addr(front)}")
    out += [f"cell {_addr(t)} {s}" for t, s in g.cells]
    for name, rows in g.expected_traces.items():
        for r in rows:
            eid = "-" if r.entry_id is None else r.entry_id
            out.append(f"expect {name} {r.time}:{r.state}:{r.sigma}:{eid}")
    return "\n".join(out) + "\n"


def write_gadget(g: GadgetLayout, path):
    Path(path).write_text(format_gadget(g), encoding="utf-8")


# ---------------------------------------------------------------------------
# track prolongation


def _angle(w: DiscWindow, t) -> float:
    x, y, _ = w.centers[t]
    return math.atan2(y, x)


def _hdist(w: DiscWindow, a, b) -> float:
    p, q = w.centers[a], w.centers[b]
    return math.acosh(max(1.0, p[2] * q[2] - p[0] * q[0] - p[1] * q[1]))


def _free(w: DiscWindow, occupied, cand, cur) -> bool:
    # a new track cell may touch the occupied cells only through its predecessor
    if cand is None or cand in occupied:
        return False
    return all(u is None or u == cur or u not in occupied for u in w.adjacency[cand])


def extend_track(w: DiscWindow, occupied, end, prev, reach: int, walk: int = 0, turn: int = 1) -> list:
    """Cells prolonging a track beyond ``end`` (coming from ``prev``).

    Goes straight outward until distance ``reach``, then follows that circle
    for ``walk`` more cells, turning counterclockwise for ``turn`` = 1 and
    clockwise for -1.  Every new cell touches the existing cells only through
    its predecessor, so the track keeps exactly two Y-neighbours per cell.
    """
    occ = set(occupied)
    out = []
    cur, pr = end, prev
    while w.dist[cur] < reach:
        cands = [n for n in w.adjacency[cur] if n is not None and w.dist[n] > w.dist[cur] and _free(w, occ, n, cur)]
        if not cands:
            raise GadgetError(f"cannot prolong the track beyond {cur}")
        nxt = max(cands, key=lambda n: (_hdist(w, pr, n), -n.sector, -n.index))
        out.append(nxt)
        occ.add(nxt)
        pr, cur = cur, nxt
    band = (w.dist[cur], w.dist[cur] + 1)
    for _ in range(walk):
        # stay on the circle when possible, otherwise sidestep one circle out
        a0 = _angle(w, cur)
        best = None
        for n in w.adjacency[cur]:
            if n is None or w.dist[n] not in band or not _free(w, occ, n, cur):
                continue
            gain = ((_angle(w, n) - a0) * turn) % (2 * math.pi)
            if gain > math.pi:
                continue
            key = (w.dist[n], -gain)
            if best is None or key < best[0]:
                best = (key, n)
        if best is None:
            raise GadgetError(f"cannot follow circle {band[0]} beyond {cur}")
        cur = best[1]
        out.append(cur)
        occ.add(cur)
    return out


# ---------------------------------------------------------------------------
# layouts transcribed from the figure descriptions


def _tiles(text: str) -> list:
    return [parse_address(x) for x in text.split()]


def _rows(states: str, sums, entries) -> list:
    return [TraceRow(i, parse_state(s), sg, e) for i, (s, sg, e) in enumerate(zip(states, sums, entries))]


# the printed trace lines, verbatim (time 0 first)
PRINTED_TRACES = {
    "tr-b": _rows("YYYBRYYY", (2, 2, 5, 13, 5, 13, 2, 2), (1, 1, 3, 4, 5, 6, 1, 1)),
    "tr-m": _rows("YYYMRYYY", (2, 2, 30, 13, 30, 13, 2, 2), (1, 1, 8, 9, 10, 6, 1, 1)),
    "fk-b": _rows("YYYBRYYY", (3, 3, 6, 14, 9, 25, 3, 3), (11, 11, 12, 13, 14, 15, 11, 11)),
    "fk-m": _rows("YYYMRYYY", (3, 3, 31, 14, 59, 25, 3, 3), (11, 11, 16, 17, 18, 15, 11, 11)),
    "fx-b": _rows("VVVRVVVV", (37, 37, 40, 17, 48, 37, 37, 37), (21, 21, 26, 27, 34, 21, 21, 21)),
    "fx-m": _rows("VVRVVVVV", (37, 37, 65, 76, 48, 37, 37, 37), (21, 21, 39, 43, 34, 21, 21, 21)),
    "ch-b": _rows("YYYMRYYY", (128, 128, 131, 139, 156, 128, 128, 128), (45, 45, 48, 50, 54, 58, 45, 45)),
    "ch-m": _rows("YYYYYYYY", (78, 78, 106, 89, 81, 89, 78, 78), (60, 60, 63, 64, 69, 72, 60, 60)),
    "ftb-b": _rows("YYBRYYY", (52, 55, 63, 55, 63, 52, 52), (73, 84, 91, 97, 102, 73, 73)),
    "ftb-m": _rows("YYYYYYY", (52, 80, 63, 52, 52, 52, 52), (73, 105, 102, 73, 73, 73, 73)),
    "ftm-m": _rows("YYMRYYY", (77, 105, 88, 105, 88, 77, 77), (111, 118, 119, 124, 127, 111, 111)),
    "ftm-b": _rows("YYYYYYY", (77, 80, 88, 77, 77, 77, 77), (111, 105, 127, 111, 111, 111, 111)),
    "ch-m.f.": _rows("MMBBBBBB", (104, 103, 104, 104, 104, 104, 104, 104), (115, 129, 75, 75, 75, 75, 75, 75)),
    "ch-b.f.": _rows("WWWMRWWW", (104, 103, 104, 104, 104, 104, 104, 104), (75, 134, 115, 115, 115, 115, 115, 115)),
}


@dataclass(frozen=True)
class TraceCase:
    """How a printed trace line is produced: gadget, injection, colour."""

    trace: str
    gadget: str
    injection: str
    loco: LocomotiveSpec
    overrides: tuple = ()  # cells recoloured before injection


TRACE_CASES = {
    c.trace: c
    for c in (
        TraceCase("tr-b", "joined-path", "main", BLUE),
        TraceCase("tr-m", "joined-path", "main", MAUVE),
        TraceCase("fk-b", "fork", "main", BLUE),
        TraceCase("fk-m", "fork", "main", MAUVE),
        TraceCase("fx-b", "fixed-switch", "left", BLUE),
        TraceCase("fx-m", "fixed-switch", "left", MAUVE),
        TraceCase("ch-b", "converter-b2m", "main", BLUE),
        TraceCase("ch-m", "converter-m2b", "main", MAUVE),
        TraceCase("ftb-b", "filter-blue", "main", BLUE),
        TraceCase("ftb-m", "filter-blue", "main", MAUVE),
        TraceCase("ftm-m", "filter-mauve", "main", MAUVE),
        TraceCase("ftm-b", "filter-mauve", "main", BLUE),
        TraceCase("ch-m.f.", "filter-flip", "signal", MAUVE, ((TileAddress(1, 1), M),)),
        TraceCase("ch-b.f.", "filter-flip", "signal", MAUVE),
    )
}

# lines compared on every field, and lines compared on entry ids only
EXACT_TRACES = ("tr-b", "tr-m", "fk-b", "fk-m", "fx-b", "fx-m", "ftb-b", "ftb-m", "ftm-m", "ftm-b", "ch-m.f.")
ENTRY_ONLY_TRACES = ("ch-b", "ch-m", "ch-b.f.")


@dataclass(frozen=True)
class _Plan:
    observe: str
    groups: tuple  # ((state, "cells"), ...)
    entries: tuple  # (end, prev) track ends receiving a short prolongation
    exits: tuple  # (end, prev, turn) track ends prolonged along a circle
    inject: tuple  # (name, rear, front)


_FILTER = (
    (Y, "6,21 6,8 6,3 6,1 0 3,1 3,4 3,12 3,33 1,2"),
    (V, "7,1 1,3 1,4 7,2 7,3"),
    (R, "5,1"),
    (M, "5,2 5,4"),
)
_CONVERTER_TRACK = (Y, "6,21 6,8 6,3 6,1 0 4,1 4,4 4,12 4,33")
_CONVERTER_V = (V, "3,1 7,1")

_PLANS = {
    "track-line": _Plan(
        "3,2",
        ((Y, "3,54 3,20 3,7 3,2 2,1 1,1 1,2 1,5 1,13 1,34"),),
        (("1,34", "1,13"),),
        (("3,54", "3,20", -1),),
        (("main", "1,34", "1,13"),),
    ),
    "track-arc": _Plan(
        "5,2",
        ((Y, "4,2 4,3 4,4 5,2 5,3 5,4 6,2"),),
        (("4,2", "4,3"),),
        (("6,2", "5,4", 1),),
        (("main", "4,3", "4,4"),),
    ),
    "joined-path": _Plan(
        "3,2",
        ((Y, "7,34 7,13 7,5 7,2 7,1 1,1 2,2 2,3 2,4 3,2 3,3 3,4 4,2 4,3 4,4 5,2 5,7 5,20 5,54"),),
        (("7,34", "7,13"),),
        (("5,54", "5,20", 1),),
        (("main", "1,1", "2,2"),),
    ),
    # the arriving branch reaches (4,1) through (4,4); see the module notes
    "fork": _Plan(
        "4,1",
        ((Y, "5,40 5,15 5,5 4,4 4,1 3,1 3,2 3,6 3,17 3,46 5,1 6,2 6,6 6,17 6,46"),),
        (("5,40", "5,15"),),
        (("3,46", "3,17", -1), ("6,46", "6,17", 1)),
        (("main", "5,40", "5,15"),),
    ),
    "converter-b2m": _Plan(
        "0",
        (_CONVERTER_TRACK, _CONVERTER_V, (M, "1,1 2,1")),
        (("6,21", "6,8"),),
        (("4,33", "4,12", 1),),
        (("main", "6,21", "6,8"),),
    ),
    "converter-m2b": _Plan(
        "0",
        (_CONVERTER_TRACK, _CONVERTER_V, (B, "1,1 2,1")),
        (("6,21", "6,8"),),
        (("4,33", "4,12", 1),),
        (("main", "6,21", "6,8"),),
    ),
    "filter-blue": _Plan(
        "0",
        _FILTER + ((B, "1,1"),),
        (("6,21", "6,8"),),
        (("3,33", "3,12", -1),),
        (("main", "6,8", "6,3"),),
    ),
    "filter-mauve": _Plan(
        "0",
        _FILTER + ((M, "1,1"),),
        (("6,21", "6,8"),),
        (("3,33", "3,12", -1),),
        (("main", "6,8", "6,3"),),
    ),
    "fixed-switch": _Plan(
        "0",
        (
            (Y, "3,55 3,21 3,8 3,3 3,1 6,54 6,20 6,7 6,2 5,1 4,1 4,4 5,5 5,6 5,18 5,48"),
            (V, "0 1,1"),
        ),
        (("3,55", "3,21"), ("6,54", "6,20")),
        (("5,48", "5,18", 1),),
        (("left", "3,21", "3,8"), ("right", "6,20", "6,7")),
    ),
    # a blue filter with a signal track ending at (1,6), just above (1,2)
    "filter-flip": _Plan(
        "1,1",
        _FILTER + ((B, "1,1"), (Y, "1,6")),
        (("6,21", "6,8"), ("1,6", "1,2")),
        (("3,33", "3,12", -1),),
        (("main", "6,8", "6,3"), ("signal", "1,17", "1,6")),
    ),
}

_EXPECTED = {
    "joined-path": ("tr-b", "tr-m"),
    "fork": ("fk-b", "fk-m"),
    "fixed-switch": ("fx-b", "fx-m"),
    "converter-b2m": ("ch-b",),
    "converter-m2b": ("ch-m",),
    "filter-blue": ("ftb-b", "ftb-m"),
    "filter-mauve": ("ftm-m", "ftm-b"),
    "filter-flip": ("ch-m.f.", "ch-b.f."),
}


def build_gadget(kind: str) -> GadgetLayout:
    """The idle layout of a gadget, constructed from the printed coordinates."""
    if kind not in _PLANS:
        raise GadgetError(f"unknown gadget kind {kind!r}; expected one of {', '.join(KINDS)}")
    plan = _PLANS[kind]
    w = build_window(FRAME)
    cells = {}
    for state, text in plan.groups:
        for t in _tiles(text):
            cells[t] = state
    for end, prev in plan.entries:
        for t in extend_track(w, cells, parse_address(end), parse_address(prev), ENTRY_REACH):
            cells[t] = Y
    for end, prev, turn in plan.exits:
        for t in extend_track(w, cells, parse_address(end), parse_address(prev), EXIT_RING, EXIT_WALK, turn):
            cells[t] = Y
    inject = {name: (parse_address(rear), parse_address(front)) for name, rear, front in plan.inject}
    expected = {name: PRINTED_TRACES[name] for name in _EXPECTED.get(kind, ())}
    g = GadgetLayout(kind, FRAME, _sorted_cells(cells), inject, parse_address(plan.observe), expected)
    g.validate()
    return g


# ---------------------------------------------------------------------------
# locomotives


def inject(layout: GadgetLayout, point: str, loco: LocomotiveSpec, window: DiscWindow | None = None) -> Configuration:
    """Idle layout with a locomotive placed at the named injection point."""
    if point not in layout.injection_points:
        raise GadgetError(f"{layout.name} has no injection point {point!r}")
    rear, front = layout.injection_points[point]
    m = layout.cell_map()
    m[rear] = R
    m[front] = loco.front
    return Configuration.from_cells(window or layout.window(), m.items())


def locomotives(c: Configuration) -> list:
    """(front, rear) cell pairs: every front state next to an R-cell."""
    out = []
    for t, s in c.states.items():
        if s in (B, M):
            rears = [u for u in c.window.adjacency[t] if u is not None and c.states.get(u) == R]
            out.append((t, tuple(rears)))
    return sorted(out)


def run_until_idle(c: Configuration, idle: Configuration, table, horizon: int = HORIZON, mode="quiescent"):
    """Steps until the configuration equals ``idle`` again; returns (steps, history)."""
    hist = [c]
    for k in range(1, horizon + 1):
        c = step(c, table, mode)
        hist.append(c)
        if c.same_cells(idle):
            return k, hist
    return None, hist


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True)
class TraceDiff:
    time: int
    field: str
    expected: object
    simulated: object

    def line(self, trace: str = "") -> str:
        return "\t".join(str(x) for x in (trace, self.time, self.field, self.expected, self.simulated))


@dataclass
class TraceReport:
    diffs: list

    @property
    def ok(self) -> bool:
        return not self.diffs

    def fields(self, *names) -> list:
        return [d for d in self.diffs if d.field in names]


def compare_trace(simulated: list, expected: list) -> TraceReport:
    """Field by field comparison, rows aligned on time 0."""
    diffs = []
    exp = {r.time: r for r in expected}
    sim = {r.time: r for r in simulated}
    for t in sorted(set(exp) | set(sim)):
        if t not in sim or t not in exp:
            diffs.append(TraceDiff(t, "row", exp.get(t), sim.get(t)))
            continue
        a, b = exp[t], sim[t]
        for name in ("state", "sigma", "entry_id"):
            if getattr(a, name) != getattr(b, name):
                diffs.append(TraceDiff(t, name, getattr(a, name), getattr(b, name)))
    return TraceReport(diffs)


def simulate_case(case: TraceCase, layout: GadgetLayout | None = None, table=None, mode="quiescent") -> list:
    """Simulated rows for a printed trace line (same length as the printed line)."""
    layout = layout or build_gadget(case.gadget)
    if case.overrides:
        layout = layout.with_cells(dict(case.overrides))
    table = table or simulation_table()
    c = inject(layout, case.injection, case.loco)
    steps = len(PRINTED_TRACES[case.trace]) - 1
    return run_trace(c, table, layout.observation_cell, steps, mode)


# ---------------------------------------------------------------------------
# errata


@dataclass(frozen=True)
class Erratum:
    trace: str
    time: int
    field: str
    printed: str
    simulated: str
    note: str


def load_errata(path=None) -> list:
    path = Path(path) if path else datafiles.errata_path()
    out = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 6:
                raise GadgetError(f"errata line needs 6 tab-separated fields: {line!r}")
            out.append(Erratum(parts[0], int(parts[1]), parts[2], parts[3], parts[4], parts[5]))
    return out


def unexplained(trace: str, report: TraceReport, errata) -> list:
    """Diffs of a trace that the errata list does not account for."""
    known = {(e.trace, e.time, e.field, e.printed, e.simulated) for e in errata}
    return [
        d for d in report.diffs
        if (trace, d.time, d.field, _show(d.expected), _show(d.simulated)) not in known
    ]


def _show(v) -> str:
    return "-" if v is None else str(v)


# ---------------------------------------------------------------------------
# semantic checks


@dataclass(frozen=True)
class FilterVerdict:
    filter_color: CellState
    loco: CellState
    passed: bool
    restored: bool  # the gadget is back at its idle state when the horizon ends
    steps: int  # step from which the gadget stayed idle

    @property
    def correct(self) -> bool:
        return self.passed == (self.filter_color == self.loco) and self.restored


# first exit cell after the filter centre
FILTER_EXIT = TileAddress(3, 4)


def check_filter_semantics(color, loco: LocomotiveSpec, horizon: int = HORIZON, table=None) -> FilterVerdict:
    """Run one locomotive into a filter: does it cross, and is the filter idle afterwards?"""
    color = parse_state(color) if isinstance(color, str) else CellState(color)
    kind = {B: "filter-blue", M: "filter-mauve"}[color]
    g = build_gadget(kind)
    table = table or simulation_table()
    w = g.window()
    idle = g.idle(w)
    c = inject(g, "main", loco, w)
    passed = False
    settled = None
    for k in range(1, horizon + 1):
        c = step(c, table)
        if c.state(FILTER_EXIT) == loco.front:
            passed = True
        # the gadget itself (distance <= 4 from its centre) is idle again
        if _idle_near(c, idle, 4):
            if settled is None:
                settled = k
        else:
            settled = None
    return FilterVerdict(color, loco.front, passed, settled is not None, settled or horizon)


def _idle_near(c: Configuration, idle: Configuration, radius: int) -> bool:
    w = c.window
    cells = set(c.states) | set(idle.states)
    return all(c.state(t) == idle.state(t) for t in cells if w.dist[t] <= radius)


@dataclass(frozen=True)
class FlipVerdict:
    colors: tuple  # colour cell after each signal, starting with the initial one
    entries: tuple  # entry ids applied at the colour cell, one tuple per signal
    idle_after: tuple  # whether each signal left an idle filter of the new colour

    @property
    def toggles(self) -> bool:
        return all(a != b for a, b in zip(self.colors, self.colors[1:]))

    @property
    def restored(self) -> bool:
        return len(self.colors) >= 3 and self.colors[0] == self.colors[2]


def check_filter_flip(layout: GadgetLayout | None = None, signals: int = 2, horizon: int = HORIZON, table=None) -> FlipVerdict:
    """Send mauve signals one after the other at the colour cell (1,1)."""
    g = layout or build_gadget("filter-flip")
    table = table or simulation_table()
    w = g.window()
    cell = g.observation_cell
    colors = [g.cell_map()[cell]]
    entries = []
    idle_after = []
    for _ in range(signals):
        c = inject(g, "signal", MAUVE, w)
        applied = []
        for _k in range(horizon):
            _, _, eid = transition(c, cell, table)
            applied.append(eid)
            c = step(c, table)
        new_color = c.state(cell)
        g = g.with_cells({cell: new_color})
        idle_after.append(c.same_cells(g.idle(w)))
        colors.append(new_color)
        entries.append(tuple(e for i, e in enumerate(applied) if i == 0 or e != applied[i - 1]))
    return FlipVerdict(tuple(colors), tuple(entries), tuple(idle_after))


def fork_copies(horizon: int = 8, loco: LocomotiveSpec = BLUE, table=None) -> list:
    """Locomotives present ``horizon`` steps after one enters the fork."""
    g = build_gadget("fork")
    c = inject(g, "main", loco)
    table = table or simulation_table()
    for _ in range(horizon):
        c = step(c, table)
    return locomotives(c)


def transit(kind: str, point: str, loco: LocomotiveSpec, steps: int, table=None) -> list:
    """Configurations of a locomotive run through a gadget, time 0 included."""
    g = build_gadget(kind)
    c = inject(g, point, loco)
    table = table or simulation_table()
    hist = [c]
    for _ in range(steps):
        c = step(c, table)
        hist.append(c)
    return hist


def golden_cases() -> list:
    return [TRACE_CASES[n] for n in PRINTED_TRACES]



@dataclass(frozen=True)
class GoldenResult:
    trace: str
    gadget: str
    simulated: list
    expected: list
    report: TraceReport
    unexplained: list  # diffs not covered by the errata
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and not self.unexplained


def golden_suite(table=None, errata=None, mode="quiescent") -> list:
    """Replay every printed trace line from the shipped gadget files."""
    table = table or simulation_table()
    errata = load_errata() if errata is None else errata
    layouts = {}
    out = []
    for name, case in TRACE_CASES.items():
        if case.gadget not in layouts:
            layouts[case.gadget] = load_gadget(case.gadget)
        g = layouts[case.gadget]
        expected = g.expected_traces.get(name)
        if expected is None:
            out.append(GoldenResult(name, case.gadget, [], [], TraceReport([]), [], f"{case.gadget} has no expected trace {name}"))
            continue
        try:
            sim = simulate_case(case, g, table, mode)
        except LookupError as exc:
            out.append(GoldenResult(name, case.gadget, [], expected, TraceReport([]), [], str(exc)))
            continue
        rep = compare_trace(sim, expected)
        out.append(GoldenResult(name, case.gadget, sim, expected, rep, unexplained(name, rep, errata)))
    return out


# injection points that only take one locomotive colour; everything else takes both
ACCEPTS = {
    ("converter-b2m", "main"): (B,),
    ("converter-m2b", "main"): (M,),
    ("filter-flip", "signal"): (M,),
}


def injection_choices() -> list:
    """Every (kind, point, locomotive) that a gadget is built to receive."""
    out = []
    for kind in KINDS:
        for point in sorted(build_gadget(kind).injection_points):
            for color in ACCEPTS.get((kind, point), (B, M)):
                out.append((kind, point, LocomotiveSpec(color)))
    return out
