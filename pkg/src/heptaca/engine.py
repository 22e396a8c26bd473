"""Synchronous stepping of the weighted automaton over a disc window."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from . import datafiles
from .heptagrid import DiscWindow
from .table import ADOPTED_WEIGHTS, CellState, TransitionTable, WeightScheme, load_table, merge_tables

W = CellState.W

QUIESCENT = "quiescent"
STRICT = "strict"
MODES = (QUIESCENT, STRICT)

# entry id recorded when a blank cell keeps its state for an unlisted sigma
IMPLICIT_W = None


@lru_cache(maxsize=8)
def _load_sim_table(main: str, supplement: str | None) -> TransitionTable:
    t = load_table(main)
    if supplement is not None:
        t = merge_tables(t, load_table(supplement))
    return t


def simulation_table(with_supplement: bool = True) -> TransitionTable:
    """The published table, plus the supplement entries when present."""
    sup = datafiles.supplement_path()
    use = with_supplement and Path(sup).exists()
    return _load_sim_table(str(datafiles.table_path()), str(sup) if use else None)


class MissingTransition(LookupError):
    def __init__(self, cell, state, sigma, generation):
        super().__init__(f"no entry for cell {cell} in state {state} with sigma {sigma} at generation {generation}")
        self.cell = cell
        self.state = state
        self.sigma = sigma
        self.generation = generation


@dataclass(frozen=True)
class Configuration:
    """Cell states on a window; absent tiles are blank, outside tiles stay blank."""

    window: DiscWindow
    states: dict = field(default_factory=dict)
    generation: int = 0

    def __post_init__(self):
        for t, s in self.states.items():
            if t not in self.window:
                raise ValueError(f"{t} lies outside the window of radius {self.window.radius}")
            if s == W:
                raise ValueError("blank cells must not be stored")

    @classmethod
    def from_cells(cls, window, cells, generation=0):
        states = {t: CellState(s) for t, s in cells if CellState(s) != W}
        return cls(window, states, generation)

    def state(self, t) -> CellState:
        return self.states.get(t, W)

    def __getitem__(self, t) -> CellState:
        return self.states.get(t, W)

    def same_cells(self, other) -> bool:
        return self.states == other.states


@dataclass(frozen=True)
class TraceRow:
    time: int
    state: CellState
    sigma: int
    entry_id: int | None  # None: implicit blank completion

    def as_tuple(self):
        return (self.time, str(self.state), self.sigma, self.entry_id)


def neighbor_profile(c: Configuration, t) -> tuple:
    """Counts of Y, B, R, M, V among the 7 neighbours of t."""
    prof = [0, 0, 0, 0, 0]
    for u in c.window.adjacency[t]:
        if u is not None:
            s = c.states.get(u)
            if s:
                prof[s - 1] += 1
    return tuple(prof)


def neighborhood_weight(c: Configuration, t, weights: WeightScheme = ADOPTED_WEIGHTS) -> int:
    ws = weights.weights
    total = 0
    for u in c.window.adjacency[t]:
        if u is not None:
            s = c.states.get(u)
            if s:
                total += ws[s]
    return total


def _candidates(c: Configuration) -> set:
    # only non-blank cells and their neighbours can see a nonzero sigma
    cells = set(c.states)
    for t in c.states:
        cells.update(u for u in c.window.adjacency[t] if u is not None)
    return cells


def transition(c: Configuration, t, table: TransitionTable, mode: str = QUIESCENT, weights=ADOPTED_WEIGHTS):
    """(new state, sigma, entry id) for one cell of c."""
    state = c.state(t)
    prof = neighbor_profile(c, t)
    sigma = weights.sigma(prof)
    e = table.entry(state, sigma, prof)
    if e is not None:
        return e.new, sigma, e.id
    if mode == QUIESCENT and state == W:
        return W, sigma, IMPLICIT_W
    raise MissingTransition(t, state, sigma, c.generation)


def step(c: Configuration, table: TransitionTable, mode: str = QUIESCENT, order=None, weights=ADOPTED_WEIGHTS):
    """One synchronous generation.

    Every new state is computed from ``c`` alone, so the evaluation ``order``
    (any iterable over the candidate cells) cannot change the result.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    cells = _candidates(c) if order is None else list(order)
    new = {}
    for t in cells:
        s, _, _ = transition(c, t, table, mode, weights)
        if s != W:
            new[t] = s
    return Configuration(c.window, new, c.generation + 1)


def run(c: Configuration, table: TransitionTable, steps: int, mode: str = QUIESCENT, history: int = 0):
    """Advance ``steps`` generations; with ``history`` > 0 also return the last
    ``history`` configurations (oldest first, final one included)."""
    ring = deque(maxlen=history) if history > 0 else None
    if ring is not None:
        ring.append(c)
    for _ in range(steps):
        c = step(c, table, mode)
        if ring is not None:
            ring.append(c)
    return (c, list(ring)) if ring is not None else c


def run_trace(c: Configuration, table: TransitionTable, cell, steps: int, mode: str = QUIESCENT) -> list:
    """Rows for times 0..steps: state, sigma and the entry applied at that tick."""
    if cell not in c.window:
        raise KeyError(f"{cell} is not in the window")
    if steps < 1:
        raise ValueError("steps must be positive")
    rows = []
    for k in range(steps + 1):
        new, sigma, eid = transition(c, cell, table, mode)
        rows.append(TraceRow(k, c.state(cell), sigma, eid))
        if k < steps:
            c = step(c, table, mode)
    return rows


def support_radius(c: Configuration) -> int:
    """Largest distance from the centre of a non-blank cell (-1 if none)."""
    return max((c.window.dist[t] for t in c.states), default=-1)
