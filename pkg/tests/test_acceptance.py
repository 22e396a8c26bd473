"""Acceptance gate: one PASS/FAIL line per criterion, all tolerances exact."""
import random
import time

import numpy as np
import pytest

from heptaca import datafiles
from heptaca.engine import Configuration, simulation_table, step, support_radius
from heptaca.gadgets import (
    BLUE,
    ENTRY_ONLY_TRACES,
    EXACT_TRACES,
    KINDS,
    MAUVE,
    PRINTED_TRACES,
    TRACE_CASES,
    build_gadget,
    check_filter_flip,
    check_filter_semantics,
    compare_trace,
    fork_copies,
    inject,
    injection_choices,
    load_errata,
    simulate_case,
    transit,
)
from heptaca.heptagrid import build_window, circle_size, fibonacci
from heptaca.railway import Instruction, MachineProgram, interpret, parse_program, run_machine, transfer_program
from heptaca.render import RenderSpec, disc_polygons, polygon_count, render_window, shared_vertices
from heptaca.table import ADOPTED_WEIGHTS, CellState, derive_weights, find_sigma_collisions, load_table, validate_table

W, Y, B, R, M, V = CellState


@pytest.fixture
def gate(capsys):
    def report(n, title, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {title} | {detail}")
        assert ok, detail

    return report


def test_1_table_statistics(gate):
    t = load_table(datafiles.table_path(), strict=False)
    rep = validate_table(t)
    got = (rep.entry_count, rep.distinct_sigmas, rep.max_sigma)
    ok = (
        got == (137, 69, 156)
        and not rep.sigma_mismatches
        and not rep.determinism_conflicts
        and ADOPTED_WEIGHTS.weights == (0, 1, 4, 12, 29, 34)
    )
    gate(1, "table statistics", ok,
         f"entries/distinct/max = {got}, wanted (137, 69, 156); "
         f"sigma mismatches {len(rep.sigma_mismatches)}, collisions {len(rep.determinism_conflicts)}")


def test_2_grid_law(gate):
    t0 = time.perf_counter()
    w = build_window.__wrapped__(8)
    elapsed = time.perf_counter() - t0
    sizes = [len(w.ring(r)) for r in range(1, 9)]
    formula = [7 * fibonacci(2 * r - 1) for r in range(1, 9)]
    ok = sizes == formula == [7, 21, 56, 147, 385, 1008, 2639, 6909] and sizes[2] == 56 and elapsed < 5.0
    gate(2, "grid law", ok, f"rings {sizes}, build {elapsed:.2f}s")


def test_3_idle_fixpoints(gate):
    table = simulation_table()
    moving = []
    for kind in KINDS:
        c = build_gadget(kind).idle()
        if not step(c, table).same_cells(c):
            moving.append(kind)
    gate(3, "idle fixpoints", not moving, f"{len(KINDS) - len(moving)}/{len(KINDS)} layouts fixed" +
         (f", moving: {moving}" if moving else ""))


def test_4_golden_traces(gate):
    table = simulation_table()
    errata = load_errata()
    bad = []
    for name in EXACT_TRACES:
        rep = compare_trace(simulate_case(TRACE_CASES[name], table=table), PRINTED_TRACES[name])
        for d in rep.fields("sigma", "entry_id", "row"):
            bad.append(f"{name} t{d.time} {d.field} printed {d.expected} simulated {d.simulated}")
    for name in ENTRY_ONLY_TRACES:
        rep = compare_trace(simulate_case(TRACE_CASES[name], table=table), PRINTED_TRACES[name])
        for d in rep.diffs:
            if d.field in ("entry_id", "row"):
                bad.append(f"{name} t{d.time} {d.field} printed {d.expected} simulated {d.simulated}")
            elif not any(e.trace == name and e.time == d.time and e.field == d.field
                         and e.simulated == str(d.simulated) for e in errata):
                bad.append(f"{name} t{d.time} {d.field} not in errata")
    steps = max(len(v) - 1 for v in PRINTED_TRACES.values())
    gate(4, "golden traces", not bad and steps <= 8,
         f"{len(EXACT_TRACES)} exact + {len(ENTRY_ONLY_TRACES)} entry-only lines; mismatches: {bad or 'none'}")


def test_5_gadget_semantics(gate):
    fork = {c.name: len(fork_copies(8, loco)) for c, loco in ((B, BLUE), (M, MAUVE))}
    conv = {}
    for kind, loco, want in (("converter-b2m", BLUE, M), ("converter-m2b", MAUVE, B)):
        hist = transit(kind, "main", loco, 20)
        fronts = [s for c in hist[1:] for t, s in c.states.items() if s in (B, M) and c.window.dist[t] >= 5]
        conv[kind] = bool(fronts) and set(fronts) == {want}
    matrix = {(str(f), str(l.front)): check_filter_semantics(f, l).correct for f in (B, M) for l in (BLUE, MAUVE)}
    flip = check_filter_flip()
    flip_ok = flip.colors == (B, M, B) and 134 in flip.entries[0] and 129 in flip.entries[1] and flip.restored
    ok = set(fork.values()) == {2} and all(conv.values()) and all(matrix.values()) and flip_ok
    gate(5, "gadget semantics", ok,
         f"fork copies {fork}; converters {conv}; filter matrix {sum(matrix.values())}/4; "
         f"flip colours {[str(c) for c in flip.colors]}")


def test_6_weight_math(gate):
    dw = derive_weights((3, 3, 2, 3))
    col = [(s, a, b) for s, a, b in find_sigma_collisions(ADOPTED_WEIGHTS) if s == 34]
    t = load_table(datafiles.table_path())
    rep = validate_table(t)
    used = {e.id for e in t if e.sigma == 34 and e.current == V}
    flagged = any("(1, 4, 14, 30)" in f for f in rep.findings)
    ok = dw == (0, 1, 4, 16, 48) and (34, (0, 0, 0, 0, 1), (1, 1, 0, 1, 0)) in col and used == {22, 49} \
        and flagged and rep.ok
    gate(6, "weight-scheme math", ok, f"derive_weights {dw}; 34-collisions {col}; entries {sorted(used)}; "
         f"finding flagged {flagged}, report ok {rep.ok}")


def _random_program(rng):
    n = rng.randint(1, 10)
    ins = []
    for _ in range(n):
        op = rng.choice(("INC", "DEC", "HALT"))
        if op == "HALT":
            ins.append(Instruction("HALT"))
        elif op == "INC":
            ins.append(Instruction("INC", rng.randint(0, 1), rng.randrange(n)))
        else:
            ins.append(Instruction("DEC", rng.randint(0, 1), rng.randrange(n), rng.randrange(n)))
    return MachineProgram(tuple(ins))


def test_7_railway(gate):
    rng = random.Random(20261018)
    fuel = 10**5
    cases = [(transfer_program(), 3, 4), (parse_program("DEC r0 -> h | Z:h\nh: HALT\n"), 0, 9)]
    cases += [(_random_program(rng), rng.randint(0, 20), rng.randint(0, 20)) for _ in range(100)]
    bad = []
    halted = 0
    for p, r0, r1 in cases:
        # run_machine raises if a dispatcher bit or a register prefix is off between instructions
        c = run_machine(p, r0, r1, fuel=fuel, keep_log=False)
        d = interpret(p, r0, r1, fuel=c.steps if not c.halted else 10**9)
        halted += c.halted
        if (c.halted, c.registers, c.steps) != (d.halted, d.registers, d.steps):
            bad.append(p.text())
    transfer = run_machine(transfer_program(), 3, 4).registers
    zero = run_machine(cases[1][0], 0, 9)
    ok = not bad and transfer == (0, 7) and zero.halted and zero.registers == (0, 9)
    gate(7, "railway universality layer", ok,
         f"{len(cases) - len(bad)}/{len(cases)} equivalent ({halted} halted); transfer (3,4)->{transfer}; "
         f"Z-path (0,9)->{zero.registers}")


def test_8_renderer(gate):
    w = build_window(3)
    svg = render_window(Configuration(w), RenderSpec(radius=3))
    polys = disc_polygons(w, 3)
    rmax = max(float(np.hypot(p[:, 0], p[:, 1]).max()) for p in polys.values())
    edges = [shared_vertices(w, a, b) for a in w.tiles for b in w.adjacency[a] if b is not None]
    ok = polygon_count(svg) == 85 and rmax < 1.0 and set(edges) == {2}
    gate(8, "renderer", ok, f"{polygon_count(svg)} polygons, max |p| = {rmax:.6f}, "
         f"{len(edges)} adjacent pairs sharing {sorted(set(edges))} vertices at 1e-6")


def test_9_engine_properties(gate):
    rng = random.Random(7)
    table = simulation_table()
    choices = injection_choices()
    crashed, open_, perm_bad = [], 0, 0
    for i in range(50):
        kind, point, loco = rng.choice(choices)
        c = inject(build_gadget(kind), point, loco)
        try:
            for k in range(30):
                cells = list(set(c.states) | {u for t in c.states for u in c.window.adjacency[t] if u is not None})
                rng.shuffle(cells)
                nxt = step(c, table)
                if k % 10 == 0 and step(c, table, order=cells).states != nxt.states:
                    perm_bad += 1
                if support_radius(nxt) > support_radius(c) + 1:
                    open_ += 1
                c = nxt
        except LookupError as exc:
            crashed.append(f"{kind}/{point}/{loco.front}: {exc}")
    ok = not crashed and not open_ and not perm_bad
    gate(9, "engine properties", ok,
         f"50 runs x 30 steps: {len(crashed)} crashed, {open_} closure breaks, {perm_bad} order-dependent steps")
