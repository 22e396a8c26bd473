"""Command line entry point: ``heptaca <subcommand> ...``.

Every invocation writes a run manifest (JSON) to ``--manifest`` or, by
default, to stderr.  Exit codes: 0 success, 1 data or invariant failure,
2 usage error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import datafiles

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunManifest:
    command: str
    inputs: dict = field(default_factory=dict)  # path -> sha256
    flags: dict = field(default_factory=dict)
    exit_status: int = EXIT_OK
    findings: list = field(default_factory=list)

    def add_input(self, path):
        p = Path(path)
        if p.is_file():
            self.inputs[str(p)] = hashlib.sha256(p.read_bytes()).hexdigest()

    def fail(self, msg: str):
        self.findings.append(msg)
        self.exit_status = EXIT_FAIL

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _addr(text):
    from .heptagrid import parse_address

    try:
        return parse_address(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


# ---------------------------------------------------------------------------
# subcommands


def cmd_grid(a, out, man):
    from .heptagrid import CapacityError, build_window, circle_size, distance, level_of, neighbors

    radius = a.radius
    pts = [t for t in ([a.neighbors] if a.neighbors else []) + list(a.distance or [])]
    try:
        # a tile at level k of its sector is k+1 steps from the centre; one more ring gives all its neighbours
        w = build_window(max([radius] + [level_of(t.index) + 2 for t in pts if not t.is_center]))
    except CapacityError as exc:
        man.fail(str(exc))
        return
    if a.neighbors is None and not a.distance:
        out.write("ring\ttiles\tformula\n")
        for r in range(radius + 1):
            n = len(w.ring(r))
            out.write(f"{r}\t{n}\t{circle_size(r)}\n")
            if n != circle_size(r):
                man.fail(f"ring {r}: {n} tiles, expected {circle_size(r)}")
    for t in pts:
        if t not in w:
            man.fail(f"{t} is outside the window of radius {w.radius}")
            return
    if a.neighbors is not None:
        for i, u in enumerate(neighbors(w, a.neighbors)):
            out.write(f"{a.neighbors}\t{i}\t{'-' if u is None else u}\n")
    if a.distance:
        s, t = a.distance
        out.write(f"{s}\t{t}\t{distance(w, s, t)}\n")


def cmd_validate_table(a, out, man):
    from .table import TableError, load_table, validate_table

    path = a.file or datafiles.table_path()
    man.add_input(path)
    try:
        t = load_table(path, strict=False)
    except (OSError, TableError) as exc:
        man.fail(str(exc))
        return
    rep = validate_table(t)
    for line in rep.lines():
        out.write(line + "\n")
    for lineno, _, msg in t.problems:
        out.write(f"problem\tline {lineno}: {msg}\n")
        man.fail(f"line {lineno}: {msg}")
    for f in rep.failures():
        if not any(f in x for x in man.findings):
            man.fail(f)


def _layout(name, man):
    from .gadgets import load_gadget

    man.add_input(datafiles.gadget_path(name))
    return load_gadget(name)


def cmd_simulate(a, out, man):
    from .engine import MissingTransition, run_trace, simulation_table
    from .gadgets import GadgetError, LocomotiveSpec, inject

    try:
        g = _layout(a.gadget, man)
        loco = LocomotiveSpec.parse(a.color)
        point = a.point or sorted(g.injection_points)[0]
        c = inject(g, point, loco)
    except (OSError, GadgetError) as exc:
        man.fail(str(exc))
        return
    cell = a.trace or g.observation_cell
    man.add_input(datafiles.table_path())
    man.add_input(datafiles.supplement_path())
    try:
        rows = run_trace(c, simulation_table(), cell, a.steps, a.mode)
    except (MissingTransition, KeyError) as exc:
        man.fail(str(exc))
        return
    if a.format == "json":
        data = [{"time": r.time, "state": str(r.state), "sigma": r.sigma, "entry": r.entry_id} for r in rows]
        out.write(json.dumps({"gadget": g.name, "cell": str(cell), "rows": data}, sort_keys=True) + "\n")
    else:
        out.write("time\tstate\tsigma\tentry\n")
        for r in rows:
            out.write(f"{r.time}\t{r.state}\t{r.sigma}\t{'-' if r.entry_id is None else r.entry_id}\n")


def cmd_render(a, out, man):
    from .engine import MissingTransition, simulation_table, step
    from .gadgets import GadgetError, LocomotiveSpec, inject
    from .render import RenderSpec, render_window

    try:
        g = _layout(a.gadget, man)
        c = inject(g, a.point or sorted(g.injection_points)[0], LocomotiveSpec.parse(a.color)) if a.color else g.idle()
    except (OSError, GadgetError) as exc:
        man.fail(str(exc))
        return
    spec = RenderSpec(radius=min(a.radius, g.frame), size=a.size, sector_rays=a.rays)
    prefix = a.out[:-4] if a.out.endswith(".svg") else a.out
    if a.steps == 0:
        frames = [(None, c)]
    else:
        table = simulation_table()
        frames = []
        try:
            for k in range(a.steps + 1):
                if k % a.every == 0:
                    frames.append((k, c))
                if k < a.steps:
                    c = step(c, table)
        except MissingTransition as exc:
            man.fail(str(exc))
    for k, frame in frames:
        path = Path(f"{prefix}.svg" if k is None else f"{prefix}-{k:03d}.svg")
        path.write_text(render_window(frame, spec), encoding="utf-8")
        out.write(f"{path}\n")


def cmd_railway(a, out, man):
    from .railway import RailwayError, parse_program, run_machine

    man.add_input(a.program)
    try:
        with open(a.program, encoding="utf-8") as fh:
            p = parse_program(fh)
        res = run_machine(p, a.r0, a.r1, fuel=a.fuel)
    except (OSError, RailwayError) as exc:
        man.fail(str(exc))
        return
    out.write(f"halted\t{res.halted}\nr0\t{res.r0}\nr1\t{res.r1}\ninstructions\t{res.steps}\nevents\t{len(res.log)}\n")
    if a.log:
        with open(a.log, "w", encoding="utf-8") as fh:
            fh.write("seq\tinstr\tchannel\tkind\tactor\tdetail\n")
            for e in res.log:
                fh.write(e.line() + "\n")
    if not res.halted:
        man.findings.append(f"no HALT within {a.fuel} events")


def cmd_golden(a, out, man):
    from .engine import _load_sim_table
    from .gadgets import golden_suite, load_errata
    from .table import TableError, load_table, validate_table

    tpath = Path(a.table) if a.table else datafiles.table_path()
    for p in (tpath, datafiles.supplement_path(), datafiles.errata_path()):
        man.add_input(p)
    try:
        raw = load_table(tpath, strict=False)
    except (OSError, TableError) as exc:
        man.fail(f"table: {exc}")
        return
    rep = validate_table(raw)
    for f in rep.failures():
        man.fail(f"table: {f}")
    if rep.failures():
        # traces replayed on a broken table only repeat the same fault
        return
    try:
        sup = datafiles.supplement_path()
        table = _load_sim_table(str(tpath), str(sup) if sup.exists() else None)
        errata = load_errata()
    except (OSError, TableError, ValueError) as exc:
        man.fail(str(exc))
        return
    out.write("trace\tgadget\tstatus\tdiffs\tunexplained\n")
    for r in golden_suite(table, errata):
        status = "ok" if r.ok else "FAIL"
        out.write(f"{r.trace}\t{r.gadget}\t{status}\t{len(r.report.diffs)}\t{len(r.unexplained)}\n")
        if r.error:
            man.fail(f"{r.trace}: {r.error}")
        for d in r.unexplained:
            man.fail(f"{r.trace}: time {d.time} {d.field} printed {d.expected} simulated {d.simulated}")
            # name the entries involved so a corrupted row is easy to find
            if d.field == "entry_id":
                for e in (d.expected, d.simulated):
                    if e is not None:
                        man.findings.append(f"{r.trace}: check entry {e}")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="heptaca", description="Weighted cellular automaton on the heptagrid.")
    p.add_argument("--manifest", help="write the run manifest here instead of stderr")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("grid", help="window sizes, neighbours and distances")
    g.add_argument("--radius", type=int, default=3)
    g.add_argument("--neighbors", type=_addr, metavar="S,N")
    g.add_argument("--distance", type=_addr, nargs=2, metavar="S,N")
    g.set_defaults(func=cmd_grid)

    v = sub.add_parser("validate-table", help="check a transition table")
    v.add_argument("file", nargs="?")
    v.set_defaults(func=cmd_validate_table)

    s = sub.add_parser("simulate", help="trace one cell of a gadget run")
    s.add_argument("--gadget", required=True)
    s.add_argument("--color", default="blue", choices=("blue", "mauve", "b", "m"))
    s.add_argument("--point", help="injection point (default: first by name)")
    s.add_argument("--steps", type=int, default=8)
    s.add_argument("--trace", type=_addr, metavar="S,N")
    s.add_argument("--mode", default="quiescent", choices=("quiescent", "strict"))
    s.add_argument("--format", default="tsv", choices=("tsv", "json"))
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("render", help="SVG snapshots of a gadget")
    r.add_argument("--gadget", required=True)
    r.add_argument("--color", choices=("blue", "mauve", "b", "m"))
    r.add_argument("--point")
    r.add_argument("--steps", type=int, default=0)
    r.add_argument("--every", type=int, default=1)
    r.add_argument("--radius", type=int, default=4)
    r.add_argument("--size", type=int, default=1024)
    r.add_argument("--rays", action="store_true")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_render)

    m = sub.add_parser("railway", help="run a register machine program through the circuit")
    m.add_argument("--program", required=True)
    m.add_argument("--r0", type=int, default=0)
    m.add_argument("--r1", type=int, default=0)
    m.add_argument("--fuel", type=int, default=10**6)
    m.add_argument("--log")
    m.set_defaults(func=cmd_railway)

    d = sub.add_parser("golden", help="replay the printed traces and validate the table")
    d.add_argument("--table")
    d.set_defaults(func=cmd_golden)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        if a.command is None:
            raise UsageError(parser.format_usage())
        for name in ("steps", "every", "size", "fuel", "r0", "r1", "radius"):
            v = getattr(a, name, None)
            if v is not None and (v < 0 or (v == 0 and name in ("every", "size", "fuel"))):
                raise UsageError(f"--{name} must be {'positive' if name in ('every', 'size', 'fuel') else 'nonnegative'}")
        if getattr(a, "command", None) == "simulate" and a.steps < 1:
            raise UsageError("--steps must be positive")
    except UsageError as exc:
        err.write(str(exc).rstrip() + "\n")
        man = RunManifest(" ".join(argv[:1]) or "", exit_status=EXIT_USAGE, findings=["usage error"])
        _emit(man, None, err)
        return EXIT_USAGE

    flags = {k: _flag(v) for k, v in sorted(vars(a).items()) if k not in ("func", "manifest", "command")}
    man = RunManifest(a.command, flags=flags)
    a.func(a, out, man)
    if man.findings and man.exit_status == EXIT_OK:
        man.exit_status = EXIT_FAIL
    _emit(man, a.manifest, err)
    return man.exit_status


def _flag(v):
    if isinstance(v, (list, tuple)) and not hasattr(v, "_fields"):
        return [_flag(x) for x in v]
    return v if isinstance(v, (int, str, bool, type(None))) else str(v)


def _emit(man, path, err):
    if path:
        Path(path).write_text(man.to_json() + "\n", encoding="utf-8")
    else:
        err.write(man.to_json() + "\n")


if __name__ == "__main__":
    sys.exit(main())
