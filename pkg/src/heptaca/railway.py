"""Schematic railway circuits running a two-register machine.

The circuits are graphs, not tile layouts: a switch is a node with a
selected branch, a one-bit memory is a flip-flop at its W-gate plus a memory
switch at its R-gate, and a register is an unbounded chain of one-bit
memories.  A run follows one locomotive through the circuit and logs every
crossing, switch change and memory toggle.

Reconfiguration travels on mauve signal tracks which are shorter than the
path of the main locomotive, so signal events are queued with a higher
priority and always drain before the locomotive moves on.
"""
from __future__ import annotations

import heapq
import io
import re
from dataclasses import dataclass, field

FIXED = "fixed"
FLIP_FLOP = "flip-flop"
MEMORY_ACTIVE = "memory-active"
MEMORY_PASSIVE = "memory-passive"
SWITCH_KINDS = (FIXED, FLIP_FLOP, MEMORY_ACTIVE, MEMORY_PASSIVE)

INC, DEC = "inc", "dec"
DONE, ZERO = "DONE", "ZERO"

SIGNAL, LOCO = 0, 1  # event priorities


class RailwayError(ValueError):
    pass


class FuelExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class Event:
    seq: int
    instr: int  # index of the machine step this event belongs to (-1 outside a run)
    priority: int
    kind: str  # cross, flip, select, toggle, duplicate, absorb, dispatch, zero
    actor: str
    detail: str = ""
    queued: int = 0  # position in the emission order

    def line(self) -> str:
        who = "signal" if self.priority == SIGNAL else "loco"
        return f"{self.seq}\t{self.instr}\t{who}\t{self.kind}\t{self.actor}\t{self.detail}"


class EventLog:
    """Ordered log fed through a two-level priority queue.

    ``emit`` queues an event; ``flush`` releases queued events, all signals
    first.  Events are numbered when they are released.
    """

    def __init__(self, fuel: int | None = None):
        self.events = []
        self._queue = []
        self._n = 0
        self.instr = -1
        self.fuel = fuel

    def emit(self, priority, kind, actor, detail=""):
        self._n += 1
        heapq.heappush(self._queue, (priority, self._n, kind, actor, detail))

    def flush(self):
        while self._queue:
            pr, q, kind, actor, detail = heapq.heappop(self._queue)
            if self.fuel is not None and len(self.events) >= self.fuel:
                raise FuelExhausted(f"event budget {self.fuel} exhausted")
            self.events.append(Event(len(self.events), self.instr, pr, kind, actor, detail, q))

    def signal(self, kind, actor, detail=""):
        self.emit(SIGNAL, kind, actor, detail)

    def loco(self, kind, actor, detail=""):
        # the locomotive only moves once pending signals have arrived
        self.emit(LOCO, kind, actor, detail)
        self.flush()

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


def _log(log):
    return log if log is not None else EventLog()


# ---------------------------------------------------------------------------
# switches


@dataclass
class SwitchNode:
    name: str
    kind: str
    selected: str = "left"
    ports: tuple = ("a", "left", "right")

    def __post_init__(self):
        if self.kind not in SWITCH_KINDS:
            raise RailwayError(f"unknown switch kind {self.kind!r}")
        if self.selected not in self.ports[1:]:
            raise RailwayError(f"{self.name}: selection {self.selected!r} is not a branch")

    @property
    def branches(self) -> tuple:
        return self.ports[1:]

    def other(self, branch: str) -> str:
        a, b = self.branches
        return b if branch == a else a


def fixed_cross(s: SwitchNode, log=None) -> str:
    log = _log(log)
    log.loco("cross", s.name, s.selected)
    return s.selected


def flipflop_cross(s: SwitchNode, log=None) -> str:
    """Active crossing of a flip-flop: leave by the selected branch, then toggle.

    As in the circuit, the locomotive is duplicated by a fork, the copy on
    the non-selected branch is absorbed by a filter, and a mauve signal then
    swaps the two filters.
    """
    if s.kind == FIXED:
        return fixed_cross(s, log)
    if s.kind != FLIP_FLOP:
        raise RailwayError(f"{s.name} is not a flip-flop")
    log = _log(log)
    taken = s.selected
    log.loco("duplicate", s.name, "both branches")
    log.loco("absorb", s.name, s.other(taken))
    log.loco("cross", s.name, taken)
    s.selected = s.other(taken)
    log.signal("flip", s.name, s.selected)
    log.flush()
    return taken


def memory_pair_cross(active: SwitchNode, passive: SwitchNode, passive_entry: str, log=None) -> str:
    """Passive crossing through ``passive_entry``; the active twin follows it."""
    if active.kind != MEMORY_ACTIVE or passive.kind != MEMORY_PASSIVE:
        raise RailwayError("need a memory-active and a memory-passive switch")
    if passive_entry not in passive.branches:
        raise RailwayError(f"{passive.name} has no branch {passive_entry!r}")
    log = _log(log)
    log.loco("cross", passive.name, passive_entry)
    if passive.selected != passive_entry:
        passive.selected = passive_entry
        active.selected = passive_entry
        log.signal("select", passive.name, passive_entry)
        log.signal("select", active.name, passive_entry)
        log.flush()
    return active.selected


def memory_active_cross(active: SwitchNode, log=None) -> str:
    log = _log(log)
    log.loco("cross", active.name, active.selected)
    return active.selected


# ---------------------------------------------------------------------------
# one-bit memory


@dataclass
class OneBitMemory:
    """Flip-flop at W, memory switch pair at R; the bit is the shared selection."""

    name: str
    bit: int = 0
    gates: tuple = ("W", "R", "E", "out0", "out1")
    flipflop: SwitchNode = field(init=False)
    reader: SwitchNode = field(init=False)
    recorder: SwitchNode = field(init=False)

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise RailwayError("a one-bit memory holds 0 or 1")
        sel = f"b{self.bit}"
        ports = ("a", "b0", "b1")
        # the flip-flop selects the branch leading to the *next* value
        self.flipflop = SwitchNode(f"{self.name}.W", FLIP_FLOP, f"b{1 - self.bit}", ports)
        self.reader = SwitchNode(f"{self.name}.R", MEMORY_ACTIVE, sel, ports)
        self.recorder = SwitchNode(f"{self.name}.P", MEMORY_PASSIVE, sel, ports)

    def check(self):
        sel = f"b{self.bit}"
        if self.reader.selected != sel or self.recorder.selected != sel or self.flipflop.selected == sel:
            raise RailwayError(f"{self.name}: switches disagree with bit {self.bit}")


def obm_read(m: OneBitMemory, log=None) -> str:
    """Enter through R; leave through out0 or out1, nothing changes."""
    log = _log(log)
    branch = memory_active_cross(m.reader, log)
    return "out" + branch[1]


def obm_write(m: OneBitMemory, log=None) -> str:
    """Enter through W; the bit toggles and the locomotive leaves through E."""
    log = _log(log)
    branch = flipflop_cross(m.flipflop, log)
    memory_pair_cross(m.reader, m.recorder, branch, log)
    m.bit = int(branch[1])
    log.loco("toggle", m.name, str(m.bit))
    log.loco("cross", m.name, "E")
    m.check()
    return "E"


# ---------------------------------------------------------------------------
# registers


@dataclass
class RegisterChain:
    name: str
    units: list = field(default_factory=list)
    high_water: int = 1 << 20

    @property
    def value(self) -> int:
        n = 0
        for u in self.units:
            if not u.bit:
                break
            n += 1
        return n

    def unit(self, i: int) -> OneBitMemory:
        if i >= self.high_water:
            raise RailwayError(f"{self.name}: more than {self.high_water} units")
        while len(self.units) <= i:
            self.units.append(OneBitMemory(f"{self.name}.u{len(self.units)}"))
        return self.units[i]

    def prefix_ok(self) -> bool:
        bits = [u.bit for u in self.units]
        return bits == sorted(bits, reverse=True)

    @classmethod
    def with_value(cls, name: str, value: int) -> "RegisterChain":
        r = cls(name)
        for i in range(value):
            r.unit(i).bit = 1
            r.unit(i).__post_init__()
        r.unit(value)
        return r


def register_increment(r: RegisterChain, log=None) -> int:
    """Read the 1-units up to the first 0-unit and write it; returns its index."""
    log = _log(log)
    i = 0
    while obm_read(r.unit(i), log) == "out1":
        i += 1
    obm_write(r.unit(i), log)
    return i


def register_decrement(r: RegisterChain, log=None) -> str:
    """Find the first 0-unit, go back one unit and clear it; ZERO on an empty register."""
    log = _log(log)
    if obm_read(r.unit(0), log) == "out0":
        log.loco("zero", r.name, "Z-track")
        return ZERO
    i = 1
    while obm_read(r.unit(i), log) == "out1":
        i += 1
    log.loco("cross", r.name, f"back to u{i - 1}")
    obm_write(r.unit(i - 1), log)
    return DONE


# ---------------------------------------------------------------------------
# dispatchers


@dataclass
class Dispatcher:
    """D_S remembers the type of the pending instruction; D_I and D_D hold one
    unit per instruction, set on the way to the register and cleared on return."""

    name: str
    kind: str  # D_S, D_I or D_D
    units: dict = field(default_factory=dict)
    last_type: str | None = None
    selector: SwitchNode | None = None
    recorder: SwitchNode | None = None

    def __post_init__(self):
        if self.kind not in ("D_S", "D_I", "D_D"):
            raise RailwayError(f"unknown dispatcher kind {self.kind!r}")
        if self.kind == "D_S":
            ports = ("a", INC, DEC)
            self.selector = SwitchNode(f"{self.name}.active", MEMORY_ACTIVE, INC, ports)
            self.recorder = SwitchNode(f"{self.name}.passive", MEMORY_PASSIVE, INC, ports)

    def unit(self, instr: int) -> OneBitMemory:
        if instr not in self.units:
            self.units[instr] = OneBitMemory(f"{self.name}.i{instr}")
        return self.units[instr]

    def set_bits(self) -> list:
        return sorted(i for i, u in self.units.items() if u.bit)

    def clean(self) -> bool:
        return not self.set_bits()


def dispatch_out(d_s: Dispatcher, d_unit: Dispatcher, instr: int, kind: str, log=None):
    """Outbound pass: mark the instruction in D_I/D_D, record the type in D_S."""
    log = _log(log)
    u = d_unit.unit(instr)
    if u.bit:
        raise RailwayError(f"{d_unit.name}: unit {instr} already set")
    obm_write(u, log)
    memory_pair_cross(d_s.selector, d_s.recorder, kind, log)
    d_s.last_type = kind
    log.loco("dispatch", d_s.name, f"{kind} {instr}")


def dispatch_back(d_s: Dispatcher, d_units: dict, log=None) -> int:
    """Return pass: D_S routes to D_I or D_D, whose set unit is cleared."""
    log = _log(log)
    kind = memory_active_cross(d_s.selector, log)
    d = d_units[kind]
    for instr in sorted(d.units):
        if obm_read(d.units[instr], log) == "out1":
            obm_write(d.units[instr], log)
            return instr
    raise RailwayError(f"{d.name}: no pending instruction")


def dispatch_roundtrip(d_s: Dispatcher, d_unit: Dispatcher, instr: int, kind: str, log=None) -> int:
    """Out to the register and back again; returns the instruction recovered."""
    if kind not in (INC, DEC):
        raise RailwayError(f"unknown instruction type {kind!r}")
    dispatch_out(d_s, d_unit, instr, kind, log)
    return dispatch_back(d_s, {kind: d_unit}, log)


# ---------------------------------------------------------------------------
# programs


@dataclass(frozen=True)
class Instruction:
    op: str  # INC, DEC, HALT
    reg: int = 0
    next: int = -1
    on_zero: int = -1

    def text(self, names=None) -> str:
        lab = (lambda i: names[i]) if names else (lambda i: f"L{i}")
        if self.op == "HALT":
            return "HALT"
        if self.op == "INC":
            return f"INC r{self.reg} -> {lab(self.next)}"
        return f"DEC r{self.reg} -> {lab(self.next)} | Z:{lab(self.on_zero)}"


@dataclass(frozen=True)
class MachineProgram:
    instructions: tuple
    labels: dict = field(default_factory=dict)  # label -> index

    def __post_init__(self):
        n = len(self.instructions)
        if n == 0:
            raise RailwayError("empty program")
        for i, ins in enumerate(self.instructions):
            if ins.op not in ("INC", "DEC", "HALT"):
                raise RailwayError(f"instruction {i}: unknown op {ins.op}")
            if ins.op != "HALT":
                if ins.reg not in (0, 1):
                    raise RailwayError(f"instruction {i}: only registers r0 and r1 exist")
                targets = (ins.next,) if ins.op == "INC" else (ins.next, ins.on_zero)
                if any(not 0 <= t < n for t in targets):
                    raise RailwayError(f"instruction {i}: jump target out of range")

    def __len__(self):
        return len(self.instructions)

    def text(self) -> str:
        names = {i: f"L{i}" for i in range(len(self))}
        return "\n".join(f"L{i}: {ins.text(names)}" for i, ins in enumerate(self.instructions)) + "\n"


_LINE = re.compile(
    r"^(?:(?P<label>[A-Za-z_]\w*)\s*:\s*)?"
    r"(?:(?P<halt>HALT)|(?P<op>INC|DEC)\s+r(?P<reg>\d+)\s*->\s*(?P<next>[A-Za-z_]\w*)"
    r"(?:\s*\|\s*Z\s*:\s*(?P<zero>[A-Za-z_]\w*))?)?$"
)


def parse_program(source) -> MachineProgram:
    if isinstance(source, str):
        source = io.StringIO(source)
    raw_ins = []
    labels = {}
    pending = []
    for lineno, raw in enumerate(source, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            raise RailwayError(f"line {lineno}: cannot parse {raw.strip()!r}")
        if m.group("label"):
            pending.append(m.group("label"))
        if m.group("halt") or m.group("op"):
            for lab in pending:
                if lab in labels:
                    raise RailwayError(f"line {lineno}: label {lab} defined twice")
                labels[lab] = len(raw_ins)
            pending = []
            if m.group("halt"):
                raw_ins.append(("HALT", 0, None, None, lineno))
            else:
                if m.group("op") == "DEC" and not m.group("zero"):
                    raise RailwayError(f"line {lineno}: DEC needs a Z: target")
                if m.group("op") == "INC" and m.group("zero"):
                    raise RailwayError(f"line {lineno}: INC takes no Z: target")
                raw_ins.append((m.group("op"), int(m.group("reg")), m.group("next"), m.group("zero"), lineno))
    if pending:
        raise RailwayError(f"label {pending[0]} is not followed by an instruction")

    def target(name, lineno):
        if name not in labels:
            raise RailwayError(f"line {lineno}: unknown label {name}")
        return labels[name]

    ins = []
    for op, reg, nxt, zero, lineno in raw_ins:
        if op == "HALT":
            ins.append(Instruction("HALT"))
        elif op == "INC":
            ins.append(Instruction("INC", reg, target(nxt, lineno)))
        else:
            ins.append(Instruction("DEC", reg, target(nxt, lineno), target(zero, lineno)))
    return MachineProgram(tuple(ins), labels)


# ---------------------------------------------------------------------------
# machines


@dataclass
class MachineResult:
    halted: bool
    r0: int
    r1: int
    steps: int  # instructions executed
    log: EventLog | None = None

    @property
    def registers(self) -> tuple:
        return (self.r0, self.r1)


def interpret(p: MachineProgram, r0: int, r1: int, fuel: int = 10**6) -> MachineResult:
    """Plain register-machine semantics; ``fuel`` bounds executed instructions."""
    regs = [r0, r1]
    pc = 0
    steps = 0
    while p.instructions[pc].op != "HALT":
        if steps >= fuel:
            return MachineResult(False, regs[0], regs[1], steps)
        ins = p.instructions[pc]
        if ins.op == "INC":
            regs[ins.reg] += 1
            pc = ins.next
        elif regs[ins.reg] == 0:
            pc = ins.on_zero
        else:
            regs[ins.reg] -= 1
            pc = ins.next
        steps += 1
    return MachineResult(True, regs[0], regs[1], steps)


@dataclass
class RailwayCircuit:
    """Program track, one D_S and one D_I/D_D pair per register, two registers."""

    program: MachineProgram
    registers: tuple
    d_s: tuple
    d_units: tuple  # per register: {INC: D_I, DEC: D_D}

    @classmethod
    def build(cls, p: MachineProgram, r0: int = 0, r1: int = 0) -> "RailwayCircuit":
        regs = (RegisterChain.with_value("r0", r0), RegisterChain.with_value("r1", r1))
        d_s = tuple(Dispatcher(f"r{k}.D_S", "D_S") for k in range(2))
        d_units = tuple({INC: Dispatcher(f"r{k}.D_I", "D_I"), DEC: Dispatcher(f"r{k}.D_D", "D_D")} for k in range(2))
        return cls(p, regs, d_s, d_units)

    def quiet(self) -> bool:
        """Between instructions: every dispatcher unit is 0, registers are prefixes."""
        return all(d.clean() for pair in self.d_units for d in pair.values()) and all(
            r.prefix_ok() for r in self.registers
        )

    def execute(self, pc: int, log: EventLog) -> int:
        """Run the instruction at ``pc`` through the circuit; returns the next pc."""
        ins = self.program.instructions[pc]
        k = ins.reg
        kind = INC if ins.op == "INC" else DEC
        dispatch_out(self.d_s[k], self.d_units[k][kind], pc, kind, log)
        if kind == INC:
            register_increment(self.registers[k], log)
            outcome = DONE
        else:
            outcome = register_decrement(self.registers[k], log)
        back = dispatch_back(self.d_s[k], self.d_units[k], log)
        if back != pc:
            raise RailwayError(f"dispatcher returned instruction {back} instead of {pc}")
        nxt = ins.on_zero if outcome == ZERO else ins.next
        log.loco("jump", f"L{pc}", f"L{nxt}")
        return nxt


def run_machine(p: MachineProgram, r0: int, r1: int, fuel: int = 10**6, keep_log: bool = True,
                check_quiet: bool = True) -> MachineResult:
    """Execute ``p`` by running the locomotive through the circuit.

    ``fuel`` bounds the number of logged events; running out gives a
    non-halting verdict with the registers after the last whole instruction.
    """
    if r0 < 0 or r1 < 0:
        raise RailwayError("register values are nonnegative")
    circuit = RailwayCircuit.build(p, r0, r1)
    log = EventLog(fuel)
    pc = 0
    steps = 0
    halted = False
    regs = [r0, r1]  # values at the last quiet point
    try:
        while True:
            if p.instructions[pc].op == "HALT":
                halted = True
                log.instr = steps
                log.loco("halt", f"L{pc}")
                break
            log.instr = steps
            pc = circuit.execute(pc, log)
            steps += 1
            if check_quiet and not circuit.quiet():
                raise RailwayError(f"circuit not quiet after instruction {steps}")
            regs = [r.value for r in circuit.registers]
    except FuelExhausted:
        halted = False
    return MachineResult(halted, regs[0], regs[1], steps, log if keep_log else None)


def signals_precede(log) -> bool:
    """No signal is released after a locomotive move that was emitted later.

    Together with the queue this means the locomotive never reaches a switch
    before the reconfiguration sent ahead of it.
    """
    latest_loco = -1
    for e in log:
        if e.priority == LOCO:
            latest_loco = max(latest_loco, e.queued)
        elif e.queued < latest_loco:
            return False
    return True


def transfer_program() -> MachineProgram:
    """r1 += r0, r0 = 0."""
    return parse_program("loop: DEC r0 -> add | Z:done\nadd: INC r1 -> loop\ndone: HALT\n")
