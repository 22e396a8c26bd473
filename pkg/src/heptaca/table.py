"""States, weights and the transition table of the weighted automaton."""
from __future__ import annotations

import io
import itertools
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import IntEnum


class CellState(IntEnum):
    W = 0
    Y = 1
    B = 2
    R = 3
    M = 4
    V = 5

    def __str__(self):
        return self.name


W, Y, B, R, M, V = CellState
NONBLANK = (Y, B, R, M, V)


def parse_state(text: str) -> CellState:
    t = text.strip().upper()
    if t.isdigit():
        return CellState(int(t))
    return CellState[t]


@dataclass(frozen=True)
class WeightScheme:
    weights: tuple = (0, 1, 4, 12, 29, 34)
    # maximal multiplicity of each non-blank state among the 7 neighbours
    caps: tuple = (3, 3, 2, 3, 3)

    def __post_init__(self):
        if len(self.weights) != 6 or len(self.caps) != 5:
            raise ValueError("need 6 weights and 5 caps")

    def weight(self, s: CellState) -> int:
        return self.weights[s]

    def sigma(self, profile) -> int:
        return sum(k * self.weights[i + 1] for i, k in enumerate(profile))


ADOPTED_WEIGHTS = WeightScheme()


class TableError(ValueError):
    """Malformed or inconsistent table data.  ``line`` is 1-based when known."""

    def __init__(self, msg, line=None, entry=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + msg)
        self.line = line
        self.entry = entry


@dataclass(frozen=True)
class TransitionEntry:
    id: int
    current: CellState
    profile: tuple  # counts of Y, B, R, M, V among the neighbours
    sigma: int
    new: CellState

    def code(self) -> str:
        digits = "".join(str(k) for k in self.profile)
        return f"{int(self.current)}-{digits}:{int(self.new)}"

    def line(self) -> str:
        return f"{self.id} {self.code()} {self.sigma}"


@dataclass
class TransitionTable:
    entries: list
    index: dict = field(default_factory=dict)  # (current, sigma) -> entries
    problems: list = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def entry(self, current, sigma, profile=None):
        """The entry for (current, sigma).

        Two entries may share a key when they agree on the new state; the
        neighbour profile, when given, picks the one that literally applies.
        """
        found = self.index.get((CellState(current), sigma))
        if not found:
            return None
        if profile is not None:
            for e in found:
                if e.profile == tuple(profile):
                    return e
        return found[0]

    def by_id(self, i: int) -> TransitionEntry:
        for e in self.entries:
            if e.id == i:
                return e
        raise KeyError(i)


_ENTRY_RE = re.compile(r"^(\d+)\s+([0-5])-([0-7]{5}):([0-5])\s+(\d+)$")


def parse_table(source, weights: WeightScheme = ADOPTED_WEIGHTS, strict: bool = True) -> TransitionTable:
    """Parse the text form of a table.

    ``source`` is a string or a text stream.  Format errors always raise;
    with ``strict`` the semantic checks (duplicate id, sigma mismatch,
    determinism) raise too, otherwise they are collected in ``problems``.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    entries = []
    index = {}
    seen_ids = {}
    problems = []

    def fail(msg, lineno, eid):
        if strict:
            raise TableError(msg, lineno, eid)
        problems.append((lineno, eid, msg))

    for lineno, raw in enumerate(source, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _ENTRY_RE.match(line)
        if m is None:
            raise TableError(f"malformed entry {raw.strip()!r}", lineno)
        eid = int(m.group(1))
        profile = tuple(int(c) for c in m.group(3))
        if sum(profile) > 7:
            raise TableError(f"entry {eid}: more than 7 neighbours in {m.group(3)}", lineno, eid)
        e = TransitionEntry(eid, CellState(int(m.group(2))), profile, int(m.group(5)), CellState(int(m.group(4))))
        if eid in seen_ids:
            fail(f"duplicate entry id {eid} (first on line {seen_ids[eid]})", lineno, eid)
        seen_ids.setdefault(eid, lineno)
        if weights.sigma(profile) != e.sigma:
            fail(f"entry {eid}: sigma {e.sigma} but profile {m.group(3)} weighs {weights.sigma(profile)}", lineno, eid)
        key = (e.current, e.sigma)
        clash = [o for o in index.get(key, ()) if o.new != e.new]
        if clash:
            fail(
                f"entry {eid}: state {e.current} with sigma {e.sigma} maps to {e.new}, "
                f"entry {clash[0].id} maps it to {clash[0].new}",
                lineno,
                eid,
            )
        index.setdefault(key, []).append(e)
        entries.append(e)
    return TransitionTable(entries, index, problems)


def load_table(path, weights: WeightScheme = ADOPTED_WEIGHTS, strict: bool = True) -> TransitionTable:
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh, weights, strict)


def merge_tables(base: TransitionTable, extra: TransitionTable) -> TransitionTable:
    """Union of two tables; an extra entry may not redefine a listed key or id."""
    ids = {e.id for e in base.entries}
    index = {k: list(v) for k, v in base.index.items()}
    for e in extra.entries:
        if e.id in ids:
            raise TableError(f"entry {e.id} already exists", entry=e.id)
        if (e.current, e.sigma) in index:
            raise TableError(f"entry {e.id}: state {e.current} with sigma {e.sigma} is already listed", entry=e.id)
        index.setdefault((e.current, e.sigma), []).append(e)
    return TransitionTable(base.entries + extra.entries, index, base.problems + extra.problems)


def lookup(t: TransitionTable, current, sigma: int):
    """New state for (current, sigma), or None if the pair is not listed."""
    e = t.entry(current, sigma)
    return None if e is None else e.new


# ---------------------------------------------------------------------------
# weight-scheme arithmetic


def derive_weights(caps, top: int | None = None) -> tuple:
    """Weights from the recurrence w(i) = 1 + sum_{j<i} caps(j) * w(j).

    ``caps[i-1]`` is the cap of rank i; rank 0 is the blank state and weighs
    0, rank 1 weighs 1.  Returns the weights of ranks 0..top, ``top``
    defaulting to ``len(caps)`` (the cap of the top rank is not needed for its
    own weight).
    """
    caps = list(caps)
    if top is None:
        top = max(1, len(caps))
    if top > len(caps) + 1:
        raise ValueError(f"rank {top} needs caps up to rank {top - 1}")
    w = [0, 1]
    for i in range(2, top + 1):
        w.append(1 + sum(caps[j - 1] * w[j] for j in range(1, i)))
    return tuple(w[: top + 1])


def enumerate_profiles(caps, total: int = 7):
    """All neighbour profiles (counts of ranks 1..k) within caps and total."""
    for prof in itertools.product(*(range(c + 1) for c in caps)):
        if sum(prof) <= total:
            yield prof


def find_sigma_collisions(weights, caps=None) -> list:
    """Distinct profiles with equal weighted sum, by exhaustive enumeration.

    ``weights`` is a WeightScheme or a sequence of 6 weights (rank 0..5);
    ``caps`` bounds the count of each non-blank state.  Returns a sorted list
    of ``(sigma, profile_a, profile_b)`` with ``profile_a < profile_b``.
    """
    if isinstance(weights, WeightScheme):
        caps = weights.caps if caps is None else caps
        weights = weights.weights
    if caps is None:
        raise ValueError("caps are required with raw weights")
    ws = weights[1:]
    by_sum = defaultdict(list)
    for prof in enumerate_profiles(caps):
        by_sum[sum(k * w for k, w in zip(prof, ws))].append(prof)
    out = []
    for s in sorted(by_sum):
        profs = sorted(by_sum[s])
        out.extend((s, a, b) for a, b in itertools.combinations(profs, 2))
    return out


# ---------------------------------------------------------------------------
# validation


@dataclass
class TableReport:
    entry_count: int
    distinct_sigmas: int
    max_sigma: int
    ids_contiguous: bool
    sigma_mismatches: list
    determinism_conflicts: list
    max_counts: dict
    over_seven: list
    findings: list  # documented observations, not failures

    @property
    def ok(self) -> bool:
        return (
            self.ids_contiguous
            and not self.sigma_mismatches
            and not self.determinism_conflicts
            and not self.over_seven
        )

    def failures(self) -> list:
        out = []
        if not self.ids_contiguous:
            out.append("entry ids are not exactly 0..n-1")
        out += [f"entry {i}: sigma mismatch ({s} listed, {c} computed)" for i, s, c in self.sigma_mismatches]
        out += [f"entries {a} and {b}: same state and sigma, different new states" for a, b in self.determinism_conflicts]
        out += [f"entry {i}: more than 7 neighbours" for i in self.over_seven]
        return out

    def lines(self) -> list:
        out = [
            f"entries\t{self.entry_count}",
            f"distinct_sigmas\t{self.distinct_sigmas}",
            f"max_sigma\t{self.max_sigma}",
            f"ids_contiguous\t{self.ids_contiguous}",
            f"sigma_mismatches\t{len(self.sigma_mismatches)}",
            f"determinism_conflicts\t{len(self.determinism_conflicts)}",
            "max_counts\t" + " ".join(f"{k}:{v}" for k, v in self.max_counts.items()),
        ]
        out += [f"failure\t{f}" for f in self.failures()]
        out += [f"finding\t{f}" for f in self.findings]
        return out


# weights for ranks 1..4 as printed alongside the recurrence
STATED_RECURRENCE_VALUES = (1, 4, 14, 30)
# count of distinct sums printed with the table statistics
STATED_DISTINCT_SIGMAS = 69


def validate_table(t: TransitionTable, w: WeightScheme = ADOPTED_WEIGHTS) -> TableReport:
    ids = sorted(e.id for e in t.entries)
    mismatches = [(e.id, e.sigma, w.sigma(e.profile)) for e in t.entries if w.sigma(e.profile) != e.sigma]
    seen = {}
    conflicts = []
    shared = []
    for e in t.entries:
        key = (e.current, e.sigma)
        if key in seen:
            first = seen[key]
            (conflicts if first.new != e.new else shared).append((first.id, e.id))
        else:
            seen[key] = e
    max_counts = {str(s): max((e.profile[s - 1] for e in t.entries), default=0) for s in NONBLANK}
    over = [e.id for e in t.entries if sum(e.profile) > 7]

    findings = [
        f"entries {a} and {b} share state and sigma with the same outcome" for a, b in shared
    ]
    distinct = len({e.sigma for e in t.entries})
    if distinct != STATED_DISTINCT_SIGMAS:
        findings.append(f"{distinct} distinct sigma values, not the stated {STATED_DISTINCT_SIGMAS}")
    caps = tuple(max_counts[str(s)] for s in NONBLANK)
    if caps != w.caps:
        findings.append(f"observed caps {caps} differ from scheme caps {w.caps}")
    derived = derive_weights(caps[:4])
    if derived[1:] != STATED_RECURRENCE_VALUES:
        findings.append(
            f"recurrence with caps {caps[:4]} gives ranks 1..4 = {derived[1:]}, "
            f"not the stated {STATED_RECURRENCE_VALUES}"
        )
    rm = [e.id for e in t.entries if e.profile[3] >= 1 and e.profile[2] > 2]
    findings.append(
        "at most 2 R-neighbours whenever an M-neighbour is present: "
        + ("holds" if not rm else f"violated by entries {rm}")
    )
    for s, a, b in find_sigma_collisions(w.weights, caps):
        users = sorted((e.id, str(e.current)) for e in t.entries if e.profile in (a, b))
        if {e.profile for e in t.entries} >= {a, b}:
            findings.append(f"sigma {s} reached by profiles {_fmt(a)} and {_fmt(b)} (entries {users})")

    return TableReport(
        entry_count=len(t.entries),
        distinct_sigmas=distinct,
        max_sigma=max((e.sigma for e in t.entries), default=0),
        ids_contiguous=ids == list(range(len(ids))),
        sigma_mismatches=mismatches,
        determinism_conflicts=conflicts,
        max_counts=max_counts,
        over_seven=over,
        findings=findings,
    )


def _fmt(profile) -> str:
    return "".join(str(k) for k in profile)


def state_counts(t: TransitionTable) -> Counter:
    return Counter(str(e.current) for e in t.entries)
