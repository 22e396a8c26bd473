"""The {7,3} tessellation: Fibonacci sector trees, hyperboloid geometry, disc windows.

Tiles are addressed as ``(sector, index)``. Sector 0 holds only the central
tile (index 0); sectors 1..7 are the subtrees hanging from the seven
neighbours of the centre, each numbered level by level starting from 1.

Sectors are numbered counterclockwise with sector 1 pointing up, and inside a
level indices increase counterclockwise too, so the "left-to-right" order of
the numbering runs in the same rotational sense as the sector numbers.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

MAX_RADIUS = 10
DEDUP_TOL = 1e-9

B, O, Y, G = "B", "O", "Y", "G"
NODE_COLORS = (B, O, Y, G)
# production rules of the sector tree
RULES = {B: (B, O), O: (B, Y, O), Y: (B, Y, G), G: (B, Y, G)}


class CapacityError(ValueError):
    pass


class TileAddress(NamedTuple):
    sector: int
    index: int

    def __str__(self):
        if self.sector == 0:
            return "0"
        return f"({self.sector},{self.index})"

    @property
    def is_center(self) -> bool:
        return self.sector == 0


CENTER = TileAddress(0, 0)


def tile(sector: int, index: int) -> TileAddress:
    """Validated constructor."""
    if sector == 0:
        if index != 0:
            raise ValueError("the central tile has index 0")
    elif not 1 <= sector <= 7:
        raise ValueError(f"sector must be in 0..7, got {sector}")
    elif index < 1:
        raise ValueError(f"index must be >= 1 in sector {sector}, got {index}")
    return TileAddress(sector, index)


def parse_address(text: str) -> TileAddress:
    """Parse ``"s,n"``, ``"(s,n)"`` or ``"0"``."""
    t = text.strip().strip("()").replace(" ", "")
    if t == "0":
        return CENTER
    parts = t.split(",")
    if len(parts) != 2:
        raise ValueError(f"bad tile address {text!r}")
    return tile(int(parts[0]), int(parts[1]))


@lru_cache(maxsize=None)
def fibonacci(n: int) -> int:
    """f(0) = f(1) = 1, f(n+2) = f(n+1) + f(n)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    a, b = 1, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def circle_size(r: int) -> int:
    """Number of tiles at distance exactly r from a tile."""
    if r < 0:
        raise ValueError("r must be >= 0")
    return 1 if r == 0 else 7 * fibonacci(2 * r - 1)


# ---------------------------------------------------------------------------
# sector tree


@dataclass
class SectorTree:
    """Fibonacci tree of one sector, materialised lazily level by level.

    Nodes are numbered from 1 (the root, colour G) breadth first, sons left to
    right.  ``father[1]`` is None.
    """

    color: list = field(default_factory=lambda: [None, G])
    level: list = field(default_factory=lambda: [None, 0])
    father: list = field(default_factory=lambda: [None, None])
    sons_of: list = field(default_factory=lambda: [None, None])
    levels: list = field(default_factory=lambda: [(1, 1)])  # (first, last) per level

    def _grow(self):
        first, last = self.levels[-1]
        lev = len(self.levels)
        start = len(self.color)
        for n in range(first, last + 1):
            kids = []
            for c in RULES[self.color[n]]:
                kids.append(len(self.color))
                self.color.append(c)
                self.level.append(lev)
                self.father.append(n)
                self.sons_of.append(None)
            self.sons_of[n] = tuple(kids)
        self.levels.append((start, len(self.color) - 1))

    def ensure(self, index: int):
        if index < 1:
            raise ValueError(f"tree index must be >= 1, got {index}")
        while len(self.color) <= index or self.sons_of[index] is None:
            self._grow()

    def sons(self, index: int) -> tuple:
        self.ensure(index)
        return self.sons_of[index]

    def color_of(self, index: int) -> str:
        self.ensure(index)
        return self.color[index]

    def level_of(self, index: int) -> int:
        self.ensure(index)
        return self.level[index]

    def father_of(self, index: int):
        self.ensure(index)
        return self.father[index]

    def level_range(self, lev: int) -> tuple:
        while len(self.levels) <= lev:
            self._grow()
        return self.levels[lev]


_TREE = SectorTree()


def sons(index: int) -> tuple:
    return _TREE.sons(index)


def color_of(index: int) -> str:
    return _TREE.color_of(index)


def level_of(index: int) -> int:
    return _TREE.level_of(index)


def father_of(index: int):
    return _TREE.father_of(index)


def level_range(lev: int) -> tuple:
    """First and last index of a sector level."""
    return _TREE.level_range(lev)


# ---------------------------------------------------------------------------
# hyperboloid geometry

_J = np.diag([1.0, 1.0, -1.0])


def minkowski(a, b) -> float:
    return float(a[0] * b[0] + a[1] * b[1] - a[2] * b[2])


def _base_heptagon():
    # circumradius R of the regular heptagon with angles 2*pi/3
    cosh_r = 1.0 / (math.tan(math.pi / 7) * math.tan(math.pi / 3))
    sinh_r = math.sqrt(cosh_r * cosh_r - 1.0)
    # side j (between vertex j and j+1) faces angle pi/2 + 2*pi*j/7, i.e. sector j+1
    phis = [math.pi / 2 - math.pi / 7 + 2 * math.pi * j / 7 for j in range(7)]
    verts = np.array([[sinh_r * math.cos(p), sinh_r * math.sin(p), cosh_r] for p in phis])
    refl = []
    for j in range(7):
        v1, v2 = verts[j], verts[(j + 1) % 7]
        n = _J @ np.cross(v1, v2)
        n = n / math.sqrt(minkowski(n, n))
        # p -> p - 2 <p,n> n, written as a matrix
        refl.append(np.eye(3) - 2.0 * np.outer(n, n) @ _J)
    return verts, np.array(refl)


BASE_VERTICES, SIDE_REFLECTIONS = _base_heptagon()


def to_disc(p) -> tuple:
    """Hyperboloid point to Poincare disc coordinates."""
    return (p[0] / (1.0 + p[2]), p[1] / (1.0 + p[2]))


# ---------------------------------------------------------------------------
# disc windows


@dataclass(frozen=True)
class DiscWindow:
    """Disc of tiles around the centre with geometric adjacency.

    ``adjacency[t]`` lists the 7 neighbours of ``t`` in side order (a cyclic
    order around the tile); a neighbour outside the window is ``None``.
    """

    radius: int
    tiles: tuple
    adjacency: dict
    centers: dict
    dist: dict
    transforms: dict = field(repr=False, compare=False)

    def __contains__(self, t) -> bool:
        return t in self.adjacency

    def __len__(self) -> int:
        return len(self.tiles)

    def ring(self, r: int) -> list:
        return [t for t in self.tiles if self.dist[t] == r]

    def vertices(self, t) -> np.ndarray:
        """The 7 hyperboloid vertices of tile t, in side order."""
        return BASE_VERTICES @ self.transforms[t].T

    def is_interior(self, t) -> bool:
        return None not in self.adjacency[t]


class _CenterIndex:
    """Spatial hash over hyperboloid centres for tolerance-based dedup."""

    CELL = 0.25

    def __init__(self):
        self.buckets = {}

    def _key(self, p):
        return (round(p[0] / self.CELL), round(p[1] / self.CELL))

    def find(self, p):
        kx, ky = self._key(p)
        tol = DEDUP_TOL * max(1.0, abs(p[2]))
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for q, ident in self.buckets.get((kx + dx, ky + dy), ()):
                    d = max(abs(p[0] - q[0]), abs(p[1] - q[1]), abs(p[2] - q[2]))
                    if d <= tol:
                        return ident
                    if d < 0.5:
                        raise ArithmeticError(f"tile centres closer than expected ({d:.3g})")
        return None

    def add(self, p, ident):
        self.buckets.setdefault(self._key(p), []).append((p, ident))


def _generate(radius: int):
    """Reflective generation; returns matrices, ring index and side adjacency."""
    mats = [np.eye(3)]
    dist = [0]
    adj = []
    index = _CenterIndex()
    index.add(mats[0][:, 2], 0)
    frontier = [0]
    for r in range(radius + 1):
        nxt = []
        for i in frontier:
            row = []
            cand = mats[i] @ SIDE_REFLECTIONS  # (7,3,3)
            for k in range(7):
                g = cand[k]
                c = g[:, 2]
                j = index.find(c)
                if j is None and r < radius:
                    j = len(mats)
                    mats.append(g)
                    dist.append(r + 1)
                    index.add(c, j)
                    nxt.append(j)
                row.append(j)
            adj.append(row)
        frontier = nxt
    # tiles are appended ring by ring, so adj[i] lines up with mats[i]
    return mats, dist, adj


def _label(mats, dist, adj) -> list:
    """Assign (sector, index) labels to geometrically generated tiles."""
    n = len(mats)
    ang = [math.atan2(m[1, 2], m[0, 2]) for m in mats]
    labels = [None] * n
    labels[0] = CENTER
    sector = [0] * n
    level = [0] * n
    father = [None] * n
    step = 2 * math.pi / 7
    for i in range(1, n):
        if dist[i] == 1:
            s = round((ang[i] - math.pi / 2) / step) % 7 + 1
            sector[i] = s
            father[i] = 0
            continue
        inner = [j for j in adj[i] if j is not None and dist[j] == dist[i] - 1]
        if len(inner) == 1:
            f = inner[0]
        elif len(inner) == 2:
            a, b = inner
            # the father is the more counterclockwise of the two
            f = b if (ang[b] - ang[a]) % (2 * math.pi) < math.pi else a
        else:
            raise ArithmeticError(f"tile with {len(inner)} inner neighbours")
        father[i] = f
        sector[i] = sector[f]
        level[i] = dist[i] - 1
    head_angle = {s: math.pi / 2 + (s - 1) * step for s in range(1, 8)}
    order = sorted(
        range(1, n),
        key=lambda i: (
            sector[i],
            level[i],
            (ang[i] - head_angle[sector[i]] + math.pi) % (2 * math.pi) - math.pi,
        ),
    )
    counter = {}
    for i in order:
        s = sector[i]
        counter[s] = counter.get(s, 0) + 1
        labels[i] = TileAddress(s, counter[s])
    return labels, father


@lru_cache(maxsize=None)
def build_window(radius: int) -> DiscWindow:
    """Disc of the given radius around the central tile."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius > MAX_RADIUS:
        raise CapacityError(f"radius {radius} exceeds the supported bound {MAX_RADIUS}")
    mats, dist, adj = _generate(radius)
    labels, father = _label(mats, dist, adj)
    for i, f in enumerate(father):
        if i == 0 or dist[i] == 1:
            continue
        s, idx = labels[i]
        if labels[f] != TileAddress(s, father_of(idx)):
            raise ArithmeticError(f"geometric father of {labels[i]} disagrees with the sector tree")
    adjacency = {
        labels[i]: tuple(labels[j] if j is not None else None for j in adj[i]) for i in range(len(mats))
    }
    centers = {labels[i]: tuple(float(v) for v in mats[i][:, 2]) for i in range(len(mats))}
    dmap = {labels[i]: dist[i] for i in range(len(mats))}
    transforms = {labels[i]: mats[i] for i in range(len(mats))}
    tiles = tuple(sorted(labels, key=lambda t: (dmap[t], t)))
    return DiscWindow(radius, tiles, adjacency, centers, dmap, transforms)


def neighbors(w: DiscWindow, t: TileAddress) -> list:
    """The 7 neighbours of t; ``None`` marks a neighbour outside the window."""
    if t not in w.adjacency:
        raise KeyError(f"{t} is not in the window of radius {w.radius}")
    return list(w.adjacency[t])


def distance(w: DiscWindow, a: TileAddress, b: TileAddress) -> int:
    """Shortest path length inside the window (BFS)."""
    if a not in w or b not in w:
        raise KeyError("both tiles must lie in the window")
    if a == b:
        return 0
    if a == CENTER:
        return w.dist[b]
    if b == CENTER:
        return w.dist[a]
    seen = {a}
    queue = deque([(a, 0)])
    while queue:
        t, d = queue.popleft()
        for u in w.adjacency[t]:
            if u is None or u in seen:
                continue
            if u == b:
                return d + 1
            seen.add(u)
            queue.append((u, d + 1))
    raise ValueError(f"{b} unreachable from {a}")


def tree_relations(w: DiscWindow) -> list:
    """Pairs that the sector trees force to be adjacent.

    Father-son pairs (heads count the centre as father) and consecutive
    tiles on the same circle, including across sector seams.
    """
    pairs = []
    for t in w.tiles:
        if t.is_center:
            continue
        f = CENTER if t.index == 1 else TileAddress(t.sector, father_of(t.index))
        pairs.append((f, t))
    for r in range(1, w.radius + 1):
        ring = ring_order(r)
        pairs.extend(zip(ring, ring[1:] + ring[:1]))
    return pairs


def ring_order(r: int) -> list:
    """Tiles at distance r from the centre, in cyclic (counterclockwise) order."""
    if r == 0:
        return [CENTER]
    first, last = level_range(r - 1)
    return [TileAddress(s, n) for s in range(1, 8) for n in range(first, last + 1)]
