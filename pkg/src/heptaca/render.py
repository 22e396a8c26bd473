"""SVG snapshots of configurations in the Poincare disc."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import Configuration
from .heptagrid import build_window
from .table import CellState

DEFAULT_PALETTE = {
    "W": "#ffffff",
    "Y": "#f2d630",
    "B": "#2f6fd6",
    "R": "#d33a2c",
    "M": "#b45fc1",
    "V": "#6a2c91",
}


@dataclass(frozen=True)
class RenderSpec:
    radius: int = 3
    palette: dict = field(default_factory=lambda: dict(DEFAULT_PALETTE))
    stroke: float = 0.6
    size: int = 1024
    sector_rays: bool = False
    labels: bool = False

    def __post_init__(self):
        missing = [s.name for s in CellState if s.name not in self.palette]
        if missing:
            raise ValueError(f"palette has no colour for {', '.join(missing)}")
        if self.radius < 0 or self.size <= 0:
            raise ValueError("radius must be nonnegative and size positive")

    def fill(self, state) -> str:
        return self.palette[CellState(state).name]


def disc_vertices(window, t) -> np.ndarray:
    """The 7 vertices of tile t in disc coordinates, shape (7, 2)."""
    v = window.vertices(t)
    return v[:, :2] / (1.0 + v[:, 2:3])


def disc_polygons(window, radius=None) -> dict:
    radius = window.radius if radius is None else radius
    return {t: disc_vertices(window, t) for t in window.tiles if window.dist[t] <= radius}


def _xy(p, half):
    # disc y points up, SVG y points down
    return f"{half + p[0] * half:.4f},{half - p[1] * half:.4f}"


def render_window(c: Configuration, spec: RenderSpec | None = None) -> str:
    """One filled 7-gon per tile within ``spec.radius`` of the centre."""
    spec = spec or RenderSpec()
    window = c.window if c.window.radius >= spec.radius else build_window(spec.radius)
    half = spec.size / 2.0
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.size}" height="{spec.size}" '
        f'viewBox="0 0 {spec.size} {spec.size}">',
        f'<circle cx="{half:.4f}" cy="{half:.4f}" r="{half:.4f}" fill="none" stroke="#000000" stroke-width="{spec.stroke}"/>',
    ]
    for t, pts in disc_polygons(window, spec.radius).items():
        path = " ".join(_xy(p, half) for p in pts)
        out.append(
            f'<polygon data-tile="{t}" points="{path}" fill="{spec.fill(c.state(t))}" '
            f'stroke="#000000" stroke-width="{spec.stroke}"/>'
        )
    if spec.labels:
        for t in window.tiles:
            if window.dist[t] <= min(spec.radius, 2):
                p = window.centers[t]
                x, y = p[0] / (1 + p[2]), p[1] / (1 + p[2])
                out.append(
                    f'<text x="{half + x * half:.2f}" y="{half - y * half:.2f}" font-size="{spec.size / 80:.1f}" '
                    f'text-anchor="middle" dominant-baseline="middle">{t}</text>'
                )
    if spec.sector_rays:
        # mid-lines of the sectors: diameters through the centre and the middle of side j
        for j in range(7):
            a = math.pi / 2 + 2 * math.pi * j / 7
            out.append(
                f'<line x1="{half:.4f}" y1="{half:.4f}" x2="{half + math.cos(a) * half:.4f}" '
                f'y2="{half - math.sin(a) * half:.4f}" stroke="#888888" stroke-width="{spec.stroke}" '
                'stroke-dasharray="4 4"/>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def polygon_count(svg: str) -> int:
    return svg.count("<polygon ")


def shared_vertices(window, a, b, tol=1e-6) -> int:
    """How many disc vertices of a coincide with a vertex of b."""
    pa, pb = disc_vertices(window, a), disc_vertices(window, b)
    d = np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=2)
    return int((d.min(axis=1) < tol).sum())
