"""Write an SVG of every gadget, idle and with a locomotive in flight."""
import argparse
from pathlib import Path

from heptaca.engine import simulation_table, step
from heptaca.gadgets import KINDS, build_gadget, inject, injection_choices
from heptaca.render import RenderSpec, render_window


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures")
    ap.add_argument("--radius", type=int, default=4)
    ap.add_argument("--size", type=int, default=800)
    ap.add_argument("--steps", type=int, default=4, help="generations before the in-flight snapshot")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    spec = RenderSpec(radius=args.radius, size=args.size, sector_rays=True)
    table = simulation_table()
    first = {}
    for kind, point, loco in injection_choices():
        first.setdefault(kind, (point, loco))
    for kind in KINDS:
        g = build_gadget(kind)
        (out / f"{kind}.svg").write_text(render_window(g.idle(), spec))
        point, loco = first[kind]
        c = inject(g, point, loco)
        for _ in range(args.steps):
            c = step(c, table)
        (out / f"{kind}-t{args.steps}.svg").write_text(render_window(c, spec))
        print(kind)


if __name__ == "__main__":
    main()
