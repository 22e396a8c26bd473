"""Write the data/gadgets/*.gadget files from the layout builder."""
import argparse
from pathlib import Path

from heptaca import datafiles
from heptaca.gadgets import KINDS, build_gadget, format_gadget


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=datafiles.PACKAGE_DATA / "gadgets")
    ap.add_argument("--check", action="store_true", help="fail if a shipped file differs instead of writing")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    stale = []
    for kind in KINDS:
        text = format_gadget(build_gadget(kind))
        path = args.out / f"{kind}.gadget"
        if args.check:
            if not path.exists() or path.read_text(encoding="utf-8") != text:
                stale.append(path.name)
        else:
            path.write_text(text, encoding="utf-8")
            print(f"wrote {path}")
    if stale:
        raise SystemExit("out of date: " + ", ".join(stale))


if __name__ == "__main__":
    main()
