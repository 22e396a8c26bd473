"""Replay every printed trace line and show where the simulation differs."""
import argparse
import sys

from heptaca.gadgets import golden_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--verbose", "-v", action="store_true", help="print the rows of every trace")
    args = ap.parse_args()
    failed = 0
    for r in golden_suite():
        print(f"{r.trace:9s} {r.gadget:15s} {'ok' if r.ok else 'FAIL'}  diffs={len(r.report.diffs)}")
        if r.error:
            print(f"    error: {r.error}")
        for d in r.report.diffs:
            mark = "!" if d in r.unexplained else "erratum"
            print(f"    t{d.time} {d.field}: printed {d.expected}, simulated {d.simulated} ({mark})")
        if args.verbose:
            for row in r.simulated:
                print("    " + "\t".join(str(x) for x in row.as_tuple()))
        failed += not r.ok
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
