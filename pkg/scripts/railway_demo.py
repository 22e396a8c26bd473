"""Run a register machine program through the railway circuit and check it
against the plain interpreter."""
import argparse
from collections import Counter

from heptaca.railway import interpret, parse_program, run_machine, transfer_program

# r1 := 2 * r0, r0 := 0
DOUBLE = """
loop: DEC r0 -> a | Z:done
a:    INC r1 -> b
b:    INC r1 -> loop
done: HALT
"""


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("program", nargs="?", help="program file (default: built-in examples)")
    ap.add_argument("--r0", type=int, default=3)
    ap.add_argument("--r1", type=int, default=4)
    ap.add_argument("--fuel", type=int, default=10**6)
    ap.add_argument("--events", type=int, default=0, help="print the first N events")
    args = ap.parse_args()
    if args.program:
        with open(args.program) as fh:
            progs = {args.program: parse_program(fh)}
    else:
        progs = {"transfer": transfer_program(), "double": parse_program(DOUBLE)}
    for name, p in progs.items():
        res = run_machine(p, args.r0, args.r1, fuel=args.fuel)
        ref = interpret(p, args.r0, args.r1)
        kinds = Counter(e.kind for e in res.log)
        print(f"{name}: ({args.r0},{args.r1}) -> {res.registers} halted={res.halted} "
              f"instructions={res.steps} events={len(res.log)} interpreter={ref.registers}")
        print("    " + " ".join(f"{k}={v}" for k, v in sorted(kinds.items())))
        for e in list(res.log)[: args.events]:
            print("    " + e.line())


if __name__ == "__main__":
    main()
