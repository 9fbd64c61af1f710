"""Empirical density of disposable positions of vtm at powers of two, as CSV.

Counts come from the compiled automaton; the exact limit is printed as a
trailing comment for comparison.
"""

import argparse
import csv
import sys

from disposable.cli import dispo_pos_automaton, engine_mask
from disposable.spectral import accepted_density, empirical_density_series


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--max-exponent", type=int, default=20)
    p.add_argument("--out", default="-")
    args = p.parse_args()

    a = dispo_pos_automaton()
    checkpoints = [1 << k for k in range(4, args.max_exponent + 1)]
    rows = empirical_density_series(engine_mask(checkpoints[-1] + 1, a), checkpoints)
    limit = accepted_density(a)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    with fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "count", "density", "error"])
        for n, c, d in rows:
            writer.writerow([n, c, f"{d:.10f}", f"{d - float(limit):+.3e}"])
        fh.write(f"# exact limit {limit}\n")


if __name__ == "__main__":
    main()
