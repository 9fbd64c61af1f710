"""Build the construction through several phases and report per-phase statistics.

Phases beyond two are checked on windows around each ledger record only.
"""

import argparse
import csv
import sys
import time

from disposable import construction as cons
from disposable.words import find_square


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--phases", type=int, default=3)
    p.add_argument("--scan", type=int, default=2000)
    p.add_argument("--out", default="-")
    args = p.parse_args()

    t0 = time.perf_counter()
    vc, wc = cons.construct(args.phases)
    built = time.perf_counter() - t0
    letters = wc.w.letters
    verdicts = cons.verify_ledger(wc.w, wc.ledger, args.scan)

    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    with fh:
        fh.write(f"# |v| = {len(vc.v)}, |w| = {len(wc.w)}, built in {built:.2f}s\n")
        writer = csv.writer(fh)
        writer.writerow(["phase", "occurrences", "records", "min_length", "max_length", "certified",
                         "windows_squarefree"])
        for n in range(1, args.phases + 1):
            recs = [(r, v) for r, v in zip(wc.ledger.records, verdicts) if r.phase == n]
            windows = all(find_square(letters[max(0, r.start - 2 * args.scan):r.start + r.length + 2 * args.scan],
                                      args.scan) is None for r, _ in recs)
            writer.writerow([n, len(vc.plan.counted.get(n, [])), len(recs),
                             min(r.length for r, _ in recs), max(r.length for r, _ in recs),
                             all(v.disposable for _, v in recs), windows])


if __name__ == "__main__":
    main()
