"""Run every CLI experiment once and summarize exit codes and wall times as CSV."""

import argparse
import csv
import sys
import tempfile
import time
from contextlib import redirect_stdout
from io import StringIO
from pathlib import Path

from disposable.cli import dispatch


def experiments(workdir: Path) -> list[tuple[str, list[str]]]:
    ledger, word = str(workdir / "ledger.json"), str(workdir / "w.txt")
    return [
        ("vtm prefix", ["generate", "vtm", "--length", "24"]),
        ("avoidance", ["check", "--length", str(10 ** 6), "--max-half", str(5 * 10 ** 5), "--naive-length", "1000"]),
        ("positions vs automaton", ["disposable", "--limit", "4096", "--engine"]),
        ("gap set", ["gaps", "--limit", str(1 << 20)]),
        ("exact density", ["density", "--mode", "exact"]),
        ("empirical density", ["density", "--mode", "empirical"]),
        ("construction", ["construct", "--phases", "1", "--out", word, "--ledger", ledger]),
        ("ledger verification", ["verify", "--ledger", ledger, "--prefix", word]),
    ]


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="-")
    p.add_argument("--show", action="store_true", help="echo each command's output to stderr")
    args = p.parse_args()

    results = []
    with tempfile.TemporaryDirectory() as tmp:
        for name, argv in experiments(Path(tmp)):
            buf = StringIO()
            t0 = time.perf_counter()
            with redirect_stdout(buf):
                code = dispatch(argv)
            results.append((name, " ".join(argv), code, time.perf_counter() - t0))
            if args.show:
                print(f"== {name}\n{buf.getvalue()}", file=sys.stderr)

    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    with fh:
        writer = csv.writer(fh)
        writer.writerow(["experiment", "command", "exit_code", "seconds"])
        for name, cmd, code, secs in results:
            writer.writerow([name, cmd, code, f"{secs:.2f}"])
    sys.exit(max(code for *_, code, _ in results))


if __name__ == "__main__":
    main()
