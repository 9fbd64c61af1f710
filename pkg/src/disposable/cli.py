"""Command-line front end: ``disposable <command> ...``.

Every table is CSV preceded by a ``# config:`` line echoing the parameters;
JSON outputs carry the same parameters under ``"config"``.  The exit status
is nonzero whenever an internal check fails.
"""

from __future__ import annotations

import argparse
import contextlib
import functools
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import construction as cons
from . import dfao as dfao_mod
from .disposability import first_differences, position_verdicts, vtm_stream
from .morphisms import TAU, fixed_point_stream
from .predicate import DISPO_DELTA, DISPO_POS, PredicateEnv, accepted_set_if_finite, accepted_values, run_commands
from .predicate.automaton import TrackAutomaton
from .spectral import (PRINTED_FINALS, PRINTED_M, accepted_density, density_from_matrix,
                       empirical_density_series)
from .words import avoids, find_square

log = logging.getLogger("disposable")


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    threads: int = 1

    def header(self) -> str:
        return "# config: " + json.dumps({"command": self.command, **self.params}, sort_keys=True)


def _out(args):
    if getattr(args, "out", None):
        return open(args.out, "w")
    return contextlib.nullcontext(sys.stdout)


@functools.lru_cache(maxsize=1)
def _dispo_env() -> PredicateEnv:
    env = PredicateEnv.default()
    env.define("dispo_pos", DISPO_POS)
    env.define("dispo_delta", DISPO_DELTA)
    return env


def dispo_pos_automaton() -> TrackAutomaton:
    return _dispo_env().predicates["dispo_pos"]


def engine_mask(limit: int, a: TrackAutomaton | None = None) -> np.ndarray:
    """Boolean mask of disposable positions ``0..limit`` from the compiled automaton."""
    a = a or dispo_pos_automaton()
    ns = np.arange(limit + 1, dtype=np.int64)
    state = np.full(ns.shape, a.initial, dtype=np.int64)
    for b in range(max(limit.bit_length(), 1) - 1, -1, -1):
        state = a.delta[state, (ns >> b) & 1]
    return a.finals[state]


def track_automaton_text(a: TrackAutomaton) -> str:
    """Dfao text format; the output of a state is 1 when it accepts."""
    lines = [f"# tracks {' '.join(a.tracks)} (digit k of a letter belongs to track k)",
             f"states {a.state_count}, initial {a.initial}, order msd"]
    for q in range(a.state_count):
        for letter in range(a.delta.shape[1]):
            label = "".join(str((letter >> t) & 1) for t in range(a.arity)) or "-"
            lines.append(f"{q} {label} -> {a.delta[q, letter]}")
    for q in range(a.state_count):
        lines.append(f"output {q} = {int(a.finals[q])}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- commands

def cmd_generate(args, cfg: RunConfig) -> int:
    n = args.length
    if args.word == "vtm":
        text = str(fixed_point_stream(TAU, 0).prefix(n))
    elif args.word == "thue-morse":
        text = "".join(str(x) for x in dfao_mod.eval_many(dfao_mod.thue_morse_dfao(), np.arange(n)))
    elif args.word == "fs":
        text = str(cons.fs_stream().prefix(n))
    else:
        _, wc = cons.construct(args.phases)
        if n > len(wc.w):
            log.error("construction prefix through phase %d has only %d letters", args.phases, len(wc.w))
            return 1
        text = str(wc.w[:n])
    with _out(args) as fh:
        fh.write(text + "\n")
    return 0


def cmd_check(args, cfg: RunConfig) -> int:
    w = fixed_point_stream(TAU, 0).prefix(args.length)
    results = {
        "avoids_010_212": avoids(w, ["010", "212"]),
        "avoids_1021_1201": avoids(w, ["1021", "1201"]),
        "squarefree_accelerated": find_square(w, args.max_half or len(w) // 2) is None,
        "squarefree_naive_spot": find_square(w[:args.naive_length], accelerated=False) is None,
    }
    with _out(args) as fh:
        fh.write(cfg.header() + "\ncheck,passed\n")
        for k, v in results.items():
            fh.write(f"{k},{str(v).lower()}\n")
    return 0 if all(results.values()) else 1


def cmd_disposable(args, cfg: RunConfig) -> int:
    stream = vtm_stream()
    verdicts = position_verdicts(stream, args.limit, args.max_half, cfg.threads)
    positions = [v.position for v in verdicts if v.disposable]
    status = 0
    if args.engine:
        mask = engine_mask(args.limit)
        exact = np.flatnonzero(mask).tolist()
        if exact != positions:
            log.error("brute force at half-length %d disagrees with the automaton", args.max_half)
            status = 1
    with _out(args) as fh:
        if args.json:
            json.dump({"config": {"command": cfg.command, **cfg.params},
                       "verdicts": [v.to_json() for v in verdicts]}, fh, indent=1)
            fh.write("\n")
        else:
            diffs = [""] + first_differences(positions) if positions else []
            fh.write(cfg.header() + "\nposition,difference\n")
            for p, d in zip(positions, diffs):
                fh.write(f"{p},{d}\n")
    return status


def cmd_gaps(args, cfg: RunConfig) -> int:
    env = _dispo_env()
    mask = engine_mask(args.limit, env.predicates["dispo_pos"])
    positions = np.flatnonzero(mask).tolist()
    gaps = sorted(set(first_differences(positions, drop_initial=True)))
    exact = accepted_set_if_finite(env.predicates["dispo_delta"])
    print(" ".join(str(g) for g in gaps))
    if exact is None or set(gaps) != exact:
        log.error("gap set %s differs from the dispo_delta automaton %s", gaps, exact)
        return 1
    return 0


def cmd_density(args, cfg: RunConfig) -> int:
    if args.mode == "exact":
        derived = accepted_density(dispo_pos_automaton())
        printed = density_from_matrix(PRINTED_M, [f - 1 for f in PRINTED_FINALS])
        print(f"{derived.numerator}/{derived.denominator}")
        if derived != printed:
            log.error("derived density %s differs from printed-matrix density %s", derived, printed)
            return 1
        return 0
    checkpoints = args.checkpoints or [1 << k for k in range(4, 21)]
    mask = engine_mask(max(checkpoints) + 2)
    with _out(args) as fh:
        fh.write(cfg.header() + "\nn,count,density\n")
        for n, c, d in empirical_density_series(mask, checkpoints):
            fh.write(f"{n},{c},{d:.10f}\n")
    return 0


def cmd_walnut(args, cfg: RunConfig) -> int:
    text = Path(args.file).read_text()
    env, names = run_commands(text)
    with _out(args) as fh:
        for name in names:
            a = env.predicates[name]
            fh.write(f"# predicate {name}\n")
            fh.write(track_automaton_text(a))
            fh.write(f"# accepted values of {name} up to {args.bound}\n")
            for tup in accepted_values(a, args.bound):
                fh.write(",".join(str(x) for x in tup) + "\n")
    return 0


def _smoke_windows(w: np.ndarray, ledger: cons.ConstructionLedger, scan: int) -> bool:
    for r in ledger.records:
        lo = max(0, r.start - 4 * scan)
        hi = min(w.shape[0], r.start + r.length + 4 * scan)
        if find_square(w[lo:hi], scan) is not None:
            return False
    return True


def cmd_construct(args, cfg: RunConfig) -> int:
    vc, wc = cons.construct(args.phases, args.tail)
    letters = wc.w.letters
    full = args.phases <= 2
    checks = {
        "v_squarefree": find_square(vc.v) is None,
        "w_squarefree_windowed": (find_square(letters, args.scan) is None) if full
        else _smoke_windows(letters, wc.ledger, args.scan),
    }
    verdicts = cons.verify_ledger(wc.w, wc.ledger, args.scan)
    checks["ledger_certified"] = all(v.disposable for v in verdicts)
    for n in range(1, args.phases + 1):
        got = sorted(r.length for r in wc.ledger.records if r.phase == n)
        want = list(range(414 * n, 414 * n + cons.PhasePlan.scheduled_count(n)))
        checks[f"phase_{n}_lengths_complete"] = got == want
        checks[f"phase_{n}_count"] = len(vc.plan.counted.get(n, [])) == cons.OCCURRENCES_PER_PHASE
    if args.out:
        Path(args.out).write_text(str(wc.w) + "\n")
    if args.ledger:
        payload = {"config": {"command": cfg.command, **cfg.params}, "mode": "full" if full else "smoke",
                   "prefix_length": len(wc.w), **wc.ledger.to_json()}
        Path(args.ledger).write_text(json.dumps(payload, indent=1) + "\n")
    print(cfg.header())
    print("check,passed")
    for k, v in checks.items():
        print(f"{k},{str(v).lower()}")
    return 0 if all(checks.values()) else 1


def cmd_verify(args, cfg: RunConfig) -> int:
    data = json.loads(Path(args.ledger).read_text())
    ledger = cons.ConstructionLedger.from_json(data)
    if args.prefix:
        from .words import Word
        w = Word(Path(args.prefix).read_text().strip())
    else:
        conf = data.get("config", {})
        _, wc = cons.construct(conf.get("phases", 1), conf.get("tail", 8))
        w = wc.w
    verdicts = cons.verify_ledger(w, ledger, args.scan)
    report = {"config": {"command": cfg.command, **cfg.params},
              "records": [{**r.to_json(), "status": v.status, "scan_bound": v.bound,
                           "witness": None if v.witness is None else [v.witness.start, v.witness.half]}
                          for r, v in zip(ledger.records, verdicts)]}
    with _out(args) as fh:
        json.dump(report, fh, indent=1)
        fh.write("\n")
    return 0 if all(v.disposable for v in verdicts) else 1


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="disposable", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="print a prefix of a word")
    g.add_argument("word", choices=["vtm", "thue-morse", "fs", "construction"])
    g.add_argument("--length", type=int, required=True)
    g.add_argument("--phases", type=int, default=1)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("check", help="avoidance and squarefreeness of a vtm prefix")
    c.add_argument("--length", type=int, default=10 ** 6)
    c.add_argument("--max-half", type=int, default=None)
    c.add_argument("--naive-length", type=int, default=2000)
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("disposable", help="brute-force disposable positions of vtm")
    d.add_argument("--limit", type=int, required=True)
    d.add_argument("--max-half", type=int, default=64)
    d.add_argument("--engine", action="store_true", help="cross-check against the compiled automaton")
    d.add_argument("--json", action="store_true", help="emit per-position verdicts as JSON")
    d.add_argument("--out")
    d.set_defaults(func=cmd_disposable)

    gp = sub.add_parser("gaps", help="gap set between disposable positions (initial dropped)")
    gp.add_argument("--limit", type=int, default=1 << 20)
    gp.set_defaults(func=cmd_gaps)

    de = sub.add_parser("density", help="density of disposable positions")
    de.add_argument("--mode", choices=["exact", "empirical"], default="exact")
    de.add_argument("--checkpoints", type=int, nargs="*")
    de.add_argument("--out")
    de.set_defaults(func=cmd_density)

    wa = sub.add_parser("walnut", help="compile eval commands from a file")
    wa.add_argument("file")
    wa.add_argument("--bound", type=int, default=256)
    wa.add_argument("--out")
    wa.set_defaults(func=cmd_walnut)

    co = sub.add_parser("construct", help="build the long-disposable-factor word")
    co.add_argument("--phases", type=int, default=1)
    co.add_argument("--tail", type=int, default=8)
    co.add_argument("--scan", type=int, default=2000)
    co.add_argument("--out")
    co.add_argument("--ledger")
    co.set_defaults(func=cmd_construct)

    ve = sub.add_parser("verify", help="certify a construction ledger")
    ve.add_argument("--ledger", required=True)
    ve.add_argument("--prefix")
    ve.add_argument("--scan", type=int, default=2000)
    ve.add_argument("--out")
    ve.set_defaults(func=cmd_verify)
    return p


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command", "verbose", "threads")}
    cfg = RunConfig(args.command, params, max(1, args.threads))
    return args.func(args, cfg)


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
