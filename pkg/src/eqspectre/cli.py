"""Command line front end: ``eqspectre check|quotient|bench|game-dump|spectrum``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .egame import ResourceLimitExceeded
from .energy import INF, dominated_by, format_energy, to_json
from .hml import SPECTRUM, clever_compatible, lookup, render
from .lts import (AutFormatError, Lts, Partition, bisim_partition, quotient, read_aut,
                  read_names, saturate_weak, write_aut)
from .spectroscopy import (SystemSpectrum, format_position, quotient_partition, root,
                           solve, spectroscope)

log = logging.getLogger("eqspectre")

EXIT_OK, EXIT_FAIL, EXIT_ERROR, EXIT_LIMIT = 0, 1, 2, 3
BENCH_HEADER = ["system", "states", "bisimquot", "moves", "time_s",
                "enabledness", "trace", "simulation"]
CHECK_HEADER = ["p", "q", "forward", "backward", "equivalences",
                "budgets_forward", "budgets_backward", "error"]


class UsageError(Exception):
    pass


# -- pipeline ---------------------------------------------------------------

class Loaded:
    """Input system after saturation and bisimilarity quotienting."""

    def __init__(self, path, weak=False, names_path=None):
        self.path = Path(path)
        self.original = read_aut(path)
        if weak:
            if self.original.tau is None:
                raise UsageError(f"{path}: --weak needs an internal action in the system")
            self.original = saturate_weak(self.original)
        self.names = read_names(names_path) if names_path else {}
        self.partition = bisim_partition(self.original)
        self.lts = quotient(self.original, self.partition)

    def state(self, token: str) -> int:
        if token in self.names:
            s = self.names[token]
        else:
            try:
                s = int(token)
            except ValueError:
                raise UsageError(f"unknown process {token!r}") from None
        if not 0 <= s < self.original.n:
            raise UsageError(f"process {token!r} out of range 0..{self.original.n - 1}")
        return s

    def label(self, s: int) -> str:
        for k, v in self.names.items():
            if v == s:
                return k
        return str(s)

    def block(self, s: int) -> int:
        return self.partition.blocks[s]


def _variant(args, custom=()):
    variant = args.variant
    if variant == "clever" and not all(clever_compatible(e) for _, e in custom):
        log.warning("custom coordinate outside the clever game's precondition; using the full game")
        variant = "full"
    return variant


def _cap(args):
    if args.mode == "exact":
        return None
    if args.cap < 3:
        raise UsageError("--cap must be at least 3 to decide the spectrum notions")
    return args.cap


def _parse_coordinate(text):
    name, _, values = text.partition("=")
    if not values:
        raise UsageError(f"--coordinate expects NAME=e1,...,e6, got {text!r}")
    comps = [v.strip() for v in values.split(",")]
    if len(comps) != 6:
        raise UsageError("--coordinate needs six components")
    e = tuple(INF if c in ("inf", "∞") else int(c) for c in comps)
    return name, e


# -- check ------------------------------------------------------------------

def _check_pair(job):
    lts, p, q, variant, cap, limit, timeout = job
    try:
        return spectroscope(lts, p, q, variant, cap, limit_positions=limit, timeout=timeout)
    except ResourceLimitExceeded as exc:
        return exc


def _pairs(args, loaded):
    if args.all_pairs:
        n = loaded.original.n
        return [(p, q) for p in range(n) for q in range(p + 1, n)]
    if len(args.processes) % 2:
        raise UsageError("processes must come in pairs")
    toks = args.processes
    return [(loaded.state(toks[i]), loaded.state(toks[i + 1])) for i in range(0, len(toks), 2)]


def cmd_check(args, out):
    loaded = Loaded(args.file, args.weak, args.names)
    custom = [_parse_coordinate(c) for c in args.coordinate]
    variant, cap = _variant(args, custom), _cap(args)
    required = [lookup(r).name for r in args.require]
    pairs = _pairs(args, loaded)
    if not pairs:
        raise UsageError("no process pairs given (use P Q or --all-pairs)")

    jobs = [(loaded.lts, loaded.block(p), loaded.block(q), variant, cap,
             args.limit_positions, args.timeout) for p, q in pairs]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_check_pair, jobs))
    else:
        results = [_check_pair(j) for j in jobs]

    reports, status = [], EXIT_OK
    for (p, q), res in zip(pairs, results):
        if isinstance(res, ResourceLimitExceeded):
            reports.append({"pair": [loaded.label(p), loaded.label(q)], "error": str(res)})
            status = EXIT_LIMIT
            continue
        report = res.to_json()
        report["pair"] = [loaded.label(p), loaded.label(q)]
        report["finest_capped"] = cap is not None
        if custom:
            report["custom"] = {
                name: {"forward": not dominated_by(res.budgets_pq, e),
                       "backward": not dominated_by(res.budgets_qp, e)}
                for name, e in custom
            }
        reports.append(report)
        if status == EXIT_OK and not all(r in res.equivalences for r in required):
            status = EXIT_FAIL

    doc = {"input": str(loaded.path), "weak": args.weak, "states": loaded.original.n,
           "bisimquot": loaded.lts.n, "pairs": reports}
    if args.format == "json":
        json.dump(doc, out, indent=2, ensure_ascii=False)
        out.write("\n")
    elif args.format == "csv":
        _write_check_csv(doc, out)
    else:
        _write_check_text(doc, out)
    return status


def _write_check_csv(doc, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CHECK_HEADER)
    for r in doc["pairs"]:
        if "error" in r:
            w.writerow(r["pair"] + [""] * 5 + [r["error"]])
            continue
        w.writerow(r["pair"] + [
            " ".join(r["preorders"]["forward"]), " ".join(r["preorders"]["backward"]),
            " ".join(r["equivalences"]),
            " ".join(_fmt(e) for e in r["budgets"]["forward"]),
            " ".join(_fmt(e) for e in r["budgets"]["backward"]), ""])


def _write_check_text(doc, out):
    for r in doc["pairs"]:
        p, q = r["pair"]
        if "error" in r:
            out.write(f"{p} vs {q}: aborted: {r['error']}\n")
            continue
        mode = "exact" if r["cap"] is None else f"capped({r['cap']})"
        out.write(f"{p} vs {q}  [{r['variant']} game, {mode}]\n")
        out.write(f"  {p} <= {q}: {' '.join(r['preorders']['forward']) or '-'}\n")
        out.write(f"  {q} <= {p}: {' '.join(r['preorders']['backward']) or '-'}\n")
        out.write(f"  equivalent: {' '.join(r['equivalences']) or '-'}\n")
        for key, (a, b) in (("forward", (p, q)), ("backward", (q, p))):
            budgets = r["budgets"][key]
            shown = ", ".join(_fmt(e) for e in budgets) or "none (defender wins)"
            out.write(f"  budgets {a} vs {b}: {shown}\n")
        out.write(f"  finest equating: {', '.join(_fmt(e) for e in r['finest']) or 'none'}\n")
        for key, (a, b) in (("forward", (p, q)), ("backward", (q, p))):
            certs = r["certificates"][key]
            if certs:
                out.write(f"  distinguishing {a} from {b}:\n")
                by_formula: dict = {}
                for notion, f in certs.items():
                    by_formula.setdefault(f, []).append(notion)
                for f, notions in by_formula.items():
                    out.write(f"    {f}   ({' '.join(notions)})\n")
        for name, res in r.get("custom", {}).items():
            out.write(f"  {name}: forward={res['forward']} backward={res['backward']}\n")


def _fmt(e):
    return "(" + ",".join("∞" if v == "inf" else str(v) for v in e) + ")"


# -- quotient ---------------------------------------------------------------

def _lift(loaded, part_q: Partition) -> Partition:
    return Partition(tuple(part_q.blocks[b] for b in loaded.partition.blocks))


def cmd_quotient(args, out):
    loaded = Loaded(args.file, args.weak, args.names)
    cap = _cap(args)
    try:
        part = _lift(loaded, quotient_partition(
            loaded.lts, args.notion, args.variant, cap, jobs=args.jobs,
            limit_positions=args.limit_positions, timeout=args.timeout))
    except ResourceLimitExceeded as exc:
        out.write(f"aborted: {exc}\n")
        return EXIT_LIMIT
    classes = [[loaded.label(s) for s in c] for c in part.classes()]
    if args.output:
        Path(args.output).write_text(write_aut(quotient(loaded.original, part)), encoding="utf-8")
    if args.format == "json":
        json.dump({"notion": lookup(args.notion).name, "classes": classes,
                   "count": len(classes)}, out, indent=2)
        out.write("\n")
    else:
        out.write(f"{len(classes)} classes under {lookup(args.notion).name}\n")
        for i, c in enumerate(classes):
            out.write(f"  {i}: {' '.join(c)}\n")
    return EXIT_OK


# -- bench ------------------------------------------------------------------

def bench_row(path, weak=False, variant="clever", cap=3, limit_positions=None, timeout=None):
    loaded = Loaded(path, weak)
    t0 = time.monotonic()
    spec = SystemSpectrum(loaded.lts, variant, cap, limit_positions=limit_positions,
                          timeout=timeout)
    elapsed = time.monotonic() - t0
    return {
        "system": loaded.path.stem,
        "states": loaded.original.n,
        "bisimquot": loaded.lts.n,
        "moves": spec.stats["moves"],
        "time_s": f"{elapsed:.3f}",
        "enabledness": spec.enabledness.count,
        "trace": spec.partition("T").count,
        "simulation": spec.partition("1S").count,
    }


def _bench_job(job):
    path, weak, variant, cap, limit, timeout = job
    try:
        return bench_row(path, weak, variant, cap, limit, timeout)
    except (OSError, AutFormatError, UsageError, ResourceLimitExceeded) as exc:
        return {"system": Path(path).stem, "states": "error", "error": str(exc)}


def cmd_bench(args, out):
    cap = _cap(args)
    writer = csv.DictWriter(out, fieldnames=BENCH_HEADER, extrasaction="ignore",
                            lineterminator="\n")
    writer.writeheader()
    jobs = [(f, args.weak, args.variant, cap, args.limit_positions, args.timeout)
            for f in args.files]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = pool.map(_bench_job, jobs)
            status = _emit_rows(writer, rows, out)
    else:
        status = _emit_rows(writer, map(_bench_job, jobs), out)
    return status


def _emit_rows(writer, rows, out):
    status = EXIT_OK
    for row in rows:
        if "error" in row:
            log.error("%s: %s", row["system"], row["error"])
            status = EXIT_ERROR
        writer.writerow(row)
        out.flush()
    return status


# -- game-dump / spectrum ---------------------------------------------------

def cmd_game_dump(args, out):
    loaded = Loaded(args.file, args.weak, args.names)
    p, q = loaded.state(args.p), loaded.state(args.q)
    bp, bq = loaded.block(p), loaded.block(q)
    try:
        table = solve(loaded.lts, [root(bp, bq)], args.variant, _cap(args),
                      args.limit_positions, args.timeout)
    except ResourceLimitExceeded as exc:
        out.write(f"aborted: {exc}\n")
        return EXIT_LIMIT
    labels = {loaded.block(s): loaded.label(s) for s in reversed(range(loaded.original.n))}
    names = [labels.get(b, str(b)) for b in range(loaded.lts.n)]
    if args.format == "dot":
        out.write(table.to_dot(lambda g: format_position(g, names)))
    else:
        doc = table.to_json()
        for entry, g in zip(doc["positions"], table.positions):
            entry["label"] = format_position(g, names)
        json.dump(doc, out, indent=1, ensure_ascii=False)
        out.write("\n")
    return EXIT_OK


def cmd_spectrum(args, out):
    if args.format == "json":
        json.dump([{"name": n.name, "title": n.title, "coordinate": to_json(n.coordinate)}
                   for n in SPECTRUM], out, indent=2)
        out.write("\n")
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["name", "title", "e1", "e2", "e3", "e4", "e5", "e6"])
        for n in SPECTRUM:
            w.writerow([n.name, n.title] + to_json(n.coordinate))
    else:
        for n in SPECTRUM:
            out.write(f"{n.name:<3} {n.title:<20} {format_energy(n.coordinate)}\n")
    return EXIT_OK


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eqspectre",
                                 description="Decide the strong linear-time branching-time spectrum.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, variant="full", mode="exact", formats=("text", "json")):
        p.add_argument("--weak", action="store_true", help="saturate with weak steps first")
        p.add_argument("--variant", choices=("full", "clever"), default=variant)
        p.add_argument("--mode", choices=("exact", "capped"), default=mode)
        p.add_argument("--cap", type=int, default=3, metavar="K")
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--jobs", type=int, default=1, metavar="N")
        p.add_argument("--limit-positions", type=int, metavar="N")
        p.add_argument("--timeout", type=float, metavar="S")

    c = sub.add_parser("check", help="spectroscopy of process pairs")
    c.add_argument("file")
    c.add_argument("processes", nargs="*", help="P Q [P Q ...] by id or name")
    c.add_argument("--all-pairs", action="store_true")
    c.add_argument("--names", metavar="FILE")
    c.add_argument("--require", nargs="+", default=["B"], metavar="NOTION",
                   help="equivalences that must hold for exit status 0 (default: B)")
    c.add_argument("--coordinate", action="append", default=[], metavar="NAME=e1,...,e6")
    common(c, formats=("text", "json", "csv"))

    qp = sub.add_parser("quotient", help="classes under one notion")
    qp.add_argument("file")
    qp.add_argument("--notion", default="B")
    qp.add_argument("--output", "-o", metavar="FILE.aut")
    qp.add_argument("--names", metavar="FILE")
    common(qp, variant="clever", mode="capped")

    b = sub.add_parser("bench", help="CSV benchmark rows")
    b.add_argument("files", nargs="*")
    common(b, variant="clever", mode="capped", formats=("csv",))

    g = sub.add_parser("game-dump", help="dump the reachable game with budgets")
    g.add_argument("file")
    g.add_argument("p")
    g.add_argument("q")
    g.add_argument("--names", metavar="FILE")
    common(g, formats=("json", "dot"))

    s = sub.add_parser("spectrum", help="print the spectrum coordinates")
    s.add_argument("--format", choices=("text", "json", "csv"), default="text")
    return ap


COMMANDS = {"check": cmd_check, "quotient": cmd_quotient, "bench": cmd_bench,
            "game-dump": cmd_game_dump, "spectrum": cmd_spectrum}


def main(argv=None, out=None) -> int:
    level = os.environ.get("EQSPECTRE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return COMMANDS[args.command](args, out)
    except (OSError, AutFormatError, UsageError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"eqspectre: error: {msg}", file=sys.stderr)
        return EXIT_ERROR
