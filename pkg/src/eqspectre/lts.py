"""Labeled transition systems and the ``.aut`` (Aldebaran) format."""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

TAU = "tau"
INTERNAL_LABELS = frozenset({"i", "tau", "τ"})

ProcessSet = tuple


class AutFormatError(ValueError):
    """Malformed ``.aut`` input; ``line`` is 1-based."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def process_set(items: Iterable[int]) -> ProcessSet:
    """Canonical (sorted, deduplicated) process set."""
    return tuple(sorted(set(items)))


class Lts:
    """An immutable finite labeled transition system.

    Processes are ``0 .. n-1``.  Actions are interned strings; ``tau`` is
    the designated internal action if any transition uses it (or if
    ``internal=True``).
    """

    def __init__(self, n_processes: int, transitions: Iterable[tuple], initial: int = 0,
                 actions: Sequence[str] = (), internal: bool | None = None):
        self.n = int(n_processes)
        if self.n < 0:
            raise ValueError("negative process count")
        self.initial = initial
        self.actions: list[str] = []
        self._action_id: dict[str, int] = {}
        for a in actions:
            self.intern(a)
        rel = set()
        for src, label, dst in transitions:
            for p in (src, dst):
                if not (0 <= p < self.n):
                    raise ValueError(f"process id {p} out of range 0..{self.n - 1}")
            rel.add((src, self.intern(label), dst))
        self.transitions = tuple(sorted(rel))
        if internal is None:
            internal = TAU in self._action_id
        self.tau = self.intern(TAU) if internal else None

        out = [defaultdict(list) for _ in range(self.n)]
        for src, a, dst in self.transitions:
            out[src][a].append(dst)
        self._out = [{a: tuple(ts) for a, ts in sorted(d.items())} for d in out]
        self._enabled = [frozenset(d) for d in self._out]

    def intern(self, label: str) -> int:
        if label in INTERNAL_LABELS:
            label = TAU
        aid = self._action_id.get(label)
        if aid is None:
            aid = len(self.actions)
            self.actions.append(label)
            self._action_id[label] = aid
        return aid

    def action_id(self, label: str) -> int | None:
        if label in INTERNAL_LABELS:
            label = TAU
        return self._action_id.get(label)

    @property
    def processes(self) -> range:
        return range(self.n)

    def out(self, p: int) -> dict:
        """Outgoing adjacency of ``p``: action id -> tuple of targets."""
        return self._out[p]

    def moves(self, p: int):
        for a, targets in self._out[p].items():
            for t in targets:
                yield a, t

    def enabled_ids(self, p: int) -> frozenset:
        return self._enabled[p]

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"Lts(n={self.n}, transitions={len(self.transitions)}, actions={self.actions})"

    def labeled_transitions(self):
        return [(s, self.actions[a], t) for s, a, t in self.transitions]

    def __eq__(self, other):
        if not isinstance(other, Lts):
            return NotImplemented
        return (self.n == other.n and self.initial == other.initial
                and set(self.labeled_transitions()) == set(other.labeled_transitions()))

    __hash__ = None


def enabled(lts: Lts, p: int) -> frozenset:
    """Labels of the actions ``p`` can perform."""
    return frozenset(lts.actions[a] for a in lts.enabled_ids(p))


def step_set(lts: Lts, procs: Iterable[int], action) -> ProcessSet:
    """All ``a``-successors of a process set; ``action`` is a label or an id."""
    a = action if isinstance(action, int) else lts.action_id(action)
    if a is None:
        return ()
    out = set()
    for p in procs:
        out.update(lts.out(p).get(a, ()))
    return process_set(out)


# -- .aut -------------------------------------------------------------------

_HEADER_RE = re.compile(r"\s*des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*")
_TRANS_RE = re.compile(r'\s*\(\s*(\d+)\s*,\s*("(?:[^"\\]|\\.)*"|[^,]*?)\s*,\s*(\d+)\s*\)\s*')


def parse_aut(text: str) -> Lts:
    lines = text.splitlines()
    idx = 0
    while idx < len(lines) and not lines[idx].strip():
        idx += 1
    if idx == len(lines):
        raise AutFormatError("missing 'des' header", 1)
    m = _HEADER_RE.fullmatch(lines[idx])
    if not m:
        raise AutFormatError(f"malformed header {lines[idx].strip()!r}", idx + 1)
    initial, n_trans, n_states = (int(g) for g in m.groups())
    if n_states == 0 or initial >= n_states:
        raise AutFormatError(f"initial state {initial} not among {n_states} states", idx + 1)
    trans = []
    for lineno, line in enumerate(lines[idx + 1:], start=idx + 2):
        if not line.strip():
            continue
        tm = _TRANS_RE.fullmatch(line)
        if not tm:
            raise AutFormatError(f"malformed transition {line.strip()!r}", lineno)
        src, label, dst = int(tm.group(1)), tm.group(2), int(tm.group(3))
        if label.startswith('"'):
            label = label[1:-1]
        for p in (src, dst):
            if p >= n_states:
                raise AutFormatError(f"state {p} >= state count {n_states}", lineno)
        trans.append((src, label, dst))
    if len(trans) != n_trans:
        raise AutFormatError(
            f"header announces {n_trans} transitions, body has {len(trans)}", len(lines))
    return Lts(n_states, trans, initial=initial)


def read_aut(path) -> Lts:
    with open(path, encoding="utf-8") as f:
        return parse_aut(f.read())


def write_aut(lts: Lts) -> str:
    rows = [f"des ({lts.initial}, {len(lts.transitions)}, {lts.n})"]
    for s, a, t in lts.transitions:
        label = "i" if a == lts.tau else lts.actions[a]
        rows.append(f'({s}, "{label}", {t})')
    return "\n".join(rows) + "\n"


def read_names(path) -> dict:
    """Read a ``name<TAB>id`` sidecar file."""
    names = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t") if "\t" in line else line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'name<TAB>id'")
            names[parts[0]] = int(parts[1])
    return names


# -- transformations --------------------------------------------------------

def tau_closure(lts: Lts) -> list:
    """For each process, the sorted set reachable by zero or more tau steps."""
    if lts.tau is None:
        raise ValueError("system has no internal action")
    tau = lts.tau
    closure = []
    for p in lts.processes:
        seen = {p}
        stack = [p]
        while stack:
            x = stack.pop()
            for y in lts.out(x).get(tau, ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        closure.append(process_set(seen))
    return closure


def saturate_weak(lts: Lts) -> Lts:
    """Weak-step saturation: ``tau`` becomes ``tau*`` and ``a`` becomes ``tau* a tau*``."""
    closure = tau_closure(lts)
    tau = lts.tau
    trans = set()
    for p in lts.processes:
        for r in closure[p]:
            trans.add((p, TAU, r))
            for a, targets in lts.out(r).items():
                if a == tau:
                    continue
                label = lts.actions[a]
                for t in targets:
                    for t2 in closure[t]:
                        trans.add((p, label, t2))
    return Lts(lts.n, trans, initial=lts.initial, actions=lts.actions, internal=True)


@dataclass(frozen=True)
class Partition:
    """Block id per process; ids are dense and numbered by first occurrence."""

    blocks: tuple

    def __post_init__(self):
        seen = {}
        for b in self.blocks:
            if b not in seen:
                seen[b] = len(seen)
        object.__setattr__(self, "blocks", tuple(seen[b] for b in self.blocks))

    @property
    def count(self) -> int:
        return len(set(self.blocks))

    def classes(self) -> list:
        out = [[] for _ in range(self.count)]
        for p, b in enumerate(self.blocks):
            out[b].append(p)
        return [tuple(c) for c in out]

    def same(self, p: int, q: int) -> bool:
        return self.blocks[p] == self.blocks[q]

    def refines(self, other: "Partition") -> bool:
        """Every block of ``self`` lies inside a block of ``other``."""
        return all(other.same(c[0], x) for c in self.classes() for x in c)

    @classmethod
    def from_key(cls, keys: Sequence) -> "Partition":
        return cls(tuple(keys))


def bisim_partition(lts: Lts) -> Partition:
    """Coarsest strong bisimulation by signature refinement."""
    blocks = (0,) * lts.n
    count = 1 if lts.n else 0
    while True:
        sigs = [
            (blocks[p], frozenset((a, blocks[t]) for a, t in lts.moves(p)))
            for p in lts.processes
        ]
        new = Partition(tuple(sigs))
        if new.count == count:
            return new
        blocks, count = new.blocks, new.count


def quotient(lts: Lts, partition: Partition) -> Lts:
    b = partition.blocks
    trans = {(b[s], lts.actions[a], b[t]) for s, a, t in lts.transitions}
    return Lts(partition.count, trans, initial=b[lts.initial] if lts.n else 0,
               actions=lts.actions, internal=lts.tau is not None)


def bisim_quotient(lts: Lts):
    """Return ``(quotient system, bisimilarity partition)``."""
    part = bisim_partition(lts)
    return quotient(lts, part), part


def enabledness_partition(lts: Lts) -> Partition:
    return Partition.from_key([lts.enabled_ids(p) for p in lts.processes])
