"""Declining energy games and the minimal attacker budget fixed point."""
from __future__ import annotations

import json
import logging
import time
from collections import deque
from typing import Hashable, Iterable, Protocol

from .energy import (Antichain, Energy, cap as cap_energy, combine_sup, compile_invert,
                     dominated_by, format_update, normalize_min, to_json, zero)

log = logging.getLogger(__name__)


class GameGraph(Protocol):
    """What the solver needs from a game."""

    dim: int

    def is_defender(self, pos) -> bool: ...

    def successors(self, pos) -> list:
        """Deterministic, duplicate-free list of ``(update, position)``."""
        ...


class ResourceLimitExceeded(RuntimeError):
    """Position budget or wall-clock limit hit; ``partial`` holds what was known."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ExplicitGame:
    """A finite game given by dictionaries, mostly for tests."""

    def __init__(self, moves: dict, defender: Iterable = (), dim: int | None = None):
        self.moves = {g: list(ms) for g, ms in moves.items()}
        for ms in list(self.moves.values()):
            for _, h in ms:
                self.moves.setdefault(h, [])
        self.defender = frozenset(defender)
        if dim is None:
            dim = next((len(u) for ms in self.moves.values() for u, _ in ms), 1)
        self.dim = dim

    def is_defender(self, pos) -> bool:
        return pos in self.defender

    def successors(self, pos) -> list:
        return self.moves.get(pos, [])


class BudgetTable:
    """Minimal attacker winning budgets for the explored part of a game."""

    def __init__(self, game, positions, owner, succs, budgets, cap, stats):
        self.game = game
        self.positions = positions
        self._index = {g: i for i, g in enumerate(positions)}
        self._owner = owner
        self._succs = succs
        self._budgets = budgets
        self.cap = cap
        self.stats = stats

    def __contains__(self, pos):
        return pos in self._index

    def __getitem__(self, pos) -> Antichain:
        try:
            return self._budgets[self._index[pos]]
        except KeyError:
            raise KeyError(f"position {pos!r} was not solved") from None

    def get(self, pos, default=None):
        i = self._index.get(pos)
        return default if i is None else self._budgets[i]

    def __len__(self):
        return len(self.positions)

    def items(self):
        return zip(self.positions, self._budgets)

    @property
    def capped(self) -> bool:
        return self.cap is not None

    def is_defender(self, pos) -> bool:
        return self._owner[self._index[pos]]

    def moves(self, pos) -> list:
        i = self._index[pos]
        return [(u, self.positions[j]) for u, _, j in self._succs[i]]

    @property
    def move_count(self) -> int:
        return sum(len(s) for s in self._succs)

    def to_json(self) -> dict:
        out = []
        for i, g in enumerate(self.positions):
            out.append({
                "id": i,
                "position": _pos_json(g),
                "owner": "defender" if self._owner[i] else "attacker",
                "moves": [{"update": format_update(u), "to": j} for u, _, j in self._succs[i]],
                "budgets": [to_json(e) for e in self._budgets[i]],
            })
        return {"capped": self.cap, "positions": out}

    def to_dot(self, label=str) -> str:
        rows = ["digraph game {", "  node [fontname=monospace];"]
        for i, g in enumerate(self.positions):
            budgets = "\\n".join(",".join(map(str, to_json(e))) for e in self._budgets[i])
            shape = "ellipse" if self._owner[i] else "box"
            text = json.dumps(f"{label(g)}\\n{budgets}")[1:-1]
            rows.append(f'  n{i} [shape={shape}, label="{text}"];')
        for i, succ in enumerate(self._succs):
            for u, _, j in succ:
                rows.append(f'  n{i} -> n{j} [label="{format_update(u)}"];')
        rows.append("}")
        return "\n".join(rows) + "\n"


def _pos_json(g):
    if isinstance(g, tuple):
        return [_pos_json(x) for x in g]
    return g


def attacker_wins(table: BudgetTable, pos, e: Energy) -> bool:
    """Whether the attacker wins from ``pos`` with initial budget ``e``."""
    return dominated_by(table[pos], e)


def explore(game: GameGraph, roots: Iterable, limit_positions=None, deadline=None):
    """Materialize the part of ``game`` reachable from ``roots``."""
    positions, index, succs = [], {}, []
    queue = deque()
    for r in roots:
        if r not in index:
            index[r] = len(positions)
            positions.append(r)
            queue.append(r)
    while queue:
        g = queue.popleft()
        row = []
        for u, h in game.successors(g):
            j = index.get(h)
            if j is None:
                if limit_positions is not None and len(positions) >= limit_positions:
                    raise ResourceLimitExceeded(
                        f"more than {limit_positions} game positions reachable",
                        {"positions": len(positions)})
                j = index[h] = len(positions)
                positions.append(h)
                queue.append(h)
            row.append((u, compile_invert(tuple(u)), j))
        succs.append(row)
        if deadline is not None and len(succs) % 256 == 1 and time.monotonic() > deadline:
            raise ResourceLimitExceeded("timeout while building the game graph",
                                        {"positions": len(positions)})
    owner = [bool(game.is_defender(g)) for g in positions]
    return positions, owner, succs


def combine_defender(options: list) -> Antichain:
    """Min over all choice functions of the sup of the chosen budgets.

    ``options`` holds one antichain per defender move; folding pairwise
    suprema is equivalent to enumerating all choice functions.
    """
    acc = None
    for opt in options:
        if not opt:
            return ()
        acc = opt if acc is None else combine_sup(acc, opt)
    return acc


def solve_winning_budgets(game: GameGraph, roots: Iterable, cap: int | None = None,
                          limit_positions: int | None = None, timeout: float | None = None,
                          rng=None) -> BudgetTable:
    """Least fixed point of minimal attacker winning budgets.

    ``cap`` flattens every stored energy into ``{0..cap}^N``.  ``rng``
    (a ``random.Random``) randomizes the worklist order; the result does not
    depend on it.
    """
    t0 = time.monotonic()
    deadline = t0 + timeout if timeout is not None else None
    if cap is not None and cap < 1:
        raise ValueError("cap must be at least 1")
    positions, owner, succs = explore(game, roots, limit_positions, deadline)
    n = len(positions)
    dim = game.dim
    preds = [[] for _ in range(n)]
    for i, row in enumerate(succs):
        for _, _, j in row:
            preds[j].append(i)
    preds = [sorted(set(p)) for p in preds]

    budgets: list = [()] * n
    todo = [i for i in range(n) if owner[i] and not succs[i]]
    queued = set(todo)
    fifo = deque(todo)
    updates = 0

    def capped(es):
        if cap is None:
            return es
        return (cap_energy(e, cap) for e in es)

    while queued:
        if rng is not None:
            i = rng.choice(sorted(queued))
        else:
            i = fifo.popleft()
        queued.discard(i)
        row = succs[i]
        if owner[i]:
            if not row:
                new = (zero(dim),)
            else:
                options = [normalize_min(capped(inv(e) for e in budgets[j])) for _, inv, j in row]
                new = combine_defender(options)
        else:
            cands = list(budgets[i])
            for _, inv, j in row:
                cands.extend(capped(inv(e) for e in budgets[j]))
            new = normalize_min(cands)
        if new != budgets[i]:
            budgets[i] = new
            updates += 1
            for k in preds[i]:
                if k not in queued:
                    queued.add(k)
                    if rng is None:
                        fifo.append(k)
            if deadline is not None and updates % 256 == 1 and time.monotonic() > deadline:
                raise ResourceLimitExceeded("timeout while solving",
                                            {"positions": n, "updates": updates})

    stats = {
        "positions": n,
        "moves": sum(len(r) for r in succs),
        "updates": updates,
        "time_s": time.monotonic() - t0,
    }
    log.debug("solved %d positions / %d moves in %.3fs", n, stats["moves"], stats["time_s"])
    return BudgetTable(game, positions, owner, succs, budgets, cap, stats)
