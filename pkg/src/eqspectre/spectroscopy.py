"""The spectroscopy energy game and what can be read off its budgets."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

from .egame import BudgetTable, ResourceLimitExceeded, solve_winning_budgets
from .energy import (INF, MinOf, compile_apply, compile_invert, complement_antichain,
                     format_energy, normalize_min, to_json)
from .hml import SPECTRUM, Conj, Formula, Neg, Observe, clever_compatible, lookup, render
from .lts import Lts, Partition, enabledness_partition, process_set, step_set

log = logging.getLogger(__name__)


class AttackerPos(NamedTuple):
    p: int
    Q: tuple


class ClausePos(NamedTuple):
    p: int
    q: int


class DefenderPos(NamedTuple):
    p: int
    Q: tuple
    Qstar: tuple


OBSERVATION = (-1, 0, 0, 0, 0, 0)
CHALLENGE = (0, -1, 0, 0, 0, 0)
REVIVAL = (MinOf((0, 2)), 0, 0, 0, 0, 0)
ANSWER = (0, 0, 0, MinOf((2, 3)), 0, 0)
POSITIVE = (MinOf((0, 3)), 0, 0, 0, 0, 0)
NEGATIVE = (MinOf((0, 4)), 0, 0, 0, 0, -1)

VARIANTS = ("full", "clever")


def _subsets(xs):
    for k in range(len(xs) + 1):
        yield from combinations(xs, k)


def _conj_moves(pos, qstars):
    p, Q = pos
    out = []
    for qs in qstars:
        rest = tuple(q for q in Q if q not in qs)
        out.append((CHALLENGE, DefenderPos(p, rest, tuple(qs))))
    return out


def _common_moves(pos, lts):
    """Every move except conjunction challenges."""
    if isinstance(pos, AttackerPos):
        p, Q = pos
        out = []
        for a, targets in lts.out(p).items():
            Q2 = step_set(lts, Q, a)
            for p2 in targets:
                out.append((OBSERVATION, AttackerPos(p2, Q2)))
        return out
    if isinstance(pos, DefenderPos):
        p, Q, Qs = pos
        out = []
        if Qs:
            out.append((REVIVAL, AttackerPos(p, Qs)))
        out.extend((ANSWER, ClausePos(p, q)) for q in Q)
        return out
    if isinstance(pos, ClausePos):
        p, q = pos
        out = [(POSITIVE, AttackerPos(p, (q,)))]
        if p != q:
            out.append((NEGATIVE, AttackerPos(q, (p,))))
        return out
    raise TypeError(f"not a spectroscopy position: {pos!r}")


def successors_full(pos, lts: Lts) -> list:
    moves = _common_moves(pos, lts)
    if isinstance(pos, AttackerPos):
        moves.extend(_conj_moves(pos, _subsets(pos.Q)))
    return moves


def clever_challenges(lts: Lts, p: int, Q) -> list:
    """Deduplicated ``Q*`` options of the restricted game."""
    ip = lts.enabled_ids(p)
    options = [
        (),
        tuple(q for q in Q if lts.enabled_ids(q) <= ip),
        tuple(q for q in Q if ip <= lts.enabled_ids(q)),
        tuple(q for q in Q if lts.enabled_ids(q) == ip),
    ]
    seen, out = set(), []
    for o in options:
        if o not in seen:
            seen.add(o)
            out.append(o)
    return out


def successors_clever(pos, lts: Lts) -> list:
    moves = _common_moves(pos, lts)
    if isinstance(pos, AttackerPos):
        moves.extend(_conj_moves(pos, clever_challenges(lts, pos.p, pos.Q)))
    return moves


class SpectroscopyGame:
    """The six-dimensional spectroscopy game over ``lts``."""

    dim = 6

    def __init__(self, lts: Lts, variant: str = "full"):
        if variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        self.lts = lts
        self.variant = variant
        self._succ = successors_clever if variant == "clever" else successors_full

    def is_defender(self, pos) -> bool:
        return isinstance(pos, DefenderPos)

    def successors(self, pos) -> list:
        return self._succ(pos, self.lts)


def root(p: int, q: int) -> AttackerPos:
    return AttackerPos(p, (q,))


def solve(lts: Lts, roots, variant: str = "full", cap: int | None = None,
          limit_positions: int | None = None, timeout: float | None = None,
          rng=None) -> BudgetTable:
    return solve_winning_budgets(SpectroscopyGame(lts, variant), roots, cap=cap,
                                 limit_positions=limit_positions, timeout=timeout, rng=rng)


def format_position(pos, names=None) -> str:
    def n(x):
        return names[x] if names else str(x)

    def s(xs):
        return "{" + ",".join(n(x) for x in xs) + "}"

    if isinstance(pos, AttackerPos):
        return f"<{n(pos.p)},{s(pos.Q)}>a"
    if isinstance(pos, ClausePos):
        return f"<{n(pos.p)},{n(pos.q)}>and"
    return f"({n(pos.p)},{s(pos.Q)},{s(pos.Qstar)})d"


# -- verdicts ---------------------------------------------------------------

def derive_preorders(budgets) -> list:
    """Notions ``X`` with no minimal attacker budget below ``e_X``."""
    from .energy import dominated_by
    return [n.name for n in SPECTRUM if not dominated_by(budgets, n.coordinate)]


def finest_distinctions(budgets_pq, budgets_qp):
    """Maximal defender budgets for both directions at once."""
    return complement_antichain(normalize_min(tuple(budgets_pq) + tuple(budgets_qp)))


class NotWinning(ValueError):
    pass


def _finite(e):
    return all(v != INF for v in e)


def strategy_formula(table: BudgetTable, pos, e, strict: bool = False) -> Formula:
    """A distinguishing formula built along an attacker strategy winning at ``e``.

    At clause and revival positions an observation is preferred.  Some
    winning budgets admit no observation there (a negated clause may have
    to be a conjunction, e.g. ``¬⋀{¬<a>T}`` when positive clauses are
    unaffordable); unless ``strict``, a conjunction is accepted then.
    All choices are deterministic: least inverted budget, then position order.
    """
    if table.capped:
        raise ValueError("strategy formulas need an exact (uncapped) budget table")
    game = table.game
    lts = game.lts
    budgets = table[pos]
    e = tuple(e)
    if not _finite(e):
        below = [m for m in budgets if all(a <= b for a, b in zip(m, e))]
        if not below:
            raise NotWinning(f"{e} is not attacker-winning at {pos}")
        e = min(below)
    from .energy import dominated_by
    if not dominated_by(budgets, e):
        raise NotWinning(f"{format_energy(e)} is not attacker-winning at {pos}")

    index = {g: i for i, g in enumerate(table.positions)}
    memo: dict = {}

    def winning(h, en):
        return en is not None and h in index and dominated_by(table[h], en)

    def key(h, en, u):
        inv = compile_invert(u)
        return (min(inv(m) for m in table[h] if all(a <= b for a, b in zip(m, en))), index[h])

    def attack(p, Q, en, observation_only):
        k = ("a", p, Q, en, observation_only)
        if k in memo:
            return memo[k]
        memo[k] = None
        cands = []
        e_obs = compile_apply(OBSERVATION)(en)
        if e_obs is not None:
            for a, targets in lts.out(p).items():
                Q2 = step_set(lts, Q, a)
                for p2 in targets:
                    h = AttackerPos(p2, Q2)
                    if winning(h, e_obs):
                        cands.append((key(h, e_obs, OBSERVATION), "obs", lts.actions[a], h, e_obs))
        if not observation_only:
            e_conj = compile_apply(CHALLENGE)(en)
            if e_conj is not None:
                for u, h in game.successors(AttackerPos(p, Q)):
                    if isinstance(h, DefenderPos) and winning(h, e_conj):
                        cands.append((key(h, e_conj, CHALLENGE), "conj", None, h, e_conj))
        cands.sort(key=lambda c: c[0])
        result = None
        for _, kind, label, h, en2 in cands:
            if kind == "obs":
                child = attack(h.p, h.Q, en2, False)
                if child is not None:
                    result = Observe(label, child)
            else:
                result = defend(h, en2)
            if result is not None:
                break
        memo[k] = result
        return result

    def defend(h, en):
        k = ("d", h, en)
        if k in memo:
            return memo[k]
        memo[k] = None
        p, Q, Qs = h
        clauses = []
        e_ans = compile_apply(ANSWER)(en)
        for q in Q:
            c = ClausePos(p, q)
            if not winning(c, e_ans):
                return None
            psi = clause(p, q, e_ans)
            if psi is None:
                return None
            clauses.append(psi)
        if Qs:
            e_rev = compile_apply(REVIVAL)(en)
            target = AttackerPos(p, Qs)
            if not winning(target, e_rev):
                return None
            psi = attack(p, Qs, e_rev, True) or (None if strict else attack(p, Qs, e_rev, False))
            if psi is None:
                return None
            clauses.append(psi)
        result = Conj(tuple(clauses))
        memo[k] = result
        return result

    def clause(p, q, en):
        k = ("c", p, q, en)
        if k in memo:
            return memo[k]
        memo[k] = None
        cands = []
        e_pos = compile_apply(POSITIVE)(en)
        h = AttackerPos(p, (q,))
        if winning(h, e_pos):
            cands.append((key(h, e_pos, POSITIVE), False, h, e_pos))
        if p != q:
            e_neg = compile_apply(NEGATIVE)(en)
            h = AttackerPos(q, (p,))
            if winning(h, e_neg):
                cands.append((key(h, e_neg, NEGATIVE), True, h, e_neg))
        cands.sort(key=lambda c: c[0])
        result = None
        for _, negative, h2, en2 in cands:
            phi = attack(h2.p, h2.Q, en2, True)
            if phi is None and not strict:
                phi = attack(h2.p, h2.Q, en2, False)
            if phi is not None:
                result = Neg(phi) if negative else phi
                break
        memo[k] = result
        return result

    if isinstance(pos, AttackerPos):
        phi = attack(pos.p, pos.Q, e, False)
    elif isinstance(pos, DefenderPos):
        phi = defend(pos, e)
    else:
        phi = clause(pos.p, pos.q, e)
    if phi is None:
        raise RuntimeError(f"no strategy formula found at {pos} for {e}")
    return phi


# -- pair spectroscopy -------------------------------------------------------

@dataclass
class PairVerdict:
    p: int
    q: int
    variant: str
    cap: int | None
    budgets_pq: tuple
    budgets_qp: tuple
    preorders_pq: list
    preorders_qp: list
    equivalences: list
    finest: tuple
    certificates_pq: dict = field(default_factory=dict)
    certificates_qp: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    def holds(self, name: str) -> bool:
        return lookup(name).name in self.equivalences

    def to_json(self, names=None) -> dict:
        def n(x):
            return names[x] if names else x

        return {
            "pair": [n(self.p), n(self.q)],
            "variant": self.variant,
            "mode": "exact" if self.cap is None else "capped",
            "cap": self.cap,
            "budgets": {
                "forward": [to_json(e) for e in self.budgets_pq],
                "backward": [to_json(e) for e in self.budgets_qp],
            },
            "preorders": {"forward": self.preorders_pq, "backward": self.preorders_qp},
            "equivalences": self.equivalences,
            "finest": [to_json(e) for e in self.finest],
            "certificates": {
                "forward": {k: render(v) for k, v in self.certificates_pq.items()},
                "backward": {k: render(v) for k, v in self.certificates_qp.items()},
            },
            "stats": self.stats,
        }


def certificates(table: BudgetTable, pos, budgets) -> dict:
    """Cheapest strategy formula for every notion whose preorder fails."""
    out, cache = {}, {}
    for notion in SPECTRUM:
        below = [m for m in budgets if all(a <= b for a, b in zip(m, notion.coordinate))]
        if not below:
            continue
        m = min(below)
        if m not in cache:
            cache[m] = strategy_formula(table, pos, m)
        out[notion.name] = cache[m]
    return out


def _check_variant(variant, cap, coordinates=None):
    if variant == "clever":
        for notion in SPECTRUM:
            assert clever_compatible(notion.coordinate), notion
    if cap is not None and cap <= 2:
        raise ValueError("cap must exceed the largest finite coordinate (2)")


def spectroscope(lts: Lts, p: int, q: int, variant: str = "full", cap: int | None = None,
                 with_certificates: bool = True, limit_positions: int | None = None,
                 timeout: float | None = None) -> PairVerdict:
    """All spectrum notions relating ``p`` and ``q`` in both directions."""
    _check_variant(variant, cap)
    table = solve(lts, [root(p, q), root(q, p)], variant=variant, cap=cap,
                  limit_positions=limit_positions, timeout=timeout)
    b_pq, b_qp = table[root(p, q)], table[root(q, p)]
    pre_pq, pre_qp = derive_preorders(b_pq), derive_preorders(b_qp)
    certs_pq, certs_qp = {}, {}
    if with_certificates and cap is None:
        certs_pq = certificates(table, root(p, q), b_pq)
        certs_qp = certificates(table, root(q, p), b_qp)
    return PairVerdict(
        p, q, variant, cap, b_pq, b_qp, pre_pq, pre_qp,
        [x for x in pre_pq if x in pre_qp],
        finest_distinctions(b_pq, b_qp),
        certs_pq, certs_qp,
        {k: table.stats[k] for k in ("positions", "moves", "time_s")},
    )


# -- whole systems -----------------------------------------------------------

def _solve_chunk(args):
    lts, pairs, variant, cap, limit_positions, timeout = args
    table = solve(lts, [root(p, q) for p, q in pairs], variant, cap, limit_positions, timeout)
    return {pq: table[root(*pq)] for pq in pairs}, table.stats


class SystemSpectrum:
    """Budgets for every ordered pair of enabledness-equivalent processes.

    Pairs in different enabledness classes are never solved: some action is
    enabled on one side only, so even enabledness equivalence fails.
    """

    def __init__(self, lts: Lts, variant: str = "clever", cap: int | None = 3,
                 limit_positions: int | None = None, timeout: float | None = None,
                 jobs: int = 1, rng=None):
        _check_variant(variant, cap)
        self.lts = lts
        self.variant = variant
        self.cap = cap
        self.enabledness = enabledness_partition(lts)
        self.pairs = [(p, q) for c in self.enabledness.classes() for p in c for q in c if p != q]
        self.table = None
        if jobs > 1 and len(self.pairs) > 1:
            chunks = [self.pairs[i::jobs] for i in range(jobs) if self.pairs[i::jobs]]
            self.budgets = {}
            moves = 0
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                args = [(lts, c, variant, cap, limit_positions, timeout) for c in chunks]
                for budgets, stats in pool.map(_solve_chunk, args):
                    self.budgets.update(budgets)
                    moves += stats["moves"]
            self.stats = {"moves": moves}
        else:
            self.table = solve(lts, [root(p, q) for p, q in self.pairs], variant, cap,
                               limit_positions, timeout, rng=rng)
            self.budgets = {pq: self.table[root(*pq)] for pq in self.pairs}
            self.stats = dict(self.table.stats)

    def solved(self, p: int, q: int) -> bool:
        return p == q or (p, q) in self.budgets

    def budgets_for(self, p: int, q: int):
        if p == q:
            return ()
        return self.budgets.get((p, q))

    def preorders(self, p: int, q: int) -> list | None:
        """Notions preordering ``p`` below ``q``; ``None`` if not solved."""
        b = self.budgets_for(p, q)
        return None if b is None else derive_preorders(b)

    def equivalences(self, p: int, q: int) -> list:
        if not self.enabledness.same(p, q):
            return []
        a, b = self.preorders(p, q), self.preorders(q, p)
        return [x for x in a if x in b]

    def equivalent(self, p: int, q: int, notion: str) -> bool:
        return lookup(notion).name in self.equivalences(p, q)

    def partition(self, notion: str) -> Partition:
        """Classes of the equivalence for ``notion`` (transitive by construction)."""
        name = lookup(notion).name
        blocks = list(range(self.lts.n))
        for c in self.enabledness.classes():
            for i, p in enumerate(c):
                if blocks[p] != p:
                    continue
                for q in c[i + 1:]:
                    if blocks[q] == q and self.equivalent(p, q, name):
                        blocks[q] = p
        return Partition(tuple(blocks))

    def bisimulation_witness(self) -> set:
        """Pairs the defender wins at every budget."""
        rel = {(p, p) for p in self.lts.processes}
        rel.update(pq for pq, b in self.budgets.items() if not b)
        return rel


def check_bisim_witness(lts: Lts, spectrum: SystemSpectrum) -> bool:
    """Self-check that the unboundedly defender-won pairs form a bisimulation."""
    rel = spectrum.bisimulation_witness()
    for p, q in rel:
        if (q, p) not in rel:
            return False
        for a, targets in lts.out(p).items():
            q_targets = lts.out(q).get(a, ())
            for p2 in targets:
                if not any((p2, q2) in rel for q2 in q_targets):
                    return False
    return True


def quotient_partition(lts: Lts, notion: str, variant: str = "clever", cap: int | None = 3,
                       **kwargs) -> Partition:
    """Equivalence classes under a spectrum notion."""
    from .lts import bisim_partition
    name = lookup(notion).name
    if name == "E":
        return enabledness_partition(lts)
    if name == "B":
        return bisim_partition(lts)
    return SystemSpectrum(lts, variant, cap, **kwargs).partition(name)
