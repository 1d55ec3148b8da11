"""Hennessy-Milner logic: formulas, semantics and expressiveness prices."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .energy import INF, Energy, dominated_by, leq
from .lts import TAU, Lts


class Formula:
    __slots__ = ()

    def __str__(self):
        return render(self)


@dataclass(frozen=True, eq=True)
class Observe(Formula):
    action: str
    child: Formula


@dataclass(frozen=True, eq=False)
class Neg(Formula):
    child: Formula

    def __eq__(self, other):
        return isinstance(other, Neg) and self.child == other.child

    def __hash__(self):
        return hash(("neg", self.child))


@dataclass(frozen=True, eq=False)
class Conj(Formula):
    """Conjunction; clause order is irrelevant for equality."""

    clauses: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        for c in self.clauses:
            if isinstance(c, Neg):
                if isinstance(c.child, Neg):
                    raise ValueError("double negation is not a clause")
            elif not isinstance(c, (Observe, Conj)):
                raise TypeError(f"not a clause: {c!r}")

    def __eq__(self, other):
        return isinstance(other, Conj) and Counter(self.clauses) == Counter(other.clauses)

    def __hash__(self):
        return hash(("conj", frozenset(Counter(self.clauses).items())))


T = Conj(())


def obs(action: str, child: Formula = T) -> Observe:
    return Observe(action, child)


def conj(*clauses: Formula) -> Conj:
    return Conj(clauses)


def neg(child: Formula) -> Neg:
    return Neg(child)


def is_observation(phi: Formula) -> bool:
    return isinstance(phi, Observe)


# -- semantics --------------------------------------------------------------

def evaluate(lts: Lts, phi: Formula) -> frozenset:
    """The set of processes satisfying ``phi``."""
    everything = frozenset(lts.processes)
    memo: dict = {}

    def ev(f):
        key = id(f)
        hit = memo.get(key)
        if hit is not None:
            return hit[1]
        if isinstance(f, Observe):
            target = ev(f.child)
            a = lts.action_id(f.action)
            if a is None:
                res = frozenset()
            else:
                res = frozenset(p for p in lts.processes
                                if any(t in target for t in lts.out(p).get(a, ())))
        elif isinstance(f, Conj):
            res = everything
            for c in f.clauses:
                if not isinstance(c, Neg):
                    res = res & ev(c)
            for c in f.clauses:
                if isinstance(c, Neg):
                    res = res - ev(c.child)
        elif isinstance(f, Neg):
            res = everything - ev(f.child)
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[key] = (f, res)
        return res

    return ev(phi)


def distinguishes(lts: Lts, phi: Formula, p: int, qs: Iterable[int]) -> bool:
    """True iff ``phi`` holds for ``p`` and for none of ``qs``."""
    sat = evaluate(lts, phi)
    return p in sat and not any(q in sat for q in qs)


# -- prices -----------------------------------------------------------------

def expr_price(phi: Formula) -> Energy:
    """The six-dimensional expressiveness price.

    Dimensions: observation depth, conjunction nesting, depth of the deepest
    positive clause, depth of the other positive clauses, depth of negative
    clauses, negation nesting.
    """
    if isinstance(phi, Observe):
        e = expr_price(phi.child)
        return (1 + e[0],) + e[1:]
    if isinstance(phi, Neg):
        e = expr_price(phi.child)
        return e[:5] + (1 + e[5],)
    if isinstance(phi, Conj):
        prices = [expr_price(c) for c in phi.clauses]
        pos = [i for i, c in enumerate(phi.clauses) if not isinstance(c, Neg)]
        negs = [i for i, c in enumerate(phi.clauses) if isinstance(c, Neg)]
        # R: lowest-index positive clause of maximal observation depth.
        r = None
        if pos:
            deepest = max(prices[i][0] for i in pos)
            r = next(i for i in pos if prices[i][0] == deepest)
        own = (
            0,
            1 + max((e[1] for e in prices), default=0),
            max((prices[i][0] for i in pos), default=0),
            max((prices[i][0] for i in pos if i != r), default=0),
            max((prices[i][0] for i in negs), default=0),
            0,
        )
        return tuple(max(vals) for vals in zip(own, *prices))
    raise TypeError(f"not a formula: {phi!r}")


# -- the spectrum -----------------------------------------------------------

class Notion(NamedTuple):
    name: str
    title: str
    coordinate: Energy


SPECTRUM = (
    Notion("E", "enabledness", (1, 1, 0, 0, 0, 0)),
    Notion("T", "traces", (INF, 1, 0, 0, 0, 0)),
    Notion("F", "failures", (INF, 2, 0, 0, 1, 1)),
    Notion("RV", "revivals", (INF, 2, 1, 0, 1, 1)),
    Notion("IF", "impossible futures", (INF, 2, 0, 0, INF, 1)),
    Notion("PF", "possible futures", (INF, 2, INF, INF, INF, 1)),
    Notion("R", "readiness", (INF, 2, 1, 1, 1, 1)),
    Notion("FT", "failure traces", (INF, INF, INF, 0, 1, 1)),
    Notion("RT", "readiness traces", (INF, INF, INF, 1, 1, 1)),
    Notion("1S", "simulation", (INF, INF, INF, INF, 0, 0)),
    Notion("RS", "ready simulation", (INF, INF, INF, INF, 1, 1)),
    Notion("2S", "2-nested simulation", (INF, INF, INF, INF, INF, 1)),
    Notion("B", "bisimulation", (INF, INF, INF, INF, INF, INF)),
)

# Hasse diagram, coarser -> finer.
SPECTRUM_EDGES = (
    ("E", "T"), ("T", "1S"), ("T", "F"), ("F", "RV"), ("F", "IF"),
    ("RV", "FT"), ("RV", "R"), ("IF", "PF"), ("R", "PF"), ("R", "RT"),
    ("FT", "RT"), ("RT", "RS"), ("1S", "RS"), ("RS", "2S"), ("PF", "2S"),
    ("2S", "B"),
)

_BY_NAME = {n.name: n for n in SPECTRUM}
_ALIASES = {"S": "1S", "sim": "1S", "bisim": "B"}
_ALIASES.update({n.title: n.name for n in SPECTRUM})


def spectrum_coords() -> list:
    return list(SPECTRUM)


def lookup(name: str) -> Notion:
    key = _ALIASES.get(name, name)
    try:
        return _BY_NAME[key]
    except KeyError:
        raise KeyError(f"unknown notion {name!r}") from None


def clever_compatible(e: Energy) -> bool:
    """Whether the restricted conjunction challenges are exact at budget ``e``."""
    e3, e4, e5 = e[2], e[3], e[4]
    return e4 in (0, 1, INF) and e4 <= e3 and (e5 <= 1 or e3 == e4)


def preordered_notions(budgets) -> list:
    """Names of the notions whose coordinate no attacker budget reaches."""
    return [n.name for n in SPECTRUM if not dominated_by(budgets, n.coordinate)]


def finer_or_equal(a: str, b: str) -> bool:
    """``b`` is finer than or equal to ``a`` in the Hasse diagram."""
    return leq(lookup(a).coordinate, lookup(b).coordinate)


# -- text -------------------------------------------------------------------

def _sort_key(c):
    return (isinstance(c, Neg), render(c))


def render(phi: Formula, ascii: bool = False) -> str:
    """Canonical text; clauses sorted, negations last."""
    def label(a):
        if a == TAU and not ascii:
            return "τ"
        return a

    if isinstance(phi, Observe):
        return f"<{label(phi.action)}>{render(phi.child, ascii)}"
    if isinstance(phi, Neg):
        return ("!" if ascii else "¬") + render(phi.child, ascii)
    if isinstance(phi, Conj):
        if not phi.clauses:
            return "T"
        inner = ", ".join(render(c, ascii) for c in sorted(phi.clauses, key=_sort_key))
        return ("/\\{" if ascii else "⋀{") + inner + "}"
    raise TypeError(f"not a formula: {phi!r}")


class FormulaSyntaxError(ValueError):
    pass


def parse_formula(text: str) -> Formula:
    """Parse the canonical rendering (Unicode or ASCII form)."""
    s = text.strip()
    pos = 0

    def skip():
        nonlocal pos
        while pos < len(s) and s[pos].isspace():
            pos += 1

    def expect(tok):
        nonlocal pos
        skip()
        if not s.startswith(tok, pos):
            raise FormulaSyntaxError(f"expected {tok!r} at {pos} in {text!r}")
        pos += len(tok)

    def formula():
        nonlocal pos
        skip()
        if s.startswith("<", pos) or s.startswith("⟨", pos):
            close = ">" if s[pos] == "<" else "⟩"
            end = s.find(close, pos)
            if end < 0:
                raise FormulaSyntaxError(f"unclosed observation at {pos}")
            action = s[pos + 1:end].strip()
            if action in ("τ", "i"):
                action = TAU
            pos = end + 1
            skip()
            if pos < len(s) and (s[pos] in "<⟨T⋀" or s.startswith("/\\", pos)):
                return Observe(action, formula())
            return Observe(action, T)
        if s.startswith("T", pos):
            pos += 1
            return T
        if s.startswith("⋀", pos) or s.startswith("/\\", pos):
            pos += 1 if s[pos] == "⋀" else 2
            expect("{")
            clauses = []
            skip()
            if s.startswith("}", pos):
                pos += 1
                return T
            while True:
                clauses.append(clause())
                skip()
                if s.startswith(",", pos):
                    pos += 1
                    continue
                expect("}")
                return Conj(tuple(clauses))
        raise FormulaSyntaxError(f"unexpected input at {pos} in {text!r}")

    def clause():
        nonlocal pos
        skip()
        if s.startswith("¬", pos) or s.startswith("!", pos):
            pos += 1
            return Neg(formula())
        return formula()

    result = formula()
    skip()
    if pos != len(s):
        raise FormulaSyntaxError(f"trailing input at {pos} in {text!r}")
    return result
