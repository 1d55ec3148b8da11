"""Energy vectors, declining updates and antichains.

Energies are plain tuples.  Components are non-negative ints, or ``INF``
(``math.inf``) for extended energies.  Mixing ints and ``inf`` is fine for
comparison, ``max``/``min`` and ``inf - 1 == inf``.

An update vector is a tuple whose components are ``0``, ``-1`` or a
:class:`MinOf` naming the (0-based) dimensions to take the minimum over.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Union

INF = math.inf

Energy = tuple
Antichain = tuple


@dataclass(frozen=True)
class MinOf:
    """Update component ``min_D``: replace by the minimum over ``dims``."""

    dims: tuple

    def __post_init__(self):
        if not self.dims:
            raise ValueError("min_D needs a nonempty index set")
        object.__setattr__(self, "dims", tuple(sorted(set(self.dims))))

    def __str__(self):
        return "min{%s}" % ",".join(str(d + 1) for d in self.dims)


UpdateComponent = Union[int, MinOf]


def check_update(u: Sequence[UpdateComponent]) -> tuple:
    """Validate an update vector and return it as a tuple."""
    u = tuple(u)
    for k, c in enumerate(u):
        if isinstance(c, MinOf):
            if k not in c.dims:
                raise ValueError(f"component {k + 1}: {c} must contain its own index")
            if max(c.dims) >= len(u):
                raise ValueError(f"component {k + 1}: {c} out of range")
        elif c not in (0, -1):
            raise ValueError(f"component {k + 1}: {c!r} is neither 0, -1 nor min_D")
    return u


_MIN_RE = re.compile(r"min\s*\{([\d\s,]*)\}")


def parse_update(text: str) -> tuple:
    """Parse ``"min{1,3}, min{1,2}, -1, -1"`` (1-based dimension indices)."""
    parts, depth, cur = [], 0, ""
    for ch in text.strip().strip("()"):
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    comps = []
    for part in parts:
        part = part.strip()
        m = _MIN_RE.fullmatch(part)
        if m:
            comps.append(MinOf(tuple(int(d) - 1 for d in m.group(1).split(","))))
        else:
            comps.append(int(part))
    return check_update(comps)


def format_update(u: Sequence[UpdateComponent]) -> str:
    return "(" + ",".join(str(c) for c in u) + ")"


def zero(n: int = 6) -> Energy:
    return (0,) * n


def top(n: int = 6) -> Energy:
    return (INF,) * n


def _check_dims(e, f):
    if len(e) != len(f):
        raise ValueError(f"dimension mismatch: {len(e)} vs {len(f)}")


def leq(e: Energy, f: Energy) -> bool:
    """Componentwise ``e <= f``."""
    _check_dims(e, f)
    return all(a <= b for a, b in zip(e, f))


# Unchecked variant for hot loops.
def _leq(e, f):
    for a, b in zip(e, f):
        if a > b:
            return False
    return True


def sup(es: Iterable[Energy], dim: int | None = None) -> Energy:
    """Componentwise supremum.

    An empty input needs ``dim`` and yields the zero vector.
    """
    es = list(es)
    if not es:
        if dim is None:
            raise ValueError("sup of an empty set needs an explicit dimension")
        return zero(dim)
    n = len(es[0])
    for e in es:
        _check_dims(es[0], e)
    return tuple(max(e[i] for e in es) for i in range(n))


def inf(es: Iterable[Energy]) -> Energy:
    es = list(es)
    if not es:
        raise ValueError("inf of an empty set is undefined")
    for e in es:
        _check_dims(es[0], e)
    return tuple(min(e[i] for e in es) for i in range(len(es[0])))


least_upper_bound = sup
greatest_lower_bound = inf


@lru_cache(maxsize=None)
def compile_apply(u: tuple):
    """Return a fast ``e -> upd(e, u)`` function (``None`` when illegal)."""
    n = len(u)
    plan = []
    for c in u:
        if isinstance(c, MinOf):
            plan.append(("min", c.dims))
        else:
            plan.append(("add", c))

    def apply(e):
        out = [0] * n
        for k, (kind, arg) in enumerate(plan):
            if kind == "add":
                v = e[k] + arg
                if v < 0:
                    return None
                out[k] = v
            else:
                out[k] = min(e[d] for d in arg)
        return tuple(out)

    return apply


@lru_cache(maxsize=None)
def compile_invert(u: tuple):
    """Return a fast ``e' -> upd^-1(e', u)`` function."""
    n = len(u)
    shifts = tuple(0 if isinstance(c, MinOf) else -c for c in u)
    mins = tuple((k, c.dims) for k, c in enumerate(u) if isinstance(c, MinOf))

    def invert(e):
        out = [e[k] + shifts[k] for k in range(n)]
        for k, dims in mins:
            v = e[k]
            for j in dims:
                if out[j] < v:
                    out[j] = v
        return tuple(out)

    return invert


def apply_update(e: Energy, u: Sequence[UpdateComponent]) -> Energy | None:
    """Apply ``u`` to ``e``; ``None`` signals an illegal (negative) result."""
    u = check_update(u)
    _check_dims(e, u)
    return compile_apply(u)(tuple(e))


def invert_update(e: Energy, u: Sequence[UpdateComponent]) -> Energy:
    """Least energy ``x`` with ``e <= upd(x, u)``."""
    u = check_update(u)
    _check_dims(e, u)
    return compile_invert(u)(tuple(e))


def normalize_min(es: Iterable[Energy]) -> Antichain:
    """Minimal elements, sorted lexicographically."""
    items = sorted(set(map(tuple, es)))
    out = []
    for e in items:
        # Lexicographic order: anything below e comes earlier.
        if not any(_leq(m, e) for m in out):
            out.append(e)
    return tuple(out)


def normalize_max(es: Iterable[Energy]) -> Antichain:
    """Maximal elements, sorted lexicographically."""
    items = sorted(set(map(tuple, es)), reverse=True)
    out = []
    for e in items:
        if not any(_leq(e, m) for m in out):
            out.append(e)
    return tuple(sorted(out))


def dominated_by(ac: Iterable[Energy], e: Energy) -> bool:
    """True iff ``e`` lies in the upward closure of ``ac``."""
    return any(_leq(m, e) for m in ac)


def below(ac: Iterable[Energy], e: Energy) -> bool:
    """True iff ``e`` lies in the downward closure of ``ac``."""
    return any(_leq(e, m) for m in ac)


def combine_sup(a: Antichain, b: Antichain) -> Antichain:
    """Min of all pairwise suprema: the upward closure of ``a`` meet ``b``."""
    return normalize_min(tuple(map(max, x, y)) for x in a for y in b)


def complement_antichain(mn: Iterable[Energy], dim: int | None = None) -> Antichain:
    """Maximal extended energies outside the upward closure of ``mn``.

    The result is an antichain whose downward closure is exactly the
    complement of ``mn``'s upward closure.  It is built as an intersection:
    the complement of one element's upset is the union of half-spaces
    ``e_i <= m_i - 1``, and downsets are intersected by pairwise infima.
    """
    mn = normalize_min(mn)
    if not mn:
        if dim is None:
            dim = 6
        return (top(dim),)
    n = len(mn[0])
    current = [top(n)]
    for m in mn:
        halves = []
        for i, v in enumerate(m):
            if v >= 1:
                h = [INF] * n
                h[i] = v - 1
                halves.append(tuple(h))
        current = normalize_max(tuple(map(min, d, h)) for d in current for h in halves)
        if not current:
            return ()
    return tuple(current)


def cap(e: Energy, k: int) -> Energy:
    """Flatten ``e`` into the grid ``{0..k}^N``."""
    if k < 1:
        raise ValueError("cap bound must be at least 1")
    return tuple(v if v <= k else k for v in e)


def to_json(e: Energy) -> list:
    return ["inf" if v == INF else int(v) for v in e]


def from_json(xs: Sequence) -> Energy:
    return tuple(INF if v == "inf" else int(v) for v in xs)


def format_energy(e: Energy) -> str:
    return "(" + ",".join("∞" if v == INF else str(v) for v in e) + ")"
