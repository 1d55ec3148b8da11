"""
Quotients of a whole system
===========================

Solving every enabledness-compatible pair at once yields the equivalence
classes of each notion.  Capped budgets (every component at most 3) are
enough for the named notions and keep the antichains small.
"""

import random

from eqspectre.lts import Lts, write_aut
from eqspectre.spectroscopy import SystemSpectrum, check_bisim_witness

rng = random.Random(7)
n = 6
trans = {(rng.randrange(n), rng.choice("ab"), rng.randrange(n)) for _ in range(11)}
lts = Lts(n, sorted(trans))
print(write_aut(lts))

spec = SystemSpectrum(lts, "clever", 3)
for notion in ("E", "T", "F", "1S", "B"):
    part = spec.partition(notion)
    print(f"{notion:>3}: {part.count} classes {part.classes()}")

# pairs won by the defender at every budget must form a bisimulation
print("bisimulation self-check:", check_bisim_witness(lts, spec))
