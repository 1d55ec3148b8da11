"""
Spectroscopy of two processes
=============================

One game solve decides every notion of the spectrum for a pair, and the
attacker's winning strategies turn into distinguishing formulas.
"""

from importlib.resources import files

from eqspectre.energy import format_energy
from eqspectre.hml import render
from eqspectre.lts import read_aut, read_names
from eqspectre.spectroscopy import format_position, root, solve, spectroscope

data = files("eqspectre") / "data"
lts = read_aut(data / "fig3.aut")
ids = read_names(data / "fig3.names")
names = {v: k for k, v in ids.items()}
S, S1 = ids["S"], ids["S'"]

# the verdict in both directions
v = spectroscope(lts, S, S1)
print("S <= S':", v.preorders_pq)
print("S' <= S:", v.preorders_qp)
print("equivalent under:", v.equivalences)

# minimal attacker budgets at the root
for e in v.budgets_pq:
    print("attacker wins S vs S' from", format_energy(e))

# one cheapest certificate per failing notion
for notion, phi in v.certificates_pq.items():
    print(f"  {notion:>3}: {render(phi)}")
for notion, phi in v.certificates_qp.items():
    print(f"  {notion:>3} (reverse): {render(phi)}")

# the whole reachable game, with budgets at every position
table = solve(lts, [root(S, S1)])
for pos, budgets in table.items():
    print(f"{format_position(pos, names):<20}", [format_energy(e) for e in budgets])

# the clever variant only tries a handful of conjunction challenges
clever = solve(lts, [root(S, S1)], "clever")
print("positions full/clever:", len(table), len(clever))
