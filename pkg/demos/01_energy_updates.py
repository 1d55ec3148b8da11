"""
Energy updates and antichains
=============================

Budgets in the spectroscopy game are 6-dimensional vectors over the naturals
with infinity.  Moves carry updates that only ever decrease a budget.
"""

from eqspectre.energy import (INF, apply_update, complement_antichain, combine_sup,
                              format_energy, format_update, invert_update, normalize_min,
                              parse_update)

# an update mixes no-ops, decrements and "take the minimum of" components
u = parse_update("min{1,3}, min{1,2}, -1, -1")
print("update:", format_update(u))

# applying it to a budget
e = (4, 4, 3, 2)
print(format_energy(e), "->", format_energy(apply_update(e, u)))

# the inverse gives the least budget whose image covers the target
print("least budget reaching (3,4,0,1):", format_energy(invert_update((3, 4, 0, 1), u)))

# an update that would drive a component below zero is illegal
print("illegal:", apply_update((0, 3), (-1, 0)))

# upward-closed sets are stored by their minimal elements
mins = normalize_min([(1, 2), (2, 1), (2, 2), (3, 3)])
print("minimal antichain:", mins)

# intersecting two upward-closed sets
print("sup-combination:", combine_sup([(1, 0)], [(0, 1)]))

# the complement of an upward-closed set is downward closed; these are its maximal points
for m in complement_antichain([(2, 2, 0, 0, 1, 1)]):
    print("  outside when below", format_energy(m))
print("INF prints as", format_energy((INF, 0)))
