"""
Formulas, prices and the spectrum
=================================

Hennessy-Milner formulas are priced by six measures.  Each named
equivalence is the set of formulas whose price stays below a coordinate.
"""

from eqspectre.hml import (SPECTRUM, SPECTRUM_EDGES, conj, evaluate, expr_price, lookup, neg,
                           obs, parse_formula, render)
from eqspectre.lts import TAU, parse_aut

# a formula can be built from combinators or parsed from text
phi = obs(TAU, conj(neg(obs("ec_A"))))
print(render(phi), render(phi, ascii=True))
assert parse_formula("<tau>/\\{!<ec_A>T}") == phi

# its price: observations, conjunction nesting, clause depths, negations
print("price:", expr_price(phi))

# the coordinate table
for notion in SPECTRUM:
    print(f"{notion.name:>3}  {notion.title:<30} {notion.coordinate}")
print("covering edges:", len(SPECTRUM_EDGES))

# phi fits under failures but not under traces
f, t = lookup("F").coordinate, lookup("T").coordinate
price = expr_price(phi)
print("within F:", all(a <= b for a, b in zip(price, f)))
print("within T:", all(a <= b for a, b in zip(price, t)))

# evaluating on a small system
lts = parse_aut("""des (0, 3, 3)
(0, "i", 2)
(0, "ec_A", 2)
(1, "ec_A", 2)
""")
print("satisfied by:", sorted(evaluate(lts, phi)))
