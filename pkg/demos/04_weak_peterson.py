"""
Weak equivalences on a mutual exclusion protocol
================================================

Peterson's algorithm against a mutex specification.  Internal steps are
saturated first, so strong notions on the result are their weak versions.
Takes about ten seconds.
"""

import time
from importlib.resources import files

from eqspectre.hml import render
from eqspectre.lts import bisim_quotient, read_aut, read_names, saturate_weak
from eqspectre.spectroscopy import spectroscope

data = files("eqspectre") / "data"
lts = read_aut(data / "peterson.aut")
ids = read_names(data / "peterson.names")
print("states:", lts.n, "transitions:", len(lts.transitions))

# saturate, then shrink by bisimilarity (budgets do not change)
weak, part = bisim_quotient(saturate_weak(lts))
print("after weak saturation and quotient:", weak.n, "states")
pe, mx = part.blocks[ids["Pe"]], part.blocks[ids["Mx"]]

t = time.perf_counter()
v = spectroscope(weak, pe, mx)
print(f"solved in {time.perf_counter() - t:.1f} s over {v.stats['positions']} positions")
print("equivalent under:", v.equivalences)

# mutually similar, yet not bisimilar; here is why
for notion in ("B", "RS", "F"):
    phi = v.certificates_pq.get(notion) or v.certificates_qp.get(notion)
    if phi is not None:
        print(f"{notion:>3}: {render(phi)}")
