# # Periods on an unduloid depend only on homology

# Two neck circles at different heights of a Delaunay unduloid bound an
# annulus, so the moment periods along them agree.  A small contractible
# square has zero period.

import numpy as np

from cmcmoment.calculus import QuadratureSpec, coordinate_u, line_integral, square
from cmcmoment.forms import family_source, form_evaluator
from cmcmoment.spaceform import killing_basis, make_spaceform
from cmcmoment.surfaces import make_family

fam = make_family("unduloid")
sf = make_spaceform(0.0)
src = family_source(fam, sf)
f = form_evaluator(sf, src, "moment_S", killing_basis(sf))
quad = QuadratureSpec(order=16, panels=16)
print(f"H = {fam.H}, arc-length domain {fam.domain[1]}")

for anchor in (0.0, 0.4, 1.3):
    p = line_integral(f, coordinate_u(anchor), quad)
    print(f"circle at v = {anchor:3.1f}:", np.array2string(p.value, precision=12))

# The contractible square encloses no homology.

p = line_integral(f, square((0.5, 0.7), 0.5), quad)
print("square:", np.max(np.abs(p.value)))
