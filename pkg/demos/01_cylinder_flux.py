# # Flux of a cylinder through three routes

# The unit cylinder has H = 1/2.  Its meridian circle carries a period of the
# moment class, which we compute as a moment-form period, as the classical
# conormal flux, and as a capped-disk integral.

import numpy as np

from cmcmoment.calculus import QuadratureSpec, coordinate_u, flat_disk_cap, kks_integral, line_integral
from cmcmoment.forms import family_source, form_evaluator
from cmcmoment.spaceform import KILLING_LABELS, killing_basis, make_spaceform
from cmcmoment.surfaces import make_family

fam = make_family("cylinder", r=1.0)
sf = make_spaceform(0.0)
src = family_source(fam, sf)
Y = killing_basis(sf)
quad = QuadratureSpec(order=16, panels=16)
meridian = coordinate_u(0.0)

# Periods against all six Killing fields.  Only the axial translation
# (index 5) sees the cylinder's force.

moment = line_integral(form_evaluator(sf, src, "moment_classical", Y), meridian, quad)
for label, val in zip(KILLING_LABELS, moment.value):
    print(f"{label:8s} {val: .15f}")

# The conormal flux along the axis, and the capped-disk route with a flat
# disk spanning the circle.

flux = line_integral(form_evaluator(sf, src, "flux"), meridian, quad).value[2]
cap = flat_disk_cap((0.0, 0.0, 0.0), 1.0, 2)
kks = kks_integral(sf, src, meridian, Y[5], fam.H, cap, quad)
print("moment form  ", moment.value[5])
print("conormal flux", flux)
print("capped disk  ", kks)
print("pi           ", np.pi)
