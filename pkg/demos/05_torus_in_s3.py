# # A product torus in the 3-sphere

# The two generating circles of a CMC torus in S^3 give two independent
# moment periods.  We compare the period built from S with the classical
# moment form and show the q-component is exact.

import numpy as np

from cmcmoment.calculus import QuadratureSpec, family_cycles, line_integral
from cmcmoment.forms import family_source, form_evaluator, pseudosphere_pairing
from cmcmoment.spaceform import KILLING_LABELS, killing_basis, make_spaceform
from cmcmoment.surfaces import make_family

fam = make_family("product_torus_s3", r1=0.6)
sf = make_spaceform(fam.K)
src = family_source(fam, sf)
Y = killing_basis(sf)
quad = QuadratureSpec(order=16, panels=16)
print(f"r1 = 0.6, H = {fam.H:.12f}")

for cyc in family_cycles(fam):
    pS = line_integral(form_evaluator(sf, src, "moment_S", Y), cyc, quad).value
    mf = line_integral(form_evaluator(sf, src, "moment_form"), cyc, quad).value
    pq = line_integral(form_evaluator(sf, src, "eta_q"), cyc, quad).value
    print(cyc.label)
    for label, a, b in zip(KILLING_LABELS, pS, pseudosphere_pairing(sf, mf, Y)):
        print(f"    {label:8s} {a: .12f} {b: .12f}")
    print("    q-component", np.max(np.abs(pq)))
