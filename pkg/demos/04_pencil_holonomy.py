# # Holonomy of the pencil d + t eta

# On a CMC surface the connection d + t eta is flat for every t, so its
# holonomy around a contractible loop is the identity.  On a perturbed
# cylinder it is not.

import numpy as np

from cmcmoment.calculus import holonomy, square
from cmcmoment.forms import family_source
from cmcmoment.spaceform import make_spaceform
from cmcmoment.surfaces import make_family

sf = make_spaceform(0.0)
loop = square((0.8, 0.3), 0.3)
ts = [0.5, 1.0, 2.0]
for kind, params in [("cylinder", {}), ("unduloid", {}), ("perturbed_cylinder", {"eps": 0.1})]:
    fam = make_family(kind, **params)
    Ms = holonomy(sf, family_source(fam, sf), ts, loop, h=1e-3)
    dev = [np.linalg.norm(M - np.eye(5)) for M in Ms]
    print(f"{kind:20s}", "  ".join(f"t={t}: {d:.2e}" for t, d in zip(ts, dev)))
