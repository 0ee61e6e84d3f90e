# # Parallel CMC surfaces

# For H^2 + K > 0 the offsets with m^2 - 2 H m - K = 0 are again CMC with the
# same H and Hopf differential and the same moment class.  We check this on a
# torus in the 3-sphere and a tube in hyperbolic space.

from cmcmoment.calculus import family_cycles
from cmcmoment.parallel import m_roots, verify_parallel
from cmcmoment.spaceform import make_spaceform
from cmcmoment.suites import sample_grid
from cmcmoment.surfaces import make_family

for kind, params in [("product_torus_s3", {"r1": 0.6}), ("equidistant_tube_h3", {})]:
    fam = make_family(kind, **params)
    sf = make_spaceform(fam.K)
    U, V = sample_grid(fam, 5)
    roots = m_roots(fam.H, sf.K)
    print(f"{kind}: K = {fam.K}, H = {fam.H:.6f}, roots {roots.roots}")
    for m in roots.roots:
        rep = verify_parallel(sf, fam, m, U, V, family_cycles(fam)[:2])
        for c in rep.checks:
            tag = "info" if c.informational else ("ok" if c.passed else "FAIL")
            print(f"    m = {m: .4f}  {tag:4s} {c.name:28s} {c.residual:.2e}")

# The unscaled conformal relation only holds when H^2 + K = 1, which the
# minimal Clifford torus satisfies.

fam = make_family("product_torus_s3")
sf = make_spaceform(fam.K)
rep = verify_parallel(sf, fam, m_roots(fam.H, sf.K).roots[0], *sample_grid(fam, 5))
print("Clifford torus, unscaled factor:", rep.check("conformal_unscaled").residual)
