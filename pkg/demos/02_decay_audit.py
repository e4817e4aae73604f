"""
How fast do coefficients decay?
===============================

If the mixed partial ``f_{x^(k+1) y^(l+1)}`` has finite weighted variation
``V``, then ``|c_ij|`` is bounded by a product of per-axis factors that
behave like ``i^-(k+1) j^-(l+1)``.  Here we compare the bound with the real
coefficients of two kinked functions.
"""

import math

import numpy as np

from bicheb import SmoothnessClass, VariationBundle, audit_decay, coeff_bound, exact_coeffs_oracle
from bicheb.corpus import get_entry
from bicheb.variation import variation_bundle

# |x||y|: the mixed partial sgn(x)sgn(y) has variation pi^2
f = lambda x, y: np.abs(x) * np.abs(y)
C = exact_coeffs_oracle(f, 32, 32)
print("c22 =", C.entries[2, 2], " 16/(9 pi^2) =", 16 / (9 * math.pi**2))
print("bound at (2, 2):", coeff_bound(SmoothnessClass(0, 0), math.pi**2, 2, 2))

report = audit_decay(C, SmoothnessClass(0, 0), VariationBundle(math.pi**2, 2 * math.pi, 2 * math.pi))
print("violations:", len(report.violations), " largest |c| / bound:", round(report.max_ratio, 4), "at", report.argmax)

# %%
# The variations do not have to be known in advance.  Here they come from
# quadrature of the analytic partials of |x|^3 |y|^3.
entry = get_entry("abs_cubed")
cls = SmoothnessClass(2, 2)
bundle = variation_bundle(entry.partial, cls)
print("V_22 =", bundle.v_kl, " (36 pi^2 =", 36 * math.pi**2, ")")
Cc = exact_coeffs_oracle(entry.f, 48, 48)
report = audit_decay(Cc, cls, bundle)
print("abs_cubed: ok =", report.ok, " max ratio", round(report.max_ratio, 4))

# the bound falls like (ij)^-3; these coefficients fall faster (odd indices vanish)
for i in (4, 8, 16, 32):
    print(f"  i = j = {i:2d}: |c| = {abs(Cc.entries[i, i]):.3e}, bound {coeff_bound(cls, bundle.v_kl, i, i):.3e}")
