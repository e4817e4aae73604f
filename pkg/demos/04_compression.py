"""
Dropping coefficients with a certificate
========================================

Any coefficient whose decay bound is below ``eps`` can be zeroed before it
is even computed.  Each dropped entry costs at most ``4 * bound`` in L1, so
the total damage is known in advance.
"""

import math

import numpy as np

from bicheb import SmoothnessClass, VariationBundle, exact_coeffs_oracle
from bicheb.compression import compression_report, threshold_by_bound, threshold_by_magnitude

f = lambda x, y: np.abs(x) * np.abs(y)
C = exact_coeffs_oracle(f, 32, 32)
bundle = VariationBundle(math.pi**2, 2 * math.pi, 2 * math.pi)

for eps in (1e-1, 3e-2, 1e-2):
    S = threshold_by_bound(C, SmoothnessClass(0, 0), bundle, eps)
    r = compression_report(S, f)
    print(f"bound     eps={eps:<5g} kept {r['kept_count']:4d}/{r['total_count']}  "
          f"budget {r['budget']:.3e}  measured {r['measured_l1_vs_dense']:.3e}")

# %%
# Thresholding on the actual magnitudes keeps far fewer entries, but needs
# the coefficients first.  Its budget is 4 * sum |dropped|.
for eps in (1e-3, 1e-4):
    S = threshold_by_magnitude(C, eps)
    r = compression_report(S, f)
    print(f"magnitude eps={eps:<5g} kept {r['kept_count']:4d}/{r['total_count']}  "
          f"budget {r['budget']:.3e}  measured {r['measured_l1_vs_dense']:.3e}")
