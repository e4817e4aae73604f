"""
User functions from text
========================

Expressions in ``x`` and ``y`` are parsed into a small tree and compiled to
a vectorized function.  Without analytic partials, variations come from
finite differences.
"""

import math

from bicheb import ParseError, ast_to_function, finite_difference_partial, parse_expression, vitali_variation
from bicheb.expr import to_text
from bicheb.variation import VariationNotConverged

ast = parse_expression("abs(x - 0.3) * exp(-y^2)")
print(to_text(ast))
f = ast_to_function(ast)
print("f(0.5, 0.5) =", f(0.5, 0.5))

try:
    parse_expression("x**2")
except ParseError as err:
    print("rejected:", err)

# %%
# V_00 of x*y is pi^2: the mixed partial is 1 everywhere
g = ast_to_function(parse_expression("x*y"))
print("V_00(xy) =", vitali_variation(finite_difference_partial(g, 1, 1)), " pi^2 =", math.pi**2)

# %%
# A partial that blows up at the edge gives a variation that keeps growing
# as the grid is refined.  That is reported, not silently returned.
h = ast_to_function(parse_expression("x * y / ((1 - x^2) * (1 - y^2))"))
try:
    vitali_variation(finite_difference_partial(h, 1, 1), n=64)
    print("converged")
except VariationNotConverged as err:
    print("not converged:", err)
