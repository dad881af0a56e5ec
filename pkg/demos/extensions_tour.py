"""Growing an arrangement: trivial, large-product and semiflexible extensions.

Run: python demos/extensions_tour.py
"""

from fractions import Fraction

from whitney.arrangement import generic_central, single
from whitney.extensions import (
    composite_sfe,
    flex_limit_probe,
    large_product_ext,
    semiflex_recurrence_residual,
    semiflexible_ext,
)

A = generic_central(2, 2)
print("A = two lines through 0 in R^2, psi(A) =", A.absolute())

# Large products: k new directions, h parallel hyperplanes each.  Every
# direction multiplies psi by (lambda + h).
for k in (1, 2):
    B, rec = large_product_ext(A, k, 3, seed=0)
    print(f"Pr_{k},3: {len(B)} elements in R^{B.ambient_d}, psi = {B.absolute()}")
    print(f"   directions {rec.directions}")

# Semiflexible: element 0 is tilted into the span of its normal and the new directions.
for h in (4, 16, 64):
    S, _ = semiflexible_ext(A, 0, 1, h, seed=0)
    print(f"Sf_1,{h}: psi / h = {S.absolute().scale(Fraction(1, h))}")
rows = flex_limit_probe(A, 0, 1, [4, 16, 64])
print("deviation from psi(A) by coefficient:", [[str(x) for x in r.deviation] for r in rows])

# The three-term recurrence for semiflexible extensions holds for two
# lines but not for three concurrent ones.
for n in (2, 3):
    res = semiflex_recurrence_residual(generic_central(n, 2), 0, 1, 2, seed=0)
    print(f"{n} lines, k=1, h=2: recurrence residual = {res.normalized}")

C, rec = composite_sfe(single(1), [0], 1, 2, 1, seed=0)
print(f"composite of a point in R^1 (k=1, h=2, ell=1): {len(C)} elements in R^{C.ambient_d},"
      f" psi = {C.absolute()}")
