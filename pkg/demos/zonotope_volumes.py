"""Intrinsic volumes of zonotopes, exactly and by Monte Carlo.

Run: python demos/zonotope_volumes.py
"""

from fractions import Fraction

import numpy as np

from whitney.arrangement import coordinate, generic_central
from whitney.convexbody import (
    Discotope,
    Zonotope,
    discotope_of,
    estimate_intrinsic_volumes_mc,
    wills_del_contr_residual,
    zonotope_intrinsic_volumes,
)

# The unit cube is the zonotope of the coordinate hyperplanes, and its
# Wills polynomial is the arrangement's absolute characteristic polynomial.
for d in (2, 3, 5):
    W = zonotope_intrinsic_volumes(Zonotope.cube(d)).poly()
    print(f"cube d={d}: Wills = {W}   arrangement = {coordinate(d).absolute()}")

# A hexagon: three unit segments in the plane.  Square roots of Gram
# determinants that are not rational squares are evaluated at 106 bits.
hexagon = Zonotope([[1, 0], [0, 1], [1, 1]])
for method in ("subset", "belt"):
    nu = zonotope_intrinsic_volumes(hexagon, method).as_floats()
    print(f"hexagon ({method}): nu = {np.round(nu, 12).tolist()}")
print("deletion-contraction residual:",
      [float(x) for x in wills_del_contr_residual(hexagon, 2)])

# Generic lines give a zonotope whose Wills coefficients differ from the
# Whitney numbers (1, 3, 2) of U(2,3): the shape depends on the angles.
Z = discotope_of(generic_central(3, 2)).to_zonotope()
print("zonotope of 3 lines:", np.round(zonotope_intrinsic_volumes(Z).as_floats(), 4).tolist(),
      " psi:", generic_central(3, 2).absolute())

# Monte Carlo: hit-or-miss volumes of D + lambda B fitted by a Steiner polynomial.
for D, label in [(Discotope.from_zonotope(Zonotope.cube(3)), "cube"),
                 (discotope_of(generic_central(3, 3)), "3 planes")]:
    res = estimate_intrinsic_volumes_mc(D, N=50_000, seed=1)
    print(f"MC {label}: nu = {np.round(res.nu, 3).tolist()} +- {np.round(res.nu_se, 3).tolist()}")
exact = zonotope_intrinsic_volumes(discotope_of(generic_central(3, 3)).to_zonotope()).as_floats()
print(f"exact 3 planes: {np.round(exact, 3).tolist()}")
print("segment of length 3:", zonotope_intrinsic_volumes(Zonotope([[Fraction(3, 2)]])).nu)
