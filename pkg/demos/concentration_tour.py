"""Concentration of measure, from the sphere to random zonotopes.

Run: python demos/concentration_tour.py
"""

import numpy as np

from whitney.arrangement import generic_central
from whitney.concentration import (
    extension_concentration_experiment,
    levy_demo,
    orthogonal_concentration_demo,
    uniform_matroid_experiment,
)

print("Hemisphere neighbourhoods on S^50 (empirical vs lower bound)")
for r in levy_demo(50, [0.1, 0.2, 0.3, 0.4, 0.5], 100_000, seed=0):
    print(f"  eps={r.eps:.1f}  {r.empirical:.4f} >= {r.bound:.4f}")

print("\nNeighbourhood of a great subsphere of codimension 1, eps = 0.3")
for d in (20, 40, 80):
    print(f"  d={d}: {orthogonal_concentration_demo(d, 1, 0.3, 20_000, seed=d):.4f}")

# Four random unit segments in high dimension are nearly orthogonal, so
# the zonotope looks like a 4-cube and nu_i approaches C(4, i).
rep = uniform_matroid_experiment(4, [8, 16, 64], 40, seed=0)
print("\nRandom 4-segment zonotopes: mean nu (std)")
for d, st in rep.stats.items():
    print(f"  d={d:3d}: {np.round(st.mean, 3).tolist()}  ({np.round(st.std, 3).tolist()})")

# The same idea applied to composite extensions of two lines in R^2.
print("\nComposite extensions of two lines, h=3, ell=8 (target 1, 2, 1)")
for k in (1, 2):
    r = extension_concentration_experiment(generic_central(2, 2), k, h=3, ell=8, num_samples=40, seed=0)
    print(f"  k={k}: mean {np.round(r.stats.mean, 3).tolist()}  max deviation {r.max_deviation:.3f}")
