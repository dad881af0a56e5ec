"""Whitney numbers of small matroids, and where Ingleton's inequality breaks.

Run: python demos/whitney_numbers.py
"""

from whitney import catalog, char_poly, is_log_concave
from whitney.arrangement import c_relation, transverse_planes
from whitney.matroid import ingleton_check

print("Characteristic polynomials and Whitney numbers of the first kind\n")
for name in ["uniform(2,3)", "uniform(3,6)", "boolean(4)", "graphic-complete(4)", "fano", "vamos"]:
    M = catalog(name)
    chi, psi, gamma = char_poly(M)
    g = ", ".join(str(x) for x in gamma)
    print(f"{name:22s} chi = {chi}")
    print(f"{'':22s} gamma = ({g})  log-concave: {is_log_concave(gamma)}")

# Every matroid above has log-concave Whitney numbers, but only some of
# them come from linear algebra.  Ingleton's inequality holds for every
# representable matroid, so one violation rules representability out.
print("\nIngleton's inequality")
for name in ["uniform(2,4)", "boolean(4)", "graphic-complete(4)", "vamos"]:
    res = ingleton_check(catalog(name))
    verdict = "holds" if res.satisfied else f"violated at {res.witness_labels(catalog(name))}"
    print(f"  {name:20s} {verdict}")

# Codimension-2 subspaces carry matroids too: three planes in R^4 meeting
# pairwise only at the origin give U(2,3), with lambda replaced by lambda^2.
rep = c_relation(transverse_planes(), 2)
print("\nThree transverse planes in R^4")
print(f"  arrangement polynomial   {rep.absolute}")
print(f"  psi(U23; lambda^2)       {rep.predicted_absolute}")
