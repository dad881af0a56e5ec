"""Exact subspace arrangements (central or affine), intersection posets,
characteristic polynomials and deletion/contraction.

A subspace is stored as its defining equations ``a . x = b`` in canonical
reduced form (see :mod:`whitney.linalg`); two subspaces are equal exactly
when their equation systems are identical tuples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .exactnum import Poly, rational_str, to_rational
from .matroid import Matroid, ResourceError, bits

DEFAULT_MAX_NODES = 50_000


class Subspace:
    __slots__ = ("ambient", "system")

    def __init__(self, ambient: int, system: tuple):
        self.ambient = ambient
        self.system = system

    @classmethod
    def whole(cls, ambient: int) -> "Subspace":
        return cls(ambient, ())

    @classmethod
    def from_equations(cls, A, b=None) -> "Subspace":
        A = [[to_rational(x) for x in row] for row in A]
        if not A:
            raise ValueError("need at least one equation; use Subspace.whole")
        D = len(A[0])
        b = [Fraction(0)] * len(A) if b is None else [to_rational(x) for x in b]
        sys_ = linalg.reduce_system([row + [bi] for row, bi in zip(A, b)], D)
        if sys_ is None:
            raise ValueError("equations are inconsistent (empty subspace)")
        return cls(D, sys_)

    @classmethod
    def hyperplane(cls, normal, value=0) -> "Subspace":
        return cls.from_equations([list(normal)], [value])

    @classmethod
    def from_basis(cls, basis, offset=None, ambient: int | None = None) -> "Subspace":
        """Subspace spanned by ``basis`` rows, translated by ``offset``."""
        basis = [[to_rational(x) for x in row] for row in basis]
        D = ambient if ambient is not None else (len(basis[0]) if basis else len(offset))
        span = linalg.reduce_system(basis, D) if basis else ()
        normals = linalg.nullspace(span, D)
        if not normals:
            return cls.whole(D)
        off = [Fraction(0)] * D if offset is None else [to_rational(x) for x in offset]
        rhs = [sum(Fraction(a) * x for a, x in zip(n, off)) for n in normals]
        return cls.from_equations([list(n) for n in normals], rhs)

    @property
    def codim(self) -> int:
        return len(self.system)

    @property
    def dim(self) -> int:
        return self.ambient - len(self.system)

    @property
    def is_central(self) -> bool:
        return all(r[self.ambient] == 0 for r in self.system)

    @property
    def normals(self) -> list[tuple]:
        """Integer rows spanning the orthogonal complement of the linear part."""
        return [r[: self.ambient] for r in self.system]

    @property
    def basis(self) -> list[tuple]:
        return linalg.nullspace(tuple(r[: self.ambient] for r in self.system), self.ambient)

    @property
    def offset(self) -> list[Fraction]:
        """Point of the subspace closest to the origin."""
        if not self.system or self.is_central:
            return [Fraction(0)] * self.ambient
        A = self.normals
        y = linalg.solve_gram(A, [r[self.ambient] for r in self.system])
        return [sum(yi * a[j] for yi, a in zip(y, A)) for j in range(self.ambient)]

    def contains(self, other: "Subspace") -> bool:
        """self contains other (other assumed nonempty)."""
        return all(linalg.in_span(other.system, r) for r in self.system)

    def intersect(self, other: "Subspace") -> "Subspace | None":
        sys_ = self.system
        for r in other.system:
            sys_, st = linalg.insert_row(sys_, r, self.ambient)
            if st == "inconsistent":
                return None
        return Subspace(self.ambient, sys_)

    def extend(self, ell: int) -> "Subspace":
        """Product with R^ell (new coordinates appended last)."""
        D = self.ambient
        return Subspace(D + ell, tuple(r[:D] + (0,) * ell + r[D:] for r in self.system))

    def chart(self):
        """(point, directions) parametrising this subspace; deterministic."""
        return linalg.parametrize(self.system, self.ambient)

    def restrict_to(self, H: "Subspace", chart=None) -> "Subspace | None":
        """self intersected with H, written in H's chart coordinates."""
        point, dirs = chart or H.chart()
        m = len(dirs)
        rows = []
        for r in self.system:
            a, b = r[: self.ambient], r[self.ambient]
            new = [sum(ai * w[j] for j, ai in enumerate(a) if ai) for w in dirs]
            rhs = b - sum(ai * point[j] for j, ai in enumerate(a) if ai)
            rows.append(new + [rhs])
        sys_ = linalg.reduce_system(rows, m)
        if sys_ is None:
            return None
        return Subspace(m, sys_)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.ambient == other.ambient and self.system == other.system

    def __hash__(self):
        return hash((self.ambient, self.system))

    def __repr__(self):
        return f"Subspace(dim={self.dim} in R^{self.ambient}, eqs={list(self.system)})"

    def to_json(self) -> dict:
        return {"basis": [[rational_str(x) for x in v] for v in self.basis],
                "offset": [rational_str(x) for x in self.offset]}


class Arrangement:
    def __init__(self, ambient_d: int, elements, c: int | None = None):
        self.ambient_d = ambient_d
        self.elements = tuple(elements)
        self.c = c
        for H in self.elements:
            if H.ambient != ambient_d:
                raise ValueError("element lives in the wrong ambient space")
            if H.dim >= ambient_d:
                raise ValueError("elements must be proper subspaces")
            if c is not None and H.codim != c:
                raise ValueError(f"element of codim {H.codim} in declared {c}-arrangement")
        self._poset = None

    def __len__(self):
        return len(self.elements)

    @property
    def is_central(self) -> bool:
        return all(H.is_central for H in self.elements)

    def poset(self, max_nodes: int = DEFAULT_MAX_NODES) -> "IntersectionPoset":
        if self._poset is None:
            self._poset = intersection_poset(self, max_nodes)
        return self._poset

    def char_poly(self):
        return char_poly_arr(self)

    def absolute(self) -> Poly:
        return char_poly_arr(self)[1]

    def trivial_ext(self, ell: int) -> "Arrangement":
        if ell < 0:
            raise ValueError("ell must be non-negative")
        return Arrangement(self.ambient_d + ell, [H.extend(ell) for H in self.elements], self.c)

    def to_json(self) -> dict:
        out = {"ambient": self.ambient_d,
               "subspaces": [H.to_json() for H in self.elements]}
        if self.c is not None:
            out["c"] = self.c
        return out

    @classmethod
    def from_json(cls, data) -> "Arrangement":
        if isinstance(data, str):
            data = json.loads(data)
        d = int(data["ambient"])
        elems = []
        for s in data["subspaces"]:
            if "equations" in s:
                eqs = s["equations"]
                elems.append(Subspace.from_equations([e[:-1] for e in eqs], [e[-1] for e in eqs]))
            else:
                elems.append(Subspace.from_basis(s.get("basis", []), s.get("offset"), ambient=d))
        c = data.get("c")
        return cls(d, elems, int(c) if c is not None else None)

    def __repr__(self):
        return f"Arrangement(R^{self.ambient_d}, n={len(self.elements)}, c={self.c})"


@dataclass
class IntersectionPoset:
    """Nonempty intersections ordered by reverse inclusion.

    ``masks[i]`` is the set of arrangement elements containing node i (as
    a bitmask); node y lies below node x exactly when masks[y] is a proper
    subset of masks[x].  Node 0 is the ambient space.
    """

    ambient: int
    nodes: list
    masks: list
    mobius: list

    def __len__(self):
        return len(self.nodes)

    @property
    def dims(self) -> list[int]:
        return [self.ambient - len(s) for s in self.nodes]

    def subspace(self, i: int) -> Subspace:
        return Subspace(self.ambient, self.nodes[i])

    def below(self, i: int) -> list[int]:
        m = self.masks[i]
        return [j for j, mj in enumerate(self.masks) if mj != m and mj & m == mj]

    def hasse_edges(self) -> list[tuple[int, int]]:
        """Covering pairs (lower, upper)."""
        N = len(self.nodes)
        below = [0] * N
        for i in range(N):
            bi = 0
            for j in self.below(i):
                bi |= 1 << j
            below[i] = bi
        edges = []
        for i in range(N):
            strict = below[i]
            inner = 0
            for j in bits(strict):
                inner |= below[j]
            for j in bits(strict & ~inner):
                edges.append((j, i))
        return edges

    def is_lattice(self) -> bool:
        """Every pair has a unique least upper and greatest lower bound."""
        ms = self.masks
        N = len(ms)
        for i in range(N):
            for j in range(i + 1, N):
                u = ms[i] | ms[j]
                ups = [k for k in range(N) if ms[k] & u == u]
                if sum(all(ms[k] & ms[l] == ms[k] for l in ups) for k in ups) != 1:
                    return False
                lo = ms[i] & ms[j]
                downs = [k for k in range(N) if ms[k] & lo == ms[k]]
                if sum(all(ms[l] & ms[k] == ms[l] for l in downs) for k in downs) != 1:
                    return False
        return True


def intersection_poset(A: Arrangement, max_nodes: int = DEFAULT_MAX_NODES) -> IntersectionPoset:
    D = A.ambient_d
    elems = [H.system for H in A.elements]
    nodes = [()]
    masks = []
    index = {(): 0}
    i = 0
    while i < len(nodes):
        X = nodes[i]
        mX = 0
        for j, Hs in enumerate(elems):
            Y = X
            for r in Hs:
                Y, st = linalg.insert_row(Y, r, D)
                if st == "inconsistent":
                    Y = None
                    break
            if Y is None:
                continue
            if Y == X:
                # every element is tried against every node, so this is the full mask
                mX |= 1 << j
            elif Y not in index:
                index[Y] = len(nodes)
                nodes.append(Y)
                if len(nodes) > max_nodes:
                    raise ResourceError(f"intersection poset exceeds {max_nodes} nodes")
        masks.append(mX)
        i += 1
    order = sorted(range(len(nodes)), key=lambda k: len(nodes[k]))
    nodes = [nodes[k] for k in order]
    masks = [masks[k] for k in order]
    return IntersectionPoset(D, nodes, masks, _mobius(masks, [len(x) for x in nodes]))


def _mobius(masks: list[int], codims: list[int]) -> list[int]:
    """mu(0, x) by recursion over nodes sorted by codimension."""
    N = len(masks)
    mobius = [0] * N
    if N == 0:
        return mobius
    mobius[0] = 1
    if max(masks).bit_length() < 63:
        ms = np.array(masks, dtype=np.int64)
        cd = np.array(codims)
        mu = np.zeros(N, dtype=object)
        mu[0] = 1
        for x in range(1, N):
            below = np.flatnonzero((cd[:x] < cd[x]) & ((ms[:x] & ms[x]) == ms[:x]))
            mu[x] = -sum(mu[below])
        return [int(v) for v in mu]
    for x in range(1, N):
        mx = masks[x]
        s = 0
        for y in range(x):
            if codims[y] < codims[x]:
                my = masks[y]
                if my & mx == my:
                    s += mobius[y]
        mobius[x] = -s
    return mobius


def char_poly_arr(A: Arrangement):
    """(signed, absolute): sum mu(x) lambda^dim(x) and sum |mu(x)| lambda^dim(x)."""
    P = A.poset()
    D = A.ambient_d
    signed = [0] * (D + 1)
    absolute = [0] * (D + 1)
    for sys_, mu in zip(P.nodes, P.mobius):
        k = D - len(sys_)
        signed[k] += mu
        absolute[k] += abs(mu)
    return Poly(signed), Poly(absolute)


def alternating_poly(A: Arrangement) -> Poly:
    """sum mu(x) (-1)^(d - dim x) lambda^dim(x), the sign-twisted form."""
    P = A.poset()
    D = A.ambient_d
    out = [0] * (D + 1)
    for sys_, mu in zip(P.nodes, P.mobius):
        out[D - len(sys_)] += mu * (-1) ** len(sys_)
    return Poly(out)


def is_c_arrangement(A: Arrangement, c: int) -> bool:
    if not A.is_central:
        raise ValueError("c-arrangement test needs a central arrangement")
    if any(H.codim != c for H in A.elements):
        return False
    return all(len(s) % c == 0 for s in A.poset().nodes)


def matroid_of(A: Arrangement, c: int) -> Matroid:
    """Matroid with rank(S) = codim(intersection of S) / c."""
    if not is_c_arrangement(A, c):
        raise ValueError(f"not a central {c}-arrangement")
    D = A.ambient_d
    elems = [H.system for H in A.elements]
    n = len(elems)

    def codim_of(mask):
        sys_ = ()
        for i in bits(mask):
            for r in elems[i]:
                sys_, _ = linalg.insert_row(sys_, r, D)
        return len(sys_)

    if n <= 12:
        systems = [()] * (1 << n)
        table = [0] * (1 << n)
        for m in range(1, 1 << n):
            top = m.bit_length() - 1
            sys_ = systems[m & ~(1 << top)]
            for r in elems[top]:
                sys_, _ = linalg.insert_row(sys_, r, D)
            systems[m] = sys_
            table[m] = len(sys_) // c
        return Matroid(n, table.__getitem__)
    return Matroid(n, lambda m: codim_of(m) // c)


def delete(A: Arrangement, i: int) -> Arrangement:
    """A \\ H = elements not contained in H (this drops H and its copies)."""
    H = A.elements[i]
    keep = [G for G in A.elements if not H.contains(G)]
    return Arrangement(A.ambient_d, keep, A.c)


def contract(A: Arrangement, i: int) -> Arrangement:
    """A / H in H's echelon chart; empty and repeated intersections dropped."""
    H = A.elements[i]
    chart = H.chart()
    seen = set()
    out = []
    for G in A.elements:
        if H.contains(G):
            continue
        R = G.restrict_to(H, chart)
        if R is None or R.dim == H.dim or R in seen:
            continue
        seen.add(R)
        out.append(R)
    return Arrangement(H.dim, out)


def delete_contract_arr(A: Arrangement, i: int):
    return delete(A, i), contract(A, i)


@dataclass
class DelContrReport:
    absolute: Poly
    signed: Poly
    alternating: Poly

    @property
    def absolute_holds(self) -> bool:
        return self.absolute.is_zero()

    def to_json(self) -> dict:
        return {"absolute_residual": self.absolute.to_json(),
                "signed_residual": self.signed.to_json(),
                "alternating_residual": self.alternating.to_json(),
                "absolute_holds": self.absolute_holds}


def del_contr_residual(A: Arrangement, i: int) -> DelContrReport:
    """Residuals of the three deletion-contraction forms at element i.

    absolute:    psi(A) - psi(A\\H) - psi(A/H)
    signed:      chi(A) - chi(A\\H) + chi(A/H)
    alternating: same as absolute but for the sign-twisted polynomial
    """
    Ad, Ac = delete_contract_arr(A, i)
    s, a = char_poly_arr(A)
    sd, ad = char_poly_arr(Ad)
    sc, ac = char_poly_arr(Ac)
    alt = alternating_poly(A) - alternating_poly(Ad) - alternating_poly(Ac)
    return DelContrReport(a - ad - ac, s - sd + sc, alt)


@dataclass
class CRelationReport:
    absolute: Poly
    signed: Poly
    predicted_absolute: Poly
    predicted_signed: Poly
    literal_exponent_poly: Poly

    @property
    def holds(self) -> bool:
        return self.absolute == self.predicted_absolute and self.signed == self.predicted_signed

    @property
    def literal_exponent_matches(self) -> bool:
        return self.absolute == self.literal_exponent_poly


def c_relation(A: Arrangement, c: int) -> CRelationReport:
    """Compare arrangement polynomials with the matroid's at lambda^c.

    Degree-consistent form: absolute(A) = lambda^(d - c r) psi(M; lambda^c)
    and signed(A) = lambda^(d - c r) chi(M; lambda^c).  The literal
    exponent d - r is returned too so the mismatch can be inspected.
    """
    from .matroid import char_poly

    M = matroid_of(A, c)
    chi, psi, _ = char_poly(M)
    s, a = char_poly_arr(A)
    d, r = A.ambient_d, M.r
    return CRelationReport(
        absolute=a, signed=s,
        predicted_absolute=psi.substitute_power(c).shift(d - c * r),
        predicted_signed=chi.substitute_power(c).shift(d - c * r),
        literal_exponent_poly=psi.substitute_power(c).shift(d - r),
    )


# -- catalog ---------------------------------------------------------------

def coordinate(d: int) -> Arrangement:
    return Arrangement(d, [Subspace.hyperplane([1 if j == i else 0 for j in range(d)])
                           for i in range(d)], c=1)


def generic_central(n: int, d: int) -> Arrangement:
    """n hyperplanes through 0 with moment-curve normals (1, t, ..., t^(d-1))."""
    return Arrangement(d, [Subspace.hyperplane([t ** j for j in range(d)])
                           for t in range(1, n + 1)], c=1)


def braid(m: int) -> Arrangement:
    """x_i = x_j for all i < j in R^m (graphic arrangement of K_m)."""
    hs = []
    for i in range(m):
        for j in range(i + 1, m):
            v = [0] * m
            v[i], v[j] = 1, -1
            hs.append(Subspace.hyperplane(v))
    return Arrangement(m, hs, c=1)


def transverse_planes() -> Arrangement:
    """Three codim-2 planes in R^4 meeting pairwise only at the origin."""
    P1 = Subspace.from_equations([[1, 0, 0, 0], [0, 1, 0, 0]])
    P2 = Subspace.from_equations([[0, 0, 1, 0], [0, 0, 0, 1]])
    P3 = Subspace.from_equations([[1, 0, -1, 0], [0, 1, 0, -1]])
    return Arrangement(4, [P1, P2, P3], c=2)


def single(d: int, c: int = 1) -> Arrangement:
    """One codim-c coordinate subspace of R^d."""
    eqs = [[1 if j == i else 0 for j in range(d)] for i in range(c)]
    return Arrangement(d, [Subspace.from_equations(eqs)], c=c)


def arrangement_catalog() -> dict:
    cat = {f"coordinate({d})": coordinate(d) for d in range(1, 7)}
    for d in range(1, 5):
        for n in range(1, 7):
            cat[f"generic({n},{d})"] = generic_central(n, d)
    cat["braid(4)"] = braid(4)
    return cat
