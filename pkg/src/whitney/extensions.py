"""Trivial, large-product and semiflexible extensions of arrangements.

Random directions are integer vectors, so every extension is an exact
rational arrangement and genericity is certified by exact rank checks
against the intersection poset of what is already present.  Extension
hyperplanes for a direction s are s.x = 1, ..., s.x = h.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from . import linalg
from .arrangement import Arrangement, IntersectionPoset, Subspace, contract, delete
from .convexbody import Discotope, Disk, orthonormal_rows, unit_volume_radius
from .exactnum import Poly, rational_str

DIRECTION_BOUND = 10 ** 4
MAX_RETRIES = 50


class GenericityError(RuntimeError):
    pass


@dataclass
class ExtensionRecord:
    kind: str
    params: dict
    directions: list = field(default_factory=list)
    hyperplane_offsets: list = field(default_factory=list)
    flex_subspace: list | None = None
    seed: object = None
    attempts: int = 0
    steps: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "directions": [list(s) for s in self.directions],
            "hyperplane_offsets": [[rational_str(x) for x in offs] for offs in self.hyperplane_offsets],
            "flex_subspace": None if self.flex_subspace is None else [list(r) for r in self.flex_subspace],
            "seed": self.seed,
            "attempts": self.attempts,
            "steps": [s.to_json() for s in self.steps],
        }

    @classmethod
    def from_json(cls, data) -> "ExtensionRecord":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            kind=data["kind"], params=data["params"],
            directions=[tuple(int(x) for x in s) for s in data["directions"]],
            hyperplane_offsets=[[Fraction(x) for x in offs] for offs in data["hyperplane_offsets"]],
            flex_subspace=None if data.get("flex_subspace") is None
            else [tuple(int(x) for x in r) for r in data["flex_subspace"]],
            seed=data.get("seed"), attempts=data.get("attempts", 0),
            steps=[cls.from_json(s) for s in data.get("steps", [])],
        )


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (list, tuple)):
        return np.random.default_rng(np.random.SeedSequence(list(seed)))
    return np.random.default_rng(seed)


def _sample_integer_vector(rng: np.random.Generator, n: int) -> tuple:
    return tuple(int(x) for x in rng.integers(-DIRECTION_BOUND, DIRECTION_BOUND, size=n, endpoint=True))


def trivial_ext(A: Arrangement, ell: int) -> Arrangement:
    return A.trivial_ext(ell)


# -- genericity certificates -------------------------------------------------

def _node_point(node: tuple, D: int) -> list[Fraction]:
    p = [Fraction(0)] * D
    for r in node:
        q = linalg.pivot_of(r, D)
        p[q] = Fraction(r[D], r[q])
    return p


def direction_is_generic(P: IntersectionPoset, s, offsets) -> bool:
    """Each hyperplane s.x = t (t in offsets) meets every node transversally.

    Positive-dimensional nodes need s outside their normal space; points
    must not lie on any of the hyperplanes.  Together these make the new
    poset the product-like one that a generic choice gives.
    """
    D = P.ambient
    offs = set(Fraction(t) for t in offsets)
    for node in P.nodes:
        if D - len(node) >= 1:
            lin = tuple(r[:D] for r in node)
            if not any(linalg.reduce_against(lin, s)):
                return False
        else:
            p = _node_point(node, D)
            if sum(a * x for a, x in zip(s, p)) in offs:
                return False
    return True


def _generic_rank(rX: int, u: int, c: int, m: int) -> int:
    return rX + c - max(0, c + u - m)


def flex_is_generic(P: IntersectionPoset, W: list, M: list) -> bool:
    """W spans a c-subspace of rowspace(M); check every node meets it generically.

    For a node X with normal space N, a generic c-subspace of an m-dim
    space V meets N in dimension max(0, c + dim(N cap V) - m).  Both the
    linear ranks and the ranks of the homogenized (affine) systems must
    take exactly those values.
    """
    D = P.ambient
    c, m = len(W), linalg.rank(M)
    if linalg.rank(W) != c:
        return False
    Wh = [tuple(r) + (0,) for r in W]
    Mh = [tuple(r) + (0,) for r in M]
    for node in P.nodes:
        lin = [r[:D] for r in node]
        for rows, Wr, Mr in ((lin, W, M), (list(node), Wh, Mh)):
            rX = linalg.rank(rows) if rows else 0
            u = m + rX - linalg.rank(list(Mr) + rows)
            if linalg.rank(rows + list(Wr)) != _generic_rank(rX, u, c, m):
                return False
    return True


# -- extensions ----------------------------------------------------------------

def _add_family(B: Arrangement, s, offsets) -> Arrangement:
    new = [Subspace.hyperplane(s, t) for t in offsets]
    c = B.c if B.c == 1 else None
    return Arrangement(B.ambient_d, list(B.elements) + new, c)


def _large_product(A: Arrangement, k: int, h: int, rng: np.random.Generator):
    B = A.trivial_ext(k)
    D = B.ambient_d
    offsets = [Fraction(j) for j in range(1, h + 1)]
    dirs, offs, attempts = [], [], 0
    for _ in range(k):
        P = B.poset()
        for _try in range(MAX_RETRIES):
            attempts += 1
            s = _sample_integer_vector(rng, D)
            if any(s) and direction_is_generic(P, s, offsets):
                break
        else:
            raise GenericityError(f"no generic direction after {MAX_RETRIES} attempts")
        B = _add_family(B, s, offsets)
        dirs.append(s)
        offs.append(offsets)
    return B, dirs, offs, attempts


def large_product_ext(A: Arrangement, k: int, h: int, seed=0):
    """Pr_{k,h}(A): trivially extend by k and add h parallel hyperplanes
    for each of k generic directions."""
    if k < 0 or h < 1:
        raise ValueError("need k >= 0 and h >= 1")
    B, dirs, offs, attempts = _large_product(A, k, h, _rng(seed))
    rec = ExtensionRecord("large_product", {"k": k, "h": h}, dirs, offs, None, _seed_json(seed), attempts)
    return B, rec


def _seed_json(seed):
    if isinstance(seed, (list, tuple)):
        return [int(x) for x in seed]
    if isinstance(seed, (int, np.integer)):
        return int(seed)
    return None


def semiflexible_ext(A: Arrangement, e: int, k: int, h: int, seed=0):
    """Sf_{k,h}(A, e): in Pr_{k,h}(A), replace H_e by a linear subspace whose
    normal space is a generic c-subspace of normals(H_e) + span(s_1..s_k).

    The new element keeps index e; extension hyperplanes follow the
    original elements.
    """
    if not 0 <= e < len(A):
        raise ValueError("distinguished element out of range")
    He = A.elements[e]
    if not He.is_central:
        raise ValueError("the distinguished element must be a linear subspace")
    rng = _rng(seed)
    B, dirs, offs, attempts = _large_product(A, k, h, rng)
    D = B.ambient_d
    c = He.codim
    M = [tuple(r) for r in B.elements[e].normals] + [tuple(s) for s in dirs]
    rest = Arrangement(D, [G for i, G in enumerate(B.elements) if i != e])
    P = rest.poset()
    for _try in range(MAX_RETRIES):
        attempts += 1
        C = rng.integers(-DIRECTION_BOUND, DIRECTION_BOUND, size=(c, len(M)), endpoint=True)
        W = [tuple(sum(int(C[a, b]) * M[b][j] for b in range(len(M))) for j in range(D)) for a in range(c)]
        if flex_is_generic(P, W, M):
            break
    else:
        raise GenericityError(f"no generic flexible element after {MAX_RETRIES} attempts")
    He_new = Subspace.from_equations([list(r) for r in W])
    elements = list(B.elements)
    elements[e] = He_new
    out = Arrangement(D, elements, B.c)
    rec = ExtensionRecord("semiflexible", {"k": k, "h": h, "e": e}, dirs, offs,
                          [tuple(r) for r in He_new.normals], _seed_json(seed), attempts)
    return out, rec


def composite_sfe(A: Arrangement, order, k: int, h: int, ell: int, seed=0,
                  max_elements: int = 40):
    """T_ell(Sf_{k,h}(...T_ell(Sf_{k,h}(A, e_1))..., e_n)).

    Result: n + n k h elements in dimension d + n (k + ell); element i of
    the result is the semiflexible image of element i of A.
    """
    order = list(order)
    n = len(A)
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of the elements")
    if n + len(order) * k * h > max_elements:
        from .matroid import ResourceError
        raise ResourceError("composite extension exceeds the element limit")
    root = np.random.SeedSequence(_seed_entropy(seed))
    B = A
    steps = []
    for step, e in enumerate(order):
        sub = np.random.default_rng(root.spawn(1)[0])
        B, rec = semiflexible_ext(B, e, k, h, sub)
        rec.seed = [*_as_list(_seed_json(seed)), step]
        steps.append(rec)
        B = B.trivial_ext(ell)
    rec = ExtensionRecord("composite", {"k": k, "h": h, "ell": ell, "order": order},
                          seed=_seed_json(seed), steps=steps,
                          attempts=sum(s.attempts for s in steps))
    return B, rec


def _seed_entropy(seed):
    if isinstance(seed, (list, tuple)):
        return [int(x) for x in seed]
    return int(seed)


def _as_list(x):
    return list(x) if isinstance(x, list) else [x]


# -- recurrence checks ----------------------------------------------------------------

def product_recurrence_residual(A: Arrangement, k: int, h: int, seed=0) -> Poly:
    """psi(Pr_{k,h}(A)) - (lambda + h) psi(Pr_{k-1,h}(A)), independent samples."""
    P1, _ = large_product_ext(A, k, h, [_seed_entropy(seed), 1])
    P0, _ = large_product_ext(A, k - 1, h, [_seed_entropy(seed), 0])
    return P1.absolute() - Poly([h, 1]) * P0.absolute()


@dataclass
class SemiflexResidual:
    """psi(Sf_k) - h psi(Sf_(k-1)) - lambda^a psi(Pr_(k-1)(A/e)) - lambda^b psi(Pr_(k-1)(A\\e)).

    ``normalized`` uses a = b = 1 (both smaller arrangements carried one
    dimension up, as one trivial extension); ``literal`` uses a = b = 0.
    """

    lhs: Poly
    flex_term: Poly
    contracted_term: Poly
    deleted_term: Poly
    normalized: Poly
    literal: Poly

    @property
    def holds(self) -> bool:
        return self.normalized.is_zero()

    def to_json(self) -> dict:
        return {k: getattr(self, k).to_json() for k in
                ("lhs", "flex_term", "contracted_term", "deleted_term", "normalized", "literal")} | \
            {"holds": self.holds}


def semiflex_recurrence_residual(A: Arrangement, e: int, k: int, h: int, seed=0) -> SemiflexResidual:
    s = _seed_entropy(seed)
    S1, _ = semiflexible_ext(A, e, k, h, [s, 1])
    S0, _ = semiflexible_ext(A, e, k - 1, h, [s, 0])
    Pc, _ = large_product_ext(contract(A, e), k - 1, h, [s, 2])
    Pd, _ = large_product_ext(delete(A, e), k - 1, h, [s, 3])
    lhs, flex = S1.absolute(), S0.absolute()
    pc, pd = Pc.absolute(), Pd.absolute()
    norm = lhs - flex.scale(h) - pc.shift(1) - pd.shift(1)
    lit = lhs - flex.scale(h) - pc - pd
    return SemiflexResidual(lhs, flex.scale(h), pc, pd, norm, lit)


@dataclass
class FlexLimitRow:
    h: int
    normalized: list
    deviation: list


def flex_limit_probe(A: Arrangement, e: int, k: int, h_list, seed=0) -> list[FlexLimitRow]:
    """psi(Sf_{k,h}(A, e)) / h^k against psi(A), coefficient-wise by power of lambda."""
    target = A.absolute()
    rows = []
    for h in h_list:
        S, _ = semiflexible_ext(A, e, k, h, [_seed_entropy(seed), h])
        q = S.absolute().scale(Fraction(1, h ** k))
        n = max(q.degree, target.degree) + 1
        norm = q.coefficient_list(n)
        dev = [abs(a - b) for a, b in zip(norm, target.coefficient_list(n))]
        rows.append(FlexLimitRow(h, norm, dev))
    return rows


def flex_limit_decreasing(rows: list[FlexLimitRow]) -> bool:
    """Each coefficient's deviation strictly decreases along the rows,
    unless it is exactly zero at every row."""
    n = len(rows[0].deviation)
    for j in range(n):
        col = [r.deviation[j] for r in rows]
        if all(v == 0 for v in col):
            continue
        if any(b >= a for a, b in zip(col, col[1:])):
            return False
    return True


# -- poset isomorphism ---------------------------------------------------------------

def poset_graph(P: IntersectionPoset) -> nx.DiGraph:
    G = nx.DiGraph()
    for i, d in enumerate(P.dims):
        G.add_node(i, dim=d)
    G.add_edges_from(P.hasse_edges())
    return G


def posets_isomorphic(P: IntersectionPoset, Q: IntersectionPoset, max_nodes: int = 200) -> bool:
    if len(P) != len(Q) or sorted(P.dims) != sorted(Q.dims):
        return False
    if len(P) > max_nodes:
        raise ValueError(f"posets with more than {max_nodes} nodes are not compared")
    return nx.is_isomorphic(poset_graph(P), poset_graph(Q),
                            node_match=lambda a, b: a["dim"] == b["dim"])


@dataclass
class SFEReport:
    deleted_isomorphic: bool
    contracted_isomorphic: bool
    counts: dict


def sfe_del_contr_check(A: Arrangement, k: int, h: int, ell: int, seed=0) -> SFEReport:
    """Compare deletion/contraction of the last semiflexible element with
    Pr_{k,h,ell}(Sf_{k,h,ell}(A \\ e_n)) and Pr_{k,h,ell}(Sf_{k,h,ell}(A / e_n)).

    The smaller composites use the same k; with k - 1 the element and
    dimension counts of the two sides cannot agree.
    """
    n = len(A)
    s = _seed_entropy(seed)
    full, _ = composite_sfe(A, range(n), k, h, ell, [s, 0])
    last = n - 1
    lhs_del = delete(full, last)
    lhs_con = contract(full, last)
    reports = {}
    out = []
    for tag, small, lhs in (("delete", delete(A, last), lhs_del), ("contract", contract(A, last), lhs_con)):
        inner, _ = composite_sfe(small, range(len(small)), k, h, ell, [s, 1, len(tag)])
        rhs, _ = large_product_ext(inner, k, h, [s, 2, len(tag)])
        rhs = rhs.trivial_ext(ell)
        reports[tag] = {"lhs": [lhs.ambient_d, len(lhs)], "rhs": [rhs.ambient_d, len(rhs)]}
        same_shape = lhs.ambient_d == rhs.ambient_d and len(lhs) == len(rhs)
        out.append(same_shape and posets_isomorphic(lhs.poset(), rhs.poset()))
    return SFEReport(out[0], out[1], reports)


# -- floating realizations ------------------------------------------------------------

def float_composite(A: Arrangement, order, k: int, h: int, ell: int,
                    rng: np.random.Generator) -> Discotope:
    """Discotope of a composite semiflexible extension sampled in floating point.

    Directions are uniform on the sphere, each semiflexible normal space is
    a Haar-random c-subspace of its span, and the h parallel extension
    hyperplanes of a direction merge into one segment of length h.
    """
    D = A.ambient_d
    normals = [orthonormal_rows([[float(x) for x in r] for r in H.normals]) for H in A.elements]
    ext: list[np.ndarray] = []

    def pad(arr, extra):
        return np.hstack([arr, np.zeros((arr.shape[0], extra))])

    for e in order:
        normals = [pad(b, k) for b in normals]
        ext = [np.append(v, np.zeros(k)) for v in ext]
        D += k
        S = rng.standard_normal((k, D))
        S /= np.linalg.norm(S, axis=1, keepdims=True)
        span = orthonormal_rows(np.vstack([normals[e], S]))
        c = normals[e].shape[0]
        G = rng.standard_normal((c, span.shape[0]))
        normals[e] = orthonormal_rows(G @ span)
        ext.extend(S)
        normals = [pad(b, ell) for b in normals]
        ext = [np.append(v, np.zeros(ell)) for v in ext]
        D += ell
    disks = [Disk(b, unit_volume_radius(b.shape[0])) for b in normals]
    disks += [Disk(v[None, :], h / 2.0) for v in ext]
    return Discotope(D, disks)
