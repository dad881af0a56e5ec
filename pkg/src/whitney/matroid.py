"""Matroids given by rank oracles: flats, Moebius values, characteristic
polynomials, Whitney numbers, Ingleton screening and a small catalog.

Subsets of the ground set are bitmasks throughout (bit i = element i).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import linalg
from .exactnum import Poly, to_rational

DEFAULT_MAX_ELEMENTS = 20
TABLE_LIMIT = 12


class ResourceError(RuntimeError):
    """A configured size limit would be exceeded."""


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class Matroid:
    """Ground set plus a rank oracle on bitmasks.

    For n <= 12 the oracle is tabulated eagerly, otherwise results are
    memoised on demand.
    """

    def __init__(self, n: int, rank_fn, labels=None, name: str | None = None):
        self.n = n
        self.labels = list(labels) if labels is not None else list(range(n))
        if len(self.labels) != n:
            raise ValueError("label count does not match ground set size")
        self.name = name
        if n <= TABLE_LIMIT:
            self._table = [int(rank_fn(m)) for m in range(1 << n)]
            self._fn = None
        else:
            self._table = None
            self._fn = lru_cache(maxsize=None)(rank_fn)
        self.r = self.rank((1 << n) - 1)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def rank(self, mask: int) -> int:
        if self._table is not None:
            return self._table[mask]
        return int(self._fn(mask))

    def mask_of(self, labels) -> int:
        mask = 0
        for e in labels:
            mask |= 1 << self.labels.index(e)
        return mask

    def rank_table(self) -> list[int]:
        return [self.rank(m) for m in range(1 << self.n)]

    def closure(self, mask: int) -> int:
        r = self.rank(mask)
        out = mask
        for i in range(self.n):
            bit = 1 << i
            if not mask & bit and self.rank(mask | bit) == r:
                out |= bit
        return out

    def loops(self) -> int:
        return self.closure(0)

    def is_loop(self, e: int) -> bool:
        return self.rank(1 << e) == 0

    def is_coloop(self, e: int) -> bool:
        return self.rank(self.full & ~(1 << e)) < self.r

    def check_axioms(self, limit: int = TABLE_LIMIT) -> bool:
        """Spot-check normalisation, boundedness, monotonicity, submodularity."""
        if self.n > limit:
            raise ResourceError(f"axiom check limited to n <= {limit}")
        rk = self.rank_table()
        if rk[0] != 0:
            return False
        for m in range(1 << self.n):
            if rk[m] > popcount(m):
                return False
            for i in range(self.n):
                bit = 1 << i
                if not m & bit:
                    if not rk[m] <= rk[m | bit] <= rk[m] + 1:
                        return False
        # local submodularity suffices given unit increase
        for m in range(1 << self.n):
            for i, j in combinations(range(self.n), 2):
                bi, bj = 1 << i, 1 << j
                if m & (bi | bj):
                    continue
                if rk[m | bi] + rk[m | bj] < rk[m | bi | bj] + rk[m]:
                    return False
        return True

    def same_rank_function(self, other: "Matroid") -> bool:
        return self.n == other.n and all(
            self.rank(m) == other.rank(m) for m in range(1 << self.n))

    def to_json(self) -> dict:
        if self.name and not self.name.startswith("_"):
            try:
                catalog(self.name)
                return {"name": self.name}
            except ValueError:
                pass
        return {"rank_table": {str(m): self.rank(m) for m in range(1 << self.n)}}

    def __repr__(self):
        tag = self.name or "Matroid"
        return f"<{tag}: n={self.n}, r={self.r}>"


def matroid_from_rank_table(table, labels=None, name=None) -> Matroid:
    if isinstance(table, dict):
        size = max(int(k) for k in table) + 1
        n = size.bit_length() - 1
        if 1 << n != size:
            raise ValueError("rank table must cover every subset")
        vals = [int(table[str(m)] if str(m) in table else table[m]) for m in range(size)]
    else:
        vals = [int(x) for x in table]
        n = len(vals).bit_length() - 1
        if 1 << n != len(vals):
            raise ValueError("rank table length must be a power of two")
    return Matroid(n, vals.__getitem__, labels=labels, name=name)


def matroid_from_matrix(cols, name=None) -> Matroid:
    """Column matroid of a rational d x n matrix given as a list of rows."""
    rows = [[to_rational(a) for a in row] for row in cols]
    if not rows:
        raise ValueError("empty matrix")
    n = len(rows[0])
    columns = [linalg.integerize([rows[i][j] for i in range(len(rows))]) for j in range(n)]
    if n <= TABLE_LIMIT:
        # grow echelon bases along the subset lattice: rank(S) from rank(S - max)
        systems = [()] * (1 << n)
        ranks = [0] * (1 << n)
        for m in range(1, 1 << n):
            top = m.bit_length() - 1
            prev = m & ~(1 << top)
            new, status = linalg.insert_row(systems[prev], columns[top])
            systems[m] = new
            ranks[m] = ranks[prev] + (status == "new")
        return Matroid(n, ranks.__getitem__, name=name)

    def rk(mask):
        sys_ = ()
        r = 0
        for i in bits(mask):
            sys_, status = linalg.insert_row(sys_, columns[i])
            r += status == "new"
        return r

    return Matroid(n, rk, name=name)


def uniform(r: int, n: int) -> Matroid:
    return Matroid(n, lambda m: min(popcount(m), r), name=f"uniform({r},{n})")


def boolean(n: int) -> Matroid:
    return Matroid(n, popcount, name=f"boolean({n})")


VAMOS_NONBASES = [(0, 1, 2, 3), (0, 1, 4, 5), (0, 1, 6, 7), (2, 3, 4, 5), (2, 3, 6, 7)]


def vamos() -> Matroid:
    """Rank-4 paving matroid on 8 points; five of the six pair-unions are circuits."""
    dependent = {sum(1 << i for i in q) for q in VAMOS_NONBASES}

    def rk(m):
        if m in dependent:
            return 3
        return min(popcount(m), 4)

    labels = ["a", "a'", "b", "b'", "c", "c'", "d", "d'"]
    return Matroid(8, rk, labels=labels, name="vamos")


FANO_LINES = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]


def fano() -> Matroid:
    lines = {sum(1 << i for i in ln) for ln in FANO_LINES}

    def rk(m):
        k = popcount(m)
        if k <= 2:
            return k
        if k == 3:
            return 2 if m in lines else 3
        return 3

    return Matroid(7, rk, labels=list(range(1, 8)), name="fano")


def complete_graph_edges(m: int):
    return list(combinations(range(m), 2))


def graphic_complete(m: int) -> Matroid:
    edges = complete_graph_edges(m)

    def rk(mask):
        parent = list(range(m))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        r = 0
        for i in bits(mask):
            a, b = (find(v) for v in edges[i])
            if a != b:
                parent[a] = b
                r += 1
        return r

    return Matroid(len(edges), rk, labels=edges, name=f"graphic-complete({m})")


_CATALOG_RE = re.compile(r"^\s*([a-z\-]+)\s*(?:\(([^)]*)\))?\s*$")


def catalog(name: str) -> Matroid:
    """uniform(r,n), boolean(n), vamos, fano, graphic-complete(m)."""
    mt = _CATALOG_RE.match(name.lower())
    if not mt:
        raise ValueError(f"unknown matroid {name!r}")
    kind, args = mt.group(1), mt.group(2)
    nums = [int(a) for a in args.split(",")] if args else []
    if kind == "uniform" and len(nums) == 2:
        r, n = nums
        if not 0 <= r <= n:
            raise ValueError("uniform(r,n) needs 0 <= r <= n")
        return uniform(r, n)
    if kind == "boolean" and len(nums) == 1:
        return boolean(nums[0])
    if kind == "vamos" and not nums:
        return vamos()
    if kind == "fano" and not nums:
        return fano()
    if kind in ("graphic-complete", "complete-graph") and len(nums) == 1:
        return graphic_complete(nums[0])
    raise ValueError(f"unknown matroid {name!r}")


def matroid_from_json(data: dict) -> Matroid:
    if "name" in data:
        return catalog(data["name"])
    if "matrix" in data:
        return matroid_from_matrix(data["matrix"])
    if "rank_table" in data:
        return matroid_from_rank_table(data["rank_table"])
    raise ValueError("matroid JSON needs one of 'name', 'matrix', 'rank_table'")


@dataclass
class FlatLattice:
    """Flats sorted by rank with Moebius values mu(0, F)."""

    flats: list[int]
    ranks: list[int]
    mobius: list[int]
    covers: list[list[int]] = field(default_factory=list)

    def __len__(self):
        return len(self.flats)

    @property
    def bottom(self) -> int:
        return self.flats[0]

    @property
    def top(self) -> int:
        return self.flats[-1]

    def mobius_of(self, flat: int) -> int:
        return self.mobius[self.flats.index(flat)]


def flats_and_mobius(M: Matroid, max_elements: int = DEFAULT_MAX_ELEMENTS,
                     max_flats: int = 200_000) -> FlatLattice:
    if M.n > max_elements:
        raise ResourceError(f"ground set of size {M.n} exceeds limit {max_elements}")
    bottom = M.closure(0)
    seen = {bottom}
    layer = [bottom]
    by_rank = [[bottom]]
    while layer:
        nxt = []
        for F in layer:
            for i in range(M.n):
                bit = 1 << i
                if F & bit:
                    continue
                G = M.closure(F | bit)
                if G not in seen:
                    seen.add(G)
                    nxt.append(G)
                    if len(seen) > max_flats:
                        raise ResourceError(f"more than {max_flats} flats")
        if nxt:
            nxt.sort()
            by_rank.append(nxt)
        layer = nxt
    flats = [F for layer_ in by_rank for F in layer_]
    ranks = [M.rank(F) for F in flats]
    mobius = []
    for idx, F in enumerate(flats):
        if idx == 0:
            mobius.append(1)
            continue
        s = 0
        for j in range(idx):
            G = flats[j]
            if ranks[j] < ranks[idx] and G & F == G:
                s += mobius[j]
        mobius.append(-s)
    covers = [[] for _ in flats]
    for i, F in enumerate(flats):
        for j, G in enumerate(flats):
            if ranks[j] == ranks[i] + 1 and F & G == F:
                covers[i].append(j)
    return FlatLattice(flats, ranks, mobius, covers)


def char_poly(M: Matroid, lattice: FlatLattice | None = None):
    """(chi, psi, gamma) with chi = sum mu(F) lambda^(r - rk F)."""
    L = lattice or flats_and_mobius(M)
    r = M.r
    coeffs = [0] * (r + 1)
    for rk_, mu in zip(L.ranks, L.mobius):
        coeffs[r - rk_] += mu
    chi = Poly(coeffs)
    gamma = [abs(to_rational(coeffs[r - i])) for i in range(r + 1)]
    psi = Poly([gamma[r - j] for j in range(r + 1)])
    return chi, psi, gamma


def whitney_numbers(M: Matroid):
    return char_poly(M)[2]


def delete(M: Matroid, e: int) -> Matroid:
    keep = [i for i in range(M.n) if i != e]

    def lift(mask):
        out = 0
        for j, i in enumerate(keep):
            if mask >> j & 1:
                out |= 1 << i
        return out

    return Matroid(M.n - 1, lambda m: M.rank(lift(m)),
                   labels=[M.labels[i] for i in keep], name=None)


def contract(M: Matroid, e: int) -> Matroid:
    keep = [i for i in range(M.n) if i != e]
    ebit = 1 << e
    re_ = M.rank(ebit)

    def lift(mask):
        out = 0
        for j, i in enumerate(keep):
            if mask >> j & 1:
                out |= 1 << i
        return out

    return Matroid(M.n - 1, lambda m: M.rank(lift(m) | ebit) - re_,
                   labels=[M.labels[i] for i in keep], name=None)


def delete_contract(M: Matroid, e: int):
    if not 0 <= e < M.n:
        raise ValueError(f"element {e} not in ground set")
    return delete(M, e), contract(M, e)


@dataclass
class IngletonResult:
    satisfied: bool
    witness: tuple | None = None
    exhaustive: bool = True
    checked: int = 0

    def witness_labels(self, M: Matroid):
        if self.witness is None:
            return None
        return tuple(sorted(M.labels[i] for i in bits(m)) for m in self.witness)


def ingleton_expression(M: Matroid, A: int, B: int, C: int, D: int) -> int:
    """LHS minus RHS of Ingleton's inequality; negative means violated."""
    r = M.rank
    lhs = r(A | B) + r(A | C) + r(A | D) + r(B | C) + r(B | D)
    rhs = r(A) + r(B) + r(C | D) + r(A | B | C) + r(A | B | D)
    return lhs - rhs


def ingleton_check(M: Matroid, exhaustive_limit: int = 8, samples: int = 200_000,
                   seed: int = 0) -> IngletonResult:
    """Search quadruples (A, B, C, D) of subsets for an Ingleton violation.

    For n <= ``exhaustive_limit`` every quadruple is examined: for each
    pair (A, B) the inequality separates into per-subset terms u(C), u(D)
    and the table rk(C|D), so the inner double loop is one numpy pass.
    Larger ground sets are sampled with a seeded generator.
    """
    n = M.n
    if n <= exhaustive_limit:
        size = 1 << n
        rk = np.array(M.rank_table(), dtype=np.int16)
        idx = np.arange(size)
        rcd = rk[idx[:, None] | idx[None, :]]
        checked = 0
        for A in range(size):
            rA = rk[A | idx]
            for B in range(A, size):
                rB = rk[B | idx]
                rAB = rk[A | B | idx]
                u = rA + rB - rAB
                bound = int(rk[A] + rk[B] - rk[A | B])
                vals = u[:, None] + u[None, :] - rcd
                checked += size * size
                if vals.min() < bound:
                    c, d = np.unravel_index(int(vals.argmin()), vals.shape)
                    w = (A, B, int(c), int(d))
                    assert ingleton_expression(M, *w) < 0
                    return IngletonResult(False, w, True, checked)
        return IngletonResult(True, None, True, checked)
    rng = np.random.default_rng(seed)
    quads = rng.integers(0, 1 << n, size=(samples, 4), dtype=np.int64)
    for q in quads:
        w = tuple(int(x) for x in q)
        if ingleton_expression(M, *w) < 0:
            return IngletonResult(False, w, False, samples)
    return IngletonResult(True, None, False, samples)
