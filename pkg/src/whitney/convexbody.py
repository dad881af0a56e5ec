"""Zonotopes and discotopes: exact intrinsic volumes of zonotopes,
Steiner/Wills polynomials, support and distance oracles, and Monte Carlo
intrinsic-volume estimation for discotopes.

Conventions: a zonotope generator z stands for the segment [-z, z] of
length 2|z|.  A discotope is a Minkowski sum of balls ("disks"), each
living in a linear subspace and given by an orthonormal basis plus a
radius.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import mpmath
import numpy as np

from . import linalg
from .exactnum import Poly, is_log_concave

HIGH_PREC_BITS = 106


def kappa(m: int) -> float:
    """Volume of the unit m-ball."""
    if m < 0:
        raise ValueError("dimension must be non-negative")
    return math.pi ** (m / 2) / math.gamma(m / 2 + 1)


def unit_volume_radius(m: int) -> float:
    return kappa(m) ** (-1.0 / m)


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def _exact_sqrt(q: Fraction):
    """sqrt(q) as a Fraction when q is a rational square, else None."""
    p, r = q.numerator, q.denominator
    sp, sr = math.isqrt(p), math.isqrt(r)
    if sp * sp == p and sr * sr == r:
        return Fraction(sp, sr)
    return None


class _Accumulator:
    """Sums square roots exactly when they are rational, else at 106 bits."""

    def __init__(self):
        self.exact = Fraction(0)
        self.inexact = mpmath.mpf(0)
        self.has_inexact = False

    def add_sqrt(self, q: Fraction):
        if q == 0:
            return
        s = _exact_sqrt(q)
        if s is not None:
            self.exact += s
            return
        with mpmath.workprec(HIGH_PREC_BITS):
            self.inexact += mpmath.sqrt(mpmath.mpf(q.numerator) / q.denominator)
        self.has_inexact = True

    def value(self):
        if not self.has_inexact:
            return self.exact
        with mpmath.workprec(HIGH_PREC_BITS):
            return float(mpmath.mpf(self.exact.numerator) / self.exact.denominator + self.inexact)


class Zonotope:
    """Z = sum_i [-z_i, z_i].

    ``ambient_d`` is the dimension of the space the body is considered in
    (it fixes the lambda-degree of the Wills polynomial).  Generators may
    be stored with more coordinates than that, e.g. after a contraction
    they lie in a hyperplane of the original coordinates.
    """

    def __init__(self, generators, ambient_d: int | None = None):
        gens = [tuple(g) for g in generators]
        self.exact = all(_is_exact(x) for g in gens for x in g)
        if self.exact:
            gens = [tuple(Fraction(x) for x in g) for g in gens]
        else:
            gens = [tuple(float(x) for x in g) for g in gens]
        self.generators = gens
        widths = {len(g) for g in gens}
        if len(widths) > 1:
            raise ValueError("generators of different lengths")
        self.space_dim = widths.pop() if widths else (ambient_d or 0)
        self.ambient_d = self.space_dim if ambient_d is None else ambient_d
        if self.ambient_d > self.space_dim:
            raise ValueError("ambient dimension exceeds coordinate count")

    def __len__(self):
        return len(self.generators)

    @classmethod
    def cube(cls, d: int) -> "Zonotope":
        """Translate of [0, 1]^d: generators e_i / 2."""
        return cls([[Fraction(1, 2) if j == i else 0 for j in range(d)] for i in range(d)])

    def segment_length(self, i: int):
        g = self.generators[i]
        if self.exact:
            q = 4 * sum(x * x for x in g)
            s = _exact_sqrt(q)
            return s if s is not None else math.sqrt(q)
        return 2 * math.sqrt(sum(x * x for x in g))

    def as_array(self) -> np.ndarray:
        if not self.generators:
            return np.zeros((0, self.space_dim))
        return np.array([[float(x) for x in g] for g in self.generators])

    def merged(self) -> "Zonotope":
        """Sum parallel generators (same body, fewer segments); drop zeros."""
        groups: dict = {}
        order = []
        if self.exact:
            for g in self.generators:
                if not any(g):
                    continue
                key = linalg.integerize(g)
                first = next(x for x in g if x)
                sgn = 1 if first * next(k for k in key if k) > 0 else -1
                if key not in groups:
                    groups[key] = [Fraction(0)] * len(g)
                    order.append(key)
                groups[key] = [a + sgn * b for a, b in zip(groups[key], g)]
            return Zonotope([tuple(groups[k]) for k in order], self.ambient_d)
        arr = self.as_array()
        out: list[np.ndarray] = []
        for v in arr:
            nv = np.linalg.norm(v)
            if nv == 0:
                continue
            for j, w in enumerate(out):
                cos = float(v @ w) / (nv * np.linalg.norm(w))
                if abs(cos) > 1 - 1e-12:
                    out[j] = w + np.sign(cos) * v
                    break
            else:
                out.append(v.copy())
        return Zonotope([tuple(v) for v in out], self.ambient_d)

    def to_json(self) -> dict:
        if self.exact:
            gens = [[f"{x.numerator}/{x.denominator}" for x in g] for g in self.generators]
        else:
            gens = [[repr(x) for x in g] for g in self.generators]
        return {"ambient": self.ambient_d, "generators": gens}

    @classmethod
    def from_json(cls, data) -> "Zonotope":
        gens = []
        for g in data["generators"]:
            row = []
            for x in g:
                if isinstance(x, str) and ("/" in x or x.lstrip("-").isdigit()):
                    row.append(Fraction(x))
                else:
                    row.append(float(x))
            gens.append(row)
        return cls(gens, data.get("ambient"))

    def __repr__(self):
        return f"Zonotope(n={len(self.generators)}, ambient_d={self.ambient_d})"


@dataclass
class WillsPoly:
    """Intrinsic volumes nu[i] = nu_i(K) of a body in R^ambient_d."""

    nu: list
    ambient_d: int

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Fraction) for x in self.nu)

    def coefficients(self) -> list:
        """Coefficient of lambda^i is nu_(d - i)."""
        d = self.ambient_d
        return [self.nu[d - i] if d - i < len(self.nu) else 0 for i in range(d + 1)]

    def poly(self) -> Poly:
        if not self.exact:
            raise ValueError("Wills polynomial has irrational coefficients")
        return Poly(self.coefficients())

    def steiner_coefficients(self, n: int | None = None) -> list[float]:
        """nu_i * kappa_(n - i), the Steiner coefficients in R^n."""
        n = self.ambient_d if n is None else n
        return [float(self.nu[i]) * kappa(n - i) for i in range(min(n, len(self.nu) - 1) + 1)]

    def as_floats(self) -> list[float]:
        return [float(x) for x in self.nu]


def _padded(nu, d):
    return list(nu) + [Fraction(0)] * (d + 1 - len(nu))


def _gram(vectors):
    return [[sum(a * b for a, b in zip(u, v)) for v in vectors] for u in vectors]


def _subset_exact(gens, d) -> list:
    n = len(gens)
    doubled = [tuple(2 * x for x in g) for g in gens]
    nu = [Fraction(1)]
    for k in range(1, min(n, d) + 1):
        acc = _Accumulator()
        for S in combinations(range(n), k):
            acc.add_sqrt(linalg.det(_gram([doubled[i] for i in S])))
        nu.append(acc.value())
    return _padded(nu, d)


def _subset_float(arr: np.ndarray, d: int) -> list:
    n = len(arr)
    nu = [1.0]
    doubled = 2.0 * arr
    for k in range(1, min(n, d) + 1):
        idx = np.array(list(combinations(range(n), k)), dtype=np.intp)
        sub = doubled[idx]
        G = sub @ np.swapaxes(sub, 1, 2)
        dets = np.linalg.det(G)
        scale = np.prod(np.einsum("nij,nij->ni", sub, sub), axis=1)
        dets = np.where(dets > 1e-13 * np.maximum(scale, 1e-300), dets, 0.0)
        nu.append(float(np.sqrt(dets).sum()))
    return nu + [0.0] * (d + 1 - len(nu))


def _belt(Z: Zonotope, d: int) -> list:
    from .matroid import Matroid, flats_and_mobius, matroid_from_matrix

    gens = Z.generators
    n = len(gens)
    if n == 0:
        return _padded([Fraction(1)], d) if Z.exact else [1.0] + [0.0] * d
    if Z.exact:
        cols = [[gens[j][i] for j in range(n)] for i in range(Z.space_dim)]
        M = matroid_from_matrix(cols)
    else:
        arr = Z.as_array()
        M = Matroid(n, lambda m: int(np.linalg.matrix_rank(arr[[i for i in range(n) if m >> i & 1]], tol=1e-9))
                    if m else 0)
    L = flats_and_mobius(M)
    nu = [Fraction(0) if Z.exact else 0.0 for _ in range(d + 1)]
    accs = [_Accumulator() for _ in range(d + 1)]
    for F, k in zip(L.flats, L.ranks):
        members = [i for i in range(n) if F >> i & 1]
        # belt contribution: k-volume of the face zonotope spanned by this flat
        if k == 0:
            if Z.exact:
                accs[0].exact += 1
            else:
                nu[0] += 1.0
            continue
        for S in combinations(members, k):
            if M.rank(sum(1 << i for i in S)) < k:
                continue
            if Z.exact:
                accs[k].add_sqrt(linalg.det(_gram([tuple(2 * x for x in gens[i]) for i in S])))
            else:
                sub = 2.0 * Z.as_array()[list(S)]
                nu[k] += math.sqrt(max(np.linalg.det(sub @ sub.T), 0.0))
    if Z.exact:
        return [a.value() for a in accs]
    return nu


def zonotope_intrinsic_volumes(Z: Zonotope, method: str = "subset",
                               max_generators: int = 25) -> WillsPoly:
    """Intrinsic volumes nu_0..nu_d of a zonotope.

    subset: nu_k = sum over k-subsets of the k-volume of the parallelotope
            spanned by the doubled generators (sqrt of a Gram determinant).
    belt:   nu_k = sum over rank-k flats of the generator matroid of the
            k-volume of the face zonotope generated by that flat.
    """
    Zm = Z.merged()
    if len(Zm) > max_generators:
        from .matroid import ResourceError
        raise ResourceError(f"{len(Zm)} distinct generators exceed limit {max_generators}")
    d = Z.ambient_d
    if method == "subset":
        nu = _subset_exact(Zm.generators, d) if Zm.exact else _subset_float(Zm.as_array(), d)
    elif method == "belt":
        nu = _belt(Zm, d)
    else:
        raise ValueError(f"unknown method {method!r}")
    return WillsPoly(nu[: d + 1], d)


def zono_delete_contract(Z: Zonotope, i: int):
    """(Z \\ i, Z / i); the contraction projects onto the hyperplane orthogonal to z_i."""
    gens = Z.generators
    zi = gens[i]
    rest = [g for j, g in enumerate(gens) if j != i]
    deleted = Zonotope(rest, Z.ambient_d) if rest else Zonotope([], Z.ambient_d)
    if not any(zi):
        raise ValueError("cannot contract a zero generator")
    if Z.exact:
        nn = sum(x * x for x in zi)
        proj = [tuple(x - sum(a * b for a, b in zip(g, zi)) / nn * y for x, y in zip(g, zi)) for g in rest]
    else:
        z = np.array(zi)
        proj = [tuple(np.array(g) - (np.array(g) @ z) / (z @ z) * z) for g in rest]
    if not proj:
        return deleted, Zonotope([], Z.ambient_d - 1) if Z.ambient_d else deleted
    contracted = Zonotope(proj, Z.ambient_d - 1)
    return deleted, contracted


def wills_del_contr_residual(Z: Zonotope, i: int, method: str = "subset") -> list:
    """W(Z) - W(Z\\i) - (segment length) W(Z/i), coefficient-wise in lambda."""
    Zd, Zc = zono_delete_contract(Z, i)
    w = zonotope_intrinsic_volumes(Z, method).coefficients()
    wd = zonotope_intrinsic_volumes(Zd, method).coefficients()
    wc = zonotope_intrinsic_volumes(Zc, method).coefficients() + [0]
    L = Z.segment_length(i)
    return [a - b - L * c for a, b, c in zip(w, wd, wc)]


# -- Stirling normalisation -------------------------------------------------

def stirling_normalized(nu, n: int, rescale: bool = True) -> list[float]:
    """nu_i kappa_(n-i) pi^(-(n-i)/2) sqrt(pi n) (n / 2e)^(n/2).

    The literal expression grows like (n/2)^(i/2) nu_i, so by default the
    geometric factor (2/n)^(i/2) is divided out; that factor does not
    affect log-concavity and the rescaled sequence tends to nu_i.
    """
    out = []
    for i, v in enumerate(nu):
        v = float(v)
        if v == 0:
            out.append(0.0)
            continue
        logval = (math.log(v) - math.lgamma((n - i) / 2 + 1) + 0.5 * math.log(math.pi * n)
                  + (n / 2) * math.log(n / (2 * math.e)))
        if rescale:
            logval += (i / 2) * math.log(2 / n)
        out.append(math.exp(logval))
    return out


def steiner_log_concave(w: WillsPoly, slack: float = 1e-9) -> bool:
    return is_log_concave(w.steiner_coefficients(), slack=slack)


def wills_log_concave(w: WillsPoly, slack: float = 1e-9) -> bool:
    if w.exact:
        return is_log_concave(w.nu)
    return is_log_concave(w.as_floats(), slack=slack)


# -- discotopes ---------------------------------------------------------------

@dataclass
class Disk:
    basis: np.ndarray  # (m, d) orthonormal rows
    radius: float

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


def orthonormal_rows(rows) -> np.ndarray:
    A = np.asarray(rows, dtype=float)
    if A.ndim == 1:
        A = A[None, :]
    q, r = np.linalg.qr(A.T)
    keep = np.abs(np.diag(r)) > 1e-12 * max(1.0, np.abs(r).max())
    return q[:, keep].T


class Discotope:
    def __init__(self, ambient_d: int, disks):
        self.ambient_d = ambient_d
        self.disks = [d if isinstance(d, Disk) else Disk(orthonormal_rows(d[0]), float(d[1])) for d in disks]
        for dk in self.disks:
            if dk.basis.shape[1] != ambient_d:
                raise ValueError("disk basis has wrong ambient dimension")

    @classmethod
    def from_zonotope(cls, Z: Zonotope) -> "Discotope":
        arr = Z.as_array()
        disks = []
        for v in arr:
            nv = np.linalg.norm(v)
            if nv > 0:
                disks.append(Disk((v / nv)[None, :], float(nv)))
        return cls(Z.space_dim, disks)

    @classmethod
    def ball(cls, d: int, radius: float = 1.0) -> "Discotope":
        return cls(d, [Disk(np.eye(d), radius)])

    def is_zonotope(self) -> bool:
        return all(dk.dim == 1 for dk in self.disks)

    def to_zonotope(self) -> Zonotope:
        if not self.is_zonotope():
            raise ValueError("discotope has disks of dimension > 1")
        return Zonotope([tuple(dk.radius * dk.basis[0]) for dk in self.disks], self.ambient_d)

    def to_json(self) -> dict:
        return {"ambient": self.ambient_d,
                "disks": [{"basis": dk.basis.tolist(), "radius": dk.radius} for dk in self.disks]}

    @classmethod
    def from_json(cls, data) -> "Discotope":
        return cls(int(data["ambient"]), [Disk(np.array(x["basis"], dtype=float), float(x["radius"]))
                                          for x in data["disks"]])

    def __repr__(self):
        return f"Discotope(R^{self.ambient_d}, disk dims={[dk.dim for dk in self.disks]})"


def discotope_of(A) -> Discotope:
    """Unit-volume ball in the orthogonal complement of every element."""
    if not A.is_central:
        raise ValueError("discotope_of needs a central arrangement")
    disks = []
    for H in A.elements:
        B = orthonormal_rows([[float(x) for x in r] for r in H.normals])
        disks.append(Disk(B, unit_volume_radius(B.shape[0])))
    return Discotope(A.ambient_d, disks)


def support_function(D: Discotope, u) -> float:
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise ValueError("support_function expects a unit vector")
    return float(_support(D, u[None, :])[0])


def _support(D: Discotope, U: np.ndarray) -> np.ndarray:
    h = np.zeros(len(U))
    for dk in D.disks:
        h += dk.radius * np.linalg.norm(U @ dk.basis.T, axis=1)
    return h


def _project_ball(U: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(U, axis=1, keepdims=True)
    return U / np.maximum(n, 1.0)


def _clip(W: np.ndarray, r: float) -> np.ndarray:
    n = np.linalg.norm(W, axis=1, keepdims=True)
    return W * np.minimum(1.0, r / np.maximum(n, 1e-300))


def _supergradient(D: Discotope, X: np.ndarray, U: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """A supergradient of u -> <x,u> - h_D(u); minimal-norm choice at kinks."""
    G = X.copy()
    kinks = []
    for dk in D.disks:
        P = U @ dk.basis.T
        n = np.linalg.norm(P, axis=1, keepdims=True)
        smooth = n[:, 0] > eps
        contrib = np.zeros_like(P)
        contrib[smooth] = dk.radius * P[smooth] / n[smooth]
        G -= contrib @ dk.basis
        kinks.append(~smooth)
    for dk, kink in zip(D.disks, kinks):
        if kink.any():
            W = G[kink] @ dk.basis.T
            G[kink] -= _clip(W, dk.radius) @ dk.basis
    return G


def _objective(D: Discotope, X: np.ndarray, U: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", X, U) - _support(D, U)


def _nearest_point(D: Discotope, X: np.ndarray, sweeps: int = 25):
    """Block-coordinate projection onto D; returns a point of D per row."""
    parts = [np.zeros((len(X), dk.dim)) for dk in D.disks]
    total = np.zeros_like(X)
    for _ in range(sweeps):
        for i, dk in enumerate(D.disks):
            total -= parts[i] @ dk.basis
            parts[i] = _clip((X - total) @ dk.basis.T, dk.radius)
            total += parts[i] @ dk.basis
        if len(D.disks) <= 1 or _orthogonal_disks(D):
            break
    return total


def _orthogonal_disks(D: Discotope) -> bool:
    for a, b in combinations(D.disks, 2):
        if np.abs(a.basis @ b.basis.T).max() > 1e-14:
            return False
    return True


def _ascend(D: Discotope, X: np.ndarray, U: np.ndarray, max_iter: int, tol: float,
            stop_above: np.ndarray | None = None):
    """Projected supergradient ascent with backtracking, vectorised over rows."""
    U = _project_ball(U)
    F = _objective(D, X, U)
    T = np.ones(len(U))
    done = np.zeros(len(U), dtype=bool)
    converged = np.zeros(len(U), dtype=bool)
    for _ in range(max_iter):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        G = _supergradient(D, X[act], U[act])
        gn = np.linalg.norm(G, axis=1)
        flat = gn < 1e-14
        cand = _project_ball(U[act] + T[act, None] * G)
        Fc = _objective(D, X[act], cand)
        gain = Fc - F[act]
        acc = gain > 0
        ia = act[acc]
        U[ia] = cand[acc]
        F[ia] = Fc[acc]
        T[ia] = np.minimum(T[ia] * 2.0, 1e3)
        small = acc & (gain < tol)
        rej = act[~acc]
        T[rej] *= 0.5
        stalled = ~acc & (T[act] < 1e-14)
        fin = flat | small | stalled
        if stop_above is not None:
            fin |= F[act] > stop_above[act]
        converged[act[fin]] = True
        done[act[fin]] = True
    return U, F, converged


class ConvergenceError(RuntimeError):
    pass


def _single_disk_distance(dk: Disk, X: np.ndarray) -> np.ndarray:
    P = X @ dk.basis.T
    along = np.linalg.norm(P, axis=1)
    perp2 = np.maximum(np.einsum("ij,ij->i", X, X) - along ** 2, 0.0)
    return np.sqrt(perp2 + np.maximum(along - dk.radius, 0.0) ** 2)


def distance_to_body(D: Discotope, x, n_starts: int = 20, seed: int = 0,
                     max_iter: int = 5000, tol: float = 1e-10) -> float:
    """dist(x, D) = max over |u| <= 1 of <x,u> - h_D(u).

    Maximised by projected supergradient ascent from ``n_starts`` seeded
    starting directions (the first one aimed by a block-coordinate
    projection).  Raises ConvergenceError if no start converges.
    """
    x = np.asarray(x, dtype=float)[None, :]
    if not D.disks:
        return float(np.linalg.norm(x))
    if len(D.disks) == 1:
        return float(_single_disk_distance(D.disks[0], x)[0])
    y = _nearest_point(D, x)
    upper = float(np.linalg.norm(x - y))
    if upper == 0.0:
        return 0.0
    rng = np.random.default_rng(seed)
    starts = [(x - y) / upper]
    for _ in range(n_starts - 1):
        v = rng.standard_normal(D.ambient_d)
        starts.append(v / np.linalg.norm(v))
    U0 = np.vstack(starts)
    X = np.repeat(x, len(U0), axis=0)
    U, F, conv = _ascend(D, X, U0, max_iter, tol)
    best = max(0.0, float(F.max()))
    if not conv.any() and upper - best > 1e-8:
        raise ConvergenceError("supergradient ascent did not converge")
    return best


def inside_lambda(D: Discotope, X: np.ndarray, lam: float, rng: np.random.Generator,
                  n_starts: int = 3, max_iter: int = 2000, tol: float = 1e-10):
    """Decide dist(x, D) <= lam for every row of X.

    Returns (inside, flagged).  A feasible point of D gives an upper bound
    on the distance and any unit u gives a lower bound, so most rows are
    decided without iterating; the rest run the supergradient ascent.
    """
    if not D.disks:
        return np.linalg.norm(X, axis=1) <= lam, np.zeros(len(X), dtype=bool)
    if len(D.disks) == 1:
        return _single_disk_distance(D.disks[0], X) <= lam, np.zeros(len(X), dtype=bool)
    Y = _nearest_point(D, X)
    R = X - Y
    upper = np.linalg.norm(R, axis=1)
    inside = upper <= lam
    flagged = np.zeros(len(X), dtype=bool)
    pending = np.flatnonzero(~inside)
    if pending.size == 0:
        return inside, flagged
    U0 = R[pending] / upper[pending, None]
    lower = _objective(D, X[pending], U0)
    undecided = pending[lower <= lam]
    if undecided.size == 0:
        return inside, flagged
    # ascent from the aimed start plus random restarts, stopping once above lam
    Xu = X[undecided]
    starts = [R[undecided] / upper[undecided, None]]
    for _ in range(n_starts - 1):
        v = rng.standard_normal(Xu.shape)
        starts.append(v / np.linalg.norm(v, axis=1, keepdims=True))
    U0 = np.vstack(starts)
    Xs = np.vstack([Xu] * n_starts)
    thr = np.full(len(Xs), lam)
    _, F, conv = _ascend(D, Xs, U0, max_iter, tol, stop_above=thr)
    F = F.reshape(n_starts, -1)
    conv = conv.reshape(n_starts, -1)
    best = F.max(axis=0)
    inside[undecided] = best <= lam
    flagged[undecided] = ~conv.any(axis=0) & (best <= lam)
    return inside, flagged


@dataclass
class MCResult:
    lambdas: list
    volumes: list
    stderrs: list
    hits: list
    samples: list
    flagged: list
    nu: list
    nu_se: list
    ambient_d: int
    seed: int
    config: dict = field(default_factory=dict)

    def wills(self) -> WillsPoly:
        return WillsPoly(list(self.nu), self.ambient_d)

    def volumes_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "raw_volume_estimate", "stderr", "hits", "samples", "flagged"])
        for row in zip(self.lambdas, self.volumes, self.stderrs, self.hits, self.samples, self.flagged):
            w.writerow([_fmt(row[0]), _fmt(row[1]), _fmt(row[2]), row[3], row[4], row[5]])
        return buf.getvalue()

    def nu_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "nu_i", "stderr"])
        for i, (v, s) in enumerate(zip(self.nu, self.nu_se)):
            w.writerow([i, _fmt(v), _fmt(s)])
        return buf.getvalue()


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def default_grid(D: Discotope) -> list[float]:
    R = _box_radius(D)
    R = R if R > 0 else 1.0
    d = D.ambient_d
    # geometric spacing: small lambda pins vol(D), large lambda the top terms
    return list(np.geomspace(0.1 * R, 8.0 * R, 2 * d + 6))


def _box_radius(D: Discotope) -> float:
    E = np.eye(D.ambient_d)
    return float(_support(D, E).max()) if D.disks else 0.0


CHUNK = 10_000


def _outer_radius(D: Discotope, R: float) -> float:
    # |x| <= sum of radii for x in D, and D lies in the box [-R, R]^d
    return min(sum(dk.radius for dk in D.disks), math.sqrt(D.ambient_d) * R)


def _region(D: Discotope, lam: float, R: float, rho: float, kind: str):
    """('box', half-width, volume) or ('ball', radius, volume) containing D + lam B."""
    d = D.ambient_d
    box = ("box", R + lam, (2 * (R + lam)) ** d)
    ball = ("ball", rho + lam, kappa(d) * (rho + lam) ** d)
    if kind == "box":
        return box
    if kind == "ball":
        return ball
    return ball if ball[2] < box[2] else box


def _sample_region(rng, region, n: int, d: int) -> np.ndarray:
    kind, w, _ = region
    if kind == "box":
        return rng.uniform(-w, w, size=(n, d))
    G = rng.standard_normal((n, d))
    G /= np.linalg.norm(G, axis=1, keepdims=True)
    return G * (w * rng.random(n) ** (1.0 / d))[:, None]


def _mc_chunk(args):
    D, lam, region, n, seed_seq, n_starts = args
    rng = np.random.default_rng(seed_seq)
    X = _sample_region(rng, region, n, D.ambient_d)
    inside, flagged = inside_lambda(D, X, lam, rng, n_starts=n_starts)
    return int((inside & ~flagged).sum()), int(flagged.sum())


def estimate_intrinsic_volumes_mc(D: Discotope, grid=None, N: int = 100_000, seed: int = 0,
                                  jobs: int = 1, n_starts: int = 3, region: str = "auto") -> MCResult:
    """Hit-or-miss volumes of D + lambda B on a grid, then a weighted
    least-squares fit of the Steiner polynomial for nu_0..nu_d.

    Each lambda gets N uniform samples in whichever is smaller of the box
    [-(R+lambda), R+lambda]^d, R = max_i h_D(e_i), and a centred ball of
    radius rho + lambda, rho an upper bound on max |x| over D (``region``
    forces one of them).  Samples are drawn in fixed chunks with their
    own seed substreams, so results do not depend on ``jobs``.
    """
    d = D.ambient_d
    grid = default_grid(D) if grid is None else [float(x) for x in grid]
    if len(set(grid)) < d + 1:
        raise ValueError(f"need at least {d + 1} distinct lambda values, got {len(set(grid))}")
    if region not in ("auto", "box", "ball"):
        raise ValueError(f"unknown sampling region {region!r}")
    R = _box_radius(D)
    rho = _outer_radius(D, R)
    regions = [_region(D, lam, R, rho, region) for lam in grid]
    root = np.random.SeedSequence(seed)
    lam_seqs = root.spawn(len(grid))
    tasks = []
    for lam, reg, ss in zip(grid, regions, lam_seqs):
        nchunks = -(-N // CHUNK)
        subs = ss.spawn(nchunks)
        for c, sub in enumerate(subs):
            n = min(CHUNK, N - c * CHUNK)
            tasks.append((D, lam, reg, n, sub, n_starts))
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_mc_chunk, tasks))
    else:
        results = [_mc_chunk(t) for t in tasks]
    hits, flagged, used = [], [], []
    pos = 0
    for lam in grid:
        nchunks = -(-N // CHUNK)
        h = sum(r[0] for r in results[pos:pos + nchunks])
        f = sum(r[1] for r in results[pos:pos + nchunks])
        pos += nchunks
        hits.append(h)
        flagged.append(f)
        used.append(N - f)
    vols, ses = [], []
    for reg, h, n in zip(regions, hits, used):
        box = reg[2]
        p = h / n
        vols.append(box * p)
        ses.append(box * math.sqrt(max(p * (1 - p), 1.0 / n) / n))
    lam_arr = np.array(grid)
    V = np.vander(lam_arr, d + 1, increasing=True)
    wts = 1.0 / np.array(ses)
    Vw = V * wts[:, None]
    yw = np.array(vols) * wts
    coef, *_ = np.linalg.lstsq(Vw, yw, rcond=None)
    cov = np.linalg.pinv(Vw.T @ Vw)
    nu = [0.0] * (d + 1)
    nu_se = [0.0] * (d + 1)
    for i in range(d + 1):
        # coefficient of lambda^i is nu_(d-i) kappa_i
        nu[d - i] = float(coef[i] / kappa(i))
        nu_se[d - i] = float(math.sqrt(max(cov[i, i], 0.0)) / kappa(i))
    return MCResult(list(grid), vols, ses, hits, [N] * len(grid), flagged, nu, nu_se, d, seed,
                    {"N": N, "seed": seed, "n_starts": n_starts, "chunk": CHUNK, "region": region})
