"""Sphere and Grassmannian sampling, Levy-concentration demos and the
Wills-coefficient concentration experiments on random extensions."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from math import comb

import numpy as np
from scipy.linalg import subspace_angles

from .arrangement import Arrangement, contract, delete, matroid_of
from .convexbody import Zonotope, estimate_intrinsic_volumes_mc, zonotope_intrinsic_volumes
from .exactnum import is_log_concave
from .extensions import float_composite


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (list, tuple)):
        return np.random.default_rng(np.random.SeedSequence([int(x) for x in seed]))
    return np.random.default_rng(seed)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, str) else _fmt(v) for v in r])
    return buf.getvalue()


# -- sampling ----------------------------------------------------------------

def sample_sphere(n_vectors: int, d: int, seed=0) -> np.ndarray:
    """n_vectors uniform points of S^(d-1), as rows."""
    if d < 1:
        raise ValueError("d must be at least 1")
    X = _rng(seed).standard_normal((n_vectors, d))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def sample_grassmann(r: int, d: int, seed=0) -> np.ndarray:
    """d x r orthonormal basis of a Haar-random r-plane in R^d."""
    if not 1 <= r <= d:
        raise ValueError("need 1 <= r <= d")
    G = _rng(seed).standard_normal((d, r))
    Q, R = np.linalg.qr(G)
    return Q * np.sign(np.diag(R))


def grassmann_distance(U: np.ndarray, V: np.ndarray) -> float:
    """Operator norm of P_U - P_V, i.e. sin of the largest principal angle."""
    U, V = np.atleast_2d(U), np.atleast_2d(V)
    if U.shape != V.shape:
        raise ValueError("subspaces of different dimension or ambient space")
    theta = subspace_angles(U, V)
    return float(np.sin(theta.max())) if theta.size else 0.0


# -- Levy concentration ---------------------------------------------------------------

def levy_bound(d: int, eps: float) -> float:
    """1 - sqrt(pi/8) exp(-d eps^2 / 8), a lower bound for mu(A_eps)."""
    return 1.0 - math.sqrt(math.pi / 8) * math.exp(-d * eps * eps / 8)


@dataclass
class LevyRow:
    eps: float
    empirical: float
    stderr: float
    bound: float
    deviation: float
    deviation_bound: float

    @property
    def ok(self) -> bool:
        return self.passes()

    def passes(self, z: float = 3.0) -> bool:
        return self.empirical >= self.bound - z * self.stderr


def levy_demo(d: int, eps_grid, num_samples: int, seed=0) -> list[LevyRow]:
    """Hemisphere {x_1 <= 0} of S^d in R^(d+1).

    Its geodesic eps-neighbourhood is {x_1 <= sin eps}.  Also estimates
    P(|f - M_f| > eps) for f(x) = x_1 against 2 sqrt(pi/8) exp(-d eps^2/8).
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    x1 = sample_sphere(num_samples, d + 1, seed)[:, 0]
    med = float(np.median(x1))
    rows = []
    for eps in eps_grid:
        eps = float(eps)
        p = float(np.mean(x1 <= math.sin(min(eps, math.pi / 2))))
        se = math.sqrt(max(p * (1 - p), 0.0) / num_samples)
        dev = float(np.mean(np.abs(x1 - med) > eps))
        alpha = math.sqrt(math.pi / 8) * math.exp(-d * eps * eps / 8)
        rows.append(LevyRow(eps, p, se, levy_bound(d, eps), dev, min(1.0, 2 * alpha)))
    return rows


def levy_csv(rows: list[LevyRow]) -> str:
    return _csv(["eps", "empirical", "stderr", "bound", "deviation", "deviation_bound"],
                [[r.eps, r.empirical, r.stderr, r.bound, r.deviation, r.deviation_bound] for r in rows])


def orthogonal_concentration_demo(d: int, k: int, eps: float, num_samples: int, seed=0) -> float:
    """Measure of the eps-neighbourhood of the great subsphere {x_1..x_k = 0} of S^d."""
    if not 0 <= k < d:
        raise ValueError("need 0 <= k < d")
    if k == 0 or eps >= math.pi / 2:
        return 1.0
    X = sample_sphere(num_samples, d + 1, seed)
    return float(np.mean(np.linalg.norm(X[:, :k], axis=1) <= math.sin(eps)))


# -- experiment plumbing -------------------------------------------------------------------

def default_h(k: int) -> int:
    return 2 ** k


def default_ell(k: int) -> int:
    return 4 ** k


@dataclass
class ExperimentConfig:
    d: int = 2
    n: int = 2
    c: int = 1
    k: int = 1
    h: int = 3
    ell: int = 8
    num_samples: int = 40
    lambda_grid: list = field(default_factory=list)
    mc_budget: int = 20_000
    seed: int = 0

    def __post_init__(self):
        for name in ("d", "n", "c", "h", "num_samples", "mc_budget"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.k < 0 or self.ell < 0:
            raise ValueError("k and ell must be non-negative")

    def to_json(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class Thresholds:
    """Tolerances for the statistical checks, overridable from JSON."""

    mc_rel_tol: float = 0.05          # fitted nu vs exact, relative
    uniform_mean_tol: float = 0.6     # |mean nu_2 - C(n, 2)| at the largest d
    uniform_std_ratio: float = 0.7    # std at largest d / std at smallest d
    levy_z: float = 3.0               # binomial standard errors below the bound
    log_concave_slack: float = 1e-9

    @classmethod
    def from_json(cls, data) -> "Thresholds":
        if isinstance(data, str):
            data = json.loads(data)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown threshold keys {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})

    @classmethod
    def load(cls, path: str | None) -> "Thresholds":
        if not path:
            return cls()
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass
class SampleStats:
    mean: list
    median: list
    std: list
    count: int
    samples: np.ndarray = field(repr=False, default=None)

    @classmethod
    def from_samples(cls, samples) -> "SampleStats":
        S = np.asarray(samples, dtype=float)
        if S.ndim == 1:
            S = S[:, None]
        std = S.std(axis=0, ddof=1) if len(S) > 1 else np.zeros(S.shape[1])
        return cls(S.mean(axis=0).tolist(), np.median(S, axis=0).tolist(), std.tolist(), len(S), S)


def _map(fn, items, jobs: int):
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# -- uniform matroid illustration ---------------------------------------------------

@dataclass
class UniformReport:
    n: int
    stats: dict
    targets: list
    config: dict

    def samples_csv(self) -> str:
        rows = []
        for d, st in self.stats.items():
            for s, row in enumerate(st.samples):
                for i, v in enumerate(row):
                    rows.append([d, s, i, v])
        return _csv(["d", "sample", "coefficient", "value"], rows)

    def summary_csv(self) -> str:
        rows = []
        for d, st in self.stats.items():
            for i in range(len(st.mean)):
                rows.append([d, i, st.mean[i], st.median[i], st.std[i], self.targets[i],
                             abs(st.mean[i] - self.targets[i])])
        return _csv(["d", "coefficient", "mean", "median", "std", "target", "deviation"], rows)


def _uniform_item(args):
    n, d, seed, idx = args
    V = sample_sphere(n, d, [seed, d, idx])
    Z = Zonotope([tuple(0.5 * v) for v in V])
    nu = zonotope_intrinsic_volumes(Z).nu[: n + 1]
    # the top coefficient is one parallelotope volume; Hadamard caps it at 1
    sub = V
    top = math.sqrt(max(np.linalg.det(sub @ sub.T), 0.0))
    if abs(nu[n] - top) > 1e-9 * max(1.0, top) or nu[n] > 1.0 + 1e-12:
        raise AssertionError(f"top intrinsic volume {nu[n]} inconsistent with determinant {top}")
    return [float(x) for x in nu]


def uniform_matroid_experiment(n: int, d_list, num_samples: int, seed=0, jobs: int = 1) -> UniformReport:
    """Zonotopes of n random unit-length segments in R^d: nu_i versus C(n, i)."""
    if n >= min(d_list):
        raise ValueError("need n < min(d_list)")
    stats = {}
    for d in d_list:
        vals = _map(_uniform_item, [(n, d, int(seed), i) for i in range(num_samples)], jobs)
        stats[d] = SampleStats.from_samples(vals)
    return UniformReport(n, stats, [comb(n, i) for i in range(n + 1)],
                         {"n": n, "d_list": list(d_list), "num_samples": num_samples, "seed": int(seed)})


# -- random extensions versus Whitney numbers ------------------------------------------

@dataclass
class MainReport:
    config: ExperimentConfig
    powers: list          # lambda-powers j of psi(A)
    targets: list         # [psi(A)]_j
    stats: SampleStats    # normalized nu per power
    raw: SampleStats
    residual: SampleStats  # deletion-contraction residual per power
    log_concave: bool

    @property
    def max_deviation(self) -> float:
        return float(max(abs(m - t) for m, t in zip(self.stats.mean, self.targets)))

    def samples_csv(self) -> str:
        h = self.config.digest()
        rows = []
        for s, row in enumerate(self.stats.samples):
            for j, v in zip(self.powers, row):
                rows.append([h, s, j, v])
        return _csv(["config_hash", "sample", "coefficient", "value"], rows)

    def summary_csv(self) -> str:
        rows = []
        for idx, j in enumerate(self.powers):
            m, t = self.stats.mean[idx], self.targets[idx]
            rows.append([j, m, self.stats.median[idx], self.stats.std[idx], t, abs(m - t),
                         self.residual.mean[idx]])
        return _csv(["coefficient", "mean", "median", "std", "target", "deviation", "del_contr_residual"],
                    rows)


def _nu_of(A: Arrangement, k, h, ell, rng, exact_path: bool, mc_budget: int, grid):
    D = float_composite(A, list(range(len(A))), k, h, ell, rng)
    if exact_path:
        return zonotope_intrinsic_volumes(D.to_zonotope()).as_floats()
    seed = int(rng.integers(2 ** 63))
    res = estimate_intrinsic_volumes_mc(D, grid or None, N=mc_budget, seed=seed)
    return list(res.nu)


def _pick(nu, idx):
    return nu[idx] if 0 <= idx < len(nu) else 0.0


def _main_item(args):
    A, Ad, Ac, cfg, exact_path, idx = args
    k, h, ell = cfg.k, cfg.h, cfg.ell
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, idx]))
    nu = _nu_of(A, k, h, ell, rng, exact_path, cfg.mc_budget, cfg.lambda_grid)
    nud = _nu_of(Ad, k, h, ell, rng, exact_path, cfg.mc_budget, cfg.lambda_grid)
    nuc = _nu_of(Ac, k, h, ell, rng, exact_path, cfg.mc_budget, cfg.lambda_grid)
    return nu, nud, nuc


def extension_concentration_experiment(A: Arrangement, k: int, h: int | None = None, ell: int | None = None,
                            num_samples: int = 40, seed: int = 0, jobs: int = 1,
                            mc_budget: int = 20_000, lambda_grid=None) -> MainReport:
    """Sample composite semiflexible extensions A' of A and compare
    h^(-k n) nu(A') with the coefficients of psi(A).

    The coefficient of lambda^j in psi(A) is matched with
    nu_(d + n k - j)(A'), so for a c-arrangement of rank r the Whitney
    number gamma_i (j = d - c i) meets nu_(n k + c i) when d = c r.
    The deletion-contraction residual uses A'' from A \\ e_n and A''' from
    A / e_n, each normalized by its own element count.
    """
    if not A.is_central:
        raise ValueError("needs a central arrangement")
    c = A.elements[0].codim
    h = default_h(k) if h is None else h
    ell = default_ell(k) if ell is None else ell
    exact_path = c == 1
    n, d = len(A), A.ambient_d
    if not exact_path and d + n * (k + ell) > 6:
        from .matroid import ResourceError
        raise ResourceError("Monte Carlo path limited to composite ambient dimension 6")
    cfg = ExperimentConfig(d=d, n=n, c=c, k=k, h=h, ell=ell, num_samples=num_samples,
                           lambda_grid=list(lambda_grid or []), mc_budget=mc_budget, seed=int(seed))
    Ad, Ac = delete(A, n - 1), contract(A, n - 1)
    psi = A.absolute()
    powers = list(range(d + 1))
    targets = [float(psi[j]) for j in powers]
    results = _map(_main_item, [(A, Ad, Ac, cfg, exact_path, i) for i in range(num_samples)], jobs)
    norm, raw, resid = [], [], []
    lc = True
    for nu, nud, nuc in results:
        if exact_path and not is_log_concave(nu):
            lc = False
        a = [_pick(nu, d + n * k - j) for j in powers]
        b = [_pick(nud, Ad.ambient_d + len(Ad) * k - j) / h ** (k * len(Ad)) for j in powers]
        cc = [_pick(nuc, Ac.ambient_d + len(Ac) * k - j) / h ** (k * len(Ac)) for j in powers]
        scale = float(h) ** (k * n)
        raw.append(a)
        norm.append([x / scale for x in a])
        resid.append([x / scale - y - z for x, y, z in zip(a, b, cc)])
    return MainReport(cfg, powers, targets, SampleStats.from_samples(norm),
                      SampleStats.from_samples(raw), SampleStats.from_samples(resid), lc)


# name used by the command-line `experiment main` contract
theorem_main_experiment = extension_concentration_experiment


def whitney_targets(A: Arrangement) -> list[int]:
    from .matroid import char_poly
    c = A.elements[0].codim
    return list(char_poly(matroid_of(A, c))[2])
