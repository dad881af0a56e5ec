"""One test per acceptance criterion; conftest prints a PASS/FAIL line for each.

Statistical tolerances come from ``Thresholds`` and can be overridden with a
JSON file named by WHITNEY_THRESHOLDS.
"""

import os
import time
from functools import lru_cache
from math import comb

import numpy as np
import pytest

from whitney import arrangement as arr
from whitney.concentration import (
    Thresholds,
    extension_concentration_experiment,
    levy_csv,
    levy_demo,
    uniform_matroid_experiment,
)
from whitney.convexbody import (
    Discotope,
    Zonotope,
    estimate_intrinsic_volumes_mc,
    kappa,
    wills_log_concave,
    zonotope_intrinsic_volumes,
)
from whitney.exactnum import Poly, is_log_concave
from whitney.extensions import (
    flex_limit_decreasing,
    flex_limit_probe,
    product_recurrence_residual,
    semiflex_recurrence_residual,
)
from whitney.matroid import boolean, char_poly, fano, graphic_complete, ingleton_check, uniform, vamos

TH = Thresholds.load(os.environ.get("WHITNEY_THRESHOLDS"))

GRID_ARRANGEMENTS = [(n, d) for d in (2, 3) for n in (1, 2, 3)]
CUBE_GRID = [0.25 * i for i in range(1, 9)]


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


@lru_cache(maxsize=None)
def mc_cube():
    D = Discotope.from_zonotope(Zonotope.cube(3))
    return estimate_intrinsic_volumes_mc(D, CUBE_GRID, N=100_000, seed=2024)


@lru_cache(maxsize=None)
def mc_ball(d, region="auto"):
    return estimate_intrinsic_volumes_mc(Discotope.ball(d), N=100_000, seed=2024 + d, region=region)


def ball_nu(d):
    return [comb(d, j) * kappa(d) / kappa(d - j) for j in range(d + 1)]


@lru_cache(maxsize=None)
def uniform_report():
    return uniform_matroid_experiment(4, [16, 64], 40, seed=0)


@lru_cache(maxsize=None)
def main_report(k):
    return extension_concentration_experiment(arr.generic_central(2, 2), k, h=3, ell=8, num_samples=40, seed=0)


@pytest.mark.criterion(1)
def test_cube_identity():
    with Timer() as t:
        for d in range(1, 9):
            target = Poly.binomial_power(1, d)
            assert arr.coordinate(d).absolute() == target
            assert zonotope_intrinsic_volumes(Zonotope.cube(d)).poly() == target
    assert t.elapsed < 1.0, f"took {t.elapsed:.2f} s"


@pytest.mark.criterion(2)
def test_deletion_contraction_catalog():
    with Timer() as t:
        cat = arr.arrangement_catalog()
        assert {"coordinate(6)", "generic(6,4)", "braid(4)"} <= set(cat)
        bad = [(name, i) for name, A in cat.items() for i in range(len(A))
               if not arr.del_contr_residual(A, i).absolute_holds]
    assert not bad, f"non-zero residual at {bad}"
    assert t.elapsed < 5.0, f"took {t.elapsed:.2f} s"


@pytest.mark.criterion(3)
def test_c_relation():
    rep = arr.c_relation(arr.transverse_planes(), 2)
    chi, psi, _ = char_poly(uniform(2, 3))
    assert rep.absolute == psi.substitute_power(2)
    assert rep.signed == chi.substitute_power(2)
    # the lambda^(d-r) exponent is reported, and it does not match here
    print("literal-exponent residual:", (rep.absolute - rep.literal_exponent_poly).to_json())
    assert not rep.literal_exponent_matches


@pytest.mark.criterion(4)
def test_large_product_grid():
    with Timer() as t:
        bad = []
        for n, d in GRID_ARRANGEMENTS:
            A = arr.generic_central(n, d)
            for k in (1, 2):
                for h in range(1, 5):
                    for seed in range(20):
                        if not product_recurrence_residual(A, k, h, seed).is_zero():
                            bad.append((n, d, k, h, seed))
    assert not bad, f"non-zero residual at {bad[:5]}"
    assert t.elapsed < 60.0, f"took {t.elapsed:.1f} s"


@pytest.mark.criterion(5)
def test_semiflex_grid():
    open_instances = []
    rows = 0
    for n, d in GRID_ARRANGEMENTS:
        A = arr.generic_central(n, d)
        for e in range(n):
            for k in (1, 2):
                for h in range(1, 5):
                    for seed in range(20):
                        res = semiflex_recurrence_residual(A, e, k, h, seed)
                        rows += 1
                        if not res.holds:
                            open_instances.append((f"generic({n},{d})", e, k, h, seed,
                                                   res.normalized.to_json()))
    k1 = [x for x in open_instances if x[2] == 1]
    print(f"{rows} grid points, {len(open_instances)} non-zero, {len(k1)} at k=1")
    for x in open_instances[:: max(1, len(open_instances) // 12)]:
        print("  open instance:", x)
    assert not open_instances, (f"{len(open_instances)} of {rows} residuals non-zero "
                                f"({len(k1)} at k=1), e.g. {open_instances[0]}")


@pytest.mark.criterion(6)
def test_flex_limit():
    with Timer() as t:
        rows = flex_limit_probe(arr.generic_central(2, 2), 0, 1, [4, 16, 64], seed=0)
    for r in rows:
        print(f"h={r.h} deviation={[str(x) for x in r.deviation]}")
    assert flex_limit_decreasing(rows)
    assert t.elapsed < 120.0


@pytest.mark.criterion(7)
def test_mc_estimator():
    with Timer() as t:
        for region in ("auto", "box"):
            cube = estimate_intrinsic_volumes_mc(Discotope.from_zonotope(Zonotope.cube(3)), CUBE_GRID,
                                                 N=100_000, seed=2024, region=region)
            print(f"cube ({region}): {np.round(cube.nu, 4).tolist()}")
            for est, want in zip(cube.nu, [1, 3, 3, 1]):
                assert abs(est - want) <= TH.mc_rel_tol * want, f"cube {region}: {cube.nu}"
        for d in (2, 3, 4):
            res = mc_ball(d)
            for est, w in zip(res.nu, ball_nu(d)):
                assert abs(est - w) <= TH.mc_rel_tol * w, f"ball d={d}: {res.nu} vs {ball_nu(d)}"
        # box sampling alone, where the enclosing region is not the body itself
        for d in (2, 3, 4):
            res = mc_ball(d, "box")
            rel = [abs(est / w - 1) for est, w in zip(res.nu, ball_nu(d))]
            print(f"ball d={d} (box sampling): max relative error {max(rel):.4f}")
            if d <= 3:
                assert max(rel) <= TH.mc_rel_tol
    assert t.elapsed < 300.0


@pytest.mark.criterion(8)
def test_log_concavity_suite():
    mats = [uniform(r, n) for n in range(1, 9) for r in range(1, min(5, n) + 1)]
    mats += [boolean(n) for n in range(1, 9)] + [graphic_complete(4), fano(), vamos()]
    for M in mats:
        assert is_log_concave(char_poly(M)[2]), M
    wills = [zonotope_intrinsic_volumes(Zonotope.cube(d)) for d in range(1, 9)]
    wills += [mc_cube().wills()] + [mc_ball(d, reg).wills() for d in (2, 3, 4) for reg in ("auto", "box")]
    for w in wills:
        assert wills_log_concave(w, slack=TH.log_concave_slack), w.nu
    for st in uniform_report().stats.values():
        for row in st.samples:
            assert is_log_concave(list(row), slack=TH.log_concave_slack)
    # exact-path samples are checked with zero slack inside the experiment
    assert main_report(1).log_concave


def _ingleton_direct(M, A, B, C, D):
    r = M.rank
    lhs = r(A | B) + r(A | C) + r(A | D) + r(B | C) + r(B | D)
    rhs = r(A) + r(B) + r(C | D) + r(A | B | C) + r(A | B | D)
    return lhs - rhs


@pytest.mark.criterion(9)
def test_ingleton():
    with Timer() as t:
        res = ingleton_check(vamos())
        assert not res.satisfied
        print("Vamos witness:", res.witness_labels(vamos()))
        assert _ingleton_direct(vamos(), *res.witness) < 0
        for M in (uniform(2, 4), boolean(4), graphic_complete(4)):
            ok = ingleton_check(M)
            assert ok.satisfied and ok.exhaustive, M
    assert t.elapsed < 60.0


@pytest.mark.criterion(10)
def test_uniform_concentration():
    with Timer() as t:
        rep = uniform_report()
    s16, s64 = rep.stats[16], rep.stats[64]
    print(f"mean nu_2: d=16 {s16.mean[2]:.4f}, d=64 {s64.mean[2]:.4f}; "
          f"std: {s16.std[2]:.4f} -> {s64.std[2]:.4f}")
    assert abs(s64.mean[2] - comb(4, 2)) <= TH.uniform_mean_tol
    assert s64.std[2] < TH.uniform_std_ratio * s16.std[2]
    assert t.elapsed < 120.0


@pytest.mark.criterion(11)
def test_extension_concentration_probe():
    with Timer() as t:
        r1, r2 = main_report(1), main_report(2)
    for k, r in ((1, r1), (2, r2)):
        print(f"k={k}: mean {np.round(r.stats.mean, 4).tolist()} target {r.targets} "
              f"max deviation {r.max_deviation:.4f}")
    assert t.elapsed < 600.0
    assert r2.max_deviation < r1.max_deviation, (
        f"max deviation {r1.max_deviation:.3f} at k=1 -> {r2.max_deviation:.3f} at k=2")


@pytest.mark.criterion(12)
def test_levy():
    with Timer() as t:
        rows = levy_demo(50, [0.1, 0.2, 0.3, 0.4, 0.5], 100_000, seed=0)
    for r in rows:
        print(f"eps={r.eps} empirical={r.empirical:.5f} bound={r.bound:.5f}")
    assert all(r.passes(TH.levy_z) for r in rows)
    assert t.elapsed < 60.0


@pytest.mark.criterion(13)
def test_determinism():
    D = Discotope.from_zonotope(Zonotope.cube(3))
    a = estimate_intrinsic_volumes_mc(D, CUBE_GRID, N=20_000, seed=7, jobs=1)
    b = estimate_intrinsic_volumes_mc(D, CUBE_GRID, N=20_000, seed=7, jobs=2)
    assert a.nu_csv() == b.nu_csv() and a.volumes_csv() == b.volumes_csv()
    u1 = uniform_matroid_experiment(4, [8, 16], 10, seed=3, jobs=1)
    u2 = uniform_matroid_experiment(4, [8, 16], 10, seed=3, jobs=2)
    assert u1.samples_csv() == u2.samples_csv() and u1.summary_csv() == u2.summary_csv()
    assert levy_csv(levy_demo(20, [0.1, 0.3], 5000, seed=1)) == levy_csv(levy_demo(20, [0.1, 0.3], 5000, seed=1))
    A = arr.generic_central(2, 2)
    m1 = extension_concentration_experiment(A, 1, h=3, ell=2, num_samples=5, seed=1, jobs=1)
    m2 = extension_concentration_experiment(A, 1, h=3, ell=2, num_samples=5, seed=1, jobs=2)
    assert m1.samples_csv() == m2.samples_csv() and m1.summary_csv() == m2.summary_csv()
