import itertools
import json
import math
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from whitney.arrangement import coordinate, generic_central, single, transverse_planes
from whitney.convexbody import (
    ConvergenceError,
    Discotope,
    Disk,
    Zonotope,
    discotope_of,
    distance_to_body,
    estimate_intrinsic_volumes_mc,
    kappa,
    stirling_normalized,
    support_function,
    unit_volume_radius,
    wills_del_contr_residual,
    wills_log_concave,
    zono_delete_contract,
    zonotope_intrinsic_volumes,
)
from whitney.exactnum import Poly, is_log_concave


def _hull(gens):
    pts = np.array([sum(s * np.array(g, dtype=float) for s, g in zip(signs, gens))
                    for signs in itertools.product([-1, 1], repeat=len(gens))])
    return ConvexHull(pts)


def generator_lists(d, lo=1, hi=5):
    vec = st.lists(st.integers(-3, 3), min_size=d, max_size=d).filter(any)
    return st.lists(vec, min_size=lo, max_size=hi)


@given(generator_lists(2))
@settings(max_examples=40, deadline=None)
def test_planar_volumes_against_hull(gens):
    nu = zonotope_intrinsic_volumes(Zonotope(gens)).as_floats()
    arr = np.array(gens, dtype=float)
    if np.linalg.matrix_rank(arr) < 2:
        return
    hull = _hull(gens)
    # in 2D ConvexHull.area is the perimeter
    assert nu[2] == pytest.approx(hull.volume, rel=1e-9)
    assert nu[1] == pytest.approx(hull.area / 2, rel=1e-9)


@given(generator_lists(3, lo=3, hi=5))
@settings(max_examples=25, deadline=None)
def test_spatial_volumes_against_hull(gens):
    if np.linalg.matrix_rank(np.array(gens, dtype=float)) < 3:
        return
    nu = zonotope_intrinsic_volumes(Zonotope(gens)).as_floats()
    hull = _hull(gens)
    assert nu[3] == pytest.approx(hull.volume, rel=1e-9)
    assert nu[2] == pytest.approx(hull.area / 2, rel=1e-9)


@given(generator_lists(3, hi=6))
@settings(max_examples=30, deadline=None)
def test_subset_and_belt_agree(gens):
    Z = Zonotope(gens)
    a = zonotope_intrinsic_volumes(Z, "subset")
    b = zonotope_intrinsic_volumes(Z, "belt")
    for x, y in zip(a.nu, b.nu):
        assert float(x) == pytest.approx(float(y), rel=1e-12, abs=1e-12)
    assert wills_log_concave(a)


@given(generator_lists(3, hi=5), st.data())
@settings(max_examples=30, deadline=None)
def test_wills_deletion_contraction(gens, data):
    i = data.draw(st.integers(0, len(gens) - 1))
    res = wills_del_contr_residual(Zonotope(gens), i)
    assert max(abs(float(r)) for r in res) < 1e-9


@pytest.mark.parametrize("d", range(1, 9))
def test_cube_is_binomial(d):
    w = zonotope_intrinsic_volumes(Zonotope.cube(d))
    assert w.exact and w.poly() == Poly.binomial_power(1, d)
    assert w.poly() == coordinate(d).absolute()
    assert zonotope_intrinsic_volumes(Zonotope.cube(d), "belt").poly() == w.poly()


def test_small_examples():
    seg = zonotope_intrinsic_volumes(Zonotope([[Fraction(3, 2), 2]]))
    assert seg.nu[:2] == [1, 5] and seg.nu[2] == 0
    par = zonotope_intrinsic_volumes(Zonotope([[1, 0], [3, 0]]))
    assert par.nu == [1, 8, 0]
    w = zonotope_intrinsic_volumes(Zonotope([[1, 0], [0, 1], [1, 1]]))
    assert float(w.nu[1]) == pytest.approx(4 + 2 * math.sqrt(2))
    assert w.nu[2] == 12


def test_delete_contract_shapes():
    Zd, Zc = zono_delete_contract(Zonotope.cube(3), 2)
    assert Zc.ambient_d == 2
    assert zonotope_intrinsic_volumes(Zc).poly() == Poly([1, 2, 1])
    single_seg = Zonotope([[Fraction(1, 2), 0]])
    Zd, _ = zono_delete_contract(single_seg, 0)
    assert zonotope_intrinsic_volumes(Zd).poly() == Poly([0, 0, 1])


def test_json_roundtrip_zonotope():
    Z = Zonotope([[Fraction(1, 3), 1], [2, -1]])
    Z2 = Zonotope.from_json(json.loads(json.dumps(Z.to_json())))
    assert Z2.generators == Z.generators


def test_kappa_values():
    assert kappa(0) == 1
    assert kappa(2) == pytest.approx(math.pi)
    assert kappa(3) == pytest.approx(4 * math.pi / 3)
    for m in range(1, 7):
        assert kappa(m) * unit_volume_radius(m) ** m == pytest.approx(1.0)


def test_stirling_limit():
    nu = [1, 4, 6, 4, 1]
    errs = []
    for n in (100, 200, 800):
        s = stirling_normalized(nu, n)
        errs.append(max(abs(a - b) / b for a, b in zip(s, nu)))
    assert errs[0] > errs[1] > errs[2] and errs[2] < 0.02
    assert is_log_concave(stirling_normalized(nu, 50), slack=1e-9)


def test_discotope_of_arrangements():
    D = discotope_of(coordinate(3))
    assert D.is_zonotope() and all(dk.radius == pytest.approx(0.5) for dk in D.disks)
    D2 = discotope_of(single(4, 2))
    assert D2.disks[0].radius == pytest.approx(math.pi ** -0.5)
    assert len(discotope_of(transverse_planes()).disks) == 3


def test_support_function_examples():
    D = discotope_of(coordinate(4))
    assert support_function(D, np.ones(4) / 2) == pytest.approx(1.0)
    disk = Discotope(3, [Disk(np.eye(3)[:2], 2.0)])
    assert support_function(disk, [1, 0, 0]) == pytest.approx(2.0)
    assert support_function(disk, [0, 0, 1]) == 0
    with pytest.raises(ValueError):
        support_function(disk, [1, 1, 0])


def _polygon_distance(gens, x):
    hull = _hull(gens)
    # distance to a convex polygon: 0 inside, else min distance to edges
    eq = hull.equations
    if np.all(eq[:, :2] @ x + eq[:, 2] <= 1e-12):
        return 0.0
    best = np.inf
    P = hull.points
    for a, b in hull.simplices:
        p, q = P[a], P[b]
        t = np.clip((x - p) @ (q - p) / ((q - p) @ (q - p)), 0, 1)
        best = min(best, np.linalg.norm(x - p - t * (q - p)))
    return best


@given(generator_lists(2, lo=2, hi=4), st.tuples(st.floats(-6, 6), st.floats(-6, 6)))
@settings(max_examples=40, deadline=None)
def test_distance_matches_polygon(gens, x):
    if np.linalg.matrix_rank(np.array(gens, dtype=float)) < 2:
        return
    D = Discotope.from_zonotope(Zonotope(gens))
    x = np.array(x)
    assert distance_to_body(D, x) == pytest.approx(_polygon_distance(gens, x), abs=1e-6)


def test_distance_simple_cases():
    D = discotope_of(generic_central(3, 3))
    assert distance_to_body(D, np.zeros(3)) == 0
    seg = Discotope(3, [Disk(np.array([[1.0, 0, 0]]), 0.7)])
    assert distance_to_body(seg, [0.7 + 0.4, 0, 0]) == pytest.approx(0.4)
    disk = Discotope(3, [Disk(np.eye(3)[:2], 1.5)])
    assert distance_to_body(disk, [0, 2.5, 0]) == pytest.approx(1.0)
    assert issubclass(ConvergenceError, RuntimeError)


def test_mc_cube_and_determinism():
    D = Discotope.from_zonotope(Zonotope.cube(3))
    a = estimate_intrinsic_volumes_mc(D, N=20_000, seed=3, jobs=1)
    b = estimate_intrinsic_volumes_mc(D, N=20_000, seed=3, jobs=2)
    assert a.nu_csv() == b.nu_csv() and a.volumes_csv() == b.volumes_csv()
    for est, want in zip(a.nu, [1, 3, 3, 1]):
        assert est == pytest.approx(want, rel=0.12)


def test_mc_point_and_grid_check():
    D = Discotope(2, [])
    r = estimate_intrinsic_volumes_mc(D, grid=[0.5, 1.0, 1.5], N=20_000, seed=1)
    for est, se, want in zip(r.nu, r.nu_se, [1, 0, 0]):
        assert abs(est - want) < 4 * se
    with pytest.raises(ValueError):
        estimate_intrinsic_volumes_mc(D, grid=[1.0, 1.0, 1.0])


def test_ball_closed_form_targets():
    d = 3
    want = [comb(d, j) * kappa(d) / kappa(d - j) for j in range(d + 1)]
    r = estimate_intrinsic_volumes_mc(Discotope.ball(d), N=20_000, seed=2, region="box")
    for est, w in zip(r.nu, want):
        assert est == pytest.approx(w, rel=0.1)
    # the enclosing ball of a ball is the body itself: no sampling error
    exact = estimate_intrinsic_volumes_mc(Discotope.ball(d), N=10_000, seed=2)
    assert exact.nu == pytest.approx(want, rel=1e-9)
    with pytest.raises(ValueError):
        estimate_intrinsic_volumes_mc(Discotope.ball(d), region="sphere")
