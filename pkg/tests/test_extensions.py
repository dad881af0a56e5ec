import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import chi_by_subsets, hyperplane_data

from whitney.arrangement import Arrangement, Subspace, coordinate, generic_central, matroid_of, single
from whitney.exactnum import Poly
from whitney.extensions import (
    ExtensionRecord,
    GenericityError,
    composite_sfe,
    direction_is_generic,
    flex_limit_decreasing,
    flex_limit_probe,
    float_composite,
    large_product_ext,
    product_recurrence_residual,
    semiflex_recurrence_residual,
    semiflexible_ext,
    sfe_del_contr_check,
    trivial_ext,
)
from whitney.matroid import ResourceError


def _lines(n):
    return generic_central(n, 2)


@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 3))
@settings(max_examples=20, deadline=None)
def test_trivial_extension_shifts(n, d, ell):
    A = generic_central(n, d)
    assert trivial_ext(A, ell).absolute() == A.absolute().shift(ell)


def test_trivial_extension_of_b2():
    assert trivial_ext(coordinate(2), 1).absolute() == Poly([0, 1, 2, 1])


@pytest.mark.parametrize("k,h", [(1, 1), (1, 3), (2, 2)])
@pytest.mark.parametrize("n,d", [(1, 2), (2, 2), (3, 2), (3, 3)])
def test_large_product_against_subset_expansion(n, d, k, h):
    A = generic_central(n, d)
    B, rec = large_product_ext(A, k, h, seed=11)
    normals, offsets = hyperplane_data(B)
    chi = chi_by_subsets(normals, offsets, B.ambient_d)
    assert B.absolute().coeffs == tuple(abs(c) for c in chi.coeffs)
    want = A.absolute()
    for _ in range(k):
        want = Poly([h, 1]) * want
    assert B.absolute() == want
    assert len(B) == n + k * h and B.ambient_d == d + k
    assert len(rec.directions) == k and all(abs(x) <= 10 ** 4 for s in rec.directions for x in s)


def test_large_product_point_in_line():
    B, _ = large_product_ext(single(1), 1, 2, seed=0)
    assert B.absolute() == Poly([2, 3, 1])


def test_large_product_zero_is_identity():
    A = _lines(2)
    B, _ = large_product_ext(A, 0, 3, seed=0)
    assert B.absolute() == A.absolute()


@given(st.integers(0, 10 ** 6))
@settings(max_examples=10, deadline=None)
def test_large_product_recurrence_any_seed(seed):
    assert product_recurrence_residual(_lines(3), 2, 3, seed).is_zero()


def test_direction_certificate_rejects_bad_choices():
    A = coordinate(2)
    P = A.poset()
    assert not direction_is_generic(P, (1, 0), [1])
    # the line s.x = 0 passes through the origin node
    assert not direction_is_generic(P, (1, 1), [0])
    assert direction_is_generic(P, (1, 2), [1, 2])


def test_reproducible_and_recorded():
    A = _lines(2)
    B1, r1 = semiflexible_ext(A, 0, 1, 2, seed=[5, 1])
    B2, r2 = semiflexible_ext(A, 0, 1, 2, seed=[5, 1])
    assert B1.to_json() == B2.to_json()
    assert r1.to_json() == r2.to_json()
    back = ExtensionRecord.from_json(json.dumps(r1.to_json()))
    assert back.to_json() == r1.to_json()
    assert r1.flex_subspace is not None and r1.attempts >= 2


@pytest.mark.parametrize("e", [0, 1])
@pytest.mark.parametrize("h", [1, 2, 3])
def test_semiflex_recurrence_two_lines(e, h):
    res = semiflex_recurrence_residual(_lines(2), e, 1, h, seed=3)
    assert res.holds, res.normalized


def test_semiflex_recurrence_generic_planes():
    for e in range(3):
        assert semiflex_recurrence_residual(generic_central(3, 3), e, 1, 2, seed=0).holds


def test_semiflex_three_lines_counterexample():
    """Three lines through a point: the recurrence misses lambda + h + 1."""
    for h in (1, 2, 4):
        res = semiflex_recurrence_residual(_lines(3), 0, 1, h, seed=1)
        assert res.normalized == Poly([h + 1, 1])


def test_semiflex_k0_is_relabeled_copy():
    A = _lines(3)
    S, _ = semiflexible_ext(A, 1, 0, 1, seed=0)
    assert matroid_of(S, 1).same_rank_function(matroid_of(A, 1))


def test_semiflex_needs_linear_element():
    A = Arrangement(2, [Subspace.hyperplane([1, 0], 1)])
    with pytest.raises(ValueError):
        semiflexible_ext(A, 0, 1, 1)
    with pytest.raises(ValueError):
        semiflexible_ext(A, 3, 1, 1)


def test_composite_counts_and_determinism():
    B, rec = composite_sfe(single(1), [0], 1, 1, 0, seed=0)
    assert (len(B), B.ambient_d) == (2, 2)
    A = _lines(2)
    B1, r1 = composite_sfe(A, [0, 1], 1, 2, 1, seed=7)
    assert (len(B1), B1.ambient_d) == (2 + 2 * 1 * 2, 2 + 2 * (1 + 1))
    B2, r2 = composite_sfe(A, [0, 1], 1, 2, 1, seed=7)
    assert B1.to_json() == B2.to_json() and r1.to_json() == r2.to_json()
    assert len(r1.steps) == 2
    with pytest.raises(ValueError):
        composite_sfe(A, [0, 0], 1, 1, 0)
    with pytest.raises(ResourceError):
        composite_sfe(A, [0, 1], 3, 8, 0)


@pytest.mark.parametrize("n", [2, 3])
def test_composite_matroid_dominates(n):
    A = _lines(n)
    B, _ = composite_sfe(A, range(n), 1, 1, 0, seed=2)
    M = matroid_of(Arrangement(B.ambient_d, B.elements[:n]), 1)
    MA = matroid_of(A, 1)
    assert M.n == MA.n
    assert all(M.rank(m) >= MA.rank(m) for m in range(1 << n))


def test_flex_limit_two_lines():
    rows = flex_limit_probe(_lines(2), 0, 1, [4, 16, 64], seed=0)
    assert flex_limit_decreasing(rows)
    assert all(r.deviation[0] == 0 for r in rows)
    zero = flex_limit_probe(_lines(2), 0, 0, [4, 16], seed=0)
    assert all(all(v == 0 for v in r.deviation) for r in zero)


def test_sfe_deletion_isomorphism():
    rep = sfe_del_contr_check(_lines(2), 1, 1, 0, seed=0)
    assert rep.deleted_isomorphic and rep.contracted_isomorphic
    rep3 = sfe_del_contr_check(_lines(3), 1, 1, 0, seed=0)
    assert rep3.deleted_isomorphic and not rep3.contracted_isomorphic


def test_float_composite_shape():
    D = float_composite(_lines(2), [0, 1], 1, 3, 2, np.random.default_rng(0))
    assert D.ambient_d == 2 + 2 * 3
    assert len(D.disks) == 4
    assert sorted(dk.radius for dk in D.disks) == pytest.approx([0.5, 0.5, 1.5, 1.5])


def test_genericity_error_type():
    assert issubclass(GenericityError, RuntimeError)
