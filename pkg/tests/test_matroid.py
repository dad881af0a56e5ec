from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whitney.exactnum import Poly, is_log_concave
from whitney.matroid import (
    ResourceError,
    boolean,
    catalog,
    char_poly,
    delete_contract,
    fano,
    flats_and_mobius,
    graphic_complete,
    ingleton_check,
    ingleton_expression,
    matroid_from_json,
    matroid_from_matrix,
    matroid_from_rank_table,
    popcount,
    uniform,
    vamos,
)


def chi_by_subsets(M):
    """Whitney's subset expansion: sum over S of (-1)^|S| lambda^(r - r(S))."""
    out = [0] * (M.r + 1)
    for m in range(1 << M.n):
        out[M.r - M.rank(m)] += (-1) ** popcount(m)
    return Poly(out)


CATALOG = ["uniform(2,3)", "uniform(2,4)", "uniform(3,6)", "boolean(4)", "vamos", "fano",
           "graphic-complete(4)"]


@pytest.mark.parametrize("name", CATALOG)
def test_char_poly_matches_subset_expansion(name):
    M = catalog(name)
    assert M.check_axioms()
    assert char_poly(M)[0] == chi_by_subsets(M)


def test_known_polynomials():
    assert char_poly(uniform(2, 3))[0] == Poly([2, -3, 1])
    assert char_poly(boolean(3))[2] == [1, 3, 3, 1]
    assert char_poly(graphic_complete(4))[2] == [1, 6, 11, 6]
    assert char_poly(fano())[0] == Poly([-8, 14, -7, 1])
    assert char_poly(vamos())[2] == [1, 8, 28, 51, 30]


@given(st.integers(1, 5).flatmap(lambda r: st.tuples(st.just(r), st.integers(r, 8))))
@settings(max_examples=25, deadline=None)
def test_uniform_whitney_numbers(rn):
    r, n = rn
    gamma = char_poly(uniform(r, n))[2]
    # below the top rank every subset is a flat with mu = (-1)^i
    assert gamma[:r] == [comb(n, i) for i in range(r)]
    assert is_log_concave(gamma)


@pytest.mark.parametrize("name", CATALOG)
def test_deletion_contraction(name):
    M = catalog(name)
    chi = char_poly(M)[0]
    for e in range(M.n):
        Md, Mc = delete_contract(M, e)
        if M.is_loop(e) or M.is_coloop(e):
            continue
        assert chi == char_poly(Md)[0] - char_poly(Mc)[0]


def test_mobius_sums_to_zero_on_intervals():
    L = flats_and_mobius(fano())
    assert L.mobius[0] == 1
    assert sum(L.mobius) == 0


def test_matrix_matroid_of_k4_incidence():
    # signed incidence columns of K4's edges
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    rows = [[(1 if a == v else -1 if b == v else 0) for a, b in edges] for v in range(4)]
    M = matroid_from_matrix(rows)
    assert M.same_rank_function(graphic_complete(4))


def test_rank_table_and_json_roundtrip():
    M = matroid_from_rank_table(fano().rank_table())
    assert M.same_rank_function(fano())
    assert matroid_from_json(M.to_json()).same_rank_function(M)
    assert matroid_from_json({"name": "vamos"}).same_rank_function(vamos())
    with pytest.raises(ValueError):
        matroid_from_rank_table([0, 1, 1])


def test_catalog_rejects_unknown():
    with pytest.raises(ValueError):
        catalog("uniform(5,3)")
    with pytest.raises(ValueError):
        catalog("petersen")


def test_vamos_violates_ingleton():
    M = vamos()
    res = ingleton_check(M)
    assert not res.satisfied and res.exhaustive
    assert ingleton_expression(M, *res.witness) < 0


@pytest.mark.parametrize("M", [uniform(2, 4), boolean(4), graphic_complete(4)])
def test_representables_satisfy_ingleton(M):
    assert ingleton_check(M).satisfied


def test_ingleton_sampling_is_seeded():
    M = uniform(3, 9)
    a = ingleton_check(M, samples=2000, seed=4)
    b = ingleton_check(M, samples=2000, seed=4)
    assert a == b and not a.exhaustive and a.satisfied


def test_lattice_size_limit():
    with pytest.raises(ResourceError):
        flats_and_mobius(uniform(2, 25))
