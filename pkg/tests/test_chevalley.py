import itertools
from math import prod

import pytest
from hypothesis import given, strategies as st

from tametori import intlin
from tametori.chevalley import (
    ChevalleyModel,
    build_adjoint,
    charpoly,
    check_jacobi,
    check_sigma_automorphism,
    check_tits_relations,
    cyclotomic,
    eigenvalue_profile,
    matrix_order,
    minus_one_checks,
    poly_mul,
)
from tametori.errors import PreconditionFailed
from tametori.rootdata import build_group

ALL_TYPES = ["A1", "A2", "A3", "A4", "B2", "C2", "B3", "C3", "D4", "G2", "F4"]
MINUS_ONE_TYPES = ["A1", "B2", "C2", "B3", "C3", "D4", "G2", "F4"]


def string_length_below(ctx, a, b):
    """Largest p with roots[b] - p roots[a] a root (direct search in the root set)."""
    roots = set(ctx.roots)
    ra, rb = ctx.roots[a], ctx.roots[b]
    p = 0
    while tuple(y - (p + 1) * x for x, y in zip(ra, rb)) in roots:
        p += 1
    return p


@pytest.mark.parametrize("name", ["A2", "B2", "G2", "A3", "B3", "C3"])
def test_structure_constants_are_chevalley(name):
    ctx = build_group(name)
    model = build_adjoint(ctx)
    roots = set(ctx.roots)
    for a, b in itertools.product(range(len(ctx.roots)), repeat=2):
        s = tuple(x + y for x, y in zip(ctx.roots[a], ctx.roots[b]))
        if s in roots:
            assert abs(model.n(a, b)) == string_length_below(ctx, a, b) + 1
            assert model.n(a, b) == -model.n(b, a)
        else:
            assert model.n(a, b) == 0


@pytest.mark.parametrize("name", ["A2", "B2", "C2", "G2"])
def test_jacobi_identity_exhaustive(name):
    model = build_adjoint(build_group(name))
    assert check_jacobi(model, itertools.product(range(model.dim), repeat=3))


@given(st.data())
def test_jacobi_identity_random(data):
    name = data.draw(st.sampled_from(["B3", "C3", "D4", "A4"]))
    model = build_adjoint(build_group(name))
    triple = tuple(data.draw(st.integers(0, model.dim - 1)) for _ in range(3))
    assert check_jacobi(model, [triple])


@pytest.mark.parametrize("name", ALL_TYPES)
def test_tits_relations(name):
    assert check_tits_relations(build_adjoint(build_group(name))) == []


@pytest.mark.parametrize("name", ["A3", "B3", "D4"])
def test_corrupted_structure_constants_are_detected(name):
    ctx = build_group(name)
    faulty = ChevalleyModel(ctx, fault="structure-constants")
    assert any("braid" in f for f in check_tits_relations(faulty))
    assert not check_jacobi(faulty, itertools.product(range(faulty.dim), repeat=3))


@pytest.mark.parametrize("name,sigma", [("A2", "flip"), ("A3", "flip"), ("D4", "(1 3 4)"), ("A1xA1", "flip")])
def test_pinned_diagram_automorphism(name, sigma):
    ctx = build_group(name, sigma=sigma)
    assert check_sigma_automorphism(build_adjoint(ctx), ctx.sigma)


@pytest.mark.parametrize("name", MINUS_ONE_TYPES)
def test_minus_one_lifts(name):
    report = minus_one_checks(build_group(name))
    assert report.ok, report


def test_minus_one_requires_minus_one_in_weyl_group():
    with pytest.raises(PreconditionFailed):
        minus_one_checks(build_group("A2"))


@pytest.mark.parametrize("n", range(1, 25))
def test_cyclotomic_factorization(n):
    product = (1,)
    for d in range(1, n + 1):
        if n % d == 0:
            product = poly_mul(product, cyclotomic(d))
    # coefficient lists are lowest degree first: x^n - 1
    assert list(product) == [-1] + [0] * (n - 1) + [1]


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=3, max_size=3), st.integers(-4, 4))
def test_charpoly_evaluates_to_determinant(m, x):
    poly = charpoly(m)
    value = sum(c * x**k for k, c in enumerate(poly))
    shifted = [[(x if i == j else 0) - m[i][j] for j in range(3)] for i in range(3)]
    det = sum(
        (-1) ** sum(p[i] > p[j] for i in range(3) for j in range(i + 1, 3)) * prod(shifted[i][p[i]] for i in range(3))
        for p in itertools.permutations(range(3))
    )
    assert value == det


@pytest.mark.parametrize("name,coxeter_number", [("A2", 3), ("B2", 4), ("G2", 6), ("B3", 6), ("D4", 6), ("F4", 12)])
def test_coxeter_element_order(name, coxeter_number):
    ctx = build_group(name)
    model = build_adjoint(ctx)
    m = model.tits_lift(list(range(ctx.rank))).matrix
    cartan_block = [row[: ctx.rank] for row in m[: ctx.rank]]
    assert matrix_order(cartan_block) == coxeter_number
    assert intlin.det(intlin.mat_sub(cartan_block, intlin.identity(ctx.rank))) != 0
    assert eigenvalue_profile(m).dimension == model.dim
