from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tametori import intlin
from tametori.chevalley import build_adjoint
from tametori.classify import coxeter_class
from tametori.kac import (
    all_points,
    assign_point,
    candidate_points,
    class_order,
    expected_mark_sums,
    mark_sums,
)
from tametori.errors import NonElliptic, UnsupportedTwist
from tametori.rootdata import alcove_membership, build_group, simple_affine_roots
from tametori.weyl import elliptic_class_ids, sigma_classes

F = Fraction
SPLIT_TYPES = ["A1", "A2", "A3", "A4", "B2", "C2", "B3", "C3", "D4", "G2"]
COXETER_NUMBERS = {"A1": 2, "A2": 3, "A3": 4, "A4": 5, "B2": 4, "C2": 4, "B3": 6, "C3": 6, "D4": 6, "G2": 6, "F4": 12}


def points_of(ctx):
    return {tuple(kp.point.coords) for kp in all_points(ctx)}


def test_sp4_points(sp4):
    assert points_of(sp4) == {(F(3, 8), F(1, 2)), (F(1, 4), F(1, 2))}


def test_g2_points(g2):
    assert points_of(g2) == {(F(1, 2), F(5, 6)), (F(1, 3), F(2, 3)), (F(1, 2), F(1))}


def test_ramified_su3_points(su3_ramified):
    assert points_of(su3_ramified) == {(F(1, 6), F(1, 6)), (F(0), F(0))}


@pytest.mark.parametrize("name", SPLIT_TYPES + ["F4"])
def test_coxeter_class_sits_at_the_principal_point(name):
    # the Coxeter class is the principal element rho^vee / h: every Kac coordinate is one
    ctx = build_group(name)
    kp = assign_point(ctx, coxeter_class(ctx))
    h = COXETER_NUMBERS[name]
    assert kp.order in (h, 2 * h)  # the Tits lift may have twice the order of w
    assert kp.j == h
    assert set(kp.coords) == {1}


@pytest.mark.parametrize("name", SPLIT_TYPES)
def test_centralizer_dimension_matches_point(name):
    """dim of the fixed subalgebra of Ad(n): rank of Ad(n) - 1 versus roots integral at the point."""
    ctx = build_group(name)
    model = build_adjoint(ctx)
    for kp in all_points(ctx):
        rep = sigma_classes(ctx).representatives[kp.class_id]
        m = model.adjoint_matrix(rep)
        fixed_dim = model.dim - intlin.rank(intlin.mat_sub(m, intlin.identity(model.dim)))
        integral_roots = sum(1 for r in ctx.roots if ctx.pair(r, kp.point.coords) % 1 == 0)
        # the torus element exp(2 pi i x) fixes the whole Cartan subalgebra
        assert fixed_dim == ctx.rank + integral_roots


@pytest.mark.parametrize("name", SPLIT_TYPES)
def test_points_are_in_the_closed_alcove_and_distinct(name):
    ctx = build_group(name)
    points = all_points(ctx)
    assert len(points) == len(elliptic_class_ids(ctx))
    for kp in points:
        assert not str(alcove_membership(ctx, kp.point)).startswith("outside")
        assert all(psi.value(ctx, kp.point.coords) >= 0 for psi in simple_affine_roots(ctx))


def test_twisted_alcoves_beyond_a2_are_unsupported():
    for name, sigma in (("A3", "flip"), ("D4", "(1 3 4)"), ("A1xA1", "flip")):
        with pytest.raises(UnsupportedTwist):
            all_points(build_group(name, sigma=sigma))


@pytest.mark.parametrize("name,sigma", [("C2", "id"), ("G2", "id"), ("B3", "id"), ("A2", "flip")])
def test_kac_coordinates_normalization(name, sigma):
    ctx = build_group(name, sigma=sigma)
    for kp in all_points(ctx):
        assert mark_sums(ctx, kp.coords) == expected_mark_sums(ctx, kp.j)
        values = [psi.value(ctx, kp.point.coords) for psi in simple_affine_roots(ctx)]
        assert [v * kp.j for v in values] == list(kp.coords)


@given(st.sampled_from(["C2", "G2", "B3"]), st.integers(1, 60))
def test_point_independent_of_root_of_unity(name, exponent):
    ctx = build_group(name)
    for cid in elliptic_class_ids(ctx):
        ell = class_order(ctx, cid)
        if Fraction(exponent, ell).denominator != ell:
            continue
        assert assign_point(ctx, cid, exponent=exponent).point == assign_point(ctx, cid).point


def test_f4_points_unique():
    ctx = build_group("F4")
    points = all_points(ctx)
    assert len(points) == 9
    assert len({kp.point.coords for kp in points}) == 9


def test_candidate_points_are_lattice_points(psp4):
    for lam in candidate_points(psp4, 8):
        assert psp4.in_lattice(lam)
    # the adjoint lattice has more candidates than the simply connected one
    assert len(candidate_points(psp4, 8)) > len(candidate_points(psp4.simply_connected(), 8))


def test_non_elliptic_class_rejected(sp4):
    non_elliptic = next(c for c in range(len(sigma_classes(sp4))) if c not in elliptic_class_ids(sp4))
    with pytest.raises(NonElliptic):
        assign_point(sp4, non_elliptic)


def test_tame_points_skip_wild_classes():
    ctx = build_group("G2", p=3, strict_tameness=False)
    assert {kp.order for kp in all_points(ctx)} == {2}
