from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tametori.errors import IncompatibleTwists, InvalidLattice, SpecError, TamenessViolation, UnsupportedType
from tametori.rootdata import (
    AlcovePoint,
    GroupSpec,
    alcove_membership,
    alcove_vertices,
    build_group,
    central_cocharacters,
    fixed_subspace_dimension,
    format_cocharacter,
    fundamental_group,
    parse_cartan_type,
    simple_affine_roots,
)

# standard tables: (positive roots, |W|, connection index, highest root, |Aut(diagram)|)
STANDARD = {
    "A1": (1, 2, 2, (1,), 1),
    "A2": (3, 6, 3, (1, 1), 2),
    "A3": (6, 24, 4, (1, 1, 1), 2),
    "A4": (10, 120, 5, (1, 1, 1, 1), 2),
    "B2": (4, 8, 2, (1, 2), 1),
    "C2": (4, 8, 2, (2, 1), 1),
    "B3": (9, 48, 2, (1, 2, 2), 1),
    "C3": (9, 48, 2, (2, 2, 1), 1),
    "D4": (12, 192, 4, (1, 2, 1, 1), 6),
    "G2": (6, 12, 1, (3, 2), 1),
    "F4": (24, 1152, 1, (2, 3, 4, 2), 1),
}
TYPES = sorted(STANDARD)


@pytest.mark.parametrize("name", TYPES)
def test_standard_invariants(name):
    ctx = build_group(name)
    npos, worder, conn, high, aut = STANDARD[name]
    assert ctx.num_positive == npos
    assert len(ctx.roots) == 2 * npos
    assert ctx.weyl_order == worder
    assert ctx.connection_index == conn
    assert ctx.highest_roots == (high,)
    assert ctx.aut_group_order == aut


@pytest.mark.parametrize("name", TYPES)
def test_root_system_closed_under_simple_reflections(name):
    ctx = build_group(name)
    roots = set(ctx.roots)
    a = ctx.cartan_matrix
    for r in ctx.roots:
        for i in range(ctx.rank):
            pairing = sum(r[j] * a[i][j] for j in range(ctx.rank))  # <r, simple coroot i>
            image = tuple(x - pairing * int(k == i) for k, x in enumerate(r))
            assert image in roots


@pytest.mark.parametrize("name", TYPES)
def test_inner_product_reproduces_cartan_matrix(name):
    ctx = build_group(name)
    n = ctx.rank
    e = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    for i in range(n):
        for j in range(n):
            assert 2 * ctx.inner(e[j], e[i]) / ctx.inner(e[i], e[i]) == ctx.cartan_matrix[i][j]


def test_bourbaki_numbering_for_c2_and_g2(sp4, g2):
    # the first simple root is short in both
    assert sp4.root_lengths[0] < sp4.root_lengths[1]
    assert g2.root_lengths[1] == 3 * g2.root_lengths[0]


def test_adjoint_lattice(psp4):
    assert psp4.lattice_index == 2
    assert not psp4.is_simply_connected
    reps = central_cocharacters(psp4)
    assert len(reps) == 2 and (0, 0) in [tuple(r) for r in reps]
    assert psp4.simply_connected().is_simply_connected
    assert build_group("D4", isogeny="ad").lattice_index == 4


def test_fundamental_group_coinvariants_under_flip():
    # X_*/Q^vee = Z/4 for the adjoint A3; the flip acts by -1, coinvariants Z/2
    fg = fundamental_group(build_group("A3", isogeny="ad", fr="flip"))
    assert fg.group.order == 4 and fg.coinvariants.order == 2


def test_explicit_lattice_matrix():
    # SO(6)-like lattice: Q^vee plus the half-sum of the outer coroots
    ctx = build_group("A3", isogeny=((1, 0, Fraction(1, 2)), (0, 1, 0), (0, 0, Fraction(1, 2))))
    assert ctx.lattice_index == 2
    with pytest.raises(InvalidLattice):
        build_group("C2", isogeny=((1, 0), (0, 3)))
    with pytest.raises(InvalidLattice):
        build_group("C2", isogeny=((1, Fraction(1, 2)), (0, Fraction(1, 2))))


def test_lattice_must_be_twist_stable():
    half_first = ((Fraction(1, 2), 0), (0, 1))  # Q^vee + a1v/2 for A1 x A1
    build_group("A1xA1", isogeny=half_first)
    with pytest.raises(InvalidLattice):
        build_group("A1xA1", isogeny=half_first, sigma="flip")
    diagonal = ((Fraction(1, 2), 0), (Fraction(1, 2), 1))  # Q^vee + (a1v + a2v)/2 is flip-stable
    assert build_group("A1xA1", isogeny=diagonal, sigma="flip").lattice_index == 2


def test_twist_parsing():
    assert build_group("A2", sigma="flip").sigma.perm == (1, 0)
    assert build_group("A3", sigma="(1 3)").sigma.perm == (2, 1, 0)
    assert build_group("D4", sigma="(1 3 4)").sigma.order == 3
    assert build_group("A1xA1", sigma="flip").sigma.perm == (1, 0)
    assert build_group("A2", sigma=[1, 0]).sigma.perm == (1, 0)
    with pytest.raises(SpecError):
        build_group("C2", sigma="flip")
    with pytest.raises(SpecError):
        build_group("A2", sigma="(1 4)")
    with pytest.raises(IncompatibleTwists):
        build_group("B3", sigma="(1 3)")


def test_frobenius_compatibility():
    # conjugating the triality by a transposition inverts it: fine when q = -1 mod 3, not when q = 1
    build_group("D4", sigma="(1 3 4)", fr="(3 4)", q=5)
    with pytest.raises(IncompatibleTwists):
        build_group("D4", sigma="(1 3 4)", fr="(3 4)", q=7)
    build_group("A2", sigma="flip", fr="flip", q=5)


def test_tameness_and_q_validation():
    with pytest.raises(TamenessViolation):
        build_group("G2", q=3)
    assert build_group("G2", q=3, strict_tameness=False).p == 3
    with pytest.raises(SpecError):
        build_group("C2", q=6)
    with pytest.raises(SpecError):
        build_group(GroupSpec("C2", p=5, q=7))
    assert build_group("C2", q=9).p == 3


def test_bad_types():
    with pytest.raises(UnsupportedType):
        parse_cartan_type("Q3")
    with pytest.raises((SpecError, UnsupportedType)):
        build_group("A0")


@pytest.mark.parametrize("name,dim", [("A1", 1), ("C2", 2), ("G2", 2), ("B3", 3), ("F4", 4)])
def test_fixed_subspace_dimension_split(name, dim):
    assert fixed_subspace_dimension(build_group(name)) == dim


def test_fixed_subspace_dimension_twisted(su3_ramified):
    assert fixed_subspace_dimension(su3_ramified) == 1
    assert fixed_subspace_dimension(build_group("D4", sigma="(1 3 4)")) == 2


def test_alcove_vertices(sp4, su3_ramified, g2):
    assert sorted(alcove_vertices(sp4)) == [(0, 0), (Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 2), 1)]
    assert sorted(alcove_vertices(g2)) == [(0, 0), (Fraction(1, 2), 1), (Fraction(2, 3), 1)]
    assert sorted(alcove_vertices(su3_ramified)) == [(0, 0), (Fraction(1, 4), Fraction(1, 4))]


@pytest.mark.parametrize("name", TYPES)
def test_vertices_lie_on_all_but_one_wall(name):
    ctx = build_group(name)
    walls = simple_affine_roots(ctx)
    assert len(walls) == ctx.rank + 1
    for v in alcove_vertices(ctx):
        values = [psi.value(ctx, v) for psi in walls]
        assert all(x >= 0 for x in values)
        assert sum(x == 0 for x in values) == ctx.rank


@given(st.lists(st.integers(0, 12), min_size=2, max_size=2), st.integers(1, 12))
def test_alcove_membership_matches_wall_values(lam, ell, ):
    ctx = build_group("C2")
    point = AlcovePoint.from_cocharacter(tuple(lam), ell)
    values = [psi.value(ctx, point.coords) for psi in simple_affine_roots(ctx)]
    status = str(alcove_membership(ctx, point))
    if any(x < 0 for x in values):
        assert status.startswith("outside")
    elif all(x > 0 for x in values):
        assert status == "interior"
    else:
        assert status.startswith("boundary") or status.startswith("vertex") or "wall" in status


def test_point_formatting():
    assert format_cocharacter((3, 4), 8) == "x0 + (3a1v + 4a2v)/8"
    assert AlcovePoint.from_cocharacter((0, 0), 2).format() == "x0"
    assert AlcovePoint.from_cocharacter((2, 4), 8).reduced.format() == "x0 + (a1v + 2a2v)/4"
