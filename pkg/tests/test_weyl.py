import pytest
from hypothesis import given, strategies as st

from tametori.errors import GroupTooLarge
from tametori.rootdata import build_group
from tametori.weyl import (
    class_labels,
    coinvariant_cardinality_failures,
    elliptic_class_ids,
    elliptic_order_failures,
    fr_stable_elliptic_classes,
    is_elliptic,
    is_rational_group,
    set_max_order,
    sigma_classes,
    solve_w_fr,
    twisted_centralizer,
    weyl_group,
)
from tametori.weyl import DEFAULT_MAX_ORDER

# (type, sigma) -> (number of twisted classes, number of elliptic ones), from the standard tables
CLASS_COUNTS = {
    ("A1", "id"): (2, 1),
    ("A2", "id"): (3, 1),
    ("A3", "id"): (5, 1),
    ("A4", "id"): (7, 1),
    ("B2", "id"): (5, 2),
    ("C2", "id"): (5, 2),
    ("B3", "id"): (10, 3),
    ("C3", "id"): (10, 3),
    ("D4", "id"): (13, 3),
    ("G2", "id"): (6, 3),
    ("F4", "id"): (25, 9),
    ("A2", "flip"): (3, 2),
    ("A3", "flip"): (5, 2),
    ("D4", "(1 3 4)"): (7, 4),
}


@pytest.mark.parametrize("key", sorted(CLASS_COUNTS))
def test_class_counts(key):
    name, sigma = key
    ctx = build_group(name, sigma=sigma)
    table = sigma_classes(ctx)
    assert (len(table), len(elliptic_class_ids(ctx))) == CLASS_COUNTS[key]
    assert sum(table.sizes()) == ctx.weyl_order


def brute_force_classes(ctx):
    """Twisted classes by direct orbit enumeration, using only group multiplication."""
    group = weyl_group(ctx)
    sig = group.diagram_map(ctx.sigma)
    seen, classes = set(), []
    for w in range(len(group)):
        if w in seen:
            continue
        orbit = {group.prod(group.inv(g), w, sig[g]) for g in range(len(group))}
        seen |= orbit
        classes.append(frozenset(orbit))
    return sorted(classes, key=min)


@pytest.mark.parametrize("name,sigma", [("A3", "id"), ("B3", "id"), ("G2", "id"), ("A2", "flip"), ("A3", "flip")])
def test_classes_match_orbit_enumeration(name, sigma):
    ctx = build_group(name, sigma=sigma)
    table = sigma_classes(ctx)
    assert sorted((frozenset(c) for c in table.classes), key=min) == brute_force_classes(ctx)


@pytest.mark.parametrize("name", ["B3", "G2", "D4"])
def test_centralizer_orbit_stabilizer(name):
    ctx = build_group(name)
    table = sigma_classes(ctx)
    for rep, members in zip(table.representatives, table.classes):
        assert len(twisted_centralizer(ctx, rep)) * len(members) == ctx.weyl_order


@given(st.data())
def test_class_of_is_conjugation_invariant(data):
    ctx = build_group(data.draw(st.sampled_from(["B3", "G2", "A3"])), sigma="id")
    group = weyl_group(ctx)
    table = sigma_classes(ctx)
    w = data.draw(st.integers(0, len(group) - 1))
    g = data.draw(st.integers(0, len(group) - 1))
    assert table.class_of[group.prod(group.inv(g), w, g)] == table.class_of[w]


def test_elliptic_means_no_fixed_vectors(sp4):
    group = weyl_group(sp4)
    for w in range(len(group)):
        m = group.matrix(w)
        det = (m[0][0] - 1) * (m[1][1] - 1) - m[0][1] * m[1][0]
        assert is_elliptic(sp4, w) == (det != 0)


def test_labels(g2, sp4):
    assert set(class_labels(g2, elliptic_class_ids(g2)).values()) == {"G2", "A2", "A1×Ã1"}
    assert set(class_labels(sp4, elliptic_class_ids(sp4)).values()) == {"C2", "A1×A1"}


@pytest.mark.parametrize("name", ["A1", "A2", "A3", "B2", "C2", "B3", "C3", "D4", "G2", "F4"])
def test_structural_identities(name):
    ctx = build_group(name)
    assert is_rational_group(ctx)
    assert elliptic_order_failures(ctx) == []
    assert coinvariant_cardinality_failures(ctx) == []


def test_frobenius_stability_split_is_everything(g2):
    assert fr_stable_elliptic_classes(g2, 7) == elliptic_class_ids(g2)


def test_w_fr_for_unramified_twist():
    # for the unitary group of the flip, w_Fr exists for every elliptic class of A2
    ctx = build_group("A2", fr="flip", q=5)
    for cid in elliptic_class_ids(ctx):
        rep = sigma_classes(ctx).representatives[cid]
        coset = solve_w_fr(ctx, rep, 5)
        assert coset


@pytest.mark.parametrize(
    "name,kw", [("G2", {}), ("C2", {}), ("A2", {"sigma": "flip"}), ("A2", {"fr": "flip"}), ("D4", {"sigma": "(1 3 4)", "fr": "(3 4)"})]
)
def test_w_fr_solutions_form_a_centralizer_coset(name, kw):
    ctx = build_group(name, q=5, **kw)
    group = weyl_group(ctx)
    for cid in fr_stable_elliptic_classes(ctx, 5):
        rep = sigma_classes(ctx).representatives[cid]
        coset = solve_w_fr(ctx, rep, 5)
        centralizer = twisted_centralizer(ctx, rep)
        assert len(coset) == len(centralizer)
        # any two solutions differ by an element of the twisted centralizer
        ratios = {group.mul(group.inv(coset[0]), x) for x in coset}
        assert len(ratios) == len(coset)


def test_max_order_bound():
    try:
        set_max_order(40)
        with pytest.raises(GroupTooLarge):
            weyl_group(build_group("B3"))
        with pytest.raises(GroupTooLarge):
            sigma_classes(build_group("F4"))
    finally:
        set_max_order(DEFAULT_MAX_ORDER)
    assert len(weyl_group(build_group("B3"))) == 48
