import itertools
from fractions import Fraction
from math import gcd, prod

import pytest
from hypothesis import given, strategies as st

from tametori import intlin
from tametori.errors import IllDefinedEndo, NonElliptic


def leibniz_det(m):
    """Determinant by the permutation expansion (independent of elimination)."""
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        total += (-1) ** inversions * prod(m[i][perm[i]] for i in range(n))
    return total


def square_matrices(max_n=4, bound=6):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n), min_size=n, max_size=n)
    )


def generated_subgroup(moduli, gens):
    """Brute-force closure of ``gens`` inside ``Z/m_1 + ... + Z/m_k``."""
    zero = tuple(0 for _ in moduli)
    seen = {zero}
    frontier = [zero]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = tuple((a + b) % m for a, b, m in zip(x, g, moduli))
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return seen


@given(square_matrices())
def test_smith_form_factorization(m):
    u, d, v = intlin.smith(m)
    assert intlin.mat_mul(intlin.mat_mul(u, m), v) == intlin.as_matrix(d)
    assert abs(leibniz_det(u)) == 1 and abs(leibniz_det(v)) == 1
    diag = intlin.diagonal(d)
    nonzero = [x for x in diag if x]
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    n = len(m)
    assert all(d[i][j] == 0 for i in range(n) for j in range(n) if i != j)


@given(square_matrices())
def test_cokernel_order_is_absolute_determinant(m):
    det = leibniz_det(m)
    if det == 0:
        return
    assert intlin.cokernel(m).order == abs(det)
    assert intlin.det(m) == det


@given(square_matrices(max_n=3, bound=4))
def test_inverse_and_rank(m):
    det = leibniz_det(m)
    if det == 0:
        assert intlin.rank(m) < len(m)
        for v in intlin.kernel_basis(m):
            assert all(x == 0 for x in intlin.mat_vec(m, v))
        return
    assert intlin.rank(m) == len(m)
    inv = intlin.inverse(m)
    assert intlin.mat_mul(m, inv) == intlin.identity(len(m))


def test_cokernel_known_groups():
    assert intlin.cokernel([[2, 0], [0, 4]]).invariant_factors == (2, 4)
    assert intlin.cokernel([[2, 0], [0, 3]]).invariant_factors == (6,)
    assert intlin.cokernel([[2, -1], [-1, 2]]).invariant_factors == (3,)
    assert intlin.cokernel([[1, 0], [0, 1]]).is_trivial


@given(st.lists(st.integers(2, 6), min_size=1, max_size=3), st.data())
def test_coinvariants_match_brute_force(moduli, data):
    moduli = sorted(moduli)
    # build a divisibility chain by replacing each modulus with a multiple of the previous
    chain = []
    for m in moduli:
        chain.append(m if not chain else chain[-1] * m)
    group = intlin.cokernel([[chain[i] if i == j else 0 for j in range(len(chain))] for i in range(len(chain))])
    k = len(group.invariant_factors)
    f = group.invariant_factors
    # endomorphisms of Z/f_1 + ... : entry (i, j) must satisfy f_j e_ij = 0 mod f_i
    e = [[data.draw(st.integers(0, f[i] - 1)) * (f[i] // gcd(f[i], f[j])) % f[i] for j in range(k)] for i in range(k)]
    co = intlin.coinvariants(group, e)
    images = [tuple((int(i == j) - e[i][j]) % f[i] for i in range(k)) for j in range(k)]
    sub = generated_subgroup(f, images)
    assert co.order * len(sub) == group.order


def test_coinvariants_reject_ill_defined_endomorphism():
    group = intlin.cokernel([[2, 0], [0, 4]])
    # Z/4 -> Z/2 sending a generator to a generator is well defined ...
    assert intlin.coinvariants(group, [[0, 1], [0, 0]]).order == 1  # 1 - e is unimodular
    # ... but Z/2 -> Z/4 sending a generator to a generator is not
    with pytest.raises(IllDefinedEndo):
        intlin.coinvariants(group, [[0, 0], [1, 0]])


@given(square_matrices(max_n=3, bound=3), st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=6), min_size=3, max_size=3))
def test_torsion_equation_solutions(phi, c):
    n = len(phi)
    c = c[:n]
    one_minus = intlin.mat_sub(intlin.identity(n), phi)
    det = leibniz_det(one_minus)
    torsor = intlin.solve_torsion_equation(phi, c)
    if det == 0:
        return
    assert torsor is not None and torsor.free_rank == 0
    lhs = intlin.mat_vec(one_minus, torsor.base)
    assert intlin.is_integral(Fraction(a) - Fraction(b) for a, b in zip(lhs, c))
    assert torsor.stabilizer.order == abs(det)
    for coords in itertools.islice(torsor.stabilizer.elements(), 20):
        x = torsor.stabilizer.element(coords) or (0,) * n
        assert intlin.is_integral(intlin.mat_vec(one_minus, x))


def test_torsion_fixed_points_strip_p_part():
    phi = [[-1, 0], [0, -1]]  # fixed points of -1 are the 2-torsion, order 4
    assert intlin.torsion_fixed_points(phi).order == 4
    assert intlin.torsion_fixed_points(phi, p=2).order == 1
    assert intlin.torsion_fixed_points(phi, p=3).order == 4
    with pytest.raises(NonElliptic):
        intlin.torsion_fixed_points([[1, 0], [0, -1]])


@given(st.integers(1, 10_000), st.sampled_from([2, 3, 5, 7]))
def test_prime_to_order(n, p):
    m = intlin.prime_to_order(n, p)
    assert n % m == 0 and m % p != 0
    rest = n // m
    while rest % p == 0:
        rest //= p
    assert rest == 1


def test_group_coordinates_round_trip():
    group = intlin.cokernel([[4, 2], [0, 6]])
    for coords in group.elements():
        assert group.coordinates(group.element(coords)) == coords
    assert str(intlin.cokernel([[1]])) == "1"


def test_mod1_and_denominators():
    assert intlin.mod1([Fraction(5, 4), Fraction(-1, 3), 2]) == (Fraction(1, 4), Fraction(2, 3), 0)
    assert intlin.common_denominator([Fraction(1, 4), Fraction(1, 6)]) == 12
