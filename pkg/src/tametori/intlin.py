"""Exact integer linear algebra.

Matrices are tuples of row tuples holding ``int`` or ``Fraction`` entries;
nothing in this module ever touches floating point.  The central routine is
:func:`smith`, on top of which finite abelian groups are presented by
invariant factors (:class:`FiniteAbelianGroup`) and the three derived
constructions used elsewhere are built: cokernels of lattice maps, fixed
points of a lattice automorphism on the torsion torus ``X (x) Q/Z``, and
coinvariants of an endomorphism of a finite abelian group.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Iterable, Iterator, Sequence

from .errors import IllDefinedEndo, InfiniteCokernel, NonElliptic

Number = int | Fraction
Vector = tuple[Number, ...]
Matrix = tuple[tuple[Number, ...], ...]


# ---------------------------------------------------------------------------
# basic matrix helpers
# ---------------------------------------------------------------------------


def as_matrix(rows: Iterable[Iterable[Number]]) -> Matrix:
    return tuple(tuple(row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(rows: int, cols: int) -> Matrix:
    return tuple((0,) * cols for _ in range(rows))


def transpose(a: Sequence[Sequence[Number]]) -> Matrix:
    if not a:
        return ()
    return tuple(zip(*a))


def mat_mul(a: Sequence[Sequence[Number]], b: Sequence[Sequence[Number]]) -> Matrix:
    """Product ``a @ b``, skipping zero entries of ``a`` (our matrices are sparse)."""
    if not a:
        return ()
    ncols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * ncols
        for k, x in enumerate(row):
            if x:
                brow = b[k]
                for j in range(ncols):
                    y = brow[j]
                    if y:
                        acc[j] += x * y
        out.append(tuple(acc))
    return tuple(out)


def mat_vec(a: Sequence[Sequence[Number]], v: Sequence[Number]) -> Vector:
    return tuple(sum(x * y for x, y in zip(row, v) if x) for row in a)


def mat_add(a: Sequence[Sequence[Number]], b: Sequence[Sequence[Number]]) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def mat_sub(a: Sequence[Sequence[Number]], b: Sequence[Sequence[Number]]) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def mat_scale(c: Number, a: Sequence[Sequence[Number]]) -> Matrix:
    return tuple(tuple(c * x for x in row) for row in a)


def mat_pow(a: Matrix, k: int) -> Matrix:
    result = identity(len(a))
    base = a
    while k > 0:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


def normalize(a: Sequence[Sequence[Number]]) -> Matrix:
    """Turn integral ``Fraction`` entries into ``int`` so that equal matrices hash equally."""
    return tuple(tuple(_norm(x) for x in row) for row in a)


def _norm(x: Number) -> Number:
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def is_integral(v: Iterable[Number]) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def mod1(v: Iterable[Number]) -> Vector:
    """Reduce a rational vector into ``[0, 1)^n``, i.e. its class in ``Q^n / Z^n``."""
    out = []
    for x in v:
        f = Fraction(x)
        r = f - (f.numerator // f.denominator)
        out.append(_norm(r))
    return tuple(out)


def common_denominator(v: Iterable[Number]) -> int:
    d = 1
    for x in v:
        den = Fraction(x).denominator
        d = d * den // gcd(d, den)
    return d


def det(a: Sequence[Sequence[Number]]) -> Number:
    """Determinant by fraction-free (Bareiss) elimination on integers, exact on rationals."""
    n = len(a)
    if n == 0:
        return 1
    if any(isinstance(x, Fraction) for row in a for x in row):
        return _det_fraction(a)
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _det_fraction(a: Sequence[Sequence[Number]]) -> Number:
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    result = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            result = -result
        result *= m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            if f:
                for j in range(k, n):
                    m[i][j] -= f * m[k][j]
    return _norm(result)


def inverse(a: Sequence[Sequence[Number]]) -> Matrix:
    """Exact inverse over Q (Gauss-Jordan); integral entries come back as ``int``."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        m[k], m[piv] = m[piv], m[k]
        p = m[k][k]
        m[k] = [x / p for x in m[k]]
        for i in range(n):
            if i != k and m[i][k] != 0:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return normalize(row[n:] for row in m)


def rank(a: Sequence[Sequence[Number]]) -> int:
    m = [[Fraction(x) for x in row] for row in a]
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, rows):
            if m[i][c]:
                f = m[i][c] / m[r][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == rows:
            break
    return r


def kernel_basis(a: Sequence[Sequence[Number]]) -> list[Vector]:
    """A basis of the rational right kernel of ``a`` (reduced row echelon form)."""
    m = [[Fraction(x) for x in row] for row in a]
    cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -m[i][f]
        basis.append(tuple(_norm(x) for x in v))
    return basis


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def smith(matrix: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form ``U @ M @ V = D`` with ``U``, ``V`` unimodular.

    Pivots are chosen of minimal absolute value to keep intermediate entries
    small.  The diagonal of ``D`` is non-negative and forms a divisibility
    chain, with zeros (if any) at the end.
    """
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    a = [[int(x) for x in row] for row in matrix]
    if any(Fraction(x).denominator != 1 for row in matrix for x in row):
        raise ValueError("smith() needs an integer matrix")
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, k: int) -> None:  # row_dst += k * row_src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst: int, src: int, k: int) -> None:  # col_dst += k * col_src
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
            rest = [(abs(a[i][t]), i, None) for i in range(t + 1, m) if a[i][t]]
            rest += [(abs(a[t][j]), None, j) for j in range(t + 1, n) if a[t][j]]
            if rest:
                _, i, j = min(rest, key=lambda x: x[0])
                if i is not None:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]

    U, D, V = as_matrix(u), as_matrix(a), as_matrix(v)
    assert mat_mul(mat_mul(U, matrix), V) == D, "Smith form does not re-multiply"
    assert abs(det(U)) == 1 and abs(det(V)) == 1, "Smith transforms are not unimodular"
    return U, D, V


def diagonal(d: Matrix) -> list[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def lattice_basis(columns: Sequence[Sequence[Number]]) -> Matrix:
    """A basis (as matrix columns) of the lattice spanned by rational ``columns`` of full rank."""
    n = len(columns[0])
    den = 1
    for c in columns:
        den = lcm(den, common_denominator(c))
    m = [[int(c[i] * den) for c in columns] for i in range(n)]
    u, d, _ = smith(m)
    diag = diagonal(d)
    if len(diag) < n or any(x == 0 for x in diag):
        raise ValueError("generators do not span a full-rank lattice")
    uinv = inverse(u)
    return normalize([[Fraction(uinv[i][j] * diag[j], den) for j in range(n)] for i in range(n)])


# ---------------------------------------------------------------------------
# finite abelian groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """A finite abelian group ``Z/d_1 + ... + Z/d_k`` with ``d_1 | ... | d_k``, ``d_i > 1``.

    The group is realized inside an ambient quotient (``Z^n / L`` or
    ``Q^n / Z^n``).  ``generators[i]`` is an ambient representative of the
    i-th abstract generator, and ``coord_rows`` recovers coordinates: the
    i-th coordinate of an ambient element ``x`` is ``coord_rows[i] . x``
    modulo ``d_i``.
    """

    invariant_factors: tuple[int, ...]
    generators: tuple[Vector, ...]
    coord_rows: tuple[Vector, ...]

    def __post_init__(self) -> None:
        f = self.invariant_factors
        if any(d <= 1 for d in f) or any(f[i + 1] % f[i] for i in range(len(f) - 1)):
            raise ValueError(f"not an invariant-factor chain: {f}")

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def coordinates(self, x: Sequence[Number]) -> tuple[int, ...]:
        out = []
        for row, d in zip(self.coord_rows, self.invariant_factors):
            c = Fraction(sum(Fraction(r) * y for r, y in zip(row, x)))
            if c.denominator != 1:
                raise ValueError(f"{tuple(x)} is not an element of this group")
            out.append(c.numerator % d)
        return tuple(out)

    def element(self, coords: Sequence[int]) -> Vector:
        dim = len(self.generators[0]) if self.generators else 0
        acc = [Fraction(0)] * dim
        for c, g in zip(coords, self.generators):
            for i in range(dim):
                acc[i] += c * g[i]
        return tuple(_norm(x) for x in acc)

    def elements(self) -> Iterator[tuple[int, ...]]:
        """All elements, in coordinates, in lexicographic order."""
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def endomorphism(self, f: Callable[[Vector], Sequence[Number]]) -> Matrix:
        """Integer matrix of the map induced by the ambient map ``f`` (columns = images)."""
        cols = [self.coordinates(f(g)) for g in self.generators]
        return transpose(cols) if cols else ()

    def __str__(self) -> str:
        if self.is_trivial:
            return "1"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)


TRIVIAL_GROUP = FiniteAbelianGroup((), (), ())


def _group_from_smith(
    factors: Sequence[int], gens: Sequence[Vector], rows: Sequence[Vector], p: int = 0
) -> FiniteAbelianGroup:
    keep_f, keep_g, keep_r = [], [], []
    for d, g, r in zip(factors, gens, rows):
        if p:
            while d % p == 0:
                d //= p
        if d > 1:
            keep_f.append(d)
            keep_g.append(g)
            keep_r.append(r)
    return FiniteAbelianGroup(tuple(keep_f), tuple(keep_g), tuple(keep_r))


def cokernel(m: Sequence[Sequence[int]]) -> FiniteAbelianGroup:
    """``Z^rows / m Z^cols`` as a finite abelian group, generators in ambient coordinates."""
    rows = len(m)
    if rows == 0:
        return TRIVIAL_GROUP
    u, d, _ = smith(m)
    diag = diagonal(d)
    diag += [0] * (rows - len(diag))
    if any(x == 0 for x in diag):
        raise InfiniteCokernel("cokernel has positive rank")
    uinv = inverse(u)
    gens = [tuple(uinv[j][i] for j in range(rows)) for i in range(rows)]
    return _group_from_smith(diag, gens, u)


def prime_to(group: FiniteAbelianGroup, p: int) -> FiniteAbelianGroup:
    """The prime-to-``p`` part of a group presented on the torsion torus ``Q^n/Z^n``.

    Generators ``g_i`` of order ``d_i = p^a m`` are replaced by ``p^a g_i``
    of order ``m``; coordinates rescale accordingly.
    """
    if not p:
        return group
    f, g, r = [], [], []
    for d, gen, row in zip(group.invariant_factors, group.generators, group.coord_rows):
        m = d
        while m % p == 0:
            m //= p
        if m > 1:
            s = d // m
            f.append(m)
            g.append(tuple(_norm(s * Fraction(x)) for x in gen))
            r.append(tuple(_norm(Fraction(x) / s) for x in row))
    # the m's inherit the divisibility chain
    return FiniteAbelianGroup(tuple(f), tuple(g), tuple(r))


def prime_to_order(n: int, p: int) -> int:
    """``n`` with every factor ``p`` removed (``p = 0`` leaves it unchanged)."""
    if p:
        while n % p == 0:
            n //= p
    return n


@dataclass(frozen=True)
class Torsor:
    """Solution set ``base + K`` of a torsion-torus equation.

    ``stabilizer`` is the finite part of ``K``; ``free_rank`` counts the
    directions in which ``K`` is a positive-dimensional subtorus (zero in
    every elliptic situation).
    """

    base: Vector
    stabilizer: FiniteAbelianGroup
    free_rank: int = 0


def solve_torsion_equation(phi: Sequence[Sequence[int]], c: Sequence[Number]) -> Torsor | None:
    """Solve ``(1 - phi) t = c`` in ``Q^n / Z^n``; ``None`` when there is no solution."""
    n = len(phi)
    m = mat_sub(identity(n), phi)
    u, d, v = smith(m)
    diag = diagonal(d)
    uc = mat_vec(u, [Fraction(x) for x in c])
    y = []
    free = 0
    for di, ci in zip(diag, uc):
        if di == 0:
            if Fraction(ci).denominator != 1:
                return None
            y.append(Fraction(0))
            free += 1
        else:
            y.append(Fraction(ci) / di)
    base = mod1(mat_vec(v, y))
    vinv = inverse(v)
    gens = [tuple(Fraction(v[j][i], di) for j in range(n)) for i, di in enumerate(diag) if di]
    rows = [tuple(di * vinv[i][j] for j in range(n)) for i, di in enumerate(diag) if di]
    stab = _group_from_smith([di for di in diag if di], [mod1(g) for g in gens], rows)
    return Torsor(base, stab, free)


def torsion_fixed_points(phi: Sequence[Sequence[int]], p: int = 0) -> FiniteAbelianGroup:
    """Fixed points of ``phi`` on ``X (x) (Q/Z)_{p'}``; isomorphic to ``coker(phi - 1)`` minus its p-part."""
    n = len(phi)
    if det(mat_sub(phi, identity(n))) == 0:
        raise NonElliptic("phi - 1 is singular")
    torsor = solve_torsion_equation(phi, (0,) * n)
    assert torsor is not None and torsor.free_rank == 0
    return prime_to(torsor.stabilizer, p)


def quotient(group: FiniteAbelianGroup, relations: Iterable[Sequence[int]]) -> FiniteAbelianGroup:
    """``group / <relations>``, relations given in the group's coordinates."""
    k = len(group.invariant_factors)
    if k == 0:
        return group
    cols = [tuple(int(i == j) * d for i in range(k)) for j, d in enumerate(group.invariant_factors)]
    cols += [tuple(int(x) for x in rel) for rel in relations]
    u, d, _ = smith(transpose(cols))
    diag = diagonal(d)
    uinv = inverse(u)
    gens = [group.element([uinv[j][i] for j in range(k)]) for i in range(k)]
    rows = mat_mul(u, group.coord_rows)
    return _group_from_smith(diag, gens, rows)


def coinvariants(group: FiniteAbelianGroup, e: Sequence[Sequence[int]]) -> FiniteAbelianGroup:
    """``G / (1 - e) G`` for an endomorphism ``e`` given in generator coordinates."""
    f = group.invariant_factors
    k = len(f)
    if k == 0:
        return group
    for j in range(k):
        for i in range(k):
            if (f[j] * e[i][j]) % f[i]:
                raise IllDefinedEndo("endomorphism does not respect the relations")
    rels = [tuple(int(i == j) - e[i][j] for i in range(k)) for j in range(k)]
    return quotient(group, rels)


def subgroup_order(group: FiniteAbelianGroup, elements: Iterable[Sequence[int]]) -> int:
    """Order of the subgroup generated by ``elements`` (given in coordinates)."""
    return group.order // quotient(group, elements).order
