"""Chevalley basis, adjoint matrices, Tits-group lifts and eigenvalue profiles.

The Lie algebra basis is ``h_1..h_r`` (the simple coroots) followed by one
root vector ``e_beta`` per root, in the root order of the context.
Structure constants ``[e_a, e_b] = N(a, b) e_{a+b}`` are fixed by the
extraspecial-pair algorithm: for every positive non-simple root ``xi`` the
pair ``(a, b)`` with ``a`` minimal gets ``N = +(p + 1)`` and every other
constant follows from the quadratic identities of a Chevalley basis.

Two models of the group ``N(T)`` live here:

* adjoint matrices, computed honestly as ``exp(ad X_a) exp(-ad X_-a) exp(ad X_a)``;
* a combinatorial model on any cocharacter lattice, whose elements are
  pairs ``(t, v)`` meaning ``t . n_v`` with ``t`` a torsion point of the
  torus (a vector of ``X (x) Q/Z``) and ``n_v`` the canonical lift of
  ``v``.  Products need the Tits cocycle ``n_v n_v' = tau(v, v')(-1) n_vv'``
  which is computed from descents and cross-checked against the adjoint
  matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

from . import intlin
from .errors import (
    CheckFailed,
    DecodingFailure,
    NonTorsion,
    NotGaloisStable,
    PreconditionFailed,
    UnsupportedType,
)
from .intlin import Matrix, Vector
from .rootdata import DiagramAut, GroupContext
from .weyl import WeylGroup, weyl_group

# ---------------------------------------------------------------------------
# polynomials (integer coefficient lists, constant term first)
# ---------------------------------------------------------------------------

Poly = tuple[int, ...]


def poly_mul(a: Sequence[int], b: Sequence[int]) -> Poly:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def poly_divmod(a: Sequence[int], b: Sequence[int]) -> tuple[Poly, Poly]:
    """Division by a monic integer polynomial."""
    a = list(a)
    if b[-1] != 1:
        raise ValueError("divisor must be monic")
    q = [0] * max(len(a) - len(b) + 1, 1)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1]
        q[k] = c
        if c:
            for j, y in enumerate(b):
                a[k + j] -= c * y
    rem = a[: len(b) - 1]
    while rem and rem[-1] == 0:
        rem.pop()
    return tuple(q), tuple(rem)


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> Poly:
    """The n-th cyclotomic polynomial, by dividing ``x^n - 1`` by the lower ones."""
    poly: Poly = (-1,) + (0,) * (n - 1) + (1,)
    for d in range(1, n):
        if n % d == 0:
            poly, rem = poly_divmod(poly, cyclotomic(d))
            assert not rem
    return poly


def euler_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


def charpoly(m: Sequence[Sequence[int]]) -> Poly:
    """Characteristic polynomial ``det(x - m)`` (Faddeev-LeVerrier, exact)."""
    n = len(m)
    if n == 0:
        return (1,)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = intlin.zeros(n, n)
    for k in range(1, n + 1):
        # M_k = m (M_{k-1} + c_{n-k+1} I)
        prev = [list(row) for row in mk]
        for i in range(n):
            prev[i][i] += coeffs[n - k + 1]
        mk = intlin.mat_mul(m, prev)
        coeffs[n - k] = -Fraction(sum(mk[i][i] for i in range(n))) / k
    out = []
    for c in coeffs:
        if c.denominator != 1:
            raise ArithmeticError("non-integral characteristic polynomial")
        out.append(c.numerator)
    return tuple(out)


def matrix_blocks(m: Sequence[Sequence[int]]) -> list[list[int]]:
    """Index sets of the diagonal blocks of ``m`` (components of its sparsity graph)."""
    n = len(m)
    adj = [set() for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and m[i][j]:
                adj[i].add(j)
                adj[j].add(i)
    comp = [-1] * n
    out = []
    for s in range(n):
        if comp[s] >= 0:
            continue
        stack, members = [s], []
        comp[s] = len(out)
        while stack:
            u = stack.pop()
            members.append(u)
            for v in adj[u]:
                if comp[v] < 0:
                    comp[v] = len(out)
                    stack.append(v)
        out.append(sorted(members))
    return out


def matrix_order(m: Sequence[Sequence[int]], bound: int = 10000) -> int:
    n = len(m)
    ident = intlin.identity(n)
    cur = intlin.as_matrix(m)
    k = 1
    while cur != ident:
        cur = intlin.normalize(intlin.mat_mul(cur, m))
        k += 1
        if k > bound:
            raise NonTorsion(f"matrix order exceeds {bound}")
    return k


# ---------------------------------------------------------------------------
# eigenvalue profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EigenProfile:
    """Multiplicities ``m_d`` of the cyclotomic factors ``Phi_d`` of a characteristic polynomial.

    ``total_order`` is informational (the order of the matrix, or the
    denominator used on the torus side) and does not take part in equality.
    """

    multiplicities: tuple[tuple[int, int], ...]
    total_order: int = field(default=0, compare=False)

    @property
    def dimension(self) -> int:
        return sum(m * euler_phi(d) for d, m in self.multiplicities)

    def multiplicity(self, d: int) -> int:
        return dict(self.multiplicities).get(d, 0)

    def __str__(self) -> str:
        return " ".join(f"Φ{d}^{m}" for d, m in self.multiplicities)


def profile_from_poly(poly: Sequence[int], order: int) -> EigenProfile:
    mult = {}
    for d in sorted((d for d in range(1, order + 1) if order % d == 0), reverse=True):
        phi = cyclotomic(d)
        while len(poly) >= len(phi):
            q, rem = poly_divmod(poly, phi)
            if rem:
                break
            poly = q
            mult[d] = mult.get(d, 0) + 1
    if tuple(poly) != (1,):
        raise NonTorsion("characteristic polynomial is not a product of cyclotomic factors")
    return EigenProfile(tuple(sorted(mult.items())), order)


def eigenvalue_profile(m: Sequence[Sequence[int]]) -> EigenProfile:
    """Cyclotomic multiplicities of a finite-order integer matrix (block-wise char. polynomials)."""
    order = matrix_order(m)
    poly: Poly = (1,)
    for block in matrix_blocks(m):
        sub = [[m[i][j] for j in block] for i in block]
        poly = poly_mul(poly, charpoly(sub))
    return profile_from_poly(poly, order)


def profile_from_angles(angles: Iterable[Fraction], order: int = 0) -> EigenProfile:
    """Profile of the multiset ``{exp(2 pi i theta)}``; raises if it is not Galois-stable."""
    counts: dict[int, dict[int, int]] = {}
    for theta in angles:
        theta = Fraction(theta) % 1
        d = theta.denominator
        counts.setdefault(d, {})
        counts[d][theta.numerator] = counts[d].get(theta.numerator, 0) + 1
    mult = []
    for d, by_num in sorted(counts.items()):
        values = [by_num.get(k, 0) for k in range(d) if gcd(k, d) == 1]
        if len(set(values)) != 1:
            raise NotGaloisStable(f"eigenvalues of order {d} are not Galois-stable")
        mult.append((d, values[0]))
    return EigenProfile(tuple(mult), order)


# ---------------------------------------------------------------------------
# Chevalley basis
# ---------------------------------------------------------------------------


class ChevalleyModel:
    """Chevalley basis, adjoint matrices and pinned Tits-group lifts for one root system.

    ``fault`` is a test hook: when set, one structure constant is corrupted
    after construction (and the consistency assertions are skipped) so that
    the verification suites can be seen to fail.
    """

    def __init__(self, ctx: GroupContext, fault: str | None = None):
        self.ctx = ctx
        self.fault = fault
        self.rank = ctx.rank
        self.roots = ctx.roots
        self.num_roots = len(self.roots)
        self.dim = self.rank + self.num_roots
        self.index = ctx.root_index
        self.N: dict[tuple[int, int], int] = {}
        self.extraspecial: dict[int, tuple[int, int]] = {}
        self._structure_constants()
        pairs = [k for k in self.N if k[0] < k[1] < ctx.num_positive]
        if fault == "structure-constants" and pairs:  # rank-one types have nothing to corrupt
            key = min(pairs)
            self.N[key] = -self.N[key]
            rev = (key[1], key[0])
            self.N[rev] = -self.N[rev]
        self._ad_cache: dict[int, Matrix] = {}
        self._n_cache: dict[int, Matrix] = {}
        self._sign_cache: dict[int, tuple[int, ...]] = {}

    # -- structure constants ----------------------------------------------

    def _root_sum(self, i: int, j: int) -> int | None:
        r = tuple(x + y for x, y in zip(self.roots[i], self.roots[j]))
        return self.index.get(r)

    def _string_p(self, a: int, b: int) -> int:
        """Largest ``p`` with ``b - p a`` a root."""
        p = 0
        ra, rb = self.roots[a], self.roots[b]
        while tuple(y - (p + 1) * x for x, y in zip(ra, rb)) in self.index:
            p += 1
        return p

    def _structure_constants(self) -> None:
        ctx = self.ctx
        npos = ctx.num_positive
        pos = list(range(npos))
        for xi in pos:
            pairs = []
            for a in pos:
                b = self._index_of_difference(xi, a)
                if b is not None and b < npos and a < b:
                    pairs.append((a, b))
            if not pairs:
                continue  # simple root
            a, b = min(pairs)
            self.extraspecial[xi] = (a, b)
            self.N[(a, b)] = self._string_p(a, b) + 1
            self.N[(b, a)] = -self.N[(a, b)]
            norm_xi = ctx.inner(self.roots[xi], self.roots[xi])
            for c, d in pairs:
                if (c, d) == (a, b):
                    continue
                val = Fraction(0)
                # N(c,d) = (xi,xi)/N(a,b) [N(b,-c)N(a,-d)/|b-c|^2 + N(-c,a)N(b,-d)/|a-c|^2]
                nc, nd = ctx.negative_index(c), ctx.negative_index(d)
                bc = self._root_sum(b, nc)
                if bc is not None:
                    val += Fraction(self.n(b, nc) * self.n(a, nd), ctx.inner(self.roots[bc], self.roots[bc]))
                ac = self._root_sum(a, nc)
                if ac is not None:
                    val += Fraction(self.n(nc, a) * self.n(b, nd), ctx.inner(self.roots[ac], self.roots[ac]))
                val = val * norm_xi / self.N[(a, b)]
                if val.denominator != 1:
                    raise AssertionError("non-integral structure constant")
                self.N[(c, d)] = val.numerator
                self.N[(d, c)] = -val.numerator

    def _index_of_difference(self, i: int, j: int) -> int | None:
        r = tuple(x - y for x, y in zip(self.roots[i], self.roots[j]))
        return self.index.get(r)

    def n(self, i: int, j: int) -> int:
        """Structure constant ``N(roots[i], roots[j])``; zero if the sum is not a root."""
        s = self._root_sum(i, j)
        if s is None:
            return 0
        npos = self.ctx.num_positive
        if i < npos and j < npos:
            return self.N[(i, j)]
        ctx = self.ctx
        if i >= npos and j >= npos:
            return -self.n(ctx.negative_index(i), ctx.negative_index(j))
        if i >= npos:  # negative first
            return -self.n(j, i)
        # i positive, j negative, s = i + j
        ri, rj, rs = self.roots[i], self.roots[j], self.roots[s]
        nj = ctx.negative_index(j)
        if s < npos:
            val = Fraction(ctx.inner(rs, rs), ctx.inner(ri, ri)) * -self.n(nj, s)
        else:
            val = Fraction(ctx.inner(rs, rs), ctx.inner(rj, rj)) * self.n(ctx.negative_index(s), i)
        assert val.denominator == 1
        return val.numerator

    # -- brackets -----------------------------------------------------------

    def bracket_basis(self, x: int, y: int) -> dict[int, int]:
        """``[b_x, b_y]`` for basis indices, as a sparse coefficient dict."""
        r = self.rank
        if x < r and y < r:
            return {}
        if x < r:
            beta = self.roots[y - r]
            c = sum(self.ctx.cartan_matrix[x][j] * beta[j] for j in range(r))
            return {y: c} if c else {}
        if y < r:
            return {k: -v for k, v in self.bracket_basis(y, x).items()}
        a, b = x - r, y - r
        if self.ctx.negative_index(a) == b:
            cor = self.ctx.coroots[a]
            return {i: int(cor[i]) for i in range(r) if cor[i]}
        s = self._root_sum(a, b)
        if s is None:
            return {}
        return {s + r: self.n(a, b)}

    def bracket(self, u: Sequence, v: Sequence) -> tuple:
        out = [0] * self.dim
        for i, x in enumerate(u):
            if x:
                for j, y in enumerate(v):
                    if y:
                        for k, c in self.bracket_basis(i, j).items():
                            out[k] += x * y * c
        return tuple(out)

    def ad(self, basis_index: int) -> Matrix:
        m = self._ad_cache.get(basis_index)
        if m is None:
            cols = [[0] * self.dim for _ in range(self.dim)]
            for j in range(self.dim):
                for k, c in self.bracket_basis(basis_index, j).items():
                    cols[k][j] = c
            m = intlin.as_matrix(cols)
            self._ad_cache[basis_index] = m
        return m

    def ad_root(self, root_index: int) -> Matrix:
        return self.ad(self.rank + root_index)

    # -- group elements -----------------------------------------------------

    def exp_ad(self, root_index: int, c: int = 1) -> Matrix:
        """``exp(c ad e_a)`` for the nilpotent ``ad e_a`` (exact)."""
        x = intlin.mat_scale(c, self.ad_root(root_index))
        total = [[Fraction(int(i == j)) for j in range(self.dim)] for i in range(self.dim)]
        term = intlin.identity(self.dim)
        k = 0
        while True:
            k += 1
            term = intlin.mat_scale(Fraction(1, k), intlin.mat_mul(term, x))
            if not any(v for row in term for v in row):
                break
            total = intlin.mat_add(total, term)
        return intlin.normalize(total)

    def n_simple(self, i: int) -> Matrix:
        """Adjoint matrix of ``n_a = x_a(1) x_{-a}(-1) x_a(1)`` for the i-th simple root."""
        m = self._n_cache.get(i)
        if m is None:
            neg = self.ctx.negative_index(i)
            xa = self.exp_ad(i)
            m = intlin.normalize(intlin.mat_mul(intlin.mat_mul(xa, self.exp_ad(neg, -1)), xa))
            if not all(isinstance(v, int) for row in m for v in row):
                raise CheckFailed("n_a is not integral")
            self._n_cache[i] = m
        return m

    def torus_matrix(self, mu: Sequence) -> Matrix:
        """Adjoint matrix of ``mu(-1)`` for an integral cocharacter ``mu`` (coroot coordinates)."""
        diag = [1] * self.rank + [(-1) ** int(self.ctx.pair(r, mu) % 2) for r in self.roots]
        return tuple(tuple(diag[i] if i == j else 0 for j in range(self.dim)) for i in range(self.dim))

    def simple_signs(self, i: int) -> tuple[int, ...]:
        """``Ad(n_a) e_beta = sign[beta] e_{s_a beta}``: the signs, read off the matrix."""
        s = self._sign_cache.get(i)
        if s is None:
            m = self.n_simple(i)
            group = weyl_group(self.ctx)
            refl = group.simple_perms[i]
            r = self.rank
            out = []
            for b in range(self.num_roots):
                col = [m[k][r + b] for k in range(self.dim)]
                target = r + refl[b]
                if any(col[k] for k in range(self.dim) if k != target) or abs(col[target]) != 1:
                    raise CheckFailed("n_a is not monomial on root spaces")
                out.append(col[target])
            s = tuple(out)
            self._sign_cache[i] = s
        return s

    def tits_lift(self, word: Sequence[int]) -> "TitsElement":
        """Product of the generator matrices along ``word`` with its Weyl part."""
        group = weyl_group(self.ctx)
        m = intlin.identity(self.dim)
        for i in word:
            m = intlin.mat_mul(m, self.n_simple(i))
        return TitsElement(intlin.normalize(m), group.from_word(word), None)

    def pinned_sigma(self, aut: DiagramAut) -> Matrix:
        """The automorphism of the Lie algebra permuting the pinned generators ``e_{+-a_i}``."""
        signs = self.sigma_signs(aut)
        r = self.rank
        cols = [[0] * self.dim for _ in range(self.dim)]
        for i in range(r):
            cols[aut.perm[i]][i] = 1
        for b, root in enumerate(self.roots):
            img = self.index[aut.apply(root)]
            cols[r + img][r + b] = signs[b]
        return intlin.as_matrix(cols)

    def sigma_signs(self, aut: DiagramAut) -> tuple[int, ...]:
        """``sigma_hat(e_beta) = eps_beta e_{sigma beta}``, built through extraspecial pairs."""
        npos = self.ctx.num_positive
        eps = [0] * self.num_roots
        for k in range(npos):
            if k not in self.extraspecial:
                eps[k] = 1
                continue
            a, b = self.extraspecial[k]
            sa, sb = (self.index[aut.apply(self.roots[x])] for x in (a, b))
            val = Fraction(eps[a] * eps[b] * self.n(sa, sb), self.n(a, b))
            if abs(val) != 1:
                raise CheckFailed("diagram automorphism does not preserve |N|")
            eps[k] = int(val)
        for k in range(npos):
            eps[self.ctx.negative_index(k)] = eps[k]
        return tuple(eps)

    # -- monomial form of the normalizer action -----------------------------

    @property
    def weyl(self) -> WeylGroup:
        return weyl_group(self.ctx)

    def signs(self, v: int) -> tuple[int, ...]:
        """Signs of ``Ad(n_v)`` on root spaces for the canonical lift ``n_v`` of Weyl element ``v``."""
        key = -1 - v
        s = self._sign_cache.get(key)
        if s is None:
            group = self.weyl
            word = group.words[v]
            if not word:
                s = (1,) * self.num_roots
            else:
                parent = group.from_word(word[:-1])
                ps = self.signs(parent)
                last = word[-1]
                refl = group.simple_perms[last]
                ss = self.simple_signs(last)
                # Ad(n_u n_s) e_b = ss[b] Ad(n_u) e_{s b} = ss[b] ps[s b] e_{u s b}
                s = tuple(ss[b] * ps[refl[b]] for b in range(self.num_roots))
            self._sign_cache[key] = s
        return s

    def adjoint_matrix(self, v: int, mu: Sequence | None = None, aut: DiagramAut | None = None) -> Matrix:
        """Dense adjoint matrix of ``mu(-1) n_v sigma_hat`` assembled from the monomial data."""
        group = self.weyl
        r = self.rank
        signs = self.signs(v)
        perm = group.perms[v]
        if aut is None:
            aut = DiagramAut.identity(r)
        ssig = self.sigma_signs(aut)
        wm = intlin.mat_mul(group.matrix(v), aut.matrix())
        cols = [[0] * self.dim for _ in range(self.dim)]
        for i in range(r):
            for j in range(r):
                cols[i][j] = wm[i][j]
        for b, root in enumerate(self.roots):
            sb = self.index[aut.apply(root)]
            img = perm[sb]
            val = ssig[b] * signs[sb]
            if mu is not None and int(self.ctx.pair(self.roots[img], mu)) % 2:
                val = -val
            cols[r + img][r + b] = val
        return intlin.as_matrix(cols)


@dataclass(frozen=True)
class TitsElement:
    """An element of the Tits group: adjoint matrix, Weyl part and (if known) torus part mod 2."""

    matrix: Matrix
    weyl_part: int
    torus_part_mod2: tuple[int, ...] | None


@lru_cache(maxsize=None)
def _cached_model(cartan_type, cartan_matrix) -> ChevalleyModel:
    from .rootdata import build_group, type_name

    return ChevalleyModel(build_group(type_name(cartan_type)))


def build_adjoint(ctx: GroupContext, fault: str | None = None) -> ChevalleyModel:
    """The Chevalley model of the root system of ``ctx`` (cached unless a fault is injected)."""
    if any(letter == "E" for letter, _ in ctx.cartan_type):
        raise UnsupportedType("exceptional types E6-E8 are beyond the supported bound")
    if fault:
        return ChevalleyModel(ctx, fault)
    return _cached_model(ctx.cartan_type, ctx.cartan_matrix)


# ---------------------------------------------------------------------------
# verification helpers
# ---------------------------------------------------------------------------


def check_jacobi(model: ChevalleyModel, triples: Iterable[tuple[int, int, int]]) -> bool:
    for x, y, z in triples:
        ex = [int(i == x) for i in range(model.dim)]
        ey = [int(i == y) for i in range(model.dim)]
        ez = [int(i == z) for i in range(model.dim)]
        t1 = model.bracket(ex, model.bracket(ey, ez))
        t2 = model.bracket(ey, model.bracket(ez, ex))
        t3 = model.bracket(ez, model.bracket(ex, ey))
        if any(a + b + c for a, b, c in zip(t1, t2, t3)):
            return False
    return True


def check_tits_relations(model: ChevalleyModel) -> list[str]:
    """``n_a^2 = Ad(a^vee(-1))`` and the braid relations; returns the list of failures."""
    failures = []
    ctx = model.ctx
    r = ctx.rank
    for i in range(r):
        sq = intlin.mat_mul(model.n_simple(i), model.n_simple(i))
        if intlin.normalize(sq) != model.torus_matrix(ctx.coroots[i]):
            failures.append(f"n_{i + 1}^2 != Ad(coroot(-1))")
    group = model.weyl
    for i in range(r):
        for j in range(i + 1, r):
            m = group.order_of(group.mul(group.simple[i], group.simple[j]))
            left = [i, j] * (m // 2) + ([i] if m % 2 else [])
            right = [j, i] * (m // 2) + ([j] if m % 2 else [])
            if model.tits_lift(left).matrix != model.tits_lift(right).matrix:
                failures.append(f"braid relation ({i + 1},{j + 1}) of order {m} fails")
    return failures


def check_sigma_automorphism(model: ChevalleyModel, aut: DiagramAut) -> bool:
    """``sigma_hat`` is a Lie algebra automorphism and conjugates ``n_a`` to ``n_{sigma a}``."""
    s = model.pinned_sigma(aut)
    s_inv = intlin.inverse(s)
    for x in range(model.dim):
        for y in range(model.dim):
            ex = [int(i == x) for i in range(model.dim)]
            ey = [int(i == y) for i in range(model.dim)]
            lhs = intlin.mat_vec(s, model.bracket(ex, ey))
            rhs = model.bracket(intlin.mat_vec(s, ex), intlin.mat_vec(s, ey))
            if tuple(lhs) != tuple(rhs):
                return False
    for i in range(model.rank):
        conj = intlin.normalize(intlin.mat_mul(intlin.mat_mul(s, model.n_simple(i)), s_inv))
        if conj != model.n_simple(aut.perm[i]):
            return False
    return True


# ---------------------------------------------------------------------------
# the normalizer on a cocharacter lattice
# ---------------------------------------------------------------------------

TorsionVec = tuple  # rational vector mod 1, lattice coordinates


class NormalizerModel:
    """``(X (x) Q/Z) . Tits group`` on the cocharacter lattice of ``ctx``.

    Elements are pairs ``(t, v)``: ``t`` is a vector in lattice coordinates
    read modulo 1 (the torus point ``exp(2 pi i t)``) and ``v`` a Weyl index;
    the pair stands for ``t . n_v``.  ``mu(-1)`` is ``mu / 2``.
    """

    def __init__(self, ctx: GroupContext, check: bool = True):
        self.ctx = ctx
        self.group = weyl_group(ctx)
        self.rank = ctx.rank
        self._lat: dict[int, Matrix] = {}
        self._tau: dict[tuple[int, int], tuple[int, ...]] = {}
        self.coroots_lat = [tuple(int(x) for x in ctx.to_lattice(tuple(int(i == j) for j in range(ctx.rank)))) for i in range(ctx.rank)]
        self.sigma_map = self.group.diagram_map(ctx.sigma)
        self.fr_map = self.group.diagram_map(ctx.fr)
        self.sigma_lat = ctx.lattice_matrix(ctx.sigma.matrix())
        self.fr_lat = ctx.lattice_matrix(ctx.fr.matrix())
        self.check = check

    # -- lattice action ----------------------------------------------------

    def weyl_lattice(self, v: int) -> Matrix:
        m = self._lat.get(v)
        if m is None:
            m = self.ctx.lattice_matrix(self.group.matrix(v))
            self._lat[v] = m
        return m

    def tau(self, v: int, w: int) -> tuple[int, ...]:
        """``n_v n_w = tau(-1) n_vw`` with ``tau`` in ``X/2X`` (lattice coordinates, entries 0/1)."""
        key = (v, w)
        out = self._tau.get(key)
        if out is None:
            group = self.group
            npos = self.ctx.num_positive
            acc = [0] * self.rank
            cur = v
            for s in group.words[w]:
                nxt = group.mul(cur, group.simple[s])
                if group.perms[cur][s] >= npos:  # descent: n_cur n_s = (cur s)(a_s^vee)(-1) n_{cur s}
                    img = intlin.mat_vec(self.weyl_lattice(nxt), self.coroots_lat[s])
                    acc = [a + b for a, b in zip(acc, img)]
                cur = nxt
            out = tuple(int(x) % 2 for x in acc)
            self._tau[key] = out
        return out

    # -- group law -------------------------------------------------------------

    def mul(self, x: tuple[TorsionVec, int], y: tuple[TorsionVec, int]) -> tuple[TorsionVec, int]:
        t, v = x
        u, w = y
        vu = intlin.mat_vec(self.weyl_lattice(v), u)
        tau = self.tau(v, w)
        new = intlin.mod1(Fraction(a) + b + Fraction(c, 2) for a, b, c in zip(t, vu, tau))
        return new, self.group.mul(v, w)

    def inv(self, x: tuple[TorsionVec, int]) -> tuple[TorsionVec, int]:
        t, v = x
        vi = self.group.inv(v)
        tau = self.tau(v, vi)
        rhs = [-Fraction(a) - Fraction(c, 2) for a, c in zip(t, tau)]
        return intlin.mod1(intlin.mat_vec(self.weyl_lattice(vi), rhs)), vi

    def identity(self) -> tuple[TorsionVec, int]:
        return (0,) * self.rank, 0

    def lift(self, v: int) -> tuple[TorsionVec, int]:
        return (0,) * self.rank, v

    def torus(self, t: Sequence) -> tuple[TorsionVec, int]:
        return intlin.mod1(t), 0

    def power(self, x, k: int):
        out = self.identity()
        for _ in range(k):
            out = self.mul(out, x)
        return out

    def sigma(self, x, k: int = 1):
        t, v = x
        for _ in range(k):
            t = intlin.mod1(intlin.mat_vec(self.sigma_lat, t))
            v = self.sigma_map[v]
        return t, v

    def frobenius(self, x, q: int):
        """``Fr`` on the normalizer: the q-power map on torsion points composed with the diagram twist."""
        t, v = x
        t = intlin.mod1(q * Fraction(y) for y in intlin.mat_vec(self.fr_lat, t))
        return t, self.fr_map[v]

    def twisted_power(self, x, k: int):
        """Element part of ``(x sigma)^k = x sigma(x) ... sigma^{k-1}(x) sigma^k``."""
        out = self.identity()
        cur = x
        for _ in range(k):
            out = self.mul(out, cur)
            cur = self.sigma(cur)
        return out

    def twisted_order(self, x) -> int:
        """Order of ``x sigma`` in the semidirect product with the diagram twist."""
        d = self.ctx.sigma.order
        base = self.twisted_power(x, d)
        k = 1
        cur = base
        while cur != self.identity():
            cur = self.mul(cur, base)
            k += 1
            if k > 10000:
                raise NonTorsion("element of infinite order")
        return d * k

    def order(self, x) -> int:
        k, cur = 1, x
        while cur != self.identity():
            cur = self.mul(cur, x)
            k += 1
            if k > 10000:
                raise NonTorsion("element of infinite order")
        return k

    def conj(self, g, x):
        """``g x g^{-1}``."""
        return self.mul(self.mul(g, x), self.inv(g))


def decode_torus_signs(ctx: GroupContext, signs: Sequence[int]) -> tuple[int, ...]:
    """Find ``mu`` (mod 2, coweight coordinates) with ``(-1)^<beta, mu> = signs[beta]`` for every root."""
    bits = [0 if signs[k] == 1 else 1 for k in range(ctx.rank)]  # simple roots come first
    for k, root in enumerate(ctx.roots):
        predicted = sum(b * c for b, c in zip(bits, root)) % 2
        if (signs[k] == -1) != bool(predicted):
            raise DecodingFailure("sign pattern is not induced by a 2-torsion torus element")
    return tuple(bits)


def tits_cocycle(ctx: GroupContext, model: ChevalleyModel | None = None, pairs: Iterable[tuple[int, int]] | None = None) -> dict[tuple[int, int], tuple[int, ...]]:
    """The Tits cocycle ``tau(v, v')`` in ``X/2X`` (lattice coordinates), verified on the adjoint side.

    For every requested pair, ``Ad(n_v) Ad(n_v') Ad(n_vv')^{-1}`` must be the
    diagonal sign pattern of ``tau(-1)``; the pattern is decoded and
    compared, and any disagreement raises :class:`DecodingFailure`.
    """
    model = build_adjoint(ctx) if model is None else model
    norm = NormalizerModel(ctx)
    group = norm.group
    if pairs is None:
        pairs = [(v, w) for v in range(len(group)) for w in range(len(group))]
    out = {}
    for v, w in pairs:
        tau = norm.tau(v, w)
        sv, sw, svw = model.signs(v), model.signs(w), model.signs(group.mul(v, w))
        perm_w = group.perms[w]
        vw_perm = group.perms[group.mul(v, w)]
        # Ad(n_v n_w) e_b = sw[b] sv[w b] e_{vw b};  Ad(tau(-1) n_vw) e_b = (-1)^<vw b, tau> svw[b] e_{vw b}
        pattern = [0] * len(ctx.roots)
        for b in range(len(ctx.roots)):
            pattern[vw_perm[b]] = sw[b] * sv[perm_w[b]] * svw[b]
        decoded = decode_torus_signs(ctx, pattern)
        mu = ctx.from_lattice(tau)
        expected = tuple(int(ctx.pair(tuple(int(i == j) for j in range(ctx.rank)), mu)) % 2 for i in range(ctx.rank))
        if decoded != expected:
            raise DecodingFailure(f"cocycle mismatch at ({v}, {w})")
        out[(v, w)] = tau
    return out


# ---------------------------------------------------------------------------
# profiles of normalizer elements and of torus elements
# ---------------------------------------------------------------------------


def normalizer_profile(ctx: GroupContext, v: int, model: ChevalleyModel | None = None) -> EigenProfile:
    """Eigenvalue profile of ``Ad(n_v) sigma_hat`` computed from its dense matrix."""
    model = build_adjoint(ctx) if model is None else model
    return eigenvalue_profile(model.adjoint_matrix(v, aut=ctx.sigma))


def torus_sigma_profile(
    ctx: GroupContext,
    lam: Sequence,
    ell: int,
    sigma: DiagramAut | None = None,
    exponent: int = 1,
    model: ChevalleyModel | None = None,
) -> EigenProfile:
    """Predicted profile of ``Ad(lam(zeta_ell)) sigma_hat`` for ``zeta_ell = exp(2 pi i exponent / ell)``.

    A sigma-orbit of ``k`` root spaces on which ``sigma_hat^k`` acts by
    ``eps`` contributes the k-th roots of ``eps zeta^{k <beta, lam>}``; the
    Cartan subalgebra contributes the eigenvalues of the permutation sigma.
    """
    sigma = ctx.sigma if sigma is None else sigma
    model = build_adjoint(ctx) if model is None else model
    if sigma.apply(tuple(lam)) != tuple(lam):
        raise ValueError("lambda must be fixed by sigma")
    eps = model.sigma_signs(sigma)
    angles: list[Fraction] = []
    seen: set[int] = set()
    for b, root in enumerate(ctx.roots):
        if b in seen:
            continue
        orbit, cur, sign = [b], root, eps[b]
        seen.add(b)
        while True:
            cur = sigma.apply(cur)
            k = ctx.root_index[cur]
            if k == b:
                break
            sign *= eps[k]
            orbit.append(k)
            seen.add(k)
        k = len(orbit)
        base = Fraction(exponent * k * ctx.pair(root, lam), ell) + (Fraction(1, 2) if sign == -1 else 0)
        angles.extend((base + j) / k for j in range(k))
    seen_nodes: set[int] = set()
    for i in range(ctx.rank):
        if i in seen_nodes:
            continue
        k, j = 0, i
        while j not in seen_nodes:
            seen_nodes.add(j)
            j = sigma.perm[j]
            k += 1
        angles.extend(Fraction(m, k) for m in range(k))
    return profile_from_angles(angles, ell)


def fixed_subalgebra_signature(model: ChevalleyModel, m: Matrix) -> tuple[int, int]:
    """``(dim g^m, dim [g^m, g^m])`` for an automorphism matrix ``m`` of the Lie algebra."""
    basis = intlin.kernel_basis(intlin.mat_sub(m, intlin.identity(model.dim)))
    brackets = [model.bracket(u, v) for i, u in enumerate(basis) for v in basis[i + 1:]]
    derived = intlin.rank(brackets) if brackets else 0
    return len(basis), derived


def torus_fixed_signature(ctx: GroupContext, lam: Sequence, ell: int) -> tuple[int, int]:
    """The same signature for ``Ad(lam(zeta_ell))`` (untwisted): Cartan plus the roots killed by ``lam``."""
    killed = [ctx.roots[k] for k in eigenvalue_one_roots(ctx, lam, ell)]
    return ctx.rank + len(killed), len(killed) + (intlin.rank(killed) if killed else 0)


def eigenvalue_one_roots(ctx: GroupContext, lam: Sequence, ell: int) -> list[int]:
    """Roots on which ``lam(zeta_ell)`` acts trivially (``<beta, lam>`` divisible by ``ell``)."""
    return [k for k, r in enumerate(ctx.roots) if Fraction(ctx.pair(r, lam), ell).denominator == 1]


# ---------------------------------------------------------------------------
# lifts of -1
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MinusOneReport:
    order: int
    n_fourth_trivial: bool
    square_central: bool
    square_matches_lambda: bool
    modified_generators_fixed: bool
    generated_group_order: int
    expected_group_order: int
    maps_onto_weyl: bool
    kernel_in_two_torsion: bool

    @property
    def ok(self) -> bool:
        return (
            self.n_fourth_trivial
            and self.square_central
            and self.square_matches_lambda
            and self.modified_generators_fixed
            and self.generated_group_order == self.expected_group_order
            and self.maps_onto_weyl
            and self.kernel_in_two_torsion
        )


def minus_one_checks(ctx: GroupContext, lam: Sequence | None = None, t: Sequence | None = None) -> MinusOneReport:
    """Verify the facts about lifts ``n`` of ``-1`` on the simply connected torsion normalizer.

    ``lam`` is the numerator of the alcove point of the class of ``-1``
    (needed for ``n^2 = lam(-1)`` when ``n`` has order 4); ``t`` is the torus
    point used for the modified generators (default: ``lam / ord(n)``).
    """
    ctx = ctx.simply_connected()
    norm = NormalizerModel(ctx)
    group = norm.group
    try:
        w0 = group.find_matrix(tuple(tuple(-int(i == j) for j in range(ctx.rank)) for i in range(ctx.rank)))
    except KeyError:
        raise PreconditionFailed(f"-1 is not in the Weyl group of {ctx.name}") from None
    n = norm.lift(w0)
    ell = norm.order(n)
    sq = norm.mul(n, n)
    fourth = norm.mul(sq, sq)
    central = all(norm.mul(sq, norm.lift(s)) == norm.mul(norm.lift(s), sq) for s in group.simple)
    if ell == 4:
        if lam is None:
            from .kac import assign_point  # deferred: kac builds on this module
            from .weyl import sigma_classes

            lam = assign_point(ctx, sigma_classes(ctx).class_of[w0]).lam
        lam_half = norm.torus(tuple(Fraction(x, 2) for x in ctx.to_lattice(lam)))
        matches = sq == lam_half
    else:
        matches = sq == norm.identity()
    if t is None:
        t = tuple(Fraction(x, ell) for x in (lam or (0,) * ctx.rank))
    t_elt = norm.torus(ctx.to_lattice(t))
    nt = norm.mul(n, t_elt)
    gens = []
    fixed_ok = True
    if norm.mul(nt, nt) != sq:
        fixed_ok = False
    for i, s in enumerate(group.simple):
        na = norm.lift(s)
        conj = norm.conj(n, na)
        if conj == na:
            shift = Fraction(0)
        elif conj == norm.mul(na, norm.torus(tuple(Fraction(x, 2) for x in norm.coroots_lat[i]))):
            shift = Fraction(1, 2)
        else:
            raise CheckFailed("n n_a n^-1 is neither n_a nor n_a a^vee(-1)")
        a_t = Fraction(ctx.pair(ctx.roots[i], t))
        y = (a_t + shift) / 2
        mod = norm.mul(na, norm.torus(tuple(y * c for c in norm.coroots_lat[i])))
        if norm.conj(nt, mod) != mod:
            fixed_ok = False
        gens.append(mod)
    # closure of the modified generators
    seen = {norm.identity()}
    frontier = [norm.identity()]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = norm.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    weyl_image = {v for _, v in seen}
    kernel = [tt for tt, v in seen if v == 0]
    in_two = all(all(Fraction(x).denominator <= 2 for x in tt) for tt in kernel)
    expected = len(group) * 2**ctx.rank
    return MinusOneReport(
        ell,
        fourth == norm.identity(),
        central,
        matches,
        fixed_ok,
        len(seen),
        expected,
        len(weyl_image) == len(group),
        in_two,
    )
