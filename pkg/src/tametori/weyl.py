"""Weyl groups: enumeration, twisted conjugacy, norm maps and the Frobenius equation.

A Weyl group element is stored as the permutation it induces on the root
list of its :class:`~tametori.rootdata.GroupContext`; products are
compositions of permutations.  Matrices on cocharacters (coroot
coordinates) are read off from the permutation, since ``w`` sends the
simple coroot ``alpha_i^vee`` to the coroot of ``w(alpha_i)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Callable, Iterable, Sequence

from . import intlin
from .errors import GroupTooLarge, NoSolution
from .intlin import Matrix
from .rootdata import DiagramAut, GroupContext, SubsystemType, subsystem_type

DEFAULT_MAX_ORDER = 1152
_max_order = DEFAULT_MAX_ORDER


def set_max_order(n: int) -> None:
    """Change the largest Weyl group that will be enumerated (default ``|W(F4)|``)."""
    global _max_order
    if n < 1:
        raise ValueError("the bound must be positive")
    _max_order = n

Perm = tuple[int, ...]


@dataclass(frozen=True)
class WeylElement:
    """An element of W: its matrix on cocharacters (coroot coordinates) and a reduced word."""

    index: int
    matrix: Matrix
    word: tuple[int, ...]

    def word_str(self) -> str:
        return "".join(f"s{i + 1}" for i in self.word) or "1"


class WeylGroup:
    """The finite Weyl group of a Cartan matrix, fully enumerated.

    Elements are addressed by their index in breadth-first order from the
    identity (index 0), so ``words[i]`` is a reduced word of element ``i``.
    """

    def __init__(self, ctx: GroupContext, max_order: int | None = None):
        max_order = _max_order if max_order is None else max_order
        if ctx.weyl_order > max_order:
            raise GroupTooLarge(f"|W({ctx.name})| = {ctx.weyl_order} exceeds the bound {max_order}")
        self.ctx = ctx
        roots = ctx.roots
        idx = ctx.root_index
        n = ctx.rank
        self.num_roots = len(roots)
        self.simple_perms: list[Perm] = []
        for i in range(n):
            cor = ctx.coroots[i]
            perm = []
            for r in roots:
                c = ctx.pair(r, cor)
                perm.append(idx[tuple(r[j] - (c if j == i else 0) for j in range(n))])
            self.simple_perms.append(tuple(perm))

        identity = tuple(range(self.num_roots))
        self.perms: list[Perm] = [identity]
        self.words: list[tuple[int, ...]] = [()]
        self.index: dict[Perm, int] = {identity: 0}
        queue = deque([0])
        while queue:
            k = queue.popleft()
            w = self.perms[k]
            for i, s in enumerate(self.simple_perms):
                new = tuple(w[x] for x in s)
                if new not in self.index:
                    self.index[new] = len(self.perms)
                    self.perms.append(new)
                    self.words.append(self.words[k] + (i,))
                    queue.append(len(self.perms) - 1)
        if len(self.perms) != ctx.weyl_order:
            raise AssertionError(f"enumerated {len(self.perms)} elements, expected {ctx.weyl_order}")
        self.simple = [self.index[s] for s in self.simple_perms]
        self._mul: dict[tuple[int, int], int] = {}
        self._matrices: dict[int, Matrix] = {}
        self._inverse = [0] * len(self.perms)
        for k, p in enumerate(self.perms):
            inv = [0] * self.num_roots
            for a, b in enumerate(p):
                inv[b] = a
            self._inverse[k] = self.index[tuple(inv)]

    # -- arithmetic -------------------------------------------------------

    def __len__(self) -> int:
        return len(self.perms)

    def mul(self, a: int, b: int) -> int:
        key = (a, b)
        out = self._mul.get(key)
        if out is None:
            pa, pb = self.perms[a], self.perms[b]
            out = self.index[tuple(pa[x] for x in pb)]
            self._mul[key] = out
        return out

    def prod(self, *items: int) -> int:
        out = 0
        for x in items:
            out = self.mul(out, x)
        return out

    def inv(self, a: int) -> int:
        return self._inverse[a]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        out, base = 0, a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def order_of(self, a: int) -> int:
        k, cur = 1, a
        while cur != 0:
            cur = self.mul(cur, a)
            k += 1
        return k

    def length(self, a: int) -> int:
        return len(self.words[a])

    def from_word(self, word: Iterable[int]) -> int:
        out = 0
        for i in word:
            out = self.mul(out, self.simple[i])
        return out

    def act_on_root(self, a: int, root_index: int) -> int:
        return self.perms[a][root_index]

    def matrix(self, a: int) -> Matrix:
        """Matrix of ``a`` on cocharacters in coroot coordinates (columns = images of simple coroots)."""
        m = self._matrices.get(a)
        if m is None:
            cor = self.ctx.coroots
            cols = [cor[self.perms[a][i]] for i in range(self.ctx.rank)]
            m = intlin.normalize(intlin.transpose(cols))
            self._matrices[a] = m
        return m

    def element(self, a: int) -> WeylElement:
        return WeylElement(a, self.matrix(a), self.words[a])

    def find_matrix(self, m: Matrix) -> int:
        m = intlin.normalize(m)
        cor_idx = {tuple(intlin.normalize([c])[0]): k for k, c in enumerate(self.ctx.coroots)}
        n = self.ctx.rank
        images = [cor_idx[tuple(m[j][i] for j in range(n))] for i in range(n)]
        for k, p in enumerate(self.perms):
            if all(p[i] == images[i] for i in range(n)):
                return k
        raise KeyError("matrix is not in the Weyl group")

    # -- automorphisms -----------------------------------------------------

    def diagram_map(self, aut: DiagramAut) -> list[int]:
        """The automorphism ``w -> aut o w o aut^{-1}`` as an index map."""
        if aut.is_identity:
            return list(range(len(self)))
        roots = self.ctx.roots
        idx = self.ctx.root_index
        fwd = [idx[aut.apply(r)] for r in roots]
        back = [0] * len(fwd)
        for a, b in enumerate(fwd):
            back[b] = a
        out = []
        for p in self.perms:
            out.append(self.index[tuple(fwd[p[back[k]]] for k in range(len(roots)))])
        return out

    def canonical_key(self, a: int) -> tuple:
        return tuple(x for row in self.matrix(a) for x in row)


@lru_cache(maxsize=None)
def _cached_group(cartan_type, cartan_matrix) -> WeylGroup:
    from .rootdata import build_group, type_name

    ctx = build_group(type_name(cartan_type))
    return WeylGroup(ctx, ctx.weyl_order)


def weyl_group(ctx: GroupContext, max_order: int | None = None) -> WeylGroup:
    """The (cached) Weyl group of ``ctx``; it depends only on the Cartan matrix."""
    max_order = _max_order if max_order is None else max_order
    if ctx.weyl_order > max_order:
        raise GroupTooLarge(f"|W({ctx.name})| = {ctx.weyl_order} exceeds the bound {max_order}")
    return _cached_group(ctx.cartan_type, ctx.cartan_matrix)


def enumerate_elements(ctx: GroupContext, max_order: int | None = None) -> list[WeylElement]:
    w = weyl_group(ctx, max_order)
    return [w.element(a) for a in range(len(w))]


# ---------------------------------------------------------------------------
# twisted conjugacy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwistedClassTable:
    """Partition of a subgroup of W into classes under ``x -> g^{-1} x tau(g)``.

    ``classes`` are sorted by their canonical representative, the member with
    the lexicographically smallest matrix; members are listed in index order.
    """

    classes: tuple[tuple[int, ...], ...]
    representatives: tuple[int, ...]
    class_of: dict

    def __len__(self) -> int:
        return len(self.classes)

    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]


def twisted_classes(
    group: WeylGroup,
    twist: Sequence[int] | Callable[[int], int],
    elements: Sequence[int] | None = None,
) -> TwistedClassTable:
    """Classes of ``elements`` (default: all of W) under ``x -> g^{-1} x twist(g)``.

    ``elements`` must be a subgroup stable under ``twist``; orbits are
    computed by closure over all its members acting.
    """
    tw = twist if callable(twist) else twist.__getitem__
    members = list(range(len(group))) if elements is None else list(elements)
    member_set = set(members)
    if elements is None:
        actors = [(s, tw(s)) for s in group.simple]
        actors = [(group.inv(g), t) for g, t in actors]
    else:
        actors = [(group.inv(g), tw(g)) for g in members]
    seen: dict[int, int] = {}
    raw_classes: list[list[int]] = []
    for x in members:
        if x in seen:
            continue
        cid = len(raw_classes)
        orbit = [x]
        seen[x] = cid
        queue = deque([x])
        while queue:
            y = queue.popleft()
            for ginv, tg in actors:
                z = group.mul(group.mul(ginv, y), tg)
                if z not in seen:
                    if z not in member_set:
                        raise ValueError("twisted action leaves the given subset")
                    seen[z] = cid
                    orbit.append(z)
                    queue.append(z)
        raw_classes.append(sorted(orbit))
    reps = [min(c, key=group.canonical_key) for c in raw_classes]
    order = sorted(range(len(raw_classes)), key=lambda k: group.canonical_key(reps[k]))
    classes = tuple(tuple(raw_classes[k]) for k in order)
    representatives = tuple(reps[k] for k in order)
    class_of = {x: new for new, k in enumerate(order) for x in raw_classes[k]}
    return TwistedClassTable(classes, representatives, class_of)


def sigma_classes(ctx: GroupContext, max_order: int | None = None) -> TwistedClassTable:
    """Classes of W under ``sigma``-twisted conjugacy ``x -> g^{-1} x sigma(g)``."""
    weyl_group(ctx, max_order)  # bound check
    return _sigma_classes(ctx.cartan_type, ctx.cartan_matrix, ctx.sigma)


@lru_cache(maxsize=None)
def _sigma_classes(cartan_type, cartan_matrix, sigma) -> TwistedClassTable:
    group = _cached_group(cartan_type, cartan_matrix)
    return twisted_classes(group, group.diagram_map(sigma))


def twisted_product(group: WeylGroup, sig: Sequence[int], w: int, sigma_order: int, k: int) -> int:
    """The Weyl part of ``(w sigma)^k``, i.e. ``w sigma(w) ... sigma^{k-1}(w)``."""
    out, cur = 0, w
    for _ in range(k):
        out = group.mul(out, cur)
        cur = sig[cur]
    return out


def norm_map(ctx: GroupContext, w: int, sigma: DiagramAut | None = None, d: int = 1) -> int:
    """``N_d(w) = w sigma(w) ... sigma^{d-1}(w)``; equals ``w^d`` for trivial ``sigma``."""
    group = weyl_group(ctx)
    sigma = ctx.sigma if sigma is None else sigma
    if sigma.is_identity:
        return group.power(w, d)
    sig = group.diagram_map(sigma)
    e = sigma.order
    # (w sigma)^e = N_e(w) (sigma^e = 1), so N_d = N_e^(d // e) N_(d mod e)
    full = twisted_product(group, sig, w, e, e)
    return group.mul(group.power(full, d // e), twisted_product(group, sig, w, e, d % e))


def is_elliptic(ctx: GroupContext, w: int, sigma: DiagramAut | None = None) -> bool:
    """``w sigma`` has no nonzero fixed vector on the cocharacter space."""
    group = weyl_group(ctx)
    sigma = ctx.sigma if sigma is None else sigma
    m = intlin.mat_mul(group.matrix(w), sigma.matrix())
    return intlin.det(intlin.mat_sub(m, intlin.identity(ctx.rank))) != 0


def twisted_order(ctx: GroupContext, w: int, sigma: DiagramAut | None = None) -> int:
    """Order of ``(w, sigma)`` in ``W x| Aut``."""
    group = weyl_group(ctx)
    sigma = ctx.sigma if sigma is None else sigma
    sig = group.diagram_map(sigma)
    e = sigma.order
    full = twisted_product(group, sig, w, e, e)
    return e * group.order_of(full)


def is_tame_class(ctx: GroupContext, w: int, sigma: DiagramAut | None = None, p: int | None = None) -> bool:
    p = ctx.p if p is None else p
    return not p or twisted_order(ctx, w, sigma) % p != 0


def twisted_centralizer(ctx: GroupContext, w: int, sigma: DiagramAut | None = None) -> list[int]:
    """``{v : w sigma(v) w^{-1} = v}``, in index order."""
    group = weyl_group(ctx)
    sigma = ctx.sigma if sigma is None else sigma
    sig = group.diagram_map(sigma)
    return [v for v in range(len(group)) if group.mul(w, sig[v]) == group.mul(v, w)]


def frobenius_norm(ctx: GroupContext, w: int, q: int) -> int:
    """``Fr(N_q(w))`` where Fr acts on W through the diagram twist ``fr``."""
    group = weyl_group(ctx)
    return group.diagram_map(ctx.fr)[norm_map(ctx, w, ctx.sigma, q)]


def elliptic_class_ids(ctx: GroupContext) -> list[int]:
    table = sigma_classes(ctx)
    return [c for c, rep in enumerate(table.representatives) if is_elliptic(ctx, rep)]


def fr_stable_elliptic_classes(ctx: GroupContext, q: int | None = None) -> list[int]:
    """Tame elliptic sigma-classes ``c`` with ``Fr(N_q(c)) = c``."""
    q = ctx.q if q is None else q
    if q is None:
        raise ValueError("q is required")
    table = sigma_classes(ctx)
    out = []
    for c in elliptic_class_ids(ctx):
        rep = table.representatives[c]
        if not is_tame_class(ctx, rep):
            continue
        images = {table.class_of[frobenius_norm(ctx, x, q)] for x in table.classes[c]}
        if len(images) != 1:
            raise AssertionError("Fr o N_q does not map sigma-classes to sigma-classes")
        if images == {c}:
            out.append(c)
    return out


def solve_w_fr(ctx: GroupContext, w_sigma: int, q: int | None = None) -> list[int]:
    """All ``v`` with ``Fr(N_q(w_sigma)) = v^{-1} w_sigma sigma(v)`` (a left coset of the twisted centralizer)."""
    q = ctx.q if q is None else q
    group = weyl_group(ctx)
    sig = group.diagram_map(ctx.sigma)
    target = frobenius_norm(ctx, w_sigma, q)
    out = [v for v in range(len(group)) if group.prod(group.inv(v), w_sigma, sig[v]) == target]
    if not out:
        raise NoSolution("the class of w_sigma is not stable under Fr o N_q")
    return out


# ---------------------------------------------------------------------------
# labels
# ---------------------------------------------------------------------------


def reflection_decomposition(ctx: GroupContext, w: int) -> list[int]:
    """Roots ``g_1..g_m`` (indices, positive) with ``w = s_{g_1} ... s_{g_m}`` and ``m`` minimal.

    Greedy: a root in the image of ``w - 1`` lowers the reflection length by
    one; long roots and low heights are preferred, which reproduces the
    customary labels (``A2`` rather than its short-root twin in G2).
    """
    group = weyl_group(ctx)
    npos = ctx.num_positive
    order = sorted(range(npos), key=lambda k: (not ctx.is_long(ctx.roots[k]), sum(ctx.roots[k]), ctx.roots[k]))
    refl = {}
    out = []
    cur = w
    while cur != 0:
        fixed = intlin.kernel_basis(intlin.mat_sub(group.matrix(cur), intlin.identity(ctx.rank)))
        k = next(k for k in order if all(ctx.pair(ctx.roots[k], x) == 0 for x in fixed))
        if k not in refl:
            refl[k] = _reflection(group, k)
        out.append(k)
        cur = group.mul(refl[k], cur)
    return out


def _reflection(group: WeylGroup, k: int) -> int:
    ctx = group.ctx
    cor = ctx.coroots[k]
    root = ctx.roots[k]
    perm = []
    for r in ctx.roots:
        c = ctx.pair(r, cor)
        perm.append(ctx.root_index[tuple(x - c * y for x, y in zip(r, root))])
    return group.index[tuple(perm)]


def class_type(ctx: GroupContext, w: int) -> SubsystemType:
    """Type of the reflection subgroup generated by a minimal reflection decomposition of ``w``."""
    group = weyl_group(ctx)
    gens = reflection_decomposition(ctx, w)
    closure = set()
    for k in gens:
        closure.add(k)
        closure.add(ctx.negative_index(k))
    refls = [_reflection(group, k) for k in gens]
    changed = True
    while changed:
        changed = False
        for s in refls:
            for k in list(closure):
                img = group.act_on_root(s, k)
                if img not in closure:
                    closure.add(img)
                    changed = True
    prefer = ctx.cartan_type[0][0] if len(ctx.cartan_type) == 1 else None
    return subsystem_type(ctx, [ctx.roots[k] for k in closure], prefer)


def class_labels(ctx: GroupContext, class_ids: Sequence[int]) -> dict[int, str]:
    """Readable labels: the type of a minimal reflection decomposition (split case) or a reduced word."""
    table = sigma_classes(ctx)
    group = weyl_group(ctx)
    labels = {}
    for c in class_ids:
        rep = table.representatives[c]
        if ctx.sigma.is_identity:
            labels[c] = str(class_type(ctx, rep)) if rep != 0 else "1"
        else:
            shortest = min(table.classes[c], key=lambda x: (group.length(x), group.words[x]))
            labels[c] = f"{group.element(shortest).word_str()}·σ"
    # classes sharing a type are told apart in the customary way: the one of
    # largest order keeps the plain label, the others become T(a1), T(a2), ...
    groups: dict[str, list[int]] = {}
    for c in class_ids:
        groups.setdefault(labels[c], []).append(c)
    for base, members in groups.items():
        if len(members) < 2:
            continue
        members.sort(key=lambda c: (-twisted_order(ctx, table.representatives[c]), c))
        for k, c in enumerate(members):
            if k:
                labels[c] = f"{base}(a{k})"
    return labels


def is_rational_group(ctx: GroupContext) -> bool:
    """Every ``w^j`` with ``j`` prime to ``ord(w)`` is conjugate to ``w``."""
    group = weyl_group(ctx)
    table = twisted_classes(group, list(range(len(group))))
    for rep in table.representatives:
        n = group.order_of(rep)
        for j in range(1, n):
            if gcd(j, n) == 1 and table.class_of[group.power(rep, j)] != table.class_of[rep]:
                return False
    return True


# ---------------------------------------------------------------------------
# structural facts about elliptic elements
# ---------------------------------------------------------------------------


def _coker_order(ctx: GroupContext, w: int) -> int:
    group = weyl_group(ctx)
    m = ctx.lattice_matrix(group.matrix(w))
    return intlin.cokernel(intlin.mat_sub(m, intlin.identity(ctx.rank))).order


def elliptic_order_failures(ctx: GroupContext) -> list[str]:
    """Elliptic ``w`` whose order is not divisible by the exponent of the fundamental group.

    The exponent bounds the order of every element of every subquotient, so
    divisibility by it is the whole statement.  Checked per simple factor.
    """
    from .rootdata import build_group, type_name

    failures = []
    for letter, n in ctx.cartan_type:
        f = build_group(type_name(((letter, n),)))
        omega = intlin.cokernel(intlin.transpose(f.cartan_matrix))
        exponent = omega.exponent
        group = weyl_group(f)
        table = twisted_classes(group, list(range(len(group))))
        for rep in table.representatives:
            if is_elliptic(f, rep, DiagramAut.identity(f.rank)) and group.order_of(rep) % exponent:
                failures.append(f"{f.name}: elliptic element {group.element(rep).word_str()} of order {group.order_of(rep)}")
    return failures


def coinvariant_cardinality_failures(ctx: GroupContext) -> list[str]:
    """Elliptic ``w`` with ``|X/(w-1)X|`` different on the simply connected and adjoint lattices."""
    sc, ad = ctx.simply_connected(), ctx.adjoint()
    group = weyl_group(ctx)
    table = twisted_classes(group, list(range(len(group))))
    failures = []
    for rep in table.representatives:
        if not is_elliptic(sc, rep, DiagramAut.identity(ctx.rank)):
            continue
        a, b = _coker_order(sc, rep), _coker_order(ad, rep)
        if a != b:
            failures.append(f"{ctx.name}: {group.element(rep).word_str()} gives {a} (sc) and {b} (ad)")
    return failures
