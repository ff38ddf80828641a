"""Counting tame elliptic maximal tori: stable classes, embeddings, rational classes.

Everything is computed at the level of the cocharacter lattice and the
torsion points of the torus ``X (x) Q/Z`` (lattice coordinates, read
modulo 1).  For an elliptic class with representative ``w`` the element
``phi0 = w sigma`` has no fixed vectors, so its torsion fixed points form
a finite group ``T_bar``; Frobenius acts on torsion points by the q-power
map composed with the diagram twist.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from . import intlin
from .chevalley import NormalizerModel
from .errors import (
    BadKernel,
    CheckFailed,
    NFNotFound,
    NoSolution,
    NonElliptic,
    NotDefinedOverK,
    TamenessViolation,
    TametoriError,
    UnsupportedConfiguration,
)
from .intlin import FiniteAbelianGroup, Matrix
from .kac import KacPoint, assign_point, class_order, normalizer_model
from .rootdata import (
    GroupContext,
    alcove_vertices,
    central_cocharacters,
    factor_orbits,
    fundamental_group,
)
from .weyl import (
    class_labels,
    fr_stable_elliptic_classes,
    is_elliptic,
    sigma_classes,
    solve_w_fr,
    twisted_centralizer,
    twisted_classes,
    weyl_group,
)

#: largest torsion-normalizer group for which rational classes are enumerated
MAX_NORMALIZER_ORDER = 20000


# ---------------------------------------------------------------------------
# orbits and stable classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ToriOrbit:
    """A tame elliptic sigma-class that is stable under ``Fr o N_q``, with its data."""

    ctx: GroupContext
    class_id: int
    w_sigma: int
    kac: KacPoint
    q: int
    w_fr_coset: tuple[int, ...]
    order: int
    exponent: int = 1

    @property
    def w_fr(self) -> int:
        return self.w_fr_coset[0]


@dataclass(frozen=True)
class StableClass:
    """A Frobenius-twisted class of the twisted centralizer, with its embedding count."""

    representative: int
    size: int
    embedding_count: int


def make_orbit(
    ctx: GroupContext,
    class_id: int,
    q: int | None = None,
    representative: int | None = None,
    w_fr: int | None = None,
    exponent: int = 1,
) -> ToriOrbit:
    """Validate a class for counting over the residue field of size ``q``.

    ``representative`` (a member of the class), ``w_fr`` (a member of the
    solution coset) and ``exponent`` (which primitive root of unity is used)
    are free choices; every count is independent of them.
    """
    q = ctx.q if q is None else q
    if q is None:
        raise ValueError("q is required")
    if ctx.q != q:
        ctx = ctx.with_q(q)
    table = sigma_classes(ctx)
    rep = table.representatives[class_id] if representative is None else representative
    if table.class_of[rep] != class_id:
        raise ValueError(f"element {rep} is not in class {class_id}")
    if not is_elliptic(ctx, rep):
        raise NonElliptic(f"class {class_id} is not elliptic")
    ell = class_order(ctx, class_id)
    if ctx.p and ell % ctx.p == 0:
        raise TamenessViolation(f"class {class_id} has order {ell}, divisible by p = {ctx.p}")
    if gcd(exponent, ell) != 1:
        raise ValueError(f"exponent {exponent} is not prime to the order {ell}")
    try:
        coset = list(solve_w_fr(ctx, rep, q))
    except NoSolution:
        raise NotDefinedOverK(f"class {class_id} is not stable under Fr o N_q; it contains no k-torus") from None
    if w_fr is not None:
        if w_fr not in coset:
            raise ValueError(f"{w_fr} does not solve the w_Fr equation")
        coset.remove(w_fr)
        coset.insert(0, w_fr)
    kac = assign_point(ctx, class_id, exponent=exponent)
    return ToriOrbit(ctx, class_id, rep, kac, q, tuple(coset), ell, exponent % ell)


def _frobenius_twist(orbit: ToriOrbit, w_fr: int):
    """The automorphism ``g -> w_fr fr(g) w_fr^{-1}`` of W as a callable."""
    group = weyl_group(orbit.ctx)
    fr = group.diagram_map(orbit.ctx.fr)
    w_fr_inv = group.inv(w_fr)
    return lambda g: group.prod(w_fr, fr[g], w_fr_inv)


def _stable_table(orbit: ToriOrbit, w_fr: int):
    group = weyl_group(orbit.ctx)
    cent = twisted_centralizer(orbit.ctx, orbit.w_sigma)
    twist = _frobenius_twist(orbit, w_fr)
    if any(twist(g) not in set(cent) for g in cent):
        raise CheckFailed("w_Fr o Fr does not preserve the twisted centralizer")
    return twisted_classes(group, twist, cent)


def _coset_sample(coset: Sequence[int]) -> list[int]:
    picks = {0, len(coset) - 1, len(coset) // 2, len(coset) // 3}
    return [coset[i] for i in sorted(picks)]


def stable_classes(orbit: ToriOrbit) -> list[StableClass]:
    """Classes of ``W^{w sigma}`` under ``x -> g^{-1} x (w_Fr o Fr)(g)``, each with its embedding count.

    The number of classes is checked to be the same for several members of
    the ``w_Fr`` solution coset.
    """
    table = _stable_table(orbit, orbit.w_fr)
    for other in _coset_sample(orbit.w_fr_coset):
        if len(_stable_table(orbit, other)) != len(table):
            raise CheckFailed("stable-class count depends on the choice of w_Fr")
    return [
        StableClass(rep, len(members), embedding_count(orbit, rep))
        for rep, members in zip(table.representatives, table.classes)
    ]


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------


def _phi0(ctx: GroupContext, w: int) -> Matrix:
    group = weyl_group(ctx)
    return ctx.lattice_matrix(intlin.mat_mul(group.matrix(w), ctx.sigma.matrix()))


def _psi(ctx: GroupContext, w_prime: int, w_fr: int) -> Matrix:
    """``w' w_Fr fr`` on the cocharacter lattice (lattice coordinates)."""
    group = weyl_group(ctx)
    m = intlin.mat_mul(intlin.mat_mul(group.matrix(w_prime), group.matrix(w_fr)), ctx.fr.matrix())
    return ctx.lattice_matrix(m)


def fixed_torsion(ctx: GroupContext, w: int) -> FiniteAbelianGroup:
    """``T_bar``: prime-to-p torsion points fixed by ``w sigma``."""
    return intlin.torsion_fixed_points(_phi0(ctx, w), ctx.p)


def embedding_group(orbit: ToriOrbit, w_prime: int, w_fr: int | None = None) -> FiniteAbelianGroup:
    """Coinvariants of ``T_bar`` under ``t -> q (w' w_Fr fr)(t)``."""
    ctx = orbit.ctx
    w_fr = orbit.w_fr if w_fr is None else w_fr
    tbar = fixed_torsion(ctx, orbit.w_sigma)
    if tbar.is_trivial:
        return tbar
    psi = _psi(ctx, w_prime, w_fr)
    e = tbar.endomorphism(lambda t: intlin.mat_vec(psi, [orbit.q * Fraction(x) for x in t]))
    return intlin.coinvariants(tbar, e)


def embedding_count(orbit: ToriOrbit, w_prime: int, w_fr: int | None = None) -> int:
    """Number of k-embeddings (up to rational conjugacy) of a torus in the stable class of ``w'``."""
    return embedding_group(orbit, w_prime, w_fr).order


def embedding_count_lattice(orbit: ToriOrbit, w_prime: int, w_fr: int | None = None) -> int:
    """Independent route: ``|X / ((w sigma - 1) X + (1 - w' w_Fr fr) X)|`` with the p-part removed."""
    ctx = orbit.ctx
    w_fr = orbit.w_fr if w_fr is None else w_fr
    n = ctx.rank
    a = intlin.mat_sub(_phi0(ctx, orbit.w_sigma), intlin.identity(n))
    b = intlin.mat_sub(intlin.identity(n), _psi(ctx, w_prime, w_fr))
    stacked = [tuple(a[i]) + tuple(b[i]) for i in range(n)]
    return intlin.prime_to_order(intlin.cokernel(stacked).order, ctx.p)


# ---------------------------------------------------------------------------
# rational classes
# ---------------------------------------------------------------------------


@dataclass
class TwistedNormalizerGroup:
    """``N^{Int(u) o sigma}`` on torsion points, with the Frobenius ``Int(n_F) o Fr``.

    Elements are pairs ``(t, v)`` (torsion point in lattice coordinates,
    Weyl index) of the normalizer model; ``u = n_w lam(zeta)``.
    """

    model: NormalizerModel
    u: tuple
    elements: list
    n_f: tuple
    q: int
    index: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.index = {m: k for k, m in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def frobenius(self, m):
        norm = self.model
        return norm.conj(self.n_f, norm.frobenius(m, self.q))

    def is_fixed(self, m) -> bool:
        norm = self.model
        return norm.conj(self.u, norm.sigma(m)) == m


def _u_element(orbit: ToriOrbit, norm: NormalizerModel) -> tuple:
    lam = orbit.kac.lam
    s = orbit.ctx.to_lattice([orbit.exponent * Fraction(x) / orbit.kac.order for x in lam])
    return norm.mul(norm.lift(orbit.w_sigma), norm.torus(s))


def normalizer_group(orbit: ToriOrbit, max_order: int = MAX_NORMALIZER_ORDER) -> TwistedNormalizerGroup:
    """Build the fixed group and solve the ``n_F`` equation ``Fr(N_q(u)) = n_F^{-1} u sigma(n_F)``."""
    ctx = orbit.ctx
    if not ctx.is_simply_connected:
        raise UnsupportedConfiguration("rational classes are computed on the simply connected lattice; use isogeny_transfer")
    kinds = {orb.kind for orb in factor_orbits(ctx)}
    if not ctx.fr.is_identity or (not ctx.sigma.is_identity and kinds != {"su3"}):
        raise UnsupportedConfiguration("rational classes are implemented for split groups and ramified SU3")
    norm = normalizer_model(ctx)
    group = weyl_group(ctx)
    cent = twisted_centralizer(ctx, orbit.w_sigma)
    tbar = fixed_torsion(ctx, orbit.w_sigma)
    size = len(cent) * tbar.order
    if size > max_order:
        raise UnsupportedConfiguration(f"torsion normalizer of order {size} exceeds the bound {max_order}")
    phi0 = _phi0(ctx, orbit.w_sigma)
    u = _u_element(orbit, norm)
    kernel = [tbar.element(c) or (0,) * ctx.rank for c in tbar.elements()]
    elements = []
    for v in cent:
        # u sigma((t, v)) u^{-1} = (w sigma t, 1) c_v  with  c_v = u (0, sigma v) u^{-1}
        c_t, c_v = norm.conj(u, norm.sigma(norm.lift(v)))
        assert c_v == v
        torsor = intlin.solve_torsion_equation(phi0, c_t)
        if torsor is None or torsor.free_rank:
            raise CheckFailed("torus part of the fixed group is not finite")
        base = _prime_to_p_point(torsor.base, ctx.p)
        for k in kernel:
            elements.append((intlin.mod1(Fraction(a) + b for a, b in zip(base, k)), v))
    n_f = solve_n_f(orbit, norm, u)
    out = TwistedNormalizerGroup(norm, u, elements, n_f, orbit.q)
    members = set(elements)
    for m in elements:
        if not out.is_fixed(m):
            raise CheckFailed("element of the fixed group is not fixed")
        if out.frobenius(m) not in members:
            raise CheckFailed("n_F o Fr does not preserve the fixed group")
    return out


def _prime_to_p_point(t: Sequence, p: int) -> tuple:
    if p and intlin.common_denominator(t) % p == 0:
        raise CheckFailed("torus part of the fixed group has p-torsion")
    return tuple(t)


def solve_n_f(orbit: ToriOrbit, norm: NormalizerModel, u: tuple) -> tuple:
    """A solution ``n_F = (t, v)`` of ``Fr(N_q(u)) = n_F^{-1} u sigma(n_F)``.

    The Weyl part runs over the ``w_Fr`` coset; for each candidate the torus
    part solves ``(1 - w sigma) t = [u (0, sigma v)]_t - [(0, v) A]_t``.
    """
    ctx = orbit.ctx
    a = norm.frobenius(norm.twisted_power(u, orbit.q), orbit.q)
    phi0 = _phi0(ctx, orbit.w_sigma)
    for v in orbit.w_fr_coset:
        left_t, left_v = norm.mul(u, norm.sigma(norm.lift(v)))
        right_t, right_v = norm.mul(norm.lift(v), a)
        if left_v != right_v:
            continue
        torsor = intlin.solve_torsion_equation(phi0, [Fraction(x) - Fraction(y) for x, y in zip(left_t, right_t)])
        if torsor is None:
            continue
        n_f = (tuple(torsor.base), v)
        if norm.mul(norm.inv(n_f), norm.mul(u, norm.sigma(n_f))) == a:
            return n_f
    raise NFNotFound("no solution of the n_F equation")


@dataclass(frozen=True)
class RationalClasses:
    """Twisted classes of the fixed normalizer group and their projection to stable classes."""

    total: int
    fibers: dict  # stable-class representative (Weyl index) -> number of rational classes over it
    classes: tuple


def _twisted_partition(elements: list, mul, inv, twist) -> list[list]:
    seen = {}
    classes = []
    actors = [(inv(g), twist(g)) for g in elements]
    for x in elements:
        if x in seen:
            continue
        cid = len(classes)
        orbit = {x}
        for ginv, tg in actors:
            orbit.add(mul(mul(ginv, x), tg))
        for y in orbit:
            seen[y] = cid
        classes.append(sorted(orbit))
    return classes


def rational_classes(orbit: ToriOrbit, max_order: int = MAX_NORMALIZER_ORDER) -> RationalClasses:
    """Rational conjugacy classes in the stable orbit, with the fiber identity checked."""
    h = normalizer_group(orbit, max_order)
    norm = h.model
    classes = _twisted_partition(h.elements, norm.mul, norm.inv, h.frobenius)
    # project to Weyl parts: classes of the centralizer under v_F o Fr
    stable = _stable_table(orbit, h.n_f[1])
    fibers: dict[int, int] = {}
    for cl in classes:
        images = {stable.class_of[v] for _, v in cl}
        if len(images) != 1:
            raise CheckFailed("a rational class projects to several stable classes")
        rep = stable.representatives[images.pop()]
        fibers[rep] = fibers.get(rep, 0) + 1
    if len(fibers) != len(stable):
        raise CheckFailed("the projection to stable classes is not surjective")
    if sum(fibers.values()) != len(classes):
        raise CheckFailed("fiber sizes do not add up")
    return RationalClasses(len(classes), fibers, tuple(tuple(c) for c in classes))


def rational_class_count(orbit: ToriOrbit, max_order: int = MAX_NORMALIZER_ORDER) -> int:
    return rational_classes(orbit, max_order).total


# ---------------------------------------------------------------------------
# components and isogenies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComponentSequence:
    """Orders attached to ``(T/T_0)_Fr -> Omega_Fr``.

    ``components = |(T/T_0)_Fr|``, ``omega = |Omega_Fr|`` and
    ``torus_part = |(T_bar_F)_Fr|``.  The map to ``Omega_Fr`` is onto; its
    kernel, of order ``kernel``, is the image of ``(T_bar_F)_Fr``, which
    can be a proper quotient of it (see :attr:`torus_part_injects`).
    """

    components: int
    torus_part: int
    omega: int
    kernel: int

    @property
    def torus_part_injects(self) -> bool:
        return self.torus_part == self.kernel


def _span_index(ctx: GroupContext, columns: list) -> int:
    """``[X : span(columns)]`` for a full-rank family of lattice vectors."""
    n = ctx.rank
    m = [tuple(int(c[i]) for c in columns) for i in range(n)]
    return intlin.cokernel(m).order


def _columns(m: Matrix) -> list[tuple]:
    return [tuple(row[j] for row in m) for j in range(len(m[0]))] if m else []


def component_orders(ctx: GroupContext, w: int, psi: Matrix) -> ComponentSequence:
    """Orders of the component groups, from lattice indices.

    With ``A = (w sigma - 1) X``, ``B = (1 - psi) X`` and ``Q`` the coroot
    lattice: ``(T/T_0)_Fr = X / (A + B)``, ``Omega_Fr = X / (Q + A + B)``,
    the kernel between them is ``(Q + A + B) / (A + B)``, and
    ``(T_bar_F)_Fr = (Q + A) / (A + (1 - psi) Q)``.
    """
    n = ctx.rank
    a = _columns(intlin.mat_sub(_phi0(ctx, w), intlin.identity(n)))
    b = _columns(intlin.mat_sub(intlin.identity(n), psi))
    coroots = [intlin.normalize([ctx.to_lattice(tuple(int(i == j) for j in range(n)))])[0] for i in range(n)]
    moved = [intlin.mat_vec(intlin.mat_sub(intlin.identity(n), psi), c) for c in coroots]
    components = _span_index(ctx, a + b)
    torus_part = _span_index(ctx, a + moved) // _span_index(ctx, a + coroots)
    omega = _span_index(ctx, coroots + a + b)
    p = ctx.p
    return ComponentSequence(
        intlin.prime_to_order(components, p),
        intlin.prime_to_order(torus_part, p),
        intlin.prime_to_order(omega, p),
        intlin.prime_to_order(components // omega, p),
    )


def omega_coinvariants(ctx: GroupContext) -> int:
    """``|Omega_Fr|`` for ``Omega = (X_*/Q^vee)_sigma``, from the fundamental group."""
    fg = fundamental_group(ctx)
    if fg.group.is_trivial:
        return 1
    rels = []
    for aut in (ctx.sigma, ctx.fr):
        m = ctx.lattice_matrix(aut.matrix())
        for g in fg.group.generators:
            moved = intlin.mat_vec(m, g)
            rels.append(fg.group.coordinates(tuple(Fraction(x) - Fraction(y) for x, y in zip(g, moved))))
    return intlin.prime_to_order(intlin.quotient(fg.group, rels).order, ctx.p)


def coroot_image_order(ctx: GroupContext, w: int, psi: Matrix) -> int:
    """Order of the image of the coroot lattice in ``X / (A + B)``.

    Computed as a subgroup of the Smith presentation of the quotient (the
    route used by the isogeny transfer); :func:`component_orders` gets the
    same number as a ratio of lattice indices.
    """
    n = ctx.rank
    a = _columns(intlin.mat_sub(_phi0(ctx, w), intlin.identity(n)))
    b = _columns(intlin.mat_sub(intlin.identity(n), psi))
    quotient = intlin.cokernel([tuple(int(c[i]) for c in a + b) for i in range(n)])
    if quotient.is_trivial:
        return 1
    coroots = [ctx.to_lattice(tuple(int(i == j) for j in range(n))) for i in range(n)]
    order = intlin.subgroup_order(quotient, [quotient.coordinates(c) for c in coroots])
    return intlin.prime_to_order(order, ctx.p)


def component_sequence_check(orbit: ToriOrbit, lattice: GroupContext | None = None, w_prime: int = 0) -> ComponentSequence:
    """Check ``|(T/T_0)_Fr| = |image of T_sc| * |Omega_Fr|`` for the stable class of ``w_prime``.

    The three factors come from three separate computations: a lattice
    index, a generated subgroup of a Smith presentation, and the
    coinvariants of the fundamental group.  On the simply connected lattice
    the image must moreover be all of ``(T_bar_F)_Fr``.
    """
    ctx = orbit.ctx if lattice is None else lattice.with_q(orbit.q)
    psi = _psi(ctx, w_prime, orbit.w_fr)
    seq = component_orders(ctx, orbit.w_sigma, psi)
    image = coroot_image_order(ctx, orbit.w_sigma, psi)
    omega = omega_coinvariants(ctx)
    if seq.components != image * omega:
        raise CheckFailed(f"component sequence fails: {seq.components} != {image} * {omega}")
    if (seq.omega, seq.kernel) != (omega, image):
        raise CheckFailed(f"lattice-index orders {seq} disagree with image {image} and Omega_Fr {omega}")
    if seq.torus_part % seq.kernel:
        raise CheckFailed(f"the image {seq.kernel} is not a quotient of (T_bar_F)_Fr of order {seq.torus_part}")
    if ctx.is_simply_connected and not seq.torus_part_injects:
        raise CheckFailed(f"component sequence fails on the simply connected lattice: {seq}")
    return seq


@dataclass(frozen=True)
class TransferResult:
    """Counts for the quotient group ``G_sc / kernel`` obtained from the simply connected ones."""

    stable: int
    embeddings: tuple[int, ...]
    rational: int | None


def _kernel_points(orbit: ToriOrbit, kernel: Sequence[Sequence]) -> list[tuple]:
    """Validate central cocharacter representatives and return the generated subgroup (mod 1)."""
    ctx = orbit.ctx
    phi0 = _phi0(ctx, orbit.w_sigma)
    gens = []
    for z in kernel:
        z = tuple(Fraction(x) for x in z)
        if any(Fraction(ctx.pair(r, z)).denominator != 1 for r in ctx.roots[: ctx.rank]):
            raise BadKernel(f"{z} is not central")
        if not intlin.is_integral(Fraction(a) - b for a, b in zip(intlin.mat_vec(phi0, z), z)):
            raise BadKernel(f"{z} is not fixed by w sigma")
        gens.append(intlin.mod1(z))
    points = {(0,) * ctx.rank}
    frontier = list(points)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = intlin.mod1(Fraction(a) + b for a, b in zip(x, g))
                if y not in points:
                    points.add(y)
                    nxt.append(y)
        frontier = nxt
    if ctx.p and len(points) % ctx.p == 0:
        raise BadKernel(f"p = {ctx.p} divides the order of the kernel")
    return sorted(points)


def transfer_lattice(orbit: ToriOrbit, kernel: Sequence[Sequence]) -> GroupContext:
    """The cocharacter lattice ``X_sc + kernel`` as a group context (validated kernel)."""
    ctx = orbit.ctx
    _kernel_points(orbit, kernel)
    columns = [tuple(int(i == j) for j in range(ctx.rank)) for i in range(ctx.rank)]
    columns += [tuple(Fraction(x) for x in z) for z in kernel]
    basis = intlin.lattice_basis(columns)
    index = abs(Fraction(1) / Fraction(intlin.det(basis))).numerator
    name = "sc" if index == 1 else "ad" if index == ctx.connection_index else "matrix"
    try:
        return ctx.with_lattice(basis, name)
    except TametoriError as exc:
        raise BadKernel(f"kernel does not give a valid lattice: {exc}") from exc


def isogeny_transfer(orbit: ToriOrbit, kernel: Sequence[Sequence], rational: bool = True) -> TransferResult:
    """Counts for the isogenous group whose cocharacters are ``X_sc + kernel``.

    Embeddings: the image of the sc torus in the component group
    ``(T/T_0)_Fr`` of the target torus, i.e. the kernel of the (onto) map
    to ``Omega_Fr``; rational embeddings are in bijection with it.
    Rational classes: sc rational classes modulo translation by the kernel.
    Stable classes do not change.
    """
    if not orbit.ctx.is_simply_connected:
        raise BadKernel("isogeny transfer starts from the simply connected lattice")
    points = _kernel_points(orbit, kernel)
    target = transfer_lattice(orbit, kernel).with_q(orbit.q)
    stable = stable_classes(orbit)
    embeddings = [
        coroot_image_order(target, orbit.w_sigma, _psi(target, sc.representative, orbit.w_fr)) for sc in stable
    ]
    count = None
    if rational:
        try:
            rc = rational_classes(orbit)
        except UnsupportedConfiguration:
            rc = None
        if rc is not None:
            count = _merge_by_translation(orbit, rc, points)
    return TransferResult(len(stable), tuple(embeddings), count)


def _merge_by_translation(orbit: ToriOrbit, rc: RationalClasses, points: list[tuple]) -> int:
    norm = normalizer_model(orbit.ctx)
    class_of = {m: k for k, cl in enumerate(rc.classes) for m in cl}
    parent = list(range(len(rc.classes)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for k, cl in enumerate(rc.classes):
        m = cl[0]
        for z in points:
            moved = norm.mul(norm.torus(z), m)
            if moved not in class_of:
                raise CheckFailed("central translate left the fixed group")
            a, b = find(k), find(class_of[moved])
            if a != b:
                parent[a] = b
    return len({find(k) for k in range(len(rc.classes))})


def direct_embedding_count(orbit: ToriOrbit, lattice: GroupContext, w_prime: int) -> int:
    """Embeddings computed directly on another lattice: ``|(T/T_0)_Fr| / |Omega_Fr|``.

    The component order is a lattice index; ``Omega_Fr`` comes from the
    fundamental group.
    """
    ctx = lattice.with_q(orbit.q)
    components = component_orders(ctx, orbit.w_sigma, _psi(ctx, w_prime, orbit.w_fr)).components
    return components // omega_coinvariants(ctx)


# ---------------------------------------------------------------------------
# Coxeter classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoxeterReport:
    class_id: int
    coxeter_number: int
    cokernel_order: int
    connection_index: int
    kac: KacPoint
    barycenter: tuple | None
    stable: int
    expected_stable: int


def coxeter_class(ctx: GroupContext) -> int:
    group = weyl_group(ctx)
    w = group.from_word(range(ctx.rank))
    return sigma_classes(ctx).class_of[w]


def coxeter_report(ctx: GroupContext, q: int) -> CoxeterReport:
    """Check the Coxeter-class facts: torus quotient = center, barycenter (type A), ``gcd(h, q-1)`` stable classes."""
    if not ctx.sigma.is_identity:
        raise UnsupportedConfiguration("the Coxeter report is for split groups")
    sc = ctx.simply_connected().with_q(q)
    group = weyl_group(sc)
    cid = coxeter_class(sc)
    w = sigma_classes(sc).representatives[cid]
    h = group.order_of(w)
    coker = intlin.cokernel(intlin.mat_sub(group.matrix(w), intlin.identity(sc.rank))).order
    if coker != sc.connection_index:
        raise CheckFailed(f"|X/(w-1)X| = {coker} differs from the connection index {sc.connection_index}")
    kac = assign_point(sc, cid)
    bary = None
    if all(letter == "A" for letter, _ in sc.cartan_type):
        verts = alcove_vertices(sc)
        bary = tuple(sum(v[i] for v in verts) / len(verts) for i in range(sc.rank))
        if bary != tuple(kac.point.coords):
            raise CheckFailed(f"Coxeter point {kac.point.coords} is not the barycenter {bary}")
    stable = len(stable_classes(make_orbit(sc, cid, q)))
    expected = gcd(h, q - 1) if ctx.fr.is_identity else None
    if expected is not None and stable != expected:
        raise CheckFailed(f"{stable} stable classes, expected gcd({h}, {q - 1}) = {expected}")
    return CoxeterReport(cid, h, coker, sc.connection_index, kac, bary, stable, expected if expected is not None else stable)


# ---------------------------------------------------------------------------
# the full report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReportRow:
    label: str
    class_id: int
    kac: KacPoint
    stable_count: int
    embeddings: tuple[int, ...]  # one per stable class, sorted descending
    rational: int | None
    fibers: tuple[tuple[int, int], ...] | None = None  # sorted (embedding count, rational classes over it)

    def summary(self) -> tuple:
        """Choice-free content of the row."""
        return (self.label, self.kac.point.coords, self.kac.order, self.stable_count, self.embeddings, self.rational, self.fibers)


@dataclass(frozen=True)
class ClassificationReport:
    ctx: GroupContext
    q: int
    rows: tuple[ReportRow, ...]

    def row(self, label: str) -> ReportRow:
        return next(r for r in self.rows if r.label == label)

    def summary(self) -> tuple:
        return (self.ctx.name, self.q, tuple(r.summary() for r in self.rows))


def _random_choices(ctx: GroupContext, class_id: int, q: int, rng: random.Random) -> dict:
    table = sigma_classes(ctx)
    rep = rng.choice(table.classes[class_id])
    ell = class_order(ctx, class_id)
    exponent = rng.choice([e for e in range(1, ell + 1) if gcd(e, ell) == 1])
    w_fr = rng.choice(solve_w_fr(ctx, rep, q))
    return {"representative": rep, "w_fr": w_fr, "exponent": exponent}


def full_report(
    ctx: GroupContext,
    q: int | None = None,
    rational: bool = True,
    rng: random.Random | None = None,
) -> ClassificationReport:
    """One row per tame elliptic class stable under ``Fr o N_q``, with every computable count.

    Non-simply-connected lattices are handled through :func:`isogeny_transfer`
    with the kernel ``X_* / Q^vee``.  With ``rng`` the free choices
    (representative, ``w_Fr``, root of unity) are randomized; the report
    must not change.
    """
    q = ctx.q if q is None else q
    if q is None:
        raise ValueError("q is required")
    ctx = ctx.with_q(q)
    sc = ctx.simply_connected()
    kernel = central_cocharacters(ctx) if not ctx.is_simply_connected else []
    ids = [c for c in fr_stable_elliptic_classes(sc, q) if not (sc.p and class_order(sc, c) % sc.p == 0)]
    labels = class_labels(sc, ids)
    rows = []
    for cid in ids:
        choices = _random_choices(sc, cid, q, rng) if rng is not None else {}
        orbit = make_orbit(sc, cid, q, **choices)
        kac = assign_point(ctx, cid)
        if kernel:
            tr = isogeny_transfer(orbit, kernel, rational)
            rows.append(ReportRow(labels[cid], cid, kac, tr.stable, tuple(sorted(tr.embeddings, reverse=True)), tr.rational))
            continue
        stable = stable_classes(orbit)
        count, fibers = None, None
        if rational:
            try:
                rc = rational_classes(orbit)
            except UnsupportedConfiguration:
                rc = None
            if rc is not None:
                count = rc.total
                fibers = tuple(sorted(((s.embedding_count, rc.fibers.get(s.representative, 0)) for s in stable), reverse=True))
                if sum(f for _, f in fibers) != count:
                    raise CheckFailed("fiber sizes do not add up to the rational total")
        emb = tuple(sorted((s.embedding_count for s in stable), reverse=True))
        rows.append(ReportRow(labels[cid], cid, kac, len(stable), emb, count, fibers))
    return ClassificationReport(ctx, q, tuple(rows))
