"""Alcove points and Kac coordinates of tame elliptic twisted classes.

For an elliptic class with canonical lift ``n`` the element ``n sigma`` has
finite order ``l``; it is conjugate to ``lam(zeta_l) sigma`` for a unique
cocharacter ``lam`` with ``lam / l`` in the closed alcove.  The point is
found by enumerating the lattice points of the ``l``-dilated alcove and
comparing eigenvalue profiles on the Lie algebra.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Sequence

from . import intlin
from .chevalley import (
    ChevalleyModel,
    EigenProfile,
    NormalizerModel,
    build_adjoint,
    eigenvalue_profile,
    fixed_subalgebra_signature,
    torus_fixed_signature,
    torus_sigma_profile,
)
from .errors import AmbiguousMatch, NoMatch, NonElliptic, NotGaloisStable, TamenessViolation
from .rootdata import AlcovePoint, GroupContext, factor_orbits, mark_constant, simple_affine_roots
from .weyl import elliptic_class_ids, is_elliptic, sigma_classes


@dataclass(frozen=True)
class KacPoint:
    """Alcove point ``x0 + lam / order`` of an elliptic class, with its normalized Kac coordinates."""

    class_id: int
    order: int
    lam: tuple
    point: AlcovePoint
    j: int
    coords: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.point.format()}  j={self.j}  kac={self.coords}"


@lru_cache(maxsize=None)
def normalizer_model(ctx: GroupContext) -> NormalizerModel:
    return NormalizerModel(ctx)


def _compositions(total: int, weights: Sequence[int]):
    """Non-negative integer vectors ``c`` with ``sum(w_i c_i) <= total``."""
    if not weights:
        yield ()
        return
    w = weights[0]
    for c in range(total // w + 1):
        for rest in _compositions(total - w * c, weights[1:]):
            yield (c,) + rest


def candidate_points(ctx: GroupContext, ell: int) -> list[tuple]:
    """Sigma-fixed cocharacters ``lam`` of ``ctx`` with ``x0 + lam/ell`` in the closed alcove.

    Lattice points of the ``ell``-dilated alcove, in coroot coordinates,
    restricted to the cocharacter lattice; sorted for determinism.
    """
    if ell < 1:
        raise ValueError("ell must be positive")
    per_factor: list[list[tuple[int, tuple]]] = []
    for orb in factor_orbits(ctx):
        options = []
        if orb.kind == "split":
            high = ctx.highest_roots[orb.factor]
            marks = [high[i] for i in orb.nodes]
            for c in _compositions(ell, marks):
                vec = [Fraction(0)] * ctx.rank
                for i, ci in zip(orb.nodes, c):
                    if ci:
                        vec = [v + ci * w for v, w in zip(vec, ctx.coweights[i])]
                options.append(tuple(vec))
        else:
            lo, hi = orb.nodes[0], orb.nodes[1]
            for m in range(ell // 4 + 1):
                options.append(tuple(Fraction(m) if i in (lo, hi) else Fraction(0) for i in range(ctx.rank)))
        per_factor.append(options)
    out = []
    for combo in itertools.product(*per_factor):
        lam = tuple(sum(v[i] for v in combo) for i in range(ctx.rank))
        lam = intlin.normalize([lam])[0]
        if ctx.in_lattice(lam) and ctx.sigma.apply(lam) == lam:
            out.append(lam)
    return sorted(set(out))


def torus_twisted_order(ctx: GroupContext, lam: Sequence, ell: int) -> int:
    """Order of ``lam(zeta_ell) sigma`` for a sigma-fixed ``lam``: ``lcm(ord sigma, ord of lam/ell)``."""
    t = ctx.to_lattice([Fraction(x) / ell for x in lam])
    order = 1
    for x in t:
        order = lcm(order, Fraction(x).denominator)
    return lcm(ctx.sigma.order, order)


def kac_coordinates(ctx: GroupContext, kp: KacPoint | AlcovePoint) -> tuple[int, tuple[int, ...]]:
    """``(j, (j psi(x))_psi)`` over the simple affine roots in wall order, ``j`` minimal."""
    point = kp.point if isinstance(kp, KacPoint) else kp
    values = [psi.value(ctx, point.coords) for psi in simple_affine_roots(ctx)]
    j = 1
    for v in values:
        j = lcm(j, v.denominator)
    return j, tuple(int(v * j) for v in values)


def mark_sums(ctx: GroupContext, coords: Sequence[int]) -> list[int]:
    """Per factor, ``sum a_psi s_psi`` over the walls of that factor."""
    walls = simple_affine_roots(ctx)
    sums = [0] * len(ctx.factors)
    for psi, s in zip(walls, coords):
        sums[psi.factor] += psi.mark * s
    return sums


def expected_mark_sums(ctx: GroupContext, j: int) -> list[Fraction]:
    return [j * mark_constant(ctx, f) for f in range(len(ctx.factors))]


def _class_rep(ctx: GroupContext, class_id: int) -> int:
    return sigma_classes(ctx).representatives[class_id]


def class_order(ctx: GroupContext, class_id: int) -> int:
    """Order of ``n sigma`` for the canonical lift ``n`` of the class representative."""
    norm = normalizer_model(ctx)
    return norm.twisted_order(norm.lift(_class_rep(ctx, class_id)))


def matching_candidates(
    ctx: GroupContext,
    class_id: int,
    exponent: int = 1,
    model: ChevalleyModel | None = None,
) -> tuple[int, EigenProfile, list[tuple]]:
    """All candidates whose predicted profile equals the profile of ``Ad(n) sigma_hat``."""
    model = build_adjoint(ctx) if model is None else model
    rep = _class_rep(ctx, class_id)
    ell = class_order(ctx, class_id)
    target = eigenvalue_profile(model.adjoint_matrix(rep, aut=ctx.sigma))
    matches = []
    for lam in candidate_points(ctx, ell):
        if torus_twisted_order(ctx, lam, ell) != ell:
            continue
        try:
            predicted = torus_sigma_profile(ctx, lam, ell, exponent=exponent, model=model)
        except NotGaloisStable:
            continue  # cannot be conjugate to a rational matrix
        if predicted == target:
            matches.append(lam)
    if len(matches) > 1 and ctx.sigma.is_identity:
        matches = _refine_by_centralizers(ctx, model, rep, ell, matches)
    return ell, target, matches


def _refine_by_centralizers(ctx: GroupContext, model: ChevalleyModel, rep: int, ell: int, matches: list) -> list:
    """Break profile ties by comparing the centralizer subalgebras of all powers.

    Equal eigenvalue profiles do not force conjugacy (F4 has two elliptic
    classes of order 6 with the same adjoint profile); the dimension of the
    fixed subalgebra of ``n^k`` and of its derived algebra must also agree
    with those of ``lam(zeta^k)``.
    """
    m = model.adjoint_matrix(rep)
    power = intlin.identity(model.dim)
    for k in range(1, ell):
        power = intlin.normalize(intlin.mat_mul(power, m))
        if ell % k:
            continue
        sig = fixed_subalgebra_signature(model, power)
        matches = [lam for lam in matches if torus_fixed_signature(ctx, [k * x for x in lam], ell) == sig]
        if len(matches) <= 1:
            break
    return matches


def assign_point(ctx: GroupContext, class_id: int, exponent: int = 1, model: ChevalleyModel | None = None) -> KacPoint:
    """The unique alcove point of a tame elliptic sigma-class, found by eigenvalue matching."""
    rep = _class_rep(ctx, class_id)
    if not is_elliptic(ctx, rep):
        raise NonElliptic(f"class {class_id} is not elliptic")
    ell, target, matches = matching_candidates(ctx, class_id, exponent, model)
    if ctx.p and ell % ctx.p == 0:
        raise TamenessViolation(f"class {class_id} has order {ell}, divisible by p = {ctx.p}")
    if not matches:
        raise NoMatch(f"no alcove point of denominator {ell} matches the profile {target}")
    if len(matches) > 1:
        raise AmbiguousMatch(f"{len(matches)} alcove points match class {class_id}", matches)
    lam = matches[0]
    point = AlcovePoint.from_cocharacter(lam, ell)
    j, coords = kac_coordinates(ctx, point)
    return KacPoint(class_id, ell, lam, point, j, coords)


def all_points(ctx: GroupContext) -> list[KacPoint]:
    """One :class:`KacPoint` per tame elliptic sigma-class; points are asserted pairwise distinct."""
    model = build_adjoint(ctx)
    out = []
    for c in elliptic_class_ids(ctx):
        if ctx.p and class_order(ctx, c) % ctx.p == 0:
            continue
        out.append(assign_point(ctx, c, model=model))
    coords = [kp.point.coords for kp in out]
    if len(set(coords)) != len(coords):
        raise AmbiguousMatch("two elliptic classes share an alcove point", [kp.lam for kp in out])
    return out
