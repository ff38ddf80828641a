"""Root data, isogeny lattices, affine roots and alcove geometry.

Conventions used throughout the package:

* roots are integer vectors in simple-root coordinates;
* cocharacters (lattice vectors) are rational vectors in coroot
  coordinates, so the coroot lattice is ``Z^r`` and the coweight lattice is
  spanned by the columns of ``A^{-T}``;
* the Cartan matrix satisfies ``A[i][j] = <alpha_j, alpha_i^vee>``, hence the
  pairing of a root ``r`` with a cocharacter ``x`` is ``x^T A r``;
* the base vertex of the apartment is the origin.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial, gcd
from typing import Iterable, Sequence

from . import intlin
from .errors import (
    IncompatibleTwists,
    InvalidCartan,
    InvalidLattice,
    SpecError,
    TamenessViolation,
    UnsupportedTwist,
    UnsupportedType,
)
from .intlin import FiniteAbelianGroup, Matrix, Vector

Root = tuple[int, ...]
CartanType = tuple[tuple[str, int], ...]

_TYPE_RE = re.compile(r"^([A-G])(\d+)$")


# ---------------------------------------------------------------------------
# Cartan types
# ---------------------------------------------------------------------------


def parse_cartan_type(name: str) -> CartanType:
    """Parse ``"C2"``, ``"A1xA1"``, ``"A1×G2"`` into ``(("A", 1), ("A", 1))`` etc."""
    parts = re.split(r"\s*[x×*]\s*", name.strip())
    out = []
    for part in parts:
        m = _TYPE_RE.match(part)
        if not m:
            raise UnsupportedType(f"cannot parse Cartan type {name!r}")
        letter, rank = m.group(1), int(m.group(2))
        valid = {
            "A": rank >= 1,
            "B": rank >= 2,
            "C": rank >= 2,
            "D": rank >= 4,
            "E": rank in (6, 7, 8),
            "F": rank == 4,
            "G": rank == 2,
        }[letter]
        if not valid:
            raise UnsupportedType(f"no simple type {part}")
        out.append((letter, rank))
    return tuple(out)


def type_name(cartan_type: CartanType) -> str:
    return "x".join(f"{letter}{rank}" for letter, rank in cartan_type)


def simple_cartan_matrix(letter: str, n: int) -> Matrix:
    """Cartan matrix with Bourbaki numbering and ``A[i][j] = <alpha_j, alpha_i^vee>``."""
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = 2
    if letter in "ABC":
        for i in range(n - 1):
            a[i][i + 1] = a[i + 1][i] = -1
        if letter == "B":  # alpha_n short
            a[n - 1][n - 2] = -2
        elif letter == "C":  # alpha_n long
            a[n - 2][n - 1] = -2
    elif letter == "D":
        for i in range(n - 2):
            a[i][i + 1] = a[i + 1][i] = -1
        a[n - 3][n - 1] = a[n - 1][n - 3] = -1
    elif letter == "E":
        edges = [(0, 2), (2, 3), (3, 4), (1, 3)] + [(k, k + 1) for k in range(4, n - 1)]
        for i, j in edges:
            a[i][j] = a[j][i] = -1
    elif letter == "F":
        a[0][1] = a[1][0] = a[2][3] = a[3][2] = -1
        a[1][2] = -1
        a[2][1] = -2  # alpha_3 short
    elif letter == "G":
        a[0][1] = -3  # alpha_1 short
        a[1][0] = -1
    return intlin.as_matrix(a)


def block_diagonal(blocks: Sequence[Matrix]) -> Matrix:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return intlin.as_matrix(out)


def weyl_group_order(cartan_type: CartanType) -> int:
    out = 1
    for letter, n in cartan_type:
        out *= {
            "A": lambda: factorial(n + 1),
            "B": lambda: 2**n * factorial(n),
            "C": lambda: 2**n * factorial(n),
            "D": lambda: 2 ** (n - 1) * factorial(n),
            "E": lambda: {6: 51840, 7: 2903040, 8: 696729600}[n],
            "F": lambda: 1152,
            "G": lambda: 12,
        }[letter]()
    return out


def validate_cartan_matrix(a: Matrix) -> None:
    n = len(a)
    for i in range(n):
        if a[i][i] != 2:
            raise InvalidCartan("diagonal entries must be 2")
        for j in range(n):
            if i != j and (a[i][j] > 0 or (a[i][j] == 0) != (a[j][i] == 0)):
                raise InvalidCartan("off-diagonal sign pattern is not that of a Cartan matrix")
    # finite type <=> all leading principal minors of the symmetrization positive
    lengths = _squared_lengths(a)
    sym = [[lengths[i] * a[i][j] / 2 for j in range(n)] for i in range(n)]
    if any(sym[i][j] != sym[j][i] for i in range(n) for j in range(n)):
        raise InvalidCartan("matrix is not symmetrizable")
    for k in range(1, n + 1):
        if intlin.det([row[:k] for row in sym[:k]]) <= 0:
            raise InvalidCartan("matrix is not of finite type")


def _squared_lengths(a: Matrix) -> list[Fraction]:
    """Squared lengths ``L_i`` of the simple roots, one free scalar per component.

    They satisfy ``a_ji L_j = a_ij L_i`` (both sides are ``2 (alpha_i, alpha_j)``).
    """
    n = len(a)
    length = [None] * n  # squared root lengths up to a scalar per component
    for start in range(n):
        if length[start] is not None:
            continue
        length[start] = Fraction(1)
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if j != i and a[i][j] != 0 and length[j] is None:
                    # a_ji |alpha_j|^2 = a_ij |alpha_i|^2
                    length[j] = Fraction(a[i][j]) * length[i] / a[j][i]
                    stack.append(j)
    return length


# ---------------------------------------------------------------------------
# diagram automorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagramAut:
    """A permutation of the simple roots (0-indexed: node ``i`` goes to ``perm[i]``)."""

    perm: tuple[int, ...]

    @classmethod
    def identity(cls, rank: int) -> "DiagramAut":
        return cls(tuple(range(rank)))

    @property
    def order(self) -> int:
        k, cur = 1, self
        while not cur.is_identity:
            cur = cur.compose(self)
            k += 1
        return k

    @property
    def is_identity(self) -> bool:
        return all(i == p for i, p in enumerate(self.perm))

    def compose(self, other: "DiagramAut") -> "DiagramAut":
        """``self o other`` (apply ``other`` first)."""
        return DiagramAut(tuple(self.perm[other.perm[i]] for i in range(len(self.perm))))

    def inverse(self) -> "DiagramAut":
        inv = [0] * len(self.perm)
        for i, p in enumerate(self.perm):
            inv[p] = i
        return DiagramAut(tuple(inv))

    def power(self, k: int) -> "DiagramAut":
        k %= self.order
        out = DiagramAut.identity(len(self.perm))
        for _ in range(k):
            out = out.compose(self)
        return out

    def matrix(self) -> Matrix:
        """Permutation matrix on coroot (or root) coordinates: ``e_i -> e_perm[i]``."""
        n = len(self.perm)
        return tuple(tuple(int(self.perm[j] == i) for j in range(n)) for i in range(n))

    def apply(self, v: Sequence) -> tuple:
        out = [0] * len(v)
        for i, x in enumerate(v):
            out[self.perm[i]] = x
        return tuple(out)

    def preserves(self, a: Matrix) -> bool:
        n = len(self.perm)
        return all(a[self.perm[i]][self.perm[j]] == a[i][j] for i in range(n) for j in range(n))

    def __str__(self) -> str:
        if self.is_identity:
            return "id"
        seen, cycles = set(), []
        for i in range(len(self.perm)):
            if i in seen or self.perm[i] == i:
                continue
            cyc, j = [], i
            while j not in seen:
                seen.add(j)
                cyc.append(j + 1)
                j = self.perm[j]
            cycles.append("(" + " ".join(map(str, cyc)) + ")")
        return "".join(cycles)


def _factor_offsets(cartan_type: CartanType) -> list[tuple[int, int]]:
    out, off = [], 0
    for _, n in cartan_type:
        out.append((off, off + n))
        off += n
    return out


def _factor_involution(letter: str, n: int) -> list[int] | None:
    if letter == "A" and n >= 2:
        return [n - 1 - i for i in range(n)]
    if letter == "D":
        perm = list(range(n))
        perm[n - 2], perm[n - 1] = n - 1, n - 2
        return perm
    if letter == "E" and n == 6:
        return [5, 1, 4, 3, 2, 0]
    return None


def parse_diagram_aut(text: str | Sequence[int] | DiagramAut | None, cartan_type: CartanType) -> DiagramAut:
    """Parse ``"id"``, ``"flip"``, 1-indexed cycles ``"(1 2)(3 4)"`` or an explicit permutation."""
    rank = sum(n for _, n in cartan_type)
    if text is None:
        return DiagramAut.identity(rank)
    if isinstance(text, DiagramAut):
        return text
    if not isinstance(text, str):
        perm = tuple(int(x) for x in text)
        if sorted(perm) != list(range(rank)):
            raise SpecError(f"not a permutation of the {rank} simple roots: {perm}")
        return DiagramAut(perm)
    text = text.strip()
    if text == "id":
        return DiagramAut.identity(rank)
    if text == "flip":
        perm = list(range(rank))
        offsets = _factor_offsets(cartan_type)
        flipped = False
        for (letter, n), (lo, _) in zip(cartan_type, offsets):
            inv = _factor_involution(letter, n)
            if inv is not None:
                flipped = True
                for i in range(n):
                    perm[lo + i] = lo + inv[i]
        if not flipped:
            if len(cartan_type) == 2 and cartan_type[0] == cartan_type[1]:
                n = cartan_type[0][1]
                perm = [(i + n) % rank for i in range(rank)]
            else:
                raise SpecError(f"type {type_name(cartan_type)} has no diagram flip")
        return DiagramAut(tuple(perm))
    if not re.fullmatch(r"(\(\s*\d+(\s+\d+)*\s*\))+", text):
        raise SpecError(f"cannot parse diagram automorphism {text!r}")
    perm = list(range(rank))
    seen: set[int] = set()
    for cyc in re.findall(r"\(([^)]*)\)", text):
        nodes = [int(x) - 1 for x in cyc.split()]
        if any(x < 0 or x >= rank or x in seen for x in nodes):
            raise SpecError(f"bad cycle ({cyc}) for rank {rank}")
        seen.update(nodes)
        for a, b in zip(nodes, nodes[1:] + nodes[:1]):
            perm[a] = b
    return DiagramAut(tuple(perm))


def diagram_automorphism_group(a: Matrix) -> list[DiagramAut]:
    """All permutations of the nodes preserving the Cartan matrix (backtracking)."""
    n = len(a)
    out: list[DiagramAut] = []

    def extend(partial: list[int]) -> None:
        k = len(partial)
        if k == n:
            out.append(DiagramAut(tuple(partial)))
            return
        for img in range(n):
            if img in partial or a[img][img] != a[k][k]:
                continue
            if all(a[partial[j]][img] == a[j][k] and a[img][partial[j]] == a[k][j] for j in range(k)):
                extend(partial + [img])

    extend([])
    return out


# ---------------------------------------------------------------------------
# group context
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupContext:
    """Validated root datum with cocharacter lattice, twists and residue data.

    ``cochar_basis`` holds a basis of the cocharacter lattice as columns in
    coroot coordinates (entries may be rational: coweights are not integral
    in coroot coordinates).  ``sigma`` is the inertia twist and ``fr`` the
    Frobenius twist.  ``p`` is the residue characteristic (0 if irrelevant)
    and ``q`` the residue field size (``None`` for geometry-only queries).
    """

    cartan_type: CartanType
    cartan_matrix: Matrix
    cochar_basis: Matrix
    sigma: DiagramAut
    fr: DiagramAut
    p: int = 0
    q: int | None = None
    isogeny: str = field(default="sc", compare=False)

    # -- basic data ------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.cartan_matrix)

    @property
    def name(self) -> str:
        return type_name(self.cartan_type)

    @cached_property
    def factors(self) -> tuple[tuple[int, int], ...]:
        """Node ranges ``[lo, hi)`` of the simple factors."""
        return tuple(_factor_offsets(self.cartan_type))

    @cached_property
    def factor_of_node(self) -> tuple[int, ...]:
        out = [0] * self.rank
        for f, (lo, hi) in enumerate(self.factors):
            for i in range(lo, hi):
                out[i] = f
        return tuple(out)

    @cached_property
    def connection_index(self) -> int:
        return abs(intlin.det(self.cartan_matrix))

    @cached_property
    def root_lengths(self) -> tuple[Fraction, ...]:
        """Squared lengths of the simple roots, normalized so short roots have length 2."""
        raw = _squared_lengths(self.cartan_matrix)
        out = list(raw)
        for lo, hi in self.factors:
            shortest = min(raw[lo:hi])
            for i in range(lo, hi):
                out[i] = 2 * raw[i] / shortest
        return tuple(out)

    def inner(self, r: Sequence[int], s: Sequence[int]) -> Fraction:
        """W-invariant inner product of two vectors in root coordinates."""
        a, ln = self.cartan_matrix, self.root_lengths
        total = Fraction(0)
        for i, x in enumerate(r):
            if x:
                for j, y in enumerate(s):
                    if y and a[j][i]:
                        total += x * y * a[j][i] * ln[j] / 2
        return total

    def pair(self, root: Sequence, x: Sequence) -> Fraction | int:
        """``<root, x>`` for a root (root coordinates) and cocharacter (coroot coordinates)."""
        a = self.cartan_matrix
        total = 0
        for i, xi in enumerate(x):
            if xi:
                row = a[i]
                total += xi * sum(row[j] * root[j] for j in range(len(root)) if root[j])
        return total

    # -- roots ------------------------------------------------------------

    @cached_property
    def _root_data(self) -> tuple[tuple[Root, ...], tuple[Vector, ...]]:
        a = self.cartan_matrix
        n = self.rank
        simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        found = {r: None for r in simple}
        frontier = list(simple)
        while frontier:
            nxt = []
            for r in frontier:
                for i in range(n):
                    c = sum(a[i][j] * r[j] for j in range(n))
                    if c:
                        s = tuple(r[j] - (c if j == i else 0) for j in range(n))
                        if s not in found:
                            found[s] = None
                            nxt.append(s)
            frontier = nxt
        positive = sorted((r for r in found if all(x >= 0 for x in r)), key=lambda r: (sum(r), tuple(-x for x in r)))
        roots = tuple(positive) + tuple(tuple(-x for x in r) for r in positive)
        ln = self.root_lengths
        coroots = []
        for r in roots:
            norm = self.inner(r, r)
            coroots.append(tuple(intlin._norm(Fraction(r[j]) * ln[j] / norm) for j in range(n)))
        return roots, tuple(coroots)

    @property
    def roots(self) -> tuple[Root, ...]:
        """All roots: positive ones sorted by (height, coordinates), then their negatives."""
        return self._root_data[0]

    @property
    def coroots(self) -> tuple[Vector, ...]:
        """Coroot of each root, in coroot coordinates (integral)."""
        return self._root_data[1]

    @cached_property
    def root_index(self) -> dict[Root, int]:
        return {r: k for k, r in enumerate(self.roots)}

    @property
    def num_positive(self) -> int:
        return len(self.roots) // 2

    def negative_index(self, k: int) -> int:
        npos = self.num_positive
        return k + npos if k < npos else k - npos

    def is_long(self, root: Sequence[int]) -> bool:
        lo = min(self.inner(r, r) for r in self.roots if self._same_factor(r, root))
        return self.inner(root, root) > lo

    def _same_factor(self, r: Sequence[int], s: Sequence[int]) -> bool:
        fr = {self.factor_of_node[i] for i, x in enumerate(r) if x}
        fs = {self.factor_of_node[i] for i, x in enumerate(s) if x}
        return fr == fs

    @cached_property
    def highest_roots(self) -> tuple[Root, ...]:
        out = []
        for f, (lo, hi) in enumerate(self.factors):
            cands = [r for r in self.roots[: self.num_positive] if all(r[i] == 0 for i in range(self.rank) if not lo <= i < hi)]
            out.append(max(cands, key=lambda r: (sum(r), r)))
        return tuple(out)

    @cached_property
    def coweights(self) -> tuple[Vector, ...]:
        """Fundamental coweights in coroot coordinates (columns of ``A^{-T}``)."""
        inv_t = intlin.inverse(intlin.transpose(self.cartan_matrix))
        return tuple(tuple(inv_t[i][j] for i in range(self.rank)) for j in range(self.rank))

    # -- lattice ----------------------------------------------------------

    @cached_property
    def basis_inverse(self) -> Matrix:
        return intlin.inverse(self.cochar_basis)

    def to_lattice(self, x: Sequence) -> Vector:
        """Coordinates of a coroot-coordinate vector in the cocharacter-lattice basis."""
        return intlin.mat_vec(self.basis_inverse, x)

    def from_lattice(self, y: Sequence) -> Vector:
        return intlin.normalize([intlin.mat_vec(self.cochar_basis, y)])[0]

    def in_lattice(self, x: Sequence) -> bool:
        return intlin.is_integral(self.to_lattice(x))

    def lattice_matrix(self, m: Matrix) -> Matrix:
        """Conjugate a coroot-coordinate operator into lattice coordinates (must be integral)."""
        out = intlin.mat_mul(intlin.mat_mul(self.basis_inverse, m), self.cochar_basis)
        return intlin.normalize(out)

    @cached_property
    def lattice_index(self) -> int:
        """``[X_* : Q^vee]``."""
        return abs(Fraction(1) / Fraction(intlin.det(self.cochar_basis))).numerator

    @cached_property
    def aut_group_order(self) -> int:
        return len(diagram_automorphism_group(self.cartan_matrix))

    @cached_property
    def weyl_order(self) -> int:
        return weyl_group_order(self.cartan_type)

    def with_lattice(self, cochar_basis: Matrix, isogeny: str) -> "GroupContext":
        ctx = GroupContext(
            self.cartan_type, self.cartan_matrix, intlin.normalize(cochar_basis), self.sigma, self.fr, self.p, self.q, isogeny
        )
        _validate_lattice(ctx)
        return ctx

    def with_q(self, q: int | None, p: int | None = None) -> "GroupContext":
        if q is not None and p is None:
            p = prime_of_q(q)
        return GroupContext(
            self.cartan_type, self.cartan_matrix, self.cochar_basis, self.sigma, self.fr, p or 0, q, self.isogeny
        )

    def simply_connected(self) -> "GroupContext":
        return self.with_lattice(intlin.identity(self.rank), "sc")

    def adjoint(self) -> "GroupContext":
        return self.with_lattice(adjoint_basis(self.cartan_matrix), "ad")

    @property
    def is_simply_connected(self) -> bool:
        return self.lattice_index == 1


def adjoint_basis(a: Matrix) -> Matrix:
    return intlin.inverse(intlin.transpose(a))


def prime_of_q(q: int) -> int:
    if q < 2:
        raise SpecError(f"q = {q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    m = q
    while m % p == 0:
        m //= p
    if m != 1:
        raise SpecError(f"q = {q} is not a prime power")
    return p


def _validate_lattice(ctx: GroupContext) -> None:
    b = ctx.cochar_basis
    n = ctx.rank
    if len(b) != n or any(len(row) != n for row in b) or intlin.det(b) == 0:
        raise InvalidLattice("cocharacter basis must be an invertible r x r matrix")
    binv = intlin.inverse(b)
    if not all(intlin.is_integral(row) for row in binv):
        raise InvalidLattice("lattice does not contain the coroot lattice")
    at_b = intlin.mat_mul(intlin.transpose(ctx.cartan_matrix), b)
    if not all(intlin.is_integral(row) for row in at_b):
        raise InvalidLattice("lattice is not contained in the coweight lattice")
    if ctx.connection_index % ctx.lattice_index:
        raise InvalidLattice("lattice index does not divide the connection index")
    for name, aut in (("sigma", ctx.sigma), ("fr", ctx.fr)):
        m = intlin.mat_mul(intlin.mat_mul(binv, aut.matrix()), b)
        if not all(intlin.is_integral(row) for row in m):
            raise InvalidLattice(f"{name} does not stabilize the cocharacter lattice")


@dataclass(frozen=True)
class GroupSpec:
    """Plain description of a group, as read from a spec document."""

    type: str
    isogeny: str | Sequence[Sequence] = "sc"
    sigma: str | Sequence[int] = "id"
    fr: str | Sequence[int] = "id"
    p: int | None = None
    q: int | None = None


def build_group(
    spec: GroupSpec | str,
    *,
    isogeny: str | Sequence[Sequence] | None = None,
    sigma: str | Sequence[int] | DiagramAut | None = None,
    fr: str | Sequence[int] | DiagramAut | None = None,
    p: int | None = None,
    q: int | None = None,
    strict_tameness: bool = True,
) -> GroupContext:
    """Validate a group description and return its :class:`GroupContext`.

    With ``strict_tameness`` (the default) a residue characteristic dividing
    ``|W x Aut(diagram)|`` is rejected outright.  Passing ``False`` accepts
    such ``p``; downstream operations then restrict to tame classes.
    """
    if isinstance(spec, str):
        spec = GroupSpec(spec)
    isogeny = spec.isogeny if isogeny is None else isogeny
    sigma = spec.sigma if sigma is None else sigma
    fr = spec.fr if fr is None else fr
    p = spec.p if p is None else p
    q = spec.q if q is None else q

    cartan_type = parse_cartan_type(spec.type)
    a = block_diagonal([simple_cartan_matrix(letter, n) for letter, n in cartan_type])
    validate_cartan_matrix(a)
    n = len(a)
    if n == 0:
        raise UnsupportedType("rank-0 groups are not supported")

    if isinstance(isogeny, str):
        if isogeny == "sc":
            basis = intlin.identity(n)
        elif isogeny == "ad":
            basis = adjoint_basis(a)
        else:
            raise SpecError(f"unknown isogeny {isogeny!r} (expected sc, ad or a matrix)")
        iso_name = isogeny
    else:
        try:
            basis = intlin.normalize([[Fraction(x) for x in row] for row in isogeny])
        except (TypeError, ValueError) as exc:
            raise InvalidLattice(f"bad lattice matrix: {exc}") from exc
        iso_name = "matrix"

    sig = parse_diagram_aut(sigma, cartan_type)
    frob = parse_diagram_aut(fr, cartan_type)
    for name, aut in (("sigma", sig), ("fr", frob)):
        if len(aut.perm) != n:
            raise SpecError(f"{name} has the wrong length")
        if not aut.preserves(a):
            raise IncompatibleTwists(f"{name} does not preserve the Cartan matrix")

    if q is not None:
        q = int(q)
        qp = prime_of_q(q)
        if p is not None and p != qp:
            raise SpecError(f"q = {q} is not a power of p = {p}")
        p = qp
    p = int(p or 0)
    if p and any(p % d == 0 for d in range(2, p)):
        raise SpecError(f"p = {p} is not prime")

    ctx = GroupContext(cartan_type, a, basis, sig, frob, p, q, iso_name)
    _validate_lattice(ctx)

    if q is not None:
        lhs = frob.inverse().compose(sig).compose(frob)
        if lhs != sig.power(q):
            raise IncompatibleTwists("Fr^-1 sigma Fr != sigma^q on the diagram")
    if p and strict_tameness and (ctx.weyl_order * ctx.aut_group_order) % p == 0:
        raise TamenessViolation(f"p = {p} divides |W x Aut| = {ctx.weyl_order * ctx.aut_group_order}")
    return ctx


# ---------------------------------------------------------------------------
# affine roots and the alcove
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineRoot:
    """The affine function ``x -> level + <gradient, x>`` on the apartment.

    ``gradient`` is an absolute root (root coordinates); in the twisted case
    it stands for its restriction to the sigma-fixed subspace.
    """

    gradient: Root
    level: Fraction
    label: str
    mark: int
    factor: int

    def value(self, ctx: GroupContext, x: Sequence) -> Fraction:
        return Fraction(self.level) + ctx.pair(self.gradient, x)

    def __str__(self) -> str:
        return f"{self.label}"


@dataclass(frozen=True)
class FactorOrbit:
    """A sigma-orbit of simple factors and how its affine roots are modelled."""

    nodes: tuple[int, ...]
    kind: str  # "split" or "su3"
    factor: int


def factor_orbits(ctx: GroupContext) -> tuple[FactorOrbit, ...]:
    """Split the diagram into sigma-orbits of factors; only two kinds are supported."""
    out = []
    for f, (lo, hi) in enumerate(ctx.factors):
        nodes = tuple(range(lo, hi))
        images = {ctx.sigma.perm[i] for i in nodes}
        if images != set(nodes):
            raise UnsupportedTwist("sigma permuting simple factors is not implemented")
        if all(ctx.sigma.perm[i] == i for i in nodes):
            out.append(FactorOrbit(nodes, "split", f))
        elif ctx.cartan_type[f] == ("A", 2):
            out.append(FactorOrbit(nodes, "su3", f))
        else:
            raise UnsupportedTwist(
                f"twisted affine roots are implemented only for the A2 flip, not {type_name((ctx.cartan_type[f],))}"
            )
    return tuple(out)


def _node_label(i: int) -> str:
    return f"a{i + 1}"


def simple_affine_roots(ctx: GroupContext) -> tuple[AffineRoot, ...]:
    """Simple affine roots of the (relative) affine root system, per factor.

    For a split factor these are ``-highest + 1`` followed by the simple
    roots at level 0; marks are the highest-root coefficients (1 for the
    affine node).  For the ramified A2 flip there are two walls: the
    restriction of ``alpha_1`` at level 0 (mark 2) and ``-(alpha_1+alpha_2)``
    at level 1/2 (mark 1).
    """
    out: list[AffineRoot] = []
    for orb in factor_orbits(ctx):
        lo = orb.nodes[0]
        if orb.kind == "split":
            high = ctx.highest_roots[orb.factor]
            out.append(AffineRoot(tuple(-x for x in high), Fraction(1), f"a0[{orb.factor + 1}]" if len(ctx.factors) > 1 else "a0", 1, orb.factor))
            for i in orb.nodes:
                simple = tuple(int(j == i) for j in range(ctx.rank))
                out.append(AffineRoot(simple, Fraction(0), _node_label(i), high[i], orb.factor))
        else:
            a1 = tuple(int(j == lo) for j in range(ctx.rank))
            a12 = tuple(-int(j in (lo, lo + 1)) for j in range(ctx.rank))
            out.append(AffineRoot(a1, Fraction(0), _node_label(lo), 2, orb.factor))
            out.append(AffineRoot(a12, Fraction(1, 2), f"1/2-({_node_label(lo)}+{_node_label(lo + 1)})", 1, orb.factor))
    return tuple(out)


def mark_constant(ctx: GroupContext, factor: int) -> Fraction:
    """The constant ``sum_psi a_psi psi`` on the given factor (1 split, 1/2 ramified A2)."""
    for orb in factor_orbits(ctx):
        if orb.factor == factor:
            return Fraction(1) if orb.kind == "split" else Fraction(1, 2)
    raise KeyError(factor)


def fixed_subspace_dimension(ctx: GroupContext) -> int:
    m = intlin.mat_sub(ctx.sigma.matrix(), intlin.identity(ctx.rank))
    return ctx.rank - intlin.rank(m)


@dataclass(frozen=True)
class AlcovePoint:
    """A rational point of the apartment, ``coords`` in coroot coordinates.

    ``denominator`` is a positive integer ``l`` with ``l * coords`` in the
    cocharacter lattice (it need not be minimal).
    """

    coords: tuple[Fraction, ...]
    denominator: int = 1

    @classmethod
    def from_cocharacter(cls, lam: Sequence, ell: int) -> "AlcovePoint":
        return cls(tuple(Fraction(x) / ell for x in lam), ell)

    @property
    def numerator(self) -> tuple:
        return intlin.normalize([[x * self.denominator for x in self.coords]])[0]

    def same_point(self, other: "AlcovePoint") -> bool:
        return tuple(self.coords) == tuple(other.coords)

    @property
    def reduced(self) -> "AlcovePoint":
        """The same point with the least denominator."""
        d = 1
        for x in self.coords:
            d = d * x.denominator // gcd(d, x.denominator)
        return AlcovePoint(self.coords, d)

    def format(self) -> str:
        """Render as ``x0 + (..)/l`` with the least common denominator."""
        red = self.reduced
        return format_cocharacter(red.numerator, red.denominator)


def format_cocharacter(lam: Sequence, ell: int = 1) -> str:
    """Human-readable ``x0 + (3a1v + 4a2v)/8`` style rendering (``aiv`` = i-th simple coroot)."""
    terms = []
    for i, c in enumerate(lam):
        c = Fraction(c)
        if c == 0:
            continue
        coef = "" if c == 1 else ("-" if c == -1 else str(c))
        terms.append(f"{coef}a{i + 1}v")
    if not terms:
        return "x0"
    body = " + ".join(terms).replace("+ -", "- ")
    if ell == 1:
        return f"x0 + {body}" if len(terms) == 1 else f"x0 + ({body})"
    return f"x0 + ({body})/{ell}"


@dataclass(frozen=True)
class Membership:
    """Result of :func:`alcove_membership`: ``kind`` is interior, boundary or outside."""

    kind: str
    vanishing: tuple[int, ...] = ()

    def __str__(self) -> str:
        if self.kind == "boundary":
            return f"boundary{list(self.vanishing)}"
        return self.kind


def alcove_membership(ctx: GroupContext, x: AlcovePoint) -> Membership:
    """Locate ``x`` relative to the closed fundamental alcove by the signs of all walls."""
    _check_fixed(ctx, x.coords)
    values = [psi.value(ctx, x.coords) for psi in simple_affine_roots(ctx)]
    if any(v < 0 for v in values):
        return Membership("outside")
    zero = tuple(i for i, v in enumerate(values) if v == 0)
    return Membership("boundary", zero) if zero else Membership("interior")


def _check_fixed(ctx: GroupContext, coords: Sequence) -> None:
    if ctx.sigma.apply(tuple(coords)) != tuple(coords):
        raise ValueError("point is not fixed by sigma")


@dataclass(frozen=True)
class SubsystemType:
    """Type of a root subsystem: components ``(letter, rank, short)``.

    ``short`` marks a type-A component made of short roots inside a
    non-simply-laced factor (printed with a tilde).
    """

    components: tuple[tuple[str, int, bool], ...]

    @property
    def rank(self) -> int:
        return sum(n for _, n, _ in self.components)

    def __str__(self) -> str:
        if not self.components:
            return "empty"
        return "×".join(f"{letter}̃{n}" if short else f"{letter}{n}" for letter, n, short in self.components)


def subsystem_type(ctx: GroupContext, subset: Iterable[Sequence[int]], prefer: str | None = None) -> SubsystemType:
    """Cartan type of a root subsystem given as a reflection-closed set of roots."""
    subset = {tuple(r) for r in subset}
    pos = [r for r in ctx.roots if r in subset and all(x >= 0 for x in r)]
    coroot = dict(zip(ctx.roots, ctx.coroots))

    def reflect(r, s):  # s_s(r)
        c = ctx.pair(r, coroot[s])
        return tuple(ri - c * si for ri, si in zip(r, s))

    simple = [s for s in pos if all(reflect(r, s) in subset and any(x > 0 for x in reflect(r, s)) for r in pos if r != s)]
    k = len(simple)
    cm = [[ctx.pair(simple[j], coroot[simple[i]]) for j in range(k)] for i in range(k)]
    # connected components
    comp_of = [-1] * k
    comps = []
    for i in range(k):
        if comp_of[i] >= 0:
            continue
        stack, members = [i], []
        comp_of[i] = len(comps)
        while stack:
            u = stack.pop()
            members.append(u)
            for v in range(k):
                if comp_of[v] < 0 and cm[u][v]:
                    comp_of[v] = len(comps)
                    stack.append(v)
        comps.append(sorted(members))
    parent_simply_laced = all(
        all(ctx.cartan_matrix[i][j] in (0, -1, 2) for j in range(ctx.rank)) for i in range(ctx.rank)
    )
    out = []
    for members in comps:
        sub = [[cm[i][j] for j in members] for i in members]
        letter, n = _identify(sub, prefer)
        short = False
        if letter == "A" and not parent_simply_laced:
            root = simple[members[0]]
            short = not ctx.is_long(root) and any(
                ctx.is_long(r) for r in ctx.roots if ctx._same_factor(r, root)
            )
        out.append((letter, n, short))
    out.sort(key=lambda c: ("ABCDEFG".index(c[0]), -c[1], c[2]))
    return SubsystemType(tuple(out))


def _identify(cm: list[list[int]], prefer: str | None = None) -> tuple[str, int]:
    n = len(cm)
    if n == 1:
        return ("A", 1)
    products = [cm[i][j] * cm[j][i] for i in range(n) for j in range(i + 1, n) if cm[i][j]]
    degree = [sum(1 for j in range(n) if j != i and cm[i][j]) for i in range(n)]
    if 3 in products:
        return ("G", 2)
    if 2 in products:
        if n == 4 and max(degree) == 2:
            # F4 when the double bond is in the middle of the chain
            i, j = next((i, j) for i in range(n) for j in range(n) if i != j and cm[i][j] * cm[j][i] == 2)
            if degree[i] == 2 and degree[j] == 2:
                return ("F", 4)
        if n == 2:
            return (prefer if prefer in ("B", "C") else "B", 2)
        # double bond at an end: B if the end node is short, C otherwise
        i, j = next((i, j) for i in range(n) for j in range(n) if i != j and cm[i][j] * cm[j][i] == 2)
        end, inner_node = (i, j) if degree[i] == 1 else (j, i)
        # cm[a][b] = <beta_b, beta_a^vee> has absolute value 2 exactly when beta_a is the short one
        end_short = abs(cm[end][inner_node]) == 2
        return ("B" if end_short else "C", n)
    if max(degree) <= 2:
        return ("A", n)
    branch = degree.index(3)
    arms = []
    for start in (j for j in range(n) if j != branch and cm[branch][j]):
        length, prev, cur = 1, branch, start
        while True:
            nxt = [j for j in range(n) if j not in (prev, cur) and cm[cur][j]]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return ("D", n)
    return ("E", n)


@dataclass(frozen=True)
class LocalSubsystem:
    """Root system of the reductive quotient at a point, and of the cocharacter's Levi."""

    at_point: SubsystemType
    levi: SubsystemType | None


def integral_roots(ctx: GroupContext, coords: Sequence) -> list[Root]:
    """Roots with a vanishing affine root at the point (split: ``<a, x>`` integral)."""
    orbits = factor_orbits(ctx)
    kind = {}
    for orb in orbits:
        for i in orb.nodes:
            kind[i] = orb.kind
    out = []
    for r in ctx.roots:
        node = next(i for i, x in enumerate(r) if x)
        v = Fraction(ctx.pair(r, coords))
        if kind[node] == "split":
            if v.denominator == 1:
                out.append(r)
        else:
            # ramified A2: gradient a (restriction of alpha_1, alpha_2) has levels (1/2)Z,
            # gradient 2a (restriction of alpha_1+alpha_2) has levels 1/2 + Z.
            if sum(abs(x) for x in r) == 1:
                if (2 * v).denominator == 1:
                    out.append(r)
            elif (v - Fraction(1, 2)).denominator == 1:
                out.append(r)
    return out


def _support(r: Sequence[int]) -> set[int]:
    return {i for i, x in enumerate(r) if x}


def local_root_subsystem(ctx: GroupContext, x: AlcovePoint, lam: Sequence | None = None) -> LocalSubsystem:
    """Type of the reductive quotient at ``x``; with ``lam`` also the centralizer of that cocharacter.

    The second component lists the roots with ``<alpha, lam> = 0``: these
    form the Levi subgroup centralizing the cocharacter at the base vertex,
    which in general differs from the quotient at ``x``.
    """
    _check_fixed(ctx, x.coords)
    prefer = ctx.cartan_type[0][0] if len(ctx.cartan_type) == 1 else None
    split_nodes, twisted = set(), []
    for orb in factor_orbits(ctx):
        if orb.kind == "split":
            split_nodes.update(orb.nodes)
        else:
            twisted.append(set(orb.nodes))
    vanishing = integral_roots(ctx, x.coords)
    at_point = subsystem_type(ctx, [r for r in vanishing if _support(r) <= split_nodes], prefer)
    extra = [("A", 1, False) for nodes in twisted if any(_support(r) <= nodes for r in vanishing)]
    if extra:
        at_point = SubsystemType(tuple(sorted(at_point.components + tuple(extra), key=lambda c: ("ABCDEFG".index(c[0]), -c[1], c[2]))))
    levi = None
    if lam is not None:
        levi = subsystem_type(ctx, [r for r in ctx.roots if ctx.pair(r, lam) == 0], prefer)
    return LocalSubsystem(at_point, levi)


# ---------------------------------------------------------------------------
# fundamental group
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FundamentalGroup:
    """``X_* / Q^vee`` with the matrix of the Frobenius twist and its coinvariants."""

    group: FiniteAbelianGroup
    fr_action: Matrix
    coinvariants: FiniteAbelianGroup


def fundamental_group(ctx: GroupContext) -> FundamentalGroup:
    """The group Omega = ``X_*/Q^vee`` (computed in lattice coordinates) with its Fr action."""
    coroot_lattice = intlin.normalize(ctx.basis_inverse)  # columns: simple coroots in lattice coordinates
    group = intlin.cokernel(coroot_lattice)
    fr_lat = ctx.lattice_matrix(ctx.fr.matrix())
    e = group.endomorphism(lambda v: intlin.mat_vec(fr_lat, v)) if not group.is_trivial else ()
    return FundamentalGroup(group, e, intlin.coinvariants(group, e) if not group.is_trivial else group)


def central_cocharacters(ctx: GroupContext) -> list[Vector]:
    """Representatives (coroot coordinates) of ``X_*/Q^vee``, i.e. the kernel of ``G_sc -> G``."""
    om = fundamental_group(ctx).group
    reps = []
    for c in om.elements():
        reps.append(ctx.from_lattice(om.element(c)))
    return reps


def fixed_lattice_basis(ctx: GroupContext) -> list[Vector]:
    """A Z-basis (coroot coordinates) of the sigma-fixed cocharacters ``X_*^sigma``."""
    n = ctx.rank
    s_lat = ctx.lattice_matrix(ctx.sigma.matrix())
    m = intlin.mat_sub(s_lat, intlin.identity(n))
    # kernel of an integer matrix: columns of V beyond the rank in U m V = D
    _, d, v = intlin.smith(m)
    diag = intlin.diagonal(d)
    r = sum(1 for x in diag if x)
    basis = [tuple(v[i][j] for i in range(n)) for j in range(r, n)]
    return [ctx.from_lattice(b) for b in basis]


def alcove_vertices(ctx: GroupContext) -> list[tuple[Fraction, ...]]:
    """Vertices of the closed alcove inside the sigma-fixed subspace (coroot coordinates)."""
    walls = simple_affine_roots(ctx)
    n = ctx.rank
    # parametrize V^sigma by a rational basis of the fixed space
    fixed = intlin.kernel_basis(intlin.mat_sub(ctx.sigma.matrix(), intlin.identity(n)))
    k = len(fixed)
    rows = []
    for psi in walls:
        grad = [ctx.pair(psi.gradient, b) for b in fixed]
        rows.append((grad, psi.level))
    verts = []
    for combo in itertools.combinations(range(len(rows)), k):
        a = [rows[i][0] for i in combo]
        if intlin.det(a) == 0:
            continue
        inv = intlin.inverse(a)
        t = intlin.mat_vec(inv, [-rows[i][1] for i in combo])
        if all(sum(Fraction(g) * ti for g, ti in zip(grad, t)) + lvl >= 0 for grad, lvl in rows):
            pt = tuple(Fraction(sum(Fraction(b[j]) * ti for b, ti in zip(fixed, t))) for j in range(n))
            if pt not in verts:
                verts.append(pt)
    return verts


def gcd_all(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g
