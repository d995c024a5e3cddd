"""Finite pretopological spaces as bitmask tables.

A space is a point tuple plus one vicinity kernel per point (the least
vicinity; on a finite space the vicinity filter is principal over it).
Subsets and kernels are bitmasks in declaration order, which also fixes
every deterministic witness: scans run over ascending masks and report
the first hit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import (
    AxiomViolation,
    EmptyKernel,
    EmptySubspace,
    InvalidTopology,
    PointSetMismatch,
    SizeLimit,
)


@dataclass(frozen=True)
class Verdict:
    """Boolean outcome plus the first counterexample found, if any."""

    ok: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class PrincipalFilter:
    """Filter on a finite space, represented by its kernel mask."""

    kernel: int

    def __post_init__(self):
        if self.kernel == 0:
            raise EmptyKernel("a filter kernel cannot be empty")


@dataclass(frozen=True)
class FinitePretop:
    points: tuple[str, ...]
    vicinity: tuple[int, ...]  # least vicinity kernel per point index

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    # -- masks and names ---------------------------------------------------

    def index(self, name: str) -> int:
        try:
            return self.points.index(name)
        except ValueError:
            raise PointSetMismatch(f"no point named {name!r}") from None

    def mask(self, names) -> int:
        m = 0
        for name in names:
            m |= 1 << self.index(name)
        return m

    def names(self, mask: int) -> tuple[str, ...]:
        return tuple(p for i, p in enumerate(self.points) if mask >> i & 1)

    def subsets(self):
        return range(self.full + 1)

    def kernels(self):
        return range(1, self.full + 1)

    # -- the two operators ----------------------------------------------------

    def adh(self, a: int) -> int:
        """Points whose least vicinity meets a."""
        out = 0
        for i, m in enumerate(self.vicinity):
            if m & a:
                out |= 1 << i
        return out

    def inh(self, a: int) -> int:
        """Points whose least vicinity lies inside a."""
        out = 0
        for i, m in enumerate(self.vicinity):
            if m & ~a == 0:
                out |= 1 << i
        return out

    def adh_filter(self, f: PrincipalFilter) -> int:
        return self.adh(f.kernel)

    def converges(self, f: PrincipalFilter, x: int) -> bool:
        """Filter convergence: kernel inside the least vicinity of x."""
        return f.kernel & ~self.vicinity[x] == 0

    def adh_table(self) -> tuple[int, ...]:
        return tuple(self.adh(a) for a in self.subsets())

    def inh_table(self) -> tuple[int, ...]:
        return tuple(self.inh(a) for a in self.subsets())

    def restrict(self, a: int) -> "FinitePretop":
        if a == 0:
            raise EmptySubspace("cannot restrict to the empty set")
        keep = [i for i in range(self.n) if a >> i & 1]
        pts = tuple(self.points[i] for i in keep)
        vic = []
        for i in keep:
            m = self.vicinity[i] & a
            vic.append(sum(1 << k for k, j in enumerate(keep) if m >> j & 1))
        return FinitePretop(pts, tuple(vic))


def validate_space(points, table) -> FinitePretop:
    """Build a space from name -> vicinity-names, checking the point axiom."""
    points = tuple(points)
    space = FinitePretop(points, tuple(0 for _ in points))
    vic = []
    for i, p in enumerate(points):
        m = space.mask(table[p])
        if not m >> i & 1:
            raise AxiomViolation(f"point {p!r} missing from its own vicinity")
        vic.append(m)
    return FinitePretop(points, tuple(vic))


# -- separation, topologicity, regularity -----------------------------------


def is_hausdorff(space: FinitePretop) -> Verdict:
    for i in range(space.n):
        for j in range(i + 1, space.n):
            if space.vicinity[i] & space.vicinity[j]:
                return Verdict(False, (space.points[i], space.points[j]))
    return Verdict(True)


def is_topological(space: FinitePretop) -> Verdict:
    for a in space.subsets():
        adh = space.adh(a)
        if space.adh(adh) != adh:
            return Verdict(False, space.names(a))
    return Verdict(True)


def is_regular(space: FinitePretop) -> Verdict:
    """Closed least vicinities: adh(M(x)) = M(x) for every x."""
    for i in range(space.n):
        if space.adh(space.vicinity[i]) != space.vicinity[i]:
            return Verdict(False, space.points[i])
    return Verdict(True)


def coarser_leq(sp1: FinitePretop, sp2: FinitePretop) -> Verdict:
    """sp1 <= sp2 in the coarser-than order: every sp2-limit is an
    sp1-limit, i.e. sp2's vicinity kernels sit inside sp1's."""
    if sp1.points != sp2.points:
        raise PointSetMismatch("comparing spaces over different point tuples")
    for i in range(sp1.n):
        if sp2.vicinity[i] & ~sp1.vicinity[i]:
            return Verdict(False, sp1.points[i])
    return Verdict(True)


# -- covers and compactness ---------------------------------------------------


def is_cover(space: FinitePretop, family, at: int | None = None) -> Verdict:
    """A family covers ``at`` when each of its points has a family member
    among its vicinities (i.e. containing its least vicinity)."""
    at = space.full if at is None else at
    for i in range(space.n):
        if at >> i & 1 and not any(space.vicinity[i] & ~c == 0 for c in family):
            return Verdict(False, space.points[i])
    return Verdict(True)


def _choice_covers(space: FinitePretop, at: int):
    """All covers of ``at`` that pick one vicinity per point.  Every cover
    contains such a choice family, and the tested properties are monotone
    under adding members, so quantifying over these suffices."""
    idx = [i for i in range(space.n) if at >> i & 1]
    pools = []
    for i in idx:
        m = space.vicinity[i]
        sup = [m]
        t = m
        while t != space.full:
            t = (t + 1) | m
            sup.append(t)
        pools.append(sup)
    for pick in itertools.product(*pools):
        yield pick


def compact_at(space: FinitePretop, f: PrincipalFilter, at: int, method: str = "filter") -> Verdict:
    """Compactness of a filter at a set, by either characterization."""
    if at == 0:
        raise EmptySubspace("compactness at the empty set is not defined")
    return _compact_at_mask(space, f.kernel, at, method)


def _compact_at_mask(space: FinitePretop, kernel: int, at: int, method: str) -> Verdict:
    if method == "filter":
        # every filter meshing with f must adhere inside `at`
        for k in space.kernels():
            if k & kernel and not space.adh(k) & at:
                return Verdict(False, space.names(k))
        return Verdict(True)
    if method == "cover":
        # every cover of `at` must swallow a member of f in finitely many steps
        for pick in _choice_covers(space, at):
            union = 0
            for c in pick:
                union |= c
            if kernel & ~union:
                return Verdict(False, tuple(space.names(c) for c in pick))
        return Verdict(True)
    raise ValueError(f"unknown method {method!r}")


def is_cover_compact(space: FinitePretop, at: int, method: str = "cover") -> Verdict:
    """Cover-compact subsets, by any of the three characterizations."""
    if at == 0:
        raise EmptySubspace("cover-compactness of the empty set is not defined")
    if method == "cover":
        for pick in _choice_covers(space, at):
            union = 0
            for c in pick:
                union |= c
            if at & ~space.inh(union):
                return Verdict(False, tuple(space.names(c) for c in pick))
        return Verdict(True)
    if method == "filter-refines":
        # adh F disjoint from `at` forces a member already avoiding it
        for k in space.kernels():
            if space.adh(k) & at:
                continue
            member = k
            found = False
            while True:
                if not space.adh(member) & at:
                    found = True
                    break
                if member == space.full:
                    break
                member = (member + 1) | k
            if not found:
                return Verdict(False, space.names(k))
        return Verdict(True)
    if method == "vicinity-separation":
        # adh F disjoint from `at` forces a vicinity of `at` missing a member
        for k in space.kernels():
            if space.adh(k) & at:
                continue
            hit = False
            for v in space.subsets():
                if at & ~space.inh(v):
                    continue
                member = k
                while True:
                    if v & member == 0:
                        hit = True
                        break
                    if member == space.full:
                        break
                    member = (member + 1) | k
                if hit:
                    break
            if not hit:
                return Verdict(False, space.names(k))
        return Verdict(True)
    raise ValueError(f"unknown method {method!r}")


# -- enumeration -----------------------------------------------------------------


def enumerate_pretops(n: int):
    """All pretopologies on n named points, lexicographically by the
    per-point extra-vicinity masks.  2^(n(n-1)) spaces."""
    if not 1 <= n <= 5:
        raise SizeLimit(f"enumeration supported for 1..5 points, got {n}")
    points = tuple(str(i + 1) for i in range(n))
    spread = []
    for i in range(n):
        masks = []
        for extra in range(1 << (n - 1)):
            m = 1 << i
            pos = 0
            for j in range(n):
                if j == i:
                    continue
                if extra >> pos & 1:
                    m |= 1 << j
                pos += 1
            masks.append(m)
        spread.append(masks)
    for combo in itertools.product(*spread):
        yield FinitePretop(points, tuple(combo))


def count_hausdorff(n: int) -> int:
    return sum(1 for sp in enumerate_pretops(n) if is_hausdorff(sp).ok)


# -- finite topologies --------------------------------------------------------------


@dataclass(frozen=True)
class FiniteTopology:
    """Open-set family on a finite point tuple, as masks."""

    points: tuple[str, ...]
    opens: frozenset = field(default_factory=frozenset)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def validate(self) -> "FiniteTopology":
        if 0 not in self.opens or self.full not in self.opens:
            raise InvalidTopology("missing empty set or whole set")
        for u in self.opens:
            for v in self.opens:
                if u | v not in self.opens or u & v not in self.opens:
                    raise InvalidTopology("family not closed under union/intersection")
        return self

    def min_open(self, i: int) -> int:
        m = self.full
        for u in self.opens:
            if u >> i & 1:
                m &= u
        return m

    def closure(self, a: int) -> int:
        out = 0
        for i in range(self.n):
            if self.min_open(i) & a:
                out |= 1 << i
        return out

    def to_pretop(self) -> FinitePretop:
        """The open-neighborhood pretopology: least vicinity = least open."""
        return FinitePretop(self.points, tuple(self.min_open(i) for i in range(self.n)))

    def atoms(self):
        """Minimal nonempty opens; they generate the maximal open filters."""
        out = []
        for u in sorted(self.opens):
            if u and not any(v and v != u and v & ~u == 0 for v in self.opens):
                out.append(u)
        return out


def topology_from_pretop(space: FinitePretop) -> FiniteTopology:
    """Opens of a topological pretopology (sets equal to their inherence)."""
    if not is_topological(space).ok:
        raise InvalidTopology("pretopology has a non-idempotent adherence")
    opens = frozenset(a for a in space.subsets() if space.inh(a) == a)
    return FiniteTopology(space.points, opens).validate()


def enumerate_topologies(n: int):
    for sp in enumerate_pretops(n):
        if is_topological(sp).ok:
            yield topology_from_pretop(sp)
