"""Walls of the open region, chamber signatures and segment scans."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .lincore import (
    CapExceeded,
    Linearization,
    OnWallError,
    as_fraction,
    complement,
    enum_cap,
    iter_class_vectors,
    mark_classes,
    orbit_size,
    phi_of_weight,
    representative,
    require_generic,
    sigma_of_weight,
    wall_level,
)

FULL_ENUMERATION_LIMIT = 20


@dataclass(frozen=True, order=True)
class Wall:
    """The hyperplane phi(I, .) = k, stored with the subset containing mark 1."""

    subset: frozenset[int]
    k: int
    d: int
    n: int

    def __post_init__(self):
        subset = frozenset(self.subset)
        object.__setattr__(self, "subset", subset)
        if not subset or len(subset) >= self.n or not subset <= set(range(1, self.n + 1)):
            raise ValueError(f"wall subset must be nonempty and proper in [1..{self.n}]")
        if not 0 <= self.k <= self.d - 1:
            raise ValueError(f"wall level k={self.k} outside [0, {self.d - 1}]")
        if 1 not in subset:
            raise ValueError("use Wall.make to canonicalize a wall")

    @classmethod
    def make(cls, subset: Iterable[int], k: int, d: int, n: int) -> "Wall":
        subset = frozenset(subset)
        if 1 not in subset:
            subset, k = complement(subset, n), d - 1 - k
        return cls(subset, k, d, n)

    @property
    def complement(self) -> frozenset[int]:
        return complement(self.subset, self.n)

    def level_of(self, subset: Iterable[int]) -> int:
        """The level k of this wall as presented by ``subset`` (I or its complement)."""
        subset = frozenset(subset)
        if subset == self.subset:
            return self.k
        if subset == self.complement:
            return self.d - 1 - self.k
        raise ValueError("subset does not present this wall")

    def contains(self, L: Linearization) -> bool:
        return phi_of_weight(L.weight(self.subset), L) == self.k

    def to_dict(self) -> dict:
        return {"subset": sorted(self.subset), "k": self.k, "d": self.d, "n": self.n}

    def __str__(self) -> str:
        return f"({{{','.join(map(str, sorted(self.subset)))}}}, {self.k})"


# -- feasibility in the open region ----------------------------------------


def _solve_strict(constraints: Sequence[tuple[Fraction, Fraction]], lo: Fraction, hi: Fraction):
    """Open interval of x in (lo, hi) with a*x + b > 0 for every (a, b)."""
    for a, b in constraints:
        if a == 0:
            if b <= 0:
                return None
        elif a > 0:
            lo = max(lo, -b / a)
        else:
            hi = min(hi, -b / a)
    return (lo, hi) if lo < hi else None


def wall_gamma_interval(size: int, k: int, d: int, n: int):
    """Open gamma-interval on which the walls (I, k) with |I| = size meet the region.

    On the wall c_I = 1 + k(1 - gamma); the rest of the weight is
    d + 1 - (d - 1)gamma - c_I.  Both must be spreadable over their marks
    with every weight strictly inside (0, 1).
    """
    one = Fraction(1)
    # c_I(g) = (1 + k) - k g ; rest(g) = (d - k) - (d - 1 - k) g
    cI = (Fraction(-k), one + k)
    rest = (Fraction(-(d - 1 - k)), Fraction(d - k))
    constraints = [
        cI,
        (-cI[0], size - cI[1]),
        rest,
        (-rest[0], (n - size) - rest[1]),
    ]
    return _solve_strict(constraints, Fraction(0), Fraction(1))


def wall_witness(wall: Wall) -> Linearization:
    """A rational point of the open region on ``wall`` (weights spread evenly on I and I^c)."""
    size = len(wall.subset)
    interval = wall_gamma_interval(size, wall.k, wall.d, wall.n)
    if interval is None:
        raise ValueError(f"wall {wall} does not meet the open region")
    gamma = (interval[0] + interval[1]) / 2
    return _point_on_wall(wall, gamma)


def _point_on_wall(wall: Wall, gamma: Fraction) -> Linearization:
    d, n = wall.d, wall.n
    c_I = 1 + wall.k * (1 - gamma)
    rest = d + 1 - (d - 1) * gamma - c_I
    inside, outside = c_I / len(wall.subset), rest / (n - len(wall.subset))
    weights = tuple(inside if i in wall.subset else outside for i in range(1, n + 1))
    return Linearization(d, n, gamma, weights)


def enumerate_walls(d: int, n: int, cap: int | None = None) -> list[Wall]:
    """Every canonical wall (I, k) meeting the open region, in sorted order."""
    if d < 1 or n < 4:
        raise ValueError("need d >= 1 and n >= 4")
    count = 0
    feasible = []
    for size in range(1, n):
        for k in range(d):
            if wall_gamma_interval(size, k, d, n) is not None:
                feasible.append((size, k))
    if n > FULL_ENUMERATION_LIMIT and cap is None:
        raise CapExceeded(
            f"full wall enumeration for n={n} > {FULL_ENUMERATION_LIMIT} refused; "
            "use wall_classes() or pass cap="
        )
    limit = enum_cap(cap)
    walls = set()
    others = range(2, n + 1)
    for size, k in feasible:
        # canonical subsets contain mark 1: choose the rest of I, or of I^c
        for rest in itertools.combinations(others, size - 1):
            walls.add(Wall(frozenset((1,) + rest), k, d, n))
            count += 1
            if count > limit:
                raise CapExceeded(f"more than {limit} walls, over the enumeration cap")
        co_size = n - size
        for rest in itertools.combinations(others, co_size - 1):
            walls.add(Wall(frozenset((1,) + rest), d - 1 - k, d, n))
    return sorted(walls, key=lambda w: (len(w.subset), sorted(w.subset), w.k))


def wall_classes(d: int, n: int) -> list[tuple[int, int, tuple[Fraction, Fraction]]]:
    """Cardinality classes (|I|, k, gamma-interval) of walls, without listing subsets."""
    out = []
    for size in range(1, n):
        for k in range(d):
            interval = wall_gamma_interval(size, k, d, n)
            if interval is not None:
                out.append((size, k, interval))
    return out


def symmetric_slice_walls(d: int, n: int) -> list[tuple[Fraction, list[tuple[int, int]]]]:
    """Gamma values where walls cut the symmetric line c_i = (d+1-(d-1)gamma)/n.

    Returns (gamma, [(|I|, k), ...]) sorted by gamma, each pair listed with
    |I| <= n - |I| (complements give the same hyperplane).
    """
    if d < 2:
        raise ValueError("the symmetric slice is a single point for d = 1")
    lo = max(Fraction(0), Fraction(d + 1 - n, d - 1))
    hits: dict[Fraction, set] = {}
    for size in range(1, n):
        for k in range(d):
            den = n * k - size * (d - 1)
            num = n * (1 + k) - size * (d + 1)
            if den == 0:
                continue
            gamma = Fraction(num, den)
            if lo < gamma < 1:
                if size <= n - size:
                    hits.setdefault(gamma, set()).add((size, k))
                else:
                    hits.setdefault(gamma, set()).add((n - size, d - 1 - k))
    return [(g, sorted(hits[g])) for g in sorted(hits)]


# -- chamber signatures -----------------------------------------------------


@dataclass(frozen=True)
class ChamberSignature:
    """sigma over canonical subsets (those containing mark 1), or over sizes.

    ``by_size`` is used for symmetric weights, where sigma only depends on |I|.
    """

    d: int
    n: int
    table: tuple = ()
    by_size: tuple = ()

    @property
    def symmetric(self) -> bool:
        return bool(self.by_size)

    def sigma(self, subset: Iterable[int]) -> int:
        subset = frozenset(subset)
        if not subset:
            return 0
        if len(subset) == self.n:
            return self.d
        if self.symmetric:
            return self.by_size[len(subset) - 1]
        if 1 in subset:
            return dict(self.table)[subset]
        return self.d - dict(self.table)[complement(subset, self.n)]

    def expanded(self) -> dict[frozenset[int], int]:
        if not self.symmetric:
            return dict(self.table)
        out = {}
        others = range(2, self.n + 1)
        for size in range(1, self.n):
            for rest in itertools.combinations(others, size - 1):
                out[frozenset((1,) + rest)] = self.by_size[size - 1]
        return out


def signature(L: Linearization, cap: int | None = None) -> ChamberSignature:
    require_generic(L, cap)
    if L.is_symmetric:
        c = L.weights[0]
        return ChamberSignature(L.d, L.n, by_size=tuple(sigma_of_weight(k * c, L) for k in range(1, L.n)))
    if L.n > FULL_ENUMERATION_LIMIT and cap is None:
        raise CapExceeded(f"full signature for n={L.n} refused without cap=")
    if (1 << (L.n - 1)) > enum_cap(cap):
        raise CapExceeded(f"2^{L.n - 1} subsets exceed the enumeration cap")
    table = []
    others = range(2, L.n + 1)
    for size in range(0, L.n - 1):
        for rest in itertools.combinations(others, size):
            s = frozenset((1,) + rest)
            table.append((s, sigma_of_weight(L.weight(s), L)))
    table.sort(key=lambda item: (len(item[0]), sorted(item[0])))
    return ChamberSignature(L.d, L.n, table=tuple(table))


def same_chamber(L1: Linearization, L2: Linearization, cap: int | None = None) -> bool:
    if (L1.d, L1.n) != (L2.d, L2.n):
        raise ValueError("linearizations live on different cross-sections")
    s1, s2 = signature(L1, cap), signature(L2, cap)
    if s1.symmetric and s2.symmetric:
        return s1.by_size == s2.by_size
    return s1.expanded() == s2.expanded()


# -- segment scans ----------------------------------------------------------


@dataclass(frozen=True)
class Crossing:
    """Walls met at parameter t of a segment.

    ``walls`` holds one canonical representative per weight profile and
    ``counts[j]`` the number of walls sharing that profile.
    """

    t: Fraction
    point: Linearization
    walls: tuple[Wall, ...]
    counts: tuple[int, ...] = field(default=())

    @property
    def gamma(self) -> Fraction:
        return self.point.gamma


def segment_scan(L0: Linearization, L1: Linearization, cap: int | None = None) -> list[Crossing]:
    """Ordered wall crossings of the open segment from L0 to L1."""
    if (L0.d, L0.n) != (L1.d, L1.n):
        raise ValueError("linearizations live on different cross-sections")
    require_generic(L0, cap)
    require_generic(L1, cap)
    if L0 == L1:
        return []
    d, n = L0.d, L0.n
    classes = mark_classes(list(zip(L0.weights, L1.weights)))
    w0 = [L0.weights[c[0] - 1] for c in classes]
    w1 = [L1.weights[c[0] - 1] for c in classes]
    sizes = [len(c) for c in classes]
    events: dict[Fraction, dict] = {}
    for vector in iter_class_vectors(classes, cap):
        if not any(vector) or list(vector) == sizes:
            continue
        comp = tuple(s - m for s, m in zip(sizes, vector))
        if comp < tuple(vector):
            continue  # the complementary profile yields the same hyperplanes
        a = sum((m * w for m, w in zip(vector, w0)), Fraction(0))
        b = sum((m * w for m, w in zip(vector, w1)), Fraction(0))
        p0, p1 = phi_of_weight(a, L0), phi_of_weight(b, L1)
        lo, hi = min(p0, p1), max(p0, p1)
        first = max(0, -((-lo.numerator) // lo.denominator))
        last = min(d - 1, hi.numerator // hi.denominator)
        for k in range(first, last + 1):
            if not lo < k < hi:
                continue
            # c_I(t) - 1 - k(1 - gamma(t)) is affine in t
            f0 = a - 1 - k * (1 - L0.gamma)
            f1 = b - 1 - k * (1 - L1.gamma)
            t = f0 / (f0 - f1)
            rep = representative(classes, vector)
            wall = Wall.make(rep, k, d, n)
            events.setdefault(t, {})[wall] = orbit_size(classes, vector)
    out = []
    for t in sorted(events):
        group = events[t]
        walls = tuple(sorted(group, key=lambda w: (len(w.subset), sorted(w.subset), w.k)))
        out.append(Crossing(t, L0.interpolate(L1, t), walls, tuple(group[w] for w in walls)))
    return out


# -- points on a single wall -------------------------------------------------


def _profile_walls(L: Linearization, cap: int | None = None) -> list[tuple[frozenset, int, int]]:
    from .lincore import hyperplanes_through

    return hyperplanes_through(L, cap)


def lies_only_on(L: Linearization, wall: Wall, cap: int | None = None) -> bool:
    """True iff L is interior, on ``wall``, and on no other wall hyperplane."""
    if not L.is_interior or not wall.contains(L):
        return False
    planes = _profile_walls(L, cap)
    if len(planes) != 1:
        return False
    subset, k, count = planes[0]
    return count == 1 and Wall.make(subset, k, L.d, L.n) == wall


def exclusive_witness(
    wall: Wall,
    base: Linearization | None = None,
    seed: int = 0,
    attempts: int = 200,
    cap: int | None = None,
) -> Linearization:
    """A point on ``wall`` and on no other wall.

    Starts from ``base`` (which must lie on the wall; default: the evenly
    spread witness) and moves weight inside I and inside I^c separately, so
    c_I and gamma are unchanged.  Only the first mark of each side moves
    against the rest, which keeps the weight-class count at four.
    """
    if base is None:
        base = wall_witness(wall)
    if not wall.contains(base):
        raise ValueError("base point is not on the wall")
    if lies_only_on(base, wall, cap):
        return base
    rng = random.Random(seed)
    inside = sorted(wall.subset)
    outside = sorted(wall.complement)
    for attempt in range(attempts):
        scale = Fraction(1, 10 ** (3 + attempt // 20))
        a = scale * Fraction(rng.randint(1, 997), 997)
        b = scale * Fraction(rng.randint(1, 991), 991)
        weights = list(base.weights)
        for side, step in ((inside, a), (outside, b)):
            if len(side) == 1:
                continue
            weights[side[0] - 1] += step * (len(side) - 1)
            for i in side[1:]:
                weights[i - 1] -= step
        try:
            L = Linearization(base.d, base.n, base.gamma, tuple(weights))
        except ValueError:
            continue
        if lies_only_on(L, wall, cap):
            return L
    raise ValueError(f"no exclusive witness found for wall {wall}")


def side_points(
    wall: Wall, L_wall: Linearization, presented: Iterable[int] | None = None, cap: int | None = None
) -> tuple[Linearization, Linearization]:
    """Generic points (minus, plus) just off the wall, with phi(I) < k and phi(I) > k.

    ``presented`` picks which of I, I^c plays the role of I (default: the
    canonical subset).  The two points are joined by a segment that crosses
    only this wall.
    """
    subset = frozenset(presented) if presented is not None else wall.subset
    k = wall.level_of(subset)
    rest = complement(subset, wall.n)
    if not lies_only_on(L_wall, wall, cap):
        raise OnWallError(f"point is not on wall {wall} alone", _profile_walls(L_wall, cap))
    step = Fraction(1, 1000)
    for _ in range(60):
        def moved(sign):
            weights = tuple(
                c + sign * step / len(subset) if i in subset else c - sign * step / len(rest)
                for i, c in enumerate(L_wall.weights, start=1)
            )
            return Linearization(L_wall.d, L_wall.n, L_wall.gamma, weights)

        try:
            minus, plus = moved(-1), moved(1)
        except ValueError:
            step /= 10
            continue
        if minus.is_interior and plus.is_interior:
            try:
                crossings = segment_scan(minus, plus, cap)
            except OnWallError:
                crossings = None
            if (
                crossings is not None
                and len(crossings) == 1
                and crossings[0].t == Fraction(1, 2)
                and crossings[0].walls == (wall,)
            ):
                lo = phi_of_weight(minus.weight(subset), minus)
                assert lo < k
                return minus, plus
        step /= 10
    raise ValueError(f"could not separate the sides of wall {wall}")
