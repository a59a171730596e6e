"""Wall crossings: divisorial contractions, flips, regular maps, projections, gluing, exterior walls.

Orientation: for a wall (I, k) the "plus" chamber has phi(I) > k and the
"minus" chamber phi(I) < k.  The forward map goes from plus to minus.  A
"regular" label here means the map contracts no curves; whether it is then
an honest morphism would need normality of the quotients, which is not
known.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import prod
from typing import Iterable

from .lincore import (
    CapExceeded,
    Linearization,
    OnWallError,
    complement,
    enum_cap,
    mark_classes,
    require_generic,
    sigma,
    sigma_of_weight,
)
from .walls import Wall, lies_only_on


class CrossingLabel(enum.Enum):
    DIVISORIAL_FORWARD = "DivisorialForward"
    DIVISORIAL_BACKWARD = "DivisorialBackward"
    FLIP = "Flip"
    REGULAR_FORWARD = "RegularForward"
    REGULAR_BACKWARD = "RegularBackward"
    BIJECTIVE_BOTH_WAYS = "BijectiveBothWays"


# -- partitions ----------------------------------------------------------------------


def find_partition(
    marks: Iterable[int],
    L: Linearization,
    target: int,
    min_blocks: int = 3,
    cap: int | None = None,
) -> list[frozenset[int]] | None:
    """A partition of ``marks`` into >= min_blocks blocks with sigma-sum ``target``.

    Blocks only matter through their weight profile, so the search runs over
    multiplicity vectors of the weight classes instead of set partitions.
    Returns the blocks of one such partition, or None.
    """
    marks = sorted(marks)
    positions = mark_classes([L.weights[i - 1] for i in marks])
    classes = [tuple(marks[p - 1] for p in cls) for cls in positions]
    weights = [L.weights[cls[0] - 1] for cls in classes]
    sizes = tuple(len(cls) for cls in classes)
    work = prod((s + 1) * (s + 2) // 2 for s in sizes)
    limit = enum_cap(cap)
    if work > limit:
        raise CapExceeded(f"partition search needs about {work} steps, over the cap {limit}")
    if len(marks) < min_blocks or target < 0:
        return None

    @lru_cache(maxsize=None)
    def reachable(rest: tuple[int, ...]) -> dict:
        """(sigma-sum, min(blocks, min_blocks)) -> (first block vector, remaining key)."""
        if not any(rest):
            return {(0, 0): None}
        lead = next(j for j, r in enumerate(rest) if r)
        out = {}
        for block in _sub_vectors(rest, lead):
            c_block = sum((m * w for m, w in zip(block, weights)), Fraction(0))
            s_block = sigma_of_weight(c_block, L)
            if s_block > target:
                continue
            remaining = tuple(r - b for r, b in zip(rest, block))
            for (s, nb) in reachable(remaining):
                key = (s + s_block, min(nb + 1, min_blocks))
                if key[0] <= target and key not in out:
                    out[key] = (block, (s, nb))
        return out

    goal = (target, min_blocks)
    if goal not in reachable(sizes):
        return None
    blocks = []
    used = [0] * len(classes)
    rest, key = sizes, goal
    while any(rest):
        block, key = reachable(rest)[key]
        chosen = []
        for j, m in enumerate(block):
            chosen += classes[j][used[j] : used[j] + m]
            used[j] += m
        blocks.append(frozenset(chosen))
        rest = tuple(r - b for r, b in zip(rest, block))
    return blocks


def _sub_vectors(rest: tuple[int, ...], lead: int):
    ranges = [range(1, r + 1) if j == lead else range(0, r + 1) for j, r in enumerate(rest)]

    def rec(j, acc):
        if j == len(ranges):
            yield tuple(acc)
            return
        for m in ranges[j]:
            acc.append(m)
            yield from rec(j + 1, acc)
            acc.pop()

    yield from rec(0, [])


# -- interior walls --------------------------------------------------------------------


@dataclass(frozen=True)
class CrossingReport:
    wall: Wall
    subset: frozenset[int]
    k: int
    forward_contracts_curve: bool
    backward_contracts_curve: bool
    forward_divisorial: bool
    backward_divisorial: bool
    label: CrossingLabel
    forward_witness: tuple[frozenset[int], ...] | None = None
    backward_witness: tuple[frozenset[int], ...] | None = None

    def mirrored(self) -> "CrossingReport":
        """The same crossing read with I^c presented and the direction reversed."""
        return classify_from_flags(
            self.wall,
            self.wall.n,
            complement(self.subset, self.wall.n),
            self.wall.d - 1 - self.k,
            self.backward_witness,
            self.forward_witness,
        )

    def to_dict(self) -> dict:
        def blocks(w):
            return None if w is None else [sorted(b) for b in w]

        return {
            "wall": self.wall.to_dict(),
            "subset": sorted(self.subset),
            "k": self.k,
            "forward_contracts_curve": self.forward_contracts_curve,
            "backward_contracts_curve": self.backward_contracts_curve,
            "forward_divisorial": self.forward_divisorial,
            "backward_divisorial": self.backward_divisorial,
            "label": self.label.value,
            "forward_witness": blocks(self.forward_witness),
            "backward_witness": blocks(self.backward_witness),
        }


def classify_from_flags(wall, n, subset, k, forward_witness, backward_witness) -> CrossingReport:
    d = wall.d
    size = len(subset)
    fwd_div = k == 0 and 3 <= size <= n - 2
    bwd_div = k == d - 1 and 2 <= size <= n - 3
    fwd = forward_witness is not None
    bwd = backward_witness is not None
    if fwd_div:
        label = CrossingLabel.DIVISORIAL_FORWARD
    elif bwd_div:
        label = CrossingLabel.DIVISORIAL_BACKWARD
    elif fwd and bwd:
        if k in (0, d - 1):
            raise AssertionError(f"both directions contract curves at boundary level k={k}")
        label = CrossingLabel.FLIP
    elif fwd:
        label = CrossingLabel.REGULAR_BACKWARD
    elif bwd:
        label = CrossingLabel.REGULAR_FORWARD
    else:
        label = CrossingLabel.BIJECTIVE_BOTH_WAYS
    return CrossingReport(
        wall,
        frozenset(subset),
        k,
        fwd,
        bwd,
        fwd_div,
        bwd_div,
        label,
        None if forward_witness is None else tuple(forward_witness),
        None if backward_witness is None else tuple(backward_witness),
    )


def classify_crossing(
    wall: Wall,
    L_wall: Linearization,
    presented: Iterable[int] | None = None,
    cap: int | None = None,
) -> CrossingReport:
    """Classify the map from the phi(I) > k chamber to the phi(I) < k chamber.

    The forward map contracts a curve iff some partition of I into at least
    three blocks has sigma-sum k; the backward map likewise with I^c and
    d - 1 - k.  Blocks are never I or I^c, so their sigma is the same on
    both sides of the wall and can be read at ``L_wall``.
    """
    if not lies_only_on(L_wall, wall, cap):
        raise OnWallError(f"linearization must lie on wall {wall} and on no other wall")
    subset = frozenset(presented) if presented is not None else wall.subset
    k = wall.level_of(subset)
    rest = complement(subset, wall.n)
    forward = find_partition(subset, L_wall, k, cap=cap)
    backward = find_partition(rest, L_wall, wall.d - 1 - k, cap=cap)
    return classify_from_flags(wall, wall.n, subset, k, forward, backward)


# -- projections -------------------------------------------------------------------------


@dataclass(frozen=True)
class ProjectionReport:
    mark: int
    bijective: bool
    target: Linearization
    witness: tuple[frozenset[int], ...] | None = None


class ProjectionUndefined(ValueError):
    """Projection from a mark needs d >= 2 and c_i > 1 - gamma."""


def projection_target(L: Linearization, i: int) -> Linearization:
    """The linearization (d - 1, gamma, ..., c_i - (1 - gamma), ...) reached by projecting from p_i."""
    if L.d < 2:
        raise ProjectionUndefined("projection undefined: needs d >= 2")
    weights = list(L.weights)
    weights[i - 1] -= 1 - L.gamma
    if weights[i - 1] < 0:
        raise ProjectionUndefined(f"projection undefined: c_{i} < 1 - gamma")
    return Linearization(L.d - 1, L.n, L.gamma, tuple(weights))


def projection_bijective(L: Linearization, i: int, cap: int | None = None) -> ProjectionReport:
    """Projection from p_i is bijective iff no partition of the other marks
    into at least three blocks has sigma-sum d - 1."""
    if not 1 <= i <= L.n:
        raise ValueError(f"mark {i} out of range 1..{L.n}")
    if L.d < 2 or not L.weights[i - 1] > 1 - L.gamma:
        raise ProjectionUndefined(
            f"projection undefined: needs d >= 2 and c_{i} > 1 - gamma (d={L.d}, "
            f"c_{i}={L.weights[i - 1]}, gamma={L.gamma})"
        )
    require_generic(L, cap)
    others = [j for j in range(1, L.n + 1) if j != i]
    witness = find_partition(others, L, L.d - 1, cap=cap)
    return ProjectionReport(i, witness is None, projection_target(L, i), None if witness is None else tuple(witness))


# -- gluing ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class GluingData:
    subset: frozenset[int]
    degree: int
    b: Fraction
    tail: Linearization
    one_factor: bool

    @property
    def cross_section_residual(self) -> Fraction:
        c_I = sum(self.tail.weights[:-1], Fraction(0))
        return (self.degree - 1) * self.tail.gamma + c_I + self.b - (self.degree + 1)


class NoTailFactor(ValueError):
    """sigma(I) = 0: the I points collide and there is no tail factor."""


def gluing_data(subset: Iterable[int], L: Linearization) -> GluingData:
    """Attaching weight b_I and the tail linearization (gamma, c_I, b_I) of degree sigma(I).

    When sigma(I) = d the gluing has a single factor.
    """
    subset = frozenset(subset)
    require_generic(L)
    s = sigma(subset, L)
    if s == 0:
        raise NoTailFactor(f"sigma({sorted(subset)}) = 0: those points collide, no tail factor")
    c_I = L.weight(subset)
    b = (1 - L.gamma) * s - (c_I - 1) + L.gamma
    tail = Linearization(s, len(subset) + 1, L.gamma, tuple(L.weights[i - 1] for i in sorted(subset)) + (b,))
    return GluingData(subset, s, b, tail, s == L.d)


# -- exterior walls ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ExteriorCase:
    tag: str
    mark: int | None = None
    params: dict = field(default_factory=dict, compare=False)

    def __str__(self) -> str:
        return f"{self.tag}({self.mark})" if self.mark is not None else self.tag


def classify_exterior(L: Linearization) -> list[ExteriorCase]:
    """Every boundary case a boundary point of the open region falls under."""
    coords = (L.gamma, *L.weights)
    if any(x < 0 or x > 1 for x in coords):
        raise ValueError("point is outside the closed region 0 <= gamma, c_i <= 1")
    if L.is_interior:
        raise ValueError("point is interior; classify interior walls with classify_crossing")
    cases = []
    if L.gamma == 1:
        cases.append(ExteriorCase("SLtwoQuotient", None, {"weights": L.weights}))
    if L.gamma == 0:
        cases.append(ExteriorCase("PointConfigQuotient", None, {"d": L.d, "weights": L.weights}))
    for i, c in enumerate(L.weights, start=1):
        if c == 1:
            params = {"target": projection_target(L, i) if L.d >= 2 else None}
            cases.append(ExteriorCase("ProjectionWall", i, params))
        if c == 0:
            rest = L.weights[: i - 1] + L.weights[i:]
            target = Linearization(L.d, L.n - 1, L.gamma, rest) if rest else None
            cases.append(ExteriorCase("ForgetfulWall", i, {"target": target}))
    return cases
