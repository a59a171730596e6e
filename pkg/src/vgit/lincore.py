"""Linearizations on the cross-section and the weight functions phi and sigma.

A linearization is a rational point ``(gamma, c_1, ..., c_n)`` with
``(d - 1) * gamma + sum(c_i) = d + 1``.  Marks are numbered ``1..n`` and
subsets of marks are plain iterables of those integers (usually frozensets).

Everything is exact: rationals are :class:`fractions.Fraction` and ceilings
are taken on reduced fractions.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from math import lcm, prod
from typing import Iterable, Iterator, Sequence

DEFAULT_ENUM_CAP = 1 << 20
CAP_ENV_VAR = "VGIT_ENUM_CAP"


class CapExceeded(RuntimeError):
    """An exhaustive enumeration would exceed the configured cap."""


class OnWallError(ValueError):
    """A generic linearization was required but the point lies on walls.

    ``hyperplanes`` lists ``(subset, k, count)`` triples: a representative
    subset, the integer level of phi, and how many subsets share that
    representative's weight profile.
    """

    def __init__(self, message: str, hyperplanes=()):
        super().__init__(message)
        self.hyperplanes = list(hyperplanes)


class GammaOneError(ZeroDivisionError):
    """phi is undefined on the exterior wall gamma = 1."""


def enum_cap(cap: int | None = None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get(CAP_ENV_VAR)
    return int(env) if env else DEFAULT_ENUM_CAP


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are rejected."""
    if isinstance(value, float):
        raise TypeError(f"floating point value {value!r} is not allowed; use 'p/q'")
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch in text for ch in ".eE"):
            raise ValueError(f"expected a rational 'p/q', got {value!r}")
        return Fraction(text)
    return Fraction(value)


def ceil_fraction(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def floor_fraction(q: Fraction) -> int:
    return q.numerator // q.denominator


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Linearization:
    d: int
    n: int
    gamma: Fraction
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be positive, got {self.d}")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        object.__setattr__(self, "gamma", as_fraction(self.gamma))
        object.__setattr__(self, "weights", tuple(as_fraction(c) for c in self.weights))
        if len(self.weights) != self.n:
            raise ValueError(f"expected {self.n} weights, got {len(self.weights)}")
        residual = (self.d - 1) * self.gamma + sum(self.weights) - (self.d + 1)
        if residual != 0:
            raise ValueError(
                f"cross-section identity (d-1)*gamma + sum(c) = d+1 violated; "
                f"residual {format_fraction(residual)}"
            )
        if self.gamma < 0 or any(c < 0 for c in self.weights):
            raise ValueError("linearization coordinates must be nonnegative")

    @classmethod
    def symmetric(cls, d: int, n: int, gamma) -> "Linearization":
        gamma = as_fraction(gamma)
        c = (d + 1 - (d - 1) * gamma) / n
        return cls(d, n, gamma, (c,) * n)

    @classmethod
    def from_gamma_and_weights(cls, d: int, gamma, weights: Sequence) -> "Linearization":
        return cls(d, len(weights), as_fraction(gamma), tuple(weights))

    @property
    def total(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    @property
    def is_interior(self) -> bool:
        return 0 < self.gamma < 1 and all(0 < c < 1 for c in self.weights)

    @property
    def is_symmetric(self) -> bool:
        return len(set(self.weights)) <= 1

    def weight(self, subset: Iterable[int]) -> Fraction:
        return sum((self.weights[i - 1] for i in subset), Fraction(0))

    def interpolate(self, other: "Linearization", t) -> "Linearization":
        """The point ``(1 - t) * self + t * other``; stays on the cross-section."""
        if (self.d, self.n) != (other.d, other.n):
            raise ValueError("linearizations live on different cross-sections")
        t = as_fraction(t)
        gamma = (1 - t) * self.gamma + t * other.gamma
        weights = tuple((1 - t) * a + t * b for a, b in zip(self.weights, other.weights))
        return Linearization(self.d, self.n, gamma, weights)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "gamma": format_fraction(self.gamma),
            "weights": [format_fraction(c) for c in self.weights],
        }

    @classmethod
    def from_dict(cls, record: dict) -> "Linearization":
        missing = {"d", "n", "gamma", "weights"} - set(record)
        if missing:
            raise ValueError(f"linearization record missing fields: {sorted(missing)}")
        if not isinstance(record["gamma"], str) or not all(
            isinstance(w, str) for w in record["weights"]
        ):
            raise ValueError("gamma and weights must be given as 'p/q' strings")
        return cls(int(record["d"]), int(record["n"]), record["gamma"], tuple(record["weights"]))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def loads(cls, text: str) -> "Linearization":
        return cls.from_dict(json.loads(text))


def complement(subset: Iterable[int], n: int) -> frozenset[int]:
    return frozenset(range(1, n + 1)) - frozenset(subset)


def phi_of_weight(c_I: Fraction, L: Linearization) -> Fraction:
    if L.gamma == 1:
        raise GammaOneError("phi is undefined at gamma = 1 (exterior wall)")
    return (c_I - 1) / (1 - L.gamma)


def phi(subset: Iterable[int], L: Linearization) -> Fraction:
    return phi_of_weight(L.weight(subset), L)


def sigma_of_weight(c_I: Fraction, L: Linearization) -> int:
    if c_I < 1:
        return 0
    if c_I > L.total - 1:
        return L.d
    return ceil_fraction(phi_of_weight(c_I, L))


def sigma(subset: Iterable[int], L: Linearization) -> int:
    """Degree of a tail marked by ``subset`` in any stable curve at ``L``."""
    return sigma_of_weight(L.weight(subset), L)


def wall_level(c_I: Fraction, L: Linearization) -> int | None:
    """The k with phi = k in [0, d-1], or None if phi is off every wall level."""
    value = phi_of_weight(c_I, L)
    if value.denominator != 1:
        return None
    k = value.numerator
    return k if 0 <= k <= L.d - 1 else None


# -- weight classes ---------------------------------------------------------
#
# phi and sigma only see the multiset of weights in a subset, so marks with
# equal weight are interchangeable.  Enumerating multiplicity vectors over
# weight classes replaces the 2^n subset scan; for symmetric weights it is
# just a scan over cardinalities.


def mark_classes(keys: Sequence) -> list[tuple[int, ...]]:
    """Group marks 1..n by equal key, ordered by smallest mark."""
    groups: dict = {}
    for i, key in enumerate(keys, start=1):
        groups.setdefault(key, []).append(i)
    return sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])


def class_vector_count(classes: Sequence[Sequence[int]]) -> int:
    return prod(len(c) + 1 for c in classes)


def iter_class_vectors(
    classes: Sequence[Sequence[int]], cap: int | None = None
) -> Iterator[tuple[int, ...]]:
    total = class_vector_count(classes)
    limit = enum_cap(cap)
    if total > limit:
        raise CapExceeded(
            f"{total} weight-class subsets exceed the enumeration cap {limit} "
            f"(set {CAP_ENV_VAR} or pass cap= to override)"
        )
    return itertools.product(*(range(len(c) + 1) for c in classes))


def representative(classes: Sequence[Sequence[int]], vector: Sequence[int]) -> frozenset[int]:
    """The subset taking the first ``m_j`` marks of each class."""
    return frozenset(i for cls, m in zip(classes, vector) for i in cls[:m])


def orbit_size(classes: Sequence[Sequence[int]], vector: Sequence[int]) -> int:
    from math import comb

    return prod(comb(len(cls), m) for cls, m in zip(classes, vector))


def hyperplanes_through(L: Linearization, cap: int | None = None) -> list[tuple[frozenset[int], int, int]]:
    """All wall hyperplanes containing ``L``, up to complement, as (subset, k, count).

    Each entry stands for ``count`` subsets with the same weight profile as
    ``subset``.  Only one of a complementary pair of profiles is listed.
    """
    classes = mark_classes(L.weights)
    weights = [L.weights[cls[0] - 1] for cls in classes]
    sizes = [len(cls) for cls in classes]
    found = []
    seen = set()
    for vector in iter_class_vectors(classes, cap):
        if not any(vector) or list(vector) == sizes:
            continue
        c_I = sum((m * w for m, w in zip(vector, weights)), Fraction(0))
        k = wall_level(c_I, L)
        if k is None:
            continue
        comp = tuple(s - m for s, m in zip(sizes, vector))
        key = min(tuple(vector), comp)
        if key in seen:
            continue
        seen.add(key)
        found.append((representative(classes, vector), k, orbit_size(classes, vector)))
    return found


def is_generic(L: Linearization, cap: int | None = None) -> bool:
    """True iff no nonempty proper subset has phi an integer in [0, d-1]."""
    if not L.is_interior:
        raise ValueError("genericity is only defined for interior linearizations")
    classes = mark_classes(L.weights)
    iter_class_vectors(classes, cap)  # enforces the cap
    # Over a common denominator D the wall condition c_I - 1 = k (1 - gamma)
    # reads C_I = D + k (D - G).  The empty and the full subset never meet
    # such a level, so plain subset sums suffice.
    D = lcm(L.gamma.denominator, *(c.denominator for c in L.weights))
    G = L.gamma.numerator * (D // L.gamma.denominator)
    targets = [D + k * (D - G) for k in range(L.d)]
    top = max(targets)  # weights are positive, so larger partial sums never come back down

    def subset_sums(part):
        sums = {0}
        for cls in part:
            c = L.weights[cls[0] - 1]
            C = c.numerator * (D // c.denominator)
            sums = {y for x in sums for j in range(len(cls) + 1) if (y := x + j * C) <= top}
        return sums

    # meet in the middle: split the marks in two halves and match sums across them
    half, count = [], 0
    for index, cls in enumerate(classes):
        if 2 * count >= L.n:
            break
        count += len(cls)
        half.append(index)
    left = subset_sums([classes[i] for i in half])
    right = subset_sums(classes[len(half):])
    return not any(t - x in right for t in targets for x in left)


def require_generic(L: Linearization, cap: int | None = None) -> None:
    if not L.is_interior:
        raise ValueError("linearization is not in the open region (0 < gamma, c_i < 1)")
    if is_generic(L, cap):
        return
    planes = hyperplanes_through(L, cap)
    shown = ", ".join(f"({sorted(s)}, {k})" for s, k, _ in planes[:5])
    raise OnWallError(f"linearization lies on {len(planes)} wall famil(ies): {shown}", planes)


def check_subsets_off_walls(subsets: Iterable[Iterable[int]], L: Linearization) -> None:
    """Raise OnWallError if any of the given subsets has phi on a wall level."""
    bad = []
    for s in subsets:
        s = frozenset(s)
        k = wall_level(L.weight(s), L)
        if k is not None:
            bad.append((s, k, 1))
    if bad:
        shown = ", ".join(f"({sorted(s)}, {k})" for s, k, _ in bad[:5])
        raise OnWallError(f"phi is integral on relevant subsets: {shown}", bad)
