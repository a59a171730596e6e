"""Recognize chambers whose quotient is a known compactification."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .lincore import (
    Linearization,
    as_fraction,
    enum_cap,
    CapExceeded,
    is_generic,
    iter_class_vectors,
    mark_classes,
    require_generic,
    sigma_of_weight,
)


@dataclass(frozen=True)
class ModelID:
    tag: str
    weights: tuple[Fraction, ...] | None = None
    summary: str | None = None

    def __str__(self) -> str:
        if self.tag == "Hassett":
            shown = ", ".join(str(w) for w in sorted(set(self.weights)))
            return f"Hassett({shown})"
        if self.tag == "Unidentified":
            return f"Unidentified({self.summary})"
        return self.tag


def in_hassett_regime(L: Linearization) -> bool:
    """gamma > max(1/2, 1 - c_i) for every i."""
    return L.gamma > Fraction(1, 2) and all(L.gamma > 1 - c for c in L.weights)


def is_boggi_chamber(L: Linearization, cap: int | None = None) -> bool:
    """d = n and sigma(I) = |I| whenever 2 <= |I| <= n - 2."""
    if L.d != L.n:
        return False
    classes = mark_classes(L.weights)
    weights = [L.weights[cls[0] - 1] for cls in classes]
    for vector in iter_class_vectors(classes, cap):
        size = sum(vector)
        if 2 <= size <= L.n - 2:
            c_I = sum((m * w for m, w in zip(vector, weights)), Fraction(0))
            if sigma_of_weight(c_I, L) != size:
                return False
    return True


def chamber_point_in_region(L: Linearization, region: str, cap: int | None = None) -> Linearization | None:
    """A point of L's open chamber satisfying the region's strict inequalities, or None.

    ``region`` is "hassett" (gamma > 1/2 and gamma > 1 - c_i) or "projective"
    (gamma > 1 - c_i only).  The chamber is cut out by strict linear
    inequalities in (gamma, c), and it is invariant under permuting marks of
    equal weight, so averaging shows it suffices to search points whose
    weights are constant on L's weight classes.  That is a small exact LP:
    maximize a common slack t and ask whether t > 0.
    """
    if region not in ("hassett", "projective"):
        raise ValueError(f"unknown region {region!r}")
    inside = all(L.gamma > 1 - c for c in L.weights)
    if region == "hassett":
        inside = inside and L.gamma > Fraction(1, 2)
    if inside:
        return L

    from sympy import Matrix
    from sympy.solvers.simplex import linprog

    classes = mark_classes(L.weights)
    sizes = [len(cls) for cls in classes]
    base = [L.weights[cls[0] - 1] for cls in classes]
    m = len(classes)
    # unknowns (gamma, w_1 .. w_m); each strict inequality is (coefficients, constant) > 0
    strict = [((1,) + (0,) * m, 0), ((-1,) + (0,) * m, 1)]
    for j in range(m):
        unit = tuple(1 if i == j else 0 for i in range(m))
        strict.append(((0,) + unit, 0))
        strict.append(((0,) + tuple(-u for u in unit), 1))
        strict.append(((1,) + unit, -1))
    if region == "hassett":
        strict.append(((1,) + (0,) * m, Fraction(-1, 2)))
    for vector in iter_class_vectors(classes, cap):
        rest = tuple(k - v for k, v in zip(sizes, vector))
        if not any(vector) or not any(rest) or rest < vector:
            continue
        s = sigma_of_weight(sum((v * b for v, b in zip(vector, base)), Fraction(0)), L)
        # s (1 - gamma) - (c_I - 1) > 0  and  (c_I - 1) - (s - 1)(1 - gamma) > 0
        if s < L.d:
            strict.append(((-s,) + tuple(-v for v in vector), s + 1))
        if s > 0:
            strict.append(((s - 1,) + tuple(vector), -s))
    # maximize t subject to coefficients . x + constant >= t; every slack is
    # at least -1 at L itself, so u = t + 1 >= 0 keeps all unknowns nonnegative
    A = Matrix([[-a for a in coeffs] + [1] for coeffs, _ in strict] + [[0] * (m + 1) + [1]])
    b = Matrix([const + 1 for _, const in strict] + [2])
    A_eq = Matrix([[L.d - 1] + sizes + [0]])
    b_eq = Matrix([L.d + 1])
    best, solution = linprog(Matrix([0] * (m + 1) + [-1]), A, b, A_eq, b_eq)
    if -best - 1 <= 0:
        return None

    def frac(value):
        return Fraction(int(value.p), int(value.q))

    weights = [Fraction(0)] * L.n
    for cls, x in zip(classes, solution[1 : m + 1]):
        for i in cls:
            weights[i - 1] = frac(x)
    point = Linearization(L.d, L.n, frac(solution[0]), tuple(weights))
    from .walls import same_chamber

    reached = all(point.gamma > 1 - c for c in point.weights)
    if region == "hassett":
        reached = reached and point.gamma > Fraction(1, 2)
    if not (reached and same_chamber(L, point, cap)):
        raise AssertionError(f"LP solution {point} is not in the {region} part of the chamber")
    return point


def identify(L: Linearization, cap: int | None = None, tree_cap: int = 7) -> ModelID:
    """Name the model of the chamber containing L.

    Checked in order: Boggi (for n <= 5 no tree has an unmarked vertex, so
    this chamber is also the MbarN one and is reported as Boggi), Hassett
    (some point of the chamber has gamma above max(1/2, 1 - c_i); refined to
    MbarN when every pair of weights sums past 1), the triple-point style (the chamber reaches gamma > 1 - c_i
    only with gamma <= 1/2), and otherwise a summary of the assignment.
    Every test depends only on the chamber, so the answer does too.  The
    Hassett weights reported are L's own when L satisfies the bound, and
    otherwise those of a chamber point that does.
    """
    require_generic(L, cap)
    if is_boggi_chamber(L, cap):
        return ModelID("Boggi")
    point = chamber_point_in_region(L, "hassett", cap)
    if point is not None:
        if all(a + b > 1 for a, b in itertools.combinations(L.weights, 2)):
            return ModelID("MbarN")
        return ModelID("Hassett", point.weights)
    if chamber_point_in_region(L, "projective", cap) is not None:
        return ModelID("TripleStyle")
    return ModelID("Unidentified", None, assignment_summary(L, tree_cap))


def assignment_summary(L: Linearization, tree_cap: int = 7) -> str:
    from .assignments import git_assignment
    from .trees import all_trees

    if L.n > tree_cap:
        return f"n = {L.n} exceeds the tree cap {tree_cap}"
    Z = git_assignment(L)
    trees = all_trees(L.n)
    hit = [T for T in trees if Z.assigned(T)]
    unmarked = sum(1 for T in trees for v in Z.assigned(T) if not T.legs_at(v))
    total = sum(len(Z.assigned(T)) for T in trees)
    return f"{len(hit)} of {len(trees)} trees contract vertices; {total} assigned, {unmarked} unmarked"


def hassett_chamber(weights: Sequence[Fraction], cap: int | None = None) -> frozenset[frozenset[int]]:
    """Subsets of at least two marks with total weight above 1."""
    n = len(weights)
    if 2**n > enum_cap(cap):
        raise CapExceeded(f"2^{n} subsets exceed the enumeration cap")
    out = set()
    for r in range(2, n + 1):
        for combo in itertools.combinations(range(1, n + 1), r):
            if sum(weights[i - 1] for i in combo) > 1:
                out.add(frozenset(combo))
    return frozenset(out)


def model_key(L: Linearization, cap: int | None = None) -> tuple:
    """A key that changes exactly when the identified model changes."""
    model = identify(L, cap)
    if model.tag == "Hassett":
        return (model.tag, hassett_chamber(model.weights, cap))
    if model.tag == "Unidentified":
        from .walls import signature

        return (model.tag, signature(L, cap))
    return (model.tag,)


# -- embedding degrees ------------------------------------------------------------------


@dataclass(frozen=True)
class HassettEmbedding:
    d: int
    gamma: Fraction
    weights: tuple[Fraction, ...]
    perturbation: Fraction = Fraction(0)

    def linearization(self) -> Linearization:
        return Linearization(self.d, len(self.weights), self.gamma, self.weights)


def hassett_embedding_degree(weights: Sequence, cap: int | None = None) -> HassettEmbedding:
    """The least d putting the Hassett weights c in a generic Hassett chamber.

    gamma = (d + 1 - sum c)/(d - 1) increases with d towards 1, so the scan
    stops at the first d with gamma > max(1/2, 1 - c_i).  If that point lies
    on a wall, the weights are nudged along the cross-section without
    changing which subsets weigh more than 1; the nudge is reported.
    """
    c = tuple(as_fraction(w) for w in weights)
    n = len(c)
    if any(not 0 < w < 1 for w in c):
        raise ValueError("Hassett weights must satisfy 0 < c_i < 1")
    total = sum(c, Fraction(0))
    if total <= 2:
        raise ValueError(f"Hassett weights need sum(c) > 2, got {total}")
    for r in range(2, n + 1):
        for combo in itertools.combinations(c, r):
            if sum(combo) == 1:
                raise ValueError("weights lie on a Hassett wall (some subset weighs exactly 1)")
    bound = max([Fraction(1, 2)] + [1 - w for w in c])
    d = 2
    while True:
        gamma = (d + 1 - total) / (d - 1)
        if gamma > bound:
            break
        d += 1
    L = Linearization(d, n, gamma, c)
    if is_generic(L, cap):
        return HassettEmbedding(d, gamma, c)
    heavy = hassett_chamber(c, cap)
    # Equal weights can keep a whole symmetric line on a wall (n even, d odd:
    # half of the marks always sit at level (d - 1)/2), so the second
    # direction breaks the symmetry with distinct subset sums.
    spread = [Fraction(2**i) - Fraction(2**n - 1, n) for i in range(n)]
    for exponent in range(3, 40):
        for sign in (1, -1):
            delta = sign * Fraction(1, 10**exponent)
            moves = (
                (gamma + delta, tuple(w - delta * (d - 1) / n for w in c)),
                (gamma, tuple(w + delta * r / 2**n for w, r in zip(c, spread))),
            )
            for g, shifted in moves:
                try:
                    M = Linearization(d, n, g, shifted)
                except ValueError:
                    continue
                if (
                    M.is_interior
                    and in_hassett_regime(M)
                    and hassett_chamber(shifted, cap) == heavy
                    and all(sum(x) != 1 for r in range(2, n + 1) for x in itertools.combinations(shifted, r))
                    and is_generic(M, cap)
                ):
                    return HassettEmbedding(d, M.gamma, shifted, delta)
    raise ValueError("could not move the Hassett point off the walls")


def boggi_params(n: int, epsilon=None) -> Linearization:
    """d = n, c_i = 1 - epsilon, gamma = (1 + d epsilon)/(d - 1); default epsilon = 1/(10 n)."""
    if n < 4:
        raise ValueError("need n >= 4")
    eps = as_fraction(epsilon) if epsilon is not None else Fraction(1, 10 * n)
    for _ in range(50):
        L = Linearization.symmetric(n, n, (1 + n * eps) / (n - 1))
        if L.is_interior and is_generic(L) and is_boggi_chamber(L):
            return L
        if epsilon is not None:
            raise ValueError(f"epsilon = {eps} does not give a generic Boggi point")
        eps /= 2
    raise ValueError("no generic Boggi point found")
