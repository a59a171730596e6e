"""Extremal assignments on dual trees: the GIT assignment, axiom checks, realizability.

An assignment picks, for every DM-stable tree, a proper set of vertices to
contract.  Vertices are compared across trees by the partition of the marks
they induce (own legs as singletons plus one block per branch), which is a
complete invariant for trees with labeled legs.
"""

from __future__ import annotations

import itertools
import random
from math import gcd
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .curves import degree_assignment
from .lincore import CapExceeded, Linearization, require_generic
from .trees import DualTree, all_trees, tree_from_splits
from .walls import symmetric_slice_walls

DEFAULT_TREE_CAP = 7

Rule = Callable[[DualTree, int], bool]


def vertex_partition(T: DualTree, v: int) -> frozenset[frozenset[int]]:
    own = [frozenset([i]) for i in T.legs_at(v)]
    return frozenset(own + T.branch_sets(v))


@dataclass
class ExtremalAssignment:
    """A vertex rule plus a memo of its values per tree."""

    name: str
    rule: Rule
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def assigned(self, T: DualTree) -> frozenset[int]:
        cached = self._memo.get(T)
        if cached is None:
            cached = frozenset(v for v in T.vertices if self.rule(T, v))
            self._memo[T] = cached
        return cached

    def assigned_partitions(self, T: DualTree) -> frozenset[frozenset[frozenset[int]]]:
        return frozenset(vertex_partition(T, v) for v in self.assigned(T))

    def table(self, n: int, cap: int = DEFAULT_TREE_CAP) -> dict:
        """Tree key -> assigned vertices (by partition), over all DM trees on n legs."""
        _check_tree_cap(n, cap)
        return {T.key(): self.assigned_partitions(T) for T in all_trees(n)}

    def union(self, other: "ExtremalAssignment") -> "ExtremalAssignment":
        return ExtremalAssignment(
            f"{self.name} + {other.name}", lambda T, v: self.rule(T, v) or other.rule(T, v)
        )


def _check_tree_cap(n: int, cap: int) -> None:
    if n > cap:
        raise CapExceeded(f"exhaustive tree enumeration for n = {n} exceeds the cap n <= {cap}")


# -- named assignments -----------------------------------------------------------


def empty_assignment() -> ExtremalAssignment:
    return ExtremalAssignment("empty", lambda T, v: False)


def unmarked_assignment() -> ExtremalAssignment:
    return ExtremalAssignment("unmarked", lambda T, v: not T.legs_at(v))


def legs_subset_assignment(subset: Iterable[int]) -> ExtremalAssignment:
    """Assign v iff v lies on a tail all of whose marks are in ``subset``."""
    allowed = frozenset(subset)

    def rule(T: DualTree, v: int) -> bool:
        # the smallest tails containing v are cut off by the edges at v
        everything = frozenset(range(1, T.n + 1))
        return any(everything - branch <= allowed for branch in T.branch_sets(v))

    return ExtremalAssignment(f"legs-subset-of {_fmt(allowed)}", rule)


def tails_within(I: Iterable[int], J: Iterable[int]) -> ExtremalAssignment:
    """Tails marked entirely by I or entirely by J are assigned."""
    Z = legs_subset_assignment(I).union(legs_subset_assignment(J))
    Z.name = f"tails-within {_fmt(I)} {_fmt(J)}"
    return Z


def explicit_assignment(pairs: Iterable[tuple[frozenset, frozenset]]) -> ExtremalAssignment:
    """Listed (tree splits, vertex partition) pairs are assigned; nothing else is."""
    chosen = {(frozenset(s), frozenset(p)) for s, p in pairs}
    return ExtremalAssignment(
        "explicit", lambda T, v: (T.key(), vertex_partition(T, v)) in chosen
    )


def git_assignment(L: Linearization) -> ExtremalAssignment:
    """Assign the vertices that Z-contraction at L collapses (degree 0)."""
    require_generic(L)
    degrees: dict[DualTree, dict[int, int]] = {}

    def rule(T: DualTree, v: int) -> bool:
        if T not in degrees:
            degrees[T] = degree_assignment(T, L)
        return degrees[T][v] == 0

    return ExtremalAssignment(f"git {L.to_dict()}", rule)


def _fmt(subset: Iterable[int]) -> str:
    return ",".join(map(str, sorted(subset)))


# -- rule files ------------------------------------------------------------------


def _parse_set(text: str) -> frozenset[int]:
    return frozenset(int(x) for x in text.split(",") if x)


def parse_assignment(text: str) -> ExtremalAssignment:
    """Parse a rule file; the assignment is the union of its rules.

    Lines: ``unmarked``, ``empty``, ``legs-subset-of 1,2``,
    ``tails-within 1,2 3,4`` and ``assign SPLITS :: PARTITION`` where
    SPLITS is ``;``-separated edge sides and PARTITION the vertex's
    ``|``-separated mark blocks.
    """
    from .trees import TreeFormatError

    rules: list[ExtremalAssignment] = []
    explicit: list[tuple[frozenset, frozenset]] = []
    n_seen = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts == ["unmarked"]:
                rules.append(unmarked_assignment())
            elif parts == ["empty"]:
                rules.append(empty_assignment())
            elif parts[0] == "legs-subset-of" and len(parts) == 2:
                rules.append(legs_subset_assignment(_parse_set(parts[1])))
            elif parts[0] == "tails-within" and len(parts) == 3:
                rules.append(tails_within(_parse_set(parts[1]), _parse_set(parts[2])))
            elif parts[0] == "assign" and "::" in line:
                splits_text, part_text = line[len("assign"):].split("::", 1)
                blocks = frozenset(_parse_set(b.strip()) for b in part_text.split("|"))
                everything = frozenset().union(*blocks)
                n_seen = max(n_seen, len(everything))
                sides = [_parse_set(s.strip()) for s in splits_text.split(";") if s.strip()]
                T = tree_from_splits(len(everything), sides)
                explicit.append((T.key(), blocks))
            else:
                raise TreeFormatError(f"unrecognized rule {raw!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, TreeFormatError):
                raise
            raise TreeFormatError(f"{exc} in {raw!r}", lineno) from None
    if explicit:
        rules.append(explicit_assignment(explicit))
    if not rules:
        raise TreeFormatError("assignment file has no rules")
    Z = rules[0]
    for other in rules[1:]:
        Z = Z.union(other)
    return Z


# -- axioms ----------------------------------------------------------------------


@dataclass(frozen=True)
class ExtremalReport:
    ok: bool
    trees_checked: int
    counterexample: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_extremal(Z: ExtremalAssignment, n: int, cap: int = DEFAULT_TREE_CAP) -> ExtremalReport:
    """Check properness and both directions of specialization closure on all trees."""
    from .trees import specializations

    _check_tree_cap(n, cap)
    trees = all_trees(n)
    for T in trees:
        here = Z.assigned(T)
        if len(here) == T.num_vertices:
            return ExtremalReport(False, len(trees), f"every vertex assigned on tree {_splits(T)}")
        for S, corr in specializations(T):
            there = Z.assigned(S)
            for v, images in corr.items():
                all_images = all(w in there for w in images)
                if v in here and not all_images:
                    return ExtremalReport(
                        False,
                        len(trees),
                        f"vertex {_part(T, v)} of {_splits(T)} is assigned but its image "
                        f"in {_splits(S)} is not entirely assigned",
                    )
                if v not in here and all_images:
                    return ExtremalReport(
                        False,
                        len(trees),
                        f"vertex {_part(T, v)} of {_splits(T)} is not assigned but every image "
                        f"in {_splits(S)} is",
                    )
    return ExtremalReport(True, len(trees))


def _splits(T: DualTree) -> str:
    return "[" + "; ".join(_fmt(s) for s in sorted(T.key(), key=sorted)) + "]"


def _part(T: DualTree, v: int) -> str:
    return "|".join(_fmt(b) for b in sorted(vertex_partition(T, v), key=sorted))


# -- realizability -----------------------------------------------------------------


@dataclass(frozen=True)
class RealizabilityResult:
    witness: Linearization | None
    chambers_checked: int
    samples: int
    certificate: str | None = None
    saturated: bool = False


def pair_tail_certificate(Z: ExtremalAssignment, n: int) -> str | None:
    """A d-independent obstruction read off from two-point tails.

    At a generic L the vertex of a tail carrying only marks a, b is assigned
    iff c_a + c_b < 1.  If two such pairs P, Q are assigned then
    min(P) + min(Q) < 1, so some pair across P and Q must be assigned too.
    """
    if n < 5:
        return None
    assigned_pairs = set()
    for a, b in itertools.combinations(range(1, n + 1), 2):
        T = tree_from_splits(n, [frozenset((a, b))])
        tail = T.legs[a - 1]
        if tail in Z.assigned(T):
            assigned_pairs.add(frozenset((a, b)))
    for P, Q in itertools.combinations(sorted(assigned_pairs, key=sorted), 2):
        cross = {frozenset((x, y)) for x in P for y in Q if x != y}
        if not cross & assigned_pairs:
            p, q = sorted(P), sorted(Q)
            return (
                f"tails {{{p[0]},{p[1]}}} and {{{q[0]},{q[1]}}} are assigned, so "
                f"c_{p[0]} + c_{p[1]} < 1 and c_{q[0]} + c_{q[1]} < 1; then the two lighter "
                f"marks, one from each pair, weigh less than 1 together and their two-point "
                f"tail would be assigned, but no pair across "
                f"{{{p[0]},{p[1]}}} x {{{q[0]},{q[1]}}} is assigned"
            )
    return None


def random_interior_point(d: int, n: int, rng: random.Random, denominator: int = 10**6) -> Linearization | None:
    """A random rational point of the open region, or None if the draw misses."""
    point = _random_integer_point(d, n, rng, denominator)
    if point is None:
        return None
    G, weights, D = point
    return Linearization(d, n, Fraction(G, D), tuple(Fraction(C, D) for C in weights))


def _random_integer_point(d: int, n: int, rng: random.Random, D: int):
    """(G, [C_i], D) with (d-1) G + sum C = (d+1) D and 0 < G, C_i < D."""
    lo = max(0, (d + 1 - n) * D // (d - 1) + 1) if d > 1 else 1
    G = rng.randint(lo, D - 1)
    total = (d + 1) * D - (d - 1) * G
    if not 0 < total < n * D:
        return None
    raw = [rng.randint(1, D) for _ in range(n)]
    scale = sum(raw)
    weights = [r * total // scale for r in raw]
    for j in rng.sample(range(n), total - sum(weights)):
        weights[j] += 1
    if any(not 0 < C < D for C in weights):
        return None
    return G, weights, D


def _integer_form(L: Linearization):
    D = 1
    for q in (L.gamma, *L.weights):
        D = D * q.denominator // gcd(D, q.denominator)
    return int(L.gamma * D), [int(c * D) for c in L.weights], D


def _sigma_by_mask(d: int, n: int, G: int, weights: list[int], D: int) -> tuple[int, ...] | None:
    """sigma of every subset (bit i-1 for mark i), or None if the point is on a wall."""
    full = (1 << n) - 1
    sums = [0] * (full + 1)
    for mask in range(1, full + 1):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + weights[low.bit_length() - 1]
    total = sums[full]
    den = D - G
    out = []
    for mask, c in enumerate(sums):
        if c < D:
            out.append(0)
        elif c > total - D:
            out.append(d)
        else:
            q, r = divmod(c - D, den)
            if r == 0 and mask not in (0, full):
                return None
            out.append(q + (r > 0))
    return tuple(out)


def _mask(subset: Iterable[int]) -> int:
    return sum(1 << (i - 1) for i in subset)


def _seed_points(d: int, n: int) -> list[Linearization]:
    seeds = []
    if d >= 2:
        cuts = [g for g, _ in symmetric_slice_walls(d, n)]
        lo = max(Fraction(0), Fraction(d + 1 - n, d - 1))
        edges = [lo] + cuts + [Fraction(1)]
        for a, b in zip(edges, edges[1:]):
            L = Linearization.symmetric(d, n, (a + b) / 2)
            if L.is_interior:
                seeds.append(L)
    if d == n:
        eps = Fraction(1, 10 * n)
        seeds.append(Linearization.symmetric(d, n, (1 + d * eps) / (d - 1)))
    return seeds


def realizability_search(
    Z: ExtremalAssignment,
    d: int,
    n: int,
    cap: int = DEFAULT_TREE_CAP,
    seed: int = 0,
    patience: int = 20000,
    max_samples: int = 500000,
    denominator: int = 10**6,
) -> RealizabilityResult:
    """Look for a chamber whose GIT assignment equals Z on every tree.

    Chambers are told apart by their sigma tables, and one point per
    chamber is tested.  Points come from symmetric-slice seeds and random
    rational sampling, which stops after ``patience`` draws in a row find no
    new chamber.  A pair-tail certificate, when one exists, proves that no
    chamber works for any d.
    """
    _check_tree_cap(n, cap)
    certificate = pair_tail_certificate(Z, n)
    checks = []
    for T in all_trees(n):
        target = Z.assigned(T)
        checks.append([(v in target, [_mask(b) for b in T.branch_sets(v)]) for v in T.vertices])

    def matches(table) -> bool:
        return all(
            (sum(table[m] for m in masks) == d) == want for vertices in checks for want, masks in vertices
        )

    rng = random.Random(seed)
    seen = set()
    samples = quiet = 0
    pending = [_integer_form(L) for L in _seed_points(d, n)]
    while quiet < patience and samples < max_samples:
        if pending:
            point = pending.pop()
        else:
            point = _random_integer_point(d, n, rng, denominator)
            samples += 1
        if point is None:
            quiet += 1
            continue
        table = _sigma_by_mask(d, n, *point)
        if table is None or table in seen:
            quiet += 1
            continue
        seen.add(table)
        quiet = 0
        if matches(table):
            G, weights, D = point
            L = Linearization(d, n, Fraction(G, D), tuple(Fraction(C, D) for C in weights))
            if certificate is not None:
                raise AssertionError(f"witness {L.to_dict()} contradicts certificate: {certificate}")
            assert all(Z.assigned(T) == git_assignment(L).assigned(T) for T in all_trees(n))
            return RealizabilityResult(L, len(seen), samples, None, quiet >= patience)
    return RealizabilityResult(None, len(seen), samples, certificate, quiet >= patience)
