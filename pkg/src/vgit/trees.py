"""Stable genus-0 dual trees with labeled legs, specializations and F-curves."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable

from .lincore import Linearization, check_subsets_off_walls, sigma


class TreeFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True)
class DualTree:
    """Vertices are 0..num_vertices-1; ``legs[i-1]`` is the vertex carrying mark i."""

    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    legs: tuple[int, ...]

    def __post_init__(self):
        edges = tuple(sorted(tuple(sorted(e)) for e in self.edges))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "legs", tuple(self.legs))
        V = self.num_vertices
        if V < 1:
            raise ValueError("a dual tree needs at least one vertex")
        if len(edges) != V - 1:
            raise ValueError(f"{V} vertices need {V - 1} edges, got {len(edges)}")
        for u, v in edges:
            if not (0 <= u < V and 0 <= v < V) or u == v:
                raise ValueError(f"bad edge ({u}, {v})")
        if len(set(edges)) != len(edges):
            raise ValueError("repeated edge")
        for v in self.legs:
            if not 0 <= v < V:
                raise ValueError(f"leg attached to unknown vertex {v}")
        if len(self._component(0, None)) != V:
            raise ValueError("graph is not connected")
        for v in range(V):
            if self.valence(v) < 3:
                raise ValueError(f"vertex {v} has valence {self.valence(v)} < 3")

    @property
    def n(self) -> int:
        return len(self.legs)

    @property
    def vertices(self) -> range:
        return range(self.num_vertices)

    @cached_property
    def _adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj = [[] for _ in range(self.num_vertices)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return tuple(tuple(sorted(x)) for x in adj)

    @cached_property
    def _legs_by_vertex(self) -> tuple[frozenset[int], ...]:
        groups = [set() for _ in range(self.num_vertices)]
        for i, u in enumerate(self.legs, start=1):
            groups[u].add(i)
        return tuple(frozenset(g) for g in groups)

    @cached_property
    def _branch_table(self) -> tuple[tuple[tuple[int, frozenset[int]], ...], ...]:
        return tuple(
            tuple((w, self.marks_of(self._component(w, v))) for w in self.neighbors(v))
            for v in self.vertices
        )

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adjacency[v]

    def legs_at(self, v: int) -> frozenset[int]:
        return self._legs_by_vertex[v]

    def valence(self, v: int) -> int:
        return len(self.neighbors(v)) + len(self.legs_at(v))

    def _component(self, start: int, removed: int | None) -> set[int]:
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in self.neighbors(u):
                if w != removed and w not in seen:
                    seen.add(w)
                    queue.append(w)
        return seen

    def marks_of(self, verts: Iterable[int]) -> frozenset[int]:
        return frozenset().union(*(self.legs_at(u) for u in verts))

    def branches(self, v: int) -> list[tuple[int, frozenset[int]]]:
        """(neighbor, marks on that side) for each edge at v."""
        return list(self._branch_table[v])

    def branch_sets(self, v: int) -> list[frozenset[int]]:
        return [marks for _, marks in self.branches(v)]

    def vertex_key(self, v: int) -> tuple:
        """Isomorphism-invariant name of v: its own legs and its branch sets."""
        return (self.legs_at(v), frozenset(self.branch_sets(v)))

    def splits(self) -> frozenset[frozenset[int]]:
        """Edge splits, each as the side not containing the largest mark."""
        out = set()
        for side_a, side_b in edge_subsets(self).values():
            out.add(side_a if self.n not in side_a else side_b)
        return frozenset(out)

    def key(self) -> frozenset[frozenset[int]]:
        """Canonical form: a labeled-leg tree is determined by its edge splits."""
        return self.splits()

    def is_isomorphic(self, other: "DualTree") -> bool:
        return self.n == other.n and self.key() == other.key()

    def dumps(self) -> str:
        lines = [f"vertices {self.num_vertices}"]
        lines += [f"edge {u} {v}" for u, v in self.edges]
        lines += [f"leg {i} {v}" for i, v in enumerate(self.legs, start=1)]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "DualTree":
        return parse_tree(text)


def parse_tree(text: str) -> DualTree:
    """Parse ``vertices N`` / ``edge u v`` / ``leg mark vertex`` lines (``#`` comments)."""
    num = None
    edges = []
    legs: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            values = [int(p) for p in parts[1:]]
        except ValueError:
            raise TreeFormatError(f"non-integer field in {raw!r}", lineno) from None
        if parts[0] == "vertices" and len(values) == 1:
            if num is not None:
                raise TreeFormatError("vertex count given twice", lineno)
            num = values[0]
        elif parts[0] == "edge" and len(values) == 2:
            edges.append((values[0], values[1]))
            if num is not None and not all(0 <= x < num for x in values):
                raise TreeFormatError(f"edge endpoint out of range 0..{num - 1}", lineno)
        elif parts[0] == "leg" and len(values) == 2:
            mark, vertex = values
            if mark in legs:
                raise TreeFormatError(f"mark {mark} attached twice", lineno)
            if num is not None and not 0 <= vertex < num:
                raise TreeFormatError(f"leg vertex out of range 0..{num - 1}", lineno)
            legs[mark] = vertex
        else:
            raise TreeFormatError(f"unrecognized line {raw!r}", lineno)
    if num is None:
        raise TreeFormatError("missing 'vertices N' line")
    n = len(legs)
    if sorted(legs) != list(range(1, n + 1)):
        raise TreeFormatError(f"marks must be exactly 1..{n}, got {sorted(legs)}")
    try:
        return DualTree(num, tuple(edges), tuple(legs[i] for i in range(1, n + 1)))
    except ValueError as exc:
        raise TreeFormatError(str(exc)) from None


def edge_subsets(T: DualTree) -> dict[tuple[int, int], tuple[frozenset[int], frozenset[int]]]:
    """For each edge (u, v): (marks on u's side, marks on v's side)."""
    out = {}
    for u, v in T.edges:
        side_u = T.marks_of(T._component(u, v))
        out[(u, v)] = (side_u, frozenset(range(1, T.n + 1)) - side_u)
    return out


# -- constructors -------------------------------------------------------------


def smooth_tree(n: int) -> DualTree:
    return DualTree(1, (), (0,) * n)


def chain_tree(leg_counts: Iterable[int]) -> DualTree:
    """A caterpillar: vertices in a row, vertex j carrying the next leg_counts[j] marks."""
    counts = list(leg_counts)
    legs = [v for v, c in enumerate(counts) for _ in range(c)]
    edges = tuple((v, v + 1) for v in range(len(counts) - 1))
    return DualTree(len(counts), edges, tuple(legs))


def star_tree(tail_sizes: Iterable[int], center_legs: int = 0) -> DualTree:
    """An unmarked (or lightly marked) center joined to one tail vertex per entry."""
    sizes = list(tail_sizes)
    legs = [0] * center_legs
    for j, s in enumerate(sizes, start=1):
        legs += [j] * s
    edges = tuple((0, j) for j in range(1, len(sizes) + 1))
    return DualTree(len(sizes) + 1, edges, tuple(legs))


def tree_from_splits(n: int, splits: Iterable[frozenset[int]]) -> DualTree:
    """Build the tree whose edges realize a pairwise compatible family of splits."""
    everything = frozenset(range(1, n + 1))
    sides = [s if n not in s else everything - s for s in splits]
    sides = sorted(set(sides), key=len)
    # vertex per split (the end of its edge away from mark n) plus a root
    num = len(sides) + 1
    root = len(sides)
    parent = {}
    for j, s in enumerate(sides):
        supersets = [t for t, other in enumerate(sides) if other > s]
        parent[j] = min(supersets, key=lambda t: len(sides[t])) if supersets else root
    legs = []
    for i in range(1, n + 1):
        holders = [j for j, s in enumerate(sides) if i in s]
        legs.append(min(holders, key=lambda j: len(sides[j])) if holders else root)
    edges = tuple((j, parent[j]) for j in range(len(sides)))
    return DualTree(num, edges, tuple(legs))


# -- specializations ----------------------------------------------------------


def specializations(T: DualTree) -> list[tuple[DualTree, dict[int, tuple[int, ...]]]]:
    """All one-edge specializations with the vertex correspondence v -> (v'_1, ...)."""
    out = []
    new = T.num_vertices
    for v in T.vertices:
        flags = [("edge", w) for w in T.neighbors(v)] + [("leg", i) for i in sorted(T.legs_at(v))]
        m = len(flags)
        if m < 4:
            continue
        seen = set()
        # the group moved to the new vertex; fix flag 0 on the old vertex to avoid doubles
        for r in range(2, m - 1):
            for moved in itertools.combinations(range(1, m), r):
                if m - r < 2:
                    continue
                key = frozenset(moved)
                if key in seen:
                    continue
                seen.add(key)
                moved_flags = [flags[j] for j in moved]
                edges = []
                for a, b in T.edges:
                    if v in (a, b):
                        w = b if a == v else a
                        edges.append((new if ("edge", w) in moved_flags else v, w))
                    else:
                        edges.append((a, b))
                edges.append((v, new))
                legs = tuple(
                    new if (u == v and ("leg", i) in moved_flags) else u
                    for i, u in enumerate(T.legs, start=1)
                )
                S = DualTree(T.num_vertices + 1, tuple(edges), legs)
                corr = {u: (u,) for u in T.vertices}
                corr[v] = (v, new)
                out.append((S, corr))
    return out


@lru_cache(maxsize=None)
def all_trees(n: int) -> tuple[DualTree, ...]:
    """Every DM-stable tree on n labeled legs, one per isomorphism class."""
    if n < 3:
        raise ValueError("need n >= 3")
    start = smooth_tree(n)
    found = {start.key(): start}
    frontier = [start]
    while frontier:
        nxt = []
        for T in frontier:
            for S, _ in specializations(T):
                k = S.key()
                if k not in found:
                    found[k] = S
                    nxt.append(S)
        frontier = nxt
    return tuple(sorted(found.values(), key=lambda T: (T.num_vertices, sorted(map(sorted, T.key())))))


# -- F-curves -----------------------------------------------------------------


@dataclass(frozen=True)
class FCurvePartition:
    parts: tuple[frozenset[int], ...]

    def __post_init__(self):
        parts = tuple(sorted((frozenset(p) for p in self.parts), key=min))
        object.__setattr__(self, "parts", parts)
        if len(parts) != 4 or any(not p for p in parts):
            raise ValueError("an F-curve partition has four nonempty parts")
        union = frozenset().union(*parts)
        if sum(map(len, parts)) != len(union) or union != frozenset(range(1, len(union) + 1)):
            raise ValueError("F-curve parts must partition 1..n exactly")

    @classmethod
    def from_sizes(cls, sizes: Iterable[int]) -> "FCurvePartition":
        parts, start = [], 1
        for s in sizes:
            parts.append(frozenset(range(start, start + s)))
            start += s
        return cls(tuple(parts))

    @property
    def n(self) -> int:
        return sum(map(len, self.parts))


def fcurve_sigma_sum(P: FCurvePartition, L: Linearization) -> int:
    """Sum of sigma over the four parts; the spine has degree d minus this."""
    check_subsets_off_walls(P.parts, L)
    return sum(sigma(p, L) for p in P.parts)


def fcurve_contracted(P: FCurvePartition, L: Linearization) -> bool:
    return fcurve_sigma_sum(P, L) == L.d
