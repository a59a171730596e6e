"""Combinatorial types of GIT-stable curves: degrees, contraction, resolution, stability.

A :class:`CurveType` records components with degrees, singular points (the
set of components through each, so multiplicity is its size), marked smooth
locations, and where every mark sits.  Isomorphism is decided on a rooted
canonical encoding of the incidence tree.
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .lincore import Linearization, check_subsets_off_walls, complement, require_generic, sigma
from .trees import DualTree, TreeFormatError, edge_subsets
from .walls import Wall, lies_only_on, side_points

SMOOTH = "smooth"
SINGULAR = "singular"


@dataclass(frozen=True)
class CurveType:
    degrees: tuple[int, ...]
    singular: tuple[frozenset[int], ...]
    smooth: tuple[int, ...]
    marks: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(self.degrees))
        object.__setattr__(self, "singular", tuple(frozenset(s) for s in self.singular))
        object.__setattr__(self, "smooth", tuple(self.smooth))
        object.__setattr__(self, "marks", tuple(tuple(m) for m in self.marks))
        C = len(self.degrees)
        if C < 1:
            raise ValueError("a curve needs at least one component")
        if any(e < 1 for e in self.degrees):
            raise ValueError("component degrees must be positive")
        for s in self.singular:
            if len(s) < 2 or not all(0 <= c < C for c in s):
                raise ValueError(f"bad singular point {sorted(s)}")
        if not all(0 <= c < C for c in self.smooth):
            raise ValueError("smooth location on unknown component")
        used = set()
        for kind, j in self.marks:
            if kind == SMOOTH and 0 <= j < len(self.smooth):
                used.add(j)
            elif not (kind == SINGULAR and 0 <= j < len(self.singular)):
                raise ValueError(f"bad mark location ({kind}, {j})")
        if used != set(range(len(self.smooth))):
            raise ValueError("every smooth location must carry a mark")
        if C - sum(len(s) - 1 for s in self.singular) != 1:
            raise ValueError("components and singular points do not form a rational tree")
        if len(self._reach(("C", 0), None)) != C + len(self.singular) + len(self.smooth):
            raise ValueError("curve is not connected")

    # -- structure ---------------------------------------------------------

    @property
    def d(self) -> int:
        return sum(self.degrees)

    @property
    def n(self) -> int:
        return len(self.marks)

    @property
    def num_components(self) -> int:
        return len(self.degrees)

    def multiplicity(self, s: int) -> int:
        return len(self.singular[s])

    def marks_at(self, kind: str, j: int) -> frozenset[int]:
        return frozenset(i for i, loc in enumerate(self.marks, start=1) if loc == (kind, j))

    def singular_on(self, c: int) -> list[int]:
        return [s for s, comps in enumerate(self.singular) if c in comps]

    def smooth_on(self, c: int) -> list[int]:
        return [j for j, comp in enumerate(self.smooth) if comp == c]

    def _adjacent(self, node):
        kind, j = node
        if kind == "C":
            return [("S", s) for s in self.singular_on(j)] + [("P", p) for p in self.smooth_on(j)]
        if kind == "S":
            return [("C", c) for c in sorted(self.singular[j])]
        return [("C", self.smooth[j])]

    def _reach(self, start, blocked) -> set:
        seen = {start}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for nxt in self._adjacent(node):
                if nxt != blocked and nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return seen

    def _marks_on_nodes(self, nodes) -> frozenset[int]:
        out = set()
        for kind, j in nodes:
            if kind == "P":
                out |= self.marks_at(SMOOTH, j)
            elif kind == "S":
                out |= self.marks_at(SINGULAR, j)
        return frozenset(out)

    def tails(self) -> list[tuple[frozenset[int], frozenset[int], int]]:
        """Every tail as (components, marks on it, attaching singular point).

        A tail is a union of some (not all) branches at one singular point;
        marks at the attaching point lie on the tail.
        """
        out = []
        for s, comps in enumerate(self.singular):
            pieces = []
            for c in sorted(comps):
                nodes = self._reach(("C", c), ("S", s))
                pieces.append(nodes)
            at_point = self.marks_at(SINGULAR, s)
            for r in range(1, len(pieces)):
                for chosen in itertools.combinations(pieces, r):
                    nodes = set().union(*chosen)
                    components = frozenset(j for kind, j in nodes if kind == "C")
                    out.append((components, self._marks_on_nodes(nodes) | at_point, s))
        return out

    def degree_of(self, components: Iterable[int]) -> int:
        return sum(self.degrees[c] for c in components)

    def complement_pieces(self, components: frozenset[int]) -> list[tuple[frozenset[int], frozenset[int]]]:
        """Connected components of the closure of X minus E, with their marks."""
        rest = set(range(self.num_components)) - set(components)
        pieces = []
        while rest:
            start = rest.pop()
            group = {start}
            queue = deque([start])
            while queue:
                c = queue.popleft()
                for s in self.singular_on(c):
                    for other in self.singular[s]:
                        if other in rest:
                            rest.discard(other)
                            group.add(other)
                            queue.append(other)
            marks = set()
            for c in group:
                for p in self.smooth_on(c):
                    marks |= self.marks_at(SMOOTH, p)
                for s in self.singular_on(c):
                    marks |= self.marks_at(SINGULAR, s)
            pieces.append((frozenset(group), frozenset(marks)))
        return pieces

    def connected_subcurves(self, within: Iterable[int] | None = None) -> list[frozenset[int]]:
        comps = sorted(within) if within is not None else list(range(self.num_components))
        out = []
        for r in range(1, len(comps) + 1):
            for chosen in itertools.combinations(comps, r):
                if self._components_connected(set(chosen)):
                    out.append(frozenset(chosen))
        return out

    def _components_connected(self, chosen: set[int]) -> bool:
        start = next(iter(chosen))
        seen = {start}
        queue = deque([start])
        while queue:
            c = queue.popleft()
            for s in self.singular_on(c):
                for other in self.singular[s]:
                    if other in chosen and other not in seen:
                        seen.add(other)
                        queue.append(other)
        return seen == chosen

    # -- isomorphism ---------------------------------------------------------

    def canonical(self) -> tuple:
        """Canonical encoding, rooted where mark 1 sits."""
        root = ("P" if self.marks[0][0] == SMOOTH else "S", self.marks[0][1])

        def label(node):
            kind, j = node
            if kind == "C":
                return ("C", self.degrees[j])
            if kind == "S":
                return ("S", len(self.singular[j]), tuple(sorted(self.marks_at(SINGULAR, j))))
            return ("P", tuple(sorted(self.marks_at(SMOOTH, j))))

        def encode(node, parent):
            children = sorted(encode(ch, node) for ch in self._adjacent(node) if ch != parent)
            return (label(node), tuple(children))

        return encode(root, None)

    def is_isomorphic(self, other: "CurveType") -> bool:
        return self.n == other.n and self.canonical() == other.canonical()

    # -- text format ---------------------------------------------------------

    def dumps(self) -> str:
        lines = [f"component {c} degree {e}" for c, e in enumerate(self.degrees)]
        for s, comps in enumerate(self.singular):
            lines.append(f"singular {s} branches {' '.join(map(str, sorted(comps)))}")
        for p, c in enumerate(self.smooth):
            lines.append(f"point {p} on {c}")
        for i, (kind, j) in enumerate(self.marks, start=1):
            lines.append(f"mark {i} at {'singular' if kind == SINGULAR else 'point'} {j}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "CurveType":
        return parse_curve(text)


def parse_curve(text: str) -> CurveType:
    """Parse the line format written by :meth:`CurveType.dumps`."""
    degrees: dict[int, int] = {}
    singular: dict[int, frozenset[int]] = {}
    smooth: dict[int, int] = {}
    marks: dict[int, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        p = line.split()
        try:
            if p[0] == "component" and len(p) == 4 and p[2] == "degree":
                degrees[int(p[1])] = int(p[3])
            elif p[0] == "singular" and len(p) >= 5 and p[2] == "branches":
                singular[int(p[1])] = frozenset(int(x) for x in p[3:])
                if len(singular[int(p[1])]) != len(p) - 3:
                    raise TreeFormatError("repeated branch component", lineno)
            elif p[0] == "point" and len(p) == 4 and p[2] == "on":
                smooth[int(p[1])] = int(p[3])
            elif p[0] == "mark" and len(p) == 5 and p[2] == "at" and p[3] in ("point", "singular"):
                i = int(p[1])
                if i in marks:
                    raise TreeFormatError(f"mark {i} placed twice", lineno)
                marks[i] = (SMOOTH if p[3] == "point" else SINGULAR, int(p[4]))
            else:
                raise TreeFormatError(f"unrecognized line {raw!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, TreeFormatError):
                raise
            raise TreeFormatError(f"non-integer field in {raw!r}", lineno) from None
    for name, table in (("component", degrees), ("singular", singular), ("point", smooth)):
        if sorted(table) != list(range(len(table))):
            raise TreeFormatError(f"{name} ids must be 0..{len(table) - 1}")
    if sorted(marks) != list(range(1, len(marks) + 1)):
        raise TreeFormatError("marks must be exactly 1..n")
    try:
        return CurveType(
            tuple(degrees[c] for c in range(len(degrees))),
            tuple(singular[s] for s in range(len(singular))),
            tuple(smooth[p] for p in range(len(smooth))),
            tuple(marks[i] for i in range(1, len(marks) + 1)),
        )
    except ValueError as exc:
        raise TreeFormatError(str(exc)) from None


# -- degrees and contraction ---------------------------------------------------


def degree_assignment(T: DualTree, L: Linearization) -> dict[int, int]:
    """Degree d - sum(sigma(branch)) of each vertex's image."""
    branch_sets = {v: T.branch_sets(v) for v in T.vertices}
    check_subsets_off_walls({b for sets in branch_sets.values() for b in sets}, L)
    degrees = {v: L.d - sum(sigma(b, L) for b in sets) for v, sets in branch_sets.items()}
    if any(e < 0 for e in degrees.values()) or sum(degrees.values()) != L.d:
        raise AssertionError(f"degree assignment {degrees} is inconsistent (d={L.d})")
    return degrees


def z_assignment(T: DualTree, L: Linearization) -> frozenset[int]:
    return frozenset(v for v, e in degree_assignment(T, L).items() if e == 0)


def _contract(num_vertices: int, edges, legs, degrees: dict[int, int]) -> CurveType:
    assigned = {v for v in range(num_vertices) if degrees[v] == 0}
    kept = [v for v in range(num_vertices) if degrees[v] > 0]
    if not kept:
        raise AssertionError("every vertex is assigned; the assignment is not proper")
    index = {v: j for j, v in enumerate(kept)}
    adj = {v: set() for v in range(num_vertices)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    legs_at = {v: [] for v in range(num_vertices)}
    for i, v in enumerate(legs, start=1):
        legs_at[v].append(i)

    singular: list[frozenset[int]] = []
    smooth: list[int] = []
    marks: dict[int, tuple[str, int]] = {}
    for a, b in edges:
        if a not in assigned and b not in assigned:
            singular.append(frozenset((index[a], index[b])))
    seen = set()
    for v in sorted(assigned):
        if v in seen:
            continue
        cluster = {v}
        queue = deque([v])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w in assigned and w not in cluster:
                    cluster.add(w)
                    queue.append(w)
        seen |= cluster
        outside = sorted({index[w] for u in cluster for w in adj[u] if w not in assigned})
        cluster_marks = sorted(i for u in cluster for i in legs_at[u])
        if len(outside) == 1:
            if not cluster_marks:
                raise AssertionError("unmarked contracted tail")
            smooth.append(outside[0])
            for i in cluster_marks:
                marks[i] = (SMOOTH, len(smooth) - 1)
        else:
            singular.append(frozenset(outside))
            for i in cluster_marks:
                marks[i] = (SINGULAR, len(singular) - 1)
    for v in kept:
        for i in legs_at[v]:
            smooth.append(index[v])
            marks[i] = (SMOOTH, len(smooth) - 1)
    return CurveType(
        tuple(degrees[v] for v in kept),
        tuple(singular),
        tuple(smooth),
        tuple(marks[i] for i in range(1, len(legs) + 1)),
    )


def z_contract(T: DualTree, L: Linearization) -> CurveType:
    """The stable model at L: assigned clusters collapse to points."""
    return _contract(T.num_vertices, T.edges, T.legs, degree_assignment(T, L))


def resolve(C: CurveType) -> DualTree:
    """Replace marked points and multinodal points by rational components."""
    num = C.num_components
    edges = []
    legs: dict[int, int] = {}
    for p, comp in enumerate(C.smooth):
        at = sorted(C.marks_at(SMOOTH, p))
        if len(at) == 1:
            legs[at[0]] = comp
        else:
            v = num
            num += 1
            edges.append((comp, v))
            for i in at:
                legs[i] = v
    for s, comps in enumerate(C.singular):
        at = sorted(C.marks_at(SINGULAR, s))
        if len(comps) == 2 and not at:
            a, b = sorted(comps)
            edges.append((a, b))
            continue
        v = num
        num += 1
        for c in sorted(comps):
            edges.append((c, v))
        for i in at:
            legs[i] = v
    return DualTree(num, tuple(edges), tuple(legs[i] for i in range(1, C.n + 1)))


# -- stability -----------------------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    violations: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.stable


def necessary_condition_violations(C: CurveType, L: Linearization) -> list[str]:
    """Every failed necessary condition for stability at a generic L."""
    out = []
    if C.d != L.d:
        out.append(f"total degree {C.d} != d = {L.d}")
    if C.n != L.n:
        out.append(f"curve has {C.n} marks, linearization has {L.n}")
        return out
    for p in range(len(C.smooth)):
        w = L.weight(C.marks_at(SMOOTH, p))
        if w >= 1:
            out.append(f"smooth point {p}: mark weight {w} is not below 1")
    for s, comps in enumerate(C.singular):
        m = len(comps)
        w = L.weight(C.marks_at(SINGULAR, s))
        bound = 1 - (m - 1) * L.gamma
        if w >= bound:
            out.append(f"singular point {s} (multiplicity {m}): mark weight {w} is not below {bound}")
        if m >= 3 and L.gamma * (m - 1) >= 1:
            out.append(f"singular point {s}: multiplicity {m} needs gamma < 1/{m - 1}")
    for comps, marks, s in C.tails():
        expected = sigma(marks, L)
        if C.degree_of(comps) != expected:
            out.append(
                f"tail {sorted(marks)} at singular point {s}: degree {C.degree_of(comps)} != sigma {expected}"
            )
    return out


def is_git_stable(C: CurveType, L: Linearization) -> StabilityReport:
    """Stable iff C is its own stable model at L (contracting its resolution gives C back)."""
    require_generic(L)
    violations = necessary_condition_violations(C, L)
    try:
        T = resolve(C)
    except ValueError as exc:
        return StabilityReport(False, tuple(violations + [f"resolution is not DM-stable: {exc}"]))
    if C.n != L.n:
        return StabilityReport(False, tuple(violations))
    model = z_contract(T, L)
    stable = model.is_isomorphic(C)
    if not stable and not violations:
        violations.append("contracting the resolution does not return the curve")
    return StabilityReport(stable, tuple(violations))


# -- walls -----------------------------------------------------------------------


class WallStability(enum.Enum):
    STABLE = "Stable"
    STRICTLY_SS_BRIDGE_CLOSED_ORBIT = "StrictlySS_Bridge_ClosedOrbit"
    STRICTLY_SS = "StrictlySS"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class IkBridge:
    wall: Wall
    subset: frozenset[int]
    bridge: int
    side_I: frozenset[int]
    side_Ic: frozenset[int]
    degree_I: int
    degree_Ic: int


def _presented(wall: Wall, presented) -> tuple[frozenset[int], int]:
    subset = frozenset(presented) if presented is not None else wall.subset
    return subset, wall.level_of(subset)


def find_bridge(
    C: CurveType,
    wall: Wall,
    sides: tuple[Linearization, Linearization],
    presented: Iterable[int] | None = None,
) -> IkBridge | None:
    """The (I, k)-bridge structure of C, if C is one.

    ``sides`` are generic points with phi(I) < k and phi(I) > k.
    """
    subset, k = _presented(wall, presented)
    other = complement(subset, wall.n)
    minus, plus = sides
    for D in range(C.num_components):
        if C.degrees[D] != 1 or C.smooth_on(D):
            continue
        points = C.singular_on(D)
        if len(points) != 2 or any(C.multiplicity(s) != 2 for s in points):
            continue
        rest = C.complement_pieces(frozenset([D]))
        if len(rest) != 2:
            continue
        by_marks = {marks: comps for comps, marks in rest}
        if set(by_marks) != {subset, other}:
            continue
        side_I, side_Ic = by_marks[subset], by_marks[other]
        ok = True
        for side, L in ((side_I, minus), (side_Ic, plus)):
            for E in C.connected_subcurves(side):
                expected = wall.d - sum(sigma(m, L) for _, m in C.complement_pieces(E))
                if C.degree_of(E) != expected:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return IkBridge(wall, subset, D, side_I, side_Ic, C.degree_of(side_I), C.degree_of(side_Ic))
    return None


def _check_exclusive(wall: Wall, L_wall: Linearization) -> None:
    if not lies_only_on(L_wall, wall):
        raise ValueError(f"linearization must lie on wall {wall} and on no other wall")


def wall_stability(
    C: CurveType, wall: Wall, L_wall: Linearization, presented: Iterable[int] | None = None
) -> WallStability:
    _check_exclusive(wall, L_wall)
    subset, _ = _presented(wall, presented)
    other = complement(subset, wall.n)
    minus, plus = side_points(wall, L_wall, subset)
    if find_bridge(C, wall, (minus, plus), subset) is not None:
        return WallStability.STRICTLY_SS_BRIDGE_CLOSED_ORBIT
    labeled = any(marks in (subset, other) for _, marks, _ in C.tails())
    stable_plus = bool(is_git_stable(C, plus))
    stable_minus = bool(is_git_stable(C, minus))
    if labeled:
        return WallStability.STRICTLY_SS if (stable_plus or stable_minus) else WallStability.UNSTABLE
    return WallStability.STABLE if (stable_plus and stable_minus) else WallStability.UNSTABLE


def wall_image(
    T: DualTree, wall: Wall, L_wall: Linearization, presented: Iterable[int] | None = None
) -> tuple[CurveType, frozenset[int]]:
    """The closed-orbit curve representing T in the quotient on the wall.

    Returns the curve and the set of tree vertices collapsed to points.  If
    T has an edge splitting the marks as I | I^c, the image is the
    (I, k)-bridge: a degree-one unmarked component is inserted on that edge,
    the I side takes degrees from the phi(I) < k chamber and the I^c side
    from the phi(I) > k chamber.  Otherwise both chambers agree and the image
    is the ordinary stable model.
    """
    _check_exclusive(wall, L_wall)
    subset, _ = _presented(wall, presented)
    minus, plus = side_points(wall, L_wall, subset)
    split_edge = None
    for (u, v), (side_u, side_v) in edge_subsets(T).items():
        if side_u == subset:
            split_edge = (u, v)
        elif side_v == subset:
            split_edge = (v, u)
    if split_edge is None:
        degrees = degree_assignment(T, plus)
        assert degrees == degree_assignment(T, minus)
        curve = _contract(T.num_vertices, T.edges, T.legs, degrees)
        return curve, frozenset(v for v, e in degrees.items() if e == 0)
    inner, outer = split_edge
    deg_minus = degree_assignment(T, minus)
    deg_plus = degree_assignment(T, plus)
    inner_side = T._component(inner, outer)
    degrees = {v: (deg_minus[v] if v in inner_side else deg_plus[v]) for v in T.vertices}
    D = T.num_vertices
    degrees[D] = 1
    edges = [e for e in T.edges if set(e) != {inner, outer}] + [(inner, D), (D, outer)]
    curve = _contract(T.num_vertices + 1, edges, T.legs, degrees)
    return curve, frozenset(v for v in T.vertices if degrees[v] == 0)
