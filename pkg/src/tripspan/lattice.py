"""Lattice points, line occupancy, and edge-isoperimetry on the triangular lattice.

Points are plain ``(x, y)`` integer tuples and point sets are frozensets of
them.  The triangular lattice is realised on Z^2 with the six neighbours
``(x+-1, y)``, ``(x, y+-1)``, ``(x+1, y-1)`` and ``(x-1, y+1)``; its three edge
directions run along rows, columns and the anti-diagonals ``x + y = c``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import partial
from typing import Iterable

import numpy as np

from tripspan.errors import BudgetExceeded
from tripspan.parallel import run_tasks

Point = tuple[int, int]
PointSet = frozenset

NEIGHBOURS: tuple[Point, ...] = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


def point_set(points: Iterable[Iterable[int]]) -> PointSet:
    return frozenset((int(x), int(y)) for x, y in points)


@dataclass(frozen=True)
class LineProfile:
    rows: frozenset
    cols: frozenset
    diags: frozenset

    @property
    def g(self) -> int:
        return len(self.rows) + len(self.cols) + len(self.diags)


def line_profile(points: Iterable[Point]) -> LineProfile:
    """Occupied rows (y), columns (x) and anti-diagonals (x + y).

    Lines of the form x - y = c are deliberately not counted.
    """
    points = list(points)
    return LineProfile(
        rows=frozenset(y for _, y in points),
        cols=frozenset(x for x, _ in points),
        diags=frozenset(x + y for x, y in points),
    )


def g_of_set(points: Iterable[Point]) -> int:
    return line_profile(points).g


def edge_boundary(points: Iterable[Point]) -> int:
    """Number of lattice edges with exactly one endpoint in ``points`` (neighbour scan)."""
    pts = set(points)
    return sum(1 for x, y in pts for dx, dy in NEIGHBOURS if (x + dx, y + dy) not in pts)


def internal_edges(points: Iterable[Point]) -> int:
    pts = set(points)
    # each internal edge is seen from both ends
    return sum(1 for x, y in pts for dx, dy in NEIGHBOURS if (x + dx, y + dy) in pts) // 2


def edge_boundary_degree_sum(points: Iterable[Point]) -> int:
    """Edge boundary via 6|P| - 2 * (internal edge count)."""
    pts = set(points)
    return 6 * len(pts) - 2 * internal_edges(pts)


def lattice_distance(p: Point, q: Point = (0, 0)) -> int:
    dx, dy = p[0] - q[0], p[1] - q[1]
    return max(abs(dx), abs(dy), abs(dx + dy))


def hexagon_ball(r: int) -> PointSet:
    """Radius-``r`` ball around the origin in the lattice metric (a regular hexagon)."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    return frozenset(
        (x, y) for x in range(-r, r + 1) for y in range(-r, r + 1) if abs(x + y) <= r
    )


def canonicalize(points: Iterable[Point]) -> PointSet:
    """Translate so that min x = 0 and min y = 0."""
    pts = list(points)
    if not pts:
        return frozenset()
    mx = min(x for x, _ in pts)
    my = min(y for _, y in pts)
    return frozenset((x - mx, y - my) for x, y in pts)


def translate(points: Iterable[Point], v: Point) -> PointSet:
    return frozenset((x + v[0], y + v[1]) for x, y in points)


def to_json_list(points: Iterable[Point]) -> list[list[int]]:
    return [list(p) for p in sorted(points)]


# 60-degree rotation and the x <-> y reflection generate the 12 lattice symmetries.
def _rotate(p: Point) -> Point:
    return (-p[1], p[0] + p[1])


def _reflect(p: Point) -> Point:
    return (p[1], p[0])


def symmetry_images(points: Iterable[Point]) -> list[PointSet]:
    """Canonical forms of the 12 images of ``points`` under the lattice symmetry group."""
    base = list(points)
    images = []
    for flip in (False, True):
        cur = [_reflect(p) for p in base] if flip else base
        for _ in range(6):
            images.append(canonicalize(cur))
            cur = [_rotate(p) for p in cur]
    return images


def symmetry_key(points: Iterable[Point]) -> tuple:
    return min(tuple(sorted(img)) for img in symmetry_images(points))


def symmetry_classes(sets: Iterable[PointSet]) -> list[PointSet]:
    """One representative per orbit of the 12-element symmetry group."""
    reps = {}
    for s in sets:
        key = symmetry_key(s)
        reps.setdefault(key, frozenset(key))
    return [reps[k] for k in sorted(reps)]


def spiral_family(k: int) -> list[Point]:
    """Greedy nested family of k points with boundary-minimal prefixes.

    Each step appends the lattice point whose addition gives the smallest edge
    boundary.  Ties go to the point nearest the origin in the lattice metric,
    then to the smallest ``(x + y, x)``.  Without the distance key the greedy
    walk drifts away from the hexagons.
    """
    if k < 1:
        raise ValueError("k must be positive")
    seq = [(0, 0)]
    chosen = {(0, 0)}
    while len(seq) < k:
        frontier = {
            (x + dx, y + dy) for x, y in chosen for dx, dy in NEIGHBOURS
        } - chosen

        def key(p):
            inside = sum((p[0] + dx, p[1] + dy) in chosen for dx, dy in NEIGHBOURS)
            return (-inside, lattice_distance(p), p[0] + p[1], p[0])

        nxt = min(frontier, key=key)
        seq.append(nxt)
        chosen.add(nxt)
    return seq


# ---------------------------------------------------------------------------
# exhaustive minimisation inside a window


@dataclass(frozen=True)
class BoundaryMinimum:
    k: int
    window_radius: int
    minimum: int
    witnesses: frozenset  # of canonical PointSets
    nodes: int

    def sorted_witnesses(self) -> list[list[list[int]]]:
        return sorted(to_json_list(w) for w in self.witnesses)


def _window(window_radius: int):
    pts = sorted(hexagon_ball(window_radius), key=lambda p: (p[1], p[0]))
    index = {p: i for i, p in enumerate(pts)}
    adj = [
        [index[(x + dx, y + dy)] for dx, dy in NEIGHBOURS if (x + dx, y + dy) in index]
        for x, y in pts
    ]
    return pts, adj


def _seed_edges(k: int, pts, adj) -> int:
    # internal edges of the k window points closest to the centre; any
    # achievable value is a valid starting incumbent
    order = sorted(range(len(pts)), key=lambda i: (lattice_distance(pts[i]), pts[i][1], pts[i][0]))
    chosen = set(order[:k])
    return sum(1 for i in chosen for j in adj[i] if j in chosen) // 2


def _bnb_task(first: int, k: int, window_radius: int, incumbent: int,
              max_edges_smaller: tuple, budget: int):
    """Branch and bound over k-subsets whose smallest index is ``first``.

    Maximises internal edges (equivalently minimises the boundary).  The
    bound for adding r more points is: edges so far + best possible edges
    among r window points + the r largest counts of already-chosen neighbours
    among the remaining candidates.
    """
    pts, adj = _window(window_radius)
    n = len(pts)
    best = incumbent
    found: list[tuple] = []
    nodes = 0
    chosen = [first]
    in_set = [False] * n
    in_set[first] = True
    touch = [0] * n  # number of chosen neighbours
    for j in adj[first]:
        touch[j] += 1

    def dfs(last: int, edges: int):
        nonlocal best, found, nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(nodes, budget, "boundary branch and bound")
        r = k - len(chosen)
        if r == 0:
            if edges > best:
                best = edges
                found = [tuple(chosen)]
            elif edges == best:
                found.append(tuple(chosen))
            return
        if n - last - 1 < r:
            return
        gains = sorted((touch[j] for j in range(last + 1, n)), reverse=True)[:r]
        if edges + max_edges_smaller[r] + sum(gains) < best:
            return
        for j in range(last + 1, n - r + 1):
            gain = touch[j]
            chosen.append(j)
            in_set[j] = True
            for nb in adj[j]:
                touch[nb] += 1
            dfs(j, edges + gain)
            for nb in adj[j]:
                touch[nb] -= 1
            in_set[j] = False
            chosen.pop()

    dfs(first, 0)
    canon = frozenset(canonicalize(pts[i] for i in c) for c in found)
    return best, canon, nodes


def min_boundary_brute(k: int, window_radius: int, *, node_budget: int = 50_000_000,
                       workers: int = 1) -> BoundaryMinimum:
    """Exact minimum edge boundary over all k-subsets of ``hexagon_ball(window_radius)``.

    Disconnected subsets are included.  Returns every minimiser in
    translation-canonical form.  Work is split by the smallest chosen window
    index; the reduction (max edges, union of witnesses at the max) does not
    depend on the split.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if window_radius < 1:
        raise ValueError("window_radius must be positive")
    pts, adj = _window(window_radius)
    if k > len(pts):
        raise ValueError(f"k={k} exceeds window size {len(pts)}")
    smaller = [0, 0]
    nodes = 0
    for r in range(2, k):
        sub = min_boundary_brute(r, window_radius, node_budget=node_budget, workers=workers)
        smaller.append((6 * r - sub.minimum) // 2)
        nodes += sub.nodes
    smaller = tuple(smaller + [0] * (k + 1 - len(smaller)))
    incumbent = _seed_edges(k, pts, adj)
    task = partial(_bnb_task, k=k, window_radius=window_radius, incumbent=incumbent,
                   max_edges_smaller=smaller, budget=node_budget)
    results = run_tasks(task, range(len(pts) - k + 1), workers)
    best = max(r[0] for r in results)
    witnesses = frozenset().union(*(r[1] for r in results if r[0] == best))
    nodes += sum(r[2] for r in results)
    if nodes > node_budget:
        raise BudgetExceeded(nodes, node_budget, "boundary branch and bound")
    return BoundaryMinimum(k, window_radius, 6 * k - 2 * best, witnesses, nodes)


def min_boundary_enumerate(k: int, window_radius: int, *, node_budget: int = 50_000_000,
                           suffix: int = 5) -> BoundaryMinimum:
    """Independent route: plain enumeration of every k-subset, degree-sum formula.

    No pruning at all.  Subsets are split into a prefix (enumerated in Python)
    and a suffix of up to ``suffix`` indices handled as a numpy block.
    """
    pts, adj = _window(window_radius)
    n = len(pts)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}")
    total = math.comb(n, k)
    if total > node_budget:
        raise BudgetExceeded(total, node_budget, "subset enumeration")
    A = np.zeros((n, n), dtype=np.int8)
    for i, nbrs in enumerate(adj):
        A[i, nbrs] = 1
    s = min(k, suffix)
    p = k - s
    tails = np.array(list(itertools.combinations(range(n), s)), dtype=np.intp).reshape(-1, s)
    tail_edges = np.zeros(len(tails), dtype=np.int32)
    for a, b in itertools.combinations(range(s), 2):
        tail_edges += A[tails[:, a], tails[:, b]]
    best = -1
    hits: list[tuple] = []
    for head in itertools.combinations(range(n), p):
        lo = head[-1] if head else -1
        rows = tails[tails[:, 0] > lo] if head else tails
        te = tail_edges[tails[:, 0] > lo] if head else tail_edges
        if len(rows) == 0:
            continue
        edges = te.astype(np.int32).copy()
        edges += sum(A[a, b] for a, b in itertools.combinations(head, 2))
        for h in head:
            edges += A[h][rows].sum(axis=1)
        top = int(edges.max())
        if top < best:
            continue
        sel = rows[edges == top]
        if top > best:
            best, hits = top, []
        hits.extend(head + tuple(int(v) for v in row) for row in sel)
    witnesses = frozenset(canonicalize(pts[i] for i in c) for c in hits)
    boundary = 6 * k - 2 * best
    return BoundaryMinimum(k, window_radius, boundary, witnesses, total)


def window_stable(k: int, window_radius: int, **kw) -> bool:
    """Re-run at window_radius + 1 and check the minimum does not move."""
    a = min_boundary_brute(k, window_radius, **kw)
    b = min_boundary_brute(k, window_radius + 1, **kw)
    return a.minimum == b.minimum and a.witnesses <= b.witnesses


def extremal_uniqueness(k: int, window_radius: int, *, up_to_symmetry: bool = False,
                        **kw) -> list[PointSet]:
    """All canonical k-point minimisers of the edge boundary, sorted.

    With ``up_to_symmetry`` the list is further quotiented by the 12 lattice
    symmetries, which is easier to read in reports.
    """
    res = min_boundary_brute(k, window_radius, **kw)
    sets = sorted(res.witnesses, key=lambda s: sorted(s))
    if up_to_symmetry:
        return symmetry_classes(sets)
    return sets
