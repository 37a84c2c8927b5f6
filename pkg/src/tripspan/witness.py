"""Explicit witnesses (A, B, P): small vertex sets spanning at least k triples.

The route is: localise a dense triple system to a product of cosets of a
cyclic or Z_q^m subgroup, find a dense pattern there (a homothetic grid for
Z_n, a combinatorial subspace for Z_q^m), read off A, B and P from it, and map
everything back.  The pattern searches are exhaustive and budgeted; when they
come up empty the pipeline raises PatternNotFound rather than guessing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Iterable, Sequence

import numpy as np

from tripspan.errors import BudgetExceeded, PatternNotFound
from tripspan.groups import GroupSpec, TripleSystem, span_count
from tripspan.parallel import run_tasks

VARIANTS = ("sqrt", "k3")


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class Witness:
    spec: GroupSpec
    A: frozenset
    B: frozenset
    P: frozenset
    span: int
    variant: str = ""
    pairs: tuple = field(default=(), repr=False)  # the spanned (a, b), sorted

    @property
    def size_total(self) -> int:
        return len(self.A) + len(self.B) + len(self.P)

    @property
    def vertices(self) -> frozenset:
        return self.A | self.B | self.P


def witness_pairs(spec: GroupSpec, A, B, P, system: TripleSystem | None = None) -> list[tuple[int, int]]:
    """Pairs (a, b) in A x B with a*b in P, restricted to ``system`` if given."""
    A_arr = np.array(sorted(A), dtype=np.int64)
    B_arr = np.array(sorted(B), dtype=np.int64)
    if len(A_arr) == 0 or len(B_arr) == 0:
        return []
    prod = spec.op_array(A_arr[:, None], B_arr[None, :])
    mask = np.isin(prod, np.array(sorted(P), dtype=np.int64))
    if system is not None:
        mask &= system.matrix[np.ix_(A_arr, B_arr)]
    ia, ib = np.nonzero(mask)
    return [(int(A_arr[i]), int(B_arr[j])) for i, j in zip(ia, ib)]


def make_witness(spec: GroupSpec, A, B, P, *, variant: str = "",
                 system: TripleSystem | None = None) -> Witness:
    A, B, P = frozenset(A), frozenset(B), frozenset(P)
    pairs = witness_pairs(spec, A, B, P, system)
    return Witness(spec, A, B, P, len(pairs), variant, tuple(pairs))


# ---------------------------------------------------------------------------
# coset localisation


@dataclass(frozen=True)
class Localization:
    ell: int
    r: int
    embedding: tuple  # embedding[i] = element of the big group for model index i
    system: TripleSystem  # S' over the model group

    def pull_back(self, w: Witness, big: TripleSystem) -> Witness:
        """(A, B, P) over S'  ->  (ell*A, B*r, ell*P*r) over S."""
        spec = big.spec
        emb = self.embedding
        A = {spec.op(self.ell, emb[a]) for a in w.A}
        B = {spec.op(emb[b], self.r) for b in w.B}
        P = {spec.op(spec.op(self.ell, emb[p]), self.r) for p in w.P}
        return make_witness(spec, A, B, P, variant=w.variant, system=big)


def check_subgroup(spec: GroupSpec, G: Sequence[int]) -> None:
    elems = set(G)
    if len(elems) != len(G):
        raise ValueError("subgroup elements must be distinct")
    if spec.identity not in elems:
        raise ValueError("subgroup must contain the identity")
    for a in elems:
        if spec.inverse(a) not in elems:
            raise ValueError("subgroup not closed under inverses")
        for b in elems:
            if spec.op(a, b) not in elems:
                raise ValueError("subgroup not closed under the product")


def coset_localize(S: TripleSystem, G: Sequence[int], model: GroupSpec | None = None) -> Localization:
    """Pick cosets ell*G x G*r holding the most pairs of S and restrict S to them.

    ``G`` lists the subgroup; when ``model`` is given, ``G[i]`` must be the
    image of model element ``i`` under an isomorphism, and the localised
    system S' = {(a, b) : (ell*G[a], G[b]*r) in S} lives over ``model``.
    Otherwise a Cayley table for G (in the listed order) is built.  By
    averaging over the |Gamma/G|^2 coset cells, S' is at least as dense as S.
    """
    spec = S.spec
    G = [spec.check(g) for g in G]
    check_subgroup(spec, G)
    if model is None:
        pos = {g: i for i, g in enumerate(G)}
        model = GroupSpec.table([[pos[spec.op(a, b)] for b in G] for a in G])
    if model.order != len(G):
        raise ValueError("model order does not match subgroup size")
    for i in range(model.order):
        for j in range(model.order):
            if G[model.op(i, j)] != spec.op(G[i], G[j]):
                raise ValueError("embedding is not a homomorphism from the model group")

    n = spec.order
    Garr = np.array(G, dtype=np.int64)
    left_label = np.full(n, -1, dtype=np.int64)  # coset x*G -> smallest member
    right_label = np.full(n, -1, dtype=np.int64)  # coset G*x -> smallest member
    for x in range(n):
        if left_label[x] < 0:
            left_label[spec.op_array(x, Garr)] = x
        if right_label[x] < 0:
            right_label[spec.op_array(Garr, x)] = x
    lreps = np.unique(left_label)
    rreps = np.unique(right_label)
    lpos = np.searchsorted(lreps, left_label)
    rpos = np.searchsorted(rreps, right_label)
    counts = np.zeros((len(lreps), len(rreps)), dtype=np.int64)
    for a in range(n):
        row = S.matrix[a]
        if row.any():
            counts[lpos[a]] += np.bincount(rpos[row], minlength=len(rreps))
    # argmax over row-major order = smallest (ell, r) among maximisers
    i, j = np.unravel_index(int(np.argmax(counts)), counts.shape)
    ell, r = int(lreps[i]), int(rreps[j])
    rows = spec.op_array(ell, Garr)
    cols = spec.op_array(Garr, r)
    sub = TripleSystem(model, S.matrix[np.ix_(rows, cols)])
    return Localization(ell, r, tuple(G), sub)


def subgroup_from_generators(spec: GroupSpec, gens: Sequence[int]) -> tuple[GroupSpec, list[int]]:
    """Model group and embedding for <g> (one generator) or <g_1,...,g_m> ~ Z_q^m.

    Several generators must commute and share one order q; the embedding of
    coordinate vector c is g_1^c_1 ... g_m^c_m and must be injective.
    """
    gens = [spec.check(g) for g in gens]
    if not gens:
        raise ValueError("need at least one generator")
    orders = []
    for g in gens:
        x, o = g, 1
        while x != spec.identity:
            x = spec.op(x, g)
            o += 1
        orders.append(o)
    if len(gens) == 1:
        q = orders[0]
        if q < 2:
            raise ValueError("generator must not be the identity")
        model = GroupSpec.cyclic(q)
        return model, [spec.power_of(gens[0], i) for i in range(q)]
    q = orders[0]
    if any(o != q for o in orders) or q < 2:
        raise ValueError("generators of a Z_q^m subgroup must share one order q >= 2")
    for g, h in itertools.combinations(gens, 2):
        if spec.op(g, h) != spec.op(h, g):
            raise ValueError("generators must commute")
    model = GroupSpec.power(q, len(gens))
    emb = []
    for idx in range(model.order):
        x = spec.identity
        for g, c in zip(gens, model.decode(idx)):
            x = spec.op(x, spec.power_of(g, c))
        emb.append(x)
    if len(set(emb)) != len(emb):
        raise ValueError("generators are not independent")
    return model, emb


# ---------------------------------------------------------------------------
# homothetic grids in C subset of [n]^2


@dataclass(frozen=True)
class GridPattern:
    s: tuple
    t: int
    h: int
    w: int = 0  # second side; 0 means square

    @property
    def width(self) -> int:
        return self.w or self.h

    def points(self) -> list[tuple[int, int]]:
        return [(self.s[0] + self.t * i, self.s[1] + self.t * j)
                for i in range(1, self.h + 1) for j in range(1, self.width + 1)]


def _as_grid(C, n: int | None) -> np.ndarray:
    """Boolean array M with M[x-1, y-1] <=> (x, y) in C."""
    if isinstance(C, np.ndarray):
        M = np.asarray(C, dtype=bool)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("grid array must be square")
        return M
    C = list(C)
    if n is None:
        n = max((max(x, y) for x, y in C), default=0)
    M = np.zeros((n, n), dtype=bool)
    for x, y in C:
        if not (1 <= x <= n and 1 <= y <= n):
            raise ValueError(f"point {(x, y)} outside [{n}]^2")
        M[x - 1, y - 1] = True
    return M


def _grid_hits(M: np.ndarray, t: int, h: int, w: int):
    n = M.shape[0]
    L1, L2 = n - t * h, n - t * w
    if L1 < 1 or L2 < 1:
        return None
    rows = np.ones((L1, n), dtype=bool)
    for i in range(1, h + 1):
        # point s1 + t*i sits at array row (s1 - 1) + t*i
        rows &= M[t * i: t * i + L1, :]
    ok = np.ones((L1, L2), dtype=bool)
    for j in range(1, w + 1):
        ok &= rows[:, t * j: t * j + L2]
    flat = np.flatnonzero(ok)
    if len(flat) == 0:
        return None
    u, v = divmod(int(flat[0]), L2)
    return (t, u + 1, v + 1)


def _grid_task(ts, M, h, w):
    for t in ts:
        hit = _grid_hits(M, t, h, w)
        if hit:
            return hit
    return None


def grid_pattern_search(C, h: int, *, width: int | None = None, n: int | None = None,
                        workers: int = 1, node_budget: int = 50_000_000) -> GridPattern | None:
    """First (s, t) with s + t*([h] x [width]) inside C, or None.

    Search order is increasing t, then lexicographic s, with s ranging over
    [n]^2.  Each t is one pass of row-wise then column-wise boolean
    intersections over the whole grid.  With several workers the t-range is
    split into chunks and the smallest (t, s) hit wins, so the answer never
    depends on scheduling.
    """
    if h < 1:
        raise ValueError("h must be positive")
    w = width or h
    M = _as_grid(C, n)
    size = M.shape[0]
    t_max = (size - 1) // max(h, w) if size > 1 else 0
    if t_max * size * size * (h + w) > node_budget:
        raise BudgetExceeded(t_max * size * size * (h + w), node_budget, "grid pattern search")
    ts = list(range(1, t_max + 1))
    if workers > 1 and size * size * len(ts) > 4_000_000:
        blocks = [ts[i::workers] for i in range(workers) if ts[i::workers]]
        hits = [x for x in run_tasks(partial(_grid_task, M=M, h=h, w=w), blocks, workers) if x]
        hit = min(hits) if hits else None
    else:
        hit = _grid_task(ts, M, h, w)
    if hit is None:
        return None
    t, s1, s2 = hit
    return GridPattern((s1, s2), t, h, 0 if w == h else w)


def grid_pattern_naive(C, h: int, *, width: int | None = None, n: int | None = None):
    """Reference quadruple loop with the same search order."""
    w = width or h
    M = _as_grid(C, n)
    size = M.shape[0]
    for t in range(1, size + 1):
        for s1 in range(1, size + 1):
            for s2 in range(1, size + 1):
                if s1 + t * h > size or s2 + t * w > size:
                    continue
                if all(M[s1 + t * i - 1, s2 + t * j - 1]
                       for i in range(1, h + 1) for j in range(1, w + 1)):
                    return GridPattern((s1, s2), t, h, 0 if w == h else w)
    return None


# ---------------------------------------------------------------------------
# Case 1: cyclic groups


def case1_sqrt(s, t: int, k: int, n: int, system: TripleSystem | None = None) -> Witness:
    """A = s1 + t[h], B = s2 + t[h] with h = ceil(sqrt k), P = A + B (mod n)."""
    if k < 3:
        raise ValueError("k must be >= 3")
    h = math.isqrt(k - 1) + 1
    A = {(s[0] + t * i) % n for i in range(1, h + 1)}
    B = {(s[1] + t * j) % n for j in range(1, h + 1)}
    P = {(a + b) % n for a in A for b in B}
    return make_witness(GroupSpec.cyclic(n), A, B, P, variant="sqrt", system=system)


def case1_k3(s, t: int, k: int, n: int, system: TripleSystem | None = None) -> Witness:
    """A = s1 + t[ceil(k/2)], B = {s2 + t, s2 + 2t}; for odd k the top sum leaves P."""
    if k < 3:
        raise ValueError("k must be >= 3")
    h = -(-k // 2)
    A_z = [s[0] + t * i for i in range(1, h + 1)]
    B_z = [s[1] + t, s[1] + 2 * t]
    P_z = {a + b for a in A_z for b in B_z}
    if k % 2:
        P_z.discard(s[0] + h * t + s[1] + 2 * t)
    return make_witness(GroupSpec.cyclic(n), {a % n for a in A_z}, {b % n for b in B_z},
                        {p % n for p in P_z}, variant="k3", system=system)


# ---------------------------------------------------------------------------
# Case 2: Z_q^m


def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % p for p in range(2, math.isqrt(q) + 1))


def independent(vectors: Sequence[Sequence[int]], q: int) -> bool:
    """True when sum(l_i * v_i) = 0 over Z_q forces every l_i = 0."""
    vecs = [[int(c) % q for c in v] for v in vectors]
    r = len(vecs)
    if r == 0:
        return True
    if _is_prime(q):
        rows = [v[:] for v in vecs]
        rank, width = 0, len(rows[0])
        for col in range(width):
            piv = next((i for i in range(rank, r) if rows[i][col]), None)
            if piv is None:
                continue
            rows[rank], rows[piv] = rows[piv], rows[rank]
            inv = pow(rows[rank][col], -1, q)
            rows[rank] = [(x * inv) % q for x in rows[rank]]
            for i in range(r):
                if i != rank and rows[i][col]:
                    f = rows[i][col]
                    rows[i] = [(x - f * y) % q for x, y in zip(rows[i], rows[rank])]
            rank += 1
        return rank == r
    if q ** r > 2_000_000:
        raise BudgetExceeded(q ** r, 2_000_000, "independence check")
    V = np.array(vecs, dtype=np.int64)
    for lam in itertools.product(range(q), repeat=r):
        if any(lam) and not ((np.array(lam) @ V) % q).any():
            return False
    return True


def triplewise_independent(vectors: Sequence[Sequence[int]], q: int) -> bool:
    """Every choice of at most three of the vectors is independent."""
    vecs = list(vectors)
    if len(vecs) <= 3:
        return independent(vecs, q)
    return all(independent(c, q) for c in itertools.combinations(vecs, 3))


def sqrt_parameters(q: int, k: int) -> tuple[int, int]:
    """(d, t): largest d with q^(2d) <= k, then least t with t^2 q^(2d) >= k.

    1 <= t <= q always holds; t = q is possible (e.g. q = 2, k = 3).
    """
    d = 0
    while q ** (2 * (d + 1)) <= k:
        d += 1
    t = 1
    while t * t * q ** (2 * d) < k:
        t += 1
    assert 1 <= t <= q, (q, k, d, t)
    return d, t


def k3_parameters(q: int, k: int) -> tuple[int, int]:
    """(h, t) = (floor(k / (2q - 1)), ceil((k - h(2q - 1)) / 2))."""
    h = k // (2 * q - 1)
    t = -(-(k - h * (2 * q - 1)) // 2)
    return h, t


def directions_needed(q: int, k: int, variant: str) -> int:
    if variant == "sqrt":
        d, t = sqrt_parameters(q, k)
        return d + (1 if t > 1 else 0)
    h, t = k3_parameters(q, k)
    return h + (1 if t >= 1 else 0)


def _coords(spec: GroupSpec, v) -> tuple[int, ...]:
    if isinstance(v, (int, np.integer)):
        return spec.decode(int(v))
    v = tuple(int(c) % spec.q for c in v)
    if len(v) != spec.m:
        raise ValueError(f"expected {spec.m} coordinates")
    return v


def _combine(spec: GroupSpec, base, terms) -> int:
    """Index of base + sum(coef * vec) in Z_q^m."""
    acc = list(base)
    for coef, vec in terms:
        for i, c in enumerate(vec):
            acc[i] += coef * c
    return spec.encode(acc)


def case2_sqrt(q: int, m: int, basis, a_hat, b_hat, k: int,
               system: TripleSystem | None = None) -> Witness:
    """A = a_hat + W', B = b_hat + W', P = A + B, with |W'| = t q^d.

    W' takes all Z_q-combinations of the first d basis vectors plus 0..t-1
    times the next one.
    """
    if k < 3:
        raise ValueError("k must be >= 3")
    spec = GroupSpec.power(q, m)
    d, t = sqrt_parameters(q, k)
    need = d + (1 if t > 1 else 0)
    basis = [_coords(spec, u) for u in basis]
    if len(basis) < need:
        raise ValueError(f"need {need} basis vectors, got {len(basis)}")
    if not independent(basis[:need], q):
        raise ValueError("basis vectors are not independent over Z_q")
    ranges = [range(q)] * d + [range(t)]
    W = []
    for lam in itertools.product(*ranges):
        terms = list(zip(lam[:d], basis[:d]))
        if t > 1:
            terms.append((lam[d], basis[d]))
        W.append(terms)
    a0, b0 = _coords(spec, a_hat), _coords(spec, b_hat)
    A = {_combine(spec, a0, w) for w in W}
    B = {_combine(spec, b0, w) for w in W}
    P = set(spec.op_array(np.array(sorted(A))[:, None], np.array(sorted(B))[None, :]).ravel().tolist())
    return make_witness(spec, A, B, P, variant="sqrt", system=system)


def case2_k3(q: int, m: int, basis, a_hat, b_hat, k: int,
             system: TripleSystem | None = None) -> Witness:
    """Lines through a_hat along u_1..u_h (full) and u_{h+1} (t points); |A|+|B|+|P| = k + 3.

    B = b_hat + {0, u_1, ..., u_{h+1}} and P is the matching set of sums, with
    t*u_{h+1} removed when k - h(2q - 1) is odd.  When t = 0 the unused
    u_{h+1} is dropped from B so the sizes still total k + 3 (span k + 1).

    Only triplewise independence of the directions is required: it already
    keeps the lines apart and rules out stray sums landing in P.
    """
    if k < 3:
        raise ValueError("k must be >= 3")
    spec = GroupSpec.power(q, m)
    h, t = k3_parameters(q, k)
    need = h + (1 if t >= 1 else 0)
    basis = [_coords(spec, u) for u in basis]
    if len(basis) < need:
        raise ValueError(f"insufficient basis vectors: need {need}, got {len(basis)}")
    if not triplewise_independent(basis[:need], q):
        raise ValueError("basis vectors are not (triplewise) independent over Z_q")
    a0, b0 = _coords(spec, a_hat), _coords(spec, b_hat)
    ab0 = tuple((x + y) % q for x, y in zip(a0, b0))
    A = {_combine(spec, a0, [(lam, basis[i])]) for i in range(h) for lam in range(q)}
    B = {_combine(spec, b0, [])} | {_combine(spec, b0, [(1, basis[i])]) for i in range(h)}
    P = {_combine(spec, ab0, [(lam, basis[i])]) for i in range(h) for lam in range(q)}
    if t >= 1:
        u = basis[h]
        A |= {_combine(spec, a0, [(lam, u)]) for lam in range(t)}
        B.add(_combine(spec, b0, [(1, u)]))
        top = t if (k - h * (2 * q - 1)) % 2 == 0 else t - 1
        P |= {_combine(spec, ab0, [(lam, u)]) for lam in range(top + 1)}
    else:
        A.add(_combine(spec, a0, []))
        P.add(_combine(spec, ab0, []))
    return make_witness(spec, A, B, P, variant="k3", system=system)


# ---------------------------------------------------------------------------
# combinatorial subspaces of V^m, V = Z_q x Z_q


@dataclass(frozen=True)
class SubspacePartition:
    fixed_blocks: tuple  # sorted ((symbol, frozenset(indices)), ...), symbol = (e1, e2)
    wildcard_blocks: tuple  # (frozenset, ...)

    @classmethod
    def from_labels(cls, labels: Sequence, d: int) -> "SubspacePartition":
        """labels[i] is a symbol (e1, e2) or a wildcard number 0..d-1."""
        fixed: dict = {}
        wild = [set() for _ in range(d)]
        for i, lab in enumerate(labels):
            if isinstance(lab, tuple):
                fixed.setdefault(lab, set()).add(i)
            else:
                wild[lab].add(i)
        return cls(tuple(sorted((s, frozenset(ix)) for s, ix in fixed.items())),
                   tuple(frozenset(w) for w in wild))

    def validate(self, q: int, m: int) -> None:
        seen: list[int] = []
        for (e1, e2), ix in self.fixed_blocks:
            if not (0 <= e1 < q and 0 <= e2 < q):
                raise ValueError(f"symbol {(e1, e2)} outside Z_{q} x Z_{q}")
            seen.extend(ix)
        if not self.wildcard_blocks:
            raise ValueError("at least one wildcard block is required")
        for w in self.wildcard_blocks:
            if not w:
                raise ValueError("wildcard blocks must be nonempty")
            seen.extend(w)
        if sorted(seen) != list(range(m)):
            raise ValueError("blocks must partition the coordinates 0..m-1")

    def to_json(self) -> dict:
        return {"fixed_blocks": [[list(s), sorted(ix)] for s, ix in self.fixed_blocks],
                "wildcard_blocks": [sorted(w) for w in self.wildcard_blocks]}


def cube_from_sequences(seqs: Iterable, q: int, m: int) -> np.ndarray:
    """Boolean matrix C[a, b] from sequences ((a_1, b_1), ..., (a_m, b_m))."""
    spec = GroupSpec.power(q, m)
    C = np.zeros((spec.order, spec.order), dtype=bool)
    for x in seqs:
        C[spec.encode(p[0] for p in x), spec.encode(p[1] for p in x)] = True
    return C


def cube_from_system(S: TripleSystem) -> np.ndarray:
    """C contains ((a_i, b_i))_i exactly when (a, b) is a pair of S."""
    if S.spec.kind != "power":
        raise ValueError("subspace search needs a Z_q^m system")
    return S.matrix


def subspace_points(part: SubspacePartition, q: int, m: int) -> list[tuple[int, int]]:
    """All (a, b) index pairs of the combinatorial subspace, q^(2d) of them."""
    spec = GroupSpec.power(q, m)
    a = [0] * m
    b = [0] * m
    for (e1, e2), ix in part.fixed_blocks:
        for i in ix:
            a[i], b[i] = e1, e2
    out = []
    syms = [(x, y) for x in range(q) for y in range(q)]
    for assign in itertools.product(syms, repeat=len(part.wildcard_blocks)):
        for (x, y), w in zip(assign, part.wildcard_blocks):
            for i in w:
                a[i], b[i] = x, y
        out.append((spec.encode(a), spec.encode(b)))
    return out


def comb_subspace_verify(C, part: SubspacePartition, d: int, *, q: int, m: int) -> bool:
    part.validate(q, m)
    if len(part.wildcard_blocks) != d:
        raise ValueError(f"partition has {len(part.wildcard_blocks)} wildcard blocks, expected {d}")
    M = C if isinstance(C, np.ndarray) else cube_from_sequences(C, q, m)
    return all(M[a, b] for a, b in subspace_points(part, q, m))


def _canonical_labelings(q: int, m: int, d: int):
    # fixed symbols first (lexicographic), then wildcards 0..d-1; wildcard i
    # must first appear before wildcard i+1 and all must appear
    syms = [(x, y) for x in range(q) for y in range(q)]
    labels = syms + list(range(d))
    for lab in itertools.product(labels, repeat=m):
        nxt = 0
        ok = True
        for v in lab:
            if isinstance(v, int):
                if v > nxt:
                    ok = False
                    break
                if v == nxt:
                    nxt += 1
        if ok and nxt == d:
            yield lab


def comb_subspace_find(C, q: int, m: int, d: int, *,
                       node_budget: int = 50_000_000) -> SubspacePartition | None:
    """First partition, in canonical label order, whose d-dim subspace lies in C."""
    if d < 1 or d > m:
        raise ValueError("need 1 <= d <= m")
    cost = (q * q + d) ** m * (q * q) ** d
    if cost > node_budget:
        raise BudgetExceeded(cost, node_budget, "combinatorial subspace search")
    M = C if isinstance(C, np.ndarray) else cube_from_sequences(C, q, m)
    if not M.any():
        return None
    for lab in _canonical_labelings(q, m, d):
        part = SubspacePartition.from_labels(lab, d)
        if all(M[a, b] for a, b in subspace_points(part, q, m)):
            return part
    return None


def subspace_to_shift_and_basis(part: SubspacePartition, q: int, m: int):
    """(a_hat, b_hat, [u_1..u_d]) as coordinate tuples.

    a_hat / b_hat carry the first / second symbol coordinate on fixed blocks
    and 0 on wildcard blocks; u_i is the indicator vector of W_i.
    """
    part.validate(q, m)
    a = [0] * m
    b = [0] * m
    for (e1, e2), ix in part.fixed_blocks:
        for i in ix:
            a[i], b[i] = e1, e2
    basis = [tuple(1 if j in w else 0 for j in range(m)) for w in part.wildcard_blocks]
    return tuple(a), tuple(b), basis


# ---------------------------------------------------------------------------
# end-to-end pipeline


@dataclass(frozen=True)
class PipelineConfig:
    subgroup: tuple | None = None  # generators of a cyclic / Z_q^m subgroup
    node_budget: int = 50_000_000
    workers: int = 1


@dataclass(frozen=True)
class PipelineResult:
    T: tuple
    witness: Witness
    certificate: dict
    pullback: tuple  # (ell, r)
    route: str


def _case1_on(S: TripleSystem, k: int, variant: str, cfg: PipelineConfig) -> Witness:
    # pattern confined to [n/8, 2n/8) x [2n/8, 3n/8) so A, B, A+B stay disjoint
    n = S.spec.order
    alpha = n // 8
    if alpha < 1:
        raise PatternNotFound(f"Z_{n} is too small to host a disjoint pattern")
    # grid coordinate 1 is padding: s >= 1 and offsets >= 1 put patterns at >= 2
    M = np.zeros((alpha + 1, alpha + 1), dtype=bool)
    M[1:, 1:] = S.matrix[alpha:2 * alpha, 2 * alpha:3 * alpha]
    if variant == "sqrt":
        h, w = math.isqrt(k - 1) + 1, None
    else:
        h, w = -(-k // 2), 2
    pat = grid_pattern_search(M, h, width=w, workers=cfg.workers, node_budget=cfg.node_budget)
    if pat is None:
        raise PatternNotFound(f"no {h}x{w or h} homothetic grid in the localised set")
    s = (alpha + pat.s[0] - 2, 2 * alpha + pat.s[1] - 2)
    build = case1_sqrt if variant == "sqrt" else case1_k3
    return build(s, pat.t, k, n, system=S)


def cap_directions(q: int, m: int, count: int) -> list[tuple[int, ...]]:
    """``count`` vectors of Z_q^m, every three independent.

    The standard basis when it is large enough, otherwise a greedy scan in
    index order.
    """
    spec = GroupSpec.power(q, m)
    if count <= m:
        return [tuple(1 if j == i else 0 for j in range(m)) for i in range(count)]
    chosen: list[tuple[int, ...]] = []
    for idx in range(1, spec.order):
        v = spec.decode(idx)
        if all(independent([v] + list(c), q)
               for r in (0, 1, 2) for c in itertools.combinations(chosen, r)):
            chosen.append(v)
            if len(chosen) == count:
                return chosen
    raise PatternNotFound(f"Z_{q}^{m} has no {count} triplewise independent directions")


def _disjoint_shifts(spec: GroupSpec, OA, OB, OP):
    """Smallest (a_hat, b_hat) making a_hat+OA, b_hat+OB, a_hat+b_hat+OP disjoint."""
    OA, OB, OP = (np.array(sorted(x), dtype=np.int64) for x in (OA, OB, OP))
    neg = np.array([spec.inverse(x) for x in range(spec.order)], dtype=np.int64)
    diff = lambda X, Y: set(spec.op_array(X[:, None], neg[Y][None, :]).ravel().tolist())
    bad_a = diff(OB, OP)  # a_hat in OB - OP  =>  B meets P
    bad_b = diff(OA, OP)  # b_hat in OA - OP  =>  A meets P
    bad_ab = diff(OB, OA)  # a_hat - b_hat in OB - OA  =>  A meets B
    for a in range(spec.order):
        if a in bad_a:
            continue
        for b in range(spec.order):
            if b not in bad_b and spec.op(a, neg[b]) not in bad_ab:
                return a, b
    return None


def _case2_on(S: TripleSystem, k: int, variant: str, cfg: PipelineConfig) -> Witness:
    spec = S.spec
    q, m = spec.q, spec.m
    need = directions_needed(q, k, variant)
    build = case2_sqrt if variant == "sqrt" else case2_k3
    zero = (0,) * m
    if S.matrix.all():
        if variant == "sqrt" and need > m:
            raise PatternNotFound(f"Z_{q}^{m} has fewer than {need} independent directions")
        basis = cap_directions(q, m, need)
        # built at the origin, A / B / P are offsets from a_hat / b_hat / a_hat + b_hat
        origin = build(q, m, basis, zero, zero, k)
        shifts = _disjoint_shifts(spec, origin.A, origin.B, origin.P)
        if shifts is None:
            raise PatternNotFound("no shifts keep A, B and P disjoint")
        a_hat, b_hat = shifts
        return build(q, m, basis, a_hat, b_hat, k, system=S)
    part = comb_subspace_find(cube_from_system(S), q, m, max(need, 1), node_budget=cfg.node_budget)
    if part is None:
        raise PatternNotFound(f"no {need}-dimensional combinatorial subspace")
    a_hat, b_hat, basis = subspace_to_shift_and_basis(part, q, m)
    return build(q, m, basis, a_hat, b_hat, k, system=S)


def witness_pipeline(S: TripleSystem, k: int, variant: str,
                     config: PipelineConfig | None = None) -> PipelineResult:
    """Localise, search, construct, pull back and certify a witness for k triples."""
    cfg = config or PipelineConfig()
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if k < 3:
        raise ValueError("k must be >= 3")
    spec = S.spec
    if cfg.subgroup:
        model, emb = subgroup_from_generators(spec, cfg.subgroup)
        loc = coset_localize(S, emb, model)
    elif spec.kind == "table":
        raise ValueError("table groups need a cyclic or Z_q^m subgroup (config.subgroup)")
    else:
        loc = Localization(spec.identity, spec.identity, tuple(range(spec.order)), S)
    inner = loc.system
    if inner.spec.kind == "cyclic":
        w_inner, route = _case1_on(inner, k, variant, cfg), "homothetic-grid"
    else:
        w_inner, route = _case2_on(inner, k, variant, cfg), "subspace"
    w = loc.pull_back(w_inner, S) if cfg.subgroup else w_inner
    limit = k + 3 if variant == "k3" else math.ceil(8 * math.sqrt(k))
    if w.span < k:
        raise PatternNotFound(f"witness spans only {w.span} < {k} triples")
    if w.size_total > limit:
        raise PatternNotFound(f"witness size {w.size_total} exceeds {limit}")
    T = tuple(sorted(w.vertices))
    cert_pairs = certificate_pairs(w, k)
    certificate = {
        "k": k,
        "pairs": [[spec.element_to_json(a), spec.element_to_json(b)] for a, b in cert_pairs],
        "span_count": span_count(S, T),
        "proper_span_count": span_count(S, T, proper=True),
        "vertex_count": len(T),
        "limit": limit,
    }
    if certificate["span_count"] < k:
        raise AssertionError("certified span below k; construction bug")
    return PipelineResult(T, w, certificate, (loc.ell, loc.r), route)


def certificate_pairs(w: Witness, k: int) -> list[tuple[int, int]]:
    """k witnessing pairs, non-degenerate ones first, then by index."""
    spec = w.spec
    key = lambda p: (len({p[0], p[1], spec.op(*p)}) < 3, p)
    return sorted(sorted(w.pairs, key=key)[:k])


def witness_to_json(res: PipelineResult) -> dict:
    w = res.witness
    e = w.spec.element_to_json
    return {
        "group": w.spec.to_json(),
        "variant": w.variant,
        "A": [e(x) for x in sorted(w.A)],
        "B": [e(x) for x in sorted(w.B)],
        "P": [e(x) for x in sorted(w.P)],
        "span": w.span,
        "size_total": w.size_total,
        "pullback": {"ell": e(res.pullback[0]), "r": e(res.pullback[1])},
        "route": res.route,
        "certificate": res.certificate,
    }


def recheck_witness(doc: dict, system: TripleSystem | None = None) -> dict:
    """Standalone re-verification of an emitted witness document.

    Recomputes the span of (A, B, P) and checks each certificate pair against
    the system (the full system of the stated group when none is given).
    """
    spec = GroupSpec.from_json(doc["group"])
    if system is not None and system.spec != spec:
        raise ValueError("system group does not match the witness")
    f = spec.element_from_json
    A = {f(x) for x in doc["A"]}
    B = {f(x) for x in doc["B"]}
    P = {f(x) for x in doc["P"]}
    prods = {spec.op(a, b) for a in A for b in B}
    if not P <= prods:
        raise ValueError("P is not contained in A*B")
    pairs = witness_pairs(spec, A, B, P, system)
    cert = [(f(a), f(b)) for a, b in doc["certificate"]["pairs"]]
    for a, b in cert:
        if a not in A or b not in B or spec.op(a, b) not in P:
            raise ValueError(f"certificate pair {(a, b)} does not fit (A, B, P)")
        if system is not None and (a, b) not in system:
            raise ValueError(f"certificate pair {(a, b)} is not in the system")
    if len(set(cert)) != len(cert):
        raise ValueError("duplicate certificate pairs")
    T = A | B | P
    S = system
    if S is None:
        S = TripleSystem(spec, np.ones((spec.order, spec.order), dtype=bool))
    return {
        "span": len(pairs),
        "size_total": len(A) + len(B) + len(P),
        "certified_pairs": len(cert),
        "span_count": span_count(S, T),
        "ok": len(pairs) == doc["span"] and len(A) + len(B) + len(P) == doc["size_total"]
        and len(cert) >= doc["certificate"]["k"] and span_count(S, T) >= len(cert),
    }
