"""Finite groups and triple systems of products (a, b, a*b).

Elements are always dense indices ``0 .. order-1``.  For Z_q^m the index packs
the coordinate vector in base q, coordinate 0 least significant; the JSON
forms use residue arrays instead.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from tripspan.errors import BudgetExceeded

DEFAULT_MEMORY_BUDGET = 50_000_000  # matrix cells


class GroupAxiomError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GroupSpec:
    kind: str  # "cyclic", "power" or "table"
    n: int = 0
    q: int = 0
    m: int = 0
    cayley: np.ndarray | None = field(default=None, repr=False)

    # -- constructors ------------------------------------------------------
    @classmethod
    def cyclic(cls, n: int) -> "GroupSpec":
        if n < 2:
            raise ValueError("cyclic order must be >= 2")
        return cls("cyclic", n=n)

    @classmethod
    def power(cls, q: int, m: int) -> "GroupSpec":
        if q < 2 or m < 1:
            raise ValueError("power group needs q >= 2 and m >= 1")
        return cls("power", q=q, m=m)

    @classmethod
    def table(cls, cayley) -> "GroupSpec":
        """Group from an explicit multiplication table; axioms are checked."""
        t = np.asarray(cayley, dtype=np.int64)
        validate_cayley(t)
        t.flags.writeable = False
        return cls("table", n=len(t), cayley=t)

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """``zn:<n>``, ``zqm:<q>:<m>`` or ``table:<path to JSON>``."""
        head, _, rest = text.partition(":")
        try:
            if head == "zn":
                return cls.cyclic(int(rest))
            if head == "zqm":
                q, m = rest.split(":")
                return cls.power(int(q), int(m))
        except ValueError as exc:
            raise ValueError(f"bad group spec {text!r}: {exc}") from None
        if head == "table":
            with open(rest) as fh:
                doc = json.load(fh)
            if isinstance(doc, dict):
                doc = doc["cayley"]
            return cls.table(doc)
        raise ValueError(f"bad group spec {text!r}; expected zn:N, zqm:Q:M or table:PATH")

    # -- basic structure -----------------------------------------------------
    @property
    def order(self) -> int:
        if self.kind == "power":
            return self.q ** self.m
        return self.n

    @cached_property
    def identity(self) -> int:
        if self.kind == "table":
            return int(np.flatnonzero((self.cayley == np.arange(self.n)).all(axis=1))[0])
        return 0

    @cached_property
    def digits(self) -> np.ndarray:
        """Coordinate matrix (order x m) of a power group."""
        idx = np.arange(self.order, dtype=np.int64)
        return np.stack([(idx // self.q ** i) % self.q for i in range(self.m)], axis=1)

    @property
    def is_abelian(self) -> bool:
        if self.kind == "table":
            return bool((self.cayley == self.cayley.T).all())
        return True

    def check(self, a) -> int:
        a = int(a)
        if not 0 <= a < self.order:
            raise ValueError(f"element {a} out of range for {self.describe()}")
        return a

    def op(self, a: int, b: int) -> int:
        a, b = self.check(a), self.check(b)
        if self.kind == "cyclic":
            return (a + b) % self.n
        if self.kind == "table":
            return int(self.cayley[a, b])
        return self.encode((x + y) % self.q for x, y in zip(self.decode(a), self.decode(b)))

    def op_array(self, a, b) -> np.ndarray:
        """Elementwise product of broadcastable index arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.kind == "cyclic":
            return (a + b) % self.n
        if self.kind == "table":
            return self.cayley[a, b]
        d = (self.digits[a] + self.digits[b]) % self.q
        return d @ (self.q ** np.arange(self.m, dtype=np.int64))

    def inverse(self, a: int) -> int:
        a = self.check(a)
        if self.kind == "cyclic":
            return (-a) % self.n
        if self.kind == "power":
            return self.encode((-x) % self.q for x in self.decode(a))
        return int(np.flatnonzero(self.cayley[a] == self.identity)[0])

    def power_of(self, a: int, e: int) -> int:
        out = self.identity
        for _ in range(e):
            out = self.op(out, a)
        return out

    # -- power-group coordinates ---------------------------------------------
    def encode(self, coords: Iterable[int]) -> int:
        coords = [int(c) % self.q for c in coords]
        if len(coords) != self.m:
            raise ValueError(f"expected {self.m} coordinates")
        return sum(c * self.q ** i for i, c in enumerate(coords))

    def decode(self, a: int) -> tuple[int, ...]:
        a = int(a)
        return tuple((a // self.q ** i) % self.q for i in range(self.m))

    # -- serialisation -------------------------------------------------------
    def element_to_json(self, a: int):
        return list(self.decode(a)) if self.kind == "power" else int(a)

    def element_from_json(self, value) -> int:
        if self.kind == "power":
            if not isinstance(value, (list, tuple)) or len(value) != self.m:
                raise ValueError(f"power element must be a list of {self.m} residues")
            if any(not 0 <= int(v) < self.q for v in value):
                raise ValueError(f"residues must lie in [0, {self.q})")
            return self.encode(value)
        if isinstance(value, (list, tuple)):
            raise ValueError("element must be an integer")
        return self.check(value)

    def to_json(self) -> dict:
        if self.kind == "cyclic":
            return {"kind": "cyclic", "n": self.n}
        if self.kind == "power":
            return {"kind": "power", "q": self.q, "m": self.m}
        return {"kind": "table", "order": self.n, "cayley": self.cayley.tolist()}

    @classmethod
    def from_json(cls, doc: dict) -> "GroupSpec":
        kind = doc.get("kind")
        if kind == "cyclic":
            return cls.cyclic(int(doc["n"]))
        if kind == "power":
            return cls.power(int(doc["q"]), int(doc["m"]))
        if kind == "table":
            return cls.table(doc["cayley"])
        raise ValueError(f"unknown group kind {kind!r}")

    def describe(self) -> str:
        if self.kind == "cyclic":
            return f"Z_{self.n}"
        if self.kind == "power":
            return f"Z_{self.q}^{self.m}"
        return f"table group of order {self.n}"

    def __eq__(self, other):
        if not isinstance(other, GroupSpec):
            return NotImplemented
        if self.kind != other.kind:
            return False
        if self.kind == "table":
            return np.array_equal(self.cayley, other.cayley)
        return (self.n, self.q, self.m) == (other.n, other.q, other.m)

    def __hash__(self):
        return hash((self.kind, self.n, self.q, self.m))


def validate_cayley(t: np.ndarray) -> None:
    """Raise GroupAxiomError unless ``t`` is the table of a group."""
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] < 1:
        raise GroupAxiomError("Cayley table must be a nonempty square matrix")
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise GroupAxiomError("table entries must lie in [0, order)")
    ids = np.flatnonzero((t == np.arange(n)).all(axis=1) & (t.T == np.arange(n)).all(axis=1))
    if len(ids) == 0:
        raise GroupAxiomError("no two-sided identity")
    e = ids[0]
    if not ((t == e).any(axis=1).all() and (t == e).any(axis=0).all()):
        raise GroupAxiomError("some element has no inverse")
    # (ab)c == a(bc) for all triples
    left = t[t, :]
    right = t[np.arange(n)[:, None, None], t[None, :, :]]
    if not np.array_equal(left, right):
        raise GroupAxiomError("operation is not associative")


# ---------------------------------------------------------------------------
# triple systems


@dataclass(frozen=True, eq=False)
class TripleSystem:
    """Ordered pairs (a, b) over a group, each standing for the triple (a, b, a*b).

    Stored as a read-only boolean order x order matrix.
    """

    spec: GroupSpec
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=bool)
        if mat.shape != (self.spec.order, self.spec.order):
            raise ValueError("pair matrix shape does not match group order")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_pairs(cls, spec: GroupSpec, pairs: Iterable[tuple[int, int]]) -> "TripleSystem":
        mat = np.zeros((spec.order, spec.order), dtype=bool)
        for a, b in pairs:
            mat[spec.check(a), spec.check(b)] = True
        return cls(spec, mat)

    @property
    def size(self) -> int:
        return int(self.matrix.sum())

    @property
    def density(self) -> Fraction:
        return Fraction(self.size, self.spec.order ** 2)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(int(a), int(b)) for a, b in np.argwhere(self.matrix)]

    def __contains__(self, pair) -> bool:
        a, b = pair
        return bool(self.matrix[a, b])

    def to_json(self) -> dict:
        e = self.spec.element_to_json
        return {"spec": self.spec.to_json(), "pairs": [[e(a), e(b)] for a, b in self.pairs]}

    @classmethod
    def from_json(cls, doc: dict) -> "TripleSystem":
        spec = GroupSpec.from_json(doc["spec"])
        f = spec.element_from_json
        return cls.from_pairs(spec, ((f(a), f(b)) for a, b in doc["pairs"]))


def group_op(spec: GroupSpec, a: int, b: int) -> int:
    return spec.op(a, b)


def _memory_check(spec: GroupSpec, budget: int) -> None:
    if spec.order ** 2 > budget:
        raise BudgetExceeded(spec.order ** 2, budget, "pair matrix")


def full_system(spec: GroupSpec, *, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> TripleSystem:
    _memory_check(spec, memory_budget)
    return TripleSystem(spec, np.ones((spec.order, spec.order), dtype=bool))


def random_dense(spec: GroupSpec, c, seed: int, *,
                 memory_budget: int = DEFAULT_MEMORY_BUDGET) -> TripleSystem:
    """Keep each pair independently with probability ``c`` (seeded, reproducible)."""
    c = Fraction(c)
    if not 0 < c <= 1:
        raise ValueError("density must lie in (0, 1]")
    _memory_check(spec, memory_budget)
    if c == 1:
        return full_system(spec, memory_budget=memory_budget)
    rng = np.random.default_rng(seed)
    return TripleSystem(spec, rng.random((spec.order, spec.order)) < float(c))


def lower_bound_intervals(n: int) -> tuple[range, range]:
    if n % 8 or n <= 0:
        raise ValueError("n must be a positive multiple of 8")
    return range(n // 8, 2 * n // 8), range(2 * n // 8, 3 * n // 8)


def lower_bound_system(n: int) -> TripleSystem:
    """All pairs from A = [n/8, 2n/8 - 1] x B = [2n/8, 3n/8 - 1] in Z_n.

    A, B and A + B are pairwise disjoint, so any set of pairs spans exactly
    as many elements as its points occupy rows, columns and anti-diagonals.
    """
    A, B = lower_bound_intervals(n)
    return TripleSystem.from_pairs(GroupSpec.cyclic(n), itertools.product(A, B))


def is_degenerate(spec: GroupSpec, a: int, b: int) -> bool:
    return len({a, b, spec.op(a, b)}) < 3


def span_count(S: TripleSystem, T: Iterable[int], *, proper: bool = False) -> int:
    """Pairs (a, b) of S with a, b and a*b all in T.

    ``proper`` drops degenerate triples with fewer than three distinct
    elements.  Pairs forming the same triple as a set are counted separately;
    see ``span_count_as_sets`` for the deduplicated count.
    """
    T = np.array(sorted({S.spec.check(t) for t in T}), dtype=np.int64)
    if len(T) == 0:
        return 0
    mask = _span_mask(S, T, proper)
    return int(mask.sum())


def _span_mask(S: TripleSystem, T: np.ndarray, proper: bool) -> np.ndarray:
    a = T[:, None]
    b = T[None, :]
    prod = S.spec.op_array(a, b)
    mask = S.matrix[np.ix_(T, T)] & np.isin(prod, T)
    if proper:
        mask &= (a != b) & (prod != a) & (prod != b)
    return mask


def spanned_pairs(S: TripleSystem, T: Iterable[int], *, proper: bool = False) -> list[tuple[int, int]]:
    T = np.array(sorted({S.spec.check(t) for t in T}), dtype=np.int64)
    if len(T) == 0:
        return []
    ia, ib = np.nonzero(_span_mask(S, T, proper))
    return [(int(T[i]), int(T[j])) for i, j in zip(ia, ib)]


def span_count_as_sets(S: TripleSystem, T: Iterable[int], *, proper: bool = False) -> int:
    """Like span_count, but triples equal as sets {a, b, a*b} count once."""
    return len({frozenset((a, b, S.spec.op(a, b))) for a, b in spanned_pairs(S, T, proper=proper)})


def spanned_elements(S: TripleSystem, pairs_subset: Iterable[tuple[int, int]]) -> set[int]:
    out = set()
    for a, b in pairs_subset:
        if (a, b) not in S:
            raise ValueError(f"pair {(a, b)} is not in the system")
        out.update((a, b, S.spec.op(a, b)))
    return out


@dataclass(frozen=True)
class MinSpan:
    T: tuple
    size: int
    pairs: tuple
    nodes: int


def min_span_brute(S: TripleSystem, k: int, *, proper: bool = False,
                   node_budget: int = 50_000_000) -> MinSpan:
    """Smallest vertex set spanning at least k triples of S.

    Searches k-subsets of pairs rather than vertex subsets: any T spanning k
    triples contains the elements of some k of them, so the minimum of
    |spanned_elements| over k pairs is exact.  Branch and bound on the size of
    the running union.
    """
    if k < 1:
        raise ValueError("k must be positive")
    spec = S.spec
    pairs = [p for p in S.pairs if not (proper and is_degenerate(spec, *p))]
    if len(pairs) < k:
        raise ValueError(f"system has only {len(pairs)} usable pairs, fewer than k={k}")
    triples = [frozenset((a, b, spec.op(a, b))) for a, b in pairs]
    best_size = 3 * k + 1
    best: tuple = ()
    nodes = 0
    chosen: list[int] = []

    def dfs(start: int, union: frozenset):
        nonlocal best_size, best, nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded(nodes, node_budget, "minimum span search")
        if len(chosen) == k:
            if len(union) < best_size:
                best_size, best = len(union), tuple(chosen)
            return
        if len(union) >= best_size:
            return
        for j in range(start, len(pairs) - (k - len(chosen)) + 1):
            nxt = union | triples[j]
            if len(nxt) >= best_size:
                continue
            chosen.append(j)
            dfs(j + 1, nxt)
            chosen.pop()

    dfs(0, frozenset())
    chosen_pairs = tuple(pairs[j] for j in best)
    T = tuple(sorted(spanned_elements(S, chosen_pairs)))
    return MinSpan(T, len(T), chosen_pairs, nodes)


def verify_lower_bound(n: int, k: int, *, node_budget: int = 50_000_000) -> bool:
    """Every k pairs of ``lower_bound_system(n)`` span at least g(k) elements."""
    from tripspan.extremal import g_exact

    S = lower_bound_system(n)
    pairs = S.pairs
    total = math.comb(len(pairs), k)
    if total > node_budget:
        raise BudgetExceeded(total, node_budget, "pair subsets")
    need = g_exact(k)
    triples = [(a, b, (a + b) % n) for a, b in pairs]
    for combo in itertools.combinations(triples, k):
        if len(set().union(*combo)) < need:
            return False
    return True
