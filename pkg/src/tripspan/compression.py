"""Exhaustive check that arbitrary row/column sets never beat intervals.

For finite A, B in Z, h(A, B, l) is the most points of A x B that l
anti-diagonals can cover.  The check compares it against h(|A|, |B|, l) for
every small instance.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import partial

from tripspan.errors import BudgetExceeded
from tripspan.extremal import h_interval
from tripspan.parallel import chunk, run_tasks


@dataclass(frozen=True)
class SetPairInstance:
    A: frozenset
    B: frozenset
    ell: int

    def __post_init__(self):
        if not self.A or not self.B:
            raise ValueError("A and B must be nonempty")
        if self.ell < 0:
            raise ValueError("ell must be non-negative")


def diagonal_multiplicities(A, B) -> Counter:
    return Counter(x + y for x in A for y in B)


def h_sets_shortcut(inst: SetPairInstance) -> int:
    """Sum of the ``ell`` largest diagonal multiplicities of A x B."""
    counts = sorted(diagonal_multiplicities(inst.A, inst.B).values(), reverse=True)
    return sum(counts[: inst.ell])


def h_sets_brute(inst: SetPairInstance, *, max_diagonals: int = 20) -> int:
    """Literal maximum over every choice of ``ell`` occupied diagonal values."""
    mult = diagonal_multiplicities(inst.A, inst.B)
    values = sorted(mult)
    if len(values) > max_diagonals:
        raise BudgetExceeded(len(values), max_diagonals, "diagonal subsets")
    pick = min(inst.ell, len(values))
    return max(sum(mult[z] for z in combo) for combo in itertools.combinations(values, pick))


def _anchored_subsets(max_coord: int, max_size: int) -> list[tuple[int, ...]]:
    # subsets of {1..max_coord} containing 1: one per translation class
    rest = range(2, max_coord + 1)
    out = []
    for size in range(1, max_size + 1):
        out.extend((1,) + c for c in itertools.combinations(rest, size - 1))
    return out


def _check_block(A_list, B_list, max_ell):
    checked = 0
    bad = []
    for A in A_list:
        for B in B_list:
            mult = diagonal_multiplicities(A, B)
            values = sorted(mult)
            ranked = sorted(mult.values(), reverse=True)
            for ell in range(0, max_ell + 1):
                pick = min(ell, len(values))
                literal = max(sum(mult[z] for z in c) for c in itertools.combinations(values, pick))
                shortcut = sum(ranked[:ell])
                bound = h_interval(len(A), len(B), ell)
                checked += 1
                if literal != shortcut or literal > bound:
                    bad.append({"A": list(A), "B": list(B), "ell": ell,
                                "h_sets": literal, "h_sets_shortcut": shortcut,
                                "h_interval": bound})
    return checked, bad


def verify_compression(max_coord: int, max_size: int, max_ell: int, *,
                       node_budget: int = 50_000_000, workers: int = 1) -> dict:
    """Check h(A, B, l) <= h(|A|, |B|, l) for all small A, B and l.

    A and B range over subsets of {1..max_coord} of size at most ``max_size``,
    taken up to separate translation (the diagonal multiset only depends on
    differences within A and within B), and l over 0..max_ell.  Each instance
    is evaluated twice, by literal diagonal-subset enumeration and by the
    largest-multiplicities shortcut, and the two must agree.
    """
    if min(max_coord, max_size) < 1 or max_ell < 0:
        raise ValueError("parameters must be positive")
    subsets = _anchored_subsets(max_coord, max_size)
    total = len(subsets) ** 2 * (max_ell + 1)
    if total > node_budget:
        raise BudgetExceeded(total, node_budget, "compression instances")
    blocks = chunk(subsets, max(1, workers))
    task = partial(_check_block, B_list=subsets, max_ell=max_ell)
    results = run_tasks(task, blocks, workers)
    counterexamples = sorted((b for _, bad in results for b in bad),
                             key=lambda d: (d["A"], d["B"], d["ell"]))
    return {
        "instances_checked": sum(c for c, _ in results),
        "counterexamples": counterexamples,
        "max_params": {"max_coord": max_coord, "max_size": max_size, "max_ell": max_ell},
    }
