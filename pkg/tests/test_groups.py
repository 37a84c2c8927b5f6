import itertools
import json
import math

import numpy as np
import pytest
from conftest import cyclic_table, dihedral_table
from hypothesis import given, settings
from hypothesis import strategies as st

from tripspan.errors import BudgetExceeded
from tripspan.extremal import g_exact
from tripspan.groups import (
    GroupAxiomError,
    GroupSpec,
    TripleSystem,
    full_system,
    group_op,
    is_degenerate,
    lower_bound_intervals,
    lower_bound_system,
    min_span_brute,
    random_dense,
    span_count,
    span_count_as_sets,
    spanned_elements,
    spanned_pairs,
    validate_cayley,
    verify_lower_bound,
)
from tripspan.lattice import g_of_set


def test_group_op_examples():
    assert group_op(GroupSpec.cyclic(5), 3, 4) == 2
    Z = GroupSpec.power(3, 2)
    assert Z.decode(group_op(Z, Z.encode((1, 2)), Z.encode((2, 2)))) == (0, 1)
    T = GroupSpec.table(dihedral_table(4))
    assert all(group_op(T, T.identity, a) == a == group_op(T, a, T.identity) for a in range(8))


def test_element_range_checked():
    with pytest.raises(ValueError):
        GroupSpec.cyclic(5).op(5, 0)
    with pytest.raises(ValueError):
        GroupSpec.power(3, 2).element_from_json([0, 3])
    with pytest.raises(ValueError):
        GroupSpec.power(3, 2).element_from_json([0])


@pytest.mark.parametrize("spec", [GroupSpec.cyclic(7), GroupSpec.power(3, 2),
                                  GroupSpec.power(2, 3), GroupSpec.table(dihedral_table(3))])
def test_group_axioms_hold(spec):
    n = spec.order
    e = spec.identity
    for a in range(n):
        assert spec.op(a, spec.inverse(a)) == e == spec.op(spec.inverse(a), a)
    for a, b, c in itertools.product(range(n), repeat=3):
        assert spec.op(spec.op(a, b), c) == spec.op(a, spec.op(b, c))
    a, b = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    want = np.array([[spec.op(x, y) for y in range(n)] for x in range(n)])
    assert np.array_equal(spec.op_array(a, b), want)


def test_cayley_validation():
    GroupSpec.table(cyclic_table(6))
    bad = cyclic_table(6).copy()
    bad[2, 3] = (bad[2, 3] + 1) % 6
    with pytest.raises(GroupAxiomError):
        GroupSpec.table(bad)


@settings(max_examples=40)
@given(st.integers(2, 8), st.integers(0, 63), st.integers(1, 7))
def test_any_single_corruption_rejected(n, cell, shift):
    t = cyclic_table(n).copy()
    i, j = divmod(cell % (n * n), n)
    t[i, j] = (t[i, j] + 1 + shift % (n - 1)) % n if n > 2 else 1 - t[i, j]
    with pytest.raises(GroupAxiomError):
        validate_cayley(t)


def test_cayley_shape_and_range():
    with pytest.raises(GroupAxiomError):
        validate_cayley(np.zeros((2, 3), dtype=np.int64))
    with pytest.raises(GroupAxiomError):
        validate_cayley(np.array([[0, 2], [1, 0]]))
    # associative monoid without inverses: {0,1} under multiplication
    with pytest.raises(GroupAxiomError):
        validate_cayley(np.array([[0, 0], [0, 1]]))


def test_parse_specs(tmp_path):
    assert GroupSpec.parse("zn:12") == GroupSpec.cyclic(12)
    assert GroupSpec.parse("zqm:3:8").order == 6561
    path = tmp_path / "d4.json"
    path.write_text(json.dumps({"cayley": dihedral_table(4).tolist()}))
    T = GroupSpec.parse(f"table:{path}")
    assert T.order == 8 and not T.is_abelian
    for bad in ("zn:1", "zn:x", "zqm:3", "foo:3"):
        with pytest.raises(ValueError):
            GroupSpec.parse(bad)


def test_spec_json_roundtrip():
    for spec in (GroupSpec.cyclic(9), GroupSpec.power(2, 4), GroupSpec.table(dihedral_table(5))):
        assert GroupSpec.from_json(json.loads(json.dumps(spec.to_json()))) == spec


def test_full_system_examples():
    assert full_system(GroupSpec.cyclic(4)).size == 16
    S = full_system(GroupSpec.power(2, 2))
    assert S.size == 16 and S.density == 1
    with pytest.raises(BudgetExceeded):
        full_system(GroupSpec.cyclic(100), memory_budget=1000)


def test_system_is_read_only():
    S = full_system(GroupSpec.cyclic(4))
    with pytest.raises(ValueError):
        S.matrix[0, 0] = False


def test_random_dense():
    spec = GroupSpec.cyclic(1000)
    S = random_dense(spec, "1/2", 7)
    assert abs(S.size - 500_000) <= 5 * 500
    assert np.array_equal(S.matrix, random_dense(spec, 0.5, 7).matrix)
    assert random_dense(GroupSpec.cyclic(5), 1, 3).size == 25
    with pytest.raises(ValueError):
        random_dense(spec, 0, 1)


def test_system_json_roundtrip():
    spec = GroupSpec.power(3, 2)
    S = random_dense(spec, 0.3, 1)
    back = TripleSystem.from_json(json.loads(json.dumps(S.to_json())))
    assert back.spec == spec and np.array_equal(back.matrix, S.matrix)


def test_lower_bound_construction():
    A, B = lower_bound_intervals(16)
    assert (set(A), set(B)) == ({2, 3}, {4, 5})
    S = lower_bound_system(16)
    assert S.size == 4
    sums = {(a + b) % 16 for a, b in S.pairs}
    assert sums == {6, 7, 8}
    assert not sums & set(A) and not sums & set(B)
    with pytest.raises(ValueError):
        lower_bound_intervals(12)


def test_span_count_examples():
    S5 = full_system(GroupSpec.cyclic(5))
    assert span_count(S5, []) == 0
    assert span_count(S5, {0, 1, 2}) == 6
    # every one of those six has a repeated element
    assert span_count(S5, {0, 1, 2}, proper=True) == 0
    assert span_count_as_sets(S5, {0, 1, 2}) == 4
    LB = lower_bound_system(16)
    assert span_count(LB, {2, 3, 4, 5, 6, 7, 8}) == 4


def test_spanned_elements_examples():
    LB = lower_bound_system(16)
    assert spanned_elements(LB, [(2, 4)]) == {2, 4, 6}
    assert len(spanned_elements(LB, LB.pairs)) == 7
    assert spanned_elements(LB, []) == set()
    with pytest.raises(ValueError):
        spanned_elements(LB, [(0, 0)])


@settings(max_examples=50)
@given(st.sets(st.integers(0, 11), max_size=8), st.integers(0, 11), st.integers(0, 1000))
def test_span_count_monotone(T, extra, seed):
    S = random_dense(GroupSpec.cyclic(12), 0.6, seed)
    assert span_count(S, T | {extra}) >= span_count(S, T)
    fuller = TripleSystem(S.spec, S.matrix | random_dense(S.spec, 0.2, seed + 1).matrix)
    assert span_count(fuller, T) >= span_count(S, T)
    assert span_count(S, T) == len(spanned_pairs(S, T))
    assert span_count(S, T, proper=True) == sum(
        not is_degenerate(S.spec, a, b) for a, b in spanned_pairs(S, T))


def test_min_span_examples():
    LB = lower_bound_system(64)
    assert min_span_brute(LB, 3).size == 6
    assert min_span_brute(full_system(GroupSpec.cyclic(16)), 3).size <= 6
    assert min_span_brute(LB, 1).size == 3


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_min_span_at_least_g(k):
    assert min_span_brute(lower_bound_system(64), k).size >= g_exact(k)


def test_min_span_matches_vertex_enumeration():
    # exhaustive over vertex sets on a small random system
    S = random_dense(GroupSpec.cyclic(7), 0.4, 3)
    for k in (1, 2, 3):
        best = next(r for r in range(1, 8)
                    if any(span_count(S, T) >= k for T in itertools.combinations(range(7), r)))
        assert min_span_brute(S, k).size == best


def test_verify_lower_bound_examples():
    assert verify_lower_bound(64, 3)
    assert verify_lower_bound(64, 2)
    assert verify_lower_bound(16, 2)
    with pytest.raises(BudgetExceeded):
        verify_lower_bound(64, 3, node_budget=10)


@settings(max_examples=200)
@given(st.data())
def test_lower_bound_correspondence(data):
    LB = lower_bound_system(64)
    pairs = LB.pairs
    idx = data.draw(st.sets(st.integers(0, len(pairs) - 1), min_size=1, max_size=20))
    chosen = [pairs[i] for i in idx]
    assert len(spanned_elements(LB, chosen)) == g_of_set(chosen)


def test_min_span_budget():
    with pytest.raises(BudgetExceeded):
        min_span_brute(lower_bound_system(64), 4, node_budget=5)


def test_lower_bound_density():
    S = lower_bound_system(64)
    assert S.density == math.floor(64 ** 2 / 64) / 64 ** 2
