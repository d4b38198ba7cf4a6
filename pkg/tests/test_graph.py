import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chaotic_iterations import (
    StateVector,
    TruthTable,
    ff_step,
    make_constant,
    make_identity,
    make_negation,
    trajectory,
)
from chaotic_iterations.errors import ScaleLimitExceeded
from chaotic_iterations.graph import (
    IterationGraph,
    analyze,
    build_gamma,
    chaotic_by_reachability,
    chaotic_flags,
    enumerate_chaotic,
    enumerate_chaotic_reachability,
    find_strategy_path,
    function_count,
    function_from_index,
    is_chaotic,
    is_strongly_connected,
    strongly_connected_components,
)


# ---------------------------------------------------------------- build_gamma

def test_gamma_identity_n1():
    g = build_gamma(make_identity(1))
    assert g.vertex_count == 2
    assert g.arcs == ((0, 1, 0), (1, 1, 1))


def test_gamma_negation_n1():
    assert build_gamma(make_negation(1)).arcs == ((0, 1, 1), (1, 1, 0))


def test_gamma_negation_n2_is_bidirectional_square():
    f = make_negation(2)
    expected = []
    for c in range(4):
        for i in (1, 2):
            expected.append((c, i, ff_step(f, i, StateVector(2, c)).code))
    g = build_gamma(f)
    assert list(g.arcs) == expected
    edges = {(s, t) for s, _, t in g.arcs}
    assert edges == {(0, 1), (1, 0), (0, 2), (2, 0), (1, 3), (3, 1), (2, 3), (3, 2)}


def test_gamma_arc_invariants():
    fns = [function_from_index(n, k) for n in (1, 2) for k in range(function_count(n))]
    rng = random.Random(5)
    fns += [TruthTable(3, [rng.randrange(8) for _ in range(8)]) for _ in range(300)]
    for f in fns:
        g = build_gamma(f)
        n = f.arity
        assert len(g.arcs) == n << n
        for v in range(1 << n):
            assert len(g.successors(v)) == n
        for s, i, t in g.arcs:
            assert t == ff_step(f, i, StateVector(n, s)).code


def test_gamma_arity_limit():
    with pytest.raises(ScaleLimitExceeded):
        build_gamma(make_negation(21))


# ---------------------------------------------------------------- SCC

def test_single_vertex_self_loop():
    assert is_strongly_connected(IterationGraph(0, ((0, 1, 0),)))


def test_identity_not_connected():
    assert not is_strongly_connected(build_gamma(make_identity(2)))


def test_negation_connected():
    assert is_strongly_connected(build_gamma(make_negation(2)))


class _Digraph(IterationGraph):
    """Arbitrary out-degree-n digraph, reusing the SCC routine."""


def _mutual_reachability_partition(adj):
    nv = len(adj)
    reach = []
    for s in range(nv):
        seen = {s}
        stack = [s]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        reach.append(seen)
    return {frozenset(w for w in range(nv) if w in reach[v] and v in reach[w]) for v in range(nv)}


@settings(max_examples=200)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.integers(0, (1 << n) - 1), min_size=n << n, max_size=n << n))))
def test_tarjan_matches_mutual_reachability(args):
    n, targets = args
    arcs = tuple((v, i + 1, targets[v * n + i]) for v in range(1 << n) for i in range(n))
    g = _Digraph(n, arcs)
    got = {frozenset(c) for c in strongly_connected_components(g)}
    assert got == _mutual_reachability_partition(g.adjacency())


# ---------------------------------------------------------------- is_chaotic

@pytest.mark.parametrize("n", range(1, 11))
def test_chaos_certification(n):
    assert is_chaotic(make_negation(n))
    assert not is_chaotic(make_identity(n))
    assert not is_chaotic(make_constant(n, 0))


def test_analyze_report():
    assert analyze(make_negation(3)) == {"chaotic": True, "scc": 1, "vertices": 8, "arcs": 24}
    assert analyze(make_identity(2))["scc"] == 4


def test_chaos_invariant_under_cell_permutation():
    rng = random.Random(9)
    perms = list(itertools.permutations(range(3)))

    def relabel(code, perm):
        out = 0
        for k in range(3):
            if code >> k & 1:
                out |= 1 << perm[k]
        return out

    for _ in range(300):
        table = [rng.randrange(8) for _ in range(8)]
        if rng.random() < 0.5:
            # bias toward chaotic samples
            table = [c ^ rng.choice([7, 3, 5, 6, 1, 2, 4]) for c in range(8)]
        f = TruthTable(3, table)
        base = is_chaotic(f)
        for perm in perms:
            inv = [perm.index(k) for k in range(3)]
            g = TruthTable(3, [relabel(f.image_code(relabel(c, inv)), perm) for c in range(8)])
            assert is_chaotic(g) == base


# ---------------------------------------------------------------- strategy synthesis

def test_path_to_self_is_empty():
    x = StateVector(2, 1)
    assert find_strategy_path(make_negation(2), x, x).prefix == ()


def test_path_negation_corner_to_corner():
    f = make_negation(2)
    x, y = StateVector(2, 0), StateVector(2, 3)
    s = find_strategy_path(f, x, y)
    assert [t.index for t in s.prefix] == [1, 2]
    assert trajectory(f, x, s, 2)[-1] == y


def test_path_absent_for_identity():
    assert find_strategy_path(make_identity(1), StateVector(1, 0), StateVector(1, 1)) is None


def test_paths_replay_and_are_short():
    rng = random.Random(2)
    for _ in range(100):
        n = rng.randint(1, 4)
        f = TruthTable(n, [rng.randrange(1 << n) for _ in range(1 << n)])
        x = StateVector(n, rng.randrange(1 << n))
        y = StateVector(n, rng.randrange(1 << n))
        s = find_strategy_path(f, x, y)
        if s is None:
            assert not is_chaotic(f)
            continue
        assert len(s) < 1 << n
        assert trajectory(f, x, s, len(s))[-1] == y


# ---------------------------------------------------------------- enumeration

def test_function_indexing_first_entry_most_significant():
    f = function_from_index(2, 3 << 6)
    assert f.table == (3, 0, 0, 0)
    assert function_from_index(1, 2).table == (1, 0)


def test_enumerate_n1():
    r = enumerate_chaotic(1)
    assert (r.total, r.chaotic) == (4, 1)
    chaotic = [k for k in range(4) if is_chaotic(function_from_index(1, k))]
    assert [function_from_index(1, k) for k in chaotic] == [make_negation(1)]
    assert not r.claim_holds


def test_enumerate_n2_against_oracle():
    r = enumerate_chaotic(2)
    checked, oracle = enumerate_chaotic_reachability(2)
    assert checked == 256
    assert r.chaotic == oracle
    python_scc = sum(is_chaotic(function_from_index(2, k)) for k in range(256))
    assert python_scc == oracle


def test_kernel_flags_match_python_tarjan():
    idx = list(range(256))
    flags = chaotic_flags(2, idx)
    assert [bool(b) for b in flags] == [is_chaotic(function_from_index(2, k)) for k in idx]
    rng = random.Random(1)
    sample = [rng.randrange(function_count(3)) for _ in range(2000)]
    flags = chaotic_flags(3, np.array(sample))
    for k, flag in zip(sample, flags):
        f = function_from_index(3, k)
        assert bool(flag) == is_chaotic(f) == chaotic_by_reachability(f)


def test_enumeration_is_chunking_independent():
    assert enumerate_chaotic(2, n_chunks=1) == enumerate_chaotic(2, n_chunks=7)


def test_enumeration_progress_reports_in_order():
    seen = []
    enumerate_chaotic(2, progress=lambda done, total: seen.append(done), n_chunks=4)
    assert seen == sorted(seen) and seen[-1] == 256


def test_enumeration_limit():
    with pytest.raises(ScaleLimitExceeded):
        enumerate_chaotic(4)
