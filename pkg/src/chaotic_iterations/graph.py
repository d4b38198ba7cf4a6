"""Asynchronous iteration graphs and chaos certification of update functions.

G_f is chaotic (Devaney) exactly when its iteration graph is strongly
connected, so certification reduces to one SCC computation on 2^N vertices.
"""
from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import StateVector, Strategy, TruthTable, UpdateFunction, ff_step, make_negation
from .errors import ArityMismatch, ScaleLimitExceeded

MAX_GRAPH_ARITY = 20
MAX_ENUMERATION_ARITY = 3


@dataclass(frozen=True)
class IterationGraph:
    """Directed multigraph with an arc x -> F_f(i, x) for every state x and index i.

    ``arcs`` is ordered by source, then by index; each arc is a
    ``(source, index, target)`` triple of canonical codes and 1-based index.
    """

    arity: int
    arcs: tuple

    @property
    def vertex_count(self) -> int:
        return 1 << self.arity

    def successors(self, v: int) -> list:
        return self.adjacency()[v]

    def adjacency(self) -> list:
        adj = [[] for _ in range(self.vertex_count)]
        for s, _, t in self.arcs:
            adj[s].append(t)
        return adj


def build_gamma(f: UpdateFunction) -> IterationGraph:
    if f.arity > MAX_GRAPH_ARITY:
        raise ScaleLimitExceeded(f"iteration graphs are limited to arity {MAX_GRAPH_ARITY}")
    n = f.arity
    arcs = []
    for code in range(1 << n):
        changed = code ^ f.image_code(code)
        for i in range(1, n + 1):
            bit = 1 << (i - 1)
            arcs.append((code, i, code ^ (changed & bit)))
    return IterationGraph(n, tuple(arcs))


def strongly_connected_components(g: IterationGraph) -> list:
    """Tarjan's algorithm, iterative, in O(V + E)."""
    adj = g.adjacency()
    nv = g.vertex_count
    index = [-1] * nv
    low = [0] * nv
    on_stack = [False] * nv
    stack = []
    components = []
    counter = 0

    for root in range(nv):
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        work = [(root, iter(adj[root]))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.add(w)
                    if w == v:
                        break
                components.append(comp)
    return components


def is_strongly_connected(g: IterationGraph) -> bool:
    return len(strongly_connected_components(g)) == 1


def is_chaotic(f: UpdateFunction) -> bool:
    return is_strongly_connected(build_gamma(f))


def analyze(f: UpdateFunction) -> dict:
    g = build_gamma(f)
    sccs = strongly_connected_components(g)
    return {
        "chaotic": len(sccs) == 1,
        "scc": len(sccs),
        "vertices": g.vertex_count,
        "arcs": len(g.arcs),
    }


def find_strategy_path(f: UpdateFunction, x: StateVector, y: StateVector) -> Optional[Strategy]:
    """Shortest unary strategy prefix driving x to y, or None if y is unreachable.

    Breadth-first search over the iteration graph; lower update indices are
    explored first, which fixes the tie-breaking.
    """
    if x.n_cells != f.arity or y.n_cells != f.arity:
        raise ArityMismatch("states and function must share N")
    n = f.arity
    if n > MAX_GRAPH_ARITY:
        raise ScaleLimitExceeded(f"path search is limited to arity {MAX_GRAPH_ARITY}")
    parent = {x.code: None}
    queue = deque([x.code])
    while queue:
        v = queue.popleft()
        if v == y.code:
            path = []
            while parent[v] is not None:
                v, i = parent[v]
                path.append(i)
            return Strategy.unary(n, reversed(path))
        changed = v ^ f.image_code(v)
        for i in range(1, n + 1):
            w = v ^ (changed & (1 << (i - 1)))
            if w not in parent:
                parent[w] = (v, i)
                queue.append(w)
    return None


# ---------------------------------------------------------------------------
# Exhaustive enumeration
# ---------------------------------------------------------------------------

def function_count(n: int) -> int:
    return (1 << n) ** (1 << n)


def function_from_index(n: int, index: int) -> TruthTable:
    """Truth table number ``index``; entry 0 is the most significant base-2^N digit."""
    v = 1 << n
    table = [(index >> (n * (v - 1 - e))) & (v - 1) for e in range(v)]
    return TruthTable(n, table)


@dataclass(frozen=True)
class EnumerationResult:
    n: int
    total: int
    chaotic: int

    @property
    def claimed(self) -> int:
        # the published count equals the number of all functions
        return function_count(self.n)

    @property
    def claim_holds(self) -> bool:
        return self.chaotic == self.claimed

    def line(self) -> str:
        return f"N={self.n} total={self.total} chaotic={self.chaotic}"


def _kernels():
    from . import _scc_kernel
    return _scc_kernel


def _chunks(total: int, n_chunks: int) -> list:
    size = -(-total // n_chunks)
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def enumerate_chaotic(n: int, progress: Optional[Callable[[int, int], None]] = None,
                      workers: Optional[int] = None, n_chunks: int = 64) -> EnumerationResult:
    """Count the update functions on n cells whose iteration graph is strongly connected.

    The function space is split into ``n_chunks`` contiguous index ranges
    (fixed leading table entries); chunks are scanned concurrently with a
    compiled Tarjan kernel and summed in chunk order.  ``progress(done,
    total)`` is called after each chunk, in chunk order.
    """
    if not 1 <= n <= MAX_ENUMERATION_ARITY:
        raise ScaleLimitExceeded(f"exhaustive enumeration supports 1 <= N <= {MAX_ENUMERATION_ARITY}")
    kernel = _kernels()
    total = function_count(n)
    chunks = _chunks(total, min(n_chunks, total))
    workers = workers or os.cpu_count() or 1
    count = 0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(kernel.count_chaotic_range, n, lo, hi) for lo, hi in chunks]
        for k, fut in enumerate(futures):
            count += int(fut.result())
            if progress is not None:
                progress(chunks[k][1], total)
    return EnumerationResult(n, total, count)


def chaotic_flags(n: int, indices) -> np.ndarray:
    """Compiled-kernel verdicts for the given function indices."""
    if not 1 <= n <= MAX_ENUMERATION_ARITY:
        raise ScaleLimitExceeded(f"kernel verdicts support 1 <= N <= {MAX_ENUMERATION_ARITY}")
    return _kernels().chaotic_flags(n, np.asarray(indices, dtype=np.int64))


# ---------------------------------------------------------------------------
# Independent oracle: all-pairs reachability
# ---------------------------------------------------------------------------

def chaotic_by_reachability(f: UpdateFunction) -> bool:
    """Strong connectivity decided by a breadth-first search from every vertex.

    Deliberately shares nothing with the SCC path except ``ff_step``.
    """
    n = f.arity
    nv = 1 << n
    adj = []
    for code in range(nv):
        x = StateVector(n, code)
        adj.append({ff_step(f, i, x).code for i in range(1, n + 1)})
    for src in range(nv):
        seen = {src}
        frontier = [src]
        while frontier:
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        if len(seen) != nv:
            return False
    return True


def enumerate_chaotic_reachability(n: int, step: int = 1) -> tuple:
    """(checked, chaotic) over function indices 0, step, 2*step, ... via the oracle."""
    if not 1 <= n <= MAX_ENUMERATION_ARITY:
        raise ScaleLimitExceeded(f"oracle enumeration supports 1 <= N <= {MAX_ENUMERATION_ARITY}")
    checked = chaotic = 0
    for idx in range(0, function_count(n), step):
        checked += 1
        chaotic += chaotic_by_reachability(function_from_index(n, idx))
    return checked, chaotic


def sample_agreement(n: int, step: int = 100) -> tuple:
    """Compare kernel and oracle on every ``step``-th function: (checked, mismatches)."""
    indices = np.arange(0, function_count(n), step, dtype=np.int64)
    flags = chaotic_flags(n, indices)
    mismatches = 0
    for idx, flag in zip(indices.tolist(), flags.tolist()):
        if chaotic_by_reachability(function_from_index(n, idx)) != bool(flag):
            mismatches += 1
    return len(indices), mismatches


def certify_negation(max_n: int = 10) -> dict:
    return {n: is_chaotic(make_negation(n)) for n in range(1, max_n + 1)}
