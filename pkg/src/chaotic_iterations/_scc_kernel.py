"""Compiled Tarjan kernel for scanning the whole function space at N <= 3.

A function is addressed by its index in base 2^N, table entry 0 being the
most significant digit.  Arc x -> F_f(i, x) flips bit i-1 of x exactly when
f(x) and x differ there, so the kernel only needs ``x ^ f(x)`` per vertex.
"""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _decode(n, index, changed):
    nv = 1 << n
    mask = nv - 1
    for e in range(nv):
        image = (index >> (n * (nv - 1 - e))) & mask
        changed[e] = image ^ e


@njit(cache=True, nogil=True)
def _single_scc(n, changed, order, low, on_stack, stack, call_v, call_i):
    nv = 1 << n
    for v in range(nv):
        order[v] = -1
        on_stack[v] = False
    counter = 0
    sp = 0
    components = 0
    for root in range(nv):
        if order[root] != -1:
            continue
        order[root] = counter
        low[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        on_stack[root] = True
        call_v[0] = root
        call_i[0] = 0
        cp = 1
        while cp > 0:
            v = call_v[cp - 1]
            i = call_i[cp - 1]
            if i < n:
                call_i[cp - 1] = i + 1
                w = v ^ (changed[v] & (1 << i))
                if order[w] == -1:
                    order[w] = counter
                    low[w] = counter
                    counter += 1
                    stack[sp] = w
                    sp += 1
                    on_stack[w] = True
                    call_v[cp] = w
                    call_i[cp] = 0
                    cp += 1
                elif on_stack[w] and order[w] < low[v]:
                    low[v] = order[w]
            else:
                cp -= 1
                if low[v] == order[v]:
                    components += 1
                    if components > 1:
                        return False
                    while True:
                        sp -= 1
                        w = stack[sp]
                        on_stack[w] = False
                        if w == v:
                            break
                if cp > 0:
                    u = call_v[cp - 1]
                    if low[v] < low[u]:
                        low[u] = low[v]
    return components == 1


@njit(cache=True, nogil=True)
def count_chaotic_range(n, start, stop):
    nv = 1 << n
    changed = np.empty(nv, np.int64)
    order = np.empty(nv, np.int64)
    low = np.empty(nv, np.int64)
    on_stack = np.empty(nv, np.bool_)
    stack = np.empty(nv, np.int64)
    call_v = np.empty(nv, np.int64)
    call_i = np.empty(nv, np.int64)
    count = 0
    for index in range(start, stop):
        _decode(n, index, changed)
        if _single_scc(n, changed, order, low, on_stack, stack, call_v, call_i):
            count += 1
    return count


@njit(cache=True, nogil=True)
def chaotic_flags(n, indices):
    nv = 1 << n
    changed = np.empty(nv, np.int64)
    order = np.empty(nv, np.int64)
    low = np.empty(nv, np.int64)
    on_stack = np.empty(nv, np.bool_)
    stack = np.empty(nv, np.int64)
    call_v = np.empty(nv, np.int64)
    call_i = np.empty(nv, np.int64)
    out = np.zeros(indices.shape[0], np.bool_)
    for k in range(indices.shape[0]):
        _decode(n, indices[k], changed)
        out[k] = _single_scc(n, changed, order, low, on_stack, stack, call_v, call_i)
    return out
