"""Compiled inner loops for spanning-tree sampling and 1-swap descent.

Trees are handled as boolean edge masks over a CSR adjacency. Random draws use
numba's per-thread generator, reseeded at the start of every kernel call so a
call is a pure function of its seed.
"""

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_ITERATION_CAP = 1
STATUS_NOT_A_TREE = 2


@njit(cache=True, nogil=True)
def wilson_tree(n, ptr, nbr, eid, m, seed):
    """Uniform spanning tree by loop-erased random walks (Wilson), rooted at 0."""
    np.random.seed(seed)
    in_tree_v = np.zeros(n, dtype=np.bool_)
    in_tree_e = np.zeros(m, dtype=np.bool_)
    nxt = np.full(n, -1, dtype=np.int64)
    nxt_edge = np.full(n, -1, dtype=np.int64)
    in_tree_v[0] = True
    for start in range(n):
        u = start
        while not in_tree_v[u]:
            deg = ptr[u + 1] - ptr[u]
            r = ptr[u] + np.random.randint(0, deg)
            nxt[u] = nbr[r]
            nxt_edge[u] = eid[r]
            u = nxt[u]
        # overwriting nxt during the walk already erased the loops
        u = start
        while not in_tree_v[u]:
            in_tree_v[u] = True
            in_tree_e[nxt_edge[u]] = True
            u = nxt[u]
    return in_tree_e


@njit(cache=True, nogil=True)
def _root_tree(n, ptr, nbr, eid, in_tree, sources, parent, parent_edge, tin, tout, sub):
    """Root the tree at 0; fill parents, Euler interval and subtree source sums.

    Returns the number of vertices reached (``n`` iff the mask spans).
    """
    order = np.empty(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    next_child = np.empty(n, dtype=np.int64)
    for v in range(n):
        parent[v] = -1
        parent_edge[v] = -1
        tin[v] = -1
        next_child[v] = ptr[v]
    top = 0
    stack[0] = 0
    tin[0] = 0
    order[0] = 0
    clock = 1
    while top >= 0:
        u = stack[top]
        advanced = False
        while next_child[u] < ptr[u + 1]:
            r = next_child[u]
            next_child[u] += 1
            k = eid[r]
            v = nbr[r]
            if in_tree[k] and v != parent[u] and tin[v] < 0:
                parent[v] = u
                parent_edge[v] = k
                tin[v] = clock
                order[clock] = v
                clock += 1
                top += 1
                stack[top] = v
                advanced = True
                break
        if not advanced:
            tout[u] = clock
            top -= 1
    if clock < n:
        return clock
    for v in range(n):
        sub[v] = sources[v]
    for idx in range(n - 1, 0, -1):
        v = order[idx]
        sub[parent[v]] += sub[v]
    return clock


@njit(cache=True, nogil=True)
def _powabs(x, p, zero_tol):
    ax = abs(x)
    if ax <= zero_tol:
        return 0.0
    return ax**p


@njit(cache=True, nogil=True)
def _tree_weight(n, sub, parent_edge, lengths, p, zero_tol):
    w = 0.0
    for v in range(1, n):
        w += _powabs(sub[v], p, zero_tol) * lengths[parent_edge[v]]
    return w


@njit(cache=True, nogil=True)
def _swap_deltas(n, edges, lengths, in_tree, parent, parent_edge, tin, tout, sub, e, p, zero_tol, deltas):
    """Weight change for replacing tree edge ``e`` by each cut-crossing edge.

    Non-crossing edges (and ``e`` itself) get ``+inf``. The weight is
    ``sum |Q|^p L``; only fluxes on the fundamental cycle of the new edge move.
    """
    a0 = edges[e, 0]
    b0 = edges[e, 1]
    c = a0 if parent_edge[a0] == e else b0
    s = sub[c]
    s_term = _powabs(s, p, zero_tol)
    # chain[y]: weight change on the path parent(c) -> y, y excluded
    chain = np.zeros(n)
    y = parent[c]
    while parent[y] >= 0:
        k = parent_edge[y]
        chain[parent[y]] = chain[y] + (_powabs(sub[y] - s, p, zero_tol) - _powabs(sub[y], p, zero_tol)) * lengths[k]
        y = parent[y]
    lo = tin[c]
    hi = tout[c]
    m = edges.shape[0]
    for k in range(m):
        deltas[k] = np.inf
        if in_tree[k]:
            continue
        u = edges[k, 0]
        v = edges[k, 1]
        u_in = lo <= tin[u] < hi
        v_in = lo <= tin[v] < hi
        if u_in == v_in:
            continue
        a = u if u_in else v
        b = v if u_in else u
        d = (lengths[k] - lengths[e]) * s_term
        x = a
        while x != c:
            d += (_powabs(s - sub[x], p, zero_tol) - _powabs(sub[x], p, zero_tol)) * lengths[parent_edge[x]]
            x = parent[x]
        y = b
        while not (tin[y] <= lo and hi <= tout[y]):
            d += (_powabs(sub[y] + s, p, zero_tol) - _powabs(sub[y], p, zero_tol)) * lengths[parent_edge[y]]
            y = parent[y]
        d += chain[y]
        deltas[k] = d


@njit(cache=True, nogil=True)
def swap_deltas_for(n, ptr, nbr, eid, edges, lengths, sources, in_tree, e, p, zero_tol):
    """Standalone entry to the candidate evaluation used by ``descend_kernel``."""
    parent = np.empty(n, dtype=np.int64)
    parent_edge = np.empty(n, dtype=np.int64)
    tin = np.empty(n, dtype=np.int64)
    tout = np.empty(n, dtype=np.int64)
    sub = np.empty(n)
    _root_tree(n, ptr, nbr, eid, in_tree, sources, parent, parent_edge, tin, tout, sub)
    deltas = np.empty(edges.shape[0])
    _swap_deltas(n, edges, lengths, in_tree, parent, parent_edge, tin, tout, sub, e, p, zero_tol, deltas)
    return deltas


@njit(cache=True, nogil=True)
def descend_kernel(n, ptr, nbr, eid, edges, lengths, sources, in_tree0, p, zero_tol, rel_tol, max_iter, seed):
    """Random-order 1-swap descent until every tree edge has been tried without gain.

    Returns ``(in_tree, swaps, weight_trace, status)``.
    """
    np.random.seed(seed)
    m = edges.shape[0]
    in_tree = in_tree0.copy()
    parent = np.empty(n, dtype=np.int64)
    parent_edge = np.empty(n, dtype=np.int64)
    tin = np.empty(n, dtype=np.int64)
    tout = np.empty(n, dtype=np.int64)
    sub = np.empty(n)
    deltas = np.empty(m)
    tried = np.zeros(m, dtype=np.bool_)
    untried = np.empty(n, dtype=np.int64)
    trace = [0.0]

    if _root_tree(n, ptr, nbr, eid, in_tree, sources, parent, parent_edge, tin, tout, sub) < n:
        return in_tree, 0, np.array(trace), STATUS_NOT_A_TREE
    w = _tree_weight(n, sub, parent_edge, lengths, p, zero_tol)
    trace[0] = w
    swaps = 0
    scans = 0
    while True:
        count = 0
        for k in range(m):
            if in_tree[k] and not tried[k]:
                untried[count] = k
                count += 1
        if count == 0:
            break
        if scans >= max_iter:
            return in_tree, swaps, np.array(trace), STATUS_ITERATION_CAP
        scans += 1
        e = untried[np.random.randint(0, count)]
        _swap_deltas(n, edges, lengths, in_tree, parent, parent_edge, tin, tout, sub, e, p, zero_tol, deltas)
        best = -1
        best_delta = np.inf
        for k in range(m):
            if deltas[k] < best_delta:
                best_delta = deltas[k]
                best = k
        if best >= 0 and best_delta < -rel_tol * w:
            in_tree[e] = False
            in_tree[best] = True
            if _root_tree(n, ptr, nbr, eid, in_tree, sources, parent, parent_edge, tin, tout, sub) < n:
                return in_tree, swaps, np.array(trace), STATUS_NOT_A_TREE
            w = _tree_weight(n, sub, parent_edge, lengths, p, zero_tol)
            trace.append(w)
            swaps += 1
            tried[:] = False
        else:
            tried[e] = True
    return in_tree, swaps, np.array(trace), STATUS_OK
