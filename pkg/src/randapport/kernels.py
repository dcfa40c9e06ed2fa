"""Pipage-rounding kernels over integer weight numerators.

Every weight is stored as an integer numerator ``w`` over a shared
denominator ``L``; an edge is fractional iff ``0 < w < L``. Step sizes are
minima of such numerators, so all updates stay exact.

The graph is passed as flat arrays: edge endpoints ``eu``/``ev`` and a CSR
incidence list ``adj_ptr``/``adj_edge`` with each node's edges in ascending
edge order. These functions are compiled by numba unless disabled (see
``_accel``); the plain-Python path runs the same code.
"""

import numpy as np

from ._accel import jit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S32 = np.uint64(32)
_LOW32 = np.uint64(0xFFFFFFFF)
_ONE = np.uint64(1)

# numerators must stay below this so that the coin comparison fits in int64
MAX_DENOMINATOR = 1 << 30


@jit
def draw_u64(key, index):
    z = key + (np.uint64(index) + _ONE) * _GOLDEN
    z = (z ^ (z >> _S30)) * _C1
    z = (z ^ (z >> _S27)) * _C2
    return z ^ (z >> _S31)


@jit
def coin_below(key, index, num, den):
    """True iff draw ``index`` of ``key``, read as u / 2**64, is < num / den.

    Requires 0 <= num < den < 2**31.
    """
    u = draw_u64(key, index)
    uh = np.int64(u >> _S32)
    ul = np.int64(u & _LOW32)
    q1 = (num << 32) // den
    r1 = (num << 32) % den
    q2 = (r1 << 32) // den
    r2 = (r1 << 32) % den
    # threshold = ceil(num * 2**64 / den) split into 32-bit halves
    t_hi = q1
    t_lo = q2
    if r2 > 0:
        t_lo += 1
    if t_lo == (1 << 32):
        t_hi += 1
        t_lo = 0
    if uh < t_hi:
        return True
    if uh == t_hi and ul < t_lo:
        return True
    return False


@jit(inline=True)
def first_fractional(w, L, start):
    e = start
    n = w.shape[0]
    while e < n and (w[e] == 0 or w[e] == L):
        e += 1
    return e


@jit(inline=True)
def find_structure(eu, ev, adj_ptr, adj_edge, w, L, start, pos, path_nodes, path_edges):
    """Locate a fractional cycle or maximal path.

    Starts at the lowest-indexed fractional edge at or after ``start`` and
    extends depth-first, always taking the lowest-indexed fractional edge.
    Returns ``(first, count, is_cycle, e0)``; the structure's edges are
    ``path_edges[first:first + count]`` in walking order. ``count == 0`` means
    no fractional edge remains. ``pos`` must be all -1 on entry and is restored.
    """
    n_edges = w.shape[0]
    e0 = first_fractional(w, L, start)
    if e0 >= n_edges:
        return 0, 0, False, e0
    path_nodes[0] = eu[e0]
    path_nodes[1] = ev[e0]
    path_edges[0] = e0
    pos[eu[e0]] = 0
    pos[ev[e0]] = 1
    k = 1
    first = 0
    count = 0
    cycle = False
    for phase in range(2):
        while True:
            x = path_nodes[k]
            last = path_edges[k - 1]
            f = -1
            for idx in range(adj_ptr[x], adj_ptr[x + 1]):
                e = adj_edge[idx]
                if e != last and w[e] > 0 and w[e] < L:
                    f = e
                    break
            if f < 0:
                break
            y = eu[f]
            if y == x:
                y = ev[f]
            if pos[y] >= 0:
                path_edges[k] = f
                first = pos[y]
                count = k - first + 1
                cycle = True
                break
            k += 1
            path_nodes[k] = y
            path_edges[k - 1] = f
            pos[y] = k
        if cycle:
            break
        if phase == 0:
            # reverse so the second phase extends the other end
            i = 0
            j = k
            while i < j:
                a = path_nodes[i]
                path_nodes[i] = path_nodes[j]
                path_nodes[j] = a
                i += 1
                j -= 1
            i = 0
            j = k - 1
            while i < j:
                a = path_edges[i]
                path_edges[i] = path_edges[j]
                path_edges[j] = a
                i += 1
                j -= 1
            for i in range(k + 1):
                pos[path_nodes[i]] = i
    if not cycle:
        first = 0
        count = k
    for i in range(k + 1):
        pos[path_nodes[i]] = -1
    return first, count, cycle, e0


@jit(inline=True)
def step_sizes(w, L, edges, first, count):
    """Return (alpha, beta) for the alternating structure."""
    alpha = L
    beta = L
    for i in range(count):
        e = edges[first + i]
        if i % 2 == 0:
            alpha = min(alpha, L - w[e])
            beta = min(beta, w[e])
        else:
            alpha = min(alpha, w[e])
            beta = min(beta, L - w[e])
    return alpha, beta


@jit(inline=True)
def apply_step(w, L, edges, first, count, key, step):
    """One randomized pipage step; returns +alpha or -beta (the odd-edge shift)."""
    alpha, beta = step_sizes(w, L, edges, first, count)
    if coin_below(key, step, beta, alpha + beta):
        delta = alpha
    else:
        delta = -beta
    for i in range(count):
        e = edges[first + i]
        if i % 2 == 0:
            w[e] += delta
        else:
            w[e] -= delta
    return delta


def _scratch(adj_ptr, n_edges):
    n_nodes = adj_ptr.shape[0] - 1
    pos = np.full(n_nodes, -1, dtype=np.int64)
    path_nodes = np.empty(n_nodes + 1, dtype=np.int64)
    path_edges = np.empty(n_edges + 1, dtype=np.int64)
    return pos, path_nodes, path_edges


def pipage_run(eu, ev, adj_ptr, adj_edge, w, L, key, step, watch, n_watch):
    """Round ``w`` in place until no watched edge is fractional.

    Returns the next unused draw index. Pass all-True ``watch`` to round
    completely.
    """
    pos, path_nodes, path_edges = _scratch(adj_ptr, w.shape[0])
    return _pipage_loop(eu, ev, adj_ptr, adj_edge, w, L, key, step, watch, n_watch, pos, path_nodes, path_edges)


@jit(inline=True)
def _pipage_loop(eu, ev, adj_ptr, adj_edge, w, L, key, step, watch, n_watch, pos, path_nodes, path_edges):
    start = 0
    while n_watch > 0:
        first, count, cycle, e0 = find_structure(
            eu, ev, adj_ptr, adj_edge, w, L, start, pos, path_nodes, path_edges
        )
        if count == 0:
            break
        start = e0
        apply_step(w, L, path_edges, first, count, key, step)
        step += 1
        for i in range(count):
            e = path_edges[first + i]
            if watch[e] and (w[e] == 0 or w[e] == L):
                n_watch -= 1
    return step


def pipage_batch(eu, ev, adj_ptr, adj_edge, w0, L, keys, out):
    """Fully round ``w0`` once per key; writes 0/1 bits into ``out[m, :]``."""
    n_edges = w0.shape[0]
    watch = np.ones(n_edges, dtype=np.bool_)
    n_frac = int(np.count_nonzero((w0 > 0) & (w0 < L)))
    w = np.empty_like(w0)
    pos, path_nodes, path_edges = _scratch(adj_ptr, n_edges)
    _batch_loop(eu, ev, adj_ptr, adj_edge, w0, L, keys, out, watch, n_frac, w, pos, path_nodes, path_edges)


@jit
def _batch_loop(eu, ev, adj_ptr, adj_edge, w0, L, keys, out, watch, n_frac, w, pos, path_nodes, path_edges):
    n_edges = w0.shape[0]
    for m in range(keys.shape[0]):
        for e in range(n_edges):
            w[e] = w0[e]
        _pipage_loop(eu, ev, adj_ptr, adj_edge, w, L, keys[m], 0, watch, n_frac, pos, path_nodes, path_edges)
        for e in range(n_edges):
            out[m, e] = 1 if w[e] == L else 0
