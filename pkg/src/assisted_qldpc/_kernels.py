"""Compiled inner loops.

All kernels take CSR-style index arrays (``ptr``, ``idx``) so they stay
independent of the packed matrix representation.  They release the GIL so
callers may fan work out over threads.
"""

import numpy as np
from numba import njit

_OPTS = dict(cache=True, nogil=True)


@njit(**_OPTS)
def _toggle(col, col_ptr, col_idx, parity):
    delta = 0
    for t in range(col_ptr[col], col_ptr[col + 1]):
        r = col_idx[t]
        parity[r] ^= 1
        if parity[r]:
            delta += 1
        else:
            delta -= 1
    return delta


@njit(**_OPTS)
def _first_odd(parity):
    for r in range(parity.shape[0]):
        if parity[r]:
            return r
    return -1


@njit(**_OPTS)
def _even_search(col_ptr, col_idx, row_ptr, row_idx, nrows, size, node_budget,
                 collect, capacity, out):
    """Depth-first search for column subsets whose sum is zero.

    The first column is the smallest in the subset; every later column is
    chosen among those covering the lowest row of odd parity, which makes
    the search complete for subsets without a proper even sub-subset.
    Returns ``(found, nodes, status)`` with status 0 done, -1 budget hit.
    In collect mode every subset of exactly ``size`` columns is written to
    ``out`` (up to ``capacity`` rows) and ``found`` counts them.
    """
    ncols = col_ptr.shape[0] - 1
    maxw = 0
    for c in range(ncols):
        w = col_ptr[c + 1] - col_ptr[c]
        if w > maxw:
            maxw = w
    parity = np.zeros(nrows, dtype=np.uint8)
    used = np.zeros(ncols, dtype=np.uint8)
    chosen = np.empty(size, dtype=np.int64)
    pivot = np.empty(size, dtype=np.int64)
    ptr = np.empty(size, dtype=np.int64)
    nodes = 0
    found = 0
    for c0 in range(ncols):
        if col_ptr[c0 + 1] == col_ptr[c0]:
            if size >= 1 and (not collect or size == 1):
                if collect:
                    if found < capacity:
                        out[found, 0] = c0
                    found += 1
                    continue
                out[0, 0] = c0
                return 1, nodes, 0
            continue
        if size < 2:
            continue
        odd = _toggle(c0, col_ptr, col_idx, parity)
        used[c0] = 1
        chosen[0] = c0
        nodes += 1
        if odd > maxw * (size - 1):
            _toggle(c0, col_ptr, col_idx, parity)
            used[c0] = 0
            continue
        d = 1
        p = _first_odd(parity)
        pivot[1] = p
        ptr[1] = row_ptr[p]
        while d >= 1:
            p = pivot[d]
            if ptr[d] == row_ptr[p + 1]:
                d -= 1
                if d == 0:
                    break
                odd += _toggle(chosen[d], col_ptr, col_idx, parity)
                used[chosen[d]] = 0
                continue
            c = row_idx[ptr[d]]
            ptr[d] += 1
            if c <= c0 or used[c]:
                continue
            nodes += 1
            if node_budget > 0 and nodes > node_budget:
                # restore state is irrelevant: caller discards it
                return found, nodes, -1
            odd += _toggle(c, col_ptr, col_idx, parity)
            used[c] = 1
            chosen[d] = c
            if odd == 0:
                if collect:
                    if d + 1 == size:
                        if found < capacity:
                            for t in range(size):
                                out[found, t] = chosen[t]
                        found += 1
                else:
                    for t in range(d + 1):
                        out[0, t] = chosen[t]
                    for t in range(d + 1, size):
                        out[0, t] = -1
                    return 1, nodes, 0
            elif d + 1 < size and odd <= maxw * (size - d - 1):
                d += 1
                q = _first_odd(parity)
                pivot[d] = q
                ptr[d] = row_ptr[q]
                continue
            odd += _toggle(c, col_ptr, col_idx, parity)
            used[c] = 0
        _toggle(c0, col_ptr, col_idx, parity)
        used[c0] = 0
    return found, nodes, 0


def even_subset_search(col_ptr, col_idx, row_ptr, row_idx, nrows, size, node_budget=-1):
    """Find a set of at most ``size`` columns summing to zero.

    Returns ``(status, witness, nodes)``: status 1 found, 0 none exists,
    -1 node budget exhausted.
    """
    out = np.full((1, max(size, 1)), -1, dtype=np.int64)
    found, nodes, status = _even_search(col_ptr, col_idx, row_ptr, row_idx, nrows, size,
                                        node_budget, False, 1, out)
    if status == -1:
        return -1, None, nodes
    if found:
        w = out[0]
        return 1, np.sort(w[w >= 0]), nodes
    return 0, None, nodes


def enumerate_even_subsets(col_ptr, col_idx, row_ptr, row_idx, nrows, size, capacity=1 << 20):
    """All column sets of exactly ``size`` summing to zero reachable by the search.

    Rows of the result may repeat; callers deduplicate.
    """
    out = np.full((capacity, size), -1, dtype=np.int64)
    found, _, _ = _even_search(col_ptr, col_idx, row_ptr, row_idx, nrows, size, -1,
                               True, capacity, out)
    if found > capacity:
        raise MemoryError(f"{found} configurations exceed capacity {capacity}")
    return np.sort(out[:found], axis=1)


@njit(**_OPTS)
def min_size_plus_odd(col_ptr, col_idx, nrows, lo, limit):
    """Minimum of ``|C| + odd(C)`` over all column subsets with ``lo <= |C| <= limit``.

    Plain lexicographic enumeration with incremental parity updates.
    Returns the minimum (or -1 if the range is empty) and a witness padded
    with -1.
    """
    ncols = col_ptr.shape[0] - 1
    parity = np.zeros(nrows, dtype=np.uint8)
    stack = np.empty(limit, dtype=np.int64)
    best = -1
    witness = np.full(limit, -1, dtype=np.int64)
    if limit < 1 or ncols == 0:
        return best, witness
    d = 0
    stack[0] = 0
    odd = _toggle(0, col_ptr, col_idx, parity)
    while True:
        s = d + 1
        if s >= lo:
            val = s + odd
            if best < 0 or val < best:
                best = val
                for t in range(limit):
                    witness[t] = stack[t] if t < s else -1
        if s < limit and stack[d] + 1 < ncols:
            d += 1
            stack[d] = stack[d - 1] + 1
            odd += _toggle(stack[d], col_ptr, col_idx, parity)
            continue
        # advance: pop until a level can move right
        while True:
            odd += _toggle(stack[d], col_ptr, col_idx, parity)
            if stack[d] + 1 < ncols:
                stack[d] += 1
                odd += _toggle(stack[d], col_ptr, col_idx, parity)
                break
            d -= 1
            if d < 0:
                return best, witness


@njit(**_OPTS)
def tanner_girth(row_ptr, row_idx, col_ptr, col_idx, nrows, ncols):
    """Shortest cycle in the Tanner graph; 0 when the graph is acyclic."""
    nv = nrows + ncols
    dist = np.empty(nv, dtype=np.int64)
    parent = np.empty(nv, dtype=np.int64)
    queue = np.empty(nv, dtype=np.int64)
    best = 1 << 62
    for root in range(nv):
        dist[:] = -1
        dist[root] = 0
        parent[root] = -1
        head = 0
        tail = 0
        queue[tail] = root
        tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            if 2 * dist[u] >= best:
                break
            if u < nrows:
                a, b, off = row_ptr[u], row_ptr[u + 1], nrows
                idx = row_idx
            else:
                a, b, off = col_ptr[u - nrows], col_ptr[u - nrows + 1], 0
                idx = col_idx
            for t in range(a, b):
                w = idx[t] + off
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue[tail] = w
                    tail += 1
                elif w != parent[u]:
                    cyc = dist[u] + dist[w] + 1
                    if cyc < best:
                        best = cyc
    if best == 1 << 62:
        return 0
    return best


@njit(**_OPTS)
def check_distances(var, var_checks, var_deg, check_vars, check_deg, nchecks):
    """BFS depth (in check hops) of every check from variable ``var``.

    Unreached checks get -1.  ``var_checks``/``check_vars`` are padded
    adjacency tables with degree counts.
    """
    nvars = var_deg.shape[0]
    cdist = np.full(nchecks, -1, dtype=np.int64)
    seen_var = np.zeros(nvars, dtype=np.uint8)
    frontier = np.empty(nvars, dtype=np.int64)
    nxt = np.empty(nvars, dtype=np.int64)
    nf = 1
    frontier[0] = var
    seen_var[var] = 1
    depth = 0
    while nf > 0:
        nn = 0
        for i in range(nf):
            v = frontier[i]
            for a in range(var_deg[v]):
                c = var_checks[v, a]
                if cdist[c] >= 0:
                    continue
                cdist[c] = depth
                for b in range(check_deg[c]):
                    u = check_vars[c, b]
                    if not seen_var[u]:
                        seen_var[u] = 1
                        nxt[nn] = u
                        nn += 1
        for i in range(nn):
            frontier[i] = nxt[i]
        nf = nn
        depth += 1
    return cdist


@njit(**_OPTS)
def _bp_one(check_ptr, edge_var, var_ptr, var_edges, syndrome, prior, max_iter, clamp,
            v2c, c2v, total, hard, fwd, bwd):
    nchecks = check_ptr.shape[0] - 1
    nvars = var_ptr.shape[0] - 1
    nedges = edge_var.shape[0]
    for v in range(nvars):
        hard[v] = 1 if prior[v] < 0 else 0
    # iteration 0: prior hard decision
    ok = True
    for c in range(nchecks):
        s = 0
        for e in range(check_ptr[c], check_ptr[c + 1]):
            s ^= hard[edge_var[e]]
        if s != syndrome[c]:
            ok = False
            break
    if ok:
        return True, 0
    for e in range(nedges):
        v2c[e] = prior[edge_var[e]]
    for it in range(1, max_iter + 1):
        for c in range(nchecks):
            a = check_ptr[c]
            b = check_ptr[c + 1]
            acc = 1.0
            for e in range(a, b):
                fwd[e] = acc
                th = np.tanh(0.5 * v2c[e])
                bwd[e] = th
                acc *= th
            acc = 1.0
            for e in range(b - 1, a - 1, -1):
                th = bwd[e]
                bwd[e] = acc
                acc *= th
            sign = -1.0 if syndrome[c] else 1.0
            for e in range(a, b):
                prod = fwd[e] * bwd[e]
                if prod >= 1.0:
                    m = clamp
                elif prod <= -1.0:
                    m = -clamp
                else:
                    m = 2.0 * np.arctanh(prod)
                    if m > clamp:
                        m = clamp
                    elif m < -clamp:
                        m = -clamp
                c2v[e] = sign * m
        for v in range(nvars):
            t = prior[v]
            for k in range(var_ptr[v], var_ptr[v + 1]):
                t += c2v[var_edges[k]]
            total[v] = t
            hard[v] = 1 if t < 0 else 0
            for k in range(var_ptr[v], var_ptr[v + 1]):
                e = var_edges[k]
                m = t - c2v[e]
                if m > clamp:
                    m = clamp
                elif m < -clamp:
                    m = -clamp
                v2c[e] = m
        ok = True
        for c in range(nchecks):
            s = 0
            for e in range(check_ptr[c], check_ptr[c + 1]):
                s ^= hard[edge_var[e]]
            if s != syndrome[c]:
                ok = False
                break
        if ok:
            return True, it
    return False, max_iter


@njit(**_OPTS)
def bp_decode_batch(check_ptr, edge_var, var_ptr, var_edges, syndromes, prior, max_iter, clamp):
    """Flooding sum-product decoding of each syndrome row against one prior.

    Returns estimates (uint8), converged flags and iteration counts.
    """
    ntrials = syndromes.shape[0]
    nvars = var_ptr.shape[0] - 1
    nedges = edge_var.shape[0]
    est = np.zeros((ntrials, nvars), dtype=np.uint8)
    conv = np.zeros(ntrials, dtype=np.bool_)
    iters = np.zeros(ntrials, dtype=np.int64)
    v2c = np.empty(nedges)
    c2v = np.empty(nedges)
    fwd = np.empty(nedges)
    bwd = np.empty(nedges)
    total = np.empty(nvars)
    hard = np.empty(nvars, dtype=np.uint8)
    for t in range(ntrials):
        ok, it = _bp_one(check_ptr, edge_var, var_ptr, var_edges, syndromes[t], prior,
                         max_iter, clamp, v2c, c2v, total, hard, fwd, bwd)
        est[t] = hard
        conv[t] = ok
        iters[t] = it
    return est, conv, iters
