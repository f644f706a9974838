"""
Slow, independent reference implementations used to cross-check the package.

Nothing here imports the code under test beyond plain data containers.
"""

from __future__ import annotations

from itertools import combinations

import networkx as nx
import numpy as np


def rank_dense(A) -> int:
    """Row rank over GF(2) by textbook elimination on a uint8 array."""
    A = np.array(A, dtype=np.uint8) % 2
    r = 0
    rows, cols = A.shape
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] ^= A[r]
        r += 1
        if r == rows:
            break
    return r


def gram_rank_dense(A) -> int:
    A = np.array(A, dtype=np.int64)
    return rank_dense((A @ A.T) % 2)


def min_distance_dense(A, max_weight: int | None = None) -> int | None:
    """Smallest nonzero x with A x = 0, by trying supports of increasing size."""
    A = np.array(A, dtype=np.uint8)
    n = A.shape[1]
    for w in range(1, (max_weight or n) + 1):
        for sup in combinations(range(n), w):
            if not np.any(np.bitwise_xor.reduce(A[:, list(sup)], axis=1)):
                return w
    return None


def incidence_dense(v: int, blocks) -> np.ndarray:
    M = np.zeros((v, len(blocks)), dtype=np.uint8)
    for j, blk in enumerate(blocks):
        M[list(blk), j] = 1
    return M


def odd_count(blocks, subset) -> int:
    counts: dict[int, int] = {}
    for j in subset:
        for x in blocks[j]:
            counts[x] = counts.get(x, 0) + 1
    return sum(1 for c in counts.values() if c % 2)


def even_subsets(blocks, size: int):
    """Every ``size``-subset of blocks covering each point an even number of times."""
    for sub in combinations(range(len(blocks)), size):
        if odd_count(blocks, sub) == 0:
            yield sub


def smallest_even_size(blocks, max_size: int) -> int | None:
    for s in range(1, max_size + 1):
        if next(even_subsets(blocks, s), None) is not None:
            return s
    return None


def min_size_plus_odd(blocks, limit: int) -> int | None:
    best = None
    for s in range(2, limit + 1):
        for sub in combinations(range(len(blocks)), s):
            val = s + odd_count(blocks, sub)
            best = val if best is None else min(best, val)
    return best


def _dual(blocks, subset) -> nx.Graph | None:
    """Blocks as vertices, shared points as edges, if every point is in exactly two blocks."""
    where: dict[int, list[int]] = {}
    for j in subset:
        for x in blocks[j]:
            where.setdefault(x, []).append(j)
    if any(len(v) != 2 for v in where.values()):
        return None
    g = nx.MultiGraph()
    g.add_nodes_from(subset)
    for a, b in where.values():
        g.add_edge(a, b)
    return g


_PATTERNS = {
    "pasch": nx.complete_graph(4),
    "grid": nx.complete_bipartite_graph(3, 3),
    "double_triangle": nx.circular_ladder_graph(3),
}


def count_named(blocks, kind: str, mu: int = 3) -> int:
    """Copies of a named configuration via graph isomorphism of the dual graph."""
    target = nx.complete_graph(mu + 1) if kind == "generalized_pasch" else _PATTERNS[kind]
    size = target.number_of_nodes()
    n = 0
    for sub in even_subsets(blocks, size):
        g = _dual(blocks, sub)
        if g is not None and nx.is_isomorphic(nx.Graph(g), target) and g.number_of_edges() == target.number_of_edges():
            n += 1
    return n


def even_row_sums(H, d: int) -> tuple[int | None, int]:
    """Minimum nonzero weight of sums of an even number of rows, and how many have weight d."""
    H = np.array(H, dtype=np.uint8)
    m = H.shape[0]
    best, hits = None, 0
    for k in range(2, m + 1, 2):
        for sub in combinations(range(m), k):
            w = int(np.bitwise_xor.reduce(H[list(sub)], axis=0).sum())
            if w:
                best = w if best is None else min(best, w)
            hits += w == d
    return best, hits


def ml_decode(H, s) -> np.ndarray:
    """Coset leader with the lexicographically least support."""
    H = np.array(H, dtype=np.uint8)
    s = np.array(s, dtype=np.uint8)
    n = H.shape[1]
    for w in range(n + 1):
        for sup in combinations(range(n), w):
            e = np.zeros(n, dtype=np.uint8)
            e[list(sup)] = 1
            if np.array_equal(H.astype(np.int64) @ e % 2, s):
                return e
    raise ValueError("no solution")


def girth_nx(H) -> int | None:
    """Tanner-graph girth with networkx's minimum cycle basis."""
    H = np.array(H, dtype=np.uint8)
    g = nx.Graph()
    rows, cols = np.nonzero(H)
    g.add_edges_from((("c", int(i)), ("v", int(j))) for i, j in zip(rows, cols))
    basis = nx.minimum_cycle_basis(g)
    return min((len(c) for c in basis), default=None)


def prime_field_lines_ag2(q: int):
    """Lines of AG(2, q), q prime, as point-index sets with index x*q + y."""
    lines = set()
    for a in range(q):  # y = a x + b
        for b in range(q):
            lines.add(frozenset(x * q + (a * x + b) % q for x in range(q)))
    for c in range(q):  # x = c
        lines.add(frozenset(c * q + y for y in range(q)))
    return sorted(tuple(sorted(l)) for l in lines)
