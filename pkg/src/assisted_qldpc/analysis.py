"""
Structural checks on designs and parity-check matrices.

Covers Tanner-graph girth, even-freeness (smallest even configuration),
the named small configurations of triple systems, the ``|C| + odd(C)``
bound, 2-rank predictions from the literature, and the even-row-sum audit
behind non-degeneracy of the one-ebit extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from math import comb

import numpy as np

from assisted_qldpc import _kernels, gf2
from assisted_qldpc.designs import PairwiseBalancedDesign, incidence, replication_profile, verify_pbd
from assisted_qldpc.galois import GeometryDesign
from assisted_qldpc.gf2 import BinaryMatrix, BudgetExceeded

EVEN_FREE_MAX = 12
ODD_POINT_MAX = 9
AUDIT_MAX_ROWS = 24


def format_record(fields: dict) -> str:
    """Render ``key: value`` lines for CLI consumption."""
    return "\n".join(f"{k}: {v}" for k, v in fields.items())


def _design_of(d) -> PairwiseBalancedDesign:
    return d.design if isinstance(d, GeometryDesign) else d


# --------------------------------------------------------------------- girth

def girth(M: BinaryMatrix) -> int | None:
    """Length of a shortest cycle in the Tanner graph of ``M``; ``None`` if acyclic."""
    rp, ri = M.csr()
    cp, ci = M.T.csr()
    g = _kernels.tanner_girth(rp, ri, cp, ci, M.rows, M.cols)
    return None if g == 0 else int(g)


# ------------------------------------------------------------ configurations

@dataclass(frozen=True)
class Configuration:
    """A subset of the blocks of a design."""

    design: PairwiseBalancedDesign = field(repr=False)
    blocks: tuple[int, ...]

    def point_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for j in self.blocks:
            for x in self.design.blocks[j]:
                counts[x] = counts.get(x, 0) + 1
        return counts

    @property
    def points(self) -> frozenset[int]:
        return frozenset(self.point_counts())

    @property
    def odd(self) -> int:
        return sum(1 for c in self.point_counts().values() if c % 2)

    @property
    def is_even(self) -> bool:
        return self.odd == 0

    def __len__(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class EvenFreenessReport:
    """``r`` is the largest verified even-freeness.

    With a witness, ``r = len(witness) - 1`` is exact.  Without one the
    design has no even configuration of size up to ``bound_used`` and ``r``
    is only a lower bound.
    """

    r: int
    witness: Configuration | None
    bound_used: int
    method: str

    @property
    def exact(self) -> bool:
        return self.witness is not None

    def to_record(self) -> str:
        return format_record({
            "even_freeness": self.r,
            "exact": self.exact,
            "witness": list(self.witness.blocks) if self.witness else None,
            "bound_used": self.bound_used,
            "method": self.method,
        })


def even_freeness(d, r_max: int = 7, node_budget: int = -1, method: str = "auto") -> EvenFreenessReport:
    """Largest ``r`` such that the design has no even ``i``-configuration for ``i <= r``.

    Uses exhaustive codeword enumeration when the incidence code has nullity
    at most 24, otherwise a depth-first search over block subsets of size up
    to ``r_max + 1``.  ``method`` forces ``"enumerate"`` or ``"search"``.

    Raises
    ------
    BudgetExceeded
        When ``node_budget`` search nodes are used up; the message carries
        the last fully verified size.
    """
    d = _design_of(d)
    if r_max > EVEN_FREE_MAX:
        raise ValueError(f"r_max must be at most {EVEN_FREE_MAX}")
    if method not in ("auto", "enumerate", "search"):
        raise ValueError(f"unknown method {method!r}")
    H = incidence(d)
    nullity = H.cols - gf2.rank(H)
    if nullity == 0 and method != "search":
        return EvenFreenessReport(d.b, None, d.b, "enumerate")
    if method == "enumerate" or (method == "auto" and nullity <= gf2.ENUMERATION_NULLITY):
        cw = gf2.minimum_weight_codeword(H, method="enumerate")
        conf = Configuration(d, tuple(cw.support()))
        return EvenFreenessReport(len(conf) - 1, conf, len(conf), "enumerate")
    cp, ci = H.T.csr()
    rp, ri = H.csr()
    for size in range(1, r_max + 2):
        status, witness, _ = _kernels.even_subset_search(cp, ci, rp, ri, H.rows, size, node_budget)
        if status == -1:
            raise BudgetExceeded(f"search budget exhausted at size {size}; "
                                 f"{size - 1}-even-freeness verified")
        if status == 1:
            conf = Configuration(d, tuple(int(j) for j in witness))
            return EvenFreenessReport(size - 1, conf, size, "search")
    return EvenFreenessReport(r_max + 1, None, r_max + 1, "search")


def _dual_graph(d: PairwiseBalancedDesign, blocks) -> tuple[dict[int, int], list[tuple[int, int]]] | None:
    """Intersection graph when every covered point lies in exactly two blocks."""
    counts: dict[int, list[int]] = {}
    for j in blocks:
        for x in d.blocks[j]:
            counts.setdefault(x, []).append(j)
    if any(len(v) != 2 for v in counts.values()):
        return None
    edges = sorted(tuple(sorted(v)) for v in counts.values())
    if len(set(edges)) != len(edges):
        return None
    deg = {j: 0 for j in blocks}
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    return deg, edges


def _bipartite(nodes, edges) -> bool:
    adj = {n: [] for n in nodes}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    color: dict[int, int] = {}
    for s in nodes:
        if s in color:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in color:
                    color[w] = 1 - color[u]
                    stack.append(w)
                elif color[w] == color[u]:
                    return False
    return True


def _matches(d: PairwiseBalancedDesign, blocks, kind: str, mu: int) -> bool:
    g = _dual_graph(d, blocks)
    if g is None:
        return False
    deg, edges = g
    n = len(blocks)
    if kind in ("pasch", "generalized_pasch"):
        return n == mu + 1 and len(edges) == comb(n, 2)
    # grid: K_{3,3}; double triangle: triangular prism (both cubic on 6 vertices)
    if n != 6 or any(x != 3 for x in deg.values()):
        return False
    bip = _bipartite(list(deg), edges)
    return bip if kind == "grid" else not bip


CONFIG_KINDS = ("pasch", "generalized_pasch", "grid", "double_triangle")


def find_configurations(d, kind: str, mu: int | None = None) -> list[tuple[int, ...]]:
    """Block-index tuples of every copy of the named configuration."""
    d = _design_of(d)
    if kind not in CONFIG_KINDS:
        raise ValueError(f"unknown configuration {kind!r}")
    sizes = d.block_sizes
    if kind == "generalized_pasch":
        mu = mu if mu is not None else (next(iter(sizes)) if len(sizes) == 1 else None)
        if mu is None or sizes != {mu}:
            raise ValueError(f"generalized Pasch needs an S(2,{mu},v)")
        size = mu + 1
    else:
        if sizes != {3}:
            raise ValueError(f"{kind} is defined for triple systems only")
        mu = 3
        size = 4 if kind == "pasch" else 6
    H = incidence(d)
    cp, ci = H.T.csr()
    rp, ri = H.csr()
    found = _kernels.enumerate_even_subsets(cp, ci, rp, ri, H.rows, size)
    uniq = sorted({tuple(int(x) for x in row) for row in found})
    return [c for c in uniq if _matches(d, c, kind, mu)]


def count_configurations(d, kind: str, mu: int | None = None) -> int:
    """Number of block subsets forming a Pasch, generalized Pasch, grid or double triangle."""
    return len(find_configurations(d, kind, mu))


# ------------------------------------------------------------ odd-point bound

@dataclass(frozen=True)
class OddPointResult:
    holds: bool
    min_value: int | None
    witness: tuple[int, ...]
    limit: int
    bound: int

    def to_record(self) -> str:
        return format_record({"holds": self.holds, "min_value": self.min_value,
                              "witness": list(self.witness), "limit": self.limit,
                              "bound": self.bound})


def odd_point_bound_check(d, limit: int, bound: int, budget: int = 10 ** 9) -> OddPointResult:
    """Minimum of ``|C| + odd(C)`` over all configurations with ``1 < |C| <= limit``.

    ``holds`` is true when that minimum is at least ``bound``; ranges with no
    configuration hold vacuously.

    Raises
    ------
    BudgetExceeded
        When the number of subsets to visit exceeds ``budget``.
    """
    d = _design_of(d)
    if limit > ODD_POINT_MAX:
        raise ValueError(f"limit must be at most {ODD_POINT_MAX}")
    if limit < 2 or d.b < 2:
        return OddPointResult(True, None, (), limit, bound)
    work = sum(comb(d.b, k) for k in range(1, limit + 1))
    if work > budget:
        raise BudgetExceeded(f"{work} subsets exceed budget {budget}")
    H = incidence(d)
    cp, ci = H.T.csr()
    best, wit = _kernels.min_size_plus_odd(cp, ci, H.rows, 2, limit)
    witness = tuple(int(x) for x in wit if x >= 0)
    return OddPointResult(best >= bound, int(best), witness, limit, bound)


# ------------------------------------------------------------------ 2-ranks

def _is_power_of_two(q: int) -> bool:
    return q >= 2 and q & (q - 1) == 0


def phi_e(m: int, q: int) -> int:
    """Hamada's closed form for the 2-rank of the line incidence of PG(m, q), q even.

    Evaluated term by term with ``l = -1`` and ``C(a, b) = 0`` for
    ``0 < a < b``.  ``m = 1`` is accepted so that AG(2, q) can be written as a
    difference.
    """
    if not _is_power_of_two(q):
        raise ValueError(f"q = {q} is not a power of 2")
    if m < 1:
        raise ValueError("m must be positive")
    t = q.bit_length() - 1
    total = 0
    for s in product(range(m), repeat=t):
        seq = s + (s[0],)
        term = 1
        for j in range(t):
            x = 2 * seq[j + 1] - seq[j]
            if not 0 <= x <= m + 1:
                term = 0
                break
            inner = sum((-1) ** i * comb(m + 1, i) * comb(m + x - 2 * i, m) for i in range(x // 2 + 1))
            term *= inner
        total += term
    return total


def hillebrandt_lower(v: int, mu: int) -> int:
    """``ceil(1/2 + sqrt(1/4 + (v-1)(v-mu)/mu))`` computed exactly."""
    num = (v - 1) * (v - mu)
    # smallest k with k(k-1) >= num/mu
    k = max(1, math.isqrt(max(num // mu, 0)))
    while k > 1 and (k - 1) * (k - 2) * mu >= num:
        k -= 1
    while k * (k - 1) * mu < num:
        k += 1
    return k


@dataclass(frozen=True)
class Prediction:
    name: str
    quantity: str          # "rank" or "gram_rank"
    low: int
    high: int
    computed: int

    @property
    def holds(self) -> bool:
        return self.low <= self.computed <= self.high

    def describe(self) -> str:
        want = str(self.low) if self.low == self.high else f"[{self.low}, {self.high}]"
        return f"{self.name}: {self.quantity} predicted {want}, computed {self.computed}"


@dataclass(frozen=True)
class RankReport:
    rank: int
    gram_rank: int
    predictions: tuple[Prediction, ...]

    @property
    def all_consistent(self) -> bool:
        return all(p.holds for p in self.predictions)

    @property
    def applicable(self) -> list[str]:
        return [p.name for p in self.predictions]

    def to_record(self) -> str:
        rec = {"rank": self.rank, "gram_rank": self.gram_rank}
        for p in self.predictions:
            rec[p.name] = f"predicted {p.low if p.low == p.high else (p.low, p.high)} " \
                          f"computed {p.computed} {'ok' if p.holds else 'VIOLATED'}"
        rec["all_consistent"] = self.all_consistent
        return format_record(rec)


def rank_predictions(d) -> RankReport:
    """Check every applicable 2-rank result against direct computation.

    Steiner 2-designs get the Hillebrandt bounds and the two Hamada parity
    criteria; AG/PG line designs additionally get their closed forms.  Any
    PBD gets the odd-replicate Gram-rank criterion.
    """
    geo = d if isinstance(d, GeometryDesign) else None
    d = _design_of(d)
    H = incidence(d)
    rk = gf2.rank(H)
    grk = gf2.gram_rank(H)
    v = d.v
    preds: list[Prediction] = []
    steiner = d.is_steiner() and verify_pbd(d).valid and d.mu < v
    if steiner:
        mu = d.mu
        preds.append(Prediction("hillebrandt_bounds", "rank", hillebrandt_lower(v, mu), v, rk))
        ratio = mu * (v - mu)
        if ratio % (mu - 1) == 0 and (ratio // (mu - 1)) % 2 == 1:
            preds.append(Prediction("hamada_full_rank", "rank", v, v, rk))
        if mu % 2 == 0 and (v - mu) % (mu - 1) == 0 and ((v - mu) // (mu - 1)) % 2 == 1:
            preds.append(Prediction("hamada_corank_one", "rank", v - 1, v - 1, rk))
        if mu == 3 and _is_power_of_two(v + 1) and v >= 7:
            m = (v + 1).bit_length() - 2
            lo = 2 ** (m + 1) - m - 2
            is_pg2 = geo is not None and geo.kind == "PG" and geo.q == 2
            preds.append(Prediction("doyen_binary_projective", "rank", lo, lo if is_pg2 else v, rk))
    if geo is not None:
        m, q = geo.m, geo.q
        if geo.kind == "PG":
            want = v - 1 if q % 2 else phi_e(m, q)
            preds.append(Prediction("projective_closed_form", "rank", want, want, rk))
        else:
            want = v if q % 2 else phi_e(m, q) - phi_e(m - 1, q)
            preds.append(Prediction("affine_closed_form", "rank", want, want, rk))
    rows_ok = bool(np.all(H.row_weights() > 1)) and bool(np.all(H.col_weights() > 1))
    if rows_ok and verify_pbd(d).valid:
        if replication_profile(d).odd_replicate:
            preds.append(Prediction("odd_replicate_gram", "gram_rank", 1, 1, grk))
        elif grk == 1:
            # criterion is an equivalence: gram rank 1 forces odd replication
            preds.append(Prediction("odd_replicate_gram", "gram_rank", 2, v, grk))
    return RankReport(rk, grk, tuple(preds))


# ----------------------------------------------------------------- degeneracy

@dataclass(frozen=True)
class DegeneracyReport:
    rows: int
    target_weight: int
    min_even_row_weight: int | None
    weight_counts: dict[int, int]
    subsets_checked: int

    @property
    def has_weight_d_even_combination(self) -> bool:
        return self.weight_counts.get(self.target_weight, 0) > 0

    @property
    def non_degenerate_conclusion(self) -> bool:
        return all(self.weight_counts.get(w, 0) == 0 for w in range(1, self.target_weight + 1))

    def to_record(self) -> str:
        return format_record({
            "rows": self.rows,
            "even_subsets": self.subsets_checked,
            "min_even_row_weight": self.min_even_row_weight,
            f"weight_{self.target_weight}_combinations": self.weight_counts.get(self.target_weight, 0),
            "non_degenerate": self.non_degenerate_conclusion,
        })


def degeneracy_audit(Hp: BinaryMatrix, d: int) -> DegeneracyReport:
    """Enumerate every sum of an even number of rows of ``Hp``.

    Reports the smallest nonzero weight and how many sums have each weight
    up to ``d``; the conclusion is non-degenerate iff no nonzero even sum
    has weight at most ``d``.
    """
    if Hp.rows > AUDIT_MAX_ROWS:
        raise BudgetExceeded(f"{Hp.rows} rows exceed the exhaustive limit of {AUDIT_MAX_ROWS}")
    counts = {w: 0 for w in range(1, d + 1)}
    best = None
    checked = 0
    for idx, wts in gf2.iter_span(np.asarray(Hp.words), Hp.cols):
        even = (np.bitwise_count(idx.astype(np.uint64)) & 1) == 0
        checked += int(even.sum())
        sel = wts[even]
        nz = sel[sel > 0]
        if nz.size:
            m = int(nz.min())
            best = m if best is None else min(best, m)
        small = nz[nz <= d]
        for w in small.tolist():
            counts[w] += 1
    return DegeneracyReport(Hp.rows, d, best, counts, checked)
