"""
Pairwise balanced designs of index one.

A design is a point count ``v`` and a list of blocks (sorted tuples of point
indices).  Incidence matrices put points on rows and blocks on columns, in
block-list order.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from assisted_qldpc.gf2 import BinaryMatrix


@dataclass(frozen=True)
class PairwiseBalancedDesign:
    """Point count plus block list; validity is checked by :func:`verify_pbd`."""

    v: int
    blocks: tuple[tuple[int, ...], ...]

    def __init__(self, v: int, blocks: Iterable[Iterable[int]]):
        object.__setattr__(self, "v", int(v))
        object.__setattr__(self, "blocks", tuple(tuple(sorted(int(x) for x in b)) for b in blocks))

    @property
    def b(self) -> int:
        return len(self.blocks)

    @property
    def block_sizes(self) -> frozenset[int]:
        return frozenset(len(b) for b in self.blocks)

    K = block_sizes

    def is_steiner(self) -> bool:
        return len(self.block_sizes) == 1

    @property
    def mu(self) -> int:
        """Block size of a Steiner 2-design."""
        if not self.is_steiner():
            raise ValueError(f"mixed block sizes {sorted(self.block_sizes)}")
        return next(iter(self.block_sizes))

    def canonical(self) -> PairwiseBalancedDesign:
        return PairwiseBalancedDesign(self.v, sorted(self.blocks))

    @classmethod
    def from_incidence(cls, M: BinaryMatrix) -> PairwiseBalancedDesign:
        """Rows become points, columns become blocks (order kept)."""
        return cls(M.rows, M.col_supports())


@dataclass(frozen=True)
class ReplicationProfile:
    counts: tuple[int, ...]

    @property
    def equireplicate(self) -> bool:
        return len(set(self.counts)) <= 1

    @property
    def odd_replicate(self) -> bool:
        return all(r % 2 == 1 for r in self.counts)

    @property
    def even_replicate(self) -> bool:
        return all(r % 2 == 0 for r in self.counts)

    @property
    def replication(self) -> int | None:
        """Common replication number, or ``None`` when not equireplicate."""
        return self.counts[0] if self.counts and self.equireplicate else None


@dataclass(frozen=True)
class PbdReport:
    valid: bool
    K: frozenset[int]
    profile: ReplicationProfile
    uncovered: tuple[tuple[int, int], ...] = ()
    repeated: tuple[tuple[int, int], ...] = ()
    bad_points: tuple[int, ...] = field(default=())

    @property
    def violations(self) -> list[str]:
        out = [f"pair {p} uncovered" for p in self.uncovered]
        out += [f"pair {p} covered more than once" for p in self.repeated]
        out += [f"point {x} out of range" for x in self.bad_points]
        return out


def replication_profile(d: PairwiseBalancedDesign) -> ReplicationProfile:
    counts = np.zeros(d.v, dtype=np.int64)
    for blk in d.blocks:
        for x in blk:
            if 0 <= x < d.v:
                counts[x] += 1
    return ReplicationProfile(tuple(counts.tolist()))


def verify_pbd(d: PairwiseBalancedDesign) -> PbdReport:
    """Check that every pair of distinct points lies in exactly one block.

    Violations are reported rather than raised.
    """
    v = d.v
    bad = sorted({x for blk in d.blocks for x in blk if not 0 <= x < v}
                 | {x for blk in d.blocks for x in blk if blk.count(x) > 1})
    cover = np.zeros((v, v), dtype=np.int64)
    for blk in d.blocks:
        idx = np.array([x for x in set(blk) if 0 <= x < v], dtype=np.int64)
        if idx.size > 1:
            cover[np.ix_(idx, idx)] += 1
    iu = np.triu_indices(v, 1)
    counts = cover[iu]
    uncovered = tuple((int(a), int(b)) for a, b, c in zip(*iu, counts) if c == 0)
    repeated = tuple((int(a), int(b)) for a, b, c in zip(*iu, counts) if c > 1)
    valid = not uncovered and not repeated and not bad
    return PbdReport(valid, d.block_sizes, replication_profile(d), uncovered, repeated, tuple(bad))


def bose_sts(v: int) -> PairwiseBalancedDesign:
    """Steiner triple system of order ``v = 6t + 3`` by the Bose construction.

    Points ``(x, i)`` of ``Z_{2t+1} x Z_3`` are flattened to ``i*(2t+1) + x``;
    the idempotent commutative quasigroup is ``x o y = (x + y)(t + 1)``.
    """
    if v < 3 or v % 6 != 3:
        raise ValueError(f"Bose construction needs v = 3 (mod 6), got {v}")
    n = v // 3
    t = (n - 1) // 2

    def pt(x, i):
        return (i % 3) * n + x

    blocks = [(pt(x, 0), pt(x, 1), pt(x, 2)) for x in range(n)]
    for x in range(n):
        for y in range(x + 1, n):
            z = (x + y) * (t + 1) % n
            for i in range(3):
                blocks.append((pt(x, i), pt(y, i), pt(z, i + 1)))
    d = PairwiseBalancedDesign(v, blocks).canonical()
    if not verify_pbd(d).valid:
        raise AssertionError(f"Bose construction produced an invalid STS({v})")
    return d


def incidence(d: PairwiseBalancedDesign) -> BinaryMatrix:
    """Points-by-blocks incidence matrix in block-list order."""
    d = getattr(d, "design", d)
    return BinaryMatrix.from_column_supports(d.v, d.b, d.blocks)


def export_alist(M: BinaryMatrix) -> str:
    """Write ``M`` in MacKay's alist layout (no zero padding)."""
    cols = M.col_supports()
    rows = M.row_supports()
    lines = [
        f"{M.cols} {M.rows}",
        f"{max((len(c) for c in cols), default=0)} {max((len(r) for r in rows), default=0)}",
        " ".join(str(len(c)) for c in cols),
        " ".join(str(len(r)) for r in rows),
    ]
    lines += [" ".join(str(i + 1) for i in c) for c in cols]
    lines += [" ".join(str(j + 1) for j in r) for r in rows]
    return "\n".join(lines) + "\n"


class AlistError(ValueError):
    """Malformed alist text."""


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise AlistError(f"line {lineno}: {exc}") from None


def import_alist(text: str) -> BinaryMatrix:
    """Parse alist text.  Zero padding in the index lists is accepted.

    Raises
    ------
    AlistError
        On malformed input, out-of-range indices, or inconsistent
        column/row lists.
    """
    # empty index lists are written as blank lines, so only trailing blanks are dropped
    lines = text.rstrip().splitlines()
    if len(lines) < 4:
        raise AlistError("truncated header")
    head = _ints(lines[0], 1)
    if len(head) != 2 or min(head) < 0:
        raise AlistError("first line must be 'N M'")
    n, m = head
    maxes = _ints(lines[1], 2)
    if len(maxes) != 2:
        raise AlistError("second line must hold two maximum degrees")
    col_deg = _ints(lines[2], 3)
    row_deg = _ints(lines[3], 4)
    if len(col_deg) != n or len(row_deg) != m:
        raise AlistError("degree list lengths do not match N M")
    # trailing empty lists may have been stripped; degree checks catch real truncation
    lines += [""] * (4 + n + m - len(lines))
    col_sets = []
    for j in range(n):
        idx = [i for i in _ints(lines[4 + j], 5 + j) if i != 0]
        if any(not 1 <= i <= m for i in idx):
            raise AlistError(f"column {j + 1}: row index out of range")
        if len(idx) != col_deg[j] or len(set(idx)) != len(idx):
            raise AlistError(f"column {j + 1}: degree mismatch")
        col_sets.append(sorted(i - 1 for i in idx))
    row_sets = []
    for i in range(m):
        lineno = 4 + n + i
        idx = [j for j in _ints(lines[lineno], lineno + 1) if j != 0]
        if any(not 1 <= j <= n for j in idx):
            raise AlistError(f"row {i + 1}: column index out of range")
        if len(idx) != row_deg[i] or len(set(idx)) != len(idx):
            raise AlistError(f"row {i + 1}: degree mismatch")
        row_sets.append(sorted(j - 1 for j in idx))
    if maxes != [max(col_deg, default=0), max(row_deg, default=0)]:
        raise AlistError("maximum degrees disagree with degree lists")
    M = BinaryMatrix.from_column_supports(m, n, col_sets)
    if M.row_supports() != row_sets:
        raise AlistError("row lists disagree with column lists")
    return M


def read_alist(path) -> BinaryMatrix:
    with open(path) as fh:
        return import_alist(fh.read())


def write_alist(M: BinaryMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(export_alist(M))


def block_count(v: int, mu: int) -> int:
    """Number of blocks of an S(2, mu, v)."""
    num, den = v * (v - 1), mu * (mu - 1)
    if num % den:
        raise ValueError(f"no S(2,{mu},{v}) exists")
    return num // den


def points_of(blocks: Sequence[Sequence[int]]) -> set[int]:
    return {x for b in blocks for x in b}
