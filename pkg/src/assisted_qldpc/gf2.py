"""
Dense GF(2) linear algebra on bit-packed rows.

Rows are packed little-endian into ``uint64`` words: entry ``(i, j)`` lives in
bit ``j % 64`` of word ``j // 64`` of row ``i``.  Every matrix and vector is
immutable after construction; operations that eliminate work on private
copies.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from assisted_qldpc import _kernels

WORD = 64
_ONE = np.uint64(1)

# Exhaustive codeword enumeration is used up to this nullity (2**24 codewords).
ENUMERATION_NULLITY = 24
_TABLE_BITS = 16


class BudgetExceeded(RuntimeError):
    """A bounded search gave up before reaching a conclusion."""


def _nwords(n: int) -> int:
    return max(1, (n + WORD - 1) // WORD)


def _pack(dense: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into little-endian uint64 row words."""
    dense = np.asarray(dense, dtype=np.uint8)
    rows, cols = dense.shape
    nw = _nwords(cols)
    padded = np.zeros((rows, nw * WORD), dtype=np.uint8)
    padded[:, :cols] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64).reshape(rows, nw)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    rows = words.shape[0]
    if rows == 0:
        return np.zeros((0, cols), dtype=np.uint8)
    bits = np.unpackbits(words.view(np.uint8).reshape(rows, -1), axis=1, bitorder="little")
    return bits[:, :cols]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.uint64)
    a.setflags(write=False)
    return a


def _popcount(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


class BinaryVector:
    """Immutable packed vector over GF(2)."""

    __slots__ = ("length", "words")

    def __init__(self, length: int, words: np.ndarray):
        words = np.asarray(words, dtype=np.uint64).reshape(-1)
        if words.shape[0] != _nwords(length):
            raise ValueError("word count does not match length")
        self.length = int(length)
        self.words = _frozen(words)

    @classmethod
    def from_dense(cls, bits: Iterable[int]) -> BinaryVector:
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("expected a 1-D array")
        if np.any((arr != 0) & (arr != 1)):
            raise ValueError("entries must be 0 or 1")
        return cls(arr.shape[0], _pack(arr.reshape(1, -1))[0])

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> BinaryVector:
        dense = np.zeros(length, dtype=np.uint8)
        idx = np.fromiter(support, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= length):
            raise IndexError("support index out of range")
        dense[idx] = 1
        return cls(length, _pack(dense.reshape(1, -1))[0])

    @classmethod
    def zeros(cls, length: int) -> BinaryVector:
        return cls(length, np.zeros(_nwords(length), dtype=np.uint64))

    def to_dense(self) -> np.ndarray:
        return _unpack(self.words.reshape(1, -1), self.length)[0]

    def weight(self) -> int:
        return int(_popcount(self.words))

    def support(self) -> list[int]:
        return np.flatnonzero(self.to_dense()).tolist()

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return int((self.words[j // WORD] >> np.uint64(j % WORD)) & _ONE)

    def __add__(self, other: BinaryVector) -> BinaryVector:
        if self.length != other.length:
            raise ValueError("length mismatch")
        return BinaryVector(self.length, self.words ^ other.words)

    __xor__ = __add__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryVector):
            return NotImplemented
        return self.length == other.length and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.length, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryVector({''.join(map(str, self.to_dense()))})"


class BinaryMatrix:
    """Immutable dense matrix over GF(2), rows packed into 64-bit words."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        words = np.asarray(words, dtype=np.uint64)
        if words.shape != (rows, _nwords(cols)):
            raise ValueError(f"expected words of shape {(rows, _nwords(cols))}, got {words.shape}")
        self.rows = int(rows)
        self.cols = int(cols)
        self.words = _frozen(words)

    @classmethod
    def from_dense(cls, dense) -> BinaryMatrix:
        arr = np.asarray(dense)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        if arr.size and np.any((arr != 0) & (arr != 1)):
            raise ValueError("entries must be 0 or 1")
        return cls(arr.shape[0], arr.shape[1], _pack(arr.astype(np.uint8)))

    @classmethod
    def from_row_supports(cls, rows: int, cols: int, supports: Sequence[Iterable[int]]) -> BinaryMatrix:
        if len(supports) != rows:
            raise ValueError("need one support per row")
        dense = np.zeros((rows, cols), dtype=np.uint8)
        for i, supp in enumerate(supports):
            idx = list(supp)
            if idx and (min(idx) < 0 or max(idx) >= cols):
                raise IndexError(f"column index out of range in row {i}")
            dense[i, idx] = 1
        return cls(rows, cols, _pack(dense))

    @classmethod
    def from_column_supports(cls, rows: int, cols: int, supports: Sequence[Iterable[int]]) -> BinaryMatrix:
        return cls.from_row_supports(cols, rows, supports).transpose()

    @classmethod
    def identity(cls, n: int) -> BinaryMatrix:
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BinaryMatrix:
        return cls(rows, cols, np.zeros((rows, _nwords(cols)), dtype=np.uint64))

    @classmethod
    def ones(cls, rows: int, cols: int) -> BinaryMatrix:
        return cls.from_dense(np.ones((rows, cols), dtype=np.uint8))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def to_dense(self) -> np.ndarray:
        return _unpack(self.words, self.cols)

    def transpose(self) -> BinaryMatrix:
        return BinaryMatrix.from_dense(self.to_dense().T)

    @property
    def T(self) -> BinaryMatrix:
        return self.transpose()

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return int((self.words[i, j // WORD] >> np.uint64(j % WORD)) & _ONE)

    def row(self, i: int) -> BinaryVector:
        return BinaryVector(self.cols, self.words[i])

    def nnz(self) -> int:
        return int(_popcount(self.words).sum())

    def row_weights(self) -> np.ndarray:
        return _popcount(self.words)

    def col_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0, dtype=np.int64)

    def row_supports(self) -> list[list[int]]:
        dense = self.to_dense()
        return [np.flatnonzero(r).tolist() for r in dense]

    def col_supports(self) -> list[list[int]]:
        dense = self.to_dense()
        return [np.flatnonzero(c).tolist() for c in dense.T]

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Row pointer and column index arrays of the nonzero pattern."""
        dense = self.to_dense()
        r, c = np.nonzero(dense)
        ptr = np.zeros(self.rows + 1, dtype=np.int64)
        np.cumsum(np.bincount(r, minlength=self.rows), out=ptr[1:])
        return ptr, c.astype(np.int64)

    def mul_vector(self, v: BinaryVector) -> BinaryVector:
        """Return ``M v^T`` as a vector of length ``rows``."""
        if v.length != self.cols:
            raise ValueError(f"vector length {v.length} does not match {self.cols} columns")
        parity = _popcount(self.words & v.words) & 1
        return BinaryVector.from_dense(parity)

    def __matmul__(self, other: BinaryMatrix) -> BinaryMatrix:
        if self.cols != other.rows:
            raise ValueError("inner dimensions differ")
        prod = self.to_dense().astype(np.int64) @ other.to_dense().astype(np.int64)
        return BinaryMatrix.from_dense(prod & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


def _eliminate(words: np.ndarray, ncols: int, reduced: bool = False) -> tuple[np.ndarray, list[int]]:
    """Gaussian elimination on a private copy of packed rows."""
    W = np.array(words, dtype=np.uint64, copy=True)
    nrows = W.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        w = c // WORD
        bit = _ONE << np.uint64(c % WORD)
        hits = np.flatnonzero(W[r:, w] & bit)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            W[[r, p]] = W[[p, r]]
        if reduced:
            mask = (W[:, w] & bit) != 0
            mask[r] = False
        else:
            mask = np.zeros(nrows, dtype=bool)
            mask[r + 1:] = (W[r + 1:, w] & bit) != 0
        W[mask] ^= W[r]
        pivots.append(c)
        r += 1
    return W, pivots


def rank(M: BinaryMatrix) -> int:
    """Row rank of ``M`` over GF(2)."""
    if M.rows == 0 or M.cols == 0:
        return 0
    if M.cols > M.rows * 4 and M.rows > 0:
        # fewer pivot columns to scan on the tall side
        return len(_eliminate(M.T.words, M.rows)[1])
    return len(_eliminate(M.words, M.cols)[1])


def gram(M: BinaryMatrix) -> BinaryMatrix:
    """``M M^T`` over GF(2)."""
    W = M.words
    out = np.empty((M.rows, M.rows), dtype=np.uint8)
    for i in range(M.rows):
        out[i] = _popcount(W & W[i]) & 1
    return BinaryMatrix.from_dense(out)


def gram_rank(M: BinaryMatrix) -> int:
    """GF(2) rank of ``M M^T``."""
    return rank(gram(M))


def rref(M: BinaryMatrix) -> tuple[BinaryMatrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    W, pivots = _eliminate(M.words, M.cols, reduced=True)
    return BinaryMatrix(M.rows, M.cols, W), pivots


def nullspace_basis(M: BinaryMatrix) -> list[BinaryVector]:
    """Basis of ``{x : M x^T = 0}``; it has ``cols - rank(M)`` vectors."""
    W, pivots = _eliminate(M.words, M.cols, reduced=True)
    R = _unpack(W[: len(pivots)], M.cols)
    pivot_set = set(pivots)
    basis = []
    for f in range(M.cols):
        if f in pivot_set:
            continue
        x = np.zeros(M.cols, dtype=np.uint8)
        x[f] = 1
        for i, p in enumerate(pivots):
            x[p] = R[i, f]
        basis.append(BinaryVector.from_dense(x))
    return basis


def _check_concat(blocks: Sequence[BinaryMatrix]) -> None:
    if not blocks:
        raise ValueError("nothing to concatenate")


def hconcat(*blocks: BinaryMatrix) -> BinaryMatrix:
    """Place matrices side by side."""
    _check_concat(blocks)
    rows = {b.rows for b in blocks}
    if len(rows) != 1:
        raise ValueError(f"row counts differ: {sorted(rows)}")
    return BinaryMatrix.from_dense(np.hstack([b.to_dense() for b in blocks]))


def vconcat(*blocks: BinaryMatrix) -> BinaryMatrix:
    """Stack matrices vertically."""
    _check_concat(blocks)
    cols = {b.cols for b in blocks}
    if len(cols) != 1:
        raise ValueError(f"column counts differ: {sorted(cols)}")
    return BinaryMatrix(sum(b.rows for b in blocks), blocks[0].cols,
                        np.vstack([b.words for b in blocks]))


def iter_span(gens: np.ndarray, ncols: int):
    """Yield ``(combination_index, weight)`` chunks covering the whole span.

    Bit ``i`` of a combination index says whether generator row ``i`` takes
    part.  The low 16 generators are tabulated once; higher ones are folded
    in one chunk at a time.
    """
    k = gens.shape[0]
    nw = _nwords(ncols)
    lo_bits = min(k, _TABLE_BITS)
    table = np.zeros((1 << lo_bits, nw), dtype=np.uint64)
    for i in range(lo_bits):
        size = 1 << i
        table[size: 2 * size] = table[:size] ^ gens[i]
    lo_idx = np.arange(1 << lo_bits, dtype=np.int64)
    for hi in range(1 << (k - lo_bits)):
        hi_word = np.zeros(nw, dtype=np.uint64)
        for j in range(k - lo_bits):
            if hi >> j & 1:
                hi_word ^= gens[lo_bits + j]
        yield lo_idx | (hi << lo_bits), _popcount(table ^ hi_word)


def span_min_weight(gens: np.ndarray, ncols: int, keep=None) -> tuple[int | None, int]:
    """Smallest weight among nonzero combinations of packed generator rows.

    ``keep`` optionally filters combination indices; it receives an int64
    index array and returns a boolean mask.  Returns
    ``(weight, combination_index)`` or ``(None, 0)`` when no admissible
    nonzero combination exists.
    """
    best, best_idx = None, 0
    if gens.shape[0] == 0:
        return best, best_idx
    for idx, wts in iter_span(gens, ncols):
        ok = wts > 0
        if keep is not None:
            ok &= keep(idx)
        if not ok.any():
            continue
        cand = np.where(ok, wts, np.iinfo(np.int64).max)
        j = int(np.argmin(cand))
        if best is None or cand[j] < best:
            best, best_idx = int(cand[j]), int(idx[j])
    return best, best_idx


def combination(gens: np.ndarray, ncols: int, index: int) -> BinaryVector:
    acc = np.zeros(gens.shape[1], dtype=np.uint64)
    for i in range(gens.shape[0]):
        if index >> i & 1:
            acc ^= gens[i]
    return BinaryVector(ncols, acc)


def minimum_weight_codeword(M: BinaryMatrix, budget: int = 16, method: str = "auto") -> BinaryVector | None:
    """A nonzero codeword of smallest weight in the code with parity checks ``M``.

    ``method`` is ``"enumerate"`` (span of the nullspace basis, nullity at
    most 24), ``"search"`` (increasing-weight support search up to weight
    ``budget``) or ``"auto"``.  Returns ``None`` for the zero code.

    Raises
    ------
    BudgetExceeded
        If the support search finds no codeword of weight ``<= budget``.
    """
    if method not in ("auto", "enumerate", "search"):
        raise ValueError(f"unknown method {method!r}")
    nullity = M.cols - rank(M)
    if nullity == 0:
        return None
    if method == "enumerate" or (method == "auto" and nullity <= ENUMERATION_NULLITY):
        if nullity > ENUMERATION_NULLITY:
            raise BudgetExceeded(f"nullity {nullity} too large for enumeration")
        basis = nullspace_basis(M)
        gens = np.vstack([b.words for b in basis])
        _, idx = span_min_weight(gens, M.cols)
        return combination(gens, M.cols, idx)
    col_ptr, col_idx = M.T.csr()
    row_ptr, row_idx = M.csr()
    for size in range(1, budget + 1):
        status, witness, _ = _kernels.even_subset_search(
            col_ptr, col_idx, row_ptr, row_idx, M.rows, size, -1)
        if status == 1:
            return BinaryVector.from_support(M.cols, witness.tolist())
    raise BudgetExceeded(f"no codeword of weight <= {budget}")


def min_distance(M: BinaryMatrix, budget: int = 16, method: str = "auto") -> int | None:
    """Minimum distance of the code ``{x : M x^T = 0}`` (``None`` for the zero code).

    Raises
    ------
    BudgetExceeded
        When the weight budget is exhausted without finding a codeword.
    """
    cw = minimum_weight_codeword(M, budget, method)
    return None if cw is None else cw.weight()
