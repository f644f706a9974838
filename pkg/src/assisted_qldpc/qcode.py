"""
Parity-check matrices and quantum code parameters.

Two assistance modes are supported.  RQA turns a classical ``[n, k]`` code
with check matrix ``[I | A]`` into a ``[[2n-k, k]]`` code in which ``2(n-k)``
qubits suffer phase errors only.  EA uses a CSS-type construction that
consumes ``rank(H H^T)`` noiseless ebits.  A PEG generator supplies the
unstructured baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from assisted_qldpc import _kernels, gf2
from assisted_qldpc.designs import (PairwiseBalancedDesign, incidence, replication_profile,
                                    verify_pbd)
from assisted_qldpc.galois import GeometryDesign
from assisted_qldpc.gf2 import BinaryMatrix


def _design_of(d) -> PairwiseBalancedDesign:
    return d.design if isinstance(d, GeometryDesign) else d


# ------------------------------------------------------------- weight profile

def truncate2(x: Fraction) -> str:
    """Two decimals, truncated toward zero, trailing zeros dropped.

    This matches how the reference table prints mean weights
    (3402/82 = 41.487... appears as 41.48).
    """
    x = Fraction(x)
    hundredths = math.floor(x * 100)
    whole, frac = divmod(hundredths, 100)
    if frac == 0:
        return str(whole)
    return f"{whole}.{frac:02d}".rstrip("0")


@dataclass(frozen=True)
class WeightProfile:
    """Column/row weight statistics of a check matrix."""

    mean_col: Fraction
    mean_row: Fraction
    max_col: int
    max_row: int

    @classmethod
    def of(cls, H: BinaryMatrix) -> WeightProfile:
        nnz = H.nnz()
        return cls(Fraction(nnz, H.cols), Fraction(nnz, H.rows),
                   int(H.col_weights().max(initial=0)), int(H.row_weights().max(initial=0)))

    @property
    def mean(self) -> str:
        return f"{truncate2(self.mean_col)}/{truncate2(self.mean_row)}"

    @property
    def max(self) -> str:
        return f"{self.max_col}/{self.max_row}"


# ------------------------------------------------------------------ RQA codes

@dataclass(frozen=True)
class StandardFormCode:
    """Classical code with check matrix ``H = [I | A]``, ``A`` a design incidence."""

    H: BinaryMatrix
    n: int
    k: int
    A_design: PairwiseBalancedDesign
    d_design: int

    @property
    def A(self) -> BinaryMatrix:
        return incidence(self.A_design)


def build_standard_form(d) -> StandardFormCode:
    """``[I_v | incidence(d)]`` for a PBD of index one without singleton blocks.

    Raises
    ------
    ValueError
        If the design is invalid, trivial, or has a block of size 1.
    """
    d = _design_of(d)
    if d.v < 2 or d.b < 1:
        raise ValueError("trivial design")
    if min(d.block_sizes) < 2:
        raise ValueError("design has a block of size 1")
    if not verify_pbd(d).valid:
        raise ValueError("not a PBD of index one")
    H = gf2.hconcat(BinaryMatrix.identity(d.v), incidence(d))
    return StandardFormCode(H, d.v + d.b, d.b, d, 1 + min(d.block_sizes))


@dataclass(frozen=True)
class QuantumCodeParams:
    """Parameters of an assisted (or hypothetical) quantum code.

    ``mode`` is ``"RQA"``, ``"EA"`` or ``"H-CSS"``.  For EA codes
    ``dimension`` is the raw value ``2k - n + c`` and
    ``catalytic_dimension = 2k - n``.  For hypothetical CSS codes
    ``assist_count`` is the ebit count that would be needed, shown in
    parentheses.
    """

    mode: str
    length: int
    dimension: int
    assist_count: int
    design_distance: int | None
    catalytic_dimension: int | None = None
    catalytic: bool = True
    distance_source: str = ""

    @property
    def reported_dimension(self) -> int:
        if self.mode == "EA" and self.catalytic:
            return self.catalytic_dimension
        return self.dimension

    @property
    def rate(self) -> float:
        return self.reported_dimension / self.length

    @property
    def correctable(self) -> int | None:
        return None if self.design_distance is None else (self.design_distance - 1) // 2

    def with_catalytic(self, catalytic: bool) -> QuantumCodeParams:
        return QuantumCodeParams(self.mode, self.length, self.dimension, self.assist_count,
                                 self.design_distance, self.catalytic_dimension, catalytic,
                                 self.distance_source)

    def to_record(self) -> str:
        d = "?" if self.design_distance is None else self.design_distance
        if self.mode == "RQA":
            body = f"[[{self.length},{self.dimension}]] assist={self.assist_count}"
        elif self.mode == "EA":
            body = f"[[{self.length},{self.reported_dimension};{self.assist_count}]] " \
                   f"assist={self.assist_count} {'catalytic' if self.catalytic else 'raw'}"
        else:
            body = f"[[{self.length},{self.dimension}]] assist=({self.assist_count})"
        return f"{self.mode} {body} rate={self.rate:.4f} d={d}"


def rqa_params(c: StandardFormCode) -> QuantumCodeParams:
    """``[[2n-k, k]]`` with ``2(n-k)`` less-noisy qubits."""
    return QuantumCodeParams("RQA", 2 * c.n - c.k, c.k, 2 * (c.n - c.k), c.d_design,
                             distance_source="min block size + 1")


@dataclass(frozen=True)
class InformationCheckMatrices:
    H_Z: BinaryMatrix
    H_X: BinaryMatrix


def information_check_matrices(c: StandardFormCode) -> InformationCheckMatrices:
    """``H_Z = [A; 0]`` and ``H_X = [0; A]``, each ``2(n-k) x k``."""
    A = c.A
    Z = BinaryMatrix.zeros(A.rows, A.cols)
    return InformationCheckMatrices(gf2.vconcat(A, Z), gf2.vconcat(Z, A))


# ------------------------------------------------------------------- EA codes

def extend_addR(d) -> BinaryMatrix:
    """``[[I, H], [J, 0]]`` for an even-replicate Steiner 2-design.

    The result is the incidence of a PBD on ``v + 1`` points whose Gram
    matrix has rank 1.

    Raises
    ------
    ValueError
        If the design is not a Steiner 2-design or is odd-replicate (then
        ``incidence(d)`` already has Gram rank 1).
    """
    d = _design_of(d)
    if not d.is_steiner() or d.mu < 2 or not verify_pbd(d).valid:
        raise ValueError("extension needs a Steiner 2-design")
    prof = replication_profile(d)
    if not prof.even_replicate:
        raise ValueError("design is odd-replicate; use its incidence matrix unmodified")
    v = d.v
    top = gf2.hconcat(BinaryMatrix.identity(v), incidence(d))
    bottom = gf2.hconcat(BinaryMatrix.ones(1, v), BinaryMatrix.zeros(1, d.b))
    Hp = gf2.vconcat(top, bottom)
    if not verify_pbd(PairwiseBalancedDesign.from_incidence(Hp)).valid or gf2.gram_rank(Hp) != 1:
        raise AssertionError("extension failed its own postconditions")
    return Hp


def ea_design_distance(H: BinaryMatrix, fallback: int | None = None,
                       r_max: int = 7, node_budget: int = 50_000_000) -> tuple[int | None, str]:
    """Design distance of an EA check matrix with its provenance.

    When ``H`` is the incidence of a PBD, the smallest even configuration is
    searched for directly; otherwise (or over budget) ``fallback`` is used.
    """
    from assisted_qldpc.analysis import even_freeness

    if np.all(H.col_weights() >= 1):
        pbd = PairwiseBalancedDesign.from_incidence(H)
        if verify_pbd(pbd).valid:
            try:
                rep = even_freeness(pbd, r_max=r_max, node_budget=node_budget)
            except gf2.BudgetExceeded:
                rep = None
            if rep is not None and rep.exact:
                return rep.r + 1, "even-freeness + 1"
    return fallback, "theorem" if fallback is not None else "unknown"


def ea_params(H: BinaryMatrix, design_distance: int | None = None,
              catalytic: bool = True, distance_source: str = "given") -> QuantumCodeParams:
    """Entanglement-assisted parameters ``[[n, 2k - n + c; c]]``, ``c = rank(H H^T)``."""
    if H.nnz() == 0:
        raise ValueError("zero check matrix")
    n = H.cols
    k = n - gf2.rank(H)
    c = gf2.gram_rank(H)
    return QuantumCodeParams("EA", n, 2 * k - n + c, c, design_distance, 2 * k - n,
                             catalytic, distance_source)


def hypothetical_params(H: BinaryMatrix, design_distance: int | None = None) -> QuantumCodeParams:
    """``[[n, 2k - n]]`` as if any check matrix could be used in the CSS construction."""
    n = H.cols
    k = n - gf2.rank(H)
    return QuantumCodeParams("H-CSS", n, 2 * k - n, gf2.gram_rank(H), design_distance,
                             distance_source="given" if design_distance is not None else "")


def rate_gain(n: int, k: int) -> Fraction:
    """``2(n-k)^2 / (n(2n-k))``, the rate of RQA minus that of the CSS code."""
    if not 0 <= k < n:
        raise ValueError("need n > k >= 0")
    return Fraction(2 * (n - k) ** 2, n * (2 * n - k))


# ------------------------------------------------------------------------ PEG

def peg_construct(check_count: int, var_count: int, col_weight: int, seed: int = 0) -> BinaryMatrix:
    """Progressive edge growth with fixed column weight.

    Each new edge of a variable goes to a check that is unreachable, or else
    farthest, in the current Tanner graph; ties go to the lowest current
    check degree and then to a seeded random pick.

    Raises
    ------
    ValueError
        When ``col_weight`` exceeds ``check_count`` or is not positive.
    """
    if col_weight < 1 or col_weight > check_count or var_count < 1:
        raise ValueError(f"cannot place weight-{col_weight} columns on {check_count} checks")
    rng = np.random.default_rng(seed)
    var_checks = np.zeros((var_count, col_weight), dtype=np.int64)
    var_deg = np.zeros(var_count, dtype=np.int64)
    check_vars = np.zeros((check_count, var_count), dtype=np.int64)
    check_deg = np.zeros(check_count, dtype=np.int64)
    for v in range(var_count):
        for _ in range(col_weight):
            if var_deg[v] == 0:
                cand = np.arange(check_count)
            else:
                dist = _kernels.check_distances(v, var_checks, var_deg, check_vars, check_deg, check_count)
                far = np.flatnonzero(dist < 0)
                cand = far if far.size else np.flatnonzero(dist == dist.max())
            low = cand[check_deg[cand] == check_deg[cand].min()]
            c = int(low[rng.integers(low.size)]) if low.size > 1 else int(low[0])
            var_checks[v, var_deg[v]] = c
            var_deg[v] += 1
            check_vars[c, check_deg[c]] = v
            check_deg[c] += 1
    return BinaryMatrix.from_column_supports(check_count, var_count,
                                             [sorted(r) for r in var_checks.tolist()])
