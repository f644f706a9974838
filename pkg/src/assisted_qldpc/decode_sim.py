"""
Syndrome-domain sum-product decoding and Monte Carlo block error rates.

Each trial draws an error ``e`` from independent per-position flips,
decodes ``s = H e^T`` and succeeds only if the estimate equals ``e``
exactly.  Trial randomness is keyed on ``(seed, grid index, trial index)``
so results do not depend on how trials are spread over threads.
"""

from __future__ import annotations

import csv
import io
import os
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from itertools import combinations

import numpy as np

from assisted_qldpc import _kernels
from assisted_qldpc.gf2 import BinaryMatrix, BinaryVector

MAX_ITERATIONS = 100
LLR_CLAMP = 30.0
FIRST_BATCH = 16
MAX_BATCH = 1024


# ------------------------------------------------------------------- channel

@dataclass(frozen=True)
class ChannelModel:
    """Independent bit flips with per-position crossover probabilities."""

    p: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        if p.ndim != 1 or np.any(p < 0) or np.any(p > 0.5) or np.any(np.isnan(p)):
            raise ValueError("crossover probabilities must lie in [0, 0.5]")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    @classmethod
    def uniform(cls, n: int, p: float) -> ChannelModel:
        return cls(np.full(n, float(p)))

    @classmethod
    def split(cls, n: int, n_aux: int, p: float, p_aux: float) -> ChannelModel:
        """``p_aux`` on the first ``n_aux`` positions, ``p`` on the rest."""
        if not 0 <= n_aux <= n:
            raise ValueError("n_aux out of range")
        probs = np.full(n, float(p))
        probs[:n_aux] = p_aux
        return cls(probs)

    def __len__(self) -> int:
        return self.p.shape[0]

    def llr(self, clamp: float = LLR_CLAMP) -> np.ndarray:
        """``log((1-p)/p)``, clamped; ``p = 0`` maps to ``+clamp``."""
        with np.errstate(divide="ignore"):
            out = np.log1p(-self.p) - np.log(self.p)
        return np.clip(out, -clamp, clamp)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return (rng.random(len(self)) < self.p).astype(np.uint8)


# ------------------------------------------------------------------- decoder

class SumProductDecoder:
    """Flooding sum-product decoder bound to one check matrix.

    Edges are numbered check by check; ``var_edges`` lists them grouped by
    variable so both half-iterations walk contiguous ranges.
    """

    def __init__(self, H: BinaryMatrix, max_iterations: int = MAX_ITERATIONS,
                 llr_clamp: float = LLR_CLAMP):
        self.H = H
        self.max_iterations = int(max_iterations)
        self.llr_clamp = float(llr_clamp)
        self.check_ptr, self.edge_var = H.csr()
        order = np.argsort(self.edge_var, kind="stable")
        counts = np.bincount(self.edge_var, minlength=H.cols)
        self.var_ptr = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
        self.var_edges = order.astype(np.int64)

    def syndromes(self, errors: np.ndarray) -> np.ndarray:
        """Rows of ``errors`` mapped to ``H e^T`` (uint8)."""
        e = np.ascontiguousarray(errors, dtype=np.uint8)
        acc = np.zeros((e.shape[0], self.H.rows), dtype=np.uint8)
        for c in range(self.H.rows):
            cols = self.edge_var[self.check_ptr[c]:self.check_ptr[c + 1]]
            acc[:, c] = np.bitwise_xor.reduce(e[:, cols], axis=1) if cols.size else 0
        return acc

    def decode_batch(self, syndromes: np.ndarray, prior: np.ndarray):
        s = np.ascontiguousarray(syndromes, dtype=np.uint8)
        if s.ndim != 2 or s.shape[1] != self.H.rows or prior.shape[0] != self.H.cols:
            raise ValueError("dimension mismatch")
        return _kernels.bp_decode_batch(self.check_ptr, self.edge_var, self.var_ptr, self.var_edges,
                                        s, np.ascontiguousarray(prior, dtype=np.float64),
                                        self.max_iterations, self.llr_clamp)


@dataclass(frozen=True)
class DecodeResult:
    estimate: BinaryVector
    converged: bool
    iterations: int


def sum_product_decode(dec: SumProductDecoder, syndrome: BinaryVector, ch: ChannelModel) -> DecodeResult:
    """Decode one syndrome; stops as soon as the hard decision matches it."""
    if len(syndrome) != dec.H.rows or len(ch) != dec.H.cols:
        raise ValueError("dimension mismatch")
    est, conv, it = dec.decode_batch(syndrome.to_dense()[None, :], ch.llr(dec.llr_clamp))
    return DecodeResult(BinaryVector.from_dense(est[0]), bool(conv[0]), int(it[0]))


def ml_syndrome_decode(H: BinaryMatrix, syndrome: BinaryVector) -> BinaryVector:
    """Minimum-weight error with the given syndrome, lexicographically least support.

    Raises
    ------
    ValueError
        If the instance is too large (more than 25 columns and 20 rows) or the
        syndrome is not in the column space.
    """
    if H.cols > 25 and H.rows > 20:
        raise ValueError("instance too large for exhaustive syndrome decoding")
    if len(syndrome) != H.rows:
        raise ValueError("dimension mismatch")
    weights = 1 << np.arange(H.rows, dtype=object)
    cols = [int(sum(weights[i] for i in sup)) for sup in H.col_supports()]
    target = int(sum(weights[i] for i in syndrome.support()))
    for w in range(H.cols + 1):
        for sup in combinations(range(H.cols), w):
            acc = 0
            for j in sup:
                acc ^= cols[j]
            if acc == target:
                return BinaryVector.from_support(H.cols, sup)
    raise ValueError("syndrome not in the column space of H")


# ---------------------------------------------------------------- simulation

def wilson_interval(errors: int, trials: int, alpha: float = 0.05) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    from statsmodels.stats.proportion import proportion_confint

    lo, hi = proportion_confint(errors, trials, alpha=alpha, method="wilson")
    return float(max(lo, 0.0)), float(min(hi, 1.0))


@dataclass(frozen=True)
class BlerPoint:
    p: float
    trials: int
    block_errors: int
    ci95: tuple[float, float]
    seed: int
    p_aux: float | None = None

    @property
    def bler(self) -> float:
        return self.block_errors / self.trials if self.trials else 0.0


@dataclass(frozen=True)
class SimConfig:
    """Grid and stop rule: stop at ``min_errors`` block errors or ``max_trials`` trials."""

    grid: tuple[float, ...]
    min_errors: int = 100
    max_trials: int = 10_000
    seed: int = 0
    threads: int = 1
    max_iterations: int = MAX_ITERATIONS
    llr_clamp: float = LLR_CLAMP

    def __post_init__(self):
        g = tuple(float(x) for x in self.grid)
        object.__setattr__(self, "grid", g)
        if not g or any(b <= a for a, b in zip(g, g[1:])):
            raise ValueError("grid must be nonempty and strictly increasing")
        if self.min_errors < 1 or self.max_trials < 1 or self.threads < 1:
            raise ValueError("min_errors, max_trials and threads must be positive")


def default_threads() -> int:
    return max(1, int(os.environ.get("QLDPC_THREADS", "1")))


def _run_trials(dec: SumProductDecoder, ch: ChannelModel, prior: np.ndarray,
                seed: int, grid_idx: int, start: int, stop: int) -> np.ndarray:
    """Failure flags for trials ``start .. stop-1``."""
    errs = np.empty((stop - start, len(ch)), dtype=np.uint8)
    for i, t in enumerate(range(start, stop)):
        errs[i] = ch.sample(np.random.default_rng([seed, grid_idx, t]))
    est, _, _ = dec.decode_batch(dec.syndromes(errs), prior)
    return np.any(est != errs, axis=1)


def simulate_bler(H: BinaryMatrix, ch: ChannelModel, cfg: SimConfig, grid_idx: int = 0,
                  decoder: SumProductDecoder | None = None,
                  pool: ThreadPoolExecutor | None = None) -> BlerPoint:
    """Estimate the block error rate at one channel.

    Trials run in batches; the count is then cut back to the exact trial at
    which the error quota was met, so the answer is independent of batching
    and threading.
    """
    dec = decoder or SumProductDecoder(H, cfg.max_iterations, cfg.llr_clamp)
    prior = ch.llr(dec.llr_clamp)
    fails = []
    done = errors = 0
    batch_size = FIRST_BATCH
    while done < cfg.max_trials and errors < cfg.min_errors:
        span = min(batch_size * cfg.threads, cfg.max_trials - done)
        batch_size = min(2 * batch_size, MAX_BATCH)
        cuts = np.linspace(done, done + span, min(cfg.threads, span) + 1).astype(int)
        jobs = list(zip(cuts[:-1], cuts[1:]))
        if pool is not None and len(jobs) > 1:
            parts = list(pool.map(lambda ab: _run_trials(dec, ch, prior, cfg.seed, grid_idx, *ab), jobs))
        else:
            parts = [_run_trials(dec, ch, prior, cfg.seed, grid_idx, a, b) for a, b in jobs]
        batch = np.concatenate(parts)
        fails.append(batch)
        done += span
        errors += int(batch.sum())
    flags = np.concatenate(fails) if fails else np.zeros(0, dtype=bool)
    if errors >= cfg.min_errors:
        flags = flags[:int(np.searchsorted(np.cumsum(flags), cfg.min_errors)) + 1]
    trials, block_errors = int(flags.size), int(flags.sum())
    p_vals = ch.p
    p = float(p_vals[-1]) if p_vals.size else 0.0
    p_aux = float(p_vals[0]) if p_vals.size and p_vals[0] != p_vals[-1] else None
    return BlerPoint(p, trials, block_errors, wilson_interval(block_errors, trials), cfg.seed, p_aux)


def quantum_bler(b_p: float) -> float:
    """``1 - (1 - b_p)^2``: two independent decoders, one per error type."""
    if not 0 <= b_p <= 1:
        raise ValueError("b_p must lie in [0, 1]")
    return 1 - (1 - b_p) ** 2


def sweep(H: BinaryMatrix, cfg: SimConfig, split: Callable[[float], float] | None = None,
          n_aux: int | None = None) -> list[BlerPoint]:
    """One :class:`BlerPoint` per grid value.

    With ``split`` set, the first ``n_aux`` positions (default ``rows(H)``,
    the identity block of a standard-form matrix) flip with
    ``split(p)`` instead of ``p``.
    """
    dec = SumProductDecoder(H, cfg.max_iterations, cfg.llr_clamp)
    n_aux = H.rows if n_aux is None else n_aux
    out = []
    with ThreadPoolExecutor(cfg.threads) as pool:
        for g, p in enumerate(cfg.grid):
            if split is None:
                ch = ChannelModel.uniform(H.cols, p)
                aux = None
            else:
                aux = float(split(p))
                ch = ChannelModel.split(H.cols, n_aux, p, aux)
            pt = simulate_bler(H, ch, cfg, g, dec, pool)
            out.append(BlerPoint(p, pt.trials, pt.block_errors, pt.ci95, pt.seed, aux))
    return out


# ------------------------------------------------------------------- output

CSV_FIELDS = ("code_id", "mode", "p", "p_aux", "trials", "block_errors", "bler", "ci_low", "ci_high", "seed")


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def bler_csv(points: Sequence[BlerPoint], code_id: str, mode: str, timestamp: bool = True) -> str:
    """CSV text; the only nondeterministic content is the leading comment line."""
    buf = io.StringIO()
    if timestamp:
        buf.write(f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for pt in points:
        aux = pt.p if pt.p_aux is None else pt.p_aux
        w.writerow([code_id, mode, _fmt(pt.p), _fmt(aux), pt.trials, pt.block_errors, _fmt(pt.bler),
                    _fmt(pt.ci95[0]), _fmt(pt.ci95[1]), pt.seed])
    return buf.getvalue()


def csv_body(text: str) -> str:
    """Drop comment lines, leaving the deterministic part of a CSV."""
    return "".join(ln for ln in text.splitlines(keepends=True) if not ln.startswith("#"))


def gnuplot_script(csv_path: str, title: str = "", out_png: str | None = None) -> str:
    """Log-log BLER versus p with Wilson error bars, read from ``csv_path``."""
    out_png = out_png or os.path.splitext(csv_path)[0] + ".png"
    return "\n".join([
        "set datafile separator ','",
        "set terminal pngcairo size 800,600",
        f"set output '{out_png}'",
        "set logscale xy",
        "set xlabel 'crossover probability p'",
        "set ylabel 'block error rate'",
        f"set title '{title}'",
        "set key left top",
        "set grid",
        f"plot '{csv_path}' every ::1 using 3:(($6>0)?$7:1/0):8:9 with yerrorlines title 'BLER'",
        "",
    ])
