"""
Finite fields and the line designs of affine and projective geometries.

Field elements are integers ``0 .. q-1`` read as base-``p`` digit strings of
polynomial coefficients (constant term in the least significant digit).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from assisted_qldpc.designs import PairwiseBalancedDesign, verify_pbd

MAX_ORDER = 1 << 16


def _prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    from sympy import factorint

    factors = factorint(q)
    if len(factors) != 1:
        raise ValueError(f"{q} is not a prime power")
    (p, e), = factors.items()
    return int(p), int(e)


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of ``a`` by monic ``m`` over GF(p); coefficient lists low-first."""
    a = a[:]
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        coef = a[i] % p
        if coef:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - coef * m[j]) % p
    return [c % p for c in a[:dm]] + [0] * max(0, dm - len(a))


def _is_irreducible(m: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1 .. deg/2."""
    deg = len(m) - 1
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            divisor = list(low) + [1]
            if not any(_poly_mod(m, divisor, p)):
                return False
    return True


def least_irreducible(p: int, e: int) -> list[int]:
    """Monic irreducible of degree ``e`` with the smallest base-``p`` encoding."""
    for code in range(p ** e):
        low = [(code // p ** i) % p for i in range(e)]
        m = low + [1]
        if e == 1 or _is_irreducible(m, p):
            return m
    raise AssertionError("no irreducible polynomial found")


@dataclass(frozen=True)
class FiniteField:
    """GF(q) with ``q = p**e``.

    Prime fields use integer arithmetic mod ``p``; extension fields multiply
    through log/antilog tables built from the stored modulus.
    """

    p: int
    e: int
    modulus: tuple[int, ...]
    _exp: np.ndarray = field(repr=False, compare=False)
    _log: np.ndarray = field(repr=False, compare=False)

    @property
    def q(self) -> int:
        return self.p ** self.e

    @property
    def order(self) -> int:
        return self.q

    def elements(self) -> range:
        return range(self.q)

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        out, scale = 0, 1
        for _ in range(self.e):
            out += ((a % self.p + b % self.p) % self.p) * scale
            a //= self.p
            b //= self.p
            scale *= self.p
        return out

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        out, scale = 0, 1
        for _ in range(self.e):
            out += ((-(a % self.p)) % self.p) * scale
            a //= self.p
            scale *= self.p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.e == 1:
            return a * b % self.p
        return int(self._exp[(int(self._log[a]) + int(self._log[b])) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        if self.e == 1:
            return pow(a, -1, self.p)
        return int(self._exp[(-int(self._log[a])) % (self.q - 1)])

    @cached_property
    def add_table(self) -> np.ndarray:
        q = self.q
        if self.e == 1:
            r = np.arange(q)
            return (r[:, None] + r[None, :]) % q
        return np.array([[self.add(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)

    @cached_property
    def mul_table(self) -> np.ndarray:
        q = self.q
        if self.e == 1:
            r = np.arange(q)
            return (r[:, None] * r[None, :]) % q
        return np.array([[self.mul(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)

    @cached_property
    def inv_table(self) -> np.ndarray:
        out = np.zeros(self.q, dtype=np.int64)
        for a in range(1, self.q):
            out[a] = self.inv(a)
        return out


def _poly_mulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    prod_ = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod_[i + j] = (prod_[i + j] + x * y) % p
    return _poly_mod(prod_, m, p)


def make_field(q: int) -> FiniteField:
    """Construct GF(q) for a prime power ``q <= 2**16``.

    Raises
    ------
    ValueError
        If ``q`` is not a prime power or is too large.
    """
    p, e = _prime_power(q)
    if q > MAX_ORDER:
        raise ValueError(f"field order {q} exceeds {MAX_ORDER}")
    m = least_irreducible(p, e)
    exp = np.zeros(max(q - 1, 1), dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    if e > 1:
        def encode(c):
            return sum(v * p ** i for i, v in enumerate(c))

        # find a primitive element by brute force over nonzero elements
        for g in range(2, q):
            gpoly = [(g // p ** i) % p for i in range(e)]
            cur = [1] + [0] * (e - 1)
            seen = set()
            for k in range(q - 1):
                code = encode(cur)
                if code in seen:
                    break
                seen.add(code)
                exp[k] = code
                log[code] = k
                cur = _poly_mulmod(cur, gpoly, m, p)
            if len(seen) == q - 1:
                break
        else:
            raise AssertionError("no primitive element")
    return FiniteField(p, e, tuple(m), exp, log)


@dataclass(frozen=True)
class GeometryDesign:
    """Points and lines of AG(m, q) or PG(m, q) as a block design."""

    kind: str
    m: int
    q: int
    design: PairwiseBalancedDesign
    points: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @property
    def v(self) -> int:
        return self.design.v

    @property
    def b(self) -> int:
        return self.design.b

    @property
    def blocks(self):
        return self.design.blocks

    def label(self) -> str:
        return f"{self.kind}({self.m},{self.q})"


def _coords(q: int, m: int) -> np.ndarray:
    """All vectors of F_q^m in lexicographic order (first coordinate slowest)."""
    grids = np.indices((q,) * m).reshape(m, -1).T
    return grids.astype(np.int64)


def _encode(vecs: np.ndarray, q: int) -> np.ndarray:
    m = vecs.shape[-1]
    weights = q ** np.arange(m - 1, -1, -1, dtype=np.int64)
    return vecs @ weights


def _validate(gd: GeometryDesign) -> GeometryDesign:
    report = verify_pbd(gd.design)
    if not report.valid:
        raise AssertionError(f"{gd.label()} failed the pair check")
    return gd


def ag_lines(m: int, q: int) -> GeometryDesign:
    """Points and 1-dimensional affine subspaces of AG(m, q).

    Points are indexed by the lexicographic order of their coordinates.
    """
    if m < 2:
        raise ValueError("dimension must be at least 2")
    F = make_field(q)
    add, mul = F.add_table, F.mul_table
    pts = _coords(q, m)
    dirs = [d for d in pts[1:] if d[np.flatnonzero(d)[0]] == 1]
    scalars = np.arange(q)
    lines = set()
    for d in dirs:
        steps = mul[scalars[:, None], d[None, :]]          # t*d for each t
        for b in pts:
            line = add[b[None, :], steps]
            lines.add(tuple(sorted(_encode(line, q).tolist())))
    design = PairwiseBalancedDesign(q ** m, sorted(lines))
    return _validate(GeometryDesign("AG", m, q, design, tuple(map(tuple, pts.tolist()))))


def _normalize(vec: np.ndarray, F: FiniteField) -> np.ndarray:
    nz = np.flatnonzero(vec)
    lead = int(vec[nz[0]])
    if lead == 1:
        return vec
    return F.mul_table[F.inv(lead), vec]


def pg_lines(m: int, q: int) -> GeometryDesign:
    """Points and lines of PG(m, q).

    Points are 1-dimensional subspaces of F_q^(m+1), represented by the
    vector whose first nonzero coordinate is 1, in lexicographic order.
    """
    if m < 2:
        raise ValueError("dimension must be at least 2")
    F = make_field(q)
    add, mul = F.add_table, F.mul_table
    allv = _coords(q, m + 1)[1:]
    pts = np.array([v for v in allv if v[np.flatnonzero(v)[0]] == 1])
    index = {code: i for i, code in enumerate(_encode(pts, q).tolist())}
    nv = len(pts)
    covered = np.zeros((nv, nv), dtype=bool)
    lines = []
    for a in range(nv):
        for b in range(a + 1, nv):
            if covered[a, b]:
                continue
            members = {a, b}
            for t in range(1, q):
                w = add[pts[a], mul[t, pts[b]]]
                members.add(index[int(_encode(_normalize(w, F), q))])
            line = tuple(sorted(members))
            for x in line:
                for y in line:
                    covered[x, y] = True
            lines.append(line)
    design = PairwiseBalancedDesign(nv, sorted(lines))
    return _validate(GeometryDesign("PG", m, q, design, tuple(map(tuple, pts.tolist()))))
