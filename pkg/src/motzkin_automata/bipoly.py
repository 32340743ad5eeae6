"""Bivariate polynomials over GF(p) and the Cartier operator.

A :class:`BiPoly` is an immutable polynomial in ``x`` and ``y`` with
coefficients reduced modulo a prime.  Small polynomials (automaton states)
are kept as a sorted tuple of ``((i, j), c)`` terms; large ones (powers of
``Q``) are kept as a dense ``numpy`` coefficient grid.  Either view is
materialised lazily from the other, and equality/hashing always go through
the canonical term tuple.
"""

from __future__ import annotations

import functools
from collections.abc import Iterable, Mapping

import gmpy2
import numpy as np

from .fieldcore import binom_mod

__all__ = [
    "BiPoly",
    "poly_R",
    "poly_Q",
    "poly_mul",
    "poly_pow",
    "cartier",
    "cartier_diagonal",
    "eval_origin",
    "q_power",
    "monomial_cartier",
]

# Above this many term pairs the schoolbook product switches to numpy.
_SPARSE_PAIR_LIMIT = 4096
# Operands with at most this many terms are multiplied by shifted adds.
_SHIFT_ADD_TERMS = 32
# Largest dense grid (entries) we are willing to allocate.
_DENSE_LIMIT = 50_000_000


class BiPoly:
    """Immutable polynomial ``sum c_ij x^i y^j`` over GF(p)."""

    __slots__ = ("p", "_terms", "_dense", "_hash")

    def __init__(self, terms: Mapping | Iterable = (), p: int = 0):
        p = int(p)
        if p < 2:
            raise ValueError("a prime modulus is required")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[int, int], int] = {}
        for (i, j), c in items:
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in term x^{i} y^{j}")
            key = (int(i), int(j))
            acc[key] = (acc.get(key, 0) + int(c)) % p
        self.p = p
        self._terms = tuple(sorted((k, c) for k, c in acc.items() if c))
        self._dense = None
        self._hash = None

    # construction ---------------------------------------------------------

    @classmethod
    def from_dense(cls, grid, p: int) -> BiPoly:
        """Wrap a 2-D coefficient grid (``grid[i, j]`` is the ``x^i y^j`` coefficient)."""
        p = int(p)
        grid = np.asarray(grid, dtype=np.int64) % p
        if grid.ndim != 2:
            raise ValueError("coefficient grid must be 2-D")
        rows = np.flatnonzero(grid.any(axis=1))
        cols = np.flatnonzero(grid.any(axis=0))
        self = cls.__new__(cls)
        self.p = p
        self._hash = None
        if rows.size == 0:
            self._terms = ()
            self._dense = np.zeros((1, 1), dtype=np.int64)
        else:
            self._terms = None
            self._dense = np.ascontiguousarray(grid[: rows[-1] + 1, : cols[-1] + 1])
        return self

    @classmethod
    def _canonical(cls, terms: tuple, p: int) -> BiPoly:
        # terms already sorted, reduced and nonzero
        self = cls.__new__(cls)
        self.p = p
        self._terms = terms
        self._dense = None
        self._hash = None
        return self

    @classmethod
    def constant(cls, c: int, p: int) -> BiPoly:
        return cls({(0, 0): c}, p)

    @classmethod
    def monomial(cls, i: int, j: int, p: int, c: int = 1) -> BiPoly:
        return cls({(i, j): c}, p)

    # views ----------------------------------------------------------------

    @property
    def terms(self) -> tuple[tuple[tuple[int, int], int], ...]:
        """Canonical ``((i, j), c)`` tuple sorted by ``(i, j)``, no zero coefficients."""
        if self._terms is None:
            grid = self._dense
            ii, jj = np.nonzero(grid)
            cc = grid[ii, jj]
            self._terms = tuple(
                ((int(i), int(j)), int(c)) for i, j, c in zip(ii.tolist(), jj.tolist(), cc.tolist())
            )
        return self._terms

    @property
    def dense(self) -> np.ndarray:
        """Trimmed coefficient grid; shape ``(deg_x + 1, deg_y + 1)``."""
        if self._dense is None:
            if not self._terms:
                self._dense = np.zeros((1, 1), dtype=np.int64)
            else:
                nx = max(i for (i, _), _ in self._terms) + 1
                ny = max(j for (_, j), _ in self._terms) + 1
                if nx * ny > _DENSE_LIMIT:
                    raise MemoryError(f"dense grid {nx}x{ny} is too large")
                grid = np.zeros((nx, ny), dtype=np.int64)
                for (i, j), c in self._terms:
                    grid[i, j] = c
                self._dense = grid
        return self._dense

    def as_dict(self) -> dict[tuple[int, int], int]:
        return dict(self.terms)

    def __len__(self) -> int:
        if self._terms is not None:
            return len(self._terms)
        return int(np.count_nonzero(self._dense))

    def _shape(self) -> tuple[int, int]:
        if self._dense is not None:
            return self._dense.shape
        if not self._terms:
            return (1, 1)
        return (max(i for (i, _), _ in self._terms) + 1, max(j for (_, j), _ in self._terms) + 1)

    @property
    def degree_x(self) -> int:
        return -1 if self.is_zero() else self._shape()[0] - 1

    @property
    def degree_y(self) -> int:
        return -1 if self.is_zero() else self._shape()[1] - 1

    def coeff(self, i: int, j: int) -> int:
        if self._dense is not None:
            nx, ny = self._dense.shape
            return int(self._dense[i, j]) if 0 <= i < nx and 0 <= j < ny else 0
        return dict(self._terms).get((i, j), 0)

    def is_zero(self) -> bool:
        if self._terms is not None:
            return not self._terms
        return not self._dense.any()

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k, _ in self.terms)

    # arithmetic -------------------------------------------------------------

    def _check(self, other: BiPoly) -> None:
        if self.p != other.p:
            raise ValueError(f"moduli differ: {self.p} vs {other.p}")

    def _coerce(self, other) -> BiPoly:
        if isinstance(other, BiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, np.integer)):
            return BiPoly.constant(int(other), self.p)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = self.as_dict()
        for k, c in other.terms:
            acc[k] = acc.get(k, 0) + c
        return BiPoly(acc, self.p)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({k: -c for k, c in self.terms}, self.p)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return poly_pow(self, e)

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = BiPoly.constant(int(other), self.p)
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.terms))
        return self._hash

    def __call__(self, x: int, y: int) -> int:
        return sum(c * pow(x, i, self.p) * pow(y, j, self.p) for (i, j), c in self.terms) % self.p

    # printing ---------------------------------------------------------------

    def to_str(self, signed: bool = True) -> str:
        """Readable form such as ``2x^2y^3 + xy - 1``.

        With ``signed`` a coefficient ``c > p/2`` prints as ``-(p - c)``.
        """
        if self.is_zero():
            return "0"
        parts = []
        for (i, j), c in sorted(self.terms, key=lambda t: (-(t[0][0] + t[0][1]), -t[0][0])):
            neg = signed and c > self.p // 2
            mag = self.p - c if neg else c
            mono = ("x" if i else "") + (f"^{i}" if i > 1 else "")
            mono += ("y" if j else "") + (f"^{j}" if j > 1 else "")
            body = (str(mag) if mag != 1 or not mono else "") + mono
            parts.append(("-" if neg else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"BiPoly({self.to_str(signed=False)!r}, p={self.p})"


# ---------------------------------------------------------------------------
# multiplication


def _mul_sparse(a: BiPoly, b: BiPoly) -> BiPoly:
    acc: dict[tuple[int, int], int] = {}
    for (i1, j1), c1 in a.terms:
        for (i2, j2), c2 in b.terms:
            k = (i1 + i2, j1 + j2)
            acc[k] = acc.get(k, 0) + c1 * c2
    return BiPoly(acc, a.p)


def _mul_shift_add(small: BiPoly, big: BiPoly) -> BiPoly:
    p = small.p
    grid = big.dense
    sx, sy = small._shape()
    out = np.zeros((grid.shape[0] + sx - 1, grid.shape[1] + sy - 1), dtype=np.int64)
    bx, by = grid.shape
    for (i, j), c in small.terms:
        # at most 32 summands below 2**40 each: no int64 overflow
        out[i : i + bx, j : j + by] += c * grid
    return BiPoly.from_dense(out, p)


def _mul_kronecker(a: BiPoly, b: BiPoly) -> BiPoly:
    """Exact product through a single big-integer multiplication.

    Each coefficient gets a 64-bit slot; slot values stay below
    ``min(len(a), len(b)) * (p-1)**2 < 2**64`` so no carries cross slots.
    """
    p = a.p
    ga, gb = a.dense, b.dense
    nx = ga.shape[0] + gb.shape[0] - 1
    ny = ga.shape[1] + gb.shape[1] - 1

    def pack(grid):
        wide = np.zeros((grid.shape[0], ny), dtype="<u8")
        wide[:, : grid.shape[1]] = grid
        return gmpy2.mpz(int.from_bytes(wide.tobytes(), "little"))

    prod = pack(ga) * pack(gb)
    raw = int(prod).to_bytes(nx * ny * 8, "little")
    out = np.frombuffer(raw, dtype="<u8") % np.uint64(p)
    return BiPoly.from_dense(out.astype(np.int64).reshape(nx, ny), p)


def poly_mul(a: BiPoly, b: BiPoly) -> BiPoly:
    """Exact product modulo p, canonicalised."""
    a._check(b)
    if a.is_zero() or b.is_zero():
        return BiPoly((), a.p)
    na, nb = len(a), len(b)
    if na * nb <= _SPARSE_PAIR_LIMIT:
        return _mul_sparse(a, b)
    (ax, ay), (bx, by) = a._shape(), b._shape()
    if (ax + bx) * (ay + by) > _DENSE_LIMIT:
        return _mul_sparse(a, b)
    small, big = (a, b) if na <= nb else (b, a)
    if len(small) <= _SHIFT_ADD_TERMS:
        return _mul_shift_add(small, big)
    if min(na, nb) * (a.p - 1) ** 2 >= 1 << 64:
        return _mul_sparse(a, b)
    return _mul_kronecker(a, b)


def poly_pow(a: BiPoly, e: int) -> BiPoly:
    """``a ** e`` by repeated squaring; ``a ** 0 == 1``."""
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    result = BiPoly.constant(1, a.p)
    base = a
    while e:
        if e & 1:
            result = poly_mul(result, base)
        e >>= 1
        if e:
            base = poly_mul(base, base)
    return result


# ---------------------------------------------------------------------------
# the two fixed polynomials


def poly_R(p: int) -> BiPoly:
    """``y (1 - xy - 2x^2y^2 - 2x^2y^3)``, the initial automaton state."""
    return BiPoly({(0, 1): 1, (1, 2): -1, (2, 3): -2, (2, 4): -2}, p)


def poly_Q(p: int) -> BiPoly:
    """``x^2y^3 + 2x^2y^2 + x^2y + xy + x - 1``."""
    return BiPoly({(2, 3): 1, (2, 2): 2, (2, 1): 1, (1, 1): 1, (1, 0): 1, (0, 0): -1}, p)


@functools.lru_cache(maxsize=16)
def q_power(p: int) -> BiPoly:
    """``Q^(p-1)``, computed once per prime."""
    p = int(p)
    return poly_pow(poly_Q(p), p - 1)


# ---------------------------------------------------------------------------
# Cartier operator


def cartier(a: BiPoly, d1: int, d2: int) -> BiPoly:
    """``sum a[p*m + d1, p*n + d2] x^m y^n``."""
    p = a.p
    if not (0 <= d1 < p and 0 <= d2 < p):
        raise ValueError(f"digits must lie in [0, {p - 1}]")
    if a._dense is not None:
        return BiPoly.from_dense(a._dense[d1::p, d2::p], p)
    acc = {}
    for (i, j), c in a.terms:
        qi, ri = divmod(i, p)
        qj, rj = divmod(j, p)
        if ri == d1 and rj == d2:
            acc[(qi, qj)] = c
    return BiPoly(acc, p)


def cartier_diagonal(a: BiPoly) -> list[BiPoly]:
    """``[cartier(a, d, d) for d in range(p)]`` in one pass over the grid."""
    p = a.p
    grid = a.dense
    nx = -(-grid.shape[0] // p)
    ny = -(-grid.shape[1] // p)
    padded = np.zeros((nx * p, ny * p), dtype=np.int64)
    padded[: grid.shape[0], : grid.shape[1]] = grid
    blocks = padded.reshape(nx, p, ny, p)
    diag = np.diagonal(blocks, axis1=1, axis2=3) % p  # shape (nx, ny, p)
    # np.nonzero walks in C order, so each digit's terms arrive sorted by (i, j)
    ii, jj, dd = np.nonzero(diag)
    per_digit: list[list] = [[] for _ in range(p)]
    for i, j, d, c in zip(ii.tolist(), jj.tolist(), dd.tolist(), diag[ii, jj, dd].tolist()):
        per_digit[d].append(((i, j), c))
    return [BiPoly._canonical(tuple(terms), p) for terms in per_digit]


def eval_origin(a: BiPoly) -> int:
    """Value at ``x = y = 0``: the constant coefficient."""
    return a.coeff(0, 0)


# ---------------------------------------------------------------------------
# closed form for Cartier(x^r y^t Q^(p-1)); kept independent of the pipeline


def monomial_cartier(r: int, t: int, d: int, p: int) -> BiPoly:
    """``cartier(x^r y^t Q^(p-1), d, d)`` from the binomial closed form.

    Coefficient of ``x^i y^j`` is
    ``(-1)^(i+d+r) sum_k C(p-1-k, pi+d-r-2k) C(pi+d-r, pj+d-t-k)``
    with ``r <= pi+d <= 2(p-1)+r`` and ``t <= pj+d <= 3(p-1)+t``.
    """
    p = int(p)
    if not 0 <= d < p:
        raise ValueError(f"digit {d} outside [0, {p - 1}]")
    if r < 0 or t < 0:
        raise ValueError("exponents must be nonnegative")
    acc = {}
    i = 0
    while p * i + d <= 2 * (p - 1) + r:
        xi = p * i + d - r
        if xi >= 0:
            j = 0
            while p * j + d <= 3 * (p - 1) + t:
                yj = p * j + d - t
                if yj >= 0:
                    total = 0
                    for k in range(p):
                        total += binom_mod(p - 1 - k, xi - 2 * k, p) * binom_mod(xi, yj - k, p)
                    if (i + d + r) % 2:
                        total = -total
                    acc[(i, j)] = total
                j += 1
        i += 1
    return BiPoly(acc, p)
