"""Brute-force values of ``M_n mod p``, independent of any automaton.

Three unrelated routes are available:

* :func:`motzkin_convolution` -- the division-free recurrence
  ``M_{n+1} = M_n + sum_{k<n} M_k M_{n-1-k}``, carried out mod p;
* :func:`motzkin_binomial` -- ``sum_k C(n, 2k) C_k`` with Lucas binomials and
  ``C_k = C(2k, k) - C(2k, k+1)``;
* :func:`motzkin_exact_residues` -- exact big integers from the three-term
  recurrence ``(n+2) M_n = (2n+1) M_{n-1} + 3(n-1) M_{n-2}``, reduced at the
  end.  Linear in ``n`` (up to bigint cost), so this is what large tables use.

Tables can be cached on disk; see :func:`write_table` for the format.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from pathlib import Path

import gmpy2
import numpy as np

from .fieldcore import binom_mod_array, is_prime

__all__ = [
    "MotzkinTable",
    "motzkin_convolution",
    "motzkin_binomial",
    "motzkin_exact_residues",
    "motzkin_table",
    "classify_residues",
    "write_table",
    "read_table",
    "CacheFormatError",
    "CACHE_ENV",
]

CACHE_ENV = "MOTZKIN_CACHE_DIR"
_MAGIC = b"MOTZ"
_VERSION = 1
_HEADER = struct.Struct("<4sIII")


class CacheFormatError(ValueError):
    """Raised for unreadable or inconsistent table files."""


@dataclass(frozen=True, eq=False)
class MotzkinTable:
    """``values[n] = M_n mod p`` for ``0 <= n <= n_max``."""

    p: int
    values: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, MotzkinTable):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.values, other.values)


def _modulus(p) -> int:
    p = int(p)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return p


def motzkin_convolution(p, n_max: int) -> MotzkinTable:
    """Sequential O(n_max^2) convolution mod p."""
    p = _modulus(p)
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    m = np.zeros(n_max + 1, dtype=np.int64)
    m[0] = 1 % p
    # largest block whose dot product cannot overflow int64
    block = max(1, ((1 << 63) - 1) // max(1, (p - 1) ** 2))
    for n in range(n_max):
        head = m[:n]
        tail = m[n - 1 :: -1] if n else m[:0]
        if n <= block:
            conv = int(head @ tail)
        else:
            conv = sum(int(head[i : i + block] @ tail[i : i + block]) % p for i in range(0, n, block))
        m[n + 1] = (m[n] + conv) % p
    return MotzkinTable(p, m.astype(np.uint32))


_catalan: dict[int, np.ndarray] = {}


def _catalan_mod(p: int, k_max: int) -> np.ndarray:
    cached = _catalan.get(p)
    if cached is None or len(cached) <= k_max:
        size = max(k_max + 1, 2 * len(cached) if cached is not None else 64)
        k = np.arange(size, dtype=np.int64)
        cached = (binom_mod_array(2 * k, k, p) - binom_mod_array(2 * k, k + 1, p)) % p
        _catalan[p] = cached
    return cached[: k_max + 1]


def motzkin_binomial(p, n: int) -> int:
    """``M_n mod p`` as ``sum_k C(n, 2k) C_k`` with Lucas binomials."""
    p = _modulus(p)
    if n < 0:
        raise ValueError("n must be nonnegative")
    k = np.arange(n // 2 + 1, dtype=np.int64)
    terms = binom_mod_array(n, 2 * k, p) * _catalan_mod(p, n // 2) % p
    return int(terms.sum() % p)


def motzkin_exact_residues(moduli, n_max: int) -> dict[int, np.ndarray]:
    """``{m: array of M_n mod m}`` for several moduli from one exact big-integer pass."""
    moduli = [int(m) for m in moduli]
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    combined = 1
    for m in moduli:
        combined *= m
    combined = gmpy2.mpz(combined)
    res = np.zeros(n_max + 1, dtype=object)
    prev2, prev1 = gmpy2.mpz(1), gmpy2.mpz(1)
    res[0] = 1 % combined
    if n_max >= 1:
        res[1] = 1 % combined
    for n in range(2, n_max + 1):
        cur = gmpy2.divexact((2 * n + 1) * prev1 + (3 * n - 3) * prev2, n + 2)
        res[n] = int(cur % combined)
        prev2, prev1 = prev1, cur
    return {m: (res % m).astype(np.uint32) for m in moduli}


def motzkin_table(p, n_max: int, cache_dir=None, method: str = "exact") -> MotzkinTable:
    """``M_n mod p`` for ``0..n_max``, through the on-disk cache when configured.

    ``cache_dir`` defaults to the ``MOTZKIN_CACHE_DIR`` environment variable;
    without either nothing is written.  ``method`` is ``"exact"`` (big-integer
    recurrence) or ``"convolution"``.
    """
    p = _modulus(p)
    if cache_dir is None:
        cache_dir = os.environ.get(CACHE_ENV)
    path = None
    if cache_dir:
        path = Path(cache_dir) / f"motzkin_p{p}_n{n_max}.bin"
        if path.exists():
            return read_table(path)
    if method == "exact":
        table = MotzkinTable(p, motzkin_exact_residues([p], n_max)[p])
    elif method == "convolution":
        table = motzkin_convolution(p, n_max)
    else:
        raise ValueError(f"unknown method {method!r}")
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        write_table(table, path)
    return table


def classify_residues(p, n_max: int, table: MotzkinTable | None = None) -> dict[int, np.ndarray]:
    """Indices ``0..n_max`` grouped by ``M_n mod p``; every residue has an entry."""
    p = _modulus(p)
    if table is None:
        table = motzkin_table(p, n_max)
    values = np.asarray(table.values[: n_max + 1])
    return {x: np.flatnonzero(values == x) for x in range(p)}


def write_table(table: MotzkinTable, path) -> None:
    """Write ``MOTZ`` header (magic, version, p, n_max as little-endian u32) then u32 residues."""
    header = _HEADER.pack(_MAGIC, _VERSION, table.p, table.n_max)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.asarray(table.values, dtype="<u4").tobytes())


def read_table(path) -> MotzkinTable:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise CacheFormatError(f"{path}: truncated header")
    magic, version, p, n_max = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise CacheFormatError(f"{path}: bad magic {magic!r}")
    if version != _VERSION:
        raise CacheFormatError(f"{path}: unsupported version {version}")
    body = raw[_HEADER.size :]
    if len(body) != 4 * (n_max + 1):
        raise CacheFormatError(f"{path}: expected {n_max + 1} residues, found {len(body) // 4}")
    values = np.frombuffer(body, dtype="<u4").astype(np.uint32)
    if values.size and int(values.max()) >= p:
        raise CacheFormatError(f"{path}: residue out of range for p={p}")
    return MotzkinTable(p, values)
