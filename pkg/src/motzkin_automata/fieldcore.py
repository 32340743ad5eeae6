"""Arithmetic in GF(p) and binomial coefficients modulo a prime.

Residues are plain Python ints in ``[0, p-1]``.  Every function accepts either
a bare int modulus or a :class:`Prime`; ``Prime`` supports ``__index__`` so it
can be used anywhere an int is expected.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MAX_PRIME",
    "Prime",
    "is_prime",
    "fp_add",
    "fp_sub",
    "fp_mul",
    "fp_neg",
    "fp_inv",
    "binom_mod",
    "binom_mod_array",
    "base_digits",
]

MAX_PRIME = 1 << 20

# Deterministic Miller-Rabin witnesses, valid for n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic primality test for the range this package cares about."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True, order=True)
class Prime:
    """A validated prime ``p >= 5`` together with its class ``p mod 6``.

    >>> Prime(13).class6
    1
    >>> Prime(11).class6
    -1
    """

    value: int
    class6: int = field(init=False, compare=False)

    def __post_init__(self):
        v = self.value
        if isinstance(v, Prime):
            v = v.value
            object.__setattr__(self, "value", v)
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise TypeError(f"prime must be an integer, got {type(v).__name__}")
        v = int(v)
        object.__setattr__(self, "value", v)
        if not is_prime(v):
            raise ValueError(f"{v} is not prime")
        if v < 5:
            raise ValueError(f"{v} is prime but the automaton needs p >= 5")
        if v >= MAX_PRIME:
            raise ValueError(f"{v} is outside the supported range p < 2**20")
        object.__setattr__(self, "class6", 1 if v % 6 == 1 else -1)

    def __index__(self) -> int:
        return self.value

    __int__ = __index__

    def __str__(self) -> str:
        return str(self.value)


def fp_add(a: int, b: int, p: int) -> int:
    return (a + b) % int(p)


def fp_sub(a: int, b: int, p: int) -> int:
    return (a - b) % int(p)


def fp_mul(a: int, b: int, p: int) -> int:
    return a * b % int(p)


def fp_neg(a: int, p: int) -> int:
    return -a % int(p)


def fp_inv(a: int, p: int) -> int:
    """Multiplicative inverse of ``a`` modulo ``p``.

    Raises ``ZeroDivisionError`` when ``a`` is divisible by ``p``.
    """
    p = int(p)
    if a % p == 0:
        raise ZeroDivisionError(f"0 has no inverse modulo {p}")
    return pow(a, -1, p)


@functools.lru_cache(maxsize=64)
def _factorial_tables(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Factorials and inverse factorials of ``0..p-1`` modulo ``p``."""
    fact = [1] * p
    for i in range(1, p):
        fact[i] = fact[i - 1] * i % p
    inv = [1] * p
    inv[p - 1] = pow(fact[p - 1], -1, p)
    for i in range(p - 1, 0, -1):
        inv[i - 1] = inv[i] * i % p
    return np.array(fact, dtype=np.int64), np.array(inv, dtype=np.int64)


def binom_mod(n: int, m: int, p: int) -> int:
    """``C(n, m) mod p`` via Lucas's theorem.

    Follows the convention ``C(n, m) = 0`` whenever ``m < 0``, ``m > n`` or
    ``n < 0``.
    """
    p = int(p)
    if m < 0 or n < 0 or m > n:
        return 0
    fact, inv = _factorial_tables(p)
    result = 1
    while m:
        nd, md = n % p, m % p
        if md > nd:
            return 0
        result = result * int(fact[nd]) % p * int(inv[md]) % p * int(inv[nd - md]) % p
        n //= p
        m //= p
    return result


def binom_mod_array(n, m, p: int) -> np.ndarray:
    """Vectorised :func:`binom_mod` over broadcastable integer arrays."""
    p = int(p)
    n = np.asarray(n, dtype=np.int64)
    m = np.asarray(m, dtype=np.int64)
    n, m = np.broadcast_arrays(n, m)
    fact, inv = _factorial_tables(p)
    valid = (m >= 0) & (n >= 0) & (m <= n)
    n = np.where(valid, n, 0)
    m = np.where(valid, m, 0)
    result = np.where(valid, 1, 0).astype(np.int64)
    while np.any(m):
        nd, md = n % p, m % p
        ok = md <= nd
        term = fact[nd] * inv[md] % p * inv[np.where(ok, nd - md, 0)] % p
        result = np.where(ok, result * term % p, 0)
        n //= p
        m //= p
    return result


def base_digits(n: int, p: int) -> list[int]:
    """Base-``p`` digits of ``n``, least significant first; ``[]`` for 0."""
    p = int(p)
    if n < 0:
        raise ValueError("n must be nonnegative")
    digits = []
    while n:
        n, d = divmod(n, p)
        digits.append(d)
    return digits
