"""The alternating binomial sums a_n, b_n, c_n and the identities built on them.

    a_n = sum_k (-1)^k C(n-k, k)
    b_n = sum_k (-1)^k C(n-k, k) k
    c_n = sum_k (-1)^k C(n-k, k) k^2

All values are exact Python integers.  Three independent evaluations are
provided: the linear recurrences, a closed form over the six residue classes
of ``n mod 6``, and direct summation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

__all__ = [
    "SeriesValue",
    "series_recurrence",
    "series_closed",
    "series_def_bruteforce",
    "series_def_table",
    "series_table",
    "check_identities",
]


@dataclass(frozen=True)
class SeriesValue:
    n: int
    a: int
    b: int
    c: int


def series_recurrence(n_max: int) -> list[SeriesValue]:
    """Values for ``0 <= n <= n_max`` from the second-order difference equations."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    a = [1, 1]
    b = [0, 0]
    c = [0, 0]
    for n in range(1, n_max):
        a.append(a[n] - a[n - 1])
        b.append(b[n] - b[n - 1] - a[n - 1])
        c.append(c[n] - c[n - 1] - a[n - 1] - 2 * b[n - 1])
    return [SeriesValue(n, a[n], b[n], c[n]) for n in range(n_max + 1)]


_HALF = Fraction(1, 2)
# (cos(pi n / 3), sin(pi n / 3) / sqrt(3)) for n mod 6 = 0..5
_TRIG = (
    (Fraction(1), Fraction(0)),
    (_HALF, _HALF),
    (-_HALF, _HALF),
    (Fraction(-1), Fraction(0)),
    (-_HALF, -_HALF),
    (_HALF, -_HALF),
)


def series_closed(n: int) -> SeriesValue:
    """Closed-form trigonometric solution, evaluated exactly.

    Raises ``ArithmeticError`` if a value fails to be an integer.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    cos, sin3 = _TRIG[n % 6]
    a = cos + sin3
    b = Fraction(2 * n, 3) * cos - Fraction(2, 3) * sin3
    c = Fraction(n * (n - 1), 3) * cos - Fraction(n * n + n - 2, 3) * sin3
    for v in (a, b, c):
        if v.denominator != 1:
            raise ArithmeticError(f"non-integral series value {v} at n={n}")
    return SeriesValue(n, int(a), int(b), int(c))


def series_def_bruteforce(n: int) -> SeriesValue:
    """Direct summation of the defining binomial sums."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    a = b = c = 0
    for k in range(n // 2 + 1):
        term = comb(n - k, k)
        if k % 2:
            term = -term
        a += term
        b += term * k
        c += term * k * k
    return SeriesValue(n, a, b, c)


def series_def_table(n_max: int) -> dict[str, list[int]]:
    """Direct summation for every ``n <= n_max`` at once.

    Rows ``C(n-k, k)`` come from Pascal's rule ``C(n-k, k) = C(n-1-k, k) +
    C(n-2-(k-1), k-1)`` in wrapping uint64 arithmetic, so every sum is exact
    modulo 2**64.  Since ``|c_n| <= (n+1)**2`` the signed residue is the true
    value as long as ``n_max < 2**31``.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if n_max >= 1 << 31:
        raise ValueError("n_max too large for exact 64-bit recovery")
    width = n_max // 2 + 2
    k = np.arange(width, dtype=np.uint64)
    sign = np.where(k % 2 == 1, np.uint64((1 << 64) - 1), np.uint64(1))
    w0, w1, w2 = sign, sign * k, sign * k * k
    prev2 = np.zeros(width, dtype=np.uint64)  # row n-2
    prev1 = np.zeros(width, dtype=np.uint64)  # row n-1
    out = {"a": [], "b": [], "c": []}
    with np.errstate(over="ignore"):
        for n in range(n_max + 1):
            row = np.zeros(width, dtype=np.uint64)
            row[0] = 1
            if n >= 2:
                row[1:] = prev1[1:] + prev2[:-1]
            for key, w in (("a", w0), ("b", w1), ("c", w2)):
                v = int(np.sum(row * w, dtype=np.uint64))
                out[key].append(v - (1 << 64) if v >= 1 << 63 else v)
            prev2, prev1 = prev1, row
    return out


def series_table(n_max: int) -> dict[str, list[int]]:
    """Columns ``{"a": [...], "b": [...], "c": [...]}`` for ``0..n_max``."""
    rows = series_recurrence(max(n_max, 1))
    return {
        "a": [r.a for r in rows],
        "b": [r.b for r in rows],
        "c": [r.c for r in rows],
    }


def check_identities(p: int) -> list[str]:
    """Names of the integer identities that fail for the prime ``p``.

    The four identities are::

        anid:   a_{p-1} - 2 a_p + 1 = 0
        bcnid:  b_p + c_p = 0 or p(p+1)/3
        long:   -a_p - b_p - 1 + (b_{p+1} + c_{p+1})/2 - b_{p+2} - c_{p+2}
                = p(p+5)/6 or p(p+1)/6 - 1
        long2:  -a_{p-1} + a_p + b_p - 2 b_{p+1} - 2 a_{p+1} + 1 = p+2 or -p-1

    where the first alternative applies to ``p = 1 mod 6`` and the second to
    ``p = -1 mod 6``.  An empty list means everything holds.

    ``long`` carries ``-a_p``: this is the combination that appears as the
    constant of ``cartier(R Q^(p-1), p-2, p-2)``.  Written with ``+a_p`` the
    left side exceeds ``p(p+5)/6`` by ``2 a_p = 2`` whenever ``p = 1 mod 6``.
    """
    p = int(p)
    if p < 5 or p % 6 not in (1, 5):
        raise ValueError(f"{p} is not a prime >= 5")
    plus = p % 6 == 1
    t = series_table(p + 2)
    a, b, c = t["a"], t["b"], t["c"]
    failed = []
    if a[p - 1] - 2 * a[p] + 1 != 0:
        failed.append("anid")
    if b[p] + c[p] != (0 if plus else Fraction(p * (p + 1), 3)):
        failed.append("bcnid")
    lhs = -a[p] - b[p] - 1 + Fraction(b[p + 1] + c[p + 1], 2) - b[p + 2] - c[p + 2]
    if lhs != (Fraction(p * (p + 5), 6) if plus else Fraction(p * (p + 1), 6) - 1):
        failed.append("long")
    lhs2 = -a[p - 1] + a[p] + b[p] - 2 * b[p + 1] - 2 * a[p + 1] + 1
    if lhs2 != (p + 2 if plus else -p - 1):
        failed.append("long2")
    return failed
