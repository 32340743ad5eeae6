"""Divisibility forms, densities and residue structure of ``M_n mod p``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .automaton import Automaton
from .fieldcore import Prime, base_digits, binom_mod
from .oracle import motzkin_table

__all__ = [
    "StructuredSet",
    "DensityReport",
    "ForbiddenReport",
    "density_formula",
    "table1_forms",
    "verify_forms",
    "empirical_density",
    "cpd",
    "cpd_table",
    "density_one_criterion",
    "forbidden_residues",
    "unit_subgroup_order",
    "classical_predicate",
    "EXACT_ZERO_DENSITY_PRIMES",
]

# primes whose zero-residue density is known to equal 2/(p(p-1)) exactly
EXACT_ZERO_DENSITY_PRIMES = frozenset({5, 11, 13, 23})


@dataclass(frozen=True)
class StructuredSet:
    """``{(q i + r) q^(s j + t) - shift : i >= 0, j >= j_min}``."""

    q: int
    r: int
    s: int
    t: int
    j_min: int = 0
    shift: int = 0

    def __post_init__(self):
        if self.q < 2 or not 0 <= self.r < self.q or self.s < 1 or self.t < 0 or self.j_min not in (0, 1):
            raise ValueError(f"invalid parameters {self}")

    def __contains__(self, n: int) -> bool:
        m = n + self.shift
        if m < 0:
            return False
        if m == 0:
            return self.r == 0
        j = self.j_min
        while True:
            e = self.q ** (self.s * j + self.t)
            if e > m:
                return False
            if m % e == 0 and (m // e) % self.q == self.r:
                return True
            j += 1

    def members(self, limit: int, lo: int = 1) -> np.ndarray:
        """Sorted members ``n`` with ``lo <= n <= limit``."""
        found = []
        kmin = self.r or self.q  # smallest positive multiplier q*i + r
        j = self.j_min
        while True:
            e = self.q ** (self.s * j + self.t)
            if kmin * e - self.shift > limit:
                break
            mult = np.arange(self.r, (limit + self.shift) // e + 1, self.q, dtype=np.int64)
            found.append(mult * e - self.shift)
            j += 1
        if not found:
            return np.zeros(0, dtype=np.int64)
        out = np.unique(np.concatenate(found))
        return out[(out >= lo) & (out <= limit)]

    def count(self, limit: int, lo: int = 1) -> int:
        return int(self.members(limit, lo).size)

    def describe(self) -> str:
        exp = f"{self.s}j" if self.s != 1 else "j"
        if self.t:
            exp += f"+{self.t}"
        out = f"({self.q}i+{self.r})*{self.q}^({exp})"
        if self.shift:
            out += f"-{self.shift}"
        return out + f", j>={self.j_min}"


def density_formula(ss: StructuredSet) -> Fraction:
    """Asymptotic density; the shift does not matter."""
    q, s, t = ss.q, ss.s, ss.t
    if ss.j_min == 0:
        return 1 / (Fraction(q) ** (t + 1 - s) * (q**s - 1))
    return Fraction(1, q ** (t + 1) * (q**s - 1))


def table1_forms(p) -> list[StructuredSet]:
    """Families of ``n`` with ``M_n = 0 mod p`` read off the automaton."""
    p = p if isinstance(p, Prime) else Prime(p)
    q = p.value
    if p.class6 == 1:
        return [
            StructuredSet(q, 1, 1, 0, j_min=1, shift=2),
            StructuredSet(q, q - 1, 1, 0, j_min=1, shift=1),
        ]
    return [
        StructuredSet(q, 1, 2, 0, j_min=1, shift=2),
        StructuredSet(q, q - 2, 2, 1, j_min=0, shift=2),
        StructuredSet(q, 2, 2, 1, j_min=0, shift=1),
        StructuredSet(q, q - 1, 2, 0, j_min=1, shift=1),
    ]


def verify_forms(p, m: Automaton, limit: int, oracle_limit: int = 10_000) -> list[str]:
    """Members ``n <= limit`` of every form whose value is not 0.

    The automaton covers the whole range; members up to ``oracle_limit`` are
    also checked against the brute-force table.  For ``p = 5`` the oracle
    side additionally checks that the forms describe *all* zeros.
    """
    p = p if isinstance(p, Prime) else Prime(p)
    violations = []
    olim = min(limit, oracle_limit)
    table = motzkin_table(p.value, olim).values if olim >= 1 else None
    union = np.zeros(0, dtype=np.int64)
    for form in table1_forms(p):
        ns = form.members(limit)
        union = np.union1d(union, ns[ns <= olim])
        vals = m.eval_many(ns)
        for n in ns[vals != 0].tolist():
            violations.append(f"automaton: {form.describe()} member {n} has M_n != 0")
        if table is not None:
            small = ns[ns <= olim]
            for n in small[table[small] != 0].tolist():
                violations.append(f"oracle: {form.describe()} member {n} has M_n != 0")
    if p.value == 5 and table is not None:
        zeros = np.flatnonzero(table == 0)
        zeros = zeros[zeros >= 1]
        for n in np.setdiff1d(zeros, union).tolist():
            violations.append(f"oracle: M_{n} = 0 mod 5 but {n} fits no form")
    return violations


@dataclass(frozen=True)
class DensityReport:
    p: int
    residue: int
    limit: int
    count: int
    density: Fraction
    reference: Fraction | None
    reference_kind: str  # "exact", "lower-bound" or "none"

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "residue": self.residue,
            "limit": self.limit,
            "count": self.count,
            "density": float(self.density),
            "density_exact": f"{self.density.numerator}/{self.density.denominator}",
            "reference": None if self.reference is None else float(self.reference),
            "reference_kind": self.reference_kind,
        }


def _count_residue(m: Automaton, residue: int, limit: int, chunk: int = 1 << 20, threads: int = 1) -> int:
    ranges = [(a, min(a + chunk, limit + 1)) for a in range(1, limit + 1, chunk)]

    def work(bounds):
        return int(np.count_nonzero(m.eval_range(*bounds) == residue))

    if threads > 1 and len(ranges) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(threads) as pool:
            return sum(pool.map(work, ranges))
    return sum(map(work, ranges))


def empirical_density(p, m: Automaton, residue: int, limit: int, threads: int = 1) -> DensityReport:
    """Share of ``1 <= n <= limit`` with ``M_n = residue mod p``."""
    p = p if isinstance(p, Prime) else Prime(p)
    if limit < 1:
        raise ValueError("limit must be at least 1")
    residue %= p.value
    count = _count_residue(m, residue, limit, threads=threads)
    ref, kind = None, "none"
    if residue == 0:
        ref = Fraction(2, p.value * (p.value - 1))
        kind = "exact" if p.value in EXACT_ZERO_DENSITY_PRIMES else "lower-bound"
    return DensityReport(p.value, residue, limit, count, Fraction(count, limit), ref, kind)


def cpd(p, d: int) -> int:
    """``(-1)^d sum_k C(p-1-k, d-2k) C(d, k) mod p``: where the constant 1 goes on digit ``d``."""
    p = int(p)
    if not 0 <= d < p:
        raise ValueError(f"digit {d} outside [0, {p - 1}]")
    total = sum(binom_mod(p - 1 - k, d - 2 * k, p) * binom_mod(d, k, p) for k in range(d // 2 + 1))
    return (-total if d % 2 else total) % p


def cpd_table(p) -> list[int]:
    return [cpd(p, d) for d in range(int(p))]


def density_one_criterion(p) -> int | None:
    """Smallest ``2 <= d <= p-2`` with ``cpd(p, d) = 0``, else ``None``.

    If such a digit exists, any ``n`` with two or more base-p digits equal to
    ``d`` has ``M_n = 0 mod p``, so the zero residue has density 1.
    """
    p = int(p)
    for d in range(2, p - 1):
        if cpd(p, d) == 0:
            return d
    return None


def _multiplicative_order(a: int, p: int) -> int:
    order = p - 1
    n, f = order, 2
    primes = []
    while f * f <= n:
        if n % f == 0:
            primes.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        primes.append(n)
    for q in primes:
        while order % q == 0 and pow(a, order // q, p) == 1:
            order //= q
    return order


def unit_subgroup_order(values, p: int) -> int:
    """Order of the subgroup of ``(Z/pZ)^*`` generated by the nonzero ``values``."""
    order = 1
    for v in {v % p for v in values}:
        if v:
            k = _multiplicative_order(v, p)
            order = order * k // gcd(order, k)
    return order


@dataclass(frozen=True)
class ForbiddenReport:
    p: int
    attainable: frozenset
    forbidden: frozenset
    generates_units: bool
    oracle_limit: int
    oracle_conflicts: frozenset  # residues seen by the oracle but declared forbidden
    oracle_unseen: frozenset  # attainable residues not met for n <= oracle_limit

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "forbidden": sorted(self.forbidden),
            "generates_units": self.generates_units,
            "oracle_limit": self.oracle_limit,
            "oracle_conflicts": sorted(self.oracle_conflicts),
            "oracle_unseen": sorted(self.oracle_unseen),
        }


def forbidden_residues(p, m: Automaton, oracle_limit: int = 100_000) -> ForbiddenReport:
    """Residues that ``M_n mod p`` never takes, read off the machine.

    A residue is attainable iff it is the value of some state entered by a
    nonzero digit (canonical digit strings end in a nonzero leading digit),
    or it is ``M_0 = 1``.  The unit-group generator test is reported
    alongside; it is only a sufficient condition for having no nonzero
    forbidden residue.
    """
    p = p if isinstance(p, Prime) else Prime(p)
    q = p.value
    targets = m.delta[:, 1:].ravel()
    attainable = frozenset(int(v) for v in m.values[np.unique(targets)]) | {1}
    forbidden = frozenset(range(q)) - attainable
    generates = unit_subgroup_order(cpd_table(q), q) == q - 1
    conflicts = unseen = frozenset()
    if oracle_limit >= 0:
        seen = frozenset(int(v) for v in np.unique(motzkin_table(q, oracle_limit).values))
        conflicts = seen & forbidden
        unseen = attainable - seen
    return ForbiddenReport(q, attainable, forbidden, generates, oracle_limit, conflicts, unseen)


# ---------------------------------------------------------------------------
# classical characterisations for p in {2, 3, 5}


def _only01_base3(u: int) -> bool:
    return all(d in (0, 1) for d in base_digits(u, 3))


def _matches_form(value: int, base: int, residues, exps) -> bool:
    """``value = (base*i + r) * base^e`` for some ``r`` in residues, ``e`` in exps."""
    for e in exps:
        b = base**e
        if b > value:
            break
        if value % b == 0 and (value // b) % base in residues:
            return True
    return False


def classical_predicate(modulus: int, n: int):
    """Known closed characterisations of ``M_n`` modulo 2, 3 and 5.

    * ``modulus=2``: ``True`` iff ``M_n`` is even, i.e.
      ``n = (4i + e) 4^(j+1) - delta`` with ``e`` in {1, 3}, ``delta`` in {1, 2};
    * ``modulus=3``: ``M_n mod 3`` in {0, 1, 2} from membership of ``n`` in
      ``3T``, ``3T - 1`` or ``3T - 2``, where ``T`` holds the numbers whose
      base-3 digits are all 0 or 1;
    * ``modulus=5``: ``True`` iff ``5 | M_n``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if modulus == 2:
        for delta in (1, 2):
            u = n + delta
            v = (u & -u).bit_length() - 1
            if v >= 2 and v % 2 == 0:
                return True
        return False
    if modulus == 3:
        if n % 3 == 0 and _only01_base3(n // 3):
            return 1
        if n % 3 == 2 and _only01_base3((n + 1) // 3):
            return 2
        if n % 3 == 1 and _only01_base3((n + 2) // 3):
            return 1
        return 0
    if modulus == 5:
        # (5i+1)5^{2j}-2, (5i+2)5^{2j-1}-1, (5i+3)5^{2j-1}-2, (5i+4)5^{2j}-1, j >= 1
        u = n + 2
        even = range(2, 4 * u.bit_length() + 4, 2)
        odd = range(1, 4 * u.bit_length() + 4, 2)
        if _matches_form(n + 2, 5, (1,), even) or _matches_form(n + 2, 5, (3,), odd):
            return True
        return _matches_form(n + 1, 5, (2,), odd) or _matches_form(n + 1, 5, (4,), even)
    raise ValueError(f"no classical characterisation for modulus {modulus}")
