from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from motzkin_automata.fieldcore import (
    Prime,
    base_digits,
    binom_mod,
    binom_mod_array,
    fp_add,
    fp_inv,
    fp_mul,
    fp_neg,
    fp_sub,
    is_prime,
)

SMALL_PRIMES = [p for p in range(5, 200) if all(p % q for q in range(2, p))]


def pascal_mod(n_max, p):
    rows = [[1]]
    for n in range(1, n_max + 1):
        prev = rows[-1]
        rows.append([1] + [(prev[k - 1] + prev[k]) % p for k in range(1, n)] + [1])
    return rows


def test_is_prime_matches_trial_division():
    for n in range(-3, 3000):
        assert is_prime(n) == (n > 1 and all(n % q for q in range(2, int(n**0.5) + 1)))


def test_prime_class6():
    assert Prime(7).class6 == 1
    assert Prime(5).class6 == -1
    for p in SMALL_PRIMES:
        assert Prime(p).class6 == (1 if p % 6 == 1 else -1)


@pytest.mark.parametrize("bad", [4, 9, 1, 0, -7])
def test_prime_rejects_composites(bad):
    with pytest.raises(ValueError, match="not prime"):
        Prime(bad)


@pytest.mark.parametrize("small", [2, 3])
def test_prime_rejects_small_primes(small):
    with pytest.raises(ValueError):
        Prime(small)


def test_prime_range_cap():
    with pytest.raises(ValueError):
        Prime(1048583)  # first prime above 2**20
    assert Prime(1048573).value == 1048573


def test_field_ops():
    assert fp_add(3, 4, 5) == 2
    assert fp_neg(0, 7) == 0
    assert fp_mul(6, 6, 7) == 1
    assert fp_sub(1, 4, Prime(7)) == 4
    assert fp_inv(2, 5) == 3
    assert fp_inv(1, 7) == 1
    assert fp_inv(2, 13) == 7


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        fp_inv(0, 7)


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_inverse_all_units(p):
    for a in range(1, p):
        assert fp_mul(a, fp_inv(a, p), p) == 1


def test_binom_examples():
    assert binom_mod(4, 7, 5) == 0
    assert binom_mod(6, 2, 7) == comb(6, 2) % 7 == 1
    assert binom_mod(-1, 0, 7) == 0
    assert binom_mod(5, -1, 7) == 0
    for p in (5, 7, 11):
        for l in range(p):
            assert binom_mod(p - 1, l, p) == (-1) ** l % p


@pytest.mark.parametrize("p", [5, 7, 11])
def test_lucas_against_pascal(p):
    rows = pascal_mod(500, p)
    for n in range(501):
        for m in range(n + 1):
            assert binom_mod(n, m, p) == rows[n][m]
        assert binom_mod(n, n + 1, p) == 0


def test_reflection_identity():
    # C(p-1-k, l) = (-1)^l C(k+l, k) mod p
    for p in SMALL_PRIMES:
        for k in range(p):
            for l in range(p - k):
                assert binom_mod(p - 1 - k, l, p) == (-1) ** l * binom_mod(k + l, k, p) % p


@given(st.integers(0, 10**12), st.integers(-5, 10**12), st.sampled_from([5, 7, 11, 13, 101]))
def test_array_matches_scalar(n, m, p):
    m = min(m, n + 3)
    assert int(binom_mod_array(n, m, p)) == binom_mod(n, m, p)


@given(st.integers(0, 800), st.sampled_from([5, 7, 13]))
def test_lucas_exact_small(n, p):
    ms = np.arange(-2, n + 3)
    expect = [comb(n, m) % p if 0 <= m <= n else 0 for m in ms.tolist()]
    assert binom_mod_array(n, ms, p).tolist() == expect


@given(st.integers(0, 10**18), st.sampled_from([2, 5, 7, 1009]))
def test_base_digits_roundtrip(n, p):
    digits = base_digits(n, p)
    assert sum(d * p**i for i, d in enumerate(digits)) == n
    assert all(0 <= d < p for d in digits)
    assert not digits or digits[-1] != 0
