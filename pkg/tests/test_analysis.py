from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import machine, oracle_residues
from motzkin_automata.analysis import (
    EXACT_ZERO_DENSITY_PRIMES,
    StructuredSet,
    classical_predicate,
    cpd,
    cpd_table,
    density_formula,
    density_one_criterion,
    empirical_density,
    forbidden_residues,
    table1_forms,
    unit_subgroup_order,
    verify_forms,
)
from motzkin_automata.bipoly import BiPoly, eval_origin, monomial_cartier
from motzkin_automata.fieldcore import base_digits, is_prime
from motzkin_automata.series import series_table


def test_density_formula_examples():
    assert density_formula(StructuredSet(5, 1, 2, 0, j_min=1, shift=2)) == Fraction(1, 120)
    assert density_formula(StructuredSet(7, 1, 1, 0, j_min=1, shift=2)) == Fraction(1, 42)
    assert density_formula(StructuredSet(5, 2, 2, 1, j_min=0, shift=1)) == Fraction(1, 24)


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19, 23, 29])
def test_form_densities_add_to_lower_bound(p):
    forms = table1_forms(p)
    assert len(forms) == (2 if p % 6 == 1 else 4)
    assert sum(density_formula(f) for f in forms) == Fraction(2, p * (p - 1))


def test_structured_set_validation():
    for bad in [(1, 0, 1, 0), (5, 5, 1, 0), (5, 1, 0, 0), (5, 1, 1, -1)]:
        with pytest.raises(ValueError):
            StructuredSet(*bad)
    with pytest.raises(ValueError):
        StructuredSet(5, 1, 1, 0, j_min=2)


def test_structured_set_membership_small():
    ss = StructuredSet(5, 1, 2, 0, j_min=1, shift=2)
    assert ss.members(1000).tolist() == [23, 148, 273, 398, 523, 623, 648, 773, 898]
    assert 623 in ss and 48 not in ss
    assert "5i+1" in ss.describe()


sets = st.builds(
    lambda q, r, s, t, j_min, shift: StructuredSet(q, 1 + r % (q - 1), s, t, j_min, shift),
    st.integers(2, 13),
    st.integers(0, 12),
    st.integers(1, 3),
    st.integers(0, 2),
    st.integers(0, 1),
    st.integers(0, 3),
)


@given(ss=sets)
def test_members_agree_with_contains(ss):
    listed = set(ss.members(3000).tolist())
    assert listed == {n for n in range(1, 3001) if n in ss}


@given(ss=sets)
def test_count_tracks_density(ss):
    n = 10**6
    gap = abs(Fraction(ss.count(n), n) - density_formula(ss))
    assert gap <= Fraction(ss.q ** (ss.s + ss.t + 2), n)


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_forms_hold(p):
    assert verify_forms(p, machine(p), 200_000, oracle_limit=10_000) == []


def test_forms_catch_a_wrong_machine():
    # swap the zero state out of the p = 5 machine: every member becomes a violation
    import dataclasses

    m = machine(5)
    values = [dataclasses.replace(s, value=(s.value + 1) % 5) for s in m.states]
    fake = dataclasses.replace(m, states=tuple(values))
    assert verify_forms(5, fake, 1000, oracle_limit=0)


def test_empirical_density_report():
    rep = empirical_density(5, machine(5), 0, 100_000)
    assert rep.reference == Fraction(1, 10) and rep.reference_kind == "exact"
    assert abs(rep.density - Fraction(1, 10)) < Fraction(1, 100)
    rep7 = empirical_density(7, machine(7), 0, 50_000, threads=2)
    assert rep7.reference_kind == "lower-bound"
    assert rep7.count == empirical_density(7, machine(7), 0, 50_000).count
    other = empirical_density(7, machine(7), 3, 1000)
    assert other.reference is None and other.reference_kind == "none"
    assert rep.density == Fraction(rep.count, 100_000)
    assert rep.as_dict()["density"] == float(rep.density)
    with pytest.raises(ValueError):
        empirical_density(5, machine(5), 0, 0)


def test_empirical_density_matches_oracle():
    truth = oracle_residues((11,), 30_000)[11]
    rep = empirical_density(11, machine(11), 0, 30_000)
    assert rep.count == int(np.count_nonzero(truth[1:] == 0))


def test_cpd_examples():
    assert cpd(7, 3) == 0
    assert cpd_table(7) == [1, 1, 3, 0, 5, 2, 1]
    for p in (5, 7, 11, 13, 17):
        a = series_table(p)["a"]
        assert cpd(p, p - 1) == a[p - 1] % p
    with pytest.raises(ValueError):
        cpd(7, 7)


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_cpd_matches_machine(p):
    m = machine(p)
    one = m.constant_state(1)
    for d in range(p):
        assert m.states[m.step(one, d)].value == cpd(p, d)
        assert eval_origin(monomial_cartier(0, 0, d, p)) == cpd(p, d)
        assert monomial_cartier(0, 0, d, p) == BiPoly.constant(cpd(p, d), p)


def test_density_one_criterion():
    assert {p: density_one_criterion(p) for p in (7, 17, 19)} == {7: 3, 17: 5, 19: 4}
    for p in sorted(EXACT_ZERO_DENSITY_PRIMES) + [29]:
        assert density_one_criterion(p) is None


@pytest.mark.parametrize("p", [7, 17, 19])
def test_two_copies_of_digit_force_zero(p):
    d = density_one_criterion(p)
    m = machine(p)
    ns = np.arange(1, 10**6 + 1)
    hits = np.zeros(ns.shape, dtype=np.int64)
    rest = ns.copy()
    while rest.any():
        hits += (rest % p == d) & (rest > 0)
        rest //= p
    chosen = ns[hits >= 2]
    assert chosen.size > 0
    assert not m.eval_many(chosen).any()


def test_unit_subgroup_order():
    assert unit_subgroup_order([3], 7) == 6
    assert unit_subgroup_order([2], 7) == 3
    assert unit_subgroup_order([2, 6], 7) == 6
    assert unit_subgroup_order([0, 1], 7) == 1


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19, 23])
def test_forbidden_residues(p):
    rep = forbidden_residues(p, machine(p), oracle_limit=20_000)
    assert not rep.oracle_conflicts
    assert rep.forbidden == frozenset(range(p)) - rep.attainable
    if rep.generates_units:
        assert rep.forbidden <= {0}
    assert rep.as_dict()["p"] == p


@pytest.mark.parametrize("modulus", [2, 3, 5])
def test_classical_predicates(modulus):
    n_max = 100_000
    truth = oracle_residues((2, 3, 5), n_max)[modulus]
    for n in range(n_max + 1):
        pred = classical_predicate(modulus, n)
        if modulus == 3:
            assert pred == truth[n], n
        else:
            assert pred == (truth[n] == 0), n


def test_classical_predicate_examples():
    assert classical_predicate(2, 2)  # M_2 = 2
    assert not classical_predicate(2, 4)  # M_4 = 9
    assert classical_predicate(3, 0) == 1
    assert classical_predicate(5, 23)
    with pytest.raises(ValueError):
        classical_predicate(7, 3)
    with pytest.raises(ValueError):
        classical_predicate(5, -1)


def test_zero_one_digit_strings_are_ones():
    # the same consequence seen from the oracle side, for small primes
    truth = oracle_residues((7, 13), 20_000)
    for p in (7, 13):
        for n in range(1, 20_001):
            if set(base_digits(n, p)) <= {0, 1}:
                assert truth[p][n] == 1
    assert is_prime(13)
