"""Motzkin numbers modulo a prime p >= 5 through a finite automaton.

The automaton's states are bivariate polynomials over GF(p).  Its
transitions come from the Cartier operator applied to ``s * Q^(p-1)``.
Brute-force oracles, the auxiliary series a_n, b_n, c_n and density tools
check it independently.
"""

from .analysis import (
    DensityReport,
    StructuredSet,
    classical_predicate,
    cpd,
    density_formula,
    density_one_criterion,
    empirical_density,
    forbidden_residues,
    table1_forms,
    verify_forms,
)
from .automaton import Automaton, build, deserialize, export_dot, serialize, verify_tables
from .bipoly import BiPoly, cartier, monomial_cartier, poly_mul, poly_pow, poly_Q, poly_R, q_power
from .fieldcore import Prime, binom_mod
from .oracle import motzkin_binomial, motzkin_convolution, motzkin_table
from .series import check_identities, series_closed, series_recurrence

__version__ = "0.1.0"
