# # How often is M_n divisible by p?
#
# The automaton gives families of n with M_n = 0 (mod p).  Their densities
# add up to 2/(p(p-1)).  For some primes a single digit forces zero
# whenever it appears twice, which pushes the density towards 1.

# %%

from motzkin_automata import build
from motzkin_automata.analysis import (
    cpd_table,
    density_formula,
    density_one_criterion,
    empirical_density,
    table1_forms,
)

for p in (5, 7, 11, 13):
    forms = table1_forms(p)
    print(p, [f.describe() for f in forms], sum(density_formula(f) for f in forms))

# %%

N = 10**6
for p in (5, 7, 11, 13, 17, 19):
    rep = empirical_density(p, build(p), 0, N)
    print(f"p={p:2d}  empirical {float(rep.density):.5f}  reference {float(rep.reference):.5f} ({rep.reference_kind})")

# %%

# where the constant 1 goes on each digit; a zero in 2..p-2 is the density-1 digit
for p in (5, 7, 11, 13, 17, 19, 23, 29):
    print(p, cpd_table(p), density_one_criterion(p))
