# # Building the automaton for M_n mod p
#
# The machine starts from the polynomial R and keeps applying
# s -> Lambda_{d,d}(s * Q^(p-1)) until no new polynomial appears.
# Each state's output is its value at x = y = 0.

# %%

import numpy as np

from motzkin_automata import build
from motzkin_automata.oracle import motzkin_table

p = 7
m = build(p)
print(f"p = {p}: {len(m)} states")

# %%

# state list, constant states last
for s in m.states:
    kind = "constant" if s.is_constant else "polynomial"
    print(f"s{s.id:<3} {kind:<10} value {s.value}  {s.label}")

# %%

# transition table: row = state, column = digit
print(m.delta)

# %%

# feed the base-7 digits of n, least significant first
n = 15
print(np.base_repr(n, p), "->", m.eval(n))

# %%

# the whole range at once, compared against the brute-force table
values = m.eval_range(0, 10_001)
truth = motzkin_table(p, 10_000).values
print("agrees for n <= 10000:", bool(np.array_equal(values, truth)))
