# # The alternating binomial sums a_n, b_n, c_n
#
# They appear as constants in the Cartier images of 1, y, xy and friends.
# Here we look at their period-6 structure and check the identities the
# transition tables depend on.

# %%

from motzkin_automata.fieldcore import is_prime
from motzkin_automata.series import check_identities, series_closed, series_table

t = series_table(18)
for n in range(19):
    print(n, t["a"][n], t["b"][n], t["c"][n])

# %%

# a_n repeats with period 6; b_n and c_n grow linearly and quadratically
print([series_closed(n).a for n in range(12)])
print([series_closed(n).b for n in range(0, 60, 6)])

# %%

failures = {p: check_identities(p) for p in range(5, 1000) if is_prime(p)}
print("primes checked:", len(failures))
print("failing:", {p: f for p, f in failures.items() if f})
