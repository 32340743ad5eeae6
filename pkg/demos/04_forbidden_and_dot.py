# # Forbidden residues and a picture of the machine
#
# A residue is attainable when some nonzero digit leads into a state with
# that value.  The cpd values also tell us whether the reachable constants
# generate the whole unit group.

# %%

from pathlib import Path

from motzkin_automata import build
from motzkin_automata.analysis import forbidden_residues
from motzkin_automata.automaton import export_dot

for p in (5, 7, 11, 13, 17, 19, 23):
    rep = forbidden_residues(p, build(p), oracle_limit=20_000)
    print(p, "forbidden:", sorted(rep.forbidden), "generates units:", rep.generates_units)

# %%

# the p = 5 machine with the uninteresting constants folded together
dot = export_dot(build(5), collapse_constant_states=True)
print(dot)
Path("motzkin_mod_5.dot").write_text(dot)
# render with: dot -Tpng motzkin_mod_5.dot -o motzkin_mod_5.png
