"""The base-p automaton for ``M_n mod p``.

States are polynomials over GF(p).  Starting from ``R``, the transition on
digit ``d`` sends ``s`` to ``cartier(s * Q^(p-1), d, d)``; closing the state
set under all digits gives a finite machine.  Feeding the base-p digits of
``n`` (least significant first) and reading the constant term of the final
state yields ``M_n mod p``.
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from .bipoly import BiPoly, cartier_diagonal, eval_origin, poly_mul, poly_R, q_power
from .fieldcore import Prime, base_digits, is_prime

__all__ = [
    "State",
    "Automaton",
    "AutomatonFormatError",
    "build",
    "evaluate",
    "verify_tables",
    "serialize",
    "deserialize",
    "export_dot",
    "named_polys",
]


class AutomatonFormatError(ValueError):
    """Raised when a serialised automaton is malformed."""


@dataclass(frozen=True)
class State:
    id: int
    poly: BiPoly
    value: int
    is_constant: bool
    is_loop: bool = False

    @property
    def label(self) -> str:
        return self.poly.to_str()


@dataclass(frozen=True, eq=False)
class Automaton:
    p: Prime
    states: tuple[State, ...]
    delta: np.ndarray  # shape (n_states, p), state ids
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {s.poly: s.id for s in self.states})
        self.delta.setflags(write=False)

    def __len__(self) -> int:
        return len(self.states)

    def __eq__(self, other):
        if not isinstance(other, Automaton):
            return NotImplemented
        return (
            self.p == other.p
            and [s.poly for s in self.states] == [s.poly for s in other.states]
            and np.array_equal(self.delta, other.delta)
        )

    @property
    def initial(self) -> State:
        return self.states[0]

    @property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.states], dtype=np.int64)

    def find(self, poly: BiPoly) -> int | None:
        """Id of the state carrying ``poly``, or ``None``."""
        return self._index.get(poly)

    def constant_state(self, c: int) -> int | None:
        return self.find(BiPoly.constant(c, self.p))

    def step(self, state: int, digit: int) -> int:
        return int(self.delta[state, digit])

    def run(self, digits: Iterable[int], start: int = 0) -> int:
        """Final state after feeding ``digits`` in the order given."""
        s = start
        for d in digits:
            s = int(self.delta[s, d])
        return s

    def eval(self, n: int) -> int:
        """``M_n mod p``; ``n = 0`` (empty digit string) returns 1."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        if n == 0:
            return 1 % self.p.value
        return self.states[self.run(base_digits(n, self.p.value))].value

    def eval_many(self, ns) -> np.ndarray:
        """Vectorised :meth:`eval` over an integer array."""
        ns = np.asarray(ns, dtype=np.int64)
        if ns.size and ns.min() < 0:
            raise ValueError("n must be nonnegative")
        p = self.p.value
        state = np.zeros(ns.shape, dtype=np.int64)
        rest = ns.copy()
        active = rest > 0
        while active.any():
            digit = rest % p
            state = np.where(active, self.delta[state, digit], state)
            rest //= p
            active = rest > 0
        out = self.values[state]
        return np.where(ns == 0, 1 % p, out)

    def eval_range(self, lo: int, hi: int, chunk: int = 1 << 20) -> np.ndarray:
        """Values for ``lo <= n < hi``."""
        parts = [self.eval_many(np.arange(a, min(a + chunk, hi), dtype=np.int64)) for a in range(lo, hi, chunk)]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def reachable_constants(self) -> list[int]:
        return sorted(s.value for s in self.states if s.is_constant)


def _make_states(polys: list[BiPoly], delta: np.ndarray) -> tuple[State, ...]:
    ids = np.arange(len(polys))[:, None]
    loops = (delta == ids).all(axis=1)
    return tuple(
        State(i, poly, eval_origin(poly), poly.is_constant(), bool(loops[i])) for i, poly in enumerate(polys)
    )


def build(p) -> Automaton:
    """Breadth-first closure from ``R`` under ``s -> cartier(s Q^(p-1), d, d)``.

    States are numbered in discovery order: sources by ascending id, digits
    ascending within each source.
    """
    p = p if isinstance(p, Prime) else Prime(p)
    qp1 = q_power(p.value)
    polys = [poly_R(p.value)]
    index = {polys[0]: 0}
    rows = []
    i = 0
    while i < len(polys):
        row = []
        for t in cartier_diagonal(poly_mul(polys[i], qp1)):
            j = index.get(t)
            if j is None:
                j = index[t] = len(polys)
                polys.append(t)
            row.append(j)
        rows.append(row)
        i += 1
    delta = np.array(rows, dtype=np.int64)
    return Automaton(p, _make_states(polys, delta), delta)


def evaluate(m: Automaton, n: int) -> int:
    return m.eval(n)


# ---------------------------------------------------------------------------
# reference transition tables


def named_polys(p: int) -> dict[str, BiPoly]:
    """The non-constant polynomials that label the reference tables."""
    p = int(p)
    xy = BiPoly({(1, 1): 1}, p)
    xyy1 = BiPoly({(1, 1): 1, (1, 2): 1}, p)  # xy(y+1)
    return {
        "s1": poly_R(p),
        "s2": BiPoly({(2, 2): 2, (2, 3): 2}, p) + xy,
        "-xy(y+1)": -xyy1,
        "-xy(y+1)-1": -xyy1 - 1,
        "xy(y+1)-1": xyy1 - 1,
        "xy(y+1)": xyy1,
        "xy(y+1)+2": xyy1 + 2,
    }


def _reference_cells(p: Prime) -> list[tuple[str, list[int], str]]:
    """``(source, digits, target)`` cells; targets are names or ``"c"`` / ``"const:k"``."""
    q = p.value
    cells = [
        ("s1", [0], "s2"),
        ("s1", [1], "const:1"),
        ("s2", [0], "s2"),
        ("s2", [1], "const:1"),
        ("const:1", [0, 1], "const:1"),
        ("const:0", list(range(q)), "const:0"),
    ]
    if p.class6 == 1:
        cells += [
            ("s1", list(range(2, q - 2)), "c"),
            ("s1", [q - 2], "-xy(y+1)"),
            ("s1", [q - 1], "xy(y+1)+2"),
            ("s2", list(range(2, q)), "c"),
            ("const:1", list(range(2, q - 1)), "c"),
            ("const:1", [q - 1], "const:1"),
            ("-xy(y+1)", [0], "const:0"),
            ("-xy(y+1)", list(range(1, q - 1)), "c"),
            ("-xy(y+1)", [q - 1], "-xy(y+1)"),
            ("xy(y+1)+2", [0], "const:2"),
            ("xy(y+1)+2", list(range(1, q - 2)), "c"),
            ("xy(y+1)+2", [q - 2], "const:0"),
            ("xy(y+1)+2", [q - 1], "xy(y+1)+2"),
        ]
    else:
        cells += [
            ("s1", list(range(2, q - 2)), "c"),
            ("s1", [q - 2], "-xy(y+1)-1"),
            ("s1", [q - 1], "xy(y+1)-1"),
            ("s2", list(range(2, q)), "c"),
            ("const:1", list(range(2, q - 1)), "c"),
            ("const:1", [q - 1], f"const:{q - 1}"),
            ("-xy(y+1)-1", [0], f"const:{q - 1}"),
            ("-xy(y+1)-1", list(range(1, q - 3)) + [q - 2], "c"),
            ("-xy(y+1)-1", [q - 3], "const:0"),
            ("-xy(y+1)-1", [q - 1], "-xy(y+1)"),
            ("xy(y+1)-1", [0], f"const:{q - 1}"),
            ("xy(y+1)-1", list(range(1, q - 1)), "c"),
            ("xy(y+1)-1", [1], "const:0"),
            ("xy(y+1)-1", [q - 1], "xy(y+1)+2"),
            ("-xy(y+1)", [0], "const:0"),
            ("-xy(y+1)", list(range(1, q - 1)), "c"),
            ("-xy(y+1)", [q - 1], "-xy(y+1)-1"),
            ("xy(y+1)+2", [0], "const:2"),
            ("xy(y+1)+2", list(range(1, q - 2)), "c"),
            ("xy(y+1)+2", [q - 2], "const:0"),
            ("xy(y+1)+2", [q - 1], "xy(y+1)-1"),
        ]
    return cells


def verify_tables(m: Automaton, include_constant_cells: bool = True) -> list[str]:
    """Compare the machine with the reference state/transition tables.

    Returns human-readable mismatch descriptions (empty when everything
    agrees).  ``"c"`` cells only require the target to be some constant
    state; pass ``include_constant_cells=False`` to skip them.
    """
    p = m.p
    names = named_polys(p.value)

    def resolve(name: str) -> BiPoly:
        if name.startswith("const:"):
            return BiPoly.constant(int(name[6:]), p.value)
        return names[name]

    problems = []
    for src, digits, dst in _reference_cells(p):
        if dst == "c" and not include_constant_cells:
            continue
        sid = m.find(resolve(src))
        if sid is None:
            problems.append(f"state {src} missing")
            continue
        for d in digits:
            tgt = m.states[m.step(sid, d)]
            if dst == "c":
                if not tgt.is_constant:
                    problems.append(f"({src}, {d}) -> {tgt.label}, expected a constant")
            elif tgt.poly != resolve(dst):
                problems.append(f"({src}, {d}) -> {tgt.label}, expected {resolve(dst)}")
    # problems are reported once per state even when several cells mention it
    return list(dict.fromkeys(problems))


# ---------------------------------------------------------------------------
# serialisation


def serialize(m: Automaton) -> dict:
    return {
        "p": m.p.value,
        "initial": 0,
        "states": [
            {"id": s.id, "poly": [[i, j, c] for (i, j), c in s.poly.terms], "value": s.value} for s in m.states
        ],
        "delta": m.delta.tolist(),
    }


def dumps(m: Automaton) -> str:
    return json.dumps(serialize(m), separators=(",", ":"))


def deserialize(doc) -> Automaton:
    """Inverse of :func:`serialize`; accepts a dict or a JSON string."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise AutomatonFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise AutomatonFormatError("document must be a JSON object")
    for key in ("p", "initial", "states", "delta"):
        if key not in doc:
            raise AutomatonFormatError(f"missing field {key!r}")
    p = doc["p"]
    if not isinstance(p, int) or not is_prime(p) or p < 5:
        raise AutomatonFormatError(f"invalid prime {p!r}")
    p = Prime(p)
    if doc["initial"] != 0:
        raise AutomatonFormatError("initial state must be 0")
    states, delta = doc["states"], doc["delta"]
    if not isinstance(states, list) or not states:
        raise AutomatonFormatError("states must be a nonempty list")
    n = len(states)
    polys = []
    for k, entry in enumerate(states):
        try:
            sid, terms, value = entry["id"], entry["poly"], entry["value"]
        except (KeyError, TypeError) as exc:
            raise AutomatonFormatError(f"state {k}: malformed entry") from exc
        if sid != k:
            raise AutomatonFormatError(f"state {k}: id {sid!r} out of order")
        keys = []
        for term in terms:
            if not (isinstance(term, list) and len(term) == 3 and all(isinstance(v, int) for v in term)):
                raise AutomatonFormatError(f"state {k}: bad term {term!r}")
            i, j, c = term
            if i < 0 or j < 0 or not 0 < c < p.value:
                raise AutomatonFormatError(f"state {k}: term {term!r} out of range")
            keys.append((i, j))
        if keys != sorted(set(keys)):
            raise AutomatonFormatError(f"state {k}: terms not strictly sorted by (i, j)")
        poly = BiPoly({(i, j): c for i, j, c in terms}, p.value)
        if value != eval_origin(poly):
            raise AutomatonFormatError(f"state {k}: value {value!r} does not match polynomial")
        polys.append(poly)
    if len(set(polys)) != n:
        raise AutomatonFormatError("duplicate state polynomials")
    if not isinstance(delta, list) or len(delta) != n:
        raise AutomatonFormatError(f"delta must have one row per state ({n})")
    for k, row in enumerate(delta):
        if not isinstance(row, list) or len(row) != p.value:
            raise AutomatonFormatError(f"delta row {k} must have exactly p={p.value} entries")
        for t in row:
            if not isinstance(t, int) or not 0 <= t < n:
                raise AutomatonFormatError(f"delta row {k}: target {t!r} is not a state id")
    arr = np.array(delta, dtype=np.int64)
    return Automaton(p, _make_states(polys, arr), arr)


# ---------------------------------------------------------------------------
# DOT export


def _digit_label(digits: list[int], p: int) -> str:
    if len(digits) == p:
        return "all"
    runs = []
    start = prev = digits[0]
    for d in digits[1:] + [None]:
        if d is not None and d == prev + 1:
            prev = d
            continue
        runs.append(str(start) if start == prev else f"{start}-{prev}" if prev > start + 1 else f"{start},{prev}")
        if d is not None:
            start = prev = d
    return ",".join(runs)


def export_dot(m: Automaton, collapse_constant_states: bool = False, keep_constants=(0, 1)) -> str:
    """Graphviz digraph of the machine.

    Parallel edges are merged into one edge labelled with its digits.  With
    ``collapse_constant_states`` every constant state except those in
    ``keep_constants`` is folded into a single node ``c``.
    """
    p = m.p.value
    node_of = {}
    labels = {}
    folded = 0
    for s in m.states:
        if collapse_constant_states and s.is_constant and s.value not in keep_constants:
            node_of[s.id] = "c"
            folded += 1
        else:
            node_of[s.id] = f"s{s.id}"
            labels[f"s{s.id}"] = str(s.value) if s.is_constant else s.label
    if folded:
        labels["c"] = f"c ({folded} constants)"
    edges: dict[tuple[str, str], set[int]] = {}
    for s in m.states:
        for d in range(p):
            key = (node_of[s.id], node_of[m.step(s.id, d)])
            edges.setdefault(key, set()).add(d)
    lines = [f'digraph "motzkin_mod_{p}" {{', "  rankdir=LR;", '  __start [shape=point, label=""];']
    for node, label in labels.items():
        shape = "box" if node == "c" else "ellipse"
        lines.append(f'  {node} [label="{label}", shape={shape}];')
    lines.append(f"  __start -> {node_of[0]};")
    for (a, b), digits in edges.items():
        lines.append(f'  {a} -> {b} [label="{_digit_label(sorted(digits), p)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
