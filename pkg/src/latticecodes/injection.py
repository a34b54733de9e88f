"""State injection and unencoding partitions for stabilizer codes.

Qubits are split into S_Z (prepared in |0>), S_X (|+>), S_Y (|i>) and U,
which carries the state to embed.  A qubit is moved out of U whenever doing
so keeps every logical operator of the prescribed type off S.  Candidate
sets are tested directly with linear algebra; the punctured group on U used
in the existence argument is not needed here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .code import PauliOp, StabilizerCode, num_logical
from .gf2 import BitMatrix, BitVector, SymplecticForm, rank, solve, span_intersection
from .tableau import Tableau

LETTERS = ("X", "Y", "Z")


def _units(n: int, kinds: Mapping[int, str]) -> np.ndarray:
    """One symplectic row per qubit: X, Y or Z on that qubit."""
    rows = np.zeros((len(kinds), 2 * n), dtype=np.uint8)
    for i, (q, w) in enumerate(sorted(kinds.items())):
        if w in ("X", "Y"):
            rows[i, q] = 1
        if w in ("Z", "Y"):
            rows[i, n + q] = 1
    return rows


def _commutation(code: StabilizerCode, rows: np.ndarray) -> np.ndarray:
    """rows J C^T: entry (i, j) is 1 iff row i anticommutes with check j."""
    c = code.checks.to_dense().astype(np.int64)
    n = code.n
    swapped = np.hstack([rows[:, n:], rows[:, :n]]).astype(np.int64)
    return ((swapped @ c.T) & 1).astype(np.uint8)


def _has_logical(code: StabilizerCode, units: np.ndarray) -> bool:
    """Is there a nontrivial logical in the span of ``units``?

    Commuting combinations form a space of dimension m - rank(B J C^T); the
    stabilizers among them have dimension dim(span B cap span C).
    """
    m = units.shape[0]
    if m == 0:
        return False
    commuting = m - rank(_commutation(code, units))
    trivial = span_intersection(units, code.checks).nrows
    return commuting > trivial


def cleaning_test(code: StabilizerCode, subset, kind: str = "X") -> bool:
    """True when no nontrivial logical of the given kind lives on ``subset``.

    ``kind`` is X, Z, Y or "standard"; for "standard" the subset maps each
    qubit to the letter of its prescribed factor.
    """
    kind = kind.upper() if kind != "standard" else kind
    if kind == "standard":
        kinds = dict(subset)
        if any(w not in LETTERS for w in kinds.values()):
            raise ValueError("standard factors must be X, Y or Z")
    elif kind in LETTERS:
        kinds = {int(q): kind for q in subset}
    else:
        raise ValueError("kind must be X, Y, Z or standard")
    if any(not 0 <= q < code.n for q in kinds):
        raise IndexError("qubit out of range")
    return not _has_logical(code, _units(code.n, kinds))


@dataclass
class InjectionSets:
    n: int
    s_z: list[int]
    s_x: list[int]
    s_y: list[int] = field(default_factory=list)
    u: list[int] = field(default_factory=list)

    @property
    def kinds(self) -> dict[int, str]:
        out = {q: "Z" for q in self.s_z}
        out.update({q: "X" for q in self.s_x})
        out.update({q: "Y" for q in self.s_y})
        return out

    def validate(self, code: StabilizerCode) -> None:
        parts = self.s_z + self.s_x + self.s_y + self.u
        if sorted(parts) != list(range(code.n)):
            raise ValueError("sets do not partition the qubits")
        if len(self.u) != num_logical(code):
            raise ValueError("|U| differs from k")
        if self.s_y or not code.is_css:
            ok = cleaning_test(code, self.kinds, "standard")
        else:
            ok = cleaning_test(code, self.s_x, "X") and cleaning_test(code, self.s_z, "Z")
        if not ok:
            raise ValueError("a logical operator is supported on the prepared qubits")

    def recipe(self) -> dict[int, str]:
        prep = {"Z": "|0>", "X": "|+>", "Y": "|i>"}
        out = {q: prep[w] for q, w in self.kinds.items()}
        out.update({q: "input" for q in self.u})
        return dict(sorted(out.items()))

    def to_json(self) -> dict:
        return {"n": self.n, "s_z": self.s_z, "s_x": self.s_x, "s_y": self.s_y, "u": self.u}


def _greedy(code: StabilizerCode, letters: Sequence[str], css: bool, order: Iterable[int] | None) -> InjectionSets:
    n = code.n
    kinds: dict[int, str] = {}
    u = []
    for q in (range(n) if order is None else order):
        q = int(q)
        for w in letters:
            trial = dict(kinds)
            trial[q] = w
            if css:
                same = {p: v for p, v in trial.items() if v == w}
                ok = not _has_logical(code, _units(n, same))
            else:
                ok = not _has_logical(code, _units(n, trial))
            if ok:
                kinds = trial
                break
        else:
            u.append(q)
    sets = InjectionSets(
        n,
        sorted(q for q, w in kinds.items() if w == "Z"),
        sorted(q for q, w in kinds.items() if w == "X"),
        sorted(q for q, w in kinds.items() if w == "Y"),
        sorted(u),
    )
    if len(sets.u) != num_logical(code):
        raise ArithmeticError(f"greedy pass stopped with |U| = {len(sets.u)} > k")
    return sets


def css_injection_sets(code: StabilizerCode, order: Iterable[int] | None = None) -> InjectionSets:
    """Move qubits to S_Z, else S_X, in ascending order (or the given order)."""
    if not code.is_css:
        raise ValueError("code has no CSS split")
    return _greedy(code, ("Z", "X"), True, order)


def noncss_injection_sets(
    code: StabilizerCode, order: Iterable[int] | None = None, letters: Sequence[str] = ("Z", "X", "Y")
) -> InjectionSets:
    """Move qubits to S_Z, S_X or S_Y keeping no standard logical on S.

    With Y tried last it is never chosen: if Z_q and X_q both complete to
    logicals then so does Y_q.  Put Y first to exercise |i> inputs.
    """
    if sorted(letters) != sorted(LETTERS):
        raise ValueError("letters must order X, Y and Z")
    return _greedy(code, tuple(letters), False, order)


@dataclass
class InjectedLogicalPair:
    qubit: int
    x_logical: PauliOp
    z_logical: PauliOp


def _complete(code: StabilizerCode, units: np.ndarray, target: np.ndarray) -> np.ndarray:
    """target + (combination of units) commuting with every check."""
    rhs = _commutation(code, target[None, :])[0]
    if not units.shape[0]:
        if rhs.any():
            raise ArithmeticError("no logical completion exists")
        return target.copy()
    c = solve(_commutation(code, units), rhs)
    if c is None:
        raise ArithmeticError("no logical completion exists")
    return target ^ ((c.astype(np.int64) @ units.astype(np.int64)) & 1).astype(np.uint8)


def injected_logical_pairs(code: StabilizerCode, sets: InjectionSets) -> list[InjectedLogicalPair]:
    """X~_q, Z~_q equal to X_q, Z_q on U and standard on S.

    For CSS sets the X part completes on S_X only and the Z part on S_Z only.
    """
    sets.validate(code)
    n = code.n
    css = code.is_css and not sets.s_y
    kinds = sets.kinds
    xunits = _units(n, {q: "X" for q in sets.s_x} if css else kinds)
    zunits = _units(n, {q: "Z" for q in sets.s_z} if css else kinds)
    pairs = []
    for q in sets.u:
        ex = np.zeros(2 * n, dtype=np.uint8)
        ex[q] = 1
        ez = np.zeros(2 * n, dtype=np.uint8)
        ez[n + q] = 1
        x = _complete(code, xunits, ex)
        z = _complete(code, zunits, ez)
        pairs.append(InjectedLogicalPair(q, PauliOp(BitVector.from_bits(x)), PauliOp(BitVector.from_bits(z))))
    # full symplectic pairing
    for a in pairs:
        for b in pairs:
            want = a.qubit == b.qubit
            if a.x_logical.commutes(b.z_logical) == want:
                raise ArithmeticError("injected logicals are not a symplectic pair set")
            if not (a.x_logical.commutes(b.x_logical) and a.z_logical.commutes(b.z_logical)):
                raise ArithmeticError("injected logicals of one type do not commute")
    return pairs


def unencoding_bases(sets: InjectionSets) -> dict[int, str]:
    """Single-qubit measurement basis for each prepared qubit."""
    return dict(sorted(sets.kinds.items()))


# ---------------------------------------------------------------------------
# tableau round trips


def _prepare_sets(t: Tableau, sets: InjectionSets) -> None:
    for q in sets.s_x:
        t.h(q)
    for q in sets.s_y:
        t.h(q)
        t.s(q)


def _apply_gates(t: Tableau, gates, qubits: Sequence[int]) -> None:
    for g in gates:
        if g[0] == "h":
            t.h(qubits[g[1]])
        elif g[0] == "s":
            t.s(qubits[g[1]])
        else:
            t.cnot(qubits[g[1]], qubits[g[2]])


def random_gates(k: int, rng: np.random.Generator, depth: int | None = None) -> list[tuple]:
    out = []
    if k == 0:
        return out
    for _ in range(depth if depth is not None else 4 * k + 4):
        kind = int(rng.integers(0, 3))
        if kind == 0:
            out.append(("h", int(rng.integers(0, k))))
        elif kind == 1:
            out.append(("s", int(rng.integers(0, k))))
        elif k > 1:
            a, b = rng.choice(k, size=2, replace=False)
            out.append(("cnot", int(a), int(b)))
    return out


def _lift(pairs: Sequence[InjectedLogicalPair], x: np.ndarray, z: np.ndarray) -> np.ndarray:
    v = np.zeros(2 * pairs[0].x_logical.n, dtype=np.uint8)
    for i, p in enumerate(pairs):
        if x[i]:
            v ^= p.x_logical.vector.to_array()
        if z[i]:
            v ^= p.z_logical.vector.to_array()
    return v


def inject(code: StabilizerCode, sets: InjectionSets, gates, rng: np.random.Generator) -> tuple[Tableau, list[int]]:
    """Prepare S, put the state given by ``gates`` on U, then measure every check."""
    t = Tableau(code.n)
    _prepare_sets(t, sets)
    _apply_gates(t, gates, sets.u)
    outcomes = []
    for row in code.checks.to_dense():
        out, _ = t.measure(PauliOp.from_xz(row[: code.n], row[code.n :]), rng)
        outcomes.append(out)
    return t, outcomes


def unencode(t: Tableau, sets: InjectionSets, pairs: Sequence[InjectedLogicalPair], rng: np.random.Generator) -> dict:
    """Measure S in its bases and undo the Pauli frame on U.

    The frame follows from the outcomes: the S part of each injected logical
    now has a known sign, which is transferred to its U part.
    """
    n = t.n
    outcome = {}
    for q, w in unencoding_bases(sets).items():
        p = PauliOp.from_support(n, x=[q] if w in "XY" else [], z=[q] if w in "ZY" else [])
        outcome[q], _ = t.measure(p, rng)
    k = len(pairs)
    # sign picked up by X~_i and Z~_i from their S factors
    sx = np.zeros(k, dtype=np.uint8)
    sz = np.zeros(k, dtype=np.uint8)
    for i, p in enumerate(pairs):
        for arr, op in ((sx, p.x_logical), (sz, p.z_logical)):
            for q in set(op.support()) - {p.qubit}:
                arr[i] ^= outcome[q] == -1
    # frame: Z_q flips X_q, X_q flips Z_q
    for i, p in enumerate(pairs):
        if sx[i]:
            t.pauli_z(p.qubit)
        if sz[i]:
            t.pauli_x(p.qubit)
    return {"outcomes": outcome, "frame_x": sz.tolist(), "frame_z": sx.tolist()}


def round_trip(code: StabilizerCode, sets: InjectionSets, trials: int = 100, seed: int = 0) -> int:
    """Count exact encode/unencode round trips of random states on U."""
    rng = np.random.default_rng(seed)
    pairs = injected_logical_pairs(code, sets)
    k = len(pairs)
    good = 0
    for _ in range(trials):
        gates = random_gates(k, rng)
        ref = Tableau(k)
        _apply_gates(ref, gates, list(range(k)))
        t, _ = inject(code, sets, gates, rng)
        ok = True
        for sign, g in ref.stabilizers():
            v = _lift(pairs, g.x, g.z)
            if t.peek(PauliOp(BitVector.from_bits(v))) != sign:
                ok = False
        unencode(t, sets, pairs, rng)
        n = code.n
        for sign, g in ref.stabilizers():
            x = np.zeros(n, dtype=np.uint8)
            z = np.zeros(n, dtype=np.uint8)
            x[sets.u] = g.x
            z[sets.u] = g.z
            if t.peek(PauliOp.from_xz(x, z)) != sign:
                ok = False
        good += ok
    return good
