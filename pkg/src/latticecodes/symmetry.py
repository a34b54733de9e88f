"""Space-group symmetries of code crystals and the gates they induce.

Crystal coordinates are doubled, so a shift b is stored as the integer
vector 2b and every comparison happens modulo 2 Lambda.  An element (M, b)
acts on row vectors as r -> rM + b.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .code import LogicalBasis, StabilizerCode, is_symmetry, logical_action, logical_basis, permutation_symplectic
from .complexes import ChainComplex, Crystal, cell_coordinates
from .gf2 import BitMatrix, is_symplectic, row_span_equal
from .groups import StabilizerChain, to_rows
from .lattice import LatticeAutomorphism, integral_automorphisms, lattice_automorphisms


@dataclass(frozen=True)
class SpaceGroupElement:
    """(M, b) with M an integral orthogonal matrix and b stored doubled."""

    m: tuple[tuple[int, ...], ...]
    b2: tuple[int, ...]

    @classmethod
    def make(cls, m, b2) -> SpaceGroupElement:
        return cls(tuple(map(tuple, np.asarray(m, dtype=np.int64).tolist())), tuple(int(x) for x in b2))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.m, dtype=np.int64)

    @property
    def b(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, 2) for x in self.b2)

    @property
    def dim(self) -> int:
        return len(self.b2)

    def act(self, doubled: np.ndarray) -> np.ndarray:
        return np.asarray(doubled, dtype=np.int64) @ self.matrix + np.asarray(self.b2, dtype=np.int64)

    def then(self, other: SpaceGroupElement) -> SpaceGroupElement:
        """Apply self first, then other: (MM', bM' + b')."""
        m2 = other.matrix
        return SpaceGroupElement.make(self.matrix @ m2, np.asarray(self.b2) @ m2 + np.asarray(other.b2))

    def reduced(self, crystal: Crystal) -> SpaceGroupElement:
        return SpaceGroupElement(self.m, crystal.reduce(self.b2))

    def to_json(self) -> dict:
        return {"m": [list(r) for r in self.m], "b": [str(x) for x in self.b]}


def identity_element(dim: int) -> SpaceGroupElement:
    return SpaceGroupElement.make(np.eye(dim, dtype=np.int64), [0] * dim)


# ---------------------------------------------------------------------------
# point matching


class _PointIndex:
    """Sorted mixed-radix keys of points reduced modulo an upper-triangular HNF."""

    def __init__(self, period: np.ndarray, points: np.ndarray):
        self.h = np.asarray(period, dtype=np.int64)
        self.radix = np.concatenate([[1], np.cumprod(np.diag(self.h))[:-1]])
        keys = self.keys(points)
        self.order = np.argsort(keys, kind="stable")
        self.sorted = keys[self.order]
        if np.any(np.diff(self.sorted) == 0):
            raise ValueError("crystal has coincident points")

    def keys(self, points: np.ndarray) -> np.ndarray:
        p = np.array(points, dtype=np.int64, copy=True).reshape(-1, self.h.shape[0])
        for i in range(self.h.shape[0]):
            q = np.floor_divide(p[:, i], self.h[i, i])
            p -= q[:, None] * self.h[i]
        return p @ self.radix

    def lookup(self, points: np.ndarray) -> np.ndarray | None:
        """Index of each point, or None if some point is absent."""
        k = self.keys(points)
        pos = np.searchsorted(self.sorted, k)
        pos = np.minimum(pos, len(self.sorted) - 1)
        if not np.array_equal(self.sorted[pos], k):
            return None
        return self.order[pos]


RULES = ("same", "swap")


@dataclass
class CrystalSymmetry:
    """A space-group element together with the permutations it induces."""

    element: SpaceGroupElement
    rule: str
    qubit_perm: np.ndarray
    xcheck_perm: np.ndarray
    zcheck_perm: np.ndarray

    def perm_key(self) -> bytes:
        return self.qubit_perm.astype(np.int64).tobytes()


def _induced(crystal: Crystal, idx: dict, g: SpaceGroupElement, rule: str):
    q = idx["qubit"].lookup(g.act(crystal.qubit_coords))
    if q is None or len(np.unique(q)) != len(q):
        return None
    tx, tz = ("xcheck", "zcheck") if rule == "same" else ("zcheck", "xcheck")
    x = idx[tx].lookup(g.act(crystal.xcheck_coords))
    if x is None:
        return None
    z = idx[tz].lookup(g.act(crystal.zcheck_coords))
    if z is None:
        return None
    return q, x, z


def _incidence_ok(code: StabilizerCode, sym: CrystalSymmetry) -> bool:
    cx, cz = code.cx.to_dense(), code.cz.to_dense()
    tx, tz = (cx, cz) if sym.rule == "same" else (cz, cx)
    # check c -> sigma(c), qubit i -> pi(i): target[sigma(c), pi(i)] = source[c, i]
    ok_x = np.array_equal(tx[np.ix_(sym.xcheck_perm, sym.qubit_perm)], cx)
    ok_z = np.array_equal(tz[np.ix_(sym.zcheck_perm, sym.qubit_perm)], cz)
    return ok_x and ok_z


def find_space_group(
    crystal: Crystal,
    autos: Sequence[LatticeAutomorphism],
    rule: str = "same",
    code: StabilizerCode | None = None,
) -> list[CrystalSymmetry]:
    """All (M, b) mapping qubits to qubits and checks by ``rule``.

    Shift candidates are r_k - r_0 M over all qubit points; each is validated
    on every coordinate set and, when a code is given, on exact incidence.
    Shifts are reduced modulo Lambda.  Only integral automorphisms act on the
    cubic crystal, so fractional ones are skipped.
    """
    if rule not in RULES:
        raise ValueError(f"rule must be one of {RULES}")
    period = crystal.period.rows
    idx = {
        "qubit": _PointIndex(period, crystal.qubit_coords),
        "xcheck": _PointIndex(period, crystal.xcheck_coords),
        "zcheck": _PointIndex(period, crystal.zcheck_coords),
    }
    out: list[CrystalSymmetry] = []
    seen = set()
    r0 = crystal.qubit_coords[0]
    for a in autos:
        if not a.is_integral:
            continue
        m = a.num
        for b2 in crystal.qubit_coords - r0 @ m:
            g = SpaceGroupElement.make(m, b2).reduced(crystal)
            if g in seen:
                continue
            seen.add(g)
            hit = _induced(crystal, idx, g, rule)
            if hit is None:
                continue
            sym = CrystalSymmetry(g, rule, *hit)
            if code is not None and not _incidence_ok(code, sym):
                continue
            out.append(sym)
    return out


def distinct_by_permutation(syms: Sequence[CrystalSymmetry]) -> list[CrystalSymmetry]:
    out, keys = [], set()
    for s in syms:
        k = s.perm_key()
        if k not in keys:
            keys.add(k)
            out.append(s)
    return out


# ---------------------------------------------------------------------------
# gates


def _perm_matrix(perm: np.ndarray) -> np.ndarray:
    n = len(perm)
    p = np.zeros((n, n), dtype=np.uint8)
    p[np.arange(n), perm] = 1
    return p


def permutation_symmetry_matrix(sym: CrystalSymmetry, code: StabilizerCode | None = None) -> BitMatrix:
    """U(P) = diag(P, P) for a type-preserving symmetry."""
    if sym.rule != "same":
        raise ValueError("permutation symmetries must preserve check types")
    u = permutation_symplectic(sym.qubit_perm)
    if code is not None and not is_symmetry(code, u):
        raise ArithmeticError("induced permutation is not a code symmetry")
    return u


@dataclass
class ZXDuality:
    """Qubit permutation D exchanging RowSpan(C_X) and RowSpan(C_Z)."""

    perm: np.ndarray
    code: StabilizerCode = field(repr=False)

    def __post_init__(self):
        self.perm = np.asarray(self.perm, dtype=np.int64)
        d = BitMatrix.from_dense(_perm_matrix(self.perm))
        cx, cz = self.code.cx, self.code.cz
        if not (row_span_equal(cx @ d, cz) and row_span_equal(cz @ d, cx)):
            raise ValueError("permutation is not a ZX duality")

    @classmethod
    def from_symmetry(cls, sym: CrystalSymmetry, code: StabilizerCode) -> ZXDuality:
        if sym.rule != "swap":
            raise ValueError("ZX dualities come from type-swapping symmetries")
        return cls(sym.qubit_perm, code)

    @property
    def involutive(self) -> bool:
        return bool(np.array_equal(self.perm[self.perm], np.arange(len(self.perm))))

    @property
    def matrix(self) -> np.ndarray:
        return _perm_matrix(self.perm)


def hadamard_type(d: ZXDuality) -> BitMatrix:
    """H_D = [[0, D], [D, 0]]: X on qubit i becomes Z on D(i) and back."""
    p = d.matrix
    z = np.zeros_like(p)
    u = BitMatrix.from_dense(np.block([[z, p], [p, z]]))
    if not is_symmetry(d.code, u):
        raise ArithmeticError("Hadamard-type gate is not a code symmetry")
    return u


def phase_type(d: ZXDuality) -> BitMatrix:
    """S_D = [[1, D], [0, 1]]: S on fixed qubits, CZ on swapped pairs."""
    p = d.matrix
    if not np.array_equal(p, p.T):
        raise ValueError("Phase-type gates need a symmetric D (an involution)")
    eye = np.eye(len(p), dtype=np.uint8)
    u = BitMatrix.from_dense(np.block([[eye, p], [np.zeros_like(p), eye]]))
    if not is_symmetry(d.code, u):
        raise ArithmeticError("Phase-type gate is not a code symmetry")
    return u


def is_order_two(sym: CrystalSymmetry, crystal: Crystal) -> bool:
    """M^2 = 1 and bM + b = 0 modulo Lambda."""
    g = sym.element
    m = g.matrix
    if not np.array_equal(m @ m, np.eye(g.dim, dtype=np.int64)):
        return False
    return not any(crystal.reduce(np.asarray(g.b2) @ m + np.asarray(g.b2)))


# ---------------------------------------------------------------------------
# group orders


def group_order(generators: Sequence) -> int:
    """Exact order of the subgroup of Sp(2k, F2) generated by the matrices."""
    gens = [BitMatrix.coerce(g) for g in generators]
    if not gens:
        return 1
    for g in gens:
        if not is_symplectic(g):
            raise ValueError("generator is not symplectic")
    return StabilizerChain(gens[0].nrows, gens).order()


def independent_generators(actions: Sequence) -> list[int]:
    """Indices of actions not already in the group generated by earlier ones."""
    if not actions:
        return []
    n = BitMatrix.coerce(actions[0]).nrows
    chain = StabilizerChain(n)
    return [i for i, a in enumerate(actions) if chain.add(to_rows(BitMatrix.coerce(a)))]


# ---------------------------------------------------------------------------
# full pipeline


@dataclass
class GateRecord:
    type: str
    symmetry: CrystalSymmetry
    matrix: BitMatrix
    action: BitMatrix

    def to_json(self) -> dict:
        return {
            "type": self.type,
            "space_group": self.symmetry.element.to_json(),
            "symplectic_matrix": [np.flatnonzero(r).tolist() for r in self.matrix.to_dense()],
            "logical_action": self.action.to_dense().tolist(),
        }


@dataclass
class CrystallineReport:
    n_automorphisms: int
    n_integral: int
    n_same: int
    n_swap: int
    n_order_two: int
    permutation: list[GateRecord]
    hadamard: list[GateRecord]
    phase: list[GateRecord]
    distinct_permutations: int
    group_order: int
    phase_generators: list[int]
    basis: LogicalBasis = field(repr=False)

    def all_gates(self) -> list[GateRecord]:
        return self.permutation + self.hadamard + self.phase

    def to_json(self, include_gates: bool = False) -> dict:
        out = {
            "automorphisms": self.n_automorphisms,
            "integral_automorphisms": self.n_integral,
            "permutation_symmetries": self.n_same,
            "distinct_permutations": self.distinct_permutations,
            "distinct_permutation_actions": len(self.permutation),
            "zx_dualities": self.n_swap,
            "order_two_dualities": self.n_order_two,
            "hadamard_actions": len(self.hadamard),
            "phase_actions": len(self.phase),
            "independent_phase_actions": len(self.phase_generators),
            "group_order": self.group_order,
        }
        if include_gates:
            out["gates"] = [g.to_json() for g in self.all_gates()]
        return out


def _dense_action(ld: np.ndarray, k: int, n: int, kind: str, perm: np.ndarray) -> np.ndarray:
    """L U J L^T J for a permutation-built gate, without re-verifying U."""
    x, z = ld[:, :n], ld[:, n:]
    px = np.zeros_like(x)
    pz = np.zeros_like(z)
    px[:, perm] = x
    pz[:, perm] = z
    if kind == "permutation":
        lu = np.hstack([px, pz])
    elif kind == "hadamard":
        lu = np.hstack([pz, px])
    else:
        lu = np.hstack([x, (px + z) & 1])
    lj = np.hstack([ld[:, n:], ld[:, :n]])
    m = (lu.astype(np.int64) @ lj.T.astype(np.int64)) & 1
    return np.hstack([m[:, k:], m[:, :k]]).astype(np.uint8)


def crystalline_gates(c: ChainComplex, qubit_degree: int, dual: bool = False) -> CrystallineReport:
    """Space-group search and gate synthesis for the cubic (q, D-q) code.

    Every candidate's logical action is computed; one gate per distinct
    action is emitted and fully verified (symplectic, is_symmetry).
    """
    code = _code_for(c, qubit_degree, dual)
    crystal = cell_coordinates(c, qubit_degree, dual)
    autos = lattice_automorphisms(c.meta["lattice"])
    integral = [a for a in autos if a.is_integral]
    basis = logical_basis(code)
    ld = basis.L.to_dense()
    n, k = code.n, basis.k

    def emit(kind, syms, build):
        out, keys = [], set()
        for s in syms:
            act = _dense_action(ld, k, n, kind, s.qubit_perm)
            key = act.tobytes()
            if key in keys:
                continue
            keys.add(key)
            u = build(s)
            verified = logical_action(code, basis, u)
            if not np.array_equal(verified.to_dense(), act):
                raise ArithmeticError("fast logical action disagrees with the verified one")
            out.append(GateRecord(kind, s, u, verified))
        return out

    same = find_space_group(crystal, integral, "same", code)
    swap = find_space_group(crystal, integral, "swap", code)
    invol = [s for s in swap if is_order_two(s, crystal)]
    perms = emit("permutation", same, lambda s: permutation_symmetry_matrix(s, code))
    had = emit("hadamard", swap, lambda s: hadamard_type(ZXDuality.from_symmetry(s, code)))
    phase = emit("phase", invol, lambda s: phase_type(ZXDuality.from_symmetry(s, code)))
    phase_gen = independent_generators([g.action for g in phase])
    gens = [g.action for g in perms + had + phase]
    return CrystallineReport(
        n_automorphisms=len(autos),
        n_integral=len(integral),
        n_same=len(same),
        n_swap=len(swap),
        n_order_two=len(invol),
        permutation=perms,
        hadamard=had,
        phase=phase,
        distinct_permutations=len(distinct_by_permutation(same)),
        group_order=group_order(gens) if gens else 1,
        phase_generators=phase_gen,
        basis=basis,
    )


def _code_for(c: ChainComplex, q: int, dual: bool) -> StabilizerCode:
    from .complexes import css_from_complex

    return css_from_complex(c, q, dual)
