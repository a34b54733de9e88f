"""Stabilizer codes in the binary symplectic picture.

A Pauli operator X(a) Z(b) on n qubits is the row vector (a | b) of length 2n.
Phases are dropped here; the tableau simulator is the only place that keeps
signs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .gf2 import (
    BitMatrix,
    BitVector,
    SymplecticForm,
    inverse,
    is_symplectic,
    kernel,
    rank,
    row_basis,
    row_span_equal,
    symplectic_gram,
)


class PauliOp:
    """Unsigned Pauli operator stored as (x | z)."""

    __slots__ = ("vector",)

    def __init__(self, vector: BitVector):
        if vector.length % 2:
            raise ValueError("Pauli vectors have even length")
        self.vector = vector

    @classmethod
    def from_xz(cls, x: Sequence[int], z: Sequence[int]) -> PauliOp:
        x = np.asarray(x, dtype=np.uint8)
        z = np.asarray(z, dtype=np.uint8)
        if x.shape != z.shape:
            raise ValueError("x and z parts differ in length")
        return cls(BitVector.from_bits(np.concatenate([x, z])))

    @classmethod
    def from_support(cls, n: int, x: Iterable[int] = (), z: Iterable[int] = ()) -> PauliOp:
        xs = np.zeros(n, dtype=np.uint8)
        zs = np.zeros(n, dtype=np.uint8)
        for q in x:
            xs[q] ^= 1
        for q in z:
            zs[q] ^= 1
        return cls.from_xz(xs, zs)

    @classmethod
    def from_string(cls, s: str) -> PauliOp:
        """Parse a label such as ``"XZZXI"``."""
        table = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
        pairs = [table[c] for c in s.upper()]
        return cls.from_xz([p[0] for p in pairs], [p[1] for p in pairs])

    @property
    def n(self) -> int:
        return self.vector.length // 2

    @property
    def x(self) -> np.ndarray:
        return self.vector.to_array()[: self.n]

    @property
    def z(self) -> np.ndarray:
        return self.vector.to_array()[self.n :]

    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def support(self) -> list[int]:
        return np.flatnonzero(self.x | self.z).tolist()

    def commutes(self, other: PauliOp) -> bool:
        a, b = self.vector.to_array(), other.vector.to_array()
        n = self.n
        return int(a[:n] @ b[n:] + a[n:] @ b[:n]) % 2 == 0

    def __mul__(self, other: PauliOp) -> PauliOp:
        return PauliOp(self.vector ^ other.vector)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PauliOp) and self.vector == other.vector

    def __hash__(self) -> int:
        return hash(self.vector)

    def label(self) -> str:
        chars = "IXZY"
        return "".join(chars[int(a) + 2 * int(b)] for a, b in zip(self.x, self.z))

    def __repr__(self) -> str:
        return f"PauliOp({self.label()})"


class StabilizerCode:
    """Check matrix C (m x 2n) with C J C^T = 0, optionally with a CSS split."""

    def __init__(self, n: int, checks, css_split=None, name: str | None = None):
        checks = BitMatrix.coerce(checks) if checks is not None else BitMatrix.zeros(0, 2 * n)
        if checks.ncols != 2 * n:
            raise ValueError(f"check matrix must have {2 * n} columns")
        if checks.nrows and symplectic_gram(checks).any():
            raise ValueError("checks do not commute")
        self.n = int(n)
        self.checks = checks
        self.name = name
        self.css_split = None
        if css_split is not None:
            cx, cz = (BitMatrix.coerce(m) for m in css_split)
            if cx.ncols != n or cz.ncols != n:
                raise ValueError("CSS blocks must have n columns")
            self.css_split = (cx, cz)

    @classmethod
    def css(cls, cx, cz, name: str | None = None) -> StabilizerCode:
        cx = BitMatrix.coerce(cx)
        cz = BitMatrix.coerce(cz)
        n = cx.ncols if cx.nrows or not cz.nrows else cz.ncols
        if cx.ncols != cz.ncols:
            raise ValueError("CSS blocks differ in qubit count")
        if (cx @ cz.T).to_dense().any():
            raise ValueError("X and Z checks do not commute")
        top = cx.hstack(BitMatrix.zeros(cx.nrows, n)) if cx.nrows else BitMatrix.zeros(0, 2 * n)
        bot = BitMatrix.zeros(cz.nrows, n).hstack(cz) if cz.nrows else BitMatrix.zeros(0, 2 * n)
        return cls(n, top.vstack(bot), (cx, cz), name)

    @property
    def is_css(self) -> bool:
        return self.css_split is not None

    @property
    def cx(self) -> BitMatrix:
        self._need_css()
        return self.css_split[0]

    @property
    def cz(self) -> BitMatrix:
        self._need_css()
        return self.css_split[1]

    def _need_css(self) -> None:
        if self.css_split is None:
            raise ValueError("code has no CSS split")

    @property
    def m(self) -> int:
        return self.checks.nrows

    def stabilizer_rank(self) -> int:
        return rank(self.checks)

    def syndrome(self, p: PauliOp) -> np.ndarray:
        return symplectic_gram(self.checks, BitMatrix.from_rows([p.vector]))[:, 0]

    def __repr__(self) -> str:
        tag = f" {self.name}" if self.name else ""
        return f"StabilizerCode{tag}(n={self.n}, m={self.m}, k={num_logical(self)})"

    # serialization ----------------------------------------------------
    def to_json(self) -> dict:
        out = {"n": self.n, "checks": [np.flatnonzero(r).tolist() for r in self.checks.to_dense()]}
        if self.is_css:
            out["css"] = {"x_rows": self.cx.nrows, "z_rows": self.cz.nrows}
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, data: dict | str) -> StabilizerCode:
        if isinstance(data, str):
            data = json.loads(data)
        n = data["n"]
        dense = np.zeros((len(data["checks"]), 2 * n), dtype=np.uint8)
        for i, row in enumerate(data["checks"]):
            dense[i, row] = 1
        if "css" in data:
            mx = data["css"]["x_rows"]
            return cls.css(dense[:mx, :n], dense[mx:, n:], data.get("name"))
        return cls(n, dense, name=data.get("name"))

    def to_alist(self) -> str:
        """Sparse text form: header ``n m [css mx]``, then one check per line as
        0-based column indices into the 2n-bit symplectic vector."""
        head = f"{self.n} {self.m}"
        if self.is_css:
            head += f" css {self.cx.nrows}"
        lines = [head]
        for r in self.checks.to_dense():
            idx = np.flatnonzero(r).tolist()
            lines.append(" ".join(map(str, [len(idx)] + idx)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_alist(cls, text: str) -> StabilizerCode:
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        head = lines[0].split()
        n, m = int(head[0]), int(head[1])
        dense = np.zeros((m, 2 * n), dtype=np.uint8)
        for i, ln in enumerate(lines[1 : m + 1]):
            vals = [int(v) for v in ln.split()]
            if vals[0] != len(vals) - 1:
                raise ValueError(f"row {i}: weight field does not match entries")
            dense[i, vals[1:]] = 1
        if len(head) >= 4 and head[2] == "css":
            mx = int(head[3])
            return cls.css(dense[:mx, :n], dense[mx:, n:])
        return cls(n, dense)


@dataclass(frozen=True)
class LogicalBasis:
    """L (2k x 2n): k X-type rows then k Z-type rows with L J L^T = J_k."""

    L: BitMatrix

    @property
    def k(self) -> int:
        return self.L.nrows // 2

    @property
    def x_rows(self) -> BitMatrix:
        return self.L[: self.k]

    @property
    def z_rows(self) -> BitMatrix:
        return self.L[self.k :]

    def x_logical(self, i: int) -> PauliOp:
        return PauliOp(self.L.row(i))

    def z_logical(self, i: int) -> PauliOp:
        return PauliOp(self.L.row(self.k + i))


def num_logical(code: StabilizerCode) -> int:
    return code.n - code.stabilizer_rank()


def _complement_rows(span: BitMatrix, candidates: BitMatrix) -> BitMatrix:
    """Greedy subset of candidate rows independent modulo ``span``."""
    chosen = []
    base = row_basis(span) if span.nrows else span
    r = base.nrows
    cur = base
    for row in candidates.rows():
        trial = cur.vstack(BitMatrix.from_rows([row])) if cur.nrows else BitMatrix.from_rows([row])
        rt = rank(trial)
        if rt > r:
            chosen.append(row)
            cur, r = trial, rt
    return BitMatrix.from_rows(chosen, candidates.ncols)


def _css_logical_basis(code: StabilizerCode) -> LogicalBasis:
    n = code.n
    cx, cz = code.css_split
    xs = _complement_rows(cx, kernel(cz) if cz.nrows else BitMatrix.identity(n))
    zs = _complement_rows(cz, kernel(cx) if cx.nrows else BitMatrix.identity(n))
    k = xs.nrows
    if zs.nrows != k:
        raise ArithmeticError("X and Z logical counts disagree")
    if k == 0:
        return LogicalBasis(BitMatrix.zeros(0, 2 * n))
    pairing = xs @ zs.T
    zs = inverse(pairing).T @ zs
    top = xs.hstack(BitMatrix.zeros(k, n))
    bot = BitMatrix.zeros(k, n).hstack(zs)
    return LogicalBasis(top.vstack(bot))


def _symplectic_gram_schmidt(code: StabilizerCode) -> LogicalBasis:
    n = code.n
    J = SymplecticForm(n)
    if code.m:
        normalizer = kernel(J.apply(code.checks))
    else:
        normalizer = BitMatrix.identity(2 * n)
    pool = [r.to_array().astype(np.uint8) for r in normalizer.rows()]

    def form(u, v):
        return int(u[:n] @ v[n:] + u[n:] @ v[:n]) & 1

    xs, zs = [], []
    while pool:
        a = pool.pop(0)
        j = next((i for i, b in enumerate(pool) if form(a, b)), None)
        if j is None:
            continue
        b = pool.pop(j)
        for i, c in enumerate(pool):
            ca, cb = form(c, a), form(c, b)
            if cb:
                c = c ^ a
            if ca:
                c = c ^ b
            pool[i] = c
        xs.append(a)
        zs.append(b)
    if not xs:
        return LogicalBasis(BitMatrix.zeros(0, 2 * n))
    return LogicalBasis(BitMatrix.from_dense(np.array(xs + zs)))


def logical_basis(code: StabilizerCode) -> LogicalBasis:
    """Deterministic symplectic logical frame.

    CSS codes get X-type rows from ker C_Z and Z-type rows from ker C_X, chosen
    greedily in qubit order and paired by inverting the pairing matrix.  Other
    codes use symplectic Gram-Schmidt over the normalizer.
    """
    if code.is_css:
        lb = _css_logical_basis(code)
    else:
        lb = _symplectic_gram_schmidt(code)
    if lb.k != num_logical(code):
        raise ArithmeticError("logical basis has the wrong size")
    return lb


def is_symmetry(code: StabilizerCode, u) -> bool:
    u = BitMatrix.coerce(u)
    if u.shape != (2 * code.n, 2 * code.n) or not is_symplectic(u):
        raise ValueError("U is not a symplectic 2n x 2n matrix")
    if code.m == 0:
        return True
    return row_span_equal(code.checks @ u, code.checks)


def logical_action(code: StabilizerCode, basis: LogicalBasis, u) -> BitMatrix:
    """M = L U J L^T J, the induced action on the logical frame."""
    u = BitMatrix.coerce(u)
    if not is_symmetry(code, u):
        raise ValueError("U is not a symmetry of the code")
    L = basis.L
    if L.nrows == 0:
        return BitMatrix.zeros(0, 0)
    Jn = SymplecticForm(code.n)
    Jk = SymplecticForm(basis.k)
    lu = L @ u
    m = lu @ Jn.apply(L).T  # L U J L^T
    return Jk.apply(m)


def permutation_symplectic(perm: Sequence[int]) -> BitMatrix:
    """U(P) = diag(P, P) for the qubit map i -> perm[i]."""
    n = len(perm)
    p = np.zeros((n, n), dtype=np.uint8)
    p[np.arange(n), np.asarray(perm)] = 1
    z = np.zeros_like(p)
    return BitMatrix.from_dense(np.block([[p, z], [z, p]]))


def transversal_cnot_preserves(code: StabilizerCode) -> bool:
    """Check that transversal CNOT between two copies preserves C (+) C."""
    code._need_css()
    n = code.n
    cx, cz = code.cx.to_dense(), code.cz.to_dense()
    two = StabilizerCode.css(
        np.block([[cx, np.zeros_like(cx)], [np.zeros_like(cx), cx]]),
        np.block([[cz, np.zeros_like(cz)], [np.zeros_like(cz), cz]]),
    )
    eye = np.eye(n, dtype=np.uint8)
    zero = np.zeros((n, n), dtype=np.uint8)
    # X_a -> X_a X_b, Z_b -> Z_a Z_b (row action)
    ax = np.block([[eye, eye], [zero, eye]])
    az = np.block([[eye, zero], [eye, eye]])
    big0 = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    u = np.block([[ax, big0], [big0, az]])
    return is_symmetry(two, u)
