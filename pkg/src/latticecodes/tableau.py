"""Stabilizer tableau with destabilizers.

Rows 0..n-1 are destabilizers and rows n..2n-1 stabilizers.  A row (x, z, r)
stands for (-1)^r times the tensor product with X, Z or Y (x = z = 1) on each
qubit.  Gates and measurements follow the standard CHP update rules.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .code import PauliOp
from .gf2 import BitMatrix, BitVector, SymplecticForm, solve


def _phase_exponent(x1, z1, x2, z2) -> np.ndarray:
    """Per-qubit power of i picked up by multiplying P1 P2 (values in -1..1)."""
    x1 = x1.astype(np.int64)
    z1 = z1.astype(np.int64)
    x2 = x2.astype(np.int64)
    z2 = z2.astype(np.int64)
    y = x1 & z1
    xo = x1 & (1 - z1)
    zo = (1 - x1) & z1
    return y * (z2 - x2) + xo * z2 * (2 * x2 - 1) + zo * x2 * (1 - 2 * z2)


class Tableau:
    def __init__(self, n: int):
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.r = np.zeros(2 * n, dtype=np.uint8)
        self.x[np.arange(n), np.arange(n)] = 1
        self.z[n + np.arange(n), np.arange(n)] = 1

    @classmethod
    def plus_state(cls, n: int) -> Tableau:
        t = cls(n)
        for q in range(n):
            t.h(q)
        return t

    def copy(self) -> Tableau:
        t = Tableau.__new__(Tableau)
        t.n = self.n
        t.x, t.z, t.r = self.x.copy(), self.z.copy(), self.r.copy()
        return t

    # gates ------------------------------------------------------------
    def h(self, q: int) -> None:
        self.r ^= self.x[:, q] & self.z[:, q]
        self.x[:, q], self.z[:, q] = self.z[:, q].copy(), self.x[:, q].copy()

    def s(self, q: int) -> None:
        self.r ^= self.x[:, q] & self.z[:, q]
        self.z[:, q] ^= self.x[:, q]

    def cnot(self, c: int, t: int) -> None:
        self.r ^= self.x[:, c] & self.z[:, t] & (self.x[:, t] ^ self.z[:, c] ^ 1)
        self.x[:, t] ^= self.x[:, c]
        self.z[:, c] ^= self.z[:, t]

    def cz(self, a: int, b: int) -> None:
        self.h(b)
        self.cnot(a, b)
        self.h(b)

    def pauli_x(self, q: int) -> None:
        self.r ^= self.z[:, q]

    def pauli_z(self, q: int) -> None:
        self.r ^= self.x[:, q]

    def apply_pauli(self, p: PauliOp) -> None:
        """Conjugate by an unsigned Pauli: flips the rows it anticommutes with."""
        self.r ^= ((self.x.astype(np.int64) @ p.z + self.z.astype(np.int64) @ p.x) & 1).astype(np.uint8)

    # row algebra ------------------------------------------------------
    def _rowmult(self, h: int, i: int) -> None:
        """Row h <- row i * row h."""
        e = 2 * int(self.r[h]) + 2 * int(self.r[i])
        e += int(_phase_exponent(self.x[i], self.z[i], self.x[h], self.z[h]).sum())
        self.r[h] = (e % 4) // 2
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    def _anticommuting(self, px: np.ndarray, pz: np.ndarray) -> np.ndarray:
        return ((self.x.astype(np.int64) @ pz + self.z.astype(np.int64) @ px) & 1).astype(bool)

    def _signed_product(self, px, pz) -> int:
        """Sign bit of P as an element of the stabilizer group (P must commute)."""
        n = self.n
        anti = self._anticommuting(px, pz)[:n]
        sx = np.zeros(n, dtype=np.uint8)
        sz = np.zeros(n, dtype=np.uint8)
        e = 0
        for i in np.flatnonzero(anti):
            row = n + i
            e += 2 * int(self.r[row]) + int(_phase_exponent(self.x[row], self.z[row], sx, sz).sum())
            sx ^= self.x[row]
            sz ^= self.z[row]
        if not (np.array_equal(sx, px) and np.array_equal(sz, pz)):
            raise ArithmeticError("operator is not in the stabilizer group")
        return (e % 4) // 2

    # measurement ------------------------------------------------------
    def peek(self, p: PauliOp, sign: int = 1) -> int:
        """+1/-1 if sign*P is determined, 0 if a measurement would be random."""
        px, pz = p.x.astype(np.uint8), p.z.astype(np.uint8)
        if self._anticommuting(px, pz)[self.n :].any():
            return 0
        bit = self._signed_product(px, pz)
        return (-1 if bit else 1) * sign

    def measure(self, p: PauliOp, rng: np.random.Generator | None = None, sign: int = 1, forced: int | None = None):
        """Measure sign*P; returns (outcome, deterministic)."""
        n = self.n
        px, pz = p.x.astype(np.uint8), p.z.astype(np.uint8)
        anti = self._anticommuting(px, pz)
        stab = np.flatnonzero(anti[n:])
        if len(stab) == 0:
            bit = self._signed_product(px, pz)
            return (-1 if bit else 1) * sign, True
        pivot = n + int(stab[0])
        for i in np.flatnonzero(anti):
            if i != pivot:
                self._rowmult(i, pivot)
        d = pivot - n
        self.x[d], self.z[d], self.r[d] = self.x[pivot], self.z[pivot], self.r[pivot]
        if forced is not None:
            outcome = forced
        else:
            rng = rng if rng is not None else np.random.default_rng()
            outcome = 1 if rng.integers(0, 2) == 0 else -1
        self.x[pivot], self.z[pivot] = px, pz
        # stored sign is of P itself
        self.r[pivot] = 0 if outcome * sign == 1 else 1
        return outcome, False

    def measure_x(self, q: int, rng=None) -> tuple[int, bool]:
        return self.measure(PauliOp.from_support(self.n, x=[q]), rng)

    def measure_z(self, q: int, rng=None) -> tuple[int, bool]:
        return self.measure(PauliOp.from_support(self.n, z=[q]), rng)

    # inspection -------------------------------------------------------
    def stabilizers(self) -> list[tuple[int, PauliOp]]:
        out = []
        for i in range(self.n, 2 * self.n):
            out.append((-1 if self.r[i] else 1, PauliOp.from_xz(self.x[i], self.z[i])))
        return out

    def check_invariants(self) -> None:
        """Destabilizer i anticommutes exactly with stabilizer i; all else commute."""
        x = self.x.astype(np.int64)
        z = self.z.astype(np.int64)
        g = (x @ z.T + z @ x.T) & 1
        n = self.n
        want = np.zeros((2 * n, 2 * n), dtype=np.int64)
        want[np.arange(n), n + np.arange(n)] = 1
        want[n + np.arange(n), np.arange(n)] = 1
        if not np.array_equal(g, want):
            raise AssertionError("tableau lost its symplectic structure")


def stabilizer_state(n: int, generators: Sequence[tuple[int, PauliOp]], rng=None) -> Tableau:
    """The state fixed by signed, independent, commuting generators.

    Generators are measured on |0..0>, then one Pauli correction fixes every
    wrong sign at once.
    """
    t = Tableau(n)
    gens = list(generators)
    flips = []
    for sign, p in gens:
        out, _ = t.measure(p, rng if rng is not None else np.random.default_rng(0), sign=sign)
        flips.append(int(out != 1))
    if any(flips):
        g = BitMatrix.from_rows([p.vector for _, p in gens])
        # E with <g_i, E> = flip_i: solve (g J) E^T = flips
        e = solve(SymplecticForm(n).apply(g).T, np.array(flips, dtype=np.uint8))
        if e is None:
            raise ValueError("generators are dependent or inconsistent")
        t.apply_pauli(PauliOp(BitVector.from_bits(e)))
    for sign, p in gens:
        if t.peek(p, sign) != 1:
            raise ValueError("generators are inconsistent")
    return t


def random_clifford_state(n: int, rng: np.random.Generator, depth: int | None = None) -> Tableau:
    """A random stabilizer state from a random H/S/CNOT circuit on |0..0>."""
    t = Tableau(n)
    for _ in range(depth if depth is not None else 4 * n + 4):
        kind = rng.integers(0, 3)
        if kind == 0:
            t.h(int(rng.integers(0, n)))
        elif kind == 1:
            t.s(int(rng.integers(0, n)))
        elif n > 1:
            a, b = rng.choice(n, size=2, replace=False)
            t.cnot(int(a), int(b))
    return t
