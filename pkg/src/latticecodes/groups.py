"""Orders of matrix groups over F2 by a stabilizer chain.

A 2k x 2k matrix A acts on the nonzero row vectors of F2^{2k} by v -> vA.
Vectors are stored as integers (bit i = coordinate i) and matrices as tuples
of row integers, so composing and applying are short loops over bits.  The
unit vectors form a base because a matrix fixing each of them is the
identity.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .gf2 import BitMatrix

Mat = tuple[int, ...]


def to_rows(m) -> Mat:
    dense = BitMatrix.coerce(m).to_dense() if not isinstance(m, np.ndarray) else np.asarray(m) & 1
    if dense.shape[0] != dense.shape[1]:
        raise ValueError("group elements must be square")
    weights = 1 << np.arange(dense.shape[1], dtype=object)
    return tuple(int(sum(w for w, b in zip(weights, row) if b)) for row in dense)


def from_rows(a: Mat) -> np.ndarray:
    n = len(a)
    return np.array([[(r >> j) & 1 for j in range(n)] for r in a], dtype=np.uint8)


def apply(v: int, a: Mat) -> int:
    out = 0
    i = 0
    while v:
        if v & 1:
            out ^= a[i]
        v >>= 1
        i += 1
    return out


def mul(a: Mat, b: Mat) -> Mat:
    """Row-vector convention: v(ab) = (va)b."""
    return tuple(apply(r, b) for r in a)


def identity(n: int) -> Mat:
    return tuple(1 << i for i in range(n))


def inv(a: Mat) -> Mat:
    n = len(a)
    rows = [[a[i], 1 << i] for i in range(n)]
    for c in range(n):
        p = next((r for r in range(c, n) if (rows[r][0] >> c) & 1), None)
        if p is None:
            raise ValueError("matrix is singular")
        rows[c], rows[p] = rows[p], rows[c]
        for r in range(n):
            if r != c and (rows[r][0] >> c) & 1:
                rows[r][0] ^= rows[c][0]
                rows[r][1] ^= rows[c][1]
    return tuple(r[1] for r in rows)


class _Level:
    __slots__ = ("base", "gens", "reps", "inv_reps", "checked")

    def __init__(self, base: int, n: int):
        self.base = base
        self.gens: list[Mat] = []
        self.reps: dict[int, Mat] = {base: identity(n)}
        self.inv_reps: dict[int, Mat] = {base: identity(n)}
        self.checked: set[tuple[int, int]] = set()

    def add_gen(self, g: Mat) -> None:
        self.gens.append(g)
        queue = [(p, [g]) for p in self.reps]
        while queue:
            p, gs = queue.pop()
            rp = self.reps[p]
            for s in gs:
                q = apply(p, s)
                if q not in self.reps:
                    rq = mul(rp, s)
                    self.reps[q] = rq
                    self.inv_reps[q] = inv(rq)
                    queue.append((q, self.gens))


class StabilizerChain:
    """Deterministic Schreier-Sims over the action on F2^{n} minus zero.

    Level i keeps every strong generator fixing the first i base points, so
    its orbit is the orbit of the point stabilizer.  Schreier generators that
    already sifted to the identity are remembered; the subgroup below only
    grows, so they stay members.
    """

    def __init__(self, n: int, generators: Iterable = ()):
        self.n = n
        self.levels: list[_Level] = []
        for g in generators:
            self.add(g)

    def _coerce(self, g) -> Mat:
        a = g if isinstance(g, tuple) else to_rows(g)
        if len(a) != self.n:
            raise ValueError(f"expected {self.n} x {self.n} matrices")
        return a

    def _sift_from(self, g: Mat, start: int) -> tuple[Mat, int]:
        for i in range(start, len(self.levels)):
            lev = self.levels[i]
            u = lev.inv_reps.get(apply(lev.base, g))
            if u is None:
                return g, i
            g = mul(g, u)
        return g, len(self.levels)

    def sift(self, g) -> tuple[Mat, int]:
        """Strip g through the chain; returns the residue and the level reached."""
        return self._sift_from(self._coerce(g), 0)

    def contains(self, g) -> bool:
        h, _ = self.sift(g)
        return h == identity(self.n)

    def _moved_base(self, g: Mat) -> int:
        for i in range(self.n):
            if g[i] != 1 << i:
                return 1 << i
        raise AssertionError("identity has no moved point")

    def _place(self, h: Mat, lo: int, hi: int) -> None:
        """Add h as a strong generator on levels lo..hi, creating level hi if needed."""
        if hi == len(self.levels):
            self.levels.append(_Level(self._moved_base(h), self.n))
        for lev in self.levels[lo : hi + 1]:
            lev.add_gen(h)

    def add(self, g) -> bool:
        """Add a generator; returns False when it was already a member."""
        g = self._coerce(g)
        h, j = self._sift_from(g, 0)
        if h == identity(self.n):
            return False
        self._place(h, 0, j)
        i = j
        while i >= 0:
            i = self._close_level(i)
        return True

    def _close_level(self, i: int) -> int:
        """Check Schreier generators at level i; returns the next level to visit."""
        lev = self.levels[i]
        ident = identity(self.n)
        for p in list(lev.reps):
            rp = lev.reps[p]
            for si, s in enumerate(lev.gens):
                if (p, si) in lev.checked:
                    continue
                q = apply(p, s)
                sch = mul(mul(rp, s), lev.inv_reps[q])
                h, j = self._sift_from(sch, i + 1)
                if h != ident:
                    self._place(h, i + 1, j)
                    return j
                lev.checked.add((p, si))
        return i - 1

    def order(self) -> int:
        out = 1
        for lev in self.levels:
            out *= len(lev.reps)
        return out

    def base(self) -> list[int]:
        return [lev.base for lev in self.levels]


def matrix_group_order(generators: Sequence, n: int | None = None) -> int:
    gens = list(generators)
    if not gens:
        return 1
    if n is None:
        n = BitMatrix.coerce(gens[0]).nrows if not isinstance(gens[0], tuple) else len(gens[0])
    return StabilizerChain(n, gens).order()


def closure_order(generators: Sequence, n: int, limit: int = 10**6) -> int:
    """Breadth-first closure; an oracle for small groups."""
    gens = [g if isinstance(g, tuple) else to_rows(g) for g in generators]
    seen = {identity(n)}
    frontier = [identity(n)]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = mul(a, g)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
                    if len(seen) > limit:
                        raise RuntimeError("closure exceeded limit")
        frontier = nxt
    return len(seen)
