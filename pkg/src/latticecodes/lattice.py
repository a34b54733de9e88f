"""Integral lattices: Hermite normal form, l1 systole and minimal-determinant search.

Lattice vectors are rows.  A lattice in Z^D is stored as a D x D integer basis
whose rows generate it; ``hnf`` gives the canonical upper-triangular basis with
``0 <= M[i, j] < M[j, j]`` above the diagonal.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numba
import numpy as np


class SingularLatticeError(ValueError):
    pass


class SearchBudgetExceeded(RuntimeError):
    """Raised when a search would need more work than its configured budget."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class LatticeBasis:
    """Integer basis with basis vectors as rows."""

    def __init__(self, rows):
        arr = np.array(rows, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("a lattice basis must be a square integer matrix")
        arr.flags.writeable = False
        self.rows = arr

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    @property
    def det(self) -> int:
        return hnf(self).det

    def to_json(self) -> dict:
        return {"dim": self.dim, "rows": self.rows.tolist()}

    @classmethod
    def from_json(cls, data: dict | str) -> LatticeBasis:
        if isinstance(data, str):
            data = json.loads(data)
        rows = data["rows"]
        if "dim" in data and len(rows) != data["dim"]:
            raise ValueError("dim does not match the number of rows")
        return cls(rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatticeBasis):
            return NotImplemented
        return np.array_equal(self.rows, other.rows)

    def __hash__(self) -> int:
        return hash(self.rows.tobytes())

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.rows.tolist()})"


class HermiteForm(LatticeBasis):
    """Upper-triangular Hermite normal form of a full-rank lattice."""

    def __init__(self, rows):
        super().__init__(rows)
        m = self.rows
        d = self.dim
        for i in range(d):
            if m[i, i] <= 0:
                raise ValueError("HNF diagonal entries must be positive")
            for j in range(d):
                if j < i and m[i, j] != 0:
                    raise ValueError("HNF must be upper triangular")
                if j > i and not 0 <= m[i, j] < m[j, j]:
                    raise ValueError("HNF off-diagonal entry out of range")

    @property
    def matrix(self) -> np.ndarray:
        return self.rows

    @property
    def det(self) -> int:
        return int(np.prod(np.diag(self.rows).astype(object)))

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.diag(self.rows))

    def reduce(self, point: Sequence[int]) -> tuple[int, ...]:
        """Canonical coset representative of ``point`` in Z^D / Lambda."""
        return reduce_point(self.rows, point)

    def contains(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v))

    def key(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.rows.ravel())


def reduce_point(h: np.ndarray, point: Sequence[int]) -> tuple[int, ...]:
    x = [int(c) for c in point]
    d = len(x)
    for i in range(d):
        q = x[i] // int(h[i, i])
        if q:
            for j in range(i, d):
                x[j] -= q * int(h[i, j])
    return tuple(x)


def _as_rows(basis) -> list[list[int]]:
    if isinstance(basis, LatticeBasis):
        return basis.rows.tolist()
    return [[int(v) for v in row] for row in np.asarray(basis, dtype=object)]


def hnf_generators(generators, dim: int | None = None) -> HermiteForm:
    """HNF of the lattice generated by an arbitrary list of integer rows.

    The generators must span a full-rank lattice.
    """
    a = _as_rows(generators)
    if not a:
        raise SingularLatticeError("no generators")
    d = dim if dim is not None else len(a[0])
    a = [list(r) for r in a]
    out: list[list[int]] = []
    for col in range(d):
        # gcd-eliminate column ``col`` among the remaining rows
        while True:
            nz = [r for r in a if r[col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for j in range(d):
                    r[j] -= q * piv[j]
            a = [r for r in a if any(r)] + []
        nz = [r for r in a if r[col] != 0]
        if not nz:
            raise SingularLatticeError("generators do not span a full-rank lattice")
        piv = nz[0]
        a = [r for r in a if r is not piv]
        if piv[col] < 0:
            piv = [-v for v in piv]
        out.append(piv)
    for j in range(d):
        pj = out[j][j]
        for i in range(j):
            q = out[i][j] // pj
            if q:
                out[i] = [x - q * y for x, y in zip(out[i], out[j])]
    return HermiteForm(out)


def hnf(basis) -> HermiteForm:
    rows = _as_rows(basis)
    if len(rows) != len(rows[0]):
        raise ValueError("basis must be square")
    return hnf_generators(rows)


def n_slice(h) -> int:
    if not isinstance(h, HermiteForm):
        h = hnf(h)
    return int(h.rows[0, 0])


# ---------------------------------------------------------------------------
# l1 enumeration kernel


@numba.njit(cache=True, nogil=True)
def _min_l1(H, bound):
    """Minimum l1 norm <= bound of a nonzero vector of the row lattice of the
    upper-triangular H, or bound + 1 if there is none."""
    D = H.shape[0]
    best = bound + 1
    partial = np.zeros((D + 1, D), dtype=np.int64)
    used = np.zeros(D + 1, dtype=np.int64)
    nonzero = np.zeros(D + 1, dtype=np.bool_)
    cur = np.zeros(D, dtype=np.int64)
    hi = np.zeros(D, dtype=np.int64)

    # open level 0
    k = 0
    rem = best - 1
    h = H[0, 0]
    p = partial[0, 0]
    lo0 = -((rem + p) // h)
    cur[0] = 0 if lo0 < 0 else lo0  # first nonzero coefficient positive
    hi[0] = (rem - p) // h
    while k >= 0:
        if cur[k] > hi[k]:
            k -= 1
            if k >= 0:
                cur[k] += 1
            continue
        u = cur[k]
        v = partial[k, k] + u * H[k, k]
        cost = used[k] + (v if v >= 0 else -v)
        nz = nonzero[k] or u != 0
        if k == D - 1:
            if nz and cost < best:
                best = cost
            cur[k] += 1
            continue
        rem = best - 1 - cost
        if rem < 0:
            cur[k] += 1
            continue
        for j in range(k + 1, D):
            partial[k + 1, j] = partial[k, j] + u * H[k, j]
        used[k + 1] = cost
        nonzero[k + 1] = nz
        k += 1
        h = H[k, k]
        p = partial[k, k]
        lo = -((rem + p) // h)
        if not nz and lo < 0:
            lo = 0
        cur[k] = lo
        hi[k] = (rem - p) // h
    return best


@numba.njit(cache=True, nogil=True)
def _enumerate_diag(diag, s, max_out, node_limit):
    """All HNFs with the given diagonal whose l1 systole is exactly s.

    Rows are fixed bottom-up; after each row the trailing block (which is the
    sublattice of vectors with leading zeros) must already have systole >= s.
    Returns (witnesses, count, nodes, exhausted).
    """
    D = diag.size
    out = np.zeros((max_out, D, D), dtype=np.int64)
    count = 0
    nodes = 0
    H = np.zeros((D, D), dtype=np.int64)
    for i in range(D):
        H[i, i] = diag[i]
    if diag[D - 1] < s:
        return out[:0], 0, 0, False
    if D == 1:
        if diag[0] == s:
            out[0, 0, 0] = s
            return out[:1], 1, 1, False
        return out[:0], 0, 1, False
    k = D - 2
    fresh = True
    while True:
        if not fresh:
            j = D - 1
            while j > k:
                H[k, j] += 1
                if H[k, j] < diag[j]:
                    break
                H[k, j] = 0
                j -= 1
            if j == k:
                k += 1
                if k == D - 1:
                    break
                continue
        fresh = False
        nodes += 1
        if nodes > node_limit:
            return out[: min(count, max_out)], count, nodes, True
        rowsum = 0
        for j in range(k, D):
            rowsum += H[k, j]
        if rowsum < s:
            continue
        block = np.ascontiguousarray(H[k:, k:])
        if k == 0:
            if _min_l1(block, s) == s:
                if count < max_out:
                    out[count] = H
                count += 1
            continue
        if _min_l1(block, s - 1) < s:
            continue
        k -= 1
        for j in range(k + 1, D):
            H[k, j] = 0
        fresh = True
    return out[: min(count, max_out)], count, nodes, False


def l1_systole(basis, bound: int | None = None) -> int:
    """Minimum l1 norm of a nonzero lattice vector.

    The enumeration is exhaustive over vectors of norm at most ``bound``; the
    default bound is the smallest row norm, which always suffices.  When no
    vector is found within an explicit bound, ``bound + 1`` is returned as a
    lower bound.
    """
    h = basis if isinstance(basis, HermiteForm) else hnf(basis)
    if bound is None:
        raw = np.abs(np.asarray(_as_rows(basis), dtype=np.int64)).sum(axis=1).min()
        bound = int(min(raw, np.abs(h.rows).sum(axis=1).min()))
    return int(_min_l1(np.ascontiguousarray(h.rows), int(bound)))


def _factorizations(n: int, parts: int) -> list[tuple[int, ...]]:
    if parts == 1:
        return [(n,)]
    out = []
    for d in range(1, n + 1):
        if n % d == 0:
            for rest in _factorizations(n // d, parts - 1):
                out.append((d,) + rest)
    return out


@dataclass
class SearchResult:
    det: int
    witnesses: list[HermiteForm]
    witness_count: int
    nodes: int
    dets_scanned: list[int] = field(default_factory=list)

    @property
    def min_witness_slices(self) -> int:
        return min(n_slice(w) for w in self.witnesses)


DEFAULT_MAX_DET = 400
DEFAULT_MAX_NODES = 50_000_000


def search_min_det(
    dim: int,
    target_systole: int,
    min_slices: int = 1,
    *,
    max_det: int = DEFAULT_MAX_DET,
    max_nodes: int = DEFAULT_MAX_NODES,
    max_witnesses: int = 4096,
    threads: int = 1,
) -> SearchResult:
    """Smallest determinant of a D-dimensional lattice with l1 systole exactly s.

    Determinants are scanned in increasing order, so the first determinant with
    a witness is the minimum.  Witnesses are sorted by their flattened HNF.
    """
    if dim < 1 or dim > 8:
        raise ValueError("dimension must be between 1 and 8")
    if target_systole < 1:
        raise ValueError("target systole must be positive")
    s = int(target_systole)
    total_nodes = 0
    scanned: list[int] = []
    for det in range(1, max_det + 1):
        diags = [
            np.array(t, dtype=np.int64)
            for t in _factorizations(det, dim)
            if t[0] >= min_slices and t[-1] >= s
        ]
        scanned.append(det)
        if not diags:
            continue
        budget = max_nodes - total_nodes

        def run(t, budget=budget):
            return _enumerate_diag(t, s, max_witnesses, budget)

        if threads > 1 and len(diags) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(run, diags))
        else:
            results = [run(t) for t in diags]
        witnesses = []
        count = 0
        for arr, c, nodes, exhausted in results:
            total_nodes += int(nodes)
            if exhausted or total_nodes > max_nodes:
                raise SearchBudgetExceeded(
                    f"node budget {max_nodes} exhausted at det {det}",
                    partial={"dets_scanned": scanned, "nodes": total_nodes},
                )
            count += int(c)
            witnesses.extend(HermiteForm(m) for m in arr)
        if count:
            witnesses.sort(key=lambda w: w.key())
            return SearchResult(det, witnesses, count, total_nodes, scanned)
    raise SearchBudgetExceeded(
        f"no lattice with systole {s} up to det {max_det}",
        partial={"dets_scanned": scanned, "nodes": total_nodes},
    )


# ---------------------------------------------------------------------------
# automorphisms and families


class LatticeAutomorphism:
    """Orthogonal map M with Lambda M = Lambda, stored exactly as num / den."""

    __slots__ = ("num", "den")

    def __init__(self, matrix, den: int = 1):
        num = np.array(matrix, dtype=np.int64)
        g = int(np.gcd.reduce(np.append(num.ravel(), den)))
        if den < 0:
            g = -g
        num = num // g
        den = den // g
        if not np.array_equal(num @ num.T, den * den * np.eye(num.shape[0], dtype=np.int64)):
            raise ValueError("automorphism matrix must be orthogonal")
        num.flags.writeable = False
        self.num = num
        self.den = int(den)

    @property
    def is_integral(self) -> bool:
        return self.den == 1

    @property
    def matrix(self) -> np.ndarray:
        """Exact entries as an object array of Fractions (ints when integral)."""
        if self.is_integral:
            return self.num
        return np.array([[Fraction(int(x), self.den) for x in row] for row in self.num], dtype=object)

    def __matmul__(self, other: LatticeAutomorphism) -> LatticeAutomorphism:
        return LatticeAutomorphism(self.num @ other.num, self.den * other.den)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, LatticeAutomorphism)
            and self.den == other.den
            and np.array_equal(self.num, other.num)
        )

    def __hash__(self) -> int:
        return hash((self.den, self.num.tobytes()))

    def __repr__(self) -> str:
        if self.is_integral:
            return f"LatticeAutomorphism({self.num.tolist()})"
        return f"LatticeAutomorphism({self.num.tolist()} / {self.den})"


def vectors_of_norm(h: HermiteForm, norm2: int) -> np.ndarray:
    """All lattice vectors with squared Euclidean norm ``norm2``."""
    d = h.dim
    r = int(np.floor(np.sqrt(norm2)))
    found = []

    def rec(prefix, left):
        i = len(prefix)
        if i == d:
            if left == 0:
                found.append(tuple(prefix))
            return
        for x in range(-r, r + 1):
            if x * x <= left:
                rec(prefix + [x], left - x * x)

    rec([], norm2)
    return np.array([v for v in found if h.contains(v)], dtype=np.int64).reshape(-1, d)


def lattice_automorphisms(basis) -> list[LatticeAutomorphism]:
    """The isometry group of the lattice: orthogonal M with Lambda M = Lambda.

    Each basis vector can only go to a lattice vector of the same length, and
    the images must reproduce the Gram matrix; a depth-first assembly over
    those candidates yields the whole group.  Integral elements (signed
    permutations) are the ones that also preserve the cubic cellulation.
    """
    b = np.asarray(_as_rows(basis), dtype=np.int64)
    h = hnf(b)
    d = h.dim
    if d > 6:
        raise ValueError("automorphism enumeration is limited to D <= 6")
    gram = b @ b.T
    cands = [vectors_of_norm(h, int(gram[i, i])) for i in range(d)]
    det = round(abs(np.linalg.det(b)))
    binv = np.linalg.inv(b.astype(float))
    out = []

    def rec(images):
        i = len(images)
        if i == d:
            v = np.array(images, dtype=np.int64)
            num = np.rint(binv @ v * det).astype(np.int64)
            if not np.array_equal(b @ num, det * v):
                raise ArithmeticError("inexact rational reconstruction")
            out.append(LatticeAutomorphism(num, det))
            return
        for c in cands[i]:
            if all(int(c @ images[j]) == gram[i, j] for j in range(i)):
                rec(images + [c])

    rec([])
    out.sort(key=lambda a: (not a.is_integral, a.den, a.num.ravel().tolist()))
    return out


def integral_automorphisms(basis) -> list[LatticeAutomorphism]:
    """Automorphisms that are signed permutations, i.e. act on Z^D cells."""
    return [a for a in lattice_automorphisms(basis) if a.is_integral]


def preserves_lattice(h: HermiteForm, m) -> bool:
    m = np.asarray(m, dtype=np.int64)
    return all(h.contains(r) for r in h.rows @ m)


def hadamard_lattice(t: int) -> LatticeBasis:
    if t < 1:
        raise ValueError("t must be at least 1")
    h = np.array([[1, 1], [1, -1]], dtype=np.int64)
    m = h
    for _ in range(t - 1):
        m = np.kron(m, h)
    return LatticeBasis(m)


def d4_lattice() -> HermiteForm:
    """Integer vectors with even coordinate sum."""
    return HermiteForm([[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1], [0, 0, 0, 2]])


def rotated_2d(d: int) -> LatticeBasis:
    """45-degree rotated square lattice with l1 systole d."""
    if d % 2 == 0:
        a = d // 2
        return LatticeBasis([[a, a], [-a, a]])
    a, b = (d + 1) // 2, (d - 1) // 2
    return LatticeBasis([[a, b], [-b, a]])


def merge_for_surgery(h, row: int) -> HermiteForm:
    """Double the given (1-indexed) row of the HNF and renormalize."""
    h = h if isinstance(h, HermiteForm) else hnf(h)
    if not 1 <= row <= h.dim:
        raise IndexError(f"row {row} out of range 1..{h.dim}")
    m = h.rows.copy()
    m[row - 1] *= 2
    return hnf(m)


def hyperplane_sublattice(basis, cut_direction: int) -> HermiteForm:
    """Lattice vectors with zero coordinate along the (1-indexed) cut direction,
    expressed in the remaining D-1 coordinates."""
    rows = np.asarray(_as_rows(basis), dtype=np.int64)
    d = rows.shape[1]
    if not 1 <= cut_direction <= d:
        raise IndexError(f"direction {cut_direction} out of range 1..{d}")
    c = cut_direction - 1
    order = [c] + [i for i in range(d) if i != c]
    h = hnf(rows[:, order])
    return HermiteForm(h.rows[1:, 1:])


def hyperplane_systole(basis, cut_direction: int) -> int:
    return l1_systole(hyperplane_sublattice(basis, cut_direction))


def parse_inline(text: str) -> LatticeBasis:
    """Parse the inline ``"r1;r2;..."`` syntax with comma or space separated entries."""
    rows = []
    for chunk in text.strip().strip("[]").split(";"):
        chunk = chunk.replace(",", " ").replace("[", " ").replace("]", " ")
        rows.append([int(x) for x in chunk.split()])
    return LatticeBasis(rows)
