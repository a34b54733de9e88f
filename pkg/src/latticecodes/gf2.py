"""Bit-packed linear algebra over F2 and the binary symplectic form.

Vectors are rows; matrices act on row vectors from the right.  Storage is
row-major with 64 columns per ``uint64`` word so that row XOR and popcount
cost O(words).
"""

from __future__ import annotations

from typing import Iterable, Sequence, Union

import numpy as np

WORD = 64
_ONE = np.uint64(1)

ArrayLike = Union["BitMatrix", np.ndarray, Sequence[Sequence[int]]]


def _nwords(length: int) -> int:
    return max(1, (length + WORD - 1) // WORD)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a (rows, cols) 0/1 array into (rows, words) uint64, little-endian bits."""
    bits = np.asarray(bits, dtype=np.uint8) & 1
    if bits.ndim == 1:
        return pack_bits(bits[None, :])[0]
    rows, cols = bits.shape
    words = _nwords(cols)
    padded = np.zeros((rows, words * WORD), dtype=np.uint8)
    padded[:, :cols] = bits
    as_bytes = np.packbits(padded, axis=1, bitorder="little")
    return as_bytes.view("<u8").reshape(rows, words).astype(np.uint64)


def unpack_bits(words: np.ndarray, length: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    if words.ndim == 1:
        return unpack_bits(words[None, :], length)[0]
    as_bytes = words.view(np.uint8).reshape(words.shape[0], -1)
    return np.unpackbits(as_bytes, axis=1, count=length, bitorder="little")


class BitVector:
    """Immutable fixed-length vector over F2."""

    __slots__ = ("_words", "length")

    def __init__(self, words: np.ndarray, length: int):
        words = np.array(words, dtype=np.uint64).reshape(-1)
        if words.size != _nwords(length):
            raise ValueError("word count does not match length")
        words.flags.writeable = False
        self._words = words
        self.length = int(length)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitVector:
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
        return cls(pack_bits(arr), arr.size)

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(np.zeros(_nwords(length), dtype=np.uint64), length)

    @classmethod
    def from_support(cls, support: Iterable[int], length: int) -> BitVector:
        bits = np.zeros(length, dtype=np.uint8)
        for i in support:
            bits[i] ^= 1
        return cls.from_bits(bits)

    @property
    def words(self) -> np.ndarray:
        return self._words

    def to_array(self) -> np.ndarray:
        return unpack_bits(self._words, self.length)

    def support(self) -> list[int]:
        return np.flatnonzero(self.to_array()).tolist()

    def popcount(self) -> int:
        return int(np.bitwise_count(self._words).sum())

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return int((self._words[i // WORD] >> np.uint64(i % WORD)) & _ONE)

    def _check(self, other: BitVector) -> None:
        if self.length != other.length:
            raise ValueError(f"length mismatch: {self.length} != {other.length}")

    def __xor__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self._words ^ other._words, self.length)

    __add__ = __xor__

    def __and__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self._words & other._words, self.length)

    def dot(self, other: BitVector) -> int:
        self._check(other)
        return int(np.bitwise_count(self._words & other._words).sum() & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.length == other.length and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self.length, self._words.tobytes()))

    def __len__(self) -> int:
        return self.length

    def __repr__(self) -> str:
        return "BitVector(" + "".join(map(str, self.to_array())) + ")"


class BitMatrix:
    """Immutable dense F2 matrix, rows packed into 64-bit words."""

    __slots__ = ("_data", "nrows", "ncols")

    def __init__(self, data: np.ndarray, ncols: int):
        data = np.array(data, dtype=np.uint64)
        if data.ndim != 2 or data.shape[1] != _nwords(ncols):
            raise ValueError("packed data has the wrong shape")
        data.flags.writeable = False
        self._data = data
        self.nrows = data.shape[0]
        self.ncols = int(ncols)

    # construction -----------------------------------------------------
    @classmethod
    def from_dense(cls, dense) -> BitMatrix:
        arr = np.asarray(dense, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2:
            raise ValueError("expected a 2D array")
        return cls(pack_bits(arr & 1), arr.shape[1])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> BitMatrix:
        return cls(np.zeros((nrows, _nwords(ncols)), dtype=np.uint64), ncols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_rows(cls, rows: Sequence[BitVector], ncols: int | None = None) -> BitMatrix:
        if not rows:
            if ncols is None:
                raise ValueError("ncols required for an empty row list")
            return cls.zeros(0, ncols)
        length = rows[0].length
        if any(r.length != length for r in rows):
            raise ValueError("rows differ in length")
        return cls(np.stack([r.words for r in rows]), length)

    @classmethod
    def coerce(cls, m: ArrayLike) -> BitMatrix:
        if isinstance(m, BitMatrix):
            return m
        return cls.from_dense(m)

    # access -----------------------------------------------------------
    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def to_dense(self) -> np.ndarray:
        if self.nrows == 0:
            return np.zeros((0, self.ncols), dtype=np.uint8)
        return unpack_bits(self._data, self.ncols)

    def row(self, i: int) -> BitVector:
        return BitVector(self._data[i], self.ncols)

    def rows(self) -> list[BitVector]:
        return [self.row(i) for i in range(self.nrows)]

    def __getitem__(self, idx):
        if isinstance(idx, tuple):
            return self.to_dense()[idx]
        if isinstance(idx, (int, np.integer)):
            return self.row(int(idx))
        return BitMatrix(self._data[idx], self.ncols)

    def column(self, j: int) -> np.ndarray:
        return ((self._data[:, j // WORD] >> np.uint64(j % WORD)) & _ONE).astype(np.uint8)

    def columns(self, cols: Sequence[int]) -> BitMatrix:
        return BitMatrix.from_dense(self.to_dense()[:, list(cols)])

    def row_weights(self) -> np.ndarray:
        return np.bitwise_count(self._data).sum(axis=1).astype(np.int64)

    # algebra ----------------------------------------------------------
    @property
    def T(self) -> BitMatrix:
        return BitMatrix.from_dense(self.to_dense().T)

    def __matmul__(self, other: ArrayLike) -> BitMatrix:
        other = BitMatrix.coerce(other)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        a = self.to_dense().astype(np.int64)
        b = other.to_dense().astype(np.int64)
        return BitMatrix.from_dense((a @ b) & 1)

    def __add__(self, other: ArrayLike) -> BitMatrix:
        other = BitMatrix.coerce(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return BitMatrix(self._data ^ other._data, self.ncols)

    __xor__ = __add__

    def vstack(self, *others: ArrayLike) -> BitMatrix:
        mats = [self] + [BitMatrix.coerce(o) for o in others]
        if any(m.ncols != self.ncols for m in mats):
            raise ValueError("column mismatch")
        return BitMatrix(np.concatenate([m._data for m in mats], axis=0), self.ncols)

    def hstack(self, *others: ArrayLike) -> BitMatrix:
        mats = [self] + [BitMatrix.coerce(o) for o in others]
        return BitMatrix.from_dense(np.concatenate([m.to_dense() for m in mats], axis=1))

    def is_zero(self) -> bool:
        return not self._data.any()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._data, other._data))

    def __hash__(self) -> int:
        return hash((self.shape, self._data.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.nrows}x{self.ncols})"


class SymplecticForm:
    """The form J_n, stored as the index permutation swapping X and Z halves."""

    __slots__ = ("n",)

    def __init__(self, n: int):
        self.n = int(n)

    def swap_dense(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        return np.concatenate([v[..., self.n :], v[..., : self.n]], axis=-1)

    def apply(self, m: ArrayLike) -> BitMatrix:
        """Return m J, i.e. each row with its halves swapped."""
        m = BitMatrix.coerce(m)
        if m.ncols != 2 * self.n:
            raise ValueError("expected 2n columns")
        return BitMatrix.from_dense(self.swap_dense(m.to_dense()))

    def matrix(self) -> BitMatrix:
        return self.apply(BitMatrix.identity(2 * self.n))


# ---------------------------------------------------------------------------
# elimination


def _rref_packed(data: np.ndarray, ncols: int, track: bool):
    a = data.copy()
    rows = a.shape[0]
    t = pack_bits(np.eye(rows, dtype=np.uint8)) if track else None
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        w, b = divmod(c, WORD)
        sh = np.uint64(b)
        col = (a[r:, w] >> sh) & _ONE
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
            if track:
                t[[r, p]] = t[[p, r]]
        mask = ((a[:, w] >> sh) & _ONE).astype(bool)
        mask[r] = False
        if mask.any():
            a[mask] ^= a[r]
            if track:
                t[mask] ^= t[r]
        pivots.append(c)
        r += 1
    return a, pivots, t


def rref(m: ArrayLike) -> tuple[BitMatrix, int, BitMatrix]:
    """Reduced row echelon form.

    Returns ``(reduced, rank, transform)`` with ``transform @ m == reduced``.
    """
    m = BitMatrix.coerce(m)
    a, pivots, t = _rref_packed(m.data, m.ncols, track=True)
    if m.nrows == 0:
        t = np.zeros((0, 1), dtype=np.uint64)
    return BitMatrix(a, m.ncols), len(pivots), BitMatrix(t, m.nrows)


def pivot_columns(m: ArrayLike) -> list[int]:
    m = BitMatrix.coerce(m)
    return _rref_packed(m.data, m.ncols, track=False)[1]


def rank(m: ArrayLike) -> int:
    m = BitMatrix.coerce(m)
    return len(_rref_packed(m.data, m.ncols, track=False)[1])


def row_basis(m: ArrayLike) -> BitMatrix:
    """Independent rows spanning the row space (in reduced form)."""
    m = BitMatrix.coerce(m)
    a, pivots, _ = _rref_packed(m.data, m.ncols, track=False)
    return BitMatrix(a[: len(pivots)], m.ncols)


def kernel(m: ArrayLike) -> BitMatrix:
    """Basis (as rows) of {x : m x^T = 0}."""
    m = BitMatrix.coerce(m)
    a, pivots, _ = _rref_packed(m.data, m.ncols, track=False)
    reduced = unpack_bits(a[: len(pivots)], m.ncols) if pivots else np.zeros((0, m.ncols), np.uint8)
    free = [c for c in range(m.ncols) if c not in set(pivots)]
    basis = np.zeros((len(free), m.ncols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        basis[i, pivots] = reduced[:, f]
    return BitMatrix.from_dense(basis) if free else BitMatrix.zeros(0, m.ncols)


def left_kernel(m: ArrayLike) -> BitMatrix:
    """Basis of {c : c m = 0}."""
    return kernel(BitMatrix.coerce(m).T)


def solve(m: ArrayLike, target: ArrayLike) -> np.ndarray | None:
    """Coefficients c with c m = target (row convention), or None if unsolvable.

    ``target`` may hold several rows; the result then has one row per target.
    """
    m = BitMatrix.coerce(m)
    single = isinstance(target, BitVector) or (
        not isinstance(target, BitMatrix) and np.asarray(target).ndim == 1
    )
    if isinstance(target, BitVector):
        target = target.to_array()
    tgt = BitMatrix.coerce(target)
    if tgt.ncols != m.ncols:
        raise ValueError("column mismatch")
    reduced, r, transform = rref(m)
    red = reduced.to_dense()[:r]
    tr = transform.to_dense()[:r]
    piv = pivot_columns(red) if r else []
    out = np.zeros((tgt.nrows, m.nrows), dtype=np.uint8)
    for i, v in enumerate(tgt.to_dense()):
        v = v.copy()
        coeff = np.zeros(m.nrows, dtype=np.uint8)
        for j, c in enumerate(piv):
            if v[c]:
                v ^= red[j]
                coeff ^= tr[j]
        if v.any():
            return None
        out[i] = coeff
    return out[0] if single else out


def in_row_span(m: ArrayLike, v: ArrayLike) -> bool:
    m = BitMatrix.coerce(m)
    v = BitMatrix.coerce(v)
    return rank(m) == rank(m.vstack(v))


def row_span_equal(a: ArrayLike, b: ArrayLike) -> bool:
    a = BitMatrix.coerce(a)
    b = BitMatrix.coerce(b)
    if a.ncols != b.ncols:
        raise ValueError(f"column mismatch: {a.ncols} != {b.ncols}")
    ra, rb = rank(a), rank(b)
    return ra == rb and rank(a.vstack(b)) == ra


def span_intersection(a: ArrayLike, b: ArrayLike) -> BitMatrix:
    """Basis of RowSpan(a) ∩ RowSpan(b)."""
    a = row_basis(a)
    b = row_basis(b)
    if a.nrows == 0 or b.nrows == 0:
        return BitMatrix.zeros(0, a.ncols)
    stacked = a.vstack(b)
    rel = left_kernel(stacked).to_dense()
    if rel.shape[0] == 0:
        return BitMatrix.zeros(0, a.ncols)
    coeff = rel[:, : a.nrows]
    return row_basis((BitMatrix.from_dense(coeff) @ a))


def inverse(m: ArrayLike) -> BitMatrix:
    m = BitMatrix.coerce(m)
    if m.nrows != m.ncols:
        raise ValueError("matrix must be square")
    reduced, r, transform = rref(m)
    if r != m.nrows:
        raise ValueError("matrix is singular over F2")
    return transform


# ---------------------------------------------------------------------------
# symplectic helpers


def symplectic_product(u: BitVector, v: BitVector, J: SymplecticForm | None = None) -> int:
    """Return 1 iff the Paulis (x|z) encoded by u and v anticommute."""
    if u.length != v.length:
        raise ValueError(f"length mismatch: {u.length} != {v.length}")
    if u.length % 2:
        raise ValueError("symplectic vectors have even length")
    n = u.length // 2
    if J is not None and J.n != n:
        raise ValueError("form size does not match vector length")
    a, b = u.to_array(), v.to_array()
    return int((a[:n] @ b[n:] + a[n:] @ b[:n]) & 1)


def symplectic_gram(a: ArrayLike, b: ArrayLike | None = None) -> np.ndarray:
    """Dense matrix a J b^T over F2."""
    a = BitMatrix.coerce(a).to_dense().astype(np.int64)
    b = a if b is None else BitMatrix.coerce(b).to_dense().astype(np.int64)
    if a.shape[1] != b.shape[1] or a.shape[1] % 2:
        raise ValueError("operands need the same even column count")
    n = a.shape[1] // 2
    return ((a[:, :n] @ b[:, n:].T + a[:, n:] @ b[:, :n].T) & 1).astype(np.uint8)


def is_symplectic(u: ArrayLike) -> bool:
    u = BitMatrix.coerce(u)
    if u.nrows != u.ncols or u.ncols % 2:
        return False
    n = u.ncols // 2
    return bool(np.array_equal(symplectic_gram(u), SymplecticForm(n).matrix().to_dense()))
