"""F2 chain complexes: cubic tori Z^D / Lambda, twisted products and the
24-cell honeycomb.

Boundary matrices are stored with one row per cell, so a chain c (row vector)
has boundary ``c @ boundary(k)``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .code import StabilizerCode
from .gf2 import BitMatrix, rank
from .lattice import HermiteForm, LatticeBasis, hnf, reduce_point


class ComplexError(ValueError):
    pass


class ChainComplex:
    """Graded F2 vector spaces C_0..C_top with boundary maps.

    ``cells[k]`` lists hashable labels of the k-cells; ``boundary(k)`` is the
    (n_k x n_{k-1}) matrix whose row i is the boundary of cell i.
    """

    def __init__(self, cells: Sequence[Sequence], boundaries: Mapping[int, BitMatrix], kind: str = "generic", **meta):
        self.cells = [list(c) for c in cells]
        self._index = [{c: i for i, c in enumerate(cs)} for cs in self.cells]
        self._bd = {}
        for k in range(1, len(self.cells)):
            b = BitMatrix.coerce(boundaries[k])
            if b.shape != (len(self.cells[k]), len(self.cells[k - 1])):
                raise ComplexError(f"boundary {k} has shape {b.shape}")
            self._bd[k] = b
        self.kind = kind
        self.meta = meta
        self.check_d2()

    @property
    def top(self) -> int:
        return len(self.cells) - 1

    @property
    def degrees(self) -> list[int]:
        return [len(c) for c in self.cells]

    def boundary(self, k: int) -> BitMatrix:
        if k <= 0 or k > self.top:
            lo = len(self.cells[k - 1]) if 0 < k <= self.top + 1 else 0
            hi = len(self.cells[k]) if 0 <= k <= self.top else 0
            return BitMatrix.zeros(hi, lo)
        return self._bd[k]

    def index(self, k: int, cell) -> int:
        return self._index[k][cell]

    def check_d2(self) -> None:
        for k in range(2, self.top + 1):
            if not (self._bd[k] @ self._bd[k - 1]).is_zero():
                raise ComplexError(f"boundary squared is nonzero at degree {k}")

    def betti(self, k: int) -> int:
        rk = rank(self._bd[k]) if 1 <= k <= self.top else 0
        rk1 = rank(self._bd[k + 1]) if k + 1 <= self.top else 0
        return len(self.cells[k]) - rk - rk1

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.degrees))

    def to_json(self) -> dict:
        bds = {}
        for k, b in self._bd.items():
            r, c = np.nonzero(b.to_dense())
            bds[str(k)] = [[int(i), int(j)] for i, j in zip(r, c)]
        return {"degrees": self.degrees, "kind": self.kind, "boundaries": bds}

    def __repr__(self) -> str:
        return f"ChainComplex({self.kind}, degrees={self.degrees})"


# ---------------------------------------------------------------------------
# cubic tori


def _vertices(h: HermiteForm) -> list[tuple[int, ...]]:
    return list(itertools.product(*[range(d) for d in h.diagonal]))


def torus_complex(basis) -> ChainComplex:
    """Cubic cellulation of R^D / Lambda.

    Cells are (vertex, directions) with directions a sorted tuple of 0-based
    axes.  Index of a k-cell = subset_index * det + vertex_index with subsets
    in lexicographic order, so index ``j * det`` is the cell at the origin.
    """
    h = basis if isinstance(basis, HermiteForm) else hnf(basis)
    d = h.dim
    verts = _vertices(h)
    vidx = {v: i for i, v in enumerate(verts)}
    det = len(verts)
    subsets = [list(itertools.combinations(range(d), k)) for k in range(d + 1)]
    cells = [[(v, s) for s in subsets[k] for v in verts] for k in range(d + 1)]
    bds = {}
    for k in range(1, d + 1):
        sidx = {s: i for i, s in enumerate(subsets[k - 1])}
        dense = np.zeros((len(cells[k]), len(cells[k - 1])), dtype=np.uint8)
        for row, (v, s) in enumerate(cells[k]):
            for i in s:
                face = tuple(x for x in s if x != i)
                base = sidx[face] * det
                dense[row, base + vidx[v]] ^= 1
                shifted = list(v)
                shifted[i] += 1
                dense[row, base + vidx[h.reduce(shifted)]] ^= 1
        bds[k] = BitMatrix.from_dense(dense)
    return ChainComplex(cells, bds, kind="cubic", lattice=h, subsets=subsets, det=det)


def translation_permutations(c: ChainComplex, shift: Sequence[int]) -> list[np.ndarray]:
    """Per-degree cell permutations induced by translating a cubic complex."""
    if c.kind != "cubic":
        raise ComplexError("translations need a cubic complex")
    h: HermiteForm = c.meta["lattice"]
    out = []
    for k, cs in enumerate(c.cells):
        perm = np.empty(len(cs), dtype=np.int64)
        for i, (v, s) in enumerate(cs):
            w = h.reduce([a + b for a, b in zip(v, shift)])
            perm[i] = c.index(k, (w, s))
        out.append(perm)
    return out


def css_from_complex(c: ChainComplex, qubit_degree: int, dual: bool = False) -> StabilizerCode:
    """Qubits on q-cells, X-checks on (q-1)-cells and Z-checks on (q+1)-cells.

    With ``dual`` the roles swap: X-checks on (q+1)-cells, Z-checks on
    (q-1)-cells.
    """
    q = qubit_degree
    if not 0 < q < c.top:
        raise ComplexError("qubit degree must satisfy 0 < q < top degree")
    low = c.boundary(q).T  # rows: (q-1)-cells
    high = c.boundary(q + 1)  # rows: (q+1)-cells
    cx, cz = (high, low) if dual else (low, high)
    name = f"{c.kind}-q{q}{'-dual' if dual else ''}"
    return StabilizerCode.css(cx, cz, name=name)


@dataclass
class Crystal:
    """Cell midpoints, stored doubled so every coordinate is an integer.

    ``period`` is the doubled lattice 2 Lambda used to compare points.
    """

    qubit_coords: np.ndarray
    xcheck_coords: np.ndarray
    zcheck_coords: np.ndarray
    period: HermiteForm
    denominator: int = 2

    def reduce(self, doubled_point) -> tuple[int, ...]:
        return reduce_point(self.period.rows, doubled_point)

    def as_fractions(self, which: str = "qubit") -> list[tuple[Fraction, ...]]:
        arr = getattr(self, f"{which}_coords")
        return [tuple(Fraction(int(x), self.denominator) for x in row) for row in arr]


def cell_midpoints(c: ChainComplex, k: int) -> np.ndarray:
    """Doubled midpoints 2p + sum of directions for the k-cells."""
    if c.kind != "cubic":
        raise ComplexError("cell coordinates are only defined for cubic complexes")
    d = c.top
    out = np.zeros((len(c.cells[k]), d), dtype=np.int64)
    for i, (v, s) in enumerate(c.cells[k]):
        out[i] = 2 * np.asarray(v)
        out[i, list(s)] += 1
    return out


def cell_coordinates(c: ChainComplex, qubit_degree: int = 1, dual: bool = False) -> Crystal:
    if c.kind != "cubic":
        raise ComplexError("cell coordinates are only defined for cubic complexes")
    q = qubit_degree
    lo = cell_midpoints(c, q - 1)
    hi = cell_midpoints(c, q + 1)
    xs, zs = (hi, lo) if dual else (lo, hi)
    h: HermiteForm = c.meta["lattice"]
    return Crystal(cell_midpoints(c, q), xs, zs, hnf(2 * h.rows))


# ---------------------------------------------------------------------------
# twisted products


def circle_complex(n: int) -> ChainComplex:
    """Cycle graph with vertices 0..n-1 and edge j joining j and j+1 mod n."""
    if n < 1:
        raise ComplexError("circle needs at least one vertex")
    dense = np.zeros((n, n), dtype=np.uint8)
    for j in range(n):
        dense[j, j] ^= 1
        dense[j, (j + 1) % n] ^= 1
    return ChainComplex([list(range(n)), list(range(n))], {1: BitMatrix.from_dense(dense)}, kind="circle")


def _check_automorphism(d: ChainComplex, perms: Sequence[np.ndarray]) -> None:
    if len(perms) != d.top + 1:
        raise ComplexError("automorphism needs one permutation per degree")
    for k, p in enumerate(perms):
        if sorted(p.tolist()) != list(range(len(d.cells[k]))):
            raise ComplexError(f"degree {k} map is not a permutation")
    for k in range(1, d.top + 1):
        b = d.boundary(k).to_dense()
        # boundary(pi_k x) must equal pi_{k-1}(boundary x)
        rhs = np.zeros_like(b)
        rhs[:, perms[k - 1]] = b
        if not np.array_equal(b[perms[k]], rhs):
            raise ComplexError(f"twist does not commute with the boundary at degree {k}")


def twisted_product(
    circle: ChainComplex,
    d: ChainComplex,
    twist: Mapping[tuple[int, int], Sequence[np.ndarray]] | None = None,
) -> ChainComplex:
    """Product of a circle with ``d``, deformed by automorphisms on circle edges.

    d(c1 x y) = c1 x dy + sum over endpoints a of c1 of a x phi(c1, a) y,
    where phi defaults to the identity.  Degree k is laid out as the
    C_0 (x) D_k block followed by the C_1 (x) D_{k-1} block.
    """
    if circle.top != 1:
        raise ComplexError("first factor must be a circle (degrees 0 and 1)")
    twist = dict(twist or {})
    nv, ne = circle.degrees
    bd = circle.boundary(1).to_dense()
    ends = {e: np.flatnonzero(bd[e]).tolist() for e in range(ne)}
    for (e, a), perms in twist.items():
        if a not in ends.get(e, []):
            raise ComplexError(f"vertex {a} is not an endpoint of edge {e}")
        perms = [np.asarray(p, dtype=np.int64) for p in perms]
        _check_automorphism(d, perms)
        twist[(e, a)] = perms
    if any(len(ends[e]) != 2 for e in range(ne)) and twist:
        raise ComplexError("twists need a circle of length at least 2")
    nd = d.degrees
    top = d.top + 1
    cells = []
    for k in range(top + 1):
        block0 = [(0, a, y) for a in range(nv) for y in (d.cells[k] if k <= d.top else [])]
        block1 = [(1, e, y) for e in range(ne) for y in (d.cells[k - 1] if k >= 1 else [])]
        cells.append(block0 + block1)

    def off0(k, a):
        return a * nd[k]

    def off1(k, e):
        return (nv * nd[k] if k <= d.top else 0) + e * nd[k - 1]

    bds = {}
    for k in range(1, top + 1):
        rows = len(cells[k])
        cols = len(cells[k - 1])
        dense = np.zeros((rows, cols), dtype=np.uint8)
        if k <= d.top:
            bk = d.boundary(k).to_dense()
            for a in range(nv):
                dense[off0(k, a) : off0(k, a) + nd[k], off0(k - 1, a) : off0(k - 1, a) + nd[k - 1]] ^= bk
        j = k - 1  # degree of the D factor in the edge block
        bj = d.boundary(j).to_dense() if j >= 1 else None
        for e in range(ne):
            r0 = off1(k, e)
            if bj is not None:
                c0 = off1(k - 1, e)
                dense[r0 : r0 + nd[j], c0 : c0 + nd[j - 1]] ^= bj
            for a in ends[e]:
                perm = twist.get((e, a))
                c0 = off0(k - 1, a)
                for y in range(nd[j]):
                    target = y if perm is None else int(perm[j][y])
                    dense[r0 + y, c0 + target] ^= 1
        bds[k] = BitMatrix.from_dense(dense)
    return ChainComplex(cells, bds, kind="product", factors=(circle, d), twist=twist)


# ---------------------------------------------------------------------------
# 24-cell honeycomb

# Maps D4 coordinates (even coordinate sum) to honeycomb coordinates, where the
# 24-cell centres are the integer vectors whose coordinates share one parity.
D4_TO_HONEYCOMB = np.array([[1, 1, 0, 0], [1, -1, 0, 0], [0, 0, 1, 1], [0, 0, 1, -1]], dtype=np.int64)

_CELL_VERTS = sorted(
    {
        tuple(v)
        for pos in itertools.combinations(range(4), 2)
        for signs in itertools.product((1, -1), repeat=2)
        for v in [[signs[pos.index(i)] if i in pos else 0 for i in range(4)]]
    }
)
_NEIGHBOURS = sorted(
    {tuple(int(x) for x in p) for i in range(4) for s in (2, -2) for p in [np.eye(4, dtype=int)[i] * s]}
    | set(itertools.product((1, -1), repeat=4))
)


def _dist2(a, b) -> int:
    return sum((x - y) ** 2 for x, y in zip(a, b))


def _cell_template():
    verts = [np.array(v) for v in _CELL_VERTS]
    octs = []
    for nvec in _NEIGHBOURS:
        dots = [int(v @ np.array(nvec)) for v in verts]
        top = max(dots)
        octs.append(tuple(sorted(_CELL_VERTS[i] for i, x in enumerate(dots) if x == top)))
    edges = sorted({tuple(sorted((a, b))) for a in _CELL_VERTS for b in _CELL_VERTS if _dist2(a, b) == 2})
    tris = set()
    for o in octs:
        for t in itertools.combinations(o, 3):
            if all(_dist2(a, b) == 2 for a, b in itertools.combinations(t, 2)):
                tris.add(tuple(sorted(t)))
    return edges, sorted(tris), octs


def _in_d4(rows: np.ndarray) -> bool:
    return bool(np.all(rows.sum(axis=1) % 2 == 0))


def honeycomb_24cell(sublattice) -> ChainComplex:
    """24-cell honeycomb of R^4 modulo a sublattice of D4.

    The sublattice is given in D4 coordinates (integer vectors with even
    coordinate sum).  Cells are keyed by their vertex sets modulo the
    sublattice.
    """
    rows = np.asarray(sublattice.rows if isinstance(sublattice, LatticeBasis) else sublattice, dtype=np.int64)
    if rows.shape != (4, 4):
        raise ComplexError("sublattice must be 4-dimensional")
    if not _in_d4(rows):
        raise ComplexError("sublattice is not contained in D4")
    period = hnf(rows @ D4_TO_HONEYCOMB)
    centres = [
        p for p in itertools.product(*[range(d) for d in period.diagonal]) if len({x % 2 for x in p}) == 1
    ]

    def canon(points):
        return _canon(period, points)

    edges_t, tris_t, octs_t = _cell_template()
    found: list[dict] = [dict() for _ in range(5)]
    facets: dict = {}
    for c in centres:
        c = np.asarray(c)

        def place(cell):
            return [tuple(int(x) for x in np.asarray(v) + c) for v in cell]

        for v in _CELL_VERTS:
            found[0].setdefault(canon(place([v])), None)
        for e in edges_t:
            found[1].setdefault(canon(place(e)), None)
        for t in tris_t:
            found[2].setdefault(canon(place(t)), None)
        for o in octs_t:
            found[3].setdefault(canon(place(o)), None)
        found[4].setdefault(canon(place(_CELL_VERTS)), None)
        facets[canon(place(_CELL_VERTS))] = [canon(place(o)) for o in octs_t]
    cells = [sorted(f.keys()) for f in found]
    index = [{c: i for i, c in enumerate(cs)} for cs in cells]
    bds = {}
    for k in range(1, 5):
        dense = np.zeros((len(cells[k]), len(cells[k - 1])), dtype=np.uint8)
        for i, cell in enumerate(cells[k]):
            if k == 4:
                faces = facets[cell]
            elif k == 3:
                faces = [canon(t) for t in _faces3(cell)]
            else:
                faces = [canon(f) for f in itertools.combinations(cell, k)]
            for f in faces:
                dense[i, index[k - 1][f]] ^= 1
        bds[k] = BitMatrix.from_dense(dense)
    return ChainComplex(cells, bds, kind="honeycomb", period=period, sublattice=rows)


def _octahedron_axes(cell) -> list[tuple[tuple, tuple]]:
    """The three pairs of opposite vertices, in a canonical order: by the first
    coordinate where the pair differs, then lexicographically."""
    pairs = []
    for a, b in itertools.combinations(cell, 2):
        if _dist2(a, b) == 4:
            diff = [x - y for x, y in zip(a, b)]
            first = next(i for i, x in enumerate(diff) if x)
            pairs.append((first, (a, b)))
    if len(pairs) != 3:
        raise ComplexError("cell is not an octahedron")
    pairs.sort()
    return [p for _, p in pairs]


def subdivide_octahedra(
    c: ChainComplex, apex_choice: int | Mapping[int, int] | Callable[[int], int] = 0
) -> ChainComplex:
    """Split each octahedron into two square pyramids glued along a new square.

    ``apex_choice`` picks, per octahedron index, which of its three canonical
    axes carries the two apexes (default axis 0).
    """
    if c.kind != "honeycomb":
        raise ComplexError("subdivision needs a 24-cell honeycomb complex")

    def axis_for(i):
        if callable(apex_choice):
            return apex_choice(i)
        if isinstance(apex_choice, Mapping):
            return apex_choice.get(i, 0)
        return apex_choice

    period: HermiteForm = c.meta["period"]
    tri = c.cells[2]
    octs = c.cells[3]
    b4 = c.boundary(4).to_dense()
    b2 = c.boundary(2).to_dense()
    squares = []
    pyramids = []
    sq_edges = []
    pyr_faces = []
    for i, o in enumerate(octs):
        axes = _octahedron_axes(o)
        a1, a2 = axes[axis_for(i)]
        equator = [v for v in o if v not in (a1, a2)]
        squares.append(("sq", o))
        # equatorial edges: pairs of equator vertices at distance sqrt 2
        eq_edges = [
            c.index(1, _canon(period, (u, v)))
            for u, v in itertools.combinations(equator, 2)
            if _dist2(u, v) == 2
        ]
        sq_edges.append(eq_edges)
        for apex_tag, apex in (("pyr0", a1), ("pyr1", a2)):
            pyramids.append((apex_tag, o))
            side = [c.index(2, _canon(period, t)) for t in _faces3(o) if apex in t]
            pyr_faces.append(side)
    ntri = len(tri)
    nsq = len(squares)
    cells2 = list(tri) + squares
    new_b2 = np.zeros((ntri + nsq, len(c.cells[1])), dtype=np.uint8)
    new_b2[:ntri] = b2
    for j, es in enumerate(sq_edges):
        for e in es:
            new_b2[ntri + j, e] ^= 1
    new_b3 = np.zeros((len(pyramids), ntri + nsq), dtype=np.uint8)
    for p, faces in enumerate(pyr_faces):
        for f in faces:
            new_b3[p, f] ^= 1
        new_b3[p, ntri + p // 2] ^= 1
    new_b4 = np.zeros((b4.shape[0], len(pyramids)), dtype=np.uint8)
    for i in range(len(octs)):
        new_b4[:, 2 * i] = b4[:, i]
        new_b4[:, 2 * i + 1] = b4[:, i]
    cells = [c.cells[0], c.cells[1], cells2, pyramids, c.cells[4]]
    bds = {
        1: c.boundary(1),
        2: BitMatrix.from_dense(new_b2),
        3: BitMatrix.from_dense(new_b3),
        4: BitMatrix.from_dense(new_b4),
    }
    return ChainComplex(cells, bds, kind="honeycomb-subdivided", parent=c, n_oct=len(octs))


def _canon(period: HermiteForm, points) -> tuple:
    """Canonical key of a vertex set modulo the period: the smallest sorted
    image over all translates that move one of its vertices to its coset
    representative."""
    pts = [tuple(int(x) for x in p) for p in points]
    best = None
    for anchor in pts:
        red = period.reduce(anchor)
        shift = [r - a for r, a in zip(red, anchor)]
        img = tuple(sorted(tuple(x + s for x, s in zip(p, shift)) for p in pts))
        if best is None or img < best:
            best = img
    return best


def _faces3(octa) -> list[tuple]:
    return [
        t
        for t in itertools.combinations(octa, 3)
        if all(_dist2(a, b) == 2 for a, b in itertools.combinations(t, 2))
    ]
