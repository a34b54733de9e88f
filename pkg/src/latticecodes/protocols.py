"""Operational protocols on cubic toric codes.

Slicing a 3D toric code into 2D codes, the fault model behind Bell-pair
preparation, starfish syndrome-extraction circuits, and surgery between two
4D blocks.  Tableau simulation is used where the claim is about a physical
process; plain F2 algebra is used where it is about group membership.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .code import LogicalBasis, PauliOp, StabilizerCode, logical_basis, num_logical
from .complexes import ChainComplex, ComplexError, css_from_complex, torus_complex, translation_permutations
from .distance import DistanceBudgetExceeded, SearchProblem, min_weight_logical
from .gf2 import (
    BitMatrix,
    BitVector,
    SymplecticForm,
    in_row_span,
    kernel,
    left_kernel,
    rank,
    row_basis,
    row_span_equal,
    solve,
    span_intersection,
)
from .lattice import HermiteForm, hnf, hyperplane_systole, hyperplane_sublattice, l1_systole, merge_for_surgery, n_slice
from .tableau import Tableau


def _cubic(lattice, dim: int) -> tuple[ChainComplex, StabilizerCode]:
    h = lattice if isinstance(lattice, HermiteForm) else hnf(lattice)
    if h.dim != dim:
        raise ValueError(f"expected a {dim}D lattice, got {h.dim}D")
    c = torus_complex(h)
    return c, css_from_complex(c, 1 if dim == 3 else dim // 2)


def _pauli(n: int, x=None, z=None) -> PauliOp:
    xs = np.zeros(n, dtype=np.uint8) if x is None else np.asarray(x, dtype=np.uint8)
    zs = np.zeros(n, dtype=np.uint8) if z is None else np.asarray(z, dtype=np.uint8)
    return PauliOp.from_xz(xs, zs)


def prepare_code_state(code: StabilizerCode, rng: np.random.Generator, extra: int = 0, flips: Sequence[int] = ()):
    """|+>^n, measure every Z-check, then fix the signs with an X correction.

    Returns the tableau, recorded Z outcomes (0/1 for +1/-1) and the
    corrected qubit set.  ``extra`` ancillas in |+> are appended after the
    data; ``flips`` lists checks whose recorded outcome is misread.
    """
    n = code.n
    t = Tableau.plus_state(n + extra)
    cz = code.cz.to_dense()
    outcomes = np.zeros(cz.shape[0], dtype=np.uint8)
    for i, row in enumerate(cz):
        out, _ = t.measure(_pauli(n + extra, z=np.concatenate([row, np.zeros(extra, np.uint8)])), rng)
        outcomes[i] = out < 0
    outcomes[list(flips)] ^= 1
    corr = solve(cz.T, outcomes) if outcomes.any() else np.zeros(n, dtype=np.uint8)
    if corr is None:
        raise ArithmeticError("Z outcomes are not a coboundary (flux error detected)")
    for q in np.flatnonzero(corr):
        t.pauli_x(int(q))
    return t, outcomes, corr


# ---------------------------------------------------------------------------
# slicing


@dataclass
class SliceLayout:
    n_slice: int
    slice_qubits: list[np.ndarray]  # direction 2/3 edges with first coordinate j
    cut_qubits: np.ndarray  # direction-1 edges, measured out
    inslice_faces: np.ndarray
    codes: list[StabilizerCode]
    logicals: BitMatrix  # 2K x 2n: X~ rows then Z~ rows, ordered (slice, a)


def slice_layout(c: ChainComplex, code: StabilizerCode) -> SliceLayout:
    h: HermiteForm = c.meta["lattice"]
    ns = n_slice(h)
    edges = c.cells[1]
    faces = c.cells[2]
    axis = np.array([s[0] for _, s in edges])
    first = np.array([v[0] for v, _ in edges])
    cut = np.flatnonzero(axis == 0)
    qubits = [np.flatnonzero((axis != 0) & (first == j)) for j in range(ns)]
    inslice = np.flatnonzero([s == (1, 2) for _, s in faces])
    cx, cz = code.cx.to_dense(), code.cz.to_dense()
    vfirst = np.array([v[0] for v, _ in c.cells[0]])
    ffirst = np.array([v[0] for v, _ in faces])
    codes = []
    for j, qs in enumerate(qubits):
        zrows = cz[np.intersect1d(inslice, np.flatnonzero(ffirst == j))][:, qs]
        xrows = cx[np.flatnonzero(vfirst == j)][:, qs]
        sc = StabilizerCode.css(xrows, zrows, name=f"slice{j}")
        if num_logical(sc) != 2 or set(zrows.sum(axis=1)) != {4} or set(xrows.sum(axis=1)) != {4}:
            raise ComplexError("slice is not a 2D toric code")
        codes.append(sc)
    n = code.n
    base = logical_basis(codes[0])
    k = base.k
    xs = np.zeros((ns * k, n), dtype=np.uint8)
    zs = np.zeros((ns * k, n), dtype=np.uint8)
    bx = base.x_rows.to_dense()[:, : len(qubits[0])]
    bz = base.z_rows.to_dense()[:, len(qubits[0]) :]
    for j in range(ns):
        perm = translation_permutations(c, (j,) + (0,) * (h.dim - 1))[1]
        for a in range(k):
            vx = np.zeros(n, dtype=np.uint8)
            vz = np.zeros(n, dtype=np.uint8)
            vx[perm[qubits[0]]] = bx[a]
            vz[perm[qubits[0]]] = bz[a]
            xs[j * k + a], zs[j * k + a] = vx, vz
    zero = np.zeros_like(xs)
    logicals = BitMatrix.from_dense(np.vstack([np.hstack([xs, zero]), np.hstack([zero, zs])]))
    return SliceLayout(ns, qubits, cut, inslice, codes, logicals)


def bell_ghz_group(ns: int, k: int = 2) -> BitMatrix:
    """Z~_j^a Z~_{j+1}^a and prod_j X~_j^a in (slice, a) logical coordinates."""
    kk = ns * k
    rows = []
    for a in range(k):
        v = np.zeros(2 * kk, dtype=np.uint8)
        v[[j * k + a for j in range(ns)]] = 1
        rows.append(v)
        for j in range(ns - 1):
            w = np.zeros(2 * kk, dtype=np.uint8)
            w[kk + j * k + a] = 1
            w[kk + (j + 1) * k + a] = 1
            rows.append(w)
    return row_basis(np.array(rows))


def logical_group(t: Tableau, logicals: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Logical-coordinate vectors c with c L in the state's stabilizer group."""
    n = t.n
    stab = np.hstack([t.x[n:], t.z[n:]])
    ld = logicals.to_dense()
    m = ld.shape[0]
    ker = left_kernel(np.vstack([ld, stab])).to_dense()[:, :m]
    group = row_basis(ker) if ker.shape[0] else BitMatrix.zeros(0, m)
    signs = []
    for c in group.to_dense():
        v = (c.astype(np.int64) @ ld.astype(np.int64)) & 1
        signs.append(t.peek(PauliOp(BitVector.from_bits(v))))
    return group, signs


@dataclass
class SliceResult:
    n_slice: int
    layout: SliceLayout = field(repr=False)
    logical_group: BitMatrix
    signs: list[int]
    flux_outcomes: np.ndarray
    correction: np.ndarray
    cut_outcomes: np.ndarray
    zcheck_signs_after_correction: list[int]

    @property
    def expected(self) -> BitMatrix:
        return bell_ghz_group(self.n_slice)

    @property
    def matches_expected(self) -> bool:
        return row_span_equal(self.logical_group, self.expected)

    def to_json(self) -> dict:
        k = 2
        names = []
        kk = self.n_slice * k
        for c in self.logical_group.to_dense():
            terms = [f"X{j // k + 1}^{'xy'[j % k]}" for j in np.flatnonzero(c[:kk])]
            terms += [f"Z{j // k + 1}^{'xy'[j % k]}" for j in np.flatnonzero(c[kk:])]
            names.append(" ".join(terms))
        return {
            "n_slice": self.n_slice,
            "logical_group": names,
            "signs": self.signs,
            "matches_expected": self.matches_expected,
            "flux_outcomes": self.flux_outcomes.tolist(),
            "cut_outcomes": self.cut_outcomes.tolist(),
        }


def slice_protocol(lattice3, seed: int | None = 0, flux_flips: Sequence[int] = ()) -> SliceResult:
    """Prepare the 3D code from |+>, then measure direction-1 edges in X.

    ``flux_flips`` misreads those plaquette outcomes before the correction.
    """
    c, code = _cubic(lattice3, 3)
    layout = slice_layout(c, code)
    rng = np.random.default_rng(seed)
    t, outcomes, corr = prepare_code_state(code, rng, flips=flux_flips)
    n = code.n
    zsigns = [t.peek(_pauli(n, z=row)) for row in code.cz.to_dense()]
    cut = np.zeros(len(layout.cut_qubits), dtype=np.int64)
    for i, q in enumerate(layout.cut_qubits):
        cut[i], _ = t.measure_x(int(q), rng)
    group, signs = logical_group(t, layout.logicals)
    return SliceResult(layout.n_slice, layout, group, signs, outcomes, corr, cut, zsigns)


def twisted_slice_logicals(product: ChainComplex, trivial_on_homology: bool = True) -> BitMatrix:
    """Logical stabilizers of the sliced state from the circle factor alone.

    X-type generators come from 0-cocycles of the circle, Z-type from
    boundaries of its edges, each tensored with every homology label of the
    slice code.  Only twists acting trivially on homology are supported; the
    claim is verified on the slice code's logical representatives.
    """
    if not trivial_on_homology:
        raise NotImplementedError("twists acting nontrivially on homology are not supported")
    if product.kind != "product":
        raise ComplexError("expects a twisted product complex")
    circle, d = product.meta["factors"]
    code = css_from_complex(d, 1)
    basis = logical_basis(code)
    nq = code.n
    for perms in product.meta["twist"].values():
        p = np.asarray(perms[1])
        for rows, checks, lo in ((basis.x_rows, code.cx, 0), (basis.z_rows, code.cz, nq)):
            for r in rows.to_dense()[:, lo : lo + nq]:
                img = np.zeros_like(r)
                img[p] = r
                if not in_row_span(checks, (r ^ img)[None, :]):
                    raise ValueError("twist acts nontrivially on homology")
    k = basis.k
    ns = circle.degrees[0]
    bd = circle.boundary(1)
    cocycles = kernel(bd).to_dense()
    bounds = row_basis(bd).to_dense()
    kk = ns * k
    rows = []
    for f in cocycles:
        for a in range(k):
            v = np.zeros(2 * kk, dtype=np.uint8)
            v[np.flatnonzero(f) * k + a] = 1
            rows.append(v)
    for b in bounds:
        for a in range(k):
            v = np.zeros(2 * kk, dtype=np.uint8)
            v[kk + np.flatnonzero(b) * k + a] = 1
            rows.append(v)
    return row_basis(np.array(rows)) if rows else BitMatrix.zeros(0, 2 * kk)


# ---------------------------------------------------------------------------
# effective distance of Bell-pair preparation


@dataclass
class EffectiveDistanceReport:
    value: Fraction | None  # min e_f/2 + e_X; None if above the budget
    budget: int
    flux_faces: list[int]
    x_errors: list[int]
    flux_only: int | None  # min e_f with e_X = 0; None if above 2 * value
    x_only: int | None  # min e_X with e_f = 0; None if above value
    systole: int
    nodes: int

    @property
    def sharp(self) -> bool:
        return self.value is not None and self.flux_only == 2 * self.value

    def to_json(self) -> dict:
        return {
            "effective_distance": str(self.value) if self.value is not None else f"> {self.budget}",
            "witness": {"flux_faces": self.flux_faces, "x_errors": self.x_errors},
            "flux_only": self.flux_only,
            "x_only": self.x_only,
            "systole": self.systole,
            "sharp": self.sharp,
            "nodes": self.nodes,
        }


@dataclass
class BellFaultModel:
    """Columns: every face (flux error, cost 1) then every slice edge (X error, cost 2)."""

    problem: SearchProblem
    n_faces: int
    slice_edges: np.ndarray
    strips: np.ndarray
    zpairs: np.ndarray
    face_starts: list[int] | None = None  # one face per translation orbit, if the model is invariant


def _translation_invariant(c: ChainComplex, prob: SearchProblem, nf: int, sedges: np.ndarray) -> bool:
    """True when every unit translation maps undetected faults to undetected
    faults of the same harm: it must preserve the span of the detection rows
    and the span of detection plus class rows."""
    epos = {int(e): i for i, e in enumerate(sedges)}
    ref = np.vstack([prob.local, prob.global_])
    full = np.vstack([ref, prob.classes])
    for axis in range(3):
        shift = [0, 0, 0]
        shift[axis] = 1
        perms = translation_permutations(c, shift)
        cols = np.empty(ref.shape[1], dtype=np.int64)
        cols[:nf] = perms[2]
        for j, e in enumerate(sedges):
            t = int(perms[1][e])
            if t not in epos:
                return False
            cols[nf + j] = nf + epos[t]
        moved = np.zeros_like(full)
        moved[:, cols] = full
        if not row_span_equal(moved[: len(ref)], ref) or not row_span_equal(moved, full):
            return False
    return True


def bell_fault_model(lattice3) -> BellFaultModel:
    c, code = _cubic(lattice3, 3)
    layout = slice_layout(c, code)
    if layout.n_slice < 2:
        raise ValueError("Bell preparation needs at least two slices")
    d2 = c.boundary(2).to_dense()  # faces x edges
    d3 = c.boundary(3).to_dense()  # cubes x faces
    nf, n = d2.shape
    sedges = np.concatenate(layout.slice_qubits)
    ins = layout.inslice_faces
    # local: cube parity of flux; slice plaquettes after the X error lands
    cube_f = d3
    slice_f = np.zeros((len(ins), nf), dtype=np.uint8)
    slice_f[np.arange(len(ins)), ins] = 1
    slice_e = d2[ins][:, sedges]
    local = np.vstack(
        [
            np.hstack([cube_f, np.zeros((d3.shape[0], len(sedges)), np.uint8)]),
            np.hstack([slice_f, slice_e]),
        ]
    )
    # global: flux must pair trivially with every 2-cycle (be a coboundary)
    cycles = kernel(d2.T).to_dense()
    glob = np.hstack([cycles, np.zeros((cycles.shape[0], len(sedges)), np.uint8)])
    # classes: Z~_j^a Z~_{j+1}^a; flux pairs through a strip S with dS = pair
    kk = layout.n_slice * 2
    zl = layout.logicals.to_dense()[kk:, n:]
    strips, zpairs = [], []
    for j in range(layout.n_slice - 1):
        for a in range(2):
            pair = zl[j * 2 + a] ^ zl[(j + 1) * 2 + a]
            s = solve(d2, pair)
            if s is None:
                raise ArithmeticError("logical pair is not a boundary in 3D")
            strips.append(s)
            zpairs.append(pair)
    strips = np.array(strips, dtype=np.uint8)
    zpairs = np.array(zpairs, dtype=np.uint8)
    classes = np.hstack([strips, zpairs[:, sedges]])
    cost = np.concatenate([np.ones(nf, np.int64), 2 * np.ones(len(sedges), np.int64)])
    # cubes are cleared only by faces, slice plaquettes mostly by edges
    groups = np.repeat([0, 1], [d3.shape[0], len(ins)])
    prob = SearchProblem(local=local, classes=classes, cost=cost, global_=glob, groups=groups)
    det = c.meta["det"]
    starts = [j * det for j in range(3)] if _translation_invariant(c, prob, nf, sedges) else None
    return BellFaultModel(prob, nf, sedges, strips, zpairs, starts)


def effective_distance_bell(
    lattice3, budget: int = 3, node_limit: int = 10**11, use_translation: bool = True
) -> EffectiveDistanceReport:
    """Minimum e_f/2 + e_X over undetected logical faults, exhaustive up to ``budget``.

    Flux errors flip plaquette outcomes before the correction; X errors hit
    slice qubits afterwards.  Undetected means: flux is a coboundary (cube
    parities and homology pass) and the slice plaquettes read trivially.
    Costs are doubled so the search runs over integers.

    With ``use_translation`` a fault set holding a face is shifted so that
    its first face sits at the origin; sets without faces are the X-only ones.
    """
    model = bell_fault_model(lattice3)
    p = model.problem
    nf = model.n_faces
    cap = 2 * budget
    starts = model.face_starts if use_translation else None

    def run(prob, b, st=None):
        r = prob.run(b, starts=st, node_limit=node_limit, max_witnesses=1)
        if r[5]:
            raise DistanceBudgetExceeded(f"node limit {node_limit} reached", r[4])
        return r

    xonly = SearchProblem(p.local[:, nf:], p.classes[:, nf:], None, p.global_[:, nf:], p.groups)
    xbest, xwits, _, _, n1, _ = run(xonly, budget)
    xcost = 2 * xbest if xbest <= budget else cap + 1
    if starts is None:
        best, wits, _, _, n2, _ = run(p, cap)
    else:
        best, wits, _, _, n2, _ = run(p, min(cap, xcost), starts)
        if xcost < best:
            best, wits = xcost, [tuple(nf + i for i in xwits[0])]
    # flux-only minimum, searched only as far as the joint optimum: enough to
    # tell whether flux alone attains it
    lim = min(best, cap)
    fonly = SearchProblem(p.local[:, :nf], p.classes[:, :nf], None, p.global_[:, :nf], p.groups)
    fbest, _, _, _, n3, _ = run(fonly, lim, starts)
    w = wits[0] if best <= cap and wits else ()
    return EffectiveDistanceReport(
        value=Fraction(best, 2) if best <= cap else None,
        budget=budget,
        flux_faces=[i for i in w if i < nf],
        x_errors=[int(model.slice_edges[i - nf]) for i in w if i >= nf],
        flux_only=fbest if fbest <= lim else None,
        x_only=xbest if xbest <= lim // 2 else None,
        systole=l1_systole(lattice3),
        nodes=n1 + n2 + n3,
    )


# ---------------------------------------------------------------------------
# starfish circuits


STARFISH = ("+1", "-1", "+2", "-2", "+3", "-3")


@dataclass
class Circuit:
    """One round of Z-plaquette extraction with |+> ancillas and CZ gates.

    Ancilla i measures face ``faces[i]`` and is qubit n_data + i.
    """

    n_data: int
    faces: list[int]
    ops: list[tuple]
    order: tuple[str, ...]

    def schedule(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for op in self.ops:
            if op[0] == "cz":
                out.setdefault(op[2], []).append(op[1])
        return out

    def rounds_per_ancilla(self) -> dict[int, int]:
        return {a: len(v) for a, v in self.schedule().items()}


def _face_edge_at(c: ChainComplex, face, label: str) -> int | None:
    """Edge of a face displaced by +-1/2 along the labelled axis, if any."""
    h: HermiteForm = c.meta["lattice"]
    v, (i, j) = face
    sign = 1 if label[0] == "+" else -1
    a = int(label[1:]) - 1
    if a not in (i, j):
        return None
    other = j if a == i else i
    base = list(v)
    if sign > 0:
        base[a] += 1
    return c.index(1, (h.reduce(base), (other,)))


def starfish_circuit(lattice3, order: Sequence[str] = STARFISH) -> Circuit:
    c, code = _cubic(lattice3, 3)
    if sorted(order) != sorted(STARFISH):
        raise ValueError("order must be a permutation of +-1, +-2, +-3")
    n = code.n
    faces = list(range(len(c.cells[2])))
    ops: list[tuple] = [("prep", n + f) for f in faces]
    for label in order:
        for f in faces:
            e = _face_edge_at(c, c.cells[2][f], label)
            if e is not None:
                ops.append(("cz", e, n + f))
    ops += [("mx", n + f) for f in faces]
    return Circuit(n, faces, ops, tuple(order))


@dataclass
class HookRow:
    after: int  # CZs applied before the ancilla X fault
    support: list[int]  # propagated Z error on data
    reduced_weight: int  # weight up to the measured plaquette
    vertex_violations: int  # from tableau simulation
    outcome_flipped: bool


def hook_table(lattice3, circuit: Circuit | None = None, ancilla: int = 0, seed: int = 0) -> list[HookRow]:
    """Simulate an X fault on one ancilla after t = 0..4 CZs."""
    c, code = _cubic(lattice3, 3)
    circuit = circuit or starfish_circuit(lattice3)
    n = code.n
    anc = n + ancilla
    order = circuit.schedule()[anc]
    cx = code.cx.to_dense()
    rows = []
    for t_fault in range(len(order) + 1):
        rng = np.random.default_rng(seed)
        t, _, _ = prepare_code_state(code, rng, extra=1)
        for step, q in enumerate(order):
            if step == t_fault:
                t.pauli_x(anc)
            t.cz(q, anc)
        if t_fault == len(order):
            t.pauli_x(anc)
        out, det = t.measure_x(anc, rng)
        viol = sum(t.peek(_pauli(n + 1, x=np.append(r, 0))) == -1 for r in cx)
        support = sorted(order[t_fault:])
        rows.append(HookRow(t_fault, support, min(len(support), len(order) - len(support)), int(viol), out == -1))
    return rows


def circuit_fault_problem(circuit: Circuit, code: StabilizerCode) -> tuple[SearchProblem, list[tuple]]:
    """Faults: Z on any data qubit, X on an ancilla between its CZs.

    An ancilla X fault after t CZs leaves Z on the data qubits it has not yet
    touched.  Measurement flips and faults before the first or after the last
    CZ leave no data error, so they cannot build an undetected Z logical and
    are left out.  Z errors are detected by the vertex checks.
    """
    n = code.n
    basis = logical_basis(code)
    cx = code.cx.to_dense()
    reps = basis.x_rows.to_dense()[:, :n]
    cols, labels = [], []
    for q in range(n):
        v = np.zeros(n, dtype=np.uint8)
        v[q] = 1
        cols.append(v)
        labels.append(("z", q))
    seen = set()
    for anc, order in circuit.schedule().items():
        for t in range(1, len(order)):
            v = np.zeros(n, dtype=np.uint8)
            v[order[t:]] = 1
            key = v.tobytes()
            if key in seen:
                continue
            seen.add(key)
            cols.append(v)
            labels.append(("hook", anc, t))
    e = np.array(cols, dtype=np.uint8).T  # qubits x faults
    local = (cx.astype(np.int64) @ e) & 1
    classes = (reps.astype(np.int64) @ e) & 1
    return SearchProblem(local=local.astype(np.uint8), classes=classes.astype(np.uint8)), labels


def circuit_distance(circuit: Circuit, code: StabilizerCode, w_max: int, node_limit: int = 10**11) -> int | None:
    """Fewest circuit faults giving an undetected Z logical; None if above w_max."""
    if w_max < 1:
        return None
    prob, _ = circuit_fault_problem(circuit, code)
    best, _, _, _, nodes, exhausted = prob.run(w_max, node_limit=node_limit, max_witnesses=1)
    if exhausted:
        raise DistanceBudgetExceeded(f"node limit {node_limit} reached", nodes)
    return best if best <= w_max else None


# ---------------------------------------------------------------------------
# surgery


@dataclass
class SurgeryResult:
    row: int
    k_block: int
    k_merged: int
    measured: BitMatrix  # two-block logical operators in the merged stabilizer group
    measured_x: int
    measured_z: int
    surviving_pairs: int  # merged logical pairs represented by operators commuting with both codes
    block_symmetric: bool

    def to_json(self) -> dict:
        return {
            "row": self.row,
            "k_block": self.k_block,
            "k_two_blocks": 2 * self.k_block,
            "k_merged": self.k_merged,
            "measured_products": self.measured.nrows,
            "measured_x": self.measured_x,
            "measured_z": self.measured_z,
            "surviving_pairs": self.surviving_pairs,
            "block_symmetric": self.block_symmetric,
        }


def _surgery_map(h: HermiteForm, row: int, q: int):
    """Qubit bijection from two blocks on Lambda into the merged torus."""
    c = torus_complex(h)
    merged = merge_for_surgery(h, row)
    cm = torus_complex(merged)
    v = h.rows[row - 1]
    n = len(c.cells[q])
    image = np.empty(2 * n, dtype=np.int64)
    for i, (x, s) in enumerate(c.cells[q]):
        image[i] = cm.index(q, (merged.reduce(x), s))
        image[n + i] = cm.index(q, (merged.reduce(np.asarray(x) + v), s))
    if len(set(image.tolist())) != 2 * n:
        raise ArithmeticError("block qubits do not biject onto the merged torus")
    return c, cm, image


def _pull_back(m: np.ndarray, image: np.ndarray) -> np.ndarray:
    """Rewrite symplectic rows on merged qubits in two-block qubit order."""
    nn = len(image)
    return np.hstack([m[:, :nn][:, image], m[:, nn:][:, image]])


def surgery_measure(lattice4, row: int, basis: str = "both") -> SurgeryResult:
    """Logical content of merging two copies of a 4D (2,2) code along ``row``.

    Merged checks are pulled back to the two blocks through the qubit map;
    the measured logicals are the two-block logicals inside the merged
    stabilizer span, and the survivors are merged logicals represented by
    operators commuting with both check sets.  ``basis`` keeps only the X-
    or Z-type measured products in the result.
    """
    basis = basis.lower()
    if basis not in ("both", "x", "z"):
        raise ValueError("basis must be X, Z or both")
    h = lattice4 if isinstance(lattice4, HermiteForm) else hnf(lattice4)
    if h.dim != 4:
        raise ValueError("surgery is defined here for 4D lattices")
    if not 1 <= row <= 4:
        raise IndexError("row must be 1..4")
    c, cm, image = _surgery_map(h, row, 2)
    block = css_from_complex(c, 2)
    merged = css_from_complex(cm, 2)
    n = block.n
    cx, cz = block.cx.to_dense(), block.cz.to_dense()
    zx = np.zeros_like(cx)
    zz = np.zeros_like(cz)
    two = StabilizerCode.css(np.block([[cx, zx], [zx, cx]]), np.block([[cz, zz], [zz, cz]]))
    s2 = two.checks
    sm = BitMatrix.from_dense(_pull_back(merged.checks.to_dense(), image))
    J = SymplecticForm(2 * n)
    norm2 = kernel(J.apply(s2))
    normm = kernel(J.apply(sm))
    inter = span_intersection(sm, norm2)
    r2 = rank(s2)
    measured_span = row_basis(s2.vstack(inter)) if inter.nrows else row_basis(s2)
    n_measured = measured_span.nrows - r2
    # complement of s2 inside the measured span, one row per measured logical
    measured = _complement(s2, inter)
    mx = sum(1 for r in measured.to_dense() if not r[2 * n :].any())
    mz = sum(1 for r in measured.to_dense() if not r[: 2 * n].any())
    # block symmetry: swapping the blocks fixes each measured logical modulo s2
    swap = np.concatenate([np.arange(n, 2 * n), np.arange(n)])
    sym = all(in_row_span(s2, (r ^ _pull_back(r[None, :], swap)[0])[None, :]) for r in measured.to_dense())
    both = span_intersection(norm2, normm)
    surviving = rank(sm.vstack(both)) - rank(sm)
    if n_measured != measured.nrows or surviving % 2:
        raise ArithmeticError("inconsistent logical counts")
    if basis != "both":
        keep = [r for r in measured.rows() if not (r.to_array()[2 * n :] if basis == "x" else r.to_array()[: 2 * n]).any()]
        measured = BitMatrix.from_rows(keep, 4 * n)
    return SurgeryResult(row, num_logical(block), num_logical(merged), measured, mx, mz, surviving // 2, sym)


def _complement(base: BitMatrix, extra: BitMatrix) -> BitMatrix:
    rows = []
    cur = row_basis(base)
    r = cur.nrows
    for v in extra.rows():
        trial = cur.vstack(BitMatrix.from_rows([v]))
        rt = rank(trial)
        if rt > r:
            rows.append(v)
            cur, r = trial, rt
    return BitMatrix.from_rows(rows, base.ncols)


def boundary_distance(lattice, row: int, basis: str = "Z", qubit_degree: int | None = None) -> int:
    """Fewest measurement faults in one surgery round that flip a measured logical.

    Checks crossing the cut correspond to cells of the cut hyperplane; the
    undetected faults are cocycles of nonzero class there, counted twice
    for the two cut locations.  X-type measurements use the dual degree.
    """
    h = lattice if isinstance(lattice, HermiteForm) else hnf(lattice)
    d = h.dim
    q = qubit_degree if qubit_degree is not None else (d // 2 if d % 2 == 0 and d > 2 else 1)
    basis = basis.upper()
    if basis not in ("X", "Z"):
        raise ValueError("basis must be X or Z")
    qq = q if basis == "Z" else d - q
    m = d - 1
    if qq >= m:
        return 2
    cut = hyperplane_sublattice(h, row)
    if qq == m - 1:
        return 2 * l1_systole(cut)
    code = css_from_complex(torus_complex(cut), qq)
    w = 1
    while True:
        rep = min_weight_logical(code, "X", w)
        if rep.weight is not None:
            return 2 * rep.weight
        w += 1
