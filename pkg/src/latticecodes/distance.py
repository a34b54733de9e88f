"""Exact minimum logical weight by pruned depth-first enumeration.

The search walks error patterns in increasing column order, XOR-ing packed
syndromes as it goes.  A branch is cut when the syndrome still lit is larger
than the remaining budget could possibly clear: with per-column flip counts
f_i and costs c_i, no completion of cost r clears more than
max(f_i / c_i) * r checks.  When the checks split into families the bound
is applied to each family on its own as well.  Logical classes ride along
as packed inner products with a set of logical representatives.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numba
import numpy as np

from .code import LogicalBasis, StabilizerCode, logical_basis
from .gf2 import BitMatrix, pack_bits, rank, row_basis, span_intersection, symplectic_gram, unpack_bits


class DistanceBudgetExceeded(RuntimeError):
    def __init__(self, message: str, nodes: int = 0):
        super().__init__(message)
        self.nodes = nodes


_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@numba.njit(inline="always")
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@numba.njit(cache=True, nogil=True)
def _search(syn, gsyn, cls, cost, masks, rho_num, rho_den, starts, budget, max_wit, node_limit):
    """Minimum-cost column set with zero local and global syndrome and a
    nonzero class.  Returns (best, witnesses, witness classes, count, nodes,
    exhausted); best = budget + 1 when nothing was found."""
    n, W = syn.shape
    GW = gsyn.shape[1]
    CW = cls.shape[1]
    mincost = cost.min()
    maxdepth = budget // mincost + 1
    S = np.zeros((maxdepth + 1, W), dtype=np.uint64)
    G = np.zeros((maxdepth + 1, GW), dtype=np.uint64)
    C = np.zeros((maxdepth + 1, CW), dtype=np.uint64)
    used = np.zeros(maxdepth + 1, dtype=np.int64)
    cur = np.zeros(maxdepth + 1, dtype=np.int64)
    chosen = np.zeros(maxdepth + 1, dtype=np.int64)
    wit = np.full((max_wit, maxdepth), -1, dtype=np.int64)
    witcls = np.zeros((max_wit, CW), dtype=np.uint64)
    count = 0
    nodes = 0
    best = budget + 1
    nstarts = starts.size
    d = 0
    cur[0] = 0
    while True:
        if d == 0:
            if cur[0] >= nstarts:
                break
            c = starts[cur[0]]
        else:
            c = cur[d]
            if c >= n:
                d -= 1
                cur[d] += 1
                continue
        limit = best if best <= budget else budget
        newcost = used[d] + cost[c]
        if newcost > limit:
            cur[d] += 1
            continue
        nodes += 1
        if nodes > node_limit:
            return best, wit[: min(count, max_wit)], witcls[: min(count, max_wit)], count, nodes, True
        pc = 0
        for w in range(W):
            S[d + 1, w] = S[d, w] ^ syn[c, w]
            pc += _popcount(S[d + 1, w])
        gz = True
        for w in range(GW):
            G[d + 1, w] = G[d, w] ^ gsyn[c, w]
            if G[d + 1, w] != 0:
                gz = False
        cz = True
        for w in range(CW):
            C[d + 1, w] = C[d, w] ^ cls[c, w]
            if C[d + 1, w] != 0:
                cz = False
        chosen[d] = c
        if pc == 0 and gz:
            if not cz:
                if newcost < best:
                    best = newcost
                    count = 0
                if count < max_wit:
                    for i in range(maxdepth):
                        wit[count, i] = chosen[i] if i <= d else -1
                    for w in range(CW):
                        witcls[count, w] = C[d + 1, w]
                count += 1
            # a zero-syndrome prefix never needs extending: whatever follows
            # is a cheaper logical (or stabilizer) on its own
            cur[d] += 1
            continue
        rem = limit - newcost
        cut = rem <= 0
        for g in range(masks.shape[0]):
            if cut:
                break
            pg = 0
            for w in range(W):
                pg += _popcount(S[d + 1, w] & masks[g, w])
            cut = np.int64(pg) * rho_den[g] > rho_num[g] * rem
        if cut:
            cur[d] += 1
            continue
        used[d + 1] = newcost
        d += 1
        cur[d] = c + 1
    return best, wit[: min(count, max_wit)], witcls[: min(count, max_wit)], count, nodes, False


def _pack_columns(m: np.ndarray) -> np.ndarray:
    """Pack the columns of a dense (rows x cols) 0/1 matrix: one word row per column."""
    m = np.asarray(m, dtype=np.uint8)
    if m.shape[0] == 0:
        return np.zeros((m.shape[1], 1), dtype=np.uint64)
    return pack_bits(m.T)


@dataclass
class SearchProblem:
    """Generic weighted search: columns with local syndromes (pruned), global
    syndromes (must vanish, not pruned), class bits and integer costs.
    ``groups`` labels each local row with a check family for the sharper
    per-family bound."""

    local: np.ndarray
    classes: np.ndarray
    cost: np.ndarray | None = None
    global_: np.ndarray | None = None
    groups: np.ndarray | None = None

    def run(self, budget: int, starts=None, node_limit: int = 10**12, max_witnesses: int = 10000):
        local = np.asarray(self.local, dtype=np.uint8)
        ncols = local.shape[1]
        cost = np.ones(ncols, dtype=np.int64) if self.cost is None else np.asarray(self.cost, dtype=np.int64)
        if (cost <= 0).any():
            raise ValueError("costs must be positive")
        syn = _pack_columns(local)
        gl = np.zeros((0, ncols), dtype=np.uint8) if self.global_ is None else np.asarray(self.global_, dtype=np.uint8)
        gsyn = _pack_columns(gl)
        cls = _pack_columns(np.asarray(self.classes, dtype=np.uint8))
        # one mask per family, plus the whole syndrome when there are several
        nrows = local.shape[0]
        labels = np.zeros(nrows, dtype=np.int64) if self.groups is None else np.asarray(self.groups, dtype=np.int64)
        fams = [np.ones(nrows, dtype=bool)] + ([labels == g for g in np.unique(labels)] if len(np.unique(labels)) > 1 else [])
        masks = pack_bits(np.array(fams, dtype=np.uint8)) if nrows else np.zeros((1, 1), dtype=np.uint64)
        rhos = []
        for f in fams:
            flips = local[f].sum(axis=0).astype(np.int64)
            rho = max((Fraction(int(x), int(c)) for x, c in zip(flips, cost)), default=Fraction(0))
            rhos.append(rho if rho else Fraction(1))
        starts = np.arange(ncols, dtype=np.int64) if starts is None else np.asarray(starts, dtype=np.int64)
        best, wit, witcls, count, nodes, exhausted = _search(
            syn, gsyn, cls, cost, masks,
            np.array([r.numerator for r in rhos], dtype=np.int64), np.array([r.denominator for r in rhos], dtype=np.int64),
            starts, int(budget), int(max_witnesses), int(node_limit),
        )
        wits = [tuple(int(x) for x in row if x >= 0) for row in wit]
        ncls = np.asarray(self.classes).shape[0]
        classes = [tuple(int(b) for b in unpack_bits(w, ncls)) for w in witcls] if ncls else []
        return int(best), wits, classes, int(count), int(nodes), bool(exhausted)


@dataclass
class DistanceReport:
    side: str
    weight: int | None  # None: no logical of weight <= exhaustive_up_to
    witnesses: list[tuple[int, ...]]
    logical_classes: list[tuple[int, ...]]
    exhaustive_up_to: int
    witness_count: int
    nodes: int
    seconds: float = 0.0
    translation_reduced: bool = False
    max_flip: int = 0

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "weight": self.weight,
            "result": str(self.weight) if self.weight is not None else f"> {self.exhaustive_up_to}",
            "exhaustive_up_to": self.exhaustive_up_to,
            "witness_count": self.witness_count,
            "witnesses": [list(w) for w in self.witnesses],
            "logical_classes": [list(c) for c in self.logical_classes],
            "translation_reduced": self.translation_reduced,
            "nodes": self.nodes,
            "seconds": round(self.seconds, 3),
            "max_flip": self.max_flip,
        }


def side_matrices(code: StabilizerCode, side: str, basis: LogicalBasis | None = None):
    """(checks detecting errors of this type, logical reps of the other type)."""
    side = side.upper()
    if side not in ("X", "Z"):
        raise ValueError("side must be 'X' or 'Z'")
    if not code.is_css:
        raise ValueError("min_weight_logical needs a CSS code")
    basis = basis or logical_basis(code)
    n = code.n
    if side == "Z":
        return code.cx.to_dense(), basis.x_rows.to_dense()[:, :n]
    return code.cz.to_dense(), basis.z_rows.to_dense()[:, n:]


def min_weight_logical(
    code: StabilizerCode,
    side: str,
    w_max: int,
    use_translation: bool = False,
    translation_orbit_size: int | None = None,
    *,
    basis: LogicalBasis | None = None,
    node_limit: int = 10**12,
    max_witnesses: int = 100000,
) -> DistanceReport:
    """Smallest weight of a ``side``-type logical operator, exhaustive up to w_max.

    With ``use_translation`` the first qubit is restricted to indices
    0, T, 2T, ... (T = translation_orbit_size), which is valid for codes laid
    out by ``torus_complex``; witnesses are then representatives up to
    translation.
    """
    if w_max < 1:
        raise ValueError("w_max must be at least 1")
    checks, reps = side_matrices(code, side, basis)
    starts = None
    if use_translation:
        if not translation_orbit_size or code.n % translation_orbit_size:
            raise ValueError("translation needs an orbit size dividing n")
        starts = np.arange(0, code.n, translation_orbit_size)
    t0 = time.perf_counter()
    prob = SearchProblem(local=checks, classes=reps)
    best, wits, classes, count, nodes, exhausted = prob.run(w_max, starts, node_limit, max_witnesses)
    if exhausted:
        raise DistanceBudgetExceeded(f"node limit {node_limit} reached", nodes)
    found = best <= w_max
    return DistanceReport(
        side=side.upper(),
        weight=best if found else None,
        witnesses=wits if found else [],
        logical_classes=classes if found else [],
        exhaustive_up_to=w_max,
        witness_count=count if found else 0,
        nodes=nodes,
        seconds=time.perf_counter() - t0,
        translation_reduced=use_translation,
        max_flip=int(np.asarray(checks).sum(axis=0).max()) if checks.size else 0,
    )


def brute_force_min_weight(code: StabilizerCode, side: str, w_max: int) -> int | None:
    """Oracle: try every support of size 1..w_max with itertools."""
    checks, reps = side_matrices(code, side)
    checks = np.asarray(checks, dtype=np.int64)
    reps = np.asarray(reps, dtype=np.int64)
    for w in range(1, w_max + 1):
        for sup in itertools.combinations(range(code.n), w):
            cols = list(sup)
            if checks.shape[0] and (checks[:, cols].sum(axis=1) % 2).any():
                continue
            if (reps[:, cols].sum(axis=1) % 2).any():
                return w
    return None


def expand_translates(witnesses: Sequence[Sequence[int]], qubit_perms: Sequence[np.ndarray]) -> list[tuple[int, ...]]:
    """All distinct images of the witnesses under the given qubit permutations."""
    out = set()
    for w in witnesses:
        arr = np.asarray(w, dtype=np.int64)
        for p in qubit_perms:
            out.add(tuple(sorted(int(x) for x in p[arr])))
    return sorted(out)


def qubit_translations(c, q: int) -> list[np.ndarray]:
    """Permutations of q-cells for every translation by a vertex of the torus."""
    from .complexes import translation_permutations

    return [translation_permutations(c, v)[q] for v, _ in c.cells[0]]


def logical_representatives_22(c) -> BitMatrix:
    """Six X-type logicals of a 4D (2,2) code with odd determinant: the sum
    of all plaquettes spanning each pair of directions."""
    if c.kind != "cubic" or c.top != 4:
        raise ValueError("needs a 4D cubic complex")
    det = c.meta["det"]
    if det % 2 == 0:
        raise ValueError("plaquette-sum representatives need odd det; use logical_basis")
    n = len(c.cells[2])
    reps = np.zeros((6, 2 * n), dtype=np.uint8)
    for j in range(6):
        reps[j, j * det : (j + 1) * det] = 1
    return BitMatrix.from_dense(reps)


@dataclass
class SubsystemReport:
    weight: int
    x_representatives: list[tuple[int, ...]]
    z_representatives: list[tuple[int, ...]]
    x_classes: int
    z_classes: int
    all_commute: bool
    commutation: np.ndarray
    gauge_rank: int
    remaining_logicals: int
    subsystem_distance_lower_bound: int | None

    def to_json(self) -> dict:
        return {
            "weight": self.weight,
            "x_representatives": len(self.x_representatives),
            "z_representatives": len(self.z_representatives),
            "x_classes": self.x_classes,
            "z_classes": self.z_classes,
            "all_commute": self.all_commute,
            "gauge_rank": self.gauge_rank,
            "remaining_logicals": self.remaining_logicals,
            "subsystem_distance_lower_bound": self.subsystem_distance_lower_bound,
        }


def subsystem_probe(code: StabilizerCode, w: int, complex_=None, q: int | None = None, max_witnesses: int = 200000) -> SubsystemReport:
    """Collect every weight-w X- and Z-type logical and ask what is left once
    they are demoted to gauge operators.

    Logical classes are coordinates in the symplectic frame; G is their span.
    The bare logical qubits that survive number (2k - dim G - dim(G & G^perp)) / 2.
    When none of the logicals of weight w touch them, the surviving logicals
    have weight > w, so w + 1 is a lower bound on the subsystem distance.
    """
    basis = logical_basis(code)
    k = basis.k
    n = code.n
    reps = {}
    for side in ("X", "Z"):
        if complex_ is not None:
            det = complex_.meta["det"]
            rep = min_weight_logical(code, side, w, True, det, basis=basis, max_witnesses=max_witnesses)
            wits = expand_translates(rep.witnesses, qubit_translations(complex_, q)) if rep.weight == w else []
        else:
            rep = min_weight_logical(code, side, w, basis=basis, max_witnesses=max_witnesses)
            wits = sorted(rep.witnesses) if rep.weight == w else []
        reps[side] = wits
    rows = []
    for side, wits in reps.items():
        for sup in wits:
            v = np.zeros(2 * n, dtype=np.uint8)
            off = 0 if side == "X" else n
            v[off + np.asarray(sup)] = 1
            rows.append(v)
    if rows:
        ops = BitMatrix.from_dense(np.array(rows))
        coords = symplectic_gram(ops, basis.L)  # <op, L_i> for each frame row
        # frame coordinates: c = v J L^T J_k, i.e. swap the halves of <v, L>
        coords = np.concatenate([coords[:, k:], coords[:, :k]], axis=1)
        g = row_basis(coords)
        gram = symplectic_gram(g) if g.nrows else np.zeros((0, 0))
        radical = g.nrows - rank(gram) if g.nrows else 0
        dim_g = g.nrows
        comm = symplectic_gram(ops)
    else:
        dim_g, radical = 0, 0
        comm = np.zeros((0, 0), dtype=np.uint8)
    remaining = (2 * k - dim_g - radical) // 2
    nx = len(reps["X"])
    x_cls = rank(coords[:nx]) if nx else 0
    z_cls = rank(coords[nx:]) if len(reps["Z"]) else 0
    return SubsystemReport(
        weight=w,
        x_representatives=reps["X"],
        z_representatives=reps["Z"],
        x_classes=x_cls,
        z_classes=z_cls,
        all_commute=not comm.any(),
        commutation=comm,
        gauge_rank=dim_g,
        remaining_logicals=remaining,
        subsystem_distance_lower_bound=(w + 1) if remaining > 0 else None,
    )
