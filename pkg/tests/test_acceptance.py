"""One test per acceptance criterion.  Each prints a PASS/FAIL line.

The shallow d=5 effective distance runs only with LATTICECODES_LONG=1.
"""

from __future__ import annotations

import itertools
import os

import numpy as np

from latticecodes.code import PauliOp, StabilizerCode, is_symmetry, num_logical
from latticecodes.complexes import (
    circle_complex,
    css_from_complex,
    honeycomb_24cell,
    subdivide_octahedra,
    torus_complex,
    translation_permutations,
    twisted_product,
)
from latticecodes.distance import brute_force_min_weight, min_weight_logical, subsystem_probe
from latticecodes.gf2 import BitMatrix, in_row_span, is_symplectic, row_span_equal
from latticecodes.injection import css_injection_sets, noncss_injection_sets, round_trip
from latticecodes.lattice import d4_lattice, hadamard_lattice, hnf, l1_systole, search_min_det
from latticecodes.protocols import (
    bell_ghz_group,
    boundary_distance,
    circuit_distance,
    effective_distance_bell,
    hook_table,
    slice_protocol,
    starfish_circuit,
    surgery_measure,
    twisted_slice_logicals,
)
from latticecodes.symmetry import crystalline_gates

LONG = os.environ.get("LATTICECODES_LONG") == "1"

BELL3 = [[2, 0, 4], [0, 1, 3], [0, 0, 5]]
SHALLOW5 = [[2, 0, 12], [0, 1, 8], [0, 0, 13]]
TABLE1_D3 = [[1, 0, 4], [0, 1, 5], [0, 0, 7]]
DET16 = [[1, 0, 0, 7], [0, 1, 0, 5], [0, 0, 1, 3], [0, 0, 0, 16]]


def verdict(capsys, n: int, checks: list[tuple[str, bool]], skipped: str = "") -> None:
    ok = all(v for _, v in checks)
    lines = [f"  {'ok ' if v else 'BAD'} {name}" for name, v in checks]
    if skipped:
        lines.append(f"  skipped: {skipped} (set LATTICECODES_LONG=1)")
    lines.append(f"{'PASS' if ok else 'FAIL'} criterion {n}")
    # bypass capture so the verdict shows in every run
    with capsys.disabled():
        print("\n" + "\n".join(lines))
    assert ok, [name for name, v in checks if not v]


def det_table(dim, slices, rows, long_rows):
    # the CLI gates the last row behind --long; here it runs in under a second
    targets = {**rows, **long_rows}
    checks = []
    for s, want in sorted(targets.items()):
        got = search_min_det(dim, s, slices).det
        checks.append((f"systole {s}: det {got} (want {want})", got == want))
    return checks


def test_criterion_01_table1(capsys):
    checks = det_table(3, 1, {2: 2, 3: 7, 4: 12, 5: 27, 6: 38}, {7: 70})
    verdict(capsys, 1, checks)


def test_criterion_02_table2(capsys):
    checks = det_table(3, 2, {2: 4, 3: 10, 4: 16, 5: 30, 6: 44}, {7: 72})
    verdict(capsys, 2, checks)


def test_criterion_03_table3_4d(capsys):
    checks = det_table(4, 1, {2: 2, 3: 9, 4: 16}, {5: 45})
    checks += det_table(4, 2, {3: 14, 4: 24}, {})
    verdict(capsys, 3, checks)


def test_criterion_04_hadamard_code(capsys):
    h = hadamard_lattice(2)
    code = css_from_complex(torus_complex(h), 2)
    checks = [
        ("n = 96", code.n == 96),
        ("k = 6", num_logical(code) == 6),
        ("64 X-checks, 64 Z-checks", code.cx.nrows == 64 and code.cz.nrows == 64),
    ]
    # the translation trick makes this fast enough to run by default
    for side in "XZ":
        rep = min_weight_logical(code, side, 8, True, hnf(h).det)
        checks.append((f"{side} distance {rep.weight} = 8", rep.weight == 8))
    verdict(capsys, 4, checks)


def test_criterion_05_subsystem(capsys):
    c = torus_complex(DET16)
    code = css_from_complex(c, 2)
    r = subsystem_probe(code, 8, c, 2)
    checks = [
        ("stabilizer distance 8", bool(r.x_representatives) and bool(r.z_representatives)),
        ("weight-8 X and Z logicals commute", r.all_commute),
        ("exactly 8 weight-8 Z representatives", len(r.z_representatives) == 8),
        ("one homology class", r.z_classes == 1),
        ("subsystem distance >= 9", r.subsystem_distance_lower_bound == 9),
    ]
    verdict(capsys, 5, checks)


def test_criterion_06_slicing(capsys):
    checks = []
    for basis, n in ((BELL3, 2), (np.diag([3, 3, 3]), 3)):
        h = hnf(basis)
        sim = slice_protocol(h, 0)
        d = torus_complex(h.rows[1:, 1:])
        twist = {(int(h.rows[0, 0]) - 1, 0): translation_permutations(d, [-int(x) for x in h.rows[0, 1:]])}
        alg = twisted_slice_logicals(twisted_product(circle_complex(int(h.rows[0, 0])), d, twist))
        name = "Bell pairs" if n == 2 else "GHZ"
        checks.append((f"{name}: tableau group", row_span_equal(sim.logical_group, bell_ghz_group(n))))
        checks.append((f"{name}: twisted product agrees", row_span_equal(alg, sim.logical_group)))
    verdict(capsys, 6, checks)


def test_criterion_07_effective_distance(capsys):
    from test_protocols import brute_force_bell

    rep = effective_distance_bell(BELL3, budget=3)
    checks = [
        ("brute force: nothing below 3", brute_force_bell(BELL3, 3) == []),
        ("search: effective distance 3", rep.value == 3),
        ("coefficient 1/2 sharp: flux-only weight 6", rep.sharp),
    ]
    if LONG:
        rep5 = effective_distance_bell(SHALLOW5, budget=5)
        checks.append((f"shallow d=5: effective distance {rep5.value}", rep5.value == 5))
    verdict(capsys, 7, checks, "" if LONG else "shallow d=5")


def test_criterion_08_starfish(capsys):
    c = torus_complex(hnf(TABLE1_D3))
    code = css_from_complex(c, 1)
    d = circuit_distance(starfish_circuit(TABLE1_D3), code, 3)
    rows = {r.after: r for r in hook_table(TABLE1_D3)}
    checks = [
        ("circuit distance 3", d == 3),
        ("hook after 2 CZs: weight 2, 4 vertex violations", rows[2].reduced_weight == 2 and rows[2].vertex_violations == 4),
    ]
    verdict(capsys, 8, checks)


def test_criterion_09_symmetry(capsys):
    h = hadamard_lattice(2)
    code = css_from_complex(torus_complex(h), 2)
    r = crystalline_gates(torus_complex(h), 2)
    gates_ok = all(is_symplectic(g.matrix) and is_symmetry(code, g.matrix) for g in r.hadamard + r.phase)
    checks = [
        ("384 automorphisms", r.n_automorphisms == 384),
        ("24 distinct permutation actions", len(r.permutation) == 24),
        ("H- and S-type gates verified", gates_ok and bool(r.hadamard) and bool(r.phase)),
        ("group order 1132462080", r.group_order == 1132462080),
    ]
    verdict(capsys, 9, checks)


def test_criterion_10_surgery(capsys):
    h = hadamard_lattice(2)
    checks = []
    for row in range(1, 5):
        r = surgery_measure(h, row)
        checks.append((f"row {row}: 6 measured products", r.measured.nrows == 6))
    for L in (2, 3, 4):
        got = [boundary_distance(np.eye(4, dtype=int) * L, 4, b) for b in "XZ"]
        checks.append((f"L={L}: boundary distance {got}", got == [2 * L, 2 * L]))
    verdict(capsys, 10, checks)


def pauli_distance(code) -> int:
    """Smallest weight of a Pauli commuting with every check but not in their span."""
    n = code.n
    for w in range(1, n + 1):
        for sup in itertools.combinations(range(n), w):
            for letters in itertools.product("XYZ", repeat=w):
                s = ["I"] * n
                for q, a in zip(sup, letters):
                    s[q] = a
                p = PauliOp.from_string("".join(s))
                if not code.syndrome(p).any() and not in_row_span(code.checks, p.vector.to_array()[None, :]):
                    return w
    return n + 1


def test_criterion_11_injection(capsys):
    codes = {
        "toric 3x3": css_from_complex(torus_complex(np.diag([3, 3])), 1),
        "rotated 2D": css_from_complex(torus_complex([[1, 3], [0, 5]]), 1),
        "3D sliceable": css_from_complex(torus_complex(BELL3), 1),
        "3D cube": css_from_complex(torus_complex(np.diag([2, 2, 2])), 1),
        "4D tesseract": css_from_complex(torus_complex(np.diag([2, 2, 2, 2])), 2),
    }
    rows = [PauliOp.from_string(s).vector.to_array() for s in ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")]
    codes["five-qubit"] = StabilizerCode(5, BitMatrix.from_dense(np.array(rows)))
    checks = []
    for name, code in codes.items():
        sets = css_injection_sets(code) if code.is_css else noncss_injection_sets(code)
        try:
            sets.validate(code)
            valid = True
        except ValueError:
            valid = False
        k = num_logical(code)
        if code.is_css:
            d = min(min_weight_logical(code, side, 6).weight or 7 for side in "XZ")
            singleton = d - 1 <= min(len(sets.s_z), len(sets.s_x)) <= (code.n - k) / 2
        else:
            singleton = pauli_distance(code) - 1 <= (code.n - k) / 2
        singleton &= len(sets.u) == k
        trips = round_trip(code, sets, 100, seed=0)
        checks.append((f"{name}: cleaning tests, Singleton, {trips}/100 round trips", valid and singleton and trips == 100))
    verdict(capsys, 11, checks)


def test_criterion_12_24cell(capsys):
    c = honeycomb_24cell(d4_lattice())
    code = css_from_complex(c, 2, dual=True)
    s = subdivide_octahedra(c)
    dx = min_weight_logical(code, "X", 8).weight
    dz = min_weight_logical(code, "Z", 8).weight
    checks = [
        ("24 edges, 32 triangles, 12 octahedra", c.degrees[1:4] == [24, 32, 12]),
        ("32 qubits", code.n == 32),
        (f"min X-logical weight {dx} = 6", dx == 6),
        (f"min Z-logical weight {dz} = 2", dz == 2),
        ("pyramid checks weight 5", set(s.boundary(3).row_weights()) == {5}),
    ]
    verdict(capsys, 12, checks)


def _random_unimodular(rng, d):
    u = np.eye(d, dtype=np.int64)
    for _ in range(3 * d):
        i, j = rng.choice(d, 2, replace=False)
        u[i] += int(rng.integers(-2, 3)) * u[j]
    return u[rng.permutation(d)]


def test_criterion_13_property_suites(capsys):
    checks = []
    complexes = [torus_complex(b) for b in (np.diag([3, 3]), BELL3, TABLE1_D3, DET16, hadamard_lattice(2))]
    complexes += [honeycomb_24cell(d4_lattice()), subdivide_octahedra(honeycomb_24cell(d4_lattice()))]
    complexes += [twisted_product(circle_complex(3), torus_complex(np.diag([3, 3])))]
    sq = all((c.boundary(k) @ c.boundary(k - 1)).is_zero() for c in complexes for k in range(2, c.top + 1))
    checks.append((f"boundary squares to zero on {len(complexes)} complexes", sq))

    agree, count = True, 0
    for b in (np.diag([2, 2]), np.diag([3, 3]), [[1, 2], [0, 5]], [[1, 3], [0, 8]], np.diag([2, 2, 2]), [[1, 0, 2], [0, 1, 3], [0, 0, 7]]):
        c = torus_complex(b)
        for q in range(1, c.top):
            code = css_from_complex(c, q)
            if code.n > 24:
                continue
            for side in "XZ":
                count += 1
                agree &= min_weight_logical(code, side, 4).weight == brute_force_min_weight(code, side, 4)
    checks.append((f"distance search matches brute force ({count} cases)", agree))

    rng = np.random.default_rng(13)
    inv, seen = True, 0
    while seen < 1000:
        d = 3 + seen % 2
        w = rng.integers(-4, 5, size=(d, d))
        if round(np.linalg.det(w)) == 0:
            continue
        inv &= hnf(_random_unimodular(rng, d) @ w) == hnf(w)
        seen += 1
    checks.append(("hnf invariant under 1000 unimodular changes", inv))

    fam = [l1_systole(hadamard_lattice(t)) for t in (1, 2, 3)]
    checks.append((f"Hadamard systoles {fam} = 2^t", fam == [2, 4, 8]))
    verdict(capsys, 13, checks)
