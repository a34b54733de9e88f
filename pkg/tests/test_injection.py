from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticecodes.code import PauliOp, StabilizerCode, num_logical
from latticecodes.complexes import css_from_complex, torus_complex
from latticecodes.distance import min_weight_logical
from latticecodes.gf2 import BitMatrix, in_row_span, left_kernel, row_basis
from latticecodes.injection import (
    InjectionSets,
    cleaning_test,
    css_injection_sets,
    injected_logical_pairs,
    noncss_injection_sets,
    round_trip,
    unencoding_bases,
)
from latticecodes.tableau import random_clifford_state


def five_qubit():
    rows = [PauliOp.from_string(s).vector.to_array() for s in ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]]
    return StabilizerCode(5, BitMatrix.from_dense(np.array(rows)))


def torus(basis, q=1):
    return css_from_complex(torus_complex(basis), q)


CSS_CODES = {
    "toric33": lambda: torus(np.diag([3, 3])),
    "rotated5": lambda: torus([[1, 3], [0, 5]]),
    "bell3d": lambda: torus([[2, 0, 4], [0, 1, 3], [0, 0, 5]]),
    "cube222": lambda: torus(np.diag([2, 2, 2])),
    "tesseract": lambda: torus(np.diag([2, 2, 2, 2]), 2),
}


def random_code(n, m, seed):
    """Checks from the first m stabilizers of a random stabilizer state."""
    t = random_clifford_state(n, np.random.default_rng(seed))
    rows = [p.vector.to_array() for _, p in t.stabilizers()[:m]]
    return StabilizerCode(n, BitMatrix.from_dense(np.array(rows, dtype=np.uint8).reshape(m, 2 * n)))


# G_U oracle ---------------------------------------------------------------


def g_u(code, s_z, s_x, u):
    """Shorten each check type away from the other prepared set, puncture to U."""
    cx, cz = code.cx.to_dense(), code.cz.to_dense()

    def shorten(m, away):
        # combinations vanishing on ``away``
        if not away:
            comb = m
        else:
            k = left_kernel(m[:, list(away)]).to_dense()
            comb = (k.astype(int) @ m.astype(int)) % 2 if k.shape[0] else np.zeros((0, code.n), np.uint8)
        return comb[:, u]

    def basis(m):
        return row_basis(m) if m.size else np.zeros((0, len(u)))

    return StabilizerCode.css(basis(shorten(cx, s_z)), basis(shorten(cz, s_x)))


def nontrivial_logical(code, v):
    """Commutes with all checks and is not a stabilizer."""
    p = PauliOp(BitMatrix.from_dense(v[None, :]).row(0))
    return not code.syndrome(p).any() and not in_row_span(code.checks, v[None, :])


def test_gu_oracle_along_greedy():
    code = CSS_CODES["toric33"]()
    n, k = code.n, num_logical(code)
    s_z, s_x, u = [], [], list(range(n))
    for q in range(n):
        rest = [p for p in u if p != q]
        g = g_u(code, s_z, s_x, u)
        assert num_logical(g) == k
        i = u.index(q)
        ex = np.zeros(2 * len(u), dtype=np.uint8)
        ex[i] = 1
        ez = np.zeros(2 * len(u), dtype=np.uint8)
        ez[len(u) + i] = 1
        # q can join S_Z iff Z_q is not a logical of G_U, likewise for X
        assert cleaning_test(code, s_z + [q], "Z") == (not nontrivial_logical(g, ez))
        assert cleaning_test(code, s_x + [q], "X") == (not nontrivial_logical(g, ex))
        if cleaning_test(code, s_z + [q], "Z"):
            s_z.append(q)
            u = rest
        elif cleaning_test(code, s_x + [q], "X"):
            s_x.append(q)
            u = rest
    assert len(u) == k


# cleaning test ------------------------------------------------------------


def test_cleaning_examples():
    code = CSS_CODES["toric33"]()
    assert cleaning_test(code, [], "X")
    assert not cleaning_test(code, range(code.n), "X")
    assert not cleaning_test(code, range(code.n), "Z")
    for q in range(code.n):
        assert cleaning_test(code, [q], "X") and cleaning_test(code, [q], "Z")
    with pytest.raises(ValueError):
        cleaning_test(code, [0], "W")


def test_cleaning_matches_min_weight():
    # a minimum-weight Z logical fails the Z test, any smaller set passes
    code = CSS_CODES["toric33"]()
    rep = min_weight_logical(code, "Z", 3)
    w = rep.witnesses[0]
    assert not cleaning_test(code, w, "Z")
    assert cleaning_test(code, w[:-1], "Z")


# CSS sets -----------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(CSS_CODES))
def test_css_sets(name):
    code = CSS_CODES[name]()
    sets = css_injection_sets(code)
    sets.validate(code)
    assert len(sets.u) == num_logical(code)
    assert set(unencoding_bases(sets).values()) <= {"X", "Z"}
    d = min(min_weight_logical(code, s, 4).weight or 5 for s in "XZ")
    assert d - 1 <= min(len(sets.s_z), len(sets.s_x)) <= (code.n - num_logical(code)) / 2


def test_toric33_counts():
    code = CSS_CODES["toric33"]()
    sets = css_injection_sets(code)
    assert len(sets.u) == 2 and len(sets.s_z) + len(sets.s_x) == 16


def test_no_checks():
    code = StabilizerCode.css(np.zeros((0, 4)), np.zeros((0, 4)))
    sets = css_injection_sets(code)
    assert sets.u == [0, 1, 2, 3] and not sets.s_z and not sets.s_x
    assert len(injected_logical_pairs(code, sets)) == 4


def test_k_zero():
    code = StabilizerCode.css([[1, 1]], [[1, 1]])
    sets = css_injection_sets(code)
    assert sets.u == [] and injected_logical_pairs(code, sets) == []
    assert round_trip(code, sets, 5) == 5


@pytest.mark.parametrize("name", sorted(CSS_CODES))
def test_pairs_restrict_to_u(name):
    code = CSS_CODES[name]()
    sets = css_injection_sets(code)
    pairs = injected_logical_pairs(code, sets)
    assert len(pairs) == num_logical(code)
    for p in pairs:
        assert set(p.x_logical.support()) <= set(sets.s_x) | {p.qubit}
        assert set(p.z_logical.support()) <= set(sets.s_z) | {p.qubit}
        assert not code.syndrome(p.x_logical).any() and not code.syndrome(p.z_logical).any()


@pytest.mark.parametrize("name", sorted(CSS_CODES))
def test_css_round_trip(name):
    code = CSS_CODES[name]()
    assert round_trip(code, css_injection_sets(code), 100, seed=1) == 100


@settings(max_examples=20, deadline=None)
@given(st.permutations(list(range(18))))
def test_any_order_reaches_k(order):
    code = CSS_CODES["toric33"]()
    sets = css_injection_sets(code, order)
    sets.validate(code)


# non-CSS ------------------------------------------------------------------


def test_five_qubit_code():
    code = five_qubit()
    sets = noncss_injection_sets(code)
    sets.validate(code)
    assert len(sets.u) == 1
    assert cleaning_test(code, sets.kinds, "standard")
    assert round_trip(code, sets, 100, seed=2) == 100


def test_noncss_on_css_input():
    code = CSS_CODES["bell3d"]()
    sets = noncss_injection_sets(code)
    sets.validate(code)
    assert round_trip(code, sets, 20) == 20


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 7), st.data())
def test_random_noncss_codes(n, data):
    m = data.draw(st.integers(1, n))
    code = random_code(n, m, data.draw(st.integers(0, 10**6)))
    order = data.draw(st.permutations(list(range(n))))
    sets = noncss_injection_sets(code, order)
    sets.validate(code)
    assert round_trip(code, sets, 10) == 10


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.data())
def test_y_last_is_never_used(n, data):
    code = random_code(n, data.draw(st.integers(1, n)), data.draw(st.integers(0, 10**6)))
    assert noncss_injection_sets(code).s_y == []


@pytest.mark.parametrize("seed", range(5))
def test_y_first_round_trip(seed):
    code = random_code(6, 4, seed)
    sets = noncss_injection_sets(code, letters=("Y", "Z", "X"))
    sets.validate(code)
    assert sets.s_y and "Y" in unencoding_bases(sets).values()
    assert round_trip(code, sets, 100, seed) == 100


def test_five_qubit_y_first():
    code = five_qubit()
    sets = noncss_injection_sets(code, letters=("Y", "X", "Z"))
    sets.validate(code)
    assert len(sets.s_y) >= 1 and len(sets.u) == 1
    assert round_trip(code, sets, 100) == 100


def test_invalid_sets_rejected():
    code = CSS_CODES["toric33"]()
    bad = InjectionSets(code.n, list(range(code.n - 2)), [], [], [code.n - 2, code.n - 1])
    with pytest.raises(ValueError):
        bad.validate(code)
