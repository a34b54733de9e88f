from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticecodes.code import PauliOp
from latticecodes.tableau import Tableau, random_clifford_state, stabilizer_state

# dense statevector oracle ---------------------------------------------------

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
Y = np.array([[0, -1j], [1j, 0]])
H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
S = np.diag([1, 1j])


def op_on(n, q, m):
    mats = [I2] * n
    mats[q] = m
    out = np.array([[1.0 + 0j]])
    for a in mats:  # qubit 0 is the most significant factor
        out = np.kron(out, a)
    return out


def cnot_dense(n, c, t):
    p0 = op_on(n, c, np.diag([1, 0]))
    p1 = op_on(n, c, np.diag([0, 1]))
    return p0 + p1 @ op_on(n, t, X)


def pauli_dense(p: PauliOp):
    out = np.array([[1.0 + 0j]])
    for a, b in zip(p.x, p.z):
        out = np.kron(out, [I2, X, Z, Y][int(a) + 2 * int(b)])
    return out


def run_both(n, ops):
    t = Tableau(n)
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    for op in ops:
        if op[0] == "h":
            t.h(op[1])
            psi = op_on(n, op[1], H) @ psi
        elif op[0] == "s":
            t.s(op[1])
            psi = op_on(n, op[1], S) @ psi
        elif op[0] == "cnot":
            t.cnot(op[1], op[2])
            psi = cnot_dense(n, op[1], op[2]) @ psi
        else:
            t.cz(op[1], op[2])
            psi = op_on(n, op[2], H) @ cnot_dense(n, op[1], op[2]) @ op_on(n, op[2], H) @ psi
    return t, psi


circuits = st.integers(2, 4).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(
            st.one_of(
                st.tuples(st.sampled_from(["h", "s"]), st.integers(0, n - 1)),
                st.tuples(st.sampled_from(["cnot", "cz"]), st.integers(0, n - 1), st.integers(0, n - 1)).filter(
                    lambda g: g[1] != g[2]
                ),
            ),
            max_size=20,
        ),
    )
)


@settings(max_examples=60, deadline=None)
@given(circuits)
def test_peek_matches_statevector(case):
    n, ops = case
    t, psi = run_both(n, ops)
    t.check_invariants()
    for lab in itertools.product("IXYZ", repeat=n):
        p = PauliOp.from_string("".join(lab))
        ev = np.vdot(psi, pauli_dense(p) @ psi).real
        got = t.peek(p)
        if abs(ev) > 0.5:
            assert got == round(ev)
        else:
            assert got == 0


@settings(max_examples=40, deadline=None)
@given(circuits, st.integers(0, 2**31))
def test_measurement_collapses_like_statevector(case, seed):
    n, ops = case
    t, psi = run_both(n, ops)
    rng = np.random.default_rng(seed)
    p = PauliOp.from_string("".join(rng.choice(list("IXYZ"), size=n)))
    ev = np.vdot(psi, pauli_dense(p) @ psi).real
    out, det = t.measure(p, rng)
    assert det == (abs(ev) > 0.5)
    proj = (np.eye(2**n) + out * pauli_dense(p)) / 2
    post = proj @ psi
    assert np.linalg.norm(post) > 1e-9
    post /= np.linalg.norm(post)
    # the updated tableau describes the projected state
    for lab in itertools.product("IXZ", repeat=n):
        q = PauliOp.from_string("".join(lab))
        e = np.vdot(post, pauli_dense(q) @ post).real
        assert t.peek(q) == (round(e) if abs(e) > 0.5 else 0)
    t.check_invariants()


def test_basic_examples():
    t = Tableau.plus_state(3)
    assert t.measure(PauliOp.from_string("XII"))[0:2] == (1, True)
    rng = np.random.default_rng(1)
    a, det = t.measure(PauliOp.from_string("ZII"), rng)
    assert not det
    b, det2 = t.measure(PauliOp.from_string("ZII"), rng)
    assert det2 and a == b


def test_forced_and_stabilizer_state():
    gens = [(1, PauliOp.from_string("XX")), (-1, PauliOp.from_string("ZZ"))]
    t = stabilizer_state(2, gens)
    assert t.peek(PauliOp.from_string("XX")) == 1
    assert t.peek(PauliOp.from_string("ZZ")) == -1
    assert t.peek(PauliOp.from_string("YY")) == 1
    with pytest.raises(ValueError):
        stabilizer_state(2, gens + [(1, PauliOp.from_string("YY")), (-1, PauliOp.from_string("YY"))])


def test_apply_pauli_flips_signs():
    t = Tableau.plus_state(2)
    t.apply_pauli(PauliOp.from_string("ZI"))
    assert t.peek(PauliOp.from_string("XI")) == -1
    assert t.peek(PauliOp.from_string("IX")) == 1


def test_random_state_is_valid():
    t = random_clifford_state(6, np.random.default_rng(4))
    t.check_invariants()
