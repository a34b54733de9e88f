from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticecodes.code import StabilizerCode, logical_basis, num_logical
from latticecodes.complexes import css_from_complex, torus_complex
from latticecodes.distance import (
    DistanceBudgetExceeded,
    SearchProblem,
    brute_force_min_weight,
    expand_translates,
    logical_representatives_22,
    min_weight_logical,
    qubit_translations,
    subsystem_probe,
)
from latticecodes.gf2 import BitMatrix, rank, symplectic_gram
from latticecodes.lattice import hnf, l1_systole, search_min_det


def code_of(basis, q=1):
    c = torus_complex(basis)
    return c, css_from_complex(c, q)


def test_examples():
    c, code = code_of([[1, 0, 4], [0, 1, 5], [0, 0, 7]])
    assert min_weight_logical(code, "Z", 5).weight == 3
    _, code = code_of(2 * np.eye(2, dtype=int))
    assert min_weight_logical(code, "Z", 4).weight == 2
    rep = min_weight_logical(code, "Z", 1)
    assert rep.weight is None and rep.to_json()["result"] == "> 1"


def test_witnesses_are_logicals():
    c, code = code_of([[1, 0, 4], [0, 1, 5], [0, 0, 7]])
    lb = logical_basis(code)
    rep = min_weight_logical(code, "Z", 4)
    cx = code.cx.to_dense()
    xr = lb.x_rows.to_dense()[:, : code.n]
    for w, cls in zip(rep.witnesses, rep.logical_classes):
        assert not (cx[:, list(w)].sum(axis=1) % 2).any()
        assert tuple(xr[:, list(w)].sum(axis=1) % 2) == cls
        assert any(cls)


def small_codes():
    out = []
    for b in (
        2 * np.eye(2, dtype=int),
        3 * np.eye(2, dtype=int),
        [[1, 1], [0, 2]],
        [[1, 2], [0, 5]],
        [[2, 2], [0, 4]],
        [[1, 3], [0, 8]],
        [[1, 0, 1], [0, 1, 1], [0, 0, 2]],
        2 * np.eye(3, dtype=int),
        [[1, 0, 2], [0, 1, 3], [0, 0, 7]],
        [[2, 0, 1], [0, 1, 1], [0, 0, 4]],
    ):
        for q in (1, 2) if len(b) == 3 else (1,):
            c = torus_complex(b)
            code = css_from_complex(c, q)
            if code.n <= 24:
                out.append(code)
    return out


@pytest.mark.parametrize("code", small_codes(), ids=lambda c: f"n{c.n}")
@pytest.mark.parametrize("side", ["X", "Z"])
def test_matches_brute_force(code, side):
    expected = brute_force_min_weight(code, side, 4)
    got = min_weight_logical(code, side, 4).weight
    assert got == expected


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_matches_brute_force_random_css(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 13))
    cx = rng.integers(0, 2, size=(int(rng.integers(1, 4)), n))
    # Z checks from the kernel of cx keep the code valid
    from latticecodes.gf2 import kernel

    ker = kernel(cx).to_dense()
    pick = rng.integers(0, 2, size=(min(2, ker.shape[0]), ker.shape[0])) if ker.shape[0] else np.zeros((0, 0), int)
    cz = (pick @ ker) % 2 if ker.shape[0] else np.zeros((0, n), int)
    code = StabilizerCode.css(cx, cz)
    if num_logical(code) == 0:
        return
    for side in "XZ":
        assert min_weight_logical(code, side, 4).weight == brute_force_min_weight(code, side, 4)


@pytest.mark.parametrize("basis", [[[1, 0, 4], [0, 1, 5], [0, 0, 7]], [[2, 0, 1], [0, 1, 2], [0, 0, 5]], 3 * np.eye(3, dtype=int)])
def test_translation_trick_agrees(basis):
    c, code = code_of(basis)
    det = hnf(basis).det
    for side in "XZ":
        full = min_weight_logical(code, side, 6)
        tr = min_weight_logical(code, side, 6, True, det)
        assert full.weight == tr.weight
        assert sorted(full.witnesses) == expand_translates(tr.witnesses, qubit_translations(c, 1))


@pytest.mark.parametrize("s,slices", [(2, 1), (3, 1), (4, 1), (3, 2), (4, 2), (5, 2)])
def test_distance_equals_systole(s, slices):
    w = search_min_det(3, s, slices).witnesses[0]
    _, code = code_of(w)
    rep = min_weight_logical(code, "Z", s + 1, True, w.det)
    assert rep.weight == s == l1_systole(w)


def test_monotone_prefix():
    _, code = code_of([[1, 0, 4], [0, 1, 5], [0, 0, 7]])
    assert min_weight_logical(code, "Z", 2).weight is None
    a = min_weight_logical(code, "Z", 3)
    b = min_weight_logical(code, "Z", 4)
    assert a.weight == b.weight == 3 and a.witnesses == b.witnesses


def test_node_limit():
    _, code = code_of([[1, 0, 4], [0, 1, 5], [0, 0, 7]])
    with pytest.raises(DistanceBudgetExceeded):
        min_weight_logical(code, "X", 6, node_limit=10)


def test_logical_representatives_22():
    c = torus_complex([[1, 0, 0, 2], [0, 1, 0, 3], [0, 0, 1, 4], [0, 0, 0, 9]])
    code = css_from_complex(c, 2)
    reps = logical_representatives_22(c)
    assert reps.nrows == 6
    assert not symplectic_gram(code.checks, reps).any()
    assert rank(code.checks.vstack(reps)) - rank(code.checks) == 6
    with pytest.raises(ValueError):
        logical_representatives_22(torus_complex(2 * np.eye(4, dtype=int)))


def test_subsystem_probe_small():
    c, code = code_of(3 * np.eye(2, dtype=int))
    rep = subsystem_probe(code, 3, c, 1)
    # straight lines: both logical pairs anticommute, nothing survives
    assert rep.remaining_logicals == 0
    assert not rep.all_commute


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_family_bound_keeps_optimum(seed):
    # splitting the checks into families only sharpens pruning
    rng = np.random.default_rng(seed)
    rows, cols = int(rng.integers(3, 9)), int(rng.integers(4, 12))
    local = rng.integers(0, 2, size=(rows, cols))
    classes = rng.integers(0, 2, size=(2, cols))
    cost = rng.integers(1, 3, size=cols)
    groups = rng.integers(0, 3, size=rows)
    plain = SearchProblem(local, classes, cost).run(8, max_witnesses=1)
    split = SearchProblem(local, classes, cost, groups=groups).run(8, max_witnesses=1)
    assert plain[0] == split[0]
    assert split[4] <= plain[4]
