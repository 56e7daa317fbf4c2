import math

import numpy as np
import pytest

from zxfault import samples
from zxfault.diagram import ZxDiagram, compose
from zxfault.oracle import (OracleBudgetError, OutcomeMap, equal_up_to_scalar,
                            evaluate, is_total)


def up_to_scalar(a, b, tol=1e-9):
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return False
    na, nb = np.max(np.abs(a)), np.max(np.abs(b))
    if na < tol or nb < tol:
        return na < tol and nb < tol
    a, b = a / na, b / nb
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    return np.allclose(a * (b[idx] / a[idx]), b, atol=tol)


def test_green_state_is_plus():
    t = evaluate(samples.z_state())
    assert up_to_scalar(t[()], [[1, 1]])


def test_red_pi_is_not_gate():
    t = evaluate(samples.pauli_spider_on_wire("X", 2))
    assert up_to_scalar(t[()], [[0, 1], [1, 0]])


def test_green_pi_is_z_gate():
    t = evaluate(samples.pauli_spider_on_wire("Z", 2))
    assert up_to_scalar(t[()], [[1, 0], [0, -1]])


def test_green_s_gate():
    t = evaluate(samples.pauli_spider_on_wire("Z", 1))
    assert up_to_scalar(t[()], [[1, 0], [0, 1j]])


def test_hadamard_wire():
    t = evaluate(samples.wire(had=True))
    assert up_to_scalar(t[()], np.array([[1, 1], [1, -1]]))


def test_red_state_is_zero_ket():
    t = evaluate(samples.x_state())
    assert up_to_scalar(t[()], [[1, 0]])
    t = evaluate(samples.x_state(2))
    assert up_to_scalar(t[()], [[0, 1]])


def test_zz_measurement_projectors():
    d = samples.zz_measurement("k")
    t = evaluate(d)
    zz = np.diag([1, -1, -1, 1]).astype(complex)
    # tensor convention: t[a, b] = <b| D |a>, so the matrix is the transpose
    assert up_to_scalar(t[(0,)].T, (np.eye(4) + zz) / 2)
    assert up_to_scalar(t[(1,)].T, (np.eye(4) - zz) / 2)
    # both branches carry the SAME scalar
    assert up_to_scalar(np.stack([t[(0,)], t[(1,)]]),
                        np.stack([(np.eye(4) + zz) / 2, (np.eye(4) - zz) / 2]))


def test_cnot_diagram():
    d = ZxDiagram()
    c = d.add_spider("Z")
    x = d.add_spider("X")
    d.add_edge(("b", "in", 0), ("s", c))
    d.add_edge(("s", c), ("b", "out", 0))
    d.add_edge(("b", "in", 1), ("s", x))
    d.add_edge(("s", x), ("b", "out", 1))
    d.add_edge(("s", c), ("s", x))
    t = evaluate(d)
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    assert up_to_scalar(t[()].T, cnot)


def test_compose_is_matrix_product():
    s = samples.pauli_spider_on_wire("Z", 1)
    h = samples.wire(had=True)
    sh = compose(s, h)  # apply S then H
    t = evaluate(sh)[()].T
    hs = (evaluate(h)[()].T) @ (evaluate(s)[()].T)
    assert up_to_scalar(t, hs)


def test_equal_up_to_scalar_scalar_freedom():
    t1 = evaluate(samples.zz_measurement("k"))
    t2 = evaluate(samples.zz_measurement("k"))
    t2.array = 2j * t2.array
    assert equal_up_to_scalar(t1, t2)


def test_equal_never_confuses_zero_and_nonzero():
    t1 = evaluate(samples.wire())
    t2 = evaluate(samples.wire())
    t2.array = 0 * t2.array
    assert not equal_up_to_scalar(t1, t2)
    assert not equal_up_to_scalar(t2, t1)
    assert equal_up_to_scalar(t2, t2)


def test_two_zz_equals_single_zz_under_correspondence():
    double = samples.two_zz_measurements()
    single = samples.zz_measurement("k")
    t2 = evaluate(double)
    t1 = evaluate(single)
    corr = OutcomeMap.parse(["k1", "k2"], ["k"], {"k": "k1"})
    assert equal_up_to_scalar(t1, t2, corr)
    # the wrong correspondence (constant) must fail
    bad = OutcomeMap.parse(["k1", "k2"], ["k"], {"k": "0"})
    assert not equal_up_to_scalar(t1, t2, bad)


def test_totality():
    assert is_total(samples.two_zz_measurements())
    d = samples.two_zz_measurements()
    d.constraints = [(frozenset(["k1"]), 0), (frozenset(["k2"]), 0)]
    assert not is_total(d)
    assert is_total(samples.wire())


def test_budget_error():
    d = ZxDiagram()
    s = d.add_spider("Z")
    for q in range(12):
        d.add_edge(("s", s), ("b", "out", q))
    with pytest.raises(OracleBudgetError):
        evaluate(d, budget=2**8)


def test_spider_fusion_axiom():
    # two connected same-colour spiders fuse: phases add
    d = ZxDiagram()
    a = d.add_spider("Z", 1)
    b = d.add_spider("Z", 1)
    d.add_edge(("b", "in", 0), ("s", a))
    d.add_edge(("s", a), ("s", b))
    d.add_edge(("s", b), ("b", "out", 0))
    fused = samples.pauli_spider_on_wire("Z", 2)
    assert equal_up_to_scalar(evaluate(fused), evaluate(d))


def test_colour_change_axiom():
    # X spider = Z spider conjugated by hadamard edges on all legs
    d1 = samples.pauli_spider_on_wire("X", 1)
    d2 = ZxDiagram()
    s = d2.add_spider("Z", 1)
    d2.add_edge(("b", "in", 0), ("s", s), had=True)
    d2.add_edge(("s", s), ("b", "out", 0), had=True)
    assert equal_up_to_scalar(evaluate(d1), evaluate(d2))


def test_pi_copy_axiom():
    # X pi through a green spider copies onto the other legs and flips phase sign
    d1 = ZxDiagram()
    g = d1.add_spider("Z", 1)
    p = d1.add_spider("X", 2)
    d1.add_edge(("b", "in", 0), ("s", p))
    d1.add_edge(("s", p), ("s", g))
    d1.add_edge(("s", g), ("b", "out", 0))
    d1.add_edge(("s", g), ("b", "out", 1))

    d2 = ZxDiagram()
    g = d2.add_spider("Z", 3)
    p1 = d2.add_spider("X", 2)
    p2 = d2.add_spider("X", 2)
    d2.add_edge(("b", "in", 0), ("s", g))
    d2.add_edge(("s", g), ("s", p1))
    d2.add_edge(("s", p1), ("b", "out", 0))
    d2.add_edge(("s", g), ("s", p2))
    d2.add_edge(("s", p2), ("b", "out", 1))
    assert equal_up_to_scalar(evaluate(d1), evaluate(d2))


def test_hopf_and_bialgebra_scalars_do_not_matter():
    # two spiders joined by two parallel edges = joined by none (Hopf), up to scalar
    d1 = ZxDiagram()
    a = d1.add_spider("Z")
    b = d1.add_spider("X")
    d1.add_edge(("b", "in", 0), ("s", a))
    d1.add_edge(("s", a), ("s", b))
    d1.add_edge(("s", a), ("s", b))
    d1.add_edge(("s", b), ("b", "out", 0))

    d2 = ZxDiagram()
    a = d2.add_spider("Z")
    b = d2.add_spider("X")
    d2.add_edge(("b", "in", 0), ("s", a))
    d2.add_edge(("s", b), ("b", "out", 0))
    assert equal_up_to_scalar(evaluate(d1), evaluate(d2))


def test_evaluate_deterministic():
    d = samples.two_zz_measurements()
    t1, t2 = evaluate(d), evaluate(d)
    assert np.array_equal(t1.array, t2.array)
