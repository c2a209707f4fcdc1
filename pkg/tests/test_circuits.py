"""Arithmetic circuit evaluation, expansion, identity testing, booleanization."""

from fractions import Fraction

import pytest

from monoforge.circuits import (
    ArithCircuit,
    BoolCircuit,
    CircuitBuilder,
    booleanize,
    eval_bool,
    eval_circuit,
    expand_circuit,
    random_identity_test,
)
from monoforge.errors import MissingVariable, NotMonotone, TermBudgetExceeded
from monoforge.poly import SparsePoly, poly_equal
from monoforge.seeding import stream_rng


def build_x1x2_plus_x3():
    b = CircuitBuilder()
    return b.build(b.add([b.mul([b.var(0), b.var(1)]), b.var(2)]))


def test_eval_examples():
    c = build_x1x2_plus_x3()
    assert eval_circuit(c, {0: 1, 1: 1, 2: 0}) == 1
    b = CircuitBuilder()
    s = b.add([b.var(0), b.var(1)])
    sq = b.build(b.mul([s, s]))
    assert eval_circuit(sq, {0: 1, 1: 1}) == 4


def test_eval_missing_variable():
    c = build_x1x2_plus_x3()
    with pytest.raises(MissingVariable):
        eval_circuit(c, {0: 1, 1: 1})


def test_expand_examples():
    b = CircuitBuilder()
    s = b.add([b.var(0), b.var(1)])
    sq = b.build(b.mul([s, s]))
    expect = (SparsePoly.variable(0) + SparsePoly.variable(1)) ** 2
    assert poly_equal(expand_circuit(sq), expect)

    b2 = CircuitBuilder()
    single = b2.build(b2.var(0))
    assert poly_equal(expand_circuit(single), SparsePoly.variable(0))

    b3 = CircuitBuilder()
    scaled = b3.build(b3.mul([b3.const(-2), b3.var(0)]))
    assert poly_equal(expand_circuit(scaled), -2 * SparsePoly.variable(0))


def test_expand_term_budget():
    b = CircuitBuilder()
    s = b.add([b.var(i) for i in range(8)])
    node = s
    for _ in range(3):
        node = b.mul([node, node])
    with pytest.raises(TermBudgetExceeded):
        expand_circuit(b.build(node), term_cap=10)


def test_expand_never_stores_zero_terms():
    rng = stream_rng(11, "expand-zero")
    for _ in range(40):
        b = CircuitBuilder()
        nodes = [b.var(i) for i in range(3)] + [b.const(rng.randint(-2, 2))]
        for _ in range(rng.randint(1, 5)):
            op = rng.choice(["add", "mul"])
            kids = [rng.choice(nodes) for _ in range(2)]
            nodes.append(b.add(kids) if op == "add" else b.mul(kids))
        p = expand_circuit(b.build(nodes[-1]))
        assert all(c != 0 for c in p.terms.values())


def test_eval_equals_expansion_on_random_points():
    rng = stream_rng(5, "eval-vs-expand")
    for _ in range(25):
        b = CircuitBuilder()
        nodes = [b.var(i) for i in range(4)] + [b.const(rng.randint(-3, 3))]
        for _ in range(rng.randint(2, 6)):
            kids = [rng.choice(nodes) for _ in range(rng.randint(2, 3))]
            nodes.append(b.add(kids) if rng.random() < 0.5 else b.mul(kids))
        c = b.build(nodes[-1])
        p = expand_circuit(c)
        for _ in range(4):
            pt = {v: Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for v in range(4)}
            assert eval_circuit(c, pt) == p.evaluate(pt)


def test_identity_test_agrees_and_finds_witness():
    c = build_x1x2_plus_x3()
    p = expand_circuit(c)
    assert random_identity_test(c, p, trials=20, seed=3).equal_whp
    wrong = SparsePoly.variable(0)
    verdict = random_identity_test(c, wrong, trials=20, seed=3)
    assert not verdict.equal_whp and verdict.witness is not None
    # witness actually separates the two sides
    assert eval_circuit(c, verdict.witness) != wrong.evaluate(verdict.witness)


def test_identity_test_never_rejects_identical():
    rng = stream_rng(17, "pit-sound")
    for trial in range(30):
        b = CircuitBuilder()
        nodes = [b.var(i) for i in range(3)]
        for _ in range(rng.randint(1, 4)):
            kids = [rng.choice(nodes) for _ in range(2)]
            nodes.append(b.add(kids) if rng.random() < 0.5 else b.mul(kids))
        c = b.build(nodes[-1])
        assert random_identity_test(c, expand_circuit(c), trials=5, seed=trial).equal_whp


def test_booleanize_examples():
    c = build_x1x2_plus_x3()
    bc = booleanize(c)
    assert eval_bool(bc, [1, 1, 0]) == 1
    assert eval_bool(bc, [0, 1, 0]) == 0
    b = CircuitBuilder()
    zero = b.build(b.const(0))
    assert eval_bool(booleanize(zero), []) == 0


def test_booleanize_rejects_negative_constants():
    b = CircuitBuilder()
    c = b.build(b.mul([b.const(-2), b.var(0)]))
    with pytest.raises(NotMonotone):
        booleanize(c)


def test_booleanize_matches_positivity_on_cube():
    rng = stream_rng(23, "bool-pos")
    for _ in range(30):
        nvars = rng.randint(2, 6)
        b = CircuitBuilder()
        nodes = [b.var(i) for i in range(nvars)] + [b.const(rng.randint(0, 3))]
        for _ in range(rng.randint(2, 6)):
            kids = [rng.choice(nodes) for _ in range(2)]
            nodes.append(b.add(kids) if rng.random() < 0.5 else b.mul(kids))
        c = b.build(nodes[-1])
        bc = booleanize(c)
        for mask in range(1 << nvars):
            bits = [(mask >> i) & 1 for i in range(nvars)]
            want = 1 if eval_circuit(c, dict(enumerate(bits))) > 0 else 0
            assert eval_bool(bc, bits) == want


def test_circuit_json_roundtrip():
    c = build_x1x2_plus_x3()
    c2 = ArithCircuit.from_json(c.to_json())
    assert poly_equal(expand_circuit(c), expand_circuit(c2))
    bc = booleanize(c)
    bc2 = BoolCircuit.from_json(bc.to_json())
    assert all(
        eval_bool(bc, [(m >> i) & 1 for i in range(3)])
        == eval_bool(bc2, [(m >> i) & 1 for i in range(3)])
        for m in range(8)
    )


def test_size_metrics():
    c = build_x1x2_plus_x3()
    assert c.gate_count() == 5
    assert c.wire_count() == 4
    assert c.depth() == 2
