import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topodec.pauli import (
    CLASS_TABLE, LogicalClass, PauliOperator, StabilizerGroup, batch_logical_class, batch_syndrome,
    class_operator, commutes, logical_class, multiply, product, syndrome,
)


def paulis(n):
    return st.text(alphabet="IXYZ", min_size=n, max_size=n).map(PauliOperator.from_string)


pair_n = st.integers(1, 10).flatmap(lambda n: st.tuples(paulis(n), paulis(n), paulis(n)))


def test_string_roundtrip():
    op = PauliOperator.from_string("IXYZ")
    assert str(op) == "IXYZ"
    assert op.x_bits.tolist() == [0, 1, 1, 0]
    assert op.z_bits.tolist() == [0, 0, 1, 1]
    assert op.weight == 3
    assert op.support == [1, 2, 3]


def test_invalid_inputs():
    with pytest.raises(ValueError):
        PauliOperator.from_string("XQ")
    with pytest.raises(ValueError):
        multiply(PauliOperator.from_string("X"), PauliOperator.from_string("XX"))
    with pytest.raises(ValueError):
        PauliOperator.from_bits([1, 0], [1])


def test_single_qubit_products():
    X, Y, Z = (PauliOperator.from_string(c) for c in "XYZ")
    assert multiply(X, Z) == Y
    assert multiply(Y, Y).is_identity()
    assert not commutes(X, Z)
    assert commutes(PauliOperator.from_string("XX"), PauliOperator.from_string("ZZ"))


@given(pair_n)
@settings(max_examples=200)
def test_group_laws(ops):
    a, b, c = ops
    assert multiply(a, b) == multiply(b, a)  # phase-free
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))
    assert multiply(a, a).is_identity()
    assert product([a, b, c], a.n) == a * b * c


@given(pair_n)
@settings(max_examples=200)
def test_commutation_is_bilinear(ops):
    a, b, c = ops
    assert commutes(a, b) == commutes(b, a)
    assert commutes(a, multiply(b, c)) == (commutes(a, b) == commutes(a, c))


@given(pair_n)
@settings(max_examples=100)
def test_commutation_matches_qubitwise_count(ops):
    a, b, _ = ops
    anti = sum(1 for i in range(a.n) if a[i] != "I" and b[i] != "I" and a[i] != b[i])
    assert commutes(a, b) == (anti % 2 == 0)


def steane():
    faces = [(0, 1, 2, 3), (1, 2, 4, 5), (2, 3, 5, 6)]
    gens = [PauliOperator.on(7, {q: "X" for q in f}) for f in faces]
    gens += [PauliOperator.on(7, {q: "Z" for q in f}) for f in faces]
    return StabilizerGroup(gens)


def test_stabilizer_group_checks():
    g = steane()
    assert g.pairwise_commuting()
    assert g.is_independent()
    assert g.contains(g[0] * g[1])
    assert not g.contains(PauliOperator.from_string("XXXXXXX"))


@given(paulis(7))
@settings(max_examples=100)
def test_batch_syndrome_matches_single(op):
    g = steane()
    assert batch_syndrome(op.to_vector()[None], g)[0].tolist() == syndrome(op, g).tolist()


def test_logical_classes():
    g = steane()
    lx = PauliOperator.from_string("XXXXXXX")
    lz = PauliOperator.from_string("ZZZZZZZ")
    for cls in LogicalClass:
        op = class_operator(cls, lx, lz)
        assert logical_class(op, lx, lz, g) == cls
    assert LogicalClass.X * LogicalClass.Z == LogicalClass.Y
    assert LogicalClass.Y * LogicalClass.Y == LogicalClass.I
    with pytest.raises(ValueError):
        logical_class(PauliOperator.from_string("XIIIIII"), lx, lz, g)
    vecs = np.stack([class_operator(c, lx, lz).to_vector() for c in LogicalClass])
    assert batch_logical_class(vecs, lx, lz).tolist() == [0, 1, 2, 3]
    assert sorted(CLASS_TABLE.ravel().tolist()) == [0, 1, 2, 3]


@given(st.sampled_from(list(LogicalClass)), st.sampled_from(list(LogicalClass)))
def test_class_product_closure(a, b):
    assert isinstance(a * b, LogicalClass)
    assert (a * b) * b == a
