from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from tcountopt.circuit import ARITY, Circuit, Gate, GateKind, rewrite_to_basis
from tcountopt.compiler import (
    BlockDecomposition, CompileError, block_partition, compile_circuit, diagonalize_and_extract,
    factor_columns_by_polynomial, factor_columns_by_scan, hadamard_gadgetize, postselected_action, requirement,
    split_blocks,
)
from tcountopt.phasepoly import extract_xor_polynomial, to_multilinear
from tcountopt.simulate import equal_up_to_global_phase, unitary
from tcountopt.tensor import SignatureTensor, from_multilinear
from conftest import load


def G(kind, *qs):
    return Gate(GateKind(kind), qs)


def test_block_partition_example():
    c = Circuit(2, [G("H", 0), G("T", 0), G("CNOT", 0, 1), G("H", 1), G("T", 1)])
    bd = block_partition(c)
    assert bd.blocks == [[G("H", 0)], [G("T", 0), G("CNOT", 0, 1)], [G("H", 1)], [G("T", 1)], []]


def test_block_partition_trivial_cases():
    c = Circuit(2, [G("H", 0), G("CNOT", 0, 1), G("S", 1)])
    assert block_partition(c).blocks == [c.gates]
    assert block_partition(Circuit(2)).blocks == [[]]
    with pytest.raises(CompileError):
        block_partition(Circuit(3, [G("CCX", 0, 1, 2)]))


def test_gadgetize_without_internal_h_is_identity():
    c = Circuit(2, [G("H", 0), G("T", 0), G("CNOT", 0, 1), G("T", 1), G("H", 1)])
    gz = hadamard_gadgetize(block_partition(c))
    assert gz.ancilla_count == 0 and gz.circuit.gates == c.gates


@pytest.mark.parametrize("name, qubits", [("gf2_2_mult", 6), ("gf2_3_mult", 9)])
def test_corpus_needs_no_hadamard_ancillas(name, qubits):
    bd = block_partition(rewrite_to_basis(load(name)))
    gz = hadamard_gadgetize(bd)
    assert gz.ancilla_count == 0
    assert gz.circuit.num_qubits == qubits


def test_internal_h_becomes_an_ancilla():
    c = Circuit(1, [G("T", 0), G("H", 0), G("T", 0)])
    gz = hadamard_gadgetize(block_partition(c))
    assert gz.ancilla_count == 1
    assert gz.output_wire == [1] and gz.measured == [0]


def test_extract_small_w():
    w = Circuit(2, [G("T", 0), G("CNOT", 0, 1), G("T", 1)])
    t = diagonalize_and_extract(w)
    assert sorted(t.factor_matrix) == [0b01, 0b11]
    poly, _ = extract_xor_polynomial(t.diagonal_circuit)
    oracle = from_multilinear(to_multilinear(poly))
    assert t.tensor == oracle
    assert t.tensor.entries() == [(0, 0, 1), (0, 1, 1), (1, 1, 1)]


def test_extract_without_t_gates():
    t = diagonalize_and_extract(Circuit(2, [G("CNOT", 0, 1)]))
    assert t.factor_matrix == [] and t.tensor.is_zero()


def test_ccx_compiles_to_the_ccz_tensor(ccz_tensor):
    (t,) = compile_circuit(Circuit(3, [G("CCX", 0, 1, 2)]))
    assert t.initial_r == 7
    assert t.tensor == ccz_tensor
    assert postselected_action(t).shape == (8, 8)
    assert equal_up_to_global_phase(postselected_action(t), unitary(Circuit(3, [G("CCX", 0, 1, 2)])))


def test_extract_rejects_internal_hadamards():
    with pytest.raises(CompileError):
        diagonalize_and_extract(Circuit(1, [G("T", 0), G("H", 0), G("T", 0)]))


def _two_wide_blocks(width=35):
    a1 = [G("T", q) for q in range(width)]
    a2 = [G("T", q) for q in range(width, 2 * width)]
    blocks = [[], a1, [G("H", 0), G("H", width)], a2, []]
    return BlockDecomposition(2 * width, blocks)


def test_split_blocks():
    bd = _two_wide_blocks()
    assert requirement(bd) == 72
    parts = split_blocks(bd, 60, trials=10)
    assert len(parts) == 2
    assert len(split_blocks(bd, float("inf"))) == 1
    small = block_partition(Circuit(2, [G("T", 0), G("H", 0), G("T", 1)]))
    assert len(split_blocks(small, 60)) == 1
    with pytest.raises(CompileError):
        split_blocks(block_partition(Circuit(3, [G("T", 0), G("T", 1), G("T", 2)])), 2)


@pytest.mark.parametrize("name, n, r", [("gf2_2_mult", 6, 28), ("gf2_3_mult", 9, 63)])
def test_corpus_compiles(name, n, r):
    (t,) = compile_circuit(load(name))
    assert (t.n, t.initial_r, t.ancilla_count) == (n, r, 0)
    assert sorted(t.factor_matrix) == sorted(factor_columns_by_polynomial(t.diagonal_circuit))


def test_empty_circuit_compiles_to_nothing():
    assert compile_circuit(Circuit(3)) == []


def test_split_parts_reassemble_the_circuit():
    c = Circuit(3, [G("T", 0), G("H", 0), G("T", 0), G("CNOT", 0, 1), G("T", 1), G("H", 1), G("T", 2), G("T", 1)])
    parts = compile_circuit(c, threshold=3)
    assert len(parts) > 1
    whole = Circuit(3)
    for t in parts:
        assert equal_up_to_global_phase(postselected_action(t), unitary(t.source))
        whole.extend(Gate(g.kind, tuple(t.qubit_map[q] for q in g.qubits)) for g in t.source)
    assert equal_up_to_global_phase(unitary(whole), unitary(c))


# -- property suites ---------------------------------------------------------------

KINDS = ["H", "T", "Tdg", "S", "Z", "X", "CNOT", "CZ", "CS", "CCX", "CCZ"]


@st.composite
def circuits(draw):
    n = draw(st.integers(1, 4))
    gates = [G("T", q) for q in range(n)]
    for _ in range(draw(st.integers(0, 10))):
        kind = draw(st.sampled_from(KINDS))
        if ARITY[GateKind(kind)] > n:
            continue
        qs = draw(st.permutations(range(n)))[: ARITY[GateKind(kind)]]
        gates.append(G(kind, *qs))
    return Circuit(n, gates)


@settings(max_examples=1000, deadline=None, derandomize=True, suppress_health_check=[HealthCheck.filter_too_much])
@given(circuits())
def test_compiler_end_to_end_state_vector(c):
    bd = block_partition(rewrite_to_basis(c))
    assume(requirement(bd) <= 10)
    targets = compile_circuit(c)
    if not targets:
        return
    (t,) = targets
    assert t.n <= 10
    assert equal_up_to_global_phase(postselected_action(t), unitary(t.source))
    # the part acts on the qubits in qubit_map; idle qubits may have cancelled
    embedded = Circuit(c.num_qubits, [Gate(g.kind, tuple(t.qubit_map[q] for q in g.qubits)) for g in t.source])
    assert equal_up_to_global_phase(unitary(embedded), unitary(c))
    # the two factor routes agree
    assert factor_columns_by_scan(t.diagonal_circuit) == factor_columns_by_polynomial(t.diagonal_circuit)
    # the diagonal core is diagonal
    poly, masks = extract_xor_polynomial(t.diagonal_circuit)
    assert masks == [1 << q for q in range(t.n)]
    assert t.tensor == from_multilinear(to_multilinear(poly))
