"""Compile Clifford+T circuits into signature tensors.

Pipeline: rewrite into {H, Z, S, T, CNOT}; split into alternating Clifford
blocks ``B_i`` and CNOT+phase blocks ``A_i``; optionally split into parts that
fit a qubit budget; replace internal Hadamards by ancilla gadgets; peel the
CNOT+T core ``W`` off the remaining Clifford shell and read its factor matrix.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .circuit import Circuit, Gate, GateKind, PHASE_WEIGHT, phase_gates, push_boundary_hadamards, rewrite_to_basis
from .gf2 import bits
from .tensor import SignatureTensor, from_decomposition

# Gates allowed by the block scan: the working set plus CZ (from gadgets)
# and the inverse phase gates.
_SCANNABLE = frozenset({
    GateKind.H, GateKind.Z, GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG,
    GateKind.CNOT, GateKind.CZ,
})


class CompileError(ValueError):
    pass


def _is_t_like(g: Gate) -> bool:
    return PHASE_WEIGHT.get(g.kind, 0) & 1 == 1


@dataclass
class BlockDecomposition:
    """Blocks ``[B_1, A_1, B_2, ..., A_{m-1}, B_m]``; always odd length."""

    num_qubits: int
    blocks: List[List[Gate]]

    def __post_init__(self):
        if len(self.blocks) % 2 != 1:
            raise ValueError("blocks must alternate B, A, ..., B")

    @property
    def cliffords(self) -> List[List[Gate]]:
        return self.blocks[0::2]

    @property
    def phase_blocks(self) -> List[List[Gate]]:
        return self.blocks[1::2]

    def gates(self) -> List[Gate]:
        return [g for b in self.blocks for g in b]

    def circuit(self) -> Circuit:
        return Circuit(self.num_qubits, self.gates())

    def internal_hadamards(self) -> int:
        inner = self.cliffords[1:-1]
        return sum(g.kind == GateKind.H for b in inner for g in b)

    def t_count(self) -> int:
        return sum(_is_t_like(g) for g in self.gates())


def block_partition(c: Circuit) -> BlockDecomposition:
    blocks: List[List[Gate]] = [[]]
    in_clifford = True
    for g in c.gates:
        if g.kind not in _SCANNABLE:
            raise CompileError(f"gate {g!r} is outside the working gate set")
        if in_clifford and _is_t_like(g):
            blocks.append([])
            in_clifford = False
        elif not in_clifford and g.kind == GateKind.H:
            blocks.append([])
            in_clifford = True
        blocks[-1].append(g)
    if not in_clifford:
        blocks.append([])
    return BlockDecomposition(c.num_qubits, blocks)


# -- Hadamard gadgets ----------------------------------------------------------


@dataclass
class Gadgetized:
    circuit: Circuit
    ancilla_count: int
    # wire holding each input qubit at the end
    output_wire: List[int]
    # wires that end in an X-basis measurement assumed to return 0
    measured: List[int]


def hadamard_gadgetize(bd: BlockDecomposition) -> Gadgetized:
    """Replace every internal H on qubit q by a fresh ancilla a with H(a),
    CZ(q, a), and continue the computation on a."""
    n = bd.num_qubits
    wire = list(range(n))
    gates: List[Gate] = []
    measured: List[int] = []
    last = len(bd.blocks) - 1
    next_wire = n
    for bi, block in enumerate(bd.blocks):
        internal = bi % 2 == 0 and 0 < bi < last
        for g in block:
            if internal and g.kind == GateKind.H:
                q = g.qubits[0]
                a = next_wire
                next_wire += 1
                gates.append(Gate(GateKind.H, (a,)))
                gates.append(Gate(GateKind.CZ, (wire[q], a)))
                measured.append(wire[q])
                wire[q] = a
            else:
                gates.append(Gate(g.kind, tuple(wire[q] for q in g.qubits)))
    out = push_boundary_hadamards(Circuit(next_wire, gates))
    return Gadgetized(out, next_wire - n, wire, measured)


# -- diagonal core extraction --------------------------------------------------


@dataclass
class CompiledTarget:
    tensor: SignatureTensor
    factor_matrix: List[int]          # columns, one per T gate of W
    diagonal_circuit: Circuit         # W: CNOT and T gates only, diagonal overall
    clifford_prefix: Circuit
    clifford_suffix: Circuit
    ancilla_count: int = 0
    source_range: Tuple[int, int] = (0, 0)
    qubit_map: List[int] = field(default_factory=list)
    output_wire: List[int] = field(default_factory=list)
    measured: List[int] = field(default_factory=list)
    source: Optional[Circuit] = None

    @property
    def n(self) -> int:
        return self.tensor.n

    @property
    def initial_r(self) -> int:
        return len(self.factor_matrix)

    def stitched(self) -> Circuit:
        """clifford_prefix, then W, then clifford_suffix."""
        return Circuit(
            self.n,
            self.clifford_prefix.gates + self.diagonal_circuit.gates + self.clifford_suffix.gates,
        )


def factor_columns_by_scan(w: Circuit) -> List[int]:
    """Factor matrix columns of a CNOT+T circuit, one per T gate.

    Each T starts as the unit vector of its wire; CNOTs are then folded in
    from right to left, with CNOT(a -> b) adding row b into row a for every
    column to its right.
    """
    cols: List[int] = []
    col_pos: List[int] = []
    for pos, g in enumerate(w.gates):
        if _is_t_like(g):
            cols.append(1 << g.qubits[0])
            col_pos.append(pos)
    for pos in range(len(w.gates) - 1, -1, -1):
        g = w.gates[pos]
        if g.kind != GateKind.CNOT:
            continue
        a, b = g.qubits
        for i in range(len(cols)):
            if col_pos[i] > pos and cols[i] >> b & 1:
                cols[i] ^= 1 << a
    return cols


def diagonalize_and_extract(c: Circuit) -> CompiledTarget:
    bd = block_partition(c)
    if bd.internal_hadamards():
        raise CompileError("circuit still has internal Hadamard gates")
    n = c.num_qubits
    if len(bd.blocks) == 1:
        return CompiledTarget(SignatureTensor.zero(n), [], Circuit(n), bd.circuit(), Circuit(n))
    prefix = Circuit(n, list(bd.blocks[0]))
    middle = [g for b in bd.blocks[1:-1] for g in b]
    suffix_tail = list(bd.blocks[-1])

    # U2 = (even part, CNOTs kept) . (odd part, CNOTs kept, then undone)
    odd: List[Gate] = []
    even: List[Gate] = []
    cnots: List[Gate] = []
    for g in middle:
        if g.kind == GateKind.CNOT:
            odd.append(g)
            even.append(g)
            cnots.append(g)
        elif g.kind in PHASE_WEIGHT:
            w = PHASE_WEIGHT[g.kind]
            if w & 1:
                odd.append(Gate(GateKind.T, g.qubits))
            even.extend(phase_gates(g.qubits[0], w - (w & 1)))
        elif g.kind == GateKind.CZ:
            even.append(g)
        else:  # pragma: no cover - block_partition guarantees this
            raise CompileError(f"unexpected {g!r} in a phase block")
    w_circ = Circuit(n, odd + cnots[::-1])
    cols = factor_columns_by_scan(w_circ)
    tensor = from_decomposition(cols, n)
    return CompiledTarget(
        tensor=tensor,
        factor_matrix=cols,
        diagonal_circuit=w_circ,
        clifford_prefix=prefix,
        clifford_suffix=Circuit(n, even + suffix_tail),
    )


def factor_columns_by_polynomial(w: Circuit) -> List[int]:
    """Independent route: parity masks of the T gates from forward tracking."""
    n = w.num_qubits
    masks = [1 << q for q in range(n)]
    out = []
    for g in w.gates:
        if g.kind == GateKind.CNOT:
            masks[g.qubits[1]] ^= masks[g.qubits[0]]
        elif _is_t_like(g):
            out.append(masks[g.qubits[0]])
    return out


# -- splitting -----------------------------------------------------------------


def _support_mask(gates: Sequence[Gate]) -> int:
    m = 0
    for g in gates:
        for q in g.qubits:
            m |= 1 << q
    return m


def requirement(bd: BlockDecomposition) -> int:
    """Qubits needed after gadgetization: used qubits plus internal H count."""
    return _support_mask(bd.gates()).bit_count() + bd.internal_hadamards()


def split_blocks(
    bd: BlockDecomposition, threshold: float, trials: int = 1000, seed=0
) -> List[BlockDecomposition]:
    """Random-greedy merge of consecutive phase blocks into parts that fit."""
    k = len(bd.phase_blocks)
    if k <= 1:
        if k == 1 and requirement(bd) > threshold:
            raise CompileError(f"a single phase block needs more than {threshold} qubits")
        return [bd]
    a_mask = [_support_mask(b) for b in bd.phase_blocks]
    b_mask = [_support_mask(b) for b in bd.cliffords]
    b_h = [sum(g.kind == GateKind.H for g in b) for b in bd.cliffords]
    for i, m in enumerate(a_mask):
        if m.bit_count() > threshold:
            raise CompileError(f"phase block {i} alone needs more than {threshold} qubits")

    def fits(i: int, j: int) -> bool:
        # phase blocks i..j with the Clifford blocks strictly between them
        m = 0
        h = 0
        for x in range(i, j + 1):
            m |= a_mask[x]
            if x > i:
                m |= b_mask[x]
                h += b_h[x]
        return m.bit_count() + h <= threshold

    if fits(0, k - 1):
        return [bd]
    rng = random.Random(seed)
    best: Optional[List[Tuple[int, int]]] = None
    for _ in range(max(1, trials)):
        parts = [(i, i) for i in range(k)]
        while True:
            options = [p for p in range(len(parts) - 1) if fits(parts[p][0], parts[p + 1][1])]
            if not options:
                break
            p = rng.choice(options)
            parts[p:p + 2] = [(parts[p][0], parts[p + 1][1])]
        if best is None or len(parts) < len(best):
            best = parts
    assert best is not None
    out = []
    for idx, (i, j) in enumerate(best):
        blocks = bd.blocks[2 * i:2 * j + 2]
        blocks = blocks + ([list(bd.blocks[-1])] if idx == len(best) - 1 else [[]])
        out.append(BlockDecomposition(bd.num_qubits, [list(b) for b in blocks]))
    return out


# -- full pipeline -------------------------------------------------------------


def _compact(bd: BlockDecomposition) -> Tuple[BlockDecomposition, List[int]]:
    support = list(bits(_support_mask(bd.gates())))
    index = {q: i for i, q in enumerate(support)}
    blocks = [[Gate(g.kind, tuple(index[q] for q in g.qubits)) for g in b] for b in bd.blocks]
    return BlockDecomposition(len(support), blocks), support


def compile_part(bd: BlockDecomposition, source_range: Tuple[int, int] = (0, 0)) -> CompiledTarget:
    local, qmap = _compact(bd)
    gz = hadamard_gadgetize(local)
    target = diagonalize_and_extract(gz.circuit)
    target.ancilla_count = gz.ancilla_count
    target.source_range = source_range
    target.qubit_map = qmap
    target.output_wire = gz.output_wire
    target.measured = gz.measured
    target.source = local.circuit()
    return target


def compile_circuit(
    c: Circuit, threshold: float = 60, trials: int = 1000, seed=0, peephole: bool = True
) -> List[CompiledTarget]:
    rewritten = rewrite_to_basis(c, peephole=peephole)
    bd = block_partition(rewritten)
    if bd.t_count() == 0:
        return []
    parts = [bd] if requirement(bd) <= threshold else split_blocks(bd, threshold, trials, seed)
    out = []
    first = 0
    for part in parts:
        k = len(part.phase_blocks)
        if part.t_count():
            out.append(compile_part(part, (first, first + k)))
        first += k
    return out


compile = compile_circuit  # noqa: A001


def postselected_action(target: CompiledTarget) -> np.ndarray:
    """Linear map on the part's input qubits realised by prefix, W and suffix
    with ancillas prepared in |0> and gadget wires projected onto |+>."""
    from .simulate import unitary

    if target.source is None:
        raise CompileError("target has no source circuit attached")
    n_in = target.source.num_qubits
    total = target.n
    # inputs: ancillas (wires >= n_in) start in |0>
    u = unitary(target.stitched(), 1 << n_in)
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    out = np.zeros((1 << n_in, 1 << n_in), dtype=complex)
    keep = target.output_wire
    meas = target.measured
    for y in range(1 << total):
        amp_weight = 1.0
        for w in meas:
            amp_weight *= plus[y >> w & 1]
        if not amp_weight:
            continue
        row = 0
        for i, w in enumerate(keep):
            row |= (y >> w & 1) << i
        out[row] += amp_weight * u[y]
    return out
