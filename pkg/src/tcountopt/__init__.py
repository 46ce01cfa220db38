"""T-count optimization of Clifford+T circuits via symmetric tensor decomposition."""

from .circuit import Circuit, Gate, GateKind, parse_qasm, rewrite_to_basis, to_qasm
from .compiler import CompiledTarget, compile_circuit
from .decomposition import Cost, Decomposition, Gadget, GadgetKind, game_cost
from .tensor import SignatureTensor, change_of_basis, from_decomposition, from_multilinear

__all__ = [
    "Circuit", "Gate", "GateKind", "parse_qasm", "rewrite_to_basis", "to_qasm",
    "CompiledTarget", "compile_circuit",
    "Cost", "Decomposition", "Gadget", "GadgetKind", "game_cost",
    "SignatureTensor", "change_of_basis", "from_decomposition", "from_multilinear",
]
