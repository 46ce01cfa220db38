"""Turn decompositions back into circuits and check them.

Plain factors become CNOT-fanout phase gadgets. Toffoli and CS gadgets become
a single CCZ or CS gate conjugated by a CNOT circuit that routes the gadget's
parities onto wires 0, 1 (and 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from . import gf2
from .circuit import Circuit, Gate, GateKind, phase_gates
from .compiler import CompiledTarget
from .decomposition import Decomposition, GadgetKind, InvalidDecompositionError, is_cs_pattern, is_toffoli_pattern
from .phasepoly import (
    MultilinearPhase,
    PhasePolynomialXor,
    extract_xor_polynomial,
    multilinear_to_xor,
    phase_vector,
    to_multilinear,
)
from .tensor import SignatureTensor, from_multilinear

PHASE_CHECK_MAX_QUBITS = 10


class NotEquivalentError(ValueError):
    """The two phase polynomials differ by more than a diagonal Clifford."""


def cnot_synthesis(m: Sequence[int]) -> Circuit:
    """CNOT circuit with linear action ``x -> m x``, by Gaussian elimination."""
    n = len(m)
    if not gf2.is_invertible(m):
        raise gf2.SingularMatrixError("CNOT synthesis needs an invertible matrix")
    work = list(m)
    ops = []  # row ops "row t += row c", i.e. CNOT(c -> t)

    def add(c: int, t: int) -> None:
        work[t] ^= work[c]
        ops.append((c, t))

    for col in range(n):
        if not work[col] >> col & 1:
            r = next(r for r in range(col + 1, n) if work[r] >> col & 1)
            add(r, col)
        for r in range(n):
            if r != col and work[r] >> col & 1:
                add(col, r)
    # E_k ... E_1 m = I, so m = E_1 ... E_k: apply E_k first
    return Circuit(n, [Gate(GateKind.CNOT, op) for op in reversed(ops)])


def linear_action(c: Circuit) -> List[int]:
    """Matrix (rows as ints) of a CNOT-only circuit."""
    rows = gf2.identity(c.num_qubits)
    for g in c.gates:
        if g.kind != GateKind.CNOT:
            raise ValueError(f"{g!r} is not a CNOT")
        a, b = g.qubits
        rows[b] ^= rows[a]
    return rows


def synth_phase_gadget(u: int, weight: int, n: Optional[int] = None) -> Circuit:
    if u <= 0:
        raise InvalidDecompositionError("the zero factor has no phase gadget")
    n = n if n is not None else u.bit_length()
    support = list(gf2.bits(u))
    low, rest = support[0], support[1:]
    fan = [Gate(GateKind.CNOT, (q, low)) for q in rest]
    return Circuit(n, fan + phase_gates(low, weight) + fan[::-1])


def _routing(vectors: Sequence[int], n: int) -> Circuit:
    """CNOT circuit after which wire i carries the parity ``vectors[i] . x``."""
    rows = gf2.complete_basis(list(vectors), n)
    return cnot_synthesis(rows)


def synth_toffoli_gadget(factors: Sequence[int], n: int) -> Circuit:
    if n < 3:
        raise InvalidDecompositionError("a Toffoli gadget needs at least 3 qubits")
    if len(factors) != 7 or not gf2.independent(list(factors[:3])) or not is_toffoli_pattern(factors):
        raise InvalidDecompositionError("factors do not form a Toffoli gadget")
    c = _routing(factors[:3], n)
    return Circuit(n, c.gates + [Gate(GateKind.CCZ, (0, 1, 2))] + c.gates[::-1])


def synth_cs_gadget(factors: Sequence[int], n: int) -> Circuit:
    if n < 2:
        raise InvalidDecompositionError("a CS gadget needs at least 2 qubits")
    if len(factors) != 3 or not is_cs_pattern(factors):
        raise InvalidDecompositionError("factors do not form a CS gadget")
    c = _routing(factors[:2], n)
    return Circuit(n, c.gates + [Gate(GateKind.CS, (0, 1))] + c.gates[::-1])


def resynthesize(d: Decomposition) -> Circuit:
    """Diagonal circuit whose signature tensor is that of ``d``."""
    d.validate()
    n = d.n
    out = Circuit(n)
    starts = {g.start: g for g in d.gadgets}
    i = 0
    while i < len(d.factors):
        g = starts.get(i)
        if g is None:
            out.extend(synth_phase_gadget(d.factors[i], 1, n).gates)
            i += 1
            continue
        window = d.factors[g.start:g.stop]
        if g.kind == GadgetKind.TOFFOLI:
            out.extend(synth_toffoli_gadget(window, n).gates)
        else:
            out.extend(synth_cs_gadget(window, n).gates)
        i = g.stop
    return out


def tensor_of_circuit(c: Circuit) -> SignatureTensor:
    poly, _ = extract_xor_polynomial(c)
    return from_multilinear(to_multilinear(poly))


def clifford_correction(original: PhasePolynomialXor, new_circuit: Circuit) -> Circuit:
    """Diagonal Clifford gates that, appended to ``new_circuit``, reproduce
    the phase function of ``original`` exactly."""
    new_poly, masks = extract_xor_polynomial(new_circuit)
    n = original.num_vars
    if new_poly.num_vars != n:
        raise ValueError(f"dimension mismatch: {n} vs {new_poly.num_vars}")
    if masks != gf2.identity(n):
        raise ValueError("new circuit is not diagonal")
    p = to_multilinear(original)
    q = to_multilinear(new_poly)
    if p.mod2() != q.mod2():
        raise NotEquivalentError("phase polynomials differ modulo diagonal Cliffords")
    out = Circuit(n)
    for i in range(n):
        out.extend(phase_gates(i, p.a[i] - q.a[i]))
    for pair in sorted(set(p.b) | set(q.b)):
        if (p.b.get(pair, 0) - q.b.get(pair, 0)) % 4:
            out.append(GateKind.CZ, *pair)
    return out


def polynomial_of_tensor(t: SignatureTensor) -> PhasePolynomialXor:
    """A phase polynomial whose signature tensor is ``t`` (needs T_iij = T_ijj)."""
    entries = t.entries()
    a = tuple(t.entry(i, i, i) for i in range(t.n))
    b = {(i, k): 1 for i, j, k in entries if i == j < k}
    c = frozenset(e for e in entries if e[0] < e[1] < e[2])
    return multilinear_to_xor(MultilinearPhase(t.n, a, b, c))


@dataclass
class VerificationReport:
    tensor_equal: bool
    phase_equal: Optional[bool]
    gadgets_valid: bool
    cost: dict
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.tensor_equal and self.gadgets_valid and self.phase_equal is not False

    def to_dict(self) -> dict:
        out = {
            "tensor_equal": self.tensor_equal,
            "phase_equal": self.phase_equal,
            "gadgets_valid": self.gadgets_valid,
            "cost": self.cost,
        }
        if self.error:
            out["error"] = self.error
        return out


def verify(target: Union[CompiledTarget, SignatureTensor], d: Decomposition) -> VerificationReport:
    tensor = target.tensor if isinstance(target, CompiledTarget) else target
    if tensor.n != d.n:
        return VerificationReport(False, None, False, {}, f"dimension mismatch: {tensor.n} vs {d.n}")
    try:
        d.validate()
        gadgets_valid = True
        cost = d.cost().to_dict()
    except InvalidDecompositionError as exc:
        return VerificationReport(False, None, False, {}, str(exc))
    tensor_equal = d.tensor() == tensor
    phase_equal = None
    if d.n <= PHASE_CHECK_MAX_QUBITS:
        if isinstance(target, CompiledTarget):
            original, _ = extract_xor_polynomial(target.diagonal_circuit)
        elif tensor.is_waring_consistent():
            original = polynomial_of_tensor(tensor)
        else:
            original = None
        if original is None:
            phase_equal = False
        else:
            new = resynthesize(d)
            try:
                corr = clifford_correction(original, new)
            except NotEquivalentError:
                phase_equal = False
            else:
                fixed, _ = extract_xor_polynomial(Circuit(d.n, new.gates + corr.gates))
                phase_equal = bool(np.array_equal(phase_vector(fixed), phase_vector(original)))
    return VerificationReport(tensor_equal, phase_equal, gadgets_valid, cost)
