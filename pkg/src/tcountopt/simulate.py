"""Dense state-vector simulation for small circuits.

Basis index bit ``q`` is the value of qubit ``q``. Intended for checking
equivalences on at most ~16 qubits.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .circuit import Circuit, Gate, GateKind, PHASE_WEIGHT

MAX_QUBITS = 20

_OMEGA = np.exp(1j * np.pi / 4)


def apply_gate(state: np.ndarray, g: Gate, n: int) -> np.ndarray:
    """Apply ``g`` to a state vector, or to each column of a matrix of states."""
    idx = np.arange(1 << n)
    bit = [(idx >> q) & 1 for q in g.qubits]
    k = g.kind

    def diag(values):
        return state * (values[:, None] if state.ndim == 2 else values)

    if k in PHASE_WEIGHT:
        return diag(np.where(bit[0] == 1, _OMEGA ** PHASE_WEIGHT[k], 1.0))
    if k == GateKind.CZ:
        return diag(np.where(bit[0] & bit[1], -1.0, 1.0))
    if k == GateKind.CS:
        return diag(np.where(bit[0] & bit[1], 1j, 1.0))
    if k == GateKind.CCZ:
        return diag(np.where(bit[0] & bit[1] & bit[2], -1.0, 1.0))
    if k == GateKind.X:
        return state[idx ^ (1 << g.qubits[0])]
    if k == GateKind.CNOT:
        c, t = g.qubits
        return state[idx ^ (((idx >> c) & 1) << t)]
    if k == GateKind.CCX:
        a, b, t = g.qubits
        return state[idx ^ ((((idx >> a) & (idx >> b)) & 1) << t)]
    if k == GateKind.H:
        q = g.qubits[0]
        partner = state[idx ^ (1 << q)]
        return (partner + diag(np.where(bit[0] == 1, -1.0, 1.0))) / np.sqrt(2)
    raise ValueError(f"cannot simulate {k}")  # pragma: no cover


def run(c: Circuit, state: np.ndarray) -> np.ndarray:
    n = c.num_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits is too many to simulate")
    out = np.asarray(state, dtype=complex)
    for g in c.gates:
        out = apply_gate(out, g, n)
    return out


def unitary(c: Circuit, columns: Optional[int] = None) -> np.ndarray:
    """Column ``x`` is the image of basis state ``|x>``; only the first
    ``columns`` columns are computed when given."""
    dim = 1 << c.num_qubits
    return run(c, np.eye(dim, columns or dim, dtype=complex))


def equal_up_to_global_phase(u: np.ndarray, v: np.ndarray, atol: float = 1e-9) -> bool:
    """True if ``u = lambda * v`` for some nonzero scalar lambda."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        return False
    k = np.argmax(np.abs(v))
    if abs(v.flat[k]) < atol:
        return bool(np.allclose(u, 0, atol=atol))
    lam = u.flat[k] / v.flat[k]
    if abs(lam) < atol:
        return False
    return bool(np.allclose(u, lam * v, atol=atol))
