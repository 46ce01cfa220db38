"""Phase polynomials of diagonal CNOT+phase circuits.

All weights are integers in units of pi/4. The XOR form maps parity masks to
multiplicities mod 8; the multilinear form keeps ``a`` mod 8, ``b`` mod 4 and
``c`` mod 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, List, Tuple

import numpy as np

from .circuit import Circuit, GateKind, PHASE_WEIGHT
from .gf2 import bits

MAX_PHASE_VECTOR_VARS = 20


class NotDiagonalError(ValueError):
    """The circuit contains a gate that is neither CNOT nor diagonal."""


@dataclass
class PhasePolynomialXor:
    num_vars: int
    terms: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for mask, w in self.terms.items():
            if mask <= 0 or mask >> self.num_vars:
                raise ValueError(f"parity mask {mask:#b} invalid for {self.num_vars} variables")
            if w % 8:
                clean[mask] = w % 8
        self.terms = clean

    def add(self, mask: int, weight: int) -> None:
        if mask <= 0 or mask >> self.num_vars:
            raise ValueError(f"parity mask {mask:#b} invalid for {self.num_vars} variables")
        w = (self.terms.get(mask, 0) + weight) % 8
        if w:
            self.terms[mask] = w
        else:
            self.terms.pop(mask, None)

    def odd_masks(self) -> List[int]:
        return sorted(m for m, w in self.terms.items() if w & 1)

    def __eq__(self, other):
        return (
            isinstance(other, PhasePolynomialXor)
            and self.num_vars == other.num_vars
            and self.terms == other.terms
        )


@dataclass
class MultilinearPhase:
    num_vars: int
    a: Tuple[int, ...]
    b: Dict[Tuple[int, int], int]
    c: FrozenSet[Tuple[int, int, int]]

    def __post_init__(self):
        n = self.num_vars
        if len(self.a) != n:
            raise ValueError("a must have one entry per variable")
        self.a = tuple(x % 8 for x in self.a)
        b = {}
        for (i, j), v in self.b.items():
            if not 0 <= i < j < n:
                raise ValueError(f"b index ({i}, {j}) must satisfy i < j < {n}")
            if v % 4:
                b[(i, j)] = v % 4
        self.b = b
        c = frozenset(tuple(t) for t in self.c)
        for i, j, k in c:
            if not 0 <= i < j < k < n:
                raise ValueError(f"c index ({i}, {j}, {k}) must satisfy i < j < k < {n}")
        self.c = c

    def mod2(self):
        return (
            tuple(x & 1 for x in self.a),
            frozenset(p for p, v in self.b.items() if v & 1),
            self.c,
        )


def _add_terms(poly: PhasePolynomialXor, masks: List[int], terms) -> None:
    for sel, w in terms:
        m = 0
        for k in bits(sel):
            m ^= masks[k]
        poly.add(m, w)


# XOR expansions of multi-qubit diagonal gates; selectors index the gate's
# qubits in order.
_CS_TERMS = ((0b01, 1), (0b10, 1), (0b11, 7))
_CZ_TERMS = ((0b01, 2), (0b10, 2), (0b11, 6))
_CCZ_TERMS = ((0b001, 1), (0b010, 1), (0b100, 1), (0b011, 7),
              (0b101, 7), (0b110, 7), (0b111, 1))


def extract_xor_polynomial(c: Circuit) -> Tuple[PhasePolynomialXor, List[int]]:
    """Return the XOR phase polynomial and the final parity matrix of ``c``.

    The matrix is a list of row ints: row ``q`` is the parity carried by
    qubit ``q`` at the end of the circuit.
    """
    n = c.num_qubits
    masks = [1 << q for q in range(n)]
    poly = PhasePolynomialXor(n)
    for g in c.gates:
        k, q = g.kind, g.qubits
        if k == GateKind.CNOT:
            masks[q[1]] ^= masks[q[0]]
        elif k in PHASE_WEIGHT:
            poly.add(masks[q[0]], PHASE_WEIGHT[k])
        elif k == GateKind.CS:
            _add_terms(poly, [masks[x] for x in q], _CS_TERMS)
        elif k == GateKind.CZ:
            _add_terms(poly, [masks[x] for x in q], _CZ_TERMS)
        elif k == GateKind.CCZ:
            _add_terms(poly, [masks[x] for x in q], _CCZ_TERMS)
        else:
            raise NotDiagonalError(f"{g!r} is not a CNOT or diagonal gate")
    return poly, masks


def to_multilinear(p: PhasePolynomialXor) -> MultilinearPhase:
    n = p.num_vars
    a = [0] * n
    b: Dict[Tuple[int, int], int] = {}
    c: Dict[Tuple[int, int, int], int] = {}
    for mask, w in p.terms.items():
        support = list(bits(mask))
        for i in support:
            a[i] += w
        # x1^...^xk = sum x_i - 2 sum x_i x_j + 4 sum x_i x_j x_k - ...
        for pair in combinations(support, 2):
            b[pair] = (b.get(pair, 0) - w) % 4
        if w & 1:
            for triple in combinations(support, 3):
                c[triple] = c.get(triple, 0) ^ 1
    return MultilinearPhase(n, tuple(a), b, frozenset(t for t, v in c.items() if v))


def multilinear_to_xor(m: MultilinearPhase) -> PhasePolynomialXor:
    """An XOR polynomial with the given multilinear form (T, CS and CCZ terms)."""
    poly = PhasePolynomialXor(m.num_vars)
    for i, ai in enumerate(m.a):
        if ai:
            poly.add(1 << i, ai)
    for (i, j), v in m.b.items():
        for _ in range(v):
            _add_terms(poly, [1 << i, 1 << j], _CS_TERMS)
    for i, j, k in m.c:
        _add_terms(poly, [1 << i, 1 << j, 1 << k], _CCZ_TERMS)
    return poly


def equivalent_mod_clifford(p1: MultilinearPhase, p2: MultilinearPhase) -> bool:
    if p1.num_vars != p2.num_vars:
        raise ValueError(f"dimension mismatch: {p1.num_vars} vs {p2.num_vars}")
    return p1.mod2() == p2.mod2()


def _inputs(n: int) -> np.ndarray:
    if n > MAX_PHASE_VECTOR_VARS:
        raise ValueError(f"{n} variables exceeds the phase-vector limit {MAX_PHASE_VECTOR_VARS}")
    return np.arange(1 << n, dtype=np.int64)


def phase_vector(p: PhasePolynomialXor) -> np.ndarray:
    """Phase of every basis input, as multiples of pi/4 mod 8."""
    x = _inputs(p.num_vars)
    out = np.zeros(x.shape, dtype=np.int64)
    for mask, w in p.terms.items():
        out += w * (np.bitwise_count(x & mask) & 1)
    return out % 8


def multilinear_phase_vector(m: MultilinearPhase) -> np.ndarray:
    """Direct evaluation of the multilinear form, for cross-checking."""
    x = _inputs(m.num_vars)
    xb = [(x >> i) & 1 for i in range(m.num_vars)]
    out = np.zeros(x.shape, dtype=np.int64)
    for i, ai in enumerate(m.a):
        out += ai * xb[i]
    for (i, j), v in m.b.items():
        out += 2 * v * xb[i] * xb[j]
    for i, j, k in m.c:
        out += 4 * xb[i] * xb[j] * xb[k]
    return out % 8
