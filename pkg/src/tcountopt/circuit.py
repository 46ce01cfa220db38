"""Circuit representation, OpenQASM 2.0 subset I/O and basis rewriting."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple


class GateKind(str, enum.Enum):
    H = "H"
    X = "X"
    Z = "Z"
    S = "S"
    SDG = "Sdg"
    T = "T"
    TDG = "Tdg"
    CZ = "CZ"
    CNOT = "CNOT"
    CS = "CS"
    CCZ = "CCZ"
    CCX = "CCX"


ARITY = {
    GateKind.H: 1, GateKind.X: 1, GateKind.Z: 1, GateKind.S: 1,
    GateKind.SDG: 1, GateKind.T: 1, GateKind.TDG: 1,
    GateKind.CZ: 2, GateKind.CNOT: 2, GateKind.CS: 2,
    GateKind.CCZ: 3, GateKind.CCX: 3,
}

# Single-qubit diagonal gates as multiples of pi/4.
PHASE_WEIGHT = {
    GateKind.T: 1, GateKind.S: 2, GateKind.Z: 4,
    GateKind.SDG: 6, GateKind.TDG: 7,
}

WORKING_SET = frozenset({GateKind.H, GateKind.Z, GateKind.S, GateKind.T, GateKind.CNOT})


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if len(self.qubits) != ARITY[self.kind]:
            raise ValueError(f"{self.kind.value} takes {ARITY[self.kind]} qubits, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"repeated qubit in {self.kind.value}{self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError("qubit indices must be non-negative")

    def __repr__(self):
        return f"{self.kind.value}{self.qubits}"


@dataclass
class Circuit:
    num_qubits: int
    gates: List[Gate] = field(default_factory=list)
    registers: Optional[List[Tuple[str, int]]] = None

    def __post_init__(self):
        for g in self.gates:
            if max(g.qubits) >= self.num_qubits:
                raise ValueError(f"{g!r} out of range for {self.num_qubits} qubits")

    def append(self, kind, *qubits: int) -> "Circuit":
        g = Gate(GateKind(kind), qubits)
        if max(g.qubits) >= self.num_qubits:
            raise ValueError(f"{g!r} out of range for {self.num_qubits} qubits")
        self.gates.append(g)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g.kind, *g.qubits)
        return self

    def copy(self) -> "Circuit":
        return Circuit(self.num_qubits, list(self.gates), self.registers)

    def count(self, kind) -> int:
        kind = GateKind(kind)
        return sum(1 for g in self.gates if g.kind == kind)

    def t_count(self) -> int:
        """Number of gates with an odd pi/4 weight."""
        return sum(1 for g in self.gates if PHASE_WEIGHT.get(g.kind, 0) & 1)

    def support(self) -> List[int]:
        return sorted({q for g in self.gates for q in g.qubits})

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)


# --------------------------------------------------------------------------
# OpenQASM 2.0 subset
# --------------------------------------------------------------------------


class QasmError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


_QASM_GATES = {
    "h": GateKind.H, "x": GateKind.X, "z": GateKind.Z, "s": GateKind.S,
    "sdg": GateKind.SDG, "t": GateKind.T, "tdg": GateKind.TDG,
    "cz": GateKind.CZ, "cx": GateKind.CNOT, "ccx": GateKind.CCX,
}
_QASM_NAMES = {v: k for k, v in _QASM_GATES.items()}

_IDENT = r"[a-zA-Z_][a-zA-Z0-9_]*"
_QREG_RE = re.compile(rf"^qreg\s+({_IDENT})\s*\[\s*(\d+)\s*\]$")
_ARG_RE = re.compile(rf"^({_IDENT})\s*\[\s*(\d+)\s*\]$")
_GATE_RE = re.compile(rf"^({_IDENT})\s+(.+)$", re.S)


def _statements(text: str):
    """Yield (statement, line) pairs; comments stripped, split on ';'."""
    buf: List[str] = []
    start = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0]
        while True:
            head, sep, line = line.partition(";")
            if head.strip():
                buf.append(head.strip())
                if start is None:
                    start = lineno
            if not sep:
                break
            if buf:
                yield " ".join(buf), start
            buf, start = [], None
    if buf:
        raise QasmError("missing ';'", start)


def parse_qasm(text: str) -> Circuit:
    """Parse an OpenQASM 2.0 program restricted to the supported gate subset."""
    stmts = list(_statements(text))
    if not stmts or not re.fullmatch(r"OPENQASM\s+2(\.0)?", stmts[0][0]):
        raise QasmError("expected 'OPENQASM 2.0;' header", stmts[0][1] if stmts else 1)

    registers: List[Tuple[str, int]] = []
    offsets: Dict[str, Tuple[int, int]] = {}
    total = 0
    gates: List[Gate] = []
    for stmt, line in stmts[1:]:
        if stmt.startswith("include"):
            if not re.fullmatch(r'include\s+"[^"]*"', stmt):
                raise QasmError(f"malformed include: {stmt!r}", line)
            continue
        m = _QREG_RE.match(stmt)
        if m:
            name, size = m.group(1), int(m.group(2))
            if name in offsets:
                raise QasmError(f"register {name!r} declared twice", line)
            if size == 0:
                raise QasmError(f"register {name!r} has size 0", line)
            offsets[name] = (total, size)
            registers.append((name, size))
            total += size
            continue
        m = _GATE_RE.match(stmt)
        if not m:
            raise QasmError(f"syntax error: {stmt!r}", line)
        op, args = m.group(1), m.group(2)
        if op not in _QASM_GATES:
            raise QasmError(f"unsupported statement {op!r}", line)
        kind = _QASM_GATES[op]
        qubits = []
        for arg in args.split(","):
            am = _ARG_RE.match(arg.strip())
            if not am:
                raise QasmError(f"bad qubit argument {arg.strip()!r}", line)
            reg, idx = am.group(1), int(am.group(2))
            if reg not in offsets:
                raise QasmError(f"undeclared register {reg!r}", line)
            base, size = offsets[reg]
            if idx >= size:
                raise QasmError(f"index {idx} out of bounds for {reg}[{size}]", line)
            qubits.append(base + idx)
        try:
            gates.append(Gate(kind, tuple(qubits)))
        except ValueError as exc:
            raise QasmError(str(exc), line) from None
    return Circuit(total, gates, registers or None)


def _qubit_labels(c: Circuit) -> Tuple[List[Tuple[str, int]], List[str]]:
    regs = list(c.registers or [])
    declared = sum(size for _, size in regs)
    if declared > c.num_qubits:
        regs, declared = [], 0
    if not regs:
        regs = [("q", c.num_qubits)]
    elif declared < c.num_qubits:
        regs.append(("anc", c.num_qubits - declared))
    labels = [f"{name}[{i}]" for name, size in regs for i in range(size)]
    return regs, labels


def to_qasm(c: Circuit) -> str:
    """Print ``c`` in the supported subset; CS and CCZ are expanded exactly."""
    regs, labels = _qubit_labels(c)
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    lines += [f"qreg {name}[{size}];" for name, size in regs]
    for g in c.gates:
        if g.kind == GateKind.CCZ:
            a, b, t = g.qubits
            seq = [Gate(GateKind.H, (t,)), Gate(GateKind.CCX, g.qubits), Gate(GateKind.H, (t,))]
        elif g.kind == GateKind.CS:
            seq = [Gate(k, q) for k, q in _cs_gates(*g.qubits)]
        else:
            seq = [g]
        for h in seq:
            args = ", ".join(labels[q] for q in h.qubits)
            lines.append(f"{_QASM_NAMES[h.kind]} {args};")
    return "\n".join(lines) + "\n"


def _cs_gates(a: int, b: int):
    return [
        (GateKind.T, (a,)), (GateKind.T, (b,)), (GateKind.CNOT, (a, b)),
        (GateKind.TDG, (b,)), (GateKind.CNOT, (a, b)),
    ]


# --------------------------------------------------------------------------
# Rewriting into {H, Z, S, T, CNOT}
# --------------------------------------------------------------------------
#
# Working form: ("h", q), ("p", q, w) with w in 1..7 (units of pi/4),
# ("cx", c, t).

# Parity terms of CCZ(a, b, c) in the order the Toffoli gadget pattern uses:
# a, b, c, a^b, a^c, a^b^c, b^c.
CCZ_TERMS = ((0b001, 1), (0b010, 1), (0b100, 1), (0b011, 7), (0b101, 7), (0b111, 1), (0b110, 7))


def _ccz_ops(a: int, b: int, c: int) -> list:
    return [
        ("p", a, 1), ("p", b, 1), ("p", c, 1),
        ("cx", a, b), ("p", b, 7),            # b = a^b
        ("cx", a, c), ("p", c, 7),            # c = a^c
        ("cx", a, b),                         # b restored
        ("cx", b, c), ("p", c, 1),            # c = a^b^c
        ("cx", a, c), ("p", c, 7),            # c = b^c
        ("cx", b, c),                         # c restored
    ]


def _expand(g: Gate) -> list:
    k, q = g.kind, g.qubits
    if k in PHASE_WEIGHT:
        return [("p", q[0], PHASE_WEIGHT[k])]
    if k == GateKind.H:
        return [("h", q[0])]
    if k == GateKind.X:
        return [("h", q[0]), ("p", q[0], 4), ("h", q[0])]
    if k == GateKind.CNOT:
        return [("cx", q[0], q[1])]
    if k == GateKind.CZ:
        return [("h", q[1]), ("cx", q[0], q[1]), ("h", q[1])]
    if k == GateKind.CS:
        a, b = q
        return [("p", a, 1), ("p", b, 1), ("cx", a, b), ("p", b, 7), ("cx", a, b)]
    if k == GateKind.CCZ:
        return _ccz_ops(*q)
    if k == GateKind.CCX:
        a, b, t = q
        return [("h", t)] + _ccz_ops(a, b, t) + [("h", t)]
    raise ValueError(f"cannot rewrite {k}")  # pragma: no cover


def _wires(op) -> tuple:
    return op[1:] if op[0] == "cx" else (op[1],)


def _neighbours(ops: list):
    """For each op index, map wire -> (previous op index, next op index)."""
    last: Dict[int, int] = {}
    prev = [dict() for _ in ops]
    nxt = [dict() for _ in ops]
    for i, op in enumerate(ops):
        for w in _wires(op):
            j = last.get(w)
            prev[i][w] = j
            if j is not None:
                nxt[j][w] = i
            last[w] = i
    for i, op in enumerate(ops):
        for w in _wires(op):
            nxt[i].setdefault(w, None)
    return prev, nxt


def _merge_local(ops: list) -> list:
    """Cancel H pairs and merge phases that are adjacent on their wire."""
    changed = True
    while changed:
        changed = False
        prev, nxt = _neighbours(ops)
        dead = set()
        out = list(ops)
        for i in range(len(ops)):
            op = out[i]
            if i in dead or op[0] == "cx":
                continue
            j = nxt[i][op[1]]
            if j is None or j in dead or out[j][0] != op[0]:
                continue
            if op[0] == "h":
                dead.update((i, j))
            else:
                w = (op[2] + out[j][2]) % 8
                dead.add(i)
                out[j] = ("p", op[1], w)
            changed = True
        ops = [op for i, op in enumerate(out) if i not in dead]
        ops = [op for op in ops if not (op[0] == "p" and op[2] % 8 == 0)]
    return ops


def _push_boundary_hadamards(ops: list) -> list:
    """Move H gates that are first (last) on their wire to the front (back)."""
    prev, nxt = _neighbours(ops)
    front, middle, back = [], [], []
    for i, op in enumerate(ops):
        if op[0] == "h" and prev[i][op[1]] is None:
            front.append(op)
        elif op[0] == "h" and nxt[i][op[1]] is None:
            back.append(op)
        else:
            middle.append(op)
    return front + middle + back


def _h_count(ops: list) -> int:
    return sum(1 for op in ops if op[0] == "h")


def _transfer_once(ops: list) -> Optional[list]:
    """Apply one H-pair transfer across a CNOT that lowers the H count."""
    prev, nxt = _neighbours(ops)
    base = _h_count(ops)
    for i, op in enumerate(ops):
        if op[0] != "cx":
            continue
        c, t = op[1], op[2]
        for w, other in ((c, t), (t, c)):
            p, n = prev[i][w], nxt[i][w]
            if p is None or n is None or ops[p][0] != "h" or ops[n][0] != "h":
                continue
            # H_w CX H_w  ==  H_other CX(reversed) H_other
            cand = []
            for k, o in enumerate(ops):
                if k in (p, n):
                    continue
                if k == i:
                    cand += [("h", other), ("cx", t, c), ("h", other)]
                else:
                    cand.append(o)
            cand = _merge_local(cand)
            if _h_count(cand) < base:
                return cand
    return None


def _peephole(ops: list) -> list:
    ops = _merge_local(ops)
    while True:
        ops = _push_boundary_hadamards(_merge_local(ops))
        nxt = _transfer_once(ops)
        if nxt is None:
            return _push_boundary_hadamards(ops)
        ops = nxt


def _phase_gates(q: int, w: int) -> List[Gate]:
    out = []
    if w & 4:
        out.append(Gate(GateKind.Z, (q,)))
    if w & 2:
        out.append(Gate(GateKind.S, (q,)))
    if w & 1:
        out.append(Gate(GateKind.T, (q,)))
    return out


def phase_gates(q: int, weight: int) -> List[Gate]:
    """Gates over {Z, S, T} realising ``weight * pi/4`` on qubit ``q``."""
    return _phase_gates(q, weight % 8)


def rewrite_to_basis(c: Circuit, peephole: bool = True) -> Circuit:
    """Rewrite ``c`` over {H, Z, S, T, CNOT}, optionally simplifying."""
    ops = [op for g in c.gates for op in _expand(g)]
    if peephole:
        ops = _peephole(ops)
    gates: List[Gate] = []
    for op in ops:
        if op[0] == "h":
            gates.append(Gate(GateKind.H, (op[1],)))
        elif op[0] == "cx":
            gates.append(Gate(GateKind.CNOT, (op[1], op[2])))
        else:
            gates.extend(_phase_gates(op[1], op[2]))
    return Circuit(c.num_qubits, gates, c.registers)


def push_boundary_hadamards(c: Circuit) -> Circuit:
    """Reorder so that H gates with nothing before (after) them on their wire
    sit at the start (end) of the gate list. Unitary is unchanged."""
    first: Dict[int, int] = {}
    last: Dict[int, int] = {}
    for i, g in enumerate(c.gates):
        for q in g.qubits:
            first.setdefault(q, i)
            last[q] = i
    front, middle, back = [], [], []
    for i, g in enumerate(c.gates):
        if g.kind == GateKind.H and first[g.qubits[0]] == i:
            front.append(g)
        elif g.kind == GateKind.H and last[g.qubits[0]] == i:
            back.append(g)
        else:
            middle.append(g)
    return Circuit(c.num_qubits, front + middle + back, c.registers)
