"""Waring decompositions annotated with Toffoli and CS gadgets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence

from . import gf2
from .gf2 import from_bitstring, to_bitstring
from .tensor import SignatureTensor, from_decomposition


class GadgetKind(str, Enum):
    TOFFOLI = "toffoli"
    CS = "cs"


SPAN = {GadgetKind.TOFFOLI: 7, GadgetKind.CS: 3}


class InvalidDecompositionError(ValueError):
    pass


def toffoli_completion(a: int, b: int, c: int) -> List[int]:
    """The four factors that complete a Toffoli gadget started by a, b, c."""
    return [a ^ b, a ^ c, a ^ b ^ c, b ^ c]


def is_toffoli_pattern(w: Sequence[int]) -> bool:
    if len(w) != 7:
        return False
    a, b, c = w[:3]
    return gf2.independent([a, b, c]) and list(w[3:]) == toffoli_completion(a, b, c)


def is_cs_pattern(w: Sequence[int]) -> bool:
    if len(w) != 3:
        return False
    a, b, s = w
    return gf2.independent([a, b]) and s == a ^ b


PATTERN = {GadgetKind.TOFFOLI: is_toffoli_pattern, GadgetKind.CS: is_cs_pattern}


@dataclass(frozen=True)
class Gadget:
    kind: GadgetKind
    start: int

    @property
    def span(self) -> int:
        return SPAN[self.kind]

    @property
    def stop(self) -> int:
        return self.start + self.span


@dataclass(frozen=True)
class Cost:
    t: int
    toffoli: int
    cs: int

    @property
    def equivalent_t(self) -> int:
        return self.t + 2 * self.toffoli + 2 * self.cs

    def label(self) -> str:
        return f"{self.toffoli}Tof + {self.cs}CS + {self.t}T"

    def to_dict(self) -> dict:
        return {"t": self.t, "toffoli": self.toffoli, "cs": self.cs, "equivalent_t": self.equivalent_t}


@dataclass
class Decomposition:
    n: int
    factors: List[int]
    gadgets: List[Gadget] = field(default_factory=list)

    def __post_init__(self):
        self.factors = list(self.factors)
        self.gadgets = sorted(self.gadgets, key=lambda g: g.start)

    def validate(self) -> None:
        for u in self.factors:
            if u <= 0 or u >> self.n:
                raise InvalidDecompositionError(f"factor {u:#b} is zero or longer than {self.n} bits")
        end = 0
        for g in self.gadgets:
            if g.start < end:
                raise InvalidDecompositionError(f"gadget at {g.start} overlaps the previous one")
            if g.stop > len(self.factors):
                raise InvalidDecompositionError(f"gadget at {g.start} runs past the last factor")
            if not PATTERN[g.kind](self.factors[g.start:g.stop]):
                raise InvalidDecompositionError(f"factors at {g.start} do not form a {g.kind.value} gadget")
            end = g.stop

    def gadget_mask(self) -> List[bool]:
        """``mask[i]`` is True if factor i belongs to some gadget."""
        mask = [False] * len(self.factors)
        for g in self.gadgets:
            for i in range(g.start, g.stop):
                mask[i] = True
        return mask

    def cost(self) -> Cost:
        self.validate()
        tof = sum(g.kind == GadgetKind.TOFFOLI for g in self.gadgets)
        cs = len(self.gadgets) - tof
        return Cost(len(self.factors) - 7 * tof - 3 * cs, tof, cs)

    def tensor(self) -> SignatureTensor:
        return from_decomposition(self.factors, self.n)

    def mapped(self, m: Sequence[int]) -> "Decomposition":
        """Apply the linear map ``m`` to every factor; gadget patterns survive."""
        return Decomposition(self.n, [gf2.matvec(m, u) for u in self.factors], list(self.gadgets))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "factors": [to_bitstring(u, self.n) for u in self.factors],
            "gadgets": [{"kind": g.kind.value, "start": g.start} for g in self.gadgets],
            "cost": self.cost().to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Decomposition":
        n = int(data["n"])
        factors = []
        for s in data["factors"]:
            if len(s) != n:
                raise InvalidDecompositionError(f"factor {s!r} does not have length {n}")
            factors.append(from_bitstring(s))
        gadgets = [Gadget(GadgetKind(g["kind"]), int(g["start"])) for g in data.get("gadgets", [])]
        d = cls(n, factors, gadgets)
        d.validate()
        return d

    @classmethod
    def from_json(cls, text: str) -> "Decomposition":
        return cls.from_dict(json.loads(text))


def cancel_duplicates(d: Decomposition) -> Decomposition:
    """Drop pairs of equal factors that lie outside every gadget; they cancel
    in the tensor and only add cost."""
    mask = d.gadget_mask()
    keep = [True] * len(d.factors)
    seen = {}
    for i, u in enumerate(d.factors):
        if mask[i]:
            continue
        j = seen.pop(u, None)
        if j is None:
            seen[u] = i
        else:
            keep[i] = keep[j] = False
    new_index, factors = {}, []
    for i, u in enumerate(d.factors):
        if keep[i]:
            new_index[i] = len(factors)
            factors.append(u)
    gadgets = [Gadget(g.kind, new_index[g.start]) for g in d.gadgets]
    return Decomposition(d.n, factors, gadgets)


def game_cost(d: Decomposition) -> Cost:
    return d.cost()
