"""Exact minimum Waring rank by exhaustive depth-first search.

Factors are chosen in strictly increasing order (a decomposition never needs a
repeated factor, since two copies cancel). The last two factors come from a
precomputed table of rank-two tensors. A branch is cut when the residual's
flattening rank exceeds the remaining budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..decomposition import Decomposition
from ..tensor import SignatureTensor

MAX_N = 8
MAX_RANK = 10


class OracleBoundsError(ValueError):
    pass


@dataclass
class OracleResult:
    rank: Optional[int]
    decomposition: Optional[Decomposition]
    max_rank: int
    # number of search nodes visited at each depth tried; the proof that no
    # smaller rank works is that every depth below ``rank`` came up empty
    transcript: Dict[int, int] = field(default_factory=dict)

    @property
    def proven(self) -> bool:
        return self.rank is not None


def _cube_rows(u: int, n: int) -> List[Tuple[int, int]]:
    """(row index, xor mask) pairs for the rank-one cube of u."""
    support = [i for i in range(n) if u >> i & 1]
    return [(i * n + j, u) for i in support for j in support]


class _Searcher:
    def __init__(self, target: SignatureTensor):
        self.n = n = target.n
        self.target = target
        self.factors = list(range(1, 1 << n))
        self.cubes = {u: _cube_rows(u, n) for u in self.factors}
        self.full = {u: SignatureTensor.rank_one(u, n).rows for u in self.factors}
        self.pairs: Dict[Tuple[int, ...], Tuple[int, int]] = {}
        zero = [0] * (n * n)
        for x, u in enumerate(self.factors):
            for v in self.factors[x + 1:]:
                rows = list(zero)
                for idx, m in self.cubes[u]:
                    rows[idx] ^= m
                for idx, m in self.cubes[v]:
                    rows[idx] ^= m
                self.pairs.setdefault(tuple(rows), (u, v))
        self.visited = 0

    def _finish(self, rows: List[int], budget: int) -> Optional[List[int]]:
        n = self.n
        if budget == 0:
            return [] if not any(rows) else None
        if not any(rows):
            return None  # would need a cancelling pair; found at a lower rank
        if budget == 1:
            u = 0
            for i in range(n):
                if rows[i * n + i] >> i & 1:
                    u |= 1 << i
            return [u] if u and tuple(rows) == self.full[u] else None
        if budget == 2:
            hit = self.pairs.get(tuple(rows))
            return list(hit) if hit else None
        return None

    def search(self, rows: List[int], budget: int, start: int, chosen: List[int]) -> Optional[List[int]]:
        self.visited += 1
        if budget <= 2:
            tail = self._finish(rows, budget)
            return chosen + tail if tail is not None else None
        if not any(rows) or _flattening_rank(rows, self.n) > budget:
            return None
        for x in range(start, len(self.factors)):
            u = self.factors[x]
            for idx, m in self.cubes[u]:
                rows[idx] ^= m
            chosen.append(u)
            found = self.search(rows, budget - 1, x + 1, chosen)
            chosen.pop()
            for idx, m in self.cubes[u]:
                rows[idx] ^= m
            if found is not None:
                return found
        return None


def _flattening_rank(rows: List[int], n: int) -> int:
    basis: Dict[int, int] = {}
    for i in range(n):
        v = 0
        for j in range(n):
            v |= rows[i * n + j] << (j * n)
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)


def min_waring_rank(target: SignatureTensor, max_rank: int = MAX_RANK) -> OracleResult:
    """Smallest r <= max_rank with a Waring decomposition of ``target``."""
    if target.n > MAX_N or max_rank > MAX_RANK:
        raise OracleBoundsError(f"oracle limited to n <= {MAX_N} and max_rank <= {MAX_RANK}")
    if max_rank < 0:
        raise OracleBoundsError("max_rank must be non-negative")
    n = target.n
    result = OracleResult(None, None, max_rank)
    if target.is_zero():
        result.rank = 0
        result.decomposition = Decomposition(n, [])
        result.transcript[0] = 1
        return result
    lb = target.slice_rank()
    for r in range(1, lb):
        result.transcript[r] = 0  # ruled out by the flattening-rank bound
    if not target.is_waring_consistent():
        return result
    searcher = _Searcher(target)
    for r in range(max(1, lb), max_rank + 1):
        searcher.visited = 0
        found = searcher.search(list(target.rows), r, 0, [])
        result.transcript[r] = searcher.visited
        if found is not None:
            d = Decomposition(n, found)
            if d.tensor() != target:  # pragma: no cover - hard postcondition
                raise AssertionError("oracle witness does not reproduce the target")
            result.rank = r
            result.decomposition = d
            return result
    return result
