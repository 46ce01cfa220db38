"""Symmetric order-3 tensors over GF(2).

A tensor of size ``n`` is stored densely as ``n*n`` row ints: row ``i*n + j``
is the bitmask over ``k`` of the entries ``T[i, j, k]``. Every constructor
produces a fully symmetric tensor, so the canonical triples ``i <= j <= k``
determine it.
"""

from __future__ import annotations

import json
import random
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from . import gf2
from .gf2 import bits
from .phasepoly import MultilinearPhase


class SignatureTensor:
    __slots__ = ("n", "rows", "_hash")

    def __init__(self, n: int, rows: Sequence[int]):
        if len(rows) != n * n:
            raise ValueError("rows must have n*n entries")
        self.n = n
        self.rows = tuple(rows)
        self._hash = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "SignatureTensor":
        return cls(n, (0,) * (n * n))

    @classmethod
    def from_entries(cls, n: int, entries: Iterable[Sequence[int]]) -> "SignatureTensor":
        """Build from canonical (or any) index triples; each triple sets the
        whole symmetric orbit to 1. Repeated triples are an error."""
        rows = [0] * (n * n)
        seen = set()
        for e in entries:
            i, j, k = sorted(int(x) for x in e)
            if i < 0 or k >= n:
                raise ValueError(f"entry {tuple(e)} out of range for n={n}")
            if (i, j, k) in seen:
                raise ValueError(f"duplicate entry {(i, j, k)}")
            seen.add((i, j, k))
            for a, b, c in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
                rows[a * n + b] |= 1 << c
        return cls(n, rows)

    @classmethod
    def rank_one(cls, u: int, n: int) -> "SignatureTensor":
        return cls.zero(n).add_rank_one(u)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "SignatureTensor":
        arr = np.asarray(arr) & 1
        n = arr.shape[0]
        if arr.shape != (n, n, n):
            raise ValueError("expected an n x n x n array")
        for perm in ((1, 0, 2), (0, 2, 1), (2, 1, 0)):
            if not np.array_equal(arr, arr.transpose(perm)):
                raise ValueError("array is not symmetric")
        weights = 1 << np.arange(n, dtype=object)
        rows = [int(np.dot(arr[i, j].astype(object), weights)) for i in range(n) for j in range(n)]
        return cls(n, rows)

    # -- views --------------------------------------------------------------

    def entry(self, i: int, j: int, k: int) -> int:
        return self.rows[i * self.n + j] >> k & 1

    def entries(self) -> List[Tuple[int, int, int]]:
        n = self.n
        out = []
        for i in range(n):
            for j in range(i, n):
                row = self.rows[i * n + j] >> j
                for k in bits(row):
                    out.append((i, j, j + k))
        return out

    def to_array(self) -> np.ndarray:
        n = self.n
        arr = np.zeros((n, n, n), dtype=np.uint8)
        for idx, row in enumerate(self.rows):
            for k in bits(row):
                arr[idx // n, idx % n, k] = 1
        return arr

    def is_zero(self) -> bool:
        return not any(self.rows)

    def weight(self) -> int:
        """Number of nonzero entries of the full n x n x n tensor."""
        return sum(r.bit_count() for r in self.rows)

    def key(self) -> int:
        """Packed integer identifying the tensor (for hashing and lookups)."""
        out = 0
        shift = 0
        for r in self.rows:
            out |= r << shift
            shift += self.n
        return out

    def slice_vectors(self) -> List[int]:
        """Mode-1 slices, each packed as an n*n-bit integer."""
        n = self.n
        out = []
        for i in range(n):
            v = 0
            for j in range(n):
                v |= self.rows[i * n + j] << (j * n)
            out.append(v)
        return out

    def slice_rank(self) -> int:
        """GF(2) rank of the mode-1 flattening; a lower bound on Waring rank."""
        return gf2.rank(self.slice_vectors())

    def is_waring_consistent(self) -> bool:
        """True if ``T[i,i,j] == T[i,j,j]`` for all pairs, which holds for every
        sum of symmetric cubes over GF(2)."""
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                if self.entry(i, i, j) != self.entry(i, j, j):
                    return False
        return True

    # -- arithmetic ---------------------------------------------------------

    def add_rank_one(self, u: int) -> "SignatureTensor":
        if u >> self.n:
            raise ValueError("factor longer than tensor dimension")
        rows = list(self.rows)
        n = self.n
        support = list(bits(u))
        for i in support:
            base = i * n
            for j in support:
                rows[base + j] ^= u
        return SignatureTensor(n, rows)

    def __xor__(self, other: "SignatureTensor") -> "SignatureTensor":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return SignatureTensor(self.n, [a ^ b for a, b in zip(self.rows, other.rows)])

    __add__ = __xor__

    def __eq__(self, other):
        return isinstance(other, SignatureTensor) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.rows))
        return self._hash

    def __repr__(self):
        return f"SignatureTensor(n={self.n}, entries={self.entries()})"

    # -- serialisation ------------------------------------------------------

    def to_dict(self) -> dict:
        return {"n": self.n, "entries": [list(e) for e in self.entries()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SignatureTensor":
        n = int(data["n"])
        entries = [tuple(e) for e in data["entries"]]
        for e in entries:
            if len(e) != 3 or not (e[0] <= e[1] <= e[2]):
                raise ValueError(f"entry {list(e)} is not a canonical triple")
        return cls.from_entries(n, entries)

    @classmethod
    def from_json(cls, text: str) -> "SignatureTensor":
        return cls.from_dict(json.loads(text))


def from_multilinear(p: MultilinearPhase) -> SignatureTensor:
    n = p.num_vars
    entries = [(i, i, i) for i, a in enumerate(p.a) if a & 1]
    for (i, j), v in p.b.items():
        if v & 1:
            entries += [(i, i, j), (i, j, j)]
    entries += sorted(p.c)
    return SignatureTensor.from_entries(n, entries)


def from_decomposition(factors: Sequence[int], n: int) -> SignatureTensor:
    t = SignatureTensor.zero(n)
    for u in factors:
        if u < 0 or u >> n:
            raise ValueError(f"factor {u:#b} does not fit {n} bits")
        t = t.add_rank_one(u)
    return t


def subtract_rank_one(t: SignatureTensor, u: int) -> SignatureTensor:
    if u == 0:
        raise ValueError("the zero factor is not a valid action")
    return t.add_rank_one(u)


def change_of_basis(t: SignatureTensor, m: Sequence[int]) -> SignatureTensor:
    """``T'[i,j,k] = sum M[i,a] M[j,b] M[k,c] T[a,b,c]`` over GF(2)."""
    n = t.n
    if len(m) != n or not gf2.is_invertible(m):
        raise gf2.SingularMatrixError("basis change must be an invertible n x n matrix")
    mat = np.array([[row >> j & 1 for j in range(n)] for row in m], dtype=np.int64)
    arr = t.to_array().astype(np.int64)
    arr = np.tensordot(mat, arr, axes=(1, 0)) & 1                  # i,b,c
    arr = np.tensordot(arr, mat, axes=(1, 1)).transpose(0, 2, 1) & 1   # i,j,c
    arr = np.tensordot(arr, mat, axes=(2, 1)) & 1                  # i,j,k
    return SignatureTensor.from_array(arr)


def random_invertible(n: int, seed) -> List[int]:
    """Seeded uniformly random invertible matrix (rows as ints)."""
    return gf2.random_invertible(n, random.Random(seed))


def basis_change_pool(n: int, size: int, seed) -> List[List[int]]:
    rng = random.Random(seed)
    return [gf2.random_invertible(n, rng) for _ in range(size)]


def permute(t: SignatureTensor, sigma: Sequence[int]) -> SignatureTensor:
    n = t.n
    if sorted(sigma) != list(range(n)):
        raise ValueError("sigma must be a permutation of range(n)")
    return SignatureTensor.from_entries(
        n, [(sigma[i], sigma[j], sigma[k]) for i, j, k in t.entries()]
    )


def permute_factor(u: int, sigma: Sequence[int]) -> int:
    out = 0
    for i in bits(u):
        out |= 1 << sigma[i]
    return out
