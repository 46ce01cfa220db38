"""GF(2) linear algebra on int bitsets.

Vectors are Python ints with bit ``i`` holding coordinate ``i``. Matrices are
lists of row ints, so ``m[i] >> j & 1`` is entry ``(i, j)``.
"""

from __future__ import annotations

import random
from typing import Iterable, Iterator, List, Sequence


class SingularMatrixError(ValueError):
    """Raised when an operation needs an invertible GF(2) matrix."""


def bits(x: int) -> Iterator[int]:
    """Yield the indices of set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def parity(x: int) -> int:
    return x.bit_count() & 1


def to_bitstring(x: int, n: int) -> str:
    """Bit ``i`` becomes character ``i``."""
    return "".join("1" if x >> i & 1 else "0" for i in range(n))


def from_bitstring(s: str) -> int:
    if any(ch not in "01" for ch in s):
        raise ValueError(f"not a bit string: {s!r}")
    return sum(1 << i for i, ch in enumerate(s) if ch == "1")


def identity(n: int) -> List[int]:
    return [1 << i for i in range(n)]


def matvec(m: Sequence[int], x: int) -> int:
    out = 0
    for i, row in enumerate(m):
        if (row & x).bit_count() & 1:
            out |= 1 << i
    return out


def matmul(a: Sequence[int], b: Sequence[int]) -> List[int]:
    """Product ``a @ b`` for row-int matrices."""
    out = []
    for row in a:
        acc = 0
        for k in bits(row):
            acc ^= b[k]
        out.append(acc)
    return out


def transpose(m: Sequence[int], n_cols: int) -> List[int]:
    out = [0] * n_cols
    for i, row in enumerate(m):
        for j in bits(row):
            out[j] |= 1 << i
    return out


def from_columns(cols: Sequence[int], n_rows: int) -> List[int]:
    """Row-int matrix whose column ``j`` is ``cols[j]``."""
    return transpose(cols, n_rows)


def columns(m: Sequence[int], n_cols: int) -> List[int]:
    return transpose(m, n_cols)


def rank(vectors: Iterable[int]) -> int:
    """Rank over GF(2) of a collection of bit vectors."""
    basis: dict[int, int] = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)


def independent(vectors: Sequence[int]) -> bool:
    return rank(vectors) == len(vectors)


def inverse(m: Sequence[int]) -> List[int]:
    """Inverse of a square row-int matrix by Gauss-Jordan elimination."""
    n = len(m)
    work = list(m)
    inv = identity(n)
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r] >> col & 1), None)
        if pivot is None:
            raise SingularMatrixError("matrix is singular over GF(2)")
        work[col], work[pivot] = work[pivot], work[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        for r in range(n):
            if r != col and work[r] >> col & 1:
                work[r] ^= work[col]
                inv[r] ^= inv[col]
    return inv


def is_invertible(m: Sequence[int]) -> bool:
    return rank(m) == len(m)


def complete_basis(vectors: Sequence[int], n: int) -> List[int]:
    """Extend independent ``vectors`` to a basis of GF(2)^n with unit vectors."""
    if not independent(vectors):
        raise SingularMatrixError("vectors are linearly dependent")
    out = list(vectors)
    for i in range(n):
        if len(out) == n:
            break
        if rank(out + [1 << i]) > len(out):
            out.append(1 << i)
    return out


def random_invertible(n: int, rng: random.Random) -> List[int]:
    """Uniformly random invertible ``n x n`` matrix, by rejection sampling."""
    if n < 1:
        raise ValueError("n must be positive")
    while True:
        m = [rng.getrandbits(n) for _ in range(n)]
        if is_invertible(m):
            return m


def permutation_matrix(sigma: Sequence[int]) -> List[int]:
    """Matrix sending ``e_i`` to ``e_sigma[i]``."""
    n = len(sigma)
    rows = [0] * n
    for i, s in enumerate(sigma):
        rows[s] |= 1 << i
    return rows
