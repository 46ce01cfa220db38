"""Slow, direct reference implementations used as test oracles."""

from __future__ import annotations

import itertools

import numpy as np


def vec(u: int, n: int) -> np.ndarray:
    return np.array([(u >> i) & 1 for i in range(n)], dtype=np.int64)


def cube_sum(factors, n: int) -> np.ndarray:
    """Sum of u (x) u (x) u mod 2 by explicit triple loop."""
    t = np.zeros((n, n, n), dtype=np.int64)
    for u in factors:
        v = vec(u, n)
        for i, j, k in itertools.product(range(n), repeat=3):
            t[i, j, k] += v[i] * v[j] * v[k]
    return t % 2


def gf2_rank(vectors) -> int:
    """Rank by brute force: log2 of the size of the span."""
    span = {0}
    for v in vectors:
        span |= {s ^ v for s in span}
    return len(span).bit_length() - 1


def xor_all(vs) -> int:
    out = 0
    for v in vs:
        out ^= v
    return out


def independent(vectors) -> bool:
    """No nonempty subset XORs to zero."""
    vs = list(vectors)
    for r in range(1, len(vs) + 1):
        for sub in itertools.combinations(vs, r):
            if xor_all(sub) == 0:
                return False
    return True


def toffoli_window(w) -> bool:
    """Solve the seven-factor pattern directly from its definition."""
    if len(w) != 7:
        return False
    a, b, c = w[:3]
    return independent([a, b, c]) and (w[3], w[4], w[5], w[6]) == (a ^ b, a ^ c, a ^ b ^ c, b ^ c)


def cs_window(w) -> bool:
    return len(w) == 3 and independent(w[:2]) and w[2] == w[0] ^ w[1]


def diagonal_phases(u: np.ndarray, atol: float = 1e-9):
    """Phases of a diagonal unitary in multiples of pi/4, or None."""
    if not np.allclose(u, np.diag(np.diag(u)), atol=atol):
        return None
    d = np.diag(u)
    k = np.round(np.angle(d) / (np.pi / 4)).astype(int) % 8
    if not np.allclose(d, np.exp(1j * np.pi / 4 * k), atol=atol):
        return None
    return k
