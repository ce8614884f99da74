"""Dense linear algebra over GF(2) on numpy uint8 arrays."""
from __future__ import annotations

import numpy as np


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return ``a @ b mod 2`` for 0/1 matrices.

    Goes through float32 BLAS; exact while the inner dimension stays below 2**24.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    out = np.asarray(a, dtype=np.float32) @ np.asarray(b, dtype=np.float32)
    return (out.astype(np.int64) & 1).astype(np.uint8)


def row_reduce(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = np.array(mat, dtype=np.uint8) & 1
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        hit = np.nonzero(m[:, c])[0]
        hit = hit[hit != r]
        if hit.size:
            m[hit] ^= m[r]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(mat: np.ndarray) -> int:
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0
    return len(row_reduce(mat)[1])


def nullspace(mat: np.ndarray) -> np.ndarray:
    """Basis (as rows) of {v : mat @ v = 0 mod 2}."""
    mat = np.asarray(mat, dtype=np.uint8)
    cols = mat.shape[1]
    red, pivots = row_reduce(mat)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, c in enumerate(pivots):
            if red[i, f]:
                basis[k, c] = 1
    return basis


def in_rowspace(mat: np.ndarray, v: np.ndarray) -> bool:
    return rank(np.vstack([mat, v])) == rank(mat)
