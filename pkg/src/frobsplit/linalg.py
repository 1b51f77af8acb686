"""Dense linear algebra over F_p on numpy integer arrays."""

from __future__ import annotations

import numpy as np


def as_matrix(A, p: int, ncols: int | None = None) -> np.ndarray:
    M = np.array(A, dtype=np.int64) % p
    if M.ndim == 1:
        M = M.reshape(1, -1) if M.size else np.zeros((0, ncols or 0), dtype=np.int64)
    if M.size == 0 and ncols is not None:
        M = np.zeros((M.shape[0], ncols), dtype=np.int64)
    return M


def rref(A, p: int):
    """Reduced row echelon form mod p. Returns (R, pivot_columns)."""
    M = as_matrix(A, p).copy()
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            M[[r, k]] = M[[k, r]]
        inv = pow(int(M[r, c]), -1, p)
        M[r] = (M[r] * inv) % p
        col = M[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            M[nzr] = (M[nzr] - np.outer(col[nzr], M[r])) % p
        pivots.append(c)
        r += 1
    return M, pivots


def rank(A, p: int) -> int:
    M = as_matrix(A, p)
    if M.size == 0:
        return 0
    return len(rref(M, p)[1])


def nullspace(A, p: int, ncols: int | None = None) -> np.ndarray:
    """Basis of {x : A x = 0} as rows of the returned array."""
    M = as_matrix(A, p, ncols)
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, pivots = rref(M, p)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, pc in enumerate(pivots):
            basis[i, pc] = (-R[r, f]) % p
    return basis


def solve(A, b, p: int):
    """One solution x of A x = b mod p as a list, or None if inconsistent."""
    M = as_matrix(A, p)
    b = np.array(b, dtype=np.int64).reshape(-1) % p
    if M.shape[0] != b.shape[0]:
        if M.size == 0:
            M = np.zeros((b.shape[0], 0), dtype=np.int64)
        else:
            raise ValueError("shape mismatch in solve")
    n = M.shape[1]
    aug = np.concatenate([M, b.reshape(-1, 1)], axis=1)
    R, pivots = rref(aug, p)
    if n in pivots:
        return None
    x = [0] * n
    for r, pc in enumerate(pivots):
        x[pc] = int(R[r, n])
    return x


def inverse(A, p: int):
    M = as_matrix(A, p)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    aug = np.concatenate([M, np.eye(n, dtype=np.int64)], axis=1)
    R, pivots = rref(aug, p)
    if pivots[:n] != list(range(n)):
        return None
    return R[:, n:]
