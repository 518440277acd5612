"""Linear algebra over the prime field Z_p on small integer matrices."""
from __future__ import annotations

import numpy as np


def rref(m, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p and the pivot columns."""
    a = np.array(m, dtype=np.int64) % p
    if a.ndim != 2:
        a = a.reshape(-1, a.shape[-1]) if a.size else np.zeros((0, 0), dtype=np.int64)
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        others = np.flatnonzero(a[:, c])
        for o in others:
            if o != r:
                a[o] = (a[o] - a[o, c] * a[r]) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(m, p: int) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref(m, p)[1])


def nullspace(m, p: int, ncols: int | None = None) -> np.ndarray:
    """Basis (as rows) of ``{x : m x = 0 mod p}``."""
    m = np.asarray(m, dtype=np.int64)
    if ncols is None:
        ncols = m.shape[1]
    if m.size == 0:
        return np.eye(ncols, dtype=np.int64)
    r, piv = rref(m, p)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = np.zeros(ncols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(piv):
            v[pc] = (-r[i, f]) % p
        basis.append(v)
    if not basis:
        return np.zeros((0, ncols), dtype=np.int64)
    return np.array(basis, dtype=np.int64)


def solve(m, rhs, p: int) -> np.ndarray | None:
    """One solution of ``m x = rhs mod p`` or None when inconsistent."""
    m = np.asarray(m, dtype=np.int64)
    rhs = np.asarray(rhs, dtype=np.int64)
    ncols = m.shape[1]
    if m.shape[0] == 0:
        return np.zeros(ncols, dtype=np.int64)
    aug = np.concatenate([m, rhs[:, None]], axis=1)
    r, piv = rref(aug, p)
    if ncols in piv:
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = r[i, ncols]
    return x

