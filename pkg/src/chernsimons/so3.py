"""Fusion data of the SO(3) theory: integer spins of level-r SU(2).

Anyons are the spins ``0 .. (r - 1) / 2``; the corresponding theory has level
``k = r + 3``.  The S-matrix is the restriction of the SU(2)_r one to integer
spins, ``S_ab ∝ sin(pi (2a + 1)(2b + 1) / (r + 2))``, renormalized to be
orthogonal.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cyclo import _is_prime

ROUNDING_TOL = 1e-6


def _check_r(r: int):
    if not (isinstance(r, (int, np.integer)) and r >= 5 and r % 2 == 1 and _is_prime(int(r))):
        raise ValueError(f"r must be an odd prime >= 5, got {r}")


@dataclass(frozen=True, eq=False)
class FusionTable:
    r: int
    N: np.ndarray  # N[i, j, l] in {0, 1}

    @property
    def anyons(self) -> list[int]:
        return list(range(self.N.shape[0]))

    @property
    def level(self) -> int:
        return self.r + 3


def fusion_rules(r: int) -> FusionTable:
    """``N_ij^l = 1`` iff ``|i - j| <= l <= min(i + j, r - i - j)``."""
    _check_r(r)
    m = (r + 1) // 2
    a = np.arange(m)
    i, j, l = np.meshgrid(a, a, a, indexing="ij")
    N = ((np.abs(i - j) <= l) & (l <= np.minimum(i + j, r - i - j))).astype(np.int64)
    return FusionTable(int(r), N)


def so3_s_matrix(r: int) -> np.ndarray:
    _check_r(r)
    a = np.arange((r + 1) // 2)
    S = np.sin(np.pi * np.outer(2 * a + 1, 2 * a + 1) / (r + 2))
    return S / np.linalg.norm(S[0])


def _round(x: float, what: str) -> int:
    n = round(x)
    if abs(x - n) >= ROUNDING_TOL:
        raise ArithmeticError(f"{what} = {x!r} is not within {ROUNDING_TOL} of an integer")
    return int(n)


def verlinde_fusion(r: int) -> np.ndarray:
    """``N_ij^l = sum_a S_ia S_ja S_la / S_0a``, rounded to integers."""
    S = so3_s_matrix(r)
    raw = np.einsum("ia,ja,la,a->ijl", S, S, S, 1.0 / S[0])
    out = np.rint(raw)
    if np.abs(raw - out).max() >= ROUNDING_TOL:
        raise ArithmeticError("Verlinde fusion coefficients are not integers")
    return out.astype(np.int64)


def verlinde_dim(r: int, genus: int) -> int:
    """Dimension of the genus-``g`` Hilbert space, ``sum_a S_0a^(2 - 2g)``."""
    if genus < 0:
        raise ValueError(f"genus must be nonnegative, got {genus}")
    S = so3_s_matrix(r)
    return _round(float(np.sum(S[0] ** (2 - 2 * genus))), f"dim H(genus {genus})")


def fusion_square_sum(r: int) -> int:
    """``sum_{i,j,l} (N_ij^l)^2``."""
    return int((fusion_rules(r).N ** 2).sum())


def dimension_inequality(r: int) -> bool:
    """``dim H_T2^(x2) = ((r + 1) / 2)^2 <= dim H_Sigma2``."""
    m = (r + 1) // 2
    return m * m <= verlinde_dim(r, 2)
