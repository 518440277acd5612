"""Replica partition functions, flat-spectrum entropy and the GHZ count.

A replica partition function glues ``m`` copies of a state to ``m`` copies
of its dual, with the copies in each region permuted:

    Z = sum_{J_1..J_m} prod_c psi(J_c) conj(psi(J'_c)),
    J'_c restricted to region R equal to J_{pi_R(c)} restricted to R.

For ``m = 1`` this is ``<s|s>``; a swap on ``A`` gives ``tr rho_A^2``; the
cyclic spec on three regions gives the tripartite quantity used by
:func:`ghz_count`.
"""
from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .contraction import contract_labeled
from .cyclo import CycArray, CycScalar, tensordot
from .stabilizer import NotStabilizerError, ZeroStateError, is_stabilizer
from .states import DenseState

INTEGER_TOL = 1e-9

Region = Iterable[str | int]


@dataclass(frozen=True)
class ReplicaSpec:
    """``copies`` replicas; ``perms[r]`` permutes the copies on ``regions[r]``.

    A permutation is the tuple of images ``(pi(0), ..., pi(m - 1))``.
    """

    copies: int
    regions: tuple[tuple[int, ...], ...]
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = self.copies
        if m not in (1, 2, 3):
            raise ValueError(f"copies must be 1, 2 or 3, got {m}")
        if len(self.regions) != len(self.perms):
            raise ValueError("one permutation per region is required")
        for p in self.perms:
            if sorted(p) != list(range(m)):
                raise ValueError(f"{p} is not a permutation of {m} copies")

    def check_partition(self, n: int):
        seen = sorted(i for r in self.regions for i in r)
        if seen != list(range(n)):
            raise ValueError(f"regions {self.regions} do not partition the {n} sites")

    @classmethod
    def identity(cls, n: int) -> "ReplicaSpec":
        return cls(1, (tuple(range(n)),), ((0,),))

    @classmethod
    def swap(cls, n: int, region: Sequence[int]) -> "ReplicaSpec":
        a = tuple(sorted(region))
        rest = tuple(i for i in range(n) if i not in a)
        return cls(2, (a, rest), ((1, 0), (0, 1)))

    @classmethod
    def cyclic(cls, n: int, a: Sequence[int], b: Sequence[int], c: Sequence[int]) -> "ReplicaSpec":
        """``1 -> 2 -> 3`` on ``a``, ``1 -> 3 -> 2`` on ``b``, identity on ``c``."""
        return cls(3, (tuple(a), tuple(b), tuple(c)), ((1, 2, 0), (2, 0, 1), (0, 1, 2)))


def _indices(s: DenseState, region: Region) -> tuple[int, ...]:
    idx = tuple(sorted({s.index(x) for x in region}))
    return idx


def replica_z(s: DenseState, spec: ReplicaSpec) -> CycScalar:
    """Exact replica partition function of ``s`` for ``spec``."""
    spec.check_partition(s.n)
    owner = {}
    for r, sites in enumerate(spec.regions):
        for x in sites:
            owner[x] = spec.perms[r]
    m = spec.copies
    psi, psi_bar = s.amps, s.amps.conj()
    tensors, labels = [], []
    for c in range(m):
        tensors.append(psi)
        labels.append([(c, x) for x in range(s.n)])
    for c in range(m):
        tensors.append(psi_bar)
        labels.append([(owner[x][c], x) for x in range(s.n)])
    if s.n == 0:
        out = psi
        for t in tensors[1:]:
            out = out * t
        return out
    return contract_labeled(tensors, labels, [])


def _positive_real(z: CycScalar, what: str) -> float:
    v = complex(z.to_complex())
    if abs(v.imag) > INTEGER_TOL * max(1.0, abs(v.real)) or v.real <= 0:
        raise ArithmeticError(f"{what} = {v} is not a positive real number")
    return v.real


def _exact_log_k(num: CycScalar, den: CycScalar, k: int) -> int | None:
    """``e`` with ``num = k**e * den`` exactly, or None."""
    e = round(math.log(_positive_real(num, "numerator") / _positive_real(den, "denominator"), k))
    lhs = num * k ** max(0, -e)
    rhs = den * k ** max(0, e)
    return e if lhs == rhs else None


@dataclass(frozen=True)
class Entropy:
    """Entanglement entropy in dits (log base k) and nats."""

    dits: float
    nats: float
    exact_dits: int | None

    @property
    def integer_dits(self) -> int:
        if self.exact_dits is None:
            raise ArithmeticError(f"entropy {self.dits} dits is not an integer")
        return self.exact_dits


def flat_entropy(s: DenseState, region: Region) -> Entropy:
    """``-log(Z_2 / Z_1^2)`` with ``Z_2`` the swap replica on ``region``.

    ``exact_dits`` is set when ``Z_1^2 / Z_2`` is exactly an integer power
    of ``k``, which is the case for every stabilizer state.
    """
    if s.is_zero:
        raise ZeroStateError("entropy of the zero state is undefined")
    a = _indices(s, region)
    z1 = replica_z(s, ReplicaSpec.identity(s.n))
    z2 = replica_z(s, ReplicaSpec.swap(s.n, a))
    r1, r2 = _positive_real(z1, "Z_1"), _positive_real(z2, "Z_2")
    nats = 2 * math.log(r1) - math.log(r2)
    dits = nats / math.log(s.k)
    return Entropy(dits, nats, _exact_log_k(z1 * z1, z2, s.k))


def ghz_count(s: DenseState, a: Region, b: Region, c: Region, check: bool = True) -> int:
    """Number of GHZ triples distillable from the stabilizer state ``s``.

    ``g = S(A) + S(B) + S(C) + log_k(Z_3 / Z_1^3)`` in dits, where ``Z_3``
    is the cyclic three-copy replica.
    """
    if s.is_zero:
        raise ZeroStateError("GHZ count of the zero state is undefined")
    ia, ib, ic = (_indices(s, r) for r in (a, b, c))
    spec = ReplicaSpec.cyclic(s.n, ia, ib, ic)
    spec.check_partition(s.n)
    if check and not is_stabilizer(s):
        raise NotStabilizerError("the GHZ count formula applies to stabilizer states only")
    z1 = replica_z(s, ReplicaSpec.identity(s.n))
    z3 = replica_z(s, spec)
    total = 0
    for r in (ia, ib, ic):
        total += flat_entropy(s, r).integer_dits
    e = _exact_log_k(z3, z1 * z1 * z1, s.k)
    if e is None:
        raise ArithmeticError("Z_3 / Z_1^3 is not an integer power of k")
    g = total + e
    if g < 0:
        raise ArithmeticError(f"negative GHZ count {g}")
    return g


def reduced_density(s: DenseState, region: Region) -> CycArray:
    """Unnormalized ``rho_A`` as a ``k**|A| x k**|A|`` exact matrix."""
    a = _indices(s, region)
    rest = [i for i in range(s.n) if i not in a]
    rho = tensordot(s.amps, s.amps.conj(), (rest, rest))
    d = s.k ** len(a)
    return rho.reshape(d, d)


def flat_spectrum_check(s: DenseState, region: Region) -> bool:
    """True iff the nonzero eigenvalues of ``rho_A`` are all equal.

    Decided exactly as ``tr(rho) rho^2 = tr(rho^2) rho``: a positive
    Hermitian matrix satisfies ``rho^2 = lambda rho`` precisely when its
    spectrum is ``{0, lambda}``, in which case
    ``tr(rho^2) rank(rho) = tr(rho)^2``.
    """
    a = _indices(s, region)
    if 2 * len(a) > s.n:
        a = tuple(i for i in range(s.n) if i not in a)
    rho = reduced_density(s, a)
    rho2 = tensordot(rho, rho, ([1], [0]))
    d = rho.shape[0]
    tr1 = sum((rho[i, i] for i in range(d)), s.level.zero())
    tr2 = tensordot(rho, rho, ([0, 1], [1, 0]))
    return (rho2 * tr1).equals(rho * tr2)
