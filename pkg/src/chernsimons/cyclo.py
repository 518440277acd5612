"""Exact arithmetic in Z[zeta][1/k], zeta a primitive 4k-th root of unity.

Elements are stored as integer coordinate vectors in the power basis
``1, zeta, ..., zeta^(D-1)`` with ``D = phi(4k) = 2(k-1)``, together with a
denominator exponent ``kden`` so that the value is ``numerator / k**kden``.
The power basis is an integral basis of the cyclotomic integers, so a
numerator is divisible by ``k`` exactly when every coordinate is.

``omega = exp(2 pi i / k)`` is ``zeta**4``, ``i`` is ``zeta**k`` and
``sqrt(k)`` is a unit multiple of the quadratic Gauss sum, so every amplitude
used in this package is representable without rounding.

Bulk data (state amplitudes, gate entries) lives in :class:`CycArray`, which
carries one shared denominator for the whole array.  :class:`CycScalar` is
the zero-dimensional case.
"""
from __future__ import annotations

import functools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

# int64 headroom kept free when estimating the size of contraction results
_INT64_SAFE = 2**62
# below this bound float64 BLAS products of integers are exact
_FLOAT_EXACT = 2**53


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class LevelMismatchError(ValueError):
    """Raised when values from two different levels are combined."""


@dataclass(frozen=True)
class Level:
    """Chern-Simons level ``k``; an odd prime.

    >>> Level(5).residue_mod_4
    1
    """

    k: int

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or isinstance(self.k, bool):
            raise TypeError(f"level must be an integer, got {self.k!r}")
        if self.k < 3 or not _is_prime(int(self.k)):
            raise ValueError(f"level must be an odd prime, got {self.k}")
        object.__setattr__(self, "k", int(self.k))

    @property
    def residue_mod_4(self) -> int:
        return self.k % 4

    @property
    def converse_proven(self) -> bool:
        """Whether only stabilizer states are preparable is established (k = 1 mod 4)."""
        return self.k % 4 == 1

    @property
    def dim(self) -> int:
        """Number of power-basis coordinates, ``phi(4k)``."""
        return 2 * (self.k - 1)

    @property
    def half(self) -> int:
        """Inverse of 2 modulo k."""
        return (self.k + 1) // 2

    @property
    def tables(self) -> "_Tables":
        return _tables(self.k)

    # constructors -------------------------------------------------------
    def zero(self) -> "CycScalar":
        return CycScalar(self, np.zeros(self.dim, dtype=np.int64), 0)

    def one(self) -> "CycScalar":
        return self.integer(1)

    def integer(self, n: int) -> "CycScalar":
        c = np.zeros(self.dim, dtype=np.int64)
        c[0] = n
        return CycScalar(self, c, 0)

    def zeta(self, e: int) -> "CycScalar":
        """The 4k-th root of unity ``zeta**e``."""
        return CycScalar(self, self.tables.roots[e % (4 * self.k)].copy(), 0)

    def omega(self, e: int) -> "CycScalar":
        return omega_power(self, e)

    @property
    def imag_unit(self) -> "CycScalar":
        return self.zeta(self.k)

    def gauss_sum(self) -> "CycScalar":
        """``G_k = sum_m omega**(m*m)``."""
        return quadratic_gauss_sum(self, 1, 0)

    def sqrt_k(self) -> "CycScalar":
        """The positive square root of k."""
        g = self.gauss_sum()
        if self.k % 4 == 1:
            return g
        return -(self.imag_unit * g)

    def inv_sqrt_k(self) -> "CycScalar":
        return self.sqrt_k().divide_k()


class _Tables:
    """Reduction tables for one level, built once and cached."""

    def __init__(self, k: int):
        n4 = 4 * k
        d = 2 * (k - 1)
        # Phi_4k(x) = Phi_k(-x^2) = sum_i (-1)^i x^(2i), monic of degree d
        phi = np.zeros(d + 1, dtype=np.int64)
        for i in range(k):
            phi[2 * i] = (-1) ** i
        roots = np.zeros((n4, d), dtype=np.int64)
        cur = np.zeros(d + 1, dtype=np.int64)
        cur[0] = 1
        for e in range(n4):
            roots[e] = cur[:d]
            nxt = np.zeros(d + 1, dtype=np.int64)
            nxt[1:] = cur[:d]
            if nxt[d]:
                nxt = nxt - nxt[d] * phi
            cur = nxt
        self.k = k
        self.d = d
        self.roots = roots
        self.roots.setflags(write=False)
        p = np.arange(d)
        # product of basis elements zeta^p * zeta^q, already reduced
        self.mul = roots[(p[:, None] + p[None, :]) % n4]
        self.mul_max = int(np.abs(self.mul).max())
        self.conj = roots[(-p) % n4]
        self.shift = np.stack([roots[(p + e) % n4] for e in range(n4)])
        self.omega = roots[(4 * np.arange(k)) % n4]
        self.zeta_complex = np.exp(2j * np.pi * p / n4)


@functools.lru_cache(maxsize=None)
def _tables(k: int) -> _Tables:
    return _Tables(k)


def _as_exact(a: np.ndarray) -> np.ndarray:
    """Return an int64 copy when values fit, otherwise an object array."""
    if a.dtype == object:
        if a.size == 0:
            return a.astype(np.int64)
        m = max(abs(int(x)) for x in a.flat)
        if m < _INT64_SAFE:
            return a.astype(np.int64)
        return a
    return a


def _maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a.flat)
    return int(np.abs(a).max())


class CycArray:
    """An array of exact cyclotomic numbers with a shared power-of-k denominator."""

    __slots__ = ("level", "coeffs", "kden")

    def __init__(self, level: Level, coeffs: np.ndarray, kden: int = 0, *, normalize: bool = True):
        coeffs = np.asarray(coeffs)
        if coeffs.dtype != object:
            coeffs = coeffs.astype(np.int64, copy=False)
        if coeffs.shape[-1:] != (level.dim,):
            raise ValueError(f"trailing axis must have length {level.dim}, got shape {coeffs.shape}")
        self.level = level
        self.coeffs = coeffs
        self.kden = int(kden)
        if normalize:
            self._normalize()

    # construction helpers -------------------------------------------------
    @classmethod
    def zeros(cls, level: Level, shape: tuple[int, ...]) -> "CycArray":
        return _wrap(level, np.zeros(tuple(shape) + (level.dim,), dtype=np.int64), 0)

    @classmethod
    def from_ints(cls, level: Level, values) -> "CycArray":
        values = np.asarray(values)
        c = np.zeros(values.shape + (level.dim,), dtype=values.dtype if values.dtype == object else np.int64)
        c[..., 0] = values
        return _wrap(level, c, 0)

    @classmethod
    def from_omega_exponents(cls, level: Level, exps, mask=None) -> "CycArray":
        """Array with entries ``omega**exps`` (zero where ``mask`` is False)."""
        exps = np.asarray(exps) % level.k
        c = level.tables.omega[exps]
        if mask is not None:
            c = c * np.asarray(mask)[..., None]
        return _wrap(level, c, 0)

    @classmethod
    def from_omega_counts(cls, level: Level, counts) -> "CycArray":
        """Entries ``sum_e counts[..., e] * omega**e``; counts has trailing axis k."""
        counts = np.asarray(counts)
        return _wrap(level, counts @ level.tables.omega, 0)

    @classmethod
    def stack(cls, items: Sequence["CycArray"], axis: int = 0) -> "CycArray":
        items = list(items)
        if not items:
            raise ValueError("cannot stack an empty sequence")
        level = items[0].level
        for it in items:
            _check_level(level, it.level)
        kd = max(it.kden for it in items)
        parts = [it._lift(kd) for it in items]
        if axis < 0:
            axis -= 1
        return _wrap(level, np.stack(parts, axis=axis), kd)

    # basic properties -----------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-1]

    @property
    def ndim(self) -> int:
        return self.coeffs.ndim - 1

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))

    def __len__(self):
        return self.shape[0]

    def _normalize(self):
        k = self.level.k
        c = self.coeffs
        if c.size == 0 or not np.any(c != 0):
            self.kden = 0
            return
        while self.kden > 0 and not np.any(c % k):
            c = c // k
            self.kden -= 1
        if self.kden < 0:
            c = c * (k ** (-self.kden))
            self.kden = 0
        self.coeffs = _as_exact(c) if c.dtype == object else c

    def _lift(self, kden: int) -> np.ndarray:
        """Numerator coordinates rescaled to denominator ``k**kden``."""
        diff = kden - self.kden
        if diff < 0:
            raise ValueError("cannot lower the denominator")
        if diff == 0:
            return self.coeffs
        factor = self.level.k**diff
        c = self.coeffs
        if c.dtype != object and _maxabs(c) * factor >= _INT64_SAFE:
            c = c.astype(object)
        return c * factor

    # element access -------------------------------------------------------
    def __getitem__(self, idx) -> "CycArray":
        if not isinstance(idx, tuple):
            idx = (idx,)
        if any(i is Ellipsis for i in idx):
            raise IndexError("ellipsis indexing is not supported")
        return _wrap(self.level, self.coeffs[idx], self.kden)

    def reshape(self, *shape) -> "CycArray":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return _wrap(self.level, self.coeffs.reshape(tuple(shape) + (self.level.dim,)), self.kden, normalize=False)

    def transpose(self, axes: Sequence[int]) -> "CycArray":
        return _wrap(self.level, self.coeffs.transpose(tuple(axes) + (self.ndim,)), self.kden, normalize=False)

    def flat(self) -> "CycArray":
        return self.reshape(self.size)

    def scalars(self) -> list["CycScalar"]:
        f = self.flat()
        return [f[i] for i in range(f.size)]

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "CycArray":
        if isinstance(other, CycArray):
            _check_level(self.level, other.level)
            return other
        if isinstance(other, (int, np.integer)):
            return self.level.integer(int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        kd = max(self.kden, other.kden)
        a, b = self._lift(kd), other._lift(kd)
        if a.dtype != object and b.dtype != object and _maxabs(a) + _maxabs(b) >= _INT64_SAFE:
            a = a.astype(object)
        return _wrap(self.level, a + b, kd)

    __radd__ = __add__

    def __neg__(self):
        return _wrap(self.level, -self.coeffs, self.kden, normalize=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            c = self.coeffs
            if c.dtype != object and _maxabs(c) * abs(int(other)) >= _INT64_SAFE:
                c = c.astype(object)
            return _wrap(self.level, c * int(other), self.kden)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return multiply(self, other)

    __rmul__ = __mul__

    def divide_k(self, times: int = 1) -> "CycArray":
        """Divide every entry by ``k**times``."""
        return _wrap(self.level, self.coeffs, self.kden + times)

    def conj(self) -> "CycArray":
        """Complex conjugation, ``zeta -> zeta**-1``."""
        return _wrap(self.level, _matmul(self.coeffs, self.level.tables.conj), self.kden)

    def mul_zeta(self, exps) -> "CycArray":
        """Multiply entrywise by ``zeta**exps`` (exps broadcast against the array)."""
        t = self.level.tables
        n4 = 4 * self.level.k
        exps = np.broadcast_to(np.asarray(exps) % n4, self.shape)
        out = np.empty_like(self.coeffs)
        for e in np.unique(exps):
            sel = exps == e
            out[sel] = _matmul(self.coeffs[sel], t.shift[e])
        return _wrap(self.level, out, self.kden, normalize=False)

    def mul_omega(self, exps) -> "CycArray":
        """Multiply entrywise by ``omega**exps``."""
        return self.mul_zeta(4 * (np.asarray(exps) % self.level.k))

    def sum(self, axis=None) -> "CycArray":
        if axis is None:
            axis = tuple(range(self.ndim))
        elif isinstance(axis, int):
            axis = (axis % self.ndim,) if self.ndim else ()
        else:
            axis = tuple(a % self.ndim for a in axis)
        return _wrap(self.level, self.coeffs.sum(axis=axis), self.kden)

    # comparisons ----------------------------------------------------------
    def nonzero_mask(self) -> np.ndarray:
        return np.any(self.coeffs != 0, axis=-1)

    def is_zero(self) -> bool:
        return not np.any(self.coeffs != 0)

    def equals(self, other: "CycArray") -> bool:
        """Exact equality of every entry."""
        other = self._coerce(other)
        if self.shape != other.shape and other.ndim != 0:
            return False
        return (self - other).is_zero()

    def eq_mask(self, other: "CycArray") -> np.ndarray:
        return ~(self - other).nonzero_mask()

    def to_complex(self) -> np.ndarray:
        t = self.level.tables
        c = self.coeffs
        if c.dtype == object:
            c = c.astype(float)
        return (c @ t.zeta_complex) / float(self.level.k) ** self.kden

    def __repr__(self):
        return f"CycArray(k={self.level.k}, shape={self.shape}, kden={self.kden})"

    __hash__ = None  # arrays are compared with equals()


class CycScalar(CycArray):
    """A single exact element of Z[zeta_4k][1/k]."""

    __slots__ = ()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.ndim != 0:
            return NotImplemented
        return (self - other).is_zero()

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash((self.level.k, self.kden, tuple(int(x) for x in self.coeffs)))

    def __complex__(self):
        return complex(self.to_complex())

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        terms = [f"{int(c)}*z^{i}" for i, c in enumerate(self.coeffs) if c]
        body = " + ".join(terms) if terms else "0"
        den = f" / {self.level.k}^{self.kden}" if self.kden else ""
        return f"CycScalar(k={self.level.k}: {body}{den})"

    def to_complex(self) -> complex:
        return complex(super().to_complex())


def _wrap(level: Level, coeffs: np.ndarray, kden: int, normalize: bool = True) -> CycArray:
    cls = CycScalar if np.ndim(coeffs) == 1 else CycArray
    return cls(level, coeffs, kden, normalize=normalize)


def _check_level(a: Level, b: Level):
    if a != b:
        raise LevelMismatchError(f"level mismatch: k={a.k} vs k={b.k}")


def _matmul(c: np.ndarray, table: np.ndarray) -> np.ndarray:
    if c.dtype == object:
        return c @ table.astype(object)
    return c @ table


# ring products --------------------------------------------------------------

def multiply(a: CycArray, b: CycArray) -> CycArray:
    """Entrywise ring product with numpy broadcasting."""
    _check_level(a.level, b.level)
    t = a.level.tables
    ac, bc = a.coeffs, b.coeffs
    bound = _maxabs(ac) * _maxabs(bc) * t.d * t.mul_max
    if bound >= _INT64_SAFE:
        ac, bc, mul = ac.astype(object), bc.astype(object), t.mul.astype(object)
    else:
        mul = t.mul
    # (..., q, r) then contract q against b
    am = np.tensordot(ac, mul, axes=([-1], [0]))
    out = np.einsum("...q,...qr->...r", bc, am) if am.dtype != object else _obj_qr(bc, am)
    return _wrap(a.level, _as_exact(out), a.kden + b.kden)


def _obj_qr(bc: np.ndarray, am: np.ndarray) -> np.ndarray:
    bc, am = np.broadcast_arrays(bc[..., :, None], am)
    return (bc * am).sum(axis=-2)


def tensordot(a: CycArray, b: CycArray, axes: tuple[Sequence[int], Sequence[int]]) -> CycArray:
    """Ring analogue of ``numpy.tensordot``; result axes are a's free then b's free."""
    _check_level(a.level, b.level)
    t = a.level.tables
    ax_a = [x % a.ndim for x in axes[0]]
    ax_b = [x % b.ndim for x in axes[1]]
    if len(ax_a) != len(ax_b):
        raise ValueError("axes lists must have equal length")
    for i, j in zip(ax_a, ax_b):
        if a.shape[i] != b.shape[j]:
            raise ValueError(f"shape mismatch on contracted axes: {a.shape[i]} vs {b.shape[j]}")
    contracted = int(np.prod([a.shape[i] for i in ax_a], dtype=np.int64)) if ax_a else 1
    ac, bc = a.coeffs, b.coeffs
    bound = _maxabs(ac) * _maxabs(bc) * t.d * t.mul_max * max(contracted, 1)
    mul = t.mul
    if bound >= _INT64_SAFE:
        ac, bc, mul = ac.astype(object), bc.astype(object), mul.astype(object)
    elif bound < _FLOAT_EXACT:
        ac, bc, mul = ac.astype(np.float64), bc.astype(np.float64), mul.astype(np.float64)
    # expand the smaller operand against the multiplication table
    if a.size <= b.size:
        am = np.tensordot(ac, mul, axes=([-1], [0]))  # a..., q, r
        q_axis = a.ndim
        res = np.tensordot(am, bc, axes=(ax_a + [q_axis], ax_b + [b.ndim]))
        # res: a_free..., r, b_free...
        n_afree = a.ndim - len(ax_a)
        res = np.moveaxis(res, n_afree, -1)
    else:
        bm = np.tensordot(bc, mul, axes=([-1], [0]))  # b..., q, r
        q_axis = b.ndim
        res = np.tensordot(ac, bm, axes=(ax_a + [a.ndim], ax_b + [q_axis]))
        # res: a_free..., b_free..., r  (r is the last axis of bm)
    if res.dtype == np.float64:
        res = np.rint(res).astype(np.int64)
    return _wrap(a.level, _as_exact(res), a.kden + b.kden)


# spec-level operations -------------------------------------------------------

def omega_power(level: Level, e: int) -> CycScalar:
    """``omega**(e mod k)`` with ``omega = exp(2 pi i / k)``."""
    return level.zeta(4 * (e % level.k))


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def quadratic_gauss_sum(level: Level, a: int, b: int) -> CycScalar:
    """``sum_{m in Z_k} omega**(a m^2 + b m)`` from the closed form.

    For ``a != 0`` this is ``(a/k) * G_k * omega**(-b^2 (4a)^-1)``; for
    ``a == 0`` it is ``k`` when ``b == 0`` and zero otherwise.
    """
    k = level.k
    a %= k
    b %= k
    if a == 0:
        return level.integer(k if b == 0 else 0)
    counts = np.zeros(k, dtype=np.int64)
    np.add.at(counts, (np.arange(k) ** 2) % k, 1)
    g = CycArray.from_omega_counts(level, counts)
    shift = (-b * b * pow(4 * a, -1, k)) % k
    return (g * legendre(a, k)).mul_omega(shift)


def gauss_sum_brute(level: Level, a: int, b: int) -> CycScalar:
    """Direct k-term evaluation of the same sum."""
    k = level.k
    m = np.arange(k)
    counts = np.bincount((a * m * m + b * m) % k, minlength=k)
    return CycArray.from_omega_counts(level, counts)


def to_complex(x: CycArray):
    """Floating-point image; a Python complex for scalars, else an ndarray."""
    return x.to_complex()


def as_array(values: Iterable[CycArray] | CycArray) -> CycArray:
    if isinstance(values, CycArray):
        return values
    return CycArray.stack(list(values))


def proportional(u, v) -> bool:
    """Exact test for ``u = c * v`` with a nonzero scalar ``c``.

    Zero patterns must coincide; with a pivot ``p`` where both are nonzero,
    ``u_i v_p == u_p v_i`` for every ``i`` is equivalent to all pairwise
    cross-ratio conditions.  The zero vector is proportional only to itself.
    """
    u = as_array(u)
    v = as_array(v)
    _check_level(u.level, v.level)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    u = u.flat() if u.ndim != 1 else u
    v = v.flat() if v.ndim != 1 else v
    mu, mv = u.nonzero_mask(), v.nonzero_mask()
    if not np.array_equal(mu, mv):
        return False
    nz = np.flatnonzero(mu)
    if nz.size == 0:
        return True
    p = int(nz[0])
    return (u * v[p]).equals(v * u[p])


def proportionality_constant(u: CycArray, v: CycArray) -> tuple[CycScalar, CycScalar] | None:
    """Return ``(num, den)`` with ``den * u == num * v``, or None if not proportional."""
    if not proportional(u, v):
        return None
    uf, vf = u.flat(), v.flat()
    nz = np.flatnonzero(uf.nonzero_mask())
    if nz.size == 0:
        return None
    p = int(nz[0])
    return uf[p], vf[p]
