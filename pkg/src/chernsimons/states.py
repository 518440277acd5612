"""Dense n-torus states, gate matrices and the elementary tensors.

A :class:`DenseState` holds ``k**n`` exact amplitudes as a tensor of shape
``(k,) * n`` (row-major, first site slowest).  Each site carries an
orientation; a negatively oriented site stores amplitudes in the dual basis,
and gluing pairs ``|j>`` with ``<j|`` directly.

States and gates are unnormalized throughout; comparisons that only make
sense up to a global scalar go through :func:`proportional`.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .contraction import contract_labeled
from .cyclo import CycArray, CycScalar, Level, LevelMismatchError, multiply, proportional, tensordot


class OrientationError(ValueError):
    """Raised when legs of the wrong orientation are glued or acted on."""


@dataclass(frozen=True)
class Site:
    name: str
    positive: bool = True

    def flipped(self) -> "Site":
        return Site(self.name, not self.positive)

    def __str__(self):
        return f"{self.name}{'+' if self.positive else '-'}"


@dataclass(frozen=True, eq=False)
class DenseState:
    """Unnormalized state on ``len(sites)`` tori with exact amplitudes."""

    level: Level
    sites: tuple[Site, ...]
    amps: CycArray
    tags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(_as_site(s) for s in self.sites))
        n = len(self.sites)
        if self.amps.shape != (self.level.k,) * n:
            raise ValueError(f"amplitude tensor has shape {self.amps.shape}, expected {(self.level.k,) * n}")
        names = [s.name for s in self.sites]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate site names: {names}")

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def k(self) -> int:
        return self.level.k

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.sites]

    @property
    def vector(self) -> CycArray:
        """Amplitudes as a flat length ``k**n`` vector."""
        return self.amps.reshape(self.k**self.n)

    @property
    def is_zero(self) -> bool:
        return self.amps.is_zero()

    def index(self, site: str | int) -> int:
        if isinstance(site, (int, np.integer)):
            if not 0 <= site < self.n:
                raise IndexError(f"site index {site} out of range for {self.n} sites")
            return int(site)
        try:
            return self.names.index(site)
        except ValueError:
            raise KeyError(f"no site named {site!r}; sites are {self.names}") from None

    def amplitude(self, *values: int) -> CycScalar:
        return self.amps[tuple(v % self.k for v in values)]

    def to_complex(self) -> np.ndarray:
        return self.amps.to_complex()

    def with_tags(self, *tags: str) -> "DenseState":
        return DenseState(self.level, self.sites, self.amps, self.tags | frozenset(tags))

    def rename(self, names: Sequence[str]) -> "DenseState":
        return DenseState(self.level, [Site(n, s.positive) for n, s in zip(names, self.sites)], self.amps, self.tags)

    def permute(self, order: Sequence[str | int]) -> "DenseState":
        idx = [self.index(o) for o in order]
        if sorted(idx) != list(range(self.n)):
            raise ValueError("permutation must list every site once")
        return DenseState(self.level, [self.sites[i] for i in idx], self.amps.transpose(idx), self.tags)

    def proportional(self, other: "DenseState") -> bool:
        return self.n == other.n and proportional(self.amps, other.amps)

    def __repr__(self):
        return f"DenseState(k={self.k}, sites=[{', '.join(map(str, self.sites))}])"


def _as_site(s) -> Site:
    if isinstance(s, Site):
        return s
    if isinstance(s, str):
        return Site(s)
    name, positive = s
    return Site(name, bool(positive))


def _default_names(n: int, start: int = 0) -> list[str]:
    return [f"s{i}" for i in range(start, start + n)]


def _check(a: Level, b: Level):
    if a != b:
        raise LevelMismatchError(f"level mismatch: k={a.k} vs k={b.k}")


# constructors ----------------------------------------------------------------

def basis_state(level: Level, values: Sequence[int], names: Sequence[str] | None = None) -> DenseState:
    """Computational basis state ``|j_1, ..., j_n>``."""
    n = len(values)
    c = np.zeros((level.k,) * n + (level.dim,), dtype=np.int64)
    c[tuple(v % level.k for v in values) + (0,)] = 1
    return DenseState(level, names or _default_names(n), CycArray(level, c))


def state_from_ints(level: Level, values, names: Sequence[str] | None = None) -> DenseState:
    """State whose amplitudes are the given integers (array of shape (k,)*n)."""
    a = CycArray.from_ints(level, np.asarray(values))
    return DenseState(level, names or _default_names(a.ndim), a)


def state_from_array(level: Level, amps: CycArray, names: Sequence[str] | None = None) -> DenseState:
    return DenseState(level, names or _default_names(amps.ndim), amps)


def fusion_state(level: Level) -> DenseState:
    """The fusion tensor viewed as a tripartite state on sites (in1-, in2-, out+)."""
    g = fusion_tensor(level)
    return g.as_state(["in1", "in2"], ["out"])


# tensor operations -----------------------------------------------------------

def tensor_product(a: DenseState, b: DenseState) -> DenseState:
    _check(a.level, b.level)
    x = a.amps.reshape(a.amps.shape + (1,) * b.n)
    y = b.amps.reshape((1,) * a.n + b.amps.shape)
    return DenseState(a.level, a.sites + b.sites, multiply(x, y), a.tags | b.tags)


def dual(s: DenseState) -> DenseState:
    """Orientation reversal: conjugate the amplitudes and flip every site."""
    return DenseState(s.level, [x.flipped() for x in s.sites], s.amps.conj(), s.tags)


def reverse_orientation(s: DenseState, site: str | int) -> DenseState:
    """Flip one site through the identification ``<j| <-> |j*>``, ``j* = -j``.

    This is linear (no conjugation): the amplitude at ``j`` moves to ``-j``.
    """
    i = s.index(site)
    c = np.take(s.amps.coeffs, (-np.arange(s.k)) % s.k, axis=i)
    sites = list(s.sites)
    sites[i] = sites[i].flipped()
    return DenseState(s.level, sites, CycArray(s.level, c, s.amps.kden, normalize=False), s.tags)


def contract_pair(s: DenseState, site_a: str | int, site_b: str | int) -> DenseState:
    """Glue two oppositely oriented sites of one state (sum over the shared index)."""
    i, j = s.index(site_a), s.index(site_b)
    if i == j:
        raise ValueError("cannot contract a site with itself")
    if s.sites[i].positive == s.sites[j].positive:
        raise OrientationError(
            f"sites {s.sites[i]} and {s.sites[j]} have the same orientation; gluing needs opposite ones"
        )
    c = np.trace(s.amps.coeffs, axis1=i, axis2=j)
    rest = [x for n, x in enumerate(s.sites) if n not in (i, j)]
    return DenseState(s.level, rest, CycArray(s.level, c, s.amps.kden), s.tags)


def glue(a: DenseState, b: DenseState, pairs: Iterable[tuple[str, str]]) -> DenseState:
    """Tensor ``a`` with ``b`` and contract each (site of a, site of b) pair."""
    out = tensor_product(a, b)
    for x, y in pairs:
        out = contract_pair(out, x, y)
    return out


def inner(a: DenseState, b: DenseState) -> CycScalar:
    """``<a|b>`` with ``a`` conjugated; sites are matched by position."""
    _check(a.level, b.level)
    if a.n != b.n:
        raise ValueError(f"site count mismatch: {a.n} vs {b.n}")
    ax = list(range(a.n))
    return tensordot(a.amps.conj(), b.amps, (ax, ax))


def norm_squared(s: DenseState) -> CycScalar:
    return inner(s, s)


def apply_gate(g: "GateMatrix", s: DenseState, legs: Sequence[str | int], out_names: Sequence[str] | None = None) -> DenseState:
    """Act with ``g`` on the listed (positively oriented) legs of ``s``.

    When ``g`` is square the outputs replace the inputs in place; otherwise
    the outputs are inserted where the first input leg was, with names from
    ``out_names``.
    """
    _check(g.level, s.level)
    idx = [s.index(x) for x in legs]
    if len(idx) != g.nin:
        raise ValueError(f"gate takes {g.nin} legs, got {len(idx)}")
    if len(set(idx)) != len(idx):
        raise ValueError("legs must be distinct")
    for i in idx:
        if not s.sites[i].positive:
            raise OrientationError(f"site {s.sites[i]} is negatively oriented; gates act on kets")
    in_axes = list(range(g.nout, g.nout + g.nin))
    res = tensordot(g.tensor, s.amps, (in_axes, idx))
    rest = [n for n in range(s.n) if n not in idx]
    if g.nin == g.nout and out_names is None:
        # res axes: outputs then remaining sites; put outputs back in place
        order = idx + rest
        perm = [order.index(n) for n in range(s.n)]
        return DenseState(s.level, s.sites, res.transpose(perm), s.tags)
    if out_names is None:
        out_names = [f"{s.sites[idx[0]].name}_{m}" for m in range(g.nout)]
    if len(out_names) != g.nout:
        raise ValueError("need one name per output leg")
    pos = min(idx)
    before = [n for n in rest if n < pos]
    after = [n for n in rest if n > pos]
    sites = [s.sites[n] for n in before] + [Site(nm) for nm in out_names] + [s.sites[n] for n in after]
    # res axes: outputs, then rest in order
    perm = [g.nout + rest.index(n) for n in before] + list(range(g.nout)) + [g.nout + rest.index(n) for n in after]
    return DenseState(s.level, sites, res.transpose(perm), s.tags)


# gates ------------------------------------------------------------------------

class GateMatrix:
    """Linear map from ``nin`` tori to ``nout`` tori.

    ``tensor`` has shape ``(k,) * nout + (k,) * nin``; the flattened
    ``(out, in)`` matrix is row-major in both groups.
    """

    def __init__(self, level: Level, nin: int, nout: int, tensor: CycArray, name: str = ""):
        if tensor.shape != (level.k,) * (nout + nin):
            raise ValueError(f"gate tensor has shape {tensor.shape}, expected {(level.k,) * (nout + nin)}")
        self.level = level
        self.nin = nin
        self.nout = nout
        self.tensor = tensor
        self.name = name

    @property
    def k(self) -> int:
        return self.level.k

    @property
    def entries(self) -> CycArray:
        """Matrix of shape ``(k**nout, k**nin)``."""
        return self.tensor.reshape(self.k**self.nout, self.k**self.nin)

    @classmethod
    def from_matrix(cls, level: Level, nin: int, nout: int, matrix: CycArray, name: str = "") -> "GateMatrix":
        return cls(level, nin, nout, matrix.reshape((level.k,) * (nout + nin)), name)

    @classmethod
    def identity(cls, level: Level, n: int = 1) -> "GateMatrix":
        eye = np.eye(level.k**n, dtype=np.int64)
        return cls.from_matrix(level, n, n, CycArray.from_ints(level, eye), "I")

    @classmethod
    def diagonal_omega(cls, level: Level, exps: Sequence[int], name: str = "") -> "GateMatrix":
        k = level.k
        exps = np.asarray(exps)
        mask = np.eye(k, dtype=bool)
        m = CycArray.from_omega_exponents(level, np.broadcast_to(exps[:, None], (k, k)), mask)
        return cls.from_matrix(level, 1, 1, m, name)

    def __matmul__(self, other: "GateMatrix") -> "GateMatrix":
        """Composition ``self . other`` (apply ``other`` first)."""
        _check(self.level, other.level)
        if self.nin != other.nout:
            raise ValueError(f"cannot compose: {self.nin} inputs vs {other.nout} outputs")
        a_in = list(range(self.nout, self.nout + self.nin))
        b_out = list(range(other.nout))
        t = tensordot(self.tensor, other.tensor, (a_in, b_out))
        return GateMatrix(self.level, other.nin, self.nout, t, f"{self.name}.{other.name}")

    def kron(self, other: "GateMatrix") -> "GateMatrix":
        """Tensor product; legs of ``self`` come first."""
        _check(self.level, other.level)
        x = self.tensor.reshape(self.tensor.shape + (1,) * other.tensor.ndim)
        y = other.tensor.reshape((1,) * self.tensor.ndim + other.tensor.shape)
        t = multiply(x, y)
        # axes: s_out s_in o_out o_in -> s_out o_out s_in o_in
        so, si, oo, oi = self.nout, self.nin, other.nout, other.nin
        perm = (
            list(range(so))
            + list(range(so + si, so + si + oo))
            + list(range(so, so + si))
            + list(range(so + si + oo, so + si + oo + oi))
        )
        return GateMatrix(self.level, si + oi, so + oo, t.transpose(perm), f"{self.name}x{other.name}")

    def adjoint(self) -> "GateMatrix":
        perm = list(range(self.nout, self.nout + self.nin)) + list(range(self.nout))
        return GateMatrix(self.level, self.nout, self.nin, self.tensor.conj().transpose(perm), f"{self.name}^dag")

    def power(self, m: int) -> "GateMatrix":
        if self.nin != self.nout:
            raise ValueError("only square gates have powers")
        out = GateMatrix.identity(self.level, self.nin)
        for _ in range(m):
            out = self @ out
        return out

    def scale(self, c) -> "GateMatrix":
        return GateMatrix(self.level, self.nin, self.nout, self.tensor * c, self.name)

    def equals(self, other: "GateMatrix") -> bool:
        return (self.nin, self.nout) == (other.nin, other.nout) and self.tensor.equals(other.tensor)

    def proportional(self, other: "GateMatrix") -> bool:
        return (self.nin, self.nout) == (other.nin, other.nout) and proportional(self.tensor, other.tensor)

    def is_unitary(self) -> bool:
        """Exact ``M^dag M = I``."""
        return (self.adjoint() @ self).equals(GateMatrix.identity(self.level, self.nin))

    def is_isometry_up_to_scalar(self) -> bool:
        """``M^dag M`` proportional to the identity."""
        g = self.adjoint() @ self
        return g.proportional(GateMatrix.identity(self.level, self.nin))

    def as_state(self, in_names: Sequence[str] | None = None, out_names: Sequence[str] | None = None) -> DenseState:
        """Choi form: outputs as positive sites, inputs as negative ones (inputs first)."""
        in_names = list(in_names or [f"in{i + 1}" for i in range(self.nin)])
        out_names = list(out_names or [f"out{i + 1}" for i in range(self.nout)])
        perm = list(range(self.nout, self.nout + self.nin)) + list(range(self.nout))
        sites = [Site(n, False) for n in in_names] + [Site(n, True) for n in out_names]
        return DenseState(self.level, sites, self.tensor.transpose(perm))

    def __repr__(self):
        return f"GateMatrix({self.name or '?'}, k={self.k}, {self.nin}->{self.nout})"


def modular_gate(level: Level, kind: str) -> GateMatrix:
    """The single-torus gates S, T, X, Z, P and the adjoints Sdag, Tdag.

    ``S_jj' = omega^(j j') / sqrt(k)``, ``T_jj = omega^(j (j + k) / 2)``,
    ``X|j> = |j+1>``, ``Z|j> = omega^j |j>`` and ``P = Z^((k-1)/2) T``.
    """
    k = level.k
    j = np.arange(k)
    if kind == "S":
        m = CycArray.from_omega_exponents(level, np.outer(j, j)) * level.inv_sqrt_k()
        return GateMatrix.from_matrix(level, 1, 1, m, "S")
    if kind == "Sdag":
        return modular_gate(level, "S").adjoint()
    if kind == "T":
        return GateMatrix.diagonal_omega(level, (j * (j + k)) // 2, "T")
    if kind == "Tdag":
        return modular_gate(level, "T").adjoint()
    if kind == "X":
        return GateMatrix.from_matrix(level, 1, 1, CycArray.from_ints(level, np.roll(np.eye(k, dtype=np.int64), 1, axis=0)), "X")
    if kind == "Z":
        return GateMatrix.diagonal_omega(level, j, "Z")
    if kind == "P":
        z = modular_gate(level, "Z").power((k - 1) // 2)
        p = z @ modular_gate(level, "T")
        p.name = "P"
        return p
    raise ValueError(f"unknown gate kind {kind!r}")


def fusion_tensor(level: Level) -> GateMatrix:
    """``N^{j3}_{j1 j2} = [j3 = j1 + j2 mod k]`` as a map from two tori to one."""
    k = level.k
    j = np.arange(k)
    t = (j[:, None, None] == (j[None, :, None] + j[None, None, :]) % k).astype(np.int64)
    return GateMatrix(level, 2, 1, CycArray.from_ints(level, t), "N")


def cofusion_tensor(level: Level) -> GateMatrix:
    """Adjoint of the fusion tensor: ``|j> -> sum_{a+b=j} |a, b>``."""
    g = fusion_tensor(level).adjoint()
    g.name = "N^dag"
    return g


def copy_tensor(level: Level) -> GateMatrix:
    """Fourier-conjugated cofusion, proportional to ``sum_j |j, j><j|``."""
    s = modular_gate(level, "S")
    sd = modular_gate(level, "Sdag")
    g = s.kron(s) @ cofusion_tensor(level) @ sd
    g.name = "copy"
    return g


def _net_gate(level: Level, nodes, inputs, outputs, name: str) -> GateMatrix:
    """Contract a small list of (gate, in_labels, out_labels) nodes into a gate."""
    tensors, labels = [], []
    for g, ins, outs in nodes:
        tensors.append(g.tensor)
        labels.append(list(outs) + list(ins))
    t = contract_labeled(tensors, labels, list(outputs) + list(inputs))
    return GateMatrix(level, len(inputs), len(outputs), t, name)


def c_add(level: Level) -> GateMatrix:
    """Controlled addition built from a copy and a fusion tensor.

    Network: input ``j`` passes ``Sdag``, a cofusion node and ``S`` on both
    branches (the copy tensor); one copy is the control output, the other
    fuses with input ``l`` to give ``l + j``.  Proportional to
    ``sum |j, l + j><j, l|``.
    """
    S, Sd = modular_gate(level, "S"), modular_gate(level, "Sdag")
    nodes = [
        (Sd, ["j"], ["a"]),
        (cofusion_tensor(level), ["a"], ["b", "c"]),
        (S, ["b"], ["jout"]),
        (S, ["c"], ["d"]),
        (fusion_tensor(level), ["d", "l"], ["lout"]),
    ]
    return _net_gate(level, nodes, ["j", "l"], ["jout", "lout"], "C_ADD")


def c_add_direct(level: Level) -> GateMatrix:
    """Tabulated ``sum_{j,l} |j, l + j><j, l|`` (oracle for :func:`c_add`)."""
    k = level.k
    t = np.zeros((k, k, k, k), dtype=np.int64)
    for j in range(k):
        for l in range(k):
            t[j, (l + j) % k, j, l] = 1
    return GateMatrix(level, 2, 2, CycArray.from_ints(level, t), "C_ADD")


def perfect_tensor(level: Level) -> GateMatrix:
    """Two controlled additions glued into ``sum |i+j, i+2j><i, j|``.

    Inputs are ``(i, j)``; ``j`` is copied, one copy fuses with ``i`` to give
    ``i + j``, which is copied again; one of those copies fuses with the
    other ``j`` to give ``i + 2j``.  Outputs are ``(i + j, i + 2j)``.
    """
    S, Sd = modular_gate(level, "S"), modular_gate(level, "Sdag")
    cof, fus = cofusion_tensor(level), fusion_tensor(level)
    nodes = [
        (Sd, ["j"], ["a1"]),
        (cof, ["a1"], ["a2", "a3"]),
        (S, ["a2"], ["j1"]),
        (S, ["a3"], ["j2"]),
        (fus, ["i", "j2"], ["s"]),
        (Sd, ["s"], ["b1"]),
        (cof, ["b1"], ["b2", "b3"]),
        (S, ["b2"], ["sum1"]),
        (S, ["b3"], ["s2"]),
        (fus, ["j1", "s2"], ["sum2"]),
    ]
    return _net_gate(level, nodes, ["i", "j"], ["sum1", "sum2"], "perfect")


def perfect_direct(level: Level) -> GateMatrix:
    k = level.k
    t = np.zeros((k, k, k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            t[(i + j) % k, (i + 2 * j) % k, i, j] = 1
    return GateMatrix(level, 2, 2, CycArray.from_ints(level, t), "perfect")


def bipartition_maps(g: GateMatrix) -> list[tuple[tuple[int, ...], GateMatrix]]:
    """Every split of the legs of ``g`` into a smaller input side and the rest.

    Legs are numbered outputs first, then inputs.  Each entry pairs the input
    leg numbers with the reshaped map; for an even number of legs every
    balanced split appears once.
    """
    from itertools import combinations

    n = g.nin + g.nout
    t = g.tensor
    out = []
    seen = set()
    for r in range(1, n // 2 + 1):
        for side in combinations(range(n), r):
            rest = tuple(x for x in range(n) if x not in side)
            key = frozenset(side) if 2 * r != n else frozenset([frozenset(side), frozenset(rest)])
            if key in seen:
                continue
            seen.add(key)
            perm = list(rest) + list(side)
            m = GateMatrix(g.level, len(side), len(rest), t.transpose(perm), f"{g.name}{side}")
            out.append((side, m))
    return out


def is_perfect(g: GateMatrix) -> bool:
    """Every split with the smaller side as input is an isometry up to scalar."""
    return all(m.is_isometry_up_to_scalar() for _, m in bipartition_maps(g))
