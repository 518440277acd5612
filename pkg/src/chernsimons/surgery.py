"""Surgery presentations: framed links in S^3 compiled into boundary states.

For U(1) at odd level the amplitudes only depend on linking numbers.  With
``Lt = (1 + k^2)/2 * L mod k`` and charges ``j`` on the link components,

    psi(j) ∝ sum_m omega^(-(j, m) . Lt . (j, m))

where ``m`` runs over the surgery components (the weights ``S_l0`` and the
surgery denominator are global scalars and are dropped).  Two independent
routes are provided: :func:`state_from_presentation` sums this brute force,
and :func:`tableau_from_presentation` integrates the surgery variables out
one at a time with quadratic Gauss sums.
"""
from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import modp
from .cyclo import CycArray, CycScalar, Level, legendre
from .stabilizer import AffineQuadratic, StabilizerTableau
from .states import DenseState, Site

log = logging.getLogger(__name__)

BOUNDARY = "boundary"
SURGERY = "surgery"
BRUTE_FORCE_MAX_SURGERY = 8


class IllDefinedError(ValueError):
    """The presentation prepares the zero state or has a vanishing denominator."""


@dataclass(frozen=True)
class Component:
    name: str
    role: str
    rep_label: int | None = None

    def __post_init__(self):
        if self.role not in (BOUNDARY, SURGERY):
            raise ValueError(f"role must be 'boundary' or 'surgery', got {self.role!r}")
        if self.rep_label is not None and self.role != BOUNDARY:
            raise ValueError(f"component {self.name}: rep label only on boundary components")


@dataclass(frozen=True, eq=False)
class SurgeryPresentation:
    """Framed link in S^3; framings sit on the diagonal of ``linking``."""

    level: Level
    components: tuple[Component, ...]
    linking: np.ndarray

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("a presentation needs at least one component")
        names = [c.name for c in comps]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate component names in {names}")
        L = np.array(self.linking, dtype=np.int64).reshape(len(comps), len(comps))
        if not np.array_equal(L, L.T):
            raise ValueError("linking matrix must be symmetric")
        L.setflags(write=False)
        object.__setattr__(self, "linking", L)

    @classmethod
    def build(
        cls,
        level: Level | int,
        components: Sequence[Component | tuple],
        links: Mapping[tuple[str, str], int] | None = None,
        framings: Mapping[str, int] | None = None,
    ) -> "SurgeryPresentation":
        """Convenience constructor from pairwise linking numbers and framings."""
        level = level if isinstance(level, Level) else Level(level)
        comps = [c if isinstance(c, Component) else Component(*c) for c in components]
        idx = {c.name: i for i, c in enumerate(comps)}
        L = np.zeros((len(comps), len(comps)), dtype=np.int64)
        for (a, b), v in (links or {}).items():
            if a == b:
                raise ValueError(f"self-linking of {a} is its framing")
            L[idx[a], idx[b]] = L[idx[b], idx[a]] = v
        for a, f in (framings or {}).items():
            L[idx[a], idx[a]] = f
        return cls(level, tuple(comps), L)

    @property
    def k(self) -> int:
        return self.level.k

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.components]

    @property
    def framings(self) -> np.ndarray:
        return np.diag(self.linking).copy()

    def indices(self, role: str, labeled: bool | None = None) -> list[int]:
        out = []
        for i, c in enumerate(self.components):
            if c.role != role:
                continue
            if labeled is not None and (c.rep_label is not None) != labeled:
                continue
            out.append(i)
        return out

    @property
    def site_indices(self) -> list[int]:
        """Unlabeled boundary components; these become the tori of the state."""
        return self.indices(BOUNDARY, labeled=False)

    @property
    def labeled_indices(self) -> list[int]:
        return self.indices(BOUNDARY, labeled=True)

    @property
    def surgery_indices(self) -> list[int]:
        return self.indices(SURGERY)

    def __repr__(self):
        return f"SurgeryPresentation(k={self.k}, components={self.names})"


@dataclass(frozen=True, eq=False)
class ReducedLinking:
    level: Level
    matrix: np.ndarray


def reduced_linking(p: SurgeryPresentation) -> ReducedLinking:
    """``Lt = (1 + k^2)/2 * L`` reduced entrywise mod k."""
    k = p.k
    factor = (1 + k * k) // 2
    return ReducedLinking(p.level, (factor * p.linking) % k)


def _sign(sign_flip: bool) -> int:
    return 1 if sign_flip else -1


def s3_expectation(p: SurgeryPresentation, sign_flip: bool = False) -> CycScalar:
    """``omega^(-sum_ab j_a Lt_ab j_b)`` for a fully labeled link without surgery."""
    if p.surgery_indices:
        raise ValueError("s3_expectation takes a link in S^3 without surgery components")
    unlabeled = [c.name for c in p.components if c.rep_label is None]
    if unlabeled:
        raise ValueError(f"unlabeled component(s): {unlabeled}")
    j = np.array([c.rep_label for c in p.components], dtype=np.int64)
    Lt = reduced_linking(p).matrix
    e = _sign(sign_flip) * int(j @ Lt @ j)
    return p.level.omega(e)


def _grid(k: int, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    g = np.indices((k,) * n).reshape(n, -1).T
    return g.astype(np.int64)


def state_from_presentation(p: SurgeryPresentation, sign_flip: bool = False) -> DenseState:
    """Boundary state by direct summation over all surgery charges.

    Unlabeled boundary components become the sites (positively oriented,
    in declaration order).  Labeled boundary components are projected onto
    their label and do not appear as sites.  The result may be the zero
    state; check ``state.is_zero``.
    """
    k, level = p.k, p.level
    Lt = reduced_linking(p).matrix
    sg = _sign(sign_flip)
    free, lab, surg = p.site_indices, p.labeled_indices, p.surgery_indices
    if len(surg) > BRUTE_FORCE_MAX_SURGERY:
        raise ValueError(
            f"{len(surg)} surgery components exceed the brute-force limit of {BRUTE_FORCE_MAX_SURGERY};"
            " use tableau_from_presentation")
    ell = np.array([p.components[i].rep_label for i in lab], dtype=np.int64)
    J = _grid(k, len(free))  # (NJ, nf)
    M = _grid(k, len(surg))  # (NM, ns)
    Ljj = Lt[np.ix_(free, free)]
    Ljl = Lt[np.ix_(free, lab)]
    Ljm = Lt[np.ix_(free, surg)]
    Lll = Lt[np.ix_(lab, lab)]
    Llm = Lt[np.ix_(lab, surg)]
    Lmm = Lt[np.ix_(surg, surg)]
    per_j = np.einsum("ia,ab,ib->i", J, Ljj, J) + 2 * J @ (Ljl @ ell) + int(ell @ Lll @ ell)
    per_m = np.einsum("ia,ab,ib->i", M, Lmm, M) + 2 * M @ (Llm.T @ ell)
    cross = 2 * (J @ Ljm) % k  # (NJ, ns)
    counts = np.zeros((len(J), k), dtype=np.int64)
    chunk = max(1, 2_000_000 // max(len(M), 1))
    for s in range(0, len(J), chunk):
        block = (per_j[s:s + chunk, None] % k + (cross[s:s + chunk] @ M.T) % k + per_m[None, :] % k)
        e = (sg * block) % k
        rows = np.arange(block.shape[0])[:, None] * k + e
        counts[s:s + chunk] = np.bincount(rows.ravel(), minlength=block.shape[0] * k).reshape(-1, k)
    amps = CycArray.from_omega_counts(level, counts).reshape((k,) * len(free))
    sites = [Site(p.components[i].name) for i in free]
    tags = set()
    if not level.converse_proven:
        tags.add("converse-unproven")
    state = DenseState(level, sites, amps, frozenset(tags))
    if state.is_zero:
        log.info("presentation %s prepares the zero state", p.names)
    return state


# Gaussian elimination of surgery variables ------------------------------------------

@dataclass
class _Form:
    """``omega^(v.H.v + l.v + c)`` times affine delta constraints, over named variables."""

    k: int
    vars: list
    H: np.ndarray
    lin: np.ndarray
    const: int = 0
    constraints: list = field(default_factory=list)  # (coef over vars, rhs)
    # scalar = sign * G^g_power * k^k_power * omega^const
    legendre_sign: int = 1
    g_power: int = 0
    k_power: int = 0
    zero: bool = False

    def _drop(self, idx: int):
        keep = [i for i in range(len(self.vars)) if i != idx]
        self.vars = [self.vars[i] for i in keep]
        self.H = self.H[np.ix_(keep, keep)]
        self.lin = self.lin[keep]
        self.constraints = [(c[keep], r) for c, r in self.constraints]

    def substitute(self, idx: int, coef: np.ndarray, rhs: int):
        """Replace variable ``idx`` by ``sum_a coef_a v_a + rhs`` (coef_idx = 0)."""
        k = self.k
        n = len(self.vars)
        T = np.eye(n, dtype=np.int64)
        T[idx] = coef
        T[idx, idx] = 0
        t0 = np.zeros(n, dtype=np.int64)
        t0[idx] = rhs
        H, lin = self.H, self.lin
        self.const = (self.const + int(t0 @ H @ t0) + int(lin @ t0)) % k
        self.lin = (T.T @ (2 * H @ t0 + lin)) % k
        self.H = (T.T @ H @ T) % k
        new_cons = []
        for c, r in self.constraints:
            ci = int(c[idx])
            c2 = (c + ci * T[idx]) % k
            c2[idx] = 0
            new_cons.append((c2, (r - ci * rhs) % k))
        self.constraints = new_cons
        self._drop(idx)

    def integrate(self, name):
        """Sum the exponential over variable ``name`` in Z_k."""
        k = self.k
        idx = self.vars.index(name)
        for n_c, (c, r) in enumerate(self.constraints):
            cm = int(c[idx]) % k
            if cm:
                inv = pow(cm, -1, k)
                coef = (-inv * c) % k
                coef[idx] = 0
                del self.constraints[n_c]
                self.substitute(idx, coef, (inv * r) % k)
                return
        alpha = int(self.H[idx, idx]) % k
        beta = (2 * self.H[idx]) % k
        beta[idx] = 0
        beta0 = int(self.lin[idx]) % k
        if alpha:
            # sum_m omega^(alpha m^2 + beta m) = (alpha/k) G omega^(-beta^2 / (4 alpha))
            inv4a = pow(4 * alpha, -1, k)
            self.legendre_sign *= legendre(alpha, k)
            self.g_power += 1
            self.H = (self.H - inv4a * np.outer(beta, beta)) % k
            self.lin = (self.lin - 2 * inv4a * beta0 * beta) % k
            self.const = (self.const - inv4a * beta0 * beta0) % k
            self._drop(idx)
            return
        self.k_power += 1
        if not beta.any():
            if beta0:
                self.zero = True
            self._drop(idx)
            return
        # delta(beta . v + beta0 = 0) on the remaining variables
        self._drop(idx)
        keep = [i for i in range(len(beta)) if i != idx]
        self.constraints.append((beta[keep] % k, (-beta0) % k))

    def settle_constraints(self):
        """Row-reduce the constraints, flagging inconsistency as the zero state."""
        k = self.k
        n = len(self.vars)
        if not self.constraints:
            return np.zeros((0, n), dtype=np.int64), np.zeros(0, dtype=np.int64)
        r = np.array([r for _, r in self.constraints], dtype=np.int64) % k
        if n == 0:
            self.zero = self.zero or bool(r.any())
            return np.zeros((0, 0), dtype=np.int64), np.zeros(0, dtype=np.int64)
        A = np.array([c for c, _ in self.constraints], dtype=np.int64).reshape(-1, n)
        red, piv = modp.rref(np.concatenate([A, r[:, None]], axis=1), k)
        if n in piv:
            self.zero = True
            return A, r
        return red[:, :n], red[:, n]

    def scalar(self, level: Level) -> CycScalar:
        if self.zero:
            return level.zero()
        val = level.omega(self.const) * self.legendre_sign * (level.k ** self.k_power)
        g = level.gauss_sum()
        for _ in range(self.g_power):
            val = val * g
        return val


def _initial_form(p: SurgeryPresentation, sign_flip: bool, keep: Sequence[int], fixed: Sequence[int]) -> _Form:
    k = p.k
    Lt = (_sign(sign_flip) * reduced_linking(p).matrix) % k
    ell = np.array([p.components[i].rep_label for i in fixed], dtype=np.int64)
    H = Lt[np.ix_(keep, keep)] % k
    lin = (2 * Lt[np.ix_(keep, fixed)] @ ell) % k if len(fixed) else np.zeros(len(keep), dtype=np.int64)
    const = int(ell @ Lt[np.ix_(fixed, fixed)] @ ell) % k if len(fixed) else 0
    return _Form(k, list(keep), H.astype(np.int64), lin.astype(np.int64), const)


def affine_quadratic_from_presentation(p: SurgeryPresentation, sign_flip: bool = False) -> AffineQuadratic:
    """Integrate out the surgery charges symbolically.

    Raises:
        IllDefinedError: if the prepared state is the zero state.
    """
    free, lab, surg = p.site_indices, p.labeled_indices, p.surgery_indices
    form = _initial_form(p, sign_flip, free + surg, lab)
    for m in surg:
        form.integrate(m)
        if form.zero:
            raise IllDefinedError("surgery elimination produced an unsatisfiable constraint (zero state)")
    A, r = form.settle_constraints()
    if form.zero:
        raise IllDefinedError("boundary constraints are unsatisfiable (zero state)")
    # half the off-diagonal mass sits on each side already (H symmetric)
    return AffineQuadratic(p.level, A % p.k, r % p.k, form.H % p.k, form.lin % p.k)


def tableau_from_presentation(p: SurgeryPresentation, sign_flip: bool = False) -> StabilizerTableau:
    """Stabilizer tableau of the boundary state, without any dense summation."""
    return affine_quadratic_from_presentation(p, sign_flip).tableau()


def partition_scalar(p: SurgeryPresentation, sign_flip: bool = False) -> CycScalar:
    """Exact ``sum_m omega^(-m.Lt_ss.m)`` over the surgery block alone."""
    surg = p.surgery_indices
    if not surg:
        return p.level.one()
    form = _initial_form(p, sign_flip, surg, [])
    for m in surg:
        form.integrate(m)
        if form.zero:
            break
    form.settle_constraints()
    return form.scalar(p.level)


def partition_scalar_brute(p: SurgeryPresentation, sign_flip: bool = False) -> CycScalar:
    surg = p.surgery_indices
    k = p.k
    Lt = reduced_linking(p).matrix[np.ix_(surg, surg)]
    M = _grid(k, len(surg))
    e = (_sign(sign_flip) * np.einsum("ia,ab,ib->i", M, Lt, M)) % k
    return CycArray.from_omega_counts(p.level, np.bincount(e, minlength=k))


@dataclass(frozen=True)
class WellDefinedness:
    ok: bool
    denominator: CycScalar
    diagnostic: str

    def __bool__(self):
        return self.ok


def well_definedness(p: SurgeryPresentation, sign_flip: bool = False) -> WellDefinedness:
    """Check the surgery denominator and that the prepared state is nonzero."""
    den = partition_scalar(p, sign_flip)
    if den.is_zero():
        return WellDefinedness(False, den, "surgery denominator vanishes")
    try:
        affine_quadratic_from_presentation(p, sign_flip)
    except IllDefinedError as exc:
        return WellDefinedness(False, den, f"prepared state is zero: {exc}")
    return WellDefinedness(True, den, "ok")


def random_presentation(
    level: Level,
    rng: np.random.Generator,
    max_boundary: int = 3,
    max_surgery: int = 3,
    entry_range: int = 3,
    label_prob: float = 0.0,
) -> SurgeryPresentation:
    """Random presentation with at least one unlabeled boundary component."""
    nb = int(rng.integers(1, max_boundary + 1))
    ns = int(rng.integers(0, max_surgery + 1))
    comps = []
    for i in range(nb):
        lab = None
        if i > 0 and rng.random() < label_prob:
            lab = int(rng.integers(0, level.k))
        comps.append(Component(f"b{i}", BOUNDARY, lab))
    comps += [Component(f"m{i}", SURGERY) for i in range(ns)]
    n = nb + ns
    L = rng.integers(-entry_range, entry_range + 1, size=(n, n))
    L = np.triu(L) + np.triu(L, 1).T
    return SurgeryPresentation(level, tuple(comps), L)
