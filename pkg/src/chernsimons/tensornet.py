"""Networks of elementary tensors and their exact contraction.

Nodes have named ports with a polarity.  A wire joins an ``out`` port of one
node to an ``in`` port of another and sums the shared index over Z_k.  Open
ports become the sites of the contracted state: an open ``out`` port is a
positively oriented site, an open ``in`` port a negatively oriented one (its
amplitudes are read in the dual basis, as in :meth:`GateMatrix.as_state`).
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .contraction import contract_labeled
from .cyclo import CycArray, Level
from .states import (
    DenseState,
    GateMatrix,
    Site,
    cofusion_tensor,
    fusion_tensor,
    modular_gate,
)

GATE_KINDS = ("S", "Sdag", "T", "Tdag", "X", "Z", "P")
VALUED_KINDS = ("ket", "bra")
NODE_KINDS = ("fusion", "cofusion") + GATE_KINDS + VALUED_KINDS + ("cup", "cap")

# (input ports, output ports); tensor axes are outputs first, then inputs
PORTS: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "fusion": (("in1", "in2"), ("out",)),
    "cofusion": (("in",), ("out1", "out2")),
    "ket": ((), ("out",)),
    "bra": (("in",), ()),
    "cup": ((), ("out1", "out2")),
    "cap": (("in1", "in2"), ()),
    **{g: (("in",), ("out",)) for g in GATE_KINDS},
}


class NetworkError(ValueError):
    """Malformed network: unknown node or port, bad polarity, reused port."""


@dataclass(frozen=True)
class TensorNode:
    name: str
    kind: str
    value: int | None = None

    def __post_init__(self):
        if self.kind not in NODE_KINDS:
            raise NetworkError(f"unknown node kind {self.kind!r}")
        if (self.kind in VALUED_KINDS) != (self.value is not None):
            need = "needs" if self.kind in VALUED_KINDS else "takes no"
            raise NetworkError(f"node {self.name!r} of kind {self.kind} {need} an integer value")

    @property
    def in_ports(self) -> tuple[str, ...]:
        return PORTS[self.kind][0]

    @property
    def out_ports(self) -> tuple[str, ...]:
        return PORTS[self.kind][1]

    @property
    def ports(self) -> tuple[str, ...]:
        return self.out_ports + self.in_ports

    def polarity(self, port: str) -> str:
        if port in self.in_ports:
            return "in"
        if port in self.out_ports:
            return "out"
        raise NetworkError(f"node {self.name!r} ({self.kind}) has no port {port!r}; ports are {list(self.ports)}")


@lru_cache(maxsize=None)
def _cup_tensor(k: int) -> np.ndarray:
    j = np.arange(k)
    return ((j[:, None] + j[None, :]) % k == 0).astype(np.int64)


def node_tensor(level: Level, node: TensorNode) -> CycArray:
    """Exact tensor of a node with axes in :attr:`TensorNode.ports` order."""
    k = level.k
    kind = node.kind
    if kind == "fusion":
        return fusion_tensor(level).tensor
    if kind == "cofusion":
        return cofusion_tensor(level).tensor
    if kind in GATE_KINDS:
        return modular_gate(level, kind).tensor
    if kind in VALUED_KINDS:
        v = np.zeros(k, dtype=np.int64)
        v[node.value % k] = 1
        return CycArray.from_ints(level, v)
    # cup = sum_j |j, -j>; cap is its adjoint, which has the same real entries
    return CycArray.from_ints(level, _cup_tensor(k))


PortRef = tuple[str, str]


class TensorNetwork:
    """Mutable builder for a network of typed nodes."""

    def __init__(self, level: Level):
        self.level = level
        self.nodes: dict[str, TensorNode] = {}
        self.wires: list[tuple[PortRef, PortRef]] = []
        self.open_legs: list[PortRef] = []
        self._used: set[PortRef] = set()

    # construction --------------------------------------------------------------
    def add_node(self, name: str, kind: str, value: int | None = None) -> str:
        if name in self.nodes:
            raise NetworkError(f"duplicate node name {name!r}")
        if "." in name or not name:
            raise NetworkError(f"invalid node name {name!r}")
        self.nodes[name] = TensorNode(name, kind, value)
        return name

    def _port(self, ref: PortRef) -> str:
        node, port = ref
        if node not in self.nodes:
            raise NetworkError(f"unknown node {node!r} in port {node}.{port}")
        return self.nodes[node].polarity(port)

    def _claim(self, ref: PortRef):
        if ref in self._used:
            raise NetworkError(f"port already wired: {ref[0]}.{ref[1]}")
        self._used.add(ref)

    def wire(self, src: PortRef, dst: PortRef):
        """Connect an out port ``src`` to an in port ``dst``."""
        ps, pd = self._port(src), self._port(dst)
        if (ps, pd) != ("out", "in"):
            raise NetworkError(
                f"wire {src[0]}.{src[1]} -> {dst[0]}.{dst[1]} must join an out port to an in port "
                f"(got {ps} -> {pd})"
            )
        self._claim(src)
        self._claim(dst)
        self.wires.append((src, dst))

    def open(self, *refs: PortRef):
        for ref in refs:
            self._port(ref)
            self._claim(ref)
            self.open_legs.append(ref)

    def validate(self):
        """Every port must be either wired or open."""
        for node in self.nodes.values():
            for port in node.ports:
                if (node.name, port) not in self._used:
                    raise NetworkError(f"dangling port {node.name}.{port}")

    # views ---------------------------------------------------------------------
    def sites(self) -> list[Site]:
        return [Site(f"{n}.{p}", self._port((n, p)) == "out") for n, p in self.open_legs]

    def __repr__(self):
        return f"TensorNetwork(k={self.level.k}, nodes={len(self.nodes)}, wires={len(self.wires)}, open={len(self.open_legs)})"


def contract(net: TensorNetwork, order: Sequence[int] | None = None) -> DenseState:
    """Contract ``net`` down to its open legs.

    ``order`` optionally lists wire indices in the order they are summed;
    otherwise pairs are merged greedily.  A network without open legs yields
    a state on zero sites holding the scalar.
    """
    net.validate()
    label: dict[PortRef, object] = {}
    for w, (src, dst) in enumerate(net.wires):
        label[src] = label[dst] = ("w", w)
    for o, ref in enumerate(net.open_legs):
        label[ref] = ("o", o)
    tensors, labels = [], []
    for node in net.nodes.values():
        tensors.append(node_tensor(net.level, node))
        labels.append([label[(node.name, p)] for p in node.ports])
    if not tensors:
        raise NetworkError("empty network")
    out_labels = [("o", o) for o in range(len(net.open_legs))]
    wire_order = None if order is None else [("w", w) for w in order]
    t = contract_labeled(tensors, labels, out_labels, order=wire_order)
    return DenseState(net.level, net.sites(), t)


def network_gate(net: TensorNetwork, order: Sequence[int] | None = None, name: str = "") -> GateMatrix:
    """Read a contracted network as a map from its open in-ports to its open out-ports."""
    s = contract(net, order)
    outs = [i for i, x in enumerate(s.sites) if x.positive]
    ins = [i for i, x in enumerate(s.sites) if not x.positive]
    return GateMatrix(net.level, len(ins), len(outs), s.amps.transpose(outs + ins), name)


# Clifford words ---------------------------------------------------------------

SINGLE_LETTERS = ("S", "Sdag", "T", "Tdag", "P", "X", "Z")


def _letter(letter) -> tuple:
    if isinstance(letter, str):
        letter = (letter, 0)
    name, *args = letter
    if name == "C_ADD":
        if len(args) != 2:
            raise ValueError(f"C_ADD takes a control and a target, got {letter!r}")
    elif name in SINGLE_LETTERS:
        if len(args) != 1:
            raise ValueError(f"{name} acts on one site, got {letter!r}")
    else:
        raise ValueError(f"unknown Clifford letter {name!r}")
    return (name, *[int(a) for a in args])


class _WordBuilder:
    """Threads one wire per site through a growing network."""

    def __init__(self, level: Level, n: int):
        self.net = TensorNetwork(level)
        self.n = n
        self.ends: list[PortRef | None] = [None] * n
        self.inputs: list[PortRef | None] = [None] * n
        self._count = 0

    def node(self, kind: str, value: int | None = None) -> str:
        self._count += 1
        return self.net.add_node(f"{kind.lower()}{self._count}", kind, value)

    def feed(self, site: int, ref: PortRef):
        """Attach the current end of ``site`` to the in port ``ref``."""
        end = self.ends[site]
        if end is None:
            self.inputs[site] = ref
        else:
            self.net.wire(end, ref)

    def gate(self, site: int, kind: str):
        g = self.node(kind)
        self.feed(site, (g, "in"))
        self.ends[site] = (g, "out")

    def shift(self, site: int):
        # fusion with a charge-1 ket moves |j> to |j + 1>
        f = self.node("fusion")
        one = self.node("ket", 1)
        self.feed(site, (f, "in1"))
        self.net.wire((one, "out"), (f, "in2"))
        self.ends[site] = (f, "out")

    def phase(self, site: int):
        # Z = S X S^dag
        self.gate(site, "Sdag")
        self.shift(site)
        self.gate(site, "S")

    def c_add(self, c: int, t: int):
        self.gate(c, "Sdag")
        cof = self.node("cofusion")
        self.feed(c, (cof, "in"))
        s1, s2 = self.node("S"), self.node("S")
        self.net.wire((cof, "out1"), (s1, "in"))
        self.net.wire((cof, "out2"), (s2, "in"))
        f = self.node("fusion")
        self.net.wire((s2, "out"), (f, "in1"))
        self.feed(t, (f, "in2"))
        self.ends[c] = (s1, "out")
        self.ends[t] = (f, "out")

    def apply(self, letter: tuple, primitive: bool):
        name, *sites = letter
        for s in sites:
            if not 0 <= s < self.n:
                raise IndexError(f"site {s} out of range for {self.n} sites in letter {letter!r}")
        if name == "C_ADD":
            c, t = sites
            if c == t:
                raise ValueError("C_ADD needs two distinct sites")
            self.c_add(c, t)
            return
        (s,) = sites
        if not primitive or name in ("S", "Sdag", "T", "Tdag"):
            self.gate(s, name)
        elif name == "X":
            self.shift(s)
        elif name == "Z":
            self.phase(s)
        else:  # P = Z^((k-1)/2) T
            self.gate(s, "T")
            for _ in range((self.net.level.k - 1) // 2):
                self.phase(s)

    def finish(self, kets: bool) -> TensorNetwork:
        for s in range(self.n):
            if self.ends[s] is None:
                # untouched site: S then S^dag is exactly the identity
                self.gate(s, "S")
                self.gate(s, "Sdag")
        if kets:
            for s in range(self.n):
                z = self.node("ket", 0)
                self.net.wire((z, "out"), self.inputs[s])
            self.net.open(*self.ends)
        else:
            self.net.open(*self.inputs, *self.ends)
        return self.net


def clifford_word(level: Level, word: Sequence, n: int, primitive: bool = True) -> TensorNetwork:
    """Network for the product of ``word`` (first letter acts first) on ``n`` sites.

    Letters are tuples such as ``("S", 0)``, ``("P", 1)``, ``("X", 0)``,
    ``("Z", 2)`` or ``("C_ADD", control, target)``, with 0-based sites.  With
    ``primitive=True`` the letters X, Z and P are expanded into fusion, ket,
    S and T nodes; otherwise they are single nodes.  Open legs are the ``n``
    inputs followed by the ``n`` outputs.
    """
    b = _WordBuilder(level, n)
    for letter in word:
        b.apply(_letter(letter), primitive)
    return b.finish(kets=False)


def clifford_gate(level: Level, word: Sequence, n: int, primitive: bool = True) -> GateMatrix:
    return network_gate(clifford_word(level, word, n, primitive), name="word")


def stabilizer_state_from_word(level: Level, word: Sequence, n: int, primitive: bool = True) -> DenseState:
    """``U |0...0>`` for the Clifford word ``U``, by contracting the network."""
    b = _WordBuilder(level, n)
    for letter in word:
        b.apply(_letter(letter), primitive)
    s = contract(b.finish(kets=True))
    return s.rename([f"q{i}" for i in range(n)])


def word_matrix(level: Level, word: Sequence, n: int) -> GateMatrix:
    """Dense product of the letters (oracle for :func:`clifford_word`)."""
    from .states import c_add_direct

    out = GateMatrix.identity(level, n)
    for letter in word:
        name, *sites = _letter(letter)
        if name == "C_ADD":
            g2 = c_add_direct(level)
            rest = [s for s in range(n) if s not in sites]
            step = _embed(level, g2, list(sites), rest, n)
        else:
            step = _embed(level, modular_gate(level, name), list(sites), [s for s in range(n) if s not in sites], n)
        out = step @ out
    return out


def _embed(level: Level, g: GateMatrix, act: list[int], rest: list[int], n: int) -> GateMatrix:
    full = g
    for _ in rest:
        full = full.kron(GateMatrix.identity(level, 1))
    order = act + rest  # position p of ``full`` holds site order[p]
    perm = [order.index(s) for s in range(n)]
    t = full.tensor.transpose(perm + [n + p for p in perm])
    return GateMatrix(level, n, n, t)


def random_word(rng: np.random.Generator, n: int, length: int,
                alphabet: Sequence[str] = ("S", "P", "C_ADD", "X", "Z")) -> list[tuple]:
    """Random Clifford word; C_ADD is skipped when ``n < 2``."""
    letters = [a for a in alphabet if a != "C_ADD" or n >= 2]
    word = []
    for _ in range(length):
        name = letters[int(rng.integers(len(letters)))]
        if name == "C_ADD":
            c, t = rng.choice(n, size=2, replace=False)
            word.append(("C_ADD", int(c), int(t)))
        else:
            word.append((name, int(rng.integers(n))))
    return word
