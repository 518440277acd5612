"""Text formats for surgery presentations and tensor networks.

Both formats are line based: one statement per line, whitespace separated
tokens, ``#`` starts a comment.

Manifold::

    level 5
    component a boundary
    component b boundary rep 2
    component m surgery
    link a m 1
    frame m 1

Network::

    level 3
    node f fusion
    node k1 ket 1
    wire k1.out f.in2
    open f.in1 f.out
"""
from __future__ import annotations

from dataclasses import dataclass

from .cyclo import Level
from .surgery import BOUNDARY, SURGERY, Component, SurgeryPresentation
from .tensornet import NODE_KINDS, VALUED_KINDS, NetworkError, TensorNetwork


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class _Tok:
    text: str
    col: int


def _statements(text: str):
    """Yield ``(line_number, tokens)`` for each non-empty line."""
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks, col = [], 0
        for word in line.split():
            col = line.index(word, col)
            toks.append(_Tok(word, col + 1))
            col += len(word)
        if toks:
            yield n, toks


def _int(tok: _Tok, line: int, what: str) -> int:
    try:
        return int(tok.text)
    except ValueError:
        raise ParseError(f"expected an integer {what}, got {tok.text!r}", line, tok.col) from None


def _arity(toks: list[_Tok], line: int, lo: int, hi: int | None = None):
    hi = lo if hi is None else hi
    if not lo <= len(toks) <= hi:
        want = str(lo) if lo == hi else f"{lo} to {hi}"
        col = toks[min(len(toks), hi) - 1].col if len(toks) > hi else toks[-1].col
        raise ParseError(f"'{toks[0].text}' takes {want} tokens, got {len(toks)}", line, col)


def _level(toks: list[_Tok], line: int, current: Level | None) -> Level:
    _arity(toks, line, 2)
    if current is not None:
        raise ParseError("level declared twice", line, toks[0].col)
    try:
        return Level(_int(toks[1], line, "level"))
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), line, toks[1].col) from None


def detect_kind(text: str) -> str:
    """``"manifold"`` or ``"network"`` from the statement keywords."""
    for line, toks in _statements(text):
        kw = toks[0].text
        if kw in ("component", "link", "frame"):
            return "manifold"
        if kw in ("node", "wire", "open"):
            return "network"
    raise ParseError("cannot tell whether this is a manifold or a network description", 1)


# manifolds -----------------------------------------------------------------------

def parse_manifold(text: str) -> SurgeryPresentation:
    level = None
    comps: list[Component] = []
    index: dict[str, int] = {}
    links: dict[frozenset, tuple[int, int]] = {}
    frames: dict[str, tuple[int, int]] = {}
    pending: list[tuple[int, _Tok]] = []
    pending_labels: list[tuple[int, _Tok, int]] = []

    for line, toks in _statements(text):
        kw = toks[0].text
        if kw == "level":
            level = _level(toks, line, level)
        elif kw == "component":
            _arity(toks, line, 3, 5)
            name, role = toks[1].text, toks[2].text
            if name in index:
                raise ParseError(f"duplicate component name {name!r}", line, toks[1].col)
            if role not in (BOUNDARY, SURGERY):
                raise ParseError(f"role must be 'boundary' or 'surgery', got {role!r}", line, toks[2].col)
            label = None
            if len(toks) > 3:
                if toks[3].text != "rep" or len(toks) != 5:
                    raise ParseError("expected 'rep <int>'", line, toks[3].col)
                if role != BOUNDARY:
                    raise ParseError("rep label only on boundary components", line, toks[3].col)
                label = _int(toks[4], line, "rep label")
                pending_labels.append((line, toks[4], label))
            index[name] = len(comps)
            comps.append(Component(name, role, label))
        elif kw == "link":
            _arity(toks, line, 4)
            a, b = toks[1].text, toks[2].text
            if a == b:
                raise ParseError(f"self-linking of {a!r} is set with 'frame'", line, toks[2].col)
            v = _int(toks[3], line, "linking number")
            pending += [(line, toks[1]), (line, toks[2])]
            key = frozenset((a, b))
            if key in links and links[key][0] != v:
                raise ParseError(
                    f"asymmetric link redeclaration: {a} {b} was {links[key][0]} on line {links[key][1]}",
                    line, toks[3].col)
            links[key] = (v, line)
        elif kw == "frame":
            _arity(toks, line, 3)
            a = toks[1].text
            v = _int(toks[2], line, "framing")
            pending.append((line, toks[1]))
            if a in frames and frames[a][0] != v:
                raise ParseError(f"framing of {a} redeclared (was {frames[a][0]} on line {frames[a][1]})",
                                 line, toks[2].col)
            frames[a] = (v, line)
        else:
            raise ParseError(f"unknown statement {kw!r}", line, toks[0].col)

    if level is None:
        raise ParseError("missing 'level' statement", 1)
    if not comps:
        raise ParseError("no components declared", 1)
    for line, tok in pending:
        if tok.text not in index:
            raise ParseError(f"unknown component {tok.text!r}", line, tok.col)
    for line, tok, label in pending_labels:
        if not 0 <= label < level.k:
            raise ParseError(f"rep label {label} is outside 0..{level.k - 1}", line, tok.col)
    return SurgeryPresentation.build(
        level,
        comps,
        {tuple(sorted(key, key=index.get)): v for key, (v, _) in links.items()},
        {a: v for a, (v, _) in frames.items()},
    )


def format_manifold(p: SurgeryPresentation) -> str:
    """Canonical text: level, components in order, nonzero links (i < j), nonzero framings."""
    out = [f"level {p.k}"]
    for c in p.components:
        rep = f" rep {c.rep_label}" if c.rep_label is not None else ""
        out.append(f"component {c.name} {c.role}{rep}")
    L = p.linking
    n = len(p.components)
    for i in range(n):
        for j in range(i + 1, n):
            if L[i, j]:
                out.append(f"link {p.names[i]} {p.names[j]} {int(L[i, j])}")
    for i in range(n):
        if L[i, i]:
            out.append(f"frame {p.names[i]} {int(L[i, i])}")
    return "\n".join(out) + "\n"


# networks -------------------------------------------------------------------------

def _portref(tok: _Tok, line: int) -> tuple[str, str]:
    node, dot, port = tok.text.partition(".")
    if not dot or not node or not port:
        raise ParseError(f"expected <node>.<port>, got {tok.text!r}", line, tok.col)
    return node, port


def parse_network(text: str) -> TensorNetwork:
    level = None
    net: TensorNetwork | None = None
    for line, toks in _statements(text):
        kw = toks[0].text
        if kw == "level":
            level = _level(toks, line, level)
            net = TensorNetwork(level)
            continue
        if net is None:
            raise ParseError("'level' must come before nodes, wires and open legs", line, toks[0].col)
        try:
            if kw == "node":
                _arity(toks, line, 3, 4)
                kind = toks[2].text
                if kind not in NODE_KINDS:
                    raise ParseError(f"unknown node kind {kind!r}", line, toks[2].col)
                value = None
                if kind in VALUED_KINDS:
                    if len(toks) != 4:
                        raise ParseError(f"node kind {kind} needs an integer value", line, toks[2].col)
                    value = _int(toks[3], line, "basis label")
                elif len(toks) == 4:
                    raise ParseError(f"node kind {kind} takes no value", line, toks[3].col)
                net.add_node(toks[1].text, kind, value)
            elif kw == "wire":
                _arity(toks, line, 3)
                net.wire(_portref(toks[1], line), _portref(toks[2], line))
            elif kw == "open":
                _arity(toks, line, 2, 10**6)
                for tok in toks[1:]:
                    try:
                        net.open(_portref(tok, line))
                    except NetworkError as exc:
                        raise ParseError(str(exc), line, tok.col) from None
            else:
                raise ParseError(f"unknown statement {kw!r}", line, toks[0].col)
        except NetworkError as exc:
            raise ParseError(str(exc), line, toks[1].col if len(toks) > 1 else toks[0].col) from None
    if net is None:
        raise ParseError("missing 'level' statement", 1)
    try:
        net.validate()
    except NetworkError as exc:
        raise ParseError(str(exc), 1) from None
    return net


def format_network(net: TensorNetwork) -> str:
    out = [f"level {net.level.k}"]
    for node in net.nodes.values():
        val = f" {node.value}" if node.value is not None else ""
        out.append(f"node {node.name} {node.kind}{val}")
    for (a, pa), (b, pb) in net.wires:
        out.append(f"wire {a}.{pa} {b}.{pb}")
    if net.open_legs:
        out.append("open " + " ".join(f"{a}.{p}" for a, p in net.open_legs))
    return "\n".join(out) + "\n"
