"""Command line front end.

Exit status: 0 on success, 2 for an ill-defined manifold, 1 for usage,
parse and input errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from collections.abc import Sequence

import numpy as np

from . import so3
from .cyclo import CycArray
from .entanglement import flat_entropy, ghz_count
from .formats import ParseError, detect_kind, parse_manifold, parse_network
from .stabilizer import (
    WIGNER_MAX_POINTS,
    NotStabilizerError,
    ZeroStateError,
    is_stabilizer,
    tableau_from_state,
    wigner_function,
)
from .states import DenseState
from .surgery import IllDefinedError, state_from_presentation, tableau_from_presentation, well_definedness
from .tensornet import NetworkError, contract

EXIT_OK, EXIT_ERROR, EXIT_ILL_DEFINED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _globals(p: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("-f", "--file", dest="file", default=d, help="manifold or network description")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False,
                   help="emit JSON")
    p.add_argument("--sign-flip", action="store_true", default=argparse.SUPPRESS if suppress else False,
                   help="use +j.Lt.j instead of -j.Lt.j as the surgery exponent")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS if suppress else 0,
                   help="seed for randomized steps (every current command is deterministic)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chernsimons", description="U(1) Chern-Simons state preparation calculus")
    _globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def cmd(name, help):
        p = sub.add_parser(name, help=help)
        _globals(p, suppress=True)
        return p

    cmd("eval", "print the prepared state")
    p = cmd("entropy", "flat-spectrum entanglement entropy of a region")
    p.add_argument("--region", required=True, help="comma separated site names")
    p = cmd("ghz", "number of distillable GHZ states for a tripartition")
    for r in ("A", "B", "C"):
        p.add_argument(f"--{r}", required=True, help="comma separated site names")
    cmd("check-stabilizer", "Hudson criterion and exact stabilizer certificate")
    cmd("tableau", "stabilizer tableau of the prepared state")
    p = cmd("verlinde", "SO(3) Verlinde dimensions")
    p.add_argument("--r", type=int, required=True, help="odd prime >= 5")
    p.add_argument("--genus", type=int, default=2)
    return parser


# loading -------------------------------------------------------------------------

def _load(args):
    if not args.file:
        raise UsageError("the -f/--file flag is required for this command")
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"-f: cannot read {args.file}: {exc.strerror}") from None
    kind = detect_kind(text)
    if kind == "manifold":
        return kind, parse_manifold(text)
    return kind, parse_network(text)


def _state(args) -> tuple[DenseState, object]:
    kind, doc = _load(args)
    if kind == "manifold":
        wd = well_definedness(doc, args.sign_flip)
        if not wd:
            raise IllDefinedError(wd.diagnostic)
        return state_from_presentation(doc, args.sign_flip), doc
    return contract(doc), doc


def _region(s: DenseState, text: str, flag: str) -> list[int]:
    names = [x for x in text.split(",") if x]
    out = []
    for nm in names:
        try:
            out.append(s.index(nm))
        except KeyError:
            raise UsageError(f"{flag}: unknown site {nm!r}; sites are {', '.join(s.names)}") from None
    return out


# output ---------------------------------------------------------------------------

def _coeffs(x: CycArray) -> list[int]:
    return [int(v) for v in x.coeffs.reshape(-1)]


def state_json(s: DenseState) -> dict:
    flat = s.amps.reshape(-1)
    values = flat.to_complex()
    nz = np.flatnonzero(flat.nonzero_mask())
    amps = []
    for i in nz:
        idx = [int(v) for v in np.unravel_index(i, (s.k,) * s.n)]
        a = flat[int(i)]
        amps.append({
            "index": idx,
            "coeffs": _coeffs(a),
            "kden": int(a.kden),
            "value": [float(values[i].real), float(values[i].imag)],
        })
    return {
        "level": s.k,
        "sites": [{"name": x.name, "orientation": "+" if x.positive else "-"} for x in s.sites],
        "basis": "zeta_4k power basis",
        "amplitudes": amps,
        "tags": sorted(s.tags),
    }


def _fmt_complex(z: complex) -> str:
    re_, im = round(z.real, 10) + 0.0, round(z.imag, 10) + 0.0
    return f"{re_:.10g}{im:+.10g}i"


def state_text(s: DenseState) -> str:
    lines = [f"level {s.k}", "sites " + " ".join(str(x) for x in s.sites)]
    flat = s.amps.reshape(-1)
    values = flat.to_complex()
    for i in np.flatnonzero(flat.nonzero_mask()):
        idx = ",".join(str(int(v)) for v in np.unravel_index(i, (s.k,) * s.n))
        lines.append(f"|{idx}> {_fmt_complex(complex(values[i]))}")
    if s.tags:
        lines.append("tags " + " ".join(sorted(s.tags)))
    return "\n".join(lines)


def _emit(args, payload: dict, text: str, out):
    if args.json:
        out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


# commands ---------------------------------------------------------------------------

def _cmd_eval(args, out):
    s, _ = _state(args)
    _emit(args, {"command": "eval", "state": state_json(s)}, state_text(s), out)


def _entropy_payload(s: DenseState, region: list[int]) -> dict:
    e = flat_entropy(s, region)
    return {"dits": e.dits, "nats": e.nats, "exact_dits": e.exact_dits}


def _cmd_entropy(args, out):
    s, _ = _state(args)
    region = _region(s, args.region, "--region")
    e = _entropy_payload(s, region)
    names = [s.names[i] for i in region]
    dits = e["exact_dits"] if e["exact_dits"] is not None else e["dits"]
    text = f"S({','.join(names)}) = {dits} dit = {e['nats']:.12g} nat"
    _emit(args, {"command": "entropy", "region": names, "entropy": e}, text, out)


def _cmd_ghz(args, out):
    s, _ = _state(args)
    regions = {r: _region(s, getattr(args, r), f"--{r}") for r in "ABC"}
    used = sorted(i for v in regions.values() for i in v)
    if used != list(range(s.n)):
        raise UsageError(f"--A/--B/--C must partition the sites {', '.join(s.names)}")
    g = ghz_count(s, regions["A"], regions["B"], regions["C"])
    ent = {r: _entropy_payload(s, v)["exact_dits"] for r, v in regions.items()}
    payload = {
        "command": "ghz",
        "regions": {r: [s.names[i] for i in v] for r, v in regions.items()},
        "entropies_dits": ent,
        "entropies_nats": {r: v * math.log(s.k) for r, v in ent.items()},
        "g": g,
    }
    _emit(args, payload, f"g={g}", out)


def _cmd_check(args, out):
    s, _ = _state(args)
    verdict = is_stabilizer(s)
    wmin = None
    if s.k ** (2 * s.n) <= WIGNER_MAX_POINTS:
        wmin = round(float(wigner_function(s).min), 12) + 0.0
    payload = {
        "command": "check-stabilizer",
        "stabilizer": verdict,
        "wigner_min": wmin,
        "converse_proven": s.level.converse_proven,
        "tags": sorted(s.tags),
    }
    text = f"stabilizer: {'yes' if verdict else 'no'}"
    if wmin is not None:
        text += f"\nwigner min: {wmin:.12g}"
    if not s.level.converse_proven:
        text += "\nnote: converse-unproven (k = 3 mod 4)"
    _emit(args, payload, text, out)


def _cmd_tableau(args, out):
    kind, doc = _load(args)
    if kind == "manifold":
        wd = well_definedness(doc, args.sign_flip)
        if not wd:
            raise IllDefinedError(wd.diagnostic)
        t = tableau_from_presentation(doc, args.sign_flip)
        sites = [doc.names[i] for i in doc.site_indices]
    else:
        s = contract(doc)
        try:
            t = tableau_from_state(s)
        except NotStabilizerError as exc:
            raise UsageError(f"state is not a stabilizer state: {exc}") from None
        sites = s.names
    payload = {
        "command": "tableau",
        "level": t.level.k,
        "sites": sites,
        "generators": [
            {"phase": g.phase_exp, "z": list(g.z_exp), "x": list(g.x_exp), "text": g.to_text()}
            for g in t.generators
        ],
    }
    _emit(args, payload, t.to_text(), out)


def _cmd_verlinde(args, out):
    r, genus = args.r, args.genus
    if genus < 0:
        raise UsageError("--genus must be nonnegative")
    try:
        m = len(so3.fusion_rules(r).anyons)
    except ValueError as exc:
        raise UsageError(f"--r: {exc}") from None
    dims = {g: so3.verlinde_dim(r, g) for g in range(genus + 1)}
    ok = so3.dimension_inequality(r)
    payload = {
        "command": "verlinde",
        "r": r,
        "k": r + 3,
        "anyons": m,
        "dims": {str(g): d for g, d in dims.items()},
        "dim": dims[genus],
        "torus_pair_dim": m * m,
        "genus2_dim": so3.verlinde_dim(r, 2),
        "inequality": ok,
    }
    lines = [f"r {r}", f"k {r + 3}", f"anyons {m}"]
    lines += [f"dim genus {g} {d}" for g, d in dims.items()]
    lines.append(f"inequality {m * m} <= {payload['genus2_dim']} {'true' if ok else 'false'}")
    _emit(args, payload, "\n".join(lines), out)


COMMANDS = {
    "eval": _cmd_eval,
    "entropy": _cmd_entropy,
    "ghz": _cmd_ghz,
    "check-stabilizer": _cmd_check,
    "tableau": _cmd_tableau,
    "verlinde": _cmd_verlinde,
}


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args, out)
    except IllDefinedError as exc:
        err.write(f"error: ill-defined manifold: {exc}\n")
        return EXIT_ILL_DEFINED
    except (UsageError, ParseError, NetworkError, NotStabilizerError, ZeroStateError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_ERROR
    return EXIT_OK


def main() -> None:
    sys.exit(run())
