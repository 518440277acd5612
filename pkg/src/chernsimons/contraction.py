"""Exact contraction of labelled cyclotomic tensors.

Every tensor axis carries a hashable label.  A label shared by two axes is
summed over Z_k; labels listed in ``output`` stay open.  Pairs of tensors are
contracted greedily, always choosing the pair whose result is smallest, unless
an explicit label order is given (used to check order independence).
"""
from __future__ import annotations

from collections import Counter
from collections.abc import Hashable, Sequence

import numpy as np

from .cyclo import CycArray, tensordot

Label = Hashable


def _self_trace(t: CycArray, labels: list[Label]) -> tuple[CycArray, list[Label]]:
    """Sum over labels repeated inside a single tensor."""
    while True:
        seen = {}
        pair = None
        for i, lab in enumerate(labels):
            if lab in seen:
                pair = (seen[lab], i)
                break
            seen[lab] = i
        if pair is None:
            return t, labels
        i, j = pair
        c = np.trace(t.coeffs, axis1=i, axis2=j)
        t = CycArray(t.level, c, t.kden)
        labels = [lab for n, lab in enumerate(labels) if n not in (i, j)]


def _pair(a: CycArray, la: list[Label], b: CycArray, lb: list[Label]) -> tuple[CycArray, list[Label]]:
    shared = [lab for lab in la if lab in lb]
    ax_a = [la.index(lab) for lab in shared]
    ax_b = [lb.index(lab) for lab in shared]
    res = tensordot(a, b, (ax_a, ax_b))
    labels = [lab for lab in la if lab not in shared] + [lab for lab in lb if lab not in shared]
    return res, labels


def contract_labeled(
    tensors: Sequence[CycArray],
    labels: Sequence[Sequence[Label]],
    output: Sequence[Label],
    order: Sequence[Label] | None = None,
) -> CycArray:
    """Contract a list of labelled tensors down to the ``output`` labels.

    Args:
        tensors: exact tensors, each of shape ``(k,) * rank``.
        labels: one label per axis of each tensor.
        output: ordered labels of the result; each must occur exactly once.
        order: optional sequence of summed labels fixing the contraction order.

    Returns:
        the contracted tensor with axes in ``output`` order.
    """
    if len(tensors) != len(labels):
        raise ValueError("one label list per tensor is required")
    if not tensors:
        raise ValueError("nothing to contract")
    counts = Counter(lab for ls in labels for lab in ls)
    out_set = set(output)
    if len(out_set) != len(output):
        raise ValueError("duplicate output label")
    for lab in output:
        if counts[lab] != 1:
            raise ValueError(f"output label {lab!r} must appear exactly once, found {counts[lab]}")
    for lab, c in counts.items():
        if c > 2:
            raise ValueError(f"label {lab!r} appears {c} times")
        if c == 1 and lab not in out_set:
            raise ValueError(f"dangling label {lab!r} is neither summed nor open")
    for t, ls in zip(tensors, labels):
        if t.ndim != len(ls):
            raise ValueError(f"tensor of rank {t.ndim} given {len(ls)} labels")

    items = []
    for t, ls in zip(tensors, labels):
        items.append(_self_trace(t, list(ls)))

    if order is not None:
        for lab in order:
            holders = [i for i, (_, ls) in enumerate(items) if lab in ls]
            if len(holders) == 2:
                i, j = holders
                merged = _pair(*items[i], *items[j])
                items = [it for n, it in enumerate(items) if n not in (i, j)] + [merged]

    while True:
        best = None
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                li, lj = items[i][1], items[j][1]
                shared = set(li) & set(lj)
                if not shared:
                    continue
                size = (len(li) + len(lj) - 2 * len(shared))
                if best is None or size < best[0]:
                    best = (size, i, j)
        if best is None:
            break
        _, i, j = best
        merged = _pair(*items[i], *items[j])
        items = [it for n, it in enumerate(items) if n not in (i, j)] + [merged]

    # disconnected pieces: outer products
    t, ls = items[0]
    for t2, ls2 in items[1:]:
        t, ls = _pair(t, ls, t2, ls2)
    if t.ndim == 0:
        return t
    perm = [ls.index(lab) for lab in output]
    return t.transpose(perm)


def einsum_spec(spec: str, *tensors: CycArray) -> CycArray:
    """Small ``numpy.einsum``-style front end, e.g. ``"ab,bc->ac"``."""
    lhs, rhs = spec.replace(" ", "").split("->")
    terms = lhs.split(",")
    if len(terms) != len(tensors):
        raise ValueError("operand count does not match the subscripts")
    return contract_labeled(list(tensors), [list(t) for t in terms], list(rhs))
