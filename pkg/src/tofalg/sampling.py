"""Seeded random generators for circuits and partial injections."""

from __future__ import annotations

import random

from .circuit import GCX, Circuit, Init, PrimOp, Swap, Term
from .fpinj import PartialInjection


def random_op(rng: random.Random, width: int, max_width: int = 6, max_controls: int = 3) -> PrimOp:
    kinds = ["gcx"] * 6
    if width >= 2:
        kinds.append("swap")
    if width < max_width:
        kinds.append("init")
    if width >= 1:
        kinds.append("term")
    if width == 0:
        kinds = ["init"]
    kind = rng.choice(kinds)
    if kind == "gcx":
        target = rng.randrange(width)
        others = [w for w in range(width) if w != target]
        k = rng.randint(0, min(max_controls, len(others)))
        return GCX(tuple(rng.sample(others, k)), target)
    if kind == "swap":
        i, j = rng.sample(range(width), 2)
        return Swap(i, j)
    if kind == "init":
        return Init(rng.randint(0, 1), rng.randint(0, width))
    return Term(rng.randint(0, 1), rng.randrange(width))


def random_circuit(
    rng: random.Random,
    in_width: int,
    n_ops: int,
    max_width: int = 6,
    max_controls: int = 3,
    term_weight: float = 1.0,
) -> Circuit:
    """A valid circuit whose width stays in ``[0, max_width]`` throughout.

    ``term_weight`` < 1 makes terminations rarer, so fewer samples collapse
    to the empty map.
    """
    ops = []
    w = in_width
    for _ in range(n_ops):
        op = random_op(rng, w, max_width, max_controls)
        while isinstance(op, Term) and rng.random() > term_weight:
            op = random_op(rng, w, max_width, max_controls)
        ops.append(op)
        w += 1 if isinstance(op, Init) else -1 if isinstance(op, Term) else 0
    return Circuit(in_width, tuple(ops))


def random_gcx_circuit(rng: random.Random, width: int, n_ops: int, max_controls: int = 3) -> Circuit:
    """Only GCX gates, so the result is total and reversible."""
    ops = []
    for _ in range(n_ops):
        target = rng.randrange(width)
        others = [w for w in range(width) if w != target]
        k = rng.randint(0, min(max_controls, len(others)))
        ops.append(GCX(tuple(rng.sample(others, k)), target))
    return Circuit(width, tuple(ops))


def random_partial_injection(rng: random.Random, n: int, m: int, density: float | None = None) -> PartialInjection:
    size = min(1 << n, 1 << m)
    k = rng.randint(0, size) if density is None else round(density * size)
    dom = rng.sample(range(1 << n), k)
    img = rng.sample(range(1 << m), k)
    return PartialInjection(n, m, tuple(zip(dom, img)))


def all_partial_injections(n: int, m: int):
    """Every partial injection from ``n`` bits to ``m`` bits."""
    src, dst = 1 << n, 1 << m

    def rec(x, used, acc):
        if x == src:
            yield PartialInjection(n, m, tuple(acc))
            return
        yield from rec(x + 1, used, acc)
        for y in range(dst):
            if not used >> y & 1:
                acc.append((x, y))
                yield from rec(x + 1, used | (1 << y), acc)
                acc.pop()

    yield from rec(0, 0, [])
