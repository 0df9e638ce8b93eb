"""Synthesis of a circuit from any finite partial injection.

A partial injection ``f: n -> m`` is realized as

    idem(dom f) ; graph(f)  ;  block_swap(n, m)  ;  dagger(idem(dom f°) ; graph(f°))

where ``idem(S)`` is the polyform vanishing exactly on ``S`` and ``graph(g)``
copies the input and computes ``g`` onto fresh ancillas.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import GCX, Circuit, Init, compose_all, dagger, permutation
from .fpinj import DEFAULT_MAX_WIRES, PartialInjection
from .errors import CapExceeded, WidthMismatch
from .poly import Polyform, Polynomial, anf_from_indicator, polyform_to_circuit


@dataclass(frozen=True)
class TotalBitFunction:
    """``table[x]`` is the output (as an integer) of input ``x``."""

    in_width: int
    out_width: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        if len(self.table) != 1 << self.in_width:
            raise WidthMismatch(f"{len(self.table)} rows for {self.in_width} input bits")
        if any(not 0 <= v < (1 << self.out_width) for v in self.table):
            raise WidthMismatch(f"output does not fit in {self.out_width} bits")

    @classmethod
    def extend(cls, f: PartialInjection, fill: int = 0) -> "TotalBitFunction":
        """Total extension of ``f``, sending undefined inputs to ``fill``."""
        table = [fill] * (1 << f.in_width)
        for x, y in f.table:
            table[x] = y
        return cls(f.in_width, f.out_width, tuple(table))


def coord_polynomials(f: TotalBitFunction) -> list[Polynomial]:
    """ANF of each output bit, output wire 0 first."""
    n, m = f.in_width, f.out_width
    polys = []
    for i in range(m):
        shift = m - 1 - i
        zeros = [x for x, y in enumerate(f.table) if not (y >> shift) & 1]
        polys.append(anf_from_indicator(n, zeros))
    return polys


def embed_total(f: TotalBitFunction) -> Circuit:
    """Circuit ``n -> n + m`` computing ``x |-> (x, f(x))``."""
    n = f.in_width
    ops = []
    for i, p in enumerate(coord_polynomials(f)):
        ops.append(Init(0, n + i))
        ops.extend(GCX(mono, n + i) for mono in p.terms())
    return Circuit(n, tuple(ops), n + f.out_width)


def block_swap(n: int, m: int) -> Circuit:
    """``(x, y) |-> (y, x)`` for blocks of ``n`` and ``m`` wires."""
    return permutation(list(range(n, n + m)) + list(range(n)))


def graph_circuit(f: PartialInjection) -> Circuit:
    """Circuit ``n -> n + m`` defined exactly on ``dom f``, computing ``(x, f(x))``."""
    idem = polyform_to_circuit(Polyform(f.in_width, anf_from_indicator(f.in_width, f.domain())))
    return compose_all(idem, embed_total(TotalBitFunction.extend(f)))


def synth_partial_iso(f: PartialInjection, max_wires: int = DEFAULT_MAX_WIRES) -> Circuit:
    n, m = f.in_width, f.out_width
    if max(n, m) > max_wires:
        raise CapExceeded(f"{n} -> {m} exceeds the {max_wires}-wire cap")
    inv = PartialInjection(m, n, tuple((y, x) for x, y in f.table))
    return compose_all(graph_circuit(f), block_swap(n, m), dagger(graph_circuit(inv)))
