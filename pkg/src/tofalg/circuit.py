"""Width-typed reversible circuits over generalized controlled-NOTs and ancillas.

A circuit is a flat sequence of primitive ops applied to a wire stack whose
height changes as ancillas are initialized (``Init``) and terminated
(``Term``).  Wires are indexed from 0 at the top.  Composition is
diagrammatic: ``compose(f, g)`` runs ``f`` first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .errors import IndexOutOfRange, TargetInControls, WidthMismatch


@dataclass(frozen=True)
class GCX:
    """NOT on ``target`` controlled by every wire in ``controls``.

    Zero controls is ``not``, one is ``cnot``, two is ``tof``.
    """

    controls: tuple[int, ...]
    target: int

    def __post_init__(self):
        controls = tuple(sorted(set(int(c) for c in self.controls)))
        object.__setattr__(self, "controls", controls)
        if self.target in controls:
            raise TargetInControls(f"target {self.target} is also a control")
        if self.target < 0 or (controls and controls[0] < 0):
            raise IndexOutOfRange("negative wire index")

    @property
    def wires(self) -> tuple[int, ...]:
        return self.controls + (self.target,)


@dataclass(frozen=True)
class Init:
    """Ancilla ``|bit>`` inserted at ``position`` (width k -> k+1)."""

    bit: int
    position: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ValueError(f"ancilla bit must be 0 or 1, got {self.bit!r}")
        if self.position < 0:
            raise IndexOutOfRange("negative position")


@dataclass(frozen=True)
class Term:
    """Ancilla ``<bit|`` removing wire ``position`` (width k -> k-1).

    Defined only on inputs whose bit at ``position`` equals ``bit``.
    """

    bit: int
    position: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ValueError(f"ancilla bit must be 0 or 1, got {self.bit!r}")
        if self.position < 0:
            raise IndexOutOfRange("negative position")


@dataclass(frozen=True)
class Swap:
    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("swap needs two distinct wires")
        if min(self.i, self.j) < 0:
            raise IndexOutOfRange("negative wire index")
        if self.i > self.j:
            a, b = self.j, self.i
            object.__setattr__(self, "i", a)
            object.__setattr__(self, "j", b)


PrimOp = Union[GCX, Init, Term, Swap]


def op_step(op: PrimOp, width: int, index: int | None = None) -> int:
    """Check ``op`` can run on ``width`` wires and return the width after it."""
    where = "" if index is None else f"op {index}: "
    if isinstance(op, GCX):
        if max(op.wires) >= width:
            raise IndexOutOfRange(f"{where}wire {max(op.wires)} out of range for width {width}")
        return width
    if isinstance(op, Swap):
        if op.j >= width:
            raise IndexOutOfRange(f"{where}wire {op.j} out of range for width {width}")
        return width
    if isinstance(op, Init):
        if op.position > width:
            raise IndexOutOfRange(f"{where}init position {op.position} out of range for width {width}")
        return width + 1
    if isinstance(op, Term):
        if op.position >= width:
            raise IndexOutOfRange(f"{where}term position {op.position} out of range for width {width}")
        return width - 1
    raise TypeError(f"{where}not a primitive op: {op!r}")


def validate(ops: Iterable[PrimOp], in_width: int) -> int:
    """Walk ``ops`` from ``in_width`` and return the final width.

    Raises on the first offending op; the message names its index.
    """
    if in_width < 0:
        raise WidthMismatch("negative width")
    width = in_width
    for k, op in enumerate(ops):
        width = op_step(op, width, k)
    return width


@dataclass(frozen=True)
class Circuit:
    in_width: int
    ops: tuple[PrimOp, ...] = ()
    out_width: int = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        ops = tuple(self.ops)
        object.__setattr__(self, "ops", ops)
        out = validate(ops, self.in_width)
        if self.out_width is not None and self.out_width != out:
            raise WidthMismatch(f"declared out_width {self.out_width}, ops end at width {out}")
        object.__setattr__(self, "out_width", out)

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def widths(self) -> list[int]:
        """Running width before each op, plus the final width."""
        ws = [self.in_width]
        for op in self.ops:
            ws.append(op_step(op, ws[-1]))
        return ws

    def gate_count(self) -> int:
        return len(self.ops)

    # diagrammatic sugar: f >> g runs f then g
    def __rshift__(self, other: "Circuit") -> "Circuit":
        return compose(self, other)

    def __matmul__(self, other: "Circuit") -> "Circuit":
        return tensor(self, other)


def identity(n: int) -> Circuit:
    return Circuit(n)


def compose(f: Circuit, g: Circuit) -> Circuit:
    if f.out_width != g.in_width:
        raise WidthMismatch(f"cannot compose {f.in_width}->{f.out_width} with {g.in_width}->{g.out_width}")
    return Circuit(f.in_width, f.ops + g.ops)


def compose_all(first: Circuit, *rest: Circuit) -> Circuit:
    out = first
    for c in rest:
        out = compose(out, c)
    return out


def shift_op(op: PrimOp, offset: int) -> PrimOp:
    if offset == 0:
        return op
    if isinstance(op, GCX):
        return GCX(tuple(c + offset for c in op.controls), op.target + offset)
    if isinstance(op, Swap):
        return Swap(op.i + offset, op.j + offset)
    return type(op)(op.bit, op.position + offset)


def tensor(f: Circuit, g: Circuit) -> Circuit:
    """``f`` on the top block of wires, ``g`` on the bottom block."""
    ops = f.ops + tuple(shift_op(op, f.out_width) for op in g.ops)
    return Circuit(f.in_width + g.in_width, ops)


def dagger_op(op: PrimOp) -> PrimOp:
    if isinstance(op, Init):
        return Term(op.bit, op.position)
    if isinstance(op, Term):
        return Init(op.bit, op.position)
    return op


def dagger(c: Circuit) -> Circuit:
    """Horizontal flip: the partial inverse."""
    return Circuit(c.out_width, tuple(dagger_op(op) for op in reversed(c.ops)))


def restriction(c: Circuit) -> Circuit:
    return compose(c, dagger(c))


# -- constructors -------------------------------------------------------------

def _check_wires(width: int, *wires: int):
    for w in wires:
        if not 0 <= w < width:
            raise IndexOutOfRange(f"wire {w} out of range for width {width}")


def mk_gcnot(width: int, controls: Iterable[int], target: int) -> Circuit:
    controls = tuple(controls)
    _check_wires(width, target, *controls)
    return Circuit(width, (GCX(controls, target),))


def mk_tof(width: int = 3, a: int = 0, b: int = 1, target: int = 2) -> Circuit:
    return mk_gcnot(width, (a, b), target)


def mk_cnot(width: int = 2, control: int = 0, target: int = 1) -> Circuit:
    return mk_gcnot(width, (control,), target)


def mk_not(width: int = 1, target: int = 0) -> Circuit:
    return mk_gcnot(width, (), target)


def mk_swap(width: int = 2, i: int = 0, j: int = 1) -> Circuit:
    _check_wires(width, i, j)
    return Circuit(width, (Swap(i, j),))


def _ket(bit: int, width: int, position: int | None) -> Circuit:
    position = width if position is None else position
    if not 0 <= position <= width:
        raise IndexOutOfRange(f"init position {position} out of range for width {width}")
    return Circuit(width, (Init(bit, position),))


def _bra(bit: int, width: int, position: int | None) -> Circuit:
    position = width - 1 if position is None else position
    _check_wires(width, position)
    return Circuit(width, (Term(bit, position),))


def mk_ket1(width: int = 0, position: int | None = None) -> Circuit:
    return _ket(1, width, position)


def mk_bra1(width: int = 1, position: int | None = None) -> Circuit:
    return _bra(1, width, position)


def mk_ket0(width: int = 0, position: int | None = None) -> Circuit:
    """``|0>``; equal to ``|1>`` followed by ``not`` on the new wire."""
    return _ket(0, width, position)


def mk_bra0(width: int = 1, position: int | None = None) -> Circuit:
    """``<0|``; equal to ``not`` followed by ``<1|``."""
    return _bra(0, width, position)


def ket(bits: str | Sequence[int]) -> Circuit:
    """The total point ``|b1...bn>`` as a circuit 0 -> n (b1 on wire 0)."""
    ops = tuple(Init(int(b), k) for k, b in enumerate(bits))
    return Circuit(0, ops)


def bra(bits: str | Sequence[int]) -> Circuit:
    return dagger(ket(bits))


def omega(n: int = 0, m: int = 0) -> Circuit:
    """The nowhere-defined map n -> m: ``<1|^n ; |1> ; <0| ; |1>^m``."""
    ops = [Term(1, 0) for _ in range(n)]
    ops += [Init(1, 0), Term(0, 0)]
    ops += [Init(1, k) for k in range(m)]
    return Circuit(n, tuple(ops))


def permutation(perm: Sequence[int]) -> Circuit:
    """Swap network whose output wire ``j`` carries input wire ``perm[j]``."""
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation: {perm!r}")
    cur = list(range(n))
    ops = []
    for j in range(n):
        k = cur.index(perm[j])
        if k != j:
            ops.append(Swap(j, k))
            cur[j], cur[k] = cur[k], cur[j]
    return Circuit(n, tuple(ops))


def delta(n: int) -> Circuit:
    """The copying map n -> 2n, outputs ordered (x, x).

    Each wire is copied onto a fresh ``|0>`` by a cnot; the interleaved
    result is then sorted into two blocks by swaps.
    """
    if n < 0:
        raise WidthMismatch("negative width")
    c = Circuit(0)
    delta1 = Circuit(1, (Init(0, 1), GCX((0,), 1)))
    for _ in range(n):
        c = tensor(c, delta1)
    perm = [2 * j for j in range(n)] + [2 * j + 1 for j in range(n)]
    return compose(c, permutation(perm))


# -- macro expansion ----------------------------------------------------------

def unzip_ops(gate: GCX, top: int) -> tuple[PrimOp, ...]:
    """Split ``gate`` into ``cnot_top`` pairs around a ``|0>`` ancilla.

    The ancilla goes immediately below the last of the top ``top`` controls;
    the remaining controls and the ancilla drive the original target.
    """
    ctl = gate.controls
    if not 1 <= top < len(ctl):
        raise ValueError(f"cannot split {len(ctl)} controls after {top}")
    upper, lower = ctl[:top], ctl[top:]
    anc = upper[-1] + 1

    def s(w):
        return w + 1 if w >= anc else w

    middle = GCX((anc,) + tuple(s(w) for w in lower), s(gate.target))
    compute = GCX(tuple(s(w) for w in upper), anc)
    return (Init(0, anc), compute, middle, compute, Term(0, anc))


def _expand_gate(gate: GCX) -> list[PrimOp]:
    if len(gate.controls) <= 2:
        return [gate]
    init, compute, middle, uncompute, term = unzip_ops(gate, 2)
    return [init, compute, *_expand_gate(middle), uncompute, term]


def expand_gcnot(c: Circuit) -> Circuit:
    """Replace every GCX with more than two controls by the inductive
    ``cnot_n`` construction (tof gates and ``|0>`` ancillas only)."""
    ops: list[PrimOp] = []
    for op in c.ops:
        if isinstance(op, GCX):
            ops.extend(_expand_gate(op))
        else:
            ops.append(op)
    return Circuit(c.in_width, tuple(ops))


def _lower_gate(gate: GCX) -> list[PrimOp]:
    k = len(gate.controls)
    if k == 2:
        return [gate]
    if k > 2:
        out = []
        for op in _expand_gate(gate):
            out.extend(_lower_op(op))
        return out
    # cnot := |1> ; tof ; <1|  and  not := |1> ; cnot ; <1|, helper wire on top
    inner = GCX((0,) + tuple(w + 1 for w in gate.controls), gate.target + 1)
    return [Init(1, 0), *_lower_gate(inner), Term(1, 0)]


def _lower_op(op: PrimOp) -> list[PrimOp]:
    if isinstance(op, GCX):
        return _lower_gate(op)
    if isinstance(op, Init) and op.bit == 0:
        # |0> := |1> ; not
        return [Init(1, op.position), *_lower_gate(GCX((), op.position))]
    if isinstance(op, Term) and op.bit == 0:
        # <0| := not ; <1|
        return [*_lower_gate(GCX((), op.position)), Term(1, op.position)]
    return [op]


def lower_to_generators(c: Circuit) -> Circuit:
    """Rewrite ``c`` using only ``tof``, ``|1>``, ``<1|`` and swaps, following
    the definitional equations for the derived gates."""
    ops: list[PrimOp] = []
    for op in c.ops:
        ops.extend(_lower_op(op))
    return Circuit(c.in_width, tuple(ops))
