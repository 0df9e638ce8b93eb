"""Partial injections between bit-vector spaces, and circuit evaluation.

Bit-vectors are read wire-0-first; as integers, wire 0 is the most
significant bit.  Undefinedness is an ordinary value (``None``), never an
exception.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

import numpy as np

from .circuit import GCX, Circuit, Init, PrimOp, Swap, Term, op_step
from .errors import CapExceeded, ParseError, WidthMismatch

DEFAULT_MAX_WIRES = 22

# below this many inputs the per-point integer evaluator beats numpy
_NUMPY_THRESHOLD_BITS = 10


@dataclass(frozen=True)
class BitVec:
    width: int
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if len(bits) != self.width:
            raise WidthMismatch(f"{len(bits)} bits given for width {self.width}")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"bits must be 0/1: {bits}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def of(cls, bits: str | Iterable[int]) -> "BitVec":
        bits = tuple(int(b) for b in bits)
        return cls(len(bits), bits)

    @classmethod
    def from_int(cls, value: int, width: int) -> "BitVec":
        if not 0 <= value < (1 << width) or (width == 0 and value != 0):
            raise ValueError(f"{value} does not fit in {width} bits")
        return cls(width, tuple((value >> (width - 1 - i)) & 1 for i in range(width)))

    @property
    def value(self) -> int:
        v = 0
        for b in self.bits:
            v = (v << 1) | b
        return v

    def __str__(self):
        return "".join(map(str, self.bits))

    def __add__(self, other: "BitVec") -> "BitVec":
        return BitVec(self.width + other.width, self.bits + other.bits)


def bits_str(value: int, width: int) -> str:
    return format(value, f"0{width}b") if width else ""


# -- gate-stepping evaluator ---------------------------------------------------

def eval_op(op: PrimOp, x: BitVec) -> Optional[BitVec]:
    op_step(op, x.width)
    b = list(x.bits)
    if isinstance(op, GCX):
        if all(b[c] for c in op.controls):
            b[op.target] ^= 1
    elif isinstance(op, Swap):
        b[op.i], b[op.j] = b[op.j], b[op.i]
    elif isinstance(op, Init):
        b.insert(op.position, op.bit)
    elif isinstance(op, Term):
        if b[op.position] != op.bit:
            return None
        del b[op.position]
    return BitVec(len(b), tuple(b))


def evaluate(c: Circuit, x: BitVec) -> Optional[BitVec]:
    """Run ``c`` on the total point ``x``; ``None`` when undefined."""
    if x.width != c.in_width:
        raise WidthMismatch(f"input width {x.width}, circuit expects {c.in_width}")
    for op in c.ops:
        x = eval_op(op, x)
        if x is None:
            return None
    return x


# ``eval`` is the natural name but shadows the builtin inside this module
eval = evaluate  # noqa: A001


# -- partial injections --------------------------------------------------------

@dataclass(frozen=True)
class PartialInjection:
    """Finite partial injection ``Z2^in_width -> Z2^out_width``.

    ``table`` holds ``(input, output)`` integer pairs sorted by input, so
    equal maps compare equal.
    """

    in_width: int
    out_width: int
    table: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        table = tuple(sorted((int(a), int(b)) for a, b in self.table))
        object.__setattr__(self, "table", table)
        n_in, n_out = 1 << self.in_width, 1 << self.out_width
        keys = [a for a, _ in table]
        vals = [b for _, b in table]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate input in partial injection")
        if len(set(vals)) != len(vals):
            raise ValueError("partial injection is not injective")
        if keys and not (0 <= keys[0] and keys[-1] < n_in):
            raise WidthMismatch(f"input out of range for width {self.in_width}")
        if vals and not (0 <= min(vals) and max(vals) < n_out):
            raise WidthMismatch(f"output out of range for width {self.out_width}")

    @classmethod
    def from_mapping(cls, in_width: int, out_width: int, mapping: Mapping) -> "PartialInjection":
        def as_int(v):
            return v.value if isinstance(v, BitVec) else (int(v, 2) if isinstance(v, str) else int(v))

        return cls(in_width, out_width, tuple((as_int(a), as_int(b)) for a, b in mapping.items()))

    def as_dict(self) -> dict[int, int]:
        return dict(self.table)

    def __len__(self):
        return len(self.table)

    def __call__(self, x: BitVec | int) -> Optional[BitVec]:
        key = x.value if isinstance(x, BitVec) else x
        out = self.as_dict().get(key)
        return None if out is None else BitVec.from_int(out, self.out_width)

    def domain(self) -> frozenset[int]:
        return frozenset(a for a, _ in self.table)

    def image(self) -> frozenset[int]:
        return frozenset(b for _, b in self.table)

    def is_total(self) -> bool:
        return len(self.table) == 1 << self.in_width

    def to_tsv(self) -> str:
        lines = [f"# in_width {self.in_width}", f"# out_width {self.out_width}"]
        lines += [f"{bits_str(a, self.in_width)}\t{bits_str(b, self.out_width)}" for a, b in self.table]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_tsv(cls, text: str) -> "PartialInjection":
        widths: dict[str, int] = {}
        pairs = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.rstrip("\r\n")
            if not line.strip() and "\t" not in line:
                continue
            if line.lstrip().startswith("#"):
                words = line.lstrip("# \t").split()
                if len(words) == 2 and words[0] in ("in_width", "out_width"):
                    widths[words[0]] = int(words[1])
                continue
            parts = line.split("\t")
            if len(parts) != 2 or any(ch not in "01" for ch in parts[0] + parts[1]):
                raise ParseError(f"expected '<bits>\\t<bits>', got {line!r}", lineno)
            pairs.append((parts[0].strip(), parts[1].strip()))
        n = widths.get("in_width", len(pairs[0][0]) if pairs else None)
        m = widths.get("out_width", len(pairs[0][1]) if pairs else None)
        if n is None or m is None:
            raise ParseError("empty table needs '# in_width' and '# out_width' headers")
        for a, b in pairs:
            if len(a) != n or len(b) != m:
                raise ParseError(f"row {a}\t{b} does not match widths {n}, {m}")
        return cls(n, m, tuple((int(a, 2) if n else 0, int(b, 2) if m else 0) for a, b in pairs))

    def __str__(self):
        rows = ", ".join(f"{bits_str(a, self.in_width)}->{bits_str(b, self.out_width)}" for a, b in self.table)
        return f"{{{rows}}}"


def pin_identity(n: int) -> PartialInjection:
    return PartialInjection(n, n, tuple((x, x) for x in range(1 << n)))


def pin_empty(n: int, m: int) -> PartialInjection:
    return PartialInjection(n, m, ())


def pin_compose(f: PartialInjection, g: PartialInjection) -> PartialInjection:
    """Diagrammatic composite: ``f`` then ``g``."""
    if f.out_width != g.in_width:
        raise WidthMismatch(f"cannot compose {f.in_width}->{f.out_width} with {g.in_width}->{g.out_width}")
    gd = g.as_dict()
    return PartialInjection(f.in_width, g.out_width, tuple((a, gd[b]) for a, b in f.table if b in gd))


def pin_tensor(f: PartialInjection, g: PartialInjection) -> PartialInjection:
    table = tuple(
        ((a << g.in_width) | c, (b << g.out_width) | d) for a, b in f.table for c, d in g.table
    )
    return PartialInjection(f.in_width + g.in_width, f.out_width + g.out_width, table)


def pin_dagger(f: PartialInjection) -> PartialInjection:
    return PartialInjection(f.out_width, f.in_width, tuple((b, a) for a, b in f.table))


def pin_restriction(f: PartialInjection) -> PartialInjection:
    return PartialInjection(f.in_width, f.in_width, tuple((a, a) for a, _ in f.table))


def is_partial_identity(p: PartialInjection) -> bool:
    if p.in_width != p.out_width:
        raise WidthMismatch("a partial identity needs equal widths")
    return all(a == b for a, b in p.table)


# -- the evaluation functor ----------------------------------------------------

def _compile_int(ops: tuple[PrimOp, ...], width: int):
    """Turn ops into (kind, a, b, c) steps over integers, widths resolved."""
    steps = []
    w = width
    for op in ops:
        if isinstance(op, GCX):
            cmask = 0
            for c in op.controls:
                cmask |= 1 << (w - 1 - c)
            steps.append((0, cmask, 1 << (w - 1 - op.target), 0))
        elif isinstance(op, Swap):
            steps.append((1, w - 1 - op.i, w - 1 - op.j, 0))
        elif isinstance(op, Init):
            low = w - op.position
            steps.append((2, low, op.bit << low, (1 << low) - 1))
            w += 1
        else:
            low = w - 1 - op.position
            steps.append((3, low, op.bit, (1 << low) - 1))
            w -= 1
    return steps


def _run_int(steps, x: int) -> Optional[int]:
    for kind, a, b, c in steps:
        if kind == 0:
            if x & a == a:
                x ^= b
        elif kind == 1:
            if ((x >> a) ^ (x >> b)) & 1:
                x ^= (1 << a) | (1 << b)
        elif kind == 2:
            x = ((x >> a) << (a + 1)) | b | (x & c)
        else:
            if (x >> a) & 1 != b:
                return None
            x = ((x >> (a + 1)) << a) | (x & c)
    return x


def _h0_int(c: Circuit) -> tuple[tuple[int, int], ...]:
    steps = _compile_int(c.ops, c.in_width)
    table = []
    for x in range(1 << c.in_width):
        y = _run_int(steps, x)
        if y is not None:
            table.append((x, y))
    return tuple(table)


def _h0_numpy(c: Circuit) -> tuple[tuple[int, int], ...]:
    n = c.in_width
    xs = np.arange(1 << n, dtype=np.int64)
    cols = [((xs >> (n - 1 - i)) & 1).astype(bool) for i in range(n)]
    defined = np.ones(1 << n, dtype=bool)
    for op in c.ops:
        if isinstance(op, GCX):
            mask = defined.copy()
            for k in op.controls:
                mask &= cols[k]
            cols[op.target] = cols[op.target] ^ mask
        elif isinstance(op, Swap):
            cols[op.i], cols[op.j] = cols[op.j], cols[op.i]
        elif isinstance(op, Init):
            cols.insert(op.position, np.full(1 << n, bool(op.bit)))
        else:
            defined &= cols.pop(op.position) == bool(op.bit)
    idx = np.nonzero(defined)[0]
    m = len(cols)
    if m <= 62:
        out = np.zeros(len(idx), dtype=np.int64)
        for i, col in enumerate(cols):
            out |= col[idx].astype(np.int64) << (m - 1 - i)
        return tuple(zip(idx.tolist(), out.tolist()))
    outs = [0] * len(idx)
    for col in cols:
        bits = col[idx].tolist()
        outs = [(o << 1) | int(b) for o, b in zip(outs, bits)]
    return tuple(zip(idx.tolist(), outs))


def h0(c: Circuit, max_wires: int = DEFAULT_MAX_WIRES) -> PartialInjection:
    """Tabulate ``c`` on every total point of its input width."""
    if c.in_width > max_wires:
        raise CapExceeded(f"circuit has {c.in_width} input wires, cap is {max_wires}")
    if c.in_width < _NUMPY_THRESHOLD_BITS:
        table = _h0_int(c)
    else:
        table = _h0_numpy(c)
    # the constructor re-checks injectivity: a failure here is an evaluator bug
    return PartialInjection(c.in_width, c.out_width, table)


def equivalent(c1: Circuit, c2: Circuit, max_wires: int = DEFAULT_MAX_WIRES) -> bool:
    """Decide equality of circuits by comparing their semantics."""
    if (c1.in_width, c1.out_width) != (c2.in_width, c2.out_width):
        raise WidthMismatch(
            f"{c1.in_width}->{c1.out_width} vs {c2.in_width}->{c2.out_width}"
        )
    return h0(c1, max_wires) == h0(c2, max_wires)


# -- points --------------------------------------------------------------------

@dataclass(frozen=True)
class TotalPoint:
    point: BitVec


class _Nowhere:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Nowhere"


Nowhere = _Nowhere()


def classify_point(c: Circuit) -> TotalPoint | _Nowhere:
    """A circuit 0 -> n is either a ket ``|b1..bn>`` or the empty map."""
    if c.in_width != 0:
        raise WidthMismatch("points have input width 0")
    y = evaluate(c, BitVec(0, ()))
    return Nowhere if y is None else TotalPoint(y)

