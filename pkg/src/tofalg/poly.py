"""GF(2) polynomials in algebraic normal form, and polyforms.

A polyform of width ``n`` is the circuit that parks a fresh ``|0>`` ancilla
below wire ``n - 1``, flips it once per monomial, and then demands ``<0|``.
Its semantics is the partial identity on the zero set of the polynomial, and
every restriction idempotent has exactly one such representative.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .circuit import GCX, Circuit, Init, PrimOp, Swap, Term, op_step
from .errors import IndexOutOfRange, NotIdempotent, NotPolynomialForm, WidthMismatch
from .fpinj import DEFAULT_MAX_WIRES, BitVec, h0, is_partial_identity

Monomial = frozenset  # of variable indices; the empty monomial is 1


def monomial_key(m: Iterable[int]) -> tuple:
    s = tuple(sorted(m))
    return (len(s), s)


@dataclass(frozen=True)
class Polynomial:
    monomials: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "monomials", frozenset(frozenset(m) for m in self.monomials))

    @classmethod
    def from_terms(cls, terms: Iterable[Iterable[int]]) -> "Polynomial":
        """Sum a multiset of monomials, cancelling pairs mod 2."""
        counts = Counter(frozenset(t) for t in terms)
        return cls(frozenset(m for m, k in counts.items() if k % 2))

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls()

    @classmethod
    def one(cls) -> "Polynomial":
        return cls(frozenset([frozenset()]))

    @classmethod
    def var(cls, i: int) -> "Polynomial":
        return cls(frozenset([frozenset([i])]))

    @classmethod
    def monomial(cls, vars_: Iterable[int]) -> "Polynomial":
        return cls(frozenset([frozenset(vars_)]))

    def terms(self) -> list[tuple[int, ...]]:
        """Monomials in canonical order: by degree, then lexicographically."""
        return sorted((tuple(sorted(m)) for m in self.monomials), key=lambda s: (len(s), s))

    def variables(self) -> frozenset[int]:
        return frozenset().union(*self.monomials) if self.monomials else frozenset()

    def max_var(self) -> int:
        v = self.variables()
        return max(v) if v else -1

    def is_zero(self) -> bool:
        return not self.monomials

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(self.monomials ^ other.monomials)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial.from_terms(a | b for a in self.monomials for b in other.monomials)

    def __call__(self, x) -> int:
        return poly_eval(self, x)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Polynomial({format_poly(self)!r})"


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def poly_eval(p: Polynomial, x: BitVec | Iterable[int]) -> int:
    bits = x.bits if isinstance(x, BitVec) else tuple(x)
    if p.max_var() >= len(bits):
        raise IndexOutOfRange(f"x{p.max_var()} is not covered by {len(bits)} bits")
    return sum(all(bits[v] for v in m) for m in p.monomials) & 1


def poly_subst(p: Polynomial, v: int, q: Polynomial) -> Polynomial:
    """Replace ``x_v`` by ``x_v + q`` everywhere."""
    terms: list[frozenset] = []
    for m in p.monomials:
        terms.append(m)
        if v in m:
            rest = m - {v}
            terms.extend(rest | t for t in q.monomials)
    return Polynomial.from_terms(terms)


def poly_fix(p: Polynomial, v: int, bit: int) -> Polynomial:
    """Set ``x_v := bit``."""
    if bit:
        return Polynomial.from_terms(m - {v} for m in p.monomials)
    return Polynomial(frozenset(m for m in p.monomials if v not in m))


def poly_rename(p: Polynomial, f) -> Polynomial:
    """Apply an injective variable renaming ``f``."""
    return Polynomial(frozenset(frozenset(f(v) for v in m) for m in p.monomials))


# -- text form -----------------------------------------------------------------

def format_poly(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    return " + ".join("".join(f"x{v}" for v in m) if m else "1" for m in p.terms())


_MONO_RE = re.compile(r"^(?:x\d+)+$")


def parse_poly(text: str) -> Polynomial:
    text = text.strip()
    if text == "0":
        return Polynomial.zero()
    terms = []
    for chunk in text.split("+"):
        chunk = chunk.replace(" ", "").replace("*", "")
        if chunk == "1":
            terms.append(())
        elif chunk == "0":
            continue
        elif _MONO_RE.match(chunk):
            terms.append(tuple(int(v) for v in re.findall(r"\d+", chunk)))
        else:
            raise ValueError(f"bad monomial {chunk!r} in {text!r}")
    return Polynomial.from_terms(terms)


# -- algebraic normal form -----------------------------------------------------

def _point_int(x, n: int) -> int:
    if isinstance(x, BitVec):
        if x.width != n:
            raise WidthMismatch(f"point of width {x.width} in a width-{n} set")
        return x.value
    return int(x)


def anf_from_indicator(n: int, defined: Iterable) -> Polynomial:
    """The unique ANF ``p`` with ``p(x) = 0`` exactly on ``defined``."""
    f = np.ones(1 << n, dtype=np.uint8)
    for x in defined:
        f[_point_int(x, n)] = 0
    # Moebius butterfly; the bit for variable i is 1 << (n - 1 - i)
    for i in range(n):
        view = f.reshape(-1, 2, 1 << i)
        view[:, 1, :] ^= view[:, 0, :]
    monos = []
    for s in np.nonzero(f)[0].tolist():
        monos.append(frozenset(i for i in range(n) if (s >> (n - 1 - i)) & 1))
    return Polynomial(frozenset(monos))


def truth_table(p: Polynomial, n: int) -> np.ndarray:
    """Values of ``p`` on every point of width ``n``, indexed by integer encoding."""
    if p.max_var() >= n:
        raise IndexOutOfRange(f"x{p.max_var()} is not covered by {n} bits")
    xs = np.arange(1 << n, dtype=np.int64)
    cols = [((xs >> (n - 1 - i)) & 1).astype(bool) for i in range(n)]
    acc = np.zeros(1 << n, dtype=bool)
    for m in p.monomials:
        term = np.ones(1 << n, dtype=bool)
        for v in m:
            term &= cols[v]
        acc ^= term
    return acc


def zero_set(p: Polynomial, n: int) -> frozenset[int]:
    """Integer encodings of the points of width ``n`` where ``p`` vanishes."""
    return frozenset(np.nonzero(~truth_table(p, n))[0].tolist())


# -- polyforms -----------------------------------------------------------------

@dataclass(frozen=True)
class Polyform:
    width: int
    poly: Polynomial

    def __post_init__(self):
        if self.poly.max_var() >= self.width:
            raise IndexOutOfRange(f"x{self.poly.max_var()} in a polyform of width {self.width}")

    def __str__(self):
        return format_poly(self.poly)


def polyform_to_circuit(pf: Polyform) -> Circuit:
    n = pf.width
    ops: list[PrimOp] = [Init(0, n)]
    ops.extend(GCX(m, n) for m in pf.poly.terms())
    ops.append(Term(0, n))
    return Circuit(n, tuple(ops), n)


def circuit_to_polynomial_form(c: Circuit) -> Polynomial:
    """Read a circuit of GCX gates all aimed at the last wire as a polynomial."""
    last = c.in_width - 1
    terms = []
    for k, op in enumerate(c.ops):
        if not isinstance(op, GCX) or op.target != last:
            raise NotPolynomialForm(f"op {k} ({op}) is not a gate targeting wire {last}")
        terms.append(op.controls)
    return Polynomial.from_terms(terms)


def circuit_to_polyform(c: Circuit) -> Polyform:
    """Inverse of ``polyform_to_circuit``, accepting any monomial order or repeats."""
    ops = c.ops
    n = c.in_width
    if (
        len(ops) < 2
        or ops[0] != Init(0, n)
        or ops[-1] != Term(0, n)
    ):
        raise NotPolynomialForm("expected init 0 below the last wire ... term 0 on it")
    body = Circuit(n + 1, ops[1:-1])
    return Polyform(n, circuit_to_polynomial_form(body))


def sandwich(op: PrimOp, e: Polyform) -> Polyform:
    """Polyform of ``op ; e ; dagger(op)``, read over the input wires of ``op``."""
    p = e.poly
    if isinstance(op, (GCX, Swap)):
        if op_step(op, e.width) != e.width:
            raise WidthMismatch("unreachable")
        if isinstance(op, GCX):
            return Polyform(e.width, poly_subst(p, op.target, Polynomial.monomial(op.controls)))
        i, j = op.i, op.j
        return Polyform(e.width, poly_rename(p, lambda v: j if v == i else i if v == j else v))
    if isinstance(op, Init):
        if e.width < 1 or op.position > e.width - 1:
            raise WidthMismatch(f"{op} does not produce width {e.width}")
        pos = op.position
        fixed = poly_fix(p, pos, op.bit)
        return Polyform(e.width - 1, poly_rename(fixed, lambda v: v - 1 if v > pos else v))
    if isinstance(op, Term):
        pos = op.position
        if pos > e.width:
            raise WidthMismatch(f"{op} does not produce width {e.width}")
        lifted = poly_rename(p, lambda v: v + 1 if v >= pos else v)
        u = Polynomial.var(pos) + (Polynomial.one() if op.bit else Polynomial.zero())
        return Polyform(e.width + 1, u + lifted + u * lifted)
    raise TypeError(f"not a primitive op: {op!r}")


def restriction_polyform(c: Circuit) -> Polyform:
    """Polyform equal to ``c ; dagger(c)``, built gate by gate from the end."""
    e = Polyform(c.out_width, Polynomial.zero())
    for op in reversed(c.ops):
        e = sandwich(op, e)
    assert e.width == c.in_width
    return e


def normalize_idempotent(c: Circuit, max_wires: int = DEFAULT_MAX_WIRES) -> Polyform:
    """Canonical polyform of an idempotent circuit."""
    if c.in_width != c.out_width:
        raise NotIdempotent(f"circuit is {c.in_width} -> {c.out_width}")
    sem = h0(c, max_wires)
    if not is_partial_identity(sem):
        raise NotIdempotent("circuit does not act as a partial identity")
    pf = restriction_polyform(c)
    oracle = anf_from_indicator(c.in_width, sem.domain())
    assert pf.poly == oracle, f"normal form {pf.poly} disagrees with oracle {oracle}"
    return pf
