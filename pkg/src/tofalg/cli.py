"""Command-line front end and the circuit file format.

A circuit file starts with ``wires <n>`` and lists one op per line::

    wires 3
    tof 0 1 2        # two controls
    cnot 0 1
    not 2
    gcx 0 1 2 -> 3   # any number of controls (needs 4 wires)
    init 1 @0        # new wire at position 0
    term 0 @1
    swap 0 2

Wires are numbered from 0 at the top and renumber as wires are created or
removed.  ``#`` starts a comment.
"""

from __future__ import annotations

import argparse
import random
import sys
from typing import Optional, Sequence

from .circuit import GCX, Circuit, Init, PrimOp, Swap, Term, dagger, expand_gcnot, op_step, restriction
from .errors import CapExceeded, NotIdempotent, ParseError, TofError
from .fpinj import DEFAULT_MAX_WIRES, BitVec, PartialInjection, evaluate, h0
from .poly import format_poly, normalize_idempotent, polyform_to_circuit
from .rewrite import base_rules, check_axioms, rule_db, simplify
from .synth import synth_partial_iso

EXIT_OK, EXIT_DIFFERENT, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"expected {what}, got {tok!r}", lineno) from None
    if v < 0:
        raise ParseError(f"{what} must be non-negative, got {v}", lineno)
    return v


def _bit(tok: str, lineno: int) -> int:
    if tok not in ("0", "1"):
        raise ParseError(f"expected a bit, got {tok!r}", lineno)
    return int(tok)


def _pos(tok: str, lineno: int) -> int:
    if not tok.startswith("@"):
        raise ParseError(f"expected @<position>, got {tok!r}", lineno)
    return _int(tok[1:], lineno, "position")


def parse_op(words: list[str], lineno: int) -> PrimOp:
    head, args = words[0], words[1:]

    def arity(n):
        if len(args) != n:
            raise ParseError(f"'{head}' takes {n} arguments, got {len(args)}", lineno)

    if head == "gcx":
        if "->" not in args or args.index("->") != len(args) - 2:
            raise ParseError("expected 'gcx <controls> -> <target>'", lineno)
        ctl = [_int(a, lineno, "wire") for a in args[:-2]]
        return _gcx(ctl, _int(args[-1], lineno, "wire"), lineno)
    if head == "tof":
        arity(3)
        a, b, t = (_int(x, lineno, "wire") for x in args)
        return _gcx([a, b], t, lineno)
    if head == "cnot":
        arity(2)
        a, t = (_int(x, lineno, "wire") for x in args)
        return _gcx([a], t, lineno)
    if head == "not":
        arity(1)
        return _gcx([], _int(args[0], lineno, "wire"), lineno)
    if head in ("init", "term"):
        arity(2)
        cls = Init if head == "init" else Term
        return cls(_bit(args[0], lineno), _pos(args[1], lineno))
    if head == "swap":
        arity(2)
        i, j = (_int(x, lineno, "wire") for x in args)
        if i == j:
            raise ParseError("swap needs two different wires", lineno)
        return Swap(i, j)
    raise ParseError(f"unknown op {head!r}", lineno)


def _gcx(controls: list[int], target: int, lineno: int) -> GCX:
    if len(set(controls)) != len(controls):
        raise ParseError("repeated control wire", lineno)
    try:
        return GCX(tuple(controls), target)
    except TofError as exc:
        raise ParseError(str(exc), lineno) from None


def parse(text: str) -> Circuit:
    width: Optional[int] = None
    in_width = 0
    ops: list[PrimOp] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if width is None:
            if words[0] != "wires" or len(words) != 2:
                raise ParseError("file must start with 'wires <n>'", lineno)
            width = in_width = _int(words[1], lineno, "wire count")
            continue
        op = parse_op(words, lineno)
        try:
            width = op_step(op, width)
        except TofError as exc:
            raise type(exc)(f"line {lineno}: {exc}") from None
        ops.append(op)
    if width is None:
        raise ParseError("missing 'wires <n>' header", 1)
    return Circuit(in_width, tuple(ops))


def format_op(op: PrimOp) -> str:
    if isinstance(op, GCX):
        ctl = op.controls
        if len(ctl) == 0:
            return f"not {op.target}"
        if len(ctl) == 1:
            return f"cnot {ctl[0]} {op.target}"
        if len(ctl) == 2:
            return f"tof {ctl[0]} {ctl[1]} {op.target}"
        return "gcx " + " ".join(map(str, ctl)) + f" -> {op.target}"
    if isinstance(op, Swap):
        return f"swap {op.i} {op.j}"
    kind = "init" if isinstance(op, Init) else "term"
    return f"{kind} {op.bit} @{op.position}"


def format_circuit(c: Circuit) -> str:
    return "\n".join([f"wires {c.in_width}"] + [format_op(op) for op in c.ops]) + "\n"


# -- commands ------------------------------------------------------------------

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path: str) -> Circuit:
    return parse(_read(path))


def _emit(c: Circuit, args) -> str:
    return format_circuit(expand_gcnot(c) if args.expand else c)


def cmd_eval(args) -> int:
    c = _load(args.file)
    bits = args.input.strip()
    if any(b not in "01" for b in bits):
        raise ParseError(f"--input must be a bit string, got {bits!r}")
    y = evaluate(c, BitVec.of(bits))
    print("undefined" if y is None else str(y))
    return EXIT_OK


def cmd_table(args) -> int:
    sys.stdout.write(h0(_load(args.file), args.max_wires).to_tsv())
    return EXIT_OK


def cmd_equiv(args) -> int:
    a, b = _load(args.a), _load(args.b)
    if (a.in_width, a.out_width) != (b.in_width, b.out_width):
        print(f"not equal: types {a.in_width}->{a.out_width} and {b.in_width}->{b.out_width}")
        return EXIT_DIFFERENT
    fa, fb = h0(a, args.max_wires), h0(b, args.max_wires)
    if fa == fb:
        print(f"equal ({len(fa)} of {1 << a.in_width} inputs defined)")
        return EXIT_OK
    da, db = fa.as_dict(), fb.as_dict()
    x = min(k for k in set(da) | set(db) if da.get(k) != db.get(k))

    def show(v, width):
        return "undefined" if v is None else BitVec.from_int(v, width).__str__()

    xs = BitVec.from_int(x, a.in_width)
    print(f"not equal: on {xs} first gives {show(da.get(x), a.out_width)}, second gives {show(db.get(x), b.out_width)}")
    return EXIT_DIFFERENT


def cmd_dagger(args) -> int:
    sys.stdout.write(_emit(dagger(_load(args.file)), args))
    return EXIT_OK


def cmd_restrict(args) -> int:
    sys.stdout.write(_emit(restriction(_load(args.file)), args))
    return EXIT_OK


def cmd_normalize(args) -> int:
    pf = normalize_idempotent(_load(args.file), args.max_wires)
    sys.stdout.write(f"# polyform {format_poly(pf.poly)}\n")
    sys.stdout.write(_emit(polyform_to_circuit(pf), args))
    return EXIT_OK


def cmd_simplify(args) -> int:
    c = _load(args.file)
    s = simplify(c)
    sys.stdout.write(_emit(s, args))
    sys.stdout.write(f"# gates {len(c)} -> {len(s)} ({len(s) - len(c):+d})\n")
    return EXIT_OK


def cmd_synth(args) -> int:
    f = PartialInjection.from_tsv(_read(args.map))
    sys.stdout.write(_emit(synth_partial_iso(f, args.max_wires), args))
    return EXIT_OK


def cmd_check_axioms(args) -> int:
    families = tuple(args.family) if args.family else None
    reports = check_axioms(
        random.Random(args.seed), families, args.exhaustive_width, args.random,
    )
    failed = 0
    for r in reports:
        status = "PASS" if r.ok else "FAIL"
        failed += not r.ok
        print(f"{status} {r.name} ({r.instances} instances){' ' + r.detail if r.detail else ''}")
    print(f"{len(reports) - failed}/{len(reports)} identities hold")
    return EXIT_OK if not failed else EXIT_DIFFERENT


def cmd_rules(args) -> int:
    rules = rule_db() if args.all else base_rules()
    for r in rules:
        if args.all and not r.applicable:
            continue
        print(r)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tofalg", description="Toffoli circuits with ancillary bits.")
    p.add_argument("--max-wires", type=int, default=DEFAULT_MAX_WIRES,
                   help="refuse exhaustive evaluation above this many input wires (default %(default)s)")
    p.add_argument("--expand", action="store_true",
                   help="expand gates with more than two controls before printing")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", help="run a circuit on one input")
    s.add_argument("file")
    s.add_argument("--input", required=True, help="input bits, wire 0 first")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("table", help="print the truth table of a circuit")
    s.add_argument("file")
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("equiv", help="decide whether two circuits are equal")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_equiv)

    for name, func, text in (
        ("dagger", cmd_dagger, "print the mirror image (partial inverse)"),
        ("restrict", cmd_restrict, "print c followed by its mirror image"),
        ("normalize", cmd_normalize, "normal form of an idempotent circuit"),
        ("simplify", cmd_simplify, "greedily shrink a circuit"),
    ):
        s = sub.add_parser(name, help=text)
        s.add_argument("file")
        s.set_defaults(func=func)

    s = sub.add_parser("synth", help="build a circuit from a truth table")
    s.add_argument("--map", required=True, help="TSV truth table ('-' for stdin)")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("check-axioms", help="verify every identity in the rule database")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--exhaustive-width", type=int, default=0,
                   help="also try every set-variable layout up to this width")
    s.add_argument("--random", type=int, default=1, help="random wider instances per rule")
    s.add_argument("--family", action="append",
                   choices=["CNOT", "TOF", "DEF", "IWAMA", "ZIP", "TRANSP"])
    s.set_defaults(func=cmd_check_axioms)

    s = sub.add_parser("rules", help="list the rule database")
    s.add_argument("--all", action="store_true", help="include usable reverse orientations")
    s.set_defaults(func=cmd_rules)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except NotIdempotent as exc:
        print(f"error: not idempotent: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TofError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
