"""Rewrite rules over circuits, a matcher, and a greedy simplifier.

Rules are written in a small pattern language over *tracks* rather than
wire positions.  A track is one lifetime of a wire: it starts at a circuit
input or an ``init`` and ends at a circuit output or a ``term``.  Working on
tracks makes patterns independent of where ancillas happen to be inserted.

Pattern syntax, one op per ``;`` or newline::

    gcx a X -> b      controls: lowercase = one track, Uppercase = a set
    tof a b c         sugar for gcx a b -> c
    cnot a b          sugar for gcx a -> b
    not a             sugar for gcx -> a
    init 1 a @below b placement is only used when laying out an instance
    term 0 a
    swap a b

Re-initialising a name after its ``term`` starts a new lifetime.  Singles
are bound injectively and set variables are disjoint from every single;
two set variables may overlap.
"""

from __future__ import annotations

import builtins
import itertools
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

from .circuit import GCX, Circuit, Init, Swap, Term, dagger, lower_to_generators, omega, unzip_ops
from .errors import PatternMismatch, StaleMatch
from .fpinj import DEFAULT_MAX_WIRES, equivalent

# -- track view ----------------------------------------------------------------
#
# track ops are tuples:
#   ("gcx", frozenset(control ids), target id)
#   ("swap", id, id)
#   ("init", bit, id)
#   ("term", bit, id)


@dataclass
class Tracks:
    in_ids: list[int]
    keys: dict[int, Fraction]
    ops: list[tuple]
    next_id: int

    def fresh(self) -> int:
        self.next_id += 1
        return self.next_id - 1

    def max_key(self) -> Fraction:
        return max(self.keys.values(), default=Fraction(0))


def _between(lo: Optional[Fraction], hi: Optional[Fraction]) -> Fraction:
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    return (lo + hi) / 2


def to_tracks(c: Circuit) -> Tracks:
    live = list(range(c.in_width))
    keys = {i: Fraction(i) for i in live}
    nid = c.in_width
    ops: list[tuple] = []
    for op in c.ops:
        if isinstance(op, GCX):
            ops.append(("gcx", frozenset(live[w] for w in op.controls), live[op.target]))
        elif isinstance(op, Swap):
            ops.append(("swap", live[op.i], live[op.j]))
        elif isinstance(op, Init):
            p = op.position
            lo = keys[live[p - 1]] if p > 0 else None
            hi = keys[live[p]] if p < len(live) else None
            keys[nid] = _between(lo, hi)
            live.insert(p, nid)
            ops.append(("init", op.bit, nid))
            nid += 1
        else:
            ops.append(("term", op.bit, live.pop(op.position)))
    return Tracks(list(range(c.in_width)), keys, ops, nid)


def from_tracks(t: Tracks) -> Circuit:
    live = sorted(t.in_ids, key=t.keys.__getitem__)
    out = []
    for op in t.ops:
        kind = op[0]
        if kind == "gcx":
            out.append(GCX(tuple(live.index(w) for w in op[1]), live.index(op[2])))
        elif kind == "swap":
            out.append(Swap(live.index(op[1]), live.index(op[2])))
        elif kind == "init":
            key = t.keys[op[2]]
            p = sum(1 for w in live if t.keys[w] < key)
            live.insert(p, op[2])
            out.append(Init(op[1], p))
        else:
            p = live.index(op[2])
            live.pop(p)
            out.append(Term(op[1], p))
    return Circuit(len(t.in_ids), tuple(out))


def _touches(op: tuple) -> frozenset:
    if op[0] == "gcx":
        return op[1] | {op[2]}
    if op[0] == "swap":
        return frozenset(op[1:])
    return frozenset([op[2]])


# -- patterns ------------------------------------------------------------------

@dataclass(frozen=True)
class PatOp:
    kind: str
    names: tuple[str, ...] = ()  # gcx: single controls; swap: the pair
    sets: tuple[str, ...] = ()
    target: str = ""  # gcx target, or the init/term track
    bit: int = 0
    place: Optional[tuple[str, str]] = None


@dataclass(frozen=True)
class Side:
    ops: tuple[PatOp, ...]
    inputs: dict  # base name -> lifetime name
    outputs: dict  # base name -> lifetime name
    sets: frozenset
    mentioned: frozenset  # base names
    order: tuple  # base names of input singles, sorted; the default top-to-bottom layout

    @property
    def lifetimes(self) -> set[str]:
        out = set()
        for op in self.ops:
            out.update(op.names)
            if op.target:
                out.add(op.target)
        return out


def _base(lifetime: str) -> str:
    return lifetime.split("#")[0]


_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9_']*$")


def parse_side(text: str) -> Side:
    state: dict[str, Optional[str]] = {}
    count: dict[str, int] = {}
    inputs: dict[str, str] = {}
    order: list[str] = []
    sets: set[str] = set()
    ops: list[PatOp] = []

    def use(name: str) -> str:
        if not _NAME.match(name) or name[0].isupper():
            raise ValueError(f"bad track name {name!r}")
        if name not in state:
            lt = f"{name}#0"
            state[name], count[name], inputs[name] = lt, 1, lt
            order.append(name)
        elif state[name] is None:
            raise ValueError(f"{name} used after its term")
        return state[name]

    def birth(name: str) -> str:
        if state.get(name) is not None:
            raise ValueError(f"{name} initialised while live")
        k = count.get(name, 0)
        count[name] = k + 1
        state[name] = f"{name}#{k}"
        return state[name]

    def gcx(tokens: list[str], target: str) -> PatOp:
        singles, svars = [], []
        for tok in tokens:
            if tok[0].isupper():
                if not _NAME.match(tok):
                    raise ValueError(f"bad set name {tok!r}")
                sets.add(tok)
                svars.append(tok)
            else:
                singles.append(use(tok))
        return PatOp("gcx", tuple(singles), tuple(svars), use(target))

    for stmt in re.split(r"[;\n]", text):
        words = stmt.split()
        if not words:
            continue
        head, args = words[0], words[1:]
        if head == "gcx":
            if "->" not in args or args.index("->") != len(args) - 2:
                raise ValueError(f"expected 'gcx ... -> t': {stmt!r}")
            ops.append(gcx(args[:-2], args[-1]))
        elif head == "tof" and len(args) == 3:
            ops.append(gcx(args[:2], args[2]))
        elif head == "cnot" and len(args) == 2:
            ops.append(gcx(args[:1], args[1]))
        elif head == "not" and len(args) == 1:
            ops.append(gcx([], args[0]))
        elif head == "swap" and len(args) == 2:
            ops.append(PatOp("swap", (use(args[0]), use(args[1]))))
        elif head in ("init", "term") and len(args) in (2, 3):
            bit = int(args[0])
            if bit not in (0, 1):
                raise ValueError(f"bit must be 0 or 1: {stmt!r}")
            place = None
            if head == "init":
                if len(args) == 3:
                    where = args[2].lstrip("@")
                    if where in ("top", "bottom"):
                        place = (where, "")
                    else:
                        rel, _, ref = where.partition(":")
                        if rel not in ("below", "above") or not ref:
                            raise ValueError(f"bad placement {args[2]!r}")
                        place = (rel, use(ref))
                lt = birth(args[1])
            else:
                if len(args) != 2:
                    raise ValueError(f"term takes a bit and a track: {stmt!r}")
                lt = use(args[1])
                state[args[1]] = None
            ops.append(PatOp(head, (), (), lt, bit, place))
        else:
            raise ValueError(f"cannot parse pattern op {stmt!r}")
    outputs = {b: lt for b, lt in state.items() if lt is not None}
    return Side(tuple(ops), inputs, outputs, frozenset(sets), frozenset(state), tuple(sorted(order)))


def _dagger_side_text(text: str) -> str:
    """Mirror a pattern: reverse the ops and exchange init with term."""
    out = []
    for stmt in re.split(r"[;\n]", text):
        words = stmt.split()
        if not words:
            continue
        if words[0] == "init":
            words = ["term"] + words[1:3]
        elif words[0] == "term":
            words = ["init"] + words[1:]
        out.append(" ".join(words))
    return "; ".join(reversed(out))


# -- rules ---------------------------------------------------------------------

@dataclass(frozen=True)
class RewriteRule:
    name: str
    lhs_text: str
    rhs_text: str
    source: str
    lhs: Side = field(init=False, repr=False, compare=False)
    rhs: Side = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "lhs", parse_side(self.lhs_text))
        object.__setattr__(self, "rhs", parse_side(self.rhs_text))

    def reversed(self) -> "RewriteRule":
        name = self.name[:-4] if self.name.endswith(".rev") else self.name + ".rev"
        return RewriteRule(name, self.rhs_text, self.lhs_text, self.source)

    def mirrored(self, name: str) -> "RewriteRule":
        return RewriteRule(
            name, _dagger_side_text(self.lhs_text), _dagger_side_text(self.rhs_text), self.source
        )

    @property
    def instantiable(self) -> bool:
        """Every track and set the right side needs is bound by the left side,
        and both sides have the same boundary."""
        lhs, rhs = self.lhs, self.rhs
        bound = {b for b, lt in lhs.inputs.items() if lt in lhs.lifetimes}
        if not set(rhs.inputs) <= bound or not rhs.sets <= lhs.sets:
            return False
        passthrough = {b for b in lhs.inputs if b not in rhs.mentioned}
        if set(rhs.inputs) | passthrough != set(lhs.inputs):
            return False
        return set(rhs.outputs) | passthrough == set(lhs.outputs)

    @property
    def applicable(self) -> bool:
        return bool(self.lhs.ops) and self.instantiable

    def __str__(self):
        return f"{self.name}: {self.lhs_text or '(empty)'}  =  {self.rhs_text or '(empty)'}"


@dataclass(frozen=True)
class Match:
    rule: str
    position: int
    binding: tuple  # sorted (name, id or frozenset of ids) pairs

    def as_dict(self) -> dict:
        return dict(self.binding)


def _freeze(bind: dict, sets: dict) -> tuple:
    items = list(bind.items()) + [(k, frozenset(v)) for k, v in sets.items()]
    return tuple(sorted(items, key=lambda kv: kv[0]))


# -- matching ------------------------------------------------------------------

def _match_order(side: Side) -> list[int]:
    """Match binding ops first, then gates, deferring gates whose control
    set would be split between two still-unbound set variables."""
    remaining = list(range(len(side.ops)))
    bound: set[str] = set()
    order = []
    while remaining:

        def cost(k):
            op = side.ops[k]
            unbound = sum(1 for s in op.sets if s not in bound)
            return (unbound, len(op.sets) - unbound, k)

        k = min(remaining, key=cost)
        remaining.remove(k)
        order.append(k)
        bound.update(side.ops[k].sets)
    return order


class _State:
    def __init__(self):
        self.bind: dict[str, int] = {}
        self.sets: dict[str, frozenset] = {}
        self.used: set[int] = set()

    def copy(self):
        s = _State()
        s.bind, s.sets, s.used = dict(self.bind), dict(self.sets), set(self.used)
        return s

    def in_sets(self, t: int) -> bool:
        return any(t in v for v in self.sets.values())

    def bind_single(self, name: str, t: int) -> bool:
        if name in self.bind:
            return self.bind[name] == t
        if t in self.used or self.in_sets(t):
            return False
        self.bind[name] = t
        self.used.add(t)
        return True


def _match_op(pop: PatOp, top: tuple, st: _State) -> Iterator[_State]:
    kind = top[0]
    if pop.kind != kind:
        return
    if kind in ("init", "term"):
        if top[1] == pop.bit:
            st = st.copy()
            if st.bind_single(pop.target, top[2]):
                yield st
        return
    if kind == "swap":
        for a, b in ((top[1], top[2]), (top[2], top[1])):
            s = st.copy()
            if s.bind_single(pop.names[0], a) and s.bind_single(pop.names[1], b):
                yield s
        return
    controls, target = top[1], top[2]
    base = st.copy()
    if not base.bind_single(pop.target, target):
        return
    rest = set(controls)
    for name in pop.names:
        if name in base.bind:
            if base.bind[name] not in rest:
                return
            rest.discard(base.bind[name])
    for s in pop.sets:
        if s in base.sets:
            if not base.sets[s] <= controls:
                return
            rest -= base.sets[s]
    free_singles = [n for n in pop.names if n not in base.bind]
    free_sets = [s for s in pop.sets if s not in base.sets]
    candidates = sorted(t for t in rest if t not in base.used and not base.in_sets(t))
    for choice in itertools.permutations(candidates, len(free_singles)):
        s = base.copy()
        if not all(s.bind_single(free_singles[j], t) for j, t in enumerate(choice)):
            continue
        left = frozenset(rest - set(choice))
        if free_sets:
            if left & s.used:
                continue
            s.sets[free_sets[0]] = left
            for extra in free_sets[1:]:
                s.sets[extra] = frozenset()
        elif left:
            continue
        yield s


def _window_births(window: list[tuple]) -> set[int]:
    return {op[2] for op in window if op[0] == "init"}


def _search(side: Side, window: list[tuple]) -> Iterator[_State]:
    order = _match_order(side)
    born = _window_births(window)
    input_lts = set(side.inputs.values())

    def rec(k: int, st: _State):
        if k == len(order):
            if any(st.bind[lt] in born for lt in input_lts if lt in st.bind):
                return
            if any(v & born for v in st.sets.values()):
                return
            yield st
            return
        i = order[k]
        for nxt in _match_op(side.ops[i], window[i], st):
            yield from rec(k + 1, nxt)

    yield from rec(0, _State())


def _check_binding(side: Side, window: list[tuple], binding: dict) -> bool:
    """Exact check of a stored binding against a window."""
    if len(window) != len(side.ops):
        return False
    bind = {k: v for k, v in binding.items() if not isinstance(v, frozenset)}
    sets = {k: v for k, v in binding.items() if isinstance(v, frozenset)}
    if set(bind) != side.lifetimes or set(sets) != set(side.sets):
        return False
    singles = list(bind.values())
    if len(set(singles)) != len(singles):
        return False
    members = frozenset().union(*sets.values()) if sets else frozenset()
    if members & set(singles):
        return False
    for pop, top in builtins.zip(side.ops, window):
        if pop.kind != top[0]:
            return False
        if pop.kind in ("init", "term"):
            if top[1] != pop.bit or top[2] != bind[pop.target]:
                return False
        elif pop.kind == "swap":
            if {top[1], top[2]} != {bind[n] for n in pop.names}:
                return False
        else:
            want = frozenset(bind[n] for n in pop.names).union(*(sets[s] for s in pop.sets))
            if top[1] != want or top[2] != bind[pop.target]:
                return False
    born = _window_births(window)
    if any(bind[lt] in born for lt in side.inputs.values()) or members & born:
        return False
    return True


def _live_before(t: Tracks, i: int) -> set[int]:
    live = set(t.in_ids)
    for op in t.ops[:i]:
        if op[0] == "init":
            live.add(op[2])
        elif op[0] == "term":
            live.discard(op[2])
    return live


def _place(place, bind: dict, live: set, keys: dict) -> Fraction:
    """Key for a new track: next to a live reference, on top, or at the bottom."""
    ordered = sorted(live, key=keys.__getitem__)
    lo = hi = None
    if place and place[0] in ("below", "above") and bind.get(place[1]) in live:
        ref = bind[place[1]]
        idx = ordered.index(ref)
        if place[0] == "below":
            lo = keys[ref]
            hi = keys[ordered[idx + 1]] if idx + 1 < len(ordered) else None
        else:
            hi = keys[ref]
            lo = keys[ordered[idx - 1]] if idx > 0 else None
    elif place and place[0] == "top":
        hi = keys[ordered[0]] if ordered else None
    else:
        lo = keys[ordered[-1]] if ordered else None
    return _between(lo, hi)


def _replace(rule: RewriteRule, t: Tracks, i: int, binding: dict) -> Optional[Tracks]:
    """Splice the instantiated right side over the window at ``i``.

    Returns ``None`` when the instance would not be a valid circuit, for
    example when a surviving track would land in a different output slot.
    """
    lhs, rhs = rule.lhs, rule.rhs
    n = len(lhs.ops)
    bind = {k: v for k, v in binding.items() if not isinstance(v, frozenset)}
    sets = {k: v for k, v in binding.items() if isinstance(v, frozenset)}
    keys = dict(t.keys)
    out = Tracks(list(t.in_ids), keys, [], t.next_id)

    rb: dict[str, int] = {}
    for base, lt in rhs.inputs.items():
        rb[lt] = bind[lhs.inputs[base]]
    lhs_final = {base: bind[lt] for base, lt in lhs.outputs.items()}
    live = _live_before(t, i)
    new_ops = []
    for pop in rhs.ops:
        if pop.kind == "init":
            base = _base(pop.target)
            if rhs.outputs.get(base) == pop.target and base in lhs_final:
                rb[pop.target] = lhs_final[base]
            else:
                rb[pop.target] = out.fresh()
                keys[rb[pop.target]] = _place(pop.place, rb, live, keys)
            live.add(rb[pop.target])
            new_ops.append(("init", pop.bit, rb[pop.target]))
        elif pop.kind == "term":
            live.discard(rb[pop.target])
            new_ops.append(("term", pop.bit, rb[pop.target]))
        elif pop.kind == "gcx":
            ctl = frozenset(rb[nm] for nm in pop.names).union(*(sets[s] for s in pop.sets))
            tgt = rb[pop.target]
            if tgt in ctl:
                return None
            new_ops.append(("gcx", ctl, tgt))
        else:
            new_ops.append(("swap", rb[pop.names[0]], rb[pop.names[1]]))

    rename: dict[int, int] = {}
    for base, lhs_id in lhs_final.items():
        if base not in rhs.mentioned:
            new_id = bind[lhs.inputs[base]]
        elif base in rhs.outputs:
            new_id = rb[rhs.outputs[base]]
        else:
            return None
        if new_id != lhs_id:
            rename[lhs_id] = new_id

    if rename:
        live_end = _live_before(t, i + n)
        before = sorted(live_end, key=keys.__getitem__)
        after = sorted((rename.get(w, w) for w in live_end), key=keys.__getitem__)
        if [rename.get(w, w) for w in before] != after:
            return None

    def ren(op):
        if op[0] == "gcx":
            return ("gcx", frozenset(rename.get(w, w) for w in op[1]), rename.get(op[2], op[2]))
        if op[0] == "swap":
            return ("swap", rename.get(op[1], op[1]), rename.get(op[2], op[2]))
        return (op[0], op[1], rename.get(op[2], op[2]))

    out.ops = t.ops[:i] + new_ops + [ren(op) for op in t.ops[i + n:]]
    return out


def _result(c: Circuit, tr: Tracks) -> Optional[Circuit]:
    try:
        out = from_tracks(tr)
    except (ValueError, IndexError):
        return None
    if out.out_width != c.out_width:
        return None
    return out


_DB: Optional[dict[str, RewriteRule]] = None


def _rule(rule: RewriteRule | str) -> RewriteRule:
    return rule if isinstance(rule, RewriteRule) else rule_by_name(rule)


def find_matches(c: Circuit, rule: RewriteRule | str) -> list[Match]:
    rule = _rule(rule)
    if not rule.applicable:
        return []
    t = to_tracks(c)
    n = len(rule.lhs.ops)
    matches = []
    seen = set()
    for i in range(len(t.ops) - n + 1):
        for st in _search(rule.lhs, t.ops[i:i + n]):
            key = _freeze(st.bind, st.sets)
            if (i, key) in seen:
                continue
            seen.add((i, key))
            tr = _replace(rule, t, i, dict(key))
            if tr is not None and _result(c, tr) is not None:
                matches.append(Match(rule.name, i, key))
    return matches


def apply(c: Circuit, m: Match, rule: RewriteRule | None = None) -> Circuit:
    rule = rule or rule_by_name(m.rule)
    if rule.name != m.rule:
        raise StaleMatch(f"match is for {m.rule}, not {rule.name}")
    t = to_tracks(c)
    n = len(rule.lhs.ops)
    binding = m.as_dict()
    if not rule.instantiable or not _check_binding(rule.lhs, t.ops[m.position:m.position + n], binding):
        raise StaleMatch(f"{m.rule} does not match at op {m.position}")
    tr = _replace(rule, t, m.position, binding)
    out = None if tr is None else _result(c, tr)
    if out is None:
        raise StaleMatch(f"{m.rule} at op {m.position} does not give a valid circuit")
    return out


# -- the identity database -----------------------------------------------------

# (name, lhs, rhs, source, mirrored name or None)
_RULES = [
    # identities of the cnot fragment
    ("CNOT.1", "cnot a b; cnot b a; cnot a b", "swap a b", "CNOT", None),
    ("CNOT.2", "cnot a b; cnot a b", "", "CNOT", None),
    ("CNOT.3", "cnot b a; cnot b c", "cnot b c; cnot b a", "CNOT", None),
    ("CNOT.4", "init 1 a @above:w; cnot a w",
     "init 1 a @above:w; cnot a w; term 1 a; init 1 a @above:w", "CNOT", None),
    ("CNOT.4b", "cnot a w; term 1 a",
     "term 1 a; init 1 a @above:w; cnot a w; term 1 a", "CNOT", None),
    ("CNOT.5", "cnot a b; cnot c b", "cnot c b; cnot a b", "CNOT", None),
    ("CNOT.6", "init 1 a; term 1 a", "", "CNOT", None),
    ("CNOT.7", "init 1 a @above:w; init 1 b @below:a; cnot a b; cnot b w; term 1 a",
     "init 1 a @above:w; init 1 b @below:a; cnot a b; term 1 a", "CNOT", "CNOT.7b"),
    ("CNOT.8", "cnot a b; cnot b c; cnot a b", "cnot b c; cnot a c", "CNOT", None),
    ("CNOT.9", "init 1 a @above:w; init 1 b @below:a; cnot a b; term 1 a; term 1 b",
     "init 1 a @above:w; init 1 b @below:a; term 1 w; cnot a b; init 1 w @below:b; term 1 a; term 1 b",
     "CNOT", None),
    # identities of the toffoli category
    ("TOF.1", "init 1 a @top; tof a b c", "init 1 a @top; cnot b c", "TOF", "TOF.1b"),
    ("TOF.2", "init 0 a @top; tof a b c", "init 0 a @top", "TOF", "TOF.2b"),
    ("TOF.3", "tof a b c; tof d e c", "tof d e c; tof a b c", "TOF", None),
    ("TOF.4", "tof b c a; tof c d e", "tof c d e; tof b c a", "TOF", None),
    ("TOF.5", "tof b c a; tof b c d", "tof b c d; tof b c a", "TOF", None),
    ("TOF.5.5", "tof a c d; tof b c d", "tof b c d; tof a c d", "TOF", None),
    ("TOF.6", "init 1 c @below:b; cnot a c; term 0 c; init 1 c @below:b; cnot b c; term 0 c",
     "init 1 c @below:b; tof a b c; term 0 c", "TOF", None),
    ("TOF.7", "init 1 a @above:w; term 0 a",
     "init 1 a @above:w; term 1 w; init 1 w @below:a; term 0 a", "TOF", None),
    ("TOF.8", "init 1 a; term 1 a", "", "TOF", None),
    ("TOF.9", "tof a b c; tof a b c", "", "TOF", None),
    ("TOF.10", "tof b c d; tof a b c; tof b c d", "tof a b d; tof a b c", "TOF", None),
    ("TOF.11", "cnot a b; tof b c d; cnot a b", "tof a c d; tof b c d", "TOF", None),
    ("TOF.12", "tof a b c; tof b c d; tof a b c", "tof a b d; tof b c d", "TOF", None),
    ("TOF.13", "tof a b c; cnot c d; tof a b c", "tof a b d; cnot c d", "TOF", None),
    ("TOF.14", "cnot a b; cnot b a; cnot a b", "swap a b", "TOF", None),
    ("TOF.15", "tof a b c", "swap a b; tof a b c; swap a b", "TOF", None),
    ("TOF.16", "init 0 e @below:b; tof a b e; tof e c d; tof a b e; term 0 e",
     "swap b c; init 0 e @below:b; tof a b e; tof e c d; tof a b e; term 0 e; swap b c",
     "TOF", None),
    ("TOF.extra", "init 0 a; term 0 a", "", "TOF", None),
    # definitions of the derived gates
    ("DEF.cnot", "cnot a b", "init 1 k @top; tof k a b; term 1 k", "DEF", None),
    ("DEF.not", "not a", "init 1 k @top; cnot k a; term 1 k", "DEF", None),
    ("DEF.ket0", "init 0 a", "init 1 a; not a", "DEF", "DEF.bra0"),
    # Iwama's identities
    ("IWAMA.i", "gcx X -> x; gcx X -> x", "", "IWAMA", None),
    ("IWAMA.ii", "init 0 x; gcx x X -> y", "init 0 x", "IWAMA", "IWAMA.ii.dag"),
    ("IWAMA.iii", "gcx X -> x; gcx Y -> x", "gcx Y -> x; gcx X -> x", "IWAMA", None),
    ("IWAMA.iv", "gcx X -> x; gcx Y -> y", "gcx Y -> y; gcx X -> x", "IWAMA", None),
    ("IWAMA.v", "gcx X -> x; gcx x Y -> y", "gcx X Y -> y; gcx x Y -> y; gcx X -> x", "IWAMA", None),
    ("IWAMA.vi", "init 0 z; cnot x z; gcx x X -> y", "init 0 z; cnot x z; gcx z X -> y", "IWAMA", None),
    # zipping multiply controlled gates
    ("ZIP.i", "gcx X Y -> t", "init 0 a; gcx X -> a; gcx a Y -> t; gcx X -> a; term 0 a", "ZIP", None),
    ("ZIP.ii", "gcx B -> t; tof c t z", "gcx B c -> z; tof c t z; gcx B -> t", "ZIP", None),
    ("ZIP.iii", "gcx b B -> t; tof b t z", "gcx b B -> z; tof b t z; gcx b B -> t", "ZIP", None),
    # exchanging two controls
    ("TRANSP", "gcx a b X -> t", "swap a b; gcx a b X -> t; swap a b", "TRANSP", None),
]


def rule_db() -> list[RewriteRule]:
    """Every identity in both orientations; ``.rev`` names the reverse."""
    return list(_db().values())


def base_rules() -> list[RewriteRule]:
    """One orientation per identity, as stated."""
    return [r for r in _db().values() if not r.name.endswith(".rev")]


def _db() -> dict[str, RewriteRule]:
    global _DB
    if _DB is None:
        db: dict[str, RewriteRule] = {}
        for name, lhs, rhs, source, mirror in _RULES:
            rules = [RewriteRule(name, lhs, rhs, source)]
            if mirror:
                rules.append(rules[0].mirrored(mirror))
            for r in rules:
                db[r.name] = r
                db[r.name + ".rev"] = r.reversed()
        _DB = db
    return _DB


def rule_by_name(name: str) -> RewriteRule:
    try:
        return _db()[name]
    except KeyError:
        raise KeyError(f"no rule named {name!r}") from None


# -- instantiation and verification --------------------------------------------

def _verifiable(rule: RewriteRule) -> RewriteRule:
    if rule.instantiable:
        return rule
    rev = rule.reversed()
    if rev.instantiable:
        return rev
    raise ValueError(f"{rule.name}: neither orientation binds every track")


def instantiate(
    rule: RewriteRule,
    set_sizes: dict[str, frozenset[int]] | None = None,
    idle: int = 0,
    layout: list[int] | None = None,
) -> tuple[Circuit, Circuit]:
    """Both sides of ``rule`` as concrete circuits.

    Input singles come first in order of appearance; each extra wire is
    described by the set variables it belongs to (``set_sizes`` maps a set
    name to the indices of extra wires in it); ``idle`` more wires take no
    part.  ``layout`` optionally permutes the resulting input positions.
    """
    rule = _verifiable(rule)
    lhs = rule.lhs
    singles = list(lhs.order)
    set_sizes = set_sizes or {}
    n_extra = 1 + max((max(v) for v in set_sizes.values() if v), default=-1)
    width = len(singles) + n_extra + idle
    layout = layout or list(range(width))
    keys = {w: Fraction(layout[w]) for w in range(width)}
    t = Tracks(list(range(width)), keys, [], width)
    bind: dict[str, int] = {lhs.inputs[b]: k for k, b in enumerate(singles)}
    sets = {s: frozenset(len(singles) + j for j in set_sizes.get(s, ())) for s in lhs.sets}

    live = set(range(width))
    for pop in lhs.ops:
        if pop.kind == "init":
            tid = t.fresh()
            bind[pop.target] = tid
            keys[tid] = _place(pop.place, bind, live, keys)
            live.add(tid)
            t.ops.append(("init", pop.bit, tid))
        elif pop.kind == "term":
            live.discard(bind[pop.target])
            t.ops.append(("term", pop.bit, bind[pop.target]))
        elif pop.kind == "swap":
            t.ops.append(("swap", bind[pop.names[0]], bind[pop.names[1]]))
        else:
            ctl = frozenset(bind[n] for n in pop.names).union(*(sets[s] for s in pop.sets))
            t.ops.append(("gcx", ctl, bind[pop.target]))
    left = from_tracks(t)
    binding = dict(bind)
    binding.update(sets)
    tr = _replace(rule, t, 0, binding)
    if tr is None:
        raise ValueError(f"{rule.name}: right side does not fit this instance")
    return left, from_tracks(tr)


def _instances_up_to(rule: RewriteRule, max_width: int):
    """All set-membership patterns whose total width is at most ``max_width``."""
    rule = _verifiable(rule)
    svars = sorted(rule.lhs.sets)
    room = max_width - len(rule.lhs.order)
    for extra in range(0, max(room, 0) + 1):
        for masks in itertools.product(range(1 << len(svars)), repeat=extra):
            sizes = {s: frozenset(j for j, m in enumerate(masks) if m >> k & 1) for k, s in enumerate(svars)}
            used = 1 + max((j for j, m in enumerate(masks) if m), default=-1)
            yield sizes, extra - used


def _random_instance(rule: RewriteRule, rng: random.Random, lo: int, hi: int):
    rule = _verifiable(rule)
    svars = sorted(rule.lhs.sets)
    width = rng.randint(max(lo, len(rule.lhs.order)), max(hi, len(rule.lhs.order)))
    extra = width - len(rule.lhs.order)
    sizes = {s: set() for s in svars}
    idle = 0
    if svars:
        for j in range(extra):
            for s in svars:
                if rng.random() < 0.5:
                    sizes[s].add(j)
        idle = 0
    else:
        idle = extra
    layout = list(range(width))
    rng.shuffle(layout)
    return {s: frozenset(v) for s, v in sizes.items()}, idle, layout


@dataclass(frozen=True)
class RuleReport:
    name: str
    source: str
    instances: int
    ok: bool
    detail: str = ""


def verify_rule(
    rule: RewriteRule,
    rng: random.Random,
    exhaustive_width: int = 0,
    n_random: int = 1,
    random_widths: tuple[int, int] = (0, 0),
    generators: bool = False,
    max_wires: int = DEFAULT_MAX_WIRES,
) -> RuleReport:
    """Check ``lhs == rhs`` semantically on a family of instances.

    Always includes the minimal instance (no set members, no idle wires).
    ``generators=True`` also compares both sides after lowering the derived
    gates to ``tof``, ``|1>`` and ``<1|``.
    """
    cases: list[tuple] = [({}, 0, None)]
    if exhaustive_width:
        cases += [(sz, idle, None) for sz, idle in _instances_up_to(rule, exhaustive_width)]
    base = len(_verifiable(rule).lhs.order)
    lo, hi = random_widths if random_widths != (0, 0) else (base + 1, base + 3)
    for _ in range(n_random):
        cases.append(_random_instance(rule, rng, lo, hi))
    count = 0
    for sizes, idle, layout in cases:
        if not rule.lhs.sets and not rule.rhs.sets:
            sizes = {}
        left, right = instantiate(rule, sizes, idle, layout)
        count += 1
        if not equivalent(left, right, max_wires):
            return RuleReport(rule.name, rule.source, count, False, f"differs on {left} vs {right}")
        if generators and not equivalent(lower_to_generators(left), lower_to_generators(right), max_wires):
            return RuleReport(rule.name, rule.source, count, False, "differs after lowering")
    return RuleReport(rule.name, rule.source, count, True)


def check_axioms(
    rng: random.Random | None = None,
    families: tuple[str, ...] | None = None,
    exhaustive_width: int = 0,
    n_random: int = 1,
    random_widths: tuple[int, int] = (0, 0),
) -> list[RuleReport]:
    rng = rng or random.Random(0)
    reports = []
    for rule in base_rules():
        if families and rule.source not in families:
            continue
        reports.append(
            verify_rule(
                rule, rng, exhaustive_width, n_random, random_widths,
                generators=rule.source in ("CNOT", "DEF"),
            )
        )
    return reports


# -- zipping -------------------------------------------------------------------

def unzip(c: Circuit, index: int, k: int) -> Circuit:
    """Split the gate at ``index``: its bottom ``k`` controls stay on the
    gate, the rest are first collected onto a fresh ``|0>`` ancilla."""
    if not 0 <= index < len(c.ops) or not isinstance(c.ops[index], GCX):
        raise PatternMismatch(f"op {index} is not a controlled gate")
    gate = c.ops[index]
    top = len(gate.controls) - k
    if not 1 <= top < len(gate.controls):
        raise PatternMismatch(f"cannot keep {k} of {len(gate.controls)} controls")
    ops = c.ops[:index] + unzip_ops(gate, top) + c.ops[index + 1:]
    return Circuit(c.in_width, ops)


def zip(c: Circuit, index: int, k: int) -> Circuit:  # noqa: A001
    """Inverse of ``unzip``: fold the five-op window at ``index`` into one gate."""
    window = c.ops[index:index + 5]
    if index < 0 or len(window) != 5:
        raise PatternMismatch(f"no five-op window at {index}")
    init, compute, middle, _, term = window
    if not (isinstance(init, Init) and isinstance(compute, GCX) and isinstance(middle, GCX)):
        raise PatternMismatch("window is not an unzipped gate")
    anc = init.position

    def unshift(w):
        return w - 1 if w > anc else w

    lower = [unshift(w) for w in middle.controls if w != anc]
    if anc not in middle.controls or len(lower) != k:
        raise PatternMismatch("window is not an unzipped gate")
    try:
        gate = GCX(tuple(compute.controls) + tuple(lower), unshift(middle.target))
        expected = unzip_ops(gate, len(compute.controls))
    except ValueError as exc:
        raise PatternMismatch(str(exc)) from None
    if tuple(window) != expected:
        raise PatternMismatch("window is not an unzipped gate")
    return Circuit(c.in_width, c.ops[:index] + (gate,) + c.ops[index + 5:])


# -- simplification ------------------------------------------------------------

def _commute(g: tuple, h: tuple) -> bool:
    return g[2] not in h[1] and h[2] not in g[1]


def _pass_cancel(ops: list[tuple]) -> Optional[tuple[list, str]]:
    """Two equal gates with only commuting ops between them cancel."""
    for i, g in enumerate(ops):
        if g[0] != "gcx":
            continue
        wires = g[1] | {g[2]}
        for j in range(i + 1, len(ops)):
            h = ops[j]
            if h == g:
                return ops[:i] + ops[i + 1:j] + ops[j + 1:], "IWAMA.i"
            if h[0] == "gcx" and _commute(g, h):
                continue
            if h[0] != "gcx" and not (_touches(h) & wires):
                continue
            break
    return None


def _pass_absorb(ops: list[tuple]) -> Optional[tuple[list, str]]:
    """Gates controlled by a fresh ``|0>`` never fire."""
    for i, op in enumerate(ops):
        if op[0] != "init" or op[1] != 0:
            continue
        a = op[2]
        dead = []
        for j in range(i + 1, len(ops)):
            h = ops[j]
            if a not in _touches(h):
                continue
            if h[0] == "gcx" and a in h[1]:
                dead.append(j)
                continue
            break
        if dead:
            return [h for j, h in enumerate(ops) if j not in dead], "IWAMA.ii"
    return None


def _pass_ancilla(ops: list[tuple]) -> Optional[tuple[list, str]]:
    """``|b>`` followed by ``<b|`` on the same track, with the track only ever
    used as a control in between, disappears (a ``|1>`` control is dropped)."""
    for i, op in enumerate(ops):
        if op[0] != "init":
            continue
        a, b = op[2], op[1]
        uses = []
        for j in range(i + 1, len(ops)):
            h = ops[j]
            if a not in _touches(h):
                continue
            if h[0] == "gcx" and a in h[1] and b == 1:
                uses.append(j)
                continue
            if h[0] == "term" and h[1] == b:
                out = []
                for k, x in enumerate(ops):
                    if k in (i, j):
                        continue
                    out.append(("gcx", x[1] - {a}, x[2]) if k in uses else x)
                return out, "TOF.8" if b else "TOF.extra"
            break
    return None


def _pass_flip(ops: list[tuple]) -> Optional[tuple[list, str]]:
    """``|b>`` then a NOT on that track is ``|1-b>``."""
    for i, op in enumerate(ops):
        if op[0] != "init":
            continue
        a = op[2]
        for j in range(i + 1, len(ops)):
            h = ops[j]
            if a not in _touches(h):
                continue
            if h == ("gcx", frozenset(), a):
                out = list(ops)
                out[i] = ("init", 1 - op[1], a)
                del out[j]
                return out, "DEF.ket0"
            break
    return None


def _nowhere_defined(ops: list[tuple]) -> bool:
    """Some track is prepared in one state and demanded in the other
    without anything acting on it in between."""
    for i, op in enumerate(ops):
        if op[0] != "init":
            continue
        for h in ops[i + 1:]:
            if op[2] in _touches(h):
                if h[0] == "term" and h[1] != op[1]:
                    return True
                break
    return False


_PASSES: list[Callable] = [_pass_cancel, _pass_absorb, _pass_ancilla, _pass_flip]


def _step(c: Circuit) -> Optional[tuple[Circuit, str]]:
    for mirrored in (False, True):
        src = dagger(c) if mirrored else c
        t = to_tracks(src)
        for p in _PASSES:
            res = p(t.ops)
            if res is not None:
                t.ops, name = res
                out = from_tracks(t)
                return (dagger(out) if mirrored else out), name + (".dag" if mirrored else "")
    t = to_tracks(c)
    if _nowhere_defined(t.ops):
        om = omega(c.in_width, c.out_width)
        if len(om.ops) < len(c.ops):
            return om, "OMEGA"
    return None


def simplify(c: Circuit, log: list | None = None) -> Circuit:
    """Greedy shrinking to a fixed point; every step removes at least one op
    and preserves the semantics."""
    while True:
        step = _step(c)
        if step is None:
            return c
        c, name = step
        if log is not None:
            log.append(name)
