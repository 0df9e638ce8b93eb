import random

import pytest

from tofalg.circuit import (
    GCX, Circuit, Init, Swap, Term, compose, expand_gcnot, identity, mk_cnot, mk_gcnot, mk_not,
)
from tofalg.errors import PatternMismatch, StaleMatch
from tofalg.fpinj import equivalent, h0
from tofalg.rewrite import (
    Match, RewriteRule, apply, base_rules, find_matches, from_tracks, instantiate, parse_side,
    rule_by_name, rule_db, simplify, to_tracks, unzip, verify_rule, zip,
)
from tofalg.sampling import random_circuit


def test_tracks_roundtrip():
    rng = random.Random(0)
    for _ in range(100):
        c = random_circuit(rng, rng.randint(0, 5), rng.randint(0, 15))
        assert from_tracks(to_tracks(c)) == c


def test_pattern_lifetimes():
    side = parse_side("init 1 a; cnot a w; term 1 a; init 1 a; term 1 a")
    assert side.inputs == {"w": "w#0"}
    assert side.outputs == {"w": "w#0"}
    assert side.lifetimes == {"a#0", "a#1", "w#0"}


@pytest.mark.parametrize("bad", ["frob a", "gcx a b", "init 2 a", "term 1 a; cnot a b", "init 1 a; init 1 a"])
def test_pattern_errors(bad):
    with pytest.raises(ValueError):
        parse_side(bad)


def test_db_contents():
    names = {r.name for r in rule_db()}
    for n in ["CNOT.%d" % i for i in range(1, 10)] + ["TOF.%d" % i for i in range(1, 17)]:
        assert n in names
        assert n + ".rev" in names
    for n in ["TOF.5.5", "TOF.extra", "IWAMA.i", "IWAMA.ii", "IWAMA.iii", "IWAMA.iv",
              "IWAMA.v", "IWAMA.vi", "ZIP.i", "ZIP.ii", "ZIP.iii", "TRANSP"]:
        assert n in names
    assert rule_by_name("IWAMA.v").lhs.sets == {"X", "Y"}
    left, right = instantiate(rule_by_name("TOF.9"))
    assert left.ops == (GCX((0, 1), 2), GCX((0, 1), 2)) and right.ops == ()


def test_every_rule_has_an_instantiable_orientation():
    for r in base_rules():
        assert r.instantiable or r.reversed().instantiable, r.name


@pytest.mark.parametrize("rule", base_rules(), ids=lambda r: r.name)
def test_rule_sound(rule):
    report = verify_rule(rule, random.Random(1), exhaustive_width=4, n_random=3)
    assert report.ok, report.detail


def test_wrong_rule_is_caught():
    bad = RewriteRule("BAD", "gcx X -> x; gcx x Y -> y", "gcx x Y -> y; gcx X -> x", "test")
    assert not verify_rule(bad, random.Random(0)).ok


def test_find_matches_cnot_pair():
    c = compose(mk_cnot(), mk_cnot())
    ms = find_matches(c, "IWAMA.i")
    assert [m.position for m in ms] == [0]
    assert apply(c, ms[0]) == identity(2)


def test_find_matches_empty_circuit():
    assert find_matches(identity(3), "IWAMA.i") == []


def test_zero_control_cancellation():
    c = Circuit(1, (GCX((), 0), GCX((), 0)))
    ms = find_matches(c, "IWAMA.i")
    assert ms and apply(c, ms[0]).ops == ()


def test_tof14_makes_swap():
    c = Circuit(2, (GCX((0,), 1), GCX((1,), 0), GCX((0,), 1)))
    m = find_matches(c, "TOF.14")[0]
    assert apply(c, m).ops == (Swap(0, 1),)


def test_matches_inside_larger_circuit():
    c = Circuit(4, (GCX((3,), 0), GCX((0, 2), 1), GCX((0, 2), 1), GCX((), 3)))
    ms = find_matches(c, "TOF.9")
    assert [m.position for m in ms] == [1, 1]  # both orders of the two controls
    assert apply(c, ms[0]).ops == (GCX((3,), 0), GCX((), 3))


def test_stale_match():
    c = compose(mk_cnot(), mk_cnot())
    m = find_matches(c, "IWAMA.i")[0]
    with pytest.raises(StaleMatch):
        apply(mk_cnot(), m)
    with pytest.raises(StaleMatch):
        apply(c, Match("IWAMA.i", 1, m.binding))


def test_ancilla_rules_match_across_positions():
    # |1> created mid-circuit and used as a toffoli control
    c = Circuit(2, (Init(1, 1), GCX((0, 1), 2), Term(1, 1)))
    ms = find_matches(c, "TOF.1")
    assert ms
    d = apply(c, ms[0])
    assert equivalent(c, d)
    assert GCX((0,), 2) in d.ops


@pytest.mark.parametrize("seed", range(8))
def test_random_applications_preserve_semantics(seed):
    rng = random.Random(seed)
    rules = [r for r in rule_db() if r.applicable]
    done = 0
    while done < 40:
        c = random_circuit(rng, rng.randint(1, 5), rng.randint(1, 10))
        ms = [m for r in rng.sample(rules, 20) for m in find_matches(c, r)]
        if not ms:
            continue
        d = apply(c, rng.choice(ms))
        assert h0(d) == h0(c)
        done += 1


def test_simplify_cancels():
    c = Circuit(2, (GCX((0,), 1), GCX((0,), 1), GCX((), 0), GCX((), 0)))
    assert simplify(c).ops == ()


def test_simplify_absorbs_zero_control():
    c = Circuit(2, (Init(0, 2), GCX((2, 0), 1), GCX((1, 2), 0), GCX((0,), 2), Term(1, 2)))
    s = simplify(c)
    assert len(s) < len(c)
    assert equivalent(s, c)


def test_simplify_commuting_cancellation():
    c = Circuit(3, (GCX((0,), 1), GCX((0,), 2), GCX((0,), 1)))
    assert simplify(c).ops == (GCX((0,), 2),)


def test_simplify_ancilla_pairs():
    assert simplify(Circuit(1, (Init(1, 0), Term(1, 0)))).ops == ()
    assert simplify(Circuit(1, (Init(0, 1), Term(0, 1)))).ops == ()
    c = Circuit(2, (Init(1, 0), GCX((0, 1), 2), Term(1, 0)))
    assert simplify(c) == mk_cnot()


def test_simplify_flips_ket():
    c = Circuit(0, (Init(1, 0), GCX((), 0)))
    assert simplify(c).ops == (Init(0, 0),)


@pytest.mark.parametrize("seed", range(10))
def test_simplify_random(seed):
    rng = random.Random(seed)
    for _ in range(30):
        c = random_circuit(rng, rng.randint(0, 5), rng.randint(0, 14))
        s = simplify(c)
        assert h0(s) == h0(c)
        assert len(s) <= len(c)
        assert simplify(s) == s


def test_simplify_log():
    log = []
    simplify(compose(mk_not(), mk_not()), log)
    assert log == ["IWAMA.i"]


def test_unzip_zip_roundtrip():
    c = Circuit(5, (GCX((0, 1, 2, 3), 4),))
    u = unzip(c, 0, 2)
    assert len(u) == 5 and u.ops[0] == Init(0, 2)
    assert h0(u) == h0(c)
    assert zip(u, 0, 2) == c


@pytest.mark.parametrize("k", [1, 2, 3])
def test_unzip_preserves_semantics(k):
    c = Circuit(5, (GCX((0, 1, 2, 3), 4),))
    assert equivalent(unzip(c, 0, k), c)


def test_zip_mismatch():
    with pytest.raises(PatternMismatch):
        zip(mk_gcnot(3, [0, 1], 2), 0, 1)
    with pytest.raises(PatternMismatch):
        unzip(mk_cnot(), 0, 1)
    u = unzip(Circuit(4, (GCX((0, 1, 2), 3),)), 0, 1)
    with pytest.raises(PatternMismatch):
        zip(u, 0, 2)


def test_expanded_gate_is_nested_unzip():
    c = mk_gcnot(5, range(4), 4)
    e = expand_gcnot(c)
    assert e.ops[:2] == (Init(0, 2), GCX((0, 1), 2))
    assert equivalent(e, c)
