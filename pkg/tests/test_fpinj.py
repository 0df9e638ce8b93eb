import random

import pytest

from tofalg.circuit import (
    Circuit, GCX, Init, Term, compose, dagger, identity, ket, mk_bra1, mk_cnot, mk_ket0,
    mk_ket1, mk_not, mk_tof, omega, restriction, tensor,
)
from tofalg.errors import CapExceeded, WidthMismatch
from tofalg.fpinj import (
    BitVec, Nowhere, PartialInjection, TotalPoint, _h0_int, _h0_numpy, classify_point,
    equivalent, eval_op, evaluate, h0, is_partial_identity, pin_compose, pin_dagger,
    pin_empty, pin_identity, pin_restriction, pin_tensor,
)
from tofalg.sampling import random_circuit, random_partial_injection


def bv(s):
    return BitVec.of(s)


def reference_table(c):
    """Gate-stepping oracle, independent of the integer and array evaluators."""
    out = {}
    for x in range(1 << c.in_width):
        y = evaluate(c, BitVec.from_int(x, c.in_width))
        if y is not None:
            out[x] = y.value
    return out


def test_bitvec_int_roundtrip():
    for w in range(5):
        for v in range(1 << w):
            assert BitVec.from_int(v, w).value == v
    assert BitVec.of("100").value == 4  # wire 0 is the high bit


@pytest.mark.parametrize("x, y", [("110", "111"), ("011", "011"), ("111", "110"), ("000", "000")])
def test_tof_steps(x, y):
    assert eval_op(GCX((0, 1), 2), bv(x)) == bv(y)


def test_term_mismatch_is_undefined():
    assert eval_op(Term(1, 0), bv("0")) is None
    assert eval_op(Term(0, 0), bv("0")) == BitVec(0, ())


def test_init_inserts():
    assert eval_op(Init(1, 1), bv("00")) == bv("010")


def test_eval_cnot():
    assert evaluate(mk_cnot(), bv("10")) == bv("11")


def test_eval_omega_undefined():
    assert evaluate(omega(0, 0), BitVec(0, ())) is None


def test_eval_width_checked():
    with pytest.raises(WidthMismatch):
        evaluate(mk_cnot(), bv("1"))


def test_h0_cnot_table():
    assert h0(mk_cnot()).as_dict() == {0b00: 0b00, 0b01: 0b01, 0b10: 0b11, 0b11: 0b10}


def test_h0_tof_is_bijection_fixing_zero_controls():
    t = h0(mk_tof())
    assert t.is_total() and len(t.image()) == 8
    for x, y in t.table:
        if (x >> 1) != 0b11:
            assert x == y


def test_h0_omega_empty():
    assert h0(omega(0, 0)) == pin_empty(0, 0)


@pytest.mark.parametrize("seed", range(40))
def test_h0_matches_gate_stepping(seed):
    rng = random.Random(seed)
    c = random_circuit(rng, rng.randint(0, 6), rng.randint(0, 15))
    assert h0(c).as_dict() == reference_table(c)


@pytest.mark.parametrize("seed", range(10))
def test_int_and_array_evaluators_agree(seed):
    rng = random.Random(100 + seed)
    c = random_circuit(rng, rng.randint(0, 7), rng.randint(0, 20), max_width=8)
    assert _h0_int(c) == _h0_numpy(c)


def test_h0_wide_path():
    c = Circuit(12, tuple(GCX((i,), i + 1) for i in range(11)))
    t = h0(c)
    assert t.is_total()
    assert t.as_dict() == reference_table(c)


def test_cap_refused():
    with pytest.raises(CapExceeded):
        h0(identity(5), max_wires=4)
    with pytest.raises(CapExceeded):
        equivalent(identity(5), identity(5), max_wires=4)


def test_partial_injection_rejects_non_injective():
    with pytest.raises(ValueError):
        PartialInjection(1, 1, ((0, 1), (1, 1)))


def test_pin_dagger_and_compose():
    f = PartialInjection.from_mapping(2, 2, {"10": "11"})
    assert pin_dagger(f) == PartialInjection.from_mapping(2, 2, {"11": "10"})
    with pytest.raises(WidthMismatch):
        pin_compose(f, pin_identity(3))


@pytest.mark.parametrize("seed", range(30))
def test_partial_inverse_law(seed):
    f = random_partial_injection(random.Random(seed), 3, 2)
    assert pin_compose(f, pin_dagger(f)) == pin_restriction(f)
    assert pin_compose(pin_compose(f, pin_dagger(f)), f) == f


@pytest.mark.parametrize("seed", range(30))
def test_restriction_axioms(seed):
    rng = random.Random(seed)
    f = random_partial_injection(rng, 2, 2)
    g = random_partial_injection(rng, 2, 2)
    h = random_partial_injection(rng, 2, 3)
    r = pin_restriction
    assert pin_compose(r(f), f) == f
    assert pin_compose(r(f), r(g)) == pin_compose(r(g), r(f))
    assert r(pin_compose(r(g), f)) == pin_compose(r(f), r(g))
    assert pin_compose(f, r(h)) == pin_compose(r(pin_compose(f, h)), f)


def test_tensor_with_empty_is_empty():
    f = random_partial_injection(random.Random(1), 2, 3, density=1.0)
    assert pin_tensor(f, pin_empty(0, 0)) == pin_empty(2, 3)


def test_tensor_semantics_match_circuit_tensor():
    a, b = mk_cnot(), mk_tof()
    assert h0(tensor(a, b)) == pin_tensor(h0(a), h0(b))


@pytest.mark.parametrize("seed", range(25))
def test_functoriality(seed):
    rng = random.Random(seed)
    f = random_circuit(rng, 3, 6, max_width=5)
    g = random_circuit(rng, f.out_width, 6, max_width=5)
    assert h0(compose(f, g)) == pin_compose(h0(f), h0(g))
    assert h0(dagger(f)) == pin_dagger(h0(f))
    assert h0(restriction(f)) == pin_restriction(h0(f))


@pytest.mark.parametrize("seed", range(25))
def test_inverse_laws_semantically(seed):
    rng = random.Random(seed)
    c = random_circuit(rng, 4, 10)
    d = random_circuit(rng, 4, 10)
    assert h0(compose(compose(c, dagger(c)), c)) == h0(c)
    assert equivalent(compose(restriction(c), restriction(d)), compose(restriction(d), restriction(c)))


def test_equivalent_examples():
    tof9 = compose(mk_tof(), mk_tof())
    assert equivalent(tof9, identity(3))
    assert not equivalent(mk_not(), identity(1))
    assert equivalent(compose(mk_cnot(), mk_cnot()), identity(2))
    with pytest.raises(WidthMismatch):
        equivalent(identity(1), identity(2))


def test_classify_points():
    assert classify_point(tensor(mk_ket1(), mk_ket0())) == TotalPoint(bv("10"))
    assert classify_point(compose(compose(mk_ket0(), mk_bra1()), mk_ket1())) is Nowhere
    assert classify_point(ket("0110")) == TotalPoint(bv("0110"))
    with pytest.raises(WidthMismatch):
        classify_point(identity(1))


def test_tensor_of_points_concatenates():
    c = tensor(tensor(ket("1"), ket("01")), ket("1"))
    assert classify_point(c) == TotalPoint(bv("1011"))


def test_is_partial_identity():
    assert is_partial_identity(pin_identity(2))
    assert not is_partial_identity(PartialInjection.from_mapping(2, 2, {"10": "11"}))
    with pytest.raises(WidthMismatch):
        is_partial_identity(pin_empty(1, 2))


def test_bra1_semantics():
    assert h0(mk_bra1()).as_dict() == {1: 0}


@pytest.mark.parametrize("seed", range(10))
def test_tsv_roundtrip(seed):
    rng = random.Random(seed)
    f = random_partial_injection(rng, rng.randint(0, 3), rng.randint(0, 3))
    text = f.to_tsv()
    assert PartialInjection.from_tsv(text) == f
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert lines == sorted(lines)


def test_tsv_format():
    f = PartialInjection.from_mapping(2, 1, {"10": "1", "01": "0"})
    assert f.to_tsv() == "# in_width 2\n# out_width 1\n01\t0\n10\t1\n"


def test_tsv_zero_width_row():
    p = pin_identity(0)
    assert PartialInjection.from_tsv(p.to_tsv()) == p
