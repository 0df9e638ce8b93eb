import itertools
import random

import pytest

from tofalg.circuit import GCX, Circuit, Init, Swap, Term, compose, dagger, identity, mk_not, restriction
from tofalg.errors import IndexOutOfRange, NotIdempotent, NotPolynomialForm
from tofalg.fpinj import BitVec, h0, is_partial_identity, pin_compose, pin_restriction
from tofalg.poly import (
    Polyform, Polynomial, anf_from_indicator, circuit_to_polyform, circuit_to_polynomial_form,
    format_poly, normalize_idempotent, parse_poly, poly_eval, poly_mul, poly_subst,
    polyform_to_circuit, restriction_polyform, sandwich, zero_set,
)
from tofalg.sampling import random_circuit

X = Polynomial.var
ONE = Polynomial.one()
ZERO = Polynomial.zero()


def brute_anf(n, defined):
    """Coefficient of x^S is the parity of the indicator over subsets of S."""
    f = [0 if x in defined else 1 for x in range(1 << n)]
    monos = []
    for s in range(1 << n):
        acc = 0
        for t in range(1 << n):
            if t & s == t:
                acc ^= f[t]
        if acc:
            monos.append([i for i in range(n) if s >> (n - 1 - i) & 1])
    return Polynomial.from_terms(monos)


def all_polys(n):
    monos = [frozenset(c) for k in range(n + 1) for c in itertools.combinations(range(n), k)]
    for mask in range(1 << len(monos)):
        yield Polynomial(frozenset(m for j, m in enumerate(monos) if mask >> j & 1))


# the worked example: x2x4 + x2x3x4 + x4 with one-based names
EXAMPLE = parse_poly("x1x3 + x1x2x3 + x3")


def test_example_evaluation():
    assert poly_eval(EXAMPLE, BitVec.of("0101")) == 0


def test_eval_constants():
    assert poly_eval(ZERO, [1, 0]) == 0
    assert poly_eval(ONE, []) == 1


def test_eval_out_of_range():
    with pytest.raises(IndexOutOfRange):
        poly_eval(X(3), [0, 1])


def test_mod2_cancellation():
    assert X(0) * X(1) + X(0) * X(1) == ZERO
    assert poly_mul(X(0), X(0)) == X(0)


def test_subst_example():
    assert poly_subst(X(1), 1, X(0)) == X(1) + X(0)


def test_text_roundtrip():
    p = parse_poly("x0x1 + x3 + 1")
    assert format_poly(p) == "1 + x3 + x0x1"
    assert parse_poly(format_poly(p)) == p
    assert format_poly(ZERO) == "0"
    assert parse_poly("0") == ZERO


def test_canonical_order():
    p = parse_poly("x0x1x2 + x2 + x0x1 + 1 + x0x2")
    assert p.terms() == [(), (2,), (0, 1), (0, 2), (0, 1, 2)]


@pytest.mark.parametrize("n, defined, expected", [
    (2, {0, 1, 2, 3}, "0"),
    (2, set(), "1"),
    (2, {0b00, 0b01, 0b10}, "x0x1"),
    (1, {1}, "1 + x0"),
])
def test_anf_examples(n, defined, expected):
    assert anf_from_indicator(n, defined) == parse_poly(expected)


@pytest.mark.parametrize("n", range(0, 5))
def test_anf_exhaustive(n):
    for mask in range(1 << (1 << n)):
        defined = {x for x in range(1 << n) if mask >> x & 1}
        p = anf_from_indicator(n, defined)
        assert zero_set(p, n) == defined
        if n <= 3:
            assert p == brute_anf(n, defined)


@pytest.mark.parametrize("n", [6, 8, 10])
def test_anf_random(n):
    rng = random.Random(n)
    for _ in range(5):
        defined = {x for x in range(1 << n) if rng.random() < 0.5}
        p = anf_from_indicator(n, defined)
        assert zero_set(p, n) == defined


def test_polyform_circuit_shape():
    c = polyform_to_circuit(Polyform(4, EXAMPLE))
    assert c.ops == (
        Init(0, 4), GCX((3,), 4), GCX((1, 3), 4), GCX((1, 2, 3), 4), Term(0, 4),
    )


def test_polyform_trivial_cases():
    assert h0(polyform_to_circuit(Polyform(2, ZERO))) == h0(identity(2))
    c = polyform_to_circuit(Polyform(0, ONE))
    assert c.ops == (Init(0, 0), GCX((), 0), Term(0, 0))
    assert len(h0(c)) == 0


@pytest.mark.parametrize("n", range(0, 4))
def test_polyforms_are_idempotents(n):
    for p in all_polys(n):
        sem = h0(polyform_to_circuit(Polyform(n, p)))
        assert is_partial_identity(sem)
        assert sem.domain() == zero_set(p, n)
        assert pin_compose(sem, sem) == sem


def test_polyforms_random_wider():
    rng = random.Random(7)
    for n in range(4, 9):
        monos = [frozenset(rng.sample(range(n), rng.randint(0, n))) for _ in range(rng.randint(0, 8))]
        p = Polynomial.from_terms(monos)
        sem = h0(polyform_to_circuit(Polyform(n, p)))
        assert is_partial_identity(sem) and sem.domain() == zero_set(p, n)


def test_polynomial_form_caption_circuit():
    # caption lists x1x2 three times; two copies cancel
    gates = [(0, 1), (1, 3), (0, 1), (0, 1), (1, 2, 3), (3,)]
    c = Circuit(5, tuple(GCX(g, 4) for g in gates))
    assert circuit_to_polynomial_form(c) == parse_poly("x0x1 + x1x3 + x1x2x3 + x3")


def test_polynomial_form_drawn_circuit():
    # the drawing has five gates and two copies of x1x2, which cancel
    gates = [(0, 1), (1, 3), (0, 1), (1, 2, 3), (3,)]
    c = Circuit(5, tuple(GCX(g, 4) for g in gates))
    assert circuit_to_polynomial_form(c) == EXAMPLE


def test_polynomial_form_errors():
    assert circuit_to_polynomial_form(Circuit(3)) == ZERO
    with pytest.raises(NotPolynomialForm):
        circuit_to_polynomial_form(Circuit(3, (GCX((0,), 1),)))
    with pytest.raises(NotPolynomialForm):
        circuit_to_polynomial_form(Circuit(3, (Swap(0, 2),)))


def test_circuit_to_polyform_roundtrip():
    pf = Polyform(4, EXAMPLE)
    assert circuit_to_polyform(polyform_to_circuit(pf)) == pf


def _sandwich_oracle(op, e, in_width):
    c = compose(compose(Circuit(in_width, (op,)), polyform_to_circuit(e)), dagger(Circuit(in_width, (op,))))
    return h0(c)


def test_sandwich_examples():
    assert sandwich(GCX((0,), 1), Polyform(2, X(1))) == Polyform(2, X(1) + X(0))
    assert sandwich(Init(1, 0), Polyform(2, X(0) * X(1))) == Polyform(1, X(0))
    assert sandwich(Term(1, 0), Polyform(0, ZERO)) == Polyform(1, X(0) + ONE)


def _random_poly(rng, n):
    monos = [frozenset(rng.sample(range(n), rng.randint(0, n))) for _ in range(rng.randint(0, 5))]
    return Polynomial.from_terms(monos)


@pytest.mark.parametrize("seed", range(60))
def test_sandwich_gate_by_gate(seed):
    rng = random.Random(seed)
    kind = seed % 4
    n = rng.randint(2, 4)
    if kind == 0:
        t = rng.randrange(n)
        op = GCX(tuple(rng.sample([w for w in range(n) if w != t], rng.randint(0, n - 1))), t)
        in_width, out_width = n, n
    elif kind == 1:
        i, j = rng.sample(range(n), 2)
        op, in_width, out_width = Swap(i, j), n, n
    elif kind == 2:
        op, in_width, out_width = Init(rng.randint(0, 1), rng.randint(0, n - 1)), n - 1, n
    else:
        op, in_width, out_width = Term(rng.randint(0, 1), rng.randint(0, n)), n + 1, n
    e = Polyform(out_width, _random_poly(rng, out_width))
    got = sandwich(op, e)
    assert got.width == in_width
    assert h0(polyform_to_circuit(got)) == _sandwich_oracle(op, e, in_width)


def test_restriction_polyform_examples():
    assert restriction_polyform(identity(3)) == Polyform(3, ZERO)
    assert restriction_polyform(Circuit(1, (Term(1, 0),))) == Polyform(1, X(0) + ONE)


@pytest.mark.parametrize("seed", range(50))
def test_restriction_polyform_soundness(seed):
    rng = random.Random(seed)
    c = random_circuit(rng, rng.randint(0, 6), rng.randint(0, 12))
    pf = restriction_polyform(c)
    sem = h0(c)
    assert pf.poly == anf_from_indicator(c.in_width, sem.domain())
    assert h0(polyform_to_circuit(pf)) == pin_restriction(sem)


def test_normalize_example():
    c = polyform_to_circuit(Polyform(4, EXAMPLE))
    assert normalize_idempotent(c) == Polyform(4, EXAMPLE)


def test_normalize_rejects_non_idempotent():
    with pytest.raises(NotIdempotent):
        normalize_idempotent(mk_not())
    with pytest.raises(NotIdempotent):
        normalize_idempotent(Circuit(1, (Init(0, 1),)))


@pytest.mark.parametrize("seed", range(20))
def test_normalize_canonical(seed):
    rng = random.Random(seed)
    c = random_circuit(rng, 4, 8)
    a = restriction(c)
    # a different circuit with the same semantics: the polyform itself
    b = polyform_to_circuit(restriction_polyform(c))
    assert normalize_idempotent(a) == normalize_idempotent(b)


@pytest.mark.parametrize("seed", range(10))
def test_conjugated_polyform(seed):
    rng = random.Random(seed)
    n = 4
    e = Polyform(n, _random_poly(rng, n))
    g = random_circuit(rng, n, 5, max_width=n, term_weight=0.0)
    g = Circuit(n, tuple(op for op in g.ops if isinstance(op, GCX)))
    conj = compose(compose(g, polyform_to_circuit(e)), dagger(g))
    pf = normalize_idempotent(conj)
    assert len(zero_set(pf.poly, n)) == len(zero_set(e.poly, n))
    expected = e
    for op in reversed(g.ops):
        expected = sandwich(op, expected)
    assert pf == expected
